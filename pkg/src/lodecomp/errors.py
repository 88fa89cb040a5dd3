"""Exception types shared across the package.

Invalid arguments raise plain :class:`ValueError`; the classes here cover
the two structured failure modes: operations that are mathematically
undefined for the given input, and numerical verification failures that
must never be returned silently.
"""

from __future__ import annotations


class UnsupportedOperationError(RuntimeError):
    """The operation is undefined for this input (e.g. bipartite-only gaps)."""


class DegenerateSpectrumError(UnsupportedOperationError):
    """A brute-force routine that assumes non-degenerate spectra found degeneracy."""


class InternalConsistencyError(RuntimeError):
    """A constructed decomposition failed its own verification.

    Carries the offending verification report (or residual description) so
    callers can inspect which tolerance broke down.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report

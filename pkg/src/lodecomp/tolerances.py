"""Numerical tolerances used throughout the decomposition pipeline."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    """Bundle of cutoffs shared by the spectral and decomposition layers.

    Attributes
    ----------
    t_deg : float
        Degeneracy clustering tolerance: eigenvalues closer than this are
        treated as indistinguishable.
    t_supp : float
        Support membership cutoff: eigenvalues / squared singular values at
        or below this count as zero.
    t_edge : float
        Correlation-graph edge threshold on squared joint-projection norms
        (relative to a unit-norm state); also the cross-block cutoff in the
        block-diagonalization search.
    w_min : float
        Branch weight floor: projected components below this are treated as
        exactly zero.
    t_nindep : float
        Maximum allowed residual between branch vectors extracted via
        different subsystems' support projectors.
    sbd_stable_rounds : int
        Consecutive unchanged refinement rounds required before the
        randomized block-diagonalization search terminates.
    """

    t_deg: float = 1e-8
    t_supp: float = 1e-10
    t_edge: float = 1e-10
    w_min: float = 1e-12
    t_nindep: float = 1e-8
    sbd_stable_rounds: int = 3


DEFAULT_TOLERANCES = Tolerances()

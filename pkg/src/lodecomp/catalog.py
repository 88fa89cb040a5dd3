"""Generators for the reference states used throughout the library and tests.

Covers the named multipartite examples (GHZ, W, weighted diagonal states,
the three pairwise-entangled counterexamples) plus seeded random families.
Every generator is deterministic given its arguments and seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .tensor import StateTensor, apply_matrix_at, flat_index

KINDS = ("ghz", "w", "z", "u", "v", "x", "product", "random", "random_local_dressing")

WEIGHT_SUM_ATOL = 1e-9


@dataclass(frozen=True)
class StateSpec:
    """Declarative recipe for a catalog state.

    Only the fields a kind actually consumes may be set; the rest must be
    left at None.  ``base`` names the state that ``random_local_dressing``
    dresses with seeded random local unitaries.
    """

    kind: str
    n_subsystems: int | None = None
    dims: tuple | None = None
    weights: tuple | None = None
    seed: int | None = None
    split: int | None = None
    base: "StateSpec | None" = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown state kind {self.kind!r}; expected one of {KINDS}")
        if self.dims is not None:
            object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        if self.weights is not None:
            object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))


def ghz_state(n_subsystems: int = 3, dim: int = 2) -> StateTensor:
    """(|0...0> + |1...1> + ... + |d-1 ... d-1>)/sqrt(d) on n equal subsystems."""
    if n_subsystems < 2 or dim < 2:
        raise ValueError("ghz needs at least two subsystems of dimension at least 2")
    dims = (dim,) * n_subsystems
    amps = np.zeros(dim**n_subsystems, dtype=np.complex128)
    for a in range(dim):
        amps[flat_index(dims, (a,) * n_subsystems)] = 1.0
    return StateTensor(dims, amps / math.sqrt(dim))


def w_state(n_subsystems: int = 3) -> StateTensor:
    """Equal superposition of the single-excitation qubit basis states."""
    if n_subsystems < 2:
        raise ValueError("w needs at least two subsystems")
    dims = (2,) * n_subsystems
    amps = np.zeros(2**n_subsystems, dtype=np.complex128)
    for k in range(n_subsystems):
        multi = [0] * n_subsystems
        multi[k] = 1
        amps[flat_index(dims, multi)] = 1.0
    return StateTensor(dims, amps / math.sqrt(n_subsystems))


def z_state(weights, n_subsystems: int = 3, dims=None) -> StateTensor:
    """Weighted diagonal state sum_i sqrt(p_i) |i>^(xN).

    The weights must sum to 1 and there must be at least as many levels on
    every subsystem as there are weights.
    """
    weights = [float(w) for w in weights]
    if not weights or any(w < 0 for w in weights):
        raise ValueError("weights must be nonempty and nonnegative")
    if abs(sum(weights) - 1.0) > WEIGHT_SUM_ATOL:
        raise ValueError(f"weights must sum to 1, got {sum(weights)}")
    if dims is None:
        dims = (len(weights),) * n_subsystems
    dims = tuple(int(d) for d in dims)
    if len(dims) < 2:
        raise ValueError("need at least two subsystems")
    if len(weights) > min(dims):
        raise ValueError(f"{len(weights)} weights do not fit in dims {dims}")
    amps = np.zeros(math.prod(dims), dtype=np.complex128)
    for a, w in enumerate(weights):
        amps[flat_index(dims, (a,) * len(dims))] = math.sqrt(w)
    return StateTensor(dims, amps)


def u_state() -> StateTensor:
    """A Bell pair on the first two qubits with an uncorrelated third."""
    amps = np.zeros(8, dtype=np.complex128)
    amps[flat_index((2, 2, 2), (0, 0, 0))] = 1.0
    amps[flat_index((2, 2, 2), (1, 1, 0))] = 1.0
    return StateTensor((2, 2, 2), amps / math.sqrt(2))


def v_state() -> StateTensor:
    """Two entangled qubits shared along a chain: (0,1) and (1,2).

    Subsystem dimensions are (2, 4, 2); the middle subsystem holds both
    shared qubits, with levels 0..3 appearing as in the defining expansion
    (|00> + |21>) for the first level of subsystem 0 and (|10> + |31>) for
    the second.  All three reduced states are mixed, yet the state has no
    nontrivial locally orthogonal decomposition.
    """
    dims = (2, 4, 2)
    amps = np.zeros(16, dtype=np.complex128)
    for multi in ((0, 0, 0), (0, 2, 1), (1, 1, 0), (1, 3, 1)):
        amps[flat_index(dims, multi)] = 1.0
    return StateTensor(dims, amps / 2.0)


def x_state() -> StateTensor:
    """Three Bell pairs shared pairwise around a ring of three parties.

    Each party holds two qubits, one entangled with each neighbor, giving
    local dimension 4.  Within a party the first (slow) qubit pairs with
    the left neighbor and the second with the right neighbor.
    """
    dims = (4, 4, 4)
    amps = np.zeros(64, dtype=np.complex128)
    # qubits around the ring: party A = (q0, q1), B = (q2, q3), C = (q4, q5);
    # Bell pairs on (q1, q2), (q3, q4), (q5, q0)
    for b_ab in range(2):
        for b_bc in range(2):
            for b_ca in range(2):
                a = 2 * b_ca + b_ab
                b = 2 * b_ab + b_bc
                c = 2 * b_bc + b_ca
                amps[flat_index(dims, (a, b, c))] = 1.0
    return StateTensor(dims, amps / math.sqrt(8))


def random_state(dims, seed: int = 0, rng=None) -> StateTensor:
    """Normalized complex Gaussian amplitudes: rotation-invariant ensemble."""
    dims = tuple(int(d) for d in dims)
    if rng is None:
        rng = np.random.default_rng(seed)
    total = math.prod(dims)
    amps = rng.standard_normal(total) + 1j * rng.standard_normal(total)
    return StateTensor(dims, amps / np.linalg.norm(amps))


def product_state(dims, split: int = 1, seed: int = 0) -> StateTensor:
    """Tensor product of two independent random states across one split.

    Either factor may cover a single subsystem, so the factors are drawn
    as raw normalized Gaussian vectors and only the product is a state.
    """
    dims = tuple(int(d) for d in dims)
    if not 1 <= split <= len(dims) - 1:
        raise ValueError(f"split must fall strictly inside dims, got {split}")
    rng = np.random.default_rng(seed)

    def factor(size):
        vec = rng.standard_normal(size) + 1j * rng.standard_normal(size)
        return vec / np.linalg.norm(vec)

    left = factor(math.prod(dims[:split]))
    right = factor(math.prod(dims[split:]))
    return StateTensor(dims, np.kron(left, right))


def haar_unitary(dim: int, rng) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def dress_state(state: StateTensor, seed: int = 0) -> StateTensor:
    """Apply an independent seeded random unitary to every subsystem."""
    rng = np.random.default_rng(seed)
    amps = state.amps
    for n, d in enumerate(state.dims):
        amps = apply_matrix_at(amps, state.dims, n, haar_unitary(d, rng))
    return StateTensor(state.dims, amps)


def _require(spec: StateSpec, allowed: set):
    given = {
        name
        for name in ("n_subsystems", "dims", "weights", "seed", "split", "base")
        if getattr(spec, name) is not None
    }
    extra = given - allowed
    if extra:
        raise ValueError(f"kind {spec.kind!r} does not accept parameters {sorted(extra)}")


def generate(spec: StateSpec) -> StateTensor:
    """Build the state a :class:`StateSpec` describes.

    Raises ValueError for parameters that do not fit the kind.
    """
    kind = spec.kind
    if kind == "ghz":
        _require(spec, {"n_subsystems", "dims"})
        n = spec.n_subsystems or (len(spec.dims) if spec.dims else 3)
        dim = 2
        if spec.dims is not None:
            if len(set(spec.dims)) != 1 or len(spec.dims) != n:
                raise ValueError("ghz requires equal dims matching n_subsystems")
            dim = spec.dims[0]
        return ghz_state(n, dim)
    if kind == "w":
        _require(spec, {"n_subsystems", "dims"})
        n = spec.n_subsystems or (len(spec.dims) if spec.dims else 3)
        if spec.dims is not None and spec.dims != (2,) * n:
            raise ValueError("w is defined on qubits only")
        return w_state(n)
    if kind == "z":
        _require(spec, {"n_subsystems", "dims", "weights"})
        if spec.weights is None:
            raise ValueError("z requires weights")
        n = spec.n_subsystems or (len(spec.dims) if spec.dims else 3)
        if spec.dims is not None and len(spec.dims) != n:
            raise ValueError("dims length must match n_subsystems")
        return z_state(spec.weights, n, spec.dims)
    if kind == "u":
        _require(spec, set())
        return u_state()
    if kind == "v":
        _require(spec, set())
        return v_state()
    if kind == "x":
        _require(spec, set())
        return x_state()
    if kind == "product":
        _require(spec, {"dims", "split", "seed"})
        if spec.dims is None:
            raise ValueError("product requires dims")
        return product_state(spec.dims, spec.split or 1, spec.seed or 0)
    if kind == "random":
        _require(spec, {"dims", "seed"})
        if spec.dims is None:
            raise ValueError("random requires dims")
        return random_state(spec.dims, spec.seed or 0)
    if kind == "random_local_dressing":
        _require(spec, {"base", "seed"})
        if spec.base is None:
            raise ValueError("random_local_dressing requires a base spec")
        return dress_state(generate(spec.base), spec.seed or 0)
    raise ValueError(f"unknown state kind {kind!r}")

"""Finite-dimensional density matrices and the operations on them.

States carry an explicit list of tensor-factor dimensions so that partial
traces and local operations can address factors by index.  Everything here
is a pure function of immutable values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod
from typing import Sequence

import numpy as np

TOL = 1e-9
EIG_CLAMP = 1e-12


class StateError(ValueError):
    """Raised when a matrix violates a density-matrix or unitary invariant."""


def _freeze(matrix) -> np.ndarray:
    arr = np.array(matrix, dtype=complex)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class QuantumState:
    """Density matrix with tensor-factor bookkeeping.

    Attributes:
        matrix: square complex array, Hermitian, PSD, unit trace.
        dims: dimensions of the tensor factors, in order.
    """

    matrix: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        m = _freeze(self.matrix)
        dims = tuple(int(k) for k in self.dims)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", dims)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise StateError(f"density matrix must be square, got shape {m.shape}")
        if not dims or any(k < 1 for k in dims) or prod(dims) != m.shape[0]:
            raise StateError(f"dims {dims} do not factor matrix dimension {m.shape[0]}")
        if np.linalg.norm(m - m.conj().T) > TOL:
            raise StateError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1) > TOL:
            raise StateError(f"trace {np.trace(m).real:.3g} != 1")
        if np.linalg.eigvalsh(m)[0] < -TOL:
            raise StateError("density matrix is not positive semidefinite")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def with_dims(self, dims: Sequence[int]) -> QuantumState:
        """Same matrix, refactored (e.g. split a d**2 register into two qudits)."""
        return QuantumState(self.matrix, tuple(dims))

    def allclose(self, other: QuantumState, atol: float = TOL) -> bool:
        return self.dims == other.dims and np.linalg.norm(self.matrix - other.matrix) <= atol


@dataclass(frozen=True, eq=False)
class UnitaryOperator:
    matrix: np.ndarray
    dim: int = field(default=0)

    def __post_init__(self):
        m = _freeze(self.matrix)
        object.__setattr__(self, "matrix", m)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise StateError(f"unitary must be square, got shape {m.shape}")
        if self.dim == 0:
            object.__setattr__(self, "dim", m.shape[0])
        if self.dim != m.shape[0]:
            raise StateError(f"dim {self.dim} does not match matrix shape {m.shape}")
        if np.linalg.norm(m.conj().T @ m - np.eye(self.dim)) > TOL:
            raise StateError("matrix is not unitary")

    def adjoint(self) -> UnitaryOperator:
        return UnitaryOperator(self.matrix.conj().T)

    def __matmul__(self, other: UnitaryOperator) -> UnitaryOperator:
        return UnitaryOperator(self.matrix @ other.matrix)


def pure_state(vector, dims: Sequence[int] | None = None) -> QuantumState:
    """Density matrix |v><v| of a normalized vector."""
    v = np.asarray(vector, dtype=complex).ravel()
    v = v / np.linalg.norm(v)
    return QuantumState(np.outer(v, v.conj()), tuple(dims) if dims else (v.size,))


def computational_basis_state(d: int, j: int) -> QuantumState:
    if not 0 <= j < d:
        raise ValueError(f"basis index {j} out of range for d={d}")
    m = np.zeros((d, d), dtype=complex)
    m[j, j] = 1
    return QuantumState(m, (d,))


def maximally_mixed_state(d: int) -> QuantumState:
    return QuantumState(np.eye(d) / d, (d,))


def maximally_entangled_vector(d: int) -> np.ndarray:
    return np.eye(d, dtype=complex).ravel() / np.sqrt(d)


def maximally_entangled_state(d: int) -> QuantumState:
    """|Phi+> = sum_j |jj> / sqrt(d) on two qudits."""
    if d < 2:
        raise ValueError("maximally entangled state needs d >= 2")
    return pure_state(maximally_entangled_vector(d), (d, d))


def weyl_operator(d: int, a: int, b: int) -> UnitaryOperator:
    """Shift-and-phase operator X^a Z^b.

    X|j> = |j+1 mod d>, Z|j> = w^j |j> with w = exp(2 pi i / d).
    """
    if not (0 <= a < d and 0 <= b < d):
        raise ValueError(f"Weyl indices ({a}, {b}) out of range for d={d}")
    shift = np.roll(np.eye(d, dtype=complex), a, axis=0)
    phase = np.diag(np.exp(2j * np.pi * b * np.arange(d) / d))
    return UnitaryOperator(shift @ phase)


def weyl_index(d: int, i: int) -> tuple[int, int]:
    """Flattened Bell/Weyl index i = a*d + b -> (a, b)."""
    if not 0 <= i < d * d:
        raise ValueError(f"index {i} out of range for d={d}")
    return divmod(i, d)


def weyl_operators(d: int) -> list[UnitaryOperator]:
    """All d**2 Weyl operators, ordered by the flattened index a*d + b."""
    return [weyl_operator(d, *weyl_index(d, i)) for i in range(d * d)]


def generalized_bell_vector(d: int, a: int, b: int) -> np.ndarray:
    u = weyl_operator(d, a, b).matrix
    return np.kron(u, np.eye(d)) @ maximally_entangled_vector(d)


def generalized_bell_state(d: int, a: int, b: int) -> QuantumState:
    """(X^a Z^b (x) I)|Phi+> as a density matrix on two qudits."""
    return pure_state(generalized_bell_vector(d, a, b), (d, d))


def tensor(*states: QuantumState) -> QuantumState:
    m = states[0].matrix
    dims = list(states[0].dims)
    for s in states[1:]:
        m = np.kron(m, s.matrix)
        dims += s.dims
    return QuantumState(m, tuple(dims))


def _check_factors(dims: Sequence[int], factors: Sequence[int]) -> list[int]:
    factors = [int(f) for f in factors]
    if len(set(factors)) != len(factors):
        raise ValueError(f"repeated factor index in {factors}")
    if any(not 0 <= f < len(dims) for f in factors):
        raise ValueError(f"factor indices {factors} out of range for {len(dims)} factors")
    return factors


def partial_trace(s: QuantumState, keep: Sequence[int]) -> QuantumState:
    """Reduce ``s`` onto the factors listed in ``keep`` (original order kept)."""
    keep = sorted(_check_factors(s.dims, keep))
    if not keep:
        raise ValueError("must keep at least one factor")
    n = len(s.dims)
    drop = [k for k in range(n) if k not in keep]
    t = s.matrix.reshape(s.dims + s.dims)
    t = t.transpose(keep + drop + [n + k for k in keep] + [n + k for k in drop])
    dk = prod(s.dims[k] for k in keep)
    dd = prod(s.dims[k] for k in drop)
    reduced = np.einsum("irjr->ij", t.reshape(dk, dd, dk, dd))
    return QuantumState(reduced, tuple(s.dims[k] for k in keep))


def apply_kraus(
    matrix: np.ndarray,
    dims: Sequence[int],
    kraus: np.ndarray,
    factors: Sequence[int],
    out_dims: Sequence[int],
) -> tuple[np.ndarray, tuple[int, ...]]:
    """Apply sum_k K rho K^dagger on selected factors of a raw operator.

    ``kraus`` is stacked with shape (n, out_dim, in_dim), the input ordered as
    ``factors`` lists them.  When the output factor dims equal the input ones
    the factors go back to their original slots; otherwise the output factors
    are inserted, as a block, where the lowest selected factor was.  The other
    factors keep their relative order.  Works on any operator, not only states.
    """
    dims = list(dims)
    factors = _check_factors(dims, factors)
    out_dims = list(out_dims)
    n = len(dims)
    rest = [k for k in range(n) if k not in factors]
    perm = factors + rest
    din = prod(dims[k] for k in factors)
    drest = prod(dims[k] for k in rest)
    dout = prod(out_dims)
    if kraus.shape[1:] != (dout, din):
        raise ValueError(f"Kraus shape {kraus.shape[1:]} does not match ({dout}, {din})")

    t = matrix.reshape(dims + dims).transpose(perm + [n + k for k in perm])
    # sum_k K_k t K_k^dagger as two batched matmuls (einsum here skips BLAS)
    nk = kraus.shape[0]
    left = np.matmul(kraus, t.reshape(din, drest * din * drest))  # k, o, (r j s)
    left = left.reshape(nk, dout, drest, din, drest).transpose(0, 1, 2, 4, 3)
    left = left.reshape(nk, dout * drest * drest, din)
    out = np.matmul(left, kraus.conj().transpose(0, 2, 1)).sum(axis=0)  # (o r s), p
    out = out.reshape(dout, drest, drest, dout).transpose(0, 1, 3, 2)

    # current factor layout: out factors, then rest
    cur_dims = out_dims + [dims[k] for k in rest]
    if out_dims == [dims[k] for k in factors]:
        # position p in current layout holds original factor perm[p]
        order = [perm.index(k) for k in range(n)]
        new_dims = dims
    else:
        pos = min(factors)
        before = [i for i, k in enumerate(rest) if k < pos]
        after = [i for i, k in enumerate(rest) if k > pos]
        m = len(out_dims)
        order = [m + i for i in before] + list(range(m)) + [m + i for i in after]
        new_dims = [cur_dims[p] for p in order]
    nc = len(cur_dims)
    out = out.reshape(cur_dims + cur_dims).transpose(order + [nc + p for p in order])
    total = prod(new_dims)
    return out.reshape(total, total), tuple(new_dims)


def apply_unitary(s: QuantumState, u: UnitaryOperator, factors: Sequence[int]) -> QuantumState:
    factors = _check_factors(s.dims, factors)
    if prod(s.dims[k] for k in factors) != u.dim:
        raise ValueError(f"unitary of dim {u.dim} does not fit factors {factors} of {s.dims}")
    sel = [s.dims[k] for k in factors]
    m, dims = apply_kraus(s.matrix, s.dims, u.matrix[None], factors, sel)
    return QuantumState(m, dims)


def project_outcome(s: QuantumState, factor: int, outcome: int) -> tuple[float, QuantumState | None]:
    """Measure one factor in the computational basis and condition on ``outcome``.

    Returns the outcome probability and the normalized post-measurement state
    of the remaining factors (None when the probability vanishes).
    """
    (factor,) = _check_factors(s.dims, [factor])
    if len(s.dims) < 2:
        raise ValueError("need at least one factor left after conditioning")
    d = s.dims[factor]
    if not 0 <= outcome < d:
        raise ValueError(f"outcome {outcome} out of range for factor of dim {d}")
    bra = np.zeros((1, 1, d), dtype=complex)
    bra[0, 0, outcome] = 1
    m, dims = apply_kraus(s.matrix, s.dims, bra, [factor], [1])
    m = m.reshape(prod(dims), prod(dims))
    dims = tuple(k for i, k in enumerate(s.dims) if i != factor)
    p = float(np.real(np.trace(m)))
    if p <= EIG_CLAMP:
        return p, None
    return p, QuantumState(m / p, dims)


def _entropy_of_spectrum(evals: np.ndarray) -> float:
    if evals.min() < -EIG_CLAMP:
        raise StateError(f"eigenvalue {evals.min():.3g} below clamp; not a valid state")
    lam = evals[evals > EIG_CLAMP]
    return float(max(0.0, -np.sum(lam * np.log2(lam))))


def von_neumann_entropy(s: QuantumState) -> float:
    """S(rho) = -Tr rho log2 rho, in bits."""
    return _entropy_of_spectrum(s.eigenvalues())


def fidelity_with_pure(s: QuantumState, target: QuantumState) -> float:
    """<psi|rho|psi> for a pure target |psi><psi|."""
    if abs(target.purity() - 1) > TOL:
        raise StateError("fidelity target must be a pure state")
    if s.dim != target.dim:
        raise ValueError(f"dimension mismatch {s.dim} vs {target.dim}")
    return float(np.clip(np.real(np.trace(s.matrix @ target.matrix)), 0.0, 1.0))


def random_pure_state(d: int, seed: int) -> QuantumState:
    """Haar-random pure state (normalized complex Gaussian vector)."""
    if d < 2:
        raise ValueError("random_pure_state needs d >= 2")
    rng = np.random.default_rng(seed)
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return pure_state(v, (d,))


def random_density_matrix(d: int, seed: int, rank: int | None = None) -> QuantumState:
    """Random mixed state from a Ginibre matrix G G^dagger / Tr."""
    rng = np.random.default_rng(seed)
    r = rank or d
    g = rng.normal(size=(d, r)) + 1j * rng.normal(size=(d, r))
    m = g @ g.conj().T
    m = (m + m.conj().T) / 2
    return QuantumState(m / np.trace(m).real, (d,))


def random_unitary(d: int, seed: int) -> UnitaryOperator:
    """Haar-random unitary via QR with phase fix."""
    rng = np.random.default_rng(seed)
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return UnitaryOperator(q * ph)

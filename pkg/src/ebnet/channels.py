"""Kraus-form quantum channels and the network channels built from them.

Classical inputs and outputs are ordinary factors that a channel measures or
prepares in the computational basis, so one algebra covers both the quantum
and the classical capacities.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Sequence

import numpy as np

from ebnet.qcore import (
    TOL,
    QuantumState,
    UnitaryOperator,
    apply_kraus,
    generalized_bell_vector,
    weyl_index,
    weyl_operators,
)


class ChannelError(ValueError):
    pass


def _check_prob(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ChannelError(f"{name}={value} outside [0, 1]")
    return value


@dataclass(frozen=True, eq=False)
class QuantumChannel:
    """Completely positive trace-preserving map in Kraus form.

    ``kraus`` is stacked as an array of shape (n, out_dim, in_dim).
    """

    kraus: np.ndarray
    in_dims: tuple[int, ...]
    out_dims: tuple[int, ...]

    def __post_init__(self):
        k = np.array(self.kraus, dtype=complex)
        if k.ndim == 2:
            k = k[None]
        k.setflags(write=False)
        in_dims = tuple(int(v) for v in self.in_dims)
        out_dims = tuple(int(v) for v in self.out_dims)
        object.__setattr__(self, "kraus", k)
        object.__setattr__(self, "in_dims", in_dims)
        object.__setattr__(self, "out_dims", out_dims)
        if k.ndim != 3 or k.shape[1:] != (prod(out_dims), prod(in_dims)):
            raise ChannelError(
                f"Kraus stack shape {k.shape} does not match out {out_dims} x in {in_dims}"
            )
        gram = np.einsum("koi,koj->ij", k.conj(), k)
        if np.linalg.norm(gram - np.eye(self.in_dim)) > TOL:
            raise ChannelError("Kraus operators are not trace preserving")

    @property
    def in_dim(self) -> int:
        return prod(self.in_dims)

    @property
    def out_dim(self) -> int:
        return prod(self.out_dims)

    @property
    def kraus_ops(self) -> list[np.ndarray]:
        return list(self.kraus)

    def __call__(self, s: QuantumState) -> QuantumState:
        return apply(self, s)


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    """Unnormalized Choi matrix J = sum_ij |i><j| (x) L(|i><j|), input factor first."""

    matrix: np.ndarray
    in_dim: int
    out_dim: int

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        n = self.in_dim * self.out_dim
        if m.shape != (n, n):
            raise ChannelError(f"Choi shape {m.shape} != ({n}, {n})")

    def normalized(self) -> np.ndarray:
        return self.matrix / self.in_dim

    def output_marginal(self) -> np.ndarray:
        """Tr_out J, which equals the identity for trace-preserving maps."""
        t = self.matrix.reshape(self.in_dim, self.out_dim, self.in_dim, self.out_dim)
        return np.einsum("iojo->ij", t)

    def partial_transpose_input(self) -> np.ndarray:
        t = self.matrix.reshape(self.in_dim, self.out_dim, self.in_dim, self.out_dim)
        n = self.in_dim * self.out_dim
        return t.transpose(2, 1, 0, 3).reshape(n, n)

    def distance(self, other: ChoiMatrix) -> float:
        if (self.in_dim, self.out_dim) != (other.in_dim, other.out_dim):
            raise ChannelError("Choi matrices of different shapes")
        return float(np.linalg.norm(self.matrix - other.matrix))


def apply(ch: QuantumChannel, s: QuantumState) -> QuantumState:
    if s.dim != ch.in_dim:
        raise ChannelError(f"state dim {s.dim} != channel input dim {ch.in_dim}")
    m = (ch.kraus @ s.matrix @ ch.kraus.conj().transpose(0, 2, 1)).sum(axis=0)
    return QuantumState(m, ch.out_dims)


def apply_on_factors(ch: QuantumChannel, s: QuantumState, factors: Sequence[int]) -> QuantumState:
    """Apply ``ch`` (x) id to the listed factors of ``s``.

    The listed factors are fed to the channel in the given order.  If the
    channel keeps their dimensions they stay in place; otherwise its output
    factors are inserted where the lowest listed factor was.
    """
    factors = list(factors)
    if tuple(s.dims[k] for k in factors if 0 <= k < len(s.dims)) != ch.in_dims:
        raise ChannelError(
            f"factors {factors} of {s.dims} do not match channel input {ch.in_dims}"
        )
    m, dims = apply_kraus(s.matrix, s.dims, ch.kraus, factors, ch.out_dims)
    return QuantumState(m, dims)


def compose_serial(second: QuantumChannel, first: QuantumChannel) -> QuantumChannel:
    """second o first, Kraus set {B_j A_k}."""
    if first.out_dim != second.in_dim:
        raise ChannelError(f"cannot compose: {first.out_dim} outputs into {second.in_dim} inputs")
    k = np.einsum("jab,kbc->jkac", second.kraus, first.kraus)
    k = k.reshape(-1, second.out_dim, first.in_dim)
    return QuantumChannel(k, first.in_dims, second.out_dims)


def compose_parallel(c1: QuantumChannel, c2: QuantumChannel) -> QuantumChannel:
    """c1 (x) c2, Kraus set {A_k (x) B_j}."""
    k = np.einsum("kab,jcd->kjacbd", c1.kraus, c2.kraus)
    k = k.reshape(-1, c1.out_dim * c2.out_dim, c1.in_dim * c2.in_dim)
    return QuantumChannel(k, c1.in_dims + c2.in_dims, c1.out_dims + c2.out_dims)


def choi(ch: QuantumChannel) -> ChoiMatrix:
    # (id (x) K)|Phi+> sqrt(d) = sum_i |i> (x) K|i>, i.e. K^T flattened
    vecs = ch.kraus.transpose(0, 2, 1).reshape(len(ch.kraus), -1)
    return ChoiMatrix(vecs.T @ vecs.conj(), ch.in_dim, ch.out_dim)


def mixture(weighted: Sequence[tuple[float, QuantumChannel]]) -> QuantumChannel:
    """Convex combination via a sqrt-weighted union of Kraus sets."""
    first = weighted[0][1]
    stacks = []
    for w, ch in weighted:
        if (ch.in_dims, ch.out_dims) != (first.in_dims, first.out_dims):
            raise ChannelError("mixed channels must share input and output dims")
        if w > 0:
            stacks.append(np.sqrt(w) * ch.kraus)
    return QuantumChannel(np.concatenate(stacks), first.in_dims, first.out_dims)


def identity_channel(d: int) -> QuantumChannel:
    return QuantumChannel(np.eye(d)[None], (d,), (d,))


def unitary_channel(u: UnitaryOperator) -> QuantumChannel:
    return QuantumChannel(u.matrix[None], (u.dim,), (u.dim,))


def replacement_channel(in_dims: Sequence[int], out_dims: Sequence[int]) -> QuantumChannel:
    """Discard the input and output the maximally mixed state."""
    din, dout = prod(in_dims), prod(out_dims)
    k = np.zeros((dout * din, dout, din), dtype=complex)
    for m in range(dout):
        for n in range(din):
            k[m * din + n, m, n] = 1 / np.sqrt(dout)
    return QuantumChannel(k, tuple(in_dims), tuple(out_dims))


def depolarizing_channel(d: int, x: float) -> QuantumChannel:
    """D_x(rho) = (1 - x) rho + x I/d, as a Weyl twirl.

    Kraus set: sqrt(1 - x + x/d^2) I and sqrt(x/d^2) X^a Z^b for (a, b) != (0, 0).
    """
    x = _check_prob("x", x)
    ops = [u.matrix for u in weyl_operators(d)]
    weights = [1 - x + x / d**2] + [x / d**2] * (d * d - 1)
    k = [np.sqrt(w) * u for w, u in zip(weights, ops) if w > 0]
    return QuantumChannel(np.array(k), (d,), (d,))


def controlled_unitary_channel(unitaries: Sequence[UnitaryOperator]) -> QuantumChannel:
    """Read a classical register |i>, apply unitaries[i] to the target, discard the register.

    in_dims (n, d), out_dims (d,), Kraus <i| (x) U_i.
    """
    n = len(unitaries)
    d = unitaries[0].dim
    k = np.zeros((n, d, n * d), dtype=complex)
    for i, u in enumerate(unitaries):
        k[i, :, i * d : (i + 1) * d] = u.matrix
    return QuantumChannel(k, (n, d), (d,))


def bell_measurement_channel(d: int) -> QuantumChannel:
    """Measure two qudits in the generalized Bell basis, output the index as a register.

    in_dims (d, d), out_dims (d^2,), Kraus |i><Psi^i| with i = a*d + b.
    """
    n = d * d
    k = np.zeros((n, n, n), dtype=complex)
    for i in range(n):
        k[i, i, :] = generalized_bell_vector(d, *weyl_index(d, i)).conj()
    return QuantumChannel(k, (d, d), (n,))


def noisy_bm_channel(d: int, q: float) -> QuantumChannel:
    """Bell measurement with weight 1-q, uniform random register with weight q."""
    q = _check_prob("q", q)
    return mixture(
        [(1 - q, bell_measurement_channel(d)), (q, replacement_channel((d, d), (d * d,)))]
    )


def flagged_bm_identity_channel(d: int, q: float) -> QuantumChannel:
    """Bell measurement (flag 0) or identity on both qudits (flag 1).

    out_dims (2, d^2): a flag qubit, then a d^2 payload that holds either the
    measurement register or the two input qudits (Alice's first).
    """
    q = _check_prob("q", q)
    n = d * d
    bm = bell_measurement_channel(d).kraus
    flag0 = np.zeros((len(bm), 2 * n, n), dtype=complex)
    flag0[:, :n, :] = bm
    flag1 = np.zeros((1, 2 * n, n), dtype=complex)
    flag1[0, n:, :] = np.eye(n)
    parts = []
    if q < 1:
        parts.append(np.sqrt(1 - q) * flag0)
    if q > 0:
        parts.append(np.sqrt(q) * flag1)
    return QuantumChannel(np.concatenate(parts), (d, d), (2, n))


def dense_coding_mac(d: int, x: float) -> QuantumChannel:
    """Alice's d^2 register selects a Weyl unitary on Bob's qudit, then D_x.

    in_dims (d^2, d) for (Alice, Bob); out_dims (d,).  Alice's register is
    discarded after it is read.
    """
    x = _check_prob("x", x)
    return compose_serial(depolarizing_channel(d, x), controlled_unitary_channel(weyl_operators(d)))


def cross_controlled_channel(d: int) -> QuantumChannel:
    """Register b drives qudit A, register a drives qudit B; registers are discarded.

    in_dims (d^2, d, d^2, d) = (a, A, b, B); out_dims (d, d) = (A, B).
    """
    n = d * d
    ws = [u.matrix for u in weyl_operators(d)]
    bras = np.eye(n)
    k = [
        np.kron(np.kron(bras[a][None], ws[b]), np.kron(bras[b][None], ws[a]))
        for a in range(n)
        for b in range(n)
    ]
    return QuantumChannel(np.array(k), (n, d, n, d), (d, d))


def butterfly_channel(d: int, x: float) -> QuantumChannel:
    """Entanglement-breaking butterfly network.

    Inputs (a, A, b, B): Alice's d^2 register and qudit, Bob's register and
    qudit.  U_b acts on A and U_a on B, then each qudit passes through D_x to
    its own receiver.  Outputs (A~, B~).  The Kraus set has d^8 members, so
    only d = 2 is cheap.
    """
    x = _check_prob("x", x)
    dep = depolarizing_channel(d, x)
    return compose_serial(compose_parallel(dep, dep), cross_controlled_channel(d))

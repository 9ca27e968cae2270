"""Closed-form capacities of the depolarizing channel, Holevo quantities and rate regions.

All rates are in bits per channel use (log base 2).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from math import log2
from typing import Mapping, Sequence

import numpy as np

from ebnet.qcore import TOL, QuantumState, von_neumann_entropy

RATIO_GUARD = 1e-12

MAC_COMPONENTS = ("r_a", "r_b")
BUTTERFLY_COMPONENTS = (
    "r_a_tilde_a",
    "r_a_tilde_b",
    "r_b_tilde_a",
    "r_b_tilde_b",
    "r_a_common",
    "r_b_common",
)
ASSIST_COMPONENTS = ("r_a_prime_tilde_a_prime", "r_b_prime_tilde_b_prime")


def _check_params(d: int, x: float) -> None:
    if d < 2:
        raise ValueError(f"d={d} must be >= 2")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x={x} outside [0, 1]")


def h_d(d: int, p: float) -> float:
    """H_d(p) = -p log p - (1-p) log((1-p)/(d-1)), with 0 log 0 = 0."""
    _check_params(d, 0.0)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p={p} outside [0, 1]")
    h = 0.0
    if p > 0:
        h -= p * log2(p)
    if p < 1:
        h -= (1 - p) * log2((1 - p) / (d - 1))
    return h


def holevo_capacity_depolarizing(d: int, x: float) -> float:
    _check_params(d, x)
    return max(0.0, log2(d) - h_d(d, 1 - x * (d - 1) / d))


def ea_capacity_depolarizing(d: int, x: float) -> float:
    """Entanglement-assisted classical capacity of D_x."""
    _check_params(d, x)
    n = d * d
    return max(0.0, 2 * log2(d) - h_d(n, 1 - x * (n - 1) / n))


def superadditivity_ratio(d: int, x: float) -> float:
    _check_params(d, x)
    c = holevo_capacity_depolarizing(d, x)
    if c < RATIO_GUARD:
        raise ValueError(f"C={c:.3g} too small for a meaningful ratio at x={x}")
    return ea_capacity_depolarizing(d, x) / c


@dataclass(frozen=True, eq=False)
class Ensemble:
    items: tuple[tuple[float, QuantumState], ...]

    def __post_init__(self):
        items = tuple((float(p), s) for p, s in self.items)
        object.__setattr__(self, "items", items)
        if not items:
            raise ValueError("empty ensemble")
        probs = np.array([p for p, _ in items])
        if np.any(probs < 0) or abs(probs.sum() - 1) > TOL:
            raise ValueError("ensemble probabilities must be nonnegative and sum to 1")
        if len({s.dims for _, s in items}) != 1:
            raise ValueError("ensemble states must share dims")

    @classmethod
    def uniform(cls, states: Sequence[QuantumState]) -> Ensemble:
        p = 1 / len(states)
        return cls(tuple((p, s) for s in states))

    def average(self) -> QuantumState:
        m = sum(p * s.matrix for p, s in self.items)
        return QuantumState(m, self.items[0][1].dims)


def holevo_quantity(e: Ensemble) -> float:
    """chi = S(sum p_i rho_i) - sum p_i S(rho_i)."""
    chi = von_neumann_entropy(e.average()) - sum(p * von_neumann_entropy(s) for p, s in e.items if p > 0)
    return max(0.0, chi)


@dataclass(frozen=True)
class RateVector:
    """Named nonnegative rates.

    ``names`` defaults to the six butterfly components; use ``RateVector.mac``
    for the reduced (r_a, r_b) form of a single-receiver MAC.
    """

    values: tuple[float, ...]
    names: tuple[str, ...] = BUTTERFLY_COMPONENTS

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", values)
        if len(values) != len(self.names):
            raise ValueError(f"{len(values)} values for {len(self.names)} components")
        if any(v < -TOL for v in values):
            raise ValueError(f"rates must be nonnegative: {values}")

    @classmethod
    def mac(cls, r_a: float, r_b: float) -> RateVector:
        return cls((r_a, r_b), MAC_COMPONENTS)

    @classmethod
    def butterfly(cls, **rates: float) -> RateVector:
        unknown = set(rates) - set(BUTTERFLY_COMPONENTS)
        if unknown:
            raise ValueError(f"unknown rate components {sorted(unknown)}")
        return cls(tuple(rates.get(n, 0.0) for n in BUTTERFLY_COMPONENTS))

    def __getitem__(self, name: str) -> float:
        return self.values[self.names.index(name)]

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.names, self.values))


@dataclass(frozen=True)
class Inequality:
    coefficients: tuple[float, ...]
    bound: float
    label: str = ""

    def slack(self, v: RateVector) -> float:
        return self.bound - float(np.dot(self.coefficients, v.values))


@dataclass(frozen=True)
class RateRegion:
    """Polyhedral outer bound plus annotated points.

    ``extreme_points`` satisfy every inequality.  ``achievable`` holds labelled
    points that a protocol reaches, possibly only with extra resources, so
    they need not lie inside this region.  ``assisting`` is the region of an
    auxiliary channel used alongside this one.
    """

    components: tuple[str, ...]
    inequalities: tuple[Inequality, ...]
    extreme_points: tuple[RateVector, ...]
    achievable: Mapping[str, RateVector] = field(default_factory=dict)
    assisting: RateRegion | None = None

    def __post_init__(self):
        for ineq in self.inequalities:
            if len(ineq.coefficients) != len(self.components):
                raise ValueError(f"inequality {ineq.label!r} has wrong length")
        for v in self.extreme_points:
            if not self.contains(v):
                raise ValueError(f"extreme point {v.values} violates the region")

    def _check(self, v: RateVector) -> None:
        if v.names != self.components:
            raise ValueError(f"rate vector components {v.names} != {self.components}")

    def contains(self, v: RateVector, tol: float = TOL) -> bool:
        self._check(v)
        return all(ineq.slack(v) >= -tol for ineq in self.inequalities)

    def violated(self, v: RateVector, tol: float = TOL) -> list[Inequality]:
        self._check(v)
        return [ineq for ineq in self.inequalities if ineq.slack(v) < -tol]

    def on_boundary(self, v: RateVector, tol: float = TOL) -> bool:
        self._check(v)
        return self.contains(v, tol) and any(
            abs(ineq.slack(v)) <= tol for ineq in self.inequalities if ineq.bound > 0
        )


def _nonneg(components: Sequence[str]) -> list[Inequality]:
    n = len(components)
    return [
        Inequality(tuple(-1.0 if j == i else 0.0 for j in range(n)), 0.0, f"{c} >= 0")
        for i, c in enumerate(components)
    ]


def quantum_product_region(d: int) -> RateRegion:
    """Quantum region of Bell-measurement MAC (x) identity: R_A + R_B <= log d."""
    _check_params(d, 0.0)
    q = log2(d)
    return RateRegion(
        MAC_COMPONENTS,
        tuple(_nonneg(MAC_COMPONENTS)) + (Inequality((1.0, 1.0), q, "r_a + r_b <= log d"),),
        (RateVector.mac(q, 0), RateVector.mac(0, q), RateVector.mac(0, 0)),
        achievable={"teleportation": RateVector.mac(q, 0)},
    )


def product_region_extreme_points(d: int, x: float) -> RateRegion:
    """Classical region of dense-coding MAC (x) identity: extreme points (C_E, 0) and (0, C + log d)."""
    c = holevo_capacity_depolarizing(d, x)
    ce = ea_capacity_depolarizing(d, x)
    total = c + log2(d)
    ineqs = tuple(_nonneg(MAC_COMPONENTS)) + (
        Inequality((1.0, 0.0), ce, "r_a <= C_E"),
        Inequality((1.0, 1.0), total, "r_a + r_b <= C + log d"),
    )
    pts = (RateVector.mac(ce, 0), RateVector.mac(0, total))
    return RateRegion(
        MAC_COMPONENTS,
        ineqs,
        pts,
        achievable={"dense_coding": pts[0], "bob_solo": pts[1]},
    )


def assisting_identity_region(d: int) -> RateRegion:
    """Two parallel noiseless qudit channels A'->A~' and B'->B~'."""
    q = log2(d)
    ineqs = tuple(_nonneg(ASSIST_COMPONENTS)) + (
        Inequality((1.0, 0.0), q, "r_a'a~' <= log d"),
        Inequality((0.0, 1.0), q, "r_b'b~' <= log d"),
    )
    pts = tuple(RateVector(v, ASSIST_COMPONENTS) for v in product((0.0, q), repeat=2))
    return RateRegion(ASSIST_COMPONENTS, ineqs, pts)


def butterfly_outer_region(d: int, x: float) -> RateRegion:
    """Outer bound for the bare butterfly, with the assisted cross-transfer point attached.

    Each receiver sits behind a D_x, so everything it decodes (from either
    sender plus the common part) is at most C.
    """
    c = holevo_capacity_depolarizing(d, x)
    ce = ea_capacity_depolarizing(d, x)
    idx = {n: i for i, n in enumerate(BUTTERFLY_COMPONENTS)}

    def row(*names):
        return tuple(1.0 if n in names else 0.0 for n in BUTTERFLY_COMPONENTS)

    at_a = ("r_a_tilde_a", "r_b_tilde_a", "r_a_common")
    at_b = ("r_a_tilde_b", "r_b_tilde_b", "r_b_common")
    ineqs = tuple(_nonneg(BUTTERFLY_COMPONENTS)) + (
        Inequality(row(*at_a), c, "receiver A~ total <= C"),
        Inequality(row(*at_b), c, "receiver B~ total <= C"),
    )
    # vertices of a product of two scaled simplices
    pts = []
    for na in (None,) + at_a:
        for nb in (None,) + at_b:
            v = [0.0] * len(BUTTERFLY_COMPONENTS)
            for n in (na, nb):
                if n is not None:
                    v[idx[n]] = c
            pts.append(RateVector(tuple(v)))
    cross = RateVector.butterfly(r_a_tilde_b=ce, r_b_tilde_a=ce)
    return RateRegion(
        BUTTERFLY_COMPONENTS,
        ineqs,
        tuple(pts),
        achievable={"assisted_cross_transfer": cross},
        assisting=assisting_identity_region(d),
    )

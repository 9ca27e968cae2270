"""Entanglement-breaking checks: rank-one Kraus witness and Choi PPT test."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ebnet.channels import QuantumChannel, choi, depolarizing_channel
from ebnet.qcore import TOL

BISECT_TOL = 1e-8
BISECT_MAX_ITER = 60


@dataclass(frozen=True)
class EbVerdict:
    is_eb_by_kraus: bool
    min_pt_eigenvalue: float
    is_ppt: bool


def kraus_rank_one_witness(ch: QuantumChannel) -> bool:
    """True iff every Kraus operator has rank one.

    Sufficient for entanglement breaking; False says nothing.
    """
    for k in ch.kraus:
        s = np.linalg.svd(k, compute_uv=False)
        if s[0] <= TOL or np.any(s[1:] > TOL):
            return False
    return True


def choi_partial_transpose_min_eig(ch: QuantumChannel) -> float:
    """Smallest eigenvalue of the input-side partial transpose of J/in_dim."""
    j = choi(ch)
    pt = j.partial_transpose_input() / j.in_dim
    pt = (pt + pt.conj().T) / 2
    return float(np.linalg.eigvalsh(pt)[0])


def eb_verdict(ch: QuantumChannel) -> EbVerdict:
    m = choi_partial_transpose_min_eig(ch)
    return EbVerdict(kraus_rank_one_witness(ch), m, m >= -TOL)


def eb_threshold_scan(d: int, tol: float = BISECT_TOL) -> float:
    """Bisect for the noise level x where D_x stops having an NPT Choi state."""
    if d < 2:
        raise ValueError("d must be >= 2")

    def f(x):
        return choi_partial_transpose_min_eig(depolarizing_channel(d, x))

    lo, hi = 0.0, 1.0
    if not (f(lo) < 0 < f(hi)):
        raise RuntimeError(f"no sign change of the PT eigenvalue on [0, 1] for d={d}")
    for _ in range(BISECT_MAX_ITER):
        mid = (lo + hi) / 2
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol:
            break
    return (lo + hi) / 2

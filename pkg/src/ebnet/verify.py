"""Verification suite behind ``ebnet verify-all``.

Each check takes ``d_max`` and returns ``(passed, detail)``.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ebnet import capacity as cap
from ebnet import channels as chn
from ebnet import ebcheck, protocols
from ebnet import qcore as qc

TOL = 1e-9


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def _dims(d_max: int, cap_at: int | None = None) -> range:
    hi = d_max if cap_at is None else min(d_max, cap_at)
    return range(2, hi + 1)


def check_bell_basis(d_max):
    worst = 0.0
    for d in _dims(d_max):
        vecs = np.array([qc.generalized_bell_vector(d, a, b) for a in range(d) for b in range(d)])
        worst = max(worst, np.linalg.norm(vecs.conj() @ vecs.T - np.eye(d * d)))
    return worst <= TOL, f"max Gram deviation {worst:.2e}"


def check_state_properties(d_max):
    worst = 0.0
    cases = 0
    for d in _dims(d_max):
        for seed in range(20):
            a = qc.random_density_matrix(d, seed)
            b = qc.random_density_matrix(d, 1000 + seed)
            ab = qc.tensor(a, b)
            worst = max(worst, np.linalg.norm(qc.partial_trace(ab, [0]).matrix - a.matrix))
            s_gap = abs(qc.von_neumann_entropy(ab) - qc.von_neumann_entropy(a) - qc.von_neumann_entropy(b))
            worst = max(worst, s_gap)
            cases += 1
    return worst <= TOL, f"{cases} cases, max deviation {worst:.2e}"


def check_trace_preservation(d_max):
    n = 0
    for d in _dims(d_max):
        for p in (0.0, 0.3, d / (d + 1), 1.0):
            for ch in (
                chn.depolarizing_channel(d, p),
                chn.dense_coding_mac(d, p),
                chn.noisy_bm_channel(d, p),
                chn.flagged_bm_identity_channel(d, p),
            ):
                j = chn.choi(ch)
                if np.linalg.norm(j.output_marginal() - np.eye(ch.in_dim)) > TOL:
                    return False, f"marginal fails for d={d} p={p}"
                if np.linalg.eigvalsh(j.matrix)[0] < -TOL:
                    return False, f"Choi not PSD for d={d} p={p}"
                n += 1
        chn.bell_measurement_channel(d)
    return True, f"{n} channels checked"


def check_composition(d_max):
    worst = 0.0
    for d in _dims(d_max):
        for seed in range(10):
            a = chn.depolarizing_channel(d, 0.1 * (seed % 10))
            b = chn.unitary_channel(qc.random_unitary(d, seed))
            rho = qc.random_density_matrix(d, seed)
            sig = qc.random_density_matrix(d, seed + 50)
            lhs = chn.apply(chn.compose_serial(b, a), rho)
            worst = max(worst, np.linalg.norm(lhs.matrix - chn.apply(b, chn.apply(a, rho)).matrix))
            par = chn.apply(chn.compose_parallel(a, b), qc.tensor(rho, sig))
            ref = qc.tensor(chn.apply(a, rho), chn.apply(b, sig))
            worst = max(worst, np.linalg.norm(par.matrix - ref.matrix))
    return worst <= 1e-12, f"max deviation {worst:.2e}"


def check_eb_threshold(d_max):
    errs = []
    for d in _dims(d_max):
        errs.append(abs(ebcheck.eb_threshold_scan(d) - d / (d + 1)))
    return max(errs) <= 1e-6, f"max |x* - d/(d+1)| = {max(errs):.2e}"


def check_ppt_grid(d_max):
    for d in _dims(d_max):
        thr = d / (d + 1)
        for x in np.round(np.arange(0, 1.0001, 0.01), 10):
            m = ebcheck.choi_partial_transpose_min_eig(chn.depolarizing_channel(d, x))
            if x >= thr and m < -TOL:
                return False, f"d={d} x={x}: NPT above threshold"
            if x < thr - 0.01 and m >= -1e-6:
                return False, f"d={d} x={x}: PPT below threshold"
    return True, "PPT exactly on x >= d/(d+1)"


def check_teleportation(d_max):
    worst = 0.0
    for d in _dims(d_max):
        for seed in range(100):
            r = protocols.teleportation_demo(d, seed=seed)
            worst = max(worst, 1 - r.details["min_outcome_fidelity"])
    return worst <= TOL, f"worst per-outcome infidelity {worst:.2e}"


def check_dense_coding(d_max):
    worst = 0.0
    for d in _dims(d_max, 3):
        for x in (0.0, 0.25, d / (d + 1), 0.9, 1.0):
            worst = max(worst, protocols.dense_coding_superadditivity_demo(d, x).discrepancy)
            chi_c = cap.holevo_quantity(protocols.basis_ensemble_through_mac(d, x))
            worst = max(worst, abs(chi_c - cap.holevo_capacity_depolarizing(d, x)))
            if 0 < x < 1 and not cap.ea_capacity_depolarizing(d, x) > cap.holevo_capacity_depolarizing(d, x):
                return False, f"C_E <= C at d={d} x={x}"
    return worst <= TOL, f"max |chi - formula| {worst:.2e}"


def check_bob_solo(d_max):
    worst = max(
        protocols.bob_solo_rate_demo(d, x).discrepancy for d in _dims(d_max, 3) for x in (0.0, 0.5, 1.0)
    )
    return worst <= TOL, f"max discrepancy {worst:.2e}"


def check_capacity_grid(d_max):
    for d in _dims(d_max):
        for x in np.linspace(0, 1, 21):
            if cap.ea_capacity_depolarizing(d, x) < cap.holevo_capacity_depolarizing(d, x) - TOL:
                return False, f"C_E < C at d={d} x={x}"
            cap.product_region_extreme_points(d, x)
            cap.butterfly_outer_region(d, x)
        cap.quantum_product_region(d)
    return True, "C_E >= C; regions self-consistent"


def check_divergence(d_max):
    errs = []
    for d in _dims(d_max, 3):
        r = cap.superadditivity_ratio(d, 1 - 1e-4)
        errs.append(abs(r - (d + 1)) / (d + 1))
    return max(errs) <= 0.01, f"max relative gap to d+1: {max(errs):.2e}"


def check_noisy_i(d_max):
    worst = max(
        protocols.noisy_extension_i_demo(d, q).metric_value for d in _dims(d_max, 3) for q in (0.0, 0.3, 0.7, 1.0)
    )
    return worst <= TOL, f"max Choi distance {worst:.2e}"


def check_noisy_ii(d_max):
    worst = max(
        protocols.noisy_extension_ii_demo(d, q, seed=d).discrepancy
        for d in _dims(d_max, 3)
        for q in (0.0, 0.5, 1.0)
    )
    return worst <= TOL, f"worst branch infidelity {worst:.2e}"


def check_butterfly(d_max):
    # the full butterfly Kraus set has d**8 members; only d=2 is run
    out = []
    for x in (2 / 3, 0.9):
        r = protocols.butterfly_demo(2, x)
        if r.discrepancy > TOL or abs(r.details["chi_at_a_tilde"] - r.details["chi_at_b_tilde"]) > TOL:
            return False, f"x={x}: {r.details}"
        out.append(r.metric_value - r.details["holevo_capacity_C"])
    return out[0] >= 1e-3, f"C_E - C at x=2/3: {out[0]:.6f} bits"


CHECKS: list[tuple[str, Callable[[int], tuple[bool, str]]]] = [
    ("bell basis orthonormal", check_bell_basis),
    ("state algebra properties", check_state_properties),
    ("trace preservation / Choi", check_trace_preservation),
    ("composition homomorphisms", check_composition),
    ("EB threshold bisection", check_eb_threshold),
    ("PPT grid around threshold", check_ppt_grid),
    ("teleportation fidelity", check_teleportation),
    ("dense coding chi = C_E", check_dense_coding),
    ("bob solo chi = C + log d", check_bob_solo),
    ("capacity grid and regions", check_capacity_grid),
    ("divergence C_E/C -> d+1", check_divergence),
    ("noisy extension (i)", check_noisy_i),
    ("noisy extension (ii)", check_noisy_ii),
    ("butterfly cross transfer", check_butterfly),
]


def _run_one(item, d_max) -> CheckResult:
    name, fn = item
    t0 = time.perf_counter()
    try:
        ok, detail = fn(d_max)
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        ok, detail = False, f"error: {exc}"
    return CheckResult(name, bool(ok), detail, time.perf_counter() - t0)


def run_all(d_max: int, parallel: bool = False) -> list[CheckResult]:
    if parallel:
        with ThreadPoolExecutor() as pool:
            return list(pool.map(lambda item: _run_one(item, d_max), CHECKS))
    return [_run_one(item, d_max) for item in CHECKS]


def format_table(results: list[CheckResult]) -> str:
    width = max(len(r.name) for r in results)
    lines = []
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"{status}  {r.name:<{width}}  {r.seconds:7.2f}s  {r.detail}")
    n_ok = sum(r.passed for r in results)
    lines.append(f"{n_ok}/{len(results)} checks passed")
    return "\n".join(lines)


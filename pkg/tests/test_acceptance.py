"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``[PASS]``/``[FAIL]`` line (collected again in the
terminal summary) before asserting.
"""

import math
import time

import numpy as np
import pytest

from jchbound.model import ModelParams
from jchbound.oracle import build_full_hamiltonian, sector_eigh, verify_operator_identities
from jchbound.realspace import joint_probabilities, to_real_space
from jchbound.secular import (
    SecularFunction,
    band_intervals,
    classify_eigenvalues,
    critical_coupling,
    find_bound_eigenvalues,
    strong_coupling_estimate,
)
from jchbound.sector import sector_sweep, solve_sector

from conftest import bound_indices, cached_solution


def test_oracle_equivalence(report):
    start = time.perf_counter()
    worst = 0.0
    for n in (4, 6, 8):
        for delta in (0.0, 0.5, -0.5):
            for g in (0.5, 2.0, 5.0):
                params = ModelParams(n, delta, 1.0, g)
                h = build_full_hamiltonian(params)
                for p in range(n):
                    ours = solve_sector(params, p).physical_eigenvalues
                    ref, _ = sector_eigh(params, p, h)
                    assert ours.shape == ref.shape
                    worst = max(worst, float(np.abs(ours - ref).max()))
    elapsed = time.perf_counter() - start
    ok = worst < 1e-9 and elapsed < 30
    report("1 oracle equivalence", ok, f"max deviation {worst:.2e} J in {elapsed:.2f} s")
    assert ok


def test_operator_identities(report):
    start = time.perf_counter()
    worst = max(max(verify_operator_identities(n).values()) for n in (4, 6))
    elapsed = time.perf_counter() - start
    ok = worst < 1e-12 and elapsed < 5
    report("2 operator identities", ok, f"max residual {worst:.2e} in {elapsed:.2f} s")
    assert ok


def test_fig1_bound_state_counts(report):
    start = time.perf_counter()
    n = 50
    odd = list(range(1, n, 2))
    grid = [ModelParams(n, 0.0, 1.0, g) for g in (0.1, 1.7, 2.0, 5.0)]
    sols = sector_sweep(grid, odd)
    counts = {}
    min_margin = {}
    for sol in sols:
        g = sol.params.rabi
        bands = band_intervals(sol.params, sol.sector)
        margins = classify_eigenvalues(sol.physical_eigenvalues, bands)
        counts.setdefault(g, []).append(int(np.sum(margins > 0)))
        if np.any(margins > 0):
            min_margin[g] = min(min_margin.get(g, np.inf), float(margins[margins > 0].min()))
    elapsed = time.perf_counter() - start
    ok = (
        all(c == 0 for c in counts[0.1])
        and all(c == 2 for c in counts[2.0])
        and all(c == 2 for c in counts[5.0])
        and min_margin[2.0] > 0
        and min_margin[5.0] > 0
        and elapsed < 60
    )
    report(
        "3 bound-state counts at N=50",
        ok,
        f"counts g=0.1 {set(counts[0.1])}, g=2 {set(counts[2.0])}, g=5 {set(counts[5.0])}; "
        f"min margins {min_margin[2.0]:.3f}, {min_margin[5.0]:.3f}; {elapsed:.1f} s",
    )
    assert ok


def test_localization_mass(report):
    n, g = 50, 5.0
    params = ModelParams(n, 0.0, 1.0, g)
    worst = np.inf
    checked = 0
    for p in range(n):
        sol = cached_solution(n, 0.0, g, p)
        idx, _ = bound_indices(n, 0.0, g, p)
        for i in idx:
            probs = joint_probabilities(to_real_space(sol.vector(i), params, p))
            worst = min(worst, probs.nn_mass)
            checked += 1
    ok = checked > 0 and worst >= 0.985
    report("4 localization mass", ok, f"min same-site + neighbour mass {worst:.4f} over {checked} bound states")
    assert ok


def test_critical_coupling_endpoint(report):
    gc = critical_coupling(0.0)
    below = len(bound_indices(50, 0.0, 1.7, 1)[0])
    above = len(bound_indices(50, 0.0, 2.0, 1)[0])
    ok = abs(gc - math.sqrt(3)) <= 0.01 * math.sqrt(3) and below == 0 and above > 0
    report("5 critical coupling", ok, f"g_c(0) = {gc:.10f}; bound states at P=1: g=1.7 -> {below}, g=2 -> {above}")
    assert ok


def test_strong_coupling_formula(report):
    n, p = 50, 1
    devs = []
    for g in (8.0, 12.0, 16.0, 20.0):
        params = ModelParams(n, 0.0, 1.0, g)
        sol = cached_solution(n, 0.0, g, p)
        idx, _ = bound_indices(n, 0.0, g, p)
        numeric = np.sort(sol.eigenvalues[idx])
        estimate = np.array(strong_coupling_estimate(params, p))
        assert numeric.shape == (2,)
        devs.append(float(np.abs(numeric - estimate).max()))
    monotone = all(a > b for a, b in zip(devs, devs[1:]))
    ok = monotone and devs[-1] < 0.05
    report(
        "6 strong-coupling estimate",
        ok,
        "deviations " + ", ".join(f"{d:.4f}" for d in devs) + f" J (monotone: {monotone}; need < 0.05 at g=20)",
    )
    assert ok


def test_secular_duality(report):
    n, g, p = 50, 2.0, 15
    params = ModelParams(n, 0.0, 1.0, g)
    sol = solve_sector(params, p)
    sf = SecularFunction(params, p)
    lam = sol.eigenvalues[~sol.spurious_flags]
    lam = lam[np.abs(lam) > 1e-8]
    g_max = float(np.abs(sf(lam, check=False)).max())
    roots = [r.lambda_b for r in find_bound_eigenvalues(params, p)]
    match = max(float(np.abs(sol.eigenvalues - r).min()) for r in roots)
    ok = g_max < 1e-8 and match < 1e-10 and len(roots) > 0
    report("7 secular duality", ok, f"max |G(lambda)| {g_max:.2e}; {len(roots)} gap roots match within {match:.2e}")
    assert ok


def test_symmetries(report):
    worst_sector = 0.0
    for n, g in ((50, 2.0), (9, 1.3)):
        for p in range(1, n // 2 + 1):
            a = cached_solution(n, 0.0, g, p).physical_eigenvalues
            b = cached_solution(n, 0.0, g, n - p).physical_eigenvalues
            worst_sector = max(worst_sector, float(np.abs(a - b).max()))
    worst_gc = 0.0
    for phi in (0.3, 1.1, 2.5):
        worst_gc = max(worst_gc, abs(critical_coupling(phi) - critical_coupling(2 * math.pi - phi)))
    aa0, norm_err = 0.0, 0.0
    params = ModelParams(50, 0.0, 1.0, 5.0)
    for p in (0, 1, 10, 25):
        sol = cached_solution(50, 0.0, 5.0, p)
        for i in bound_indices(50, 0.0, 5.0, p)[0]:
            probs = joint_probabilities(to_real_space(sol.vector(i), params, p))
            aa0 = max(aa0, float(probs.p_aa[0]))
            norm_err = max(norm_err, abs(float(probs.total.sum()) - 1.0))
    ok = worst_sector < 1e-10 and worst_gc < 1e-6 and aa0 == 0.0 and norm_err < 1e-12
    report(
        "8 symmetries",
        ok,
        f"P vs N-P {worst_sector:.1e}; g_c mirror {worst_gc:.1e}; p_aa(0) = {aa0}; normalization {norm_err:.1e}",
    )
    assert ok

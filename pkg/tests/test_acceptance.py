"""Acceptance criteria 1-10. Each test prints one PASS/FAIL line.

Tolerances and runtime budgets are pinned here, independently of the
battery that the ``selftest`` subcommand runs, and the returned details
are re-checked against them.
"""

import math
import subprocess
import sys
from fractions import Fraction

import pytest

from properlab.battery import run_check

CARTAN_TOL = 1e-8
SAMPLING_TOL = 1e-3
MC_MIN_INSIDE = 198  # 99% of 200 trials
Q_SL2_TOL = 0.15
Q_SL3_TOL = 0.3
SHARPNESS_TOL = 1e-3
EXACT_REL_TOL = 4 * sys.float_info.epsilon

BUDGETS = {1: 5, 2: 30, 3: 120, 4: 60, 5: 180, 6: 10, 7: 30, 8: 1, 9: 5, 10: 60}


def _run(number):
    res = run_check(number, seed=0, threads=1)
    assert res.budget == BUDGETS[number]
    return res


def _report(res, ok):
    ok = ok and res.passed and res.seconds < BUDGETS[res.number]
    mark = "PASS" if ok else "FAIL"
    print(f"\n[{mark}] criterion {res.number}: {res.title} ({res.seconds:.2f}s / {BUDGETS[res.number]}s)")
    assert ok, res.details


def test_criterion_01_cartan_projection():
    res = _run(1)
    d = res.details
    _report(res, d["samples"] == 1000 and d["max_error"] <= CARTAN_TOL and d["identity_exact_zero"])


def _on_a_plus_ray(generators):
    # a single generator, a positive multiple of (1, -1)
    if len(generators) != 1:
        return False
    x, y = (Fraction(c) for c in generators[0])
    return x > 0 and x == -y


def test_criterion_02_properness_engine():
    res = _run(2)
    d = res.details
    ok = (
        all(_on_a_plus_ray(d[k]) for k in ("mu_A_cone", "mu_N_cone"))
        and d["A_pitchfork_A"] is False
        and d["A_pitchfork_N"] is False
        and d["engine_A_on_SL2_mod_A"]["proper"] is False
        and d["symmetry_pairs"] == 500
        and d["symmetry_violations"] == 0
    )
    _report(res, ok)


def test_criterion_03_sl2_partition_audit():
    res = _run(3)
    d = res.details
    ok = (
        d["cases"] == 350
        and d["shortcut_agreement"] == d["cases"]
        and d["irreducible_agreement"] == d["irreducible_cases"]
        and len(d["printed_disagreements"]) > 0
        and d["example_n5_m3_flagged"]
    )
    print(f"\n  printed inequality disagrees in {len(d['printed_disagreements'])} of {d['cases']} cases")
    _report(res, ok)


def test_criterion_04_pv_exact():
    res = _run(4)
    d = res.details
    ok = (
        d["sl2_std"] == "2"
        and d["adjoint_A1"] == d["adjoint_A2"] == d["adjoint_B2"] == "1"
        and d["sl3_std"] == "4"
        and 0 <= 4 - d["sl3_sampled_lower_bound"] <= SAMPLING_TOL
        and d["direct_sum_cases"] == d["direct_sum_exact"] == 20
    )
    _report(res, ok)


def test_criterion_05_volume_lab():
    res = _run(5)
    d = res.details
    ok = (
        d["exact_max_rel_error"] <= EXACT_REL_TOL
        and d["mc_trials"] == 200
        and d["mc_within_3_stderr"] >= MC_MIN_INSIDE
        and abs(d["q_sl2"]["q_hat"] - 2.0) <= Q_SL2_TOL
        and abs(d["q_sl3"]["q_hat"] - 4.0) <= Q_SL3_TOL
    )
    print(f"\n  q(SL2) = {d['q_sl2']['q_hat']:.4f}, q(SL3) = {d['q_sl3']['q_hat']:.4f}")
    _report(res, ok)


def test_criterion_06_calabi_markus():
    res = _run(6)
    d = res.details
    # p + q in 1..8 gives sum(total + 1) = 44 pairs
    _report(res, d["pairs"] == 44 and d["disagreements"] == 0)


def test_criterion_07_dimensions():
    res = _run(7)
    d = res.details
    ok = not d["mismatches"] and len(d["triples"]) == 4 and all(t["cocompact"] for t in d["triples"])
    _report(res, ok)


def test_criterion_08_tangential_table():
    res = _run(8)
    d = res.details
    p2 = d["rows"][1]
    ok = d["mismatches"] == [2] and p2["computed"] == "4N" and p2["printed"] == "2N" and len(d["rows"]) == 11
    _report(res, ok)


def test_criterion_09_sharpness():
    res = _run(9)
    d = res.details
    ok = abs(d["c_asymptotic"] - math.sqrt(2) / 2) <= SHARPNESS_TOL and d["all_satisfied"] and d["pairs_checked"] > 0
    _report(res, ok)


def _selftest_json(threads):
    cmd = [sys.executable, "-m", "properlab", "selftest", "--seed", "0", "--threads", str(threads), "--json"]
    proc = subprocess.run(cmd, capture_output=True, timeout=600)
    assert proc.returncode == 0, proc.stderr.decode()
    return proc.stdout


@pytest.mark.slow
def test_criterion_10_determinism():
    res = _run(10)
    one, eight = _selftest_json(1), _selftest_json(8)
    _report(res, res.details["identical"] and one == eight and len(one) > 0)

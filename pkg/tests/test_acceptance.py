"""Acceptance criteria, one test each; every test prints a single PASS/FAIL line."""
import math
import time

import numpy as np
import pytest

from frobtrace.arith import mertens_first_deviation
from frobtrace.census import (
    CensusOptions,
    build_report,
    pk_count,
    prime_trace_count,
    qk_count,
    reciprocal_partial_sum,
)
from frobtrace.frobenius import CurveSpec, build_trace_table, trace_fast, trace_naive
from frobtrace.gl2 import (
    c2_with_bound,
    conjecture_constant,
    count_projective_trace_zero,
    count_projective_trace_zero_brute,
    count_trace_class,
    count_trace_class_brute,
    enumerate_gl2,
    full_image,
    gl2_order,
    trace_histogram,
    w_product,
)
from frobtrace.sieve import (
    GreavesParams,
    J_of,
    SieveData,
    check_lower_lemma,
    leading_terms,
    min_r_for,
    parameter_recipe,
    r1_of,
    r2_of,
    solve_U,
)

from conftest import count_points_brute, seeded_curves


@pytest.fixture
def report(capsys):
    def emit(number: int, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\nACCEPTANCE {number:>2} {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail

    return emit


def timed(fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    return out, time.perf_counter() - t0


def test_01_greaves_functional_values(report):
    jq, tq = timed(J_of, 0.83, 1 / 6)
    jp, tp = timed(J_of, 0.6, 0.25)
    ok = abs(jq - 0.00692) <= 5e-5 and abs(jp - 0.3162) <= 5e-4 and tq < 1 and tp < 1
    report(1, ok, f"J(0.83,1/6)={jq:.7f} ({tq:.3f}s)  J(3/5,1/4)={jp:.7f} ({tp:.3f}s)")


def test_02_solved_parameter(report):
    U, t = timed(solve_U, 0.25, 0.5)
    report(2, abs(U - 0.5111286) <= 5e-5, f"solve_U(1/4, 1/2)={U:.7f} ({t:.3f}s)")


def test_03_exponents_and_coefficients(report):
    r1, r2 = r1_of(0.5), r2_of(0.5)
    co = leading_terms(1e6, 0.5, 1.0)["coefficients"]
    want = {"upper": 6, "lower_Q": 0.0415, "lower_P": 1.8972, "lower_PCC": 1}
    # 0.0415 is 6 * 0.00692 to three significant figures
    coeff_ok = (
        co["upper"] == pytest.approx(6)
        and round(co["lower_Q"], 4) == 0.0415
        and co["lower_P"] == pytest.approx(1.8972, abs=1e-9)
        and co["lower_PCC"] == 1
    )
    ok = (r1, r2) == (4, 5) and coeff_ok
    got = {k: round(v, 6) for k, v in co.items()}
    report(3, ok, f"r1={r1} r2={r2} coefficients={got} want={want}")


def test_04_matrix_count_oracles(report):
    t0 = time.perf_counter()
    bad = []
    for q in (3, 5, 7, 11):
        hist = trace_histogram(q)
        bad += [(q, a) for a in range(q) if hist[a] != count_trace_class(q, a)]
        if count_projective_trace_zero_brute(q) != count_projective_trace_zero(q) != q * q:
            bad.append(("proj", q))
    for q in (3, 5):
        if count_trace_class_brute(q * q, 0) != q**6 - q**5:
            bad.append(("sq", q))
        if count_projective_trace_zero_brute(q * q) != q**4:
            bad.append(("proj-sq", q))
    for m in range(2, 13):
        if int(trace_histogram(m).sum()) != gl2_order(m):
            bad.append(("sum", m))
    enum6 = len(enumerate_gl2(6))
    dt = time.perf_counter() - t0
    ok = not bad and enum6 == 288 and dt < 30
    report(4, ok, f"mismatches={bad} |GL2(Z/6)|={enum6} ({dt:.2f}s)")


def test_05_constant_identity_and_convergence(report):
    rep = conjecture_constant(full_image(2))
    ident = abs(rep.C - 2 * rep.C1 * rep.C2)
    lo, bound_lo, _ = c2_with_bound(2, cutoff=10**4)
    hi, _, _ = c2_with_bound(2, cutoff=10**5)
    z = 10**6
    ratio = w_product(2, z) * math.log(z) / hi
    target = math.exp(-np.euler_gamma)
    ok = ident <= 1e-12 and abs(hi - lo) < bound_lo and abs(ratio / target - 1) <= 0.05
    report(
        5,
        ok,
        f"|C-2C1C2|={ident:.1e}  C2 shift={abs(hi - lo):.2e} < tail {bound_lo:.2e}  "
        f"W*log z/C2={ratio:.6f} vs e^-gamma={target:.6f}",
    )


def test_06_trace_engine(report):
    mismatches = 0
    checked = 0
    for c in seeded_curves(5, seed=1):
        table = build_trace_table(c, 10**4, method="naive", workers=1)
        for p, a in table.records:
            checked += 1
            mismatches += trace_fast(c, p) != a
    curve = CurveSpec(1, 1)
    t8, dt8 = timed(build_trace_table, curve, 10**6, "auto", 8)
    t1 = build_trace_table(curve, 10**6, "auto", 1)
    weil = all(a * a < 4 * p for p, a in t8.records)
    ok = mismatches == 0 and weil and dt8 <= 60 and t1 == t8
    report(
        6,
        ok,
        f"fast==naive on {checked} primes (mismatches={mismatches})  x=1e6 sweep {len(t8)} records "
        f"in {dt8:.1f}s on 8 workers  weil={weil}  deterministic={t1 == t8}",
    )


def test_07_toy_census(report):
    table = build_trace_table(CurveSpec(1, 1), 10, workers=1)
    oracle = tuple((p, p + 1 - count_points_brute(1, 1, p)) for p in (3, 5, 7))
    rep = build_report(table, CensusOptions(m_E=2))
    recip = reciprocal_partial_sum(table, 2)
    ok = (
        table.records == oracle == ((3, 0), (5, -3), (7, 3))
        and prime_trace_count(table) == 2
        and abs(recip - 12 / 35) <= 1e-15
        and rep.counts["gcd_filtered"] == 2
    )
    report(7, ok, f"records={table.records} pi_prime={prime_trace_count(table)} sum={recip!r} (12/35) |A|={rep.counts['gcd_filtered']}")


def test_08_lower_lemma_on_real_data(report):
    x = 10**4
    base = parameter_recipe(0.5, "greaves_Q", x, drop_log_factor=True)
    r = min_r_for(math.ceil(2 * math.sqrt(x)), base.U, base.V, base.z)
    params = GreavesParams(base.mode, 0.5, base.U, base.V, base.xi, base.z, r, base.z_rule)
    lines = []
    ok = True
    for c in seeded_curves(5, seed=8):
        data = SieveData.from_traces(build_trace_table(c, x, workers=1).traces, 2)
        rep = check_lower_lemma(data, params)
        ok &= rep.max_ok and rep.omega_holds
        lines.append(f"{rep.count_omega_le_r}>={rep.H:.1f}")
    report(8, ok, f"z={base.z:.3f} r={r}  #omega<=r >= H: {', '.join(lines)}")


def test_09_census_invariants(report):
    ok = True
    for c in seeded_curves(3, seed=9):
        t = build_trace_table(c, 10**5, workers=1)
        prime = prime_trace_count(t)
        q = [qk_count(t, k) for k in range(1, 9)]
        p = [pk_count(t, k) for k in range(1, 9)]
        ok &= all(prime <= a <= b for a, b in zip(p, q)) and q == sorted(q) and p == sorted(p)
    devs = [mertens_first_deviation(10.0**k) for k in range(1, 7)]
    ok &= max(devs) <= 2
    report(9, ok, f"chain holds on 3 curves at x=1e5; max Mertens deviation={max(devs):.4f}")


def test_10_report_only_asymptotics(report):
    table = build_trace_table(CurveSpec(1, 1), 10**6)
    rep = build_report(table, CensusOptions(image=full_image(2)))
    d = rep.diagnostics
    upper = d["leading_terms"]["upper"]
    ok = rep.counts["prime"] <= 10 * upper
    report(
        10,
        ok,
        f"pi_prime(1e6)={rep.counts['prime']} conjecture_ratio={d['conjecture_ratio']:.4f} "
        f"upper={upper:.0f} lower_Q={d['leading_terms']['lower_Q']:.0f} "
        f"lower_P={d['leading_terms']['lower_P']:.0f} (report-only; band 10*upper)",
    )

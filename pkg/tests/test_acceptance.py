"""Acceptance criteria 1-12; each test prints one PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -v`` (the lines go to the terminal
reporter) or ``python3 tests/test_acceptance.py`` for the lines alone.
"""
import math
import time

import numpy as np
import pytest

from freeorth import tl
from freeorth.estimates import adjoint_state_values, far_apart_norm, s_sum, s_sum_diag
from freeorth.fusion import FusionTable, intertwiner_norm_direct
from freeorth.oracle import (
    adjoint_values_weingarten,
    far_apart_dense,
    intertwiner_norm_dense,
    s_sum_dense,
    s_sum_diag_dense,
)
from freeorth.qnum import QContext, chebyshev, dim_h
from freeorth.rep import build_tower
from freeorth.suite import (
    SuiteContext,
    adjoint_coeff_rows,
    adjoint_state_rows,
    asymptotic_rows,
    brannan_rows,
    character_rows,
    cnd_rows,
    cocycle_rows,
    far_apart_rows,
    norm_rows,
    properness_rows,
    s_sum_rows,
    tower_rows,
)

# pinned tolerances
JW_RUNTIME_S = 60.0
TOWER_ORTH_REL = 1e-9
TOWER_PROJ = 1e-8
NORM_TOL = 1e-8
FAR_SLACK = 0.15
SSUM_GROWTH = 0.05
SSUM_DECOMP = 1e-7
ORACLE_TOL = 1e-8
CHARACTER_TOL = 1e-8
PROPER_REL = 1e-6
CND_TOL = 1e-8
HAND_TOL = 1e-10
BRANNAN_MAX = 10.0
ASYM_MAX = 1.0
ASYM_CAUCHY = 1e-6

_LINES = []


def report(request, number, ok, text):
    line = f"{'PASS' if ok else 'FAIL'}  [{number:>2}] {text}"
    _LINES.append(line)
    tr = request.config.pluginmanager.getplugin("terminalreporter") if request is not None else None
    if tr is not None:
        tr.write_line("")
        tr.write_line(line)
    else:
        print(line)
    return ok


@pytest.fixture(scope="module")
def ctx3(tower3, table3):
    return SuiteContext(3, 8, tower3, table3, tol=NORM_TOL, seed=42)


@pytest.fixture(scope="module")
def ctx4(tower4, table4):
    return SuiteContext(4, 6, tower4, table4, tol=NORM_TOL, seed=42)


def _failed(rows):
    return [r for r in rows if r.verdict == "fail"]


def test_c01_jones_wenzl_exact(request):
    tl._JW_TABLE.clear()
    start = time.perf_counter()
    ok = True
    for delta in (3, 4, 5):
        for k in range(1, 9):
            p = tl.jones_wenzl(k, delta)
            ok &= tl.compose(p, p) == p
            for i in range(1, k):
                e = tl.generator(i, k, delta)
                ok &= tl.compose(e, p).is_zero() and tl.compose(p, e).is_zero()
            ok &= tl.markov_trace(p) == chebyshev(k, delta)
    elapsed = time.perf_counter() - start
    ok = bool(ok) and elapsed < JW_RUNTIME_S
    report(request, 1, ok, f"Jones-Wenzl exact, delta in 3,4,5, k <= 8: {elapsed:.1f}s (< {JW_RUNTIME_S:.0f}s)")
    assert ok


def test_c02_tower(request, ctx3):
    rows = tower_rows(ctx3)
    worst = max(r.value for r in rows)
    ok = not _failed(rows) and len(rows) == 9
    report(request, 2, ok, f"tower n=3, dense k <= 6, matrix-free k <= 8: worst deviation {worst:.2e}")
    assert ok


def test_c03_intertwiner_norms(request, ctx3):
    rows = norm_rows(ctx3, kl_max=5)
    worst = max(r.fitted for r in rows)
    ok = not _failed(rows) and worst <= NORM_TOL
    report(request, 3, ok, f"|N_direct - N_formula| over {len(rows)} cells, k,l <= 5: max {worst:.2e} (<= {NORM_TOL})")
    assert ok


def test_c04_far_apart(request, ctx3):
    rows = far_apart_rows(ctx3)
    fit = [r for r in rows if r.params == "a=1,c=1,fit=b"][0]
    literal = [r.value for r in rows if r.params == "a=1,c=1,r=2"]
    limit = math.log(QContext(3).q) + FAR_SLACK
    ok = fit.value <= limit
    report(
        request,
        4,
        ok,
        f"far-apart log-slope in b (channel r=b): {fit.value:.3f} <= {limit:.3f};"
        f" channel r=2 values {[round(v, 4) for v in literal]} (nonzero only at b=2, no slope)",
    )
    assert ok


def test_c05_s_sums(request, ctx3):
    rows = s_sum_rows(ctx3, seeds=(42, 43, 44))
    checks = [r for r in rows if r.verdict != "info"]
    growth = [r for r in checks if "stabilization" in r.params]
    worst_ratio = max(r.fitted for r in growth)
    slopes = max(r.value for r in checks if "growth" in r.params)
    decomp = max(r.value for r in checks if "decomposition" in r.params)
    ok = not _failed(rows) and worst_ratio <= 1 + SSUM_GROWTH and decomp <= SSUM_DECOMP
    report(
        request,
        5,
        ok,
        f"S-sums seeds 42-44, l in 1,2: max stabilization ratio {worst_ratio:.3f}, max S_+ slope {slopes:.3f},"
        f" decomposition error {decomp:.1e}",
    )
    assert ok


def test_c06_adjoint(request, ctx3):
    coeff = adjoint_coeff_rows(ctx3)
    state = adjoint_state_rows(ctx3)
    slope = [r for r in coeff if r.params == "check=growth"][0].value
    sums = {r.params: r.value for r in state if r.params.startswith("lambda=")}
    ok = not _failed(coeff) and not _failed(state)
    shown = ", ".join(f"{k.split('=')[1]}: {v:.4f}" for k, v in sorted(sums.items()))
    report(request, 6, ok, f"adjoint decay: log-log slope {slope:.3f} (<= 2.5); weighted sums {shown}")
    assert ok


def test_c07_oracle_equivalence(request, tower3, table3):
    dev = 0.0
    rng = np.random.default_rng(42)
    for a, b, c in [(1, 1, 1), (1, 1, 2), (2, 1, 1), (1, 2, 1)]:
        for r in range((a + b + c) % 2, a + b + c + 1, 2):
            dev = max(dev, abs(far_apart_norm(a, b, c, r, tower3) - far_apart_dense(a, b, c, r, 3)))
    for k in range(1, 4):
        for l in range(1, 5 - k):
            for m in range(min(k, l) + 1):
                dev = max(dev, abs(intertwiner_norm_direct(k, l, m, 3) - intertwiner_norm_dense(k, l, m, 3)))
            if l <= k:
                zeta = tower3.embed(l, rng.standard_normal(dim_h(l, 3)))
                for m in range(l + 1):
                    res = s_sum(k, l, m, zeta, table3)
                    channels, plus = s_sum_dense(k, l, m, zeta, 3)
                    dev = max(dev, abs(res.plus - plus), *(abs(res.by_channel.get(r, 0.0) - v) for r, v in channels.items()))
    zeta, xi = (tower3.embed(2, rng.standard_normal(8)) for _ in range(2))
    dev = max(dev, abs(s_sum_diag(2, 1, 1, zeta, xi, tower3) - s_sum_diag_dense(2, 1, 1, zeta, xi, 3)))
    for k, m in [(1, 1), (2, 1), (3, 1), (2, 2)]:
        for a, b in [(0, 0), (0, 1), (1, 2)]:
            got = adjoint_state_values(k, m, a, b, table3)
            want = adjoint_values_weingarten(k, m, tower3.iota(m)[:, a], tower3.iota(m)[:, b], tower3.iota(k), 3)
            dev = max(dev, float(np.abs(got - want).max()))
    ok = dev <= ORACLE_TOL
    report(request, 7, ok, f"dense index-loop oracles, k + l <= 4: max deviation {dev:.2e} (<= {ORACLE_TOL})")
    assert ok


def test_c08_character(request, ctx3, ctx4):
    rows = character_rows(ctx3) + character_rows(ctx4)
    worst = max(r.value for r in rows)
    ok = not _failed(rows) and len(rows) == 14 and worst <= CHARACTER_TOL
    report(request, 8, ok, f"character identity, n in 3,4, r <= 6, 15 probes: max deviation {worst:.2e}")
    assert ok


def test_c09_properness_and_cocycle(request, ctx3):
    prop = properness_rows(ctx3)
    coc = cocycle_rows(ctx3)
    worst_p = max(r.fitted for r in prop)
    worst_c = max(r.fitted for r in coc)
    ok = not _failed(prop) and not _failed(coc) and len(prop) == 6 and len(coc) == 3
    report(request, 9, ok, f"properness r <= 6: rel dev {worst_p:.1e}; cocycle Gram r <= 3: rel dev {worst_c:.1e} (<= {PROPER_REL})")
    assert ok


def test_c10_conditional_negativity(request, ctx3, ctx4):
    rows3, rows4 = cnd_rows(ctx3), cnd_rows(ctx4)
    top = max(r.value for r in rows3 + rows4 if r.params == "L=2")
    hand = [r.value for r in rows3 if r.params == "hand value"][0]
    ok = top <= CND_TOL and abs(hand + 1 / 6) <= HAND_TOL
    report(request, 10, ok, f"psi-Gram on ker(counit), L=2, n in 3,4: max eigenvalue {top:.1e}; hand value {hand:.15f}")
    assert ok


def test_c11_brannan(request, ctx3):
    rows = brannan_rows(ctx3)
    taus = [r for r in cnd_rows(ctx3) if r.params.startswith("s=")]
    sup = max(r.value for r in rows if "sup" in r.bound)
    low = min(r.value for r in taus)
    ok = not _failed(rows) and not _failed(taus) and sup <= BRANNAN_MAX
    report(request, 11, ok, f"Brannan sup_k<=40 over t in 0.1,0.5,1.0: {sup:.4f} (<= {BRANNAN_MAX}); tau_s Gram min eigenvalue {low:.1e}")
    assert ok


def test_c12_asymptotics(request, ctx3):
    rows = asymptotic_rows(ctx3)
    ok = not _failed(rows)
    report(request, 12, ok, f"|c_r - r/sqrt5| max {rows[0].value:.4f} (<= {ASYM_MAX}); |gap_100 - gap_99| {rows[1].value:.1e} (< {ASYM_CAUCHY})")
    assert ok


if __name__ == "__main__":
    t3, t4 = build_tower(8, 3), build_tower(6, 4)
    f3, f4 = FusionTable(t3), FusionTable(t4)
    c3, c4 = SuiteContext(3, 8, t3, f3, tol=NORM_TOL), SuiteContext(4, 6, t4, f4, tol=NORM_TOL)
    calls = [
        (test_c01_jones_wenzl_exact, ()),
        (test_c02_tower, (c3,)),
        (test_c03_intertwiner_norms, (c3,)),
        (test_c04_far_apart, (c3,)),
        (test_c05_s_sums, (c3,)),
        (test_c06_adjoint, (c3,)),
        (test_c07_oracle_equivalence, (t3, f3)),
        (test_c08_character, (c3, c4)),
        (test_c09_properness_and_cocycle, (c3,)),
        (test_c10_conditional_negativity, (c3, c4)),
        (test_c11_brannan, (c3,)),
        (test_c12_asymptotics, (c3,)),
    ]
    failures = 0
    for fn, args in calls:
        try:
            fn(None, *args)
        except AssertionError:
            failures += 1
    raise SystemExit(1 if failures else 0)

import math

import numpy as np
import pytest

from freeorth.errors import ShapeError
from freeorth.estimates import (
    EstimateReport,
    adjoint_coeff,
    adjoint_state_norms,
    conjugate_vector,
    far_apart_norm,
    log_slope,
    loglog_slope,
    s_sum,
    s_sum_diag,
)
from freeorth.qnum import QContext


def test_slopes_recover_exponents():
    ks = [1, 2, 3, 4, 5]
    assert math.isclose(loglog_slope(ks, [3 * k**2 for k in ks]), 2.0, rel_tol=1e-12)
    assert math.isclose(log_slope(ks, [0.5 * 0.3**k for k in ks]), math.log(0.3), rel_tol=1e-12)


def test_estimate_report_dict():
    rep = EstimateReport("FarApart", {"a": 1}, seed=3, anchor="x", tol=1e-8)
    rep.add(1, 0.5, "C q^b")
    d = rep.to_dict()
    assert d["family"] == "FarApart" and d["values"][0][1] == 0.5 and d["seed"] == 3


def test_far_apart_decays_like_q_power(tower3):
    bs = range(1, 6)
    vals = [far_apart_norm(1, b, 1, b, tower3, seed=42) for b in bs]
    assert all(0 < v < 1 for v in vals)
    assert log_slope(list(bs), vals) <= math.log(QContext(3).q) + 0.15


def test_far_apart_forbidden_channel_is_zero(tower3):
    assert far_apart_norm(1, 1, 1, 2, tower3) == 0.0
    assert far_apart_norm(1, 1, 1, 5, tower3) == 0.0


def test_s_sum_preconditions(table3):
    with pytest.raises(ValueError):
        s_sum(2, 0, 0, np.ones(1), table3)
    with pytest.raises(ValueError):
        s_sum(1, 2, 0, np.ones(8), table3)
    with pytest.raises(ShapeError):
        s_sum(2, 1, 0, np.ones(5), table3)


def test_s_sum_accepts_coordinates_or_ambient(table3):
    rng = np.random.default_rng(0)
    x = rng.standard_normal(8)
    a = s_sum(3, 2, 1, x, table3)
    b = s_sum(3, 2, 1, table3.tower.embed(2, x), table3)
    assert a.plus == pytest.approx(b.plus, abs=1e-12)


def test_s_sum_bounded_and_consistent(table3):
    rng = np.random.default_rng(42)
    zeta = rng.standard_normal(3)
    zeta /= np.linalg.norm(zeta)
    for m in (0, 1):
        vals = []
        for k in range(1, 8):
            res = s_sum(k, 1, m, zeta, table3)
            assert res.decomposition_error < 1e-9
            vals.append(max([abs(v) for v in res.by_channel.values()] + [abs(res.plus)]))
        assert max(vals) < 5.0


def test_s_sum_diag_symmetry_and_preconditions(tower3):
    rng = np.random.default_rng(1)
    zeta = tower3.embed(2, rng.standard_normal(8))
    xi = tower3.embed(2, rng.standard_normal(8))
    for k in (2, 4, 5):
        lhs = s_sum_diag(k, 1, 1, zeta, xi, tower3)
        rhs = s_sum_diag(k, 1, 1, conjugate_vector(xi, 2, tower3), conjugate_vector(zeta, 2, tower3), tower3)
        assert abs(lhs - rhs) < 1e-10
    with pytest.raises(ValueError):
        s_sum_diag(1, 1, 1, zeta, xi, tower3)


def test_conjugate_vector_is_involution(tower3):
    v = np.arange(27.0)
    assert np.array_equal(conjugate_vector(conjugate_vector(v, 3, tower3), 3, tower3), v)


def test_adjoint_coeff_shapes_and_errors(table3):
    c, total = adjoint_coeff(3, 1, 0, 2, table3)
    assert c.shape == (2, 21, 21)
    assert total == pytest.approx(float(np.sum(c.sum(axis=0) ** 2)))
    with pytest.raises(ValueError):
        adjoint_coeff(1, 2, 0, 0, table3)
    with pytest.raises(IndexError):
        adjoint_coeff(2, 1, 3, 0, table3)


def test_adjoint_decay(table3):
    q = QContext(3).q
    ks = list(range(1, 8))
    vals = [adjoint_coeff(k, 1, 0, 0, table3)[1] / q**k for k in ks]
    assert loglog_slope(ks, vals) <= 2.5


def test_adjoint_state_norms(table3):
    ks, norms, sums = adjoint_state_norms(1, 0, 0, 7, table3)
    assert ks[0] == 1 and len(norms) == 7
    assert all(np.isfinite(norms))
    assert sums[0.1] > sums[0.5] > sums[1.0] > 0
    assert max(v / k**2 for k, v in zip(ks, norms)) < 1.0

import math

import numpy as np
import pytest

from freeorth.deform import (
    OrthogonalProbe,
    brannan_sup,
    cnd_check,
    cocycle_gram,
    corep_matrix,
    derivative_matrix,
    exp_tangent,
    load_probe,
    multiplier_compression,
    properness_check,
    psi_of_shifted_square,
    tau_gram_min_eig,
)
from freeorth.errors import ShapeError
from freeorth.qnum import QContext, brannan_eigenvalue, chebyshev, dim_h, psi_eigenvalue_exact


def _probes(n, seed=0):
    rng = np.random.default_rng(seed)
    ps = [OrthogonalProbe.rotation(n, t) for t in (0.2, 1.0, 2.4)]
    ps += [OrthogonalProbe.random(n, rng) for _ in range(3)]
    return ps


def test_probe_validation(tmp_path):
    with pytest.raises(ValueError):
        OrthogonalProbe(g=np.array([[1.0, 0.1], [0.0, 1.0]]))
    with pytest.raises(ShapeError):
        OrthogonalProbe(g=np.ones((2, 3)))
    with pytest.raises(ValueError):
        OrthogonalProbe(X=np.ones((3, 3)))
    path = tmp_path / "g.txt"
    np.savetxt(path, OrthogonalProbe.rotation(3, 0.7).g)
    assert np.allclose(load_probe(path).g, OrthogonalProbe.rotation(3, 0.7).g)
    np.savetxt(path, 2 * np.eye(3))
    with pytest.raises(ValueError):
        load_probe(path)


def test_tangent_symmetrizes():
    x = OrthogonalProbe.tangent(np.arange(9.0).reshape(3, 3)).X
    assert np.array_equal(x, -x.T)


@pytest.mark.parametrize("n,tower", [(3, "tower3"), (4, "tower4")])
def test_character_identity(request, n, tower):
    t = request.getfixturevalue(tower)
    for p in _probes(n):
        for r in range(5):
            u = corep_matrix(r, p, t)
            assert np.allclose(u.T @ u, np.eye(dim_h(r, n)), atol=1e-10)
            assert abs(np.trace(u) - chebyshev(r, float(np.trace(p.g)))) <= 1e-8


def test_corep_is_a_homomorphism(tower3):
    a, b = _probes(3, 1)[3:5]
    for r in (1, 2, 3):
        lhs = corep_matrix(r, a.g @ b.g, tower3)
        assert np.allclose(lhs, corep_matrix(r, a, tower3) @ corep_matrix(r, b, tower3), atol=1e-10)


def test_multiplier_compression_matches_brannan(tower3):
    for t in (0.1, 0.5, 1.0):
        g = OrthogonalProbe.rotation(3, t)
        s = float(np.trace(g.g))
        for r in range(6):
            assert math.isclose(multiplier_compression(r, g, tower3), brannan_eigenvalue(r, s, QContext(3)), abs_tol=1e-9)


def test_derivative_by_finite_difference(tower3):
    x = OrthogonalProbe.elementary(3, 0, 2).X
    h = 1e-5
    for r in (1, 2, 3):
        fd = (corep_matrix(r, exp_tangent(x, h), tower3) - corep_matrix(r, exp_tangent(x, -h), tower3)) / (2 * h)
        assert np.allclose(derivative_matrix(r, x, tower3), fd, atol=1e-7)
    with pytest.raises(ValueError):
        derivative_matrix(0, x, tower3)


def test_properness_identity(tower3):
    x = OrthogonalProbe.elementary(3)
    for r in range(1, 7):
        lhs, rhs, rel = properness_check(r, x, tower3)
        assert rel <= 1e-6
    rng = np.random.default_rng(3)
    y = OrthogonalProbe.tangent(rng.standard_normal((3, 3)))
    assert properness_check(4, y, tower3)[2] <= 1e-6


def test_cocycle_gram_is_scalar(table3):
    x = OrthogonalProbe.elementary(3)
    for r in (1, 2, 3):
        g = cocycle_gram(r, x, table3)
        target = 2.0 * float(psi_eigenvalue_exact(r, 3))
        assert np.abs(g - target * np.eye(len(g))).max() / target <= 1e-6


@pytest.mark.parametrize("table", ["table3", "table4"])
def test_psi_conditionally_negative(request, table):
    _, top = cnd_check(2, request.getfixturevalue(table))
    assert top <= 1e-8


def test_psi_hand_value(table3):
    assert abs(psi_of_shifted_square(table3) + 1 / 6) <= 1e-10


def test_tau_state_is_positive(table3):
    for s in (2.5, 2.9, 3.0):
        assert tau_gram_min_eig(2, s, table3) >= -1e-8


def test_brannan_sup_bounded():
    for t in (0.1, 0.5, 1.0):
        sup = brannan_sup(3 - 2 + 2 * math.cos(t), 3)
        assert 1.0 <= sup <= 10.0
    assert brannan_eigenvalue(2, 2.5, QContext(3)) == pytest.approx(0.65625)

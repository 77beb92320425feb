import math
from fractions import Fraction

import numpy as np
import pytest

from freeorth.qnum import (
    QContext,
    brannan_eigenvalue,
    chebyshev,
    chebyshev_pair,
    dim_h,
    fusion_channels,
    path_multiplicity,
    psi_eigenvalue,
    psi_eigenvalue_exact,
    qnumber,
)


def test_dims_n3_are_alternate_fibonacci():
    assert [dim_h(k, 3) for k in range(9)] == [1, 3, 8, 21, 55, 144, 377, 987, 2584]


@pytest.mark.parametrize("n", [3, 4, 5, 7])
def test_chebyshev_matches_closed_form(n):
    c = QContext(n)
    for k in range(30):
        closed = (c.rho ** (k + 1) - c.q ** (k + 1)) / (c.rho - c.q)
        assert math.isclose(chebyshev(k, float(n)), closed, rel_tol=1e-12)


def test_chebyshev_trig_identity():
    # U_k(2 cos t) = sin((k+1)t) / sin t
    for t in (0.3, 1.1, 2.5):
        for k in range(12):
            assert math.isclose(chebyshev(k, 2 * math.cos(t)), math.sin((k + 1) * t) / math.sin(t), abs_tol=1e-12)


def test_chebyshev_exact_kinds():
    assert chebyshev(4, 3) == 55 and isinstance(chebyshev(4, 3), int)
    assert chebyshev(2, Fraction(1, 2)) == Fraction(-3, 4)
    with pytest.raises(ValueError):
        chebyshev(-1, 3)


def test_chebyshev_pair_derivative_by_finite_difference():
    h = 1e-6
    for k in range(1, 10):
        _, d = chebyshev_pair(k, 3.3)
        fd = (chebyshev(k, 3.3 + h) - chebyshev(k, 3.3 - h)) / (2 * h)
        assert math.isclose(d, fd, rel_tol=1e-7)


def test_quantum_dimension_equals_classical_dimension():
    for n in (3, 4, 6):
        q = QContext(n).q
        for k in range(12):
            assert math.isclose(qnumber(k + 1, q), dim_h(k, n), rel_tol=1e-11)


def test_q_is_small_root():
    c = QContext(3)
    assert math.isclose(c.q, (3 - math.sqrt(5)) / 2, rel_tol=1e-15)
    assert math.isclose(c.q * c.rho, 1.0, rel_tol=1e-15)
    assert c.delta == 3


@pytest.mark.parametrize("bad", [2, 0, -4])
def test_context_rejects_small_n(bad):
    with pytest.raises(ValueError):
        QContext(bad)


def test_context_rejects_non_integer():
    with pytest.raises(TypeError):
        QContext(3.0)


def test_psi_eigenvalues_exact_small():
    assert psi_eigenvalue_exact(0, 3) == 0
    assert psi_eigenvalue_exact(1, 3) == Fraction(1, 3)
    assert psi_eigenvalue_exact(2, 3) == Fraction(3, 4)
    assert psi_eigenvalue(2, QContext(3)) == 0.75


def test_brannan_eigenvalue_against_direct_ratio():
    c = QContext(4)
    for s in (2.1, 3.0, 3.9):
        for k in range(25):
            assert math.isclose(brannan_eigenvalue(k, s, c), chebyshev(k, s) / chebyshev(k, 4.0), rel_tol=1e-10)
    assert brannan_eigenvalue(5, 4.0, c) == 1.0


def test_brannan_eigenvalue_large_k_stays_finite():
    v = brannan_eigenvalue(5000, 2.5, QContext(3))
    assert 0.0 <= v < 1e-100 or v == 0.0


@pytest.mark.parametrize("s", [2.0, 3.5, 1.0])
def test_brannan_eigenvalue_domain(s):
    with pytest.raises(ValueError):
        brannan_eigenvalue(3, s, QContext(3))


def test_path_multiplicities_sum_to_tensor_dimension():
    for n in (3, 4):
        for k in range(10):
            assert sum(path_multiplicity(k, r) * dim_h(r, n) for r in range(k + 1)) == n**k


def test_path_multiplicity_catalan():
    catalan = [1, 1, 2, 5, 14, 42]
    assert [path_multiplicity(2 * j, 0) for j in range(6)] == catalan
    assert path_multiplicity(3, 2) == 0


def test_fusion_channels():
    assert fusion_channels(2, 3) == [1, 3, 5]
    assert fusion_channels(0, 4) == [4]
    for k in range(5):
        for l in range(5):
            assert sum(dim_h(r, 3) for r in fusion_channels(k, l)) == dim_h(k, 3) * dim_h(l, 3)


def test_dim_negative_is_zero():
    assert dim_h(-1, 3) == 0
    assert np.isfinite(chebyshev(60, 3.0))

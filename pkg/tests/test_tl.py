import itertools
import random
from fractions import Fraction

import pytest

from freeorth.errors import ShapeError
from freeorth.qnum import chebyshev
from freeorth.tl import (
    Pairing,
    TLElement,
    cap,
    compose,
    cup,
    generator,
    identity,
    jones_wenzl,
    markov_trace,
    noncrossing_pairings,
    parse_element,
    parse_pairing,
    stack_pairings,
    tensor,
)

CATALAN = [1, 1, 2, 5, 14, 42, 132, 429]


def e(i, k, d=3):
    return generator(i, k, d)


def test_compose_with_identity():
    for d in noncrossing_pairings(2, 4):
        x = TLElement(2, 4, 3, {d: 1})
        assert compose(identity(2, 3), x) == x
        assert compose(x, identity(4, 3)) == x


def test_cup_cap_loop():
    assert compose(e(1, 2), e(1, 2)) == 3 * e(1, 2)
    closed = compose(cap(3), cup(3))
    assert closed.shape == (0, 0) and markov_trace(closed) == 3


def test_temperley_lieb_relations():
    for k in (3, 4, 5):
        for i in range(1, k - 1):
            assert compose(compose(e(i, k), e(i + 1, k)), e(i, k)) == e(i, k)
            assert compose(compose(e(i + 1, k), e(i, k)), e(i + 1, k)) == e(i + 1, k)
        for i, j in itertools.combinations(range(1, k), 2):
            if j - i > 1:
                assert compose(e(i, k), e(j, k)) == compose(e(j, k), e(i, k))


def test_noncrossing_counts_are_catalan():
    for total in range(0, 14, 2):
        for top in range(total + 1):
            assert len(noncrossing_pairings(top, total - top)) == CATALAN[total // 2]


def test_pairing_rejects_crossing():
    with pytest.raises(ValueError):
        Pairing.from_pairs(4, 0, [(0, 2), (1, 3)])
    with pytest.raises(ValueError):
        Pairing.from_pairs(2, 1, [(0, 1)])


def test_pairing_render_roundtrip():
    for d in noncrossing_pairings(3, 3):
        assert parse_pairing(d.render()) == d
    assert identity(2, 3).render() == "delta=3: 1*[2|2:(1,3)(2,4)]"


def test_element_roundtrip():
    for k in range(1, 6):
        p = jones_wenzl(k, 4)
        assert parse_element(p.render()) == p
    z = TLElement(2, 2, 3)
    assert parse_element(z.render()) == z and z.is_zero()


def _random_element(rng, top, bottom, delta):
    ds = noncrossing_pairings(top, bottom)
    return TLElement(top, bottom, delta, {rng.choice(ds): Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(3)})


def test_compose_associative_on_random_elements():
    rng = random.Random(7)
    for _ in range(20):
        a, b, c, dd = rng.choice([(2, 2, 4, 2), (3, 1, 3, 1), (4, 2, 2, 4), (1, 3, 1, 1)])
        f = _random_element(rng, a, b, 3)
        g = _random_element(rng, b, c, 3)
        h = _random_element(rng, c, dd, 3)
        assert compose(compose(f, g), h) == compose(f, compose(g, h))


def test_compose_bilinear():
    rng = random.Random(3)
    f1, f2 = _random_element(rng, 3, 3, 4), _random_element(rng, 3, 3, 4)
    g = _random_element(rng, 3, 1, 4)
    assert compose(f1 + f2, g) == compose(f1, g) + compose(f2, g)
    assert compose(Fraction(2, 3) * f1, g) == Fraction(2, 3) * compose(f1, g)


def test_tensor_interchange_law():
    rng = random.Random(11)
    f, g = _random_element(rng, 2, 2, 3), _random_element(rng, 2, 2, 3)
    h, k = _random_element(rng, 1, 3, 3), _random_element(rng, 3, 1, 3)
    lhs = compose(tensor(f, h), tensor(g, k))
    rhs = tensor(compose(f, g), compose(h, k))
    assert lhs == rhs


def test_stack_counts_loops():
    d = noncrossing_pairings(2, 2)
    cupcap = [x for x in d if x.through_degree == 0][0]
    _, loops = stack_pairings(cupcap, cupcap)
    assert loops == 1


def test_markov_trace_values():
    assert markov_trace(identity(4, 3)) == 81
    assert markov_trace(e(1, 2)) == 3
    assert markov_trace(jones_wenzl(2, 3)) == 8


def test_markov_trace_rejects_rectangle():
    with pytest.raises(ShapeError):
        markov_trace(cup(3))


def test_jones_wenzl_two():
    assert jones_wenzl(2, 3) == identity(2, 3) - Fraction(1, 3) * e(1, 2)
    assert jones_wenzl(1, 5) == identity(1, 5)


@pytest.mark.parametrize("delta", [3, 4, 5])
def test_jones_wenzl_exact_properties(delta):
    for k in range(1, 8):
        p = jones_wenzl(k, delta)
        assert compose(p, p) == p
        for i in range(1, k):
            assert compose(generator(i, k, delta), p).is_zero()
            assert compose(p, generator(i, k, delta)).is_zero()
        assert markov_trace(p) == chebyshev(k, delta)
        assert len(p) == CATALAN[k]


def test_jones_wenzl_cap():
    with pytest.raises(ValueError):
        jones_wenzl(11, 3)


def test_shape_and_delta_mismatch():
    with pytest.raises(ShapeError):
        compose(identity(2, 3), identity(3, 3))
    with pytest.raises(ValueError):
        compose(identity(2, 3), identity(2, 4))
    with pytest.raises(ValueError):
        generator(3, 3, 3)

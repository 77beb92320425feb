"""Exact Temperley-Lieb diagram algebra with integer loop value.

A diagram of shape ``(a, b)`` has ``a`` upper endpoints (outputs) and ``b``
lower endpoints (inputs); it maps ``(R^n)^{(x)b}`` to ``(R^n)^{(x)a}``.
Endpoints are numbered ``0..a-1`` along the top, left to right, then
``a..a+b-1`` along the bottom, left to right. ``compose(f, g)`` is ``f o g``:
``g`` is stacked under ``f``.
"""
from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from math import lcm

from .errors import ShapeError
from .qnum import chebyshev

DEFAULT_JW_CAP = 10


class Pairing:
    """A planar perfect matching on the ``a + b`` endpoints of a rectangle.

    Stored as the involution ``partner`` (``partner[i] == j`` iff ``i`` and
    ``j`` are joined); this representation is unique, so equal diagrams
    compare and hash equal.
    """

    __slots__ = ("top", "bottom", "partner", "_hash")

    def __init__(self, top: int, bottom: int, partner, check: bool = True):
        self.top = top
        self.bottom = bottom
        self.partner = tuple(partner)
        if check:
            self._validate()
        self._hash = hash((top, bottom, self.partner))

    @classmethod
    def from_pairs(cls, top: int, bottom: int, pairs) -> "Pairing":
        partner = [-1] * (top + bottom)
        for i, j in pairs:
            if partner[i] != -1 or partner[j] != -1:
                raise ValueError(f"endpoint used twice in {pairs!r}")
            partner[i], partner[j] = j, i
        return cls(top, bottom, partner)

    def _validate(self):
        size = self.top + self.bottom
        if size % 2:
            raise ValueError("a + b must be even")
        if len(self.partner) != size:
            raise ValueError("partner length does not match shape")
        for i, j in enumerate(self.partner):
            if not 0 <= j < size or j == i or self.partner[j] != i:
                raise ValueError(f"not a perfect matching: {self.partner}")
        # noncrossing once endpoints are read around the boundary
        pos = [self._cyclic(i) for i in range(size)]
        chords = [(min(pos[i], pos[j]), max(pos[i], pos[j])) for i, j in self.pairs]
        for x1, y1 in chords:
            for x2, y2 in chords:
                if x1 < x2 < y1 < y2:
                    raise ValueError(f"crossing pairing: {self.pairs}")

    def _cyclic(self, i: int) -> int:
        if i < self.top:
            return i
        return self.top + (self.bottom - 1 - (i - self.top))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.top, self.bottom)

    @property
    def pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple((i, j) for i, j in enumerate(self.partner) if i < j)

    @property
    def through_degree(self) -> int:
        return sum(1 for i, j in enumerate(self.partner) if i < self.top <= j)

    def __eq__(self, other):
        if not isinstance(other, Pairing):
            return NotImplemented
        return (self.top, self.bottom, self.partner) == (other.top, other.bottom, other.partner)

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return (self.top, self.bottom, self.pairs) < (other.top, other.bottom, other.pairs)

    def render(self) -> str:
        body = "".join(f"({i + 1},{j + 1})" for i, j in self.pairs)
        return f"{self.top}|{self.bottom}:{body}"

    def __repr__(self):
        return f"Pairing({self.render()})"


_PAIRING_RE = re.compile(r"^(\d+)\|(\d+):((?:\(\d+,\d+\))*)$")


def parse_pairing(text: str) -> Pairing:
    m = _PAIRING_RE.match(text.strip())
    if not m:
        raise ValueError(f"cannot parse pairing {text!r}")
    a, b = int(m.group(1)), int(m.group(2))
    pairs = [(int(x) - 1, int(y) - 1) for x, y in re.findall(r"\((\d+),(\d+)\)", m.group(3))]
    return Pairing.from_pairs(a, b, pairs)


def _stack(a: int, b: int, c: int, fp, gp):
    """Partner tuple and loop count of ``f o g``, f of shape (a, b), g of shape (b, c)."""
    res = [-1] * (a + c)
    seen = [False] * b
    # follow each strand starting from an outer endpoint
    for start in range(a + c):
        if res[start] != -1:
            continue
        if start < a:
            j = fp[start]
            in_f = True
        else:
            j = gp[b + start - a]
            in_f = False
        while True:
            if in_f:
                if j < a:
                    end = j
                    break
                m = j - a
                seen[m] = True
                j = gp[m]
                in_f = False
            else:
                if j >= b:
                    end = a + j - b
                    break
                seen[j] = True
                j = fp[a + j]
                in_f = True
        res[start] = end
        res[end] = start
    loops = 0
    for m0 in range(b):
        if seen[m0]:
            continue
        loops += 1
        m = m0
        while not seen[m]:
            seen[m] = True
            m2 = gp[m]
            seen[m2] = True
            m = fp[a + m2] - a
    return tuple(res), loops


def stack_pairings(f: Pairing, g: Pairing) -> tuple[Pairing, int]:
    """Stack ``g`` under ``f``; return the resulting diagram and the number of closed loops."""
    if f.bottom != g.top:
        raise ShapeError(f"cannot compose shapes {f.shape} and {g.shape}")
    partner, loops = _stack(f.top, f.bottom, g.bottom, f.partner, g.partner)
    return Pairing(f.top, g.bottom, partner, check=False), loops


@lru_cache(maxsize=None)
def noncrossing_pairings(top: int, bottom: int) -> tuple[Pairing, ...]:
    """All planar pairings of shape ``(top, bottom)``, sorted (Catalan many)."""
    size = top + bottom
    if size % 2:
        return ()
    order = list(range(top)) + list(range(top + bottom - 1, top - 1, -1))

    def rec(points):
        if not points:
            yield []
            return
        first = points[0]
        for idx in range(1, len(points), 2):
            inner, outer = points[1:idx], points[idx + 1:]
            for left in rec(inner):
                for right in rec(outer):
                    yield [(first, points[idx])] + left + right

    out = []
    for pairs in rec(order):
        out.append(Pairing.from_pairs(top, bottom, [(min(p), max(p)) for p in pairs]))
    return tuple(sorted(out))


class TLElement:
    """Finite linear combination of diagrams of one shape with ``Fraction`` coefficients."""

    __slots__ = ("top", "bottom", "delta", "terms")

    def __init__(self, top: int, bottom: int, delta: int, terms=None):
        self.top = top
        self.bottom = bottom
        self.delta = int(delta)
        clean: dict[Pairing, Fraction] = {}
        for d, c in (terms or {}).items():
            if d.shape != (top, bottom):
                raise ShapeError(f"term of shape {d.shape} in element of shape {(top, bottom)}")
            c = Fraction(c)
            if c:
                clean[d] = clean.get(d, Fraction(0)) + c
        self.terms = {d: c for d, c in clean.items() if c}

    @property
    def shape(self) -> tuple[int, int]:
        return (self.top, self.bottom)

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if not isinstance(other, TLElement):
            return NotImplemented
        return self.shape == other.shape and self.delta == other.delta and self.terms == other.terms

    def __add__(self, other: "TLElement") -> "TLElement":
        _check_same(self, other)
        terms = dict(self.terms)
        for d, c in other.terms.items():
            terms[d] = terms.get(d, Fraction(0)) + c
        return TLElement(self.top, self.bottom, self.delta, terms)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other: "TLElement") -> "TLElement":
        return self + (-other)

    def scale(self, c) -> "TLElement":
        c = Fraction(c)
        return TLElement(self.top, self.bottom, self.delta, {d: c * v for d, v in self.terms.items()})

    def __rmul__(self, c):
        return self.scale(c)

    def __matmul__(self, other: "TLElement") -> "TLElement":
        return compose(self, other)

    def is_zero(self) -> bool:
        return not self.terms

    def render(self) -> str:
        if not self.terms:
            return f"0[{self.top}|{self.bottom};{self.delta}]"
        parts = [f"{c}*[{d.render()}]" for d, c in sorted(self.terms.items())]
        return f"delta={self.delta}: " + " + ".join(parts)

    def __repr__(self):
        return f"TLElement({self.render()})"


def parse_element(text: str) -> TLElement:
    text = text.strip()
    head, _, body = text.partition(": ")
    if text.startswith("0["):
        m = re.match(r"^0\[(\d+)\|(\d+);(-?\d+)\]$", text)
        if not m:
            raise ValueError(f"cannot parse element {text!r}")
        return TLElement(int(m.group(1)), int(m.group(2)), int(m.group(3)))
    if not head.startswith("delta="):
        raise ValueError(f"cannot parse element {text!r}")
    delta = int(head[len("delta="):])
    terms = {}
    shape = None
    for chunk in body.split(" + "):
        coeff, _, diag = chunk.partition("*[")
        d = parse_pairing(diag.rstrip("]"))
        shape = d.shape
        terms[d] = Fraction(coeff)
    return TLElement(shape[0], shape[1], delta, terms)


def _check_same(x: TLElement, y: TLElement):
    if x.shape != y.shape:
        raise ShapeError(f"shape mismatch {x.shape} vs {y.shape}")
    if x.delta != y.delta:
        raise ValueError(f"loop value mismatch {x.delta} vs {y.delta}")


def _integerize(x: TLElement):
    den = 1
    for c in x.terms.values():
        den = lcm(den, c.denominator)
    return den, [(d.partner, int(c * den)) for d, c in x.terms.items()]


def compose(f: TLElement, g: TLElement) -> TLElement:
    """``f o g``: bilinear stacking, each closed loop contributing a factor ``delta``."""
    if f.bottom != g.top:
        raise ShapeError(f"cannot compose shapes {f.shape} and {g.shape}")
    if f.delta != g.delta:
        raise ValueError(f"loop value mismatch {f.delta} vs {g.delta}")
    a, b, c = f.top, f.bottom, g.bottom
    # integer accumulation; one Fraction per output term at the end
    df, fterms = _integerize(f)
    dg, gterms = _integerize(g)
    powers = [f.delta**i for i in range(b + 1)]
    acc: dict[tuple, int] = {}
    for fp, fc in fterms:
        for gp, gc in gterms:
            partner, loops = _stack(a, b, c, fp, gp)
            acc[partner] = acc.get(partner, 0) + fc * gc * powers[loops]
    den = df * dg
    terms = {Pairing(a, c, p, check=False): Fraction(v, den) for p, v in acc.items() if v}
    return TLElement(a, c, f.delta, terms)


def tensor(f: TLElement, g: TLElement) -> TLElement:
    """Side-by-side juxtaposition, ``f`` on the left."""
    if f.delta != g.delta:
        raise ValueError(f"loop value mismatch {f.delta} vs {g.delta}")
    a1, b1, a2, b2 = f.top, f.bottom, g.top, g.bottom
    top, bottom = a1 + a2, b1 + b2

    def relabel_f(i):
        return i if i < a1 else top + (i - a1)

    def relabel_g(i):
        return a1 + i if i < a2 else top + b1 + (i - a2)

    terms = {}
    for d1, c1 in f.terms.items():
        for d2, c2 in g.terms.items():
            partner = [0] * (top + bottom)
            for i, j in enumerate(d1.partner):
                partner[relabel_f(i)] = relabel_f(j)
            for i, j in enumerate(d2.partner):
                partner[relabel_g(i)] = relabel_g(j)
            d = Pairing(top, bottom, partner, check=False)
            terms[d] = terms.get(d, Fraction(0)) + c1 * c2
    return TLElement(top, bottom, f.delta, terms)


def identity(k: int, delta: int) -> TLElement:
    partner = [k + i for i in range(k)] + list(range(k))
    return TLElement(k, k, delta, {Pairing(k, k, partner, check=False): 1})


def cup(delta: int) -> TLElement:
    """Shape (2, 0): the fixed vector ``sum_i e_i (x) e_i``."""
    return TLElement(2, 0, delta, {Pairing(2, 0, (1, 0)): 1})


def cap(delta: int) -> TLElement:
    """Shape (0, 2): the adjoint of :func:`cup`."""
    return TLElement(0, 2, delta, {Pairing(0, 2, (1, 0)): 1})


def generator(i: int, k: int, delta: int) -> TLElement:
    """Cup-cap generator ``e_i`` in ``TL_k`` for ``1 <= i <= k-1``."""
    if not 1 <= i <= k - 1:
        raise ValueError(f"generator index {i} out of range for TL_{k}")
    partner = [k + j for j in range(k)] + list(range(k))
    t0, t1 = i - 1, i
    b0, b1 = k + i - 1, k + i
    partner[t0], partner[t1] = t1, t0
    partner[b0], partner[b1] = b1, b0
    return TLElement(k, k, delta, {Pairing(k, k, partner, check=False): 1})


def _closure_loops(d: Pairing) -> int:
    k = d.top
    parent = list(range(2 * k))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[rx] = ry

    for i, j in enumerate(d.partner):
        union(i, j)
    for i in range(k):
        union(i, k + i)
    return len({find(x) for x in range(2 * k)})


def markov_trace(f: TLElement) -> Fraction:
    """Close top endpoint i to bottom endpoint i and count loops."""
    if f.top != f.bottom:
        raise ShapeError(f"markov trace needs a square shape, got {f.shape}")
    total = Fraction(0)
    for d, c in f.terms.items():
        total += c * f.delta ** _closure_loops(d)
    return total


_JW_TABLE: dict[tuple[int, int], TLElement] = {}


def jones_wenzl(k: int, delta: int, cap: int = DEFAULT_JW_CAP) -> TLElement:
    """Jones-Wenzl idempotent ``p_k`` in ``TL_k(delta)`` by Wenzl's recursion.

    ``p_k = (p_{k-1} (x) 1) - U_{k-2}/U_{k-1} (p_{k-1} (x) 1) e_{k-1} (p_{k-1} (x) 1)``.
    Results are memoized per ``(k, delta)``.
    """
    delta = getattr(delta, "n", delta)
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    if k > cap:
        raise ValueError(f"k={k} exceeds the Jones-Wenzl cap {cap}")
    if k <= 1:
        return identity(k, delta)
    key = (k, delta)
    if key not in _JW_TABLE:
        prev = tensor(jones_wenzl(k - 1, delta, cap), identity(1, delta))
        coeff = Fraction(chebyshev(k - 2, delta), chebyshev(k - 1, delta))
        middle = compose(compose(prev, generator(k - 1, k, delta)), prev)
        _JW_TABLE[key] = prev - middle.scale(coeff)
    return _JW_TABLE[key]

"""Scalar combinatorics: dilated Chebyshev polynomials, dimensions, multiplier eigenvalues.

Everything here works both in exact arithmetic (``int`` / ``Fraction``) and in
double precision, depending on the type of the argument.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache


@dataclass(frozen=True)
class QContext:
    """Ambient parameters for the free orthogonal quantum group of rank ``n``.

    ``q`` and ``rho`` are the two roots of ``X**2 - n*X + 1``; ``delta`` is the
    loop value of the Temperley-Lieb category, equal to ``n`` in the Kac case.
    """

    n: int

    def __post_init__(self):
        if not isinstance(self.n, int) or isinstance(self.n, bool):
            raise TypeError(f"n must be an integer, got {self.n!r}")
        if self.n < 3:
            raise ValueError(f"n must be >= 3, got {self.n}")

    @property
    def delta(self) -> int:
        return self.n

    @property
    def q(self) -> float:
        # stable branch, avoids cancellation in (n - sqrt(n^2 - 4)) / 2
        return 2.0 / (self.n + math.sqrt(self.n * self.n - 4))

    @property
    def rho(self) -> float:
        return (self.n + math.sqrt(self.n * self.n - 4)) / 2.0

    def dim(self, k: int) -> int:
        return dim_h(k, self.n)

    def cheb(self, k: int, x=None):
        """``U_k(x)``; defaults to ``x = n`` (exact)."""
        return chebyshev(k, self.n if x is None else x)


def chebyshev(k: int, x):
    """Dilated Chebyshev polynomial of the second kind ``U_k(x)``.

    Uses ``x U_k = U_{k-1} + U_{k+1}`` with ``U_0 = 1``, ``U_1 = x``. The result
    has the same numeric kind as ``x`` (exact for ``int``/``Fraction``).
    """
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    prev, cur = 0 * x, 1 + 0 * x
    for _ in range(k):
        prev, cur = cur, x * cur - prev
    return cur


def chebyshev_pair(k: int, x):
    """Return ``(U_k(x), U_k'(x))`` through the coupled recursion.

    ``U'_{k+1} = x U'_k + U_k - U'_{k-1}``.
    """
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    u_prev, u = 0 * x, 1 + 0 * x
    d_prev, d = 0 * x, 0 * x
    for _ in range(k):
        u_prev, u, d_prev, d = u, x * u - u_prev, d, x * d + u - d_prev
    return u, d


@lru_cache(maxsize=None)
def dim_h(k: int, n: int) -> int:
    """Dimension of the k-th irreducible space ``H_k``, i.e. ``U_k(n)``."""
    if k < 0:
        return 0
    return chebyshev(k, n)


def qnumber(k: int, q: float) -> float:
    """Quantum integer ``[k]_q = (q^k - q^-k) / (q - q^-1)``."""
    if q == 1.0:
        return float(k)
    return (q**k - q ** (-k)) / (q - 1.0 / q)


def psi_eigenvalue_exact(r: int, n: int) -> Fraction:
    u, du = chebyshev_pair(r, n)
    return Fraction(du, u)


def psi_eigenvalue(r: int, ctx: QContext) -> float:
    """Eigenvalue ``U'_r(n) / U_r(n)`` of the conditionally negative form on block r."""
    if r < 0:
        raise ValueError(f"r must be >= 0, got {r}")
    return float(psi_eigenvalue_exact(r, ctx.n))


def brannan_eigenvalue(k: int, s: float, ctx: QContext) -> float:
    """Eigenvalue ``U_k(s) / U_k(n)`` of the multiplier on block k, for ``2 < s <= n``."""
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    if not 2.0 < s <= ctx.n:
        raise ValueError(f"s must lie in (2, {ctx.n}], got {s}")
    if s == ctx.n:
        return 1.0
    # both sequences rescaled by U_j(n) each step so nothing overflows for large k
    a_prev, a = 0.0, 1.0
    b_prev, b = 0.0, 1.0
    for _ in range(k):
        a_prev, a = a, s * a - a_prev
        b_prev, b = b, ctx.n * b - b_prev
        a_prev, a, b_prev, b = a_prev / b, a / b, b_prev / b, 1.0
    return a / b


def path_multiplicity(k: int, r: int) -> int:
    """Number of +-1 walks of length k from 0 to r staying >= 0.

    This is the multiplicity of ``H_r`` inside ``H_1^{(x)k}``.
    """
    if r < 0 or r > k or (k - r) % 2:
        return 0
    counts = {0: 1}
    for _ in range(k):
        nxt: dict[int, int] = {}
        for h, c in counts.items():
            nxt[h + 1] = nxt.get(h + 1, 0) + c
            if h > 0:
                nxt[h - 1] = nxt.get(h - 1, 0) + c
        counts = nxt
    return counts.get(r, 0)


def fusion_channels(k: int, l: int) -> list[int]:
    """Irreducibles appearing in ``H_k (x) H_l``: |k-l|, |k-l|+2, ..., k+l."""
    return list(range(abs(k - l), k + l + 1, 2))

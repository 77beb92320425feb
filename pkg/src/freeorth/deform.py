"""Evaluation at orthogonal matrices, the Brannan multipliers and the derivation cocycle."""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.linalg import expm

from .errors import ShapeError
from .fusion import CoefficientAlgebra, FusionTable
from .qnum import QContext, brannan_eigenvalue, chebyshev, chebyshev_pair, dim_h
from .rep import IsometryTower


@dataclass(frozen=True)
class OrthogonalProbe:
    """An orthogonal matrix ``g`` and/or an antisymmetric tangent vector ``X``."""

    g: np.ndarray | None = None
    X: np.ndarray | None = None
    t: float | None = None

    def __post_init__(self):
        if self.g is not None:
            g = np.asarray(self.g, dtype=float)
            if g.ndim != 2 or g.shape[0] != g.shape[1]:
                raise ShapeError(f"probe must be square, got {g.shape}")
            if np.abs(g.T @ g - np.eye(g.shape[0])).max() > 1e-12:
                raise ValueError("probe matrix is not orthogonal to within 1e-12")
            object.__setattr__(self, "g", g)
        if self.X is not None:
            x = np.asarray(self.X, dtype=float)
            if np.any(x.T != -x):
                raise ValueError("tangent vector must be exactly antisymmetric")
            object.__setattr__(self, "X", x)

    @classmethod
    def rotation(cls, n: int, t: float) -> "OrthogonalProbe":
        """``g_t = id_{n-2} (+) R_t`` with trace ``n - 2 + 2 cos t``."""
        g = np.eye(n)
        c, s = math.cos(t), math.sin(t)
        g[n - 2 :, n - 2 :] = [[c, -s], [s, c]]
        return cls(g=g, t=t)

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "OrthogonalProbe":
        q, r = np.linalg.qr(rng.standard_normal((n, n)))
        q = q * np.sign(np.diag(r))
        # re-orthogonalize so the 1e-12 check holds comfortably
        u, _, vt = np.linalg.svd(q)
        return cls(g=u @ vt)

    @classmethod
    def tangent(cls, x: np.ndarray) -> "OrthogonalProbe":
        x = np.asarray(x, dtype=float)
        return cls(X=(x - x.T) / 2 if np.any(x.T != -x) else x)

    @classmethod
    def elementary(cls, n: int, i: int = 0, j: int = 1) -> "OrthogonalProbe":
        x = np.zeros((n, n))
        x[i, j], x[j, i] = 1.0, -1.0
        return cls(X=x)


def load_probe(path) -> OrthogonalProbe:
    """Read a whitespace-separated square matrix; orthogonality is validated."""
    return OrthogonalProbe(g=np.loadtxt(Path(path), ndmin=2))


def exp_tangent(X: np.ndarray, t: float = 1.0) -> np.ndarray:
    return expm(t * np.asarray(X, dtype=float))


def corep_matrix(r: int, g, tower: IsometryTower) -> np.ndarray:
    """``u^r(g) = iota_r^T g^{(x)r} iota_r`` via ``u^r = up_r^T (u^{r-1} (x) g) up_r``."""
    g = g.g if isinstance(g, OrthogonalProbe) else np.asarray(g, dtype=float)
    u = np.ones((1, 1))
    for j in range(1, r + 1):
        up = tower.up(j)
        lifted = np.einsum("ab,cd,bde->ace", u, g, up.reshape(u.shape[0], g.shape[0], -1), optimize=True)
        u = up.T @ lifted.reshape(up.shape)
    return u


def multiplier_compression(r: int, g, tower: IsometryTower, check: bool = True) -> float:
    """Normalized character ``Tr u^r(g) / U_r(n)``; equals the Brannan eigenvalue at ``s = Tr g``."""
    g = g.g if isinstance(g, OrthogonalProbe) else np.asarray(g, dtype=float)
    n = tower.n
    value = float(np.trace(corep_matrix(r, g, tower))) / dim_h(r, n)
    if check:
        s = float(np.trace(g))
        expected = brannan_eigenvalue(r, s, QContext(n)) if 2.0 < s <= n else chebyshev(r, s) / dim_h(r, n)
        if abs(value - expected) > 1e-9:
            raise ArithmeticError(f"compression {value!r} differs from U_r(s)/U_r(n) = {expected!r}")
    return value


def derivative_matrix(r: int, X, tower: IsometryTower) -> np.ndarray:
    """``d_X u^r``: the derivative of ``t -> u^r(exp(tX))`` at 0."""
    X = X.X if isinstance(X, OrthogonalProbe) else np.asarray(X, dtype=float)
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    n = tower.n
    du = np.zeros((1, 1))
    for j in range(1, r + 1):
        up = tower.up(j)
        dprev = du.shape[0]
        du = up.T @ (np.kron(du, np.eye(n)) + np.kron(np.eye(dprev), X)) @ up
    return du


def properness_check(r: int, X, tower: IsometryTower):
    """``(||d_X u^r||_HS^2, Tr(X^T X) d_r U'_r(n)/U_r(n))`` and their relative deviation."""
    X = X.X if isinstance(X, OrthogonalProbe) else np.asarray(X, dtype=float)
    lhs = float(np.sum(derivative_matrix(r, X, tower) ** 2))
    u, du = chebyshev_pair(r, tower.n)
    rhs = float(np.trace(X.T @ X)) * u * (du / u)
    return lhs, rhs, abs(lhs - rhs) / abs(rhs)


def cocycle_gram(r: int, X, table: FusionTable) -> np.ndarray:
    """``G_{jj'} = sum_i <c_X(v^r_ij), c_X(v^r_ij')>`` with ``c_X(v_ij) = sum_kl D_kl Lambda(v_ik v_jl^*)``.

    Each ``sum_kl D_kl v_ik v_jl^*`` is rank one per fusion channel, so the
    Gram entries reduce to overlaps of ``phi_s^T (e_i (x) J e_j)``.
    """
    X = X.X if isinstance(X, OrthogonalProbe) else np.asarray(X, dtype=float)
    d = derivative_matrix(r, X, table.tower)
    j = table.conj(r)
    dr = d.shape[0]
    gram = np.zeros((dr, dr))
    w = (d @ j.T).reshape(-1)
    for s in range(0, 2 * r + 1, 2):
        phi = table.phi(r, r, s)
        weight = float(np.sum((phi.T @ w) ** 2)) / table.dim(s)
        left = np.einsum("ias,aj->ijs", phi.reshape(dr, dr, -1), j)  # phi_s^T (e_i (x) J e_j)
        gram += weight * np.einsum("ijs,iks->jk", left, left)
    return gram


def _psi_tensor(k: int, l: int, weights, table: FusionTable) -> np.ndarray:
    dk, dl = table.dim(k), table.dim(l)
    acc = np.zeros((dk * dl, dk * dl))
    for s in range(abs(k - l), k + l + 1, 2):
        phi = table.phi(k, l, s)
        acc += weights(s) * (phi @ phi.T)
    return acc.reshape(dk, dl, dk, dl)


def functional_gram(L: int, weights, table: FusionTable) -> np.ndarray:
    """``[F(x^* y)]`` over ``{v^r_ij : r <= L}`` for ``F = sum_s weights(s) Tr(block s)``."""
    dims = [table.dim(r) ** 2 for r in range(L + 1)]
    offs = np.concatenate([[0], np.cumsum(dims)])
    out = np.zeros((offs[-1], offs[-1]))
    for k in range(L + 1):
        jk = table.conj(k)
        for l in range(L + 1):
            psi = _psi_tensor(k, l, weights, table)  # [c, a, d, b]
            blk = np.einsum("ci,dj,cadb->ijab", jk, jk, psi, optimize=True)
            out[offs[k] : offs[k + 1], offs[l] : offs[l + 1]] = blk.reshape(dims[k], dims[l])
    return out


def counit_vector(L: int, n: int) -> np.ndarray:
    parts = [np.eye(dim_h(r, n)).reshape(-1) for r in range(L + 1)]
    return np.concatenate(parts)


def cnd_check(L: int, table: FusionTable):
    """``psi``-Gram over coefficients of degree ``<= L`` and its top eigenvalue on ``ker epsilon``."""
    n = table.n

    def weight(s):
        u, du = chebyshev_pair(s, n)
        return du / u

    m = functional_gram(L, weight, table)
    eps = counit_vector(L, n)
    eps = eps / np.linalg.norm(eps)
    # orthonormal basis of the complement of eps
    q, _ = np.linalg.qr(np.column_stack([eps, np.eye(len(eps))]))
    comp = q[:, 1 : len(eps)]
    sym = (m + m.T) / 2
    compressed = comp.T @ sym @ comp
    return m, float(np.linalg.eigvalsh(compressed).max())


def tau_gram_min_eig(L: int, s: float, table: FusionTable) -> float:
    """Smallest eigenvalue of ``[tau_s(x^* y)]`` over coefficients of degree ``<= L``."""
    n = table.n
    m = functional_gram(L, lambda r: chebyshev(r, s) / chebyshev(r, n), table)
    return float(np.linalg.eigvalsh((m + m.T) / 2).min())


def psi_of_shifted_square(table: FusionTable) -> float:
    """``psi((v_11 - 1)^* (v_11 - 1))`` through the coefficient algebra."""
    alg = CoefficientAlgebra(table)
    x = alg.add((1.0, alg.basis(1, 0, 0)), (-1.0, alg.one()))
    return alg.psi(alg.mul(alg.star(x), x))


def brannan_sup(s: float, n: int, kmax: int = 40) -> float:
    """``sup_{k <= kmax} U_k(s)/U_k(n) (n/s)^k``."""
    ctx = QContext(n)
    return max(brannan_eigenvalue(k, s, ctx) * (n / s) ** k for k in range(kmax + 1))

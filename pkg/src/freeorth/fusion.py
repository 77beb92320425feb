"""Fixed vectors, fusion isometries and the algebra of matrix coefficients.

All fusion maps are stored in tower coordinates: ``phi`` for the triple
``(k, l, m)`` is a ``(d_k d_l) x d_r`` matrix with ``r = k + l - 2m``, rows
indexed by ``(i, a)`` in C order.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DegeneracyError, ResourceError, ShapeError
from .qnum import chebyshev, chebyshev_pair, dim_h, fusion_channels
from .rep import IsometryTower, jw_apply, operator_norm

CELL_TOL = 1e-8


# ---------------------------------------------------------------- ambient pieces


def fixed_vector(m: int, n: int) -> np.ndarray:
    """``T_m`` in ``(R^n)^{(x)2m}``: the invariant vector of ``H_m (x) H_m``, with ``||T_m||^2 = d_m``."""
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    t = np.ones(1)
    for j in range(1, m + 1):
        # insert a cup between the two halves, then project both halves
        half = n ** (j - 1)
        t = np.einsum("ab,ij->aijb", t.reshape(half, half), np.eye(n)).reshape(-1)
        t = jw_apply(j, t, n, offset=0, legs=2 * j)
        t = jw_apply(j, t, n, offset=j, legs=2 * j)
    return t


def middle_insertion(a: int, b: int, m: int, v: np.ndarray, n: int) -> np.ndarray:
    """``T^m_{ab}``: insert ``T_m`` between the first ``a-m`` and the last ``b-m`` legs of ``v``."""
    if not 0 <= m <= min(a, b):
        raise ValueError(f"need 0 <= m <= min(a, b), got m={m}, a={a}, b={b}")
    left, right = n ** (a - m), n ** (b - m)
    v = np.asarray(v, dtype=float)
    if v.shape[0] != left * right:
        raise ShapeError(f"vector length {v.shape[0]} != {left * right}")
    tm = fixed_vector(m, n)
    batch = v.shape[1:]
    x = v.reshape((left, right) + batch)
    out = np.einsum("lr...,t->ltr...", x, tm)
    return out.reshape((left * tm.size * right,) + batch)


def middle_contraction(a: int, b: int, m: int, w: np.ndarray, n: int) -> np.ndarray:
    """Adjoint of :func:`middle_insertion`: contract the middle ``2m`` legs against ``T_m``."""
    if not 0 <= m <= min(a, b):
        raise ValueError(f"need 0 <= m <= min(a, b), got m={m}, a={a}, b={b}")
    left, right = n ** (a - m), n ** (b - m)
    tm = fixed_vector(m, n)
    w = np.asarray(w, dtype=float)
    if w.shape[0] != left * tm.size * right:
        raise ShapeError(f"vector length {w.shape[0]} != {left * tm.size * right}")
    batch = w.shape[1:]
    x = w.reshape((left, tm.size, right) + batch)
    out = np.einsum("ltr...,t->lr...", x, tm)
    return out.reshape((left * right,) + batch)


def norm_formula_exact(k: int, l: int, m: int, n: int) -> Fraction:
    """Closed form of ``(N^{k,l}_m)^2`` in the Kac case."""
    if not 0 <= m <= min(k, l):
        raise ValueError(f"need 0 <= m <= min(k, l), got {(k, l, m)}")
    d = lambda j: dim_h(j, n)  # noqa: E731
    val = Fraction(d(k), d(k - m))
    for q in range(1, m + 1):
        val *= 1 - Fraction(d(k - m) * d(l - m - 1), d(k - q + 1) * d(l - q))
    return val


def norm_formula(k: int, l: int, m: int, n: int) -> float:
    return float(norm_formula_exact(k, l, m, n)) ** 0.5


def intertwiner_norm_direct(k: int, l: int, m: int, n: int, seed: int = 0) -> float:
    """Operator norm of ``(P_k (x) P_l) T^m_{kl} P_r`` computed ambiently and matrix-free."""
    r = k + l - 2 * m
    total = k + l

    def fwd(x):
        y = jw_apply(r, x, n, legs=r) if r else x
        z = middle_insertion(k, l, m, y, n)
        z = jw_apply(k, z, n, offset=0, legs=total)
        return jw_apply(l, z, n, offset=k, legs=total)

    def adj(z):
        z = jw_apply(k, z, n, offset=0, legs=total)
        z = jw_apply(l, z, n, offset=k, legs=total)
        y = middle_contraction(k, l, m, z, n)
        return jw_apply(r, y, n, legs=r) if r else y

    return operator_norm(fwd, adj, n**r, seed=seed)


# ---------------------------------------------------------------- coordinate tables


@dataclass(frozen=True)
class FusionCell:
    """Norm data for one triple ``(k, l, m)``; ``phi`` is attached when it was requested."""

    k: int
    l: int
    m: int
    r: int
    N_direct: float
    N_formula: float
    N_coords: float
    flagged: bool
    phi: np.ndarray | None = None

    @property
    def N(self) -> float:
        return self.N_formula

    def check(self):
        if self.flagged:
            raise DegeneracyError(
                f"cell {(self.k, self.l, self.m)}: direct norm {self.N_direct!r}, "
                f"coordinate norm {self.N_coords!r}, formula {self.N_formula!r}",
                k=self.k,
                r=self.r,
            )
        return self


class FusionTable:
    """Memoized fusion data over one tower; safe to share between threads."""

    def __init__(self, tower: IsometryTower, cell_tol: float = CELL_TOL, direct: bool = True):
        self.tower = tower
        self.n = tower.n
        self.cell_tol = cell_tol
        self.direct = direct
        self._top: dict = {}
        self._conj: dict = {}
        self._cells: dict = {}
        self._phis: dict = {}
        self._lock = threading.RLock()

    def dim(self, k: int) -> int:
        return dim_h(k, self.n)

    def top(self, a: int, b: int) -> np.ndarray:
        """``(iota_a (x) iota_b)^T iota_{a+b}``, shape ``(d_a d_b, d_{a+b})``."""
        key = (a, b)
        with self._lock:
            if key in self._top:
                return self._top[key]
        if b == 0 or a == 0:
            out = np.eye(self.dim(a + b))
        else:
            n = self.n
            prev = self.top(a, b - 1)
            up_ab = self.tower.up(a + b).reshape(self.dim(a + b - 1), n, self.dim(a + b))
            up_b = self.tower.up(b).reshape(self.dim(b - 1), n, self.dim(b))
            t = np.tensordot(prev, up_ab, axes=(1, 0))  # (d_a d_{b-1}, n, d_{a+b})
            t = t.reshape(self.dim(a), self.dim(b - 1), n, self.dim(a + b))
            out = np.einsum("xyis,yib->xbs", t, up_b, optimize=True)
            out = out.reshape(self.dim(a) * self.dim(b), self.dim(a + b))
        with self._lock:
            self._top[key] = out
        return out

    def conj(self, m: int) -> np.ndarray:
        """Leg reversal on ``H_m`` in tower coordinates; symmetric orthogonal involution.

        Also the coordinates of ``T_m``: ``T_m = (iota_m (x) iota_m) vec(conj(m))``.
        """
        with self._lock:
            if m in self._conj:
                return self._conj[m]
        n = self.n
        if m <= 1:
            out = np.eye(self.dim(m))
        else:
            io_ = self.tower.iota(m)
            d = io_.shape[1]
            rev = io_.reshape((n,) * m + (d,)).transpose(tuple(range(m - 1, -1, -1)) + (m,))
            out = io_.T @ rev.reshape(n**m, d)
        with self._lock:
            self._conj[m] = out
        return out

    def raw_phi(self, k: int, l: int, m: int, cols=None) -> np.ndarray:
        """Coordinates of ``(P_k (x) P_l) T^m_{kl} iota_r`` (optionally only some columns)."""
        a, b = k - m, l - m
        r = a + b
        da, db, dm, dk, dl, dr = (self.dim(x) for x in (a, b, m, k, l, r))
        base = self.top(a, b).reshape(da, db, dr)
        if cols is not None:
            base = base[:, :, cols]
            dr = base.shape[2]
        if m == 0:
            return base.reshape(da * db, dr)
        left = self.top(a, m).reshape(da, dm, dk)
        right = self.top(m, b).reshape(dm, db, dl)
        j = self.conj(m)
        t = np.einsum("xys,xuk->yusk", base, left, optimize=True)
        t = np.einsum("yusk,uv->yvsk", t, j, optimize=True)
        out = np.einsum("yvsk,vyl->kls", t, right, optimize=True)
        return out.reshape(dk * dl, dr)

    def cell(self, k: int, l: int, m: int) -> FusionCell:
        key = (k, l, m)
        with self._lock:
            if key in self._cells:
                return self._cells[key]
        if not 0 <= m <= min(k, l):
            raise ValueError(f"need 0 <= m <= min(k, l), got {key}")
        r = k + l - 2 * m
        n_formula = norm_formula(k, l, m, self.n)
        n_direct = intertwiner_norm_direct(k, l, m, self.n) if self.direct else None
        tol = self.cell_tol * max(1.0, n_formula)
        if max(k, l, r) > self.tower.kmax:
            # beyond the tower only the ambient norm is available
            if n_direct is None:
                raise ResourceError(f"cell {key} lies beyond tower level {self.tower.kmax}")
            n_coords = float("nan")
            flagged = bool(abs(n_direct - n_formula) > tol)
        else:
            # all columns share one norm, so a single column suffices
            n_coords = float(np.linalg.norm(self.raw_phi(k, l, m, cols=[0])))
            if n_coords < 1e-12:
                raise DegeneracyError(f"cell {key} has vanishing norm", k=k, r=r)
            if n_direct is None:
                n_direct = n_coords
            flagged = bool(abs(n_direct - n_formula) > tol or abs(n_coords - n_formula) > tol)
        cell = FusionCell(k, l, m, r, n_direct, n_formula, n_coords, flagged)
        with self._lock:
            self._cells[key] = cell
        return cell

    def phi(self, k: int, l: int, r: int) -> np.ndarray:
        """Fusion isometry ``H_r -> H_k (x) H_l``; refuses flagged cells."""
        if r not in fusion_channels(k, l):
            raise ValueError(f"H_{r} does not occur in H_{k} (x) H_{l}")
        m = (k + l - r) // 2
        key = (k, l, m)
        with self._lock:
            if key in self._phis:
                return self._phis[key]
        cell = self.cell(k, l, m).check()
        if max(k, l, r) > self.tower.kmax:
            raise ResourceError(f"fusion isometry for {(k, l, r)} needs tower level {max(k, l, r)}")
        dk, dl, dr = self.dim(k), self.dim(l), self.dim(r)
        if dk * dl * dr > self.tower.dense_cap:
            raise ResourceError(f"fusion isometry for {(k, l, r)} has {dk * dl * dr} entries")
        phi = self.raw_phi(k, l, m) / cell.N_coords
        with self._lock:
            self._phis[key] = phi
        return phi

    def cell_with_phi(self, k: int, l: int, m: int) -> FusionCell:
        cell = self.cell(k, l, m)
        phi = self.phi(k, l, k + l - 2 * m)
        return FusionCell(cell.k, cell.l, cell.m, cell.r, cell.N_direct, cell.N_formula, cell.N_coords, cell.flagged, phi)


def fusion_isometry(k: int, l: int, m: int, table: FusionTable, with_phi: bool = True) -> FusionCell:
    return table.cell_with_phi(k, l, m) if with_phi else table.cell(k, l, m)


def coeff_product(k: int, l: int, table: FusionTable) -> dict:
    """Structure constants of ``v^k_{ij} v^l_{ab}``.

    Returns ``{r: phi_r}``; the coefficient of ``v^r_{st}`` is
    ``phi_r[(i, a), s] * phi_r[(j, b), t]``.
    """
    return {r: table.phi(k, l, r) for r in fusion_channels(k, l)}


# ---------------------------------------------------------------- coefficient algebra


class CoefficientAlgebra:
    """Finite combinations of matrix coefficients ``v^r_{ij}``.

    An element is a dict ``{r: X_r}`` standing for ``sum_ij X_r[i, j] v^r_{ij}``.
    """

    def __init__(self, table: FusionTable):
        self.table = table
        self.n = table.n

    def dim(self, r: int) -> int:
        return self.table.dim(r)

    def basis(self, r: int, i: int, j: int) -> dict:
        x = np.zeros((self.dim(r), self.dim(r)))
        x[i, j] = 1.0
        return {r: x}

    def one(self) -> dict:
        return {0: np.ones((1, 1))}

    @staticmethod
    def add(*terms) -> dict:
        """``add((c1, x1), (c2, x2), ...)`` -> ``c1 x1 + c2 x2 + ...``."""
        out: dict = {}
        for c, x in terms:
            for r, block in x.items():
                out[r] = out.get(r, 0) + c * block
        return out

    def mul(self, x: dict, y: dict) -> dict:
        out: dict = {}
        for k, a in x.items():
            for l, b in y.items():
                for r in fusion_channels(k, l):
                    phi = self.table.phi(k, l, r)
                    dk, dl, dr = a.shape[0], b.shape[0], phi.shape[1]
                    p = phi.reshape(dk, dl, dr)
                    blk = np.einsum("ias,ij,ab,jbt->st", p, a, b, p, optimize=True)
                    out[r] = out.get(r, 0) + blk
        return out

    def star(self, x: dict) -> dict:
        out = {}
        for r, a in x.items():
            j = self.table.conj(r)
            out[r] = j @ a @ j.T
        return out

    def haar(self, x: dict) -> float:
        return float(x[0][0, 0]) if 0 in x else 0.0

    def counit(self, x: dict) -> float:
        return float(sum(np.trace(a) for a in x.values()))

    def psi(self, x: dict) -> float:
        total = 0.0
        for r, a in x.items():
            u, du = chebyshev_pair(r, self.n)
            total += du / u * np.trace(a)
        return float(total)

    def tau(self, s: float, x: dict) -> float:
        """State ``epsilon o T_s``: each block weighted by ``U_r(s) / U_r(n)``."""
        return float(sum(chebyshev(r, s) / chebyshev(r, self.n) * np.trace(a) for r, a in x.items()))

    def inner(self, x: dict, y: dict) -> float:
        """``h(x^* y)``, i.e. the GNS inner product of the Haar state."""
        return float(sum(np.sum(x[r] * y[r]) / self.dim(r) for r in x if r in y))


def haar_pair(k: int, i: int, j: int, l: int, a: int, b: int, table: FusionTable) -> float:
    """``h((v^k_{ij})^* v^l_{ab})`` evaluated through the product and star structure."""
    alg = CoefficientAlgebra(table)
    return alg.haar(alg.mul(alg.star(alg.basis(k, i, j)), alg.basis(l, a, b)))

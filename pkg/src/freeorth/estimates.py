"""Brute-force evaluation of the trace sums and projection norms, with growth fits.

Every sum over an orthonormal basis of ``H_k`` runs over tower columns; the
ambient space is touched only for consistency totals and overlap scalars.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import ShapeError
from .fusion import FusionTable, fixed_vector
from .qnum import fusion_channels
from .rep import IsometryTower, isotypic_isometry, operator_norm

FAMILIES = ("FarApart", "SSum", "SSumDiag", "AdjointCoeff", "AdjointStateNorm")

# ambient entries per chunk when summing over a basis
_CHUNK_ENTRIES = 2**22


@dataclass
class EstimateReport:
    """Computed values for one family and parameter tuple, with fit and verdict."""

    family: str
    params: dict
    values: list = field(default_factory=list)  # (k, value, bound_shape)
    fitted: dict = field(default_factory=dict)
    verdict: bool = True
    seed: int | None = None
    anchor: str = ""
    tol: float | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")

    def add(self, k, value, bound_shape=""):
        value = float(value)
        if not math.isfinite(value):
            raise ValueError(f"non-finite value at k={k}")
        self.values.append((k, value, bound_shape))

    def to_dict(self) -> dict:
        return asdict(self)


def loglog_slope(ks, values) -> float:
    """Least-squares slope of ``log|value|`` against ``log k``."""
    ks = np.asarray(ks, dtype=float)
    vals = np.abs(np.asarray(values, dtype=float))
    return float(np.polyfit(np.log(ks), np.log(vals), 1)[0])


def log_slope(xs, values) -> float:
    """Least-squares slope of ``log|value|`` against ``x``."""
    return float(np.polyfit(np.asarray(xs, float), np.log(np.abs(np.asarray(values, float))), 1)[0])


def _coords(v, k: int, tower: IsometryTower) -> np.ndarray:
    """Accept a vector of ``H_k`` as tower coordinates or as an ambient vector."""
    v = np.asarray(v, dtype=float)
    d = tower.dim(k)
    if v.shape == (d,):
        return v
    if v.shape == (tower.n**k,):
        return tower.restrict(k, v)
    raise ShapeError(f"vector of length {v.shape[0]} is neither in R^{d} nor R^{tower.n ** k}")


def _embed_pair(tower: IsometryTower, a: int, b: int, y: np.ndarray) -> np.ndarray:
    """``(iota_a (x) iota_b) y`` for ``y`` of shape ``(d_a, d_b, batch)``."""
    n = tower.n
    da, db, batch = y.shape
    t = tower.embed(b, y.transpose(1, 0, 2).reshape(db, da * batch))  # (n^b, d_a batch)
    t = t.reshape(n**b, da, batch).transpose(1, 0, 2).reshape(da, n**b * batch)
    t = tower.embed(a, t)
    return t.reshape(n ** (a + b), batch)


# ---------------------------------------------------------------- far-apart projections


def far_apart_norm(a: int, b: int, c: int, r: int, tower: IsometryTower, seed: int = 0) -> float:
    """``||(P_{a+b} (x) P_c) Q^{a+b+c}_r (P_a (x) P_{b+c})||`` by power iteration."""
    total = a + b + c
    if r < 0 or r > total or (total - r) % 2:
        return 0.0
    n = tower.n
    w = isotypic_isometry(total, r, tower)
    cols = w.shape[1]
    # left factor: (iota_{a+b} (x) iota_c)^T w
    t = w.reshape(n ** (a + b), n**c * cols)
    t = tower.restrict(a + b, t).reshape(-1, n**c, cols).transpose(1, 0, 2)
    left = tower.restrict(c, t.reshape(n**c, -1)).reshape(tower.dim(c), -1, cols)
    left = left.transpose(1, 0, 2).reshape(-1, cols)
    # right factor: (iota_a (x) iota_{b+c})^T w
    t = tower.restrict(a, w.reshape(n**a, n ** (b + c) * cols)).reshape(-1, n ** (b + c), cols)
    t = t.transpose(1, 0, 2).reshape(n ** (b + c), -1)
    right = tower.restrict(b + c, t).reshape(tower.dim(b + c), -1, cols)
    right = right.transpose(1, 0, 2).reshape(-1, cols)
    return operator_norm(
        lambda x: left @ (right.T @ x),
        lambda y: right @ (left.T @ y),
        right.shape[0],
        seed=seed,
    )


# ---------------------------------------------------------------- S-sums


@dataclass
class SSumResult:
    k: int
    l: int
    m: int
    by_channel: dict  # r -> S^k_r for r < k + l - 2m
    plus: float  # the top channel
    total: float  # ambient sum with the projections removed
    overlaps: dict  # r -> overlap scalar between the two embeddings

    @property
    def decomposition_error(self) -> float:
        return abs(sum(self.by_channel.values()) + self.plus - self.total)


def _insertion_coords(table: FusionTable, k: int, l: int, m: int, zeta: np.ndarray):
    """Tower coordinates of ``T^{m*}_{kl}(e_p (x) zeta)`` and ``T^{m*}_{lk}(zeta (x) e_p)`` over ``p``."""
    a, b = k - m, l - m
    dim = table.dim
    j = table.conj(m)
    z_mb = (table.top(m, b) @ zeta).reshape(dim(m), dim(b))
    left = table.top(a, m).reshape(dim(a), dim(m), dim(k))
    y = np.einsum("xup,uv,vy->xyp", left, j, z_mb, optimize=True)
    z_bm = (table.top(b, m) @ zeta).reshape(dim(b), dim(m))
    right = table.top(m, a).reshape(dim(m), dim(a), dim(k))
    x = np.einsum("yu,uv,vxp->yxp", z_bm, j, right, optimize=True)
    return x, y


def _peel_last(table: FusionTable, a: int, b: int, y: np.ndarray) -> np.ndarray:
    """``(iota_{a+b-1} (x) I_n)^T`` applied to ``(iota_a (x) iota_b) y``; needs ``b >= 1``."""
    n, dim = table.n, table.dim
    batch = y.shape[2]
    if b == 1:
        # up_1 and top(a, 0) are identities
        return y.reshape(dim(a) * n, batch)
    up_b = table.tower.up(b).reshape(dim(b - 1), n, dim(b))
    t = np.tensordot(up_b, y, axes=([2], [1]))  # (z, j, x, p)
    t = t.transpose(2, 0, 1, 3).reshape(dim(a) * dim(b - 1), n * batch)
    top = table.top(a, b - 1).reshape(dim(a) * dim(b - 1), dim(a + b - 1))
    return (top.T @ t).reshape(dim(a + b - 1) * n, batch)


def _ambient_total(table: FusionTable, a: int, b: int, x: np.ndarray, y: np.ndarray) -> float:
    tower = table.tower
    batch = y.shape[2]
    step = max(1, _CHUNK_ENTRIES // tower.n ** (a + b))
    total = 0.0
    for s in range(0, batch, step):
        xa = _embed_pair(tower, b, a, x[:, :, s : s + step])
        ya = _embed_pair(tower, a, b, y[:, :, s : s + step])
        total += float(np.sum(xa * ya))
    return total


def _overlap(table: FusionTable, a: int, b: int, r: int) -> float:
    """Scalar ``lambda`` with ``(iota_b (x) iota_a)^T (iota_a (x) iota_b) phi^{ab}_r = lambda phi^{ba}_r``."""
    dim = table.dim
    phi_ab = table.phi(a, b, r)
    phi_ba = table.phi(b, a, r)
    ncol = min(2, dim(r))
    wa = _embed_pair(table.tower, a, b, phi_ab[:, :ncol].reshape(dim(a), dim(b), ncol))
    wb = _embed_pair(table.tower, b, a, phi_ba[:, :ncol].reshape(dim(b), dim(a), ncol))
    g = wb.T @ wa
    lam = float(g[0, 0])
    if ncol > 1 and abs(g[1, 0]) > 1e-8 + 1e-6 * abs(lam):
        raise ArithmeticError(f"overlap for channel {r} of {(a, b)} is not scalar")
    return lam


def s_sum(k: int, l: int, m: int, zeta, table: FusionTable) -> SSumResult:
    """Channel-resolved sums ``S^k_r`` and the top-channel sum ``S^k_+`` for ``zeta`` in ``H_l``."""
    if l == 0 or not 0 <= m <= l <= k:
        raise ValueError(f"need 0 <= m <= l <= k and l > 0, got k={k}, l={l}, m={m}")
    tower = table.tower
    zeta = _coords(zeta, l, tower)
    a, b = k - m, l - m
    top_r = a + b
    x, y = _insertion_coords(table, k, l, m, zeta)
    dim = table.dim
    by_channel, overlaps = {}, {}
    for r in fusion_channels(a, b):
        if r == top_r:
            continue
        lam = _overlap(table, a, b, r)
        ya = table.phi(a, b, r).T @ y.reshape(dim(a) * dim(b), -1)
        xb = table.phi(b, a, r).T @ x.reshape(dim(b) * dim(a), -1)
        by_channel[r] = lam * float(np.sum(xb * ya))
        overlaps[r] = lam
    if a == 0 or b == 0:
        plus = float(np.sum(x.reshape(-1, x.shape[2]) * y.reshape(-1, y.shape[2])))
    else:
        ry = _peel_last(table, a, b, y)
        rx = _peel_last(table, b, a, x)
        down = tower.down(top_r - 1)
        plus = float(np.sum(rx * ry) - np.sum((down.T @ rx) * (down.T @ ry)))
    total = _ambient_total(table, a, b, x, y)
    return SSumResult(k, l, m, by_channel, plus, total, overlaps)


def s_sum_diag(k: int, m: int, mbar: int, zeta, xi, tower: IsometryTower) -> float:
    """``sum_p <(id (x) T*_mbar (x) id)(zeta (x) e_p), (id (x) T*_m (x) id)(e_p (x) xi)>``."""
    if m < 1 or mbar < 1 or m + mbar > k:
        raise ValueError(f"need m, mbar >= 1 and m + mbar <= k, got {(k, m, mbar)}")
    n = tower.n
    zeta = tower.embed(2 * mbar, _coords(zeta, 2 * mbar, tower))
    xi = tower.embed(2 * m, _coords(xi, 2 * m, tower))
    e = tower.iota(k)
    d = e.shape[1]
    t_bar = fixed_vector(mbar, n).reshape(n**mbar, n**mbar)
    t_m = fixed_vector(m, n).reshape(n**m, n**m)
    zt = zeta.reshape(n**mbar, n**mbar) @ t_bar  # (s, v)
    left = np.tensordot(zt, e.reshape(n**mbar, n ** (k - mbar), d), axes=(1, 0))
    tx = t_m @ xi.reshape(n**m, n**m)  # (u, s')
    right = np.tensordot(e.reshape(n ** (k - m), n**m, d), tx, axes=(1, 0))  # (t', p, s')
    right = right.transpose(0, 2, 1)
    return float(np.sum(left.reshape(-1) * right.reshape(-1)))


def conjugate_vector(v, k: int, tower: IsometryTower) -> np.ndarray:
    """Leg reversal of an ambient vector in ``(R^n)^{(x)k}``, the conjugation ``zeta -> zeta-bar``."""
    n = tower.n
    v = np.asarray(v, dtype=float)
    return v.reshape((n,) * k).transpose(tuple(range(k - 1, -1, -1))).reshape(-1)


# ---------------------------------------------------------------- adjoint coefficients


def adjoint_coeff(k: int, l: int, a: int, b: int, table: FusionTable):
    """Per-channel arrays ``C^r`` (shape ``(channels, d_k, d_k)``) and ``sum_ij |sum_r C^r_ij|^2``."""
    if not 0 < l <= k:
        raise ValueError(f"need 0 < l <= k, got k={k}, l={l}")
    dk, dl = table.dim(k), table.dim(l)
    if not (0 <= a < dl and 0 <= b < dl):
        raise IndexError(f"indices {(a, b)} out of range for H_{l}")
    blocks = []
    for r in fusion_channels(k, l):
        dr = table.dim(r)
        kl = table.phi(k, l, r).reshape(dk, dl, dr)
        lk = table.phi(l, k, r).reshape(dl, dk, dr)
        first = lk[a] @ kl[:, a, :].T  # (i, j)
        second = float(np.einsum("ps,ps->", kl[:, b, :], lk[b], optimize=True))
        blocks.append(first * second / dr)
    c = np.stack(blocks)
    return c, float(np.sum(c.sum(axis=0) ** 2))


def adjoint_state_values(k: int, m: int, a: int, b: int, table: FusionTable) -> np.ndarray:
    """Matrix of ``phi(v^k_ij)`` for the vector state at ``Lambda(v^{m*}_{ab})`` composed with ad."""
    c, _ = adjoint_coeff(k, m, a, b, table)
    return c.sum(axis=0)


def adjoint_state_norms(m: int, a: int, b: int, kmax: int, table: FusionTable, lambdas=(0.1, 0.5, 1.0)):
    """``||phi_k||^2 = d_k sum_ij |phi(v^k_ij)|^2`` for ``k = m .. kmax`` and the weighted sums."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    ks = list(range(m, kmax + 1))
    norms = []
    for k in ks:
        vals = adjoint_state_values(k, m, a, b, table)
        norms.append(table.dim(k) * float(np.sum(vals**2)))
    sums = {lam: float(sum(math.exp(-2 * lam * k) * v for k, v in zip(ks, norms))) for lam in lambdas}
    return ks, norms, sums

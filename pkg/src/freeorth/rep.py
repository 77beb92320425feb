"""Concrete realization of the diagram category on tensor powers of R^n.

Vectors in ``(R^n)^{(x)k}`` are flat arrays of length ``n**k`` in C order, the
first tensor leg being the slowest index. The irreducible subspace ``H_k`` is
handled through a tower of small "up" isometries

    up_k : H_k -> H_{k-1} (x) H_1,       iota_k = (iota_{k-1} (x) I_n) up_k,

so that nothing of size ``n**k`` is ever needed to build the tower itself.
"""
from __future__ import annotations

import hashlib
import io
import string
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import DegeneracyError, ResourceError, ShapeError
from .qnum import QContext, chebyshev, dim_h, path_multiplicity
from .tl import Pairing, TLElement

CACHE_FORMAT_VERSION = 1
DEFAULT_TOL = 1e-9
# float64 entries allowed in one dense array (2**25 entries = 256 MiB)
DEFAULT_DENSE_CAP = 2**25
DEFAULT_KMAX = {3: 8, 4: 6, 5: 5}

_LETTERS = string.ascii_letters


def _as_n(ctx) -> int:
    return ctx.n if isinstance(ctx, QContext) else int(ctx)


def _check_cap(entries: int, cap: int, what: str):
    if entries > cap:
        raise ResourceError(f"{what} needs {entries} dense entries, cap is {cap}")


@dataclass
class DenseOp:
    """A linear map ``(R^n)^{(x)legs_in} -> (R^n)^{(x)legs_out}`` stored densely.

    ``entries`` has shape ``(n**legs_out, n**legs_in)``. ``empty`` marks the
    zero operator returned for fusion-forbidden requests.
    """

    legs_in: int
    legs_out: int
    n: int
    entries: np.ndarray
    empty: bool = False

    def __post_init__(self):
        want = (self.n**self.legs_out, self.n**self.legs_in)
        if self.entries.shape != want:
            raise ShapeError(f"entries have shape {self.entries.shape}, expected {want}")

    def __matmul__(self, other: "DenseOp") -> "DenseOp":
        if self.legs_in != other.legs_out or self.n != other.n:
            raise ShapeError("incompatible operators")
        return DenseOp(other.legs_in, self.legs_out, self.n, self.entries @ other.entries)

    @property
    def T(self) -> "DenseOp":
        return DenseOp(self.legs_out, self.legs_in, self.n, self.entries.T.copy(), self.empty)


# ---------------------------------------------------------------- diagrams


def _pairing_einsum(d: Pairing, with_batch: bool):
    """einsum subscripts applying diagram ``d`` to an input tensor with ``d.bottom`` legs."""
    a, b = d.top, d.bottom
    labels = [None] * (a + b)
    extra = []
    nxt = 0
    for i, j in d.pairs:
        labels[i] = labels[j] = _LETTERS[nxt]
        if i < a and j < a:
            extra.append(_LETTERS[nxt] + _LETTERS[nxt + 1])
            labels[j] = _LETTERS[nxt + 1]
            nxt += 2
        else:
            nxt += 1
    batch = _LETTERS[nxt] if with_batch else ""
    inp = "".join(labels[a:]) + batch
    out = "".join(labels[:a]) + batch
    return ",".join([inp] + extra) + "->" + out, len(extra)


def _apply_pairing(d: Pairing, v: np.ndarray, n: int) -> np.ndarray:
    """``v`` has shape ``(n**bottom, batch)``; returns ``(n**top, batch)``."""
    batch = v.shape[1]
    subscripts, n_cups = _pairing_einsum(d, True)
    t = v.reshape((n,) * d.bottom + (batch,))
    eye = np.eye(n)
    out = np.einsum(subscripts, t, *([eye] * n_cups), optimize=n_cups > 1)
    return out.reshape(n**d.top, batch)


def diagram_to_matrix(x: TLElement, ctx, cap: int = DEFAULT_DENSE_CAP) -> DenseOp:
    """Evaluate a TL element with the cup sent to ``sum_i e_i (x) e_i``."""
    n = _as_n(ctx)
    a, b = x.shape
    _check_cap(n ** (a + b), cap, f"diagram of shape {x.shape}")
    if n != x.delta:
        raise ValueError(f"loop value {x.delta} does not match n={n}")
    mat = np.zeros((n**a, n**b))
    if b == 0:
        for d, c in x.terms.items():
            mat += float(c) * _apply_pairing(d, np.ones((1, 1)), n)
        return DenseOp(b, a, n, mat)
    eye = np.eye(n**b)
    for d, c in x.terms.items():
        mat += float(c) * _apply_pairing(d, eye, n)
    return DenseOp(b, a, n, mat)


def apply_op(x, v: np.ndarray, n: int | None = None) -> np.ndarray:
    """Apply a TL element or DenseOp to ``v`` (a vector or a batch of column vectors)."""
    v = np.asarray(v, dtype=float)
    squeeze = v.ndim == 1
    cols = v[:, None] if squeeze else v
    if isinstance(x, DenseOp):
        if cols.shape[0] != x.entries.shape[1]:
            raise ShapeError(f"vector length {cols.shape[0]} != {x.entries.shape[1]}")
        out = x.entries @ cols
    elif isinstance(x, TLElement):
        n = x.delta if n is None else n
        if cols.shape[0] != n**x.bottom:
            raise ShapeError(f"vector length {cols.shape[0]} != {n}**{x.bottom}")
        out = np.zeros((n**x.top, cols.shape[1]))
        for d, c in x.terms.items():
            out += float(c) * _apply_pairing(d, cols, n)
    else:
        raise TypeError(f"cannot apply {type(x).__name__}")
    return out[:, 0] if squeeze else out


def _cup_contract(t: np.ndarray, axis: int) -> np.ndarray:
    """Contract axes ``axis`` and ``axis+1`` of ``t`` against the cup."""
    return np.trace(t, axis1=axis, axis2=axis + 1)


def jw_apply(k: int, v: np.ndarray, n: int, offset: int = 0, legs: int | None = None) -> np.ndarray:
    """Apply ``P_k`` to legs ``offset .. offset+k-1`` of ``v`` without forming a matrix.

    Uses Wenzl's recursion; ``P_{k-1} (x) 1`` is idempotent, so one application
    of ``P_k`` costs two of ``P_{k-1}``.
    """
    v = np.asarray(v, dtype=float)
    total = legs if legs is not None else int(round(np.log(v.shape[0]) / np.log(n)))
    if n**total != v.shape[0]:
        raise ShapeError(f"length {v.shape[0]} is not a power of {n}")
    if offset + k > total:
        raise ShapeError(f"P_{k} at offset {offset} does not fit on {total} legs")
    batch_shape = v.shape[1:]
    t = v.reshape((n**offset, n**k, n ** (total - offset - k)) + batch_shape)
    t = np.moveaxis(t, 1, 0).reshape(n**k, -1)
    out = _jw_rec(k, t, n)
    out = out.reshape((n**k, n**offset, n ** (total - offset - k)) + batch_shape)
    return np.moveaxis(out, 0, 1).reshape(v.shape)


def _jw_rec(k: int, t: np.ndarray, n: int) -> np.ndarray:
    # t has shape (n**k, batch)
    if k <= 1:
        return t
    batch = t.shape[1]
    coeff = chebyshev(k - 2, n) / chebyshev(k - 1, n)

    def prev(x):
        y = x.reshape(n ** (k - 1), n * batch)
        return _jw_rec(k - 1, y, n).reshape(n**k, batch)

    w = prev(t)
    r = w.reshape(n ** (k - 2), n, n, batch)
    s = _cup_contract(r, 1)  # (n**(k-2), batch)
    e = np.einsum("ab,ij->aijb", s, np.eye(n)).reshape(n**k, batch)
    return w - coeff * prev(e)


def operator_norm(matvec, rmatvec, dim_in: int, seed: int = 0, iters: int = 200, rtol: float = 1e-10) -> float:
    """Largest singular value by power iteration on ``A^T A``."""
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(dim_in)
    x /= np.linalg.norm(x)
    prev = 0.0
    sigma = 0.0
    for _ in range(iters):
        y = matvec(x)
        sigma = float(np.linalg.norm(y))
        if sigma == 0.0:
            return 0.0
        x = rmatvec(y)
        nx = np.linalg.norm(x)
        if nx == 0.0:
            return 0.0
        x = x / nx
        if abs(sigma - prev) <= rtol * sigma:
            break
        prev = sigma
    return float(np.linalg.norm(matvec(x)))


# ---------------------------------------------------------------- the tower


def _cup_rows(up: np.ndarray, d_prev: int, n: int) -> np.ndarray:
    """``(I_{d_prev} (x) T_1^T)(up (x) I_n)``, shape ``(d_prev, d_cur * n)``."""
    d_cur = up.shape[1]
    return up.reshape(d_prev, n, d_cur).transpose(0, 2, 1).reshape(d_prev, d_cur * n)


def _fix_signs(m: np.ndarray, tol: float) -> np.ndarray:
    idx = np.argmax(np.abs(m) > tol, axis=0)
    signs = np.sign(m[idx, np.arange(m.shape[1])])
    signs[signs == 0] = 1.0
    return m * signs


@dataclass
class IsometryTower:
    """Orthonormal bases of ``H_0 .. H_kmax`` encoded by the ``up`` isometries.

    ``ups[k]`` has shape ``(d_{k-1} * n, d_k)``. Ambient isometries ``iota(k)``
    are produced on demand, subject to ``dense_cap``.
    """

    n: int
    ups: list
    tol: float = DEFAULT_TOL
    dense_cap: int = DEFAULT_DENSE_CAP
    _iota_cache: dict = field(default_factory=dict, repr=False)

    @property
    def kmax(self) -> int:
        return len(self.ups) - 1

    def dim(self, k: int) -> int:
        return dim_h(k, self.n)

    def multiplicity(self, k: int, r: int) -> int:
        return path_multiplicity(k, r)

    @property
    def paths(self) -> dict:
        return {(k, r): path_multiplicity(k, r) for k in range(self.kmax + 1) for r in range(k + 1) if path_multiplicity(k, r)}

    def _need(self, k: int):
        if not 0 <= k <= self.kmax:
            raise ResourceError(f"level {k} outside tower range 0..{self.kmax}")

    def up(self, k: int) -> np.ndarray:
        self._need(k)
        return self.ups[k]

    def down(self, k: int) -> np.ndarray:
        """Isometry ``H_{k-1} -> H_k (x) H_1`` in tower coordinates, shape ``(d_k n, d_{k-1})``.

        ``I - down(k) down(k)^T`` is ``P_{k+1}`` restricted to ``H_k (x) H_1``.
        """
        self._need(k)
        if k == 0:
            raise ValueError("down(0) is undefined")
        d_prev, d_cur = self.dim(k - 1), self.dim(k)
        rows = _cup_rows(self.ups[k], d_prev, self.n)
        return np.sqrt(d_prev / d_cur) * rows.T

    def embed(self, k: int, x: np.ndarray) -> np.ndarray:
        """``iota_k x`` for ``x`` of shape ``(d_k,)`` or ``(d_k, batch)``."""
        self._need(k)
        x = np.asarray(x, dtype=float)
        squeeze = x.ndim == 1
        cols = x[:, None] if squeeze else x
        if cols.shape[0] != self.dim(k):
            raise ShapeError(f"expected {self.dim(k)} rows, got {cols.shape[0]}")
        out = self._embed(k, cols)
        return out[:, 0] if squeeze else out

    def _embed(self, k, cols):
        if k in self._iota_cache:
            return self._iota_cache[k] @ cols
        if k <= 1:
            return cols.copy()
        batch = cols.shape[1]
        y = (self.ups[k] @ cols).reshape(self.dim(k - 1), self.n * batch)
        z = self._embed(k - 1, y)
        return z.reshape(self.n**k, batch)

    def restrict(self, k: int, v: np.ndarray) -> np.ndarray:
        """``iota_k^T v`` for ``v`` of shape ``(n**k,)`` or ``(n**k, batch)``."""
        self._need(k)
        v = np.asarray(v, dtype=float)
        squeeze = v.ndim == 1
        cols = v[:, None] if squeeze else v
        if cols.shape[0] != self.n**k:
            raise ShapeError(f"expected {self.n ** k} rows, got {cols.shape[0]}")
        out = self._restrict(k, cols)
        return out[:, 0] if squeeze else out

    def _restrict(self, k, cols):
        if k in self._iota_cache:
            return self._iota_cache[k].T @ cols
        if k <= 1:
            return cols.copy()
        batch = cols.shape[1]
        y = self._restrict(k - 1, cols.reshape(self.n ** (k - 1), self.n * batch))
        return self.ups[k].T @ y.reshape(self.dim(k - 1) * self.n, batch)

    def iota(self, k: int) -> np.ndarray:
        """The ``n**k x d_k`` isometry, materialized once and memoized."""
        self._need(k)
        if k not in self._iota_cache:
            _check_cap(self.n**k * self.dim(k), self.dense_cap, f"iota_{k}")
            self._iota_cache[k] = self._embed(k, np.eye(self.dim(k)))
        return self._iota_cache[k]

    def projection(self, k: int) -> np.ndarray:
        _check_cap(self.n ** (2 * k), self.dense_cap, f"P_{k}")
        io_ = self.iota(k)
        return io_ @ io_.T

    @cached_property
    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(f"{self.n}:{self.kmax}:{self.tol}".encode())
        for u in self.ups:
            h.update(np.ascontiguousarray(u).tobytes())
        return h.hexdigest()


def build_tower(kmax: int, ctx, tol: float = DEFAULT_TOL, dense_cap: int = DEFAULT_DENSE_CAP) -> IsometryTower:
    """Build ``up_0 .. up_kmax`` by eigen-extraction of ``P_k`` on ``H_{k-1} (x) H_1``."""
    n = _as_n(ctx)
    if n < 3:
        raise ValueError(f"n must be >= 3, got {n}")
    if kmax < 0:
        raise ValueError(f"kmax must be >= 0, got {kmax}")
    # the largest eigenproblem has size d_{kmax-1} n
    if kmax >= 1:
        _check_cap(dim_h(kmax - 1, n) ** 2 * n * n, dense_cap, f"level {kmax} eigenproblem")
    ups = [np.ones((1, 1))]
    if kmax >= 1:
        ups.append(np.eye(n))
    for k in range(2, kmax + 1):
        d_pp, d_p, d_k = dim_h(k - 2, n), dim_h(k - 1, n), dim_h(k, n)
        rows = _cup_rows(ups[k - 1], d_pp, n)
        gram = np.eye(d_p * n) - (d_pp / d_p) * (rows.T @ rows)
        evals, evecs = np.linalg.eigh(gram)
        ones = evals >= 0.9
        zeros = evals <= 0.1
        bad = ~(ones | zeros) | (evals > 1.1) | (evals < -0.1)
        if bad.any() or int(ones.sum()) != d_k:
            raise DegeneracyError(
                f"level {k}: eigenvalues outside the unit/zero windows or wrong rank "
                f"({int(ones.sum())} vs {d_k})",
                k=k,
                r=k,
            )
        ups.append(_fix_signs(evecs[:, ones], tol))
    return IsometryTower(n=n, ups=ups, tol=tol, dense_cap=dense_cap)


# ---------------------------------------------------------------- isotypic parts


def _walks(k: int, r: int):
    """All +-1 walks ``0 = h_0, ..., h_k = r`` staying >= 0."""
    def rec(prefix):
        h = prefix[-1]
        step = len(prefix) - 1
        if step == k:
            if h == r:
                yield tuple(prefix)
            return
        remaining = k - step
        for nh in (h + 1, h - 1):
            if nh >= 0 and abs(nh - r) <= remaining - 1:
                yield from rec(prefix + [nh])

    yield from rec([0])


def path_isometry(walk, tower: IsometryTower) -> np.ndarray:
    """Ambient isometry ``H_{walk[-1]} -> H_1^{(x)k}`` obtained by fusing one leg at a time."""
    n = tower.n
    w = np.ones((1, 1))
    for step in range(1, len(walk)):
        h_prev, h = walk[step - 1], walk[step]
        link = tower.up(h) if h > h_prev else tower.down(h_prev)
        d_prev = tower.dim(h_prev)
        # (w (x) I_n) link
        lk = link.reshape(d_prev, n, -1)
        w = np.einsum("xa,aib->xib", w, lk).reshape(w.shape[0] * n, -1)
    return w


def isotypic_isometry(k: int, r: int, tower: IsometryTower) -> np.ndarray:
    """Column-orthonormal basis of the ``H_r``-isotypic part of ``H_1^{(x)k}``."""
    if r < 0 or r > k or (k - r) % 2:
        return np.zeros((tower.n**k, 0))
    tower._need(max(r, 1) if k else 0)
    blocks = [path_isometry(w, tower) for w in _walks(k, r)]
    return np.hstack(blocks)


def isotypic_projection(k: int, r: int, tower: IsometryTower) -> DenseOp:
    """``Q^k_r``; a fusion-forbidden ``r`` yields the zero operator flagged ``empty``."""
    n = tower.n
    _check_cap(n ** (2 * k), tower.dense_cap, f"Q^{k}_{r}")
    w = isotypic_isometry(k, r, tower)
    if w.shape[1] == 0:
        return DenseOp(k, k, n, np.zeros((n**k, n**k)), empty=True)
    return DenseOp(k, k, n, w @ w.T)


# ---------------------------------------------------------------- disk cache


def tower_cache_path(out_dir, n: int, kmax: int) -> Path:
    return Path(out_dir) / f"tower_n{n}_k{kmax}.npz"


def save_tower(tower: IsometryTower, path) -> str:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    arrays = {f"up_{k}": u for k, u in enumerate(tower.ups)}
    header = np.array([tower.n, tower.kmax, CACHE_FORMAT_VERSION], dtype=np.int64)
    buf = io.BytesIO()
    np.savez(buf, header=header, tol=np.array([tower.tol]), **arrays)
    path.write_bytes(buf.getvalue())
    return tower.digest


def load_tower(path, n: int | None = None, kmax: int | None = None, tol: float | None = None) -> IsometryTower:
    """Load a cached tower; a header mismatch raises ``ValueError``."""
    with np.load(Path(path)) as data:
        hn, hk, version = (int(x) for x in data["header"])
        htol = float(data["tol"][0])
        if version != CACHE_FORMAT_VERSION:
            raise ValueError(f"cache format {version}, expected {CACHE_FORMAT_VERSION}")
        if (n is not None and n != hn) or (kmax is not None and kmax > hk) or (tol is not None and tol != htol):
            raise ValueError(f"cache header (n={hn}, kmax={hk}, tol={htol}) does not match request")
        ups = [data[f"up_{k}"] for k in range(hk + 1)]
    if kmax is not None:
        ups = ups[: kmax + 1]
    return IsometryTower(n=hn, ups=ups, tol=htol)


def get_tower(n: int, kmax: int, cache_dir=None, tol: float = DEFAULT_TOL) -> IsometryTower:
    """Build a tower, reusing an on-disk cache in ``cache_dir`` when present."""
    if cache_dir is None:
        return build_tower(kmax, n, tol)
    path = tower_cache_path(cache_dir, n, kmax)
    if path.exists():
        try:
            return load_tower(path, n, kmax, tol)
        except (ValueError, KeyError, OSError):
            pass
    tower = build_tower(kmax, n, tol)
    save_tower(tower, path)
    return tower

"""Independent dense evaluations used to cross-check the tower/fusion pipeline.

Nothing here touches :class:`IsometryTower` or the fusion tables: projections
come from exact Jones-Wenzl elements, isotypic parts from spans of planar
diagrams, and Haar integrals from the Weingarten calculus of ``O_n^+``.
Everything is dense, so only small instances are feasible.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .rep import diagram_to_matrix
from .tl import TLElement, jones_wenzl, noncrossing_pairings


@lru_cache(maxsize=None)
def dense_jw(k: int, n: int) -> np.ndarray:
    if k == 0:
        return np.ones((1, 1))
    return diagram_to_matrix(jones_wenzl(k, n), n).entries


@lru_cache(maxsize=None)
def dense_basis(k: int, n: int) -> np.ndarray:
    """Orthonormal basis of ``H_k`` from the eigenvectors of the dense ``P_k``."""
    evals, evecs = np.linalg.eigh(dense_jw(k, n))
    return evecs[:, evals > 0.5]


def rainbow(m: int, n: int) -> np.ndarray:
    """Nested cups ``sum_w e_w (x) e_{reverse(w)}`` on ``2m`` legs."""
    eye = np.eye(n**m).reshape((n,) * m + (n**m,))
    rev = eye.transpose(tuple(range(m - 1, -1, -1)) + (m,)).reshape(n**m, n**m)
    return rev.T.reshape(-1)


def dense_fixed_vector(m: int, n: int) -> np.ndarray:
    p = dense_jw(m, n)
    return np.kron(p, p) @ rainbow(m, n)


def dense_insertion(a: int, b: int, m: int, n: int) -> np.ndarray:
    """Matrix of ``T^m_{ab}``, shape ``(n^{a+b}, n^{a+b-2m})``."""
    t = dense_fixed_vector(m, n)[:, None]
    return np.kron(np.kron(np.eye(n ** (a - m)), t), np.eye(n ** (b - m)))


@lru_cache(maxsize=None)
def dense_isotypic(N: int, r: int, n: int) -> np.ndarray:
    """``Q^N_r`` as the projection onto the span of all ``D P_r`` with ``D`` planar of shape ``(N, r)``."""
    if r < 0 or r > N or (N - r) % 2:
        return np.zeros((n**N, n**N))
    pr = dense_jw(r, n)
    blocks = []
    for d in noncrossing_pairings(N, r):
        mat = diagram_to_matrix(TLElement(N, r, n, {d: 1}), n).entries
        blocks.append(mat @ pr)
    u, s, _ = np.linalg.svd(np.hstack(blocks), full_matrices=False)
    u = u[:, s > 1e-8 * s[0]]
    return u @ u.T


def far_apart_dense(a: int, b: int, c: int, r: int, n: int) -> float:
    lhs = np.kron(dense_jw(a + b, n), dense_jw(c, n))
    rhs = np.kron(dense_jw(a, n), dense_jw(b + c, n))
    return float(np.linalg.norm(lhs @ dense_isotypic(a + b + c, r, n) @ rhs, 2))


def intertwiner_norm_dense(k: int, l: int, m: int, n: int) -> float:
    r = k + l - 2 * m
    op = np.kron(dense_jw(k, n), dense_jw(l, n)) @ dense_insertion(k, l, m, n) @ dense_jw(r, n)
    return float(np.linalg.norm(op, 2))


def s_sum_dense(k: int, l: int, m: int, zeta: np.ndarray, n: int):
    """``({r: S^k_r}, S^k_+)`` with every map formed as a dense matrix."""
    e = dense_basis(k, n)
    big = k + l - 2 * m
    ins_kl = dense_insertion(k, l, m, n).T
    ins_lk = dense_insertion(l, k, m, n).T
    y = ins_kl @ np.kron(e, zeta[:, None])
    x = ins_lk @ np.kron(zeta[:, None], e)
    out = {}
    for r in range(big % 2, big, 2):
        out[r] = float(np.sum(x * (dense_isotypic(big, r, n) @ y)))
    plus = float(np.sum(x * (dense_jw(big, n) @ y)))
    return out, plus


def s_sum_diag_dense(k: int, m: int, mbar: int, zeta: np.ndarray, xi: np.ndarray, n: int) -> float:
    e = dense_basis(k, n)
    cap_bar = np.kron(np.kron(np.eye(n**mbar), dense_fixed_vector(mbar, n)[None, :]), np.eye(n ** (k - mbar)))
    cap_m = np.kron(np.kron(np.eye(n ** (k - m)), dense_fixed_vector(m, n)[None, :]), np.eye(n**m))
    left = cap_bar @ np.kron(zeta[:, None], e)
    right = cap_m @ np.kron(e, xi[:, None])
    return float(np.sum(left * right))


# ---------------------------------------------------------------- Weingarten calculus


def _blocks_of_join(p, q) -> int:
    size = len(p)
    seen = [False] * size
    loops = 0
    for s in range(size):
        if seen[s]:
            continue
        loops += 1
        x = s
        use_p = True
        while not seen[x]:
            seen[x] = True
            y = p[x] if use_p else q[x]
            seen[y] = True
            x = q[y] if use_p else p[y]
    return loops


@lru_cache(maxsize=None)
def weingarten(length: int, n: int):
    """Noncrossing pairings of ``length`` points and the inverse of their Gram matrix ``n^{loops}``."""
    pairings = [d.partner for d in noncrossing_pairings(length, 0)]
    gram = np.array([[float(n) ** _blocks_of_join(p, q) for q in pairings] for p in pairings])
    return pairings, np.linalg.inv(gram)


def _pair_contract(t: np.ndarray, partner) -> np.ndarray:
    """Contract a batch tensor ``(batch, n, ..., n)`` along the pairs of ``partner``."""
    letters = "abcdefghijklmnopqrstuvwxyz"
    labels = [""] * len(partner)
    nxt = 0
    for i, j in enumerate(partner):
        if i < j:
            labels[i] = labels[j] = letters[nxt]
            nxt += 1
    return np.einsum("Z" + "".join(labels) + "->Z", t)


def haar_factored(rows: np.ndarray, cols: np.ndarray, n: int) -> np.ndarray:
    """Haar integral of ``sum_w rows[.., w] cols[.., w'] u_{w1 w'1} ... u_{wL w'L}``.

    ``rows`` has shape ``(R, n**L)`` and ``cols`` shape ``(C, n**L)``; the result
    is the ``(R, C)`` matrix of integrals of the separable polynomials.
    """
    length = int(round(np.log(rows.shape[1]) / np.log(n)))
    if length % 2:
        return np.zeros((rows.shape[0], cols.shape[0]))
    pairings, wg = weingarten(length, n)
    shape = (n,) * length
    r = np.stack([_pair_contract(rows.reshape((-1,) + shape), p) for p in pairings], axis=1)
    c = np.stack([_pair_contract(cols.reshape((-1,) + shape), p) for p in pairings], axis=1)
    return r @ wg @ c.T


def reverse_legs(v: np.ndarray, k: int, n: int) -> np.ndarray:
    """Reverse tensor legs of the columns of ``v`` (shape ``(n**k, ...)``)."""
    batch = v.shape[1:]
    t = v.reshape((n,) * k + batch)
    t = t.transpose(tuple(range(k - 1, -1, -1)) + tuple(range(k, k + len(batch))))
    return t.reshape(v.shape)


def adjoint_values_weingarten(k: int, m: int, ea: np.ndarray, eb: np.ndarray, basis: np.ndarray, n: int) -> np.ndarray:
    """``sum_p h(v^m_ab v^k_ip (v^m_ab)^* (v^k_jp)^*)`` as a ``d_k x d_k`` matrix in ``basis``.

    ``ea``, ``eb`` are ambient vectors of ``H_m`` (row and column of ``v^m``),
    ``basis`` an ambient orthonormal basis of ``H_k``.
    """
    d = basis.shape[1]
    rev_b = reverse_legs(basis, k, n)
    rev_a, rev_bb = reverse_legs(ea, m, n), reverse_legs(eb, m, n)
    # row tensor for (i, j): ea (x) e_i (x) rev(ea) (x) rev(e_j)
    rows = np.einsum("w,xi,v,yj->ijwxvy", ea, basis, rev_a, rev_b).reshape(d * d, -1)
    # column tensor summed over p: eb (x) e_p (x) rev(eb) (x) rev(e_p)
    cols = np.einsum("w,xp,v,yp->wxvy", eb, basis, rev_bb, rev_b).reshape(1, -1)
    return haar_factored(rows, cols, n).reshape(d, d)

"""Verification families: each turns one group of identities or bounds into report rows."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import deform as dfm
from .estimates import (
    EstimateReport,
    adjoint_coeff,
    adjoint_state_norms,
    conjugate_vector,
    far_apart_norm,
    log_slope,
    loglog_slope,
    s_sum,
    s_sum_diag,
)
from .fusion import FusionTable
from .qnum import QContext, brannan_eigenvalue, chebyshev, dim_h, path_multiplicity, psi_eigenvalue_exact
from .rep import IsometryTower, diagram_to_matrix, jw_apply
from .report import Row, verdict
from .tl import compose, generator, jones_wenzl, markov_trace

ESTIMATE_FAMILIES = ("FarApart", "SSum", "SSumDiag", "AdjointCoeff", "AdjointStateNorm")
DEFORM_FAMILIES = ("Character", "Properness", "Cocycle", "CND", "Brannan", "Asymptotics")
CORE_FAMILIES = ("JonesWenzl", "Tower", "Norms")
ALL_FAMILIES = CORE_FAMILIES + ESTIMATE_FAMILIES + DEFORM_FAMILIES

# per-n caps on k for the estimate families
ESTIMATE_KCAP = {3: 7, 4: 5}
SLOPE_SLACK_FAR = 0.15
STABILIZATION_SLACK = 0.05


@dataclass
class SuiteContext:
    n: int
    kmax: int
    tower: IsometryTower
    table: FusionTable
    tol: float = 1e-8
    seed: int = 42
    extras: dict = field(default_factory=dict)

    @property
    def q(self) -> float:
        return QContext(self.n).q

    @property
    def kcap(self) -> int:
        return min(ESTIMATE_KCAP.get(self.n, 5), self.kmax)

    def rng(self, offset: int = 0) -> np.random.Generator:
        return np.random.default_rng(self.seed + offset)


def _unit(rng, d):
    v = rng.standard_normal(d)
    return v / np.linalg.norm(v)


def report_rows(rep: EstimateReport, n: int, keys=("k",)) -> list:
    rows = []
    for k, value, bound in rep.values:
        rows.append(
            Row(
                family=rep.family,
                n=n,
                value=value,
                bound=bound,
                verdict="info",
                k=k,
                l=rep.params.get("l", ""),
                m=rep.params.get("m", ""),
                r=rep.params.get("r", ""),
                seed=rep.seed if rep.seed is not None else "",
                anchor=rep.anchor,
                tol=rep.tol if rep.tol is not None else "",
                params=",".join(f"{a}={b}" for a, b in sorted(rep.params.items())),
            )
        )
    return rows


# ---------------------------------------------------------------- core families


def jones_wenzl_rows(ctx: SuiteContext, kmax: int | None = None) -> list:
    """Exact idempotency, annihilation and trace of ``p_k``."""
    n = ctx.n
    top = min(8, ctx.kmax) if kmax is None else kmax
    rows = []
    for k in range(1, top + 1):
        p = jones_wenzl(k, n)
        idem = compose(p, p) == p
        killed = all(compose(generator(i, k, n), p).is_zero() and compose(p, generator(i, k, n)).is_zero() for i in range(1, k))
        tr = markov_trace(p)
        ok = idem and killed and tr == chebyshev(k, n)
        rows.append(
            Row("JonesWenzl", n, float(tr), f"p.p=p, e_i.p=0, trace={chebyshev(k, n)}", verdict(ok), k=k,
                anchor="Jones-Wenzl idempotent: exact identities", tol=0.0)
        )
    return rows


def tower_rows(ctx: SuiteContext) -> list:
    n, tower = ctx.n, ctx.tower
    rows = []
    for k in range(ctx.kmax + 1):
        d = dim_h(k, n)
        mult_ok = sum(path_multiplicity(k, r) * dim_h(r, n) for r in range(k + 1)) == n**k
        if n**k <= 729:
            io_ = tower.iota(k)
            orth = float(np.abs(io_.T @ io_ - np.eye(d)).max())
            p = diagram_to_matrix(jones_wenzl(k, n), n).entries if k else np.ones((1, 1))
            proj = float(np.abs(io_ @ io_.T - p).max())
            mode = "dense"
        else:
            # matrix-free spot check on a few random coordinate vectors
            x = ctx.rng(k).standard_normal((d, 3))
            v = tower.embed(k, x)
            orth = float(np.abs(v.T @ v - x.T @ x).max() / np.abs(x.T @ x).max())
            proj = float(np.abs(jw_apply(k, v, n, legs=k) - v).max())
            mode = "matrix-free"
        ok = mult_ok and orth <= 1e-9 * n**k and proj <= 1e-8
        rows.append(
            Row("Tower", n, max(orth, proj), f"orthonormal and iota iota^T = P_k ({mode})", verdict(ok), k=k,
                r=k, fitted=float(d), anchor="isometry tower of H_k", tol=1e-8)
        )
    return rows


def norm_rows(ctx: SuiteContext, kl_max: int | None = None) -> list:
    n, table = ctx.n, ctx.table
    top = kl_max if kl_max is not None else (5 if n == 3 else 4)
    rows = []
    for k in range(1, top + 1):
        for l in range(1, top + 1):
            for m in range(min(k, l) + 1):
                cell = table.cell(k, l, m)
                diff = abs(cell.N_direct - cell.N_formula)
                rows.append(
                    Row("Norms", n, cell.N_direct, f"closed form {cell.N_formula:.12g}", verdict(diff <= ctx.tol),
                        k=k, l=l, m=m, r=cell.r, fitted=diff, anchor="intertwiner norm: direct vs closed form",
                        tol=ctx.tol)
                )
    return rows


# ---------------------------------------------------------------- estimate families


def far_apart_rows(ctx: SuiteContext) -> list:
    """``a = c = 1``; the sub-top channel ``r = b`` and, for reference, the fixed channel ``r = 2``."""
    n, tower = ctx.n, ctx.tower
    bmax = min(5, ctx.kmax - 2)
    bs = list(range(1, bmax + 1))
    rep = EstimateReport("FarApart", {"a": 1, "c": 1, "r": "b"}, seed=ctx.seed, tol=ctx.tol,
                         anchor="far-apart projection product, decay in the gap b")
    vals = []
    for b in bs:
        v = far_apart_norm(1, b, 1, b, tower, seed=ctx.seed)
        vals.append(v)
        rep.add(b, v, "C q^b")
    slope = log_slope(bs, vals)
    limit = math.log(ctx.q) + SLOPE_SLACK_FAR
    rows = report_rows(rep, n)
    for row, b in zip(rows, bs):
        row.r = b
    rows.append(Row("FarApart", n, slope, f"log-slope <= log q + {SLOPE_SLACK_FAR} = {limit:.6g}",
                    verdict(slope <= limit), r="b", fitted=slope, seed=ctx.seed, params="a=1,c=1,fit=b",
                    anchor=rep.anchor, tol=ctx.tol))
    for b in bs:
        v = far_apart_norm(1, b, 1, 2, tower, seed=ctx.seed)
        rows.append(Row("FarApart", n, v, "C q^b (channel 2 vanishes unless b = 2)", "info", k=b, r=2,
                        seed=ctx.seed, params="a=1,c=1,r=2", anchor=rep.anchor, tol=ctx.tol))
    return rows


def s_sum_rows(ctx: SuiteContext, seeds=None) -> list:
    n, table = ctx.n, ctx.table
    seeds = seeds if seeds is not None else (ctx.seed, ctx.seed + 1, ctx.seed + 2)
    rows = []
    for seed in seeds:
        rng = np.random.default_rng(seed)
        zetas = {l: _unit(rng, dim_h(l, n)) for l in (1, 2)}
        for l in (1, 2):
            for m in range(l + 1):
                rows.extend(_s_sum_case(ctx, l, m, zetas[l], seed))
    return rows


def _s_sum_case(ctx: SuiteContext, l: int, m: int, zeta, seed) -> list:
    n, table = ctx.n, ctx.table
    # the top channel needs tower level k + l - 2m - 1
    k_hi = min(ctx.kcap, ctx.kmax + 1 - l + 2 * m)
    ks = list(range(max(l, 1), k_hi + 1))
    rows = []
    by_offset: dict = {}
    plus = []
    anchor = "trace sums S^k_r and S^k_+"
    worst = 0.0
    for k in ks:
        res = s_sum(k, l, m, zeta, table)
        worst = max(worst, res.decomposition_error)
        for r, v in sorted(res.by_channel.items()):
            j = (r - (k - l)) // 2
            by_offset.setdefault(j, []).append((k, abs(v)))
            rows.append(Row("SSum", n, v, "C^l |zeta|^2", "info", k=k, l=l, m=m, r=r, seed=seed,
                            anchor=anchor, tol=ctx.tol, params=f"offset={j}"))
        plus.append(res.plus)
        rows.append(Row("SSum", n, res.plus, "top channel", "info", k=k, l=l, m=m, r=k + l - 2 * m, seed=seed,
                        anchor=anchor, tol=ctx.tol, params="channel=top"))
    rows.append(Row("SSum", n, worst, "sum over channels = unprojected sum", verdict(worst <= 1e-7), l=l, m=m,
                    fitted=worst, seed=seed, anchor=anchor, tol=1e-7, params="check=decomposition"))
    hi, lo = ks[-1], ks[-1] - 2
    for j, seq in sorted(by_offset.items()):
        upto = lambda kk: max((v for k, v in seq if k <= kk), default=0.0)  # noqa: E731
        if lo < ks[0] or upto(lo) == 0.0:
            continue
        ratio = upto(hi) / upto(lo)
        rows.append(Row("SSum", n, upto(hi), f"max_k<={hi} / max_k<={lo} <= {1 + STABILIZATION_SLACK}",
                        verdict(ratio <= 1 + STABILIZATION_SLACK), l=l, m=m, r=f"k-l+{2 * j}", fitted=ratio,
                        seed=seed, anchor=anchor, tol=ctx.tol, params=f"check=stabilization,offset={j}"))
    limit = l + 0.3 if l == 2 * m else 1.3
    fit_ks = [k for k, v in zip(ks, plus) if abs(v) > 1e-300]
    fit_vs = [v for v in plus if abs(v) > 1e-300]
    slope = loglog_slope(fit_ks, fit_vs) if len(fit_ks) >= 2 else float("nan")
    ok = len(fit_ks) >= 2 and slope <= limit
    rows.append(Row("SSum", n, slope, f"log-log growth of S^k_+ <= {limit}", verdict(ok), l=l, m=m, r="top",
                    fitted=slope, seed=seed, anchor=anchor, tol=ctx.tol, params="check=growth"))
    return rows


def s_sum_diag_rows(ctx: SuiteContext) -> list:
    n, tower = ctx.n, ctx.tower
    rng = ctx.rng(100)
    zeta = tower.embed(2, _unit(rng, dim_h(2, n)))
    xi = tower.embed(2, _unit(rng, dim_h(2, n)))
    ks = list(range(2, min(ctx.kcap, ctx.kmax) + 1))
    anchor = "diagonal trace sum S^k(zeta, xi)"
    rows, vals, sym = [], [], 0.0
    for k in ks:
        v = s_sum_diag(k, 1, 1, zeta, xi, tower)
        w = s_sum_diag(k, 1, 1, conjugate_vector(xi, 2, tower), conjugate_vector(zeta, 2, tower), tower)
        sym = max(sym, abs(v - w))
        vals.append(v)
        rows.append(Row("SSumDiag", n, v, "(C k)^2 |zeta| |xi|", "info", k=k, l=2, m=1, seed=ctx.seed + 100,
                        anchor=anchor, tol=ctx.tol, params="mbar=1"))
    slope = loglog_slope(ks, vals)
    rows.append(Row("SSumDiag", n, slope, "log-log growth <= m + mbar + 0.3 = 2.3", verdict(slope <= 2.3), l=2,
                    m=1, fitted=slope, seed=ctx.seed + 100, anchor=anchor, tol=ctx.tol, params="check=growth"))
    rows.append(Row("SSumDiag", n, sym, "swap symmetry with conjugated vectors", verdict(sym <= 1e-10), l=2,
                    m=1, fitted=sym, seed=ctx.seed + 100, anchor=anchor, tol=1e-10, params="check=symmetry"))
    return rows


def adjoint_coeff_rows(ctx: SuiteContext) -> list:
    n, table = ctx.n, ctx.table
    ks = list(range(1, min(ctx.kcap, ctx.kmax - 1) + 1))
    anchor = "adjoint coefficient sums, q^-k scaled"
    rows, vals = [], []
    for k in ks:
        _, total = adjoint_coeff(k, 1, 0, 0, table)
        v = total / ctx.q**k
        vals.append(v)
        rows.append(Row("AdjointCoeff", n, v, "C_l k^(2l)", "info", k=k, l=1, seed="", anchor=anchor,
                        tol=ctx.tol, params="a=0,b=0"))
    slope = loglog_slope(ks, vals)
    rows.append(Row("AdjointCoeff", n, slope, "log-log slope <= 2l + 0.5 = 2.5", verdict(slope <= 2.5), l=1,
                    fitted=slope, anchor=anchor, tol=ctx.tol, params="check=growth"))
    return rows


def adjoint_state_rows(ctx: SuiteContext) -> list:
    n, table = ctx.n, ctx.table
    kmax = min(ctx.kcap, ctx.kmax - 1)
    ks, norms, sums = adjoint_state_norms(1, 0, 0, kmax, table)
    anchor = "coefficient norms of the adjoint vector state"
    rows = []
    for k, v in zip(ks, norms):
        rows.append(Row("AdjointStateNorm", n, v, "D k^(2m)", "info", k=k, m=1, anchor=anchor, tol=ctx.tol,
                        params="a=0,b=0"))
    fitted_d = max(v / k**2 for k, v in zip(ks, norms))
    lams = sorted(sums)
    finite = all(math.isfinite(sums[x]) for x in lams)
    decreasing = all(sums[a] > sums[b] for a, b in zip(lams, lams[1:]))
    for lam in lams:
        rows.append(Row("AdjointStateNorm", n, sums[lam], f"weighted sum, lambda={lam}", "info", m=1,
                        anchor=anchor, tol=ctx.tol, params=f"lambda={lam}"))
    rows.append(Row("AdjointStateNorm", n, fitted_d, "weighted sums finite and decreasing in lambda",
                    verdict(finite and decreasing), m=1, fitted=fitted_d, anchor=anchor, tol=ctx.tol,
                    params="check=summability"))
    return rows


# ---------------------------------------------------------------- deformation families


def character_rows(ctx: SuiteContext) -> list:
    n, tower = ctx.n, ctx.tower
    rng = ctx.rng(200)
    probes = [dfm.OrthogonalProbe.rotation(n, t) for t in np.linspace(0.1, 3.0, 10)]
    probes += [dfm.OrthogonalProbe.random(n, rng) for _ in range(5)]
    rows = []
    for r in range(min(6, ctx.kmax) + 1):
        dev = max(abs(float(np.trace(dfm.corep_matrix(r, p, tower))) - chebyshev(r, float(np.trace(p.g)))) for p in probes)
        rows.append(Row("Character", n, dev, "|Tr u^r(g) - U_r(Tr g)| <= 1e-8", verdict(dev <= 1e-8), r=r,
                        seed=ctx.seed + 200, anchor="character of H_r at orthogonal matrices", tol=1e-8,
                        params="probes=15"))
    return rows


def properness_rows(ctx: SuiteContext) -> list:
    n, tower = ctx.n, ctx.tower
    x = dfm.OrthogonalProbe.elementary(n)
    rows = []
    for r in range(1, min(6, ctx.kmax) + 1):
        lhs, rhs, rel = dfm.properness_check(r, x, tower)
        rows.append(Row("Properness", n, lhs, f"Tr(X^T X) d_r c_r = {rhs:.12g}", verdict(rel <= 1e-6), r=r,
                        fitted=rel, anchor="Hilbert-Schmidt norm of the derivation", tol=1e-6, params="X=E12-E21"))
    return rows


def cocycle_rows(ctx: SuiteContext) -> list:
    n, table = ctx.n, ctx.table
    x = dfm.OrthogonalProbe.elementary(n)
    rows = []
    for r in range(1, min(3, ctx.kmax // 2) + 1):
        g = dfm.cocycle_gram(r, x, table)
        target = 2.0 * float(psi_eigenvalue_exact(r, n))
        rel = float(np.abs(g - target * np.eye(len(g))).max()) / target
        psd = float(np.linalg.eigvalsh((g + g.T) / 2).min()) >= -1e-10
        rows.append(Row("Cocycle", n, float(np.trace(g)) / len(g), f"Tr(X^T X) c_r I = {target:.12g} I",
                        verdict(rel <= 1e-6 and psd), r=r, fitted=rel, anchor="Gram matrix of the cocycle",
                        tol=1e-6, params="X=E12-E21"))
    return rows


def cnd_rows(ctx: SuiteContext) -> list:
    n, table = ctx.n, ctx.table
    rows = []
    L = min(2, ctx.kmax // 2)
    _, top = dfm.cnd_check(L, table)
    rows.append(Row("CND", n, top, "max eigenvalue on ker(counit) <= 1e-8", verdict(top <= 1e-8), r=L,
                    anchor="conditional negativity of psi", tol=1e-8, params=f"L={L}"))
    if n == 3:
        v = dfm.psi_of_shifted_square(table)
        rows.append(Row("CND", n, v, "psi((v11-1)^*(v11-1)) = -1/6", verdict(abs(v + 1 / 6) <= 1e-10),
                        fitted=abs(v + 1 / 6), anchor="conditional negativity of psi", tol=1e-10,
                        params="hand value"))
    for s in (2.5, 2.9):
        e = dfm.tau_gram_min_eig(L, s, table)
        rows.append(Row("CND", n, e, f"tau_s Gram min eigenvalue >= -1e-8 (s={s})", verdict(e >= -1e-8), r=L,
                        anchor="positivity of the multiplier state", tol=1e-8, params=f"s={s}"))
    return rows


def brannan_rows(ctx: SuiteContext) -> list:
    n = ctx.n
    rows = []
    for t in (0.1, 0.5, 1.0):
        s = n - 2 + 2 * math.cos(t)
        sup = dfm.brannan_sup(s, n, 40)
        rows.append(Row("Brannan", n, sup, "sup_k<=40 U_k(s)/U_k(n) (n/s)^k <= 10", verdict(sup <= 10.0),
                        anchor="decay of the rotation multipliers", tol="", params=f"t={t}"))
        ctx_q = QContext(n)
        seq = [brannan_eigenvalue(k, s, ctx_q) for k in range(41)]
        mono = all(a > b for a, b in zip(seq, seq[1:]))
        rows.append(Row("Brannan", n, seq[-1], "strictly decreasing in k for k <= 40", verdict(mono),
                        anchor="decay of the rotation multipliers", params=f"t={t}"))
    return rows


def asymptotic_rows(ctx: SuiteContext) -> list:
    n = ctx.n
    scale = math.sqrt(n * n - 4)
    c = [float(psi_eigenvalue_exact(r, n)) for r in range(201)]
    gap = [c[r] - r / scale for r in range(201)]
    worst = max(abs(g) for g in gap)
    cauchy = abs(gap[100] - gap[99])
    return [
        Row("Asymptotics", n, worst, "|c_r - r/sqrt(n^2-4)| <= 1 for r <= 200", verdict(worst <= 1.0),
            fitted=gap[200], anchor="linear growth of psi eigenvalues", params="r<=200"),
        Row("Asymptotics", n, cauchy, "successive differences < 1e-6 at r = 100", verdict(cauchy < 1e-6),
            r=100, fitted=cauchy, anchor="linear growth of psi eigenvalues"),
    ]


FAMILY_FUNCS = {
    "JonesWenzl": jones_wenzl_rows,
    "Tower": tower_rows,
    "Norms": norm_rows,
    "FarApart": far_apart_rows,
    "SSum": s_sum_rows,
    "SSumDiag": s_sum_diag_rows,
    "AdjointCoeff": adjoint_coeff_rows,
    "AdjointStateNorm": adjoint_state_rows,
    "Character": character_rows,
    "Properness": properness_rows,
    "Cocycle": cocycle_rows,
    "CND": cnd_rows,
    "Brannan": brannan_rows,
    "Asymptotics": asymptotic_rows,
}


def run_families(ctx: SuiteContext, families, threads: int = 1) -> list:
    """Evaluate families concurrently; rows come back in the order ``families`` lists them."""
    families = list(families)
    unknown = [f for f in families if f not in FAMILY_FUNCS]
    if unknown:
        raise ValueError(f"unknown families: {unknown}")
    if threads <= 1:
        results = [FAMILY_FUNCS[f](ctx) for f in families]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(FAMILY_FUNCS[f], ctx) for f in families]
            results = [fut.result() for fut in futures]
    return [row for rows in results for row in rows]

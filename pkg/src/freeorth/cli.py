"""``freeorth`` command line: tower cache, tables, verification families and reports."""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .errors import DegeneracyError, ResourceError
from .fusion import FusionTable
from .qnum import dim_h
from .rep import DEFAULT_TOL, get_tower, load_tower, tower_cache_path
from .report import rows_to_csv, rows_to_json, summary_table
from .suite import (
    ALL_FAMILIES,
    DEFORM_FAMILIES,
    ESTIMATE_FAMILIES,
    SuiteContext,
    norm_rows,
    run_families,
)
from .tl import jones_wenzl

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE, EXIT_DEGENERATE = 0, 1, 2, 3, 4

# largest H_k the tower may hold; the top eigh then stays near 10 s and ~1 GB
MAX_TOP_DIM = 3000

COMMAND_FAMILIES = {
    "estimates": ESTIMATE_FAMILIES,
    "deform": DEFORM_FAMILIES,
    "verify": ALL_FAMILIES,
    "norms": ("Norms",),
}


class UsageError(ValueError):
    pass


def kmax_cap(n: int) -> int:
    k = 0
    while dim_h(k + 1, n) <= MAX_TOP_DIM:
        k += 1
    return k


@dataclass
class RunConfig:
    n: int = 3
    kmax: int = 6
    tol: float = 1e-8
    seed: int = 42
    families: list = field(default_factory=list)
    out_dir: Path | None = None
    format: str = "csv"
    threads: int = 1
    cache_dir: Path | None = None

    def validate(self):
        if self.n < 3:
            raise UsageError(f"--n must be >= 3, got {self.n}")
        if not 1 <= self.kmax <= kmax_cap(self.n):
            raise UsageError(f"--kmax must lie in [1, {kmax_cap(self.n)}] for n={self.n}, got {self.kmax}")
        if not self.tol > 0:
            raise UsageError(f"--tol must be positive, got {self.tol}")
        if self.threads < 1:
            raise UsageError(f"--threads must be >= 1, got {self.threads}")


def _default_cache_dir() -> Path:
    env = os.environ.get("FREEORTH_CACHE")
    if env:
        return Path(env)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "freeorth"


def _parse_families(selection: str | None, allowed) -> list:
    if selection is None or selection == "all":
        return list(allowed)
    names = [s.strip() for s in selection.split(",") if s.strip()]
    lookup = {a.lower(): a for a in allowed}
    bad = [s for s in names if s.lower() not in lookup]
    if bad:
        raise UsageError(f"unknown family {bad}; choose from {', '.join(allowed)} or 'all'")
    return [lookup[s.lower()] for s in names]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=3, help="matrix size n >= 3 (loop value delta = n)")
    common.add_argument("--kmax", type=int, default=6, help="top level of the isometry tower")
    common.add_argument("--tol", type=float, default=1e-8, help="pass tolerance for numeric identities")
    common.add_argument("--seed", type=int, default=42, help="base seed for random test vectors")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", type=Path, default=None, help="directory for the report file")
    common.add_argument("--family", default=None, help="comma-separated family names or 'all'")
    common.add_argument("--threads", type=int, default=1, help="worker threads over families")
    common.add_argument("--cache-dir", type=Path, default=None, help="tower cache directory")

    p = argparse.ArgumentParser(prog="freeorth", description=__doc__)
    p.add_argument("--version", action="version", version=f"freeorth {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("dims", parents=[common], help="print dim H_k for k = 0..kmax")
    jw = sub.add_parser("jw", parents=[common], help="print Jones-Wenzl coefficients")
    jw.add_argument("--k", type=int, default=None, help="level (defaults to --kmax)")
    sub.add_parser("norms", parents=[common], help="intertwiner norm table, k, l <= kmax")
    sub.add_parser("estimates", parents=[common], help="far-apart, trace-sum and adjoint families")
    sub.add_parser("deform", parents=[common], help="character, properness, cocycle, CND, multiplier checks")
    sub.add_parser("verify", parents=[common], help="full verification suite")
    cache = sub.add_parser("cache", parents=[common], help="build or inspect the tower cache")
    cache.add_argument("action", choices=("build", "info"), nargs="?", default="info")
    return p


def _config(args, command: str) -> RunConfig:
    cfg = RunConfig(
        n=args.n,
        kmax=args.kmax,
        tol=args.tol,
        seed=args.seed,
        out_dir=args.out,
        format=args.format,
        threads=args.threads,
        cache_dir=args.cache_dir or _default_cache_dir(),
    )
    cfg.validate()
    if command in COMMAND_FAMILIES:
        cfg.families = _parse_families(args.family, COMMAND_FAMILIES[command])
    return cfg


def _write_report(rows, cfg: RunConfig, command: str, digest: str) -> Path | None:
    if cfg.out_dir is None:
        return None
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    path = cfg.out_dir / f"{command}_n{cfg.n}_k{cfg.kmax}.{cfg.format}"
    if cfg.format == "csv":
        path.write_text(rows_to_csv(rows))
    else:
        meta = {
            "version": __version__,
            "command": command,
            "n": cfg.n,
            "kmax": cfg.kmax,
            "tol": cfg.tol,
            "seed": cfg.seed,
            "families": cfg.families,
            "tower_sha256": digest,
        }
        path.write_text(rows_to_json(rows, meta))
    return path


def _run_suite(cfg: RunConfig, command: str, out) -> int:
    tower = get_tower(cfg.n, cfg.kmax, cfg.cache_dir, DEFAULT_TOL)
    ctx = SuiteContext(cfg.n, cfg.kmax, tower, FusionTable(tower), tol=cfg.tol, seed=cfg.seed)
    if command == "norms":
        rows = norm_rows(ctx, kl_max=cfg.kmax)
    else:
        rows = run_families(ctx, cfg.families, threads=cfg.threads)
    print(summary_table(rows), file=out)
    path = _write_report(rows, cfg, command, tower.digest)
    failed = sum(r.verdict == "fail" for r in rows)
    checked = sum(r.verdict != "info" for r in rows)
    print(f"\n{checked - failed}/{checked} checks passed", file=out)
    if path is not None:
        print(f"report: {path}", file=out)
    return EXIT_PASS if failed == 0 else EXIT_FAIL


def _run_cache(cfg: RunConfig, action: str, out) -> int:
    path = tower_cache_path(cfg.cache_dir, cfg.n, cfg.kmax)
    if action == "build":
        tower = get_tower(cfg.n, cfg.kmax, cfg.cache_dir, DEFAULT_TOL)
    elif path.exists():
        tower = load_tower(path, cfg.n, cfg.kmax)
    else:
        print(f"no cache at {path}", file=out)
        return EXIT_FAIL
    print(f"path: {path}", file=out)
    print(f"n: {tower.n}\nkmax: {tower.kmax}\ntol: {tower.tol}\nsha256: {tower.digest}", file=out)
    return EXIT_PASS


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    command = args.command
    try:
        cfg = _config(args, command)
        if command == "dims":
            print(", ".join(str(dim_h(k, cfg.n)) for k in range(cfg.kmax + 1)), file=out)
            return EXIT_PASS
        if command == "jw":
            k = cfg.kmax if args.k is None else args.k
            if not 0 <= k <= 10:
                raise UsageError(f"--k must lie in [0, 10], got {k}")
            print(jones_wenzl(k, cfg.n).render(), file=out)
            return EXIT_PASS
        if command == "cache":
            return _run_cache(cfg, args.action, out)
        return _run_suite(cfg, command, out)
    except UsageError as exc:
        print(f"freeorth: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceError as exc:
        print(f"freeorth: resource cap exceeded: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except DegeneracyError as exc:
        print(f"freeorth: numerical degeneracy at (k={exc.k}, r={exc.r}): {exc}", file=sys.stderr)
        return EXIT_DEGENERATE


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()

"""``moduli-betti``: compute, cache, diagnose and verify Betti tables from the command line.

Exit status: 0 success, 1 a verification failed, 2 usage or domain error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict
from typing import Sequence

from . import asymptotics as asy
from .cache import CacheError, TableCache, default_cache_dir
from .gallery import PRESETS, flag_betti, git_betti, hilb_series, surface
from .moduli import (
    IdentityError,
    betti_fm,
    betti_m0n,
    betti_m0n1,
    functional_residual,
    solve_phi,
    solve_psi,
    verify_fm_identity,
)
from .quotient import FAMILIES, IngestError, MissingTableError, QuotientDataset, cross_validate, ingest_all, table1_csv, table1_report
from .series import series_reversion
from .statistics import diagnose, distribution, plot_data, plot_data_csv, reports_to_csv
from .tables import BettiTable, Space, TableValidationError

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

COMPUTABLE = (Space.M0n, Space.M0n1, Space.FM, Space.Hilb, Space.GIT, Space.Flag)


class UsageError(ValueError):
    pass


# -- helpers ----------------------------------------------------------------------


def _spaces(raw: Sequence[str] | None, default: Sequence[Space], allowed=None) -> list[Space]:
    if not raw:
        return list(default)
    out: list[Space] = []
    for chunk in raw:
        for name in chunk.split(","):
            name = name.strip()
            if not name:
                continue
            try:
                sp = Space(name)
            except ValueError:
                raise UsageError(f"unknown space {name!r}; choose from {', '.join(s.value for s in Space)}") from None
            if allowed is not None and sp not in allowed:
                raise UsageError(f"space {sp.value} is not available here")
            if sp not in out:
                out.append(sp)
    return out


def _surfaces(raw: Sequence[str] | None, default=("P2",)) -> list[str]:
    names = [n.strip() for chunk in (raw or default) for n in chunk.split(",") if n.strip()]
    for n in names:
        surface(n)
    return names


def _min_n(space: Space) -> int:
    return {Space.M0n: 3, Space.M0n1: 2, Space.GIT: 5}.get(space, 1)


def _range(space: Space, lo: int | None, hi: int) -> list[int]:
    lo = max(_min_n(space), lo if lo is not None else 0)
    ns = list(range(lo, hi + 1))
    if space is Space.GIT:
        ns = [n for n in ns if n % 2]
    return ns


class _Maker:
    """Builds computable tables, solving each series once to the largest order needed."""

    def __init__(self):
        self._phi = None
        self._psi = None
        self._hilb: dict[str, list[BettiTable]] = {}

    def __call__(self, space: Space, n: int, surf: str | None = None) -> BettiTable:
        if space is Space.M0n:
            return betti_m0n(n, self._phi if self._phi is not None and self._phi.order >= n - 1 else None)
        if space is Space.M0n1:
            return betti_m0n1(n)
        if space is Space.FM:
            if self._psi is None or self._psi.order < n:
                self._psi = solve_psi(n)
            return betti_fm(n, self._psi)
        if space is Space.GIT:
            return git_betti(n)
        if space is Space.Flag:
            return flag_betti(n)
        if space is Space.Hilb:
            cached = self._hilb.get(surf)
            if cached is None or len(cached) <= n:
                self._hilb[surf] = cached = hilb_series(surface(surf), max(n, 1))
            return cached[n]
        raise UsageError(f"{space.value} tables are not computed here; ingest them with ingest-quotient")

    def prepare(self, space: Space, n_max: int) -> None:
        if space in (Space.M0n, Space.M0n1) and n_max >= 2:
            self._phi = solve_phi(n_max if space is Space.M0n1 else n_max - 1)
        elif space is Space.FM and n_max >= 1:
            self._psi = solve_psi(n_max)


def _emit(text: str) -> None:
    sys.stdout.write(text)
    sys.stdout.flush()


def _dicts_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: (str(v).lower() if isinstance(v, bool) else v) for k, v in r.items()})
    return buf.getvalue()


def _emit_records(rows: list[dict], fmt: str, envelope: dict | None = None) -> None:
    if fmt == "csv":
        _emit(_dicts_csv(rows))
    else:
        payload = dict(envelope or {})
        payload["rows"] = rows
        _emit(json.dumps(payload, indent=2, sort_keys=False) + "\n")


def _cache(args) -> TableCache:
    return TableCache(args.cache_dir if args.cache_dir else default_cache_dir())


def _need(cache: TableCache, space: Space, n: int, surf: str | None = None) -> BettiTable:
    t = cache.load(space, n, surf)
    if t is None:
        hint = f"moduli-betti compute --space {space.value} --max-n {n}"
        if space is Space.Hilb:
            hint += f" --surface {surf}"
        if space.is_quotient:
            hint = "moduli-betti ingest-quotient FILE"
        raise FileNotFoundError(f"no cached table {cache.path(space, n, surf)}; run `{hint}` first")
    return t


# -- subcommands ------------------------------------------------------------------


def cmd_compute(args) -> int:
    cache = _cache(args)
    spaces = _spaces(args.space, [Space.M0n], COMPUTABLE)
    make = _Maker()
    rows = []
    for sp in spaces:
        surfs = _surfaces(args.surface) if sp is Space.Hilb else [None]
        for surf in surfs:
            ns = _range(sp, args.min_n, args.max_n)
            todo = [n for n in ns if args.force or not cache.has(sp, n, surf)]
            if todo:
                make.prepare(sp, max(todo))
            written = 0
            for n in todo:
                t = make(sp, n, surf)
                t.check_duality()
                written += cache.store(t, surf, force=args.force)
            rows.append({
                "space": sp.value if surf is None else f"{sp.value}-{surf}",
                "tables": len(ns),
                "written": written,
                "cached": len(ns) - written,
            })
    _emit_records(rows, args.format, {"cache_dir": str(cache.root)})
    return EXIT_OK


def cmd_diagnose(args) -> int:
    cache = _cache(args)
    spaces = _spaces(args.space, [Space.M0n])
    reports = []
    for sp in spaces:
        surfs = _surfaces(args.surface) if sp is Space.Hilb else [None]
        for surf in surfs:
            if sp.is_quotient:
                ns = sorted(int(p.stem.split("_")[1]) for p in cache.root.glob(f"{sp.value}_*.json"))
                ns = [n for n in ns if n <= args.max_n and (args.min_n is None or n >= args.min_n)]
            else:
                ns = _range(sp, args.min_n, args.max_n)
            for n in ns:
                t = _need(cache, sp, n, surf)
                if distribution(t).variance == 0:
                    continue
                reports.append(diagnose(
                    t,
                    window_halfwidth_sigmas=args.window,
                    ulc_r=args.ulc_r,
                    window_c=args.window_c,
                    moments_mode=args.moments,
                ))
    if args.format == "csv":
        _emit(reports_to_csv(reports))
    else:
        _emit_records([asdict(r) for r in reports], "json")
    return EXIT_OK


def _check(name: str, ok: bool, detail: str = "") -> dict:
    return {"check": name, "ok": bool(ok), "detail": detail}


def _first_diff(a: Sequence[int], b: Sequence[int]) -> str:
    for k in range(max(len(a), len(b))):
        x = a[k] if k < len(a) else None
        y = b[k] if k < len(b) else None
        if x != y:
            return f"b_{k}: cached {x}, computed {y}"
    return ""


def _verify_cache(cache: TableCache, checks: list[dict]) -> None:
    make = _Maker()
    quot: dict[Space, QuotientDataset] = {}
    for p in cache.entries():
        stem = p.stem
        try:
            head, n_str = stem.rsplit("_", 1)
            n = int(n_str)
            space_name, _, surf = head.partition("-")
            sp = Space(space_name)
        except ValueError:
            checks.append(_check("cache-file", False, f"{p}: unrecognised file name"))
            continue
        try:
            t = cache.load(sp, n, surf or None)
        except CacheError as exc:
            checks.append(_check("cache-file", False, str(exc)))
            continue
        if sp.is_quotient:
            quot.setdefault(sp, QuotientDataset(sp)).tables[n] = t
            continue
        try:
            ref = make(sp, n, surf or None)
        except ValueError as exc:
            checks.append(_check("cache-file", False, f"{p}: {exc}"))
            continue
        if ref.betti != t.betti:
            checks.append(_check("cache-file", False, f"{p}: {_first_diff(t.betti, ref.betti)}"))
    if Space.M0n1Quot in quot and Space.FMQuot in quot:
        for r in cross_validate(quot[Space.M0n1Quot], quot[Space.FMQuot]):
            if not r:
                checks.append(_check("fm-quotient", False, r.diff()))
    if not any(c["check"] in ("cache-file", "fm-quotient") for c in checks):
        checks.append(_check("cache", True, f"{len(cache.entries())} file(s) in {cache.root}"))


def cmd_verify(args) -> int:
    N = args.max_n
    checks: list[dict] = []
    phi = solve_phi(N)
    rec = solve_phi(N, method="recurrence")
    bad = next((n for n in range(N + 1) if phi[n] != rec[n]), None)
    checks.append(_check("solver-agreement", bad is None, "" if bad is None else f"n={bad}: {phi[bad]} vs {rec[bad]}"))

    res = functional_residual(phi)
    nz = next((n for n in range(N + 1) if res[n]), None)
    detail = ""
    if nz is not None:
        k = next(i for i, c in enumerate(res[nz].coeffs) if c)
        detail = f"first nonzero at n={nz}, coefficient u^{k}"
    checks.append(_check("functional-residual", nz is None, detail))

    try:
        psi = solve_psi(N, phi)
        checks.append(_check("psi-power-vs-product", True))
        fails = [r for r in (verify_fm_identity(phi, psi, n) for n in range(2, N + 1)) if not r]
        checks.append(_check("fm-identity", not fails, fails[0].diff() if fails else ""))
    except IdentityError as exc:
        checks.append(_check("psi-power-vs-product", False, str(exc)))

    depth = min(args.oracle_depth, N)
    orc = series_reversion(depth)
    bad = next((n for n in range(depth + 1) if orc[n] != phi[n]), None)
    checks.append(_check(
        "reversion-oracle", bad is None, f"through order {depth}" if bad is None else f"n={bad}: {orc[bad]} vs {phi[bad]}"
    ))

    dual = []
    for n in range(3, N + 2):
        try:
            betti_m0n(n, phi).check_duality()
        except TableValidationError as exc:
            dual.append(str(exc))
    checks.append(_check("duality", not dual, dual[0] if dual else ""))

    cache = _cache(args)
    if cache.root.is_dir():
        _verify_cache(cache, checks)

    ok = all(c["ok"] for c in checks)
    _emit_records(checks, args.format, {"ok": ok, "max_n": N})
    return EXIT_OK if ok else EXIT_VERIFY


def _table_for(args, cache: TableCache, sp: Space, n: int, surf: str | None) -> BettiTable:
    t = cache.load(sp, n, surf)
    if t is not None:
        return t
    if sp.is_quotient:
        return _need(cache, sp, n, surf)
    return _Maker()(sp, n, surf)


def cmd_plot_data(args) -> int:
    cache = _cache(args)
    sp = _spaces(args.space, [Space.M0n])
    if len(sp) != 1:
        raise UsageError("plot-data takes exactly one space")
    surf = _surfaces(args.surface)[0] if sp[0] is Space.Hilb else None
    rows = plot_data(_table_for(args, cache, sp[0], args.n, surf))
    if args.format == "json":
        _emit_records([{"k": k, "normalized_betti": p, "gaussian_density": g} for k, p, g in rows], "json")
    else:
        _emit(plot_data_csv(rows))
    return EXIT_OK


def cmd_gallery(args) -> int:
    fams = _spaces(args.space, [Space.Hilb, Space.GIT, Space.Flag], (Space.Hilb, Space.GIT, Space.Flag))
    reports = []
    for sp in fams:
        if sp is Space.Hilb:
            for name in _surfaces(args.surface, default=("P2", "P1xP1")):
                tables = hilb_series(surface(name), args.max_n)
                reports += [diagnose(t, ulc_r=None) for t in tables[1:] if distribution(t).variance > 0]
        elif sp is Space.GIT:
            reports += [diagnose(git_betti(n), ulc_r=None) for n in _range(sp, args.min_n, args.max_n)]
        else:
            reports += [diagnose(flag_betti(n), ulc_r=None) for n in _range(sp, max(args.min_n or 2, 2), args.max_n)]
    if args.format == "csv":
        _emit(reports_to_csv(reports))
    else:
        _emit_records([asdict(r) for r in reports], "json")
    return EXIT_OK


def _merge(paths: Sequence[str]) -> dict[Space, QuotientDataset]:
    merged: dict[Space, QuotientDataset] = {}
    for path in paths:
        for fam, ds in ingest_all(path).items():
            tgt = merged.setdefault(fam, QuotientDataset(fam, provenance=path))
            for n, t in ds.tables.items():
                if n in tgt.tables:
                    raise IngestError(f"{path}: duplicate n={n} for {fam.value} (also in {tgt.provenance})")
                tgt.tables[n] = t
    return merged


def cmd_ingest_quotient(args) -> int:
    cache = _cache(args)
    merged = _merge(args.files)
    rows = []
    for fam in FAMILIES:
        ds = merged.get(fam)
        if ds is None:
            continue
        written = sum(cache.store(ds[n], force=args.force) for n in ds.ns())
        rows.append({"space": fam.value, "tables": len(ds.tables), "written": written, "cached": len(ds.tables) - written})
    ok = True
    if Space.M0n1Quot in merged and Space.FMQuot in merged:
        reps = cross_validate(merged[Space.M0n1Quot], merged[Space.FMQuot])
        ok = all(reps)
        rows.append({"space": "cross-validation", "tables": len(reps), "written": 0, "cached": sum(map(bool, reps))})
        for r in reps:
            if not r:
                print(r.diff(), file=sys.stderr)
    _emit_records(rows, args.format, {"cache_dir": str(cache.root), "ok": ok})
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_table1(args) -> int:
    if args.files:
        data = _merge(args.files)
    else:
        cache = _cache(args)
        data = {}
        for fam in FAMILIES:
            ds = QuotientDataset(fam)
            for p in cache.root.glob(f"{fam.value}_*.json"):
                n = int(p.stem.split("_")[1])
                ds.tables[n] = _need(cache, fam, n)
            if ds.tables:
                data[fam] = ds
    if not data:
        raise FileNotFoundError("no quotient tables found; pass files or run ingest-quotient")
    ns = None
    if args.n:
        ns = [int(x) for chunk in args.n for x in chunk.split(",") if x.strip()]
    rows = table1_report(data, ns)
    if args.format == "json":
        _emit_records([dict(zip(["n"] + [f.value for f in FAMILIES], r)) for r in rows], "json")
    else:
        _emit(table1_csv(rows))
    return EXIT_OK


def cmd_asymptotics(args) -> int:
    rows = []
    for fam in ("M0n", "FM"):
        f = asy.moment_formulas(fam)
        for key in ("mean_slope", "mean_offset", "var_slope", "var_offset"):
            q = getattr(f, key)
            rows.append({"quantity": f"{fam}.{key}", "exact": repr(q), "value": float(q)})
    for k, d in enumerate(asy.rho_jet(3).derivatives()):
        rows.append({"quantity": f"rho^({k})(1)", "exact": repr(d), "value": float(d)})
    scan = asy.rho_modulus_scan(args.grid_points, args.exclusion_radius)
    for key in ("min_theta", "min_value", "boundary_min", "K"):
        rows.append({"quantity": f"scan.{key}", "exact": "", "value": getattr(scan, key)})
    n = args.max_n
    for fam in ("phi", "psi"):
        exact = asy.exact_coefficient(n, 1, fam)
        approx = asy.coeff_asymptotic(n, 1, fam)
        rows.append({"quantity": f"{fam}[{n}](1) exact/asymptotic", "exact": "", "value": float(exact / approx)})
    _emit_records(rows, args.format, {"precision_bits": asy.PRECISION_BITS, "grid_points": scan.grid_points,
                                      "exclusion_radius": scan.exclusion_radius})
    return EXIT_OK


# -- parser -----------------------------------------------------------------------


def _positive(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cache-dir", help="table cache (default: $BETTI_CACHE_DIR or ~/.cache/moduli_betti)")
    common.add_argument("--precision", type=int, default=asy.PRECISION_BITS, help="mpmath working precision in bits")
    common.add_argument("--format", choices=("json", "csv"), default=None)

    def ranged(p, default_max):
        p.add_argument("--max-n", type=_positive, default=default_max)
        p.add_argument("--min-n", type=int, default=None)

    def spaced(p):
        p.add_argument("--space", action="append", help="space name(s), comma separated or repeated")
        p.add_argument("--surface", action="append", help=f"Hilbert scheme surface: {', '.join(PRESETS)}")

    parser = argparse.ArgumentParser(prog="moduli-betti", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", parents=[common], help="compute tables into the cache")
    ranged(p, 20)
    spaced(p)
    p.add_argument("--force", action="store_true", help="rewrite existing cache files")
    p.set_defaults(func=cmd_compute, default_format="json")

    p = sub.add_parser("diagnose", parents=[common], help="normality and log-concavity diagnostics from the cache")
    ranged(p, 20)
    spaced(p)
    p.add_argument("--ulc-r", type=int, default=3)
    p.add_argument("--window-c", type=float, default=1.0, help="ULC window |k - d/2| <= c sqrt(n)")
    p.add_argument("--window", type=float, default=2.0, help="local-limit window half-width in sigmas")
    p.add_argument("--moments", choices=("exact", "formula"), default="exact")
    p.set_defaults(func=cmd_diagnose, default_format="csv")

    p = sub.add_parser("verify", parents=[common], help="run the exact identity checks")
    p.add_argument("--max-n", type=_positive, default=30)
    p.add_argument("--oracle-depth", type=_positive, default=12)
    p.set_defaults(func=cmd_verify, default_format="json")

    p = sub.add_parser("plot-data", parents=[common], help="k, normalized Betti number, Gaussian density")
    spaced(p)
    p.add_argument("-n", "--n", type=int, required=True)
    p.set_defaults(func=cmd_plot_data, default_format="csv")

    p = sub.add_parser("gallery", parents=[common], help="diagnostics for Hilb, GIT and Flag families")
    ranged(p, 30)
    spaced(p)
    p.set_defaults(func=cmd_gallery, default_format="csv")

    p = sub.add_parser("ingest-quotient", parents=[common], help="validate quotient tables and add them to the cache")
    p.add_argument("files", nargs="+")
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_ingest_quotient, default_format="json")

    p = sub.add_parser("table1", parents=[common], help="normalized variances of the quotient families")
    p.add_argument("files", nargs="*")
    p.add_argument("--n", action="append", help="rows to report (default: all present)")
    p.set_defaults(func=cmd_table1, default_format="csv")

    p = sub.add_parser("asymptotics", parents=[common], help="closed-form constants and the singularity scan")
    p.add_argument("--max-n", type=_positive, default=40, help="order for the asymptotic-vs-exact ratio")
    p.add_argument("--exclusion-radius", type=float, default=0.1)
    p.add_argument("--grid-points", type=int, default=1024)
    p.set_defaults(func=cmd_asymptotics, default_format="json")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.format is None:
        args.format = args.default_format
    try:
        asy.set_precision(args.precision)
        return args.func(args)
    except (IngestError, CacheError, MissingTableError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, IdentityError) as exc:
        code = EXIT_VERIFY if isinstance(exc, IdentityError) else EXIT_USAGE
        print(f"error: {exc}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())

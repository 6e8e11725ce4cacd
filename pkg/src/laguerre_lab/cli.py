"""Command-line surface: ``lab <suite> [flags]``.

Runs one suite (or ``all``), prints a per-suite summary, optionally
writes the reports as JSON or CSV, and exits 0 when every residual
passes, 1 on any failure, 2 on configuration/domain errors, 3 on
numerical breakdowns (lost precision, degenerate brackets,
non-convergence).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time

from mpmath import mp

from .config import RunConfig, parse_config
from .errors import ConfigError, DomainError, NumericalError
from .params import to_mpf
from .registry import SUITE_NAMES, validate_ids
from .reports import render


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="lab",
        description="residual-verification lab for deformed Laguerre Hankel determinants",
    )
    ap.add_argument("suite", help="suite name or 'all': %s" % ", ".join(SUITE_NAMES))
    ap.add_argument("--alpha", help="weight exponent alpha (> -1)")
    ap.add_argument("--t1", help="first deformation parameter (nonzero)")
    ap.add_argument("--t2", help="second deformation parameter (> 0 at m = 2)")
    ap.add_argument("--t3", help="third deformation parameter (enables m = 3)")
    ap.add_argument("--t", help="comma list overriding the whole t vector")
    ap.add_argument("--m", type=int, help="pole order; must match the t vector length")
    ap.add_argument("--n-max", dest="n_max", help="largest polynomial index checked")
    ap.add_argument("--digits", help="working decimal precision (>= 50)")
    ap.add_argument("--s1", help="double-scaling coordinate s1")
    ap.add_argument("--s2", help="double-scaling coordinate s2 (> 0)")
    ap.add_argument("--n-list", dest="n_list", help="comma list of scaling indices")
    ap.add_argument("--out", help="write reports to this path")
    ap.add_argument("--format", choices=("csv", "json"), help="output format")
    ap.add_argument("--config", help="key = value configuration file")
    ap.add_argument("--cache-dir", dest="cache_dir", help="table cache directory")
    ap.add_argument("--table-out", dest="table_out",
                    help="also write the recurrence table of the configured point")
    ap.add_argument("--sweep-csv", dest="sweep_csv",
                    help="scaling suite: write the per-n sweep as CSV plus a JSON limits block")
    ap.add_argument("--density-profile", dest="density_profile",
                    help="equilibrium suite: write a CSV density profile")
    return ap


def config_from_args(args) -> RunConfig:
    overrides = {
        "alpha": args.alpha,
        "t1": args.t1,
        "t2": args.t2,
        "t3": args.t3,
        "n_max": args.n_max,
        "digits": args.digits,
        "s1": args.s1,
        "s2": args.s2,
        "n_list": args.n_list,
        "out": args.out,
        "format": args.format,
        "cache_dir": args.cache_dir,
        "suites": args.suite,
    }
    if args.t is not None:
        parts = [p.strip() for p in args.t.split(",") if p.strip()]
        if len(parts) >= 1:
            overrides["t1"] = parts[0]
        if len(parts) >= 2:
            overrides["t2"] = parts[1]
        if len(parts) >= 3:
            overrides["t3"] = parts[2]
        if len(parts) > 3:
            raise ConfigError("--t supports up to three entries; longer vectors "
                              "are exercised inside the multitime suite")
    cfg = parse_config(args.config, overrides)
    if args.m is not None and args.m != cfg.params.m:
        raise ConfigError(f"--m {args.m} does not match the t vector length {cfg.params.m}")
    return cfg


def reports_document(reports, timestamp=None) -> dict:
    return {"reports": [r.as_dict() for r in reports],
            "metadata": {} if timestamp is None else {"timestamp": timestamp}}


def emit_table(obj, fmt: str, path: str):
    """Serialize a report set, one report, a recurrence table, or a
    scaling sweep; decimal strings only, stable key order."""
    from .orthopoly import RecurrenceTable
    from .scaling import ScaledSequences

    if isinstance(obj, RecurrenceTable):
        _emit_recurrence(obj, fmt, path)
        return
    if isinstance(obj, ScaledSequences):
        _emit_sweep(obj, fmt, path)
        return
    reports = obj if isinstance(obj, list) else [obj]
    if fmt == "json":
        with open(path, "w") as fh:
            json.dump(reports_document(reports), fh, indent=2, sort_keys=True)
            fh.write("\n")
    else:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            first = True
            for rep in reports:
                for row in rep.csv_rows():
                    if row[0] == "suite" and not first:
                        continue
                    writer.writerow(row)
                    first = False


def _emit_recurrence(tab, fmt: str, path: str):
    dps = tab.prec.work_dps + 10
    with mp.workdps(dps + 10):
        rows = []
        for n in range(tab.N + 1):
            rows.append({
                "n": n,
                "h": mp.nstr(tab.h[n], dps, strip_zeros=True),
                "alpha": mp.nstr(tab.alpha(n), dps, strip_zeros=True) if n < tab.N else "",
                "beta": mp.nstr(tab.beta(n), dps, strip_zeros=True) if n >= 1 else "",
                "p": mp.nstr(tab.p(n), dps, strip_zeros=True),
            })
    if fmt == "json":
        with open(path, "w") as fh:
            json.dump({"table": rows}, fh, indent=2, sort_keys=True)
            fh.write("\n")
    else:
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=["n", "h", "alpha", "beta", "p"])
            writer.writeheader()
            writer.writerows(rows)


def _emit_sweep(seqs, fmt: str, path: str):
    limits = {
        "R": render(seqs.R), "Rstar": render(seqs.Rstar),
        "r": render(seqs.r), "rstar": render(seqs.rstar), "H": render(seqs.H),
        "err_R": render(seqs.err_R), "err_Rstar": render(seqs.err_Rstar),
        "err_r": render(seqs.err_r), "err_rstar": render(seqs.err_rstar),
        "err_H": render(seqs.err_H),
    }
    if fmt == "json":
        doc = {
            "s1": str(seqs.s1), "s2": str(seqs.s2),
            "rows": [
                {"n": n, "x": render(x), "y": render(y), "H": render(H)}
                for n, x, y, H in zip(seqs.n_list, seqs.x_seq, seqs.y_seq, seqs.H_seq)
            ],
            "limits": limits,
        }
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
    else:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["n", "x", "y", "H"])
            for n, x, y, H in zip(seqs.n_list, seqs.x_seq, seqs.y_seq, seqs.H_seq):
                writer.writerow([n, render(x), render(y), render(H)])
        with open(path + ".limits.json", "w") as fh:
            json.dump({"limits": limits}, fh, indent=2, sort_keys=True)
            fh.write("\n")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except (ConfigError, DomainError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2

    from .suites import run_suite

    try:
        reports = run_suite(cfg)
        extras(cfg, args)
    except (ConfigError, DomainError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3

    failed = 0
    for rep in reports:
        unknown = validate_ids(rep.suite, rep.entries)
        if unknown:
            print(f"{rep.suite}: ids missing from registry: {unknown}", file=sys.stderr)
            failed += 1
        print(f"{rep.suite}: {len(rep.entries)} checks, {rep.n_failed} failed")
        for c in rep.entries:
            if not c.ok:
                print(f"  FAIL {c.id} @ {c.point}: {render(c.residual)} > {render(c.tol)}")
        failed += rep.n_failed

    if cfg.out:
        if cfg.format == "json":
            doc = reports_document(reports, timestamp=time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()))
            with open(cfg.out, "w") as fh:
                json.dump(doc, fh, indent=2, sort_keys=True)
                fh.write("\n")
        else:
            emit_table(reports, "csv", cfg.out)
        print(f"wrote {cfg.out}")
    return 1 if failed else 0


def extras(cfg: RunConfig, args):
    """Optional table / sweep / density artifacts next to the reports."""
    if args.table_out:
        from .cache import cached_recurrence_table

        tab = cached_recurrence_table(cfg.params, cfg.n_max, cfg.prec,
                                      cache_dir=cfg.cache_dir)
        emit_table(tab, cfg.format, args.table_out)
    if args.sweep_csv and "scaling" in cfg.active_suites:
        from .scaling import scaled_sequences

        seqs = scaled_sequences(cfg.s1, cfg.s2, cfg.n_list, cfg.prec,
                                alpha=cfg.params.alpha)
        emit_table(seqs, "csv", args.sweep_csv)
    if args.density_profile and "equilibrium" in cfg.active_suites:
        from .equilibrium import density, solve_support

        params = cfg.params
        sol = solve_support(10, params, prec=cfg.prec)
        with mp.workdps(cfg.prec.work_dps):
            with open(args.density_profile, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["x", "sigma"])
                for k in range(1, 200):
                    x = sol.a + (sol.b - sol.a) * k / to_mpf(200)
                    writer.writerow([render(x), render(density(sol, x))])


if __name__ == "__main__":
    sys.exit(main())

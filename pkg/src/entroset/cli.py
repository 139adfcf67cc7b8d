"""Command-line entry point: verification suites, scans, reductions, families.

Subcommands
-----------

* ``verify-all``  run every check group and write one JSON report per check
* ``reduce``      reduce a distribution file to its two-point form
* ``scan``        run one named inequality scan
* ``family``      set-family tools: check, closure, enumerate, entropy

Exit codes: 0 all checks passed, 1 a mathematical check failed, 2 usage or
parse error, 3 a precondition on user data was violated.

Reports land under ``<out>/<subcommand>/<name>-<seed>.json`` with CSV
siblings sharing the stem, and are byte-stable for fixed seed and flags;
wall-clock timestamps live only in the ``*.manifest.json`` files.  All
files are written atomically (temp file, then rename).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path

from .distribution import (
    DistributionError,
    load_distribution,
    dump_distribution,
    reduce_support,
)
from .kernel import FREQUENCY_BOUND, DomainError
from .report import (
    PreconditionError,
    ScanConfig,
    ScanReport,
    report_csv_header,
    report_csv_row,
    report_to_json,
)
from . import scans as _scans
from . import setfamily as _sf

__all__ = ["main", "build_parser"]

DEFAULT_SEED = 42
DEFAULT_OUT = "reports"

#: verify-all sample budgets by check, used when --samples is absent.
_VERIFY_SAMPLES = {
    "merge-properties": 100_000,
    "union-bound": 1_000_000,
    "product-bound": 1_000_000,
    "bridge-gap": 10_000,
    "subset-entropy": 100_000,
    "reduction": 1_000,
    "optimum-search": 200_000,
    "threshold": 10_000,
}

_GROUPS = ("kernel", "distribution", "scans", "setfamily")


# ----------------------------------------------------------------------
# plumbing
# ----------------------------------------------------------------------

def _utc(ts: float) -> str:
    return datetime.fromtimestamp(ts, timezone.utc).isoformat(timespec="seconds")


def _json_text(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _csv_text(rows: list[list[str]]) -> str:
    return "".join(",".join(row) + "\n" for row in rows)


def _report_dir(args, subcommand: str) -> Path:
    return Path(args.out) / subcommand


def _write_report_json(args, subcommand: str, stem: str, doc: dict) -> Path:
    path = _report_dir(args, subcommand) / f"{stem}-{args.seed}.json"
    _write_atomic(path, _json_text(doc))
    return path


def _write_manifest(
    args, subcommand: str, stem: str, started: float, report_path: Path
) -> None:
    params = {
        k: v for k, v in sorted(vars(args).items())
        if k not in ("func", "out") and v is not None and not callable(v)
    }
    manifest = {
        "subcommand": subcommand,
        "parameters": params,
        "seed": args.seed,
        "started": _utc(started),
        "finished": _utc(time.time()),
        "report_path": str(report_path),
    }
    path = _report_dir(args, subcommand) / f"{stem}-{args.seed}.manifest.json"
    _write_atomic(path, _json_text(manifest))


def _print_report_line(r: ScanReport) -> None:
    verdict = "PASS" if r.passed else "FAIL"
    print(
        f"[{verdict}] {r.name}: min_margin={r.min_margin:.6e} "
        f"points={r.points_checked} tolerance={r.tolerance:g}"
    )


# ----------------------------------------------------------------------
# verify-all
# ----------------------------------------------------------------------

def _samples_for(args, check: str) -> int:
    if args.samples is not None:
        if check == "reduction":
            return min(args.samples, 10_000)
        return args.samples
    return _VERIFY_SAMPLES.get(check, 100_000)


def _grid_cfg(args, name: str) -> ScanConfig:
    cfg = _scans.DEFAULT_CONFIGS[name]
    kw: dict = {"seed": args.seed}
    if args.step is not None:
        kw["grid_step"] = args.step
    if args.tol is not None:
        kw["tolerance"] = args.tol
    return replace(cfg, **kw)


def _random_cfg(args, name: str, default_tol: float) -> ScanConfig:
    base = _scans.DEFAULT_CONFIGS.get(
        name, ScanConfig(random_samples=100_000, seed=DEFAULT_SEED, tolerance=default_tol)
    )
    return replace(
        base,
        seed=args.seed,
        random_samples=_samples_for(args, name),
        tolerance=args.tol if args.tol is not None else default_tol,
    )


def _verify_checks(args) -> list[tuple[str, str]]:
    """(group, check-name) pairs selected by --only."""
    plan = [
        ("kernel", "kernel-roundtrip"),
        ("kernel", "golden-anchor"),
        ("distribution", "merge-properties"),
        ("distribution", "reduction"),
        ("distribution", "optimum-search"),
        ("scans", "sq-ratio"),
        ("scans", "sq-ratio-scaled"),
        ("scans", "rate-convexity"),
        ("scans", "tail-rate"),
        ("scans", "union-bound"),
        ("scans", "product-bound"),
        ("scans", "bridge-gap"),
        ("scans", "threshold"),
        ("setfamily", "subset-entropy"),
        ("setfamily", "family-sweep"),
        ("setfamily", "entropy-bridge"),
    ]
    if args.only is None:
        return plan
    return [(g, n) for g, n in plan if g == args.only]


def _run_check(args, name: str) -> ScanReport:
    tol = args.tol
    if name == "kernel-roundtrip":
        if tol is not None:
            return _scans.kernel_roundtrip_scan(x_tol=tol, rate_tol=tol)
        return _scans.kernel_roundtrip_scan()
    if name == "golden-anchor":
        if tol is not None:
            return _scans.golden_anchor_check(identity_tol=tol, margin_tol=tol)
        return _scans.golden_anchor_check()
    if name == "merge-properties":
        return _scans.merge_property_scan(_random_cfg(args, name, 1e-9))
    if name == "reduction":
        return _scans.reduction_consistency_scan(_random_cfg(args, name, 0.0))
    if name == "optimum-search":
        return _scans.optimum_search_scan(_random_cfg(args, name, 0.0))
    if name in ("sq-ratio", "sq-ratio-scaled", "rate-convexity", "tail-rate"):
        return _scans.run_named_scan(name, _grid_cfg(args, name), alpha=args.alpha)
    if name in ("union-bound", "product-bound"):
        return _scans.run_named_scan(name, _random_cfg(args, name, 1e-9))
    if name == "bridge-gap":
        bound = tol if tol is not None else _scans.BRIDGE_TOL
        return _scans.bridge_gap_scan(
            samples=_samples_for(args, name), seed=args.seed, bound=bound
        )
    if name == "threshold":
        return _scans.threshold_exploration(_random_cfg(args, name, 1e-9))
    if name == "subset-entropy":
        return _sf.subset_entropy_scan(_random_cfg(args, name, 1e-9))
    if name == "family-sweep":
        return _sf.family_sweep_scan(4)
    if name == "entropy-bridge":
        return _sf.uniform_bridge_scan(3)
    raise ValueError(f"unknown check {name!r}")


def cmd_verify_all(args) -> int:
    started = time.time()
    checks = _verify_checks(args)
    if not checks:
        print(f"error: no checks selected by --only {args.only}", file=sys.stderr)
        return 2
    reports = []
    for _, name in checks:
        r = _run_check(args, name)
        reports.append(r)
        _print_report_line(r)
        _write_report_json(args, "verify-all", r.name, report_to_json(r))
    passed = sum(1 for r in reports if r.passed)
    print(f"{passed}/{len(reports)} checks passed")
    if args.format == "csv":
        rows = [report_csv_header()] + [report_csv_row(r) for r in reports]
        _write_atomic(
            _report_dir(args, "verify-all") / f"all-{args.seed}.csv", _csv_text(rows)
        )
    _write_manifest(args, "verify-all", "all", started, _report_dir(args, "verify-all"))
    return 0 if passed == len(reports) else 1


# ----------------------------------------------------------------------
# reduce
# ----------------------------------------------------------------------

def cmd_reduce(args) -> int:
    started = time.time()
    d = load_distribution(args.input)
    reduced = reduce_support(d)
    dump_distribution(reduced, args.output)
    t = d.mean()
    u = d.expected_entropy()
    nz = reduced.nonzero_atoms()
    q, v = nz[0] if nz else (0.0, 0.0)
    sidecar = {
        "t": t,
        "u": u,
        "v": v,
        "q": q,
        "zero_mass": reduced.zero_mass(),
        "mean_residual": abs(reduced.mean() - t),
        "entropy_residual": abs(reduced.expected_entropy() - u),
        "atoms_in": len(d.atoms),
        "atoms_out": len(reduced.atoms),
    }
    sidecar_path = Path(str(args.output) + ".json")
    _write_atomic(sidecar_path, _json_text(sidecar))
    print(
        f"reduced {sidecar['atoms_in']} atoms -> {sidecar['atoms_out']} "
        f"(q={q!r}, v={v!r}); residuals mean={sidecar['mean_residual']:.3e} "
        f"entropy={sidecar['entropy_residual']:.3e}"
    )
    stem = Path(str(args.output)).stem or "reduce"
    _write_manifest(args, "reduce", stem, started, sidecar_path)
    return 0


# ----------------------------------------------------------------------
# scan
# ----------------------------------------------------------------------

def _parse_beta_band(text: str) -> tuple[float, float, float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(
            f"expected lo:hi:step, got {text!r}"
        )
    try:
        lo, hi, step = (float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"non-numeric band in {text!r}")
    if not (0.0 < lo < hi < 1.0 and step > 0.0):
        raise argparse.ArgumentTypeError(
            f"band must satisfy 0 < lo < hi < 1 and step > 0, got {text!r}"
        )
    return lo, hi, step


def cmd_scan(args) -> int:
    started = time.time()
    name = args.name
    cfg = _scans.DEFAULT_CONFIGS[name]
    kw: dict = {"seed": args.seed}
    if args.step is not None:
        kw["grid_step"] = args.step
    if args.samples is not None:
        kw["random_samples"] = args.samples
    if args.tol is not None:
        kw["tolerance"] = args.tol
    if name == "threshold" and args.beta is not None:
        lo, hi, step = args.beta
        kw.update(range_lo=lo, range_hi=hi, grid_step=step)
    cfg = replace(cfg, **kw)
    report = _scans.run_named_scan(name, cfg, alpha=args.alpha)
    _print_report_line(report)
    report_path = _write_report_json(args, "scan", name, report_to_json(report))
    if name == "threshold":
        rows = [["beta", "min_margin", "points", "above_golden"]]
        for row in (report.details or {}).get("rows", []):
            rows.append([
                repr(row["beta"]),
                repr(row["min_margin"]),
                str(row["points"]),
                "1" if row["above_golden"] else "0",
            ])
        _write_atomic(
            _report_dir(args, "scan") / f"{name}-{args.seed}.csv", _csv_text(rows)
        )
    elif args.format == "csv":
        rows = [report_csv_header(), report_csv_row(report)]
        _write_atomic(
            _report_dir(args, "scan") / f"{name}-{args.seed}.csv", _csv_text(rows)
        )
    _write_manifest(args, "scan", name, started, report_path)
    if name == "threshold":
        return 0
    return 0 if report.passed else 1


# ----------------------------------------------------------------------
# family
# ----------------------------------------------------------------------

def _family_doc(f: _sf.SetFamily) -> dict:
    return {
        "ground_n": f.ground_n,
        "size": len(f.members),
        "members": [list(_sf.indices_from_mask(m)) for m in f.members],
    }


def cmd_family_check(args) -> int:
    started = time.time()
    fam = _sf.load_family(args.file)
    margin = _sf.frequency_bound_margin(fam)
    prof = _sf.frequency_profile(fam)
    doc = _family_doc(fam)
    doc.update({
        "action": "check",
        "frequencies": list(prof.frequencies),
        "counts": list(prof.counts),
        "max_frequency": prof.max_frequency,
        "max_frequency_num": max(prof.counts),
        "max_frequency_den": prof.family_size,
        "argmax_element": prof.argmax_element,
        "bound": FREQUENCY_BOUND,
        "margin": margin,
        "meets_bound_exact": _sf.counts_meet_bound(max(prof.counts), prof.family_size),
    })
    print(
        f"family of {doc['size']} sets over {fam.ground_n} elements: "
        f"max_frequency={doc['max_frequency_num']}/{doc['max_frequency_den']} "
        f"margin={margin:.6f}"
    )
    path = _write_report_json(args, "family", "check", doc)
    _write_manifest(args, "family", "check", started, path)
    return 0 if margin >= 0.0 else 1


def cmd_family_closure(args) -> int:
    started = time.time()
    fam = _sf.load_family(args.file)
    closed = _sf.union_closure(fam.members, fam.ground_n)
    text = _sf.family_text(closed)
    if args.output:
        _write_atomic(Path(args.output), text)
        print(f"closure: {len(fam.members)} -> {len(closed.members)} sets, wrote {args.output}")
    else:
        sys.stdout.write(text)
    doc = _family_doc(closed)
    doc.update({
        "action": "closure",
        "input_size": len(fam.members),
        "union_closed": True,
    })
    path = _write_report_json(args, "family", "closure", doc)
    _write_manifest(args, "family", "closure", started, path)
    return 0


def cmd_family_enumerate(args) -> int:
    started = time.time()
    rows = _sf.family_census(args.n)
    worst = min(rows, key=lambda r: r["margin"])
    stem = f"enumerate-n{args.n}"
    csv_path = _report_dir(args, "family") / f"{stem}-{args.seed}.csv"
    _write_atomic(csv_path, _csv_text(_sf.census_csv_rows(rows)))
    doc = {
        "action": "enumerate",
        "ground_n": args.n,
        "families": len(rows),
        "min_margin": worst["margin"],
        "min_max_frequency": [worst["max_frequency_num"], worst["max_frequency_den"]],
        "worst_family_id": worst["family_id"],
        "exact_bound_holds": all(r["meets_bound"] for r in rows),
        "half_bound_holds": all(r["meets_half"] for r in rows),
        "csv": str(csv_path),
    }
    print(
        f"enumerated {doc['families']} union-closed families on [{args.n}]: "
        f"min max_frequency={worst['max_frequency_num']}/{worst['max_frequency_den']} "
        f"(margin {worst['margin']:.6f})"
    )
    path = _write_report_json(args, "family", stem, doc)
    _write_manifest(args, "family", stem, started, path)
    return 0 if doc["exact_bound_holds"] else 1


def cmd_family_entropy(args) -> int:
    started = time.time()
    fam = _sf.load_family(args.file)
    d = _sf.SubsetDistribution.uniform_on(fam)
    ud = _sf.union_distribution(d)
    h_in = d.entropy()
    h_un = ud.entropy()
    worst = max(d.marginals(), default=0.0)
    closed = fam.is_union_closed()
    margin = None
    if 0.0 < worst <= FREQUENCY_BOUND + 1e-15:
        margin = _sf.union_entropy_margin(d, worst)
    doc = _family_doc(fam)
    doc.update({
        "action": "entropy",
        "h_single": h_in,
        "h_union": h_un,
        "max_marginal": worst,
        "margin_at_max_marginal": margin,
        "union_closed": closed,
        "uniform_gap": (h_in - h_un) if closed else None,
    })
    print(f"H(A)={h_in!r}  H(A|B union)={h_un!r}  max marginal={worst!r}")
    if margin is not None:
        print(f"union entropy margin at alpha={worst!r}: {margin!r}")
    else:
        print(f"max marginal {worst!r} above {FREQUENCY_BOUND}; no level to check")
    path = _write_report_json(args, "family", "entropy", doc)
    _write_manifest(args, "family", "entropy", started, path)
    return 0


# ----------------------------------------------------------------------
# parser
# ----------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="RNG seed (default 42)")
    p.add_argument("--out", default=DEFAULT_OUT, help="report directory (default reports/)")
    p.add_argument("--format", choices=("json", "csv"), default="json",
                   help="report format; JSON is always written")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entroset",
        description="Verification toolkit for binary-entropy inequalities "
                    "and union-closed set families.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    va = sub.add_parser("verify-all", help="run every check group")
    _add_common(va)
    va.add_argument("--only", choices=_GROUPS, default=None,
                    help="restrict to one check group")
    va.add_argument("--samples", type=int, default=None,
                    help="override randomized sample budgets "
                         "(default: 1e6 for the two expectation scans, "
                         "1e5 elsewhere, 1e3 reductions)")
    va.add_argument("--step", type=float, default=None,
                    help="override grid step for the curve scans")
    va.add_argument("--tol", type=float, default=None,
                    help="override every margin tolerance and residual bound")
    va.add_argument("--alpha", type=float, default=0.5,
                    help="rescaling level for the convexity scan (default 0.5)")
    va.set_defaults(func=cmd_verify_all)

    rd = sub.add_parser("reduce", help="reduce a distribution file")
    _add_common(rd)
    rd.add_argument("input", help="distribution file: 'weight value' per line")
    rd.add_argument("output", help="path for the reduced distribution")
    rd.set_defaults(func=cmd_reduce)

    sc = sub.add_parser("scan", help="run one named inequality scan")
    _add_common(sc)
    sc.add_argument("name", choices=_scans.SCAN_NAMES, help="scan to run")
    sc.add_argument("--step", type=float, default=None, help="grid step override")
    sc.add_argument("--samples", type=int, default=None, help="random sample override")
    sc.add_argument("--tol", type=float, default=None, help="margin tolerance override")
    sc.add_argument("--alpha", type=float, default=0.5,
                    help="rescaling level for rate-convexity (default 0.5)")
    sc.add_argument("--beta", type=_parse_beta_band, default=None, metavar="LO:HI:STEP",
                    help="threshold band for the threshold scan")
    sc.set_defaults(func=cmd_scan)

    fa = sub.add_parser("family", help="set-family tools")
    fsub = fa.add_subparsers(dest="action", required=True)

    fc = fsub.add_parser("check", help="frequency profile and bound margin")
    _add_common(fc)
    fc.add_argument("file", help="family file (n=<ground_n>, one set per line)")
    fc.set_defaults(func=cmd_family_check)

    fl = fsub.add_parser("closure", help="union closure of a family")
    _add_common(fl)
    fl.add_argument("file", help="family file")
    fl.add_argument("output", nargs="?", default=None,
                    help="write the closed family here (default: stdout)")
    fl.set_defaults(func=cmd_family_closure)

    fe = fsub.add_parser("enumerate", help="exhaustive census of closed families")
    _add_common(fe)
    fe.add_argument("--n", type=int, default=4,
                    help="ground set size, at most 4 (default 4)")
    fe.set_defaults(func=cmd_family_enumerate)

    fh = fsub.add_parser("entropy", help="uniform-distribution entropy comparison")
    _add_common(fh)
    fh.add_argument("file", help="family file")
    fh.set_defaults(func=cmd_family_entropy)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except PreconditionError as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return 3
    except (DistributionError, _sf.SetFamilyError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

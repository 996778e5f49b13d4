"""Command-line runner for every verification.

Subcommands
-----------
tables          exact contact-sphere tables
contact-points  contact points and local areas of a surface spec
mc              Monte Carlo experiments, appended as JSON lines
check           a single acceptance check by name
check-all       the full acceptance suite

Exit codes: 0 pass, 2 exact-math failure, 3 geometric degeneracy,
4 statistical failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
import time
import warnings
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from . import checks
from . import contact_local as cl
from . import crofton_flat as cf
from . import grassmann_mc as gm
from . import sphere_contact as sc
from .checks import DEGENERACY, EXACT, INFO, STATISTICAL, Record
from .errors import ConsistencyError, ContactValError, DegeneracyError
from .surfaces import parse_surface

EXIT_OK = 0
EXIT_EXACT = 2
EXIT_DEGENERATE = 3
EXIT_STATISTICAL = 4
_EXIT_BY_CATEGORY = {EXACT: EXIT_EXACT, DEGENERACY: EXIT_DEGENERATE, STATISTICAL: EXIT_STATISTICAL}


# ---------------------------------------------------------------------------
# report plumbing
# ---------------------------------------------------------------------------

def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def blob_sha1(data: bytes) -> str:
    """Git blob hash: ``sha1(b"blob <len>\\0" + data)``."""
    return hashlib.sha1(b"blob %d\0" % len(data) + data).hexdigest()


def build_report(command: str, config: dict, records: Sequence[Record], wall_time: float) -> dict:
    body = {
        "command": command,
        "config": config,
        "input_hash": blob_sha1(canonical_json({"command": command, "config": config,
                                                "version": __version__}).encode()),
        "records": [r.to_dict() for r in records],
    }
    return {"body": body,
            "meta": {"wall_time_seconds": wall_time,
                     "body_hash": blob_sha1(canonical_json(body).encode())}}


def body_hash(records: Sequence[Record]) -> str:
    return blob_sha1(canonical_json([r.to_dict() for r in records]).encode())


def exit_code(records: Sequence[Record]) -> int:
    """Most severe failing category: exact, then degeneracy, then statistical."""
    failed = {r.category for r in records if not r.passed and r.category != INFO}
    for cat in (EXACT, DEGENERACY, STATISTICAL):
        if cat in failed:
            return _EXIT_BY_CATEGORY[cat]
    return EXIT_OK


def records_csv(records: Sequence[Record]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["name", "category", "passed", "expected", "observed", "tolerance", "provenance"])
    for r in records:
        d = r.to_dict()
        w.writerow([d["name"], d["category"], d["passed"], canonical_json(d["expected"]),
                    canonical_json(d["observed"]), canonical_json(d["tolerance"]), d["provenance"]])
    return buf.getvalue()


def write_report(report: dict, records: Sequence[Record], out: Optional[str], fmt: str,
                 append: bool = False) -> None:
    if fmt == "csv":
        text = records_csv(records)
    elif append:
        text = canonical_json(report) + "\n"
    else:
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if out is None:
        return
    if out == "-":
        sys.stdout.write(text)
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    if append and path.exists() and fmt == "csv":
        text = text.split("\n", 1)[1]
    with path.open("a" if append else "w", encoding="utf-8") as fh:
        fh.write(text)


def _figure_path(out: Optional[str], suffix: str) -> Optional[Path]:
    if out is None or out == "-":
        return None
    p = Path(out)
    p.parent.mkdir(parents=True, exist_ok=True)
    return p.with_name(f"{p.stem}_{suffix}.png")


def _say(args, text: str = "") -> None:
    if args.out != "-":
        print(text)


def _summary(args, records: Sequence[Record]) -> None:
    for r in records:
        _say(args, f"{'PASS' if r.passed else 'FAIL'}  {r.name}  [{r.category}]")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _config(args, **extra) -> dict:
    cfg = {"seed": args.seed, "samples": args.samples, "n": args.n, "k": args.k,
           "s": args.s, "variant": args.variant}
    cfg.update(extra)
    return cfg


def _print_table(args, title, table):
    _say(args, title)
    for k, row in enumerate(table):
        _say(args, f"  k={k}: " + "  ".join(f"{x:>8}" for x in row))


def cmd_tables(args) -> tuple[list[Record], dict]:
    n = 2 if args.n is None else args.n
    t0 = time.perf_counter()
    records = []
    phi = sc.phi_table(n)
    psi = sc.psi_table(n, args.variant)
    try:
        c = sc.crofton_coefficients(n, args.variant)
        consistent = True
    except ConsistencyError:
        c = sc.crofton_coefficients_solve(n, args.variant)
        consistent = False
    runtime_ok = time.perf_counter() - t0 < 1.0
    _print_table(args, "phi[k][m] = phi_2k(S^2m)", sc.as_strings(phi))
    _print_table(args, f"psi[k][m] ({args.variant})", sc.as_strings(psi))
    _print_table(args, f"c[k][j] ({args.variant})", sc.as_strings(c))
    prov = "contact sphere: psi_2k = sum_j c_kj phi_2j"
    records.append(Record("c_matrix_paths_agree", EXACT, consistent, "solve == closed form",
                          consistent, "exact", prov))
    records.append(Record("psi_equals_c_phi", EXACT, sc.psi_from_c_phi(c, phi) == psi,
                          sc.as_strings(psi), sc.as_strings(sc.psi_from_c_phi(c, phi)), "exact", prov))
    records.append(Record("binomial_inverse", EXACT, sc.binomial_inverse_holds(n), "identity",
                          sc.binomial_inverse_holds(n), "exact",
                          "Euler secant numbers invert C(2m,2j)"))
    records.append(Record("tables_runtime", INFO, runtime_ok, "< 1 s", runtime_ok, 1.0, prov))
    return records, _config(args, n=n)


def cmd_contact_points(args) -> tuple[list[Record], dict]:
    surf = parse_surface(args.surface)
    n = surf.n
    ks = args.k_list or list(range(0, 2 * n + 1))
    records = []
    totals = {k: 0.0 for k in ks}
    index_sum = 0
    point_reports = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", cl.NewtonDivergenceWarning)
        for chart in surf.charts:
            try:
                pts = cl.find_contact_points(chart, grid_per_axis=args.grid)
                reps = [cl.contact_point_report(chart, p) for p in pts]
            except DegeneracyError as exc:
                pt = None if exc.point is None else [float(v) for v in exc.point]
                _say(args, f"degenerate tangency on {chart.name}: {pt}")
                records.append(Record("degenerate_tangency", DEGENERACY, False, "det dB != 0",
                                      {"chart": chart.name, "point": pt}, cl.DEGENERACY_TOL,
                                      "normal transversality at contact points"))
                return records, _config(args, surface=args.surface, k_list=ks)
            for rep in reps:
                d = rep.to_dict()
                point_reports.append(d)
                index_sum += rep.index
                for k in ks:
                    totals[k] += rep.local_areas[k]
                _say(args, f"{chart.name}: p={[round(v, 10) for v in d['p']]} index={rep.index:+d} "
                     + " ".join(f"phi_{k}={rep.local_areas[k]:.12g}" for k in ks))
    for w in caught:
        _say(args, f"warning: {w.message}")
    for k in ks:
        _say(args, f"phi_{k}(F) = {totals[k]:.12g}")
    _say(args, f"index sum = {index_sum}")
    records.append(Record("valuations", INFO, True, None, {str(k): v for k, v in totals.items()},
                          None, "summation of local areas over contact points",
                          details={"points": point_reports}))
    if surf.closed and surf.euler_characteristic is not None:
        records.append(Record("euler_index_sum", EXACT, index_sum == surf.euler_characteristic,
                              surf.euler_characteristic, index_sum, "exact integer",
                              "contact index sum equals the Euler characteristic"))
    if "phi2_closed_form" in surf.notes and 2 in ks:
        R = float(args.surface.split()[1])
        printed = 8.0 / (1.0 + 0.25 / R**2)
        records.append(Record("sphere_phi2_printed", EXACT, abs(totals[2] - printed) <= 1e-8,
                              printed, totals[2], 1e-8,
                              "contact R^3 example: phi_2 of the radius-R sphere",
                              details={"derived_closed_form": surf.notes["phi2_closed_form"]}))
    return records, _config(args, surface=args.surface, k_list=ks, grid=args.grid)


MC_EXPERIMENTS = ("simplex", "moment", "crofton")


def cmd_mc(args) -> tuple[list[Record], dict]:
    n = 2 if args.n is None else args.n
    k = 1 if args.k is None else args.k
    N = args.samples or 100_000
    s_values = args.s or [0.0, 1.0, 2.0]
    exps = MC_EXPERIMENTS if args.experiment == "all" else (args.experiment,)
    records = []
    for exp in exps:
        if exp == "simplex":
            rec = checks.check_uniform_simplex(args.seed, N, ((n, k),), args.workers)
            rec.name = "uniform_simplex"
            records.append(rec)
            fig = _figure_path(args.out, f"cosines_{n}_{k}")
            if fig and args.figures:
                from .figures import cosine_histogram_figure
                cosine_histogram_figure(n, k, args.seed, fig)
        elif exp == "moment":
            res = gm.moment_adjudication(n, k, s_values, N, args.seed, args.workers)
            # strict conclusiveness belongs to the acceptance check; here any consistent verdict passes
            passed = res["mass_gate"] is not False and "neither" not in res["verdicts"].values()
            records.append(Record("moment_adjudication", STATISTICAL, bool(passed),
                                  {"mass_gate": True, "conclusive": True},
                                  {"mass_gate": res["mass_gate"], "verdicts": res["verdicts"]},
                                  "3 SE", "moment law for |sigma_omega|^s", details=res))
            fig = _figure_path(args.out, f"moments_{n}_{k}")
            if fig and args.figures:
                from .figures import moment_figure
                moment_figure(res, fig)
        else:
            res = cf.symplectic_crofton_constant(n, k, N, args.seed, s_values,
                                                 args.variant, args.workers)
            ratio = res["ratio_law"]
            passed = res["exponent_error"] < 0.05 and (ratio is None or ratio["ok"])
            records.append(Record("crofton_law", STATISTICAL, bool(passed),
                                  {"exponent": res["kappa"], "ratio": ratio and ratio["expected"]},
                                  {"exponent": res["fitted_exponent"], "ratio": ratio and ratio["ratio"],
                                   "verdict": res["verdict"]},
                                  {"exponent_error": 0.05, "ratio": "3 SE"},
                                  "symplectic Crofton formula", details=res))
            fig = _figure_path(args.out, f"crofton_{n}_{k}")
            if fig and args.figures:
                from .figures import crofton_law_figure
                crofton_law_figure(res, fig)
        _say(args, f"{exp}: {'PASS' if records[-1].passed else 'FAIL'}")
    return records, _config(args, n=n, k=k, samples=N, s=s_values, experiment=args.experiment)


def cmd_check(args) -> tuple[list[Record], dict]:
    rec = checks.run_check(args.name, args.seed, args.workers)
    return [rec], _config(args, check=args.name)


def run_check_all(seed: int = checks.DEFAULT_SEED, workers: int = 1) -> tuple[list[Record], float]:
    """Run criteria 1 to 11 twice and append the determinism record."""
    t0 = time.perf_counter()
    first = checks.run_suite(seed, workers)
    elapsed_first = time.perf_counter() - t0
    second = checks.run_suite(seed, workers)
    records = first + [checks.determinism_record(body_hash(first), body_hash(second), elapsed_first)]
    return records, time.perf_counter() - t0


def cmd_check_all(args) -> tuple[list[Record], dict]:
    records, _ = run_check_all(args.seed, args.workers)
    if args.figures:
        by_name = {r.name: r for r in records}
        fig = _figure_path(args.out, "crofton")
        if fig:
            from .figures import cosine_histogram_figure, crofton_law_figure, moment_figure
            crofton_law_figure(by_name["c09_symplectic_crofton"].details, fig)
            moment_figure(by_name["c08_moment_adjudication"].details, _figure_path(args.out, "moments"))
            for n, k in checks.SIMPLEX_CASES:
                cosine_histogram_figure(n, k, args.seed, _figure_path(args.out, f"cosines_{n}_{k}"))
    return records, {"seed": args.seed}


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

VARIANT_ALIASES = {"paper": "kappa-factorial"}


def _variant(text: str) -> str:
    name = VARIANT_ALIASES.get(text, text)
    if name not in sc.VARIANTS:
        raise argparse.ArgumentTypeError(f"choose from {sorted(set(sc.VARIANTS) | set(VARIANT_ALIASES))}")
    return name


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=checks.DEFAULT_SEED,
                   help=f"Monte Carlo seed (default {checks.DEFAULT_SEED})")
    p.add_argument("--samples", type=int, default=None, help="Monte Carlo sample count")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--s", type=float, action="append", default=None,
                   help="moment exponent; repeat for several")
    p.add_argument("--out", default=None, help="report path, or '-' for stdout")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--variant", type=_variant, default="kappa-factorial",
                   help="kappa-factorial (alias: paper) or mass-normalized")
    p.add_argument("--workers", type=int, default=1, help="threads for Monte Carlo chunks")
    p.add_argument("--no-figures", dest="figures", action="store_false",
                   help="skip PNG figures next to the report")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="contactval", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tables", help="exact contact-sphere tables")
    _common(p)
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("contact-points", help="contact points of a surface spec")
    p.add_argument("surface", help="surface spec string or JSON file")
    p.add_argument("--degree", dest="k_list", type=int, action="append", default=None,
                   help="local-area degree k; repeat for several (default all)")
    p.add_argument("--grid", type=int, default=41, help="seed grid points per axis")
    _common(p)
    p.set_defaults(func=cmd_contact_points)

    p = sub.add_parser("mc", help="Monte Carlo experiments (JSON-lines append)")
    p.add_argument("--experiment", choices=MC_EXPERIMENTS + ("all",), default="all")
    _common(p)
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("check", help="one acceptance check")
    p.add_argument("name", choices=list(checks.CHECKS))
    _common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("check-all", help="full acceptance suite")
    _common(p)
    p.set_defaults(func=cmd_check_all)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        records, config = args.func(args)
    except ContactValError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE if isinstance(exc, DegeneracyError) else EXIT_EXACT
    report = build_report(args.command, config, records, time.perf_counter() - t0)
    _summary(args, records)
    write_report(report, records, args.out, args.format, append=args.command == "mc")
    code = exit_code(records)
    _say(args, f"exit code {code}")
    return code


if __name__ == "__main__":
    sys.exit(main())

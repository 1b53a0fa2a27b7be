"""Command-line front end: ``solve``, ``table`` and ``verify``.

JSON output carries every float as its shortest round-trip decimal, so values
survive a write/read cycle bit for bit.  CSV and plain-table output print 12
significant digits.

Exit codes: 0 success, 1 numerical failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from .closed_forms import closed_form_for
from .errors import KGError, NotConfining
from .potential import PotentialPair, RadialPotential, format_potential, make_effective, parse_potential
from .shooting import find_bound_state
from .slet import Branch, QuantumNumbers, solve_state
from .tables import golden_rows, make_pair, parse_bounds

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2
MODES = ("slet", "closed-form", "oracle", "all")
FORMATS = ("json", "csv", "table")
TABLE_HEADER = ["A1", "k", "E0", "E0_plus_E2", "E_full", "ref_lo", "ref_hi", "abs_dev"]
DEFAULT_TOL = 1e-8
SLET_ORACLE_RTOL = 2e-3
GOLDEN_UNITS = 5


class UsageError(Exception):
    pass


def _g(x):
    return "" if x is None else f"{x:.12g}"


def _error_record(exc):
    return {"error": exc.kind, "stage": exc.stage, "message": exc.args[0] if exc.args else ""}


# -- scenario handling ------------------------------------------------------------

def _potential(value):
    if value is None:
        return RadialPotential()
    if isinstance(value, str):
        return parse_potential(value)
    # list of [coefficient, exponent] pairs
    return RadialPotential.from_pairs((float(c), float(p)) for c, p in value)


def load_scenario(path):
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read scenario {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("scenario must be a JSON object")
    return data


def _states(spec):
    states = spec.get("states")
    if states is None:
        states = [[spec.get("nr", 0), spec.get("l", 0)]]
    if not states:
        raise UsageError("scenario needs at least one [n_r, l] entry in 'states'")
    try:
        return [QuantumNumbers.coerce(s) for s in states]
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad quantum numbers: {exc}") from exc


def _problem(spec):
    try:
        return PotentialPair(float(spec.get("mass", 1.0)), _potential(spec.get("vector")),
                             _potential(spec.get("scalar")))
    except KGError:
        raise
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def _merge(args, scenario, keys):
    """Flag values override scenario values; scenario fills whatever flags left unset."""
    out = dict(scenario or {})
    for key in keys:
        val = getattr(args, key, None)
        if val is not None:
            out[key] = val
    return out


# -- solve --------------------------------------------------------------------------

def _run_methods(pair, qn, branch, mode):
    eff = make_effective(pair)
    rec = {"n_r": qn.n_r, "l": qn.l, "branch": branch.label}
    failed = False
    if mode in ("slet", "all"):
        try:
            rec["slet"] = solve_state(eff, qn, branch).to_dict()
        except KGError as exc:
            rec["slet"], failed = _error_record(exc), True
    if mode in ("closed-form", "all"):
        try:
            cf = closed_form_for(eff, qn.n_r, qn.l, branch)
        except KGError as exc:
            rec["closed_form"], failed = _error_record(exc), True
        else:
            if cf is None:
                rec["closed_form"] = None
                failed = failed or mode == "closed-form"
                if mode == "closed-form":
                    rec["closed_form"] = {"error": "NoClosedForm", "stage": "closed_form",
                                          "message": "only pure r^-1 vector/scalar mixtures have closed forms"}
            else:
                rec["closed_form"] = cf.to_dict()
    if mode in ("oracle", "all"):
        try:
            rec["oracle"] = find_bound_state(eff, qn, branch=branch).to_dict()
        except NotConfining as exc:
            rec["oracle"] = {"skipped": True, **_error_record(exc)}
            failed = failed or mode == "oracle"
        except KGError as exc:
            rec["oracle"], failed = _error_record(exc), True
    return rec, failed


def _solve_rows(records):
    for rec in records:
        for method in ("slet", "closed_form", "oracle"):
            if method not in rec:
                continue
            res = rec[method]
            row = {"n_r": rec["n_r"], "l": rec["l"], "branch": rec["branch"], "method": method}
            if res is None:
                row["status"] = "n/a"
            elif "error" in res:
                row["status"] = ("SKIPPED " if res.get("skipped") else "") + res["error"]
            else:
                row["status"] = "ok"
                row["energy"] = res["energy"]
                if method == "slet":
                    row["E0"], row["E0_plus_E2"], row["E_full"] = res["partial_sums"]
            yield row


def cmd_solve(args):
    scenario = load_scenario(args.scenario) if args.scenario else {}
    spec = _merge(args, scenario, ("mass", "vector", "scalar", "nr", "l", "branch", "mode", "format"))
    if args.nr is not None or args.l is not None:
        spec["states"] = [[spec.get("nr", 0), spec.get("l", 0)]]
    pair = _problem(spec)
    states = _states(spec)
    branch = Branch.parse(spec.get("branch", "particle"))
    mode = spec.get("mode", "slet")
    fmt = spec.get("format", "json")
    if mode not in MODES or fmt not in FORMATS:
        raise UsageError(f"mode must be one of {MODES} and format one of {FORMATS}")

    records, failed = [], False
    for qn in states:
        rec, bad = _run_methods(pair, qn, branch, mode)
        records.append(rec)
        failed = failed or bad

    if fmt == "json":
        text = json.dumps({"problem": {"mass": pair.mass, "vector": format_potential(pair.vector),
                                       "scalar": format_potential(pair.scalar)},
                           "mode": mode, "results": records}, indent=2)
    else:
        cols = ["n_r", "l", "branch", "method", "status", "energy", "E0", "E0_plus_E2", "E_full"]
        rows = [[r.get(c) if c in ("n_r", "l", "branch", "method", "status") else _g(r.get(c))
                 for c in cols] for r in _solve_rows(records)]
        text = _csv(cols, rows) if fmt == "csv" else _plain(cols, rows)
    _emit(text, args.out)
    for rec in records:
        for method in ("slet", "closed_form", "oracle"):
            res = rec.get(method)
            if res and "error" in res and not res.get("skipped"):
                print(f"error: {res['error']} at stage {res['stage']}: {res['message']}", file=sys.stderr)
    return EXIT_NUMERIC if failed else EXIT_OK


# -- table ----------------------------------------------------------------------------

def _table_jobs(args):
    if args.scenario:
        sc = load_scenario(args.scenario)
        family = sc.get("family", "vector-linear")
        mass = float(sc.get("mass", 1.0))
        qn = _states(sc)[0]
        jobs = []
        for row in sc.get("rows", []):
            A1, k = float(row[0]), float(row[1])
            ref = parse_bounds(str(row[2])) if len(row) > 2 else None
            jobs.append({"A1": A1, "k": k, "pair": make_pair(family, A1, k, mass), "qn": qn,
                         "ref": ref, "printed": None})
        if not jobs:
            raise UsageError("table scenario needs a non-empty 'rows' list of [A1, k] entries")
        return jobs
    if args.table is None:
        raise UsageError("give a table id (1-4) or --scenario")
    try:
        rows = golden_rows(args.table)
    except KeyError as exc:
        raise UsageError(str(exc)) from exc
    return [{"A1": r.A1, "k": r.k, "pair": r.pair(), "qn": QuantumNumbers(0, 0),
             "ref": r.ref_bounds, "printed": r.printed} for r in rows]


def _table_row(job):
    out = {"A1": job["A1"], "k": job["k"]}
    try:
        sol = solve_state(job["pair"], job["qn"])
    except KGError as exc:
        out.update(_error_record(exc))
        return out
    out["E0"], out["E0_plus_E2"], out["E_full"] = sol.partial_sums
    if job["ref"] is not None:
        lo, hi = job["ref"]
        e = sol.energy
        out["ref_lo"], out["ref_hi"] = lo, hi
        out["abs_dev"] = max(lo - e, e - hi, 0.0)
    if job["printed"] is not None:
        out["printed"] = list(job["printed"])
    return out


def _printed_digits(value, printed):
    decimals = len(printed.split(".")[1]) if "." in printed else 0
    return f"{value:.{decimals}f}"


def cmd_table(args):
    jobs = _table_jobs(args)
    with ThreadPoolExecutor(max_workers=args.workers) as pool:
        rows = list(pool.map(_table_row, jobs))  # map keeps input order
    failed = any("error" in r for r in rows)
    for r in rows:
        if "error" in r:
            print(f"error: row A1={r['A1']!r} k={r['k']!r}: {r['error']} at stage {r['stage']}: "
                  f"{r['message']}", file=sys.stderr)
    if args.format == "json":
        text = json.dumps({"table": args.table, "rows": rows}, indent=2)
    elif args.format == "csv":
        text = _csv(TABLE_HEADER, [[_g(r.get(c)) for c in TABLE_HEADER] for r in rows])
    else:
        cols = TABLE_HEADER + ["printed_digits", "printed"]
        body = []
        for r in rows:
            line = [_g(r.get(c)) for c in TABLE_HEADER]
            if "printed" in r and "E0" in r:
                comp = [_printed_digits(r[c], p) for c, p in zip(("E0", "E0_plus_E2", "E_full"), r["printed"])]
                line += [" ".join(comp), " ".join(r["printed"])]
            else:
                line += [r.get("error", ""), ""]
            body.append(line)
        text = _plain(cols, body)
    _emit(text, args.out)
    return EXIT_NUMERIC if failed else EXIT_OK


# -- verify ---------------------------------------------------------------------------

def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def verify_problem(pair, qn, branch=Branch.PARTICLE, *, tol=DEFAULT_TOL, ref=None, golden=None,
                   label=""):
    """Compare the three solvers on one state and grade every available pairing."""
    eff = make_effective(pair)
    report = {"label": label, "n_r": qn.n_r, "l": qn.l, "branch": branch.label, "checks": []}
    energies = {}
    for name, fn in (("slet", lambda: solve_state(eff, qn, branch).energy),
                     ("closed_form", lambda: closed_form_for(eff, qn.n_r, qn.l, branch)),
                     ("oracle", lambda: find_bound_state(eff, qn, branch=branch).energy)):
        try:
            val = fn()
        except NotConfining as exc:
            report[name] = {"status": "SKIPPED", "reason": f"{exc.kind}: {exc}"}
            continue
        except KGError as exc:
            report[name] = {"status": "FAIL", **_error_record(exc)}
            continue
        if name == "closed_form":
            if val is None:
                report[name] = {"status": "SKIPPED", "reason": "no closed form for this potential"}
                continue
            val = val.energy
        energies[name] = val
        report[name] = {"status": "ok", "energy": val}

    def check(name, status, **info):
        report["checks"].append({"check": name, "status": status, **info})

    cf = energies.get("closed_form")
    for name in ("slet", "oracle"):
        if cf is not None and name in energies:
            dev = _rel(energies[name], cf)
            check(f"{name}_vs_closed_form", "PASS" if dev <= tol else "FAIL", rel_dev=dev, tol=tol)
    if cf is None and "slet" in energies and "oracle" in energies:
        gap = 0.0 if ref is None else (ref[1] - ref[0]) / abs(energies["oracle"])
        allowed = max(SLET_ORACLE_RTOL, gap)
        dev = _rel(energies["slet"], energies["oracle"])
        check("slet_vs_oracle", "PASS" if dev <= allowed else "FAIL", rel_dev=dev, tol=allowed)
    if ref is not None:
        for name in ("oracle", "slet"):
            if name in energies:
                lo, hi = ref
                dev = max(lo - energies[name], energies[name] - hi, 0.0)
                # disagreement with the tabulated reference bounds is informative only
                check(f"{name}_in_reference_bounds", "PASS" if dev == 0.0 else "INFORMATIONAL",
                      abs_dev=dev, bounds=[lo, hi])
    if golden is not None and "slet" in energies:
        value, unit = golden
        dev = abs(energies["slet"] - value)
        check("slet_vs_printed", "PASS" if dev <= GOLDEN_UNITS * unit else "FAIL",
              abs_dev=dev, tol=GOLDEN_UNITS * unit)
    statuses = [c["status"] for c in report["checks"]]
    statuses += [report[n]["status"] for n in ("slet", "closed_form", "oracle")]
    report["status"] = "FAIL" if "FAIL" in statuses else "PASS"
    return report


def _verify_jobs(args):
    branch_flag = args.branch
    if args.table is not None:
        try:
            rows = golden_rows(args.table)
        except KeyError as exc:
            raise UsageError(str(exc)) from exc
        return [dict(pair=r.pair(), qn=QuantumNumbers(0, 0), branch=Branch.PARTICLE,
                     ref=r.rounded_bounds(), golden=(r.values[2], r.units[2]),
                     label=f"table {r.table} A1={r.A1:g} k={r.k:g}") for r in rows]
    scenario = load_scenario(args.scenario) if args.scenario else {}
    problems = scenario.get("problems") or [scenario]
    jobs = []
    for i, spec in enumerate(problems):
        spec = _merge(args, spec, ("mass", "vector", "scalar", "nr", "l"))
        if args.nr is not None or args.l is not None:
            spec["states"] = [[spec.get("nr", 0), spec.get("l", 0)]]
        if not any(k in spec for k in ("vector", "scalar")):
            raise UsageError("verify needs --vector/--scalar, --table or a --scenario")
        pair = _problem(spec)
        branch = Branch.parse(branch_flag or spec.get("branch", "particle"))
        ref = spec.get("ref")
        ref = parse_bounds(ref) if isinstance(ref, str) else (tuple(ref) if ref else None)
        golden = tuple(spec["golden"]) if spec.get("golden") else None
        for qn in _states(spec):
            jobs.append(dict(pair=pair, qn=qn, branch=branch, ref=ref, golden=golden,
                             label=spec.get("label", f"problem {i}")))
    return jobs


def cmd_verify(args):
    jobs = _verify_jobs(args)
    tol = args.tol
    with ThreadPoolExecutor(max_workers=args.workers) as pool:
        reports = list(pool.map(lambda j: verify_problem(tol=tol, **j), jobs))
    if args.format == "json":
        text = json.dumps({"tol": tol, "reports": reports}, indent=2)
    else:
        cols = ["label", "n_r", "l", "slet", "closed_form", "oracle", "check", "status", "deviation"]
        body = []
        for rep in reports:
            names = [_g(rep[n].get("energy")) or rep[n]["status"] for n in ("slet", "closed_form", "oracle")]
            for c in rep["checks"] or [{"check": "", "status": rep["status"]}]:
                dev = c.get("rel_dev", c.get("abs_dev"))
                body.append([rep["label"], rep["n_r"], rep["l"], *names, c["check"], c["status"], _g(dev)])
        text = _csv(cols, body) if args.format == "csv" else _plain(cols, body)
    _emit(text, args.out)
    return EXIT_NUMERIC if any(r["status"] == "FAIL" for r in reports) else EXIT_OK


# -- output ---------------------------------------------------------------------------

def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _plain(header, rows):
    cells = [list(map(str, header))] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells) + "\n"


def _emit(text, out):
    if not text.endswith("\n"):
        text += "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="")
    else:
        sys.stdout.write(text)


# -- parser ---------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="kgslet",
        description="Klein-Gordon bound-state energies by the shifted-l expansion, "
                    "exact Coulomb forms and a Numerov oracle.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def problem_flags(p):
        p.add_argument("--mass", type=float, default=None)
        p.add_argument("--vector", default=None, metavar="EXPR", help='e.g. "-0.2/r + 0.05r"')
        p.add_argument("--scalar", default=None, metavar="EXPR")
        p.add_argument("--nr", type=int, default=None)
        p.add_argument("--l", type=int, default=None)
        p.add_argument("--branch", choices=["particle", "antiparticle"], default=None)
        p.add_argument("--scenario", default=None, metavar="JSON")
        p.add_argument("--out", default=None, metavar="PATH")

    solve = sub.add_parser("solve", help="Energy of one or more states.")
    problem_flags(solve)
    solve.add_argument("--mode", choices=MODES, default=None)
    solve.add_argument("--format", choices=FORMATS, default=None)
    solve.set_defaults(func=cmd_solve)

    table = sub.add_parser("table", help="Reproduce a ground-state table.")
    table.add_argument("table", nargs="?", type=int, help="table id 1-4")
    table.add_argument("--scenario", default=None, metavar="JSON")
    table.add_argument("--format", choices=FORMATS, default="csv")
    table.add_argument("--out", default=None, metavar="PATH")
    table.add_argument("--workers", type=int, default=4)
    table.set_defaults(func=cmd_table)

    verify = sub.add_parser("verify", help="Cross-check SLET, closed forms and the oracle.")
    problem_flags(verify)
    verify.add_argument("--table", type=int, default=None, help="verify a golden table 1-4")
    verify.add_argument("--tol", type=float, default=DEFAULT_TOL,
                        help="relative agreement required against closed forms")
    verify.add_argument("--format", choices=FORMATS, default="table")
    verify.add_argument("--workers", type=int, default=4)
    verify.set_defaults(func=cmd_verify)
    return parser


def _join_expressions(argv):
    # argparse takes "-0.2/r" for an option; bind expression values explicitly
    out, it = [], iter(argv)
    for tok in it:
        if tok in ("--vector", "--scalar"):
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None):
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_join_expressions(argv))
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except KGError as exc:
        print(f"error: {exc.kind} at stage {exc.stage}: {_error_record(exc)['message']}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        parser.error(str(exc))


if __name__ == "__main__":
    sys.exit(main())

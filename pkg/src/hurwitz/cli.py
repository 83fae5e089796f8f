"""Command-line driver.

Subcommands: group-info, orbits, hilbert, koszul, h1, stability, fit.  Every
run prints a short human-readable summary to stdout and writes CSV/JSON data
files into --outdir.  Exit codes: 0 success, 2 invalid input, 3 infeasible
size, 4 failed assertion, 5 inconclusive window.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from .action import HurwitzAction, write_orbit_csv
from .errors import (
    FitError,
    InconclusiveError,
    InfeasibleSizeError,
    InvalidInputError,
)
from .files import load_group_file, resolve_element, resolve_Q
from .groups import conjugacy_classes, is_large, k_invariant

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_INFEASIBLE = 3
EXIT_ASSERTION = 4
EXIT_INCONCLUSIVE = 5


class AssertionFailed(Exception):
    """A verified property did not hold; maps to exit code 4."""


def _parse_fields(s):
    out = []
    for part in s.split(","):
        part = part.strip().lower()
        if part == "q":
            out.append(0)
        elif part.startswith("f") and part[1:].isdigit():
            out.append(int(part[1:]))
        else:
            raise InvalidInputError(f"bad field tag {part!r} (use q, f2, f3, ...)")
    return tuple(out)


def _parse_range(s):
    try:
        lo, hi = s.split(":")
        lo, hi = int(lo), int(hi)
    except ValueError:
        raise InvalidInputError(f"bad range {s!r} (use lo:hi)") from None
    if lo < 0 or hi < lo:
        raise InvalidInputError(f"bad range {s!r}")
    return lo, hi


def _setup(args):
    G, data = load_group_file(args.group)
    Q = resolve_Q(G, data, args.q)
    act = HurwitzAction(G, Q, state_cap=args.state_cap)
    omega = None
    if getattr(args, "omega", None) is not None:
        omega = resolve_element(G, data, args.omega)
    return G, data, Q, act, omega


def _outpath(args, name):
    os.makedirs(args.outdir, exist_ok=True)
    return os.path.join(args.outdir, name)


def _write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


# ---------------------------------------------------------------------------
# subcommands


def cmd_group_info(args):
    G, data, Q, act, omega = _setup(args)
    classes = conjugacy_classes(G)
    print(f"group order {G.order}, |Q| = m = {Q.m}, ell = {Q.ell}")
    print(f"k(G,Q) = {k_invariant(G, Q)}")
    print("Q members:", " ".join(G.label(a) for a in Q.members))
    qclasses = [c for c in classes if c[0] in set(Q.members)]
    print(f"conjugacy classes meeting Q: {len(qclasses)}")
    for c in qclasses:
        print(f"  class of {G.label(c[0])} (size {len(c)})")
    if omega is not None:
        print(f"omega = {G.label(omega)}")
        print(f"k(G,Q,omega) = {k_invariant(G, Q, omega=omega)}")
        print(f"is_large = {is_large(G, Q, omega)}")
    return EXIT_OK


def cmd_orbits(args):
    G, data, Q, act, omega = _setup(args)
    table = act.enumerate_components(args.weight, omega=omega)
    path = _outpath(args, "orbits.csv")
    write_orbit_csv(path, act, [table])
    print(
        f"weight {args.weight}: {table.orbit_count()} orbits, "
        f"{table.total_size()} tuples -> {path}"
    )
    return EXIT_OK


def cmd_hilbert(args):
    from .rings import degree_bound_report, write_dims_csv
    from .rings import GradedDimSeries  # noqa: F401  (re-export sanity)

    G, data, Q, act, omega = _setup(args)
    report = degree_bound_report(
        act, omega, args.max_weight, tail_start=args.tail_start
    )
    path = _outpath(args, "degree_report.json")
    _write_json(path, report)
    for tag, entry in report["series"].items():
        deg = entry.get("degree", None)
        err = entry.get("fit_error")
        print(f"{tag}: dims {entry['dims']}" + (f" [fit error: {err}]" if err else f", degree {deg}"))
    for name, verdict in report["assertions"].items():
        print(f"{name}: {verdict}")
    print(f"report -> {path}")
    if not report["ok"]:
        if any("fit_error" in e for e in report["series"].values()):
            raise InconclusiveError("some series could not be fitted on this window")
        raise AssertionFailed("a degree-bound assertion failed")
    return EXIT_OK


def cmd_koszul(args):
    from .koszul import (
        TwistedBimoduleA,
        build_KA,
        homotopy_check,
        koszul_homology,
        right_action_on_homology_is_trivial,
        vanishing_scan,
    )

    G, data, Q, act, omega = _setup(args)
    bimod = TwistedBimoduleA(act, args.max_weight)
    axiom_violations = bimod.verify_axioms()
    complexes = build_KA(bimod)
    d2_ok = all(cx.verify_d2() for cx in complexes.values())
    homotopy_violations = []
    for a in range(act.m):
        homotopy_violations.extend(homotopy_check(bimod, a)["violations"])
    scan = vanishing_scan(bimod, degrees=tuple(args.degrees))
    report = {
        "max_weight": args.max_weight,
        "twist_axioms_ok": not axiom_violations,
        "d_squared_zero": d2_ok,
        "homotopy_identity_ok": not homotopy_violations,
        "vanishing": scan,
        "homology": {},
    }
    for w, cx in sorted(complexes.items()):
        report["homology"][str(w)] = {
            str(p): str(koszul_homology(cx, p, coeff="Z"))
            for p in range(-1, min(w, 3))
        }
    path = _outpath(args, "koszul_report.json")
    _write_json(path, report)
    print(f"twist axioms: {'ok' if not axiom_violations else 'VIOLATED'}")
    print(f"d^2 = 0: {'ok' if d2_ok else 'VIOLATED'}")
    print(f"homotopy identity: {'ok' if not homotopy_violations else 'VIOLATED'}")
    for d, entry in scan["degrees"].items():
        print(f"degree {d}: last nonvanishing weight {entry['last_nonvanishing_weight']}")
    print(f"report -> {path}")
    if axiom_violations or not d2_ok or homotopy_violations:
        raise AssertionFailed("a chain-level identity failed")
    if not scan["ok"]:
        raise InconclusiveError(
            "homology has not vanished by the window cap; raise --max-weight"
        )
    return EXIT_OK


def cmd_h1(args):
    from .presentations import h1_of_component, write_h1_csv

    G, data, Q, act, omega = _setup(args)
    table = act.enumerate_components(args.weight, omega=omega)
    rows = []
    for orb in table.orbits:
        ab = h1_of_component(act, orb.canonical, letter_cap=args.letter_cap)
        rows.append((args.weight, orb, ab))
        print(
            f"component {act.labels_of(orb.canonical)} (size {orb.size}): "
            f"H1 = {ab}"
        )
    path = _outpath(args, "h1.csv")
    write_h1_csv(path, act, rows)
    print(f"{len(rows)} components -> {path}")
    return EXIT_OK


def cmd_stability(args):
    from .stability import stability_report

    G, data, Q, act, omega = _setup(args)
    if omega is None:
        raise InvalidInputError("stability requires --omega")
    report = stability_report(
        act, omega, fields=_parse_fields(args.fields), window=_parse_range(args.range)
    )
    path = _outpath(args, "stability_report.json")
    _write_json(path, report)
    failed_betti = False
    for key, entry in report["results"].items():
        print(
            f"{key}: agreement threshold {entry['agreement_threshold']}, "
            f"isomorphism threshold {entry['isomorphism_threshold']}"
        )
        if entry.get("betti_constant_per_residue") is False:
            failed_betti = True
    print(f"report -> {path}")
    if failed_betti:
        raise AssertionFailed("Betti numbers not constant per residue beyond threshold")
    if not report["ok"]:
        raise InconclusiveError("no stabilization threshold inside the window")
    return EXIT_OK


def cmd_fit(args):
    from .rings import (
        dim_series_A,
        dim_series_B,
        dim_series_Bomega,
        dim_series_C,
        fit_quasipolynomial,
    )

    G, data, Q, act, omega = _setup(args)
    tag = args.ring
    if tag == "A":
        series = dim_series_A(act, args.max_weight)
    elif tag == "A1":
        series = dim_series_A(act, args.max_weight, omega=G.identity, tag="A1")
    elif tag == "B":
        series = dim_series_B(act, args.max_weight)
    elif tag == "C":
        series = dim_series_C(act, args.max_weight)
    elif tag == "Bomega":
        if omega is None:
            raise InvalidInputError("ring Bomega requires --omega")
        series = dim_series_Bomega(act, args.max_weight, omega)
    else:
        raise InvalidInputError(f"unknown ring tag {tag!r}")
    tail = args.tail_start if args.tail_start is not None else args.max_weight // 2
    qp = fit_quasipolynomial(series, tail)
    out = {
        "ring_tag": tag,
        "dims": series.values(),
        "tail_start": tail,
        "period": qp.period,
        "degree": None if qp.degree == -math.inf else qp.degree,
        "coefficients": qp.coeff_strings(),
    }
    path = _outpath(args, "fit.json")
    _write_json(path, out)
    print(f"{tag}: dims {series.values()}")
    print(f"degree {out['degree']}, period {qp.period}, coefficients {qp.coeff_strings()}")
    print(f"report -> {path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser and dispatch


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hurwitz",
        description="Braid orbits, graded component rings, and exact homology "
        "of their classifying spaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, omega=True):
        p.add_argument("group", help="group file path or bundled name (z2, s3, s4, s5, d3, d5)")
        p.add_argument("--q", required=True, help="conjugation-invariant subset selector")
        if omega:
            p.add_argument("--omega", default=None, help="element selector")
        p.add_argument("--state-cap", type=int, default=10**8, help="orbit state cap")
        p.add_argument("--outdir", default=".", help="directory for data files")
        p.add_argument(
            "--jobs",
            type=int,
            default=None,
            help="worker-pool bound (computations currently run on one core)",
        )

    p = sub.add_parser("group-info", help="invariants of (G, Q) and omega")
    common(p)
    p.set_defaults(func=cmd_group_info)

    p = sub.add_parser("orbits", help="enumerate braid orbits at one weight")
    common(p)
    p.add_argument("-n", "--weight", type=int, required=True)
    p.set_defaults(func=cmd_orbits)

    p = sub.add_parser("hilbert", help="graded dimension series and degree bounds")
    common(p)
    p.add_argument("--max-weight", type=int, default=10)
    p.add_argument("--tail-start", type=int, default=None)
    p.set_defaults(func=cmd_hilbert)

    p = sub.add_parser("koszul", help="chain-level identities and vanishing scan")
    common(p)
    p.add_argument("--max-weight", type=int, default=6)
    p.add_argument("--degrees", type=int, nargs="+", default=[-1, 0, 1, 2])
    p.set_defaults(func=cmd_koszul)

    p = sub.add_parser("h1", help="integral H1 of every component at one weight")
    common(p)
    p.add_argument("-n", "--weight", type=int, required=True)
    p.add_argument("--letter-cap", type=int, default=2_000_000)
    p.set_defaults(func=cmd_h1)

    p = sub.add_parser("stability", help="stabilization report over a weight window")
    common(p)
    p.add_argument("--range", default="2:9", help="weight window lo:hi")
    p.add_argument("--fields", default="q,f2,f3", help="comma list: q, f2, f3, ...")
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("fit", help="quasi-polynomial fit of one dimension series")
    common(p)
    p.add_argument("--ring", required=True, help="A, A1, B, Bomega, or C")
    p.add_argument("--max-weight", type=int, default=10)
    p.add_argument("--tail-start", type=int, default=None)
    p.set_defaults(func=cmd_fit)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvalidInputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except InfeasibleSizeError as e:
        print(f"infeasible: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except AssertionFailed as e:
        print(f"assertion failed: {e}", file=sys.stderr)
        return EXIT_ASSERTION
    except (FitError, InconclusiveError) as e:
        print(f"inconclusive: {e}", file=sys.stderr)
        return EXIT_INCONCLUSIVE


if __name__ == "__main__":
    sys.exit(main())

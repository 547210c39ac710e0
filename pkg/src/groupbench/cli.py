"""Command-line orchestration: construct, verify, measure.

Reports go to stdout in a stable line format (or JSON with --json);
diagnostics and wall time go to stderr.  Exit codes: 0 all checks pass or
conditional, 1 some check failed, 2 usage error, 3 construction or
resource failure.
"""

from __future__ import annotations

import argparse
import random
import sys
import time
from fractions import Fraction

from . import groupfile
from .crbuild import (
    CRWitness,
    build_g1,
    build_g2,
    build_pi,
    build_toy_g2,
    check_params,
    relation_check,
    smallest_params,
    toy_witness,
    verify_pi,
)
from .gf2 import ClosureCapExceeded
from .groups import CapExceededError, Element, G2Group, associativity_report
from .measure import (
    CoverReport,
    ProductTruncation,
    build_witness_cbar,
    parse_profile,
    slalom_cover_bounds,
    tail_cover_measure,
    validate_profile,
)
from .reports import CONDITIONAL, FAIL, PASS, SKIPPED, CheckRecord, RunReport, mask_str
from .verify import (
    check_b_partition,
    check_cr_axioms,
    check_equation_star,
    count_x_naive,
    count_x_structured,
    crucial_witness,
    find_partition_istar,
    popcount,
)

DEFAULT_SEED = 12345

TOY_PRESETS = {
    "toy64": (2, 2),
    "toy512": (3, 3),
    "toy4096": (4, 4),
}


def _parse_mask(text: str) -> int:
    text = text.strip()
    if not text or text == "{}":
        return 0
    mask = 0
    for part in text.strip("{}").split(","):
        mask |= 1 << int(part)
    return mask


def _load_g2(spec: str) -> G2Group:
    if spec in TOY_PRESETS:
        n, dim = TOY_PRESETS[spec]
        return build_toy_g2(n, dim)
    if spec.startswith("n="):
        fields = dict(part.split("=", 1) for part in spec.split(","))
        return build_toy_g2(int(fields["n"]), int(fields.get("dim", fields["n"])))
    obj = groupfile.load(spec)
    if not isinstance(obj, G2Group):
        raise ValueError(f"{spec} does not describe a normal-form group")
    return obj


def _emit(report: RunReport, args) -> int:
    sys.stdout.write(report.render_json() if args.json else report.render_text())
    return report.exit_code()


# ---------------------------------------------------------------------------
# construct
# ---------------------------------------------------------------------------


def cmd_construct(args) -> int:
    report = RunReport(f"construct {args.what}", seed=args.seed)
    if args.what == "params":
        found = smallest_params(args.n_max)
        report.inputs = {"n_max": args.n_max}
        report.check("admissible-found", bool(found), {"count": len(found)})
        report.value("triples", [f"({p.k},{p.m},{p.n})" for p in found])
        if found:
            report.value("minimal", f"({found[0].k},{found[0].m},{found[0].n})")
        return _emit(report, args)
    if args.what == "pi":
        istar = _parse_mask(args.istar)
        pi = build_pi(args.n, istar, seed=args.seed)
        rep = verify_pi(pi, args.n, istar)
        report.inputs = {"n": args.n, "istar": mask_str(istar)}
        report.check(
            "pi-verified", rep.ok, {"violations": len(rep.violations)}
        )
        report.value("rows", [f"0x{r:x}" for r in pi.rows])
        return _emit(report, args)
    if args.what == "g1":
        report.inputs = {"n": args.n, "m": args.m, "closure_cap": args.closure_cap}
        witness = build_g1(args.n, args.m, cap=args.closure_cap, seed=args.seed)
        report.check("closure-within-cap", True, {"h_size": witness.group.h_size()})
        report.value("group_size", witness.group.size())
        if args.out:
            groupfile.save(witness, args.out)
            report.value("out", args.out)
        return _emit(report, args)
    if args.what == "g2":
        dim = args.toy_g1_dim if args.toy_g1_dim else args.n
        g2 = build_toy_g2(args.n, dim)
        report.inputs = {"n": args.n, "toy_g1_dim": dim}
        report.value("group_size", g2.size())
        if args.out:
            groupfile.save(g2, args.out)
            report.value("out", args.out)
        return _emit(report, args)
    raise ValueError(f"unknown construct target {args.what!r}")


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _witness_from_args(args) -> CRWitness:
    if args.g1:
        obj = groupfile.load(args.g1, closure_cap=args.closure_cap)
        if not isinstance(obj, CRWitness):
            raise ValueError(f"{args.g1} does not describe a stage-1 witness")
        return obj
    if args.toy_dim:
        return toy_witness(args.n, args.toy_dim)
    return build_g1(args.n, args.m, cap=args.closure_cap, seed=args.seed)


def cmd_verify(args) -> int:
    if args.what == "cr-axioms":
        report = check_cr_axioms(_witness_from_args(args))
    elif args.what == "relations":
        g2 = _load_g2(args.g2)
        report = relation_check(g2)
        assoc = associativity_report(g2, seed=args.seed)
        report.check(
            "associativity",
            assoc["failures"] == 0,
            {"method": assoc["method"], "checked": assoc["checked"]},
        )
    elif args.what == "star":
        g2 = _load_g2(args.g2)
        report = check_equation_star(
            g2, _parse_mask(args.istar), samples=args.samples, seed=args.seed
        )
    elif args.what == "partition":
        g2 = _load_g2(args.g2)
        rng = random.Random(args.seed)
        payloads = list(g2.iter_payloads())
        failures = 0
        for _ in range(args.samples):
            xs = [Element(g2, rng.choice(payloads)) for _ in range(args.k)]
            istar = find_partition_istar(g2, xs, args.k)
            if popcount(istar) != g2.n >> args.k:
                failures += 1
                continue
            for x in xs:
                inter = g2.u2_of(x) & istar
                if inter not in (0, istar):
                    failures += 1
                    break
        report = RunReport("partition", seed=args.seed)
        report.inputs = {"k": args.k, "samples": args.samples}
        report.check("partition-clauses", failures == 0, {"failures": failures})
    elif args.what == "b-partition":
        g2 = _load_g2(args.g2)
        istar = _parse_mask(args.istar)
        prep = check_b_partition(g2, istar)
        report = RunReport("b-partition")
        report.inputs = {"istar": mask_str(istar), "size": g2.size()}
        report.check(
            "classes-partition",
            prep.covers and prep.equal_sizes,
            {
                "classes": len(prep.sizes),
                "class_size": prep.expected_class_size,
                "anomalies": prep.anomalies,
            },
        )
        rec = CheckRecord(
            "double-commutator-exactness",
            prep.status,
            {"commute_set": prep.commute_set_size},
            hypothesis=prep.hypothesis,
        )
        report.add(rec)
    elif args.what == "count-x":
        g2 = _load_g2(args.g2)
        istar = _parse_mask(args.istar)
        report = RunReport("count-x")
        report.inputs = {"istar": mask_str(istar), "size": g2.size()}
        counts = {}
        if args.method in ("structured", "both"):
            counts["structured"] = count_x_structured(g2, istar)
        if args.method in ("naive", "both"):
            c = g2.y3_set(istar)
            c_star = g2.z_element(istar)
            counts["naive"] = count_x_naive(g2, c, c_star)
        for name, cr in counts.items():
            status = cr.status
            report.add(
                CheckRecord(
                    f"count-{name}",
                    status,
                    {
                        "x": cr.x_count,
                        "x1": cr.x1_count if cr.x1_count is not None else "n/a",
                        "x2": cr.x2_count if cr.x2_count is not None else "n/a",
                        "bound": cr.bound if cr.bound is not None else "n/a",
                    },
                    hypothesis="stage-1-clause-d" if status == CONDITIONAL else None,
                )
            )
        if len(counts) == 2:
            report.check(
                "cross-oracle",
                counts["naive"].x_count == counts["structured"].x_count,
                {
                    "naive": counts["naive"].x_count,
                    "structured": counts["structured"].x_count,
                },
            )
    elif args.what == "crucial":
        g2 = _load_g2(args.g2)
        rng = random.Random(args.seed)
        payloads = list(g2.iter_payloads())
        if args.xs:
            xs = [Element(g2, g2.payload_from_str(s)) for s in args.xs.split("|")]
        else:
            xs = [Element(g2, rng.choice(payloads)) for _ in range(args.k)]
        _, report = crucial_witness(g2, xs)
        report.seed = args.seed
    else:
        raise ValueError(f"unknown verify target {args.what!r}")
    return _emit(report, args)


# ---------------------------------------------------------------------------
# measure
# ---------------------------------------------------------------------------


def _parse_ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip() != ""]


def cmd_measure(args) -> int:
    if args.what == "tail":
        tr = tail_cover_measure(
            _parse_ints(args.mstarstar), _parse_ints(args.mstar), args.from_level
        )
        report = RunReport("measure tail")
        report.inputs = {
            "mstar": args.mstar,
            "mstarstar": args.mstarstar,
            "from": args.from_level,
        }
        report.check("within-union-bound", tr.measure <= tr.bound, {})
        report.value("measure", tr.measure)
        report.value("bound", tr.bound)
    elif args.what == "cover":
        cover = slalom_cover_bounds(_parse_ints(args.sizes), _parse_ints(args.widths))
        report = RunReport("measure cover")
        report.inputs = {"sizes": args.sizes, "widths": args.widths}
        report.check("bounds-ordered", cover.lower <= cover.upper, {})
        report.value("lower", cover.lower)
        report.value("upper", cover.upper)
        report.value("exact", cover.exact if cover.exact is not None else "unknown")
    elif args.what == "cylinder":
        sizes = _parse_ints(args.level_sizes)
        picked = _parse_ints(args.b_sizes)
        if len(sizes) != len(picked) or any(
            not 0 <= b <= s for b, s in zip(picked, sizes)
        ):
            raise ValueError("per-level subset sizes must fit inside the levels")
        value = Fraction(1)
        for b, s in zip(picked, sizes):
            value *= Fraction(b, s)
        report = RunReport("measure cylinder")
        report.inputs = {"level_sizes": args.level_sizes, "b_sizes": args.b_sizes}
        report.value("measure", value)
    elif args.what == "profile":
        text = open(args.file, "r", encoding="utf-8").read()
        profile = parse_profile(text)
        ratio = Fraction(args.ratio) if args.ratio else None
        report = validate_profile(profile, ratio=ratio)
        report.inputs["file"] = args.file
    elif args.what == "witness":
        levels = [_load_g2(spec) for spec in args.levels.split(",")]
        truncation = ProductTruncation.create(levels)
        nu = []
        for level, idxs in zip(levels, args.nu.split(";")):
            payloads = list(level.iter_payloads())
            nu.append([Element(level, payloads[i]) for i in _parse_ints(idxs)])
        _, report = build_witness_cbar(truncation, nu)
        report.inputs = {"levels": args.levels, "nu": args.nu}
    else:
        raise ValueError(f"unknown measure target {args.what!r}")
    return _emit(report, args)


# ---------------------------------------------------------------------------
# wiring
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="groupbench",
        description="Finite-group construction and verification workbench.",
    )
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    parser.add_argument("--json", action="store_true", help="emit JSON reports")
    parser.add_argument("--jobs", type=int, default=1, help="worker cap for counting")
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="build groups and parameters")
    cs = c.add_subparsers(dest="what", required=True)
    p = cs.add_parser("params")
    p.add_argument("--n-max", type=int, required=True)
    p = cs.add_parser("pi")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--istar", type=str, required=True)
    p = cs.add_parser("g1")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--closure-cap", type=int, default=10**6)
    p.add_argument("--out", type=str)
    p = cs.add_parser("g2")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--toy-g1-dim", type=int)
    p.add_argument("--out", type=str)
    c.set_defaults(func=cmd_construct)

    v = sub.add_parser("verify", help="run a lemma verifier")
    vs = v.add_subparsers(dest="what", required=True)
    p = vs.add_parser("cr-axioms")
    p.add_argument("--g1", type=str)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--toy-dim", type=int)
    p.add_argument("--closure-cap", type=int, default=10**6)
    p = vs.add_parser("relations")
    p.add_argument("--g2", type=str, required=True)
    p = vs.add_parser("star")
    p.add_argument("--g2", type=str, required=True)
    p.add_argument("--istar", type=str, required=True)
    p.add_argument("--samples", type=int, default=10**5)
    p = vs.add_parser("partition")
    p.add_argument("--g2", type=str, required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--samples", type=int, default=1000)
    p = vs.add_parser("b-partition")
    p.add_argument("--g2", type=str, required=True)
    p.add_argument("--istar", type=str, required=True)
    p = vs.add_parser("count-x")
    p.add_argument("--g2", type=str, required=True)
    p.add_argument("--istar", type=str, required=True)
    p.add_argument("--method", choices=("naive", "structured", "both"), default="both")
    p = vs.add_parser("crucial")
    p.add_argument("--g2", type=str, required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--xs", type=str, help="explicit elements, | separated")
    v.set_defaults(func=cmd_verify)

    m = sub.add_parser("measure", help="exact measure arithmetic")
    ms = m.add_subparsers(dest="what", required=True)
    p = ms.add_parser("tail")
    p.add_argument("--mstar", type=str, required=True)
    p.add_argument("--mstarstar", type=str, required=True)
    p.add_argument("--from", dest="from_level", type=int, default=0)
    p = ms.add_parser("cover")
    p.add_argument("--sizes", type=str, required=True)
    p.add_argument("--widths", type=str, required=True)
    p = ms.add_parser("cylinder")
    p.add_argument("--level-sizes", type=str, required=True)
    p.add_argument("--b-sizes", type=str, required=True)
    p = ms.add_parser("profile")
    p.add_argument("--file", type=str, required=True)
    p.add_argument("--ratio", type=str, help="sufficient ratio test, e.g. 1/2")
    p = ms.add_parser("witness")
    p.add_argument("--levels", type=str, required=True, help="comma list of g2 specs")
    p.add_argument("--nu", type=str, required=True, help="per level: element indexes")
    m.set_defaults(func=cmd_measure)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.monotonic()
    try:
        code = args.func(args)
    except ClosureCapExceeded as err:
        print(f"construction failed: {err}", file=sys.stderr)
        return 3
    except (CapExceededError, MemoryError) as err:
        print(f"resource failure: {err}", file=sys.stderr)
        return 3
    except (ValueError, KeyError, OSError) as err:
        print(f"construction failed: {err}", file=sys.stderr)
        return 3
    finally:
        elapsed_ms = int((time.monotonic() - start) * 1000)
        print(f"wall-time-ms: {elapsed_ms}", file=sys.stderr)
    return code


if __name__ == "__main__":
    raise SystemExit(main())

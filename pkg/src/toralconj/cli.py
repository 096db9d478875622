"""Command-line surface: bf, screen, tower, ideal, decide.

Matrix files hold either a JSON object {"n": int, "rows": [[...], ...]} or a
whitespace grid of integers (n lines of n entries); both are detected
automatically and parsed exactly.  Reports go to stdout as human text, or as
a structured JSON document with --json whose bytes are deterministic (wall
time is shown only in the human rendering).

Exit codes: 0 decisive result, 2 unknown or partially-unknown result,
1 input or resource error.
"""

import argparse
import json
import sys
import time

from . import exact_linalg as xl
from . import ideal_theory as ideals
from . import polys
from .bf_invariants import BFConstructionError, bf_group, default_family, hyperbolicity_check, strong_bf_screen
from .conjugacy_pipeline import PipelineConfig, decide, similarity_check
from .errors import InputError, ToralConjError
from .tower import build_tower, injectivity_probe, verify_factorization, verify_filtered

Mat = xl.Mat


def parse_matrix_text(text: str, origin: str = "<input>") -> Mat:
    stripped = text.strip()
    if not stripped:
        raise InputError(f"{origin}: empty matrix file")
    if stripped.startswith("{"):
        try:
            obj = json.loads(stripped, parse_float=_reject_float)
        except ValueError as e:
            raise InputError(f"{origin}: bad JSON: {e}") from None
        if not isinstance(obj, dict) or "rows" not in obj:
            raise InputError(f"{origin}: JSON matrix needs a 'rows' field")
        rows = obj["rows"]
        n = obj.get("n", len(rows))
        if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
            raise InputError(f"{origin}: 'rows' must be a list of lists")
        for r in rows:
            for x in r:
                if not isinstance(x, int) or isinstance(x, bool):
                    raise InputError(f"{origin}: non-integer entry {x!r}")
        if len(rows) != n or any(len(r) != n for r in rows):
            raise InputError(f"{origin}: matrix is not {n} x {n}")
        return tuple(tuple(r) for r in rows)
    lines = [ln for ln in stripped.splitlines() if ln.strip()]
    rows = []
    for ln in lines:
        try:
            rows.append(tuple(int(tok) for tok in ln.split()))
        except ValueError:
            raise InputError(f"{origin}: non-integer token in line {ln!r}") from None
    if any(len(r) != len(rows) for r in rows):
        raise InputError(f"{origin}: grid is not square")
    return tuple(rows)


def _reject_float(s: str):
    raise ValueError(f"float literal {s!r} not allowed; entries must be exact integers")


def load_matrix(path: str) -> Mat:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e}") from None
    return parse_matrix_text(text, origin=path)


def parse_poly_arg(text: str) -> polys.Poly:
    try:
        g = polys.parse(text)
    except ValueError as e:
        raise InputError(f"bad polynomial {text!r}: {e}") from None
    if not g:
        raise InputError("zero polynomial is not admissible")
    return g


def _matrix_data(M: Mat) -> dict:
    return {"n": len(M), "rows": [list(r) for r in M]}


def _emit(report: dict, as_json: bool, human_lines: list[str], started: float) -> None:
    if as_json:
        sys.stdout.write(json.dumps(report, indent=2) + "\n")
    else:
        for line in human_lines:
            print(line)
        print(f"elapsed: {time.monotonic() - started:.3f}s")


def cmd_bf(args) -> int:
    started = time.monotonic()
    A = load_matrix(args.matrix)
    g = parse_poly_arg(args.g)
    try:
        group = bf_group(A, g)
    except BFConstructionError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    report = {
        "command": "bf",
        "inputs": {"matrix": _matrix_data(A), "g": polys.to_str(g)},
        "config": {},
        "result": {
            "order": group.order,
            "invariant_factors": list(group.invariant_factors),
        },
        "evidence": [],
    }
    _emit(
        report,
        args.json,
        [
            f"BF_{{{polys.to_str(g)}}} of the {len(A)}x{len(A)} input:",
            f"  order: {group.order}",
            f"  invariant factors: {list(group.invariant_factors)}",
        ],
        started,
    )
    return 0


def cmd_screen(args) -> int:
    started = time.monotonic()
    A = load_matrix(args.matrix_a)
    B = load_matrix(args.matrix_b)
    config = {"family_c": args.family_c, "family_m": args.family_m, "budget": args.budget}
    if not similarity_check(A, B):
        report = {
            "command": "screen",
            "inputs": {"matrix_a": _matrix_data(A), "matrix_b": _matrix_data(B)},
            "config": config,
            "result": {
                "outcome": "not_similar",
                "char_poly_left": polys.to_str(xl.char_poly(A)),
                "char_poly_right": polys.to_str(xl.char_poly(B)),
            },
            "evidence": [],
        }
        _emit(report, args.json, ["not similar: rational canonical data differ"], started)
        return 0
    family = default_family(A, B, max_shift=args.family_c, max_power=args.family_m)
    rep = strong_bf_screen(A, B, family, budget=args.budget)
    report = {
        "command": "screen",
        "inputs": {"matrix_a": _matrix_data(A), "matrix_b": _matrix_data(B)},
        "config": config,
        "result": rep.to_data(),
        "evidence": [],
    }
    lines = [f"screen outcome: {rep.outcome}"]
    if rep.witness is not None:
        lines.append(f"witness polynomial: {polys.to_str(rep.witness)}")
    for rec in rep.records:
        lines.append(
            f"  g={rec['g']}: orders {rec['order_left']}/{rec['order_right']}"
            f" factors {rec['factors_left']}/{rec['factors_right']} iso={rec['iso']['verdict']}"
        )
    _emit(report, args.json, lines, started)
    return 2 if rep.outcome == "partial_unknown" else 0


def cmd_tower(args) -> int:
    started = time.monotonic()
    A = load_matrix(args.matrix)
    if not hyperbolicity_check(A):
        print("error: input is not hyperbolic (an eigenvalue has modulus one)", file=sys.stderr)
        return 1
    tower = build_tower(A, args.levels, cap=max(args.levels, 4))
    levels = [
        {
            "k": lv.k,
            "order": lv.module.order,
            "invariant_factors": list(lv.module.factors),
        }
        for lv in tower.levels
    ]
    result: dict = {"levels": levels}
    lines = ["tower levels:"]
    for lv in levels:
        lines.append(f"  k={lv['k']}: order {lv['order']} factors {lv['invariant_factors']}")
    if args.verify:
        checks: dict = {"nesting_verified": True}
        maxk = min(args.levels - 1, 3)
        checks["factorization"] = {
            str(k): verify_factorization(A, k) for k in range(1, maxk + 1)
        }
        checks["filtered_from_below"] = {
            f"{k1},{k2}": verify_filtered(A, k1, k2)
            for k1, k2 in ((1, 1), (1, 2), (2, 2))
            if k1 + k2 <= args.levels
        }
        probe = injectivity_probe(tower, args.probe_bound)
        checks["injectivity_probe"] = probe
        result["verify"] = checks
        lines.append(f"  factorization identities: {checks['factorization']}")
        lines.append(f"  filtered-from-below: {checks['filtered_from_below']}")
        lines.append(
            f"  injectivity probe (bound {args.probe_bound}): all_escape={probe['all_escape']}"
        )
    report = {
        "command": "tower",
        "inputs": {"matrix": _matrix_data(A)},
        "config": {"levels": args.levels, "verify": bool(args.verify), "probe_bound": args.probe_bound},
        "result": result,
        "evidence": [],
    }
    _emit(report, args.json, lines, started)
    return 0


def cmd_ideal(args) -> int:
    started = time.monotonic()
    A = load_matrix(args.matrix)
    try:
        I, v, nf = ideals.eigen_ideal(A)
    except ToralConjError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    config: dict = {"sub": args.sub}
    result: dict = {"defining_polynomial": polys.to_str(nf.p), "ideal": I.to_data()}
    lines = [f"field: Q(beta), beta root of {polys.to_str(nf.p)}"]
    exit_code = 0
    if args.sub == "show":
        lines.append(f"eigen ideal basis (HNF over den={I.den}): {[list(r) for r in I.mat]}")
        lines.append(f"eigenvector entries: {[c.to_str() for c in v]}")
        result["eigenvector"] = [c.to_str() for c in v]
    elif args.sub == "ring":
        O = ideals.multiplier_ring(I)
        result["multiplier_ring"] = O.to_data()
        full = (O.mat, O.den) == (xl.identity(nf.n), 1)
        result["equals_z_beta"] = full
        lines.append(f"multiplier ring basis: {[list(r) for r in O.mat]} / {O.den}")
        lines.append(f"equals Z[beta]: {full}")
    else:
        B = load_matrix(args.matrix_b)
        inputs_b = _matrix_data(B)
        J, w, _ = ideals.eigen_ideal(B)
        scale = 1
        I2 = I
        while not I2.is_subset(J):
            scale += 1
            I2 = I.scale_int(scale)
        result["ideal_left_scaled"] = I2.to_data()
        result["ideal_right"] = J.to_data()
        if args.sub == "weak-equiv":
            we = ideals.weak_equivalence(I2, J)
            result["weak_equivalence"] = we.to_data()
            lines.append(f"weakly equivalent: {we.equivalent}" + (f" ({we.reason})" if we.reason else ""))
        else:  # principal
            X = ideals.colon_ideal(J, I2)
            pr = ideals.principal_search(X, args.bound)
            result["colon_ideal"] = X.to_data()
            result["principal_search"] = pr.to_data()
            lines.append(
                f"principal search on (J : I) at bound {args.bound}: "
                + ("found " + pr.generator.to_str() if pr.found else "not found within bound")
            )
            config["bound"] = args.bound
    inputs = {"matrix": _matrix_data(A)}
    if args.sub in ("weak-equiv", "principal"):
        inputs["matrix_b"] = inputs_b
    report = {
        "command": "ideal",
        "inputs": inputs,
        "config": config,
        "result": result,
        "evidence": [],
    }
    _emit(report, args.json, lines, started)
    return exit_code


def cmd_decide(args) -> int:
    started = time.monotonic()
    A = load_matrix(args.matrix_a)
    B = load_matrix(args.matrix_b)
    config = PipelineConfig(
        family_max_shift=args.family_c,
        family_max_power=args.family_m,
        iso_budget=args.iso_budget,
        tower_depth=args.tower_depth,
        unimodular_bound=args.search_bound,
        principal_bound=args.principal_bound,
    )
    verdict = decide(A, B, config)
    report = {
        "command": "decide",
        "inputs": {"matrix_a": _matrix_data(A), "matrix_b": _matrix_data(B)},
        "config": config.to_data(),
        "result": verdict.to_data(),
        "evidence": verdict.to_data()["evidence"],
    }
    lines = [f"verdict: {verdict.outcome}"]
    if verdict.certificate is not None:
        lines.append(f"conjugator C (A C = C B, det C = {xl.det(verdict.certificate)}):")
        for row in verdict.certificate:
            lines.append(f"  {list(row)}")
    if verdict.witness is not None:
        lines.append(f"witness: {verdict.witness}")
    _emit(report, args.json, lines, started)
    return 0 if verdict.outcome in ("conjugate", "not_conjugate") else 2


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="toralconj",
        description="Exact conjugacy invariants for hyperbolic integer matrices",
    )
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("bf", help="Bowen-Franks group of a matrix for a polynomial")
    p.add_argument("matrix")
    p.add_argument("g", help="polynomial, e.g. 'x+1' or 'x^3-23x^2+7x-1'")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_bf)

    p = sub.add_parser("screen", help="strong BF-equivalence screen over a finite family")
    p.add_argument("matrix_a")
    p.add_argument("matrix_b")
    p.add_argument("--family-c", type=int, default=5, dest="family_c")
    p.add_argument("--family-m", type=int, default=6, dest="family_m")
    p.add_argument("--budget", type=int, default=100_000)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_screen)

    p = sub.add_parser("tower", help="truncated quotient tower with optional verification")
    p.add_argument("matrix")
    p.add_argument("--levels", type=int, default=2)
    p.add_argument("--verify", action="store_true")
    p.add_argument("--probe-bound", type=int, default=5, dest="probe_bound")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_tower)

    p = sub.add_parser("ideal", help="eigenvector fractional ideal computations")
    p.add_argument("matrix")
    p.add_argument("sub", choices=["show", "ring", "weak-equiv", "principal"])
    p.add_argument("matrix_b", nargs="?", default=None)
    p.add_argument("--bound", type=int, default=8)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_ideal)

    p = sub.add_parser("decide", help="full conjugacy decision pipeline")
    p.add_argument("matrix_a")
    p.add_argument("matrix_b")
    p.add_argument("--family-c", type=int, default=5, dest="family_c")
    p.add_argument("--family-m", type=int, default=6, dest="family_m")
    p.add_argument("--iso-budget", type=int, default=100_000, dest="iso_budget")
    p.add_argument("--tower-depth", type=int, default=4, dest="tower_depth")
    p.add_argument("--search-bound", type=int, default=5, dest="search_bound")
    p.add_argument("--principal-bound", type=int, default=8, dest="principal_bound")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_decide)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.cmd == "ideal" and args.sub in ("weak-equiv", "principal") and not args.matrix_b:
        print("error: this ideal subcommand needs a second matrix file", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except ToralConjError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

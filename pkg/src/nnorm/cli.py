"""Command-line front end.

Every subcommand reads a JSON request (``--input``, default stdin where a
request is needed), writes a JSON report (``--output``, default stdout) and
exits 0 when all checks pass, 1 on a property failure and 2 on a usage or
input error. All randomness derives from ``--seed``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from . import hahn_banach as hb
from . import serialize, ubp
from .core import DeterminantNorm, NNormError, Polynomial, check_axioms, random_tuples
from .functional import (
    BAnchors,
    PreconditionError,
    estimate_norm_sampling,
    exact_norm_determinant,
)
from .rng import DEFAULT_SEED, sub_rng
from .sequences import SequenceSample, check_closed_graph

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return v


def _read_request(args, required: bool = True) -> dict:
    if args.input is None:
        if not required:
            return {}
        if sys.stdin.isatty():
            raise UsageError("an --input JSON file is required")
        text = sys.stdin.read()
    else:
        try:
            with open(args.input) as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read {args.input}: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise UsageError("request must be a JSON object")
    return obj


def _elements(objs) -> list:
    return [serialize.decode_element(o) for o in objs]


# ---------------------------------------------------------------------------
# subcommands; each returns (exit_code, report)


def run_axioms(args) -> tuple[int, dict]:
    req = _read_request(args)
    norm = serialize.decode_norm(req["norm"])
    if "samples" in req:
        samples = [_elements(t) for t in req["samples"]]
    else:
        samples = random_tuples(norm, int(req.get("count", args.budget)), args.seed,
                                float(req.get("dependent_fraction", 0.0)))
    report = check_axioms(norm, samples, tol=args.tol)
    out = {"ok": report.ok, "norm_kind": report.norm_kind, "n_samples": report.n_samples,
           "checks": report.checks, "violations": report.violations}
    return (EXIT_OK if report.ok else EXIT_FAIL), out


def run_norm(args) -> tuple[int, dict]:
    req = _read_request(args)
    T = serialize.decode_functional(req["functional"] if "functional" in req else req)
    sampled = estimate_norm_sampling(T, args.budget, args.seed)
    out = {"functional": T, "sampled_lower": sampled.lower, "witness": sampled.witness,
           "unbounded_evidence": sampled.unbounded, "samples": sampled.samples}
    code = EXIT_OK
    if isinstance(T.space, DeterminantNorm) and not T.anchors.constant:
        exact = exact_norm_determinant(T)
        out.update(exact=exact.exact, certificate=exact.certificate, unbounded=exact.unbounded)
        if exact.exact is not None and sampled.lower > exact.exact * (1 + 1e-6) + args.tol:
            code = EXIT_FAIL
        if exact.unbounded and not sampled.unbounded:
            code = EXIT_FAIL
    return code, out


def default_points(seed: int, count: int = 20, max_degree: int = 10) -> list[Polynomial]:
    rng = sub_rng(seed, "ubp-points")
    pts = []
    for i in range(count):
        deg = i % (max_degree + 1)
        c = np.round(rng.uniform(-5, 5, deg + 1), 3)
        c[-1] = c[-1] if c[-1] != 0 else 1.0
        pts.append(Polynomial(c))
    return pts


def run_ubp_demo(args) -> tuple[int, dict]:
    if args.kmax is None or args.kmax < 1:
        raise UsageError("--kmax must be >= 1")
    req = _read_request(args, required=False)
    b = [float(v) for v in req.get("b_scalars", [1.0])]
    if not b or any(v == 0 for v in b):
        raise UsageError("b_scalars must be nonzero")
    points = _elements(req["points"]) if "points" in req else default_points(args.seed)
    if not 0 <= args.kmin <= args.kmax:
        raise UsageError("--kmin must be between 0 and --kmax")
    fam = ubp.partial_sum_family(args.kmax, b, kmin=args.kmin)
    report = ubp.uniform_bound_refutation(fam, ubp.partial_sum_witness)
    members = []
    ladder_ok = True
    for T, e in zip(fam, report.per_member_norm_lower):
        k = T.action.k
        ok = abs(e.lower - (k + 1)) <= 1e-9
        ladder_ok &= ok
        members.append({"label": T.label, "k": k, "norm_lower": e.lower, "expected": k + 1, "witness": e.witness})
    lowers = [m["norm_lower"] for m in members]
    increasing = bool(np.all(np.diff(lowers) > 0))
    pw = ubp.pointwise_bounds(fam, points)
    pointwise = []
    pw_ok = True
    for i, x in enumerate(points):
        cap = ubp.partial_sum_pointwise_cap(x, b)
        ok = pw.per_point_bounds[i] <= cap + 1e-9 * max(1.0, cap)
        pw_ok &= ok
        pointwise.append({"point": x, "degree": x.degree, "bound": pw.per_point_bounds[i], "cap": cap, "ok": ok})
    verdicts = {"ladder_matches": ladder_ok, "strictly_increasing": increasing,
                "uniform_bound_refuted": report.uniform_bound_refuted, "pointwise_within_cap": pw_ok,
                "pointwise_bounded_evidence": pw.pointwise_bounded_evidence}
    code = EXIT_OK if ladder_ok and increasing and pw_ok else EXIT_FAIL
    return code, {"b_scalars": b, "members": members, "pointwise": pointwise, "verdicts": verdicts}


def run_hb_extend(args) -> tuple[int, dict]:
    req = _read_request(args)
    if "example" in req:
        T_W, W = hb.example_instance(int(req["example"]))
    else:
        T_W = serialize.decode_functional(req["T_W"])
        W = hb.Subspace.from_elements(T_W.anchors, _elements(req["W"]["basis"]))
    mode = req.get("mode")
    if mode is None:
        mode = "one_step" if "x0" in req else "exact"
    if mode == "exact":
        res = hb.extend_determinant_form(T_W, W, budget=args.budget, seed=args.seed)
    elif mode == "one_step":
        if "x0" not in req:
            raise UsageError("one_step mode needs x0")
        x0 = serialize.decode_element(req["x0"])
        norm_TW = req.get("norm_TW")
        try:
            res = hb.extend(T_W, W, x0, norm_TW, budget=min(args.budget, 20_000), seed=args.seed, tol=args.tol_ext)
        except hb.ExtensionError as exc:
            return EXIT_FAIL, {"error": str(exc)}
    else:
        raise UsageError(f"unknown mode {mode!r}")
    out = {"mode": mode, "extended": res.extended, "restriction_residual": res.restriction_residual,
           "norm_original": res.norm_original, "norm_extended_lower": res.norm_extended_lower,
           "norm_extended_exact": res.norm_extended_exact, "preserved": res.preserved}
    if res.norm_original_sampled is not None:
        out["norm_original_sampled"] = res.norm_original_sampled
    if res.interval is not None:
        out.update(alpha=res.alpha, interval=res.interval, validation_excess=res.validation_excess, rounds=res.rounds)
    return (EXIT_OK if res.preserved else EXIT_FAIL), out


def _anchors_from(req) -> BAnchors:
    if "anchors" not in req or "norm" not in req:
        raise UsageError("request needs 'norm' and 'anchors'")
    return serialize.decode_anchors(req)


def run_distance(args) -> tuple[int, dict]:
    req = _read_request(args)
    anchors = _anchors_from(req)
    x = serialize.decode_element(req["x"])
    S = hb.Subspace.from_elements(anchors, _elements(req.get("S", {}).get("basis", [])))
    dist = hb.distance_to_subspace(x, S, anchors, args.budget, args.seed)
    rep = hb.distance_duality_check(x, S, anchors, seed=args.seed, budget=args.budget)
    out = {"distance": dist, "duality": rep, "lhs": rep.lhs, "rhs": rep.rhs, "gap": rep.gap}
    if dist.h > 0:
        try:
            T = hb.annihilator_functional(x, S, anchors, args.budget, args.seed)
            out["annihilator"] = T
            out["annihilator_value"] = T(x)
        except PreconditionError as exc:
            out["annihilator_error"] = str(exc)
    ok = rep.weak_duality and (not rep.exact or rep.gap <= args.tol)
    return (EXIT_OK if ok else EXIT_FAIL), out


def run_weakstar(args) -> tuple[int, dict]:
    req = _read_request(args)
    base = serialize.decode_functional(req["functional"])
    if "coefficients" in req:
        coeffs = [float(c) for c in req["coefficients"]]
    else:
        K = int(req.get("terms", 40))
        coeffs = [1.0 + 2.0 ** -k for k in range(1, K + 1)]
    family = ubp.scaled_family(base, coeffs)
    if "candidate" in req:
        cand = serialize.decode_functional(req["candidate"])
    else:
        cand = base.scaled(float(req.get("candidate_scale", 1.0)))
    total = _elements(req["total_set"]) if "total_set" in req else base.space.basis()
    points = _elements(req["points"]) if "points" in req else total
    rep = ubp.weakstar_check(family, cand, total, points, tol=float(req.get("tol", ubp.CAUCHY_TOL)),
                             budget=args.budget, seed=args.seed)
    ok = rep.agrees and rep.converges_to_candidate == rep.conditions_hold
    return (EXIT_OK if ok else EXIT_FAIL), rep


def run_graph_check(args) -> tuple[int, dict]:
    req = _read_request(args)
    nX = serialize.decode_norm(req["norm_X"])
    nY = serialize.decode_norm(req["norm_Y"])
    seq = SequenceSample(_elements(req["terms"]), [_elements(s) for s in req.get("anchor_sets", [])])
    rep = check_closed_graph(nX, nY, np.asarray(req["operator"], dtype=float), seq,
                             serialize.decode_element(req["x_limit"]), serialize.decode_element(req["y_limit"]),
                             tol=float(req.get("tol", 1e-6)))
    return (EXIT_OK if rep.closed else EXIT_FAIL), rep


COMMANDS = {
    "axioms": (run_axioms, "check the n-norm axioms on sample tuples"),
    "norm": (run_norm, "exact and sampled norm of a b-linear functional"),
    "ubp-demo": (run_ubp_demo, "unbounded partial-sum family on polynomials"),
    "hb-extend": (run_hb_extend, "norm-preserving extension of a functional"),
    "distance": (run_distance, "distance to a subspace and its dual formula"),
    "weakstar": (run_weakstar, "weak* convergence conditions for a scaled family"),
    "graph-check": (run_graph_check, "closed-graph check for a matrix operator"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="root seed (default %(default)s)")
    common.add_argument("--budget", type=_positive_int, default=10_000, help="sample budget")
    common.add_argument("--tol", type=_positive_float, default=1e-9, help="check tolerance")
    common.add_argument("--input", help="JSON request file (default: stdin)")
    common.add_argument("--output", help="JSON report file (default: stdout)")
    common.add_argument("--kmax", type=int, help="largest index for ubp-demo")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="nnorm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text)
        if name == "ubp-demo":
            p.add_argument("--kmin", type=int, default=1, help="smallest index (default %(default)s)")
        if name == "hb-extend":
            p.add_argument("--tol-ext", type=_positive_float, default=hb.VALIDATION_TOL,
                           help="validation tolerance for sampled extensions")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    func, _ = COMMANDS[args.command]
    try:
        code, report = func(args)
    except UsageError as exc:
        print(f"nnorm {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NNormError, KeyError, TypeError, ValueError) as exc:
        msg = f"missing field {exc}" if isinstance(exc, KeyError) else str(exc)
        print(f"nnorm {args.command}: {msg}", file=sys.stderr)
        return EXIT_USAGE
    text = serialize.dumps(report) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())

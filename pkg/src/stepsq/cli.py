"""Command-line driver exposing every verification pipeline as JSON reports.

Each subcommand runs one pipeline and writes a report document whose rows
compare an exact-arithmetic prediction with the measured value.  Reports are
deterministic for a fixed seed: timing is only written when requested, and
all randomness flows through one seeded generator.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction as Q
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .cascade import cascade_decomposition, closed_form_beta, sigma_r
from .harness import HARNESS_NAMES, build_harness, element, identity, random_element
from .inversion import (TestFunction, fourier_inversion, limit_inversion_check,
                        restrict_test_function)
from .jsonio import parse_rat, rat_str, vec_strs
from .limits import (cascade_stability, check_well_aligned, exact_sqrt,
                     propagate, restriction_projection_factor)
from .nilalg import (corrupted_fixture, layer_subalgebras,
                     realize_split_nilradical, verify_setup_axioms)
from .plancherel import determinant, pfaffian, plancherel_density
from .rootsys import build_root_system, cartan_matrix
from .schrodinger import (coefficient_norm_sq, restrict_and_renormalize,
                          stepwise_rep)
from .states import GaussianState, Grid, GridState

DEFAULT_SEED = 20240801

SUBCOMMANDS = ("roots", "cascade", "layers", "axioms", "pfaffian",
               "orthogonality", "restriction", "inversion", "limit-check",
               "all")

#: Published shape of every emitted report; validated on emit.
REPORT_SCHEMA = {
    "required": ["command", "inputs", "rows", "passed", "timing_s"],
    "row_required": ["name", "predicted", "measured", "abs_err", "rel_err",
                     "pass", "provenance"],
}


# ---------------------------------------------------------------------------
# report plumbing


def make_row(name: str, predicted, measured, tolerance: float,
             provenance: str) -> dict:
    """One report row comparing a prediction against a measurement.

    Exact rationals are rendered as "p/q" strings; tolerance 0 requires
    exact equality of the rendered values.
    """
    def render(x):
        if isinstance(x, Q):
            return rat_str(x)
        if isinstance(x, bool):
            return x
        if isinstance(x, (list, tuple)):
            return list(x)
        return x

    def numeric(x) -> Optional[float]:
        if isinstance(x, Q):
            return float(x)
        if isinstance(x, (int, float)) and not isinstance(x, bool):
            return float(x)
        return None

    pn, mn = numeric(predicted), numeric(measured)
    if pn is not None and mn is not None:
        abs_err = abs(pn - mn)
        rel_err = abs_err / max(abs(pn), 1e-300)
        ok = (predicted == measured) if tolerance == 0 else (abs_err <= tolerance)
    else:
        abs_err = rel_err = None
        ok = render(predicted) == render(measured)
    return {"name": name, "predicted": render(predicted),
            "measured": render(measured), "abs_err": abs_err,
            "rel_err": rel_err, "pass": bool(ok), "provenance": provenance}


@dataclass(frozen=True)
class ReportDocument:
    """Command echo, per-check rows, and the aggregate verdict."""

    command: str
    inputs: dict
    rows: Tuple[dict, ...]
    timing_s: Optional[float] = None

    @property
    def passed(self) -> bool:
        return all(row["pass"] for row in self.rows)

    def to_json(self) -> dict:
        doc = {"command": self.command, "inputs": self.inputs,
               "rows": [dict(r) for r in self.rows], "passed": self.passed,
               "timing_s": self.timing_s}
        _validate_report(doc)
        return doc


def _validate_report(doc: dict) -> None:
    """Structural validation against the published schema."""
    for key in REPORT_SCHEMA["required"]:
        assert key in doc, f"report missing field {key!r}"
    assert isinstance(doc["rows"], list)
    for row in doc["rows"]:
        for key in REPORT_SCHEMA["row_required"]:
            assert key in row, f"report row missing field {key!r}"
        assert isinstance(row["pass"], bool)
    assert isinstance(doc["passed"], bool)


@dataclass
class RunConfig:
    """Parsed invocation; round-trips through JSON unchanged."""

    command: str
    options: Dict[str, object] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"command": self.command, "options": dict(self.options)}

    @classmethod
    def from_json(cls, doc: dict) -> "RunConfig":
        return cls(doc["command"], dict(doc["options"]))


# ---------------------------------------------------------------------------
# pipelines; each returns (inputs echo, rows)


def _positive_count(series: str, rank: int) -> int:
    """Closed-form number of positive roots per series."""
    return {"A": rank * (rank + 1) // 2, "B": rank * rank,
            "C": rank * rank, "D": rank * (rank - 1)}[series]


def pipeline_roots(series: str, rank: int) -> Tuple[dict, List[dict]]:
    system = build_root_system(series, rank)
    rows = [
        make_row("positive_root_count", _positive_count(series, rank),
                 len(system.positives), 0, "closed-form count per series"),
        make_row("simple_root_count", rank,
                 len(system.simple_enumeration), 0, "rank definition"),
        make_row("cartan_matrix_integral", True,
                 all(x.denominator == 1 for row in cartan_matrix(system)
                     for x in row), 0, "exact Cartan matrix"),
    ]
    return {"series": series, "rank": rank}, rows


def pipeline_cascade(series: str, rank: int) -> Tuple[dict, List[dict]]:
    decomp = cascade_decomposition(build_root_system(series, rank))
    table = closed_form_beta(series, rank)
    rows = [make_row("cascade_length", len(table), decomp.m, 0,
                     "closed-form table length")]
    for r, (want, got) in enumerate(zip(table, decomp.beta), start=1):
        rows.append(make_row(f"beta_{r}", vec_strs(want), vec_strs(got), 0,
                             "closed-form cascade table"))
    return {"series": series, "rank": rank}, rows


def pipeline_layers(series: str, rank: int) -> Tuple[dict, List[dict]]:
    system = build_root_system(series, rank)
    decomp = cascade_decomposition(system)
    covered = set(decomp.beta)
    for members in decomp.layers.values():
        covered |= set(members)
    rows = [make_row("partition_covers_positives", len(system.positives),
                     len(covered), 0, "fill-out partition")]
    for r in range(1, decomp.m + 1):
        members = decomp.layers[r]
        rows.append(make_row(f"layer_{r}_even_dimension", True,
                             len(members) % 2 == 0, 0,
                             "symplectic pairing"))
        pairing = all(tuple(np.add(a, sigma_r(decomp, a, r)))
                      == decomp.beta[r - 1] for a in members) if members else True
        rows.append(make_row(f"layer_{r}_pairing_sums_to_beta", True, pairing,
                             0, "exact involution pairing"))
    return {"series": series, "rank": rank}, rows


def pipeline_axioms(series: str, rank: int,
                    corrupted: bool = False) -> Tuple[dict, List[dict]]:
    if corrupted:
        alg, decomp = corrupted_fixture()
    else:
        alg = realize_split_nilradical(series, rank)
        decomp = cascade_decomposition(alg.system)
    layers = layer_subalgebras(alg, decomp, validate=False)
    report = verify_setup_axioms(alg, layers)
    by_axiom: Dict[str, bool] = {}
    for row in report.rows:
        by_axiom[row["axiom"]] = by_axiom.get(row["axiom"], True) and row["ok"]
    rows = []
    if corrupted:
        rows.append(make_row("corrupted_control_detected", True,
                             not report.passed, 0,
                             "negative-control fixture"))
    else:
        for axiom, ok in sorted(by_axiom.items()):
            rows.append(make_row(axiom, True, ok, 0, "exact bracket support"))
    return {"series": series, "rank": rank, "corrupted": corrupted}, rows


def _random_skew(rng: np.random.Generator, n: int) -> List[List[Q]]:
    m = [[Q(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            v = Q(int(rng.integers(-9, 10)), int(rng.integers(1, 10)))
            m[i][j], m[j][i] = v, -v
    return m


def pipeline_pfaffian(count: int, max_size: int,
                      seed: int) -> Tuple[dict, List[dict]]:
    rng = np.random.default_rng(seed)
    ok = 0
    for _ in range(count):
        n = int(rng.integers(1, max_size + 1))
        m = _random_skew(rng, n)
        pf = pfaffian(m)
        ok += pf * pf == determinant(m)
    rows = [make_row("pf_squared_equals_det", count, ok, 0,
                     "exact rational determinant")]
    # degree-of-homogeneity per layer on the algebra realizations
    t = Q(3, 2)
    for series, rank in (("A", 3), ("C", 2), ("B", 2)):
        alg = realize_split_nilradical(series, rank)
        decomp = cascade_decomposition(alg.system)
        layers = layer_subalgebras(alg, decomp)
        base = {r: Q(r + 1) for r in range(1, decomp.m + 1)}
        scaled = {r: t * v for r, v in base.items()}
        d0 = plancherel_density(alg, layers, base)
        d1 = plancherel_density(alg, layers, scaled)
        homogeneous = all(d1.pf[r] == t ** d0.d_list[r - 1] * d0.pf[r]
                          for r in d0.pf)
        rows.append(make_row(f"homogeneity_{series}{rank}", True, homogeneous,
                             0, "per-layer degree from the pairing rank"))
    return {"count": count, "max_size": max_size, "seed": seed}, rows


def _exact_density(harness_name: str, gamma: Dict[int, Q]) -> Q:
    """Exact |density| for a harness parameter from integer pairing data."""
    h = build_harness(harness_name)
    total = Q(1)
    for layer in h.layers:
        if layer.d == 0:
            continue
        det_c = determinant([[Q(int(round(x))) for x in row]
                             for row in np.asarray(layer.C)])
        total *= abs(Q(gamma[layer.r])) ** layer.d * abs(det_c)
    return total


def pipeline_orthogonality(harness_name: str, gamma: Dict[int, Q],
                           backend: str, seed: int) -> Tuple[dict, List[dict]]:
    grid = None
    if backend == "grid":
        d = build_harness(harness_name).top.d
        grid = Grid(d, {1: 256, 2: 64, 3: 24}[d], 3.3)
    rep = stepwise_rep(harness_name, {r: float(v) for r, v in gamma.items()},
                       backend=backend, grid=grid)
    pf = _exact_density(harness_name, gamma)
    tol = 1e-6 if backend == "closed" else 1e-3
    u = GaussianState.ground(rep.D)
    if backend == "grid":
        u = GridState.from_gaussian(u, grid)
    report = coefficient_norm_sq(rep, u, u)
    rows = [
        make_row("density_abs", pf, rep.pf_abs, 1e-12,
                 "exact rational pairing determinant"),
        make_row("coefficient_norm", float(1 / pf), report.value, float(tol / pf),
                 "square-integrability constant"),
        make_row("normalized_ratio", 1.0, report.value / report.predicted, tol,
                 "square-integrability constant"),
    ]
    return {"harness": harness_name,
            "gamma": {str(r): rat_str(v) for r, v in sorted(gamma.items())},
            "backend": backend, "seed": seed}, rows


def pipeline_restriction(lam1: Q, lam2: Q, seed: int) -> Tuple[dict, List[dict]]:
    rep_big = stepwise_rep("A3", {1: float(lam1), 2: float(lam2)})
    rep_small = stepwise_rep("A1", {1: float(lam1)})
    rng = np.random.default_rng(seed)
    scalar = GaussianState(np.zeros((0, 0)), np.zeros(0), 0.0)
    x = GaussianState.packet(2, rng.normal(size=2) * 0.3,
                             rng.normal(size=2) * 0.3)
    report, factor = restrict_and_renormalize(rep_big, rep_small, scalar,
                                              scalar, x)
    predicted_factor = 1 / abs(lam2)
    rows = [
        make_row("pointwise_slice_identity", 0.0, report.pointwise_abs_err,
                 1e-8, "restricted-coefficient identity"),
        make_row("norm_ratio", report.norm_ratio_predicted,
                 report.norm_ratio_measured,
                 1e-3 * abs(report.norm_ratio_predicted),
                 "exact density ratio between stages"),
        make_row("renormalization_factor", float(predicted_factor), factor,
                 1e-12, "square root of the exact density ratio"),
    ]
    # the same squared factor from the exact chain bookkeeping
    chain = propagate(build_root_system("A", 1), 1)
    fac = restriction_projection_factor(chain, {1: lam1}, {1: lam1, 2: lam2})
    rows.append(make_row("squared_factor_exact", fac.factor,
                         Q(1) / lam2 ** 2, 0,
                         "exact density ratio between stages"))
    rows.append(make_row("factor_square_root_consistent",
                         float(exact_sqrt(fac.factor)), factor, 1e-12,
                         "exact density ratio between stages"))
    return {"lambda1": rat_str(lam1), "lambda2": rat_str(lam2),
            "seed": seed}, rows


def pipeline_inversion(points: int, tolerance: float,
                       seed: int) -> Tuple[dict, List[dict]]:
    h = build_harness("HEIS1")
    f = TestFunction.standard(h)
    rng = np.random.default_rng(seed)
    res = fourier_inversion(f, identity(h), tolerance=tolerance)
    rows = [make_row("identity_value", 1.0, res.value.real, 1e-4,
                     "test function value at the identity"),
            make_row("identity_rel_error", 0.0, res.rel_error, 1e-4,
                     "reconstruction residual")]
    for k in range(points):
        x = random_element(h, rng, 1.0)
        res = fourier_inversion(f, x, tolerance=tolerance)
        rows.append(make_row(f"point_{k}_rel_error", 0.0, res.rel_error, 1e-4,
                             "reconstruction residual"))
    return {"harness": "HEIS1", "points": points, "tolerance": tolerance,
            "seed": seed}, rows


def pipeline_limit_check(zeta: float, tolerance: float) -> Tuple[dict, List[dict]]:
    rows: List[dict] = []
    starts = {"A_odd": ("A", 1), "A_even": ("A", 2), "B_odd": ("B", 3),
              "B_even": ("B", 2), "C": ("C", 2), "D_odd": ("D", 3),
              "D_even": ("D", 2)}
    for fam, (series, rank) in sorted(starts.items()):
        chain = propagate(build_root_system(series, rank), 3)
        rows.append(make_row(f"{fam}_aligned", True,
                             check_well_aligned(chain).aligned, 0,
                             "index-preserving embeddings"))
        rows.append(make_row(f"{fam}_cascade_stable", True,
                             cascade_stability(chain).stable, 0,
                             "stage-independent cascade table"))
    big, small = build_harness("A3"), build_harness("A1")
    f_big = TestFunction.standard(big)
    f_small = restrict_test_function(f_big, small)
    x = element(small, [(zeta, [], [])])
    rep = limit_inversion_check(f_big, f_small, x, tolerance=tolerance)
    rows += [
        make_row("two_stage_coherent", True, rep.coherent, 0,
                 "restriction comparison on a probe grid"),
        make_row("stage_small_rel_error", 0.0, rep.stage_small.rel_error,
                 tolerance, "reconstruction residual"),
        make_row("stage_big_rel_error", 0.0, rep.stage_big.rel_error,
                 tolerance, "reconstruction residual"),
        make_row("two_stage_agreement", True, rep.agree, 0,
                 "stage values within tolerance"),
    ]
    bad = TestFunction.gaussian(small, [0.1], [0.0], 1.1)
    rep_bad = limit_inversion_check(f_big, bad, x)
    rows.append(make_row("incoherent_family_detected", True,
                         not rep_bad.coherent, 0,
                         "restriction comparison on a probe grid"))
    return {"zeta": zeta, "tolerance": tolerance}, rows


def pipeline_all(seed: int, quick: bool) -> Tuple[dict, List[dict]]:
    """Aggregate run: every pipeline with its default configuration."""
    sections: List[Tuple[str, dict, List[dict]]] = []
    cascade_cases = [("A", 3), ("A", 4), ("B", 4), ("B", 5), ("C", 4),
                     ("D", 4), ("D", 5)]
    if not quick:
        cascade_cases += [("A", 7), ("B", 8), ("C", 8), ("D", 8)]
    for series, rank in cascade_cases:
        sections.append((f"roots {series}{rank}",) + pipeline_roots(series, rank))
        sections.append((f"cascade {series}{rank}",)
                        + pipeline_cascade(series, rank))
        sections.append((f"layers {series}{rank}",)
                        + pipeline_layers(series, rank))
    for series, rank in (("A", 3), ("C", 2), ("B", 3), ("D", 4)):
        sections.append((f"axioms {series}{rank}",)
                        + pipeline_axioms(series, rank))
    sections.append(("axioms corrupted",) + pipeline_axioms("A", 3, True))
    sections.append(("pfaffian",)
                    + pipeline_pfaffian(50 if quick else 500, 10, seed))
    orth_cases = [("HEIS1", {1: Q(2)}, "closed"),
                  ("A3", {1: Q(1), 2: Q(3, 2)}, "closed"),
                  ("C2", {1: Q(1, 2), 2: Q(1)}, "closed"),
                  ("B2", {1: Q(2), 2: Q(1, 2)}, "closed"),
                  ("HEIS1", {1: Q(1)}, "grid")]
    if not quick:
        orth_cases += [("HEIS2", {1: Q(1, 2)}, "closed"),
                       ("HEIS3", {1: Q(3)}, "closed")]
    for name, gamma, backend in orth_cases:
        sections.append((f"orthogonality {name} {backend}",)
                        + pipeline_orthogonality(name, gamma, backend, seed))
    sections.append(("restriction",)
                    + pipeline_restriction(Q(1), Q(2), seed))
    sections.append(("inversion",)
                    + pipeline_inversion(3 if quick else 10, 1e-6, seed))
    sections.append(("limit-check",) + pipeline_limit_check(0.6, 1e-3))
    rows: List[dict] = []
    inputs = {"seed": seed, "quick": quick, "sections": []}
    for title, section_inputs, section_rows in sections:
        inputs["sections"].append({"title": title, "inputs": section_inputs})
        for row in section_rows:
            row = dict(row)
            row["name"] = f"{title}: {row['name']}"
            rows.append(row)
    return inputs, rows


# ---------------------------------------------------------------------------
# argument parsing and dispatch


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stepsq",
        description="verification pipelines with JSON reports")
    sub = parser.add_subparsers(dest="command")

    def common(p):
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--out", type=str, default=None,
                       help="report path (default: <command>.json in the "
                            "report directory)")
        p.add_argument("--config", type=str, default=None,
                       help="JSON file whose options override the flags")
        p.add_argument("--timing", action="store_true",
                       help="include wall-clock timing in the report "
                            "(breaks byte-identical determinism)")

    for name in ("roots", "cascade", "layers", "axioms"):
        p = sub.add_parser(name)
        p.add_argument("--series", required=True, choices="ABCD")
        p.add_argument("--n", type=int, required=True)
        if name == "axioms":
            p.add_argument("--corrupted", action="store_true")
        common(p)

    p = sub.add_parser("pfaffian")
    p.add_argument("--count", type=int, default=500)
    p.add_argument("--max-size", type=int, default=10)
    common(p)

    p = sub.add_parser("orthogonality")
    p.add_argument("--harness", required=True, choices=HARNESS_NAMES)
    p.add_argument("--lambda", dest="lambdas", action="append", required=True,
                   metavar="P/Q", help="layer parameter, repeatable in layer "
                                       "order")
    p.add_argument("--backend", choices=("closed", "grid"), default="closed")
    common(p)

    p = sub.add_parser("restriction")
    p.add_argument("--lambda1", default="1")
    p.add_argument("--lambda2", default="2")
    common(p)

    p = sub.add_parser("inversion")
    p.add_argument("--points", type=int, default=10)
    p.add_argument("--tolerance", type=float, default=1e-6)
    common(p)

    p = sub.add_parser("limit-check")
    p.add_argument("--zeta", type=float, default=0.6)
    p.add_argument("--tolerance", type=float, default=1e-3)
    common(p)

    p = sub.add_parser("all")
    p.add_argument("--quick", action="store_true")
    common(p)
    return parser


def _dispatch(args: argparse.Namespace) -> Tuple[dict, List[dict]]:
    cmd = args.command
    if cmd in ("roots", "cascade", "layers"):
        fn = {"roots": pipeline_roots, "cascade": pipeline_cascade,
              "layers": pipeline_layers}[cmd]
        return fn(args.series, args.n)
    if cmd == "axioms":
        return pipeline_axioms(args.series, args.n, args.corrupted)
    if cmd == "pfaffian":
        return pipeline_pfaffian(args.count, args.max_size, args.seed)
    if cmd == "orthogonality":
        gamma = {r: parse_rat(s) for r, s in enumerate(args.lambdas, start=1)}
        h = build_harness(args.harness)
        if len(gamma) != h.m:
            raise ValueError(f"{args.harness} needs {h.m} --lambda value(s) "
                             "in layer order")
        return pipeline_orthogonality(args.harness, gamma, args.backend,
                                      args.seed)
    if cmd == "restriction":
        return pipeline_restriction(parse_rat(args.lambda1),
                                    parse_rat(args.lambda2), args.seed)
    if cmd == "inversion":
        return pipeline_inversion(args.points, args.tolerance, args.seed)
    if cmd == "limit-check":
        return pipeline_limit_check(args.zeta, args.tolerance)
    if cmd == "all":
        return pipeline_all(args.seed, args.quick)
    raise ValueError(f"unknown subcommand {cmd!r}")


def _report_path(args: argparse.Namespace) -> str:
    if args.out:
        return args.out
    directory = os.environ.get("STEPSQ_REPORT_DIR", ".")
    return os.path.join(directory, f"{args.command}.json")


def run(argv: Sequence[str]) -> int:
    """Execute one subcommand; returns the process exit code.

    0: all checks passed; 1: a check failed or a tolerance was unreachable;
    2: configuration error (unknown subcommand, malformed flags/rationals).
    """
    parser = _build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    if args.config:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                overrides = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            print(f"stepsq: bad config file: {exc}", file=sys.stderr)
            return 2
        for key, value in overrides.items():
            setattr(args, key, value)
    start = time.time()
    try:
        inputs, rows = _dispatch(args)
    except (ValueError, ZeroDivisionError) as exc:
        print(f"stepsq: configuration error: {exc}", file=sys.stderr)
        return 2
    timing = round(time.time() - start, 3) if args.timing else None
    doc = ReportDocument(args.command, {**inputs, "seed": args.seed},
                         tuple(rows), timing)
    path = _report_path(args)
    payload = json.dumps(doc.to_json(), indent=2, sort_keys=True) + "\n"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(payload)
    status = "pass" if doc.passed else "FAIL"
    print(f"stepsq {args.command}: {status} "
          f"({sum(r['pass'] for r in rows)}/{len(rows)} rows) -> {path}")
    return 0 if doc.passed else 1


def main() -> None:
    """Console entry point."""
    sys.exit(run(sys.argv[1:]))

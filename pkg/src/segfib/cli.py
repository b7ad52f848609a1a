"""Command-line front end: generate, analyze, triangulate, verify, corpus."""

from __future__ import annotations

import argparse
import itertools
import math
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import io
from .families import FamilyInstance, build_family, make_nakajima_tower, nakajima_sweep
from .monoid import (
    DEFAULT_KMAX,
    PointConfig,
    ehrhart_polynomial,
    gap_vector,
    is_integrally_closed,
    is_smooth,
    is_very_ample,
)
from .triangulation import (
    FaceCompatibilityError,
    TriangulationComplex,
    build_pi_triangulation,
    certify,
    fibered_subdivision,
    point_triangulation,
    square_triangulation,
    tower_triangulations,
)

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2
TASKS = ("gaps", "very_ample", "smooth", "ehrhart", "integrally_closed", "triangulate", "verify")


class UsageError(Exception):
    pass


def _emit(obj, output: str | None) -> None:
    text = io.dumps(obj)
    if output and output != "-":
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_instance(arg: str) -> FamilyInstance:
    try:
        return io.instance_from_json(io.read_json_arg(arg))
    except (ValueError, KeyError, TypeError, OSError) as exc:
        raise UsageError(f"bad input: {exc}") from exc


# generate -------------------------------------------------------------------

def cmd_generate(args) -> int:
    inst = _load_instance(args.input)
    _emit(io.instance_to_json(inst), args.output)
    return EXIT_OK


# analyze ----------------------------------------------------------------------

@dataclass
class AnalysisRequest:
    instance: FamilyInstance
    tasks: list[str]
    k_max: int = DEFAULT_KMAX
    time_budget: float | None = None
    diagonal: str = "main"

    def __post_init__(self):
        if not self.tasks:
            raise UsageError("at least one task is required")
        bad = [t for t in self.tasks if t not in TASKS]
        if bad:
            raise UsageError(f"unknown tasks {bad}")
        if self.k_max < 1 or (self.time_budget is not None and self.time_budget <= 0):
            raise UsageError("caps must be positive")


def _base_triangulation(inst: FamilyInstance, diagonal: str) -> TriangulationComplex:
    if inst.fibration is None or inst.base is None:
        raise UsageError("instance has no fibration; triangulation needs one")
    if inst.steps:
        levels = make_nakajima_tower(inst.steps)
        if len(levels) == 1:
            return point_triangulation()
        return tower_triangulations(levels[:-1], certify=False)[-1]
    if inst.base.dim == 0:
        return point_triangulation()
    if inst.base.dim == 2 and set(inst.base.vertices) == {(0, 0), (0, 1), (1, 0), (1, 1)}:
        return square_triangulation(diagonal)
    raise UsageError("no canonical base triangulation for this base polytope")


def _triangulate(inst: FamilyInstance, diagonal: str, order: str = "default", seed: int = 0) -> dict:
    """Triangulation plus certificates, or a structured face-compatibility error."""
    base = _base_triangulation(inst, diagonal)
    try:
        sub = fibered_subdivision(inst.fibration, inst.polytope, base)
        t = build_pi_triangulation(inst.fibration, inst.polytope, base, order=order,
                                   rng=random.Random(seed), certify=False)
    except FaceCompatibilityError as exc:
        return {"error": "face_compatibility", "face": exc.face, "image": exc.image,
                "message": str(exc)}
    rep = certify(t, inst.polytope, sub)
    t.heights = rep.heights
    return {"triangulation": t.to_json(), "certificates": rep.to_json(), "ok": rep.ok,
            "fibration": inst.fibration.to_json(), "base_triangulation": base.to_json()}


def _analyze(req: AnalysisRequest) -> dict:
    config = PointConfig.of_polytope(req.instance.polytope)
    results: dict = {}
    for task in req.tasks:
        if task == "gaps":
            results[task] = gap_vector(config, req.k_max, req.time_budget).to_json()
        elif task == "very_ample":
            ok, cert = is_very_ample(config)
            results[task] = {"value": ok, "certificate": cert}
        elif task == "smooth":
            results[task] = {"value": is_smooth(req.instance.polytope)}
        elif task == "ehrhart":
            results[task] = {"coefficients": ehrhart_polynomial(req.instance.polytope).to_json()}
        elif task == "integrally_closed":
            ok, first = is_integrally_closed(config, req.k_max)
            results[task] = {"value": ok, "first_failure_height": first}
        elif task in ("triangulate", "verify"):
            out = _triangulate(req.instance, req.diagonal)
            if task == "verify":
                out = {k: v for k, v in out.items() if k != "triangulation"}
            results[task] = out
    return {"key": req.instance.key, "results": results}


def cmd_analyze(args) -> int:
    inst = _load_instance(args.input)
    tasks = [t.strip() for t in args.tasks.split(",") if t.strip()]
    req = AnalysisRequest(inst, tasks, args.kmax, args.time_budget, args.diagonal)
    _emit(_analyze(req), args.output)
    return EXIT_OK


# triangulate / verify -------------------------------------------------------------

def cmd_triangulate(args) -> int:
    inst = _load_instance(args.input)
    out = _triangulate(inst, args.diagonal, args.order, args.seed)
    out["key"] = inst.key
    out["polytope"] = io.polytope_to_json(inst.polytope)
    _emit(out, args.output)
    if "error" in out:
        print(out["message"], file=sys.stderr)
        return EXIT_FAILED
    if not out["ok"]:
        for d in out["certificates"]["diagnostics"]:
            print(d, file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        data = io.read_json_arg(args.input)
        t = io.triangulation_from_json(data["triangulation"])
        poly = io.polytope_from_json(data["polytope"])
    except (ValueError, KeyError, TypeError, OSError) as exc:
        raise UsageError(f"bad input: {exc}") from exc
    sub = None
    if "fibration" in data and "base_triangulation" in data:
        f = io.affine_map_from_json(data["fibration"])
        sub = fibered_subdivision(f, poly, io.triangulation_from_json(data["base_triangulation"]))
    rep = certify(t, poly, sub)
    _emit({"certificates": rep.to_json(), "ok": rep.ok}, args.output)
    for d in rep.diagnostics:
        print(d, file=sys.stderr)
    return EXIT_OK if rep.ok else EXIT_FAILED


# corpus -------------------------------------------------------------------------------

def is_unimodal(seq) -> bool:
    i = 0
    while i + 1 < len(seq) and seq[i] <= seq[i + 1]:
        i += 1
    while i + 1 < len(seq) and seq[i] >= seq[i + 1]:
        i += 1
    return i + 1 >= len(seq)


def unimodal_at(seq, j: int) -> bool:
    """gv_1 <= ... <= gv_j >= ... >= gv_gamma (1-based j)."""
    up = all(seq[i] <= seq[i + 1] for i in range(j - 1))
    down = all(seq[i] >= seq[i + 1] for i in range(j - 1, len(seq) - 1))
    return up and down


def pm_peak(m: int) -> int:
    return math.ceil((3 * m - 5) / 4)


def corpus_specs(spec: dict) -> list[dict]:
    fam = spec.get("family")
    if fam == "pm":
        lo, hi = (int(c) for c in spec["m"])
        return [{"family": "pm", "m": m} for m in range(lo, hi + 1)]
    if fam == "segment_polytope":
        lo, hi = (int(c) for c in spec["endpoints"])
        segs = [(a, b) for a in range(lo, hi + 1) for b in range(a + 1, hi + 1)]
        return [{"family": "segment_polytope", "intervals": [list(s) for s in q]}
                for q in itertools.product(segs, repeat=4)]
    if fam == "nakajima":
        return [{"family": "nakajima", "steps": [{"alpha": a, "beta": b} for a, b in st]}
                for st in nakajima_sweep(int(spec.get("max_dim", 4)))]
    raise UsageError(f"unknown corpus family {fam!r}")


def corpus_entry(spec: dict, k_max: int = DEFAULT_KMAX, time_budget: float | None = None) -> dict:
    inst = build_family(spec)
    rep = gap_vector(PointConfig.of_polytope(inst.polytope), k_max, time_budget)
    entry = {"key": inst.key, "spec": spec, "gap_report": rep.to_json(),
             "unimodal": None if rep.capped else is_unimodal(rep.gap_vector)}
    if spec["family"] == "pm" and not rep.capped and rep.gap_vector:
        j = pm_peak(spec["m"])
        entry["peak"] = j
        entry["unimodal_at_peak"] = unimodal_at(rep.gap_vector, j)
    return entry


@dataclass
class CorpusReport:
    instances: list[dict] = field(default_factory=list)
    witness: dict | None = None

    def counts(self) -> dict:
        return {"instances": len(self.instances),
                "unimodal": sum(1 for e in self.instances if e["unimodal"]),
                "non_unimodal": sum(1 for e in self.instances if e["unimodal"] is False),
                "capped": sum(1 for e in self.instances if e["unimodal"] is None),
                "peak_failures": sum(1 for e in self.instances if e.get("unimodal_at_peak") is False)}

    def to_json(self) -> dict:
        return {"instances": self.instances, "counts": self.counts(), "witness": self.witness}


def run_corpus(spec: dict, k_max: int = DEFAULT_KMAX, jobs: int = 1, time_budget: float | None = None) -> CorpusReport:
    specs = corpus_specs(spec)
    if jobs > 1 and len(specs) > 1:
        with ProcessPoolExecutor(jobs) as ex:
            entries = list(ex.map(corpus_entry, specs, itertools.repeat(k_max),
                                  itertools.repeat(time_budget), chunksize=8))
    else:
        entries = [corpus_entry(s, k_max, time_budget) for s in specs]
    report = CorpusReport(sorted(entries, key=lambda e: e["key"]))
    for e in report.instances:
        if e["unimodal"] is False or e.get("unimodal_at_peak") is False:
            replay = corpus_entry(e["spec"], k_max)
            if replay["gap_report"]["gap_vector"] == e["gap_report"]["gap_vector"]:
                report.witness = e
                break
    return report


def cmd_corpus(args) -> int:
    try:
        spec = io.read_json_arg(args.input)
    except (ValueError, OSError) as exc:
        raise UsageError(f"bad input: {exc}") from exc
    try:
        report = run_corpus(spec, args.kmax, args.jobs, args.time_budget)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"bad corpus spec: {exc}") from exc
    _emit(report.to_json(), args.output)
    if report.witness is not None:
        print(f"non-unimodal gap vector: {report.witness['key']}", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


# entry point ----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="segfib", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, tasks=False):
        p.add_argument("--input", required=True, help="inline JSON, a file path, or - for stdin")
        p.add_argument("--output", help="output file (default: stdout)")
        p.add_argument("--format", choices=["json"], default="json")
        if tasks:
            p.add_argument("--tasks", default="gaps")
        p.add_argument("--kmax", type=int, default=DEFAULT_KMAX)
        p.add_argument("--time-budget", type=float, default=None)
        p.add_argument("--diagonal", choices=["main", "anti"], default="main")
        return p

    common(sub.add_parser("generate", help="instantiate a family spec")).set_defaults(func=cmd_generate)
    common(sub.add_parser("analyze", help="compute monoid invariants"), tasks=True).set_defaults(func=cmd_analyze)
    tri = common(sub.add_parser("triangulate", help="build and certify the lifted triangulation"))
    tri.add_argument("--order", choices=["default", "random"], default="default")
    tri.add_argument("--seed", type=int, default=0)
    tri.set_defaults(func=cmd_triangulate)
    common(sub.add_parser("verify", help="re-check a triangulation file")).set_defaults(func=cmd_verify)
    cor = common(sub.add_parser("corpus", help="gap-vector unimodality sweep"))
    cor.add_argument("--jobs", type=int, default=1)
    cor.set_defaults(func=cmd_corpus)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

"""Deterministic end-to-end pipeline: group to ladder to hierarchy to simplex.

A single JSON config drives six sequential stages; every artifact written is
byte-identical across runs of the same config.  Timings are kept on the run
report object for console display but never serialized into artifacts.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .analysis import (
    CylinderId,
    boundary_mass_bound,
    check_partitions,
    return_times,
    scan_occurrences,
    syndeticity_window,
)
from .blocks import BlockHierarchy, augment_matrix, build_hierarchy, verify_c3
from .errors import ConfigError, MonotileError
from .folner import (
    FolnerLadder,
    build_abelian_chain_ladder,
    build_heisenberg_ladder,
    build_lattice_ladder,
    build_pruefer_ladder,
    check_congruent,
    folner_defect,
    group_ladder,
)
from .groups import FiniteSubset, Heisenberg, context_from_descriptor, standard_generators
from .matrices import ManagedSequence, group_matrices, select_subsequence_lemma8
from .simplex import (
    check_nesting,
    incidence_from_hierarchy,
    realize_finite_simplex,
    tail_cluster_diameters,
)

__all__ = [
    "STAGES",
    "DEFAULT_CONFIG",
    "PipelineConfig",
    "StageResult",
    "RunReport",
    "heisenberg_targets",
    "build_ladder_from_config",
    "run_pipeline",
]

STAGES = (
    "build-ladder",
    "check-congruence",
    "build-matrices",
    "build-hierarchy",
    "verify-dynamics",
    "measure-limits",
)

DEFAULT_CONFIG = {
    "group": {"kind": "lattice", "d": 1},
    "ladder": {"route": "lattice", "depth": 5, "base": 3},
    "k0": 3,
    "matrices": {"realize": {"extreme_points": 2, "tolerance": "1/100"}},
    "lemma8_bound": "2",
    "hierarchy_depth": 2,
    "analysis": {
        "pairs": [[0, 1], [0, 2], [1, 2]],
        "kr": [[0, 2]],
        "boundary_levels": [0, 1, 2],
    },
    "artifacts": {
        "ladder": "ladder.json",
        "matrices": "matrices.json",
        "hierarchy": "hier.json",
        "report": "report.json",
    },
}


def heisenberg_targets(depth: int, start=Fraction(1, 2), step=Fraction(2, 3)):
    """Default invariance targets for the composed ladder: a two-direction
    window with geometrically tightening tolerances."""
    ctx = Heisenberg()
    window = FiniteSubset(ctx, [(1, 0, 0), (-1, 0, 0), (0, 0, 1), (0, 0, -1)])
    eps = Fraction(start)
    out = []
    for _ in range(depth):
        out.append((window, eps))
        eps *= Fraction(step)
    return out


@dataclass(frozen=True)
class PipelineConfig:
    """Validated pipeline parameters; see DEFAULT_CONFIG for the file shape."""

    group: dict
    ladder: dict
    k0: int
    matrices: dict
    lemma8_bound: Fraction
    hierarchy_depth: int
    analysis: dict
    artifacts: dict
    base_dir: Path

    @staticmethod
    def from_json(data: dict, base_dir: Path | str = ".") -> "PipelineConfig":
        merged = {**DEFAULT_CONFIG, **data}
        try:
            ctx = context_from_descriptor(merged["group"])
        except (KeyError, MonotileError, ValueError) as e:
            raise ConfigError(f"bad group descriptor: {e}")
        ladder_cfg = merged["ladder"]
        route = ladder_cfg.get("route")
        if route not in ("lattice", "pruefer", "abelian", "heisenberg"):
            raise ConfigError(f"unknown ladder route {route!r}")
        depth = ladder_cfg.get("depth")
        if not isinstance(depth, int) or depth < 1:
            raise ConfigError(f"ladder depth must be a positive int, got {depth!r}")
        k0 = merged["k0"]
        if not isinstance(k0, int) or k0 < 3:
            raise ConfigError(f"k0 must be an int >= 3, got {k0!r}")
        matrices = merged["matrices"]
        if not (isinstance(matrices, dict) and ("realize" in matrices) ^ ("file" in matrices)):
            raise ConfigError("matrix source must be exactly one of 'realize' or 'file'")
        if "realize" in matrices:
            realize = matrices["realize"]
            d = realize.get("extreme_points")
            if not isinstance(d, int) or d < 2:
                raise ConfigError(f"extreme_points must be an int >= 2, got {d!r}")
            if k0 != d + 1:
                raise ConfigError(f"k0 = {k0} must equal extreme_points + 1 = {d + 1} "
                                  "(augmentation adds one block)")
            try:
                tol = Fraction(realize.get("tolerance"))
            except (TypeError, ValueError) as e:
                raise ConfigError(f"bad realize tolerance: {e}")
            if tol <= 0:
                raise ConfigError("realize tolerance must be positive")
        try:
            bound = Fraction(merged["lemma8_bound"])
        except (TypeError, ValueError) as e:
            raise ConfigError(f"bad lemma8 bound: {e}")
        hierarchy_depth = merged["hierarchy_depth"]
        if not isinstance(hierarchy_depth, int) or hierarchy_depth < 1:
            raise ConfigError(f"hierarchy depth must be a positive int, got {hierarchy_depth!r}")
        analysis = merged["analysis"]
        for key in ("pairs", "kr"):
            for pair in analysis.get(key, []):
                if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
                    raise ConfigError(f"analysis {key} entries must be [n, m] pairs")
                n, m = pair
                if not (isinstance(n, int) and isinstance(m, int) and 0 <= n < m):
                    raise ConfigError(f"analysis pair {pair!r} must satisfy 0 <= n < m")
                if m > hierarchy_depth:
                    raise ConfigError(
                        f"analysis level {m} exceeds hierarchy depth {hierarchy_depth}")
        for lvl in analysis.get("boundary_levels", []):
            if not isinstance(lvl, int) or lvl < 0 or lvl > depth:
                raise ConfigError(f"boundary level {lvl!r} outside ladder depth {depth}")
        artifacts = {**DEFAULT_CONFIG["artifacts"], **merged.get("artifacts", {})}
        return PipelineConfig(merged["group"], ladder_cfg, k0, matrices, bound,
                              hierarchy_depth, analysis, artifacts, Path(base_dir))

    @staticmethod
    def load(path: Path | str) -> "PipelineConfig":
        path = Path(path)
        with open(path) as fh:
            data = json.load(fh)
        return PipelineConfig.from_json(data, path.parent)


@dataclass(frozen=True)
class StageResult:
    name: str
    ok: bool
    detail: dict
    witness: str | None = None

    def to_json(self) -> dict:
        out = {"name": self.name, "ok": self.ok, "detail": self.detail}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class RunReport:
    """Stage outcomes plus artifact paths; timings stay off the artifact."""

    stages: list = field(default_factory=list)
    artifacts: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(s.ok for s in self.stages)

    def artifact_json(self) -> dict:
        return {"ok": self.ok,
                "stages": [s.to_json() for s in self.stages],
                "artifacts": self.artifacts}


class _StageFailed(Exception):
    def __init__(self, witness: str, detail: dict | None = None):
        super().__init__(witness)
        self.witness = witness
        self.detail = detail or {}


def write_json(data, path: Path) -> None:
    """Canonical JSON serialization: sorted keys, compact, trailing newline."""
    with open(path, "w") as fh:
        json.dump(data, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def build_ladder_from_config(group: dict, ladder_cfg: dict) -> FolnerLadder:
    ctx = context_from_descriptor(group)
    route = ladder_cfg["route"]
    depth = ladder_cfg["depth"]
    if route == "lattice":
        if ctx.kind != "lattice":
            raise ConfigError(f"lattice route needs a lattice group, got {ctx.kind}")
        return build_lattice_ladder(ctx.d, depth, ladder_cfg.get("base", 3))
    if route == "pruefer":
        if ctx.kind != "pruefer":
            raise ConfigError(f"pruefer route needs a pruefer group, got {ctx.kind}")
        return build_pruefer_ladder(ctx.p, depth)
    if route == "abelian":
        gens = ladder_cfg.get("generators")
        if gens is None:
            generators = standard_generators(ctx)
        else:
            generators = [ctx.decode_json(g) for g in gens]
        return build_abelian_chain_ladder(ctx, generators, depth)
    if route == "heisenberg":
        if ctx.kind != "heisenberg3":
            raise ConfigError(f"heisenberg route needs the heisenberg3 group, got {ctx.kind}")
        start = Fraction(ladder_cfg.get("eps_start", "1/2"))
        step = Fraction(ladder_cfg.get("eps_step", "2/3"))
        return build_heisenberg_ladder(heisenberg_targets(depth, start, step))
    raise ConfigError(f"unknown ladder route {route!r}")


def run_pipeline(config: PipelineConfig, out_dir: Path | str = ".",
                 verbose: bool = False) -> RunReport:
    """Run all six stages, writing artifacts as they are produced."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report = RunReport()
    state: dict = {}

    def emit(name: str, data) -> None:
        fname = config.artifacts[name]
        write_json(data, out / fname)
        report.artifacts[name] = fname

    def stage_build_ladder() -> dict:
        ladder = build_ladder_from_config(config.group, config.ladder)
        state["ladder"] = ladder
        emit("ladder", ladder.to_json())
        return {"levels": [len(F) for F in ladder.levels],
                "ratios": [ladder.ratio(n) for n in range(ladder.depth)]}

    def stage_check_congruence() -> dict:
        ladder = state["ladder"]
        result = check_congruent(ladder)
        if not result.ok:
            raise _StageFailed(f"congruence fails at level {result.level}: {result.reason}",
                               result.to_json())
        gens = standard_generators(ladder.ctx)
        defects = {
            json.dumps(ladder.ctx.encode_json(g)): [str(folner_defect(F, g)) for F in ladder.levels]
            for g in gens
        }
        return {"congruent": True, "defects": defects}

    def stage_build_matrices() -> dict:
        ladder = state["ladder"]
        detail: dict = {}
        if "realize" in config.matrices:
            realize_cfg = config.matrices["realize"]
            realized = realize_finite_simplex(realize_cfg["extreme_points"], ladder,
                                              Fraction(realize_cfg["tolerance"]))
            state["sequence"] = realized.sequence
            state["realized"] = realized
            detail["realized_depth"] = realized.depth
            detail["cluster_diameters"] = [str(x) for x in realized.diameters]
        else:
            path = config.base_dir / config.matrices["file"]
            with open(path) as fh:
                state["sequence"] = ManagedSequence.from_json(json.load(fh))
        seq = state["sequence"]
        if len(seq) < 1:
            raise _StageFailed("matrix sequence is empty")
        emit("matrices", seq.to_json())
        detail["matrices"] = len(seq)
        detail["ratios"] = [seq[i].ratio for i in range(len(seq))]
        return detail

    def stage_build_hierarchy() -> dict:
        ladder, seq = state["ladder"], state["sequence"]
        boundaries = select_subsequence_lemma8(seq, config.lemma8_bound)
        if len(boundaries) - 1 < config.hierarchy_depth:
            raise _StageFailed(
                f"grouping yields {len(boundaries) - 1} usable levels, "
                f"need {config.hierarchy_depth}", {"boundaries": boundaries})
        boundaries = boundaries[:config.hierarchy_depth + 1]
        grouped = group_matrices(seq, boundaries)
        augmented = [augment_matrix(grouped[i]) for i in range(len(grouped))]
        tiled = group_ladder(ladder, boundaries)
        hierarchy = build_hierarchy(tiled, augmented)
        state["hierarchy"] = hierarchy
        state["augmented"] = augmented
        emit("hierarchy", hierarchy.to_json())
        return {"boundaries": boundaries,
                "block_counts": [len(f) for f in hierarchy.families],
                "window_sizes": [len(F) for F in tiled.levels[:len(hierarchy.families)]]}

    def stage_verify_dynamics() -> dict:
        h: BlockHierarchy = state["hierarchy"]
        detail: dict = {"c3_levels": [], "pairs": [], "kr": []}
        for lvl in range(h.depth + 1):
            r = verify_c3(h.family(lvl))
            if not r.ok:
                raise _StageFailed(f"overlap rigidity fails at level {lvl}", r.to_json())
            detail["c3_levels"].append(lvl)
        for n, m in config.analysis.get("pairs", []):
            algebraic = return_times(h, n, m)
            scanned = scan_occurrences(h, n, m)
            size_ratio = len(h.ladder.levels[m]) // len(h.ladder.levels[n])
            if scanned.elements != algebraic.elements or len(algebraic) != size_ratio:
                raise _StageFailed(f"return-time oracles disagree at ({n}, {m})")
            detail["pairs"].append({"levels": [n, m], "count": len(algebraic)})
        for n, m in config.analysis.get("kr", []):
            r = check_partitions(h, n, m)
            if not r.ok:
                raise _StageFailed(f"tower partition fails at ({n}, {m}): {r.reason}", r.to_json())
            detail["kr"].append(r.to_json())
        if h.depth >= 2:
            syn = syndeticity_window(h, CylinderId(0, 1), h.depth)
            if not syn.ok:
                raise _StageFailed(f"syndeticity window fails: {syn.reason}", syn.to_json())
            detail["syndeticity"] = syn.to_json()
        ladder = state["ladder"]
        gens = standard_generators(ladder.ctx)
        detail["boundary_mass"] = {
            json.dumps(ladder.ctx.encode_json(g)): [
                str(boundary_mass_bound(ladder, g, lvl))
                for lvl in config.analysis.get("boundary_levels", [])
            ]
            for g in gens
        }
        return detail

    def stage_measure_limits() -> dict:
        h: BlockHierarchy = state["hierarchy"]
        seq: ManagedSequence = state["sequence"]
        augmented = state["augmented"]
        detail: dict = {}
        for n in range(h.depth):
            recounted = incidence_from_hierarchy(h, n)
            if recounted != augmented[n]:
                raise _StageFailed(f"incidence round-trip fails at level {n}",
                                   {"expected": augmented[n].to_json(),
                                    "got": recounted.to_json()})
        detail["round_trip_levels"] = h.depth
        certificates = []
        for d in range(1, len(seq)):
            cert = check_nesting(seq, 0, d)
            if not cert.ok:
                raise _StageFailed(f"nesting certificate fails at depth {d}", cert.to_json())
            certificates.append({"depth": d, "method": cert.method})
        detail["nesting"] = certificates
        if "realized" in state:
            realized = state["realized"]
            tol = Fraction(config.matrices["realize"]["tolerance"])
            diams = tail_cluster_diameters(seq, 0, len(seq))
            if any(x > tol for x in diams):
                raise _StageFailed("cluster diameters exceed tolerance",
                                   {"diameters": [str(x) for x in diams]})
            detail["cluster_diameters"] = [str(x) for x in diams]
            detail["tolerance"] = str(tol)
        return detail

    bodies = {
        "build-ladder": stage_build_ladder,
        "check-congruence": stage_check_congruence,
        "build-matrices": stage_build_matrices,
        "build-hierarchy": stage_build_hierarchy,
        "verify-dynamics": stage_verify_dynamics,
        "measure-limits": stage_measure_limits,
    }

    failed = False
    for name in STAGES:
        if failed:
            report.stages.append(StageResult(name, False, {"skipped": True},
                                             "skipped: earlier stage failed"))
            continue
        started = time.perf_counter()
        try:
            detail = bodies[name]()
            report.stages.append(StageResult(name, True, detail))
        except _StageFailed as e:
            report.stages.append(StageResult(name, False, e.detail, e.witness))
            failed = True
        except (MonotileError, ValueError, OSError, KeyError) as e:
            report.stages.append(StageResult(name, False, {},
                                             f"{type(e).__name__}: {e}"))
            failed = True
        report.timings[name] = time.perf_counter() - started
        if verbose:
            status = "ok" if report.stages[-1].ok else "FAIL"
            print(f"[{name}] {status} ({report.timings[name]:.2f}s)")

    report.artifacts["report"] = config.artifacts["report"]
    emit("report", report.artifact_json())
    return report

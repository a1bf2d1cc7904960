"""Declarative Monte Carlo sweeps over base-graph families and edge
probabilities.

Config files are line-oriented::

    family = random_regular
    n = 20000
    seed = 7
    mode = both

    [grid]
    r=8 epsilon=0.5 trials=100
    r=16 epsilon=0.5 trials=100

A grid point fixes the percolation probability through exactly one of
``epsilon`` (``p = (1 + epsilon) / r``), ``c`` (``p = c / n`` for complete
graphs, ``c / r`` otherwise) or ``p``. Values are resolved with precedence
override (command-line flag) > grid line > top-level key > default; the
``epsilon``/``c``/``p`` trio is taken as a unit from the highest layer that
sets any of them.

Trial ``t`` of grid point ``i`` uses seed ``derive_seed(master, i, t)``. In
coupled mode it uses ``derive_seed(master, "coupled", t)`` instead, so every
grid point of one base graph thresholds the same per-edge variates and the
planarity indicator of a trial is monotone along the p-grid. Random base
graphs use ``derive_seed(master, "graph")``, so points that differ only in
probability share one base graph.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional, Sequence

from .generators import FamilySpec, FamilySpecError, GenerationError, generate
from .graph import Graph, largest_component
from .percolation import coupled_sampler, derive_seed
from .planarity import is_planar
from .witness import WitnessParams, find_witness

__all__ = [
    "ConfigError",
    "SweepError",
    "ExperimentConfig",
    "ResolvedPoint",
    "TrialRecord",
    "PointSummary",
    "CSV_COLUMNS",
    "SUMMARY_COLUMNS",
    "MODES",
    "parse_config",
    "load_config",
    "run_sweep",
    "run_trial",
    "summarize",
    "wilson_interval",
    "emit_csv",
    "format_csv",
    "format_summary",
]

MODES = ("oracle-only", "witness-only", "both")
_MODE_ALIASES = {"oracle": "oracle-only", "witness": "witness-only"}

FAMILY_KEYS = ("n", "a", "b", "d", "rows", "cols", "r", "copies", "path")
PROBABILITY_KEYS = ("epsilon", "c", "p")
POINT_KEYS = FAMILY_KEYS + PROBABILITY_KEYS + ("trials",)
TOP_KEYS = ("family", "seed", "mode", "out", "threads", "ell", "coupled",
            "record_runtime") + POINT_KEYS

_INT_KEYS = {"n", "a", "b", "d", "rows", "cols", "r", "copies", "trials", "seed",
             "threads", "ell"}
_FLOAT_KEYS = {"epsilon", "c", "p"}
_BOOL_KEYS = {"coupled", "record_runtime"}

CSV_COLUMNS = ("family", "n", "m", "r", "epsilon", "p", "seed", "trial", "oracle_planar",
               "witness_outcome", "certificate_kind", "giant_vertices", "giant_edges",
               "runtime_ms")
SUMMARY_COLUMNS = ("grid_index", "family", "n", "r", "epsilon", "p", "trials", "planar",
                   "planar_rate", "planar_lo", "planar_hi", "witness_trials", "certified",
                   "certified_rate", "certified_lo", "certified_hi", "mean_giant_fraction")


class ConfigError(ValueError):
    pass


class SweepError(RuntimeError):
    def __init__(self, message: str, partial_path: Optional[str] = None):
        super().__init__(message)
        self.partial_path = partial_path


# --- configuration -----------------------------------------------------------


def _convert(key: str, raw, where: str):
    if not isinstance(raw, str):
        return raw
    try:
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            return float(raw)
    except ValueError:
        raise ConfigError(f"{where}: {key} must be a number, got {raw!r}") from None
    if key in _BOOL_KEYS:
        low = raw.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{where}: {key} must be a boolean, got {raw!r}")
    return raw


@dataclass(frozen=True)
class ResolvedPoint:
    index: int
    spec: FamilySpec
    trials: int
    epsilon: Optional[float]
    c: Optional[float]
    p: Optional[float]

    def probability(self, graph: Graph) -> float:
        r = int(graph.degrees.min()) if graph.n else 0
        if self.p is not None:
            return self.p
        if self.c is not None:
            scale = graph.n if self.spec.family == "complete" else r
            return min(1.0, self.c / scale)
        return min(1.0, (1 + self.epsilon) / r)

    def describe(self) -> str:
        prob = next(f"{k}={getattr(self, k)}" for k in PROBABILITY_KEYS
                    if getattr(self, k) is not None)
        fam = ", ".join(f"{k}={v}" for k, v in vars(self.spec).items()
                        if v is not None and k != "family")
        return f"grid point {self.index} ({self.spec.family} {fam}; {prob})"


@dataclass(frozen=True)
class ExperimentConfig:
    """A sweep: family, grid of points and run options.

    ``defaults`` holds top-level family/probability/trial keys, ``grid`` one
    mapping per ``[grid]`` line, ``overrides`` values that beat both.
    """

    family: str
    grid: tuple[Mapping, ...]
    defaults: Mapping = field(default_factory=dict)
    overrides: Mapping = field(default_factory=dict)
    seed: int = 0
    mode: str = "both"
    out: Optional[str] = None
    threads: int = 1
    ell: Optional[int] = None
    coupled: bool = False
    record_runtime: bool = False

    def __post_init__(self):
        mode = _MODE_ALIASES.get(self.mode, self.mode)
        object.__setattr__(self, "mode", mode)
        if mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not self.grid:
            raise ConfigError("the grid has no points")
        if self.threads < 1:
            raise ConfigError(f"threads must be >= 1, got {self.threads}")
        if self.ell is not None and self.ell < 3:
            raise ConfigError(f"ell must be >= 3, got {self.ell}")
        for layer in (self.defaults, self.overrides, *self.grid):
            bad = set(layer) - set(POINT_KEYS)
            if bad:
                raise ConfigError(f"unknown key(s) {sorted(bad)}")
        self.points()  # every point must resolve

    def with_overrides(self, **values) -> "ExperimentConfig":
        """Apply command-line values; run options replace fields, point keys
        go into ``overrides``."""
        run_opts = {k: v for k, v in values.items() if v is not None and k not in POINT_KEYS}
        point = {k: v for k, v in values.items() if v is not None and k in POINT_KEYS}
        bad = set(run_opts) - set(TOP_KEYS)
        if bad:
            raise ConfigError(f"unknown key(s) {sorted(bad)}")
        return replace(self, overrides={**self.overrides, **point}, **run_opts)

    def points(self) -> list[ResolvedPoint]:
        return [self._resolve(i) for i in range(len(self.grid))]

    def _resolve(self, i: int) -> ResolvedPoint:
        layers = (self.defaults, self.grid[i], self.overrides)
        merged: dict = {}
        prob: dict = {}
        for layer in layers:
            merged.update({k: v for k, v in layer.items() if k not in PROBABILITY_KEYS})
            if any(k in layer for k in PROBABILITY_KEYS):
                prob = {k: layer[k] for k in PROBABILITY_KEYS if k in layer}
        where = f"grid point {i}"
        if len(prob) != 1:
            raise ConfigError(f"{where}: set exactly one of epsilon, c, p (got {sorted(prob)})")
        (pkey, pval), = prob.items()
        if pkey == "p" and not 0 <= pval <= 1:
            raise ConfigError(f"{where}: p must lie in [0, 1], got {pval}")
        if pkey != "p" and not pval > 0:
            raise ConfigError(f"{where}: {pkey} must be > 0, got {pval}")
        trials = merged.pop("trials", 1)
        if trials < 1:
            raise ConfigError(f"{where}: trials must be >= 1, got {trials}")
        fam = {("dim" if k == "d" else k): v for k, v in merged.items()}
        try:
            spec = FamilySpec(self.family, **fam)
        except (FamilySpecError, TypeError) as exc:
            raise ConfigError(f"{where}: {exc}") from None
        return ResolvedPoint(i, spec, trials, **{k: prob.get(k) for k in PROBABILITY_KEYS})


def parse_config(text: str) -> ExperimentConfig:
    top: dict = {}
    grid: list[dict] = []
    in_grid = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"line {lineno}"
        if line.startswith("["):
            if line != "[grid]":
                raise ConfigError(f"{where}: unknown section {line!r}")
            in_grid = True
            continue
        if in_grid:
            point = {}
            for token in line.split():
                key, sep, value = token.partition("=")
                if not sep or not key or not value:
                    raise ConfigError(f"{where}: expected key=value, got {token!r}")
                if key not in POINT_KEYS:
                    raise ConfigError(f"{where}: unknown grid key {key!r}")
                if key in point:
                    raise ConfigError(f"{where}: repeated key {key!r}")
                point[key] = _convert(key, value, where)
            grid.append(point)
            continue
        key, sep, value = (s.strip() for s in line.partition("="))
        if not sep or not key:
            raise ConfigError(f"{where}: expected 'key = value', got {line!r}")
        if key not in TOP_KEYS:
            raise ConfigError(f"{where}: unknown key {key!r}")
        if key in top:
            raise ConfigError(f"{where}: repeated key {key!r}")
        top[key] = _convert(key, value, where)
    if "family" not in top:
        raise ConfigError("missing required key 'family'")
    run_opts = {k: top.pop(k) for k in list(top) if k not in POINT_KEYS}
    return ExperimentConfig(grid=tuple(grid), defaults=top, **run_opts)


def load_config(path: str | os.PathLike) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


# --- trials ------------------------------------------------------------------


@dataclass(frozen=True)
class TrialRecord:
    family: str
    n: int
    m: int
    r: int
    epsilon: Optional[float]
    p: float
    seed: int
    trial: int
    oracle_planar: Optional[bool]
    witness_outcome: str
    certificate_kind: str
    giant_vertices: int
    giant_edges: int
    runtime_ms: Optional[float] = None
    grid_index: int = 0


def run_trial(graph: Graph, point: ResolvedPoint, trial: int, seed: int, mode: str,
              ell: Optional[int] = None, record_runtime: bool = False) -> TrialRecord:
    """One percolation trial: sample, oracle and/or witness, giant component."""
    start = time.perf_counter()
    r = int(graph.degrees.min()) if graph.n else 0
    p = point.probability(graph)
    sample = coupled_sampler(graph, seed).query(p)
    planar = is_planar(sample) if mode != "witness-only" else None

    outcome, kind = "", ""
    if mode != "oracle-only":
        epsilon = point.epsilon if point.epsilon is not None else p * r - 1
        if epsilon > 0 and r > 0:
            overrides = {} if ell is None else {"ell": ell}
            params = WitnessParams.for_graph(epsilon, r, graph.n, **overrides)
            report = find_witness(graph, epsilon, seed, params=params, p=p)
            outcome = report.outcome
            kind = report.certificate.kind if report.certificate else ""
            if report.certified and planar:
                raise AssertionError(f"certified witness on a planar sample (seed {seed})")
        else:
            outcome = "subcritical"

    giant, _ = largest_component(sample)
    runtime = (time.perf_counter() - start) * 1000 if record_runtime else None
    return TrialRecord(
        family=point.spec.family, n=graph.n, m=graph.m, r=r, epsilon=point.epsilon, p=p,
        seed=seed, trial=trial, oracle_planar=planar, witness_outcome=outcome,
        certificate_kind=kind, giant_vertices=giant.n, giant_edges=giant.m,
        runtime_ms=runtime, grid_index=point.index)


def _trial_seed(config: ExperimentConfig, grid_index: int, trial: int) -> int:
    if config.coupled:
        return derive_seed(config.seed, "coupled", trial)
    return derive_seed(config.seed, grid_index, trial)


def run_sweep(config: ExperimentConfig, partial_path: Optional[str] = None) -> list[TrialRecord]:
    """Run every (grid point, trial); records come back sorted by
    (grid index, trial) whatever the thread count.

    If a trial fails, the records finished so far are written to
    ``partial_path`` (default ``<out>.partial`` when ``out`` is set) and a
    :class:`SweepError` naming the grid point and trial is raised.
    """
    points = config.points()
    graphs: dict[FamilySpec, Graph] = {}
    for pt in points:
        if pt.spec not in graphs:
            try:
                graphs[pt.spec] = generate(pt.spec, derive_seed(config.seed, "graph"))
            except (GenerationError, FamilySpecError, OSError, ValueError) as exc:
                raise SweepError(f"{pt.describe()}: base graph generation failed: {exc}") from exc

    tasks = [(pt, t) for pt in points for t in range(pt.trials)]

    def work(task):
        pt, t = task
        return run_trial(graphs[pt.spec], pt, t, _trial_seed(config, pt.index, t), config.mode,
                         config.ell, config.record_runtime)

    done: dict[int, TrialRecord] = {}
    failure = None
    with ThreadPoolExecutor(max_workers=config.threads) as pool:
        futures = [pool.submit(work, task) for task in tasks]
        for i, fut in enumerate(futures):
            try:
                done[i] = fut.result()
            except Exception as exc:  # noqa: BLE001 - reported with context below
                if failure is None:
                    failure = (i, exc)
                    for later in futures[i + 1:]:
                        later.cancel()
    if failure is not None:
        i, exc = failure
        pt, t = tasks[i]
        path = partial_path or (f"{config.out}.partial" if config.out else None)
        if path:
            emit_csv([done[k] for k in sorted(done)], path)
        note = f"; partial results in {path}" if path else ""
        raise SweepError(f"{pt.describe()} trial {t} failed: {exc!r}{note}", path) from exc
    return [done[i] for i in range(len(tasks))]


# --- summaries ---------------------------------------------------------------


def wilson_interval(successes: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        return 0.0, 1.0
    if not 0 <= successes <= trials:
        raise ValueError(f"need 0 <= successes <= trials, got {successes}/{trials}")
    phat = successes / trials
    z2 = z * z
    denom = 1 + z2 / trials
    centre = (phat + z2 / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z2 / (4 * trials * trials)) / denom
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == trials else min(1.0, centre + half)
    return lo, hi


@dataclass(frozen=True)
class PointSummary:
    grid_index: int
    family: str
    n: int
    r: int
    epsilon: Optional[float]
    p: float
    trials: int
    planar: int
    planar_interval: tuple[float, float]
    witness_trials: int
    certified: int
    certified_interval: tuple[float, float]
    mean_giant_fraction: float

    @property
    def planar_rate(self) -> float:
        return self.planar / self.trials if self.trials else float("nan")

    @property
    def certified_rate(self) -> float:
        return self.certified / self.witness_trials if self.witness_trials else float("nan")


def summarize(records: Sequence[TrialRecord]) -> list[PointSummary]:
    """Per grid point counts and Wilson 95% intervals.

    ``trials`` and the planar interval count only records where the oracle
    ran; ``witness_trials`` counts records where the witness ran.
    """
    groups: dict[int, list[TrialRecord]] = {}
    for rec in records:
        groups.setdefault(rec.grid_index, []).append(rec)
    out = []
    for idx in sorted(groups):
        recs = groups[idx]
        oracle = [r for r in recs if r.oracle_planar is not None]
        planar = sum(1 for r in oracle if r.oracle_planar)
        witness = [r for r in recs if r.witness_outcome not in ("", "subcritical")]
        certified = sum(1 for r in witness if r.witness_outcome == "certified")
        first = recs[0]
        out.append(PointSummary(
            grid_index=idx, family=first.family, n=first.n, r=first.r, epsilon=first.epsilon,
            p=first.p, trials=len(oracle), planar=planar,
            planar_interval=wilson_interval(planar, len(oracle)),
            witness_trials=len(witness), certified=certified,
            certified_interval=wilson_interval(certified, len(witness)),
            mean_giant_fraction=math.fsum(r.giant_vertices / r.n for r in recs) / len(recs)
            if first.n else 0.0))
    return out


# --- CSV ---------------------------------------------------------------------


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".10g")
    return str(value)


def _summary_row(s: PointSummary) -> list:
    return [s.grid_index, s.family, s.n, s.r, s.epsilon, s.p, s.trials, s.planar,
            s.planar_rate if s.trials else None, *s.planar_interval, s.witness_trials,
            s.certified, s.certified_rate if s.witness_trials else None,
            *s.certified_interval, s.mean_giant_fraction]


def format_csv(items: Iterable) -> str:
    """CSV text for trial records, or for point summaries."""
    items = list(items)
    summary = bool(items) and isinstance(items[0], PointSummary)
    lines = [",".join(SUMMARY_COLUMNS if summary else CSV_COLUMNS)]
    for item in items:
        row = _summary_row(item) if summary else [getattr(item, c) for c in CSV_COLUMNS]
        lines.append(",".join(_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def emit_csv(items: Iterable, path: str | os.PathLike) -> None:
    text = format_csv(items)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write CSV to {os.fspath(path)}: {exc.strerror}") from exc


def format_summary(stats: Sequence[PointSummary]) -> str:
    """Fixed-width table for terminals."""
    head = f"{'pt':>3} {'family':<18} {'n':>7} {'r':>5} {'p':>11} {'trials':>6} " \
           f"{'P(planar)':>9} {'95% CI':>17} {'certified':>9} {'95% CI':>17}"
    rows = [head]
    for s in stats:
        pr = f"{s.planar_rate:.3f}" if s.trials else "-"
        pci = f"[{s.planar_interval[0]:.3f}, {s.planar_interval[1]:.3f}]" if s.trials else "-"
        cr = f"{s.certified_rate:.3f}" if s.witness_trials else "-"
        cci = (f"[{s.certified_interval[0]:.3f}, {s.certified_interval[1]:.3f}]"
               if s.witness_trials else "-")
        rows.append(f"{s.grid_index:>3} {s.family:<18} {s.n:>7} {s.r:>5} {s.p:>11.5g} "
                    f"{max(s.trials, s.witness_trials):>6} {pr:>9} {pci:>17} {cr:>9} {cci:>17}")
    return "\n".join(rows)

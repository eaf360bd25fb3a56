"""Replica ensembles, estimators and their on-disk outputs.

A run is described by a small ``key = value`` config file (``schema = 1``,
see :data:`SCHEMA`). Replica ``r`` draws from the streams keyed by
``(master_seed, r)``, so results do not depend on the worker count or the
order in which replicas finish. Per-replica records are rounded to 15
significant digits before aggregation; the aggregates in ``ensemble.json``
can therefore be recomputed exactly from ``replicas.csv``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np
from scipy.stats import beta as _beta

from . import __version__
from . import conservative as C
from . import growth as G
from . import risk as RK
from . import rng as R
from . import urn as U
from .errors import ConfigError, DomainError, IncompatibleSampling, ZeroFinalState
from .graph import Graph, load_graph
from .spectral import SpectralData, perron_eigenpair

TARGETS = ("urn", "conservative", "growth")
SAMPLING = ("stride", "checkpoints")

# key -> (type, default); list types are comma separated
SCHEMA: dict[str, tuple[str, Any]] = {
    "schema": ("int", None),
    "target": ("str", None),
    "graph": ("str", None),
    "geometry": ("str", G.PLANE),
    "init": ("path", None),
    "z": ("ints", None),
    "replicas": ("int", 1),
    "master_seed": ("int", 0),
    "max_steps": ("int", None),
    "max_time": ("float", None),
    "stop_when_monochromatic": ("bool", False),
    "single_colour_boundary": ("bool", False),
    "min_total": ("int", None),
    "sampling": ("str", "stride"),
    "stride": ("int", 0),
    "checkpoints": ("floats", ()),
    "monitors": ("strs", ()),
    "alpha": ("float", RK.DEFAULT_ALPHA),
    "n": ("ints", RK.DEFAULT_N_GRID),
    "sample_k": ("ints", (0, 1, 2, 5, 10, 100, 1000)),
    "workers": ("int", 1),
}


def _conv(kind: str, raw: str, key: str):
    try:
        if kind == "int":
            return int(raw, 0)
        if kind == "float":
            return float(raw)
        if kind == "bool":
            v = raw.lower()
            if v not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(raw)
            return v in ("true", "1", "yes")
        if kind in ("str", "path"):
            return raw.strip().strip('"')
        parts = [p.strip() for p in raw.split(",") if p.strip()]
        if kind == "ints":
            return tuple(int(p, 0) for p in parts)
        if kind == "floats":
            return tuple(float(p) for p in parts)
        return tuple(p.strip('"') for p in parts)
    except ValueError:
        raise ConfigError(f"{key}: cannot read {raw!r} as {kind}") from None


@dataclass(frozen=True)
class ExperimentConfig:
    target: str
    graph: str | None = None
    geometry: str = G.PLANE
    init: str | None = None
    z: tuple[int, ...] | None = None
    replicas: int = 1
    master_seed: int = 0
    max_steps: int | None = None
    max_time: float | None = None
    stop_when_monochromatic: bool = False
    single_colour_boundary: bool = False
    min_total: int | None = None
    sampling: str = "stride"
    stride: int = 0
    checkpoints: tuple[float, ...] = ()
    monitors: tuple[str, ...] = ()
    alpha: float = RK.DEFAULT_ALPHA
    n: tuple[int, ...] = RK.DEFAULT_N_GRID
    sample_k: tuple[int, ...] = (0, 1, 2, 5, 10, 100, 1000)
    workers: int = 1
    schema: int = 1

    def __post_init__(self):
        if self.schema != 1:
            raise ConfigError(f"unsupported schema {self.schema}")
        if self.target not in TARGETS:
            raise ConfigError(f"target must be one of {', '.join(TARGETS)}")
        if self.replicas < 1:
            raise ConfigError("replicas must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.sampling not in SAMPLING:
            raise ConfigError(f"sampling must be one of {', '.join(SAMPLING)}")
        if self.sampling == "checkpoints" and not self.checkpoints:
            raise ConfigError("checkpoint sampling needs checkpoints")
        if self.target in ("urn", "conservative") and self.graph is None:
            raise ConfigError(f"target {self.target} needs a graph")
        if self.target != "growth" and self.init is None and self.z is None and not self.risk:
            raise ConfigError("give an initial configuration (init or z)")
        if self.target == "growth" and self.init is None:
            raise ConfigError("target growth needs an init file")
        if self.init is not None and not Path(self.init).is_file():
            raise ConfigError(f"init file {self.init} does not exist")
        if self.graph and ":" not in self.graph and not Path(self.graph).is_file():
            raise ConfigError(f"graph file {self.graph} does not exist")
        if self.risk:
            if self.target != "urn":
                raise ConfigError("risk monitors run on the urn target")
            if self.max_steps is None:
                raise ConfigError("risk monitors need max_steps")
            if not 0 < self.alpha < 1 / 3:
                raise ConfigError("alpha must lie in (0, 1/3)")
        elif (self.max_steps is None and self.max_time is None and not self.min_total
              and not self.stop_when_monochromatic and not self.single_colour_boundary):
            raise ConfigError("no stop condition")

    @property
    def risk(self) -> bool:
        return "risk" in self.monitors

    @property
    def params(self) -> tuple[int | None, ...]:
        """Sub-ensembles: one per Risk ``n``, otherwise a single one."""
        return tuple(self.n) if self.risk else (None,)

    def to_dict(self) -> dict:
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in asdict(self).items()}


def parse_config(text: str, base: str | Path = ".") -> ExperimentConfig:
    """Read ``key = value`` lines; ``#`` starts a comment. Paths are relative to ``base``."""
    vals: dict[str, Any] = {}
    for no, raw in enumerate(text.splitlines(), 1):
        s = raw.split("#", 1)[0].strip()
        if not s:
            continue
        if "=" not in s:
            raise ConfigError(f"line {no}: expected 'key = value'")
        key, value = (p.strip() for p in s.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError(f"line {no}: unknown key {key!r}")
        if key in vals:
            raise ConfigError(f"line {no}: {key} given twice")
        kind = SCHEMA[key][0]
        v = _conv(kind, value, key)
        if kind == "path":
            v = str(Path(base) / v)
        vals[key] = v
    if "schema" not in vals:
        raise ConfigError("missing 'schema = 1'")
    if "target" not in vals:
        raise ConfigError("missing target")
    if "graph" in vals and ":" not in vals["graph"]:
        vals["graph"] = str(Path(base) / vals["graph"])
    try:
        return ExperimentConfig(**vals)
    except TypeError as e:
        raise ConfigError(str(e)) from None


def read_config(path: str | Path) -> ExperimentConfig:
    p = Path(path)
    return parse_config(p.read_text(encoding="utf-8"), p.parent)


# numbers --------------------------------------------------------------------

def r15(x: float) -> float:
    """Round to 15 significant digits (non-finite values pass through)."""
    x = float(x)
    return float(f"{x:.15g}") if math.isfinite(x) else x


def fmt(x) -> str:
    """Locale-independent text form used in CSV and console output."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, float):
        return f"{x:.15g}"
    return str(x)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        v = float(x)
        return r15(v) if math.isfinite(v) else None
    return x


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"


def clopper_pearson(k: int, n: int, level: float = 0.95) -> tuple[float, float]:
    """Exact binomial confidence interval."""
    a = 1 - level
    lo = 0.0 if k == 0 else float(_beta.ppf(a / 2, k, n - k + 1))
    hi = 1.0 if k == n else float(_beta.ppf(1 - a / 2, k + 1, n - k))
    return lo, hi


def mean_se(x: Sequence[float]) -> tuple[float, float]:
    a = np.asarray(x, dtype=float)
    if a.size == 0:
        return math.nan, math.nan
    se = float(a.std(ddof=1) / math.sqrt(a.size)) if a.size > 1 else 0.0
    return float(a.mean()), se


# estimators -----------------------------------------------------------------

def w_estimate(z: np.ndarray, t: float, spec: SpectralData) -> float:
    """``exp(-lambda t) Z . pi`` evaluated through logs (lambda t may exceed 700)."""
    dot = float(np.dot(np.asarray(z, dtype=float), spec.pi))
    if dot == 0.0:
        return 0.0
    return math.copysign(math.exp(math.log(abs(dot)) - spec.lam * t), dot)


def estimate_W(traj: U.Trajectory, spec: SpectralData) -> float:  # noqa: N802
    """W estimate from the final state and time of an urn trajectory.

    Zero when the final signed state is orthogonal to pi, including the zero
    vector; a persistent zero points at a bug or too short a run.
    """
    return w_estimate(traj.final.signed, traj.final.time, spec)


def angle_to_pi(z: np.ndarray, spec: SpectralData) -> float:
    """Angle between ``z / |z|`` and ``sign(z . pi) pi``."""
    z = np.asarray(z, dtype=float)
    nz = float(np.linalg.norm(z))
    if nz == 0.0:
        raise ZeroFinalState("final state is zero")
    c = float(np.dot(z, spec.pi)) / nz
    return float(math.acos(min(1.0, abs(c))))


# per-replica runs -----------------------------------------------------------

def _urn_initial(cfg: ExperimentConfig, g: Graph, param) -> U.UrnState:
    if cfg.risk:
        return RK.initial_state((g.n - 1) // 2, int(param))
    if cfg.z is not None:
        if len(cfg.z) != g.n:
            raise ConfigError(f"z has {len(cfg.z)} entries for a graph on {g.n} vertices")
        return U.from_signed(g, cfg.z)
    return U.read_init(cfg.init, g)


def _urn_record(cfg: ExperimentConfig, g: Graph, spec: SpectralData | None, param, r: int) -> dict:
    sel, clk = R.streams(R.resolve_seed(cfg.master_seed), r)
    state = _urn_initial(cfg, g, param)
    rec: dict[str, Any] = {"replica": r, "param": param}
    if cfg.risk:
        rep = RK.run_risk(state, n=int(param), alpha=cfg.alpha, rng=sel, clock=clk,
                          max_steps=cfg.max_steps,
                          sample_k=tuple(k for k in cfg.sample_k if k < cfg.max_steps))
        rec["stop_reason"] = "step budget"
        rec["ext"] = [int(v) for v in rep.extinction_steps]
        rec["T"] = rep.T
        for e in RK.EVENTS:
            rec[f"hit_{e}"] = rep.first_hit[e]
        rec["y_before"] = rep.Y_before.tolist()
        rec["y_after"] = rep.Y_after.tolist()
    else:
        cps = cfg.checkpoints if cfg.sampling == "checkpoints" else None
        tr = U.run_until(state, max_steps=cfg.max_steps, max_time=cfg.max_time,
                         stop_when_monochromatic=cfg.stop_when_monochromatic,
                         min_total=cfg.min_total, rng=sel, clock=clk, checkpoints=cps,
                         stride=max(cfg.stride, 1), record=cfg.stride > 0)
        rec["stop_reason"] = tr.stop_reason
        rec["ext"] = [int(v) for v in tr.extinction_steps]
        if cps is not None:
            cp = tr.checkpoints
            sig = cp.signed()
            if spec is not None and state.n_colours <= 2:
                rec["mart"] = [w_estimate(sig[i], cp.times[i], spec) if i < cp.reached
                               else math.nan for i in range(len(cp.times))]
    rec["steps"] = state.step
    rec["time"] = state.time
    rec["survivors"] = sorted(U.survivors(state))
    rec["total"] = state.total_balls
    if state.n_colours <= 2:
        z = state.signed
        rec["z"] = [int(v) for v in z]
        if spec is not None:
            rec["W"] = w_estimate(z, state.time, spec)
            rec["angle"] = angle_to_pi(z, spec) if np.any(z) else math.nan
    return rec


def _conservative_record(cfg: ExperimentConfig, g: Graph, spec: SpectralData | None, r: int) -> dict:
    sel, clk = R.streams(R.resolve_seed(cfg.master_seed), r)
    z0 = cfg.z if cfg.z is not None else U.read_init(cfg.init, g).signed
    state = C.init_conservative(g, z0)
    code, *_ = C.run_conservative(state, rng=sel, clock=clk, max_steps=cfg.max_steps,
                                  max_time=cfg.max_time)
    z = state.Z
    names = {C.K.STEP_BUDGET: "step budget", C.K.TIME_BUDGET: "time budget",
             C.K.EXTINCT: "extinct"}
    rec = {"replica": r, "param": None, "stop_reason": names.get(code, str(code)),
           "steps": state.step, "time": state.time, "total": int(np.abs(z).sum()),
           "survivors": sorted({0 if v > 0 else 1 for v in z if v != 0}),
           "ext": [], "z": [int(v) for v in z]}
    if spec is not None:
        rec["W"] = w_estimate(z, state.time, spec)
        rec["angle"] = angle_to_pi(z, spec) if np.any(z) else math.nan
    return rec


def _growth_record(cfg: ExperimentConfig, r: int) -> dict:
    sel, clk = R.streams(R.resolve_seed(cfg.master_seed), r)
    init = G.read_growth_init(cfg.init)
    state = G.init_growth(init, cfg.geometry, track_steps=False)
    tr = G.run_growth(state, rng=sel, clock=clk, max_steps=cfg.max_steps, max_time=cfg.max_time,
                      single_colour_boundary=cfg.single_colour_boundary)
    return {"replica": r, "param": None, "stop_reason": tr.stop_reason, "steps": state.step,
            "time": state.time, "total": state.n_coloured,
            "survivors": sorted(state.boundary_colours()), "ext": []}


def run_replica(cfg: ExperimentConfig, param, r: int) -> dict:
    """One replica as a flat record; engine errors are recorded, not raised."""
    try:
        if cfg.target == "growth":
            rec = _growth_record(cfg, r)
        else:
            g = load_graph(cfg.graph)
            spec = perron_eigenpair(g)
            if cfg.target == "urn":
                rec = _urn_record(cfg, g, spec, param, r)
            else:
                rec = _conservative_record(cfg, g, spec, r)
        rec["error"] = ""
    except DomainError as e:
        rec = {"replica": r, "param": param, "stop_reason": "error", "error": str(e)}
    return _round(rec)


def _round(x):
    if isinstance(x, dict):
        return {k: _round(v) for k, v in x.items()}
    if isinstance(x, list):
        return [_round(v) for v in x]
    if isinstance(x, (float, np.floating)):
        return r15(x)
    return x


def _chunk(args) -> list[dict]:
    cfg, param, lo, hi = args
    return [run_replica(cfg, param, r) for r in range(lo, hi)]


# aggregation ----------------------------------------------------------------

@dataclass
class EnsembleResult:
    config: ExperimentConfig
    records: list[dict]
    aggregates: dict = field(default_factory=dict)

    def group(self, param=None) -> list[dict]:
        return [r for r in self.records if r.get("param") == param]


def aggregate(cfg: ExperimentConfig, records: list[dict]) -> dict:
    """Aggregates per sub-ensemble, computed only from ``records``."""
    out = {}
    for param in cfg.params:
        recs = [r for r in records if r.get("param") == param and not r.get("error")]
        n = len(recs)
        agg: dict[str, Any] = {"replicas": n,
                               "errors": sum(1 for r in records
                                             if r.get("param") == param and r.get("error"))}
        by = {}
        for r in recs:
            k = len(r["survivors"])
            by[k] = by.get(k, 0) + 1
        agg["survivor_count_frequency"] = {str(k): by[k] / n for k in sorted(by)} if n else {}
        if cfg.target == "growth":
            hit = sum(1 for r in recs if r["stop_reason"] == "single colour boundary")
            agg["single_colour_fraction"] = hit / n if n else math.nan
            agg["single_colour_ci95"] = list(clopper_pearson(hit, n)) if n else []
            agg["stop_reasons"] = _count([r["stop_reason"] for r in recs])
        else:
            mono = sum(1 for r in recs if len(r["survivors"]) <= 1)
            agg["monochromatic_fraction"] = mono / n if n else math.nan
            agg["monochromatic_ci95"] = list(clopper_pearson(mono, n)) if n else []
            if cfg.risk:
                s = len(recs[0]["ext"]) if recs else 0
                alive = sum(1 for r in recs if len(r["survivors"]) == s)
                agg["all_alive_fraction"] = alive / n if n else math.nan
                agg["all_alive_ci95"] = list(clopper_pearson(alive, n)) if n else []
                for e in RK.EVENTS:
                    agg[f"event_{e}_fraction"] = sum(1 for r in recs
                                                     if r[f"hit_{e}"] is not None) / n
                agg["increments"] = _increments(cfg, recs)
            if recs and "W" in recs[0]:
                m, se = mean_se([r["W"] for r in recs])
                agg["W_mean"], agg["W_se"] = m, se
                angles = [r["angle"] for r in recs if not math.isnan(r["angle"])]
                agg["zero_final_states"] = sum(1 for r in recs if not any(r["z"]))
                if angles:
                    q = np.quantile(angles, [0.1, 0.5, 0.9])
                    agg["angle_quantiles"] = {"q10": q[0], "q50": q[1], "q90": q[2]}
            if recs and "mart" in recs[0]:
                agg["martingale"] = _martingale_rows(cfg, recs)
        out["all" if param is None else f"n={param}"] = agg
    return out


def _count(xs) -> dict:
    out: dict[str, int] = {}
    for x in xs:
        out[x] = out.get(x, 0) + 1
    return dict(sorted(out.items()))


def _increments(cfg: ExperimentConfig, recs: list[dict]) -> list[dict]:
    """Mean one-step increment of Y_k(j) over replicas with k < T."""
    rows = []
    ks = [k for k in cfg.sample_k if k < cfg.max_steps]
    for i, k in enumerate(sorted(ks)):
        live = [r for r in recs if r["T"] is None or k < r["T"]]
        s = len(recs[0]["ext"]) if recs else 0
        for j in range(s):
            d = [r["y_after"][i][j] - r["y_before"][i][j] for r in live]
            m, se = mean_se(d)
            rows.append({"k": k, "colour": j, "count": len(d), "mean": m, "se": se,
                         "ok": bool(len(d) == 0 or (not math.isnan(m) and m >= -3 * se))})
    return rows


def _martingale_rows(cfg: ExperimentConfig, recs: list[dict]) -> list[dict]:
    rows = []
    for i, t in enumerate(cfg.checkpoints):
        vals = [r["mart"][i] for r in recs if not math.isnan(r["mart"][i])]
        m, se = mean_se(vals)
        rows.append({"t": t, "count": len(vals), "mean": m, "se": se})
    return rows


def run_ensemble(cfg: ExperimentConfig, workers: int | None = None) -> EnsembleResult:
    """All replicas of every sub-ensemble, merged by replica index."""
    workers = cfg.workers if workers is None else workers
    jobs = []
    for param in cfg.params:
        per = max(1, -(-cfg.replicas // (4 * workers)))
        jobs += [(cfg, param, lo, min(lo + per, cfg.replicas))
                 for lo in range(0, cfg.replicas, per)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            chunks = list(ex.map(_chunk, jobs))
    else:
        chunks = [_chunk(j) for j in jobs]
    records = [rec for c in chunks for rec in c]
    order = {p: i for i, p in enumerate(cfg.params)}
    records.sort(key=lambda r: (order[r["param"]], r["replica"]))
    return EnsembleResult(cfg, records, aggregate(cfg, records))


# checks on ensembles --------------------------------------------------------

def martingale_check(results: EnsembleResult, x: Sequence[int], spec: SpectralData) -> list[dict]:
    """Per checkpoint, mean and SE of ``exp(-lambda t) Z(t) . pi`` against ``x . pi``.

    A checkpoint is flagged when the mean is more than 3 SE away (with SE 0
    any difference at all is flagged).
    """
    if results.config.sampling != "checkpoints":
        raise IncompatibleSampling("martingale check needs fixed-time checkpoint sampling")
    target = float(np.dot(np.asarray(x, dtype=float), spec.pi))
    recs = [r for r in results.records if not r.get("error")]
    rows = _martingale_rows(results.config, recs)
    for row in rows:
        row["target"] = target
        row["flagged"] = bool(abs(row["mean"] - target) > 3 * row["se"])
    return rows


def direction_check(results: EnsembleResult, spec: SpectralData,
                    allow_zero: bool = False) -> dict:
    """Quantiles of the angle between each final ``Z`` and ``+-pi``.

    Raises :class:`ZeroFinalState` on a zero final state unless
    ``allow_zero``, in which case such replicas are counted and skipped.
    """
    angles, zeros = [], 0
    for r in results.records:
        if r.get("error"):
            continue
        z = np.asarray(r["z"], dtype=float)
        if not z.any():
            if not allow_zero:
                raise ZeroFinalState(f"replica {r['replica']} ended with Z = 0")
            zeros += 1
            continue
        angles.append(angle_to_pi(z, spec))
    q = np.quantile(angles, [0.1, 0.5, 0.9]) if angles else [math.nan] * 3
    return {"count": len(angles), "zero_final_states": zeros,
            "q10": float(q[0]), "median": float(q[1]), "q90": float(q[2])}


# output files ---------------------------------------------------------------

REPLICA_COLUMNS = ("param", "replica", "stop_reason", "steps", "time", "total", "survivors",
                   "extinction_steps", "W", "angle", "z", "T", "hit_A", "hit_B", "hit_C",
                   "hit_D", "mart", "y_before", "y_after", "error")


def _cell(v) -> str:
    if isinstance(v, list):
        return ";".join(_cell(x) for x in v)
    return fmt(v)


def replicas_csv(result: EnsembleResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPLICA_COLUMNS)
    for r in result.records:
        row = dict(r)
        row["extinction_steps"] = r.get("ext", [])
        w.writerow([_cell(row.get(c)) for c in REPLICA_COLUMNS])
    return buf.getvalue()


def monitors_csv(result: EnsembleResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("group", "kind", "k_or_t", "colour", "count", "mean", "se", "flag"))
    for name, agg in result.aggregates.items():
        for row in agg.get("increments", []):
            w.writerow((name, "Y_increment", row["k"], row["colour"], row["count"],
                        fmt(row["mean"]), fmt(row["se"]), "ok" if row["ok"] else "negative"))
        for row in agg.get("martingale", []):
            w.writerow((name, "martingale", fmt(row["t"]), "", row["count"], fmt(row["mean"]),
                        fmt(row["se"]), ""))
    return buf.getvalue()


def ensemble_json(result: EnsembleResult) -> str:
    return dumps({"config": result.config.to_dict(), "version": __version__,
                  "rng": R.ALGORITHM, "master_seed": R.resolve_seed(result.config.master_seed),
                  "aggregates": result.aggregates})


def write_outputs(result: EnsembleResult, outdir: str | Path) -> list[Path]:
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    files = {"ensemble.json": ensemble_json(result), "replicas.csv": replicas_csv(result),
             "monitors.csv": monitors_csv(result)}
    paths = []
    for name, text in files.items():
        p = out / name
        p.write_text(text, encoding="utf-8", newline="\n")
        paths.append(p)
    return paths


def read_replicas_csv(text: str) -> list[dict]:
    """Inverse of :func:`replicas_csv` for the fields used by :func:`aggregate`."""
    rows = []
    for row in csv.DictReader(io.StringIO(text)):
        rec: dict[str, Any] = {"replica": int(row["replica"]),
                               "param": int(row["param"]) if row["param"] else None,
                               "stop_reason": row["stop_reason"], "error": row["error"]}
        if row["error"]:
            rows.append(rec)
            continue
        rec["steps"] = int(row["steps"])
        rec["time"] = float(row["time"])
        rec["total"] = int(row["total"])
        rec["survivors"] = _ints(row["survivors"])
        rec["ext"] = _ints(row["extinction_steps"])
        if row["z"]:
            rec["z"] = _ints(row["z"])
        if row["W"]:
            rec["W"] = float(row["W"])
            rec["angle"] = float(row["angle"])
        if row["mart"]:
            rec["mart"] = [float(v) for v in row["mart"].split(";")]
        if row["y_before"]:
            rec["T"] = int(row["T"]) if row["T"] else None
            for e in RK.EVENTS:
                rec[f"hit_{e}"] = int(row[f"hit_{e}"]) if row[f"hit_{e}"] else None
            rec["y_before"] = _grid(row["y_before"], len(rec["ext"]))
            rec["y_after"] = _grid(row["y_after"], len(rec["ext"]))
        rows.append(rec)
    return rows


def _ints(s: str) -> list[int]:
    return [int(v) for v in s.split(";")] if s else []


def _grid(s: str, width: int) -> list[list[float]]:
    v = [float(x) for x in s.split(";")]
    return [v[i:i + width] for i in range(0, len(v), width)]

"""Experiment harness: consensus/MSE runs, parameter sweeps, rate fits, CSV.

One repetition regenerates the graph (for random families) and the signal
from repetition-derived seeds, then runs every method on the identical
(graph, signal) pair, so curves are paired comparisons. Averaging across
repetitions happens at export/plot time; the CSV keeps raw per-repetition
rows.
"""
from __future__ import annotations

import io
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import FitError, SpecificationError
from .graphgen import (
    Graph,
    GraphSpec,
    GossipMatrix,
    build_gossip_matrix,
    generate,
    largest_component,
)
from .gossip import (
    JacobiGapIteration,
    LocalAverage,
    MessagePassing,
    MessagePassingRegular,
    ParameterFreeIteration,
    RecurrenceIteration,
    ShiftRegister,
    SimpleGossip,
    graph_distances,
)
from .orthopoly import (
    jacobi_general_recurrence,
    jacobi_recurrence,
    shift_register_omega,
)
from .spectral import eigendecompose

__all__ = [
    "MethodSpec",
    "ExperimentConfig",
    "ExperimentRecord",
    "RateFit",
    "parse_method",
    "run_consensus_experiment",
    "run_mse_experiment",
    "run_tuning_sweep",
    "tuning_region_ok",
    "fit_rate",
    "mean_curve",
    "export_csv",
    "read_csv",
    "format_records",
    "PRESETS",
    "preset_config",
    "reproduce",
]

_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (x ^ (x >> 31)) & _MASK64


def derive_seed(seed: int, *salt: int) -> int:
    """Stable per-repetition seed: mixing instead of seed+rep so that adding
    repetitions never perturbs earlier ones."""
    x = seed & _MASK64
    for s in salt:
        x = _splitmix64(x ^ (s & _MASK64))
    return x


@dataclass(frozen=True)
class MethodSpec:
    """A method name plus its parameters.

    Known names: simple, shift_register (omega:float|"auto"), jacobi (d),
    jacobi_general (alpha, beta), jacobi_gap (d, gamma:float|"auto"),
    parameter_free, message_passing, message_passing_regular, local_average.
    "auto" parameters are filled from the measured spectral gap.
    """

    name: str
    params: tuple[tuple[str, object], ...] = ()

    @staticmethod
    def make(name: str, **params) -> "MethodSpec":
        return MethodSpec(name=name, params=tuple(sorted(params.items())))

    def get(self, key: str, default=None):
        for k, v in self.params:
            if k == key:
                return v
        return default

    @property
    def label(self) -> str:
        if not self.params:
            return self.name
        inner = ";".join(f"{k}={v}" for k, v in self.params)
        return f"{self.name}({inner})"


def parse_method(text: str) -> MethodSpec:
    """Parse "name" or "name:key=value;key=value" (values float or "auto")."""
    name, _, rest = text.strip().partition(":")
    params = {}
    if rest:
        for item in rest.split(";"):
            key, _, val = item.partition("=")
            if not _:
                raise SpecificationError(f"malformed method parameter {item!r}")
            if val == "auto":
                params[key] = "auto"
            else:
                num = float(val)
                params[key] = int(num) if num.is_integer() else num
    return MethodSpec.make(name, **params)


@dataclass(frozen=True)
class ExperimentConfig:
    graph_spec: GraphSpec
    matrix_kind: str = "uniform_degree"
    d_max: int | None = None
    methods: tuple[MethodSpec, ...] = ()
    t_max: int = 100
    repetitions: int = 10
    seed: int = 0
    signal_mean: float = 0.0
    signal_std: float = 1.0
    constant_signal: float | None = None  # test hook: xi = constant vector

    def __post_init__(self):
        if self.t_max < 1:
            raise SpecificationError("t_max must be >= 1")
        if self.repetitions < 1:
            raise SpecificationError("repetitions must be >= 1")


@dataclass(frozen=True)
class ExperimentRecord:
    method: str
    rep: int
    t: int
    consensus_error: float
    mse: float | None = None


@dataclass(frozen=True)
class RateFit:
    method: str
    window: tuple[int, int]
    kind: str
    value: float  # per-step ratio (geometric) or log-log slope
    residual: float


_NEEDS_GRAPH = ("message_passing", "message_passing_regular", "local_average")


def _build_iterator(spec: MethodSpec, g: Graph, W: GossipMatrix, xi: np.ndarray,
                    gamma: float | None, distances: np.ndarray | None):
    name = spec.name
    if name == "simple":
        return SimpleGossip(W, xi)
    if name == "shift_register":
        omega = spec.get("omega", "auto")
        if omega == "auto":
            omega = shift_register_omega(gamma)
        return ShiftRegister(W, xi, float(omega))
    if name == "jacobi":
        d = spec.get("d")
        if d is None:
            raise SpecificationError("jacobi requires parameter d")
        d = int(d) if float(d).is_integer() else float(d)
        return RecurrenceIteration(W, xi, jacobi_recurrence(d))
    if name == "jacobi_general":
        alpha, beta = spec.get("alpha"), spec.get("beta")
        if alpha is None or beta is None:
            raise SpecificationError("jacobi_general requires alpha and beta")
        return RecurrenceIteration(W, xi, jacobi_general_recurrence(float(alpha), float(beta)))
    if name == "jacobi_gap":
        d = spec.get("d")
        gam = spec.get("gamma", "auto")
        if d is None:
            raise SpecificationError("jacobi_gap requires parameter d")
        if gam == "auto":
            gam = gamma
        return JacobiGapIteration(W, xi, float(d), float(gam))
    if name == "parameter_free":
        return ParameterFreeIteration(W, xi)
    if name == "message_passing":
        return MessagePassing(g, xi)
    if name == "message_passing_regular":
        return MessagePassingRegular(g, xi)
    if name == "local_average":
        return LocalAverage(g, xi, distances=distances)
    raise SpecificationError(f"unknown method {name!r}")


def _needs_gamma(methods: Sequence[MethodSpec]) -> bool:
    for m in methods:
        if m.name == "shift_register" and m.get("omega", "auto") == "auto":
            return True
        if m.name == "jacobi_gap" and m.get("gamma", "auto") == "auto":
            return True
    return False


def _rep_graph(cfg: ExperimentConfig, rep: int, cache: dict) -> Graph:
    spec = cfg.graph_spec
    random_family = spec.family in (
        "percolation_bond", "random_geometric", "random_regular", "random_tree"
    )
    if not random_family and "fixed" in cache:
        return cache["fixed"]
    if random_family:
        spec = replace(spec, seed=derive_seed(cfg.seed, rep, 0))
    g = generate(spec)
    if spec.family in ("percolation_bond", "random_geometric"):
        g, _ = largest_component(g)
    if not random_family:
        cache["fixed"] = g
    return g


def _run(cfg: ExperimentConfig, with_mse: bool) -> list[ExperimentRecord]:
    records: list[ExperimentRecord] = []
    cache: dict = {}
    dist_cache: dict[int, np.ndarray] = {}
    gamma_cache: dict[int, float] = {}
    for rep in range(cfg.repetitions):
        g = _rep_graph(cfg, rep, cache)
        W = build_gossip_matrix(g, cfg.matrix_kind, d_max=cfg.d_max)
        gamma = None
        if _needs_gamma(cfg.methods):
            if id(g) not in gamma_cache:
                gamma_cache.clear()
                gamma_cache[id(g)] = eigendecompose(W).gap
            gamma = gamma_cache[id(g)]
        if cfg.constant_signal is not None:
            xi = np.full(g.n, float(cfg.constant_signal))
        else:
            rng = np.random.default_rng(derive_seed(cfg.seed, rep, 1))
            xi = cfg.signal_mean + cfg.signal_std * rng.standard_normal(g.n)
        distances = None
        if any(m.name == "local_average" for m in cfg.methods):
            key = id(g)
            if key not in dist_cache:
                dist_cache.clear()  # only the current graph is ever needed
                dist_cache[key] = graph_distances(g)
            distances = dist_cache[key]
        xbar = float(xi.mean())
        sqrt_n = np.sqrt(g.n)
        iterators = [
            (m.label, _build_iterator(m, g, W, xi, gamma, distances)) for m in cfg.methods
        ]
        for label, it in iterators:
            for t in range(cfg.t_max + 1):
                if t > 0:
                    it.step()
                x = it.estimate()
                err = float(np.linalg.norm(x - xbar)) / sqrt_n
                mse = float(np.mean((x - cfg.signal_mean) ** 2)) if with_mse else None
                records.append(ExperimentRecord(label, rep, t, err, mse))
    return records


def run_consensus_experiment(cfg: ExperimentConfig) -> list[ExperimentRecord]:
    """Paired consensus-error curves for every configured method."""
    return _run(cfg, with_mse=False)


def run_mse_experiment(cfg: ExperimentConfig) -> list[ExperimentRecord]:
    """Like run_consensus_experiment but also records the mean square error
    against the known signal mean (which the methods never see)."""
    return _run(cfg, with_mse=True)


def tuning_region_ok(alpha: float, beta: float, d_left: float, d_right: float) -> bool:
    """Sufficient condition for (alpha, beta) to keep the optimal decay rate
    when the measure decays with exponents d_right/2 at +1 and d_left/2 at -1:
    alpha >= (d_right - 1)/2 and beta <= alpha + (d_left - d_right)/2."""
    return alpha >= (d_right - 1) / 2 and beta <= alpha + (d_left - d_right) / 2


def run_tuning_sweep(
    cfg: ExperimentConfig,
    pairs: Sequence[tuple[float, float]],
    d_left: float | None = None,
    d_right: float | None = None,
) -> tuple[list[ExperimentRecord], list[tuple[float, float, bool]]]:
    """One error curve per (alpha, beta) pair, plus the optimality-region flag.

    d_left/d_right default to the d of the first jacobi method in cfg, or 2.
    """
    for alpha, beta in pairs:
        if alpha <= -1 or beta <= -1:
            raise SpecificationError("sweep parameters must satisfy alpha, beta > -1")
    if d_right is None:
        d_right = next((float(m.get("d")) for m in cfg.methods if m.name == "jacobi"), 2.0)
    if d_left is None:
        d_left = d_right
    methods = tuple(
        MethodSpec.make("jacobi_general", alpha=alpha, beta=beta) for alpha, beta in pairs
    )
    records = _run(replace(cfg, methods=methods), with_mse=False)
    flags = [(a, b, tuning_region_ok(a, b, d_left, d_right)) for a, b in pairs]
    return records, flags


def mean_curve(records: Sequence[ExperimentRecord], method: str,
               value: str = "consensus_error") -> tuple[np.ndarray, np.ndarray]:
    """(t values, mean over repetitions) for one method."""
    per_t: dict[int, list[float]] = {}
    for r in records:
        if r.method != method:
            continue
        v = r.consensus_error if value == "consensus_error" else r.mse
        if v is None:
            raise FitError(f"record ({method}, rep={r.rep}, t={r.t}) has no {value}")
        per_t.setdefault(r.t, []).append(v)
    if not per_t:
        raise FitError(f"no records for method {method!r}")
    ts = np.array(sorted(per_t))
    means = np.array([np.mean(per_t[t]) for t in ts])
    return ts, means


def fit_rate(
    records: Sequence[ExperimentRecord],
    method: str,
    window: tuple[int, int],
    kind: str = "geometric",
    value: str = "consensus_error",
) -> RateFit:
    """Least-squares decay-rate fit on the repetition-averaged curve.

    kind="geometric": slope of ln(err) vs t, reported as e^slope (per-step
    ratio). kind="loglog": slope of ln(err) vs ln(t). Requires >= 5 strictly
    positive points in the window; shrink the window if consensus was reached.
    """
    lo, hi = window
    ts, means = mean_curve(records, method, value)
    sel = (ts >= lo) & (ts <= hi)
    if kind == "loglog":
        sel &= ts > 0
    ts, means = ts[sel], means[sel]
    if len(ts) < 5:
        raise FitError(f"window [{lo},{hi}] holds {len(ts)} points; need >= 5")
    if np.any(means <= 0):
        raise FitError("non-positive errors in window (consensus reached?); shrink window")
    ly = np.log(means)
    if kind == "geometric":
        slope, intercept = np.polyfit(ts, ly, 1)
        fitted = slope * ts + intercept
        return RateFit(method, (lo, hi), kind, float(np.exp(slope)),
                       float(np.sqrt(np.mean((ly - fitted) ** 2))))
    if kind == "loglog":
        lx = np.log(ts)
        slope, intercept = np.polyfit(lx, ly, 1)
        fitted = slope * lx + intercept
        return RateFit(method, (lo, hi), kind, float(slope),
                       float(np.sqrt(np.mean((ly - fitted) ** 2))))
    raise FitError(f"unknown fit kind {kind!r}")


def format_records(records: Sequence[ExperimentRecord]) -> str:
    """Deterministic CSV text: sorted rows, 17 significant digits."""
    with_mse = any(r.mse is not None for r in records)
    header = "method,rep,t,consensus_error" + (",mse" if with_mse else "")
    lines = [header]
    for r in sorted(records, key=lambda r: (r.method, r.rep, r.t)):
        row = f"{r.method},{r.rep},{r.t},{r.consensus_error:.17g}"
        if with_mse:
            row += f",{r.mse:.17g}" if r.mse is not None else ","
        lines.append(row)
    return "\n".join(lines) + "\n"


def export_csv(records: Sequence[ExperimentRecord], path: str) -> None:
    try:
        with open(path, "w") as f:
            f.write(format_records(records))
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path!r}: {exc}") from exc


def read_csv(path_or_file) -> list[ExperimentRecord]:
    if isinstance(path_or_file, (str, bytes)):
        with open(path_or_file) as f:
            return _parse_csv(f)
    return _parse_csv(path_or_file)


def _parse_csv(f: io.TextIOBase) -> list[ExperimentRecord]:
    header = f.readline().strip().split(",")
    base = ["method", "rep", "t", "consensus_error"]
    if header[: len(base)] != base or header not in (base, base + ["mse"]):
        raise SpecificationError(f"unexpected CSV header {header!r}")
    with_mse = header == base + ["mse"]
    out = []
    for line in f:
        line = line.strip()
        if not line:
            continue
        parts = line.split(",")
        mse = None
        if with_mse and len(parts) > 4 and parts[4] != "":
            mse = float(parts[4])
        out.append(ExperimentRecord(parts[0], int(parts[1]), int(parts[2]),
                                    float(parts[3]), mse))
    return out


def _figure_methods(jacobi_d: int, extended: bool = False,
                    mp: bool = False) -> tuple[MethodSpec, ...]:
    methods = [
        MethodSpec.make("simple"),
        MethodSpec.make("shift_register", omega="auto"),
    ]
    if mp:
        methods.append(MethodSpec.make("message_passing"))
    else:
        methods.append(MethodSpec.make("jacobi", d=jacobi_d))
    if extended:
        methods.append(MethodSpec.make("jacobi_gap", d=jacobi_d, gamma="auto"))
        methods.append(MethodSpec.make("parameter_free"))
    methods.append(MethodSpec.make("local_average"))
    return tuple(methods)


def preset_config(figure: str, seed: int = 42) -> ExperimentConfig:
    """Desk-scale experiment presets matching the published benchmark setups.

    t_max defaults to 200 (roughly 3x the time at which the gap-tuned methods
    overtake the dimension-tuned one on these sizes); the log-scale preset
    runs longer so the asymptotic separation is visible.
    """
    if figure == "grid2d":
        return ExperimentConfig(
            graph_spec=GraphSpec(family="grid", dims=(40, 40), seed=seed),
            matrix_kind="uniform_degree", d_max=4,
            methods=_figure_methods(2), t_max=200, repetitions=10, seed=seed)
    if figure == "grid2d-log":
        return ExperimentConfig(
            graph_spec=GraphSpec(family="grid", dims=(40, 40), seed=seed),
            matrix_kind="uniform_degree", d_max=4,
            methods=_figure_methods(2, extended=True), t_max=400, repetitions=10, seed=seed)
    if figure == "grid3d":
        return ExperimentConfig(
            graph_spec=GraphSpec(family="grid", dims=(12, 12, 12), seed=seed),
            matrix_kind="uniform_degree", d_max=6,
            methods=_figure_methods(3), t_max=200, repetitions=10, seed=seed)
    if figure == "perc2d":
        return ExperimentConfig(
            graph_spec=GraphSpec(family="percolation_bond", dims=(40, 40), p=0.6, seed=seed),
            matrix_kind="uniform_degree", d_max=4,
            methods=_figure_methods(2), t_max=200, repetitions=10, seed=seed)
    if figure == "perc3d":
        return ExperimentConfig(
            graph_spec=GraphSpec(family="percolation_bond", dims=(12, 12, 12), p=0.4, seed=seed),
            matrix_kind="uniform_degree", d_max=6,
            methods=_figure_methods(3), t_max=200, repetitions=10, seed=seed)
    if figure == "rgg2d":
        return ExperimentConfig(
            graph_spec=GraphSpec(family="random_geometric", n=1600, d=2,
                                 radius=1.5 / 40.0, seed=seed),
            matrix_kind="max_neighbor_degree",
            methods=_figure_methods(2), t_max=200, repetitions=10, seed=seed)
    if figure == "rgg3d":
        return ExperimentConfig(
            graph_spec=GraphSpec(family="random_geometric", n=1728, d=3,
                                 radius=1.5 / 12.0, seed=seed),
            matrix_kind="max_neighbor_degree",
            methods=_figure_methods(3), t_max=200, repetitions=10, seed=seed)
    if figure == "regular3":
        return ExperimentConfig(
            graph_spec=GraphSpec(family="random_regular", n=2000, d=3, seed=seed),
            matrix_kind="adjacency_over_d",
            methods=_figure_methods(2, mp=True), t_max=60, repetitions=10, seed=seed)
    raise SpecificationError(f"unknown figure preset {figure!r}")


PRESETS = ("grid2d", "grid3d", "perc2d", "perc3d", "rgg2d", "rgg3d",
           "grid2d-log", "regular3")


def reproduce(figure: str, seed: int = 42, out: str | None = None) -> list[ExperimentRecord]:
    """Run a figure preset and optionally export its CSV."""
    cfg = preset_config(figure, seed)
    records = run_consensus_experiment(cfg)
    if out is not None:
        export_csv(records, out)
    return records

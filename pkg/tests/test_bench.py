import io

import numpy as np
import pytest

from polygossip.bench import (
    ExperimentConfig,
    ExperimentRecord,
    MethodSpec,
    export_csv,
    fit_rate,
    format_records,
    mean_curve,
    parse_method,
    preset_config,
    read_csv,
    run_consensus_experiment,
    run_mse_experiment,
    run_tuning_sweep,
    tuning_region_ok,
)
from polygossip.errors import FitError, SpecificationError
from polygossip.graphgen import GraphSpec


def _small_cfg(**kw):
    defaults = dict(
        graph_spec=GraphSpec(family="grid", dims=(5, 5), seed=1),
        matrix_kind="uniform_degree",
        methods=(MethodSpec.make("simple"), MethodSpec.make("jacobi", d=2)),
        t_max=12,
        repetitions=3,
        seed=7,
    )
    defaults.update(kw)
    return ExperimentConfig(**defaults)


# ------------------------------------------------------------------ method spec

def test_parse_method_forms():
    assert parse_method("simple") == MethodSpec.make("simple")
    m = parse_method("jacobi:d=2")
    assert m.name == "jacobi" and m.get("d") == 2
    m = parse_method("jacobi_general:alpha=1.5;beta=0.5")
    assert m.get("alpha") == 1.5 and m.get("beta") == 0.5
    m = parse_method("shift_register:omega=auto")
    assert m.get("omega") == "auto"
    assert m.label == "shift_register(omega=auto)"
    with pytest.raises(SpecificationError):
        parse_method("jacobi:d")


# ------------------------------------------------------------------- experiment

def test_records_shape_and_pairing():
    cfg = _small_cfg()
    records = run_consensus_experiment(cfg)
    labels = {r.method for r in records}
    assert labels == {"simple", "jacobi(d=2)"}
    assert len(records) == 2 * cfg.repetitions * (cfg.t_max + 1)
    # all methods consume the same signal: identical error at t=0 per rep
    for rep in range(cfg.repetitions):
        at0 = {r.method: r.consensus_error for r in records if r.rep == rep and r.t == 0}
        vals = list(at0.values())
        assert vals[0] == vals[1]


def test_constant_signal_hook_gives_zero_errors():
    cfg = _small_cfg(repetitions=1, constant_signal=3.25)
    records = run_consensus_experiment(cfg)
    # exact zero in exact arithmetic; float coefficient triples leave ~1 ulp
    assert all(r.consensus_error <= 1e-14 for r in records)
    assert all(r.consensus_error == 0.0 for r in records if r.method == "simple")


def test_adding_repetitions_preserves_earlier_ones():
    r2 = run_consensus_experiment(_small_cfg(repetitions=2))
    r3 = run_consensus_experiment(_small_cfg(repetitions=3))
    first_two = [r for r in r3 if r.rep < 2]
    assert sorted(first_two, key=lambda r: (r.method, r.rep, r.t)) == sorted(
        r2, key=lambda r: (r.method, r.rep, r.t))


def test_random_family_regenerates_graph_per_rep():
    cfg = _small_cfg(
        graph_spec=GraphSpec(family="percolation_bond", dims=(8, 8), p=0.6, seed=1),
        d_max=4,
        methods=(MethodSpec.make("simple"),),
        repetitions=3,
        t_max=3,
    )
    records = run_consensus_experiment(cfg)
    at0 = sorted(r.consensus_error for r in records if r.t == 0)
    assert at0[0] != at0[-1]  # different components/signals across reps


def test_mse_experiment_initial_value_is_variance():
    cfg = _small_cfg(
        graph_spec=GraphSpec(family="torus", dims=(20, 20), seed=3),
        methods=(MethodSpec.make("simple"),),
        repetitions=4,
        t_max=4,
    )
    records = run_mse_experiment(cfg)
    ts, means = mean_curve(records, "simple", value="mse")
    assert means[0] == pytest.approx(1.0, abs=0.1)
    assert means[4] < means[0]


def test_incompatible_method_graph_combination():
    cfg = _small_cfg(methods=(MethodSpec.make("message_passing_regular"),))
    with pytest.raises(ValueError):
        run_consensus_experiment(cfg)


# ---------------------------------------------------------------------- fitting

def _synthetic_records(values, method="m"):
    return [ExperimentRecord(method, 0, t, v) for t, v in enumerate(values)]


def test_fit_rate_geometric_exact():
    records = _synthetic_records([0.9**t for t in range(40)])
    fit = fit_rate(records, "m", (5, 35), "geometric")
    assert fit.value == pytest.approx(0.900, abs=1e-9)
    assert fit.residual < 1e-12


def test_fit_rate_loglog_exact():
    records = _synthetic_records([1.0] + [t**-2.0 for t in range(1, 40)])
    fit = fit_rate(records, "m", (4, 30), "loglog")
    assert fit.value == pytest.approx(-2.0, abs=1e-9)


def test_fit_rate_window_too_small():
    records = _synthetic_records([0.5**t for t in range(10)])
    with pytest.raises(FitError):
        fit_rate(records, "m", (2, 5), "geometric")


def test_fit_rate_rejects_zero_errors():
    records = _synthetic_records([0.1, 0.01, 0.0, 0.0, 0.0, 0.0, 0.0])
    with pytest.raises(FitError):
        fit_rate(records, "m", (0, 6), "geometric")


def test_fit_rate_unknown_method():
    with pytest.raises(FitError):
        fit_rate(_synthetic_records([1.0] * 8), "other", (0, 7))


# ------------------------------------------------------------------------- csv

def test_export_csv_empty_and_single(tmp_path):
    path = tmp_path / "empty.csv"
    export_csv([], str(path))
    assert path.read_text() == "method,rep,t,consensus_error\n"
    export_csv([ExperimentRecord("m", 0, 0, 0.125)], str(path))
    assert path.read_text() == "method,rep,t,consensus_error\nm,0,0,0.125\n"


def test_csv_roundtrip(tmp_path):
    cfg = _small_cfg()
    records = run_consensus_experiment(cfg)
    path = tmp_path / "run.csv"
    export_csv(records, str(path))
    back = read_csv(str(path))
    assert sorted(back, key=lambda r: (r.method, r.rep, r.t)) == sorted(
        records, key=lambda r: (r.method, r.rep, r.t))


def test_csv_roundtrip_with_mse(tmp_path):
    cfg = _small_cfg(methods=(MethodSpec.make("simple"),), t_max=3, repetitions=1)
    records = run_mse_experiment(cfg)
    path = tmp_path / "mse.csv"
    export_csv(records, str(path))
    back = read_csv(str(path))
    assert back == sorted(records, key=lambda r: (r.method, r.rep, r.t))


def test_csv_is_deterministic():
    records = run_consensus_experiment(_small_cfg())
    assert format_records(records) == format_records(list(reversed(records)))


def test_read_csv_rejects_bad_header():
    with pytest.raises(SpecificationError):
        read_csv(io.StringIO("a,b,c\n1,2,3\n"))


def test_export_csv_bad_path():
    with pytest.raises(OSError):
        export_csv([], "/nonexistent-dir/x.csv")


# ---------------------------------------------------------------------- presets

def test_preset_configs_build():
    for name in ("grid2d", "grid3d", "perc2d", "perc3d", "rgg2d", "rgg3d",
                 "grid2d-log", "regular3"):
        cfg = preset_config(name)
        assert cfg.repetitions == 10
    with pytest.raises(SpecificationError):
        preset_config("grid9d")


def test_grid2d_preset_matches_benchmark_layout():
    cfg = preset_config("grid2d", seed=42)
    assert cfg.graph_spec.dims == (40, 40)
    assert cfg.d_max == 4
    names = [m.name for m in cfg.methods]
    assert names == ["simple", "shift_register", "jacobi", "local_average"]


# ----------------------------------------------------------------- tuning sweep

def test_tuning_region_flags():
    assert tuning_region_ok(1.0, 0.0, 2.0, 2.0)
    assert not tuning_region_ok(0.2, 0.8, 2.0, 2.0)
    # alpha = d/2, beta = 0 is always inside when both sides decay alike
    for d in (1.0, 2.0, 3.0, 10.0):
        assert tuning_region_ok(d / 2, 0.0, d, d)


def test_tuning_sweep_dominance_and_large_alpha():
    cfg = ExperimentConfig(
        graph_spec=GraphSpec(family="grid", dims=(20, 20), seed=1),
        matrix_kind="uniform_degree", d_max=4,
        methods=(), t_max=45, repetitions=3, seed=11)
    records, flags = run_tuning_sweep(cfg, [(1.0, 0.0), (0.2, 0.8), (25.0, 0.0)],
                                      d_left=2, d_right=2)
    flag_map = {(a, b): ok for a, b, ok in flags}
    assert flag_map[(1.0, 0.0)] and flag_map[(25.0, 0.0)]
    assert not flag_map[(0.2, 0.8)]
    _, in_region = mean_curve(records, "jacobi_general(alpha=1.0;beta=0.0)")
    _, out_region = mean_curve(records, "jacobi_general(alpha=0.2;beta=0.8)")
    _, big_alpha = mean_curve(records, "jacobi_general(alpha=25.0;beta=0.0)")
    for t in (10, 20, 30, 40):
        assert in_region[t] < out_region[t]
        assert in_region[t] < big_alpha[t]
    # very large alpha degrades toward simple gossip on the half-lazy matrix
    lazy_cfg = ExperimentConfig(
        graph_spec=GraphSpec(family="grid", dims=(20, 20), seed=1),
        matrix_kind="uniform_degree", d_max=8,
        methods=(MethodSpec.make("simple"),), t_max=45, repetitions=3, seed=11)
    _, lazy = mean_curve(run_consensus_experiment(lazy_cfg), "simple")
    for t in (20, 30, 40):
        assert abs(big_alpha[t] - lazy[t]) < abs(in_region[t] - lazy[t])


def test_tuning_sweep_rejects_bad_parameters():
    cfg = _small_cfg()
    with pytest.raises(SpecificationError):
        run_tuning_sweep(cfg, [(-1.5, 0.0)])

import numpy as np
import pytest

from polygossip.errors import CapabilityError, EstimationError
from polygossip.graphgen import GraphSpec, build_gossip_matrix, generate
from polygossip.spectral import (
    DiscreteMeasure,
    eigendecompose,
    return_probability,
    spectral_dimension_estimate,
    spectral_measure_at_vertex,
    spectral_measure_of_signal,
)


def _matrix(spec, kind="uniform_degree", d_max=None):
    g = generate(spec)
    return g, build_gossip_matrix(g, kind, d_max=d_max)


def test_k4_spectrum():
    _, W = _matrix(GraphSpec(family="complete", n=4))
    s = eigendecompose(W)
    assert np.allclose(s.eigenvalues, [1.0, -1 / 3, -1 / 3, -1 / 3], atol=1e-12)
    assert abs(s.gap - 4.0 / 3.0) < 1e-12


def test_c4_spectrum_and_zero_absolute_gap():
    _, W = _matrix(GraphSpec(family="cycle", n=4), kind="adjacency_over_d")
    s = eigendecompose(W)
    assert np.allclose(s.eigenvalues, [1.0, 0.0, 0.0, -1.0], atol=1e-12)
    assert abs(s.absolute_gap) < 1e-12


def test_single_vertex():
    _, W = _matrix(GraphSpec(family="path", n=1))
    s = eigendecompose(W)
    assert np.allclose(s.eigenvalues, [1.0])
    m = spectral_measure_at_vertex(s, 0)
    assert np.allclose(m.points, [1.0]) and np.allclose(m.weights, [1.0])
    assert return_probability(m, 5) == pytest.approx(1.0)


@pytest.mark.parametrize("spec", [
    GraphSpec(family="random_regular", n=18, d=4, seed=0),
    GraphSpec(family="random_tree", n=25, seed=1),
    GraphSpec(family="grid", dims=(5, 6)),
])
def test_eigendecomposition_residuals(spec):
    _, W = _matrix(spec)
    s = eigendecompose(W)
    dense = W.to_dense()
    resid = dense @ s.eigenvectors - s.eigenvectors * s.eigenvalues
    assert np.abs(resid).max() < 1e-8
    gram = s.eigenvectors.T @ s.eigenvectors
    assert np.abs(gram - np.eye(W.n)).max() < 1e-8
    assert abs(s.eigenvalues[0] - 1.0) < 1e-9
    ones = np.ones(W.n) / np.sqrt(W.n)
    assert abs(abs(s.eigenvectors[:, 0] @ ones) - 1.0) < 1e-8
    assert np.all(np.abs(s.eigenvalues) <= 1.0 + 1e-9)


def test_dense_limit_guard():
    _, W = _matrix(GraphSpec(family="grid", dims=(4, 4)))
    with pytest.raises(CapabilityError):
        eigendecompose(W, dense_limit=8)


def test_vertex_measure_complete_graph():
    n = 7
    _, W = _matrix(GraphSpec(family="complete", n=n))
    m = spectral_measure_at_vertex(eigendecompose(W), 2)
    assert m.total_mass == pytest.approx(1.0, abs=1e-9)
    # two aggregated atoms: 1/n at lambda=1 and (n-1)/n at -1/(n-1)
    assert len(m.points) == 2
    idx = np.argsort(m.points)
    assert m.points[idx[1]] == pytest.approx(1.0, abs=1e-9)
    assert m.weights[idx[1]] == pytest.approx(1 / n, abs=1e-9)
    assert m.points[idx[0]] == pytest.approx(-1 / (n - 1), abs=1e-9)
    assert m.weights[idx[0]] == pytest.approx((n - 1) / n, abs=1e-9)


def test_vertex_transitive_measures_agree():
    _, W = _matrix(GraphSpec(family="cycle", n=8), kind="adjacency_over_d")
    s = eigendecompose(W)
    m0 = spectral_measure_at_vertex(s, 0)
    for v in range(1, 8):
        mv = spectral_measure_at_vertex(s, v)
        assert np.allclose(np.sort(m0.points), np.sort(mv.points), atol=1e-9)
        assert np.allclose(m0.weights[np.argsort(m0.points)],
                           mv.weights[np.argsort(mv.points)], atol=1e-9)


def test_signal_measure_consensus_vector_has_no_mass():
    _, W = _matrix(GraphSpec(family="cycle", n=6), kind="adjacency_over_d")
    s = eigendecompose(W)
    m = spectral_measure_of_signal(s, 3.7 * np.ones(6))
    assert m.total_mass == pytest.approx(0.0, abs=1e-18)


def test_signal_measure_eigenvector_unit_mass():
    _, W = _matrix(GraphSpec(family="grid", dims=(3, 4)))
    s = eigendecompose(W)
    m = spectral_measure_of_signal(s, s.eigenvectors[:, 1])
    assert m.total_mass == pytest.approx(1.0, abs=1e-9)
    top = m.points[np.argmax(m.weights)]
    assert top == pytest.approx(s.eigenvalues[1], abs=1e-9)


def test_signal_measure_total_mass(rng):
    _, W = _matrix(GraphSpec(family="cycle", n=4), kind="adjacency_over_d")
    s = eigendecompose(W)
    xi = rng.standard_normal(4)
    m = spectral_measure_of_signal(s, xi)
    centered = xi - xi.mean()
    assert m.total_mass == pytest.approx(float(centered @ centered), abs=1e-9)


@pytest.mark.parametrize("spec", [
    GraphSpec(family="random_regular", n=20, d=3, seed=3),
    GraphSpec(family="random_tree", n=15, seed=5),
])
def test_parseval(spec, rng):
    _, W = _matrix(spec)
    s = eigendecompose(W)
    xi = rng.standard_normal(W.n)
    coeffs = s.eigenvectors.T @ xi
    total = float(np.sum(coeffs[1:] ** 2) + W.n * xi.mean() ** 2)
    assert total == pytest.approx(float(xi @ xi), abs=1e-8)


def test_gap_consistency_and_bipartite():
    for spec, kind in [
        (GraphSpec(family="cycle", n=6), "adjacency_over_d"),
        (GraphSpec(family="torus", dims=(2, 2, 2)), "adjacency_over_d"),  # 3-cube
        (GraphSpec(family="grid", dims=(4, 5)), "uniform_degree"),
    ]:
        _, W = _matrix(spec, kind=kind)
        s = eigendecompose(W)
        assert s.absolute_gap <= s.gap + 1e-12
    # bipartite regular graphs with W = A/d: lambda_n = -1
    _, W = _matrix(GraphSpec(family="cycle", n=6), kind="adjacency_over_d")
    assert eigendecompose(W).absolute_gap == pytest.approx(0.0, abs=1e-12)


def test_spectral_dimension_synthetic_exact():
    # atoms placed so that the sampled cumulative mass above 1-E equals E
    es = np.geomspace(2e-3, 0.9, 12)
    pts = 1.0 - es
    wts = np.concatenate([[es[0]], np.diff(es)])
    m = DiscreteMeasure(pts, wts)
    est = spectral_dimension_estimate(m, (2e-3, 0.9), num_points=12)
    assert est == pytest.approx(2.0, abs=1e-9)


def test_spectral_dimension_torus_and_path():
    _, W = _matrix(GraphSpec(family="torus", dims=(64, 64)))
    m = spectral_measure_at_vertex(eigendecompose(W), 0)
    assert abs(spectral_dimension_estimate(m, (0.05, 0.5)) - 2.0) <= 0.5
    _, Wp = _matrix(GraphSpec(family="path", n=400))
    mp = spectral_measure_at_vertex(eigendecompose(Wp), 200)
    assert abs(spectral_dimension_estimate(mp, (0.05, 0.5)) - 1.0) <= 0.4


def test_spectral_dimension_needs_samples():
    m = DiscreteMeasure(np.array([-0.5]), np.array([1.0]))
    with pytest.raises(EstimationError):
        spectral_dimension_estimate(m, (0.01, 0.1))


def test_return_probability_against_matrix_power():
    g, W = _matrix(GraphSpec(family="cycle", n=4), kind="adjacency_over_d")
    s = eigendecompose(W)
    m = spectral_measure_at_vertex(s, 0)
    lazy = (np.eye(4) + W.to_dense()) / 2.0
    for t in range(0, 6):
        direct = np.linalg.matrix_power(lazy, t)[0, 0]
        assert return_probability(m, t) == pytest.approx(direct, abs=1e-12)


def test_return_probability_monotone(rng):
    _, W = _matrix(GraphSpec(family="random_tree", n=30, seed=8))
    m = spectral_measure_at_vertex(eigendecompose(W), 4)
    vals = [return_probability(m, t) for t in range(30)]
    assert vals[0] == pytest.approx(1.0, abs=1e-9)
    assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))

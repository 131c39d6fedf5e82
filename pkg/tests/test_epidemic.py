import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fwintervene import kernels
from fwintervene.epidemic import (
    EpidemicParams,
    MetapopParams,
    infection_probability,
    initial_states,
    simulate_graph,
    simulate_metapop,
    sweep_lambda_scaling,
)
from fwintervene.errors import DataError
from fwintervene.generators import power_law_graph, random_graph
from fwintervene.graph import BipartiteGraph, WeightedGraph

S, E, I, R = kernels.SUSCEPTIBLE, kernels.EXPOSED, kernels.INFECTIOUS, kernels.RECOVERED


def pair(w):
    # node 0 listens to node 1 with weight w
    return WeightedGraph.from_edges(2, [0], [1], [w])


def test_params_validation():
    for bad in [dict(beta=-1), dict(p0=1.5), dict(delta_e=0.5), dict(epochs=0),
                dict(replicas=0), dict(model="SIRS")]:
        with pytest.raises(DataError):
            EpidemicParams(**bad)
    assert EpidemicParams(model="sir").model == "SIR"


def test_seed_count_and_state():
    g = random_graph(100, 0.05, seed=0)
    st_ = initial_states(100, EpidemicParams(p0=0.07), np.arange(3))
    assert np.all((st_ == E).sum(axis=1) == 7)
    st_ = initial_states(100, EpidemicParams(model="SIS", p0=0.011), np.arange(2))
    assert np.all((st_ == I).sum(axis=1) == 2)
    # different replicas get different seeds
    assert not np.array_equal(st_[0], st_[1])
    assert g.node_count == 100


def test_zero_transmission_keeps_seeds_only():
    g = power_law_graph(300, 2000, seed=1)
    tr = simulate_graph(g, EpidemicParams(beta=0.0, p0=0.05, epochs=30, replicas=10))
    np.testing.assert_array_equal(tr.total_infected, 15)


def test_clamped_probability():
    p = infection_probability(pair(30.0), [False, True], 0.05)
    assert p[0] == 1.0 and p[1] == 0.0
    tr = simulate_graph(pair(30.0), EpidemicParams(epochs=1, replicas=20), initial=[S, I])
    assert np.all(tr.counts[:, 1, 1] == 1)


def test_probability_product_form():
    g = WeightedGraph.from_edges(3, [0, 0], [1, 2], [2.0, 4.0])
    p = infection_probability(g, [False, True, True], 0.1)
    assert p[0] == pytest.approx(1 - 0.8 * 0.6)


@given(st.integers(0, 1000))
def test_monotone_hazard(seed):
    g = random_graph(15, 0.3, seed=seed)
    rng = np.random.default_rng(seed)
    mask = rng.random(15) < 0.3
    base = infection_probability(g, mask, 0.2)
    for j in np.flatnonzero(~mask):
        more = mask.copy()
        more[j] = True
        assert np.all(infection_probability(g, more, 0.2) >= base - 1e-15)


def test_single_epoch_binomial():
    n = 40_000
    tr = simulate_graph(pair(1.0), EpidemicParams(beta=0.05, epochs=1, replicas=n), initial=[S, I])
    freq = np.mean(tr.counts[:, 1, 0] == 0)
    sd = np.sqrt(0.05 * 0.95 / n)
    assert abs(freq - 0.05) < 4 * sd


@pytest.mark.parametrize("model", ["SEIR", "SIR", "SIS"])
def test_conservation_and_monotone_ever(model):
    g = power_law_graph(200, 1500, seed=3)
    tr = simulate_graph(g, EpidemicParams(model=model, beta=0.2, p0=0.05, epochs=25, replicas=6))
    assert np.all(tr.counts.sum(axis=2) == 200)
    assert np.all(tr.counts >= 0)
    assert np.all(np.diff(tr.ever, axis=1) >= 0)
    if model == "SIR":
        assert np.all(tr.counts[:, :, E] == 0)


def test_sis_recovery_in_one_epoch():
    g = random_graph(50, 0.1, seed=2)
    init = np.zeros(50, dtype=np.int8)
    init[:10] = I
    tr = simulate_graph(g, EpidemicParams(model="SIS", beta=0.0, delta_i=1.0, epochs=1, replicas=3),
                        initial=init)
    np.testing.assert_array_equal(tr.counts[:, 1], [[50, 0, 0, 0]] * 3)


def test_latent_period_mean():
    # one exposed node with no edges: time to infectious is geometric with mean delta_e
    g = WeightedGraph.from_edges(1, [], [], [])
    tr = simulate_graph(g, EpidemicParams(delta_e=4.0, delta_i=1e9, epochs=200, replicas=20_000),
                        initial=[E])
    first_i = np.argmax(tr.counts[:, :, I] == 1, axis=1)
    assert np.all(first_i > 0)
    assert first_i.mean() == pytest.approx(4.0, abs=4 * np.sqrt(12.0 / 20_000))


def test_thread_and_replica_independence():
    g = power_law_graph(300, 2500, seed=5)
    p = EpidemicParams(beta=0.1, epochs=20, replicas=12, seed=9)
    a = simulate_graph(g, p)
    b = simulate_graph(g, p, threads=4)
    np.testing.assert_array_equal(a.counts, b.counts)
    c = simulate_graph(g, EpidemicParams(beta=0.1, epochs=20, replicas=5, seed=9))
    np.testing.assert_array_equal(a.counts[:5], c.counts)


def test_scaling_sweep_rows():
    g = random_graph(60, 0.1, seed=0)
    p = EpidemicParams(epochs=10, replicas=8)
    rows = sweep_lambda_scaling(g, p, [0.0, 1.0])
    assert rows[0]["mean_total_infected"] == 1.0
    direct = simulate_graph(g, p)
    assert rows[1]["mean_total_infected"] == direct.mean_total_infected()
    assert rows[1]["lambda1"] == pytest.approx(np.linalg.svd(g.to_dense(), compute_uv=False)[0])


def _metapop(psi=1.0, beta=0.0, replicas=100, **kw):
    b = BipartiteGraph.from_matrix(np.array([[3.0, 0.0], [1.0, 2.0], [0.0, 4.0]]))
    params = MetapopParams(psi=psi, poi_areas=[2.0, 5.0], poi_dwell=[1.0, 0.5],
                           populations=[500, 800, 300],
                           epidemic=EpidemicParams(model="METAPOP_SEIR", beta=beta, replicas=replicas, **kw))
    return b, params


def test_metapop_conservation_and_determinism():
    b, p = _metapop(psi=2.0, beta=0.3, replicas=300, epochs=30, p0=0.02)
    tr = simulate_metapop(b, p)
    assert np.all(tr.group_counts.sum(axis=3) == np.array([500, 800, 300]))
    assert np.all(tr.group_counts >= 0)
    assert np.all(np.diff(tr.ever, axis=1) >= 0)
    tr2 = simulate_metapop(b, p, threads=3)
    np.testing.assert_array_equal(tr.counts, tr2.counts)
    b2, p2 = _metapop(psi=2.0, beta=0.3, replicas=100, epochs=30, p0=0.02)
    np.testing.assert_array_equal(simulate_metapop(b2, p2).counts, tr.counts[:100])


def test_metapop_no_transmission():
    b, p = _metapop(psi=0.0, beta=0.0, epochs=20, p0=0.05)
    tr = simulate_metapop(b, p)
    assert np.all(tr.ever[:, -1] == tr.ever[:, 0])


def test_metapop_disconnected_groups():
    b = BipartiteGraph(3, 2, [], [], [])
    p = MetapopParams(psi=5.0, poi_areas=[1.0, 1.0], poi_dwell=[1.0, 1.0], populations=[1, 1, 1],
                      epidemic=EpidemicParams(model="METAPOP_SEIR", beta=0.0, epochs=10, replicas=5))
    tr = simulate_metapop(b, p, initial=[[0, 1, 0, 0], [1, 0, 0, 0], [1, 0, 0, 0]])
    assert np.all(tr.total_infected == 1)


def test_metapop_single_epoch_mean():
    n, N, S0, I0 = 20_000, 1000, 900, 100
    w, psi, d, a, beta = 4.0, 0.01, 2.0, 8.0, 0.1
    b = BipartiteGraph.from_matrix(np.array([[w]]))
    p = MetapopParams(psi=psi, poi_areas=[a], poi_dwell=[d], populations=[N],
                      epidemic=EpidemicParams(model="METAPOP_SEIR", beta=beta, epochs=1, replicas=n))
    tr = simulate_metapop(b, p, initial=[[S0, 0, I0, 0]])
    frac = I0 / N
    lam = psi * d * d / a * frac * w * w
    lam_c = beta * frac
    mean = S0 / N * lam + S0 * lam_c
    var = S0 / N * lam + S0 * lam_c * (1 - lam_c)
    got = tr.group_counts[:, 1, 0, E]
    assert abs(got.mean() - mean) < 4 * np.sqrt(var / n)


def test_metapop_sequence_cycles():
    b1 = BipartiteGraph.from_matrix(np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]))
    b2 = BipartiteGraph.from_matrix(np.array([[0.0, 1.0], [1.0, 0.0], [1.0, 1.0]]))
    _, p = _metapop(psi=3.0, beta=0.1, epochs=6, replicas=20)
    a = simulate_metapop([b1, b2], p)
    c = simulate_metapop([b1, b2, b1, b2], p)
    np.testing.assert_array_equal(a.counts, c.counts)
    with pytest.raises(DataError):
        simulate_metapop([], p)


def test_metapop_param_validation():
    with pytest.raises(DataError):
        MetapopParams(psi=1.0, poi_areas=[0.0], poi_dwell=[1.0], populations=[1])
    with pytest.raises(DataError):
        MetapopParams(psi=1.0, poi_areas=[1.0], poi_dwell=[1.0], populations=[0])
    b, p = _metapop()
    bad = MetapopParams(psi=1.0, poi_areas=[1.0], poi_dwell=[1.0], populations=[1, 1, 1])
    with pytest.raises(DataError):
        simulate_metapop(b, bad)
    with pytest.raises(DataError):
        simulate_graph(random_graph(5, 0.5), p.epidemic)

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import example, given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from kmsgraph import (
    Beta,
    KmsState,
    NotStronglyConnectedError,
    PathWord,
    SinkError,
    admissible_inverse_temperatures,
    build_graph,
    check_toeplitz_subinvariance,
    constraint_graph,
    critical_inverse_temperature,
    disjoint_union,
    evaluate_state,
    factors_through,
    homogenize,
    is_strongly_connected,
    kms_simplex,
    make_circulant,
    mermin_peres,
    unique_kms,
)
from kmsgraph.exact import solve_unique
from kmsgraph.graph import paths_from

from oracles import random_strongly_connected

GOLDEN = (1 + math.sqrt(5)) / 2
F = Fraction


@pytest.fixture(scope="module")
def mp_union():
    g, _ = constraint_graph(mermin_peres())
    g0, _ = constraint_graph(homogenize(mermin_peres()))
    return disjoint_union(g, g0)


def test_beta_serialization():
    b = Beta.from_exp(9)
    assert b.to_dict() == {"log_of": "9", "approx": math.log(9)}
    assert Beta.from_value(0).exp_exact == 1


def test_state_must_be_probability():
    with pytest.raises(ValueError):
        KmsState(Beta.from_exp(1), (F(1, 2), F(1, 3)))
    with pytest.raises(ValueError):
        KmsState(Beta.from_exp(1), (F(3, 2), F(-1, 2)))


def test_critical_temperatures():
    assert critical_inverse_temperature(make_circulant([0, 1, 0])).value == 0
    assert critical_inverse_temperature(make_circulant([1, 0, 1, 0])).exp_exact == 2


def test_critical_union(mp_union):
    assert critical_inverse_temperature(mp_union).exp_exact == 9


def test_sink_rejected_everywhere():
    g = build_graph(2, [(0, 1)])
    for fn in (critical_inverse_temperature, admissible_inverse_temperatures):
        with pytest.raises(SinkError):
            fn(g)
    with pytest.raises(SinkError):
        kms_simplex(g, Beta.from_exp(1))


def test_circulant_segment():
    p = kms_simplex(make_circulant([1, 0, 1, 0]), Beta.from_exp(2))
    assert [s.weights for s in p.extreme_points] == [(F(1, 2), 0, F(1, 2), 0), (0, F(1, 2), 0, F(1, 2))]
    assert p.dimension == 1


def test_union_segment(mp_union):
    p = kms_simplex(mp_union, Beta.from_exp(9))
    a = (F(1, 24),) * 24 + (F(0),) * 24
    b = (F(0),) * 24 + (F(1, 24),) * 24
    assert {s.weights for s in p.extreme_points} == {a, b}
    assert p.dimension == 1


def test_golden_at_two_is_empty():
    p = kms_simplex(build_graph(2, [(0, 0), (0, 1), (1, 0)]), Beta.from_exp(2))
    assert p.is_empty


def test_irrational_beta_falls_back():
    g = build_graph(2, [(0, 0), (0, 1), (1, 0)])
    p = kms_simplex(g, critical_inverse_temperature(g))
    assert p.numeric and p.warnings
    assert len(p.extreme_points) == 1
    assert p.extreme_points[0].weights[0] == pytest.approx(1 / GOLDEN, abs=1e-9)


def test_unique_three_cycle():
    s = unique_kms(make_circulant([0, 1, 0]))
    assert s.beta.value == 0
    assert s.weights == (F(1, 3),) * 3


def test_unique_golden():
    s = unique_kms(build_graph(2, [(0, 0), (0, 1), (1, 0)]))
    assert abs(s.beta.value - math.log(GOLDEN)) <= 1e-10
    assert s.weights[0] == pytest.approx(0.6180339887, abs=1e-9)


def test_unique_mp_component():
    g, _ = constraint_graph(mermin_peres())
    s = unique_kms(g)
    assert s.beta.exp_exact == 9 and s.weights == (F(1, 24),) * 24


def test_unique_requires_strong_connectivity():
    with pytest.raises(NotStronglyConnectedError):
        unique_kms(make_circulant([1, 0, 1, 0]))


def test_admissible_circulants():
    for row in ([1, 0, 1, 0], [0, 1, 1], [1, 1, 0, 1, 0]):
        rep = admissible_inverse_temperatures(make_circulant(row))
        assert [b.exp_exact for b in rep.betas] == [sum(row)]
        assert rep.certificate == "Lemma onetemp"


def test_admissible_golden():
    rep = admissible_inverse_temperatures(build_graph(2, [(0, 0), (0, 1), (1, 0)]))
    assert rep.certificate == "Lemma onetemp"
    assert abs(rep.betas[0].value - math.log(GOLDEN)) <= 1e-10


def test_admissible_union(mp_union):
    rep = admissible_inverse_temperatures(mp_union)
    assert [b.exp_exact for b in rep.betas] == [9]


def test_admissible_enumeration_branch():
    # loop at 0 feeding a 2-cycle {1,2} with its own loop: radii 1 and 2
    g = build_graph(3, [(0, 0), (0, 1), (1, 2), (2, 1), (1, 1)])
    rep = admissible_inverse_temperatures(g)
    assert rep.certificate == "Prop 2.1(c) enumeration"
    lams = {b.exp_value for b in rep.betas}
    assert any(abs(x - GOLDEN) < 1e-9 for x in lams)
    for b in rep.betas:
        assert not kms_simplex(g, b).is_empty


def test_evaluate_state_cases(mp_union):
    state = KmsState(Beta.from_exp(9), (F(1, 48),) * 48)
    assert evaluate_state(mp_union, state, PathWord.at(5), PathWord.at(5)) == F(1, 48)
    assert evaluate_state(mp_union, state, PathWord((0,)), PathWord((0,))) == F(1, 432)
    assert evaluate_state(mp_union, state, PathWord((0,)), PathWord((1,))) == 0


def test_subinvariance_three_cycle():
    g = make_circulant([0, 1, 0])
    uniform = (F(1, 3),) * 3
    at_two = KmsState(Beta.from_exp(2), uniform)
    assert check_toeplitz_subinvariance(g, at_two)
    assert not factors_through(g, at_two)
    below = KmsState(Beta.from_value(-1.0), tuple(1 / 3 for _ in range(3)))
    assert not check_toeplitz_subinvariance(g, below)


def test_factors_through_circulant_vertex():
    g = make_circulant([1, 0, 1, 0])
    assert factors_through(g, KmsState(Beta.from_exp(2), (F(1, 2), 0, F(1, 2), 0)))


def test_nullity_cap():
    from kmsgraph import PreconditionError

    loops = build_graph(13, [(i, i) for i in range(13)])
    with pytest.raises(PreconditionError):
        kms_simplex(loops, Beta.from_exp(1))


def test_polytope_json_shape(mp_union):
    doc = kms_simplex(mp_union, Beta.from_exp(9)).to_dict(mp_union)
    pt = doc["extreme_points"][0]
    assert pt["beta"]["log_of"] == "9"
    assert pt["factors_through"] is True
    assert set(pt["weights"]) <= {"1/24", "0"}


# ---- properties --------------------------------------------------------

adjacency = st.integers(1, 6).flatmap(
    lambda n: st.lists(st.lists(st.integers(0, 1), min_size=n, max_size=n), min_size=n, max_size=n)
).filter(lambda rows: all(any(r) for r in rows))


def _graph(rows):
    n = len(rows)
    return build_graph(n, [(i, j) for i in range(n) for j in range(n) if rows[i][j]])


def _extension_sums_hold(g, state, max_len=2):
    for v in range(g.vertex_count):
        for length in range(max_len):
            for mu in paths_from(g, v, length):
                parent = evaluate_state(g, state, mu, mu)
                end = g.edges[mu.edge_ids[-1]][1] if mu.edge_ids else mu.anchor
                kids = sum(evaluate_state(g, state, mu.extend(e), mu.extend(e)) for e in g.out_edges[end])
                if state.is_exact:
                    if kids != parent:
                        return False
                elif abs(kids - parent) > 1e-9:
                    return False
    return True


@given(adjacency)
@settings(max_examples=150, deadline=None)
def test_extension_sum_property(rows):
    g = _graph(rows)
    p = kms_simplex(g, critical_inverse_temperature(g))
    assert not p.is_empty
    for s in p.extreme_points:
        assert factors_through(g, s)
        assert check_toeplitz_subinvariance(g, s)
        assert _extension_sums_hold(g, s)


@given(adjacency)
@settings(max_examples=150, deadline=None)
def test_nonempty_iff_nonnegative_eigenvector(rows):
    """LP oracle: {(D - rho I) x = 0, sum x = 1, x >= 0} is feasible."""
    g = _graph(rows)
    beta = critical_inverse_temperature(g)
    a = g.matrix.astype(float)
    n = len(a)
    eq = np.vstack([a - beta.exp_value * np.eye(n), np.ones((1, n))])
    rhs = np.zeros(n + 1)
    rhs[-1] = 1
    res = linprog(np.zeros(n), A_eq=eq, b_eq=rhs, bounds=[(0, None)] * n, method="highs")
    assert (res.status == 0) == (not kms_simplex(g, beta).is_empty)


@given(st.lists(st.integers(0, 1), min_size=1, max_size=8).filter(any))
@settings(max_examples=60, deadline=None)
def test_circulant_uniform_is_member(row):
    g = make_circulant(row)
    p = kms_simplex(g, Beta.from_exp(sum(row)))
    m = len(row)
    assert p.contains(g, (F(1, m),) * m)


@given(st.integers(0, 2**31 - 1))
@settings(max_examples=60, deadline=None)
def test_strongly_connected_unique_point(seed):
    rng = np.random.default_rng(seed)
    g = random_strongly_connected(rng, int(rng.integers(1, 9)))
    assert is_strongly_connected(g)
    s = unique_kms(g)
    p = kms_simplex(g, s.beta)
    assert len(p.extreme_points) == 1
    assert np.allclose(p.extreme_points[0].as_floats(), s.as_floats(), atol=1e-9)


def _random_member(rng, points):
    w = [F(int(x)) for x in rng.integers(0, 10, len(points))]
    if not any(w):
        w[0] = F(1)
    total = sum(w)
    lam = [x / total for x in w]
    n = len(points[0])
    return lam, tuple(sum(lam[k] * points[k][i] for k in range(len(points))) for i in range(n))


@pytest.mark.parametrize("rows", [
    [1, 0, 1, 0],
    [1, 0, 0, 1, 0, 0],
    [0, 1, 0, 1, 0, 1, 0, 1],
])
def test_hull_reproduces_members_exactly(rows):
    """Random convex combinations of the extreme points are members, and
    their barycentric coordinates are recovered exactly (the extreme points
    here are affinely independent, so the coordinates are unique)."""
    g = make_circulant(rows)
    p = kms_simplex(g, Beta.from_exp(sum(rows)))
    pts = [s.weights for s in p.extreme_points]
    assert p.dimension == len(pts) - 1
    rng = np.random.default_rng(7)
    m = g.vertex_count
    for _ in range(100):
        lam, x = _random_member(rng, pts)
        assert p.contains(g, x)
        system = [[F(pts[k][i]) for k in range(len(pts))] for i in range(m)] + [[F(1)] * len(pts)]
        coords = solve_unique(system, list(x) + [F(1)])
        assert list(coords) == lam


def test_non_member_rejected():
    g = make_circulant([1, 0, 1, 0])
    p = kms_simplex(g, Beta.from_exp(2))
    assert not p.contains(g, (F(1), 0, 0, 0))
    assert not p.contains(g, (F(1, 2), F(1, 2), F(1, 2), F(-1, 2)))


def test_admissible_with_source_vertex():
    # vertex 0 has no incoming edge, so the transpose has a sink
    g = build_graph(2, [(0, 1), (1, 1)])
    rep = admissible_inverse_temperatures(g)
    assert rep.certificate == "Prop 2.1(c) enumeration"
    assert [b.exp_exact for b in rep.betas] == [1]
    assert [s.weights for s in kms_simplex(g, rep.betas[0]).extreme_points] == [(F(1, 2), F(1, 2))]


@given(adjacency)
@example([[0, 0, 0, 1], [0, 1, 0, 1], [0, 1, 0, 1], [0, 0, 1, 1]])
@example([[0, 0, 0, 1, 0], [0, 1, 0, 0, 1], [0, 0, 0, 1, 0], [1, 0, 0, 1, 0], [0, 1, 1, 0, 0]])
@example([[0, 0, 0, 0, 1], [0, 0, 0, 1, 0], [0, 0, 1, 0, 0], [0, 1, 0, 1, 1], [1, 0, 0, 0, 1]])
@settings(max_examples=150, deadline=None)
def test_admissible_against_lp_oracle(rows):
    """Every positive real eigenvalue whose eigen-equation has a probability
    solution (checked by LP) is reported, and nothing else."""
    g = _graph(rows)
    a = g.matrix.astype(float)
    n = len(a)
    expected = []
    for lam in np.linalg.eigvals(a):
        if abs(lam.imag) > 1e-6 or lam.real <= 1e-6:
            continue
        # defective eigenvalues come back from eigvals perturbed by ~1e-8
        # (sometimes as a complex pair, or a zero as a tiny positive value), so
        # all three tests use a 1e-6 band
        d = a - lam.real * np.eye(n)
        res = linprog(
            np.zeros(n), A_ub=np.vstack([d, -d]), b_ub=np.full(2 * n, 1e-6),
            A_eq=np.ones((1, n)), b_eq=[1.0], bounds=[(0, None)] * n, method="highs",
        )
        if res.status == 0 and not any(abs(lam.real - x) < 1e-6 for x in expected):
            expected.append(lam.real)
    got = [b.exp_value for b in admissible_inverse_temperatures(g).betas]
    assert sorted(got) == pytest.approx(sorted(expected), abs=1e-6)

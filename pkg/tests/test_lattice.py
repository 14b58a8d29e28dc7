import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from bosonrpa.errors import InvalidArgument
from bosonrpa.lattice import KAPPA, build_fermi_ball, count_pairs_exact, shell_counts


def test_kappa_value():
    assert KAPPA == pytest.approx(0.6203504908994, abs=1e-12)


@pytest.mark.parametrize("radius, n", [(1.0, 7), (math.sqrt(5), 57), (0.0, 1)])
def test_ball_sizes(radius, n):
    assert build_fermi_ball(k_fermi=radius).n_particles == n


def test_single_point_ball():
    ball = build_fermi_ball(n_particles=1)
    assert ball.k_fermi == 0.0
    assert ball.momenta.tolist() == [[0, 0, 0]]


def test_shell_split_rounds_up_with_warning():
    with pytest.warns(UserWarning, match="splits a shell"):
        ball = build_fermi_ball(n_particles=8)
    assert ball.n_particles == 19


def test_exact_shell_target_is_silent():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert build_fermi_ball(n_particles=57).radius_sq == 5


@pytest.mark.parametrize("kwargs", [{}, {"k_fermi": 1.0, "n_particles": 7}, {"n_particles": 0}, {"k_fermi": -1.0}])
def test_bad_arguments(kwargs):
    with pytest.raises(InvalidArgument):
        build_fermi_ball(**kwargs)


@given(st.integers(min_value=0, max_value=30))
def test_ball_matches_enumeration(r2):
    ball = build_fermi_ball(k_fermi=math.sqrt(r2))
    assert ball.radius_sq == r2
    assert sorted(map(tuple, ball.momenta.tolist())) == sorted(oracles.ball_points(r2))
    assert shell_counts(r2)[-1] == ball.n_particles


def test_ball_is_inversion_symmetric():
    ball = build_fermi_ball(k_fermi=4.3)
    assert set(map(tuple, ball.momenta.tolist())) == set(map(tuple, (-ball.momenta).tolist()))


def test_fermi_radius_ratio_tends_to_one():
    errs = []
    for n in (10**3, 10**4, 10**5):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            ball = build_fermi_ball(n_particles=n)
        errs.append(abs(ball.k_fermi / (KAPPA * ball.n_particles ** (1 / 3)) - 1))
    assert errs[0] > errs[-1]
    assert errs[-1] < 0.01


@pytest.mark.parametrize("k, expected", [((1, 0, 0), 5), ((3, 0, 0), 7)])
def test_pair_count_small_ball(k, expected):
    ball = build_fermi_ball(k_fermi=1.0)
    assert count_pairs_exact(ball, None, k) == expected


def test_pair_count_empty_patch():
    ball = build_fermi_ball(k_fermi=3.0)
    assert count_pairs_exact(ball, lambda q: np.zeros(len(q), bool), (1, 2, 0)) == 0


def test_pair_count_rejects_zero_k():
    with pytest.raises(InvalidArgument):
        count_pairs_exact(build_fermi_ball(k_fermi=1.0), None, (0, 0, 0))


@given(
    st.integers(min_value=0, max_value=12),
    st.tuples(*[st.integers(-3, 3)] * 3).filter(any),
)
def test_pair_count_matches_loop(r2, k):
    ball = build_fermi_ball(k_fermi=math.sqrt(r2))
    upper = lambda q: np.asarray(q)[:, 2] >= 0
    assert count_pairs_exact(ball, None, k) == oracles.pair_count(r2, k)
    assert count_pairs_exact(ball, upper, k) == oracles.pair_count(r2, k, lambda p: p[2] >= 0)


@given(st.integers(min_value=1, max_value=12), st.tuples(*[st.integers(-3, 3)] * 3).filter(any))
def test_pair_count_symmetric_in_k(r2, k):
    # h -> -h - k maps pairs for k onto pairs for -k... both counts equal |{h in B, h+k not in B}|
    ball = build_fermi_ball(k_fermi=math.sqrt(r2))
    assert count_pairs_exact(ball, None, k) == count_pairs_exact(ball, None, tuple(-x for x in k))

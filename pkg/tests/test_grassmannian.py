import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nashlab.errors import RankDeficient
from nashlab.grassmannian import (
    NashPoint,
    Subspace,
    angle_to_delta,
    delta,
    delta_X,
    hausdorff_delta_oracle,
    line,
    pluecker,
    principal_angles,
    random_subspace,
    subspace_from_pluecker,
)


def test_orthogonal_lines():
    a, b = line([1, 0]), line([0, 1])
    assert delta(a, b) == pytest.approx(math.sqrt(2))
    assert hausdorff_delta_oracle(a, b) == pytest.approx(math.sqrt(2))


def test_sixty_degrees_gives_one():
    assert delta(line([1, 0]), line([0.5, math.sqrt(3) / 2])) == pytest.approx(1.0)
    assert angle_to_delta(math.pi / 3) == pytest.approx(1.0)


def test_tiny_angles_keep_precision():
    eps = 1e-9
    assert delta(line([1, 0]), line([1, eps])) == pytest.approx(eps, rel=1e-6)


def test_principal_angles_of_coordinate_planes():
    a = Subspace.from_spanning([[1, 0, 0, 0], [0, 1, 0, 0]])
    b = Subspace.from_spanning([[1, 0, 0, 0], [0, 0, 1, 0]])
    assert principal_angles(a, b) == pytest.approx([0, math.pi / 2])


def test_rank_deficient_frame():
    with pytest.raises(RankDeficient):
        Subspace.from_spanning([[1, 2, 3], [2, 4, 6]])


def test_pluecker_of_a_plane():
    p = pluecker(Subspace.from_spanning([[1, 0, 2], [0, 1, 3]]))
    v = np.asarray(p.coords)
    assert v / v[0] == pytest.approx([1, 3, -2])


def test_pluecker_roundtrip():
    rng = np.random.default_rng(0)
    for n, d in ((3, 1), (4, 2), (5, 2), (5, 3)):
        a = random_subspace(n, d, rng)
        assert delta(a, subspace_from_pluecker(pluecker(a).coords, n, d)) < 1e-10


def test_json_roundtrip_and_equality():
    a = random_subspace(4, 2, np.random.default_rng(1))
    assert Subspace.from_json(a.to_json()) == a


def test_delta_X_is_max_of_terms():
    p = NashPoint(np.array([0.0, 0.0]), line([1, 0]))
    q = NashPoint(np.array([0.1, 0.0]), line([0, 1]))
    assert delta_X(p, q) == pytest.approx(math.sqrt(2))


frames = st.integers(0, 2**32 - 1)


@settings(max_examples=40, deadline=None)
@given(frames)
def test_frame_invariance(seed):
    rng = np.random.default_rng(seed)
    a, b = random_subspace(4, 2, rng), random_subspace(4, 2, rng)
    g = rng.standard_normal((2, 2)) + 3 * np.eye(2)  # invertible change of basis
    a2 = Subspace.from_spanning(g @ a.frame)
    assert delta(a2, b) == pytest.approx(delta(a, b), abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(frames, st.sampled_from([(2, 1), (3, 1), (3, 2), (4, 2), (5, 2)]))
def test_metric_axioms(seed, shape):
    rng = np.random.default_rng(seed)
    a, b, c = (random_subspace(*shape, rng) for _ in range(3))
    assert delta(a, a) < 1e-7
    assert delta(a, b) == pytest.approx(delta(b, a), abs=1e-14)
    assert delta(a, b) + delta(b, c) - delta(a, c) >= -1e-10
    assert 0 <= delta(a, b) <= math.sqrt(2) + 1e-12


@settings(max_examples=25, deadline=None)
@given(frames)
def test_oracle_agrees_in_gr_2_4(seed):
    rng = np.random.default_rng(seed)
    a, b = random_subspace(4, 2, rng), random_subspace(4, 2, rng)
    oracle = hausdorff_delta_oracle(a, b, 2000, seed=seed)
    assert oracle <= delta(a, b) + 1e-12  # sampled sup approaches from below
    assert abs(oracle - delta(a, b)) < 1e-3


def test_random_subspace_rejects_bad_dimensions():
    with pytest.raises(ValueError):
        random_subspace(1, 2, np.random.default_rng(0))

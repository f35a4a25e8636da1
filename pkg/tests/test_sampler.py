import warnings

import numpy as np
import pytest

from nashlab.corpus import ORIGIN2, ORIGIN4, spec
from nashlab.errors import DegenerateFiberWarning, UnsupportedSpec
from nashlab.sampler import (
    ScaleLadder,
    branch_count,
    choose_projection,
    fiber_parities,
    fiber_points,
    multiplicity_mod2,
    random_regular_points,
    sample_branches,
)


def test_ladder_validation():
    with pytest.raises(ValueError):
        ScaleLadder((0.1, 0.2))
    assert len(ScaleLadder.default(5)) == 5
    assert ScaleLadder.between(0.1, 0.02, 0.75).scales[-1] >= 0.02


def test_cusp_fiber_is_exact():
    f = fiber_points(spec("cusp"), (0.0, 1.0), 0.04, 0.5)
    assert np.allclose(sorted(f.coords), [-0.008, 0.008])  # x = +-y^(3/2)


def test_cusp_projects_along_its_axis():
    proj = choose_projection(spec("cusp").localize(ORIGIN2))
    assert np.allclose(np.abs(proj.direction), [0, 1])


def test_tangent_fiber_warns():
    with pytest.warns(DegenerateFiberWarning):
        fiber_points(spec("circle"), (1.0, 0.0), 1.0, 2.0)


@pytest.mark.parametrize(
    "name, base, objects, count",
    [
        ("cusp", ORIGIN2, 2, 2),
        ("X2", ORIGIN2, 2, 2),
        ("Y1", ORIGIN2, 4, 2),
        ("node", ORIGIN2, 4, 2),
        ("circle", (1.0, 0.0), 2, 1),
        ("cusp_complex", ORIGIN4, 8, 2),
    ],
)
def test_branch_counts(name, base, objects, count):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateFiberWarning)
        branches = sample_branches(spec(name), base)
    assert len(branches) == objects
    assert branch_count(branches) == count


def test_branch_points_lie_on_the_curve():
    s = spec("X2")
    for b in sample_branches(s, ORIGIN2):
        for p in b.global_points:
            x, y = p
            assert abs(y * y - x**5) <= 1e-12 * max(1.0, abs(x) ** 5)


def test_branch_pairing_follows_one_branch():
    # along a branch of the cusp x^2 = y^3, the sign of x never flips
    for b in sample_branches(spec("cusp"), ORIGIN2):
        signs = np.sign(b.points[:, 0])
        assert len(set(signs)) == 1


def test_region_has_no_projection():
    with pytest.raises(UnsupportedSpec):
        choose_projection(spec("Z"))


def test_parity_values():
    assert multiplicity_mod2(spec("cusp"), ORIGIN2) == 0
    assert multiplicity_mod2(spec("circle"), (0.0, 1.0)) == 1
    rep = fiber_parities(spec("X2"), ORIGIN2)
    assert rep.dissent <= 1 and len(rep.counts) == 8


def test_random_regular_points_are_on_the_set():
    s = spec("circle")
    pts = random_regular_points(s, 10, seed=2)
    assert len(pts) == 10
    assert all(abs(np.hypot(*p) - 1) < 1e-9 for p in pts)

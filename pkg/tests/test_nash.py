import math

import numpy as np
import pytest

from nashlab.corpus import ORIGIN2, ORIGIN4, spec
from nashlab.errors import NotInjective, NotOnVariety, SingularPoint
from nashlab.grassmannian import Subspace, delta, line, pluecker
from nashlab.nash import (
    algebraic_tangent_cone,
    coincide_linearly,
    compute_C3,
    compute_C4,
    nash_lift,
    tangent_space,
)
from nashlab.sampler import random_regular_points, sample_branches
from nashlab.variety import VarietySpec

YX2 = VarietySpec.from_document({"kind": "implicit-real", "variables": ["x", "y"], "equation": "y = x^2", "ambient_dim": 2})
CUBIC = VarietySpec.from_document(
    {"kind": "parametric-graphs", "variables": ["x", "y"], "graphs": [{"expr": "x^3", "domain": [-1, 1]}], "ambient_dim": 2}
)


def test_circle_tangent_at_east_pole():
    assert tangent_space(spec("circle"), (1.0, 0.0)) == line([0, 1])


def test_cusp_tangent_is_kernel_of_gradient():
    assert tangent_space(spec("cusp"), (1.0, 1.0)) == line([3, 2])


def test_region_tangent_is_everything():
    assert tangent_space(spec("Z"), (1.0, 0.5)) == Subspace.full(2)


def test_singular_and_off_variety_points():
    with pytest.raises(SingularPoint):
        tangent_space(spec("cusp"), ORIGIN2)
    with pytest.raises(NotOnVariety):
        tangent_space(spec("cusp"), (1.0, 0.0))


def test_smooth_points_lift_to_their_tangent():
    rng = np.random.default_rng(11)
    for theta in rng.uniform(0, 2 * math.pi, 25):
        p = (math.cos(theta), math.sin(theta))
        assert delta(nash_lift(spec("circle"), p).tangent, line([-p[1], p[0]])) < 1e-9
    for x in rng.uniform(-1.5, 1.5, 25):
        assert delta(nash_lift(YX2, (x, x * x)).tangent, line([1, 2 * x])) < 1e-9


def test_complex_tangent_is_realified_complex_line():
    # x + y = 0 is the complex line spanned by (1, -1); realified: span{(1,-1,0,0), (0,0,1,-1)}
    t = tangent_space(spec("complex_line"), (0.3, -0.3, 0.0, 0.0))
    assert t == Subspace.from_spanning([[1, -1, 0, 0], [0, 0, 1, -1]])


def test_pluecker_ratio_along_cubic_graph():
    for x in (-0.7, -0.2, 0.1, 0.5, 0.9):
        c = np.asarray(pluecker(tangent_space(CUBIC, (x, x**3), graph_id=0)).coords)
        assert c[1] / c[0] == pytest.approx(3 * x * x, rel=1e-12, abs=1e-15)


def test_gauss_map_converges_monotonically_at_cusp():
    limit = nash_lift(spec("cusp"), ORIGIN2).tangent
    assert delta(limit, line([0, 1])) < 1e-3
    for b in sample_branches(spec("cusp"), ORIGIN2):
        gaps = [delta(tangent_space(spec("cusp"), p), line([0, 1])) for p in b.global_points]
        assert all(later < earlier for earlier, later in zip(gaps, gaps[1:]))


def test_cusp_cones():
    rays, linear = compute_C3(spec("cusp"), ORIGIN2)
    assert len(rays) == 1 and not linear  # a half-line
    assert np.allclose(rays[0], [0, 1], atol=1e-4)
    assert algebraic_tangent_cone(spec("cusp"), ORIGIN2) == "x^2"
    assert not coincide_linearly(spec("cusp"), ORIGIN2).coincide_linearly


def test_Yk_cone_is_a_line():
    rep = coincide_linearly(spec("Y1"), ORIGIN2)
    assert rep.c3_is_linear and rep.coincide_linearly
    for r in rep.c3_rays:
        assert abs(np.dot(r, r)) == pytest.approx(1)


def test_node_is_not_injective():
    with pytest.raises(NotInjective) as info:
        nash_lift(spec("node"), ORIGIN2)
    slopes = sorted(s.frame[0, 1] / s.frame[0, 0] for s in info.value.spaces)
    assert slopes == pytest.approx([-1, 1], abs=1e-3)


def test_complex_cusp_has_a_single_limit():
    assert len(compute_C4(spec("cusp_complex"), ORIGIN4)) == 1


def test_region_cones():
    rep = coincide_linearly(spec("Z"), ORIGIN2)
    assert rep.c4_spaces == [Subspace.full(2)]
    assert not rep.coincide_linearly


def test_smooth_points_of_circle_coincide():
    for p in random_regular_points(spec("circle"), 5, seed=3):
        assert coincide_linearly(spec("circle"), p).coincide_linearly

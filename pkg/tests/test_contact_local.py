import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from contactval import contact_local as cl
from contactval import matnum
from contactval.errors import ContractError, DegeneracyError, DomainError, ValidationError
from contactval.surfaces import parse_surface, quadratic_chart, sphere_phi2_closed_form


def random_symmetric(rng, size):
    a = rng.normal(size=(size, size))
    return 0.5 * (a + a.T)


def model_dB(S):
    n = S.shape[0] // 2
    return cl._diag_block(n) + matnum.standard_j(n) @ S


symmetric_2n = st.sampled_from([1, 2, 3]).flatmap(
    lambda n: arrays(np.float64, (2 * n, 2 * n), elements=st.floats(-3, 3, allow_nan=False))
).map(lambda a: 0.5 * (a + a.T))


def test_h_minus_s_is_j_times_dB():
    rng = np.random.default_rng(0)
    for n in (1, 2, 3):
        S = random_symmetric(rng, 2 * n)
        J = matnum.standard_j(n)
        np.testing.assert_allclose(cl.contact_h(n) - S, J @ model_dB(S), atol=1e-14)


def test_model_h_has_antisymmetric_part_half_j():
    for n in (1, 2, 3):
        assert cl.antisymmetric_scale(cl.contact_h(n)) == pytest.approx(0.5)


def test_antisymmetric_scale_none_when_not_proportional():
    h = np.zeros((4, 4))
    h[0, 1], h[1, 0] = 1.0, -1.0
    assert cl.antisymmetric_scale(h) is None


def test_fd_derivatives_on_cubic():
    f = lambda w: w[0] ** 3 + 2 * w[0] * w[1] ** 2
    w = np.array([0.3, -0.7])
    np.testing.assert_allclose(cl.fd_gradient(f, w), [3 * 0.09 + 2 * 0.49, 4 * 0.3 * -0.7], atol=1e-8)
    np.testing.assert_allclose(cl.fd_hessian(f, w), [[6 * 0.3, 4 * -0.7], [4 * -0.7, 4 * 0.3]], atol=1e-5)


def test_graph_without_derivatives_uses_finite_differences():
    F = cl.GraphHypersurface(1, lambda w: 0.5 * (w[0] ** 2 - w[1] ** 2), [[-1, 1], [-1, 1]])
    np.testing.assert_allclose(F.hessian(np.zeros(2)), np.diag([1.0, -1.0]), atol=1e-6)


def test_characteristic_field_vanishes_exactly_at_contact_point():
    F = quadratic_chart(np.diag([1.0, 2.0]))
    np.testing.assert_allclose(cl.characteristic_field(F, np.zeros(2)), 0.0)
    assert np.linalg.norm(cl.characteristic_field(F, np.array([0.1, 0.0]))) > 0


@given(symmetric_2n)
@settings(max_examples=60, deadline=None)
def test_dynamical_equals_geometric(S):
    n = S.shape[0] // 2
    dB = model_dB(S)
    if abs(np.linalg.det(dB)) < 1e-2:
        return
    pair = cl.SecondFundamentalPair(S, cl.contact_h(n))
    for k in range(2 * n + 1):
        dyn = cl.local_area_dynamical(dB, k)
        geo = cl.local_area_geometric(pair, k)
        assert geo == pytest.approx(dyn, rel=1e-8, abs=1e-8)


@given(symmetric_2n, st.floats(-2, 2).filter(lambda c: abs(c) > 0.05))
@settings(max_examples=60, deadline=None)
def test_odd_relation_for_any_antisymmetric_scale(S, c):
    n = S.shape[0] // 2
    rng = np.random.default_rng(abs(hash(float(c))) % 2**32)
    h = random_symmetric(rng, 2 * n) + c * matnum.standard_j(n)
    pair = cl.SecondFundamentalPair(S, h)
    if abs(np.linalg.det(pair.A)) < 1e-2:
        return
    for k in range(1, 2 * n + 1, 2):
        assert cl.odd_area_relation(pair, k, c) == pytest.approx(
            cl.local_area_geometric(pair, k), rel=1e-8, abs=1e-8)


def test_odd_relation_with_wrong_scale_differs():
    rng = np.random.default_rng(4)
    S = random_symmetric(rng, 2)
    pair = cl.SecondFundamentalPair(S, cl.contact_h(1))
    assert cl.odd_area_relation(pair, 1, -1.0) != pytest.approx(cl.local_area_geometric(pair, 1))


def test_odd_relation_rejects_even_degree():
    pair = cl.SecondFundamentalPair(np.eye(2), cl.contact_h(1))
    with pytest.raises(ContractError):
        cl.odd_area_relation(pair, 2)


def test_top_degree_area_is_inverse_det():
    S = np.diag([2.0, 3.0])
    dB = model_dB(S)
    assert cl.local_area_dynamical(dB, 2) == pytest.approx(1 / abs(np.linalg.det(dB)))
    assert cl.local_area_dynamical(dB, 0) == pytest.approx(np.sign(np.linalg.det(dB)))


def test_degenerate_linearization_raises():
    with pytest.raises(DegeneracyError):
        cl.local_area_dynamical(np.diag([1.0, 0.0]), 1)


def test_degree_out_of_range():
    with pytest.raises(DomainError):
        cl.local_area_dynamical(np.eye(2), 3)


def test_pair_rejects_non_symmetric_S():
    with pytest.raises(ValidationError):
        cl.SecondFundamentalPair(np.array([[0.0, 1.0], [0.0, 0.0]]), cl.contact_h(1))


@pytest.mark.parametrize("R", [0.5, 1.0, 2.0, 5.0])
def test_sphere_contact_points_at_poles(R):
    surf = parse_surface(f"sphere {R}")
    total = 0.0
    for chart in surf.charts:
        pts = cl.find_contact_points(chart)
        assert len(pts) == 1
        np.testing.assert_allclose(pts[0], 0.0, atol=1e-9)
        total += cl.hypersurface_valuation(chart, 2, pts)
    # derived law for dz = x dy - y dx
    assert total == pytest.approx(sphere_phi2_closed_form(R), rel=1e-10)
    assert total == pytest.approx(8 / (1 + R**-2), rel=1e-10)


@pytest.mark.parametrize("c", [0.5, 2.0])
def test_sphere_law_under_rescaled_form(c):
    from contactval.surfaces import sphere_charts
    R = 1.3
    total = sum(cl.hypersurface_valuation(ch, 2) for ch in sphere_charts(R, contact_scale=c))
    assert total == pytest.approx(8 / (1 + 1 / (c * R) ** 2), rel=1e-9)


@pytest.mark.parametrize("spec,chi", [("sphere 1", 2), ("sphere 3", 2), ("torus 2 0.5", 0),
                                      ("torus 3 1", 0), ("ellipsoid 1 1.5 0.7", 2),
                                      ("ellipsoid 2 1 3", 2)])
def test_euler_index_sum(spec, chi):
    assert cl.euler_index_sum(parse_surface(spec).charts) == chi


def test_contact_point_report_fields():
    F = quadratic_chart(np.diag([1.0, -1.0]))
    (p,) = cl.find_contact_points(F)
    rep = cl.contact_point_report(F, p)
    d = rep.to_dict()
    assert d["index"] == int(np.sign(rep.det_dB))
    assert d["kind"] in ("elliptic", "hyperbolic")
    for k in range(3):
        assert rep.local_areas[k] == pytest.approx(rep.geometric_areas[k], rel=1e-10)


def test_degenerate_contact_point_reported():
    # f = 0 is tangent to the distribution along the whole line x = 0
    F = quadratic_chart(np.zeros((2, 2)))
    with pytest.raises(DegeneracyError) as info:
        cl.find_contact_points(F)
    assert info.value.point[0] == pytest.approx(0.0, abs=1e-8)


def test_newton_failure_warns():
    # B = (x - y - 3, x) has its only root at (0, -3), outside the domain
    def f(w):
        return 0.5 * w[0] * w[0] + 0.5 * w[1] * w[1] + 3.0 * w[1]

    F = cl.GraphHypersurface(1, f, [[-1, 1], [-1, 1]])
    with pytest.warns(cl.NewtonDivergenceWarning):
        pts = cl.find_contact_points(F, grid_per_axis=11)
    assert pts == []

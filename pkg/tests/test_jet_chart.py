import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mixed3geo.errors import DegenerateValue, SamplingExhausted, StencilOutOfDomain
from mixed3geo.jet_chart import (
    Chart,
    Jet2,
    ScalarField,
    SplitMix64,
    fd_oracle,
    jet_arith,
    jet_einsum,
    jet_fd_mismatch,
    jet_sqrt,
    sample_points,
)

finite = st.floats(-3.0, 3.0, allow_nan=False)


def coord_jet(x):
    """Jet of the identity coordinate in 1D."""
    return Jet2.variables(np.array([float(x)]))[0]


def random_jet(draw_vals, dim=3):
    v, g, h = draw_vals
    h = np.asarray(h).reshape(dim, dim)
    return Jet2(v, np.asarray(g), 0.5 * (h + h.T))


jets = st.tuples(finite, st.lists(finite, min_size=3, max_size=3),
                 st.lists(finite, min_size=9, max_size=9)).map(random_jet)


class TestSplitMix:
    def test_reference_stream(self):
        # first outputs of the reference splitmix64 for seed 0
        r = SplitMix64(0)
        assert r.next_u64() == 0xE220A8397B1DCDAF
        assert r.next_u64() == 0x6E789E6AA1B965F4

    def test_random_in_unit_interval(self):
        r = SplitMix64(5)
        u = [r.random() for _ in range(1000)]
        assert min(u) >= 0.0 and max(u) < 1.0
        assert abs(np.mean(u) - 0.5) < 0.05

    def test_spawn_is_deterministic_and_keyed(self):
        a = SplitMix64(9).spawn(3).next_u64()
        assert a == SplitMix64(9).spawn(3).next_u64()
        assert a != SplitMix64(9).spawn(4).next_u64()


class TestJetArithmetic:
    def test_constant_product(self):
        c = jet_arith(Jet2.constant(3.0, 2), Jet2.constant(2.0, 2), "mul")
        assert c.val == 6.0
        assert np.all(c.grad == 0) and np.all(c.hess == 0)

    def test_square(self):
        x = coord_jet(2.0)
        sq = jet_arith(x, x, "mul")
        assert sq.val == 4.0
        np.testing.assert_array_equal(sq.grad, [4.0])
        np.testing.assert_array_equal(sq.hess, [[2.0]])

    def test_reciprocal(self):
        r = jet_arith(Jet2.constant(1.0, 1), coord_jet(2.0), "div")
        assert r.val == pytest.approx(0.5)
        np.testing.assert_allclose(r.grad, [-0.25])
        np.testing.assert_allclose(r.hess, [[0.25]])

    def test_reciprocal_matches_finite_differences(self):
        chart = Chart.box([1.0], [3.0])
        f = ScalarField(chart, lambda x: 1.0 / x[0])
        p = chart.point([2.0])
        g_err, h_err = jet_fd_mismatch(f(p), fd_oracle(f, p))
        assert g_err < 1e-8 and h_err < 1e-8

    def test_division_by_zero(self):
        with pytest.raises(DegenerateValue):
            jet_arith(Jet2.constant(1.0, 1), coord_jet(0.0), "div")

    def test_unknown_op(self):
        with pytest.raises(ValueError):
            jet_arith(coord_jet(1.0), coord_jet(1.0), "pow")

    def test_sqrt_examples(self):
        s = jet_sqrt(Jet2.constant(4.0, 1))
        assert s.val == 2.0 and s.grad[0] == 0.0 and s.hess[0, 0] == 0.0
        s = jet_sqrt(coord_jet(4.0))
        np.testing.assert_allclose([s.val, s.grad[0], s.hess[0, 0]], [2.0, 0.25, -0.03125])
        s = jet_sqrt(Jet2(1.0, np.array([2.0]), np.array([[0.0]])))
        np.testing.assert_allclose([s.val, s.grad[0], s.hess[0, 0]], [1.0, 1.0, -1.0])

    @pytest.mark.parametrize("v", [0.0, -1.0])
    def test_sqrt_nonpositive(self, v):
        with pytest.raises(DegenerateValue):
            jet_sqrt(Jet2.constant(v, 2))

    @given(jets, jets)
    def test_product_hessian_symmetric(self, a, b):
        c = jet_arith(a, b, "mul")
        np.testing.assert_array_equal(c.hess, c.hess.T)

    @given(jets, jets)
    def test_leibniz(self, a, b):
        c = jet_arith(a, b, "mul")
        np.testing.assert_allclose(c.grad, a.val * b.grad + b.val * a.grad, rtol=1e-12, atol=1e-12)

    @given(jets, jets)
    def test_sum_and_difference(self, a, b):
        s, d = jet_arith(a, b, "add"), jet_arith(a, b, "sub")
        np.testing.assert_allclose((s + d).hess, 2 * a.hess, atol=1e-12)

    @given(jets)
    def test_division_inverts_multiplication(self, a):
        b = Jet2(2.5, np.array([0.3, -0.1, 0.7]), np.diag([0.2, 0.1, -0.4]))
        back = jet_arith(jet_arith(a, b, "mul"), b, "div")
        np.testing.assert_allclose(back.val, a.val, atol=1e-10)
        np.testing.assert_allclose(back.grad, a.grad, atol=1e-9)
        np.testing.assert_allclose(back.hess, a.hess, atol=1e-8)

    def test_einsum_matches_componentwise_products(self):
        x = Jet2.variables(np.array([0.3, -0.2]))
        A = Jet2.stack([Jet2.stack([x[0], x[1]]), Jet2.stack([x[0] * x[1], x[0] + 1.0])])
        v = Jet2.stack([x[1] * x[1], x[0]])
        got = jet_einsum("ij,j->i", A, v)
        want0 = x[0] * (x[1] * x[1]) + x[1] * x[0]
        np.testing.assert_allclose(got[0].grad, want0.grad)
        np.testing.assert_allclose(got[0].hess, want0.hess)


class TestChartsAndSampling:
    def test_sampling_is_deterministic(self):
        chart = Chart.unit_ball(4)
        a = [p.tolist() for p in sample_points(chart, 7, 3)]
        b = [p.tolist() for p in sample_points(chart, 7, 3)]
        assert a == b

    @given(st.integers(0, 2**32))
    @settings(max_examples=20)
    def test_samples_respect_margin(self, seed):
        chart = Chart.unit_ball(3)
        for p in sample_points(chart, 5, seed):
            assert np.all(chart.constraint_values(p.coords) > 0.05)

    def test_empty_region_exhausts(self):
        chart = Chart(1, ("x",), (lambda x: -1.0,), np.array([0.0]), np.array([1.0]))
        with pytest.raises(SamplingExhausted):
            sample_points(chart, 1, 0)

    def test_point_coords_read_only(self):
        p = Chart.unit_ball(2).point([0.1, 0.2])
        with pytest.raises(ValueError):
            p.coords[0] = 1.0


class TestFiniteDifferenceOracle:
    def test_constant(self):
        chart = Chart.box([-1.0, -1.0], [1.0, 1.0])
        f = ScalarField.constant(chart, 3.0)
        fd = fd_oracle(f, chart.point([0.1, 0.2]))
        assert np.max(np.abs(fd.grad)) < 1e-10 and np.max(np.abs(fd.hess)) < 1e-10

    def test_square_gradient(self):
        chart = Chart.box([0.0], [2.0])
        f = ScalarField(chart, lambda x: x[0] * x[0])
        fd = fd_oracle(f, chart.point([1.0]), h=1e-3, refine=False)
        assert abs(fd.grad[0] - 2.0) < 1e-6

    def test_stencil_leaving_domain(self):
        chart = Chart.box([0.0], [1.0])
        f = ScalarField.coordinate(chart, 0)
        with pytest.raises(StencilOutOfDomain):
            fd_oracle(f, chart.point([1e-4]), h=1e-3)

    def test_refinement_beats_plain_central_differences(self):
        chart = Chart.box([-1.0, -1.0], [1.0, 1.0])
        f = ScalarField(chart, lambda x: jet_sqrt(x[0] * x[1] + 0.15) / (x[0] + 1.1))
        p = chart.point([0.3, -0.4])
        plain = max(jet_fd_mismatch(f(p), fd_oracle(f, p, refine=False)))
        refined = max(jet_fd_mismatch(f(p), fd_oracle(f, p)))
        assert plain > 1e-6
        assert refined < plain / 100

    @given(st.floats(-0.5, 0.5), st.floats(-0.5, 0.5), st.floats(-0.5, 0.5))
    @settings(max_examples=25, deadline=None)
    def test_jets_agree_with_fd_on_rational_functions(self, a, b, c):
        chart = Chart.box([-1.0] * 3, [1.0] * 3)

        def fn(x):
            num = x[0] * x[1] + x[2] * x[2] * x[2] + 1.0
            return jet_sqrt(num * num + 0.5) / (x[0] * x[0] + 2.0)

        f = ScalarField(chart, fn)
        p = chart.point([a, b, c])
        g_err, h_err = jet_fd_mismatch(f(p), fd_oracle(f, p))
        assert g_err <= 1e-6 and h_err <= 1e-6

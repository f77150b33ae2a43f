from types import SimpleNamespace

import numpy as np
import pytest

from conftest import points
from mixed3geo.errors import BadSeedPoint, ConfigError
from mixed3geo.jet_chart import Jet2
from mixed3geo.models import (
    MODEL_DESCRIPTIONS,
    PERTURBABLE,
    build_model,
    flat_paraquaternionic,
    graph_chart,
    list_models,
    omega_wedge_check,
    perturb_structure,
    pseudo_sphere,
)
from mixed3geo.curvature import riemann
from mixed3geo.structures import TAU, validate_hyper_parahermitian, validate_mixed_3_sasakian, validate_mixed_3_structure
from mixed3geo.tensors import OneForm, TwoFormField, VectorField, nijenhuis, signature, wedge_1_2


class TestFlatAmbient:
    def test_m0_action_of_J2(self):
        J1, J2, J3 = flat_paraquaternionic(0).J
        e = np.eye(4)
        np.testing.assert_array_equal(J2 @ e[0], e[3])
        np.testing.assert_array_equal(J2 @ e[1], -e[2])
        np.testing.assert_array_equal(J2 @ e[2], -e[1])
        np.testing.assert_array_equal(J2 @ e[3], e[0])
        np.testing.assert_array_equal(J2 @ J2, np.eye(4))

    def test_m0_products(self):
        J1, J2, J3 = flat_paraquaternionic(0).J
        np.testing.assert_array_equal(J1 @ J2, J3)
        np.testing.assert_array_equal(J2 @ J1, -J3)

    @pytest.mark.parametrize("m", [0, 1, 2])
    def test_validator(self, m):
        A = flat_paraquaternionic(m)
        assert A.dim == 4 * (m + 1)
        rep = validate_hyper_parahermitian(A.J_fields, A.metric, points(A, 2), 1e-12)
        assert rep.overall
        assert signature(A.G) == (2 * m + 2, 2 * m + 2)

    def test_flat_curvature(self, ambient):
        for p in points(ambient, 2):
            assert np.max(np.abs(riemann(ambient.metric, p).riemann13)) == 0.0

    def test_negative_m(self):
        with pytest.raises(ValueError):
            flat_paraquaternionic(-1)


class TestPseudoSphere:
    def test_embedding_on_level_set(self, sphere):
        for p in points(sphere, 5):
            x = sphere.embedding(p)
            assert abs(x @ sphere.ambient.G @ x - sphere.s) <= 1e-12

    def test_normal_is_unit(self, sphere):
        for p in points(sphere, 3):
            _, N, _ = sphere.frame_fn(Jet2.variables(p.coords))
            assert abs(N.val @ sphere.ambient.G @ N.val - sphere.s) <= 1e-12

    def test_pullback_equals_first_fundamental_form(self, sphere):
        for p in points(sphere, 5):
            np.testing.assert_allclose(sphere.g.at(p), sphere.first_fundamental_form(p), atol=1e-12)

    def test_reeb_fields_tangent(self, sphere):
        G = sphere.ambient.G
        for p in points(sphere, 3):
            N = sphere.frame_fn(Jet2.variables(p.coords))[1].val
            for Ja in sphere.ambient.J:
                assert abs(N @ G @ (Ja @ N)) <= 1e-12

    def test_eta_duality(self, sphere):
        S = sphere.structure
        for p in points(sphere, 3):
            gm = S.g.at(p)
            for a in range(3):
                np.testing.assert_allclose(S.epsilon[a] * gm @ S.xi[a].at(p), S.eta[a].at(p), atol=1e-9)

    def test_sigma_is_minus_s(self, sphere):
        rep = validate_mixed_3_structure(sphere.structure, points(sphere, 3))
        assert rep.info["sigma"] == -sphere.s == sphere.sigma

    def test_negative_signature(self, sphere_neg):
        rep = validate_mixed_3_structure(sphere_neg.structure, points(sphere_neg, 2))
        assert rep.info["signature"] == [4, 3]
        assert rep.info["epsilon"] == [-1.0, -1.0, 1.0]

    def test_positive_curvature_constants(self, sphere_pos):
        for p in points(sphere_pos, 2):
            pack = riemann(sphere_pos.g, p)
            np.testing.assert_allclose(pack.ricci, -6 * pack.metric, atol=1e-7)
            assert pack.scalar == pytest.approx(-42, abs=1e-6)
            assert pack.sectional(np.eye(7)[0], np.eye(7)[1]) == pytest.approx(-1, abs=1e-7)

    def test_sasakian(self, sphere):
        assert validate_mixed_3_sasakian(sphere.structure, points(sphere, 3)).overall

    def test_general_m(self):
        M = pseudo_sphere(2, 1, 3)
        assert M.dim == 11
        assert validate_mixed_3_structure(M.structure, points(M, 2)).overall

    def test_bad_seed_point(self):
        A = flat_paraquaternionic(1)
        x0 = np.zeros(8)
        x0[2] = 1.0  # G(x0, x0) = -1 but every G = +1 coordinate is zero
        with pytest.raises(BadSeedPoint):
            graph_chart(A, x0, 1)

    def test_seed_determinism(self):
        a, b = pseudo_sphere(1, 1, 9), pseudo_sphere(1, 1, 9)
        np.testing.assert_array_equal(a.x0, b.x0)

    @pytest.mark.parametrize("args", [(0, 1), (1, 0)])
    def test_bad_arguments(self, args):
        with pytest.raises(ValueError):
            pseudo_sphere(*args, 1)


class TestProduct:
    def test_dimension_and_signature(self, product):
        assert product.dim == 8
        for p in points(product, 2):
            assert signature(product.G.at(p)) == (4, 4)

    def test_vertical_vector(self, product):
        S = product.base.structure
        for p in points(product, 2):
            base_p = S.chart.point(p.coords[:7])
            for a in range(3):
                image = product.J[a].at(p) @ np.eye(8)[7]
                np.testing.assert_allclose(image[:7], -TAU[a] * S.xi[a].at(base_p), atol=1e-14)
                assert image[7] == 0.0

    def test_squares(self, product):
        rng = np.random.default_rng(0)
        for p in points(product, 2):
            for a in range(3):
                J = product.J[a].at(p)
                X = rng.uniform(-1, 1, 8)
                np.testing.assert_allclose(J @ (J @ X), -TAU[a] * X, atol=1e-10)

    def test_domega(self, product):
        for p in points(product, 4):
            for a in (1, 2, 3):
                assert omega_wedge_check(product, a, p) <= 1e-7

    def test_t_translation_invariance(self, product):
        p = points(product, 1)[0]
        q = p.shifted(np.eye(8)[7])
        for a in (1, 2, 3):
            assert abs(omega_wedge_check(product, a, p) - omega_wedge_check(product, a, q)) <= 1e-10

    def test_constant_form_negative_control(self, product):
        M = np.zeros((8, 8))
        M[0, 1], M[1, 0] = 1.0, -1.0
        omega = TwoFormField.from_full(product.chart, lambda x: Jet2.constant(M, x.dim))
        dt = OneForm.constant(product.chart, np.eye(8)[7])
        fake = SimpleNamespace(Omega=(omega,), dt=dt, sigma=1)
        p = points(product, 1)[0]
        expected = 2 * wedge_1_2(np.eye(8)[7], omega.form_at(p)).max_abs()
        assert expected > 0
        assert omega_wedge_check(fake, 1, p) == pytest.approx(expected)

    def test_nijenhuis_with_t_dependent_fields(self, product):
        rng = np.random.default_rng(3)
        for p in points(product, 2):
            for _ in range(3):
                lin = rng.uniform(-1, 1, (8, 8))
                lin[:, 7] += 1.0  # make the t-dependence explicit
                X = VectorField.affine(product.chart, rng.uniform(-1, 1, 8), lin, p.coords)
                Y = VectorField.affine(product.chart, rng.uniform(-1, 1, 8),
                                       rng.uniform(-1, 1, (8, 8)), p.coords)
                for J in product.J:
                    assert np.max(np.abs(nijenhuis(J, X, Y, p))) <= 1e-6


class TestRegistry:
    def test_keys(self):
        text = list_models()
        assert "pseudo-sphere:1:+1" in text
        keys = [line.split()[0] for line in text.splitlines()]
        assert keys == sorted(keys) == sorted(MODEL_DESCRIPTIONS)

    @pytest.mark.parametrize("key", sorted(MODEL_DESCRIPTIONS))
    def test_every_key_builds(self, key):
        assert build_model(key, 1).key == key

    @pytest.mark.parametrize("key", ["nope", "pseudo-sphere:1:2", "pseudo-sphere:x:+1",
                                     "product:flat-pq:1:+1", "pseudo-sphere:0:+1", "flat-pq"])
    def test_unknown_keys(self, key):
        with pytest.raises(ConfigError):
            build_model(key)


class TestPerturbation:
    @pytest.mark.parametrize("which", PERTURBABLE)
    def test_breaks_axioms(self, sphere, which):
        S = perturb_structure(sphere.structure, which)
        assert not validate_mixed_3_structure(S, points(sphere, 2)).overall

    def test_unknown(self, sphere):
        with pytest.raises(ConfigError):
            perturb_structure(sphere.structure, "tau")

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import coth, random_frame, type_a_specs
from nullity_lab.errors import NotKappaMemberError
from nullity_lab.geometry import AmbientSpace, FramePoint, canonical_phi, gauss_curvature
from nullity_lab.models import Family, ModelSpec, build_frame, principal_data
from nullity_lab.nullity import (
    NullityFamily,
    classify_model,
    design_system,
    fit_model,
    fit_nullity,
    kappa_of_model,
    membership_residual,
)

CH2, CP2, CH3 = AmbientSpace(-4, 2), AmbientSpace(4, 2), AmbientSpace(-4, 3)
HORO = ModelSpec(CH2, Family.CH_Horosphere)


def brute_force_system(frame, ncoef):
    """Design matrix assembled pair by pair from the vector Gauss equation."""
    rows, rhs = [], []
    xi = frame.xi
    for i in range(frame.m):
        for j in range(frame.m):
            if i == j:
                continue
            X, Y = frame.basis(i), frame.basis(j)
            ex, ey = X @ xi, Y @ xi
            cols = [ey * X - ex * Y,
                    ey * frame.shape @ X - ex * frame.shape @ Y,
                    ey * frame.phi @ frame.shape @ X - ex * frame.phi @ frame.shape @ Y]
            rows.append(np.stack(cols[:ncoef], axis=1))
            rhs.append(gauss_curvature(frame, X, Y, xi))
    return np.vstack(rows), np.concatenate(rhs)


def random_axi_zero(rng, n, c):
    lam1 = rng.uniform(0.2, 5.0, n - 1) * rng.choice([-1, 1], n - 1)
    return ModelSpec(AmbientSpace(c, n), Family.HopfAxiZero, axi_pairs=tuple((l, c / 4 / l) for l in lam1))


class TestMembershipResidual:
    def test_horosphere_kappa_one(self):
        assert membership_residual(build_frame(HORO), "K", 1.0) <= 1e-12

    def test_tube_over_ch1(self):
        f = build_frame(ModelSpec(CH2, Family.CH_TubeOverCHn1, r=0.8))
        assert membership_residual(f, "K", math.tanh(0.8) ** 2) <= 1e-12

    @pytest.mark.parametrize("kappa", [0.0, 0.5, 3.0])
    def test_linear_defect(self, kappa):
        assert membership_residual(build_frame(HORO), "K", kappa) == pytest.approx(abs(1 - kappa), abs=1e-15)

    def test_narrow_families_ignore_extra_coefficients(self):
        f = build_frame(HORO)
        assert membership_residual(f, "K", 1.0, mu=5.0, nu=7.0) == membership_residual(f, "K", 1.0)
        assert membership_residual(f, "KM", 0.5, 0.5, nu=7.0) <= 1e-12


class TestFit:
    def test_tube_over_ch1_in_ch3(self):
        fit = fit_model(ModelSpec(CH3, Family.CH_TubeOverCHk, r=0.8, k=1), "KM")
        assert fit.kappa == pytest.approx(-1.0, abs=1e-10)
        assert fit.mu == pytest.approx(2 * coth(1.6), abs=1e-10)
        assert fit.residual <= 1e-10 and fit.solution_dim == 0

    def test_horosphere_km_is_a_line(self):
        fit = fit_model(HORO, "KM")
        assert fit.residual <= 1e-12
        assert fit.solution_dim == 1
        assert fit.kappa + fit.mu == pytest.approx(1.0, abs=1e-12)
        # minimum-norm point on kappa + mu = 1
        assert fit.kappa == pytest.approx(0.5, abs=1e-12)
        (v,) = fit.nullspace_basis
        np.testing.assert_allclose(v, [1 / math.sqrt(2), -1 / math.sqrt(2), 0.0], atol=1e-12)

    def test_flat_shape_operator(self):
        f = FramePoint(AmbientSpace(4, 2), canonical_phi(2), np.zeros((3, 3)))
        fit = fit_nullity(f, "K")
        assert fit.kappa == pytest.approx(1.0, abs=1e-12) and fit.residual <= 1e-12
        # A = 0 makes the mu and nu columns vanish
        assert fit_nullity(f, "KMN").solution_dim == 2

    def test_type_a_kmn_nu_vanishes(self):
        for n in (2, 3):
            for spec in type_a_specs(n):
                assert abs(fit_model(spec, "KMN").nu) <= 1e-10

    def test_matches_independent_least_squares(self, rng):
        for _ in range(40):
            f = random_frame(rng)
            for fam in NullityFamily:
                M, b = brute_force_system(f, fam.ncoef)
                M2, b2 = design_system(f, fam)
                np.testing.assert_allclose(M2, M, atol=1e-14)
                np.testing.assert_allclose(b2, b, atol=1e-12)
                x = np.linalg.lstsq(M, b, rcond=1e-10)[0]
                fit = fit_nullity(f, fam)
                np.testing.assert_allclose(fit.coefficients[: fam.ncoef], x, atol=1e-10)

    def test_residual_consistency(self, rng):
        for _ in range(40):
            f = random_frame(rng)
            for fam in NullityFamily:
                fit = fit_nullity(f, fam)
                assert membership_residual(f, fam, *fit.coefficients) == pytest.approx(fit.residual, abs=1e-12)
                M, b = design_system(f, fam)
                defect = M @ np.array(fit.coefficients[: fam.ncoef]) - b
                assert np.max(np.abs(defect)) == pytest.approx(fit.residual, abs=1e-12)

    def test_least_squares_objective_nests(self, rng):
        for _ in range(300):
            f = random_frame(rng)
            k, km, kmn = (fit_nullity(f, fam).residual_l2 for fam in NullityFamily)
            assert kmn <= km + 1e-12 and km <= k + 1e-12

    def test_max_norm_nests_on_catalog(self):
        for n in (2, 3, 4):
            for spec in type_a_specs(n):
                k, km, kmn = (fit_model(spec, fam).residual for fam in NullityFamily)
                assert kmn <= km + 1e-12 and km <= k + 1e-12

    def test_solution_dim_bounds(self, rng):
        for _ in range(30):
            f = random_frame(rng)
            for fam in NullityFamily:
                fit = fit_nullity(f, fam)
                assert 0 <= fit.solution_dim <= fam.ncoef
                assert len(fit.nullspace_basis) == fit.solution_dim

    def test_json_shape(self):
        d = json.loads(json.dumps(fit_model(HORO, "KMN").to_dict()))
        assert set(d) >= {"family", "kappa", "mu", "nu", "residual", "solution_dim", "nullspace_basis"}

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.sampled_from([4.0, -4.0, 2.5, -0.3]), st.integers(2, 4))
    def test_alpha_zero_forces_c_over_4(self, seed, c, n):
        spec = random_axi_zero(np.random.default_rng(seed), n, c)
        fit = fit_model(spec, "K")
        assert fit.kappa == pytest.approx(c / 4, abs=1e-10)
        assert fit.residual <= 1e-10


class TestClassify:
    def test_cp_sphere(self):
        rep = classify_model(ModelSpec(CP2, Family.CP_GeodesicSphere, r=0.6))
        assert rep.kappa_member and rep.kappa == pytest.approx(1 / math.tan(0.6) ** 2, abs=1e-12)
        assert rep.km_direction is not None and rep.nu == 0.0

    def test_ch_sphere(self):
        rep = classify_model(ModelSpec(CH2, Family.CH_GeodesicSphere, r=1.2))
        assert rep.kappa == pytest.approx(coth(1.2) ** 2, abs=1e-12)

    def test_ch_tube_over_chk(self):
        spec = ModelSpec(CH3, Family.CH_TubeOverCHk, r=0.9, k=1)
        rep = classify_model(spec)
        assert not rep.kappa_member and rep.kappa is None
        assert rep.km_direction is None
        assert rep.km_point == (-1.0, principal_data(spec).alpha)
        with pytest.raises(NotKappaMemberError):
            kappa_of_model(spec)
        assert fit_model(spec, "K").residual > 1e-3

    def test_kappa_of_model_examples(self):
        assert kappa_of_model(ModelSpec(CP2, Family.HopfAxiZero, axi_pairs=((1.0, 1.0),))) == 1.0
        assert kappa_of_model(ModelSpec(CH2, Family.HopfAxiZero, axi_pairs=((1.0, -1.0),))) == -1.0
        assert kappa_of_model(HORO) == 1.0
        assert kappa_of_model(ModelSpec(CH2, Family.CH_TubeOverCHn1, r=0.8)) == pytest.approx(0.4409448322677562, abs=1e-14)

    def test_cp_tube_at_quarter_pi_is_kappa_member(self):
        # alpha = 2cot(pi/2) = 0, so both kappa readings collapse to c/4
        rep = classify_model(ModelSpec(AmbientSpace(4, 3), Family.CP_TubeOverCPk, r=math.pi / 4, k=1))
        assert rep.kappa_member and rep.kappa == 1.0

    def test_fits_agree_with_closed_forms(self):
        for n in (2, 3, 4):
            for spec in type_a_specs(n, radii=np.linspace(0.1, 1.5, 8)):
                rep = classify_model(spec)
                fk, fkm = fit_model(spec, "K"), fit_model(spec, "KM")
                assert (fk.residual <= 1e-10) == rep.kappa_member
                if rep.kappa_member:
                    assert fk.kappa == pytest.approx(rep.kappa, abs=1e-10 * max(1, abs(rep.kappa)))
                assert fkm.solution_dim == (0 if rep.km_direction is None else 1)
                assert rep.km_contains(fkm.kappa, fkm.mu)

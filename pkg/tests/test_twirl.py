import math

import numpy as np
import pytest

from tripsim.bases import bell2, ghz_basis
from tripsim.core import DensityOp, StateVector
from tripsim.twirl import (
    GenWerner3Q,
    IsotropicParams,
    WernerParams,
    antisymmetric_projector,
    flip_operator,
    gen_werner_3q,
    isotropic,
    isotropic_invariant,
    max_entangled_projector,
    symmetric_projector,
    trace_distance,
    twirl_report,
    twirl_uu,
    twirl_uustar,
    werner,
    werner_invariant,
)


class TestWerner:
    def test_equal_weights_give_maximally_mixed(self):
        rho = werner(WernerParams(2, 0.25))
        np.testing.assert_allclose(rho.matrix, np.eye(4) / 4, atol=1e-12)

    def test_invariant_round_trip(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            d = int(rng.integers(2, 4))
            p = float(rng.random())
            assert abs(werner_invariant(werner(WernerParams(d, p))) - p) < 1e-12

    def test_p_one_is_singlet_projector(self):
        singlet = bell2(math.pi / 4, (1, 1)).amplitudes
        np.testing.assert_allclose(
            werner(WernerParams(2, 1.0)).matrix,
            np.outer(singlet, singlet.conj()),
            atol=1e-12,
        )

    def test_projector_algebra(self):
        for d in (2, 3):
            plus, minus = symmetric_projector(d), antisymmetric_projector(d)
            np.testing.assert_allclose(plus @ minus, 0 * plus, atol=1e-12)
            np.testing.assert_allclose(plus @ plus, plus, atol=1e-12)
            assert abs(np.trace(minus).real - (d * d - d) / 2) < 1e-12
            v = flip_operator(d)
            np.testing.assert_allclose(v @ v, np.eye(d * d), atol=1e-12)


class TestIsotropic:
    def test_f_one_is_max_entangled_projector(self):
        np.testing.assert_allclose(
            isotropic(IsotropicParams(2, 1.0)).matrix,
            max_entangled_projector(2),
            atol=1e-12,
        )

    def test_f_at_lower_bound_is_maximally_mixed(self):
        for d in (2, 3):
            rho = isotropic(IsotropicParams(d, 1.0 / (d * d)))
            np.testing.assert_allclose(rho.matrix, np.eye(d * d) / (d * d), atol=1e-12)

    def test_invariant_round_trip(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            d = int(rng.integers(2, 4))
            f = float(rng.uniform(1.0 / (d * d), 1.0))
            assert abs(isotropic_invariant(isotropic(IsotropicParams(d, f))) - f) < 1e-12

    def test_below_projector_weight_bound_rejected(self):
        with pytest.raises(ValueError, match="1/d"):
            isotropic(IsotropicParams(2, 0.1))


class TestGenWerner3Q:
    def test_fully_mixed_limit(self):
        np.testing.assert_allclose(
            gen_werner_3q(GenWerner3Q(0.0, 0.7)).matrix, np.eye(8) / 8, atol=1e-12
        )

    def test_pure_limit(self):
        ghz = ghz_basis(math.pi / 4, (0, 0, 0)).amplitudes
        np.testing.assert_allclose(
            gen_werner_3q(GenWerner3Q(1.0, math.pi / 4)).matrix,
            np.outer(ghz, ghz.conj()),
            atol=1e-12,
        )

    def test_purity_formula(self):
        for p in (0.0, 0.2, 0.55, 1.0):
            rho = gen_werner_3q(GenWerner3Q(p, 0.4))
            direct = float(np.trace(rho.matrix @ rho.matrix).real)
            assert abs(direct - (p * p + (1 - p * p) / 8)) < 1e-12


class TestTwirl:
    def test_werner_is_exact_fixed_point_per_sample(self):
        rho = werner(WernerParams(2, 0.7))
        out = twirl_uu(rho, 2000, np.random.default_rng(0))
        assert trace_distance(out, rho) < 5e-2

    def test_isotropic_is_exact_fixed_point_per_sample(self):
        rho = isotropic(IsotropicParams(2, 0.6))
        out = twirl_uustar(rho, 2000, np.random.default_rng(0))
        assert trace_distance(out, rho) < 5e-2

    def test_maximally_mixed_untouched_by_single_sample(self):
        rho = DensityOp(np.eye(4) / 4)
        out = twirl_uu(rho, 1, np.random.default_rng(3))
        np.testing.assert_allclose(out.matrix, rho.matrix, atol=1e-12)
        out = twirl_uustar(rho, 1, np.random.default_rng(3))
        np.testing.assert_allclose(out.matrix, rho.matrix, atol=1e-12)

    def test_max_entangled_converges_to_symmetric_family_member(self):
        rho = DensityOp.from_pure(bell2(math.pi / 4, (0, 0)))
        assert abs(werner_invariant(rho)) < 1e-12
        out = twirl_uu(rho, 2000, np.random.default_rng(1))
        assert trace_distance(out, werner(WernerParams(2, 0.0))) < 5e-2

    def test_random_qutrit_pure_converges_to_isotropic(self):
        rng = np.random.default_rng(2)
        v = rng.standard_normal(9) + 1j * rng.standard_normal(9)
        v /= np.linalg.norm(v)
        rho = DensityOp(np.outer(v, v.conj()))
        f = isotropic_invariant(rho)
        assert f > 1.0 / 9.0
        out = twirl_uustar(rho, 2000, np.random.default_rng(42))
        assert trace_distance(out, isotropic(IsotropicParams(3, f))) < 5e-2

    def test_convergence_scales_like_inverse_sqrt(self):
        # Non-invariant inputs so the Monte-Carlo error is actually visible;
        # seeds fixed, so these are deterministic values under a c/sqrt(N)
        # envelope with c = 2.
        rho = DensityOp.from_pure(bell2(math.pi / 4, (0, 0)))
        target = werner(WernerParams(2, 0.0))
        for n in (500, 2000, 8000):
            td = trace_distance(twirl_uu(rho, n, np.random.default_rng(42)), target)
            assert td < 2.0 / math.sqrt(n)
        rho01 = DensityOp.from_pure(StateVector([0, 1, 0, 0]))
        target01 = werner(WernerParams(2, 0.5))
        for n in (500, 2000, 8000):
            td = trace_distance(twirl_uu(rho01, n, np.random.default_rng(42)), target01)
            assert td < 2.0 / math.sqrt(n)

    def test_outputs_are_valid_density_ops(self):
        out = twirl_uu(werner(WernerParams(3, 0.4)), 50, np.random.default_rng(5))
        assert isinstance(out, DensityOp)

    def test_report_history_shrinks(self):
        report = twirl_report("werner", 2, 0.7, 500, np.random.default_rng(0))
        history = report["trace_distance_history"]
        assert len(history) == 10
        assert history[-1][0] == 500
        assert all(dist < 5e-2 for _, dist in history)

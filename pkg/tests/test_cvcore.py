"""Fock-space and Gaussian-moment numerics tests."""

import math
from types import SimpleNamespace

import numpy as np
import pytest
from scipy import integrate

from cvoodg import cvcore as cv
from cvoodg.cvcore import FockMatrix, GaussianChannel, GaussianMoments, OffDiagLabel
from cvoodg.oracle import coherent_projector, fock_state, squeezed_vacuum_state


def random_valid_channel(rng) -> GaussianChannel:
    """Random composition of rotation, squeezing, loss, and added noise."""
    theta = rng.uniform(0.0, 2.0 * math.pi)
    z = rng.uniform(-0.7, 0.7)
    eta = rng.uniform(0.2, 1.0)
    c, s = math.cos(theta), math.sin(theta)
    M = math.sqrt(eta) * np.array([[c, -s], [s, c]]) @ np.diag([math.exp(z), math.exp(-z)])
    N = (1.0 - eta) * np.eye(2) + rng.uniform(0.0, 0.5) * np.eye(2)
    return GaussianChannel(d=rng.normal(size=2), M=M, N=N)


class TestGaussianChannelValidation:
    def test_asymmetric_noise_rejected(self):
        with pytest.raises(ValueError, match="symmetric"):
            GaussianChannel(d=np.zeros(2), M=np.eye(2), N=np.array([[1.0, 0.5], [0.0, 1.0]]))

    def test_negative_noise_rejected(self):
        with pytest.raises(ValueError, match="semidefinite"):
            GaussianChannel(d=np.zeros(2), M=np.eye(2), N=-np.eye(2))

    def test_cp_condition_rejected(self):
        # Amplifier with no added noise violates det N >= (det M - 1)^2.
        with pytest.raises(ValueError, match="det N"):
            GaussianChannel(d=np.zeros(2), M=2.0 * np.eye(2), N=np.zeros((2, 2)))

    def test_loss_channel_saturates_cp_condition(self):
        cv.loss_channel(0.5)


class TestApplyGaussian:
    def test_identity(self):
        channel = GaussianChannel(d=np.zeros(2), M=np.eye(2), N=np.zeros((2, 2)))
        moments = cv.coherent_moments(1.3, 0.4)
        out = cv.apply_gaussian(channel, moments)
        assert np.allclose(out.q, moments.q) and np.allclose(out.V, moments.V)

    def test_pure_displacement(self):
        channel = cv.displacement_channel(np.array([0.5, -1.0]))
        moments = cv.coherent_moments(0.7, 0.0)
        out = cv.apply_gaussian(channel, moments)
        assert np.allclose(out.q, moments.q + np.array([0.5, -1.0]))
        assert np.allclose(out.V, np.eye(2))

    def test_loss_channel_matrix_arithmetic(self):
        eta = 0.5
        channel = cv.loss_channel(eta)
        moments = cv.coherent_moments(1.1, 0.3)
        out = cv.apply_gaussian(channel, moments)
        assert np.allclose(out.q, math.sqrt(eta) * moments.q)
        assert np.allclose(out.V, np.eye(2))

    def test_uncertainty_preserved_random_channels(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            channel = random_valid_channel(rng)
            moments = GaussianMoments(q=rng.normal(size=2), V=np.eye(2))
            out = cv.apply_gaussian(channel, moments)
            eigs = np.linalg.eigvalsh(out.V.astype(complex) + 1j * cv.OMEGA)
            assert eigs.min() >= -1e-10


class TestGaussianFidelity:
    def test_equal_channels(self):
        channel = cv.loss_channel(0.7)
        assert cv.gaussian_output_fidelity_sq(channel, channel, 2.0, 0.3) == pytest.approx(
            1.0, abs=1e-12
        )

    def test_displacement_overlap(self):
        # |<alpha|beta>|^2 = e^{-|alpha-beta|^2} with the hbar = 2 moments.
        c1 = cv.displacement_channel(np.zeros(2))
        c2 = cv.displacement_channel(np.array([2.0, 0.0]))
        for r in (0.0, 0.9, 3.0):
            assert cv.gaussian_output_fidelity_sq(c1, c2, r, 1.1) == pytest.approx(
                math.exp(-1.0), rel=1e-12
            )

    def test_phase_rotation_closed_form(self):
        theta_t, theta_l, r = 0.2, 0.55, 1.4
        c1, c2 = cv.rotation_channel(theta_t), cv.rotation_channel(theta_l)
        expected = math.exp(-2.0 * r * r * (1.0 - math.cos(theta_t - theta_l)))
        for phi in (0.0, 0.7, 2.0):
            assert cv.gaussian_output_fidelity_sq(c1, c2, r, phi) == pytest.approx(
                expected, rel=1e-12
            )

    def test_symmetry_in_channel_order(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            c1, c2 = random_valid_channel(rng), random_valid_channel(rng)
            f12 = cv.gaussian_output_fidelity_sq(c1, c2, 1.2, 0.4)
            f21 = cv.gaussian_output_fidelity_sq(c2, c1, 1.2, 0.4)
            assert f12 == pytest.approx(f21, rel=1e-10)

    def test_simultaneous_pre_rotation_invariance(self):
        rng = np.random.default_rng(6)
        delta = 0.83
        rot = cv.rotation_channel(-delta).M
        for _ in range(5):
            c1, c2 = random_valid_channel(rng), random_valid_channel(rng)
            pre1 = GaussianChannel(d=c1.d, M=c1.M @ rot, N=c1.N)
            pre2 = GaussianChannel(d=c2.d, M=c2.M @ rot, N=c2.N)
            base = cv.gaussian_output_fidelity_sq(c1, c2, 0.9, 0.3)
            moved = cv.gaussian_output_fidelity_sq(pre1, pre2, 0.9, 0.3 + delta)
            assert moved == pytest.approx(base, rel=1e-10)

    def test_degenerate_covariance_reported(self):
        broken = SimpleNamespace(d=np.zeros(2), M=np.zeros((2, 2)), N=np.zeros((2, 2)))
        with pytest.raises(cv.DegenerateInputError):
            cv.gaussian_output_fidelity_sq(broken, broken, 1.0, 0.0)

    @pytest.mark.parametrize(
        "s1,s2,d2",
        [(0.15, 0.3, (0.0, 0.0)), (0.1, 0.1, (0.8, -0.4)), (0.25, 0.05, (0.5, 0.2))],
    )
    def test_mixed_outputs_match_uhlmann_fidelity(self, s1, s2, d2):
        # Additive noise plus displacement produce displaced thermal states;
        # the moment formula must agree with the Uhlmann fidelity computed
        # from the Fock matrices (independent route through sqrtm).
        import scipy.linalg

        from cvoodg.oracle import coherent_projector

        r, phi, dim = 0.6, 0.4, 28
        c1 = cv.GaussianChannel(d=np.zeros(2), M=np.eye(2), N=2.0 * s1 * np.eye(2))
        c2 = cv.GaussianChannel(d=np.array(d2), M=np.eye(2), N=2.0 * s2 * np.eye(2))
        f2_formula = cv.gaussian_output_fidelity_sq(c1, c2, r, phi)

        alpha = r * np.exp(1j * phi)
        rho1 = cv.additive_noise_apply(coherent_projector(alpha, 12), s1, dim).entries
        shifted = alpha + (d2[0] + 1j * d2[1]) / 2.0  # hbar = 2: q = 2 Re/Im alpha
        rho2 = cv.additive_noise_apply(coherent_projector(shifted, 12), s2, dim).entries
        sqrt1 = scipy.linalg.sqrtm(rho1)
        inner = scipy.linalg.sqrtm(sqrt1 @ rho2 @ sqrt1)
        f2_uhlmann = float(np.real(np.trace(inner))) ** 2
        assert f2_formula == pytest.approx(f2_uhlmann, rel=1e-6)


class TestCoherentFockVector:
    def test_vacuum(self):
        vec = cv.coherent_fock_vector(0.0, 5)
        assert np.allclose(vec, [1, 0, 0, 0, 0])

    def test_normalization_equals_poisson_head(self):
        alpha = 1.3 - 0.4j
        dim = 12
        vec = cv.coherent_fock_vector(alpha, dim)
        a2 = abs(alpha) ** 2
        head = sum(math.exp(-a2) * a2**m / math.factorial(m) for m in range(dim))
        assert np.vdot(vec, vec).real == pytest.approx(head, rel=1e-12)

    def test_single_photon_amplitude(self):
        vec = cv.coherent_fock_vector(1.0, 4)
        assert vec[1].real == pytest.approx(math.exp(-0.5), rel=1e-12)


class TestTraceDistance:
    def test_identical(self):
        rho = coherent_projector(0.3 + 0.1j, 8)
        assert cv.trace_distance(rho, rho) == 0.0

    def test_orthogonal_pure_states(self):
        assert cv.trace_distance(fock_state(0, 4), fock_state(1, 4)) == pytest.approx(
            2.0, rel=1e-12
        )

    def test_coherent_pair_identity(self):
        dim = 24
        d = cv.trace_distance(coherent_projector(0.0, dim), coherent_projector(1.0, dim))
        assert d == pytest.approx(2.0 * math.sqrt(1.0 - math.exp(-1.0)), rel=1e-8)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            cv.trace_distance(fock_state(0, 4), fock_state(0, 5))

    def test_triangle_and_unitary_invariance(self):
        rng = np.random.default_rng(17)
        for dim in (4, 8, 12):
            mats = []
            for _ in range(3):
                a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
                rho = a @ a.conj().T
                mats.append(FockMatrix(rho / np.trace(rho).real))
            d01 = cv.trace_distance(mats[0], mats[1])
            d12 = cv.trace_distance(mats[1], mats[2])
            d02 = cv.trace_distance(mats[0], mats[2])
            assert d02 <= d01 + d12 + 1e-10
            q, _ = np.linalg.qr(rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)))
            rot = [FockMatrix(q @ m.entries @ q.conj().T) for m in mats[:2]]
            assert cv.trace_distance(rot[0], rot[1]) == pytest.approx(d01, abs=1e-10)

    def test_fuchs_van_de_graaf_equality_for_pure_gaussian_outputs(self):
        # Rotated coherent states: trace distance vs 2 sqrt(1 - F^2).
        theta_t, theta_l, r = 0.1, 0.42, 1.2
        dim = 40
        alpha = r
        out_t = coherent_projector(alpha * np.exp(1j * theta_t), dim)
        out_l = coherent_projector(alpha * np.exp(1j * theta_l), dim)
        lhs = cv.trace_distance(out_t, out_l)
        f2 = cv.gaussian_output_fidelity_sq(
            cv.rotation_channel(theta_t), cv.rotation_channel(theta_l), r, 0.0
        )
        assert lhs == pytest.approx(2.0 * math.sqrt(1.0 - f2), abs=1e-8)


class TestFockMatrixValidation:
    def test_non_hermitian_rejected(self):
        mat = np.zeros((3, 3), dtype=complex)
        mat[0, 1] = 1.0
        with pytest.raises(ValueError, match="Hermitian"):
            FockMatrix(mat)

    def test_super_normalized_rejected(self):
        with pytest.raises(ValueError, match="trace"):
            FockMatrix(np.eye(3, dtype=complex))

    def test_negative_eigenvalue_rejected(self):
        mat = np.diag([0.6, -0.1, 0.5]).astype(complex)
        with pytest.raises(ValueError, match="negative eigenvalue"):
            FockMatrix(mat)


class TestPRepFockElement:
    def test_vacuum_gaussian(self):
        s, r = 0.37, 0.8
        expect = math.exp(-r * r / s) / (s * math.pi)
        assert cv.p_rep_fock_element(0, s, r) == pytest.approx(expect, rel=1e-12)

    def test_diagonal_sign_flip_location(self):
        # P_s for |1><1| changes sign where L_1 vanishes: r^2 = s(1-s) = 1/4.
        s = 0.5
        r_flip = 0.5
        below = cv.p_rep_fock_element(1, s, r_flip - 1e-3)
        above = cv.p_rep_fock_element(1, s, r_flip + 1e-3)
        at = cv.p_rep_fock_element(1, s, r_flip)
        assert below * above < 0.0
        assert abs(at) < 1e-10

    @pytest.mark.parametrize("delta", [1, 2, 5])
    def test_angular_absolute_integral_is_four(self, delta):
        theta = 0.3
        kinks = sorted(
            phi
            for k in range(-2 * delta - 2, 2 * delta + 3)
            if 0.0 < (phi := (theta - math.pi / 2.0 - k * math.pi) / delta) < 2.0 * math.pi
        )
        val, _ = integrate.quad(
            lambda phi: abs(math.cos(theta - delta * phi)),
            0.0,
            2.0 * math.pi,
            points=kinks,
            limit=200,
        )
        assert val == pytest.approx(4.0, rel=1e-10)

    def test_off_diagonal_angular_dependence(self):
        lab = OffDiagLabel(3, 1, 0.4)
        s, r = 0.2, 0.6
        radial = cv.p_rep_radial(lab, s, r)
        for phi in (0.0, 0.4, 1.1):
            expect = math.cos(lab.theta - 2 * phi) * radial
            assert cv.p_rep_fock_element(lab, s, r, phi) == pytest.approx(expect, rel=1e-12)

    def test_label_canonicalization(self):
        a = cv.p_rep_fock_element(OffDiagLabel(1, 3, 0.4), 0.2, 0.6, 0.9)
        b = cv.p_rep_fock_element(OffDiagLabel(3, 1, -0.4), 0.2, 0.6, 0.9)
        assert a == pytest.approx(b, rel=1e-14)


class TestGammaOverlap:
    def test_mismatched_delta_vanishes(self):
        assert cv.gamma_overlap(OffDiagLabel(2, 0), OffDiagLabel(2, 1), 0.2) == 0.0

    def test_vacuum_pair(self):
        s = 0.2
        assert cv.gamma_overlap(0, 0, s) == pytest.approx(1.0 / (1.0 + s), rel=1e-13)

    def test_small_s_limits(self):
        # Diagonal pairs approach 1; distinct element pairs approach 1/2.
        s = 1e-9
        assert cv.gamma_overlap(OffDiagLabel(3, 1), OffDiagLabel(3, 1), s) == pytest.approx(
            0.5, rel=1e-6
        )
        assert cv.gamma_overlap(2, 2, s) == pytest.approx(1.0, rel=1e-6)

    def test_symmetric_in_labels(self):
        a, b = OffDiagLabel(4, 2, 0.3), OffDiagLabel(2, 0, -0.2)
        assert cv.gamma_overlap(a, b, 0.15) == pytest.approx(
            cv.gamma_overlap(b, a, 0.15), rel=1e-13
        )


class TestAdditiveNoise:
    def test_thermalizes_vacuum(self):
        s = 0.3
        out = cv.additive_noise_apply(fock_state(0, 12), s, 12)
        diag = np.real(np.diag(out.entries))
        geometric = np.array([s**k / (1.0 + s) ** (k + 1) for k in range(12)])
        assert np.abs(diag - geometric).max() < 1e-12

    def test_identity_limit_small_s(self):
        rho = coherent_projector(0.6 + 0.2j, 8)
        out = cv.additive_noise_apply(rho, 1e-7, 12)
        padded = FockMatrix(np.pad(rho.entries, ((0, 4), (0, 4))))
        assert cv.trace_distance(padded, out) <= 1e-3

    @pytest.mark.parametrize("m", [0, 1, 3])
    def test_overlap_matches_gamma(self, m):
        s = 0.2
        out = cv.additive_noise_apply(fock_state(m, 8), s, 24)
        assert float(np.real(out.entries[m, m])) == pytest.approx(
            cv.gamma_overlap(m, m, s), abs=1e-6
        )

    def test_semigroup_composition(self):
        s1, s2 = 0.02, 0.03
        rho = squeezed_vacuum_state(0.4, 8)
        once = cv.additive_noise_apply(rho, s1 + s2, 16)
        twice = cv.additive_noise_apply(
            cv.additive_noise_apply(rho, s2, 16), s1, 16
        )
        assert cv.trace_distance(once, twice) <= 1e-8

    def test_trace_preserved(self):
        out = cv.additive_noise_apply(fock_state(3, 8), 0.05, 40)
        assert out.trace() == pytest.approx(1.0, abs=1e-10)

    def test_invalid_s(self):
        with pytest.raises(ValueError):
            cv.additive_noise_apply(fock_state(0, 4), 1.5, 8)


class TestDeltaSBound:
    def test_trivial_zero(self):
        assert cv.delta_s_bound(0.0, 0.0) == 0.0

    def test_direct_evaluation(self):
        assert cv.delta_s_bound(2.0, 0.01) == pytest.approx(2.0 * math.sqrt(0.05), rel=1e-14)

    @pytest.mark.parametrize("m", [0, 2, 5])
    @pytest.mark.parametrize("s", [0.01, 0.05])
    def test_dominates_exact_distance(self, m, s):
        from cvoodg.oracle import delta_s_exact

        assert delta_s_exact(m, s, 64) <= cv.delta_s_bound(m, s)


class TestTruncateEnergy:
    def test_full_truncation_keeps_everything(self):
        rho = coherent_projector(0.7, 10)
        _, eta = cv.truncate_energy(rho, 10)
        assert eta == pytest.approx(rho.trace(), rel=1e-12)

    def test_fock_state_below_cut(self):
        _, eta = cv.truncate_energy(fock_state(3, 8), 3)
        assert eta == 0.0

    def test_squeezed_vacuum_finite_sum_oracle(self):
        lam = 0.6
        rho = squeezed_vacuum_state(lam, 40)
        _, eta = cv.truncate_energy(rho, 5)
        oracle = math.sqrt(1.0 - lam * lam) * sum(
            lam ** (2 * p) * math.factorial(2 * p) / (4**p * math.factorial(p) ** 2)
            for p in range(3)
        )
        assert eta == pytest.approx(oracle, rel=1e-12)

    def test_markov_floor(self):
        rho = squeezed_vacuum_state(0.5, 40)
        nbar = cv.mean_photon_number(rho)
        for M in (2, 5, 9):
            _, eta = cv.truncate_energy(rho, M)
            assert eta >= 1.0 - nbar / M - 1e-12

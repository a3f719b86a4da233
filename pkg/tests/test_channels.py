import numpy as np
import pytest

from tniso.channels import (
    KrausChannel,
    cesaro_projector,
    check_support_invariance,
    compose,
    convex_mix,
    power_mix,
    trace_norm_contraction_witness,
    unvec,
    vec,
)
from tniso.errors import ContractViolation, ConvergenceError
from tniso.opcore import hermitian_basis
from tniso.sampling import random_channel, random_density, random_unital_channel
from tniso import serialize

from conftest import PAULI_X


def bit_flip(p):
    return KrausChannel([np.sqrt(1 - p) * np.eye(2, dtype=complex), np.sqrt(p) * PAULI_X])


def completely_depolarizing(d):
    eye = np.eye(d, dtype=complex)
    return KrausChannel(
        [np.outer(eye[:, i], eye[:, j]) / np.sqrt(d) for i in range(d) for j in range(d)]
    )


class TestKrausChannel:
    def test_identity_apply(self, rng):
        rho = random_density(3, rng)
        np.testing.assert_allclose(KrausChannel.identity(3)(rho), rho, atol=1e-15)

    def test_bit_flip_on_ground_state(self):
        # hand expansion: (1-p) rho + p X rho X
        out = bit_flip(0.4)(np.diag([1.0, 0.0]).astype(complex))
        np.testing.assert_allclose(out, np.diag([0.6, 0.4]), atol=1e-15)

    def test_repetition_channel_on_code_state(self, repetition):
        enc, channel, _, sigma = repetition
        out = channel(enc.encode(np.diag([1.0, 0.0]).astype(complex)))
        maj = enc.decomposition.basis.conj().T @ out @ enc.decomposition.basis
        expected = np.zeros((8, 8), dtype=complex)
        expected[:4, :4] = sigma
        np.testing.assert_allclose(maj, expected, atol=1e-14)

    def test_tp_violation_rejected(self):
        with pytest.raises(ContractViolation):
            KrausChannel([1.1 * np.eye(2, dtype=complex)])

    def test_empty_kraus_rejected(self):
        with pytest.raises(ContractViolation):
            KrausChannel([])

    def test_dimension_mismatch_on_apply(self):
        with pytest.raises(ContractViolation):
            KrausChannel.identity(2)(np.eye(3))

    def test_preserves_density_operators(self, rng):
        for _ in range(10):
            d = int(rng.integers(2, 6))
            channel = random_channel(d, rng, kraus_count=3)
            rho = random_density(d, rng)
            out = channel(rho)
            assert np.abs(out - out.conj().T).max() <= 1e-12
            assert complex(np.trace(out)).real == pytest.approx(1.0, abs=1e-12)
            assert np.linalg.eigvalsh(out).min() >= -1e-12

    def test_prune_drops_zero_weight_operators(self):
        mixed = convex_mix([1.0, 0.0], [KrausChannel.identity(2), bit_flip(0.3)])
        assert len(mixed.kraus) == 3
        assert len(mixed.prune(1e-12).kraus) == 1


class TestSuperoperator:
    def test_vec_roundtrip(self, rng):
        m = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        np.testing.assert_allclose(unvec(vec(m), 3), m)

    def test_agrees_with_kraus_action_on_basis(self, rng):
        for _ in range(10):
            d = int(rng.integers(2, 6))
            channel = random_channel(d, rng, kraus_count=3)
            s = channel.superoperator()
            for b in hermitian_basis(d):
                assert np.abs(s(b) - channel(b)).max() <= 1e-10

    def test_composition_homomorphism(self, rng):
        for _ in range(5):
            d = int(rng.integers(2, 5))
            e1 = random_channel(d, rng)
            e2 = random_channel(d, rng)
            lhs = compose(e2, e1).superoperator().matrix
            rhs = (e2.superoperator() @ e1.superoperator()).matrix
            assert np.abs(lhs - rhs).max() <= 1e-10

    def test_mix_homomorphism(self, rng):
        d = 3
        channels = [random_channel(d, rng) for _ in range(3)]
        w = [0.5, 0.3, 0.2]
        lhs = convex_mix(w, channels).superoperator().matrix
        rhs = sum(p * c.superoperator().matrix for p, c in zip(w, channels))
        assert np.abs(lhs - rhs).max() <= 1e-10

    def test_power_matches_repeated_composition(self, rng):
        s = random_channel(2, rng).superoperator()
        np.testing.assert_allclose(
            s.power(3).matrix, (s @ s @ s).matrix, atol=1e-13
        )


class TestComposeAndMix:
    def test_compose_with_identity(self, rng):
        e = random_channel(3, rng)
        composed = compose(e, KrausChannel.identity(3))
        assert np.abs(composed.superoperator().matrix - e.superoperator().matrix).max() <= 1e-12

    def test_convex_mix_single(self, rng):
        e = random_channel(2, rng)
        assert np.abs(convex_mix([1.0], [e]).superoperator().matrix - e.superoperator().matrix).max() <= 1e-12

    def test_mixture_weights_validated(self):
        e = KrausChannel.identity(2)
        with pytest.raises(ContractViolation):
            convex_mix([0.5, 0.5 + 1e-9], [e, e])
        with pytest.raises(ContractViolation):
            convex_mix([-0.1, 1.1], [e, e])

    def test_compose_dimension_check(self, rng):
        with pytest.raises(ContractViolation):
            compose(KrausChannel.identity(2), KrausChannel.identity(3))


class TestPowerMix:
    def test_delta_at_zero_is_identity(self, rng):
        e = random_channel(3, rng)
        s = power_mix(e, [1.0])
        np.testing.assert_allclose(s.matrix, np.eye(9), atol=1e-14)

    def test_delta_at_one_is_channel(self, rng):
        e = random_channel(3, rng)
        s = power_mix(e, [0.0, 1.0])
        np.testing.assert_allclose(s.matrix, e.superoperator().matrix, atol=1e-14)

    def test_uniform_average_of_powers(self, rng):
        # oracle: explicit matrix powers
        e = random_channel(2, rng)
        n = 4
        s = power_mix(e, [1.0 / (n + 1)] * (n + 1))
        m = e.superoperator().matrix
        expected = sum(np.linalg.matrix_power(m, i) for i in range(n + 1)) / (n + 1)
        np.testing.assert_allclose(s.matrix, expected, atol=1e-12)


class TestCesaroProjector:
    def test_identity_channel(self):
        p = cesaro_projector(KrausChannel.identity(3))
        np.testing.assert_allclose(p.matrix, np.eye(9), atol=1e-12)

    @pytest.mark.parametrize("p", [0.1, 0.3, 0.49])
    def test_bit_flip_projects_onto_x_commutant(self, p, rng):
        proj = cesaro_projector(bit_flip(p))
        for _ in range(5):
            rho = random_density(2, rng)
            expected = 0.5 * (rho + PAULI_X @ rho @ PAULI_X)
            assert np.abs(proj(rho) - expected).max() <= 1e-10

    def test_projector_invariants_on_random_channels(self, rng):
        for _ in range(10):
            d = int(rng.integers(2, 9))
            channel = random_channel(d, rng, kraus_count=int(rng.integers(1, 4)))
            s = channel.superoperator().matrix
            p = cesaro_projector(channel).matrix
            assert np.abs(s @ p - p).max() <= 1e-8
            assert np.abs(p @ s - p).max() <= 1e-8
            assert np.abs(p @ p - p).max() <= 1e-8

    def test_spectral_matches_iterative_on_unital(self, rng):
        for _ in range(6):
            d = int(rng.integers(2, 7))
            channel = random_unital_channel(d, rng)
            ps = cesaro_projector(channel, method="spectral").matrix
            pi = cesaro_projector(channel, method="iterative", tol_=1e-7).matrix
            assert np.abs(ps - pi).max() <= 1e-6

    def test_corrected_mixture_loop_dephases_encoded_states(self, repetition):
        from tniso.codes import make_example2_channel

        enc, _, recovery, _ = repetition
        loop = compose(recovery, make_example2_channel(0.4, 0.05))
        proj = cesaro_projector(loop)
        rho_c = 0.5 * np.ones((2, 2), dtype=complex)
        out = proj(enc.encode(rho_c))
        expected = enc.encode(np.diag([0.5, 0.5]).astype(complex))
        assert np.abs(out - expected).max() <= 1e-12

    def test_iterative_nonconvergence_raises(self):
        rot = KrausChannel([np.diag([1.0, np.exp(1j * 0.7)])])
        with pytest.raises(ConvergenceError):
            cesaro_projector(rot, method="iterative", max_n=8, tol_=1e-12)

    def test_requires_square_channel(self, rng):
        with pytest.raises(ContractViolation):
            cesaro_projector(random_channel(2, rng, dim_out=3))

    def test_unknown_method(self):
        with pytest.raises(ContractViolation):
            cesaro_projector(KrausChannel.identity(2), method="magic")


class TestSupportInvariance:
    def test_identity_invariant(self, rng):
        rho = random_density(3, rng, rank=2)
        ok, res = check_support_invariance(KrausChannel.identity(3), rho)
        assert ok and res <= 1e-12

    def test_bit_flip_moves_ground_state(self):
        ok, res = check_support_invariance(bit_flip(0.3), np.diag([1.0, 0.0]))
        assert not ok
        assert res == pytest.approx(np.sqrt(0.3), abs=1e-12)

    def test_repetition_full_block(self, repetition):
        _, channel, _, _ = repetition
        ok, res = check_support_invariance(channel, np.eye(8) / 8)
        assert ok and res <= 1e-14


class TestContractionWitness:
    def test_identity_ratio_one(self):
        assert trace_norm_contraction_witness(KrausChannel.identity(3), 20, seed=1) == pytest.approx(1.0, abs=1e-12)

    def test_depolarizing_ratio_zero(self):
        assert trace_norm_contraction_witness(completely_depolarizing(3), 10, seed=1) <= 1e-12

    def test_random_channels_never_expand(self, rng):
        for _ in range(10):
            d = int(rng.integers(2, 9))
            channel = random_channel(d, rng, kraus_count=int(rng.integers(1, 4)))
            assert trace_norm_contraction_witness(channel, 10, seed=int(rng.integers(1 << 30))) <= 1.0 + 1e-9

    def test_repetition_preserves_code_pairs(self, repetition):
        enc, channel, _, _ = repetition

        def encoded_sampler(r):
            return enc.encode(random_density(2, r))

        ratio = trace_norm_contraction_witness(channel, 25, seed=2, state_sampler=encoded_sampler)
        assert ratio == pytest.approx(1.0, abs=1e-9)


class TestChannelJson:
    def test_roundtrip_exact(self, rng):
        channel = random_channel(3, rng, kraus_count=2)
        back = serialize.channel_from_dict(serialize.channel_to_dict(channel))
        for a, b in zip(channel.kraus, back.kraus):
            assert np.abs(a - b).max() <= 1e-15

    def test_malformed_payload(self):
        with pytest.raises(ContractViolation):
            serialize.channel_from_dict({"dim_in": 2, "kraus": [[[0.0]]]})

"""
tests/test_channel_attacks.py
Pytest unit tests for channel_attacks.py (error rates, sectors, elimination, Holevo information).

Run with:
    pytest tests/test_channel_attacks.py -v
    pytest tests/test_channel_attacks.py -v -m "not slow"
"""
import math

import numpy as np
import pytest
from scipy.special import erfc
from scipy.stats import norm

import channel_attacks
from channel_attacks import (
    Alphabet,
    AttackClass,
    Channel,
    ChannelError,
    QuadratureError,
    Sector,
    eliminated_mask,
    eliminated_set,
    holevo,
    holevo_beamsplitter,
    holevo_cloner,
    p_err,
    p_err_pure,
    p_err_thermal,
    sector_eliminated_set,
    sector_of,
    sector_offset,
    sector_probability,
    sector_probability_table,
    wedge_probability,
)
from protocol_sim import sample_heterodyne
from quantum_core import TmsvParams, WeightedCoherentMixture, cloner_levels, mixture_entropy


class TestAlphabetAndChannel:

    def test_qpsk_amplitudes(self):
        assert np.allclose(Alphabet(4, 1.0).amplitudes, [1, 1j, -1, -1j])

    def test_antipode(self):
        alphabet = Alphabet(6, 1.0)
        assert [alphabet.antipode(k) for k in range(6)] == [3, 4, 5, 0, 1, 2]

    def test_odd_size_rejected(self):
        with pytest.raises(ChannelError, match="even integer"):
            Alphabet(5, 1.0)

    def test_negative_amplitude_rejected(self):
        with pytest.raises(ChannelError, match="nonnegative"):
            Alphabet(4, -0.1)

    def test_transmission_range(self):
        with pytest.raises(ChannelError, match="Transmission"):
            Channel(0.0)
        with pytest.raises(ChannelError, match="Transmission"):
            Channel(1.2)

    def test_beamsplitter_has_no_excess_noise(self):
        with pytest.raises(ChannelError, match="beamsplitter"):
            Channel(0.5, 0.01)

    def test_excess_noise_at_full_transmission_rejected(self):
        with pytest.raises(ChannelError, match="T = 1"):
            Channel(1.0, 0.01, AttackClass.ENTANGLING_CLONER)

    def test_attack_follows_excess_noise(self):
        assert Channel.from_excess_noise(0.5, 0.0).attack is AttackClass.BEAMSPLITTER
        assert Channel.from_excess_noise(0.5, 0.02).attack is AttackClass.ENTANGLING_CLONER

    def test_thermal_photons_from_excess_noise(self):
        channel = Channel.from_excess_noise(0.5, 0.02)
        assert channel.n_bar == pytest.approx(0.08)
        assert channel.outcome_variance == pytest.approx(1.04)


class TestHonestErrorRate:

    def test_vacuum_is_a_coin_flip(self):
        for T in (0.1, 0.5, 1.0):
            assert p_err_pure(T, Alphabet(4, 0.0)) == 0.5

    def test_reference_value(self):
        assert p_err_pure(0.5, Alphabet(4, 1.0)) == pytest.approx(0.23975, abs=1e-5)

    def test_lossless_large_amplitude(self):
        assert p_err_pure(1.0, Alphabet(4, 3.0)) == pytest.approx(0.5 * erfc(3 / math.sqrt(2)), rel=1e-12)

    def test_independent_of_alphabet_size(self):
        values = {p_err_pure(0.3, Alphabet(N, 1.2)) for N in (2, 4, 6, 8)}
        assert len(values) == 1

    def test_thermal_reduces_to_pure(self):
        for T in (0.1, 0.4, 0.9):
            for alpha in (0.2, 1.0, 2.5):
                assert p_err_thermal(T, Alphabet(4, alpha), 0.0) == p_err_pure(T, Alphabet(4, alpha))

    def test_thermal_vacuum(self):
        assert p_err_thermal(0.5, Alphabet(4, 0.0), 0.3) == 0.5

    def test_thermal_matches_half_plane_probability(self):
        """P(Re c < 0) for a Gaussian of variance 1 + (1-T) n_bar centred at sqrt(T) alpha."""
        T, alpha, n_bar = 0.5, 1.0, 0.08
        sigma = math.sqrt(1 + (1 - T) * n_bar)
        oracle = norm.cdf(0.0, loc=math.sqrt(T) * alpha, scale=sigma)
        assert p_err_thermal(T, Alphabet(4, alpha), n_bar) == pytest.approx(oracle, abs=1e-12)

    def test_dispatch_on_attack(self):
        alphabet = Alphabet(4, 1.0)
        channel = Channel.from_excess_noise(0.5, 0.02)
        assert p_err(channel, alphabet) == p_err_thermal(0.5, alphabet, channel.n_bar)
        assert p_err(Channel(0.5), alphabet) == p_err_pure(0.5, alphabet)

    def test_monte_carlo_sign_frequency(self):
        alphabet = Alphabet(4, 1.0)
        channel = Channel(0.5)
        outcomes = sample_heterodyne(0, channel, alphabet, 5, size=10 ** 6)
        p = p_err(channel, alphabet)
        frequency = np.mean(outcomes.real < 0)
        assert abs(frequency - p) < 4 * math.sqrt(p * (1 - p) / 10 ** 6)


class TestSectors:

    def test_qpsk_sectors_are_quadrants(self):
        assert sector_offset(4) == pytest.approx(0.0)
        assert Sector(1, 4).bounds == pytest.approx((math.pi / 2, math.pi))

    def test_binary_sector_is_left_half_plane(self):
        assert Sector(0, 2).bounds == pytest.approx((math.pi / 2, 3 * math.pi / 2))

    def test_sector_of(self):
        outcomes = np.array([1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j])
        assert list(sector_of(outcomes, 4)) == [0, 1, 2, 3]

    def test_sector_index_range(self):
        with pytest.raises(ChannelError, match="outside"):
            Sector(4, 4)

    def test_vacuum_is_uniform_over_sectors(self):
        for N in (2, 4, 6, 8):
            alphabet = Alphabet(N, 0.0)
            for s in range(N):
                assert sector_probability(0, Channel(0.7), alphabet, Sector(s, N)) == pytest.approx(1 / N, abs=1e-10)

    def test_sectors_partition_the_plane(self):
        for N in (4, 6):
            alphabet = Alphabet(N, 1.3)
            channel = Channel.from_excess_noise(0.7, 0.02)
            total = sum(sector_probability(2, channel, alphabet, Sector(s, N)) for s in range(N))
            assert total == pytest.approx(1.0, abs=1e-9)

    def test_qpsk_quadrant_factorizes(self):
        """First quadrant for state 0 at T = 1: [1/2 erfc(-1/sqrt 2)] [1/2 erfc(0)]."""
        expected = 0.5 * erfc(-1 / math.sqrt(2)) * 0.5 * erfc(0.0)
        value = sector_probability(0, Channel(1.0), Alphabet(4, 1.0), Sector(0, 4))
        assert value == pytest.approx(expected, abs=1e-12)

    def test_quadrature_matches_closed_forms(self):
        mean = 0.8 - 0.3j
        for width in (math.pi / 2, math.pi):
            closed = wedge_probability(mean, 1.0, 0.4, width)
            quadrature = wedge_probability(mean, 1.0, 0.4, width, closed_form=False)
            assert quadrature == pytest.approx(closed, abs=1e-10)

    def test_wedge_accepts_arrays(self):
        means = np.array([0.0, 1.0, 1j])
        values = wedge_probability(means, 1.0, 0.0, math.pi / 3)
        assert values.shape == (3,)
        assert values[0] == pytest.approx(1 / 6, abs=1e-10)

    def test_table_rows_are_rotations(self):
        table = sector_probability_table(Channel(0.6), Alphabet(6, 1.1))
        assert np.allclose(table.sum(axis=1), 1.0, atol=1e-9)
        for k in range(6):
            direct = sector_probability(k, Channel(0.6), Alphabet(6, 1.1), Sector(3, 6))
            assert table[k, 3] == pytest.approx(direct, abs=1e-10)

    def test_monte_carlo_sector_frequencies(self):
        channel = Channel.from_excess_noise(0.5, 0.02)
        alphabet = Alphabet(4, 1.0)
        samples = 10 ** 6
        outcomes = sample_heterodyne(1, channel, alphabet, 9, size=samples)
        counts = np.bincount(sector_of(outcomes, 4), minlength=4)
        for s in range(4):
            p = sector_probability(1, channel, alphabet, Sector(s, 4))
            assert abs(counts[s] / samples - p) < 4 * math.sqrt(p * (1 - p) / samples)


class TestElimination:

    def test_first_quadrant_outcome(self):
        """Outcome 1+i rules out -alpha and -i alpha."""
        assert eliminated_set(1 + 1j, Alphabet(4, 1.0)) == frozenset({2, 3})

    def test_third_quadrant_outcome(self):
        assert eliminated_set(-1 - 1j, Alphabet(4, 1.0)) == frozenset({0, 1})

    def test_boundary_tie_goes_to_smaller_index(self):
        """Scores (1, 0, -1, 0): state 2 plus the tie winner 1."""
        assert eliminated_set(1, Alphabet(4, 1.0)) == frozenset({1, 2})

    def test_binary_alphabet_eliminates_one_state(self):
        assert eliminated_set(-0.3 + 2j, Alphabet(2, 1.0)) == frozenset({0})

    def test_mask_matches_set(self):
        rng = np.random.default_rng(3)
        outcomes = rng.normal(size=200) + 1j * rng.normal(size=200)
        for N in (2, 4, 6, 8):
            alphabet = Alphabet(N, 1.0)
            mask = eliminated_mask(outcomes, alphabet)
            assert np.all(mask.sum(axis=1) == N // 2)
            for c, row in zip(outcomes, mask):
                assert frozenset(np.flatnonzero(row)) == eliminated_set(c, alphabet)

    def test_set_is_constant_on_sectors(self):
        alphabet = Alphabet(6, 1.0)
        rng = np.random.default_rng(4)
        outcomes = rng.normal(size=300) + 1j * rng.normal(size=300)
        for c in outcomes:
            sector = Sector(int(sector_of(c, 6)), 6)
            assert eliminated_set(c, alphabet) == sector_eliminated_set(sector, alphabet)

    def test_sent_state_eliminated_at_error_rate(self):
        channel = Channel(0.5)
        alphabet = Alphabet(4, 1.0)
        samples = 200000
        outcomes = sample_heterodyne(0, channel, alphabet, 21, size=samples)
        frequency = eliminated_mask(outcomes, alphabet)[:, 0].mean()
        p = p_err(channel, alphabet)
        assert abs(frequency - p) < 4 * math.sqrt(p * (1 - p) / samples)


class TestHolevoBeamsplitter:

    def test_lossless_channel_leaks_nothing(self):
        assert holevo_beamsplitter(Channel(1.0), Alphabet(4, 1.0)) == pytest.approx(0.0, abs=1e-12)

    def test_vacuum_alphabet_leaks_nothing(self):
        assert holevo_beamsplitter(Channel(0.5), Alphabet(4, 0.0)) == pytest.approx(0.0, abs=1e-12)

    def test_gram_matches_fock_at_reference_point(self):
        channel, alphabet = Channel(0.5), Alphabet(4, 1.0)
        gram = holevo_beamsplitter(channel, alphabet)
        fock = holevo_beamsplitter(channel, alphabet, method="fock", fock_dim=40)
        assert gram == pytest.approx(fock, abs=1e-6)

    def test_gram_matches_fock_on_grid(self):
        for T in np.linspace(0.1, 1.0, 5):
            for alpha in np.linspace(0.2, 2.0, 5):
                channel, alphabet = Channel(float(T)), Alphabet(4, float(alpha))
                gram = holevo_beamsplitter(channel, alphabet)
                fock = holevo_beamsplitter(channel, alphabet, method="fock", fock_dim=40)
                assert gram == pytest.approx(fock, abs=1e-6), f"T={T}, alpha={alpha}"

    def test_bounded_by_alphabet_entropy(self):
        for N in (2, 4, 6, 8):
            chi = holevo_beamsplitter(Channel(0.2), Alphabet(N, 2.0))
            assert 0.0 <= chi <= math.log2(N)

    def test_reference_values(self):
        """chi vanishes at both ends of the loss range, so it peaks at intermediate T."""
        assert holevo_beamsplitter(Channel(0.5), Alphabet(4, 1.0)) == pytest.approx(0.1303, abs=1e-3)
        assert holevo_beamsplitter(Channel(0.2), Alphabet(4, 1.0)) == pytest.approx(0.0700, abs=1e-3)
        assert holevo_beamsplitter(Channel(0.8), Alphabet(4, 1.2)) == pytest.approx(0.1891, abs=1e-3)

    def test_sector_states_related_by_one_step_rotation(self):
        """Rotating the constellation by 2 pi / N carries each sector-conditioned state to the next sector's."""
        T, N = 0.6, 6
        channel, alphabet = Channel(T), Alphabet(N, 1.1)
        reflected = math.sqrt(1 - T) * alphabet.amplitudes

        def conditioned(s):
            weights = [sector_probability(k, channel, alphabet, Sector(s, N)) for k in range(N)]
            return WeightedCoherentMixture.from_unnormalized(reflected, weights)

        first = conditioned(0)
        for s in range(1, N):
            rotated, target = first.rotated(2 * math.pi * s / N), conditioned(s)
            assert mixture_entropy(rotated) == pytest.approx(mixture_entropy(target), abs=1e-10)
            for a, w in zip(rotated.amplitudes, rotated.weights):
                match = int(np.argmin(np.abs(np.array(target.amplitudes) - a)))
                assert w == pytest.approx(target.weights[match], abs=1e-10)

    def test_unknown_method(self):
        with pytest.raises(ValueError, match="Unknown method"):
            holevo_beamsplitter(Channel(0.5), Alphabet(4, 1.0), method="exact")

    def test_rejects_cloner_channel(self):
        with pytest.raises(ChannelError, match="beamsplitter"):
            holevo_beamsplitter(Channel.from_excess_noise(0.5, 0.02), Alphabet(4, 1.0))


class TestHolevoCloner:

    def test_rejects_beamsplitter_channel(self):
        with pytest.raises(ChannelError, match="entangling-cloner"):
            holevo_cloner(Channel(0.5), Alphabet(4, 1.0))

    def test_vacuum_resource_at_full_transmission(self):
        channel = Channel(1.0, 0.0, AttackClass.ENTANGLING_CLONER)
        assert holevo_cloner(channel, Alphabet(4, 1.0)) == pytest.approx(0.0, abs=1e-6)

    @pytest.mark.slow
    def test_weak_cloner_matches_beamsplitter(self):
        """At n_bar = 1e-4 the cloner attack collapses onto the beamsplitter attack."""
        T = 0.5
        xi = 1e-4 * (1 - T) / 2
        channel = Channel(T, xi, AttackClass.ENTANGLING_CLONER)
        assert channel.n_bar == pytest.approx(1e-4)
        alphabet = Alphabet(4, 1.0)
        assert holevo_cloner(channel, alphabet) == pytest.approx(holevo_beamsplitter(Channel(T), alphabet), abs=1e-3)

    @pytest.mark.slow
    def test_excess_noise_point_is_bounded(self):
        channel = Channel.from_excess_noise(0.5, 0.02)
        chi = holevo(channel, Alphabet(4, 1.0))
        assert 0.0 <= chi <= 2.0

    @pytest.mark.slow
    def test_cloner_leaks_more_than_beamsplitter(self):
        for T, alpha in ((0.5, 1.0), (0.3, 0.8), (0.8, 1.2), (0.5, 0.5)):
            alphabet = Alphabet(4, alpha)
            cloner = holevo_cloner(Channel.from_excess_noise(T, 0.02), alphabet)
            beamsplitter = holevo_beamsplitter(Channel(T), alphabet)
            assert cloner > beamsplitter + 0.02, f"T={T}, alpha={alpha}"

    @pytest.mark.slow
    def test_vacuum_alphabet_leak_depends_only_on_excess_noise(self):
        """
        With alpha = 0 the attacker learns only about the recipient's noise.

        Charlie's mode then holds a thermal state of 2 xi photons for every T,
        and the sector-conditioned entropy of the purifying modes gives
        chi = 0.0377 bits at xi = 0.01 (0.0630 at xi = 0.02).
        """
        vacuum = Alphabet(4, 0.0)
        for T in (0.3, 0.8):
            assert holevo_cloner(Channel.from_excess_noise(T, 0.01), vacuum) == pytest.approx(0.0377, abs=5e-4)
        assert holevo_cloner(Channel.from_excess_noise(0.5, 0.02), vacuum) == pytest.approx(0.0630, abs=5e-4)

    @pytest.mark.slow
    def test_stable_under_finer_grid_and_more_levels(self):
        channel, alphabet = Channel.from_excess_noise(0.5, 0.02), Alphabet(4, 1.0)
        default_dim = cloner_levels(0.5, 1.0, TmsvParams.from_n_bar(channel.n_bar))[0]
        chi = holevo_cloner(channel, alphabet)
        assert holevo_cloner(channel, alphabet, grid_nodes=80) == pytest.approx(chi, abs=1e-4)
        assert holevo_cloner(channel, alphabet, dim=2 * default_dim) == pytest.approx(chi, abs=1e-4)

    def test_large_starting_grid_still_refines(self, monkeypatch):
        calls = []

        def fake_chi(channel, alphabet, nodes, dim):
            calls.append(nodes)
            return 0.1 + 1.0 / nodes ** 2

        monkeypatch.setattr(channel_attacks, "_cloner_chi", fake_chi)
        chi = holevo_cloner(Channel.from_excess_noise(0.5, 0.02), Alphabet(4, 1.0), grid_nodes=200, dim=20)
        assert calls == [200, 400, 800]
        assert chi == pytest.approx(0.1, abs=1e-5)

    def test_gives_up_after_three_doublings(self, monkeypatch):
        monkeypatch.setattr(channel_attacks, "_cloner_chi", lambda channel, alphabet, nodes, dim: 1.0 / nodes)
        with pytest.raises(QuadratureError, match="did not converge"):
            holevo_cloner(Channel.from_excess_noise(0.5, 0.02), Alphabet(4, 1.0), grid_nodes=10, dim=20)

    def test_rejects_degenerate_grid(self):
        with pytest.raises(ChannelError, match="at least 2"):
            holevo_cloner(Channel.from_excess_noise(0.5, 0.02), Alphabet(4, 1.0), grid_nodes=1)

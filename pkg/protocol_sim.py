"""
protocol_sim.py - Monte Carlo runs of the three-party signature protocol

Simulates Alice distributing coherent states to Bob and Charlie, their
heterodyne measurements and state elimination, the secret swap of half of each
eliminated signature, and verification of a declared signature. Honest,
repudiating and forging senders are provided so every analytic bound can be
checked against an empirical frequency.

Randomness comes from numpy Generators over PCG64. Every simulation accepts
either a Generator or an integer seed, and campaigns can be split across
independent shards with SeedSequence.spawn.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from channel_attacks import (
    AttackClass,
    Sector,
    eliminated_mask,
    sector_eliminated_set,
    sector_of,
    sector_probability_table,
)

RECIPIENTS = ("B", "C")


class MalformedDeclarationError(ValueError):
    """Raised when a declared signature does not match the recipient's records."""


def make_rng(seed):
    """Return a PCG64 Generator; Generators are passed through unchanged."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def shard_generators(seed, shards):
    """Independent generators for `shards` workers, derived from one seed."""
    children = np.random.SeedSequence(seed).spawn(shards)
    return [np.random.Generator(np.random.PCG64(child)) for child in children]


@dataclass(frozen=True)
class SimulationParams:
    """
    Everything one protocol run needs.

    Attributes:
        channel (Channel): Channel to both recipients
        alphabet (Alphabet): The constellation
        L (int): Signature length, even
        thresholds (Thresholds): Verification thresholds s_B and s_C
    """

    channel: object
    alphabet: object
    L: int
    thresholds: object = None

    def __post_init__(self):
        if self.L < 2 or self.L % 2:
            raise ValueError(f"Signature length must be even and >= 2, got {self.L!r}")


@dataclass(frozen=True, eq=False)
class PrivateKey:
    m: int
    recipient: str
    phases: np.ndarray


@dataclass(frozen=True, eq=False)
class Distribution:
    """
    Output of the distribution stage for each signed message.

    Attributes:
        keys: {(m, recipient): PrivateKey}, Alice's record of the sent states
        eliminated: {(m, recipient): bool array (L, N)}, True where the recipient eliminated a state
    """

    keys: dict
    eliminated: dict


@dataclass(frozen=True, eq=False)
class EliminatedSignature:
    """
    A recipient's eliminated signature after the secret swap.

    The direct half holds the elements the owner kept; the swapped half holds
    the elements received from the other recipient. `forwarded_positions` are
    the owner's positions that went the other way.
    """

    owner: str
    direct_positions: np.ndarray
    direct_sets: np.ndarray
    swapped_positions: np.ndarray
    swapped_sets: np.ndarray
    forwarded_positions: np.ndarray

    @property
    def half_length(self):
        return self.direct_positions.size


@dataclass(frozen=True, eq=False)
class SignatureDeclaration:
    m: int
    phi_B: np.ndarray
    phi_C: np.ndarray

    def key_for(self, recipient):
        return self.phi_B if recipient == "B" else self.phi_C


@dataclass(frozen=True)
class ProtocolOutcome:
    """Verdicts and per-half mismatch counts of one protocol run."""

    bob_mismatches: tuple
    charlie_mismatches: tuple
    bob_accepts: bool
    charlie_accepts: bool
    L: int

    @property
    def aborted(self):
        return not (self.bob_accepts and self.charlie_accepts)

    @property
    def bob_rate(self):
        return sum(self.bob_mismatches) / self.L

    @property
    def charlie_rate(self):
        return sum(self.charlie_mismatches) / self.L


@dataclass(frozen=True)
class EmpiricalRate:
    """An observed frequency with its binomial standard error."""

    count: int
    trials: int

    @property
    def frequency(self):
        return self.count / self.trials

    @property
    def standard_error(self):
        p = self.frequency
        return math.sqrt(max(p * (1.0 - p), 0.0) / self.trials)

    def merged(self, other):
        return EmpiricalRate(self.count + other.count, self.trials + other.trials)


def sample_heterodyne(sent, channel, alphabet, rng, size=None):
    """
    Heterodyne outcome(s) of the recipient for sent state index/indices.

    Args:
        sent: State index or integer array of indices
        channel (Channel): The channel
        alphabet (Alphabet): The constellation
        rng: Generator or seed
        size: Number of draws when `sent` is a scalar

    Returns:
        complex or numpy.ndarray: sqrt(T) alpha_sent plus isotropic Gaussian noise
        with per-quadrature variance 1 + (1 - T) n_bar
    """
    rng = make_rng(rng)
    means = math.sqrt(channel.T) * alphabet.amplitudes[np.asarray(sent) % alphabet.N]
    if size is not None:
        means = np.broadcast_to(means, size)
    sigma = math.sqrt(channel.outcome_variance)
    noise = rng.normal(0.0, sigma, size=np.shape(means) + (2,))
    outcomes = means + noise[..., 0] + 1j * noise[..., 1]
    return complex(outcomes) if np.ndim(outcomes) == 0 else outcomes


def run_distribution(params, rng, messages=(0, 1)):
    """
    Steps one to three: Alice picks fresh phases per message and recipient, sends
    the states, and each recipient records the N/2 states his outcome rules out.

    Returns:
        Distribution
    """
    rng = make_rng(rng)
    keys = {}
    eliminated = {}
    for m in messages:
        for recipient in RECIPIENTS:
            phases = rng.integers(0, params.alphabet.N, size=params.L)
            outcomes = sample_heterodyne(phases, params.channel, params.alphabet, rng)
            keys[(m, recipient)] = PrivateKey(m, recipient, phases)
            eliminated[(m, recipient)] = eliminated_mask(outcomes, params.alphabet)
    return Distribution(keys, eliminated)


def symmetrize(bob, charlie, rng):
    """
    Step four: each recipient secretly forwards a uniformly random half of his
    eliminated signature to the other.

    Args:
        bob: Bob's raw eliminated list, bool array (L, N)
        charlie: Charlie's raw eliminated list
        rng: Generator or seed

    Returns:
        tuple: (EliminatedSignature for B, EliminatedSignature for C)
    """
    rng = make_rng(rng)
    L = bob.shape[0]
    if charlie.shape[0] != L or L % 2:
        raise ValueError("Eliminated lists must share one even length")
    half = L // 2

    forwarded_by_bob = np.sort(rng.permutation(L)[:half])
    forwarded_by_charlie = np.sort(rng.permutation(L)[:half])
    kept_by_bob = np.setdiff1d(np.arange(L), forwarded_by_bob)
    kept_by_charlie = np.setdiff1d(np.arange(L), forwarded_by_charlie)

    bob_signature = EliminatedSignature(
        "B", kept_by_bob, bob[kept_by_bob], forwarded_by_charlie, charlie[forwarded_by_charlie], forwarded_by_bob
    )
    charlie_signature = EliminatedSignature(
        "C", kept_by_charlie, charlie[kept_by_charlie], forwarded_by_bob, bob[forwarded_by_bob], forwarded_by_charlie
    )
    return bob_signature, charlie_signature


def accepts(count, s, half_length):
    """count < s * half_length in exact arithmetic."""
    return Fraction(count) < Fraction(s) * half_length


def verify(declaration, signature, s):
    """
    Step six/seven: count declared states that fall inside the eliminated sets.

    The direct half is checked against the key sent to the owner; the swapped
    half against the key sent to the other recipient.

    Args:
        declaration (SignatureDeclaration): Declared message and keys
        signature (EliminatedSignature): The verifier's eliminated signature
        s (float): Threshold

    Returns:
        tuple: ((direct count, swapped count), accept flag)
    """
    other = "C" if signature.owner == "B" else "B"
    L = 2 * signature.half_length
    counts = []
    for positions, sets, key in (
        (signature.direct_positions, signature.direct_sets, declaration.key_for(signature.owner)),
        (signature.swapped_positions, signature.swapped_sets, declaration.key_for(other)),
    ):
        key = np.asarray(key)
        if key.shape != (L,):
            raise MalformedDeclarationError(f"Declared key has length {key.size}, expected {L}")
        if key.size and (key.min() < 0 or key.max() >= sets.shape[1]):
            raise MalformedDeclarationError("Declared key holds an index outside the alphabet")
        declared = key[positions]
        counts.append(int(np.count_nonzero(sets[np.arange(positions.size), declared])))

    half = signature.half_length
    return tuple(counts), all(accepts(count, s, half) for count in counts)


def honest_strategy(keys, m, alphabet, rng):
    """Declare the keys exactly as sent."""
    return SignatureDeclaration(m, keys[(m, "B")].phases.copy(), keys[(m, "C")].phases.copy())


def antipodal_flip_strategy(flip_fraction):
    """
    A repudiating sender who declares the antipodal state on a random fraction
    of positions of each key, raising both recipients' mismatch rate to
    p_err + flip_fraction (1 - 2 p_err).
    """
    if not 0.0 <= flip_fraction <= 1.0:
        raise ValueError(f"flip_fraction must be in [0, 1], got {flip_fraction!r}")

    def strategy(keys, m, alphabet, rng):
        declared = []
        for recipient in RECIPIENTS:
            phases = keys[(m, recipient)].phases.copy()
            flips = rng.permutation(phases.size)[: int(round(flip_fraction * phases.size))]
            phases[flips] = (phases[flips] + alphabet.N // 2) % alphabet.N
            declared.append(phases)
        return SignatureDeclaration(m, *declared)

    return strategy


def run_protocol(params, strategy, rng, m=0):
    """
    One signed message end to end. The strategy sees only Alice's private keys.

    Returns:
        ProtocolOutcome
    """
    rng = make_rng(rng)
    distribution = run_distribution(params, rng, messages=(m,))
    bob_signature, charlie_signature = symmetrize(
        distribution.eliminated[(m, "B")], distribution.eliminated[(m, "C")], rng
    )
    declaration = strategy(distribution.keys, m, params.alphabet, rng)
    bob_counts, bob_ok = verify(declaration, bob_signature, params.thresholds.s_B)
    charlie_counts, charlie_ok = verify(declaration, charlie_signature, params.thresholds.s_C)
    return ProtocolOutcome(bob_counts, charlie_counts, bob_ok, charlie_ok, params.L)


def simulate_honest(params, trials, rng):
    """Frequency of runs in which an honest sender is rejected by anyone."""
    rng = make_rng(rng)
    aborts = sum(run_protocol(params, honest_strategy, rng).aborted for _ in range(trials))
    return EmpiricalRate(aborts, trials)


def simulate_repudiation(params, flip_fraction, trials, rng):
    """Frequency with which the antipodal-flip sender gets Bob to accept and Charlie to reject."""
    rng = make_rng(rng)
    strategy = antipodal_flip_strategy(flip_fraction)
    successes = 0
    for _ in range(trials):
        outcome = run_protocol(params, strategy, rng)
        successes += outcome.bob_accepts and not outcome.charlie_accepts
    return EmpiricalRate(successes, trials)


def simulate_forger_ml(params, trials, rng):
    """
    Mismatch rate of a forging Bob who taps the line to Charlie with a beamsplitter.

    Bob heterodynes his reflected mode, forms the posterior over the sent state
    and over Charlie's outcome sector, and declares the state least likely to be
    in Charlie's eliminated set.

    Args:
        params (SimulationParams): Beamsplitter channel and alphabet
        trials (int): Number of signature positions simulated
        rng: Generator or seed

    Returns:
        EmpiricalRate: Bob's mismatches against Charlie's eliminated sets
    """
    channel, alphabet = params.channel, params.alphabet
    if channel.attack is not AttackClass.BEAMSPLITTER:
        raise ValueError("The heterodyne forger is defined for the beamsplitter attack")
    rng = make_rng(rng)
    N = alphabet.N

    sent = rng.integers(0, N, size=trials)
    reflected = math.sqrt(1.0 - channel.T) * alphabet.amplitudes
    own = reflected[sent] + rng.normal(0.0, math.sqrt(0.5), size=(trials, 2)) @ np.array([1.0, 1j])
    charlie_outcomes = sample_heterodyne(sent, channel, alphabet, rng)

    # log P(k | b) up to a constant, for a heterodyne with per-quadrature variance 1/2
    log_posterior = -np.abs(own[:, None] - reflected[None, :]) ** 2
    log_posterior -= log_posterior.max(axis=1, keepdims=True)
    posterior = np.exp(log_posterior)
    posterior /= posterior.sum(axis=1, keepdims=True)

    sector_given_state = sector_probability_table(channel, alphabet)
    elimination = np.zeros((N, N), dtype=bool)
    for s in range(N):
        elimination[s, list(sector_eliminated_set(Sector(s, N), alphabet))] = True

    expected_mismatch = (posterior @ sector_given_state) @ elimination.astype(float)
    declared = np.argmin(expected_mismatch, axis=1)
    mismatches = elimination[sector_of(charlie_outcomes, N), declared]
    return EmpiricalRate(int(np.count_nonzero(mismatches)), trials)


if __name__ == "__main__":
    # Example usage
    from channel_attacks import Alphabet, Channel
    from security_bounds import Thresholds

    params = SimulationParams(Channel(1.0), Alphabet(4, 3.0), 1000, Thresholds(0.1, 0.2))
    outcome = run_protocol(params, honest_strategy, 7)
    print(f"Bob {outcome.bob_mismatches} accepts={outcome.bob_accepts}")
    print(f"Charlie {outcome.charlie_mismatches} accepts={outcome.charlie_accepts}")
    print(f"Forger rate at T=0.5, alpha=1: {simulate_forger_ml(SimulationParams(Channel(0.5), Alphabet(4, 1.0), 2), 100000, 7).frequency:.4f}")

"""
channel_attacks.py - Honest error rates and eavesdropper information for PSK alphabets

This module computes, for a phase-shift-keyed alphabet of N coherent states,
the honest mismatch rate p_err seen by a heterodyning recipient and the
Holevo information chi a dishonest recipient can gain on the other
recipient's eliminated signature. Two attacks are covered: the beamsplitter
(pure-loss) attack and the entangling-cloner (thermal-loss) attack.

The recorded outcome plane of the honest recipient has per-quadrature
variance 1 + (1 - T) n_bar around sqrt(T) alpha_k.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import erfc, erfcx

from quantum_core import (
    DensityMatrix,
    TmsvParams,
    WeightedCoherentMixture,
    TruncationError,
    cloner_levels,
    cloner_outcome_density,
    cloner_projection_amplitudes,
    coherent_fock_vector,
    mixture_entropy,
    von_neumann_entropy,
)

ANGULAR_TOLERANCE = 1e-12
INITIAL_ANGULAR_NODES = 64
MAX_ANGULAR_NODES = 4096

CLONER_TOLERANCE = 1e-5
CLONER_INITIAL_NODES = 40
CLONER_MAX_DOUBLINGS = 3
CLONER_MASS_TOLERANCE = 1e-6
CLONER_CHUNK = 2048

# Scores are rounded before ranking so exact boundary ties are not decided by float noise
SCORE_DECIMALS = 12


class ChannelError(ValueError):
    """Raised for an invalid channel, alphabet or attack combination."""


class QuadratureError(RuntimeError):
    """Raised when a quadrature does not reach its tolerance."""

    def __init__(self, message, estimate, tolerance):
        super().__init__(f"{message} (estimate {estimate!r}, tolerance {tolerance:g})")
        self.estimate = estimate
        self.tolerance = tolerance


class AttackClass(Enum):
    BEAMSPLITTER = "beamsplitter"
    ENTANGLING_CLONER = "entangling_cloner"


@dataclass(frozen=True)
class Alphabet:
    """
    The constellation A_N: state k has amplitude alpha * exp(2 pi i k / N).

    Attributes:
        N: Even number of states
        alpha: Common amplitude magnitude (shot-noise units)
    """

    N: int
    alpha: float

    def __post_init__(self):
        if not isinstance(self.N, (int, np.integer)) or self.N < 2 or self.N % 2:
            raise ChannelError(f"Alphabet size must be an even integer >= 2, got {self.N!r}")
        if not math.isfinite(self.alpha) or self.alpha < 0:
            raise ChannelError(f"Alphabet amplitude must be finite and nonnegative, got {self.alpha!r}")

    @property
    def amplitudes(self):
        return self.alpha * np.exp(2j * np.pi * np.arange(self.N) / self.N)

    def amplitude(self, k):
        return complex(self.amplitudes[k % self.N])

    def antipode(self, k):
        """Index of the state at the opposite phase."""
        return (k + self.N // 2) % self.N

    def with_alpha(self, alpha):
        return Alphabet(self.N, alpha)


@dataclass(frozen=True)
class Channel:
    """
    A lossy channel from Alice to a recipient, together with the attack modeling it.

    Attributes:
        T: Transmission in (0, 1]
        xi: Excess noise at the receiver (shot-noise units)
        attack: Attack class; the beamsplitter attack requires xi = 0
    """

    T: float
    xi: float = 0.0
    attack: AttackClass = AttackClass.BEAMSPLITTER

    def __post_init__(self):
        if not (math.isfinite(self.T) and 0 < self.T <= 1):
            raise ChannelError(f"Transmission must be in (0, 1], got {self.T!r}")
        if not math.isfinite(self.xi) or self.xi < 0:
            raise ChannelError(f"Excess noise must be nonnegative, got {self.xi!r}")
        if self.attack is AttackClass.BEAMSPLITTER and self.xi != 0:
            raise ChannelError("The beamsplitter attack adds no excess noise; use xi = 0")
        if self.xi > 0 and self.T == 1:
            raise ChannelError("Excess noise at T = 1 needs infinitely many thermal photons")

    @classmethod
    def from_excess_noise(cls, T, xi):
        """Pick the attack that explains the measured excess noise."""
        attack = AttackClass.BEAMSPLITTER if xi == 0 else AttackClass.ENTANGLING_CLONER
        return cls(T, xi, attack)

    @property
    def n_bar(self):
        """Thermal photons injected by the eavesdropper, n_bar = 2 xi / (1 - T)."""
        if self.xi == 0:
            return 0.0
        return 2.0 * self.xi / (1.0 - self.T)

    @property
    def outcome_variance(self):
        """Per-quadrature variance of the recorded heterodyne outcome."""
        return 1.0 + (1.0 - self.T) * self.n_bar


@dataclass(frozen=True)
class Sector:
    """One of the N angular regions of width 2 pi / N on which the eliminated set is constant."""

    index: int
    N: int

    def __post_init__(self):
        if not 0 <= self.index < self.N:
            raise ChannelError(f"Sector index {self.index} outside [0, {self.N})")

    @property
    def width(self):
        return 2.0 * math.pi / self.N

    @property
    def bounds(self):
        start = sector_offset(self.N) + self.index * self.width
        return start, start + self.width

    @property
    def centre(self):
        start, end = self.bounds
        return 0.5 * (start + end)


def p_err_pure(T, alphabet):
    """Probability that Re c < 0 for state 0 over a pure-loss channel; independent of N."""
    return 0.5 * float(erfc(math.sqrt(T / 2.0) * alphabet.alpha))


def p_err_thermal(T, alphabet, n_bar):
    """
    Honest mismatch rate over a thermal-loss channel.

    Args:
        T (float): Transmission
        alphabet (Alphabet): The constellation
        n_bar (float): Thermal photons injected by the entangling cloner

    Returns:
        float: 0.5 * erfc(sqrt(T / (2 (1 + (1 - T) n_bar))) * alpha)
    """
    return 0.5 * float(erfc(math.sqrt(T / (2.0 * (1.0 + (1.0 - T) * n_bar))) * alphabet.alpha))


def p_err(channel, alphabet):
    if channel.attack is AttackClass.BEAMSPLITTER:
        return p_err_pure(channel.T, alphabet)
    return p_err_thermal(channel.T, alphabet, channel.n_bar)


def sector_offset(N):
    """
    Angle of the first sector boundary.

    The eliminated set changes when an alphabet state becomes orthogonal in
    phase to the outcome, i.e. at angles 2 pi k / N + pi / 2.
    """
    return (math.pi / 2.0) % (2.0 * math.pi / N)


def sector_of(c, N):
    """Index of the sector containing outcome(s) c; works elementwise on arrays."""
    width = 2.0 * np.pi / N
    angle = np.mod(np.angle(c) - sector_offset(N), 2.0 * np.pi)
    return np.minimum((angle // width).astype(int), N - 1)


def _angular_density(means, variance, theta):
    """
    Angular density of an isotropic Gaussian with the given means.

    Returns a (len(means), len(theta)) array f(theta) such that the probability of
    arg Z in [a, b] is the integral of f over [a, b].
    """
    sigma_sqrt2 = math.sqrt(2.0 * variance)
    p = (means.conj()[:, None] * np.exp(1j * theta)[None, :]).real
    t = p / sigma_sqrt2
    radius2 = (np.abs(means) ** 2)[:, None]
    q2 = np.maximum(radius2 - p * p, 0.0)
    base = np.exp(-radius2 / (2.0 * variance))
    tail = np.where(
        t < 0,
        erfcx(-np.minimum(t, 0.0)) * base,
        np.exp(-q2 / (2.0 * variance)) * erfc(-np.maximum(t, 0.0)),
    )
    return (base + math.sqrt(math.pi) * t * tail) / (2.0 * math.pi)


def wedge_probability(mean, variance, start, width, closed_form=True, tolerance=ANGULAR_TOLERANCE):
    """
    Probability that an isotropic Gaussian lands in the wedge [start, start + width).

    Quarter and half planes use erfc products; other widths integrate the
    angular density with Gauss-Legendre, doubling the node count until two
    successive estimates agree.

    Args:
        mean: Complex mean, scalar or array
        variance (float): Per-quadrature variance
        start (float): Starting angle of the wedge
        width (float): Angular width in (0, 2 pi]
        closed_form (bool): Use the erfc forms where they exist
        tolerance (float): Largest change between successive quadratures

    Returns:
        float or numpy.ndarray matching the shape of `mean`
    """
    scalar = np.ndim(mean) == 0
    means = np.atleast_1d(np.asarray(mean, dtype=complex))

    if width >= 2.0 * math.pi:
        result = np.ones(means.shape)
    elif closed_form and math.isclose(width, math.pi / 2.0):
        rotated = means * np.exp(-1j * start)
        scale = math.sqrt(2.0 * variance)
        result = 0.25 * erfc(-rotated.real / scale) * erfc(-rotated.imag / scale)
    elif closed_form and math.isclose(width, math.pi):
        rotated = means * np.exp(-1j * start)
        result = 0.5 * erfc(-rotated.imag / math.sqrt(2.0 * variance))
    else:
        result = _wedge_quadrature(means, variance, start, width, tolerance)

    return float(result[0]) if scalar else result


def _wedge_quadrature(means, variance, start, width, tolerance):
    previous = None
    nodes = INITIAL_ANGULAR_NODES
    while nodes <= MAX_ANGULAR_NODES:
        x, w = leggauss(nodes)
        theta = start + 0.5 * width * (x + 1.0)
        estimate = _angular_density(means, variance, theta) @ (0.5 * width * w)
        if previous is not None and np.max(np.abs(estimate - previous)) < tolerance:
            return estimate
        previous = estimate
        nodes *= 2
    raise QuadratureError("Angular quadrature did not converge", float(np.max(previous)), tolerance)


def sector_probability(k, channel, alphabet, sector):
    """
    P(c in sector | state k sent) for the honest recipient's outcome.

    Args:
        k (int): Sent state index
        channel (Channel): The channel
        alphabet (Alphabet): The constellation
        sector (Sector): The sector

    Returns:
        float: Probability in [0, 1]
    """
    mean = math.sqrt(channel.T) * alphabet.amplitude(k)
    start, _ = sector.bounds
    return wedge_probability(mean, channel.outcome_variance, start, sector.width)


def sector_probability_table(channel, alphabet):
    """Matrix P[k, s] of sector probabilities; rows sum to one."""
    N = alphabet.N
    first_row = np.array([sector_probability(0, channel, alphabet, Sector(s, N)) for s in range(N)])
    # Rotating the sent state by one step rotates every sector by one step
    return np.array([np.roll(first_row, k) for k in range(N)])


def _ranking_scores(c, alphabet):
    amplitudes = np.exp(2j * np.pi * np.arange(alphabet.N) / alphabet.N)
    scores = (np.asarray(c, dtype=complex)[..., None] * amplitudes.conj()).real
    return np.round(scores, SCORE_DECIMALS) + 0.0


def eliminated_set(c, alphabet):
    """
    The N/2 states least compatible with the outcome c.

    States are ranked by Re(c * conj(alpha_k)); ties go to the smaller index.

    Args:
        c: Heterodyne outcome
        alphabet (Alphabet): The constellation

    Returns:
        frozenset: N/2 state indices
    """
    scores = _ranking_scores(complex(c), alphabet)
    order = np.argsort(scores, kind="stable")
    return frozenset(int(i) for i in order[: alphabet.N // 2])


def eliminated_mask(outcomes, alphabet):
    """Vectorized eliminated_set: boolean array (len(outcomes), N), True where eliminated."""
    scores = _ranking_scores(np.asarray(outcomes, dtype=complex), alphabet)
    order = np.argsort(scores, axis=-1, kind="stable")
    mask = np.zeros(scores.shape, dtype=bool)
    np.put_along_axis(mask, order[..., : alphabet.N // 2], True, axis=-1)
    return mask


def sector_eliminated_set(sector, alphabet):
    """Eliminated set shared by every outcome inside the sector."""
    return eliminated_set(np.exp(1j * sector.centre), alphabet)


def holevo_beamsplitter(channel, alphabet, method="gram", fock_dim=40):
    """
    Holevo information of the beamsplitter attacker on the eliminated signature.

    The attacker holds |sqrt(1 - T) alpha_k>. Conditioning on the honest
    recipient's sector reweights the N components by sector_probability.

    Args:
        channel (Channel): Pure-loss channel
        alphabet (Alphabet): The constellation
        method (str): "gram" for the exact Gram-matrix route, "fock" for the
            truncated number-basis assembly
        fock_dim (int): Truncation used by the "fock" method

    Returns:
        float: chi in bits, within [0, log2 N]
    """
    if channel.attack is not AttackClass.BEAMSPLITTER:
        raise ChannelError("holevo_beamsplitter needs a beamsplitter channel")
    if method not in ("gram", "fock"):
        raise ValueError(f"Unknown method: {method}")

    reflected = math.sqrt(1.0 - channel.T) * alphabet.amplitudes
    table = sector_probability_table(channel, alphabet)
    sector_weights = table.mean(axis=0)

    if method == "gram":
        def entropy(weights):
            return mixture_entropy(WeightedCoherentMixture.from_unnormalized(reflected, weights))
    else:
        vectors = [coherent_fock_vector(a, fock_dim, tolerance=None) for a in reflected]

        def entropy(weights):
            return von_neumann_entropy(DensityMatrix.from_weighted_vectors(vectors, weights))

    total = entropy(np.ones(alphabet.N))
    conditional = sum(
        sector_weights[s] * entropy(table[:, s]) for s in range(alphabet.N) if sector_weights[s] > 0
    )
    return float(min(max(total - conditional, 0.0), math.log2(alphabet.N)))


def _cloner_states(channel, alphabet, nodes, dim):
    """
    Unnormalized attacker states after heterodyne by the honest recipient.

    Returns (rho_total, rho_sector0, captured mass, exact mass) where rho_sector0
    weights each projection outcome by the probability that Charlie's recording
    noise keeps it in sector 0.
    """
    T = channel.T
    tmsv = TmsvParams.from_n_bar(channel.n_bar)
    variance = 1.0 + (1.0 - T) * channel.n_bar
    radius = math.sqrt(T) * alphabet.alpha + 8.0 * math.sqrt(variance / 2.0)

    x, w = leggauss(nodes)
    grid_x, grid_y = np.meshgrid(radius * x, radius * x, indexing="ij")
    outcomes = (grid_x + 1j * grid_y).ravel()
    node_weights = np.outer(radius * w, radius * w).ravel()

    sector = Sector(0, alphabet.N)
    start, _ = sector.bounds
    in_sector = wedge_probability(outcomes, variance / 2.0, start, sector.width)

    m_count = min(dim, tmsv.cutoff())
    size = dim * m_count
    rho_total = np.zeros((size, size), dtype=complex)
    rho_sector = np.zeros((size, size), dtype=complex)
    captured = 0.0
    exact = 0.0

    for alpha_k in alphabet.amplitudes:
        density = cloner_outcome_density(alpha_k, T, channel.n_bar, outcomes)
        exact += float(node_weights @ density)
        for first in range(0, outcomes.size, CLONER_CHUNK):
            chunk = slice(first, first + CLONER_CHUNK)
            psi = cloner_projection_amplitudes(alpha_k, T, tmsv, outcomes[chunk], dim).reshape(-1, size)
            weighted = psi * (node_weights[chunk] / math.pi)[:, None]
            rho_total += weighted.T @ psi.conj()
            rho_sector += (weighted * in_sector[chunk][:, None]).T @ psi.conj()
            captured += float(np.sum(np.abs(psi) ** 2, axis=1) @ (node_weights[chunk] / math.pi))

    N = alphabet.N
    return rho_total / N, rho_sector / N, captured / N, exact / N


def _normalized_entropy(entries):
    entries = 0.5 * (entries + entries.conj().T)
    return von_neumann_entropy(DensityMatrix(entries / np.trace(entries).real))


def _cloner_chi(channel, alphabet, nodes, dim):
    rho_total, rho_sector, captured, exact = _cloner_states(channel, alphabet, nodes, dim)
    deficit = 1.0 - captured / exact
    if deficit > CLONER_MASS_TOLERANCE:
        tmsv = TmsvParams.from_n_bar(channel.n_bar)
        raise TruncationError(
            f"Cloner states need more than {dim} levels",
            deficit,
            max(dim + 1, cloner_levels(channel.T, alphabet.alpha, tmsv)[0]),
        )
    # Every sector is equally likely and carries the same entropy by rotation symmetry
    chi = _normalized_entropy(rho_total) - _normalized_entropy(rho_sector)
    return min(max(chi, 0.0), math.log2(alphabet.N))


def holevo_cloner(channel, alphabet, grid_nodes=None, dim=None, tolerance=CLONER_TOLERANCE):
    """
    Holevo information of the entangling-cloner attacker on the eliminated signature.

    The attacker keeps both the reflected mode and the purifying TMSV mode.
    Their joint state is integrated over the honest recipient's outcomes with
    a tensor Gauss-Legendre rule; the node count doubles, at most three times,
    until chi changes by less than `tolerance`.

    Args:
        channel (Channel): Channel with the entangling-cloner attack
        alphabet (Alphabet): The constellation
        grid_nodes (int): Initial nodes per axis
        dim (int): Levels kept for the reflected mode; default from cloner_levels
        tolerance (float): Convergence threshold on chi

    Returns:
        float: chi in bits
    """
    if channel.attack is not AttackClass.ENTANGLING_CLONER:
        raise ChannelError("holevo_cloner needs an entangling-cloner channel")

    tmsv = TmsvParams.from_n_bar(channel.n_bar)
    dim = dim or cloner_levels(channel.T, alphabet.alpha, tmsv)[0]
    nodes = grid_nodes or CLONER_INITIAL_NODES
    if nodes < 2:
        raise ChannelError(f"grid_nodes must be at least 2, got {nodes}")

    previous = _cloner_chi(channel, alphabet, nodes, dim)
    for _ in range(CLONER_MAX_DOUBLINGS):
        nodes *= 2
        current = _cloner_chi(channel, alphabet, nodes, dim)
        if abs(current - previous) < tolerance:
            return float(current)
        previous = current
    raise QuadratureError("Cloner phase-space quadrature did not converge", previous, tolerance)


def holevo(channel, alphabet, cloner_grid_nodes=None, cloner_dim=None, method="gram"):
    """Holevo information for whichever attack the channel carries."""
    if channel.attack is AttackClass.BEAMSPLITTER:
        return holevo_beamsplitter(channel, alphabet, method=method)
    return holevo_cloner(channel, alphabet, grid_nodes=cloner_grid_nodes, dim=cloner_dim)


if __name__ == "__main__":
    # Example usage
    qpsk = Alphabet(4, 1.0)
    channel = Channel(0.5)
    print(f"p_err = {p_err(channel, qpsk):.6f}")
    print(f"chi (beamsplitter) = {holevo_beamsplitter(channel, qpsk):.6f} bits")
    print(f"Eliminated for c = 1+i: {sorted(eliminated_set(1 + 1j, qpsk))}")

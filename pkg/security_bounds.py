"""
security_bounds.py - Thresholds, failure probabilities and signature lengths

Turns an honest mismatch rate p_err and an eavesdropper Holevo information chi
into the forger's guaranteed mismatch rate p_e, the verification thresholds
(s_B, s_C), the three Hoeffding failure probabilities and the signature length
L needed to reach a target failure probability.
"""

import math
from dataclasses import dataclass

from scipy.optimize import bisect
from scipy.special import gammaln

from channel_attacks import holevo, p_err as honest_error_rate

INVERSE_ENTROPY_XTOL = 1e-14


class BoundInapplicableError(ValueError):
    """Raised when a Hoeffding bound is evaluated outside its precondition."""


class NoSecurityError(ValueError):
    """Raised when the security gap is not positive but a finite length is required."""


def binary_entropy(p):
    """
    Binary Shannon entropy in bits.

    Args:
        p (float): Probability in [0, 1]

    Returns:
        float: h(p), with h(0) = h(1) = 0
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"Probability must be in [0, 1], got {p!r}")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def forger_mismatch_bound(chi):
    """
    Smallest mismatch rate any forger can achieve given Holevo information chi.

    Inverts h(p_e) = 1 - chi on the branch [0, 1/2], which is the smaller and
    therefore conservative root.
    """
    if chi < 0:
        raise ValueError(f"Holevo information must be nonnegative, got {chi!r}")
    target = max(0.0, 1.0 - chi)
    if target <= 0.0:
        return 0.0
    if target >= 1.0:
        return 0.5
    return bisect(lambda p: binary_entropy(p) - target, 0.0, 0.5, xtol=INVERSE_ENTROPY_XTOL)


@dataclass(frozen=True)
class Thresholds:
    """Verification thresholds for the recipient who checks directly (s_B) and after forwarding (s_C)."""

    s_B: float
    s_C: float


def thresholds(p_err, p_e):
    """
    Place s_B and s_C inside [p_err, p_e] so that all three failure probabilities coincide.

    Args:
        p_err (float): Honest mismatch rate
        p_e (float): Forger mismatch bound

    Returns:
        Thresholds: s_B = p_err + g/4, s_C = p_err + 3g/4 with g = p_e - p_err
    """
    gap = p_e - p_err
    if gap <= 0:
        raise NoSecurityError(f"No security gap: p_e={p_e!r} <= p_err={p_err!r}")
    return Thresholds(p_err + gap / 4.0, p_err + 3.0 * gap / 4.0)


def eps_rob(s, p_err, L):
    """Probability that an honest run aborts at threshold s."""
    if s <= p_err:
        raise BoundInapplicableError(f"Robustness bound needs s > p_err, got s={s!r}, p_err={p_err!r}")
    return 2.0 * math.exp(-((s - p_err) ** 2) * L)


def eps_rep(s_B, s_C, L):
    """Probability that a repudiating sender makes Bob accept and Charlie reject."""
    if s_C <= s_B:
        raise BoundInapplicableError(f"Repudiation bound needs s_C > s_B, got s_B={s_B!r}, s_C={s_C!r}")
    return 2.0 * math.exp(-((s_C - s_B) ** 2) * L / 4.0)


def eps_forg(p_e, s_C, L):
    """Probability that a forger passes Charlie's check."""
    if p_e <= s_C:
        raise BoundInapplicableError(f"Forgery bound needs p_e > s_C, got p_e={p_e!r}, s_C={s_C!r}")
    return 2.0 * math.exp(-((p_e - s_C) ** 2) * L)


def signature_length(g, eps_fail):
    """
    Shortest even L with 2 exp(-g^2 L / 16) <= eps_fail.

    Args:
        g (float): Security gap p_e - p_err
        eps_fail (float): Target failure probability in (0, 1)

    Returns:
        int: Signature length per recipient
    """
    if g <= 0:
        raise NoSecurityError(f"Signature length is infinite for gap g={g!r}")
    if not 0.0 < eps_fail < 1.0:
        raise ValueError(f"eps_fail must be in (0, 1), got {eps_fail!r}")
    length = math.ceil(16.0 * math.log(2.0 / eps_fail) / (g * g))
    return length + (length % 2)


def hoeffding_upper(n, deviation):
    """One-sided Hoeffding bound exp(-2 deviation^2 n) on an empirical mean of n bounded outcomes."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n!r}")
    if deviation < 0:
        raise ValueError(f"deviation must be >= 0, got {deviation!r}")
    return math.exp(-2.0 * deviation * deviation * n)


def elimination_entropy_constant(N):
    """
    log2(N (N/2)!) - log2((N/2) (N/2)!), the constant in h(p_e) >= constant - chi.

    It equals one for every even N, so the same inversion serves all alphabets.
    """
    half = N // 2
    numerator = math.log(N) + gammaln(half + 1)
    denominator = math.log(half) + gammaln(half + 1)
    return float((numerator - denominator) / math.log(2.0))


def signing_time(L, sending_rate_hz):
    """Seconds needed to send L states to each recipient over parallel links."""
    if sending_rate_hz <= 0:
        raise ValueError(f"Sending rate must be positive, got {sending_rate_hz!r}")
    return L / sending_rate_hz


@dataclass(frozen=True)
class SecurityResult:
    """
    Security parameters at one (channel, alphabet, eps_fail) point.

    Insecure points carry L = inf, thresholds = None and NaN failure probabilities.
    """

    p_err: float
    chi: float
    p_e: float
    g: float
    thresholds: Thresholds = None
    eps_rob: float = math.nan
    eps_rep: float = math.nan
    eps_forg: float = math.nan
    eps_fail: float = math.nan
    eps_target: float = math.nan
    L: float = math.inf

    @property
    def secure(self):
        return math.isfinite(self.L)

    @property
    def s_B(self):
        return self.thresholds.s_B if self.thresholds else math.nan

    @property
    def s_C(self):
        return self.thresholds.s_C if self.thresholds else math.nan


def analyze(channel, alphabet, eps_fail, cloner_grid_nodes=None, cloner_dim=None, method="gram"):
    """
    Full security analysis of one parameter point.

    Args:
        channel (Channel): The channel and attack
        alphabet (Alphabet): The constellation
        eps_fail (float): Target failure probability
        cloner_grid_nodes (int): Initial quadrature nodes for the cloner attack
        cloner_dim (int): Fock levels for the cloner attack
        method (str): "gram" or "fock" for the beamsplitter entropy

    Returns:
        SecurityResult: An insecure point is returned as a value with L = inf
    """
    if not 0.0 < eps_fail < 1.0:
        raise ValueError(f"eps_fail must be in (0, 1), got {eps_fail!r}")

    mismatch = honest_error_rate(channel, alphabet)
    chi = holevo(channel, alphabet, cloner_grid_nodes=cloner_grid_nodes, cloner_dim=cloner_dim, method=method)
    p_e = forger_mismatch_bound(chi)
    gap = p_e - mismatch

    if gap <= 0:
        return SecurityResult(p_err=mismatch, chi=chi, p_e=p_e, g=gap, eps_target=eps_fail)

    levels = thresholds(mismatch, p_e)
    L = signature_length(gap, eps_fail)
    robustness = eps_rob(levels.s_B, mismatch, L)
    repudiation = eps_rep(levels.s_B, levels.s_C, L)
    forgery = eps_forg(p_e, levels.s_C, L)
    return SecurityResult(
        p_err=mismatch,
        chi=chi,
        p_e=p_e,
        g=gap,
        thresholds=levels,
        eps_rob=robustness,
        eps_rep=repudiation,
        eps_forg=forgery,
        eps_fail=max(robustness, repudiation, forgery),
        eps_target=eps_fail,
        L=L,
    )


if __name__ == "__main__":
    # Example usage
    from channel_attacks import Alphabet, Channel

    result = analyze(Channel(0.5), Alphabet(4, 0.6), 1e-4)
    print(f"p_err={result.p_err:.5f} chi={result.chi:.5f} p_e={result.p_e:.5f} g={result.g:.5f} L={result.L}")
    print(f"signature_length(0.038, 1e-4) = {signature_length(0.038, 1e-4)}")

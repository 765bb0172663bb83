"""
optimizer.py - Choosing the coherent-state amplitude that minimizes L

Maximizes the security gap g over alpha with a coarse grid followed by a
bounded scalar refinement between the neighbours of the best grid point.
The grid doubles as a certificate: the refined optimum is only reported if
no grid point beats it.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from channel_attacks import Alphabet, Channel
from security_bounds import analyze

ALPHA_MIN = 0.05
ALPHA_MAX = 3.0
ALPHA_STEP = 0.05
ALPHA_TOLERANCE = 1e-3


def refine_alpha(gap, lower, upper, tol=ALPHA_TOLERANCE):
    """
    Amplitude in [lower, upper] maximizing `gap`, located to within `tol`.

    Args:
        gap (callable): alpha -> security gap
        lower (float): Left end of the bracket
        upper (float): Right end of the bracket
        tol (float): Absolute tolerance on alpha

    Returns:
        float: The refined amplitude
    """
    lower, upper = min(lower, upper), max(lower, upper)
    if upper - lower <= tol:
        return 0.5 * (lower + upper)
    found = minimize_scalar(
        lambda alpha: -gap(alpha), bounds=(lower, upper), method="bounded", options={"xatol": tol}
    )
    return float(found.x)


def alpha_grid(start=ALPHA_MIN, stop=ALPHA_MAX, step=ALPHA_STEP):
    """Inclusive grid start, start + step, ..., stop, rounded to avoid drift."""
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return np.round(start + step * np.arange(count), 10)


@dataclass(frozen=True)
class OptimizationResult:
    """
    Best amplitude for one channel.

    Attributes:
        alpha_opt: Amplitude attaining the largest gap
        L_min: Signature length at alpha_opt (inf if no alpha is secure)
        g_max: Largest gap found
        result: Full SecurityResult at alpha_opt
        refined: True when the refinement beat the best grid point
    """

    alpha_opt: float
    L_min: float
    g_max: float
    result: object
    refined: bool

    @property
    def secure(self):
        return math.isfinite(self.L_min)


def optimize_alpha(T, xi, N, eps_fail, cloner_grid_nodes=None, cloner_dim=None, verbose=False):
    """
    Find the amplitude minimizing the signature length for one channel.

    Args:
        T (float): Transmission
        xi (float): Excess noise; xi > 0 selects the entangling-cloner attack
        N (int): Alphabet size
        eps_fail (float): Target failure probability
        cloner_grid_nodes (int): Initial quadrature nodes for the cloner attack
        cloner_dim (int): Fock levels for the cloner attack
        verbose (bool): Print progress

    Returns:
        OptimizationResult
    """
    channel = Channel.from_excess_noise(T, xi)
    cache = {}

    def evaluate(alpha):
        alpha = float(alpha)
        if alpha not in cache:
            cache[alpha] = analyze(
                channel, Alphabet(N, alpha), eps_fail, cloner_grid_nodes=cloner_grid_nodes, cloner_dim=cloner_dim
            )
        return cache[alpha]

    grid = alpha_grid()
    gaps = np.array([evaluate(alpha).g for alpha in grid])
    best = int(np.argmax(gaps))
    if verbose:
        print(f"T={T:g} xi={xi:g} N={N}: best grid alpha {grid[best]:.2f} (g={gaps[best]:.6f})")

    if gaps[best] <= 0:
        result = evaluate(grid[best])
        return OptimizationResult(float(grid[best]), math.inf, float(gaps[best]), result, False)

    lower = grid[max(best - 1, 0)]
    upper = grid[min(best + 1, len(grid) - 1)]
    refined = refine_alpha(lambda alpha: evaluate(alpha).g, lower, upper)

    candidate = evaluate(refined)
    grid_result = evaluate(grid[best])
    refined_wins = candidate.g >= grid_result.g
    chosen_alpha, chosen = (refined, candidate) if refined_wins else (float(grid[best]), grid_result)
    if verbose:
        print(f"  refined alpha {chosen_alpha:.4f}: g={chosen.g:.6f}, L={chosen.L}")
    return OptimizationResult(float(chosen_alpha), chosen.L, chosen.g, chosen, refined_wins)


if __name__ == "__main__":
    # Example usage
    best = optimize_alpha(0.5, 0.0, 4, 1e-4, verbose=True)
    print(f"alpha_opt={best.alpha_opt:.4f} L_min={best.L_min} g_max={best.g_max:.6f}")

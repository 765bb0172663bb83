"""
campaigns.py - Bound-versus-simulation campaigns

Runs the honest, repudiation and forgery simulations at one parameter point
and compares every empirical frequency with its analytic bound, allowing three
standard errors of statistical slack. The report is a plain dictionary ready
for json_encoder.write_json_report.
"""

from channel_attacks import AttackClass, Alphabet, Channel
from protocol_sim import (
    SimulationParams,
    shard_generators,
    simulate_forger_ml,
    simulate_honest,
    simulate_repudiation,
)
from security_bounds import analyze, eps_rep, eps_rob, forger_mismatch_bound

CAMPAIGNS = ("honest", "repudiation", "forger")
SLACK_SIGMAS = 3.0
REPUDIATION_POINTS = (0.1, 0.3, 0.5, 0.7, 0.9)
FORGER_POSITIONS = 100000


def _ceiling_check(name, bound, estimate, **details):
    slack = SLACK_SIGMAS * estimate.standard_error
    return {
        "name": name,
        "kind": "ceiling",
        "bound": bound,
        "empirical": estimate.frequency,
        "count": estimate.count,
        "trials": estimate.trials,
        "standard_error": estimate.standard_error,
        "passed": estimate.frequency <= bound + slack,
        **details,
    }


def honest_campaign(params, p_err, trials, rng):
    """Abort frequency of honest runs against eps_rob at both thresholds."""
    levels = params.thresholds
    bound = min(1.0, eps_rob(levels.s_B, p_err, params.L) + eps_rob(levels.s_C, p_err, params.L))
    estimate = simulate_honest(params, trials, rng)
    return [_ceiling_check("robustness", bound, estimate)]


def repudiation_flip_fractions(p_err, levels, points=REPUDIATION_POINTS):
    """Flip fractions whose induced mismatch rates sweep through (s_B, s_C)."""
    fractions = []
    for point in points:
        target = levels.s_B + point * (levels.s_C - levels.s_B)
        fractions.append((target - p_err) / (1.0 - 2.0 * p_err))
    return fractions


def repudiation_campaign(params, p_err, trials, rng):
    """Success frequency of the antipodal-flip sender against eps_rep."""
    levels = params.thresholds
    bound = min(1.0, eps_rep(levels.s_B, levels.s_C, params.L))
    checks = []
    for fraction in repudiation_flip_fractions(p_err, levels):
        estimate = simulate_repudiation(params, fraction, trials, rng)
        checks.append(_ceiling_check("repudiation", bound, estimate, flip_fraction=fraction))
    return checks


def forger_campaign(params, chi, positions, rng):
    """Mismatch rate of the heterodyne forger, which must stay above p_e."""
    floor = forger_mismatch_bound(chi)
    estimate = simulate_forger_ml(params, positions, rng)
    slack = SLACK_SIGMAS * estimate.standard_error
    return [{
        "name": "forgery",
        "kind": "floor",
        "bound": floor,
        "empirical": estimate.frequency,
        "count": estimate.count,
        "trials": estimate.trials,
        "standard_error": estimate.standard_error,
        "passed": estimate.frequency >= floor - slack,
    }]


def simulate_cmd(T, xi, N, alpha, L, trials, seed, eps_fail=1e-4, campaigns=CAMPAIGNS,
                 forger_positions=FORGER_POSITIONS, cloner_grid_nodes=None, cloner_dim=None, verbose=True):
    """
    Run the requested campaigns and assemble the report.

    Args:
        T, xi, N, alpha: The parameter point
        L (int): Simulated signature length
        trials (int): Protocol runs per honest/repudiation check
        seed (int): Master seed; each campaign gets its own spawned stream
        eps_fail (float): Target used to derive the thresholds
        campaigns: Subset of CAMPAIGNS
        forger_positions (int): Positions simulated for the forgery check
        verbose (bool): Print progress

    Returns:
        tuple: (report dict, True when every check passed)
    """
    unknown = set(campaigns) - set(CAMPAIGNS)
    if unknown:
        raise ValueError(f"Unknown campaigns: {', '.join(sorted(unknown))}")

    channel = Channel.from_excess_noise(T, xi)
    alphabet = Alphabet(N, alpha)
    analysis = analyze(channel, alphabet, eps_fail, cloner_grid_nodes=cloner_grid_nodes, cloner_dim=cloner_dim)
    params = SimulationParams(channel, alphabet, L, analysis.thresholds)
    streams = dict(zip(CAMPAIGNS, shard_generators(seed, len(CAMPAIGNS))))

    checks = []
    skipped = {}
    for campaign in CAMPAIGNS:
        if campaign not in campaigns:
            continue
        if campaign in ("honest", "repudiation") and not analysis.secure:
            skipped[campaign] = "no security gap at this point"
            continue
        if campaign == "forger" and channel.attack is not AttackClass.BEAMSPLITTER:
            skipped[campaign] = "the heterodyne forger needs the beamsplitter attack"
            continue

        if verbose:
            print(f"Running {campaign} campaign...")
        if campaign == "honest":
            checks += honest_campaign(params, analysis.p_err, trials, streams[campaign])
        elif campaign == "repudiation":
            checks += repudiation_campaign(params, analysis.p_err, trials, streams[campaign])
        else:
            checks += forger_campaign(params, analysis.chi, forger_positions, streams[campaign])

    passed = all(check["passed"] for check in checks)
    report = {
        "parameters": {
            "T": T, "xi": xi, "N": N, "alpha": alpha, "L": L,
            "trials": trials, "seed": seed, "eps_fail": eps_fail,
            "forger_positions": forger_positions,
            "attack": channel.attack,
        },
        "analysis": {
            "p_err": analysis.p_err, "chi": analysis.chi, "p_e": analysis.p_e, "g": analysis.g,
            "s_B": analysis.s_B, "s_C": analysis.s_C, "L": analysis.L,
        },
        "checks": checks,
        "skipped": skipped,
        "passed": passed,
    }
    if verbose:
        for check in checks:
            status = "PASS" if check["passed"] else "FAIL"
            print(f"  {status} {check['name']}: empirical {check['empirical']:.6f} vs bound {check['bound']:.6g}")
    return report, passed


if __name__ == "__main__":
    # Example usage
    report, passed = simulate_cmd(T=1.0, xi=0.0, N=4, alpha=3.0, L=1000, trials=100, seed=1)
    print(f"All checks passed: {passed}")

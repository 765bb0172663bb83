#!/usr/bin/env python3
"""
main.py - Main script for the signature security calculator

This is the main entry point. It handles command-line arguments, loads the
configuration and dispatches to the single-point bound, sweep, optimization,
figure and simulation commands.
"""

import os
import sys
import argparse
import contextlib
import io
import math

from config import Config, ConfigError
from channel_attacks import Alphabet, Channel, ChannelError, QuadratureError
from quantum_core import EntropyError, InvalidStateError, TruncationError
from security_bounds import BoundInapplicableError, NoSecurityError, analyze, signing_time
from optimizer import optimize_alpha
from sweeps import FIGURES, fiber_transmission, figure_data, sweep
from campaigns import CAMPAIGNS, simulate_cmd
from json_encoder import write_json_report

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERIC = 2
EXIT_BOUND_VIOLATION = 3

NUMERIC_ERRORS = (TruncationError, QuadratureError, EntropyError, InvalidStateError, NoSecurityError, BoundInapplicableError)


class UsageError(Exception):
    """Raised for command-line input that argparse accepts but the command cannot use."""


class ArgumentParser(argparse.ArgumentParser):
    """argparse parser that reports usage errors with exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"Error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def parse_arguments(argv=None):
    """Parse command-line arguments."""
    parser = ArgumentParser(description='Security calculator and simulator for coherent-state quantum digital signatures')
    subparsers = parser.add_subparsers(dest='command', required=True, parser_class=ArgumentParser)

    common = ArgumentParser(add_help=False)
    common.add_argument('--config', default='config.json', help='Path to configuration file (default: config.json)')
    common.add_argument('--T', help='Channel transmission(s), comma-separated (overrides config file)')
    common.add_argument('--km', help='Fiber length(s) in km, comma-separated; converted at loss_db_per_km')
    common.add_argument('--xi', help='Excess noise value(s), comma-separated (overrides config file)')
    common.add_argument('--N', help='Alphabet size(s), comma-separated (overrides config file)')
    common.add_argument('--eps-fail', type=float, help='Target failure probability (overrides config file)')
    common.add_argument('--out', help='Output file (default: inside the configured output directory)')
    common.add_argument('--quiet', action='store_true', help='Suppress progress output')

    bound = subparsers.add_parser('bound', parents=[common], help='Security analysis of a single parameter point')
    bound.add_argument('--alpha', type=float, required=True, help='Coherent-state amplitude')
    bound.add_argument('--method', choices=['gram', 'fock'], default='gram', help='Entropy method for the beamsplitter attack')

    sweep_parser = subparsers.add_parser('sweep', parents=[common], help='Evaluate the configured grid and write CSV')
    sweep_parser.add_argument('--alpha', help='Alpha grid as "min,max,step" or "optimize"')

    subparsers.add_parser('optimize', parents=[common], help='Find the amplitude minimizing L')

    figure = subparsers.add_parser('figure', parents=[common], help='Write plot data for a figure')
    figure.add_argument('figure', choices=FIGURES, help='Figure to reproduce')
    figure.add_argument('--from-config', action='store_true', help='Use the configured grid instead of the built-in one')
    figure.add_argument('--alpha', help='Alpha grid as "min,max,step" (with --from-config)')

    simulate = subparsers.add_parser('simulate', parents=[common], help='Check the bounds against Monte Carlo runs')
    simulate.add_argument('--alpha', type=float, required=True, help='Coherent-state amplitude')
    simulate.add_argument('--L', type=int, help='Simulated signature length (overrides config file)')
    simulate.add_argument('--trials', type=int, help='Protocol runs per check (overrides config file)')
    simulate.add_argument('--seed', type=int, help='Master seed (overrides config file)')
    simulate.add_argument('--campaign', choices=CAMPAIGNS, action='append', help='Campaign to run (repeatable; default: all)')

    return parser.parse_args(argv)


def _split(text, cast=float):
    try:
        return [cast(part.strip()) for part in text.split(',') if part.strip()]
    except ValueError as e:
        raise ConfigError(f"Could not parse list {text!r}: {e}") from e


def override_config_with_args(config, args):
    """
    Override configuration with command-line arguments.

    Args:
        config: The configuration object
        args: The parsed command-line arguments
    """
    if args.T:
        config.config['T_values'] = _split(args.T)
        config.config['km_values'] = None
    if args.km:
        config.config['km_values'] = _split(args.km)
    if args.xi:
        config.config['xi_values'] = _split(args.xi)
    if args.N:
        config.config['N_values'] = _split(args.N, cast=int)
    if args.eps_fail is not None:
        config.config['eps_fail'] = args.eps_fail

    alpha = getattr(args, 'alpha', None)
    if isinstance(alpha, str):
        if alpha.strip() == 'optimize':
            config.config['alpha_grid'] = 'optimize'
        else:
            parts = _split(alpha)
            if len(parts) != 3:
                raise ConfigError(f'--alpha must be "min,max,step" or "optimize", got {alpha!r}')
            config.config['alpha_grid'] = dict(zip(('min', 'max', 'step'), parts))

    for name, key in (('L', 'signature_length'), ('trials', 'trials'), ('seed', 'seed')):
        value = getattr(args, name, None)
        if value is not None:
            config.config[key] = value


def single_point(config):
    """The one (T, xi, N) a point command works on."""
    km_values = config.get_km_values()
    if km_values is not None:
        transmissions = [fiber_transmission(km, config.get_loss_db_per_km()) for km in km_values]
    else:
        transmissions = config.get_T_values()
    xis = config.get_xi_values()
    sizes = config.get_N_values()
    if len(transmissions) != 1 or len(xis) != 1 or len(sizes) != 1:
        raise UsageError("This command takes a single T (or km), xi and N")
    return transmissions[0], xis[0], sizes[0]


def output_path(args, config, default_name):
    return args.out or os.path.join(config.get_output_directory(), default_name)


def run_bound(args, config):
    T, xi, N = single_point(config)
    result = analyze(Channel.from_excess_noise(T, xi), Alphabet(N, args.alpha), config.get_eps_fail(), method=args.method,
                     cloner_grid_nodes=config.get_cloner_grid_nodes(), cloner_dim=config.get_cloner_dim())
    report = {
        "T": T, "xi": xi, "N": N, "alpha": args.alpha, "method": args.method,
        "p_err": result.p_err, "chi": result.chi, "p_e": result.p_e, "g": result.g,
        "s_B": result.s_B, "s_C": result.s_C,
        "eps_rob": result.eps_rob, "eps_rep": result.eps_rep, "eps_forg": result.eps_forg,
        "eps_fail": result.eps_fail, "eps_target": result.eps_target, "L": result.L,
        "signing_time_s": signing_time(result.L, config.get_sending_rate_hz()) if result.secure else math.inf,
    }
    print(f"p_err={result.p_err:.6g} chi={result.chi:.6g} p_e={result.p_e:.6g} g={result.g:.6g} L={result.L}")
    path = output_path(args, config, 'bound.json')
    write_json_report(report, path)
    print(f"Saved bound results to {path}")
    return EXIT_OK


def run_sweep(args, config):
    sweep_config = config.to_sweep_config(output_path=output_path(args, config, 'sweep.csv'))
    rows = sweep(sweep_config)
    secure = sum(1 for row in rows if math.isfinite(row.L))
    print(f"Sweep complete: {len(rows)} rows, {secure} secure")
    return EXIT_OK


def run_optimize(args, config):
    T, xi, N = single_point(config)
    best = optimize_alpha(T, xi, N, config.get_eps_fail(), cloner_grid_nodes=config.get_cloner_grid_nodes(),
                          cloner_dim=config.get_cloner_dim(), verbose=True)
    report = {
        "T": T, "xi": xi, "N": N, "eps_fail": config.get_eps_fail(),
        "alpha_opt": best.alpha_opt, "L_min": best.L_min, "g_max": best.g_max, "refined": best.refined,
        "signing_time_s": signing_time(best.L_min, config.get_sending_rate_hz()) if best.secure else math.inf,
    }
    print(f"alpha_opt={best.alpha_opt:.4f} L_min={best.L_min} g_max={best.g_max:.6g}")
    path = output_path(args, config, 'optimize.json')
    write_json_report(report, path)
    print(f"Saved optimization results to {path}")
    return EXIT_OK


def run_figure(args, config):
    sweep_config = config.to_sweep_config() if args.from_config else None
    figure_data(args.figure, sweep_config, output_path=output_path(args, config, f'{args.figure}.csv'))
    return EXIT_OK


def run_simulate(args, config):
    T, xi, N = single_point(config)
    report, passed = simulate_cmd(
        T, xi, N, args.alpha,
        L=config.get_signature_length(),
        trials=config.get_trials(),
        seed=config.get_seed(),
        eps_fail=config.get_eps_fail(),
        campaigns=tuple(args.campaign or CAMPAIGNS),
        cloner_grid_nodes=config.get_cloner_grid_nodes(),
        cloner_dim=config.get_cloner_dim(),
    )
    path = output_path(args, config, 'simulate.json')
    write_json_report(report, path)
    print(f"Saved simulation report to {path}")
    if not passed:
        print("Error: at least one bound was violated beyond statistical slack", file=sys.stderr)
        return EXIT_BOUND_VIOLATION
    return EXIT_OK


COMMANDS = {
    'bound': run_bound,
    'sweep': run_sweep,
    'optimize': run_optimize,
    'figure': run_figure,
    'simulate': run_simulate,
}


def main(argv=None):
    """Main function."""
    args = parse_arguments(argv)

    stdout = io.StringIO() if args.quiet else sys.stdout
    try:
        with contextlib.redirect_stdout(stdout):
            config = Config(args.config)
            override_config_with_args(config, args)
            return COMMANDS[args.command](args, config)
    except (ConfigError, UsageError, ChannelError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"Error: could not write output: {e}", file=sys.stderr)
        return EXIT_USAGE
    except NUMERIC_ERRORS as e:
        print(f"Error: numeric failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())

"""
sweeps.py - Parameter sweeps and figure tables

Evaluates the security analysis over grids of transmission, excess noise,
alphabet size and amplitude, writes the rows as CSV through pandas, and
builds the plot-ready tables for the signature-length, gap and optimal-length
figures.
"""

import math
import os
from dataclasses import dataclass, fields

import numpy as np
import pandas as pd

from channel_attacks import Alphabet, Channel
from optimizer import alpha_grid, optimize_alpha
from security_bounds import analyze

COLUMNS = ["T", "xi", "N", "alpha", "p_err", "chi", "p_e", "g", "s_B", "s_C", "L"]
FIGURE_COLUMNS = ["figure", "series", "x", "y"]
FIGURES = ("fig6", "fig7", "fig8")

DEFAULT_LOSS_DB_PER_KM = 0.2
REFERENCE_DISTANCES_KM = (1.0, 20.0)

FIG6_ALPHAS = (0.5, 0.75, 1.0)
FIG6_XIS = (0.0, 0.02)
FIG6_T_VALUES = tuple(np.round(np.arange(0.05, 0.951, 0.05), 2))
FIG7_T_VALUES = (0.61, 0.47, 0.19, 0.11, 0.01)
FIG8_N_VALUES = (2, 4, 6, 8)
FIG8_T_VALUES = tuple(np.round(np.arange(0.1, 0.951, 0.1), 2))


def fiber_transmission(km, loss_db_per_km=DEFAULT_LOSS_DB_PER_KM):
    """Transmission of km kilometres of fiber: 10^(-loss * km / 10)."""
    if km < 0:
        raise ValueError(f"Fiber length must be nonnegative, got {km!r}")
    return 10.0 ** (-loss_db_per_km * km / 10.0)


def fiber_km(T, loss_db_per_km=DEFAULT_LOSS_DB_PER_KM):
    """Fiber length with transmission T."""
    if not 0 < T <= 1:
        raise ValueError(f"Transmission must be in (0, 1], got {T!r}")
    return -10.0 * math.log10(T) / loss_db_per_km


@dataclass(frozen=True)
class SweepConfig:
    """
    The grid a sweep walks through.

    Attributes:
        T_values: Transmissions (ignored when km_values is set)
        xi_values: Excess noise values
        N_values: Alphabet sizes
        alpha_grid: (min, max, step) or the string "optimize"
        eps_fail: Target failure probability
        output_path: CSV destination, or None to skip writing
        km_values: Fiber lengths converted with loss_db_per_km
        loss_db_per_km: Fiber loss
        cloner_grid_nodes: Initial quadrature nodes for the cloner attack
        cloner_dim: Fock levels for the cloner attack
    """

    T_values: tuple = (0.5,)
    xi_values: tuple = (0.0,)
    N_values: tuple = (4,)
    alpha_grid: object = (0.05, 3.0, 0.05)
    eps_fail: float = 1e-4
    output_path: str = None
    km_values: tuple = None
    loss_db_per_km: float = DEFAULT_LOSS_DB_PER_KM
    cloner_grid_nodes: int = None
    cloner_dim: int = None

    def __post_init__(self):
        for name in ("T_values", "xi_values", "N_values"):
            values = tuple(getattr(self, name))
            object.__setattr__(self, name, values)
            if not values:
                raise ValueError(f"{name} must not be empty")
        if self.km_values is not None:
            object.__setattr__(self, "km_values", tuple(self.km_values))
            if not self.km_values or min(self.km_values) < 0:
                raise ValueError("km_values must be nonempty and nonnegative")
        if not 0.0 < self.eps_fail < 1.0:
            raise ValueError(f"eps_fail must be in (0, 1), got {self.eps_fail!r}")
        if self.alpha_grid != "optimize":
            start, stop, step = (float(v) for v in self.alpha_grid)
            if start <= 0 or stop < start or step <= 0:
                raise ValueError(f"alpha grid must be positive and increasing, got {self.alpha_grid!r}")
            object.__setattr__(self, "alpha_grid", (start, stop, step))

    @property
    def transmissions(self):
        if self.km_values is not None:
            return tuple(fiber_transmission(km, self.loss_db_per_km) for km in self.km_values)
        return self.T_values

    @property
    def optimizing(self):
        return self.alpha_grid == "optimize"

    def alphas(self):
        return alpha_grid(*self.alpha_grid)


@dataclass(frozen=True)
class SweepRow:
    T: float
    xi: float
    N: int
    alpha: float
    p_err: float
    chi: float
    p_e: float
    g: float
    s_B: float
    s_C: float
    L: float

    @classmethod
    def from_result(cls, T, xi, N, alpha, result):
        return cls(
            float(T), float(xi), int(N), float(alpha),
            result.p_err, result.chi, result.p_e, result.g, result.s_B, result.s_C, result.L,
        )

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


def evaluate_point(T, xi, N, alpha, eps_fail, cloner_grid_nodes=None, cloner_dim=None):
    channel = Channel.from_excess_noise(T, xi)
    result = analyze(channel, Alphabet(N, alpha), eps_fail, cloner_grid_nodes=cloner_grid_nodes, cloner_dim=cloner_dim)
    return SweepRow.from_result(T, xi, N, alpha, result)


def sweep(config, verbose=True):
    """
    One row per (T, xi, N, alpha) in deterministic order; alpha is optimized per
    channel when the grid is "optimize".

    Args:
        config (SweepConfig): The grid
        verbose (bool): Print progress lines

    Returns:
        list: SweepRow objects
    """
    rows = []
    for T in config.transmissions:
        for xi in config.xi_values:
            for N in config.N_values:
                if config.optimizing:
                    best = optimize_alpha(
                        T, xi, N, config.eps_fail,
                        cloner_grid_nodes=config.cloner_grid_nodes, cloner_dim=config.cloner_dim,
                    )
                    rows.append(SweepRow.from_result(T, xi, N, best.alpha_opt, best.result))
                else:
                    for alpha in config.alphas():
                        rows.append(evaluate_point(
                            T, xi, N, alpha, config.eps_fail,
                            cloner_grid_nodes=config.cloner_grid_nodes, cloner_dim=config.cloner_dim,
                        ))
                if verbose:
                    print(f"Evaluated T={T:g}, xi={xi:g}, N={N} ({len(rows)} rows so far)")

    if config.output_path:
        write_sweep_csv(rows, config.output_path)
        if verbose:
            print(f"Saved sweep results to {config.output_path}")
    return rows


def rows_to_frame(rows):
    df = pd.DataFrame([row.as_dict() for row in rows], columns=COLUMNS)
    df["L"] = [format_length(L) for L in df["L"]]
    return df


def format_length(L):
    return "inf" if math.isinf(L) else str(int(L))


def parse_length(value):
    value = str(value).strip()
    return math.inf if value == "inf" else int(value)


def _ensure_parent(path):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)


def write_sweep_csv(rows, path):
    """Write rows with the fixed header; floats keep full round-trip precision."""
    _ensure_parent(path)
    rows_to_frame(rows).to_csv(path, index=False, na_rep="nan")


def read_sweep_csv(path):
    """Parse a sweep CSV back into SweepRow objects."""
    df = pd.read_csv(path, dtype={"L": str, "N": int}, float_precision="round_trip")
    if list(df.columns) != COLUMNS:
        raise ValueError(f"Unexpected sweep header in {path}: {list(df.columns)}")
    rows = []
    for record in df.to_dict(orient="records"):
        record["L"] = parse_length(record["L"])
        record["N"] = int(record["N"])
        rows.append(SweepRow(**record))
    return rows


def _marker_rows(figure, loss_db_per_km):
    return [
        {"figure": figure, "series": f"marker_{km:g}km", "x": fiber_transmission(km, loss_db_per_km), "y": math.nan}
        for km in REFERENCE_DISTANCES_KM
    ]


def _figure6(config, verbose):
    T_values = config.transmissions if config else FIG6_T_VALUES
    xis = config.xi_values if config else FIG6_XIS
    alphas = config.alphas() if config and not config.optimizing else FIG6_ALPHAS
    eps_fail = config.eps_fail if config else 1e-4
    options = _cloner_options(config)

    records = []
    for xi in xis:
        for alpha in alphas:
            series = f"alpha={alpha:g},xi={xi:g}"
            for T in T_values:
                row = evaluate_point(T, xi, 4, alpha, eps_fail, **options)
                records.append({"figure": "fig6", "series": series, "x": T, "y": row.L})
            if verbose:
                print(f"fig6: finished series {series}")
    return records + _marker_rows("fig6", _loss(config))


def _figure7(config, verbose):
    T_values = config.transmissions if config else FIG7_T_VALUES
    xis = config.xi_values if config else (0.0,)
    alphas = config.alphas() if config and not config.optimizing else alpha_grid()
    eps_fail = config.eps_fail if config else 1e-4
    options = _cloner_options(config)

    records = []
    for xi in xis:
        for T in T_values:
            series = f"T={T:g},xi={xi:g}"
            for alpha in alphas:
                row = evaluate_point(T, xi, 4, alpha, eps_fail, **options)
                records.append({"figure": "fig7", "series": series, "x": float(alpha), "y": row.g})
            if verbose:
                print(f"fig7: finished series {series}")
    return records


def _figure8(config, verbose):
    T_values = config.transmissions if config else FIG8_T_VALUES
    N_values = config.N_values if config else FIG8_N_VALUES
    eps_fail = config.eps_fail if config else 1e-4
    options = _cloner_options(config)

    records = []
    for N in N_values:
        series = f"N={N}"
        for T in T_values:
            best = optimize_alpha(T, 0.0, N, eps_fail, **options)
            records.append({"figure": "fig8", "series": series, "x": T, "y": best.L_min, "alpha_opt": best.alpha_opt})
        if verbose:
            print(f"fig8: finished series {series}")
    markers = [dict(row, alpha_opt=math.nan) for row in _marker_rows("fig8", _loss(config))]
    return records + markers


def _cloner_options(config):
    if config is None:
        return {}
    return {"cloner_grid_nodes": config.cloner_grid_nodes, "cloner_dim": config.cloner_dim}


def _loss(config):
    return config.loss_db_per_km if config else DEFAULT_LOSS_DB_PER_KM


def figure_data(figure, config=None, output_path=None, verbose=True):
    """
    Plot table for one figure.

    fig6 is L against T per (alpha, xi), fig7 is g against alpha per (T, xi)
    and fig8 is the optimal L (with alpha_opt) against T per alphabet size.
    Without a config the built-in grids are used.

    Args:
        figure (str): "fig6", "fig7" or "fig8"
        config (SweepConfig): Optional grid overrides
        output_path (str): CSV destination, or None
        verbose (bool): Print progress lines

    Returns:
        pandas.DataFrame: Columns figure, series, x, y (plus alpha_opt for fig8)
    """
    builders = {"fig6": _figure6, "fig7": _figure7, "fig8": _figure8}
    if figure not in builders:
        raise ValueError(f"Unknown figure {figure!r}; choose from {', '.join(FIGURES)}")

    records = builders[figure](config, verbose)
    columns = FIGURE_COLUMNS + (["alpha_opt"] if figure == "fig8" else [])
    df = pd.DataFrame(records, columns=columns)

    if output_path:
        _ensure_parent(output_path)
        df.to_csv(output_path, index=False, na_rep="nan")
        if verbose:
            print(f"Saved {figure} data to {output_path}")
    return df


if __name__ == "__main__":
    # Example usage
    config = SweepConfig(T_values=(0.2, 0.5, 0.9), alpha_grid=(0.5, 1.0, 0.25))
    for row in sweep(config):
        print(row)

"""
config.py - Configuration module for the signature security calculator

This module handles configuration settings and provides a simple
interface for reading sweep grids, simulation settings and output locations.
"""

import os
import json

from sweeps import SweepConfig

DEFAULT_CONFIG = {
    "T_values": [0.5],
    "km_values": None,
    "loss_db_per_km": 0.2,
    "xi_values": [0.0],
    "N_values": [4],
    "alpha_grid": {"min": 0.05, "max": 3.0, "step": 0.05},
    "eps_fail": 1e-4,
    "seed": 20180101,
    "trials": 1000,
    "signature_length": 10000,
    "output_directory": "results",
    "cloner_grid_nodes": 40,
    "cloner_dim": None,
    "sending_rate_hz": 1e8,
}


class ConfigError(ValueError):
    """Raised for a missing, unreadable or invalid configuration value."""


class Config:
    """Configuration handler for sweeps and simulation campaigns"""

    def __init__(self, config_file=None):
        """
        Initialize the configuration handler.

        Args:
            config_file (str): Path to the configuration file. If None, uses default path.
        """
        self.config_file = config_file or 'config.json'
        self.config = self._load_config()

    def _load_config(self):
        """Load configuration from file or create a default configuration."""
        if os.path.exists(self.config_file):
            try:
                with open(self.config_file, 'r') as f:
                    loaded = json.load(f)
            except json.JSONDecodeError as e:
                raise ConfigError(f"Invalid JSON in configuration file {self.config_file}: {e}") from e
            if not isinstance(loaded, dict):
                raise ConfigError(f"Configuration file {self.config_file} must hold a JSON object")
            unknown = sorted(set(loaded) - set(DEFAULT_CONFIG))
            if unknown:
                raise ConfigError(f"Unknown configuration keys: {', '.join(unknown)}")
            return {**DEFAULT_CONFIG, **loaded}

        print(f"Configuration file not found: {self.config_file}")
        return self._create_default_config()

    def _create_default_config(self):
        """Create and save a default configuration."""
        default_config = dict(DEFAULT_CONFIG)
        directory = os.path.dirname(os.path.abspath(self.config_file))
        os.makedirs(directory, exist_ok=True)
        with open(self.config_file, 'w') as f:
            json.dump(default_config, f, indent=2)
        print(f"Created default configuration file: {self.config_file}")
        return default_config

    def get(self, key, default=None):
        """
        Get a configuration value.

        Args:
            key (str): The configuration key to retrieve
            default: The default value to return if the key is not found

        Returns:
            The configuration value for the key, or the default value if not found
        """
        value = self.config.get(key)
        return default if value is None else value

    def _number_list(self, key, cast=float):
        values = self.get(key)
        if not isinstance(values, list) or not values:
            raise ConfigError(f"{key} must be a nonempty list")
        try:
            return [cast(v) for v in values]
        except (TypeError, ValueError) as e:
            raise ConfigError(f"{key} holds a non-numeric value: {e}") from e

    def get_T_values(self):
        values = self._number_list("T_values")
        if any(not 0 < T <= 1 for T in values):
            raise ConfigError(f"T_values must lie in (0, 1], got {values}")
        return values

    def get_km_values(self):
        if self.get("km_values") is None:
            return None
        values = self._number_list("km_values")
        if any(km < 0 for km in values):
            raise ConfigError(f"km_values must be nonnegative, got {values}")
        return values

    def get_loss_db_per_km(self):
        loss = float(self.get("loss_db_per_km", 0.2))
        if loss <= 0:
            raise ConfigError(f"loss_db_per_km must be positive, got {loss}")
        return loss

    def get_xi_values(self):
        values = self._number_list("xi_values")
        if any(xi < 0 for xi in values):
            raise ConfigError(f"xi_values must be nonnegative, got {values}")
        return values

    def get_N_values(self):
        values = self._number_list("N_values", cast=int)
        if any(N < 2 or N % 2 for N in values):
            raise ConfigError(f"N_values must be even integers >= 2, got {values}")
        return values

    def get_alpha_grid(self):
        """Return (min, max, step) or the string "optimize"."""
        grid = self.get("alpha_grid")
        if grid == "optimize":
            return grid
        if not isinstance(grid, dict) or set(grid) != {"min", "max", "step"}:
            raise ConfigError('alpha_grid must be "optimize" or an object with min, max and step')
        start, stop, step = float(grid["min"]), float(grid["max"]), float(grid["step"])
        if start <= 0 or stop < start or step <= 0:
            raise ConfigError(f"alpha_grid must be positive and increasing, got {grid}")
        return start, stop, step

    def get_eps_fail(self):
        eps = float(self.get("eps_fail"))
        if not 0 < eps < 1:
            raise ConfigError(f"eps_fail must be in (0, 1), got {eps}")
        return eps

    def get_seed(self):
        return int(self.get("seed"))

    def get_trials(self):
        trials = int(self.get("trials"))
        if trials < 1:
            raise ConfigError(f"trials must be positive, got {trials}")
        return trials

    def get_signature_length(self):
        L = int(self.get("signature_length"))
        if L < 2 or L % 2:
            raise ConfigError(f"signature_length must be even and >= 2, got {L}")
        return L

    def get_cloner_grid_nodes(self):
        nodes = self.get("cloner_grid_nodes")
        if nodes is None:
            return None
        if int(nodes) < 2:
            raise ConfigError(f"cloner_grid_nodes must be at least 2, got {nodes}")
        return int(nodes)

    def get_cloner_dim(self):
        dim = self.get("cloner_dim")
        if dim is None:
            return None
        if int(dim) < 1:
            raise ConfigError(f"cloner_dim must be positive, got {dim}")
        return int(dim)

    def get_sending_rate_hz(self):
        rate = float(self.get("sending_rate_hz"))
        if rate <= 0:
            raise ConfigError(f"sending_rate_hz must be positive, got {rate}")
        return rate

    def get_output_directory(self):
        """Get the output directory for results."""
        output_dir = self.get("output_directory", "results")
        os.makedirs(output_dir, exist_ok=True)
        return output_dir

    def to_sweep_config(self, output_path=None):
        """Freeze the grid settings into a SweepConfig."""
        return SweepConfig(
            T_values=tuple(self.get_T_values()),
            xi_values=tuple(self.get_xi_values()),
            N_values=tuple(self.get_N_values()),
            alpha_grid=self.get_alpha_grid(),
            eps_fail=self.get_eps_fail(),
            output_path=output_path,
            km_values=self.get_km_values(),
            loss_db_per_km=self.get_loss_db_per_km(),
            cloner_grid_nodes=self.get_cloner_grid_nodes(),
            cloner_dim=self.get_cloner_dim(),
        )


if __name__ == "__main__":
    # Example usage
    config = Config()

    print("Configuration:")
    print(f"Transmissions: {config.get_T_values()}")
    print(f"Excess noise: {config.get_xi_values()}")
    print(f"Alphabet sizes: {config.get_N_values()}")
    print(f"Alpha grid: {config.get_alpha_grid()}")
    print(f"eps_fail: {config.get_eps_fail()}")
    print(f"Output Directory: {config.get_output_directory()}")

"""
tests/test_sweeps.py
Pytest unit tests for sweeps.py (fiber mapping, sweeps, CSV round trip, figure tables).

Run with:
    pytest tests/test_sweeps.py -v
    pytest tests/test_sweeps.py -v -m "not slow"
"""
import math

import numpy as np
import pandas as pd
import pytest

from sweeps import (
    COLUMNS,
    SweepConfig,
    SweepRow,
    evaluate_point,
    fiber_km,
    fiber_transmission,
    figure_data,
    read_sweep_csv,
    sweep,
    write_sweep_csv,
)


class TestFiber:

    def test_zero_length(self):
        assert fiber_transmission(0) == 1.0

    def test_twenty_km(self):
        assert fiber_transmission(20) == pytest.approx(10 ** -0.4, rel=1e-12)
        assert fiber_transmission(20) == pytest.approx(0.3981, abs=1e-4)

    def test_fifty_km(self):
        assert fiber_transmission(50) == pytest.approx(0.1, rel=1e-12)

    def test_inverse(self):
        assert fiber_km(fiber_transmission(37.5)) == pytest.approx(37.5, rel=1e-12)

    def test_negative_length_rejected(self):
        with pytest.raises(ValueError, match="nonnegative"):
            fiber_transmission(-1)


class TestSweepConfig:

    def test_empty_list_rejected(self):
        with pytest.raises(ValueError, match="T_values"):
            SweepConfig(T_values=())

    def test_alpha_grid_must_be_positive(self):
        with pytest.raises(ValueError, match="alpha grid"):
            SweepConfig(alpha_grid=(0.0, 1.0, 0.1))

    def test_eps_range(self):
        with pytest.raises(ValueError, match="eps_fail"):
            SweepConfig(eps_fail=1.0)

    def test_km_values_replace_transmissions(self):
        config = SweepConfig(T_values=(0.9,), km_values=(0, 50))
        assert config.transmissions == pytest.approx((1.0, 0.1))


class TestSweep:

    def test_lossless_single_point(self):
        config = SweepConfig(T_values=(1.0,), alpha_grid=(1.0, 1.0, 0.05))
        rows = sweep(config, verbose=False)
        assert len(rows) == 1
        assert rows[0].chi == pytest.approx(0.0, abs=1e-12)
        assert math.isfinite(rows[0].L)

    def test_row_order_is_deterministic(self):
        config = SweepConfig(T_values=(0.4, 0.8), N_values=(2, 4), alpha_grid=(0.5, 1.0, 0.5))
        rows = sweep(config, verbose=False)
        keys = [(r.T, r.N, r.alpha) for r in rows]
        assert keys == [
            (0.4, 2, 0.5), (0.4, 2, 1.0), (0.4, 4, 0.5), (0.4, 4, 1.0),
            (0.8, 2, 0.5), (0.8, 2, 1.0), (0.8, 4, 0.5), (0.8, 4, 1.0),
        ]

    def test_length_falls_with_transmission(self):
        config = SweepConfig(T_values=(0.5, 0.7, 0.9), alpha_grid=(0.75, 0.75, 0.05))
        lengths = [row.L for row in sweep(config, verbose=False)]
        assert lengths[0] > lengths[1] > lengths[2]

    def test_optimize_mode_gives_one_row_per_channel(self):
        config = SweepConfig(T_values=(0.5, 0.9), alpha_grid="optimize")
        rows = sweep(config, verbose=False)
        assert len(rows) == 2
        assert rows[1].alpha > rows[0].alpha

    def test_writes_csv_header(self, tmp_path):
        path = tmp_path / "out" / "sweep.csv"
        sweep(SweepConfig(alpha_grid=(0.5, 0.6, 0.1), output_path=str(path)), verbose=False)
        assert path.read_text().splitlines()[0] == ",".join(COLUMNS)


class TestCsvRoundTrip:

    def test_secure_rows_round_trip_exactly(self, tmp_path):
        rows = [evaluate_point(T, 0.0, 4, alpha, 1e-4) for T in (0.5, 0.9) for alpha in (0.75, 1.0)]
        path = tmp_path / "rows.csv"
        write_sweep_csv(rows, str(path))
        assert read_sweep_csv(str(path)) == rows

    def test_infinite_length_written_as_inf(self, tmp_path):
        row = SweepRow(0.5, 0.0, 4, 0.05, 0.49, 0.0, 0.5, 0.01, math.nan, math.nan, math.inf)
        path = tmp_path / "inf.csv"
        write_sweep_csv([row], str(path))
        assert path.read_text().splitlines()[1].endswith(",inf")
        parsed = read_sweep_csv(str(path))[0]
        assert parsed.L == math.inf
        assert math.isnan(parsed.s_B)
        assert parsed.p_err == 0.49

    def test_header_checked(self, tmp_path):
        path = tmp_path / "bad.csv"
        pd.DataFrame({"a": [1]}).to_csv(path, index=False)
        with pytest.raises(ValueError, match="header"):
            read_sweep_csv(str(path))


class TestFigureData:

    def test_unknown_figure(self):
        with pytest.raises(ValueError, match="Unknown figure"):
            figure_data("fig9", verbose=False)

    def test_fig6_length_falls_with_transmission(self, tmp_path):
        config = SweepConfig(T_values=(0.5, 0.7, 0.9), xi_values=(0.0,), alpha_grid=(0.75, 1.0, 0.25))
        path = tmp_path / "fig6.csv"
        df = figure_data("fig6", config, output_path=str(path), verbose=False)
        assert list(df.columns) == ["figure", "series", "x", "y"]
        for _, series in df[~df.series.str.startswith("marker")].groupby("series"):
            y = series.sort_values("x").y.to_numpy()
            assert np.all(np.diff(y) < 0)
        markers = df[df.series.str.startswith("marker")]
        assert sorted(markers.series) == ["marker_1km", "marker_20km"]
        assert markers.x.max() == pytest.approx(fiber_transmission(1))
        assert path.exists()

    def test_fig7_unimodal_at_reference_transmission(self):
        config = SweepConfig(T_values=(0.61,), xi_values=(0.0,), alpha_grid=(0.05, 3.0, 0.05))
        df = figure_data("fig7", config, verbose=False)
        y = df.sort_values("x").y.to_numpy()
        rising = np.diff(y) > 0
        # once the gap starts falling it never rises again
        first_fall = int(np.argmin(rising))
        assert not rising[first_fall:].any()
        assert 0.5 < df.loc[df.y.idxmax(), "x"] < 0.8

    @pytest.mark.slow
    def test_fig6_excess_noise_lengthens_signatures(self):
        config = SweepConfig(T_values=(0.3, 0.5), xi_values=(0.0, 0.02), alpha_grid=(0.5, 1.0, 0.25))
        df = figure_data("fig6", config, verbose=False)
        for alpha in (0.5, 0.75, 1.0):
            clean = df[df.series == f"alpha={alpha:g},xi=0"].set_index("x").y
            noisy = df[df.series == f"alpha={alpha:g},xi=0.02"].set_index("x").y
            for T in (0.3, 0.5):
                assert noisy[T] > clean[T]

    @pytest.mark.slow
    def test_fig8_alphabet_ordering(self):
        config = SweepConfig(T_values=(0.3, 0.5, 0.9), N_values=(2, 4, 6, 8))
        df = figure_data("fig8", config, verbose=False)
        assert "alpha_opt" in df.columns
        curves = df[~df.series.str.startswith("marker")]
        table = curves.pivot(index="x", columns="series", values="y")
        assert np.all(table["N=2"] > table["N=4"])
        assert np.all(table["N=6"] >= table["N=4"])
        assert np.all(table["N=8"] >= table["N=4"])
        for _, series in curves.groupby("series"):
            alphas = series.sort_values("x").alpha_opt.to_numpy()
            assert np.all(np.diff(alphas) >= 0)

"""Trajectory grids: S₀ quadrature, kinks, convergence order, bundles."""

import numpy as np
import pytest

from trajquad.errors import DegenerateMinimum, InvalidPotential
from trajquad.trajectory import (
    Potential1D,
    build_grid,
    separable_compose,
)


def harmonic(nu2: float = 1.0):
    return Potential1D.from_poly(f"{nu2 / 2}*x^2")


class TestPotential:
    def test_from_poly_derivatives(self):
        pot = Potential1D.from_poly("0.5*x^2 + 0.1*x^4")
        assert pot.v(2.0) == pytest.approx(2.0 + 1.6)
        assert pot.dv(2.0) == pytest.approx(2.0 + 3.2)
        assert pot.d2v(2.0) == pytest.approx(1.0 + 4.8)
        assert pot.derivatives[4](2.0) == pytest.approx(2.4)

    def test_from_callables_requires_derivatives(self):
        with pytest.raises(InvalidPotential):
            Potential1D.from_callables(lambda x: x * x, None, None)

    def test_rejects_non_x_symbols(self):
        with pytest.raises(InvalidPotential):
            Potential1D.from_poly("r^2")


class TestBuildGrid:
    def test_harmonic_action(self):
        grid = build_grid(harmonic(), 3.0, 1201)
        assert np.max(np.abs(grid.s0 - grid.nodes ** 2 / 2)) < 1e-10
        assert np.all(grid.grad2 == 2.0 * np.array(
            [grid.potential.v(x) for x in grid.nodes]))
        assert grid.lap_s0[0] == pytest.approx(1.0)

    def test_negative_potential_rejected(self):
        pot = Potential1D.from_poly("0.5*x^2 - 0.2*x^4")
        with pytest.raises(InvalidPotential):
            build_grid(pot, 3.0, 801)

    def test_degenerate_minimum_rejected(self):
        with pytest.raises(DegenerateMinimum):
            build_grid(Potential1D.from_poly("x^4"), 2.0, 401)
        # DegenerateMinimum is a kind of InvalidPotential
        with pytest.raises(InvalidPotential):
            build_grid(Potential1D.from_poly("x^4"), 2.0, 401)

    def test_double_well_closed_form(self):
        # v = ½(x²-1)², trajectory from the minimum at x = 1 going left:
        # S₀(x) = |x³/3 - x + 2/3| down to the kink at x = -1 where the
        # other hump peaks; past it the inner lobe 4/3 has accumulated
        pot = Potential1D.from_poly("0.5 - x^2 + 0.5*x^4", origin=1.0)
        grid = build_grid(pot, 2.5, 1001, direction=-1)
        x = grid.nodes
        expect = np.where(x >= -1.0,
                          np.abs(x ** 3 / 3 - x + 2.0 / 3.0),
                          4.0 / 3.0 + np.abs(x ** 3 / 3 - x - 2.0 / 3.0))
        assert np.max(np.abs(grid.s0 - expect)) < 1e-9 * max(1, expect.max())
        kink_x = grid.nodes[grid.kinks]
        assert len(grid.kinks) == 1
        assert kink_x[0] == pytest.approx(-1.0, abs=1e-12)

    def test_s0_strictly_increasing(self):
        pot = Potential1D.from_poly("0.5 - x^2 + 0.5*x^4", origin=1.0)
        grid = build_grid(pot, 2.5, 1001, direction=-1)
        assert np.all(np.diff(grid.s0) > 0)

    def test_quadrature_order(self):
        # fixed per-panel rule (no refinement): doubling nodes cuts the
        # S₀ error at least 4x for a smooth quartic with known integral
        # (coarse grids, so the error sits well above the rounding floor)
        from trajquad.numerics import adaptive_integral
        pot = Potential1D.from_poly("0.5*x^2 + x^4")

        def exact(x):
            return adaptive_integral(
                lambda y: np.sqrt(2 * pot.v(y)), 0.0, x, tol=1e-15)

        errs = []
        for n in (17, 33):
            grid = build_grid(pot, 3.0, n, max_refine=0)
            ref = np.array([exact(x) for x in grid.nodes])
            errs.append(np.max(np.abs(grid.s0 - ref)))
        assert errs[0] / errs[1] >= 4.0

    def test_grad_consistency(self):
        # (finite-difference dS₀/da)² = 2v at interior nodes
        from trajquad.numerics import derivative
        pot = Potential1D.from_poly("0.5*x^2 + 0.1*x^4")
        grid = build_grid(pot, 2.5, 2001)
        fd = derivative(grid.s0, grid.arc)
        rel = np.abs(fd[2:-2] ** 2 - grid.grad2[2:-2]) / grid.grad2[2:-2].max()
        assert np.max(rel) < 1e-6

    def test_time_monotone_and_origin_nan(self):
        grid = build_grid(harmonic(), 3.0, 801)
        assert np.isnan(grid.time[0])
        assert np.all(np.diff(grid.time[1:]) > 0)

    def test_time_inf_past_kink(self):
        pot = Potential1D.from_poly("0.5 - x^2 + 0.5*x^4", origin=1.0)
        grid = build_grid(pot, 2.5, 1001, direction=-1)
        k = grid.kinks[0]
        assert np.isinf(grid.time[k])
        assert np.all(np.isinf(grid.time[k:]))
        assert np.all(np.isfinite(grid.time[1:k]))

    def test_csv_roundtrip(self, tmp_path):
        grid = build_grid(harmonic(), 2.0, 101)
        path = tmp_path / "grid.csv"
        grid.to_csv(path)
        rows = path.read_text().strip().splitlines()
        assert rows[0] == "x,s0,grad2,lap_s0,time"
        assert len(rows) == 102

    def test_minimum_node_count(self):
        with pytest.raises(ValueError):
            build_grid(harmonic(), 1.0, 8)


class TestSeparable:
    def test_single_axis_identity(self):
        grid = build_grid(harmonic(), 2.0, 101)
        bundle = separable_compose([grid])
        assert len(bundle) == 1
        assert bundle.axes[0] is grid

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            separable_compose([])

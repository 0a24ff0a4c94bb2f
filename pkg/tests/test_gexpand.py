"""g⁻¹ hierarchy: harmonic exactness, quartic anchors, residuals, separable."""

import numpy as np
import pytest

from trajquad.errors import HierarchyBreakdown
from trajquad.gexpand import (
    assemble_energy,
    e0,
    hierarchy,
    hierarchy_separable,
    pde_residual,
)
from trajquad.trajectory import Potential1D, build_grid, separable_compose


def grid_for(text, x_max=2.5, n=2001, origin=0.0, direction=1):
    return build_grid(Potential1D.from_poly(text, origin=origin), x_max, n,
                      direction=direction)


def quartic_energies(beta, omega=1.0):
    """Exact hierarchy energies for v = ω²x²/2 + βx⁴ (re-graded series)."""
    lam = beta / omega ** 3
    return (omega / 2, 0.75 * lam * omega, -(21 / 8) * lam ** 2 * omega,
            (333 / 16) * lam ** 3 * omega)


class TestLeadingOrder:
    def test_harmonic_e0(self):
        assert e0(grid_for("0.5*x^2", 3.0, 801)) == pytest.approx(0.5)

    def test_scaled_harmonic_e0(self):
        # v = 2x² has v'' = 4, so E₀ = ω/2 = 1
        assert e0(grid_for("2*x^2", 2.0, 801)) == pytest.approx(1.0)

    def test_double_well_about_its_minimum(self):
        # v = ½(x²-1)² about x = 1: v''(1) = 4, E₀ = 1
        grid = grid_for("0.5 - x^2 + 0.5*x^4", x_max=0.8, origin=1.0,
                        direction=-1)
        assert e0(grid) == pytest.approx(1.0)

    def test_order_zero_solution(self):
        sol = hierarchy(grid_for("0.5*x^2 + 0.1*x^4"), 0)
        assert sol.s_terms == [] and len(sol.e_terms) == 1


class TestHarmonic:
    def test_all_corrections_vanish(self):
        sol = hierarchy(grid_for("0.5*x^2", 3.0, 1201), 3)
        assert sol.e_terms[0] == pytest.approx(0.5)
        for e in sol.e_terms[1:]:
            assert abs(e) < 1e-8
        for s in sol.s_terms:
            assert np.max(np.abs(s)) < 1e-8

    def test_assemble_matches_ladder(self):
        sol = hierarchy(grid_for("0.5*x^2", 3.0, 1201), 2)
        assert assemble_energy(sol, 7.0) == pytest.approx(3.5, abs=1e-7)

    def test_assemble_weights(self):
        from trajquad.gexpand import SeriesSolution
        stub = SeriesSolution(grid=None, order=1, e_terms=[0.5, 0.75],
                              s_terms=[])
        assert assemble_energy(stub, 2.0) == pytest.approx(1.75)
        empty = SeriesSolution(grid=None, order=0, e_terms=[], s_terms=[])
        assert assemble_energy(empty, 3.0) == 0.0


class TestQuartic:
    def test_energies_match_exact_coefficients(self):
        sol = hierarchy(grid_for("0.5*x^2 + 0.1*x^4"), 3)
        exact = quartic_energies(0.1)
        assert sol.e_terms[0] == pytest.approx(exact[0], abs=1e-12)
        assert sol.e_terms[1] == pytest.approx(exact[1], abs=1e-9)
        assert sol.e_terms[2] == pytest.approx(exact[2], abs=1e-6)
        assert sol.e_terms[3] == pytest.approx(exact[3], abs=1e-4)

    def test_pde_residuals(self):
        sol = hierarchy(grid_for("0.5*x^2 + 0.1*x^4"), 3)
        for k in (1, 2, 3):
            assert np.max(pde_residual(sol, k)) < 1e-7

    def test_grid_density_independence(self):
        coarse = hierarchy(grid_for("0.5*x^2 + 0.1*x^4", n=1001), 2)
        fine = hierarchy(grid_for("0.5*x^2 + 0.1*x^4", n=2001), 2)
        for ec, ef in zip(coarse.e_terms, fine.e_terms):
            assert abs(ec - ef) < 1e-8

    def test_normalization_at_origin(self):
        sol = hierarchy(grid_for("0.5*x^2 + 0.1*x^4"), 3)
        for s in sol.s_terms:
            assert s[0] == 0.0

    def test_oracle_energy_comparison(self):
        # E(g) - gE₀ - E₁ - E₂/g shrinks like E₃/g²; the next series term
        # contaminates at O(1/g), so extrapolate the scaled residuals
        # linearly in 1/g before comparing with the computed E₃
        from trajquad.oracle import solve_1d
        sol = hierarchy(grid_for("0.5*x^2 + 0.1*x^4"), 3)
        scaled = {}
        for g in (8.0, 16.0):
            pot = lambda x, g=g: g * g * (0.5 * x * x + 0.1 * x ** 4)
            width = 8.0 / np.sqrt(g)
            oracle = solve_1d(pot, (-width, width), 1200, 1).value(0)
            series = g * sol.e_terms[0] + sol.e_terms[1] + sol.e_terms[2] / g
            scaled[g] = (oracle - series) * g * g
        extrap = 2.0 * scaled[16.0] - scaled[8.0]
        assert extrap == pytest.approx(sol.e_terms[3], rel=0.05)


class TestBreakdown:
    def test_kinked_grid_rejected(self):
        pot = Potential1D.from_poly("0.5 - x^2 + 0.5*x^4", origin=1.0)
        grid = build_grid(pot, 2.5, 1001, direction=-1)
        with pytest.raises(HierarchyBreakdown):
            hierarchy(grid, 1)

    def test_order_cap(self):
        with pytest.raises(ValueError):
            hierarchy(grid_for("0.5*x^2", 2.0, 101), 4)


class TestSeparable:
    def test_harmonic_axes_sum(self):
        axes = [grid_for("0.5*x^2", 3.0, 801), grid_for("0.5*x^2", 3.0, 801)]
        combined = hierarchy_separable(separable_compose(axes), 2)
        assert combined.e_terms[0] == pytest.approx(1.0)  # N/2 with N = 2
        assert combined.energy(5.0) == pytest.approx(5.0, abs=1e-7)

    def test_mixed_frequencies(self):
        axes = [grid_for("0.5*x^2", 3.0, 801), grid_for("2*x^2", 2.0, 801)]
        combined = hierarchy_separable(separable_compose(axes), 1)
        assert combined.e_terms[0] == pytest.approx(1.5)  # ν/2 summed

    def test_axiswise_equals_summed_energies(self):
        # separable total E_k is the sum of per-axis E_k by construction;
        # check against independently run axes
        axes = [grid_for("0.5*x^2 + 0.1*x^4"), grid_for("0.5*x^2 + 0.05*x^4")]
        combined = hierarchy_separable(separable_compose(axes), 2)
        singles = [hierarchy(a, 2) for a in axes]
        for k in range(3):
            total = sum(s.e_terms[k] for s in singles)
            assert combined.e_terms[k] == pytest.approx(total, abs=1e-12)

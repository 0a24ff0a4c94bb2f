"""Closed-form recursion for the perturbed Coulomb ground state.

For H = -½∇² - g²/r + εU the exponent S of ψ = e^{-S} and the energy are
expanded in the Coulomb grading

    S = g² S₀ + S₁ + g⁻² S₂ + ... + g^{-(2n-2)} S_n + ...
    E = g⁴ E₀ + g² E₁ + E₂ + ... + g^{-(2n-4)} E_n + ...

with S₀ = r and E₀ = -1/2 on the regular branch.  Each subsequent order
satisfies a first-order radial ODE whose right side K_n is assembled from
lower orders:

    ∂S_n/∂r = K_n - E_n,
    K_n = -½ Σ_{m=1}^{n-1} ∇S_m·∇S_{n-m} + ½ ∇²S_{n-1}
          - δ_{n,1}/r + δ_{n,2} εU.

E_n is fixed by the regularity of the hierarchy: we take the angular
average of the r⁰ coefficient of K_n.  Any constant component left in
∂S_n/∂r would integrate to an r-term whose Laplacian feeds a forbidden
1/r source into the next order (r·cos a alone is harmonic and safe),
so this local rule reproduces the log- and 1/r-based conditions that
fix the energies in the worked examples.  Should it ever fail, the
radial integration raises LogSingularity rather than truncating.

All S_n, E_n are exact polynomials in (r, u = cos a, ε); each order mixes
several ε powers, so comparisons against single-ε results go through
``MultiPoly.coeff_of``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import MethodError
from .exactalg import (
    RADIAL_POLAR,
    VAR_EPS,
    VAR_R,
    VAR_U,
    MultiPoly,
    grad_dot,
)
from .numerics import adaptive_integral

RUE = (VAR_R, VAR_U, VAR_EPS)


@dataclass
class CoulombSolution:
    """Exact S_n and E_n lists in the Coulomb grading.

    ``s_terms[n]`` is S_n over (r, u, ε); ``e_terms[n]`` is E_n over the
    same variables but free of r and u.  S carries the weight g^{-(2n-2)}
    and E the weight g^{-(2n-4)}.
    """

    u_perturbation: MultiPoly
    order: int
    s_terms: list
    e_terms: list
    grading: str = "coulomb"

    def energy_weights(self):
        """(g-power, E_n) pairs for the non-zero energy coefficients."""
        return [(-(2 * n - 4), e) for n, e in enumerate(self.e_terms) if e]

    def wave_exponent_weights(self):
        """(g-power, S_n) pairs for the non-zero exponent terms."""
        return [(-(2 * n - 2), s) for n, s in enumerate(self.s_terms) if s]

    def assemble_energy_symbolic(self) -> str:
        """Rendered energy with explicit g powers, lowest order first."""
        pieces = []
        for power, poly in self.energy_weights():
            body = poly.render()
            if " + " in body or " - " in body[1:]:
                body = f"({body})"
            if power == 0:
                pieces.append(body)
            else:
                pieces.append(f"g^{power} * {body}")
        return " + ".join(pieces) if pieces else "0"

    def epsilon_order(self, n: int, k: int) -> MultiPoly:
        """The ε^k part of S_n (still carrying the ε^k factor)."""
        return _eps_part(self.s_terms[n], k)


def _eps_part(poly: MultiPoly, k: int) -> MultiPoly:
    part = poly.coeff_of(VAR_EPS, k)
    out = MultiPoly.zero(poly.variables)
    eps = MultiPoly.monomial(1, {VAR_EPS: k}, poly.variables)
    return out + part * eps


def _half(poly: MultiPoly) -> MultiPoly:
    return MultiPoly.const(Fraction(1, 2), poly.variables) * poly


def solve_perturbed(u_poly: MultiPoly, order: int) -> CoulombSolution:
    """Run the radial recursion for a polynomial perturbation U(r, u).

    U must vanish at r = 0 (no constant shift and no bare angular term).
    """
    u_poly = u_poly.embedded(RUE)
    if u_poly.min_degree(VAR_R) < 1 and u_poly:
        raise ValueError("perturbation must vanish at the origin")
    s_terms = [MultiPoly.var(VAR_R, RUE)]
    e_terms = [MultiPoly.const(Fraction(-1, 2), RUE)]
    eps = MultiPoly.var(VAR_EPS, RUE)
    for n in range(1, order + 1):
        k_n = _half(s_terms[n - 1].laplacian(RADIAL_POLAR))
        for m in range(1, n):
            k_n = k_n - _half(grad_dot(s_terms[m], s_terms[n - m], RADIAL_POLAR))
        if n == 1:
            k_n = k_n - MultiPoly.monomial(1, {VAR_R: -1}, RUE)
        if n == 2:
            k_n = k_n + eps * u_poly
        e_n = k_n.coeff_of(VAR_R, 0).angular_average()
        s_n = (k_n - e_n).integrate_r()
        s_terms.append(s_n)
        e_terms.append(e_n)
    sol = CoulombSolution(u_perturbation=u_poly, order=order,
                          s_terms=s_terms, e_terms=e_terms)
    _check_invariants(sol)
    return sol


def solve_isotropic(u_poly: MultiPoly, order: int) -> CoulombSolution:
    """Recursion for a radial perturbation U(r); rejects angular content."""
    u_poly = u_poly.embedded(RUE)
    if u_poly.depends_on(VAR_U):
        raise ValueError("isotropic perturbation must not depend on u")
    return solve_perturbed(u_poly, order)


def solve_stark(order: int) -> CoulombSolution:
    """Recursion for the uniform-field perturbation U = r·cos a."""
    if order < 2:
        raise ValueError("the Stark chain starts contributing at order 2")
    return solve_perturbed(MultiPoly.monomial(1, {VAR_R: 1, VAR_U: 1}, RUE), order)


def _check_invariants(sol: CoulombSolution) -> None:
    for n, s_n in enumerate(sol.s_terms):
        if s_n and s_n.min_degree(VAR_R) < 1:
            raise MethodError(f"S_{n} does not vanish at the origin")
        if n >= 1 and s_n.coeff_of(VAR_R, 1).angular_average():
            raise MethodError(f"S_{n} keeps a radially-constant slope at r=0")
    for n, e_n in enumerate(sol.e_terms):
        if e_n.depends_on(VAR_R) or e_n.depends_on(VAR_U):
            raise MethodError(f"E_{n} is not a pure ε-polynomial")


def defining_residuals(sol: CoulombSolution) -> list:
    """Exact residual of every retained grade of the full wave equation.

    Substituting the graded expansions into -½(∇S)² + ½∇²S - g²/r + εU = E
    and collecting the coefficient of g^(4-2n) gives, for each n ≤ order,

        -½ Σ_{m+k=n} ∇S_m·∇S_k + ½∇²S_{n-1} - δ_{n,1}/r + δ_{n,2} εU - E_n

    which must vanish identically.  Grades beyond the truncation involve
    dropped S_n and are not asserted.
    """
    eps = MultiPoly.var(VAR_EPS, RUE)
    residuals = []
    for n in range(sol.order + 1):
        total = MultiPoly.zero(RUE)
        for m in range(n + 1):
            total = total - _half(grad_dot(sol.s_terms[m], sol.s_terms[n - m],
                                           RADIAL_POLAR))
        if n >= 1:
            total = total + _half(sol.s_terms[n - 1].laplacian(RADIAL_POLAR))
        if n == 1:
            total = total - MultiPoly.monomial(1, {VAR_R: -1}, RUE)
        if n == 2:
            total = total + eps * sol.u_perturbation
        residuals.append(total - sol.e_terms[n])
    return residuals


def assemble(sol: CoulombSolution, g: float, eps: float, truncation: int | None = None):
    """Numeric energy and wave-exponent evaluator at given g, ε.

    E = Σ g^{-(2n-4)} E_n(ε); S(r, u) = Σ g^{-(2n-2)} S_n(r, u, ε).
    """
    if g <= 0:
        raise ValueError("g must be positive")
    n_max = sol.order if truncation is None else min(truncation, sol.order)
    energy = sum(g ** (-(2 * n - 4)) * sol.e_terms[n].evaluate({VAR_EPS: eps})
                 for n in range(n_max + 1))

    def exponent(r: float, u: float = 0.0) -> float:
        return sum(g ** (-(2 * n - 2)) *
                   sol.s_terms[n].evaluate({VAR_R: r, VAR_U: u, VAR_EPS: eps})
                   for n in range(n_max + 1))

    return {"E": energy, "S": exponent}


@dataclass(frozen=True)
class ShiftCheck:
    """Integral-form energy estimate and its first two ε-coefficients."""

    energy: float
    first_order: float
    second_order: float


def integral_shift_check(sol: CoulombSolution, g: float, eps: float) -> ShiftCheck:
    """Cross-check the isotropic series against the integral shift formula.

    With ψ ≈ e^{-g²r}(1 - εA(r)), A the complete ε-linear part of S, the
    ground-state shift is the ratio of radial quadratures

        ΔE(ε) = ∫ e^{-2g²r}(1-εA) εU r² dr / ∫ e^{-2g²r}(1-εA) r² dr

    whose ε and ε² Taylor coefficients must reproduce the recursion's
    energies (first-order wave function → second-order energy).
    """
    if sol.u_perturbation.depends_on(VAR_U):
        raise ValueError("integral check is for isotropic perturbations")
    if sol.order < 3:
        raise ValueError("need the full ε-linear wave function (order >= 3)")

    def a_profile(r: float) -> float:
        total = 0.0
        for n in range(1, sol.order + 1):
            part = sol.s_terms[n].coeff_of(VAR_EPS, 1)
            if part:
                total += g ** (-(2 * n - 2)) * part.evaluate({VAR_R: r, VAR_U: 0.0})
        return total

    def u_of(r: float) -> float:
        return sol.u_perturbation.evaluate({VAR_R: r, VAR_U: 0.0, VAR_EPS: 1.0})

    r_cut = 40.0 / g ** 2
    weight = lambda r: math.exp(-2.0 * g ** 2 * r) * r ** 2
    d0 = adaptive_integral(weight, 0.0, r_cut)
    d1 = adaptive_integral(lambda r: weight(r) * a_profile(r), 0.0, r_cut)
    n0 = adaptive_integral(lambda r: weight(r) * u_of(r), 0.0, r_cut)
    n1 = adaptive_integral(lambda r: weight(r) * u_of(r) * a_profile(r), 0.0, r_cut)
    first = n0 / d0
    second = n0 * d1 / d0 ** 2 - n1 / d0
    energy = -0.5 * g ** 4 + (eps * n0 - eps ** 2 * n1) / (d0 - eps * d1)
    return ShiftCheck(energy=energy, first_order=first, second_order=second)

"""Exact ε-series for the harmonic oscillator with a monomial perturbation.

The unperturbed Hamiltonian is H = -½ d²/dx² + g²x²/2 with ground state
e^{-gx²/2}; the perturbation is ε·x^(2p) (even) or ε·x^(2p+1) (odd).  The
perturbed ground state is written e^{-gx²/2-τ} and e^{-τ} is expanded in
monomials whose coefficients, together with the energy shift, satisfy a
triangular recursion built from two exact rational tables:

    Γ_mn  : action of the resolvent chain on even powers; zero for m > n
            and for m = 0, otherwise ∏_{j=m+1}^{n}(2j-1) / (m·(2g)^(n-m+1)).
    γ_mn  : the odd-power analogue, (n!/m!) / ((2m+1)·g^(n-m+1)) for m ≤ n.

Everything is exact: entries are polynomials in ĝ = 1/g over ℚ, and the
series is solved order by order in ε with no truncation other than the
requested order.  The energy shift obeys εΔ = -a₁ (even) and εΔ = -b₂
(odd); odd perturbations shift the energy only at even ε-orders.

``operator_chain_even``/``operator_chain_odd`` re-derive the table action
by explicitly iterating the single-integral operator and -½ d²/dx² on
monomials, which is how the tables are verified independently.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .exactalg import VAR_EPS, VAR_GHAT, VAR_X, MultiPoly

_G = (VAR_GHAT,)
_XG = (VAR_X, VAR_GHAT)
_EG = (VAR_EPS, VAR_GHAT)


def _ghat_power(coeff: Fraction, power: int) -> MultiPoly:
    return MultiPoly.monomial(coeff, {VAR_GHAT: power}, _G)


def gamma_even(m: int, n: int) -> MultiPoly:
    """Even-power table entry Γ_mn as a polynomial in ĝ."""
    if m < 0 or n < 0:
        raise ValueError("table indices must be non-negative")
    if m == 0 or m > n:
        return MultiPoly.zero(_G)
    num = Fraction(1)
    for j in range(m + 1, n + 1):
        num *= 2 * j - 1
    coeff = num / (m * Fraction(2) ** (n - m + 1))
    return _ghat_power(coeff, n - m + 1)


def gamma_odd(m: int, n: int) -> MultiPoly:
    """Odd-power table entry γ_mn as a polynomial in ĝ."""
    if m < 0 or n < 0:
        raise ValueError("table indices must be non-negative")
    if m > n:
        return MultiPoly.zero(_G)
    num = Fraction(1)
    for j in range(m + 1, n + 1):
        num *= j
    coeff = num / (2 * m + 1)
    return _ghat_power(coeff, n - m + 1)


@dataclass(frozen=True)
class GammaTable:
    """Memoized view of one table; built once, never mutated afterwards."""

    kind: str  # "even" or "odd"
    max_n: int
    entries: dict = field(default_factory=dict)

    def __post_init__(self):
        fn = gamma_even if self.kind == "even" else gamma_odd
        for n in range(self.max_n + 1):
            for m in range(self.max_n + 1):
                self.entries[(m, n)] = fn(m, n)

    def value(self, m: int, n: int) -> MultiPoly:
        entry = self.entries.get((m, n))
        if entry is None:
            entry = (gamma_even if self.kind == "even" else gamma_odd)(m, n)
        return entry


@dataclass
class PerturbSeries:
    """Exact ε-series: energy shifts Δ(k) and e^{-τ} monomial coefficients.

    ``delta[k-1]`` is Δ(k) as a polynomial in ĝ, with the full shift
    εΔ = Σ_k ε^k Δ(k).  ``coeffs[k-1]`` maps a monomial power to its
    ε^k coefficient: for even parity the key n stands for x^(2n), for
    odd parity the key is the x-power itself.
    """

    parity: str
    p: int
    order: int
    delta: list
    coeffs: list

    def delta_value(self, k: int, g: float) -> float:
        return self.delta[k - 1].evaluate({VAR_GHAT: 1.0 / g})

    def shift_value(self, eps: float, g: float, order: int | None = None) -> float:
        """Numeric εΔ truncated at the given ε-order."""
        order = self.order if order is None else order
        ginv = 1.0 / g
        return sum(self.delta[k - 1].evaluate({VAR_GHAT: ginv}) * eps ** k
                   for k in range(1, order + 1))

    def total_energy(self, eps: float, g: float, order: int | None = None) -> float:
        """Ground energy g/2 plus the truncated shift."""
        return 0.5 * g + self.shift_value(eps, g, order)

    def shift_polynomial(self) -> MultiPoly:
        """εΔ as an exact polynomial in (ε, ĝ)."""
        total = MultiPoly.zero(_EG)
        for k, d in enumerate(self.delta, start=1):
            total = total + d.embedded(_EG) * MultiPoly.monomial(1, {VAR_EPS: k}, _EG)
        return total

    def exp_minus_tau_coeff(self, power: int) -> MultiPoly:
        """Coefficient of x^power in e^{-τ}, exact in (ε, ĝ)."""
        total = MultiPoly.zero(_EG)
        for k, table in enumerate(self.coeffs, start=1):
            key = power // 2 if self.parity == "even" else power
            if self.parity == "even" and power % 2 == 1:
                return total
            entry = table.get(key)
            if entry is not None:
                total = total + entry.embedded(_EG) * \
                    MultiPoly.monomial(1, {VAR_EPS: k}, _EG)
        return total


def _zero() -> MultiPoly:
    return MultiPoly.zero(_G)


def solve_even(p: int, order: int) -> PerturbSeries:
    """Series for ε·x^(2p): exact Δ(k) and a_n(k) for k ≤ order.

    At each ε-order the unknowns follow by direct substitution from lower
    orders because Γ_mn vanishes for m > n, and Δ(k) = -a₁(k).
    """
    if p < 1:
        raise ValueError("even perturbation needs p >= 1")
    if order < 0:
        raise ValueError("order must be non-negative")
    table = GammaTable("even", max_n=(order + 1) * (p + 1) + 1)
    a: list[dict[int, MultiPoly]] = []   # a[k-1][n]
    delta: list[MultiPoly] = []          # delta[k-1]
    for k in range(1, order + 1):
        new: dict[int, MultiPoly] = {}
        if k == 1:
            for n in range(1, p + 1):
                entry = -table.value(n, p)
                if entry:
                    new[n] = entry
        else:
            prev = a[k - 2]
            for l, a_prev in prev.items():
                for n in range(1, l + p + 1):
                    g_entry = table.value(n, l + p)
                    if g_entry:
                        new[n] = new.get(n, _zero()) - a_prev * g_entry
            for i in range(1, k):
                j = k - i
                if j < 1 or j > len(delta):
                    continue
                for l, a_i in a[i - 1].items():
                    for n in range(1, l + 1):
                        g_entry = table.value(n, l)
                        if g_entry:
                            new[n] = new.get(n, _zero()) + a_i * delta[j - 1] * g_entry
        new = {n: v for n, v in new.items() if v}
        assert all(n <= k * p for n in new), "even support bound violated"
        a.append(new)
        delta.append(-new.get(1, _zero()))
    return PerturbSeries(parity="even", p=p, order=order, delta=delta, coeffs=a)


def solve_odd(p: int, order: int) -> PerturbSeries:
    """Series for ε·x^(2p+1): exact Δ(k) and b_n(k) for k ≤ order.

    Odd ε-orders populate odd monomials only and even orders even ones,
    so every Δ(odd k) vanishes identically; Δ(k) = -b₂(k).
    """
    if p < 0:
        raise ValueError("odd perturbation needs p >= 0")
    if order < 0:
        raise ValueError("order must be non-negative")
    even_table = GammaTable("even", max_n=(order + 1) * (2 * p + 2))
    odd_table = GammaTable("odd", max_n=(order + 1) * (2 * p + 2))
    b: list[dict[int, MultiPoly]] = []   # b[k-1][x-power]
    delta: list[MultiPoly] = []
    for k in range(1, order + 1):
        new: dict[int, MultiPoly] = {}
        if k == 1:
            for m in range(0, p + 1):
                entry = -odd_table.value(m, p)
                if entry:
                    new[2 * m + 1] = entry
        elif k % 2 == 0:
            prev = b[k - 2]
            for power, b_prev in prev.items():
                l = (power - 1) // 2
                for m in range(1, l + p + 2):
                    g_entry = even_table.value(m, l + p + 1)
                    if g_entry:
                        new[2 * m] = new.get(2 * m, _zero()) - b_prev * g_entry
            for i in range(2, k - 1, 2):
                j = k - i
                for power, b_i in b[i - 1].items():
                    l = power // 2
                    for m in range(1, l + 1):
                        g_entry = even_table.value(m, l)
                        if g_entry:
                            new[2 * m] = new.get(2 * m, _zero()) + \
                                b_i * delta[j - 1] * g_entry
        else:
            prev = b[k - 2]
            for power, b_prev in prev.items():
                l = power // 2
                for m in range(0, l + p + 1):
                    g_entry = odd_table.value(m, l + p)
                    if g_entry:
                        new[2 * m + 1] = new.get(2 * m + 1, _zero()) - b_prev * g_entry
            for i in range(1, k, 2):
                j = k - i
                if j % 2 == 1 or j < 2:
                    continue
                for power, b_i in b[i - 1].items():
                    l = (power - 1) // 2
                    for m in range(0, l + 1):
                        g_entry = odd_table.value(m, l)
                        if g_entry:
                            new[2 * m + 1] = new.get(2 * m + 1, _zero()) + \
                                b_i * delta[j - 1] * g_entry
        new = {n: v for n, v in new.items() if v}
        assert all(n <= k * (2 * p + 1) for n in new), "odd support bound violated"
        assert all(n % 2 == k % 2 for n in new), "parity structure violated"
        b.append(new)
        if k % 2 == 0:
            delta.append(-new.get(2, _zero()))
        else:
            delta.append(_zero())
    return PerturbSeries(parity="odd", p=p, order=order, delta=delta, coeffs=b)


# --------------------------------------------------------------------------
# Independent verification chain: apply C and T = -½ d²/dx² explicitly.


def _apply_c(poly: MultiPoly) -> tuple[MultiPoly, MultiPoly]:
    """Single-integral operator on a polynomial in (x, ĝ).

    Cx^k = ĝ x^k / k for k ≥ 1.  A bare constant cannot pass through C
    (the integral diverges at the origin), so the x-free part is split
    off and returned as the second element, a polynomial in ĝ.
    """
    poly = poly.embedded(_XG)
    out: dict[tuple[int, int], Fraction] = {}
    blocked = MultiPoly.zero(_G)
    for (kx, kg), coeff in poly.terms.items():
        if kx == 0:
            blocked = blocked + _ghat_power(coeff, kg)
        else:
            out[(kx, kg + 1)] = out.get((kx, kg + 1), Fraction(0)) + coeff / kx
    return MultiPoly(out, _XG), blocked


def _kinetic(poly: MultiPoly) -> MultiPoly:
    """T = -½ d²/dx² on a polynomial in (x, ĝ)."""
    second = poly.differentiate(VAR_X).differentiate(VAR_X)
    return MultiPoly.const(Fraction(-1, 2), _XG) * second


def operator_chain_even(n: int, max_steps: int = 200):
    """Iterate (-CT)^m C on x^(2n); return (chain sum, subtraction constant).

    Each application lowers the power by two; after the x² stage the
    operand handed to C is a bare constant, which must be subtracted from
    the original source for the resolvent to act at all.  That constant is
    returned as a polynomial in ĝ alongside the summed polynomial part.
    """
    cur, blocked = _apply_c(MultiPoly.monomial(1, {VAR_X: 2 * n}, _XG))
    assert not blocked
    total = cur
    for _ in range(max_steps):
        candidate = -_kinetic(cur)
        cur, blocked = _apply_c(candidate)
        if blocked:
            assert not cur, "constant appeared before the chain terminated"
            return total, blocked
        if not cur:
            return total, MultiPoly.zero(_G)
        total = total + cur
    raise RuntimeError("operator chain failed to terminate")


def operator_chain_odd(n: int, max_steps: int = 200) -> MultiPoly:
    """Iterate (-CT)^m C on x^(2n+1); odd chains terminate without leftovers."""
    cur, blocked = _apply_c(MultiPoly.monomial(1, {VAR_X: 2 * n + 1}, _XG))
    assert not blocked
    total = cur
    for _ in range(max_steps):
        cur, blocked = _apply_c(-_kinetic(cur))
        assert not blocked, "odd chain produced a constant"
        if not cur:
            return total
        total = total + cur
    raise RuntimeError("operator chain failed to terminate")

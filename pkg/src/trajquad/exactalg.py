"""Exact rational scalars and sparse multivariate Laurent polynomials.

Every symbolic recursion in the package runs on these objects: coefficients
are arbitrary-precision rationals (``fractions.Fraction``), monomials are
exponent tuples over a named, canonically ordered variable list.  Negative
exponents are permitted only for the radial variable ``r``; the perturbation
strength ``ε`` and the inverse-scale marker ``ĝ`` (which stands for 1/g)
never carry negative powers.

Besides ring arithmetic the module provides the differential-geometric
operators the recursions need: partial derivatives, the Laplacian and
gradient dot product in 1-D Cartesian and radial-polar (r, u = cos a)
geometry, the angular average (1/2)∫_{-1}^{1} du, and the radial
antiderivative with zero constant.

A canonical text rendering ("-21/8 * ε^2 * ĝ^5") and a round-trip parser
for the same grammar serve the CLI and the golden tests.  Terms are ordered
graded-lexicographically: by total degree, then by exponents in the fixed
variable order x < r < u < ε < ĝ (other symbols sort after these by name).
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import LogSingularity, VariableMismatch

Rational = Fraction

VAR_X = "x"
VAR_R = "r"
VAR_U = "u"
VAR_EPS = "ε"
VAR_GHAT = "ĝ"

# Collation order for the core alphabet; unknown symbols sort after by name.
_CORE_ORDER = {VAR_X: 0, VAR_R: 1, VAR_U: 2, VAR_EPS: 3, VAR_GHAT: 4}

# Input aliases accepted by the parser for the non-ASCII symbols.
_ALIASES = {"eps": VAR_EPS, "epsilon": VAR_EPS, "ghat": VAR_GHAT, "ginv": VAR_GHAT}

# Only r may carry negative (Laurent) exponents.
_LAURENT_OK = frozenset({VAR_R})

CARTESIAN_1D = "cartesian-1d"
RADIAL_POLAR = "radial-polar"


def _var_key(name: str) -> tuple[int, str]:
    return (_CORE_ORDER.get(name, len(_CORE_ORDER)), name)


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"exact coefficient expected, got {type(value).__name__}")


class MultiPoly:
    """Sparse multivariate Laurent polynomial over the rationals.

    ``terms`` maps exponent tuples (one signed integer per variable) to
    nonzero Fraction coefficients; ``variables`` is the canonically sorted
    name tuple.  Instances are value-like: no method mutates ``self``.
    """

    __slots__ = ("variables", "terms")

    def __init__(self, terms: Mapping[tuple[int, ...], Fraction] | None = None,
                 variables: Iterable[str] = ()):
        names = tuple(variables)
        if len(set(names)) != len(names):
            raise VariableMismatch(f"duplicate variable in {names!r}")
        order = sorted(range(len(names)), key=lambda i: _var_key(names[i]))
        self.variables = tuple(names[i] for i in order)
        store: dict[tuple[int, ...], Fraction] = {}
        for exps, coeff in (terms or {}).items():
            coeff = _as_fraction(coeff)
            if coeff == 0:
                continue
            if len(exps) != len(names):
                raise VariableMismatch(
                    f"exponent tuple {exps!r} does not match variables {names!r}")
            exps = tuple(int(exps[i]) for i in order)
            for name, e in zip(self.variables, exps):
                if e < 0 and name not in _LAURENT_OK:
                    raise VariableMismatch(
                        f"negative exponent on non-Laurent variable {name!r}")
            store[exps] = store.get(exps, Fraction(0)) + coeff
        self.terms = {e: c for e, c in store.items() if c != 0}

    # ---------------------------------------------------------------- build

    @classmethod
    def zero(cls, variables: Iterable[str] = ()) -> "MultiPoly":
        return cls({}, variables)

    @classmethod
    def const(cls, value, variables: Iterable[str] = ()) -> "MultiPoly":
        names = tuple(variables)
        return cls({(0,) * len(names): _as_fraction(value)}, names)

    @classmethod
    def var(cls, name: str, variables: Iterable[str] | None = None) -> "MultiPoly":
        names = tuple(variables) if variables is not None else (name,)
        if name not in names:
            raise VariableMismatch(f"{name!r} not among variables {names!r}")
        exps = tuple(1 if v == name else 0 for v in names)
        return cls({exps: Fraction(1)}, names)

    @classmethod
    def monomial(cls, coeff, powers: Mapping[str, int],
                 variables: Iterable[str] | None = None) -> "MultiPoly":
        names = tuple(variables) if variables is not None else tuple(powers)
        exps = tuple(powers.get(v, 0) for v in names)
        return cls({exps: _as_fraction(coeff)}, names)

    # ------------------------------------------------------------ alignment

    def embedded(self, variables: Iterable[str]) -> "MultiPoly":
        """Re-express over a superset of the current variables."""
        names = tuple(variables)
        if set(self.variables) - set(names):
            raise VariableMismatch(
                f"cannot embed {self.variables!r} into {names!r}")
        pos = {v: i for i, v in enumerate(names)}
        new_terms: dict[tuple[int, ...], Fraction] = {}
        for exps, coeff in self.terms.items():
            row = [0] * len(names)
            for v, e in zip(self.variables, exps):
                row[pos[v]] = e
            new_terms[tuple(row)] = coeff
        return MultiPoly(new_terms, names)

    @staticmethod
    def _aligned(a: "MultiPoly", b: "MultiPoly"):
        if a.variables == b.variables:
            return a, b
        sa, sb = set(a.variables), set(b.variables)
        if sa <= sb:
            return a.embedded(b.variables), b
        if sb <= sa:
            return a, b.embedded(a.variables)
        raise VariableMismatch(
            f"incompatible variable sets {a.variables!r} and {b.variables!r}")

    # ----------------------------------------------------------- arithmetic

    def _coerced(self, other) -> "MultiPoly | None":
        if isinstance(other, MultiPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return MultiPoly.const(other, self.variables)
        return None

    def __add__(self, other):
        rhs = self._coerced(other)
        if rhs is None:
            return NotImplemented
        a, b = self._aligned(self, rhs)
        out = dict(a.terms)
        for exps, coeff in b.terms.items():
            out[exps] = out.get(exps, Fraction(0)) + coeff
        return MultiPoly(out, a.variables)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly({e: -c for e, c in self.terms.items()}, self.variables)

    def __sub__(self, other):
        rhs = self._coerced(other)
        if rhs is None:
            return NotImplemented
        return self + (-rhs)

    def __rsub__(self, other):
        rhs = self._coerced(other)
        if rhs is None:
            return NotImplemented
        return rhs + (-self)

    def __mul__(self, other):
        rhs = self._coerced(other)
        if rhs is None:
            return NotImplemented
        a, b = self._aligned(self, rhs)
        out: dict[tuple[int, ...], Fraction] = {}
        for ea, ca in a.terms.items():
            for eb, cb in b.terms.items():
                key = tuple(i + j for i, j in zip(ea, eb))
                out[key] = out.get(key, Fraction(0)) + ca * cb
        return MultiPoly(out, a.variables)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial powers must be non-negative integers")
        result = MultiPoly.const(1, self.variables)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __eq__(self, other):
        rhs = self._coerced(other)
        if rhs is None:
            return NotImplemented
        try:
            a, b = self._aligned(self, rhs)
        except VariableMismatch:
            return False
        return a.terms == b.terms

    def __hash__(self):
        return hash((self.variables, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    # -------------------------------------------------------------- queries

    def degree(self, var: str) -> int:
        """Highest exponent of ``var`` (0 for the zero polynomial)."""
        i = self._index(var)
        return max((e[i] for e in self.terms), default=0)

    def min_degree(self, var: str) -> int:
        i = self._index(var)
        return min((e[i] for e in self.terms), default=0)

    def coeff_of(self, var: str, power: int) -> "MultiPoly":
        """Polynomial coefficient of var**power, over the same variables."""
        i = self._index(var)
        kept = {}
        for exps, coeff in self.terms.items():
            if exps[i] == power:
                key = exps[:i] + (0,) + exps[i + 1:]
                kept[key] = kept.get(key, Fraction(0)) + coeff
        return MultiPoly(kept, self.variables)

    def constant(self) -> Fraction:
        """The constant term (all exponents zero)."""
        return self.terms.get((0,) * len(self.variables), Fraction(0))

    def depends_on(self, var: str) -> bool:
        if var not in self.variables:
            return False
        i = self._index(var)
        return any(e[i] != 0 for e in self.terms)

    def _index(self, var: str) -> int:
        try:
            return self.variables.index(var)
        except ValueError:
            raise VariableMismatch(
                f"{var!r} not among variables {self.variables!r}") from None

    # -------------------------------------------------------------- calculus

    def differentiate(self, var: str) -> "MultiPoly":
        """Exact termwise partial derivative (Laurent rule included)."""
        if var not in self.variables:
            return MultiPoly.zero(self.variables)
        i = self._index(var)
        out: dict[tuple[int, ...], Fraction] = {}
        for exps, coeff in self.terms.items():
            k = exps[i]
            if k == 0:
                continue
            key = exps[:i] + (k - 1,) + exps[i + 1:]
            out[key] = out.get(key, Fraction(0)) + coeff * k
        return MultiPoly(out, self.variables)

    def shifted(self, var: str, delta: int) -> "MultiPoly":
        """Multiply by var**delta through an exponent shift."""
        i = self._index(var)
        out = {}
        for exps, coeff in self.terms.items():
            key = exps[:i] + (exps[i] + delta,) + exps[i + 1:]
            out[key] = coeff
        return MultiPoly(out, self.variables)

    def integrate_r(self) -> "MultiPoly":
        """Radial antiderivative with zero integration constant.

        Raises LogSingularity when an r^-1 term is present; the message
        names that term's angular coefficient, since its appearance means
        the energy-coefficient rule failed upstream.
        """
        i = self._index(VAR_R)
        bad = self.coeff_of(VAR_R, -1)
        if bad:
            raise LogSingularity(
                f"r^-1 source with angular coefficient {bad.render()}")
        out = {}
        for exps, coeff in self.terms.items():
            k = exps[i]
            key = exps[:i] + (k + 1,) + exps[i + 1:]
            out[key] = coeff / (k + 1)
        return MultiPoly(out, self.variables)

    def laplacian(self, geometry: str) -> "MultiPoly":
        """Exact Laplacian in the named geometry.

        cartesian-1d: d²/dx².  radial-polar (r, u = cos a):
        (1/r²) ∂_r(r² ∂_r ·) + (1/r²) ∂_u((1-u²) ∂_u ·).
        """
        if geometry == CARTESIAN_1D:
            return self.differentiate(VAR_X).differentiate(VAR_X)
        if geometry == RADIAL_POLAR:
            poly = self
            if VAR_R not in poly.variables:
                poly = poly.embedded(tuple(poly.variables) + (VAR_R,))
            radial = (poly.differentiate(VAR_R).shifted(VAR_R, 2)
                      .differentiate(VAR_R).shifted(VAR_R, -2))
            if VAR_U in poly.variables:
                du = poly.differentiate(VAR_U)
                one_minus_u2 = MultiPoly.const(1, poly.variables) - \
                    MultiPoly.var(VAR_U, poly.variables) ** 2
                angular = (one_minus_u2 * du).differentiate(VAR_U).shifted(VAR_R, -2)
            else:
                angular = MultiPoly.zero(poly.variables)
            return radial + angular
        raise ValueError(f"unknown geometry {geometry!r}")

    def angular_average(self) -> "MultiPoly":
        """(1/2)∫_{-1}^{1} · du, exact; the result is free of u."""
        if VAR_U not in self.variables:
            return self
        i = self._index(VAR_U)
        out: dict[tuple[int, ...], Fraction] = {}
        for exps, coeff in self.terms.items():
            k = exps[i]
            if k % 2 == 1:
                continue
            key = exps[:i] + (0,) + exps[i + 1:]
            out[key] = out.get(key, Fraction(0)) + coeff / (k + 1)
        return MultiPoly(out, self.variables)

    # ------------------------------------------------------------ evaluation

    def substitute(self, var: str, value) -> "MultiPoly":
        """Exact substitution of a rational value for one variable."""
        value = _as_fraction(value)
        if var not in self.variables:
            return self
        i = self._index(var)
        out: dict[tuple[int, ...], Fraction] = {}
        for exps, coeff in self.terms.items():
            k = exps[i]
            if k < 0 and value == 0:
                raise ZeroDivisionError(f"substituting 0 for {var!r} with exponent {k}")
            factor = value ** k
            key = exps[:i] + (0,) + exps[i + 1:]
            out[key] = out.get(key, Fraction(0)) + coeff * factor
        return MultiPoly(out, self.variables)

    def evaluate(self, assignments: Mapping[str, float]) -> float:
        """Floating-point evaluation; every variable must be assigned."""
        missing = [v for v in self.variables if v not in assignments and self.depends_on(v)]
        if missing:
            raise VariableMismatch(f"no value supplied for {missing!r}")
        total = 0.0
        for exps, coeff in self.terms.items():
            term = float(coeff)
            for v, k in zip(self.variables, exps):
                if k:
                    term *= float(assignments[v]) ** k
            total += term
        return total

    # ------------------------------------------------------------- rendering

    def _sorted_terms(self):
        return sorted(self.terms.items(), key=lambda item: (sum(item[0]), item[0]))

    def render(self) -> str:
        """Canonical text form, e.g. ``-21/8 * ε^2 * ĝ^5``."""
        if not self.terms:
            return "0"
        pieces = []
        for exps, coeff in self._sorted_terms():
            factors = []
            for v, k in zip(self.variables, exps):
                if k == 0:
                    continue
                factors.append(v if k == 1 else f"{v}^{k}")
            mag = abs(coeff)
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = " * ".join(factors)
            else:
                body = " * ".join([str(mag)] + factors)
            pieces.append((coeff < 0, body))
        first_neg, first_body = pieces[0]
        text = ("-" if first_neg else "") + first_body
        for neg, body in pieces[1:]:
            text += (" - " if neg else " + ") + body
        return text

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"MultiPoly({self.render()!r})"


def poly_arith(a: MultiPoly, b: MultiPoly, op: str) -> MultiPoly:
    """Named arithmetic entry point: op is one of add, sub, mul."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def differentiate(p: MultiPoly, var: str) -> MultiPoly:
    return p.differentiate(var)


def laplacian(p: MultiPoly, geometry: str) -> MultiPoly:
    return p.laplacian(geometry)


def grad_dot(a: MultiPoly, b: MultiPoly, geometry: str) -> MultiPoly:
    """Exact ∇a·∇b in the named geometry.

    radial-polar: ∂_r a ∂_r b + (1-u²) r^-2 ∂_u a ∂_u b.
    """
    if geometry == CARTESIAN_1D:
        return a.differentiate(VAR_X) * b.differentiate(VAR_X)
    if geometry == RADIAL_POLAR:
        aa, bb = MultiPoly._aligned(a, b)
        if VAR_R not in aa.variables:
            aa = aa.embedded(tuple(aa.variables) + (VAR_R,))
            bb = bb.embedded(aa.variables)
        out = aa.differentiate(VAR_R) * bb.differentiate(VAR_R)
        if VAR_U in aa.variables:
            one_minus_u2 = MultiPoly.const(1, aa.variables) - \
                MultiPoly.var(VAR_U, aa.variables) ** 2
            out = out + (one_minus_u2 * aa.differentiate(VAR_U)
                         * bb.differentiate(VAR_U)).shifted(VAR_R, -2)
        return out
    raise ValueError(f"unknown geometry {geometry!r}")


def angular_average(p: MultiPoly) -> MultiPoly:
    return p.angular_average()


def integrate_r(p: MultiPoly) -> MultiPoly:
    return p.integrate_r()


_NUMBER_RE = re.compile(r"^[0-9]+(/[0-9]+|\.[0-9]*)?$|^\.[0-9]+$")
_FACTOR_RE = re.compile(
    r"^([^\W\d_][\w]*)(?:(?:\^|\*\*)(\(-?\d+\)|-?\d+))?$", re.UNICODE)


def _split_terms(text: str) -> list[str]:
    """Split whitespace-free text on top-level + and - signs."""
    terms, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch in "+-" and depth == 0 and i > start and text[i - 1] not in "*^(+-":
            terms.append(text[start:i])
            start = i
    terms.append(text[start:])
    return [t for t in terms if t]


def _split_factors(term: str) -> list[str]:
    """Split a term on '*' while keeping '**' power markers intact."""
    factors, i, start = [], 0, 0
    while i < len(term):
        if term[i] == "*":
            if i + 1 < len(term) and term[i + 1] == "*":
                i += 2
                continue
            factors.append(term[start:i])
            start = i + 1
        i += 1
    factors.append(term[start:])
    return factors


def parse_poly(text: str, variables: Iterable[str] | None = None) -> MultiPoly:
    """Parse the canonical polynomial grammar (round-trip of render()).

    Terms are joined by + or -, factors by '*'; a factor is a rational
    (``3``, ``21/8``, ``0.5``) or a power (``x``, ``r^-2``, ``ĝ^5``).
    ASCII aliases eps/ghat are accepted for ε/ĝ.
    """
    text = re.sub(r"\s+", "", text)
    if not text:
        raise ValueError("empty polynomial text")
    seen: set[str] = set(variables) if variables is not None else set()
    parsed: list[tuple[Fraction, dict[str, int]]] = []
    for term in _split_terms(text):
        sign = Fraction(1)
        while term and term[0] in "+-":
            if term[0] == "-":
                sign = -sign
            term = term[1:]
        coeff = sign
        powers: dict[str, int] = {}
        for factor in _split_factors(term):
            if not factor:
                raise ValueError(f"empty factor in term {term!r}")
            if _NUMBER_RE.match(factor):
                coeff *= Fraction(factor)
                continue
            m = _FACTOR_RE.match(factor)
            if not m:
                raise ValueError(f"cannot parse factor {factor!r}")
            name = _ALIASES.get(m.group(1), m.group(1))
            power = 1
            if m.group(2):
                power = int(m.group(2).strip("()"))
            powers[name] = powers.get(name, 0) + power
            seen.add(name)
        parsed.append((coeff, powers))
    names = tuple(sorted(seen, key=_var_key))
    result = MultiPoly.zero(names)
    for coeff, powers in parsed:
        result = result + MultiPoly.monomial(coeff, powers, names)
    if variables is not None:
        extra = set(result.variables) - set(variables)
        if extra:
            raise VariableMismatch(f"unexpected symbols {sorted(extra)!r}")
        result = result.embedded(tuple(variables))
    return result

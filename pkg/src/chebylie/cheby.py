import logging
from dataclasses import dataclass
from functools import lru_cache
from operator import add
from typing import Iterable, Mapping, Sequence

import numpy as np
import sympy

from .errors import ConsistencyError, ConstraintError, CoordinateOverflowError
from .exalg import ExpSum, S_sum, is_invariant
from .rootsys import Weight, _check_index
from .weyl import WeylGroup, orbit_coords

logger = logging.getLogger(__name__)

# Monomial exponents are 16-bit unsigned per variable
MAX_EXPONENT = 2**16 - 1


def _grlex(exps: tuple[int, ...]) -> tuple:
    return (sum(exps), exps)


class YPolynomial:
    """Sparse integer polynomial in y_1..y_n, keyed by exponent vectors."""
    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[tuple, int] | None = None):
        clean = {}
        for exps, coeff in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvars:
                raise ConstraintError(f"exponent vector {exps} does not have {nvars} entries")
            if any(e < 0 for e in exps):
                raise ConstraintError(f"negative exponent in {exps}")
            if any(e > MAX_EXPONENT for e in exps):
                raise CoordinateOverflowError(f"exponent in {exps} exceeds {MAX_EXPONENT}")
            coeff = int(coeff)
            if coeff:
                clean[exps] = clean.get(exps, 0) + coeff
        self.nvars = nvars
        self.terms = {e: c for e, c in clean.items() if c}

    @classmethod
    def _wrap(cls, nvars: int, terms: dict) -> "YPolynomial":
        obj = cls.__new__(cls)
        obj.nvars = nvars
        obj.terms = terms
        return obj

    @classmethod
    def zero(cls, nvars: int) -> "YPolynomial":
        return cls._wrap(nvars, {})

    @classmethod
    def constant(cls, nvars: int, value: int) -> "YPolynomial":
        value = int(value)
        return cls._wrap(nvars, {(0,) * nvars: value} if value else {})

    @classmethod
    def one(cls, nvars: int) -> "YPolynomial":
        return cls.constant(nvars, 1)

    @classmethod
    def variable(cls, nvars: int, i: int) -> "YPolynomial":
        _check_index(i, nvars)
        return cls._wrap(nvars, {tuple(int(m == i) for m in range(nvars)): 1})

    def __len__(self) -> int:
        return len(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def _coerce(self, other) -> "YPolynomial":
        if isinstance(other, (int, np.integer)):
            return YPolynomial.constant(self.nvars, other)
        if isinstance(other, YPolynomial):
            if other.nvars != self.nvars:
                raise ConstraintError(f"polynomials in {self.nvars} and {other.nvars} variables")
            return other
        return NotImplemented

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.terms == other.terms

    __hash__ = None

    def __add__(self, other) -> "YPolynomial":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        terms = dict(self.terms)
        for exps, coeff in other.terms.items():
            value = terms.get(exps, 0) + coeff
            if value:
                terms[exps] = value
            else:
                del terms[exps]
        return YPolynomial._wrap(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self) -> "YPolynomial":
        return YPolynomial._wrap(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "YPolynomial":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "YPolynomial":
        return (-self) + other

    def __mul__(self, other) -> "YPolynomial":
        if isinstance(other, (int, np.integer)):
            other = int(other)
            if not other:
                return YPolynomial.zero(self.nvars)
            return YPolynomial._wrap(self.nvars, {e: c * other for e, c in self.terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not self or not other:
            return YPolynomial.zero(self.nvars)
        top = [a + b for a, b in zip(self.max_exponents(), other.max_exponents())]
        if max(top) > MAX_EXPONENT:
            raise CoordinateOverflowError(f"product exponent {max(top)} exceeds {MAX_EXPONENT}")
        terms: dict[tuple, int] = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                exps = tuple(map(add, ea, eb))
                terms[exps] = terms.get(exps, 0) + ca * cb
        return YPolynomial._wrap(self.nvars, {e: c for e, c in terms.items() if c})

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "YPolynomial":
        if exponent < 0:
            raise ConstraintError("negative powers are not polynomials")
        result, base = YPolynomial.one(self.nvars), self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def max_exponents(self) -> tuple[int, ...]:
        if not self.terms:
            return (0,) * self.nvars
        return tuple(max(col) for col in zip(*self.terms))

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def sorted_items(self) -> list[tuple[tuple[int, ...], int]]:
        # Descending graded-lex
        return sorted(self.terms.items(), key=lambda item: _grlex(item[0]), reverse=True)

    def leading_term(self) -> tuple[tuple[int, ...], int]:
        if not self.terms:
            raise ConstraintError("the zero polynomial has no leading term")
        exps = max(self.terms, key=_grlex)
        return exps, self.terms[exps]

    def differentiate(self, j: int) -> "YPolynomial":
        return differentiate(self, j)

    def substitute(self, values: Sequence["YPolynomial"]) -> "YPolynomial":
        if len(values) != self.nvars:
            raise ConstraintError(f"{len(values)} values for {self.nvars} variables")
        target = values[0].nvars if values else self.nvars
        powers = [[YPolynomial.one(target)] for _ in values]
        result = YPolynomial.zero(target)
        for exps, coeff in self.sorted_items():
            term = YPolynomial.constant(target, coeff)
            for i, e in enumerate(exps):
                while len(powers[i]) <= e:
                    powers[i].append(powers[i][-1] * values[i])
                if e:
                    term = term * powers[i][e]
            result = result + term
        return result

    def divide_exact(self, divisor: "YPolynomial") -> "YPolynomial":
        """Quotient of an exact division; raises ConsistencyError otherwise."""
        divisor = self._coerce(divisor)
        if not divisor:
            raise ZeroDivisionError("division by the zero polynomial")
        lead, lead_coeff = divisor.leading_term()
        remainder = dict(self.terms)
        quotient: dict[tuple, int] = {}
        while remainder:
            top = max(remainder, key=_grlex)
            coeff = remainder[top]
            shift = tuple(a - b for a, b in zip(top, lead))
            if any(s < 0 for s in shift) or coeff % lead_coeff:
                raise ConsistencyError("polynomial division is not exact")
            factor = coeff // lead_coeff
            quotient[shift] = factor
            for exps, c in divisor.terms.items():
                key = tuple(map(add, shift, exps))
                value = remainder.get(key, 0) - factor * c
                if value:
                    remainder[key] = value
                else:
                    remainder.pop(key, None)
        return YPolynomial._wrap(self.nvars, quotient)

    def symbols(self) -> tuple:
        return sympy.symbols(f"y1:{self.nvars + 1}")

    def to_sympy(self):
        ys = self.symbols()
        return sympy.Add(*(coeff * sympy.Mul(*(y**e for y, e in zip(ys, exps)))
                           for exps, coeff in self.terms.items()))

    @classmethod
    def from_sympy(cls, nvars: int, expr) -> "YPolynomial":
        """Parse an integer polynomial in y1..yn, e.g. from "y1**2 - 2*y2"."""
        ys = sympy.symbols(f"y1:{nvars + 1}")
        poly = sympy.Poly(sympy.sympify(expr), *ys)
        if not all(c.is_integer for c in poly.coeffs()):
            raise ConstraintError(f"{expr} does not have integer coefficients")
        return cls(nvars, {exps: int(c) for exps, c in poly.terms()})

    def __str__(self) -> str:
        return sympy.sstr(self.to_sympy(), order="grlex")

    def __repr__(self) -> str:
        return f"YPolynomial({self})"

    def to_json(self) -> list[dict]:
        return [{"exps": list(e), "coeff": str(c)} for e, c in self.sorted_items()]

    @classmethod
    def from_json(cls, nvars: int, data: Iterable[dict]) -> "YPolynomial":
        return cls(nvars, {tuple(item["exps"]): int(item["coeff"]) for item in data})


def differentiate(p: YPolynomial, j: int) -> YPolynomial:
    # Formal partial derivative with respect to y_j
    _check_index(j, p.nvars)
    terms = {}
    for exps, coeff in p.terms.items():
        e = exps[j]
        if e:
            terms[exps[:j] + (e - 1,) + exps[j + 1:]] = coeff * e
    return YPolynomial._wrap(p.nvars, terms)


@dataclass(frozen=True, eq=False)
class PolyMap:
    components: tuple[YPolynomial, ...]
    type_name: str
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ConstraintError(f"k must be a positive integer, got {self.k}")
        n = len(self.components)
        if any(c.nvars != n for c in self.components):
            raise ConstraintError("every component of a polynomial map needs one variable per component")

    @property
    def rank(self) -> int:
        return len(self.components)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyMap):
            return NotImplemented
        return self.rank == other.rank and all(a == b for a, b in zip(self.components, other.components))

    __hash__ = None

    def to_json(self) -> dict:
        return {"type": self.type_name, "k": self.k,
                "components": [c.to_json() for c in self.components]}


@lru_cache(maxsize=512)
def _power(grp: WeylGroup, i: int, m: int) -> ExpSum:
    # S(e^omega_i)^m, memoised per group
    if m == 0:
        return ExpSum.one(grp.rank)
    return _power(grp, i, m - 1) * S_sum(grp, Weight.fundamental(grp.rank, i))


def y_monomial(grp: WeylGroup, exps: Sequence[int]) -> ExpSum:
    exps = tuple(int(e) for e in exps)
    if len(exps) != grp.rank or any(e < 0 for e in exps):
        raise ConstraintError(f"exponent vector {exps} is not a nonnegative vector of length {grp.rank}")
    result = ExpSum.one(grp.rank)
    for i, e in enumerate(exps):
        if e:
            result = result * _power(grp, i, e)
    return result


def phi_expand(grp: WeylGroup, p: YPolynomial) -> ExpSum:
    if p.nvars != grp.rank:
        raise ConstraintError(f"polynomial in {p.nvars} variables used with rank {grp.rank}")
    result = ExpSum.zero(grp.rank)
    for exps, coeff in p.sorted_items():
        result = result + y_monomial(grp, exps) * coeff
    return result


@lru_cache(maxsize=8192)
def _dominant_product(grp: WeylGroup, lower: tuple[int, ...], i: int) -> dict:
    # Dominant part of S(e^lower) * S(e^omega_i); its coefficients are the
    # orbit-sum coordinates of the (invariant) product
    rs = grp.root_system
    fundamental = tuple(int(m == i) for m in range(rs.rank))
    counts: dict[tuple, int] = {}
    for y in orbit_coords(rs, fundamental):
        for x in orbit_coords(rs, lower):
            target = tuple(map(add, x, y))
            if min(target) >= 0:
                counts[target] = counts.get(target, 0) + 1
    return counts


@lru_cache(maxsize=8192)
def _orbit_sum_polynomial(grp: WeylGroup, coords: tuple[int, ...]) -> YPolynomial:
    # S(e^lambda) = y_i S(e^(lambda - omega_i)) - (lower orbit sums), lambda dominant
    n = grp.rank
    i = next((m for m, c in enumerate(coords) if c > 0), None)
    if i is None:
        return YPolynomial.one(n)
    lower = coords[:i] + (coords[i] - 1,) + coords[i + 1:]
    counts = _dominant_product(grp, lower, i)
    if counts.get(coords) != 1:
        raise ConsistencyError(f"S(e^{list(lower)}) S(e^omega_{i + 1}) lacks the leading term e^{list(coords)}")
    poly = _orbit_sum_polynomial(grp, lower) * YPolynomial.variable(n, i)
    for target in sorted(counts, reverse=True):
        if target != coords:
            poly = poly - _orbit_sum_polynomial(grp, target) * counts[target]
    return poly


def express_in_y(grp: WeylGroup, a: ExpSum) -> YPolynomial:
    """The unique integer polynomial p with p(S(e^omega_1), ..., S(e^omega_n)) = a."""
    if a.rank != grp.rank:
        raise ConstraintError(f"sum of rank {a.rank} used with a group of rank {grp.rank}")
    if not is_invariant(grp, a):
        raise ConstraintError("only W-invariant sums are polynomials in y_1..y_n")
    # An invariant sum is the combination of orbit sums over its dominant terms
    result = YPolynomial.zero(grp.rank)
    for key, coeff in sorted(a.terms.items(), reverse=True):
        if min(key) >= 0:
            result = result + _orbit_sum_polynomial(grp, key) * coeff
    return result


def _check_k(k: int):
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise ConstraintError(f"k must be a positive integer, got {k!r}")


def chebyshev_map(grp: WeylGroup, k: int) -> PolyMap:
    """P^k: component i expresses S(e^(k omega_i)) in y_1..y_n."""
    _check_k(k)
    n = grp.rank
    components = tuple(express_in_y(grp, S_sum(grp, Weight.fundamental(n, i) * k))
                       for i in range(n))
    logger.info("constructed P^%d for %s", k, grp.root_system.name)
    return PolyMap(components=components, type_name=grp.root_system.name, k=int(k))


def jacobian_symbolic(grp: WeylGroup, k: int) -> tuple[tuple[YPolynomial, ...], ...]:
    cheb = chebyshev_map(grp, k)
    return tuple(tuple(differentiate(g, j) for j in range(grp.rank)) for g in cheb.components)


def compose(p: PolyMap, q: PolyMap) -> PolyMap:
    if p.rank != q.rank:
        raise ConstraintError(f"cannot compose maps of ranks {p.rank} and {q.rank}")
    components = tuple(g.substitute(q.components) for g in p.components)
    return PolyMap(components=components, type_name=p.type_name, k=p.k * q.k)


def identity_map(type_name: str, n: int) -> PolyMap:
    return PolyMap(tuple(YPolynomial.variable(n, i) for i in range(n)), type_name, 1)


@lru_cache(maxsize=256)
def normalized_chebyshev_first(k: int) -> YPolynomial:
    # T_k(2 cos t) = 2 cos(k t): T_0 = 2, T_1 = x, T_k = x T_{k-1} - T_{k-2}
    if k < 0:
        raise ConstraintError(f"k must be nonnegative, got {k}")
    if k == 0:
        return YPolynomial.constant(1, 2)
    if k == 1:
        return YPolynomial.variable(1, 0)
    x = YPolynomial.variable(1, 0)
    return x * normalized_chebyshev_first(k - 1) - normalized_chebyshev_first(k - 2)


@lru_cache(maxsize=256)
def normalized_chebyshev_second(k: int) -> YPolynomial:
    # U_k(2 cos t) = sin((k+1) t) / sin t: U_0 = 1, U_1 = x
    if k < 0:
        raise ConstraintError(f"k must be nonnegative, got {k}")
    if k == 0:
        return YPolynomial.one(1)
    if k == 1:
        return YPolynomial.variable(1, 0)
    x = YPolynomial.variable(1, 0)
    return x * normalized_chebyshev_second(k - 1) - normalized_chebyshev_second(k - 2)

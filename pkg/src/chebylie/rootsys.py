import logging
import re
from dataclasses import dataclass
from functools import cached_property, lru_cache
from math import lcm, prod
from typing import Sequence

import numpy as np
import sympy

from .errors import ConstraintError, CoordinateOverflowError

logger = logging.getLogger(__name__)

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1

# Smallest admissible rank of the classical families
_MIN_RANK = {"A": 1, "B": 2, "C": 2, "D": 4}
# Admissible ranks of the exceptional families
_EXCEPTIONAL_RANKS = {"E": (6, 7, 8), "F": (4,), "G": (2,)}

# Table of the degrees of the basic polynomial invariants (exceptional types)
_EXCEPTIONAL_DEGREES = {
    ("E", 6): (2, 5, 6, 8, 9, 12),
    ("E", 7): (2, 6, 8, 10, 12, 14, 18),
    ("E", 8): (2, 8, 12, 14, 18, 20, 24, 30),
    ("F", 4): (2, 6, 8, 12),
    ("G", 2): (2, 6),
}

# Highest coefficient of the highest root
_HIGHEST_COEFFICIENT = {"A": 1, "B": 2, "C": 2, "D": 2, ("E", 6): 3, ("E", 7): 4,
                        ("E", 8): 6, "F": 4, "G": 3}

_TYPE_TOKEN = re.compile(r"^([a-z])(\d+)$")


@dataclass(frozen=True)
class LieType:
    family: str
    rank: int

    def __post_init__(self):
        family = str(self.family).upper()
        object.__setattr__(self, "family", family)
        rank = self.rank
        if family in _MIN_RANK:
            bound = _MIN_RANK[family]
            if rank < bound:
                hint = " (D3 is A3: request A3)" if family == "D" and rank == 3 else ""
                raise ConstraintError(f"{family}{rank}: type {family} needs rank >= {bound}{hint}")
        elif family in _EXCEPTIONAL_RANKS:
            allowed = _EXCEPTIONAL_RANKS[family]
            if rank not in allowed:
                ranks = ", ".join(str(r) for r in allowed)
                raise ConstraintError(f"{family}{rank}: type {family} needs rank in {{{ranks}}}")
        else:
            raise ConstraintError(f"unknown Lie type family {family!r}, expected one of A-G")

    def __str__(self) -> str:
        return f"{self.family}{self.rank}"


def parse_type(text: str) -> tuple[LieType, ...]:
    # "G2", "a1xa1", "A2xG2": case-insensitive, 'x' separates simple summands
    tokens = [token.strip() for token in str(text).strip().lower().split("x")]
    if not tokens or any(token == "" for token in tokens):
        raise ConstraintError(f"cannot parse Lie type {text!r}")
    types = []
    for token in tokens:
        match = _TYPE_TOKEN.match(token)
        if match is None:
            raise ConstraintError(f"cannot parse Lie type component {token!r} in {text!r}")
        types.append(LieType(match.group(1), int(match.group(2))))
    return tuple(types)


def _checked(value) -> int:
    value = int(value)
    if not INT64_MIN <= value <= INT64_MAX:
        raise CoordinateOverflowError(f"coordinate {value} is outside the signed 64-bit range")
    return value


@dataclass(frozen=True)
class _LatticeVector:
    coords: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(_checked(c) for c in self.coords))

    @property
    def rank(self) -> int:
        return len(self.coords)

    def __len__(self) -> int:
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, index: int) -> int:
        return self.coords[index]

    def _same_rank(self, other: "_LatticeVector"):
        if type(other) is not type(self):
            raise ConstraintError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.rank != self.rank:
            raise ConstraintError(f"rank mismatch: {self.rank} vs {other.rank}")

    def __add__(self, other):
        self._same_rank(other)
        return type(self)(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other):
        self._same_rank(other)
        return type(self)(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self):
        return type(self)(tuple(-a for a in self.coords))

    def __mul__(self, scalar: int):
        if not isinstance(scalar, (int, np.integer)):
            return NotImplemented
        return type(self)(tuple(int(scalar) * a for a in self.coords))

    __rmul__ = __mul__


class Weight(_LatticeVector):
    """Weight in the fundamental-weight basis: coords[j] = (λ, α_j^∨)."""

    @classmethod
    def zero(cls, n: int) -> "Weight":
        return cls((0,) * n)

    @classmethod
    def fundamental(cls, n: int, i: int) -> "Weight":
        _check_index(i, n)
        return cls(tuple(int(m == i) for m in range(n)))

    @classmethod
    def rho(cls, n: int) -> "Weight":
        return cls((1,) * n)


class CorootVector(_LatticeVector):
    """Vector in the simple-coroot basis: coords[m] = (ω_m, γ)."""

    @classmethod
    def simple_coroot(cls, n: int, j: int) -> "CorootVector":
        _check_index(j, n)
        return cls(tuple(int(m == j) for m in range(n)))


def _check_index(i: int, n: int):
    if not 0 <= i < n:
        raise ConstraintError(f"index {i} out of range for rank {n} (indices are 0..{n - 1})")


@dataclass(frozen=True, eq=False)
class RootSystem:
    lie_types: tuple[LieType, ...]
    cartan: np.ndarray
    cartan_inverse: sympy.ImmutableMatrix
    degrees: tuple[int, ...]
    weyl_order: int
    m_g: int

    @property
    def rank(self) -> int:
        return self.cartan.shape[0]

    @property
    def name(self) -> str:
        return "x".join(str(t) for t in self.lie_types)

    def __repr__(self) -> str:
        return f"RootSystem({self.name})"

    @cached_property
    def simple_roots(self) -> tuple[tuple[int, ...], ...]:
        # alpha_i = sum_j C_ij omega_j: the rows of the Cartan matrix
        return tuple(tuple(int(c) for c in row) for row in self.cartan)

    @cached_property
    def _scaled_inverse(self) -> tuple[tuple[tuple[int, ...], ...], int]:
        denom = lcm(*(int(entry.q) for entry in self.cartan_inverse))
        numer = tuple(tuple(int(entry * denom) for entry in self.cartan_inverse.row(i))
                      for i in range(self.rank))
        return numer, denom

    @property
    def root_denominator(self) -> int:
        return self._scaled_inverse[1]

    def scaled_root_coords(self, coords: Sequence[int]) -> tuple[int, ...]:
        # Root coordinates of a weight multiplied by root_denominator (integers)
        numer, _ = self._scaled_inverse
        n = self.rank
        return tuple(sum(coords[m] * numer[m][j] for m in range(n)) for j in range(n))

    @cached_property
    def component_slices(self) -> tuple[slice, ...]:
        slices, start = [], 0
        for t in self.lie_types:
            slices.append(slice(start, start + t.rank))
            start += t.rank
        return tuple(slices)


def _cartan_block(t: LieType) -> np.ndarray:
    # Humphreys' numbering; C_ij = <alpha_i, alpha_j^vee>
    n = t.rank
    c = 2 * np.eye(n, dtype=np.int64)

    def link(i, j, a=-1, b=-1):
        c[i, j] = a
        c[j, i] = b

    if t.family in "ABC":
        for i in range(n - 1):
            link(i, i + 1)
        if t.family == "B":
            c[n - 2, n - 1] = -2
        elif t.family == "C":
            c[n - 1, n - 2] = -2
    elif t.family == "D":
        for i in range(n - 2):
            link(i, i + 1)
        link(n - 3, n - 1)
    elif t.family == "E":
        for i, j in ((0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7)):
            if j < n:
                link(i, j)
        link(1, 3)
    elif t.family == "F":
        link(0, 1)
        link(1, 2, -2, -1)
        link(2, 3)
    elif t.family == "G":
        link(0, 1, -1, -3)
    return c


def _degrees(t: LieType) -> tuple[int, ...]:
    n = t.rank
    if t.family == "A":
        return tuple(range(2, n + 2))
    if t.family in "BC":
        return tuple(range(2, 2 * n + 1, 2))
    if t.family == "D":
        return tuple(sorted(tuple(range(2, 2 * n - 1, 2)) + (n,)))
    return _EXCEPTIONAL_DEGREES[(t.family, n)]


def _highest_coefficient(t: LieType) -> int:
    return _HIGHEST_COEFFICIENT.get((t.family, t.rank), _HIGHEST_COEFFICIENT.get(t.family))


def build_root_system(lie_type: "str | LieType | Sequence[LieType]") -> RootSystem:
    if isinstance(lie_type, str):
        types = parse_type(lie_type)
    elif isinstance(lie_type, LieType):
        types = (lie_type,)
    else:
        types = tuple(lie_type)
    if not types:
        raise ConstraintError("a root system needs at least one simple component")
    return _build_root_system(types)


@lru_cache(maxsize=64)
def _build_root_system(types: tuple[LieType, ...]) -> RootSystem:
    n = sum(t.rank for t in types)
    # Block-diagonal Cartan matrix for semisimple sums
    cartan = np.zeros((n, n), dtype=np.int64)
    start = 0
    for t in types:
        cartan[start:start + t.rank, start:start + t.rank] = _cartan_block(t)
        start += t.rank
    cartan.setflags(write=False)

    inverse = sympy.ImmutableMatrix(cartan.tolist()).inv()
    if sympy.ImmutableMatrix(cartan.tolist()) * inverse != sympy.eye(n):
        raise ConstraintError(f"Cartan matrix of {types} is not invertible")

    degrees = tuple(d for t in types for d in _degrees(t))
    rs = RootSystem(lie_types=types,
                    cartan=cartan,
                    cartan_inverse=inverse,
                    degrees=degrees,
                    weyl_order=prod(degrees),
                    m_g=max(_highest_coefficient(t) for t in types))
    logger.debug("built root system %s: rank %d, |W| = %d, m_g = %d",
                 rs.name, n, rs.weyl_order, rs.m_g)
    return rs


def weight_to_root_coords(rs: RootSystem, weight: Weight) -> tuple[sympy.Rational, ...]:
    # lambda = c . C  =>  c = lambda . C^-1
    _check_weight_rank(rs, weight)
    row = sympy.ImmutableMatrix([list(weight.coords)]) * rs.cartan_inverse
    return tuple(sympy.Rational(entry) for entry in row)


def inner_product(weight: Weight, coroot: CorootVector) -> int:
    if weight.rank != coroot.rank:
        raise ConstraintError(f"dimension mismatch: weight of rank {weight.rank}, "
                              f"coroot vector of rank {coroot.rank}")
    return _checked(sum(a * b for a, b in zip(weight.coords, coroot.coords)))


def dominance_leq(rs: RootSystem, lower: Weight, upper: Weight) -> bool:
    _check_weight_rank(rs, lower)
    _check_weight_rank(rs, upper)
    diff = tuple(b - a for a, b in zip(lower.coords, upper.coords))
    return all(c >= 0 for c in rs.scaled_root_coords(diff))


def is_dominant(weight: Weight) -> bool:
    return all(c >= 0 for c in weight.coords)


def is_strictly_dominant(weight: Weight) -> bool:
    return all(c > 0 for c in weight.coords)


def _check_weight_rank(rs: RootSystem, weight: Weight):
    if weight.rank != rs.rank:
        raise ConstraintError(f"weight of rank {weight.rank} used with {rs.name} of rank {rs.rank}")


def _reflect_weight(rs: RootSystem, coords: tuple[int, ...], i: int) -> tuple[int, ...]:
    # sigma_i(lambda) = lambda - (lambda, alpha_i^vee) alpha_i
    a = coords[i]
    if a == 0:
        return coords
    alpha = rs.simple_roots[i]
    return tuple(x - a * y for x, y in zip(coords, alpha))


def _reflect_coroot(rs: RootSystem, coords: tuple[int, ...], i: int) -> tuple[int, ...]:
    # sigma_i(gamma) = gamma - (alpha_i, gamma) alpha_i^vee
    pairing = sum(int(rs.cartan[i, j]) * coords[j] for j in range(rs.rank))
    if pairing == 0:
        return coords
    return tuple(x - pairing if m == i else x for m, x in enumerate(coords))


def _closure(start: list[tuple[int, ...]], step, n: int) -> list[tuple[int, ...]]:
    seen = dict.fromkeys(start)
    frontier = list(seen)
    while frontier:
        next_frontier = []
        for v in frontier:
            for i in range(n):
                u = step(v, i)
                if u not in seen:
                    seen[u] = None
                    next_frontier.append(u)
        frontier = next_frontier
    return list(seen)


@lru_cache(maxsize=64)
def _positive_roots(rs: RootSystem) -> tuple[tuple[int, ...], ...]:
    roots = _closure(list(rs.simple_roots), lambda v, i: _reflect_weight(rs, v, i), rs.rank)
    positive = [r for r in roots if all(c >= 0 for c in rs.scaled_root_coords(r))]
    positive.sort(key=lambda r: (sum(rs.scaled_root_coords(r)), r))
    return tuple(positive)


def positive_roots(rs: RootSystem) -> tuple[Weight, ...]:
    """Positive roots in weight coordinates, ordered by height."""
    return tuple(Weight(r) for r in _positive_roots(rs))


@lru_cache(maxsize=64)
def _positive_coroots(rs: RootSystem) -> tuple[tuple[int, ...], ...]:
    n = rs.rank
    simple = [tuple(int(m == j) for m in range(n)) for j in range(n)]
    coroots = _closure(simple, lambda v, i: _reflect_coroot(rs, v, i), n)
    return tuple(sorted((c for c in coroots if all(x >= 0 for x in c)), key=lambda c: (sum(c), c)))


def positive_coroots(rs: RootSystem) -> tuple[CorootVector, ...]:
    return tuple(CorootVector(c) for c in _positive_coroots(rs))


def highest_roots(rs: RootSystem) -> tuple[tuple[int, ...], ...]:
    # One highest root per simple component, in simple-root coordinates
    denom = rs.root_denominator
    highest = []
    for block in rs.component_slices:
        best = None
        for r in _positive_roots(rs):
            coords = tuple(c // denom for c in rs.scaled_root_coords(r))
            if any(coords[block]) and (best is None or sum(coords) > sum(best)):
                best = coords
        highest.append(best)
    return tuple(highest)

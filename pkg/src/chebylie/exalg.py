"""Exact arithmetic in the group algebra Z[Lambda] of the weight lattice.

Elements are finite sums  a = sum_lambda a_lambda e^lambda  with integer
coefficients, keyed by the fundamental-weight coordinates of lambda.
"""
import heapq
import logging
from functools import lru_cache
from operator import add
from typing import Iterable, Mapping

import numpy as np

from .errors import ConsistencyError, ConstraintError
from .rootsys import RootSystem, Weight, _check_index, _positive_coroots, _reflect_weight
from .util import laplace_determinant
from .weyl import WeylElement, WeylGroup, _guard, orbit_coords, weight_images

logger = logging.getLogger(__name__)


class ExpSum:
    __slots__ = ("rank", "terms")

    def __init__(self, rank: int, terms: Mapping[tuple, int] | None = None):
        clean = {}
        for key, coeff in (terms or {}).items():
            key = tuple(int(c) for c in key)
            if len(key) != rank:
                raise ConstraintError(f"weight {key} does not have rank {rank}")
            coeff = int(coeff)
            if coeff:
                clean[key] = clean.get(key, 0) + coeff
        self.rank = rank
        self.terms = {k: c for k, c in clean.items() if c}

    @classmethod
    def _wrap(cls, rank: int, terms: dict) -> "ExpSum":
        # terms must already be pruned of zeros
        obj = cls.__new__(cls)
        obj.rank = rank
        obj.terms = terms
        return obj

    @classmethod
    def zero(cls, rank: int) -> "ExpSum":
        return cls._wrap(rank, {})

    @classmethod
    def one(cls, rank: int) -> "ExpSum":
        return cls._wrap(rank, {(0,) * rank: 1})

    @classmethod
    def monomial(cls, weight: "Weight | tuple", coeff: int = 1) -> "ExpSum":
        coords = tuple(weight)
        return cls(len(coords), {coords: coeff})

    def coefficient(self, weight: "Weight | tuple") -> int:
        return self.terms.get(tuple(weight), 0)

    def __len__(self) -> int:
        return len(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = ExpSum.one(self.rank) * other
        if not isinstance(other, ExpSum):
            return NotImplemented
        return self.rank == other.rank and self.terms == other.terms

    __hash__ = None

    def _check(self, other: "ExpSum"):
        if other.rank != self.rank:
            raise ConstraintError(f"rank mismatch: {self.rank} vs {other.rank}")

    def __add__(self, other) -> "ExpSum":
        if isinstance(other, int):
            other = ExpSum.one(self.rank) * other
        if not isinstance(other, ExpSum):
            return NotImplemented
        self._check(other)
        terms = dict(self.terms)
        for key, coeff in other.terms.items():
            value = terms.get(key, 0) + coeff
            if value:
                terms[key] = value
            else:
                del terms[key]
        return ExpSum._wrap(self.rank, terms)

    __radd__ = __add__

    def __neg__(self) -> "ExpSum":
        return ExpSum._wrap(self.rank, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other) -> "ExpSum":
        return self + (-other)

    def __rsub__(self, other) -> "ExpSum":
        return (-self) + other

    def scale(self, factor: int) -> "ExpSum":
        factor = int(factor)
        if not factor:
            return ExpSum.zero(self.rank)
        return ExpSum._wrap(self.rank, {k: c * factor for k, c in self.terms.items()})

    def __mul__(self, other) -> "ExpSum":
        if isinstance(other, (int, np.integer)):
            return self.scale(other)
        if not isinstance(other, ExpSum):
            return NotImplemented
        self._check(other)
        # e^lambda e^mu = e^(lambda + mu)
        terms: dict[tuple, int] = {}
        for ka, ca in self.terms.items():
            for kb, cb in other.terms.items():
                key = tuple(map(add, ka, kb))
                terms[key] = terms.get(key, 0) + ca * cb
        return ExpSum._wrap(self.rank, {k: c for k, c in terms.items() if c})

    __rmul__ = __mul__

    def sorted_items(self) -> list[tuple[tuple[int, ...], int]]:
        return sorted(self.terms.items(), reverse=True)

    def dimension(self) -> int:
        return sum(self.terms.values())

    def to_json(self) -> list[dict]:
        return [{"weight": list(k), "coeff": str(c)} for k, c in self.sorted_items()]

    @classmethod
    def from_json(cls, rank: int, data: Iterable[dict]) -> "ExpSum":
        return cls(rank, {tuple(item["weight"]): int(item["coeff"]) for item in data})

    def __repr__(self) -> str:
        inner = " + ".join(f"{c}*e^{list(k)}" for k, c in self.sorted_items()) or "0"
        return f"ExpSum({inner})"


def dimension(a: ExpSum) -> int:
    return a.dimension()


def weyl_action(w: WeylElement, a: ExpSum) -> ExpSum:
    # w(e^lambda) = e^(w(lambda)); the action is injective so coefficients carry over
    if w.rank != a.rank:
        raise ConstraintError(f"rank mismatch: element of rank {w.rank}, sum of rank {a.rank}")
    if not a:
        return a
    keys = list(a.terms)
    peak = max(abs(c) for key in keys for c in key)
    _guard((peak,) * a.rank, int(np.abs(w.inverse).max()))
    images = np.asarray(keys, dtype=np.int64) @ w.inverse
    return ExpSum._wrap(a.rank, {tuple(int(x) for x in image): a.terms[key]
                                 for key, image in zip(keys, images)})


def _require_dominant(weight: Weight):
    if any(c < 0 for c in weight.coords):
        raise ConstraintError(f"weight {list(weight.coords)} is not dominant; "
                              f"use weyl.dominant_representative first")


def S_sum(grp: WeylGroup, weight: Weight) -> ExpSum:
    """Orbit sum S(e^lambda) = sum over mu in W(lambda) of e^mu."""
    if weight.rank != grp.rank:
        raise ConstraintError(f"weight of rank {weight.rank} used with a group of rank {grp.rank}")
    _require_dominant(weight)
    orbit = orbit_coords(grp.root_system, weight.coords)
    return ExpSum._wrap(grp.rank, dict.fromkeys(orbit, 1))


@lru_cache(maxsize=1024)
def _alternating_terms(grp: WeylGroup, coords: tuple[int, ...]) -> dict:
    terms: dict[tuple, int] = {}
    for image, det in zip(weight_images(grp, coords), grp.dets):
        key = tuple(int(x) for x in image)
        terms[key] = terms.get(key, 0) + int(det)
    return {k: c for k, c in terms.items() if c}


def J_sum(grp: WeylGroup, weight: Weight) -> ExpSum:
    """Alternating sum J(e^lambda) = sum over w of det(w) e^(w(lambda))."""
    if weight.rank != grp.rank:
        raise ConstraintError(f"weight of rank {weight.rank} used with a group of rank {grp.rank}")
    return ExpSum._wrap(grp.rank, dict(_alternating_terms(grp, weight.coords)))


def derivation_D(j: int, a: ExpSum) -> ExpSum:
    # D_j(e^lambda) = (lambda, alpha_j^vee) e^lambda
    _check_index(j, a.rank)
    return ExpSum._wrap(a.rank, {k: c * k[j] for k, c in a.terms.items() if k[j]})


def _lex_key(rs: RootSystem, key: tuple) -> tuple:
    return rs.scaled_root_coords(key)


def maximal_terms(rs: RootSystem, a: ExpSum) -> list[tuple[Weight, int]]:
    if not a:
        raise ConstraintError("the zero sum has no maximal terms")
    # A weight above another has lexicographically larger root coordinates,
    # so scanning in decreasing lex order only ever compares against earlier maxima
    ordered = sorted(a.terms, key=lambda k: _lex_key(rs, k), reverse=True)
    maxima: list[tuple[tuple, tuple]] = []
    for key in ordered:
        scaled = _lex_key(rs, key)
        if not any(all(x >= y for x, y in zip(top, scaled)) for _, top in maxima):
            maxima.append((key, scaled))
    return [(Weight(key), a.terms[key]) for key, _ in maxima]


def is_invariant(grp: WeylGroup, a: ExpSum) -> bool:
    rs = grp.root_system
    terms = a.terms
    return all(terms.get(_reflect_weight(rs, k, i), 0) == c
               for i in range(rs.rank) for k, c in terms.items())


def is_anti_invariant(grp: WeylGroup, a: ExpSum) -> bool:
    rs = grp.root_system
    terms = a.terms
    return all(terms.get(_reflect_weight(rs, k, i), 0) == -c
               for i in range(rs.rank) for k, c in terms.items())


def divide_by_denominator(a: ExpSum, grp: WeylGroup) -> ExpSum:
    """The W-invariant q with q * J(e^rho) = a, by leading-term reduction."""
    rs = grp.root_system
    n = rs.rank
    if a.rank != n:
        raise ConstraintError(f"sum of rank {a.rank} divided in a group of rank {n}")
    if not is_anti_invariant(grp, a):
        raise ConstraintError("only anti-invariant sums are divisible by J(e^rho)")
    if not a:
        return ExpSum.zero(n)

    rho = (1,) * n
    shifts = [(tuple(x - 1 for x in key), c) for key, c in _alternating_terms(grp, rho).items()]
    scaled_rho = rs.scaled_root_coords(rho)
    # Every term of the quotient, shifted by rho, has root coordinates
    # at least min(a) + 2 rho coordinatewise (J(e^rho) reaches down to -rho)
    floor = [min(col) + 2 * r for col, r in
             zip(zip(*(rs.scaled_root_coords(k) for k in a.terms)), scaled_rho)]

    remainder = dict(a.terms)
    heap = [(tuple(-x for x in rs.scaled_root_coords(k)), k) for k in remainder]
    heapq.heapify(heap)
    quotient: dict[tuple, int] = {}
    previous = None
    while heap:
        negated, key = heapq.heappop(heap)
        coeff = remainder.get(key)
        if not coeff:
            continue
        if previous is not None and negated <= previous:
            raise ConsistencyError("leading-term reduction did not decrease")
        if any(-x < f for x, f in zip(negated, floor)):
            raise ConsistencyError("sum is not divisible by J(e^rho)")
        previous = negated
        quotient[tuple(x - 1 for x in key)] = coeff
        # subtract coeff * e^(key - rho) * J(e^rho)
        for shift, c in shifts:
            target = tuple(map(add, key, shift))
            value = remainder.get(target, 0) - coeff * c
            if value:
                if target not in remainder:
                    heapq.heappush(heap, (tuple(-x for x in rs.scaled_root_coords(target)), target))
                remainder[target] = value
            else:
                remainder.pop(target, None)
    logger.debug("divided %d-term sum by J(e^rho): %d quotient terms", len(a), len(quotient))
    return ExpSum._wrap(n, quotient)


@lru_cache(maxsize=2048)
def _character_terms(grp: WeylGroup, coords: tuple[int, ...]) -> dict:
    shifted = Weight(tuple(c + 1 for c in coords))
    return divide_by_denominator(J_sum(grp, shifted), grp).terms


def character(grp: WeylGroup, weight: Weight) -> ExpSum:
    """Weyl character formula: chi_lambda = J(e^(rho + lambda)) / J(e^rho)."""
    if weight.rank != grp.rank:
        raise ConstraintError(f"weight of rank {weight.rank} used with a group of rank {grp.rank}")
    _require_dominant(weight)
    return ExpSum._wrap(grp.rank, dict(_character_terms(grp, weight.coords)))


def weyl_dimension(rs: RootSystem, weight: Weight) -> int:
    # prod over positive coroots of (lambda + rho, a^vee) / (rho, a^vee)
    _require_dominant(weight)
    numerator, denominator = 1, 1
    for coroot in _positive_coroots(rs):
        numerator *= sum((c + 1) * x for c, x in zip(weight.coords, coroot))
        denominator *= sum(coroot)
    if numerator % denominator:
        raise ConsistencyError(f"Weyl dimension of {list(weight.coords)} is not an integer")
    return numerator // denominator


def determinant(matrix) -> ExpSum:
    rank = matrix[0][0].rank
    return laplace_determinant(matrix, ExpSum.zero(rank), ExpSum.one(rank))

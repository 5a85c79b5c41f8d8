"""Jacobians of the Chebyshev maps P^k written as integer combinations of characters.

Three evaluation paths are available and must agree:

* ``jacobian_characters(..., method="pruned")`` sweeps pairs of orbit points
  (w1(k omega_i), w2(beta)), one per coset, over the dominant terms beta of each
  column of Adj(Jac(1));
* ``method="full"`` sweeps all of W x W and divides by the stabilizer orders;
* ``characters_from_adjugate`` reads the combination off the anti-invariant
  entries of Jac(k) Adj(Jac(1)).
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from .cheby import YPolynomial, express_in_y
from .config import PARALLEL_PAIR_THRESHOLD, load_settings
from .errors import BudgetExceededError, ConsistencyError, ConstraintError
from .exalg import ExpSum, S_sum, character, derivation_D, is_anti_invariant
from .rootsys import (CorootVector, LieType, RootSystem, Weight, _check_index, inner_product,
                      is_strictly_dominant, parse_type)
from .util import laplace_adjugate, laplace_determinant, matrix_product
from .weyl import (WeylElement, WeylGroup, _guard, act_on_coroot, act_on_weight, coroot_images,
                   coset_representatives, orbit_coords, stabilizer_size, weight_images)

logger = logging.getLogger(__name__)

METHODS = ("pruned", "full")
# Elements of one broadcast block (rows x columns x rank)
_CHUNK_ELEMENTS = 2_000_000
# Cofactor expansion up to this size, fraction-free elimination above
_LAPLACE_MAX = 4


class CharCombination:
    """sum_lambda c_lambda chi_lambda over dominant lambda, integer coefficients."""
    __slots__ = ("rank", "terms")

    def __init__(self, rank: int, terms: Mapping[tuple, int] | None = None):
        clean = {}
        for key, coeff in (terms or {}).items():
            key = tuple(int(c) for c in key)
            if len(key) != rank:
                raise ConstraintError(f"highest weight {key} does not have rank {rank}")
            if min(key, default=0) < 0:
                raise ConstraintError(f"highest weight {list(key)} is not dominant")
            coeff = int(coeff)
            if coeff:
                clean[key] = clean.get(key, 0) + coeff
        self.rank = rank
        self.terms = {k: c for k, c in clean.items() if c}

    @classmethod
    def zero(cls, rank: int) -> "CharCombination":
        return cls(rank)

    @classmethod
    def chi(cls, *coords: int, coeff: int = 1) -> "CharCombination":
        # Negative subscripts denote the zero combination
        if min(coords) < 0:
            return cls(len(coords))
        return cls(len(coords), {coords: coeff})

    def __len__(self) -> int:
        return len(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CharCombination):
            return NotImplemented
        return self.rank == other.rank and self.terms == other.terms

    __hash__ = None

    def __add__(self, other: "CharCombination") -> "CharCombination":
        if not isinstance(other, CharCombination):
            return NotImplemented
        if other.rank != self.rank:
            raise ConstraintError(f"rank mismatch: {self.rank} vs {other.rank}")
        terms = dict(self.terms)
        for key, coeff in other.terms.items():
            terms[key] = terms.get(key, 0) + coeff
        return CharCombination(self.rank, terms)

    def __neg__(self) -> "CharCombination":
        return CharCombination(self.rank, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "CharCombination") -> "CharCombination":
        return self + (-other)

    def __mul__(self, factor: int) -> "CharCombination":
        if not isinstance(factor, (int, np.integer)):
            return NotImplemented
        return CharCombination(self.rank, {k: c * int(factor) for k, c in self.terms.items()})

    __rmul__ = __mul__

    def sorted_items(self) -> list[tuple[tuple[int, ...], int]]:
        return sorted(self.terms.items(), reverse=True)

    def to_expsum(self, grp: WeylGroup) -> ExpSum:
        result = ExpSum.zero(self.rank)
        for key, coeff in self.sorted_items():
            result = result + character(grp, Weight(key)) * coeff
        return result

    def to_json(self) -> list[dict]:
        return [{"highest_weight": list(k), "coeff": str(c)} for k, c in self.sorted_items()]

    @classmethod
    def from_json(cls, rank: int, data: Iterable[dict]) -> "CharCombination":
        return cls(rank, {tuple(item["highest_weight"]): int(item["coeff"]) for item in data})

    def __str__(self) -> str:
        parts = []
        for key, coeff in self.sorted_items():
            symbol = "χ_{" + ",".join(str(c) for c in key) + "}"
            sign = "-" if coeff < 0 else "+"
            magnitude = "" if abs(coeff) == 1 else str(abs(coeff))
            parts.append((sign, magnitude + symbol))
        if not parts:
            return "0"
        head_sign, head = parts[0]
        text = ("-" if head_sign == "-" else "") + head
        return text + "".join(f" {sign} {body}" for sign, body in parts[1:])

    def __repr__(self) -> str:
        return f"CharCombination({self})"


def _check_k(k: int):
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise ConstraintError(f"k must be a positive integer, got {k!r}")


def _fundamental_multiple(n: int, i: int, k: int) -> tuple[int, ...]:
    return tuple(k if m == i else 0 for m in range(n))


def _rho_minus_fundamental(n: int, j: int) -> tuple[int, ...]:
    return tuple(0 if m == j else 1 for m in range(n))


def jac_matrix(grp: WeylGroup, k: int) -> tuple[tuple[ExpSum, ...], ...]:
    """Jac(k) = [D_j(S(e^(k omega_i)))]."""
    _check_k(k)
    n = grp.rank
    rows = []
    for i in range(n):
        orbit_sum = S_sum(grp, Weight.fundamental(n, i) * k)
        rows.append(tuple(derivation_D(j, orbit_sum) for j in range(n)))
    return tuple(rows)


def adjugate_orbit_sum(grp: WeylGroup) -> tuple[tuple[ExpSum, ...], ...]:
    # (1/2) sum_w det(w) (omega_i, w(alpha_j^vee)) e^(w(rho - omega_j)), entry (i, j)
    n = grp.rank
    entries = [[None] * n for _ in range(n)]
    for j in range(n):
        images = weight_images(grp, _rho_minus_fundamental(n, j))
        keys = [tuple(int(x) for x in row) for row in images]
        for i in range(n):
            weights = grp.dets * grp.matrices[:, i, j].astype(np.int64)
            terms: dict[tuple, int] = {}
            for key, value in zip(keys, weights):
                if value:
                    terms[key] = terms.get(key, 0) + int(value)
            if any(c % 2 for c in terms.values()):
                raise ConsistencyError(f"adjugate entry ({i + 1},{j + 1}) has an odd coefficient before halving")
            entries[i][j] = ExpSum(n, {key: c // 2 for key, c in terms.items()})
    return tuple(tuple(row) for row in entries)


def orbit_sum_adjugate_applies(rs: RootSystem) -> bool:
    # Fails from B3 and C3 up: Jac(1) times the orbit sum has off-diagonal terms there
    return all(t.rank <= 2 or t.family in "ADE" for t in rs.lie_types)


@lru_cache(maxsize=8)
def _cofactor_adjugate(grp: WeylGroup) -> tuple[tuple[ExpSum, ...], ...]:
    n = grp.rank
    logger.debug("cofactor adjugate of Jac(1) for %s", grp.root_system.name)
    return laplace_adjugate(jac_matrix(grp, 1), ExpSum.zero(n), ExpSum.one(n))


def adjugate_jac1(grp: WeylGroup) -> tuple[tuple[ExpSum, ...], ...]:
    """Adj(Jac(1)), with Jac(1) Adj(Jac(1)) = J(e^rho) I for every type."""
    if orbit_sum_adjugate_applies(grp.root_system):
        return adjugate_orbit_sum(grp)
    return _cofactor_adjugate(grp)


def jac_adjugate_product(grp: WeylGroup, k: int) -> tuple[tuple[ExpSum, ...], ...]:
    return matrix_product(jac_matrix(grp, k), adjugate_jac1(grp), ExpSum.zero(grp.rank))


def d_coefficient(grp: WeylGroup, i: int, j: int, k: int, w1: WeylElement, w2: WeylElement) -> int:
    n = grp.rank
    _check_index(i, n)
    _check_index(j, n)
    _check_k(k)
    first = act_on_weight(w1, Weight(_fundamental_multiple(n, i, k)))
    second = act_on_weight(w2, Weight(_rho_minus_fundamental(n, j)))
    if not is_strictly_dominant(first + second):
        return 0
    return w2.det_sign * inner_product(first, act_on_coroot(w2, CorootVector.simple_coroot(n, j)))


def _sweep_chunk(first: np.ndarray, second: np.ndarray, columns: np.ndarray, dets: np.ndarray):
    # Pairs (a, b) with a + b strictly dominant and d = det(w2) (a, w2(alpha_j^vee)) nonzero
    sums = first[:, None, :] + second[None, :, :]
    d = (first @ columns.T) * dets[None, :]
    hit = np.all(sums > 0, axis=2) & (d != 0)
    rows, cols = np.nonzero(hit)
    return rows, cols, sums[rows, cols] - 1, d[rows, cols]


def _accumulate_chunk(first: np.ndarray, second: np.ndarray, columns: np.ndarray,
                      dets: np.ndarray) -> dict[tuple, int]:
    _, _, keys, values = _sweep_chunk(first, second, columns, dets)
    if not len(values):
        return {}
    unique, inverse = np.unique(keys, axis=0, return_inverse=True)
    totals = np.zeros(len(unique), dtype=np.int64)
    np.add.at(totals, inverse.ravel(), values)
    return {tuple(int(x) for x in key): int(total) for key, total in zip(unique, totals) if total}


def _chunks(first: np.ndarray, width: int) -> list[np.ndarray]:
    step = max(1, _CHUNK_ELEMENTS // max(1, width))
    return [first[start:start + step] for start in range(0, len(first), step)]


def _merge(partials: Iterable[dict], into: dict) -> dict:
    for partial in partials:
        for key, value in partial.items():
            into[key] = into.get(key, 0) + value
    return into


def _entry_numerators(first: np.ndarray, second: np.ndarray, columns: np.ndarray,
                      dets: np.ndarray, pool: ProcessPoolExecutor | None) -> dict[tuple, int]:
    chunks = _chunks(first, second.shape[0] * second.shape[1])
    if pool is None:
        partials = (_accumulate_chunk(chunk, second, columns, dets) for chunk in chunks)
    else:
        count = len(chunks)
        partials = pool.map(_accumulate_chunk, chunks, [second] * count, [columns] * count,
                            [dets] * count)
    return _merge(partials, {})


def stabilizer_shortcut_applies(rs: RootSystem, k: int) -> bool:
    """Whether only w1 in Stab(omega_i) contributes, so the w1 loop collapses to k omega_i."""
    # Holds from k = m_g on in rank <= 2; B3, C3 and D4 have contributions outside the stabilizer
    return k >= rs.m_g and all(t.rank <= 2 for t in rs.lie_types)


def _adjugate_seeds(grp: WeylGroup, j: int) -> tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]:
    # Column j of Adj(Jac(1)) as sum_beta e^beta gamma(beta), gamma in simple-coroot coordinates.
    # It is anti-invariant, gamma(w beta) = det(w) w(gamma(beta)), so the dominant beta determine it.
    n = grp.rank
    if orbit_sum_adjugate_applies(grp.root_system):
        return ((_rho_minus_fundamental(n, j), tuple(int(m == j) for m in range(n))),)
    column = [row[j] for row in _cofactor_adjugate(grp)]
    support = set().union(*(entry.terms for entry in column))
    seeds = []
    for beta in sorted(support, reverse=True):
        if min(beta) < 0:
            continue
        gamma = tuple(entry.terms.get(beta, 0) for entry in column)
        if any(gamma):
            seeds.append((beta, gamma))
    return tuple(seeds)


def _coroot_vector_images(grp: WeylGroup, gamma: tuple[int, ...]) -> np.ndarray:
    _guard(gamma, grp.root_system.m_g)
    return grp.matrices.astype(np.int64) @ np.asarray(gamma, dtype=np.int64)


def _pair_count(grp: WeylGroup, k: int, method: str, seeds: Sequence) -> int:
    # Largest number of (w1, w2) pairs swept for one entry
    n, rs = grp.rank, grp.root_system
    if method == "full":
        return grp.order * grp.order * max(len(column) for column in seeds)
    if stabilizer_shortcut_applies(rs, k):
        w1_count = 1
    else:
        w1_count = max(len(orbit_coords(rs, _fundamental_multiple(n, i, k))) for i in range(n))
    w2_count = max(sum(len(orbit_coords(rs, beta)) for beta, _ in column) for column in seeds)
    return w1_count * w2_count


def jacobian_characters(grp: WeylGroup, k: int, method: str = "pruned",
                        budget: int | None = None,
                        workers: int | None = None) -> tuple[tuple[CharCombination, ...], ...]:
    """J(P^k) as characters: entry (i, j) sums the pairs (w1(k omega_i), w2(beta)) over the
    dominant terms beta of column j of Adj(Jac(1)), keeping strictly dominant sums shifted by -rho."""
    _check_k(k)
    if method not in METHODS:
        raise ConstraintError(f"unknown method {method!r}, expected one of {METHODS}")
    settings = load_settings(workers=workers, max_pair_budget=budget)
    n = grp.rank
    seeds = [_adjugate_seeds(grp, j) for j in range(n)]
    pairs = _pair_count(grp, k, method, seeds)
    if pairs > settings.max_pair_budget:
        raise BudgetExceededError(pairs, settings.max_pair_budget)
    parallel = settings.workers > 1 and pairs * n * n > PARALLEL_PAIR_THRESHOLD
    logger.debug("%s sweep for %s, k=%d: %d pairs per entry, %s", method, grp.root_system.name,
                 k, pairs, f"{settings.workers} workers" if parallel else "in-process")

    pool = ProcessPoolExecutor(max_workers=settings.workers) if parallel else None
    try:
        rows = [[_entry(grp, i, k, method, seeds[j], pool) for j in range(n)] for i in range(n)]
    finally:
        if pool is not None:
            pool.shutdown()
    logger.info("character matrix of P^%d for %s (%s)", k, grp.root_system.name, method)
    return tuple(tuple(row) for row in rows)


def _entry(grp: WeylGroup, i: int, k: int, method: str, seeds: Sequence,
           pool: ProcessPoolExecutor | None) -> CharCombination:
    n = grp.rank
    top = _fundamental_multiple(n, i, k)
    if method == "full":
        first = weight_images(grp, top)
    elif stabilizer_shortcut_applies(grp.root_system, k):
        first = np.asarray([top], dtype=np.int64)
    else:
        _, first = coset_representatives(grp, top)

    numerators: dict[tuple, int] = {}
    for beta, gamma in seeds:
        columns = _coroot_vector_images(grp, gamma)
        if method == "full":
            second, dets = weight_images(grp, beta), grp.dets
        else:
            indices, second = coset_representatives(grp, beta)
            columns, dets = columns[indices], grp.dets[indices]
        partial = _entry_numerators(first, second, columns, dets, pool)
        if method == "full":
            # Each pair repeats |Stab(k omega_i)| |Stab(beta)| times
            divisor = stabilizer_size(grp, Weight(top)) * stabilizer_size(grp, Weight(beta))
            if any(value % divisor for value in partial.values()):
                raise ConsistencyError(f"row {i + 1} of the character matrix is not divisible by "
                                       f"|Stab(k omega_{i + 1})| |Stab({list(beta)})| = {divisor}")
            partial = {key: value // divisor for key, value in partial.items()}
        _merge([partial], numerators)
    return CharCombination(n, numerators)


def characters_from_adjugate(grp: WeylGroup, k: int) -> tuple[tuple[CharCombination, ...], ...]:
    n = grp.rank
    rows = []
    for i, row in enumerate(jac_adjugate_product(grp, k)):
        entries = []
        for j, entry in enumerate(row):
            if not is_anti_invariant(grp, entry):
                raise ConsistencyError(f"entry ({i + 1},{j + 1}) of Jac({k}) Adj(Jac(1)) is not anti-invariant")
            # An anti-invariant sum is sum_lambda c_lambda J(e^(lambda + rho))
            terms = {tuple(c - 1 for c in key): coeff for key, coeff in entry.terms.items()
                     if min(key) > 0}
            entries.append(CharCombination(n, terms))
        rows.append(tuple(entries))
    return tuple(rows)


@lru_cache(maxsize=4096)
def _character_polynomial(grp: WeylGroup, coords: tuple[int, ...]) -> YPolynomial:
    return express_in_y(grp, character(grp, Weight(coords)))


def character_polynomial(grp: WeylGroup, weight: Weight) -> YPolynomial:
    return _character_polynomial(grp, weight.coords)


def expand_to_polynomials(grp: WeylGroup, matrix: Sequence[Sequence[CharCombination]]
                          ) -> tuple[tuple[YPolynomial, ...], ...]:
    n = grp.rank
    rows = []
    for row in matrix:
        entries = []
        for combination in row:
            poly = YPolynomial.zero(n)
            for key, coeff in combination.sorted_items():
                poly = poly + _character_polynomial(grp, key) * coeff
            entries.append(poly)
        rows.append(tuple(entries))
    return tuple(rows)


def determinant(matrix: Sequence[Sequence[YPolynomial]]) -> YPolynomial:
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise ConstraintError("determinant of a non-square matrix")
    nvars = matrix[0][0].nvars if n else 0
    if n <= _LAPLACE_MAX:
        return laplace_determinant(matrix, YPolynomial.zero(nvars), YPolynomial.one(nvars))
    return _bareiss(matrix, nvars)


def _bareiss(matrix: Sequence[Sequence[YPolynomial]], nvars: int) -> YPolynomial:
    # Fraction-free elimination: every update divides exactly by the previous pivot
    m = [list(row) for row in matrix]
    n = len(m)
    sign, previous = 1, YPolynomial.one(nvars)
    for p in range(n - 1):
        if not m[p][p]:
            swap = next((r for r in range(p + 1, n) if m[r][p]), None)
            if swap is None:
                return YPolynomial.zero(nvars)
            m[p], m[swap] = m[swap], m[p]
            sign = -sign
        for r in range(p + 1, n):
            for c in range(p + 1, n):
                m[r][c] = (m[r][c] * m[p][p] - m[r][p] * m[p][c]).divide_exact(previous)
        previous = m[p][p]
    return m[n - 1][n - 1] * sign


# Lowest k for which each closed form holds
_CLOSED_FORM_THRESHOLD = {"A1": 1, "A2": 1, "A3": 1, "B2": 2, "G2": 3}


def _closed_form_a1(k: int):
    chi = CharCombination.chi
    return ((chi(k - 1),),)


def _closed_form_a2(k: int):
    chi = CharCombination.chi
    return ((chi(k - 1, 0), -chi(k - 2, 0)),
            (-chi(0, k - 2), chi(0, k - 1)))


def _closed_form_b2(k: int):
    # alpha_1 long, alpha_2 short, matching the B2 Cartan matrix
    chi = CharCombination.chi
    return ((chi(k - 1, 0) + chi(k - 2, 0), chi(k - 2, 1, coeff=-2)),
            (-chi(0, k - 2), chi(0, k - 1) + chi(0, k - 3)))


def _closed_form_g2(k: int):
    chi = CharCombination.chi
    return ((chi(k - 1, 0) + chi(k - 4, 0) + chi(k - 4, 1, coeff=2), -chi(k - 2, 0) - chi(k - 3, 0)),
            (chi(2, k - 2, coeff=-3) + chi(2, k - 3, coeff=-3),
             chi(0, k - 1) + chi(0, k - 2) + chi(1, k - 2, coeff=2)))


def _closed_form_a3(k: int):
    chi = CharCombination.chi
    return ((chi(k - 1, 0, 0), -chi(k - 2, 0, 0), chi(k - 3, 0, 0)),
            (chi(1, k - 3, 0) - chi(0, k - 2, 1), chi(0, k - 1, 0) - chi(0, k - 3, 0),
             chi(0, k - 3, 1) - chi(1, k - 2, 0)),
            (chi(0, 0, k - 3), -chi(0, 0, k - 2), chi(0, 0, k - 1)))


_CLOSED_FORMS = {"A1": _closed_form_a1, "A2": _closed_form_a2, "A3": _closed_form_a3,
                 "B2": _closed_form_b2, "G2": _closed_form_g2}


def closed_form_threshold(lie_type: "str | LieType") -> int | None:
    name = _type_name(lie_type)
    return _CLOSED_FORM_THRESHOLD.get(name)


def _type_name(lie_type: "str | LieType") -> str:
    if isinstance(lie_type, LieType):
        return str(lie_type)
    types = parse_type(lie_type)
    if len(types) != 1:
        return "x".join(str(t) for t in types)
    return str(types[0])


def closed_form_table(lie_type: "str | LieType", k: int,
                      enforce_threshold: bool = True) -> tuple[tuple[CharCombination, ...], ...]:
    """The closed-form character matrix of J(P^k) for A1, A2, A3, B2 and G2."""
    _check_k(k)
    name = _type_name(lie_type)
    if name not in _CLOSED_FORMS:
        raise ConstraintError(f"no closed form is known for {name}; "
                              f"available: {', '.join(sorted(_CLOSED_FORMS))}")
    threshold = _CLOSED_FORM_THRESHOLD[name]
    if enforce_threshold and k < threshold:
        raise ConstraintError(f"the closed form for {name} holds for k >= {threshold}, got k = {k}")
    return tuple(tuple(entry * k for entry in row) for row in _CLOSED_FORMS[name](k))


def nonstabilizer_contributions(grp: WeylGroup, i: int, j: int, k: int) -> tuple[tuple[int, int], ...]:
    n = grp.rank
    _check_index(i, n)
    _check_index(j, n)
    _check_k(k)
    top = _fundamental_multiple(n, i, k)
    first = weight_images(grp, top)
    outside = np.flatnonzero(np.any(first != np.asarray(top, dtype=np.int64), axis=1))
    second = weight_images(grp, _rho_minus_fundamental(n, j))
    columns = coroot_images(grp, j)
    found = []
    for chunk in _chunks(outside, second.shape[0] * n):
        rows, cols, _, _ = _sweep_chunk(first[chunk], second, columns, grp.dets)
        found.extend((int(chunk[r]), int(c)) for r, c in zip(rows, cols))
    return tuple(sorted(found))


def highest_coeff_pruning_check(grp: WeylGroup, k: int) -> bool:
    """Whether every nonzero d_ij^k(w1, w2) has w1 in Stab(omega_i), for k >= m_g."""
    _check_k(k)
    m_g = grp.root_system.m_g
    if k < m_g:
        raise ConstraintError(f"the pruning claim applies for k >= m_g = {m_g}, got k = {k}")
    n = grp.rank
    return all(not nonstabilizer_contributions(grp, i, j, k) for i in range(n) for j in range(n))


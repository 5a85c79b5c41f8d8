import logging
import time
from typing import Callable, Iterable

import numpy as np
import pandas as pd

from .cheby import chebyshev_map, compose, jacobian_symbolic, normalized_chebyshev_first
from .config import Settings, load_settings
from .errors import ChebylieError
from .exalg import (ExpSum, J_sum, character, determinant as expsum_determinant, dimension,
                    is_anti_invariant, weyl_dimension)
from .jacchar import (adjugate_jac1, character_polynomial,
                      characters_from_adjugate, closed_form_table, closed_form_threshold,
                      determinant, expand_to_polynomials, highest_coeff_pruning_check,
                      jac_adjugate_product, jac_matrix, jacobian_characters,
                      orbit_sum_adjugate_applies, stabilizer_shortcut_applies)
from .rootsys import Weight, build_root_system
from .util import matrix_product
from .weyl import WeylGroup, enumerate_group, max_abs_entry

logger = logging.getLogger(__name__)

COLUMNS = ["check", "type", "k", "passed", "detail", "seconds"]
DEFAULT_KS = (1, 2, 3)
# P^k o P^l = P^(kl) is checked against this l in run_suite
COMPOSITION_PARTNER = 2

# The acceptance grid
ORDER_TYPES = ("A1", "A2", "A3", "A4", "A5", "A6", "B2", "B3", "B4", "B5", "C3", "C4", "C5",
               "D4", "D5", "G2", "F4", "E6")
IDENTITY_TYPES = ("A1", "A2", "A3", "B2", "B3", "G2", "F4")
ORACLE_TYPES = ("A1", "A2", "A3", "B2", "B3", "C3", "G2")
ORACLE_KS = (1, 2, 3, 4)
CLOSED_FORM_KS = {"A1": range(1, 9), "A2": range(1, 7), "B2": range(2, 7), "G2": range(3, 6),
                  "A3": range(1, 5)}
RECURRENCE_KS = range(1, 13)
COMPOSITION_TYPES = ("A2", "B2")
COMPOSITION_KS = (2, 3)
DIMENSION_TYPES = ("G2",)


def _timed(rows: list, check: str, type_name: str, k: int | None,
           func: Callable[[], tuple[bool, str]]):
    start = time.perf_counter()
    try:
        passed, detail = func()
    except ChebylieError as e:
        passed, detail = False, f"{type(e).__name__}: {e}"
    seconds = time.perf_counter() - start
    logger.debug("%s %s k=%s: %s (%.3fs)", check, type_name, k, "ok" if passed else "FAILED", seconds)
    rows.append({"check": check, "type": type_name, "k": k, "passed": bool(passed),
                 "detail": detail, "seconds": round(seconds, 4)})


def check_weyl_order(grp: WeylGroup) -> tuple[bool, str]:
    rs = grp.root_system
    expected = int(np.prod(rs.degrees))
    return grp.order == expected == rs.weyl_order, f"|W| = {grp.order}, product of degrees {expected}"


def check_m_g(grp: WeylGroup) -> tuple[bool, str]:
    found = max_abs_entry(grp)
    return found == grp.root_system.m_g, f"max |T_w| entry {found}, m_g {grp.root_system.m_g}"


def check_steinberg(grp: WeylGroup) -> tuple[bool, str]:
    det = expsum_determinant(jac_matrix(grp, 1))
    return det == J_sum(grp, Weight.rho(grp.rank)), f"det Jac(1) has {len(det)} terms"


def check_adjugate(grp: WeylGroup) -> tuple[bool, str]:
    n = grp.rank
    product = matrix_product(jac_matrix(grp, 1), adjugate_jac1(grp), ExpSum.zero(n))
    denominator = J_sum(grp, Weight.rho(n))
    bad = [(i + 1, j + 1) for i in range(n) for j in range(n)
           if product[i][j] != (denominator if i == j else 0)]
    if bad:
        return False, f"mismatched entries {bad}"
    source = "orbit sum" if orbit_sum_adjugate_applies(grp.root_system) else "cofactors"
    return True, f"Jac(1) Adj(Jac(1)) = J(e^rho) I, adjugate from {source}"


def check_character_dimensions(grp: WeylGroup) -> tuple[bool, str]:
    n = grp.rank
    found = [dimension(character(grp, Weight.fundamental(n, i))) for i in range(n)]
    expected = [weyl_dimension(grp.root_system, Weight.fundamental(n, i)) for i in range(n)]
    return found == expected, f"dim chi_(omega_i) = {found}, Weyl dimension formula {expected}"


def _mismatches(left, right) -> list[tuple[int, int]]:
    return [(i + 1, j + 1) for i, row in enumerate(left) for j, entry in enumerate(row)
            if entry != right[i][j]]


def _characters(grp: WeylGroup, k: int, settings: Settings, method: str = "pruned"):
    return jacobian_characters(grp, k, method, settings.max_pair_budget, settings.workers)


def check_oracle(grp: WeylGroup, k: int, settings: Settings) -> tuple[bool, str]:
    bad = _mismatches(expand_to_polynomials(grp, _characters(grp, k, settings)),
                      jacobian_symbolic(grp, k))
    return not bad, "character path = symbolic path" if not bad else f"mismatched entries {bad}"


def check_coset_consistency(grp: WeylGroup, k: int, settings: Settings) -> tuple[bool, str]:
    bad = _mismatches(_characters(grp, k, settings), _characters(grp, k, settings, "full"))
    return not bad, "full W x W sum = coset sum" if not bad else f"mismatched entries {bad}"


def check_exponential_path(grp: WeylGroup, k: int, settings: Settings) -> tuple[bool, str]:
    product = jac_adjugate_product(grp, k)
    if not all(is_anti_invariant(grp, entry) for row in product for entry in row):
        return False, "Jac(k) Adj(Jac(1)) has an entry that is not anti-invariant"
    bad = _mismatches(characters_from_adjugate(grp, k), _characters(grp, k, settings))
    return not bad, "adjugate path = character path" if not bad else f"mismatched entries {bad}"


def check_determinant(grp: WeylGroup, k: int, settings: Settings) -> tuple[bool, str]:
    n = grp.rank
    expected = character_polynomial(grp, Weight.rho(n) * (k - 1)) * k**n
    symbolic = determinant(jacobian_symbolic(grp, k))
    characters = determinant(expand_to_polynomials(grp, _characters(grp, k, settings)))
    passed = symbolic == expected and characters == expected
    return passed, f"det = {k}^{n} chi_(k-1)rho = {expected}" if passed else f"det = {symbolic}, expected {expected}"


def check_closed_form(grp: WeylGroup, k: int, settings: Settings) -> tuple[bool, str]:
    bad = _mismatches(_characters(grp, k, settings), closed_form_table(grp.root_system.name, k))
    return not bad, "closed form reproduced" if not bad else f"mismatched entries {bad}"


def check_closed_form_below_threshold(grp: WeylGroup, k: int, settings: Settings) -> tuple[bool, str]:
    table = closed_form_table(grp.root_system.name, k, enforce_threshold=False)
    bad = _mismatches(_characters(grp, k, settings), table)
    return bool(bad), f"closed form differs at entries {bad}" if bad else "closed form unexpectedly holds"


def check_recurrence(grp: WeylGroup, k: int) -> tuple[bool, str]:
    component = chebyshev_map(grp, k).components[0]
    expected = normalized_chebyshev_first(k)
    return component == expected, f"P^{k} = T_{k} = {expected}"


def check_composition(grp: WeylGroup, k: int, l: int = COMPOSITION_PARTNER) -> tuple[bool, str]:
    left = compose(chebyshev_map(grp, k), chebyshev_map(grp, l))
    right = compose(chebyshev_map(grp, l), chebyshev_map(grp, k))
    product = chebyshev_map(grp, k * l)
    passed = left == product and right == product
    return passed, f"P^{k} o P^{l} = P^{l} o P^{k} = P^{k * l}"


def check_pruning_claim(grp: WeylGroup, k: int) -> tuple[bool, str]:
    # A failing claim only matters where the pruned sweep relies on it
    holds = highest_coeff_pruning_check(grp, k)
    used = stabilizer_shortcut_applies(grp.root_system, k)
    detail = (f"claim {'holds' if holds else 'fails'} at k = {k} >= m_g = {grp.root_system.m_g}, "
              f"shortcut {'used' if used else 'not used'}")
    return holds or not used, detail


class _Runner:
    def __init__(self, settings: Settings):
        self.settings = settings
        self.rows: list[dict] = []
        self._groups: dict[str, WeylGroup] = {}

    def group(self, type_string: str) -> WeylGroup:
        if type_string not in self._groups:
            rs = build_root_system(type_string)
            self._groups[type_string] = enumerate_group(rs, self.settings.max_weyl_order)
        return self._groups[type_string]

    def add(self, check: str, grp: WeylGroup, k: int | None, func: Callable[[], tuple[bool, str]]):
        _timed(self.rows, check, grp.root_system.name, k, func)

    def report(self) -> pd.DataFrame:
        report = pd.DataFrame(self.rows, columns=COLUMNS)
        # per-type checks carry no k
        report["k"] = pd.Series([row["k"] for row in self.rows], dtype=object)
        logger.info("%d of %d checks passed", int(report["passed"].sum()), len(report))
        return report


def _type_rows(runner: _Runner, type_string: str, ks: tuple[int, ...]):
    grp = runner.group(type_string)
    rs, settings = grp.root_system, runner.settings
    runner.add("weyl_order", grp, None, lambda: check_weyl_order(grp))
    runner.add("m_g", grp, None, lambda: check_m_g(grp))
    runner.add("steinberg", grp, None, lambda: check_steinberg(grp))
    runner.add("adjugate", grp, None, lambda: check_adjugate(grp))
    runner.add("character_dimensions", grp, None, lambda: check_character_dimensions(grp))
    threshold = closed_form_threshold(rs.name) if len(rs.lie_types) == 1 else None
    for k in ks:
        runner.add("oracle", grp, k, lambda: check_oracle(grp, k, settings))
        runner.add("coset_consistency", grp, k, lambda: check_coset_consistency(grp, k, settings))
        runner.add("exponential_path", grp, k, lambda: check_exponential_path(grp, k, settings))
        runner.add("determinant", grp, k, lambda: check_determinant(grp, k, settings))
        if threshold is not None and k >= threshold:
            runner.add("closed_form", grp, k, lambda: check_closed_form(grp, k, settings))
        if rs.name == "A1":
            runner.add("recurrence", grp, k, lambda: check_recurrence(grp, k))
        runner.add("composition", grp, k, lambda: check_composition(grp, k))
        if k >= rs.m_g:
            runner.add("pruning_claim", grp, k, lambda: check_pruning_claim(grp, k))


def run_suite(types: Iterable[str], ks: Iterable[int] = DEFAULT_KS,
              settings: Settings | None = None) -> pd.DataFrame:
    """Run every identity check for each type and k, one row per check."""
    runner = _Runner(settings or load_settings())
    ks = tuple(ks)
    for type_string in types:
        logger.info("verifying %s for k in %s", type_string, ks)
        _type_rows(runner, type_string, ks)
    return runner.report()


def run_acceptance(settings: Settings | None = None) -> pd.DataFrame:
    """The fixed acceptance grid: group orders, identities, oracles and closed forms."""
    runner = _Runner(settings or load_settings())
    settings = runner.settings
    for name in ORDER_TYPES:
        grp = runner.group(name)
        runner.add("weyl_order", grp, None, lambda: check_weyl_order(grp))
        runner.add("m_g", grp, None, lambda: check_m_g(grp))
    for name in IDENTITY_TYPES:
        grp = runner.group(name)
        runner.add("steinberg", grp, None, lambda: check_steinberg(grp))
        runner.add("adjugate", grp, None, lambda: check_adjugate(grp))
    for name in ORACLE_TYPES:
        grp = runner.group(name)
        for k in ORACLE_KS:
            runner.add("oracle", grp, k, lambda: check_oracle(grp, k, settings))
            runner.add("coset_consistency", grp, k, lambda: check_coset_consistency(grp, k, settings))
            runner.add("exponential_path", grp, k, lambda: check_exponential_path(grp, k, settings))
            runner.add("determinant", grp, k, lambda: check_determinant(grp, k, settings))
            if k >= grp.root_system.m_g:
                runner.add("pruning_claim", grp, k, lambda: check_pruning_claim(grp, k))
    for name, ks in CLOSED_FORM_KS.items():
        grp = runner.group(name)
        for k in ks:
            runner.add("closed_form", grp, k, lambda: check_closed_form(grp, k, settings))
    g2 = runner.group("G2")
    runner.add("closed_form_below_threshold", g2, 2, lambda: check_closed_form_below_threshold(g2, 2, settings))
    a1 = runner.group("A1")
    for k in RECURRENCE_KS:
        runner.add("recurrence", a1, k, lambda: check_recurrence(a1, k))
    for name in COMPOSITION_TYPES:
        grp = runner.group(name)
        for k in COMPOSITION_KS:
            for l in COMPOSITION_KS:
                runner.add("composition", grp, k, lambda: check_composition(grp, k, l))
    for name in DIMENSION_TYPES:
        grp = runner.group(name)
        runner.add("character_dimensions", grp, None, lambda: check_character_dimensions(grp))
    return runner.report()


def all_passed(report: pd.DataFrame) -> bool:
    return bool(report["passed"].all()) if len(report) else True

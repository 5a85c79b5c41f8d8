import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .config import load_settings
from .errors import ConsistencyError, ConstraintError, CoordinateOverflowError, GroupTooLargeError
from .rootsys import (CorootVector, RootSystem, Weight, _check_index, _reflect_weight,
                      is_dominant)

logger = logging.getLogger(__name__)

# Matrix entries are bounded by m_g <= 6, so group storage uses int8
_STORAGE = np.int8
_ACTION_BOUND = 2**62


def _key(matrix: np.ndarray) -> bytes:
    return np.ascontiguousarray(matrix, dtype=_STORAGE).tobytes()


@dataclass(frozen=True, eq=False)
class WeylElement:
    """T_w = [(omega_i, w(alpha_j^vee))] with its inverse, determinant and length."""
    matrix: np.ndarray
    inverse: np.ndarray
    det_sign: int
    length: int

    @property
    def key(self) -> bytes:
        return _key(self.matrix)

    @property
    def rank(self) -> int:
        return self.matrix.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeylElement):
            return NotImplemented
        return self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"WeylElement({self.matrix.tolist()}, det={self.det_sign}, length={self.length})"


def _readonly(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=np.int64)
    array.setflags(write=False)
    return array


def _reflection_matrix(rs: RootSystem, i: int) -> np.ndarray:
    # Identity with the i-th row of the Cartan matrix subtracted from row i
    matrix = np.eye(rs.rank, dtype=np.int64)
    matrix[i] -= rs.cartan[i]
    return matrix


def simple_reflection(rs: RootSystem, i: int) -> WeylElement:
    _check_index(i, rs.rank)
    matrix = _readonly(_reflection_matrix(rs, i))
    return WeylElement(matrix=matrix, inverse=matrix, det_sign=-1, length=1)


class WeylGroup:
    """Enumerated Weyl group, stored as stacked integer matrices in BFS order."""

    def __init__(self, root_system: RootSystem, matrices: np.ndarray, inverses: np.ndarray,
                 lengths: np.ndarray):
        self.root_system = root_system
        self.matrices = matrices
        self.inverses = inverses
        self.lengths = lengths
        self.dets = np.where(lengths % 2 == 0, 1, -1).astype(np.int64)
        for array in (self.matrices, self.inverses, self.lengths, self.dets):
            array.setflags(write=False)
        self._index = {_key(m): t for t, m in enumerate(matrices)}
        # BFS order puts sigma_1..sigma_n right after the identity
        self.generators = tuple(self[t] for t in range(1, root_system.rank + 1))

    @property
    def order(self) -> int:
        return len(self.lengths)

    @property
    def rank(self) -> int:
        return self.root_system.rank

    def __len__(self) -> int:
        return self.order

    def __getitem__(self, t: int) -> WeylElement:
        return WeylElement(matrix=_readonly(self.matrices[t]),
                           inverse=_readonly(self.inverses[t]),
                           det_sign=int(self.dets[t]),
                           length=int(self.lengths[t]))

    def __iter__(self):
        return (self[t] for t in range(self.order))

    def __contains__(self, element: WeylElement) -> bool:
        return element.key in self._index

    def __repr__(self) -> str:
        return f"WeylGroup({self.root_system.name}, order={self.order})"

    @property
    def identity(self) -> WeylElement:
        return self[0]

    def index_of(self, element: "WeylElement | np.ndarray") -> int:
        matrix = element.matrix if isinstance(element, WeylElement) else element
        try:
            return self._index[_key(matrix)]
        except KeyError:
            raise ConstraintError("matrix is not an element of this Weyl group") from None

    def product(self, w1: WeylElement, w2: WeylElement) -> WeylElement:
        # T_{w1 w2} = T_{w1} T_{w2}
        return self[self.index_of(w1.matrix @ w2.matrix)]


def enumerate_group(rs: RootSystem, max_order: int | None = None) -> WeylGroup:
    cap = load_settings().max_weyl_order if max_order is None else max_order
    if rs.weyl_order > cap:
        raise GroupTooLargeError(rs.weyl_order, cap)
    return _enumerate_group(rs)


@lru_cache(maxsize=8)
def _enumerate_group(rs: RootSystem) -> WeylGroup:
    n, order = rs.rank, rs.weyl_order
    logger.debug("enumerating Weyl group of %s (%d elements)", rs.name, order)
    generators = [_reflection_matrix(rs, i) for i in range(n)]

    matrices = np.zeros((order, n, n), dtype=_STORAGE)
    inverses = np.zeros((order, n, n), dtype=_STORAGE)
    lengths = np.zeros(order, dtype=np.int32)
    matrices[0] = np.eye(n, dtype=_STORAGE)
    inverses[0] = np.eye(n, dtype=_STORAGE)
    seen = {_key(matrices[0])}
    count, start, depth = 1, 0, 0

    # Breadth-first closure by right multiplication: T_{ws} = T_w T_s
    while start < count:
        end = count
        depth += 1
        for s in generators:
            candidates = matrices[start:end].astype(np.int64) @ s
            candidate_inverses = s @ inverses[start:end].astype(np.int64)
            if np.abs(candidates).max() > np.iinfo(_STORAGE).max:
                raise ConsistencyError(f"Weyl matrix entry out of range while enumerating {rs.name}")
            candidates = candidates.astype(_STORAGE)
            for row, inverse in zip(candidates, candidate_inverses):
                key = row.tobytes()
                if key in seen:
                    continue
                if count >= order:
                    raise ConsistencyError(f"enumeration of {rs.name} exceeded |W| = {order}")
                seen.add(key)
                matrices[count] = row
                inverses[count] = inverse
                lengths[count] = depth
                count += 1
        start = end

    if count != order:
        raise ConsistencyError(f"enumerated {count} elements for {rs.name}, expected {order}")
    logger.debug("enumerated %s: %d elements, longest length %d", rs.name, count, depth - 1)
    return WeylGroup(rs, matrices, inverses, lengths)


def _check_rank(expected: int, got: int):
    if expected != got:
        raise ConstraintError(f"rank mismatch: element of rank {expected}, vector of rank {got}")


def _guard(coords, factor: int):
    # Products stay inside int64 when |coord| * n * max|entry| < 2^62
    if coords and max(abs(c) for c in coords) * len(coords) * factor >= _ACTION_BOUND:
        raise CoordinateOverflowError("Weyl action would overflow 64-bit coordinates")


def act_on_weight(w: WeylElement, weight: Weight) -> Weight:
    # Row vector [lambda] times T_w^{-1}; sigma_i(omega_j) = omega_j - delta_ij alpha_i
    _check_rank(w.rank, weight.rank)
    _guard(weight.coords, int(np.abs(w.inverse).max()))
    return Weight(tuple(int(x) for x in np.asarray(weight.coords, dtype=np.int64) @ w.inverse))


def act_on_coroot(w: WeylElement, coroot: CorootVector) -> CorootVector:
    # Column vector [gamma] multiplied by T_w on the left
    _check_rank(w.rank, coroot.rank)
    _guard(coroot.coords, int(np.abs(w.matrix).max()))
    return CorootVector(tuple(int(x) for x in w.matrix @ np.asarray(coroot.coords, dtype=np.int64)))


def weight_images(grp: WeylGroup, coords) -> np.ndarray:
    coords = tuple(int(c) for c in coords)
    _check_rank(grp.rank, len(coords))
    _guard(coords, grp.root_system.m_g)
    return np.asarray(coords, dtype=np.int64) @ grp.inverses.astype(np.int64)


def coroot_images(grp: WeylGroup, j: int) -> np.ndarray:
    """w(alpha_j^vee) for every w: the j-th columns of the T_w."""
    _check_index(j, grp.rank)
    return grp.matrices[:, :, j].astype(np.int64)


@lru_cache(maxsize=4096)
def orbit_coords(rs: RootSystem, coords: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    # Closure under the simple reflections, starting from coords
    seen = {coords: None}
    frontier = [coords]
    while frontier:
        next_frontier = []
        for v in frontier:
            for i in range(rs.rank):
                u = _reflect_weight(rs, v, i)
                if u not in seen:
                    seen[u] = None
                    next_frontier.append(u)
        frontier = next_frontier
    return tuple(seen)


def orbit(grp: WeylGroup, weight: Weight) -> tuple[Weight, ...]:
    _check_rank(grp.rank, weight.rank)
    return tuple(Weight(c) for c in orbit_coords(grp.root_system, weight.coords))


def stabilizer_size(grp: WeylGroup, weight: Weight) -> int:
    size = len(orbit_coords(grp.root_system, weight.coords))
    if grp.order % size:
        raise ConsistencyError(f"orbit size {size} does not divide |W| = {grp.order}")
    return grp.order // size


def stabilizer(grp: WeylGroup, weight: Weight) -> tuple[int, ...]:
    images = weight_images(grp, weight.coords)
    mask = np.all(images == np.asarray(weight.coords, dtype=np.int64), axis=1)
    return tuple(int(t) for t in np.flatnonzero(mask))


def coset_representatives(grp: WeylGroup, coords) -> tuple[np.ndarray, np.ndarray]:
    """First BFS index reaching each orbit point, and the points themselves."""
    images = weight_images(grp, coords)
    _, first = np.unique(images, axis=0, return_index=True)
    first = np.sort(first)
    return first, images[first]


def dominant_representative(rs: RootSystem, weight: Weight) -> tuple[Weight, int]:
    """Dominant weight in the orbit, and the number of reflections used."""
    coords, steps = weight.coords, 0
    while not is_dominant(Weight(coords)):
        i = next(m for m, c in enumerate(coords) if c < 0)
        coords = _reflect_weight(rs, coords, i)
        steps += 1
    return Weight(coords), steps


def max_abs_entry(grp: WeylGroup) -> int:
    return int(np.abs(grp.matrices.astype(np.int64)).max())


def longest_element(grp: WeylGroup) -> WeylElement:
    return grp[int(np.argmax(grp.lengths))]

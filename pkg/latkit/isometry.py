"""
Isometries and automorphism groups of definite lattices.

Automorphisms are found by backtracking over the images of a chain of short
vectors that spans the lattice. The group order is the product of the orbit
lengths along the pointwise stabilizer chain of that sequence, so groups such
as Aut(E_7) are counted without listing their elements.
"""
import itertools
import logging
import math
from collections import Counter, deque
from fractions import Fraction
from typing import List, NamedTuple, Optional

import numpy as np

from latkit.constants import Constants
from latkit.exceptions.latkit_exception import (LatkitCalculationException, LatkitValidationException,
                                                ResourceLimitException)
from latkit.fqm import closure_of_maps, discriminant_module, induced_map, FqmMap
from latkit.input import DEFAULT_LIMITS
from latkit.lattice import Lattice, make_standard, orthogonal_complement, span
from latkit.linalg import (as_key, elementary_divisors, identity, inertia_ldlt, int_matrix, integer_inverse,
                           is_integral, pair_reduce, rational_inverse, rational_rank, to_int, vector_gcd)
from latkit.validators import definite_lattice, unimodular_ambient

logger = logging.getLogger(__name__)


class Isometry:
    """
    Integer matrix g acting on row coordinates by x -> x @ g.

    When ``lattice`` is given the matrix must satisfy g G g^T = G.
    """

    def __init__(self, matrix, lattice: Lattice = None):
        matrix = int_matrix(matrix.tolist() if isinstance(matrix, np.ndarray) else matrix)
        if matrix.shape[0] != matrix.shape[1]:
            raise LatkitValidationException("Isometry matrix {0} is not square.".format(matrix.tolist()))
        if lattice is not None and not np.array_equal(matrix.dot(lattice.gram).dot(matrix.T), lattice.gram):
            raise LatkitValidationException("Matrix {0} does not preserve the Gram matrix.".format(matrix.tolist()))
        matrix.flags.writeable = False
        self.matrix = matrix
        self.lattice = lattice
        self._key = as_key(matrix)

    @property
    def rank(self) -> int:
        return self.matrix.shape[0]

    def apply(self, vector) -> tuple:
        return as_key(np.asarray(vector, dtype=object).dot(self.matrix))

    def compose(self, other: 'Isometry') -> 'Isometry':
        """This isometry followed by ``other``."""
        return Isometry._trusted(self.matrix.dot(other.matrix), self.lattice)

    def inverse(self) -> 'Isometry':
        return Isometry._trusted(integer_inverse(self.matrix), self.lattice)

    def negate(self) -> 'Isometry':
        return Isometry._trusted(-self.matrix, self.lattice)

    def is_identity(self) -> bool:
        return np.array_equal(self.matrix, identity(self.rank))

    def preserves(self, gram) -> bool:
        return np.array_equal(self.matrix.dot(gram).dot(self.matrix.T), np.asarray(gram, dtype=object))

    @classmethod
    def _trusted(cls, matrix, lattice=None) -> 'Isometry':
        out = cls.__new__(cls)
        matrix = np.asarray(matrix, dtype=object)
        matrix.flags.writeable = False
        out.matrix = matrix
        out.lattice = lattice
        out._key = as_key(matrix)
        return out

    @classmethod
    def identity(cls, lattice: Lattice) -> 'Isometry':
        return cls._trusted(identity(lattice.rank), lattice)

    def to_json(self) -> dict:
        return {"matrix": [[int(x) for x in row] for row in self.matrix.tolist()]}

    def __eq__(self, other):
        return isinstance(other, Isometry) and self._key == other._key

    def __lt__(self, other):
        return self._key < other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return 'Isometry({0})'.format(self.matrix.tolist())


def isometry_from_json(source, lattice: Lattice = None) -> Isometry:
    if not isinstance(source, dict) or set(source) != {'matrix'}:
        raise LatkitValidationException("Isometry JSON must be an object with exactly a 'matrix' field.")
    matrix = source['matrix']
    if not isinstance(matrix, list) or any(not isinstance(x, int) or isinstance(x, bool)
                                           for row in matrix for x in (row if isinstance(row, list) else [None])):
        raise LatkitValidationException("'matrix' must be a list of integer rows.")
    return Isometry(matrix, lattice)


class IsometryGroup:
    """
    Finite group of isometries of a lattice, stored as generators plus the exact order.
    """

    def __init__(self, lattice: Lattice, generators, order: int, limits=None):
        self.lattice = lattice
        self.generators = sorted(set(g for g in generators if not g.is_identity()))
        self.order = int(order)
        self.limits = limits or DEFAULT_LIMITS
        self._elements = None

    @property
    def identity(self) -> Isometry:
        return Isometry.identity(self.lattice)

    def elements(self) -> List[Isometry]:
        """Breadth-first enumeration from the identity, in generator order."""
        if self._elements is None:
            if self.order > self.limits.max_group_order:
                raise ResourceLimitException('ERROR 32: group of order {0} exceeds {1} elements.'.format(
                    self.order, self.limits.max_group_order))
            seen = {self.identity}
            out = [self.identity]
            queue = deque(out)
            while queue:
                current = queue.popleft()
                for g in self.generators:
                    nxt = current.compose(g)
                    if nxt not in seen:
                        seen.add(nxt)
                        out.append(nxt)
                        queue.append(nxt)
                        if len(out) > self.order:
                            raise LatkitCalculationException(
                                "Generators produce more than the recorded {0} elements.".format(self.order))
            self._elements = out
        return self._elements

    def __contains__(self, isometry: Isometry) -> bool:
        return isometry in set(self.elements())

    def __len__(self):
        return self.order

    def orbit(self, vector) -> List[tuple]:
        return list(_orbit_transversal(self.generators, as_key(vector), lambda p, g: g.apply(p)))

    def stabilizer(self, vector) -> 'IsometryGroup':
        """Pointwise stabilizer of a vector via Schreier generators."""
        return _schreier_subgroup(self, as_key(vector), lambda p, g: g.apply(p))

    def centralizer(self, isometry: Isometry) -> 'IsometryGroup':
        """Elements commuting with ``isometry`` (stabilizer under conjugation)."""
        return _schreier_subgroup(self, isometry, lambda h, g: g.inverse().compose(h).compose(g))

    def verify_order(self) -> int:
        """Recompute the order as |orbit of e_1| times an independently counted stabilizer."""
        if not self.lattice.is_definite():
            return len(self.elements())
        if not self.lattice.rank:
            return 1
        e1 = tuple(int(i == 0) for i in range(self.lattice.rank))
        stabilizer = automorphism_group(self.lattice, limits=self.limits, fixing=(e1,))
        return len(self.orbit(e1)) * stabilizer.order

    def to_json(self) -> dict:
        return {"order": self.order, "generators": [g.to_json() for g in self.generators]}

    def __repr__(self):
        return 'IsometryGroup(order={0}, generators={1})'.format(self.order, len(self.generators))


def _orbit_transversal(generators, point, act) -> dict:
    """Orbit of ``point`` mapped to a group element carrying ``point`` there."""
    transversal = {point: None}
    queue = deque([point])
    while queue:
        current = queue.popleft()
        for g in generators:
            image = act(current, g)
            if image not in transversal:
                word = transversal[current]
                transversal[image] = g if word is None else word.compose(g)
                queue.append(image)
    return transversal


def _schreier_subgroup(group: IsometryGroup, point, act) -> IsometryGroup:
    transversal = _orbit_transversal(group.generators, point, act)
    if group.order % len(transversal):
        raise LatkitCalculationException("Orbit length {0} does not divide {1}.".format(len(transversal), group.order))
    ident = group.identity
    generators = set()
    for p, word in transversal.items():
        word = word or ident
        for g in group.generators:
            back = transversal[act(p, g)] or ident
            s = word.compose(g).compose(back.inverse())
            if not s.is_identity():
                generators.add(s)
    return IsometryGroup(group.lattice, generators, group.order // len(transversal), group.limits)


def centralizer_and_stabilizer(group: IsometryGroup, target) -> IsometryGroup:
    """Centralizer of an isometry, or stabilizer of a vector, inside ``group``."""
    if group.order > group.limits.max_group_order:
        raise ResourceLimitException('ERROR 32: group of order {0} exceeds {1}.'.format(
            group.order, group.limits.max_group_order))
    if isinstance(target, Isometry):
        return group.centralizer(target)
    return group.stabilizer(target)


# -- short vectors -----------------------------------------------------------------------

def _normalized_gram(lattice: Lattice):
    """(sign, gram) with sign * gram positive definite."""
    if not lattice.rank:
        return 1, lattice.gram
    inertia = inertia_ldlt(lattice.gram)
    sign = 1 if inertia.n_plus else -1
    return sign, lattice.gram * sign


def _quadratic_coefficients(gram) -> list:
    """Coefficients q with x G x^T = sum_i q_ii (x_i + sum_{j>i} q_ij x_j)^2."""
    n = len(gram)
    q = [[Fraction(x) for x in row] for row in gram]
    for i in range(n):
        for j in range(i + 1, n):
            q[j][i] = q[i][j]
            q[i][j] = q[i][j] / q[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                q[k][l] -= q[k][i] * q[i][l]
    return q


def _enumerate(gram, bound: int) -> list:
    """All nonzero x with 0 < x G x^T <= bound, both signs."""
    n = len(gram)
    q = _quadratic_coefficients(gram)
    x = [0] * n
    found = []

    def descend(i, remaining):
        center = -sum((q[i][j] * x[j] for j in range(i + 1, n)), Fraction(0))
        reach = math.isqrt(math.floor(remaining / q[i][i])) + 1
        for value in range(math.floor(center) - reach, math.ceil(center) + reach + 1):
            rest = remaining - q[i][i] * (value - center) ** 2
            if rest < 0:
                continue
            x[i] = value
            if i == 0:
                if any(x):
                    found.append((tuple(x), int(bound - rest)))
            else:
                descend(i - 1, rest)
        x[i] = 0

    if n:
        descend(n - 1, Fraction(bound))
    return found


def _canonical_sign(v) -> bool:
    first = next((a for a in v if a), 0)
    return first > 0


@definite_lattice
def short_vectors(lattice: Lattice, bound: int) -> list:
    """Vectors with |norm| <= bound, one of each pair +-v.

    Parameters
    ----------
        lattice:
            definite lattice, either sign
        bound:
            nonnegative integer bound on |x.x|

    Returns
    -------
    pairs:
        lexicographically sorted list of (vector, norm); norms carry the sign of the form
    """
    if bound < 0:
        raise LatkitValidationException("Bound must be nonnegative, got {0}.".format(bound))
    sign, gram = _normalized_gram(lattice)
    R, reduced = pair_reduce(gram)
    vectors = []
    for y, norm in _enumerate(reduced.tolist(), bound):
        x = as_key(np.asarray(y, dtype=object).dot(R))
        if _canonical_sign(x):
            vectors.append((x, sign * norm))
    logger.debug('%d short vector pairs of norm <= %d in %r', len(vectors), bound, lattice)
    return sorted(vectors)


class _VectorData:
    """Short vectors of a reduced positive definite Gram with their inner products and fingerprints."""

    def __init__(self, gram, bound: int, anchors=()):
        self.gram = gram
        self.bound = bound
        self.vectors = [v for v, _ in _enumerate(gram.tolist(), bound)]
        self.index = {v: i for i, v in enumerate(self.vectors)}
        V = int_matrix(self.vectors, cols=gram.shape[0])
        self.ip = V.dot(gram).dot(V.T).tolist() if self.vectors else []
        pairings = V.dot(gram).dot(int_matrix(list(anchors), cols=gram.shape[0]).T).tolist() if anchors \
            else [[] for _ in self.vectors]
        self.fingerprints = [(self.ip[i][i], tuple(pairings[i]), tuple(sorted(Counter(self.ip[i]).items())))
                             for i in range(len(self.vectors))]

    def span_rank(self, anchors=()) -> int:
        rows = list(anchors) + self.vectors
        return rational_rank(int_matrix(rows, cols=self.gram.shape[0])) if rows else 0

    def spectrum(self) -> Counter:
        return Counter(self.fingerprints)


def _spanning_data(gram, anchors=()) -> _VectorData:
    n = gram.shape[0]
    bound = min(gram[i, i] for i in range(n))
    while True:
        data = _VectorData(gram, bound, anchors)
        if data.span_rank(anchors) == n:
            logger.debug('short vectors up to norm %d span: %d vectors', bound, len(data.vectors))
            return data
        bound += 1


def _select_chain(data: _VectorData, anchors, n: int) -> list:
    """Greedy chain of short vectors completing ``anchors`` to a spanning set.

    Prefers vectors keeping the chain primitive, then vectors linked to
    earlier choices, then small fingerprint classes.
    """
    spectrum = data.spectrum()
    rows = [list(a) for a in anchors]
    chosen = []
    rank = rational_rank(int_matrix(rows, cols=n)) if rows else 0
    while rank < n:
        best, best_key = None, None
        for idx, v in enumerate(data.vectors):
            if not _canonical_sign(v) or idx in chosen:
                continue
            trial = int_matrix(rows + [list(v)], cols=n)
            if rational_rank(trial) == rank:
                continue
            primitive = all(d == 1 for d in elementary_divisors(trial))
            links = sum(1 for c in chosen if data.ip[idx][c])
            key = (not primitive, -links, spectrum[data.fingerprints[idx]], data.ip[idx][idx], idx)
            if best_key is None or key < best_key:
                best, best_key = idx, key
        chosen.append(best)
        rows.append(list(data.vectors[best]))
        rank += 1
    return chosen


class _ChainSearch:
    """
    Backtracking over images of chain vectors of ``source`` among short
    vectors of ``target``, with anchors mapped to themselves.
    """

    def __init__(self, source: _VectorData, target: _VectorData, chain, anchors=(), limits=None,
                 congruence: int = None):
        self.source = source
        self.target = target
        self.chain = list(chain)
        self.anchors = [list(a) for a in anchors]
        self.limits = limits or DEFAULT_LIMITS
        self.congruence = congruence
        self.nodes = 0
        n = source.gram.shape[0]
        rows = self.anchors + [list(source.vectors[c]) for c in self.chain]
        self.inverse = rational_inverse(int_matrix(rows, cols=n))
        self.candidates = []
        for c in self.chain:
            base = source.vectors[c]
            self.candidates.append([j for j, y in enumerate(target.vectors)
                                    if target.fingerprints[j] == source.fingerprints[c]
                                    and (congruence is None or all((a - b) % congruence == 0 for a, b in zip(y, base)))])
        logger.debug('chain search: candidate counts %s', [len(c) for c in self.candidates])

    def admissible(self, level: int, j: int, images) -> bool:
        s_ip = self.source.ip[self.chain[level]]
        t_ip = self.target.ip[j]
        return all(t_ip[images[k]] == s_ip[self.chain[k]] for k in range(level))

    def _leaf(self, images) -> Optional[np.ndarray]:
        rows = self.anchors + [list(self.target.vectors[j]) for j in images]
        g = self.inverse.dot(np.asarray(rows, dtype=object))
        if not is_integral(g):
            return None
        g = to_int(g)
        if self.congruence is not None and any((x - int(i == j)) % self.congruence
                                               for (i, j), x in np.ndenumerate(g)):
            return None
        return g

    def extensions(self, images):
        images = list(images)
        level = len(images)
        if level == len(self.chain):
            g = self._leaf(images)
            if g is not None:
                yield g
            return
        self.nodes += 1
        if self.nodes > self.limits.search_nodes:
            raise ResourceLimitException('ERROR 31: isometry search exceeded {0} nodes.'.format(self.limits.search_nodes))
        for j in self.candidates[level]:
            if self.admissible(level, j, images):
                yield from self.extensions(images + [j])

    def first(self, images):
        return next(self.extensions(images), None)

    def count(self):
        """Generators and order along the stabilizer chain, deepest level first."""
        generators = []
        permutations = []
        order = 1
        for level in reversed(range(len(self.chain))):
            prefix = self.chain[:level]
            base = self.chain[level]
            orbit = _permutation_orbit(base, permutations)
            for j in self.candidates[level]:
                if j in orbit or not self.admissible(level, j, prefix):
                    continue
                g = self.first(prefix + [j])
                if g is not None:
                    generators.append(g)
                    permutations.append(self._permutation(g))
                    orbit = _permutation_orbit(base, permutations)
            logger.debug('chain level %d: orbit %d', level, len(orbit))
            order *= len(orbit)
        return generators, order

    def _permutation(self, g) -> list:
        images = int_matrix(self.target.vectors, cols=g.shape[0]).dot(g)
        return [self.target.index[as_key(row)] for row in images]


def _permutation_orbit(point: int, permutations) -> set:
    orbit = {point}
    queue = deque([point])
    while queue:
        current = queue.popleft()
        for perm in permutations:
            image = perm[current]
            if image not in orbit:
                orbit.add(image)
                queue.append(image)
    return orbit


class _Reduction(NamedTuple):
    sign: int
    R: np.ndarray
    R_inverse: np.ndarray
    gram: np.ndarray


def _reduce(lattice: Lattice) -> _Reduction:
    sign, gram = _normalized_gram(lattice)
    R, reduced = pair_reduce(gram)
    return _Reduction(sign, R, integer_inverse(R), reduced)


def _to_reduced(reduction: _Reduction, vectors) -> list:
    return [as_key(np.asarray(v, dtype=object).dot(reduction.R_inverse)) for v in vectors]


@definite_lattice
def automorphism_group(lattice: Lattice, limits=None, fixing=()) -> IsometryGroup:
    """Automorphism group of a definite lattice, optionally fixing vectors pointwise.

    Parameters
    ----------
        lattice:
            definite lattice of either sign
        limits:
            Limits; the search node budget applies
        fixing:
            vectors (lattice coordinates) every returned isometry fixes

    Returns
    -------
    group:
        IsometryGroup with exact order
    """
    limits = limits or DEFAULT_LIMITS
    n = lattice.rank
    if n > Constants.MAX_DEFINITE_RANK.value:
        raise ResourceLimitException('ERROR 33: rank {0} exceeds the definite search bound {1}.'.format(
            n, Constants.MAX_DEFINITE_RANK.value))
    if n == 0:
        return IsometryGroup(lattice, [], 1, limits)
    reduction = _reduce(lattice)
    anchors = _to_reduced(reduction, fixing)
    independent = []
    for a in anchors:
        if rational_rank(int_matrix(independent + [list(a)], cols=n)) > len(independent):
            independent.append(list(a))
    data = _spanning_data(reduction.gram, anchors)
    chain = _select_chain(data, independent, n)
    search = _ChainSearch(data, data, chain, independent, limits)
    reduced_generators, order = search.count()
    generators = [Isometry._trusted(reduction.R_inverse.dot(g).dot(reduction.R), lattice) for g in reduced_generators]
    for g in generators:
        if not g.preserves(lattice.gram):
            raise LatkitCalculationException("Search produced a non-isometry {0}.".format(g.matrix.tolist()))
    logger.info('automorphism group of %r: order %d, %d generators, %d search nodes',
                lattice, order, len(generators), search.nodes)
    return IsometryGroup(lattice, generators, order, limits)


@definite_lattice
def congruence_kernel(lattice: Lattice, m: int, limits=None) -> IsometryGroup:
    """Automorphisms congruent to the identity modulo m."""
    if m < 2:
        raise LatkitValidationException("Congruence modulus must be at least 2.")
    limits = limits or DEFAULT_LIMITS
    if lattice.rank == 0:
        return IsometryGroup(lattice, [], 1, limits)
    reduction = _reduce(lattice)
    data = _spanning_data(reduction.gram)
    chain = _select_chain(data, [], lattice.rank)
    search = _ChainSearch(data, data, chain, (), limits, congruence=m)
    members = {Isometry._trusted(reduction.R_inverse.dot(g).dot(reduction.R), lattice)
               for g in search.extensions([])}
    return IsometryGroup(lattice, members, len(members), limits)


@definite_lattice
def isometry_test(lattice: Lattice, other: Lattice, limits=None) -> Optional[Isometry]:
    """An isometry from ``lattice`` onto ``other`` or None.

    Returns
    -------
    isometry:
        matrix g with g G_other g^T = G_lattice, mapping lattice coordinates
        to coordinates of ``other``
    """
    if other.rank and not other.is_definite():
        raise LatkitValidationException('ERROR 20: second lattice is not definite.')
    if lattice.rank != other.rank or lattice.det != other.det:
        return None
    if lattice.rank == 0:
        return Isometry._trusted(identity(0))
    first, second = _reduce(lattice), _reduce(other)
    if first.sign != second.sign:
        return None
    source = _spanning_data(first.gram)
    target = _VectorData(second.gram, source.bound)
    if source.spectrum() != target.spectrum():
        return None
    chain = _select_chain(source, [], lattice.rank)
    g = _ChainSearch(source, target, chain, (), limits).first([])
    if g is None:
        return None
    matrix = first.R_inverse.dot(g).dot(second.R)
    if not np.array_equal(matrix.dot(other.gram).dot(matrix.T), lattice.gram):
        raise LatkitCalculationException("Isometry test produced an invalid map.")
    return Isometry._trusted(matrix)


_HYPERBOLIC = ([[1, 0], [0, 1]], [[-1, 0], [0, -1]], [[0, 1], [1, 0]], [[0, -1], [-1, 0]])


def hyperbolic_automorphisms(limits=None) -> IsometryGroup:
    """The four automorphisms of U, re-verified over all matrices with entries in {-1, 0, 1}."""
    lattice = make_standard('U')
    listed = {Isometry(m, lattice) for m in _HYPERBOLIC}
    found = set()
    for entries in itertools.product((-1, 0, 1), repeat=4):
        g = int_matrix([entries[:2], entries[2:]])
        if np.array_equal(g.dot(lattice.gram).dot(g.T), lattice.gram):
            found.add(Isometry._trusted(g, lattice))
    if found != listed:
        raise LatkitCalculationException("Hyperbolic plane automorphisms differ from the listed four.")
    return IsometryGroup(lattice, listed, len(listed), limits)


def discriminant_image(group: IsometryGroup, limits=None) -> set:
    """Image of the group in the isometries of the discriminant module."""
    module = discriminant_module(group.lattice)
    maps = [induced_map(module, g) for g in group.generators]
    limits = limits or group.limits
    return closure_of_maps(maps, FqmMap.identity(module), limits.max_group_order)


@unimodular_ambient
def stabilizer_of_vector_in_unimodular(lattice: Lattice, vector, limits=None) -> int:
    """Order of the stabilizer of ``vector`` in Aut(L), L unimodular with v-perp definite.

    An automorphism of N = v-perp extends by the identity on v exactly when it
    acts trivially on A_N, so the stabilizer order is |Aut(N)| / |image in Aut(A_N)|.
    """
    v = [int(x) for x in vector]
    if len(v) != lattice.rank:
        raise LatkitValidationException("Vector {0} has the wrong length.".format(v))
    if vector_gcd(v) != 1:
        raise LatkitValidationException('ERROR 22: vector {0} is not primitive.'.format(v))
    if lattice.norm(v) == 0:
        raise LatkitValidationException("Vector {0} is isotropic.".format(v))
    complement = orthogonal_complement(lattice, span(lattice, v))
    if complement.rank == 0:
        return 1
    perp = complement.lattice()
    group = automorphism_group(perp, limits=limits)
    image = discriminant_image(group, limits)
    logger.info('stabilizer of %s: |Aut(v-perp)| = %d, discriminant image %d', v, group.order, len(image))
    return group.order // len(image)

"""
Finite quadratic modules: discriminant groups A_L = L*/L with their Q/Z
bilinear and Q/2Z (even case) or Q/Z (odd case) quadratic forms, maps
between them, their isometry groups, and quadratic refinements of
symplectic forms over F_2.

Every module keeps rational lifts of its generators in the ambient
coordinates, so maps are computed by transporting explicit vectors.
"""
import functools
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
from latkit.input import DEFAULT_LIMITS
from latkit.lattice import Lattice, Sublattice, orthogonal_complement
from latkit.linalg import (elementary_divisors, int_matrix, rational_inverse, rational_matrix,
                           smith_normal_form, solve_integer)
from latkit.validators import primitive_sublattice, unimodular_ambient, within_fqm_bound

logger = logging.getLogger(__name__)


def _mod(x, m) -> Fraction:
    x = Fraction(x)
    return x - m * math.floor(x / m)


class FiniteQuadraticModule:
    """
    Finite abelian group Z/d_1 + ... + Z/d_k with a bilinear form into Q/Z and
    a quadratic form into Q/(q_modulus)Z.

    Parameters
    ----------
    invariants:
        invariant factors d_1 | d_2 | ..., each at least 2
    gram:
        rational ambient Gram matrix used to evaluate the forms on lifts
    lifts:
        k x r rational matrix; row i lifts generator i
    coordinates:
        r x k matrix C; the class of an ambient vector x has coordinates x @ C mod d
    q_modulus:
        2 for modules of even lattices, 1 otherwise
    """

    def __init__(self, invariants, gram, lifts, coordinates, q_modulus: int = 2, name: str = None):
        self.invariants = tuple(int(d) for d in invariants)
        if any(d < 2 for d in self.invariants):
            raise LatkitValidationException("Invariant factors must be at least 2: {0}.".format(self.invariants))
        if q_modulus not in (1, 2):
            raise LatkitValidationException("q_modulus must be 1 or 2.")
        self.gram = rational_matrix(np.asarray(gram, dtype=object).tolist(), cols=np.shape(gram)[1])
        self.lifts = rational_matrix(np.asarray(lifts, dtype=object).tolist(), cols=self.gram.shape[0])
        self.coordinates = rational_matrix(np.asarray(coordinates, dtype=object).tolist(), cols=len(self.invariants))
        self.q_modulus = q_modulus
        self.name = name
        # exact (unreduced) values of the form on generator lifts
        self._values = self.lifts.dot(self.gram).dot(self.lifts.T) if self.rank else np.zeros((0, 0), dtype=object)

    @property
    def rank(self) -> int:
        return len(self.invariants)

    @property
    def order(self) -> int:
        return math.prod(self.invariants)

    @property
    def zero(self) -> tuple:
        return (0,) * self.rank

    def reduce(self, coords) -> tuple:
        return tuple(int(a) % d for a, d in zip(coords, self.invariants))

    def generator(self, i: int) -> tuple:
        return tuple(int(j == i) for j in range(self.rank))

    def elements(self):
        """All elements in lexicographic order of coordinates."""
        return itertools.product(*[range(d) for d in self.invariants])

    def coords(self, vector) -> tuple:
        """Coordinates of the class of an ambient rational vector."""
        raw = np.asarray(vector, dtype=object).dot(self.coordinates) if self.rank else []
        if any(Fraction(a).denominator != 1 for a in raw):
            raise LatkitValidationException("Vector {0} does not represent a class of this module.".format(list(vector)))
        return self.reduce(int(Fraction(a)) for a in raw)

    def lift(self, element) -> np.ndarray:
        if not self.rank:
            return np.zeros(self.gram.shape[0], dtype=object) + Fraction(0)
        return np.asarray(element, dtype=object).dot(self.lifts)

    def add(self, a, c) -> tuple:
        return self.reduce(x + y for x, y in zip(a, c))

    def scale(self, n: int, a) -> tuple:
        return self.reduce(n * x for x in a)

    def negate(self, a) -> tuple:
        return self.scale(-1, a)

    def b(self, a, c) -> Fraction:
        if not self.rank:
            return Fraction(0)
        return _mod(np.asarray(a, dtype=object).dot(self._values).dot(np.asarray(c, dtype=object)), 1)

    def q(self, a) -> Fraction:
        if not self.rank:
            return Fraction(0)
        v = np.asarray(a, dtype=object)
        return _mod(v.dot(self._values).dot(v), self.q_modulus)

    def element_order(self, a) -> int:
        order = 1
        for x, d in zip(a, self.invariants):
            order = order * (d // math.gcd(x, d)) // math.gcd(order, d // math.gcd(x, d))
        return order

    def bilinear_matrix(self) -> List[List[Fraction]]:
        return [[self.b(self.generator(i), self.generator(j)) for j in range(self.rank)] for i in range(self.rank)]

    def q_values(self) -> List[Fraction]:
        return [self.q(self.generator(i)) for i in range(self.rank)]

    def to_json(self) -> dict:
        return {
            "invariants": list(self.invariants),
            "order": self.order,
            "q_modulus": self.q_modulus,
            "q": [str(v) for v in self.q_values()],
            "b": [[str(v) for v in row] for row in self.bilinear_matrix()],
        }

    def __repr__(self):
        return 'FiniteQuadraticModule({0}, q mod {1})'.format(
            ' + '.join('Z/{0}'.format(d) for d in self.invariants) or '0', self.q_modulus)


def discriminant_module(lattice: Lattice) -> FiniteQuadraticModule:
    """A_L = L*/L with generator lifts taken from the Smith form of the Gram matrix.

    With U G V = D, the dual vectors x_i = e_i V^-1 G^-1 (d_i > 1) generate A_L
    and the class of x in L* has coordinates x G V mod d.
    """
    gram = lattice.gram
    _, D, V = smith_normal_form(gram)
    keep = [i for i in range(lattice.rank) if D[i, i] > 1]
    inverse = rational_inverse(V).dot(rational_inverse(gram)) if lattice.rank else np.zeros((0, 0), dtype=object)
    lifts = inverse[keep] if keep else np.zeros((0, lattice.rank), dtype=object)
    coordinates = gram.dot(V)[:, keep] if keep else np.zeros((lattice.rank, 0), dtype=object)
    return FiniteQuadraticModule([D[i, i] for i in keep], gram, lifts, coordinates,
                                 q_modulus=2 if lattice.is_even() else 1,
                                 name='A_{0}'.format(lattice.name) if lattice.name else None)


def _block_diagonal(first, second) -> np.ndarray:
    out = np.zeros((first.shape[0] + second.shape[0], first.shape[1] + second.shape[1]), dtype=object)
    out[:first.shape[0], :first.shape[1]] = first
    out[first.shape[0]:, first.shape[1]:] = second
    return out


def orthogonal_sum(first: FiniteQuadraticModule, second: FiniteQuadraticModule) -> FiniteQuadraticModule:
    """A + B with lifts in the direct sum of the ambient spaces; elements are concatenated coordinates."""
    return FiniteQuadraticModule(first.invariants + second.invariants,
                                 _block_diagonal(first.gram, second.gram),
                                 _block_diagonal(first.lifts, second.lifts),
                                 _block_diagonal(first.coordinates, second.coordinates),
                                 q_modulus=min(first.q_modulus, second.q_modulus))


def quotient_module(lattice: Lattice, m: int) -> FiniteQuadraticModule:
    """(1/m)P/P with b(x/m, y/m) = b(x,y)/m mod 1 and q(x/m) = b(x,x)/m."""
    if m < 2:
        raise LatkitValidationException("Quotient modulus must be at least 2.")
    r = lattice.rank
    lifts = [[Fraction(int(i == j), m) for j in range(r)] for i in range(r)]
    coordinates = [[m * int(i == j) for j in range(r)] for i in range(r)]
    return FiniteQuadraticModule([m] * r, lattice.gram * m, lifts, coordinates,
                                 q_modulus=2 if lattice.is_even() else 1,
                                 name='(1/{0}){1}/{1}'.format(m, lattice.name) if lattice.name else None)


class PElementary(NamedTuple):
    elementary: bool
    length: Optional[int]


def is_p_elementary(module: FiniteQuadraticModule, p: int) -> PElementary:
    if all(d == p for d in module.invariants):
        return PElementary(True, module.rank)
    return PElementary(False, None)


class FqmMap:
    """
    Homomorphism between finite quadratic modules; row i holds the
    coordinates of the image of generator i of the source.
    """

    def __init__(self, source: FiniteQuadraticModule, target: FiniteQuadraticModule, images):
        images = [target.reduce(row) for row in images]
        if len(images) != source.rank:
            raise LatkitValidationException("Expected {0} generator images, got {1}.".format(source.rank, len(images)))
        for d, row in zip(source.invariants, images):
            if target.scale(d, row) != target.zero:
                raise LatkitValidationException("Image {0} does not respect a generator of order {1}.".format(row, d))
        self.source = source
        self.target = target
        self.images = tuple(images)

    @classmethod
    def identity(cls, module: FiniteQuadraticModule) -> 'FqmMap':
        return cls(module, module, [module.generator(i) for i in range(module.rank)])

    def apply(self, element) -> tuple:
        total = [0] * self.target.rank
        for a, row in zip(element, self.images):
            total = [t + a * x for t, x in zip(total, row)]
        return self.target.reduce(total)

    def compose(self, other: 'FqmMap') -> 'FqmMap':
        """This map followed by ``other``."""
        return FqmMap(self.source, other.target, [other.apply(row) for row in self.images])

    def negate(self) -> 'FqmMap':
        return FqmMap(self.source, self.target, [self.target.negate(row) for row in self.images])

    def is_isometry(self, sign: int = 1, modulus: int = None) -> bool:
        """Checks q(f(x)) = sign*q(x) and b(f(x),f(y)) = sign*b(x,y) on generators."""
        modulus = modulus or min(self.source.q_modulus, self.target.q_modulus)
        src, tgt = self.source, self.target
        for i in range(src.rank):
            gi = src.generator(i)
            if _mod(tgt.q(self.images[i]) - sign * src.q(gi), modulus) != 0:
                return False
            for j in range(i + 1, src.rank):
                if _mod(tgt.b(self.images[i], self.images[j]) - sign * src.b(gi, src.generator(j)), 1) != 0:
                    return False
        return True

    def is_identity(self) -> bool:
        return self.source is self.target and all(
            row == self.source.generator(i) for i, row in enumerate(self.images))

    def to_json(self) -> dict:
        return {"images": [list(row) for row in self.images]}

    def __eq__(self, other):
        return isinstance(other, FqmMap) and self.images == other.images

    def __hash__(self):
        return hash(self.images)

    def __repr__(self):
        return 'FqmMap({0})'.format(list(self.images))


def induced_map(source, isometry) -> FqmMap:
    """Action of a lattice isometry on the discriminant module.

    Parameters
    ----------
        source:
            a Lattice (its discriminant module is used) or a FiniteQuadraticModule
            built from the lattice the isometry acts on
        isometry:
            an Isometry or a square integer matrix acting on row coordinates
    """
    module = discriminant_module(source) if isinstance(source, Lattice) else source
    matrix = np.asarray(getattr(isometry, 'matrix', isometry), dtype=object)
    base = source.gram if isinstance(source, Lattice) else None
    if base is not None and not np.array_equal(matrix.dot(base).dot(matrix.T), base):
        raise LatkitValidationException("Matrix {0} is not an isometry of the lattice.".format(matrix.tolist()))
    if base is None and not np.array_equal(matrix.dot(module.gram).dot(matrix.T), module.gram):
        raise LatkitValidationException("Matrix {0} does not preserve the module's form.".format(matrix.tolist()))
    images = [module.coords(module.lifts[i].dot(matrix)) for i in range(module.rank)]
    return FqmMap(module, module, images)


class AntiIsometry(NamedTuple):
    complement: Sublattice
    source: FiniteQuadraticModule
    target: FiniteQuadraticModule
    phi: FqmMap
    modulus: int
    lifts: list


def glue_vector(lattice: Lattice, sublattice: Sublattice, module_m: FiniteQuadraticModule, element) -> np.ndarray:
    """Integer vector l of L whose pairing with M equals that of the lift of ``element``."""
    lift = module_m.lift(element)
    functional = [int(Fraction(x)) for x in lift.dot(sublattice.gram)]
    ell = solve_integer(lattice.gram.dot(sublattice.basis.T), functional)
    if ell is None:
        raise LatkitCalculationException("No lattice vector realizes the functional {0}.".format(functional))
    return ell


def _project_class(lattice: Lattice, sublattice: Sublattice, complement: Sublattice, module_n, ell, lift):
    """Class in A_N of the part of ``ell`` orthogonal to M."""
    if not complement.rank:
        return ()
    rest = ell - lift.dot(sublattice.basis)
    coeffs = rest.dot(lattice.gram).dot(complement.basis.T).dot(rational_inverse(complement.gram))
    return module_n.coords(coeffs)


def _check_complement(lattice: Lattice, sublattice: Sublattice, complement: Sublattice):
    if complement.rank + sublattice.rank != lattice.rank:
        raise LatkitValidationException("Complement has rank {0}, expected {1}.".format(
            complement.rank, lattice.rank - sublattice.rank))
    if complement.rank and sublattice.rank and \
            np.any(complement.basis.dot(lattice.gram).dot(sublattice.basis.T) != 0):
        raise LatkitValidationException("Complement basis is not orthogonal to the sublattice.")
    if complement.rank and any(d != 1 for d in elementary_divisors(complement.basis)):
        raise LatkitValidationException('ERROR 22: complement is not primitive.')


@unimodular_ambient
@primitive_sublattice
def anti_isometry_data(lattice: Lattice, sublattice: Sublattice, complement: Sublattice = None) -> AntiIsometry:
    """Glue anti-isometry together with the generator lifts realizing it.

    ``complement`` fixes the basis used for N = M-perp; by default it comes
    from the integer kernel.
    """
    if complement is None:
        complement = orthogonal_complement(lattice, sublattice)
    else:
        _check_complement(lattice, sublattice, complement)
    module_m = discriminant_module(sublattice.lattice())
    module_n = discriminant_module(complement.lattice())
    images, lifts = [], []
    for i in range(module_m.rank):
        element = module_m.generator(i)
        ell = glue_vector(lattice, sublattice, module_m, element)
        lifts.append(ell)
        images.append(_project_class(lattice, sublattice, complement, module_n, ell, module_m.lift(element)))
    phi = FqmMap(module_m, module_n, images)
    modulus = 2 if lattice.is_even() and module_m.q_modulus == 2 and module_n.q_modulus == 2 else 1
    if module_m.order != module_n.order or not phi.is_isometry(sign=-1, modulus=modulus):
        raise LatkitCalculationException("Glue map is not an anti-isometry.")
    return AntiIsometry(complement, module_m, module_n, phi, modulus, lifts)


def natural_anti_isometry(lattice: Lattice, sublattice: Sublattice) -> FqmMap:
    """The map A_M -> A_N, N = M-perp, sending a class to the class completing it to a vector of L.

    Parameters
    ----------
        lattice:
            unimodular lattice L
        sublattice:
            primitive sublattice M of L

    Returns
    -------
    phi:
        FqmMap with q_N(phi(a)) = -q_M(a); the comparison is mod 2 when L,
        M and N are even and mod 1 otherwise
    """
    return anti_isometry_data(lattice, sublattice).phi


class FqmSubgroup:
    """Subgroup of a module generated by the given elements."""

    def __init__(self, module: FiniteQuadraticModule, generators):
        self.module = module
        members = {module.zero}
        basis = []
        for g in generators:
            g = module.reduce(g)
            if g in members:
                continue
            basis.append(g)
            members = _closure(module, members, g)
        self.generators = tuple(basis)
        self.elements = frozenset(members)

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, element):
        return self.module.reduce(element) in self.elements

    def __eq__(self, other):
        return isinstance(other, FqmSubgroup) and self.elements == other.elements

    def __hash__(self):
        return hash(self.elements)

    def __repr__(self):
        return 'FqmSubgroup(order={0}, generators={1})'.format(self.order, list(self.generators))


def _closure(module, members, g):
    out = set(members)
    frontier = list(members)
    while frontier:
        nxt = []
        for x in frontier:
            y = module.add(x, g)
            if y not in out:
                out.add(y)
                nxt.append(y)
        frontier = nxt
    return out


def integral_value_subgroup(module: FiniteQuadraticModule) -> FqmSubgroup:
    """Elements whose q-value is an integer."""
    return FqmSubgroup(module, [a for a in module.elements() if module.q(a).denominator == 1])


class _FqmSearch:
    """
    Backtracking over images of a basis h_1..h_k of a module, preserving
    order, q and pairwise b. The first ``fixed`` basis elements are mapped to
    themselves. Optional ``constraints`` are elements that must be fixed,
    checked on complete maps.
    """

    def __init__(self, module: FiniteQuadraticModule, basis=None, fixed: int = 0, constraints=(), limits=None):
        self.module = module
        self.limits = limits or DEFAULT_LIMITS
        self.basis = [module.reduce(h) for h in basis] if basis is not None \
            else [module.generator(i) for i in range(module.rank)]
        self.fixed = fixed
        self.constraints = [module.reduce(c) for c in constraints]
        self.nodes = 0
        self.elements = list(module.elements())
        self.q = {a: module.q(a) for a in self.elements}
        self.order = {a: module.element_order(a) for a in self.elements}
        self._b = {}
        self.fingerprint = self._fingerprints() if module.order <= Constants.FQM_TABLE_ORDER.value else None
        self.to_standard = self._standard_change()
        self.candidates = []
        for h in self.basis:
            self.candidates.append([y for y in self.elements
                                    if self.order[y] == self.order[h] and self.q[y] == self.q[h]
                                    and (self.fingerprint is None or self.fingerprint[y] == self.fingerprint[h])])
        logger.debug('fqm search on %r: candidate counts %s', module, [len(c) for c in self.candidates])

    def b(self, a, c):
        key = (a, c)
        if key not in self._b:
            self._b[key] = self._b[(c, a)] = self.module.b(a, c)
        return self._b[key]

    def _fingerprints(self):
        out = {}
        for a in self.elements:
            out[a] = (self.order[a], self.q[a],
                      tuple(sorted(Counter((self.q[y], self.module.b(a, y)) for y in self.elements).items())))
        return out

    def _standard_change(self):
        """Matrix expressing the standard generators in terms of the basis, or None for the standard basis."""
        standard = [self.module.generator(i) for i in range(self.module.rank)]
        if self.basis == standard:
            return None
        p = self.module.invariants[0]
        inverse = rational_inverse(int_matrix(self.basis, cols=self.module.rank))
        return [[(x.numerator * pow(x.denominator, -1, p)) % p for x in row] for row in inverse]

    def _to_map(self, images) -> FqmMap:
        if self.to_standard is None:
            rows = images
        else:
            rows = []
            for row in self.to_standard:
                total = self.module.zero
                for w, y in zip(row, images):
                    total = self.module.add(total, self.module.scale(w, y))
                rows.append(total)
        return FqmMap(self.module, self.module, rows)

    def _admissible(self, level, y, images) -> bool:
        h = self.basis[level]
        return all(self.b(y, images[j]) == self.b(h, self.basis[j]) for j in range(level))

    def _complete(self, images):
        fmap = self._to_map(images)
        if not _is_bijective(fmap):
            return None
        if any(fmap.apply(c) != c for c in self.constraints):
            return None
        return fmap

    def extensions(self, prefix):
        """Generate all isometries whose basis images start with ``prefix``."""
        images = list(prefix)
        level = len(images)
        if level == len(self.basis):
            fmap = self._complete(images)
            if fmap is not None:
                yield fmap
            return
        self.nodes += 1
        if self.nodes > self.limits.search_nodes:
            raise ResourceLimitException('ERROR 31: isometry search exceeded {0} nodes.'.format(self.limits.search_nodes))
        for y in self.candidates[level]:
            if self._admissible(level, y, images):
                yield from self.extensions(images + [y])

    def first_extension(self, prefix):
        return next(self.extensions(prefix), None)

    def count(self):
        """Order and generators via the pointwise stabilizer chain of the basis."""
        order = 1
        generators = []
        prefix = list(self.basis[:self.fixed])
        for level in range(self.fixed, len(self.basis)):
            h = self.basis[level]
            orbit = 0
            for y in self.candidates[level]:
                if not self._admissible(level, y, prefix):
                    continue
                if y == h:
                    orbit += 1
                    continue
                found = self.first_extension(prefix + [y])
                if found is not None:
                    orbit += 1
                    generators.append(found)
            logger.debug('fqm chain level %d: orbit %d', level, orbit)
            order *= orbit
            prefix.append(h)
        generators = sorted(set(generators), key=lambda f: f.images)
        return generators, order


def _is_bijective(fmap: FqmMap) -> bool:
    module = fmap.target
    if not module.rank:
        return True
    rows = [list(row) for row in fmap.images]
    rows += [[d * int(i == j) for j in range(module.rank)] for i, d in enumerate(module.invariants)]
    return math.prod(elementary_divisors(int_matrix(rows))) == 1


class FqmAutomorphismGroup(NamedTuple):
    generators: list
    order: int


@within_fqm_bound
def fqm_automorphism_group(module: FiniteQuadraticModule, limits=None) -> FqmAutomorphismGroup:
    """Isometry group of (A, b, q) by backtracking over generator images.

    Returns
    -------
    group:
        canonically sorted generators and the exact order
    """
    generators, order = _FqmSearch(module, limits=limits).count()
    return FqmAutomorphismGroup(generators, order)


@within_fqm_bound
def fqm_isometries(module: FiniteQuadraticModule, limits=None) -> List[FqmMap]:
    """Every isometry of a small module, sorted."""
    return sorted(_FqmSearch(module, limits=limits).extensions([]), key=lambda f: f.images)


def _adapted_basis(module: FiniteQuadraticModule, subgroup: FqmSubgroup, p: int):
    """Basis of a p-elementary module whose leading elements span ``subgroup``."""
    chosen = []
    span = {module.zero}
    for g in list(subgroup.generators) + [module.generator(i) for i in range(module.rank)]:
        if g in span:
            continue
        chosen.append(g)
        span = _closure(module, span, g)
    fixed = sum(1 for g in chosen if g in subgroup)
    return chosen, fixed


@within_fqm_bound
def extension_count_fixing_subgroup(module: FiniteQuadraticModule, subgroup: FqmSubgroup, limits=None) -> int:
    """Number of isometries of the module restricting to the identity on ``subgroup``."""
    if subgroup.order == module.order:
        return 1
    elementary = is_p_elementary(module, module.invariants[0]) if module.rank else PElementary(True, 0)
    if elementary.elementary:
        basis, fixed = _adapted_basis(module, subgroup, module.invariants[0])
        search = _FqmSearch(module, basis=basis, fixed=fixed, limits=limits)
    else:
        search = _FqmSearch(module, constraints=subgroup.generators, limits=limits)
    return search.count()[1]


def closure_of_maps(generators, identity: FqmMap, limit: int = None) -> set:
    """All products of the given maps (a finite group)."""
    seen = {identity}
    queue = deque([identity])
    while queue:
        current = queue.popleft()
        for g in generators:
            nxt = current.compose(g)
            if nxt not in seen:
                seen.add(nxt)
                if limit is not None and len(seen) > limit:
                    raise ResourceLimitException('ERROR 32: group exceeds {0} elements.'.format(limit))
                queue.append(nxt)
    return seen


# -- quadratic refinements over F_2 ----------------------------------------------------------

def symplectic_inner_product(v0: np.ndarray, v1: np.ndarray) -> np.ndarray:
    """Standard symplectic form over F_2; coordinates (e_1..e_g, f_1..f_g)."""
    half = v1.size // 2
    return (np.dot(v0[..., :half], v1[half:]) + np.dot(v0[..., half:], v1[:half])) % 2


def transvection(x: np.ndarray, h: np.ndarray) -> np.ndarray:
    """x -> x + b(x,h) h."""
    weight = symplectic_inner_product(x, h)
    if x.ndim > 1:
        weight = weight[..., np.newaxis]
    return (x + weight * h) % 2


@functools.lru_cache
def _space(g: int) -> np.ndarray:
    return np.array(list(itertools.product((0, 1), repeat=2 * g)), dtype=np.uint8)


def _index(vectors: np.ndarray) -> np.ndarray:
    weights = 1 << np.arange(vectors.shape[-1] - 1, -1, -1)
    return vectors.astype(np.int64).dot(weights)


@functools.lru_cache
def symplectic_group_order(g: int) -> int:
    order = 1
    for i in range(1, g + 1):
        order *= (4 ** i - 1) * 2 ** (2 * i - 1)
    return order


class QuadraticRefinementMod2:
    """
    Quadratic form q on F_2^{2g} with q(u+v) = q(u) + q(v) + b(u,v), b the
    standard symplectic form, given by its values on e_1..e_g, f_1..f_g.
    """

    def __init__(self, g: int, basis_values):
        basis_values = tuple(int(v) % 2 for v in basis_values)
        if g < 1 or len(basis_values) != 2 * g:
            raise LatkitValidationException("Need 2g = {0} basis values, got {1}.".format(2 * g, len(basis_values)))
        self.g = g
        self.basis_values = basis_values
        self.table = self._tabulate()

    def _tabulate(self) -> tuple:
        space = _space(self.g)
        size = 2 * self.g
        values = [0] * len(space)
        for idx in range(1, len(space)):
            low = (idx & -idx).bit_length() - 1
            rest = idx ^ (1 << low)
            coordinate = size - 1 - low
            unit = np.zeros(size, dtype=np.uint8)
            unit[coordinate] = 1
            values[idx] = values[rest] ^ self.basis_values[coordinate] ^ int(symplectic_inner_product(space[rest], unit))
        return tuple(values)

    @classmethod
    def from_values(cls, g: int, values) -> 'QuadraticRefinementMod2':
        """From the values on every vector of F_2^{2g} (listed in lexicographic order, 0 included)
        or, for g = 1, the values on (e, f, e+f)."""
        values = tuple(int(v) % 2 for v in values)
        if g == 1 and len(values) == 3:
            values = (0, values[1], values[0], values[2])
        if len(values) != 4 ** g:
            raise LatkitValidationException("Expected {0} values.".format(4 ** g))
        basis = [values[1 << (2 * g - 1 - i)] for i in range(2 * g)]
        refinement = cls(g, basis)
        if refinement.table != values:
            raise LatkitValidationException("Values {0} violate q(u+v) = q(u) + q(v) + b(u,v).".format(values))
        return refinement

    def value(self, vector) -> int:
        return self.table[int(_index(np.asarray(vector, dtype=np.uint8)))]

    def satisfies_identity(self) -> bool:
        space = _space(self.g)
        for u in range(len(space)):
            for v in range(len(space)):
                if self.table[u ^ v] != self.table[u] ^ self.table[v] ^ int(symplectic_inner_product(space[u], space[v])):
                    return False
        return True

    def arf(self) -> int:
        """Value taken by q on the majority of vectors."""
        ones = sum(self.table)
        return int(2 * ones > len(self.table))

    def __eq__(self, other):
        return isinstance(other, QuadraticRefinementMod2) and self.table == other.table

    def __hash__(self):
        return hash(self.table)


class ArfOrbit(NamedTuple):
    arf: int
    orbit_size: int


def _refinement_orbit(g: int, table: tuple) -> frozenset:
    """Orbit of a refinement table under transvections, which generate Sp_2g(F_2).

    A transvection T is an involution, so (T q)(v) = q(T v).
    """
    space = _space(g)
    moves = [_index(transvection(space, h)) for h in space[1:]]
    seen = {table}
    queue = deque([table])
    while queue:
        current = queue.popleft()
        for move in moves:
            image = tuple(current[i] for i in move)
            if image not in seen:
                seen.add(image)
                queue.append(image)
    return frozenset(seen)


def _check_genus(g: int):
    if g < 1 or g > Constants.MAX_ARF_GENUS.value:
        raise LatkitValidationException("Genus must be in 1..{0}, got {1}.".format(Constants.MAX_ARF_GENUS.value, g))


def arf_and_orbit(g: int, refinement: QuadraticRefinementMod2) -> ArfOrbit:
    """Arf invariant and size of the Sp_2g(F_2)-orbit of a refinement."""
    _check_genus(g)
    if refinement.g != g:
        raise LatkitValidationException("Refinement has genus {0}, not {1}.".format(refinement.g, g))
    return ArfOrbit(refinement.arf(), len(_refinement_orbit(g, refinement.table)))


def all_refinements(g: int) -> List[QuadraticRefinementMod2]:
    return [QuadraticRefinementMod2(g, values) for values in itertools.product((0, 1), repeat=2 * g)]


def refinement_orbits(g: int) -> List[int]:
    """Sizes of the distinct Sp_2g(F_2)-orbits on all refinements, largest first.

    Raises
    ------
    LatkitCalculationException
        unless there are exactly two orbits partitioning the 4^g refinements
    """
    _check_genus(g)
    orbits = []
    covered = set()
    for refinement in all_refinements(g):
        if refinement.table in covered:
            continue
        orbit = _refinement_orbit(g, refinement.table)
        if orbit & covered:
            raise LatkitCalculationException("Orbits of refinements overlap for g={0}.".format(g))
        covered |= orbit
        orbits.append(orbit)
    sizes = sorted((len(o) for o in orbits), reverse=True)
    logger.debug('refinement orbits for g=%d: %s', g, sizes)
    if len(sizes) != 2 or sum(sizes) != 4 ** g:
        raise LatkitCalculationException("Expected two orbits covering 4^{0} refinements, got sizes {1}.".format(
            g, sizes))
    return sizes


def refinement_orbit_size(g: int, arf: int) -> int:
    """Closed form 2^(g-1) (2^g + (-1)^arf)."""
    return 2 ** (g - 1) * (2 ** g + (-1) ** arf)

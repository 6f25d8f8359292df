"""
Gluing of perpendicular primitive sublattices inside unimodular lattices:
glue data, extension and restriction of isometry pairs, and overlattices
built from isotropic glue.
"""
import logging
from typing import List, NamedTuple

import numpy as np

from latkit.exceptions.latkit_exception import (GlueMismatchException, LatkitCalculationException,
                                                LatkitValidationException, NonIntegralGlueException)
from latkit.fqm import (FiniteQuadraticModule, FqmMap, FqmSubgroup, anti_isometry_data, discriminant_module,
                        induced_map, orthogonal_sum)
from latkit.isometry import Isometry
from latkit.lattice import Lattice, Sublattice, direct_sum
from latkit.linalg import identity, int_matrix, is_integral, rational_inverse, row_lattice_basis, to_int

logger = logging.getLogger(__name__)


class GlueData:
    """
    L unimodular, M primitive in L, N = M-perp, and the glue group
    H = L/(M + N) as the graph of the anti-isometry phi: A_M -> A_N.

    ``lifts[i]`` is a vector of L whose class in A_M + A_N is
    (g_i, phi(g_i)) for the i-th generator g_i of A_M.
    """

    def __init__(self, ambient: Lattice, sublattice: Sublattice, complement: Sublattice,
                 module_m: FiniteQuadraticModule, module_n: FiniteQuadraticModule, phi: FqmMap, modulus: int, lifts):
        self.ambient = ambient
        self.sublattice = sublattice
        self.complement = complement
        self.module_m = module_m
        self.module_n = module_n
        self.phi = phi
        self.modulus = modulus
        self.lifts = [int_matrix([list(v)], cols=ambient.rank)[0] for v in lifts]
        self.lattice_m = sublattice.lattice()
        self.lattice_n = complement.lattice()
        self._stack = int_matrix(list(sublattice.basis.tolist()) + list(complement.basis.tolist()), cols=ambient.rank)
        self._stack_inverse = rational_inverse(self._stack)

    @property
    def glue_order(self) -> int:
        return self.module_m.order

    def glue_elements(self) -> List[tuple]:
        """Elements (a, phi(a)) of H, as pairs of coordinate tuples."""
        return [(a, self.phi.apply(a)) for a in self.module_m.elements()]

    def is_isotropic(self) -> bool:
        for a, c in self.glue_elements():
            if (self.module_m.q(a) + self.module_n.q(c)) % self.modulus != 0:
                return False
        return True

    def verify(self):
        if self.glue_order ** 2 != self.module_m.order * self.module_n.order:
            raise LatkitCalculationException("|H|^2 = {0} differs from |A_M||A_N| = {1}.".format(
                self.glue_order ** 2, self.module_m.order * self.module_n.order))
        if not self.phi.is_isometry(sign=-1, modulus=self.modulus):
            raise LatkitCalculationException("Glue map does not satisfy q_N(phi(a)) = -q_M(a).")
        if self.module_m.order <= 4096 and not self.is_isotropic():
            raise LatkitCalculationException("Glue group is not isotropic.")
        index = abs(self.lattice_m.det * self.lattice_n.det)
        if index != self.glue_order ** 2:
            raise LatkitCalculationException("det(M) det(N) = {0} is not |H|^2.".format(index))

    def split(self, vector) -> tuple:
        """Coordinates of an ambient vector in the bases of M and N (rational)."""
        coeffs = np.asarray(vector, dtype=object).dot(self._stack_inverse)
        m = self.sublattice.rank
        return coeffs[:m], coeffs[m:]

    def to_json(self) -> dict:
        return {
            "ambient_rank": self.ambient.rank,
            "m_rank": self.sublattice.rank,
            "n_rank": self.complement.rank,
            "glue_order": self.glue_order,
            "a_m": self.module_m.to_json(),
            "a_n": self.module_n.to_json(),
            "phi": self.phi.to_json(),
        }


def glue_data(lattice: Lattice, sublattice: Sublattice, complement: Sublattice = None) -> GlueData:
    """Glue data of a primitive sublattice of a unimodular lattice.

    Parameters
    ----------
        lattice:
            unimodular lattice L
        sublattice:
            primitive sublattice M
        complement:
            optional basis of M-perp to use instead of the kernel basis

    Returns
    -------
    data:
        verified GlueData
    """
    anti = anti_isometry_data(lattice, sublattice, complement=complement)
    data = GlueData(lattice, sublattice, anti.complement, anti.source, anti.target, anti.phi, anti.modulus, anti.lifts)
    data.verify()
    logger.debug('glue data: |H| = %d, rank M = %d, rank N = %d', data.glue_order, sublattice.rank,
                 anti.complement.rank)
    return data


def _as_isometry(isometry, lattice: Lattice) -> Isometry:
    matrix = getattr(isometry, 'matrix', isometry)
    return Isometry(matrix, lattice)


def compatible(glue: GlueData, s_m, s_n) -> bool:
    """phi o s_M = s_N o phi on A_M."""
    f_m = induced_map(glue.module_m, _as_isometry(s_m, glue.lattice_m))
    f_n = induced_map(glue.module_n, _as_isometry(s_n, glue.lattice_n))
    return all(glue.phi.apply(f_m.apply(glue.module_m.generator(i))) == f_n.apply(glue.phi.images[i])
               for i in range(glue.module_m.rank))


def extend_isometry(glue: GlueData, s_m, s_n) -> Isometry:
    """The isometry of L restricting to s_M on M and s_N on N.

    Raises
    ------
    GlueMismatchException
        if the discriminant actions do not commute with phi
    NonIntegralGlueException
        if the assembled rational map is not integral
    """
    s_m = _as_isometry(s_m, glue.lattice_m)
    s_n = _as_isometry(s_n, glue.lattice_n)
    if not compatible(glue, s_m, s_n):
        raise GlueMismatchException("Discriminant actions of the pair are incompatible with the glue map.")
    m, n = glue.sublattice.rank, glue.complement.rank
    block = np.zeros((m + n, m + n), dtype=object)
    block[:m, :m] = s_m.matrix
    block[m:, m:] = s_n.matrix
    g = glue._stack_inverse.dot(block).dot(glue._stack)
    if not is_integral(g):
        raise NonIntegralGlueException("Assembled extension {0} is not integral.".format(
            [[str(x) for x in row] for row in g.tolist()]))
    g = to_int(g)
    if not np.array_equal(g.dot(glue.ambient.gram).dot(g.T), glue.ambient.gram):
        raise LatkitCalculationException("Assembled extension does not preserve the form.")
    return Isometry._trusted(g, glue.ambient)


class IsometryPair(NamedTuple):
    on_m: Isometry
    on_n: Isometry


def restrict_isometry(glue: GlueData, isometry) -> IsometryPair:
    """Split an isometry of L preserving M into its actions on M and N."""
    g = _as_isometry(isometry, glue.ambient)
    block = glue._stack.dot(g.matrix).dot(glue._stack_inverse)
    m = glue.sublattice.rank
    if any(x != 0 for x in block[:m, m:].flat) or any(x != 0 for x in block[m:, :m].flat):
        raise LatkitValidationException("Isometry does not preserve the sublattice.")
    return IsometryPair(Isometry(to_int(block[:m, :m]), glue.lattice_m), Isometry(to_int(block[m:, m:]), glue.lattice_n))


class Overlattice(NamedTuple):
    lattice: Lattice
    basis: np.ndarray
    summand_m: Sublattice
    summand_n: Sublattice


def overlattice_summands(lattice_m: Lattice, lattice_n: Lattice, glue, even: bool = True) -> Overlattice:
    """Overlattice of M + N generated by lifts of an isotropic glue group.

    Parameters
    ----------
        lattice_m, lattice_n:
            the two summands
        glue:
            generators (a, c) of H in A_M + A_N, as coordinate tuples
        even:
            require q(a) + q(c) = 0 mod 2 (both summands even); otherwise mod 1

    Returns
    -------
    overlattice:
        the lattice in a reduced basis, that basis in M + N coordinates and
        the summands as sublattices
    """
    module_m = discriminant_module(lattice_m)
    module_n = discriminant_module(lattice_n)
    if even and (module_m.q_modulus != 2 or module_n.q_modulus != 2):
        raise LatkitValidationException("An even overlattice needs even summands.")
    modulus = 2 if even else 1
    module = orthogonal_sum(module_m, module_n)
    generators = [module_m.reduce(a) + module_n.reduce(c) for a, c in glue]
    subgroup = FqmSubgroup(module, generators)
    for element in sorted(subgroup.elements):
        if module.q(element) % modulus != 0:
            raise LatkitValidationException("Glue element {0} is not isotropic (q = {1}).".format(
                element, module.q(element)))
    total = direct_sum(lattice_m, lattice_n)
    rows = identity(total.rank).tolist() + [list(module.lift(h)) for h in generators]
    basis = row_lattice_basis(rows)
    gram = basis.dot(total.gram).dot(basis.T)
    if not is_integral(gram):
        raise LatkitCalculationException("Overlattice form is not integral.")
    result = Lattice(to_int(gram))
    inverse = rational_inverse(basis)
    m = lattice_m.rank
    summand_m = Sublattice(result, to_int(inverse[:m]))
    summand_n = Sublattice(result, to_int(inverse[m:]))
    logger.debug('overlattice of index %d: det %d', subgroup.order, result.det)
    return Overlattice(result, basis, summand_m, summand_n)


def overlattice_from_glue(lattice_m: Lattice, lattice_n: Lattice, glue, even: bool = True) -> Lattice:
    return overlattice_summands(lattice_m, lattice_n, glue, even).lattice


class SignSelection(NamedTuple):
    target: tuple
    signs: list
    exactly_one: bool


def sign_selection(module: FiniteQuadraticModule, isometries, target) -> SignSelection:
    """For each isometry z, the signs s in {1, -1} with s*z fixing ``target``."""
    target = module.reduce(target)
    signs = []
    for zeta in isometries:
        image = zeta.apply(target)
        fixing = [s for s in (1, -1) if module.scale(s, image) == target]
        signs.append(fixing)
    return SignSelection(target, signs, all(len(s) == 1 for s in signs))


def extending_signs(glue: GlueData, zeta: FqmMap, isometries_m, isometries_n, fixing=None) -> List[int]:
    """Signs s such that s*zeta on A_N is induced together with some s_M (fixing ``fixing``) by an isometry of L."""
    out = []
    for s in (1, -1):
        target = zeta if s == 1 else zeta.negate()
        found = False
        for s_m in isometries_m:
            if fixing is not None and s_m.apply(fixing) != tuple(fixing):
                continue
            for s_n in isometries_n:
                if induced_map(glue.module_n, s_n) != target or not compatible(glue, s_m, s_n):
                    continue
                extend_isometry(glue, s_m, s_n)
                found = True
                break
            if found:
                break
        if found:
            out.append(s)
    return out

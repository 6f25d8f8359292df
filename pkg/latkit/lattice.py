"""
Integral lattices given by Gram matrices, their sublattices and the
standard constructions (root lattices, hyperbolic plane, odd unimodular
diagonal lattices, twists, direct sums and orthogonal complements).
"""
import json
import math
import re
from typing import NamedTuple

import numpy as np

from latkit.constants import Constants
from latkit.exceptions.latkit_exception import LatkitValidationException
from latkit.linalg import (det_exact, elementary_divisors, inertia_ldlt, int_matrix, integer_left_kernel,
                           rational_rank)


class ParityClass(NamedTuple):
    parity: str
    unimodular: bool


class SublatticeIndex(NamedTuple):
    index: object
    primitive: bool


class Lattice:
    """
    A free abelian group with a nondegenerate symmetric integral form.

    Parameters
    ----------
    gram:
        symmetric integer matrix of the form in the chosen basis
    name:
        optional label used in reports
    """

    def __init__(self, gram, name: str = None):
        gram = int_matrix(gram.tolist() if isinstance(gram, np.ndarray) else gram)
        if gram.shape[0] != gram.shape[1]:
            raise LatkitValidationException("Matrix {0} is not square.".format(gram.tolist()))
        if not np.array_equal(gram, gram.T):
            raise LatkitValidationException(Constants.ERR_NOT_SYMMETRIC.value)
        det = det_exact(gram)
        if det == 0:
            raise LatkitValidationException(Constants.ERR_DEGENERATE.value)
        gram.flags.writeable = False
        self.gram = gram
        self.name = name
        self.det = det

    @property
    def rank(self) -> int:
        return self.gram.shape[0]

    def inner(self, x, y):
        return np.asarray(x, dtype=object).dot(self.gram).dot(np.asarray(y, dtype=object))

    def norm(self, x):
        return self.inner(x, x)

    def is_even(self) -> bool:
        return all(self.gram[i, i] % 2 == 0 for i in range(self.rank))

    def is_unimodular(self) -> bool:
        return abs(self.det) == 1

    def is_definite(self) -> bool:
        inertia = inertia_ldlt(self.gram)
        return not (inertia.n_plus and inertia.n_minus)

    def to_json(self) -> dict:
        out = {"gram": [[int(x) for x in row] for row in self.gram.tolist()]}
        if self.name is not None:
            out["name"] = self.name
        return out

    def __eq__(self, other):
        return isinstance(other, Lattice) and np.array_equal(self.gram, other.gram)

    def __hash__(self):
        return hash(tuple(tuple(row) for row in self.gram.tolist()))

    def __repr__(self):
        return 'Lattice({0}, rank={1}, det={2})'.format(self.name or 'unnamed', self.rank, self.det)


class Sublattice:
    """
    Sublattice of ``ambient`` spanned by the rows of ``basis`` (ambient coordinates).
    """

    def __init__(self, ambient: Lattice, basis):
        basis = int_matrix(basis.tolist() if isinstance(basis, np.ndarray) else basis, cols=ambient.rank)
        if basis.shape[0] and basis.shape[1] != ambient.rank:
            raise LatkitValidationException("Basis rows must have length {0}.".format(ambient.rank))
        if rational_rank(basis) != basis.shape[0]:
            raise LatkitValidationException("Sublattice basis {0} is not linearly independent.".format(basis.tolist()))
        basis.flags.writeable = False
        self.ambient = ambient
        self.basis = basis

    @property
    def rank(self) -> int:
        return self.basis.shape[0]

    @property
    def gram(self) -> np.ndarray:
        return int_matrix(self.basis.dot(self.ambient.gram).dot(self.basis.T).tolist(), cols=self.rank)

    def lattice(self, name: str = None) -> Lattice:
        """The sublattice with its induced form; raises if the induced form is degenerate."""
        return Lattice(self.gram, name=name)

    def to_json(self) -> dict:
        return {"basis": [[int(x) for x in row] for row in self.basis.tolist()]}

    def __repr__(self):
        return 'Sublattice(rank={0} in {1!r})'.format(self.rank, self.ambient)


def _cartan(n: int, edges) -> list:
    gram = [[2 * int(i == j) for j in range(n)] for i in range(n)]
    for i, j in edges:
        gram[i][j] = gram[j][i] = -1
    return gram


def _root_lattice(family: str, n: int) -> list:
    if family == 'A':
        if n < 1:
            raise LatkitValidationException("A_n needs n >= 1, got {0}.".format(n))
        return _cartan(n, [(i, i + 1) for i in range(n - 1)])
    if family == 'D':
        if n < 4:
            raise LatkitValidationException("D_n needs n >= 4, got {0}.".format(n))
        return _cartan(n, [(i, i + 1) for i in range(n - 2)] + [(n - 3, n - 1)])
    if n not in (6, 7, 8):
        raise LatkitValidationException("E_n needs n in 6, 7, 8, got {0}.".format(n))
    # Bourbaki labelling: chain 1-3-4-5-..., node 2 attached to 4
    chain = [0, 2, 3] + list(range(4, n))
    return _cartan(n, list(zip(chain, chain[1:])) + [(1, 3)])


_ROOT = re.compile(r'^([ADE])_?\{?(\d+)\}?$')
_ODD = re.compile(r'^I_?\{?(\d+)\s*[,_]\s*(\d+)\}?$')
_DIAG = re.compile(r'^diag\((.*)\)$')


def make_standard(name: str) -> Lattice:
    """Standard lattice by identifier.

    Parameters
    ----------
        name:
            ``A_n``, ``D_n``, ``E_6``, ``E_7``, ``E_8`` (also ``A2``, ``E_{7}``),
            ``U``, ``I_{p,q}`` (also ``I_1_7``) or ``diag(a,b,...)``

    Returns
    -------
    lattice:
        the Cartan-matrix Gram for root lattices, [[0,1],[1,0]] for U,
        diag(1 x p, -1 x q) for I_{p,q}
    """
    key = name.strip().replace(' ', '')
    if key == 'U':
        return Lattice([[0, 1], [1, 0]], name='U')
    match = _ROOT.match(key)
    if match:
        family, n = match.group(1), int(match.group(2))
        return Lattice(_root_lattice(family, n), name='{0}{1}'.format(family, n))
    match = _ODD.match(key)
    if match:
        p, q = int(match.group(1)), int(match.group(2))
        if p + q == 0:
            raise LatkitValidationException("I_{p,q} needs p + q >= 1.")
        entries = [1] * p + [-1] * q
        return Lattice(_diagonal(entries), name='I_{0},{1}'.format(p, q))
    match = _DIAG.match(key)
    if match:
        try:
            entries = [int(x) for x in match.group(1).split(',') if x]
        except ValueError:
            raise LatkitValidationException("Invalid diagonal entries in {0}.".format(name))
        if not entries:
            raise LatkitValidationException("diag() needs at least one entry.")
        return Lattice(_diagonal(entries), name=key)
    raise LatkitValidationException("Unknown lattice name {0}.".format(name))


def _diagonal(entries) -> list:
    return [[entries[i] if i == j else 0 for j in range(len(entries))] for i in range(len(entries))]


def twist(lattice: Lattice, n: int) -> Lattice:
    """L(n): the form of L scaled by n."""
    if n == 0:
        raise LatkitValidationException("Twist factor must be nonzero.")
    name = '{0}({1})'.format(lattice.name, n) if lattice.name else None
    return Lattice(lattice.gram * n, name=name)


def direct_sum(*lattices: Lattice) -> Lattice:
    size = sum(lat.rank for lat in lattices)
    gram = np.zeros((size, size), dtype=object)
    offset = 0
    for lat in lattices:
        gram[offset:offset + lat.rank, offset:offset + lat.rank] = lat.gram
        offset += lat.rank
    names = [lat.name for lat in lattices]
    return Lattice(gram, name=' + '.join(names) if all(names) else None)


def signature(lattice: Lattice) -> tuple:
    inertia = inertia_ldlt(lattice.gram)
    return inertia.n_plus, inertia.n_minus


def classify_parity_unimodular(lattice: Lattice) -> ParityClass:
    parity = Constants.EVEN.value if lattice.is_even() else Constants.ODD.value
    return ParityClass(parity, lattice.is_unimodular())


def is_characteristic(lattice: Lattice, v) -> bool:
    """True iff b(v,x) = b(x,x) mod 2 for every x."""
    pairing = np.asarray(v, dtype=object).dot(lattice.gram)
    return all((pairing[i] - lattice.gram[i, i]) % 2 == 0 for i in range(lattice.rank))


def orthogonal_complement(lattice: Lattice, sublattice: Sublattice) -> Sublattice:
    """{x in L : b(x,s) = 0 for all s in S}, as a primitive sublattice."""
    pairing = lattice.gram.dot(sublattice.basis.T)
    if sublattice.rank == 0:
        pairing = np.zeros((lattice.rank, 0), dtype=object)
    return Sublattice(lattice, integer_left_kernel(pairing))


def sublattice_index_and_primitivity(lattice: Lattice, sublattice: Sublattice) -> SublatticeIndex:
    """Index [L:S] (math.inf below full rank) and whether L/S is torsion free."""
    if sublattice.rank == 0:
        return SublatticeIndex(1 if lattice.rank == 0 else math.inf, True)
    divisors = elementary_divisors(sublattice.basis)
    primitive = len(divisors) == sublattice.rank and all(d == 1 for d in divisors)
    if sublattice.rank == lattice.rank:
        return SublatticeIndex(abs(det_exact(sublattice.basis)), primitive)
    return SublatticeIndex(math.inf, primitive)


def span(lattice: Lattice, *vectors) -> Sublattice:
    return Sublattice(lattice, [list(v) for v in vectors])


def lattice_from_json(source) -> Lattice:
    """Load ``{"name": str?, "gram": [[int]]}`` from a dict or JSON text, validating strictly."""
    if isinstance(source, str):
        try:
            source = json.loads(source)
        except ValueError as e:
            raise LatkitValidationException("Malformed lattice JSON: {0}".format(e))
    if not isinstance(source, dict) or 'gram' not in source:
        raise LatkitValidationException("Lattice JSON must be an object with a 'gram' field.")
    unknown = set(source) - {'name', 'gram'}
    if unknown:
        raise LatkitValidationException("Unknown lattice fields: {0}.".format(sorted(unknown)))
    name = source.get('name')
    if name is not None and not isinstance(name, str):
        raise LatkitValidationException("Lattice name must be a string.")
    gram = source['gram']
    if not isinstance(gram, list) or not all(isinstance(row, list) for row in gram):
        raise LatkitValidationException("'gram' must be a list of rows.")
    if any(not isinstance(x, int) or isinstance(x, bool) for row in gram for x in row):
        raise LatkitValidationException("'gram' entries must be integers.")
    return Lattice(gram, name=name)


"""
Graded Jacobian rings of smooth hypersurfaces: Hodge numbers of the
primitive middle cohomology, middle rank and signature, and the action of
diagonal automorphisms on Griffiths residues.

Roots of unity are kept exact as exponents modulo their order.
"""
import itertools
import logging
import math
import warnings
from fractions import Fraction
from typing import List, NamedTuple, Optional, Tuple

import sympy
from scipy.special import comb
from sympy.polys.matrices import DomainMatrix

from latkit.exceptions.latkit_exception import LatkitValidationException
from latkit.fqm import refinement_orbit_size

logger = logging.getLogger(__name__)


class HypersurfaceClass(NamedTuple):
    """Smooth hypersurfaces of degree d in P^(n+1)."""
    n: int
    d: int

    @classmethod
    def of(cls, n: int, d: int) -> 'HypersurfaceClass':
        if n < 1 or d < 3:
            raise LatkitValidationException("Need n >= 1 and d >= 3, got n={0}, d={1}.".format(n, d))
        return cls(n, d)

    @property
    def variables(self) -> int:
        return self.n + 2


def jacobian_hilbert_coefficient(h: HypersurfaceClass, k: int) -> int:
    """Coefficient of t^k in ((1 - t^(d-1)) / (1 - t))^(n+2)."""
    if k < 0:
        return 0
    N = h.variables
    total = 0
    for j in range(N + 1):
        shifted = k - j * (h.d - 1)
        if shifted < 0:
            break
        total += (-1) ** j * comb(N, j, exact=True) * comb(shifted + N - 1, N - 1, exact=True)
    return total


def primitive_hodge_numbers(h: HypersurfaceClass) -> List[int]:
    """h^(n-a+1, a-1)_prim for a = 1..n+1, i.e. p = n down to 0."""
    return [jacobian_hilbert_coefficient(h, a * h.d - h.n - 2) for a in range(1, h.n + 2)]


class MiddleLattice(NamedTuple):
    rank: int
    signature: Optional[Tuple[int, int]]


def middle_rank_and_signature(h: HypersurfaceClass, with_signature: bool = False) -> MiddleLattice:
    """Rank of H^n and, for even n, its signature.

    Primitive classes of type (p, q) are positive for even p and negative for
    odd p; the hyperplane power adds one positive class.
    """
    hodge = primitive_hodge_numbers(h)
    rank = sum(hodge) + (1 if h.n % 2 == 0 else 0)
    if not with_signature:
        return MiddleLattice(rank, None)
    if h.n % 2:
        raise LatkitValidationException("Signature is only defined for even n, got n={0}.".format(h.n))
    plus, minus = 1, 0
    for a, value in enumerate(hodge, start=1):
        p = h.n - a + 1
        if p % 2 == 0:
            plus += value
        else:
            minus += value
    return MiddleLattice(rank, (plus, minus))


def euler_characteristic(h: HypersurfaceClass) -> int:
    """chi of a smooth degree d hypersurface in P^(n+1)."""
    return ((1 - h.d) ** h.variables - 1) // h.d + h.variables


def middle_betti_from_euler(h: HypersurfaceClass) -> int:
    """b_n recovered from chi, all other Betti numbers being those of P^n."""
    chi = euler_characteristic(h)
    if h.n % 2 == 0:
        return chi - h.n
    return h.n + 1 - chi


# -- polynomials and diagonal actions ---------------------------------------------------------

class Polynomial:
    """
    Homogeneous polynomial in Z_0..Z_(N-1) with rational coefficients.

    Parameters
    ----------
    variables:
        number N of variables
    terms:
        iterable of (exponent vector, coefficient)
    """

    def __init__(self, variables: int, terms):
        if variables < 1:
            raise LatkitValidationException("A polynomial needs at least one variable.")
        collected = {}
        for exponents, coefficient in terms:
            exponents = tuple(int(e) for e in exponents)
            if len(exponents) != variables or any(e < 0 for e in exponents):
                raise LatkitValidationException("Bad exponent vector {0}.".format(exponents))
            collected[exponents] = collected.get(exponents, Fraction(0)) + Fraction(coefficient)
        self.terms = {e: c for e, c in sorted(collected.items()) if c != 0}
        if not self.terms:
            raise LatkitValidationException("The zero polynomial defines no hypersurface.")
        degrees = {sum(e) for e in self.terms}
        if len(degrees) != 1:
            raise LatkitValidationException("Polynomial is not homogeneous (degrees {0}).".format(sorted(degrees)))
        self.variables = variables
        self.degree = degrees.pop()

    @classmethod
    def fermat(cls, variables: int, degree: int) -> 'Polynomial':
        return cls(variables, [(tuple(degree * int(i == j) for j in range(variables)), 1) for i in range(variables)])

    @property
    def dimension(self) -> int:
        return self.variables - 2

    def hypersurface_class(self) -> HypersurfaceClass:
        return HypersurfaceClass.of(self.dimension, self.degree)

    def symbols(self):
        return sympy.symbols('Z0:{0}'.format(self.variables))

    def to_poly(self) -> sympy.Poly:
        gens = self.symbols()
        return sympy.Poly.from_dict({e: sympy.Rational(c.numerator, c.denominator) for e, c in self.terms.items()},
                                    *gens, domain=sympy.QQ)

    def partials(self) -> List[sympy.Poly]:
        poly = self.to_poly()
        return [poly.diff(g) for g in poly.gens]

    def to_json(self) -> dict:
        return {"variables": self.variables,
                "terms": [{"exponents": list(e), "coefficient": str(c)} for e, c in self.terms.items()]}

    def __repr__(self):
        return 'Polynomial(' + ' + '.join('{0}*Z^{1}'.format(c, list(e)) for e, c in self.terms.items()) + ')'


def polynomial_from_json(source) -> Polynomial:
    if not isinstance(source, dict) or set(source) - {'variables', 'terms'} or 'terms' not in source:
        raise LatkitValidationException("Polynomial JSON must have 'variables' and 'terms'.")
    variables = source.get('variables')
    if not isinstance(variables, int) or isinstance(variables, bool):
        raise LatkitValidationException("'variables' must be an integer.")
    terms = []
    for term in source['terms']:
        if not isinstance(term, dict) or set(term) != {'exponents', 'coefficient'}:
            raise LatkitValidationException("Each term needs exactly 'exponents' and 'coefficient'.")
        try:
            coefficient = Fraction(str(term['coefficient']))
        except (ValueError, ZeroDivisionError):
            raise LatkitValidationException("Bad coefficient {0}.".format(term['coefficient']))
        terms.append((term['exponents'], coefficient))
    return Polynomial(variables, terms)


class Eigenvalue(NamedTuple):
    """exp(2 pi i exponent / order) with gcd(exponent, order) = 1."""
    order: int
    exponent: int

    @classmethod
    def of(cls, m: int, e: int) -> 'Eigenvalue':
        e %= m
        if e == 0:
            return cls(1, 0)
        g = math.gcd(e, m)
        return cls(m // g, e // g)

    def to_json(self) -> dict:
        return {"order": self.order, "exponent": self.exponent}


class DiagonalAction:
    """
    A = diag(zeta^e_0, ..., zeta^e_(N-1)) with zeta = exp(2 pi i / order).
    """

    def __init__(self, order: int, exponents):
        if order < 1:
            raise LatkitValidationException("Root of unity order must be positive.")
        self.order = order
        self.exponents = tuple(int(e) % order for e in exponents)

    @classmethod
    def from_signs(cls, signs) -> 'DiagonalAction':
        return cls(2, [0 if s > 0 else 1 for s in signs])

    def determinant_exponent(self) -> int:
        return sum(self.exponents) % self.order

    def monomial_exponent(self, monomial) -> int:
        return sum(m * e for m, e in zip(monomial, self.exponents)) % self.order

    def scalar_exponent(self, polynomial: Polynomial) -> int:
        """s with F(A^-1 Z) = zeta^s F; raises if no such scalar exists."""
        if len(self.exponents) != polynomial.variables:
            raise LatkitValidationException("Action has {0} entries for {1} variables.".format(
                len(self.exponents), polynomial.variables))
        values = {-self.monomial_exponent(e) % self.order for e in polynomial.terms}
        if len(values) != 1:
            raise LatkitValidationException("Action {0} does not preserve the polynomial up to a scalar.".format(
                self.exponents))
        return values.pop()

    def to_json(self) -> dict:
        return {"order": self.order, "exponents": list(self.exponents)}

    def __repr__(self):
        return 'DiagonalAction(order={0}, exponents={1})'.format(self.order, list(self.exponents))


def action_from_json(source) -> DiagonalAction:
    if not isinstance(source, dict) or set(source) != {'order', 'exponents'}:
        raise LatkitValidationException("Action JSON must have exactly 'order' and 'exponents'.")
    if not isinstance(source['order'], int) or not all(isinstance(e, int) for e in source['exponents']):
        raise LatkitValidationException("Action order and exponents must be integers.")
    return DiagonalAction(source['order'], source['exponents'])


def _monomials(variables: int, degree: int) -> List[tuple]:
    """Exponent vectors of the given degree in decreasing lexicographic order."""
    if degree < 0:
        return []
    out = []
    for combo in itertools.combinations_with_replacement(range(variables), degree):
        exponents = [0] * variables
        for i in combo:
            exponents[i] += 1
        out.append(tuple(exponents))
    return sorted(set(out), reverse=True)


class ResidueSpace:
    """
    Monomial basis of (R/J)_k, k = a d - n - 2, spanning the residues of
    m Omega / F^a.
    """

    def __init__(self, polynomial: Polynomial, pole_order: int):
        if pole_order < 1:
            raise LatkitValidationException("Pole order must be positive.")
        self.polynomial = polynomial
        self.pole_order = pole_order
        self.hypersurface = polynomial.hypersurface_class()
        self.degree = pole_order * polynomial.degree - polynomial.variables
        if self.degree < 0:
            raise LatkitValidationException("Graded degree {0} is negative for pole order {1}.".format(
                self.degree, pole_order))
        self.basis = self._basis()
        expected = jacobian_hilbert_coefficient(self.hypersurface, self.degree)
        if len(self.basis) != expected:
            raise LatkitValidationException(
                "Polynomial is not smooth: (R/J)_{0} has dimension {1}, expected {2}.".format(
                    self.degree, len(self.basis), expected))

    def _basis(self) -> List[tuple]:
        k = self.degree
        N = self.polynomial.variables
        columns = _monomials(N, k)
        position = {m: i for i, m in enumerate(columns)}
        rows = []
        for partial in self.polynomial.partials():
            if partial.is_zero:
                continue
            terms = partial.terms()
            for multiplier in _monomials(N, k - self.polynomial.degree + 1):
                row = [sympy.Integer(0)] * len(columns)
                for exponents, coefficient in terms:
                    row[position[tuple(a + b for a, b in zip(exponents, multiplier))]] += coefficient
                rows.append(row)
        if not rows:
            return columns
        matrix = DomainMatrix.from_list_sympy(len(rows), len(columns), rows).convert_to(sympy.QQ)
        _, pivots = matrix.rref()
        logger.debug('jacobian degree %d: %d monomials, %d relations', k, len(columns), len(pivots))
        pivots = set(pivots)
        return [m for i, m in enumerate(columns) if i not in pivots]

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def to_json(self) -> dict:
        return {"pole_order": self.pole_order, "degree": self.degree, "basis": [list(m) for m in self.basis]}


def residue_eigenvalues(polynomial: Polynomial, action: DiagonalAction, a: int) -> List[Eigenvalue]:
    """Eigenvalues of A on Res(m Omega / F^a) for the monomial basis m of (R/J)_(a d - n - 2).

    Parameters
    ----------
        polynomial:
            smooth form F
        action:
            diagonal action with F(A^-1 Z) = c F
        a:
            pole order

    Returns
    -------
    eigenvalues:
        one per basis monomial, in basis order; lambda(m) = prod eps_i^(-m_i) * det(A)^-1 * c^-a
    """
    s = action.scalar_exponent(polynomial)
    space = ResidueSpace(polynomial, a)
    m = action.order
    twist = -action.determinant_exponent() - a * s
    return [Eigenvalue.of(m, -action.monomial_exponent(mono) + twist) for mono in space.basis]


def residue_twist(polynomial: Polynomial, action: DiagonalAction, a: int) -> Eigenvalue:
    """det(A)^-1 c^-a, the factor shared by every residue of pole order a."""
    s = action.scalar_exponent(polynomial)
    return Eigenvalue.of(action.order, -action.determinant_exponent() - a * s)


def eigenvalue_multiset(eigenvalues) -> List[Eigenvalue]:
    return sorted(eigenvalues)


class SignPattern(NamedTuple):
    signs: tuple
    eigenvalues: list
    scalar_minus_one: bool


class MinusIdReport(NamedTuple):
    patterns: list
    obstruction: bool
    vacuous: bool

    def to_json(self) -> dict:
        return {"patterns": [{"signs": list(p.signs), "eigenvalues": [e.to_json() for e in p.eigenvalues],
                              "scalar_minus_one": p.scalar_minus_one} for p in self.patterns],
                "obstruction": self.obstruction, "vacuous": self.vacuous}


def preserving_sign_patterns(polynomial: Polynomial) -> List[tuple]:
    """Nontrivial sign patterns preserving F up to scalar, one per class modulo global sign."""
    out = []
    for tail in itertools.product((1, -1), repeat=polynomial.variables - 1):
        signs = (1,) + tail
        if all(s == 1 for s in signs):
            continue
        try:
            DiagonalAction.from_signs(signs).scalar_exponent(polynomial)
        except LatkitValidationException:
            continue
        out.append(signs)
    return out


def minus_id_obstruction(polynomial: Polynomial) -> MinusIdReport:
    """Checks that no diagonal sign symmetry of a cubic threefold acts as -1 on H^(2,1)."""
    h = polynomial.hypersurface_class()
    if (h.n, h.d) != (3, 3):
        raise LatkitValidationException("Expected a cubic threefold, got n={0}, d={1}.".format(h.n, h.d))
    patterns = []
    minus_one = Eigenvalue.of(2, 1)
    for signs in preserving_sign_patterns(polynomial):
        eigenvalues = eigenvalue_multiset(residue_eigenvalues(polynomial, DiagonalAction.from_signs(signs), 2))
        patterns.append(SignPattern(signs, eigenvalues, all(e == minus_one for e in eigenvalues)))
    if not patterns:
        warnings.warn('No nontrivial sign pattern preserves {0!r}; the -id report is vacuous.'.format(polynomial))
        return MinusIdReport([], True, True)
    return MinusIdReport(patterns, not any(p.scalar_minus_one for p in patterns), False)


def scalar_action_orders(limit: int = 12) -> List[int]:
    """Orders m > 1 with phi(m) <= 2."""
    return [m for m in range(2, limit + 1) if sympy.totient(m) <= 2]


def component_count(h: HypersurfaceClass, arf: int = None) -> int:
    """Number of connected components of the marked moduli space.

    For n and d both odd the count is the index of the stabilizer of the
    mod-2 refinement, assuming the lattice isometry group surjects onto
    Sp_2g(F_2), g half the middle rank.
    """
    if (h.n, h.d) == (2, 3) or (h.n % 2 and h.d % 2 == 0):
        return 1
    if h.n % 2 == 0:
        return 2
    if arf not in (0, 1):
        raise LatkitValidationException("Odd n and d need the Arf invariant (0 or 1), got {0}.".format(arf))
    g = middle_rank_and_signature(h).rank // 2
    return refinement_orbit_size(g, arf)

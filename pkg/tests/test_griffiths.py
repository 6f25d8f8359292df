from fractions import Fraction
from unittest import TestCase

from latkit.exceptions.latkit_exception import LatkitValidationException
from latkit.griffiths import (DiagonalAction, Eigenvalue, HypersurfaceClass, Polynomial, ResidueSpace,
                              action_from_json, component_count, euler_characteristic,
                              jacobian_hilbert_coefficient, middle_betti_from_euler, middle_rank_and_signature,
                              minus_id_obstruction, polynomial_from_json, preserving_sign_patterns,
                              primitive_hodge_numbers, residue_eigenvalues, residue_twist, scalar_action_orders)


def _minus_id_cubic():
    return Polynomial(5, [((3, 0, 0, 0, 0), 1), ((0, 3, 0, 0, 0), 1), ((0, 0, 3, 0, 0), 1),
                          ((0, 0, 0, 3, 0), 1), ((1, 0, 0, 0, 2), 1)])


class TestHodgeNumbers(TestCase):

    def test_cubic_threefold(self):
        """It should give (0,5,5,0) for cubic threefolds"""
        self.assertEqual([0, 5, 5, 0], primitive_hodge_numbers(HypersurfaceClass.of(3, 3)))
        self.assertEqual(5, jacobian_hilbert_coefficient(HypersurfaceClass.of(3, 3), 1))

    def test_cubic_fourfold(self):
        """It should give (0,1,20,1,0) and a middle lattice of signature (21,2)"""
        h = HypersurfaceClass.of(4, 3)
        self.assertEqual([0, 1, 20, 1, 0], primitive_hodge_numbers(h))
        self.assertEqual((23, (21, 2)), tuple(middle_rank_and_signature(h, with_signature=True)))

    def test_quartic_surface(self):
        """It should give (1,19,1) and the K3 signature (3,19)"""
        h = HypersurfaceClass.of(2, 4)
        self.assertEqual([1, 19, 1], primitive_hodge_numbers(h))
        self.assertEqual((22, (3, 19)), tuple(middle_rank_and_signature(h, with_signature=True)))

    def test_cubic_surface_and_curve(self):
        """It should give (0,6,0) for cubic surfaces and (1,1) for plane cubics"""
        self.assertEqual([0, 6, 0], primitive_hodge_numbers(HypersurfaceClass.of(2, 3)))
        self.assertEqual((7, (1, 6)), tuple(middle_rank_and_signature(HypersurfaceClass.of(2, 3), True)))
        self.assertEqual([1, 1], primitive_hodge_numbers(HypersurfaceClass.of(1, 3)))

    def test_signature_needs_even_dimension(self):
        """It should refuse a signature for odd n"""
        with self.assertRaises(LatkitValidationException):
            middle_rank_and_signature(HypersurfaceClass.of(3, 3), with_signature=True)

    def test_euler_cross_check(self):
        """It should recover the middle Betti number from the Euler characteristic"""
        self.assertEqual(-6, euler_characteristic(HypersurfaceClass.of(3, 3)))
        for n, d in ((1, 3), (1, 4), (2, 3), (2, 4), (3, 3), (4, 3), (3, 4)):
            h = HypersurfaceClass.of(n, d)
            self.assertEqual(middle_rank_and_signature(h).rank, middle_betti_from_euler(h), (n, d))

    def test_negative_degree(self):
        """It should give zero below degree 0"""
        self.assertEqual(0, jacobian_hilbert_coefficient(HypersurfaceClass.of(3, 3), -1))

    def test_bad_class(self):
        """It should refuse n < 1 or d < 3"""
        with self.assertRaises(LatkitValidationException):
            HypersurfaceClass.of(0, 3)
        with self.assertRaises(LatkitValidationException):
            HypersurfaceClass.of(2, 2)


class TestPolynomial(TestCase):

    def test_homogeneous(self):
        """It should refuse mixed degrees and the zero polynomial"""
        with self.assertRaises(LatkitValidationException):
            Polynomial(2, [((2, 0), 1), ((0, 1), 1)])
        with self.assertRaises(LatkitValidationException):
            Polynomial(2, [((1, 0), 1), ((1, 0), -1)])

    def test_json(self):
        """It should read back its JSON form"""
        cubic = _minus_id_cubic()
        again = polynomial_from_json(cubic.to_json())
        self.assertEqual(cubic.terms, again.terms)
        self.assertEqual(3, again.degree)
        self.assertEqual(Fraction(1, 2), polynomial_from_json(
            {"variables": 1, "terms": [{"exponents": [3], "coefficient": "1/2"}]}).terms[(3,)])
        with self.assertRaises(LatkitValidationException):
            polynomial_from_json({"variables": 1, "terms": [{"exponents": [3]}]})

    def test_action_json(self):
        """It should read an action and reject extra fields"""
        action = action_from_json({"order": 3, "exponents": [1, 0, 4]})
        self.assertEqual((1, 0, 1), action.exponents)
        with self.assertRaises(LatkitValidationException):
            action_from_json({"order": 3, "exponents": [1], "name": "x"})


class TestResidues(TestCase):

    def test_fermat_space(self):
        """It should span (R/J)_1 of the Fermat cubic threefold by the five variables"""
        space = ResidueSpace(Polynomial.fermat(5, 3), 2)
        self.assertEqual(1, space.degree)
        self.assertEqual(5, space.dimension)

    def test_negative_degree(self):
        """It should refuse a pole order with negative graded degree"""
        with self.assertRaises(LatkitValidationException):
            ResidueSpace(Polynomial.fermat(5, 3), 1)

    def test_singular(self):
        """It should detect a singular form by the dimension of the quotient"""
        with self.assertRaises(LatkitValidationException):
            ResidueSpace(Polynomial(5, [((3, 0, 0, 0, 0), 1)]), 3)

    def test_eigenvalue_reduction(self):
        """It should reduce roots of unity to lowest terms"""
        self.assertEqual(Eigenvalue(2, 1), Eigenvalue.of(4, 2))
        self.assertEqual(Eigenvalue(1, 0), Eigenvalue.of(3, 3))

    def test_sign_action(self):
        """It should give one trivial and four -1 eigenvalues for the Z4 sign flip"""
        eigenvalues = sorted(residue_eigenvalues(_minus_id_cubic(), DiagonalAction.from_signs((1, 1, 1, 1, -1)), 2))
        self.assertEqual([Eigenvalue(1, 0)] + [Eigenvalue(2, 1)] * 4, eigenvalues)

    def test_identity(self):
        """It should act trivially for the identity"""
        eigenvalues = residue_eigenvalues(_minus_id_cubic(), DiagonalAction(1, [0] * 5), 2)
        self.assertEqual([Eigenvalue(1, 0)] * 5, eigenvalues)

    def test_twist(self):
        """It should pick up det(A)^-1 on the constant residue of the Fermat cubic fourfold"""
        fermat = Polynomial.fermat(6, 3)
        action = DiagonalAction(3, [1, 0, 0, 0, 0, 0])
        self.assertEqual(Eigenvalue(3, 2), residue_twist(fermat, action, 2))
        self.assertEqual([Eigenvalue(3, 2)], residue_eigenvalues(fermat, action, 2))

    def test_not_preserved(self):
        """It should refuse an action that does not scale the polynomial"""
        with self.assertRaises(LatkitValidationException):
            residue_eigenvalues(_minus_id_cubic(), DiagonalAction.from_signs((-1, 1, 1, 1, 1)), 2)


class TestMinusId(TestCase):

    def test_patterns(self):
        """It should find the single sign pattern of Z0^3 + ... + Z3^3 + Z0 Z4^2"""
        self.assertEqual([(1, 1, 1, 1, -1)], preserving_sign_patterns(_minus_id_cubic()))

    def test_obstruction(self):
        """It should find no sign symmetry acting as -1 on H^(2,1)"""
        report = minus_id_obstruction(_minus_id_cubic())
        self.assertTrue(report.obstruction)
        self.assertFalse(report.vacuous)
        self.assertFalse(report.patterns[0].scalar_minus_one)

    def test_fermat_vacuous(self):
        """It should warn that the Fermat cubic threefold check is vacuous"""
        with self.assertWarns(UserWarning):
            report = minus_id_obstruction(Polynomial.fermat(5, 3))
        self.assertTrue(report.vacuous)
        self.assertEqual([], report.patterns)

    def test_needs_cubic_threefold(self):
        """It should refuse other hypersurface classes"""
        with self.assertRaises(LatkitValidationException):
            minus_id_obstruction(Polynomial.fermat(4, 3))


class TestComponents(TestCase):

    def test_scalar_orders(self):
        """It should list the orders m with phi(m) <= 2"""
        self.assertEqual([2, 3, 4, 6], scalar_action_orders())

    def test_counts(self):
        """It should count components for each parity case"""
        self.assertEqual(1, component_count(HypersurfaceClass.of(2, 3)))
        self.assertEqual(1, component_count(HypersurfaceClass.of(1, 4)))
        self.assertEqual(2, component_count(HypersurfaceClass.of(4, 3)))
        self.assertEqual(528, component_count(HypersurfaceClass.of(3, 3), 0))
        self.assertEqual(496, component_count(HypersurfaceClass.of(3, 3), 1))

    def test_needs_arf(self):
        """It should require the Arf invariant when n and d are odd"""
        with self.assertRaises(LatkitValidationException):
            component_count(HypersurfaceClass.of(3, 3))

import random
from fractions import Fraction
from unittest import TestCase

import numpy as np

from latkit.exceptions.latkit_exception import GlueMismatchException, LatkitValidationException
from latkit.fqm import discriminant_module, fqm_isometries
from latkit.gluing import (compatible, extend_isometry, extending_signs, glue_data, overlattice_from_glue,
                           overlattice_summands, restrict_isometry, sign_selection)
from latkit.isometry import Isometry, automorphism_group, hyperbolic_automorphisms
from latkit.lattice import Lattice, Sublattice, make_standard, signature, span, twist
from latkit.linalg import identity, integer_left_kernel, random_unimodular, rational_rank


def _u3_fixture():
    u3 = twist(make_standard('U'), 3)
    module = discriminant_module(u3)
    e = module.coords([Fraction(1, 3), 0])
    f = module.coords([0, Fraction(1, 3)])
    return overlattice_summands(u3, u3, [(e, e), (f, module.negate(f))])


class TestGlueData(TestCase):

    def test_u(self):
        """It should glue x1 + x2 and its complement in U along Z/2"""
        u = make_standard('U')
        glue = glue_data(u, span(u, (1, 1)))
        self.assertEqual(2, glue.glue_order)
        self.assertTrue(glue.is_isotropic())
        self.assertEqual(Fraction(1, 2), glue.module_m.q(glue.module_m.generator(0)))

    def test_unimodular_summand(self):
        """It should give a trivial glue group for a unimodular summand"""
        total = Lattice([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
        glue = glue_data(total, span(total, (1, 0, 0, 0), (0, 1, 0, 0)))
        self.assertEqual(1, glue.glue_order)
        self.assertEqual(-1, glue.lattice_n.det)

    def test_genus3_sublattice(self):
        """It should glue (3,-1,...,-1) to its E7 complement in I_{1,7} along Z/2"""
        lattice = make_standard('I_1,7')
        glue = glue_data(lattice, span(lattice, (3,) + (-1,) * 7))
        self.assertEqual(2, glue.glue_order)
        self.assertEqual(7, glue.complement.rank)

    def test_requires_unimodular(self):
        """It should refuse a non-unimodular ambient lattice"""
        a2 = make_standard('A2')
        with self.assertRaises(LatkitValidationException):
            glue_data(a2, span(a2, (1, 0)))

    def test_requires_primitive(self):
        """It should refuse an imprimitive sublattice"""
        u = make_standard('U')
        with self.assertRaises(LatkitValidationException):
            glue_data(u, span(u, (2, 2)))


class TestExtension(TestCase):

    def setUp(self):
        u = make_standard('U')
        self.glue = glue_data(u, span(u, (1, 1)))

    def test_swap(self):
        """It should extend (+1, -1) to the swap of U"""
        g = extend_isometry(self.glue, identity(1), -identity(1))
        self.assertEqual([[0, 1], [1, 0]], g.to_json()["matrix"])

    def test_minus_id(self):
        """It should extend (-1, -1) to -id"""
        g = extend_isometry(self.glue, -identity(1), -identity(1))
        self.assertEqual([[-1, 0], [0, -1]], g.to_json()["matrix"])

    def test_round_trip(self):
        """It should restrict an extension back to the pair"""
        g = extend_isometry(self.glue, -identity(1), identity(1))
        pair = restrict_isometry(self.glue, g)
        self.assertEqual([[-1]], pair.on_m.to_json()["matrix"])
        self.assertEqual([[1]], pair.on_n.to_json()["matrix"])

    def test_restrict_requires_invariance(self):
        """It should refuse an isometry that moves the sublattice"""
        lattice = make_standard('I_2,0')
        glue = glue_data(lattice, span(lattice, (1, 0)))
        self.assertEqual([[-1]], restrict_isometry(glue, Isometry([[1, 0], [0, -1]], lattice)).on_n.to_json()["matrix"])
        with self.assertRaises(LatkitValidationException):
            restrict_isometry(glue, Isometry([[0, 1], [1, 0]], lattice))

    def test_mismatch(self):
        """It should signal incompatible discriminant actions"""
        u = make_standard('U')
        glue = glue_data(u, span(u, (1, 3)))
        self.assertEqual(6, glue.glue_order)
        self.assertFalse(compatible(glue, -identity(1), identity(1)))
        with self.assertRaises(GlueMismatchException):
            extend_isometry(glue, -identity(1), identity(1))

    def test_random_round_trip(self):
        """It should round-trip 50 random compatible pairs from Aut(M) x Aut(N) and reject the rest"""
        rng = random.Random(31)
        i3 = make_standard('I_3,0')
        queue = [glue_data(i3, span(i3, (1, -1, 0), (0, 1, -1)))]
        compatible_pairs = 0
        while compatible_pairs < 50:
            if queue:
                glue = queue.pop()
            else:
                base = make_standard('I_{0},0'.format(rng.randint(3, 6)))
                P = random_unimodular(base.rank, rng)
                lattice = Lattice(P.dot(base.gram).dot(P.T))
                rows = np.asarray([[rng.randint(-2, 2) for _ in range(lattice.rank)]
                                   for _ in range(rng.choice((1, 2)))], dtype=object)
                if rational_rank(rows) != rows.shape[0]:
                    continue
                glue = glue_data(lattice, Sublattice(lattice, integer_left_kernel(integer_left_kernel(rows.T).T)))
            group_m = automorphism_group(glue.lattice_m).elements()
            group_n = automorphism_group(glue.lattice_n).elements()
            for _ in range(10):
                s_m, s_n = rng.choice(group_m), rng.choice(group_n)
                if not compatible(glue, s_m, s_n):
                    with self.assertRaises(GlueMismatchException):
                        extend_isometry(glue, s_m, s_n)
                    continue
                g = extend_isometry(glue, s_m, s_n)
                self.assertTrue(g.preserves(glue.ambient.gram))
                pair = restrict_isometry(glue, g)
                self.assertEqual(s_m, pair.on_m)
                self.assertEqual(s_n, pair.on_n)
                compatible_pairs += 1

    def test_deliberate_mismatch(self):
        """It should refuse -id on A2 together with id on its complement in I_3"""
        i3 = make_standard('I_3,0')
        glue = glue_data(i3, span(i3, (1, -1, 0), (0, 1, -1)))
        self.assertEqual(3, glue.glue_order)
        self.assertFalse(compatible(glue, -identity(2), identity(1)))
        with self.assertRaises(GlueMismatchException):
            extend_isometry(glue, -identity(2), identity(1))
        self.assertTrue(compatible(glue, -identity(2), -identity(1)))


class TestOverlattice(TestCase):

    def test_two_minus_two(self):
        """It should glue <2> and <-2> into an even unimodular lattice"""
        result = overlattice_from_glue(make_standard('diag(2)'), make_standard('diag(-2)'), [((1,), (1,))])
        self.assertEqual(-1, result.det)
        self.assertTrue(result.is_even())

    def test_not_isotropic(self):
        """It should reject glue that is not isotropic"""
        a1 = make_standard('A1')
        with self.assertRaises(LatkitValidationException):
            overlattice_from_glue(a1, a1, [((1,), (1,))])

    def test_u3_fixture(self):
        """It should glue U(3) + U(3) to an even unimodular lattice of signature (2,2)"""
        fixture = _u3_fixture()
        self.assertEqual(1, fixture.lattice.det)
        self.assertTrue(fixture.lattice.is_even())
        self.assertEqual((2, 2), signature(fixture.lattice))
        self.assertEqual([[0, 3], [3, 0]], fixture.summand_m.gram.tolist())


class TestSignSelection(TestCase):

    def test_exactly_one_sign(self):
        """It should select exactly one of +-zeta fixing the class of (x1 + x2)/3"""
        module = discriminant_module(twist(make_standard('U'), 3))
        target = module.add(module.coords([Fraction(1, 3), 0]), module.coords([0, Fraction(1, 3)]))
        result = sign_selection(module, fqm_isometries(module), target)
        self.assertTrue(result.exactly_one)
        self.assertEqual(4, len(result.signs))

    def test_extending_signs(self):
        """It should extend exactly one of +-zeta together with an automorphism of M fixing x1 + x2"""
        fixture = _u3_fixture()
        glue = glue_data(fixture.lattice, fixture.summand_m, complement=fixture.summand_n)
        elements = hyperbolic_automorphisms().elements()
        for zeta in fqm_isometries(glue.module_n):
            self.assertEqual(1, len(extending_signs(glue, zeta, elements, elements, fixing=(1, 1))))

import random
from fractions import Fraction
from unittest import TestCase
from unittest.mock import patch

import numpy as np

from latkit.exceptions.latkit_exception import (LatkitCalculationException, LatkitValidationException,
                                                ResourceLimitException)
from latkit.fqm import (FqmMap, FqmSubgroup, QuadraticRefinementMod2, all_refinements, arf_and_orbit,
                        discriminant_module, extension_count_fixing_subgroup, fqm_automorphism_group,
                        fqm_isometries, induced_map, integral_value_subgroup, is_p_elementary,
                        natural_anti_isometry, orthogonal_sum, quotient_module, refinement_orbit_size,
                        refinement_orbits, symplectic_group_order, symplectic_inner_product, transvection)
from latkit.input import Limits
from latkit.isometry import automorphism_group
from latkit.lattice import Lattice, make_standard, span, twist
from latkit.linalg import random_unimodular


class TestDiscriminantModule(TestCase):

    def test_a2(self):
        """It should give Z/3 with q = 2/3 for A2"""
        module = discriminant_module(make_standard('A2'))
        self.assertEqual((3,), module.invariants)
        self.assertEqual([Fraction(2, 3)], module.q_values())
        self.assertEqual(2, module.q_modulus)

    def test_unimodular(self):
        """It should give the trivial module for E8"""
        module = discriminant_module(make_standard('E8'))
        self.assertEqual(0, module.rank)
        self.assertEqual(1, module.order)

    def test_u3(self):
        """It should give (Z/3)^2 with q = 0 on generators and b = 1/3 for U(3)"""
        module = discriminant_module(twist(make_standard('U'), 3))
        self.assertEqual({"invariants": [3, 3], "order": 9, "q_modulus": 2, "q": ["0", "0"],
                          "b": [["0", "1/3"], ["1/3", "0"]]}, module.to_json())

    def test_two_elementary(self):
        """It should recognise (Z/2)^8 for I_{1,7}(2)"""
        module = discriminant_module(twist(make_standard('I_1,7'), 2))
        self.assertEqual((True, 8), tuple(is_p_elementary(module, 2)))
        self.assertEqual((False, None), tuple(is_p_elementary(discriminant_module(make_standard('A3')), 2)))

    def test_conjugation_invariance(self):
        """It should give isomorphic forms for a random basis change"""
        rng = random.Random(2)
        d4 = make_standard('D4')
        for _ in range(5):
            P = random_unimodular(4, rng)
            other = discriminant_module(Lattice(P.dot(d4.gram).dot(P.T)))
            self.assertEqual((2, 2), other.invariants)
            self.assertEqual(sorted(other.q(a) for a in other.elements()), [0, 1, 1, 1])

    def test_coords_of_lifts(self):
        """It should map each generator lift back to the generator"""
        module = discriminant_module(make_standard('D5'))
        for i in range(module.rank):
            self.assertEqual(module.generator(i), module.coords(module.lifts[i]))
        self.assertEqual(module.zero, module.coords([1, 0, 0, 0, 0]))

    def test_quotient_module(self):
        """It should build (1/2)E7/E7 with q = 1 on every basis vector"""
        module = quotient_module(make_standard('E7'), 2)
        self.assertEqual(128, module.order)
        self.assertEqual([Fraction(1)] * 7, module.q_values())

    def test_integral_value_subgroup(self):
        """It should find the 128 classes of I_{1,7}(2) with integral q"""
        module = discriminant_module(twist(make_standard('I_1,7'), 2))
        self.assertEqual(128, integral_value_subgroup(module).order)

    def test_orthogonal_sum(self):
        """It should concatenate coordinates and add forms"""
        a2 = discriminant_module(make_standard('A2'))
        total = orthogonal_sum(a2, a2)
        self.assertEqual((3, 3), total.invariants)
        self.assertEqual(Fraction(4, 3), total.q((1, 1)))
        self.assertEqual(Fraction(0), total.b((1, 0), (0, 1)))


class TestMaps(TestCase):

    def test_induced_by_minus_id(self):
        """It should induce -1 on A_{A2} from -id"""
        a2 = make_standard('A2')
        f = induced_map(a2, [[-1, 0], [0, -1]])
        self.assertEqual(((2,),), f.images)
        self.assertTrue(f.is_isometry())

    def test_induced_rejects_non_isometry(self):
        """It should reject a matrix that does not preserve the form"""
        with self.assertRaises(LatkitValidationException):
            induced_map(make_standard('A2'), [[1, 1], [0, 1]])

    def test_bad_images(self):
        """It should reject images that do not respect generator orders"""
        z4 = discriminant_module(make_standard('diag(4)'))
        z2 = discriminant_module(make_standard('diag(2)'))
        with self.assertRaises(LatkitValidationException):
            FqmMap(z2, z4, [(1,)])

    def test_natural_anti_isometry(self):
        """It should glue x1 + x2 and x1 - x2 in U with q_N(phi a) = -q_M(a) mod 2"""
        u = make_standard('U')
        phi = natural_anti_isometry(u, span(u, (1, 1)))
        self.assertTrue(phi.is_isometry(sign=-1, modulus=2))
        self.assertEqual(Fraction(3, 2), phi.target.q(phi.images[0]))

    def test_induced_homomorphism(self):
        """It should send products of D4 isometries to composites and respect addition"""
        d4 = make_standard('D4')
        module = discriminant_module(d4)
        elements = automorphism_group(d4).elements()
        rng = random.Random(37)
        classes = list(module.elements())
        for _ in range(40):
            g, h = rng.choice(elements), rng.choice(elements)
            self.assertEqual(induced_map(d4, g.compose(h)), induced_map(d4, g).compose(induced_map(d4, h)))
            f = induced_map(d4, g)
            a, c = rng.choice(classes), rng.choice(classes)
            self.assertEqual(f.apply(module.add(a, c)), module.add(f.apply(a), f.apply(c)))


class TestIsometrySearch(TestCase):

    def test_a2(self):
        """It should find {+1, -1} on Z/3"""
        group = fqm_automorphism_group(discriminant_module(make_standard('A2')))
        self.assertEqual(2, group.order)

    def test_d4(self):
        """It should find S3 permuting the three nonzero classes of A_{D4}"""
        module = discriminant_module(make_standard('D4'))
        self.assertEqual(6, fqm_automorphism_group(module).order)
        self.assertEqual(6, len(fqm_isometries(module)))

    def test_u3(self):
        """It should find four isometries of A_{U(3)}"""
        module = discriminant_module(twist(make_standard('U'), 3))
        maps = fqm_isometries(module)
        self.assertEqual(4, len(maps))
        self.assertTrue(all(f.is_isometry() for f in maps))

    def test_fixing_subgroup(self):
        """It should count isometries fixing a subgroup pointwise"""
        module = discriminant_module(make_standard('D4'))
        self.assertEqual(6, extension_count_fixing_subgroup(module, FqmSubgroup(module, [])))
        self.assertEqual(2, extension_count_fixing_subgroup(module, FqmSubgroup(module, [module.generator(0)])))
        self.assertEqual(1, extension_count_fixing_subgroup(module, FqmSubgroup(module, list(module.elements()))))

    def test_symplectic_quotient(self):
        """It should find |Sp_6(F_2)| isometries of (1/2)E7/E7"""
        group = fqm_automorphism_group(quotient_module(make_standard('E7'), 2))
        self.assertEqual(symplectic_group_order(3), group.order)

    def test_size_bound(self):
        """It should refuse modules above the configured bound"""
        module = discriminant_module(twist(make_standard('I_1,7'), 2))
        with self.assertRaises(ResourceLimitException):
            fqm_automorphism_group(module, limits=Limits(fqm_bound=100))


class TestRefinements(TestCase):

    def test_symplectic_orders(self):
        """It should give |Sp_2g(F_2)| for small g"""
        self.assertEqual([6, 720, 1451520], [symplectic_group_order(g) for g in (1, 2, 3)])

    def test_transvection_involution(self):
        """It should preserve the form and square to the identity"""
        h = np.array([1, 0, 1, 1], dtype=np.uint8)
        x = np.array([0, 1, 1, 0], dtype=np.uint8)
        y = np.array([1, 1, 0, 1], dtype=np.uint8)
        self.assertTrue(np.array_equal(transvection(transvection(x, h), h), x))
        self.assertEqual(symplectic_inner_product(x, y),
                         symplectic_inner_product(transvection(x, h), transvection(y, h)))

    def test_rejects_non_refinement(self):
        """It should reject (0,0,0) on (e, f, e+f)"""
        with self.assertRaises(LatkitValidationException):
            QuadraticRefinementMod2.from_values(1, (0, 0, 0))

    def test_genus_one_examples(self):
        """It should give Arf 0 with orbit 3 and Arf 1 with orbit 1"""
        self.assertEqual((0, 3), tuple(arf_and_orbit(1, QuadraticRefinementMod2.from_values(1, (0, 0, 1)))))
        self.assertEqual((1, 1), tuple(arf_and_orbit(1, QuadraticRefinementMod2.from_values(1, (1, 1, 1)))))

    def test_identity_holds(self):
        """It should satisfy q(u+v) = q(u) + q(v) + b(u,v) for every refinement"""
        self.assertTrue(all(r.satisfies_identity() for r in all_refinements(2)))

    def test_orbits(self):
        """It should find two orbits matching the closed form for g <= 3"""
        self.assertEqual([3, 1], refinement_orbits(1))
        self.assertEqual([10, 6], refinement_orbits(2))
        self.assertEqual([36, 28], refinement_orbits(3))
        for g in (1, 2, 3):
            self.assertEqual(4 ** g, refinement_orbit_size(g, 0) + refinement_orbit_size(g, 1))

    def test_orbit_sizes_divide_group_order(self):
        """It should give orbit sizes dividing |Sp_2g(F_2)|"""
        for g in (1, 2, 3):
            for size in refinement_orbits(g):
                self.assertEqual(0, symplectic_group_order(g) % size, (g, size))

    def test_orbit_count_checked(self):
        """It should raise when the orbit split is not two orbits covering all refinements"""
        with patch('latkit.fqm._refinement_orbit', lambda g, table: frozenset({table})):
            with self.assertRaises(LatkitCalculationException):
                refinement_orbits(1)
        with self.assertRaises(LatkitValidationException):
            refinement_orbits(4)

    def test_genus_range(self):
        """It should refuse g outside 1..3"""
        with self.assertRaises(LatkitValidationException):
            arf_and_orbit(4, QuadraticRefinementMod2(4, [0] * 8))

"""
Verification scenarios: each re-derives a family of statements about the
moduli of hypersurfaces from the lattice, discriminant and residue
computations of the library, and compares them with frozen expectations.
"""
import functools
import json
import logging
import pkgutil
import random
import time
import warnings
from fractions import Fraction

import numpy as np

from latkit.constants import Constants
from latkit.exceptions.latkit_exception import (GlueMismatchException, LatkitCalculationException,
                                                LatkitValidationException, ResourceLimitException)
from latkit.fqm import (FqmSubgroup, arf_and_orbit, discriminant_module, extension_count_fixing_subgroup,
                        fqm_automorphism_group, fqm_isometries, induced_map, integral_value_subgroup,
                        is_p_elementary, quotient_module, refinement_orbit_size, refinement_orbits,
                        symplectic_group_order, QuadraticRefinementMod2)
from latkit.gluing import (compatible, extend_isometry, extending_signs, glue_data, overlattice_from_glue,
                           overlattice_summands, restrict_isometry, sign_selection)
from latkit.griffiths import (DiagonalAction, HypersurfaceClass, Polynomial, ResidueSpace, component_count,
                              jacobian_hilbert_coefficient, middle_betti_from_euler, middle_rank_and_signature,
                              minus_id_obstruction, primitive_hodge_numbers, residue_eigenvalues, residue_twist,
                              scalar_action_orders)
from latkit.input import DEFAULT_LIMITS
from latkit.isometry import (Isometry, automorphism_group, congruence_kernel, discriminant_image,
                             hyperbolic_automorphisms, isometry_test, stabilizer_of_vector_in_unimodular)
from latkit.lattice import (Lattice, Sublattice, direct_sum, is_characteristic, make_standard,
                            orthogonal_complement, signature, span, sublattice_index_and_primitivity, twist)
from latkit.linalg import det_exact, identity, integer_left_kernel, random_unimodular, rational_rank
from latkit.model.report import Claim, ScenarioReport

logger = logging.getLogger(__name__)

SMOKE_SEED = 20240611
SMOKE_CASES = 20
SMOKE_PAIRS = 50
SMOKE_DRAWS = 12
SMOKE_AMBIENTS = ('U+U', 'I_1,3', 'I_2,2', 'I_1,4', 'U+I_1,1', 'I_3,1')
SMOKE_DEFINITE_AMBIENTS = ('I_3,0', 'I_4,0', 'I_5,0', 'I_6,0')


@functools.lru_cache
def expected_claims() -> dict:
    """Frozen expectations, keyed by scenario then claim id."""
    return json.loads(pkgutil.get_data('latkit', 'data/expected_claims.json').decode('utf-8'))


class _Runner:
    """Collects the claims and notes of one scenario run."""

    def __init__(self, scenario: str, limits):
        self.scenario = scenario
        self.limits = limits
        self.expected = expected_claims()[scenario]
        self.claims = []
        self.notes = []
        self._memo = {}

    def value(self, key, compute):
        """Shared intermediate result; a failure propagates to every claim using it."""
        if key not in self._memo:
            self._memo[key] = compute()
        return self._memo[key]

    def check(self, claim_id: str, compute):
        entry = self.expected[claim_id]
        computed, error, limited = None, None, False
        try:
            computed = compute()
        except ResourceLimitException as e:
            error, limited = str(e), True
        except (LatkitCalculationException, LatkitValidationException) as e:
            error = '{0}: {1}'.format(type(e).__name__, e)
        claim = Claim(claim_id, entry['anchor'], computed, entry['expected'], entry['provenance'],
                      error=error, resource_limited=limited)
        self.claims.append(claim)
        if claim.passed:
            logger.info('%s/%s: pass', self.scenario, claim_id)
        else:
            logger.warning('%s/%s: FAIL computed=%s expected=%s error=%s', self.scenario, claim_id,
                           claim.computed, claim.expected, error)
        return claim

    def note(self, message: str):
        warnings.warn(message)
        self.notes.append(message)


# -- genus 3 ---------------------------------------------------------------------------------

def _genus3(run: _Runner):
    odd = make_standard('I_1,7')
    m_lattice = twist(odd, 2)
    eta = (3, -1, -1, -1, -1, -1, -1, -1)
    module = run.value('a_m', lambda: discriminant_module(m_lattice))
    perp = run.value('perp', lambda: orthogonal_complement(odd, span(odd, eta)))
    e7 = make_standard('E7')

    run.check('discriminant-group', lambda: list(module.invariants))
    run.check('discriminant-p-elementary', lambda: is_p_elementary(module, 2)._asdict())
    run.check('eta0-perp-is-E7', lambda: isometry_test(perp.lattice(), twist(e7, -1), run.limits) is not None)
    glue = run.value('glue', lambda: glue_data(odd, span(odd, eta)))
    run.check('eta0-glue-order', lambda: glue.glue_order)
    run.check('sublattice-index',
              lambda: sublattice_index_and_primitivity(odd, span(odd, eta, *perp.basis.tolist())).index)

    aut = run.value('aut', lambda: automorphism_group(e7, run.limits))
    kernel = run.value('kernel', lambda: congruence_kernel(e7, 2, run.limits))
    image = run.value('image', lambda: fqm_automorphism_group(quotient_module(e7, 2), limits=run.limits))
    run.check('aut-E7-order', lambda: aut.order)
    run.check('sequence-kernel', lambda: {
        "order": kernel.order,
        "contains_minus_id": Isometry._trusted(-identity(7), e7) in set(kernel.elements())})
    run.check('sequence-image-order', lambda: image.order)
    run.check('sequence-surjective', lambda: aut.order == kernel.order * image.order)
    run.check('symplectic-order', lambda: symplectic_group_order(3))

    def value_subgroup():
        subgroup = integral_value_subgroup(module)
        halves = FqmSubgroup(module, [module.coords([Fraction(x, 2) for x in p]) for p in perp.basis.tolist()])
        return {"order": subgroup.order, "equals_image_of_half_p": subgroup == halves}

    run.check('integral-value-subgroup', value_subgroup)
    run.check('extensions-fixing-subgroup',
              lambda: extension_count_fixing_subgroup(module, integral_value_subgroup(module), limits=run.limits))

    def explicit_extensions():
        subgroup = integral_value_subgroup(module)
        reflection = extend_isometry(glue, identity(1), -identity(perp.rank))
        maps = [induced_map(module, g) for g in (Isometry.identity(odd), reflection)]
        return {"both_fix_subgroup": all(f.apply(s) == s for f in maps for s in subgroup.generators),
                "trivial_on_discriminant": sum(1 for f in maps if f.is_identity())}

    run.check('extensions-explicit', explicit_extensions)
    run.check('n-side-hodge-type', lambda: {"rank": 22 - m_lattice.rank, "hodge": [1, 22 - m_lattice.rank - 2, 1]})
    run.note('The N-side Hodge type is printed as (1,14,1); rank 22 - 8 = 14 forces (1,12,1).')
    run.note('The sentence on the mu_4 action has an unbalanced clause; the claim checked is the '
             'lattice statement only.')


# -- genus 4 ---------------------------------------------------------------------------------

def _u3_glue_fixture():
    """U(3) + U(3) glued along (a, b) -> (a, -b), with both summands as sublattices."""
    u3 = twist(make_standard('U'), 3)
    module = discriminant_module(u3)
    e = module.coords([Fraction(1, 3), 0])
    f = module.coords([0, Fraction(1, 3)])
    return overlattice_summands(u3, u3, [(e, e), (f, module.negate(f))])


def _genus4(run: _Runner):
    hyperbolic = run.value('aut_u', lambda: hyperbolic_automorphisms(run.limits))
    u3 = twist(make_standard('U'), 3)
    module = discriminant_module(u3)

    run.check('aut-U', lambda: sorted(g.to_json()["matrix"] for g in hyperbolic.elements()))
    run.check('discriminant-U3', module.to_json)

    def selection():
        isometries = fqm_isometries(module, run.limits)
        target = module.add(module.coords([Fraction(1, 3), 0]), module.coords([0, Fraction(1, 3)]))
        result = sign_selection(module, isometries, target)
        return {"isometries": len(isometries), "exactly_one": result.exactly_one}

    run.check('sign-selection', selection)
    fixture = run.value('fixture', _u3_glue_fixture)
    run.check('glue-fixture', lambda: {"rank": fixture.lattice.rank, "det": fixture.lattice.det,
                                       "even": fixture.lattice.is_even(),
                                       "signature": list(signature(fixture.lattice))})
    glue = run.value('glue', lambda: glue_data(fixture.lattice, fixture.summand_m, complement=fixture.summand_n))
    elements = hyperbolic.elements()

    def extension_signs():
        isometries = fqm_isometries(glue.module_n, run.limits)
        signs = [extending_signs(glue, zeta, elements, elements, fixing=(1, 1)) for zeta in isometries]
        return {"isometries": len(isometries), "exactly_one_each": all(len(s) == 1 for s in signs)}

    run.check('extension-sign-selection', extension_signs)

    def round_trip():
        pairs, mismatches, ok = 0, 0, True
        for s_m in elements:
            for s_n in elements:
                if not compatible(glue, s_m, s_n):
                    try:
                        extend_isometry(glue, s_m, s_n)
                    except GlueMismatchException:
                        mismatches += 1
                    continue
                pairs += 1
                back = restrict_isometry(glue, extend_isometry(glue, s_m, s_n))
                ok = ok and back.on_m == s_m and back.on_n == s_n
        return {"compatible_pairs": pairs, "mismatches": mismatches, "round_trip": ok}

    run.check('glue-round-trip', round_trip)
    run.check('n-side-hodge-type', lambda: {"rank": 22 - 2, "hodge": [1, 22 - 2 - 2, 1]})


# -- cubic surfaces --------------------------------------------------------------------------

def _cubic_surface_weyl(run: _Runner):
    lattice = make_standard('I_1,6')
    eta = (3, -1, -1, -1, -1, -1, -1)
    perp = run.value('perp', lambda: orthogonal_complement(lattice, span(lattice, eta)).lattice())
    group = run.value('aut', lambda: automorphism_group(perp, run.limits))

    run.check('eta-characteristic', lambda: is_characteristic(lattice, eta))
    run.check('eta-perp', lambda: {
        "rank": perp.rank, "even": perp.is_even(), "abs_det": abs(perp.det),
        "isometric_to_E6": isometry_test(perp, twist(make_standard('E6'), -1), run.limits) is not None})
    run.check('aut-eta-perp-order', lambda: group.order)
    run.check('discriminant-image-order', lambda: len(discriminant_image(group, run.limits)))
    run.check('stabilizer-order', lambda: stabilizer_of_vector_in_unimodular(lattice, eta, limits=run.limits))


def _cubic_threefold_hodge(run: _Runner):
    h = HypersurfaceClass.of(3, 3)
    run.check('hodge', lambda: primitive_hodge_numbers(h))
    run.check('middle-rank', lambda: middle_rank_and_signature(h).rank)
    run.check('hilbert-coefficient', lambda: jacobian_hilbert_coefficient(h, 1))
    run.check('euler-cross-check', lambda: middle_betti_from_euler(h))
    run.check('scalar-orders', lambda: scalar_action_orders())


def _cubic_fourfold_hodge(run: _Runner):
    h = HypersurfaceClass.of(4, 3)
    lattice = make_standard('I_21,2')
    eta = tuple([1] * 21 + [3, 3])
    perp = run.value('perp', lambda: orthogonal_complement(lattice, span(lattice, eta)).lattice())

    def middle(n, d):
        result = middle_rank_and_signature(HypersurfaceClass.of(n, d), with_signature=True)
        return {"rank": result.rank, "signature": list(result.signature)}

    run.check('hodge', lambda: primitive_hodge_numbers(h))
    run.check('middle-lattice', lambda: middle(4, 3))
    run.check('eta', lambda: {"norm": lattice.norm(eta), "characteristic": is_characteristic(lattice, eta)})
    run.check('eta-perp', lambda: {"rank": perp.rank, "signature": list(signature(perp)),
                                   "even": perp.is_even(), "abs_det": abs(perp.det)})
    run.check('k3-calibration', lambda: middle(2, 4))
    run.check('cubic-surface-calibration', lambda: middle(2, 3))
    run.check('components', lambda: component_count(h))


# -- gluing smoke battery --------------------------------------------------------------------

def _ambient(name: str) -> Lattice:
    return direct_sum(*[make_standard(part) for part in name.split('+')])


def _saturate(lattice: Lattice, rows) -> Sublattice:
    """Primitive closure of the span of ``rows``."""
    basis = np.asarray(rows, dtype=object)
    orthogonal = integer_left_kernel(basis.T)
    return Sublattice(lattice, integer_left_kernel(orthogonal.T))


def _random_cases(rng: random.Random, count: int, ambients=SMOKE_AMBIENTS) -> list:
    """(L, M) pairs: L a random basis change of a small unimodular lattice, M primitive and nondegenerate."""
    cases = []
    attempts = 0
    while len(cases) < count:
        attempts += 1
        if attempts > 50 * count:
            raise LatkitCalculationException("Could not draw {0} nondegenerate sublattices.".format(count))
        base = _ambient(rng.choice(ambients))
        n = base.rank
        change = random_unimodular(n, rng)
        lattice = Lattice(change.dot(base.gram).dot(change.T))
        r = rng.choice((1, 2))
        rows = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(r)]
        if rational_rank(np.asarray(rows, dtype=object)) != r:
            continue
        sublattice = _saturate(lattice, rows)
        if det_exact(sublattice.gram) == 0:
            continue
        cases.append((lattice, sublattice))
    return cases


def _definite_fixtures() -> list:
    """A2 in I_3 and A1 + A1 in I_4."""
    i3, i4 = make_standard('I_3,0'), make_standard('I_4,0')
    return [(i3, span(i3, (1, -1, 0), (0, 1, -1))), (i4, span(i4, (1, -1, 0, 0), (0, 0, 1, -1)))]


def _round_trip_battery(rng: random.Random, limits) -> dict:
    """Extend and restrict random pairs (s_M, s_N) drawn from Aut(M) x Aut(N) in definite unimodular lattices.

    Incompatible draws must raise GlueMismatchException; -id on A2 against id on its complement is always
    drawn as a deliberate mismatch.
    """
    pairs = failures = 0
    fixtures = [glue_data(lattice, sublattice) for lattice, sublattice in _definite_fixtures()]
    try:
        extend_isometry(fixtures[0], -identity(2), identity(1))
        signalled = False
    except GlueMismatchException:
        signalled = True
    queue = list(fixtures)
    while pairs < SMOKE_PAIRS:
        glue = queue.pop(0) if queue else glue_data(*_random_cases(rng, 1, SMOKE_DEFINITE_AMBIENTS)[0])
        group_m = automorphism_group(glue.lattice_m, limits).elements()
        group_n = automorphism_group(glue.lattice_n, limits).elements()
        for _ in range(SMOKE_DRAWS):
            s_m, s_n = rng.choice(group_m), rng.choice(group_n)
            if not compatible(glue, s_m, s_n):
                try:
                    extend_isometry(glue, s_m, s_n)
                    failures += 1
                except GlueMismatchException:
                    pass
                continue
            pairs += 1
            pair = restrict_isometry(glue, extend_isometry(glue, s_m, s_n))
            if pair.on_m != s_m or pair.on_n != s_n:
                failures += 1
    logger.debug('round-trip battery: %d compatible pairs, %d failures', pairs, failures)
    return {"enough_pairs": pairs >= SMOKE_PAIRS, "failures": failures, "mismatch_signalled": signalled}


def _nikulin_glue_smoke(run: _Runner):
    u = make_standard('U')
    u_glue = run.value('u_glue', lambda: glue_data(u, span(u, (1, 1))))
    run.check('u-glue', lambda: {"glue_order": u_glue.glue_order,
                                 "q_m": u_glue.module_m.q(u_glue.module_m.generator(0)),
                                 "q_n": u_glue.module_n.q(u_glue.phi.images[0])})
    run.check('u-extension-minus-id', lambda: extend_isometry(u_glue, -identity(1), -identity(1)).to_json()["matrix"])
    run.check('u-extension-swap', lambda: extend_isometry(u_glue, identity(1), -identity(1)).to_json()["matrix"])

    def two_minus_two():
        plus, minus = make_standard('diag(2)'), make_standard('diag(-2)')
        result = overlattice_from_glue(plus, minus, [((1,), (1,))])
        return {"rank": result.rank, "det": result.det, "even": result.is_even()}

    run.check('overlattice-two-minus-two', two_minus_two)

    def a1_a1():
        a1 = make_standard('A1')
        try:
            overlattice_from_glue(a1, a1, [((1,), (1,))])
        except LatkitValidationException:
            return "rejected"
        return "accepted"

    run.check('overlattice-a1-a1', a1_a1)

    cases = run.value('cases', lambda: _random_cases(random.Random(SMOKE_SEED), SMOKE_CASES))
    glues = run.value('glues', lambda: [glue_data(lattice, sublattice) for lattice, sublattice in cases])
    run.check('random-anti-isometry', lambda: {
        "cases": len(glues),
        "failures": sum(1 for g in glues if not g.phi.is_isometry(sign=-1, modulus=g.modulus))})
    run.check('random-round-trip', lambda: _round_trip_battery(random.Random(SMOKE_SEED + 1), run.limits))


# -- residues --------------------------------------------------------------------------------

def _minus_id_residues(run: _Runner):
    cubic = Polynomial(5, [((3, 0, 0, 0, 0), 1), ((0, 3, 0, 0, 0), 1), ((0, 0, 3, 0, 0), 1),
                           ((0, 0, 0, 3, 0), 1), ((1, 0, 0, 0, 2), 1)])
    report = run.value('report', lambda: minus_id_obstruction(cubic))

    run.check('residue-dimension', lambda: ResidueSpace(cubic, 2).dimension)
    run.check('sign-patterns', lambda: report.to_json()["patterns"])
    run.check('obstruction', lambda: report.obstruction)

    def fermat_vacuous():
        with warnings.catch_warnings():
            warnings.simplefilter('ignore')
            result = minus_id_obstruction(Polynomial.fermat(5, 3))
        if result.vacuous:
            run.notes.append('The Fermat cubic threefold has no nontrivial sign symmetry; its -id check is vacuous.')
        return result.vacuous

    run.check('fermat-vacuous', fermat_vacuous)
    run.check('identity-action', lambda: residue_eigenvalues(cubic, DiagonalAction(1, [0] * 5), 2))

    def fourfold_twist():
        fermat = Polynomial.fermat(6, 3)
        action = DiagonalAction(3, [1, 0, 0, 0, 0, 0])
        return {"eigenvalues": residue_eigenvalues(fermat, action, 2), "twist": residue_twist(fermat, action, 2)}

    run.check('fermat-fourfold-twist', fourfold_twist)


def _components_odd_odd(run: _Runner):
    def example(values):
        return arf_and_orbit(1, QuadraticRefinementMod2.from_values(1, values))._asdict()

    run.check('example-arf-0', lambda: example((0, 0, 1)))
    run.check('example-arf-1', lambda: example((1, 1, 1)))
    for g in range(1, Constants.MAX_ARF_GENUS.value + 1):
        run.check('orbits-g{0}'.format(g), functools.partial(refinement_orbits, g))
    run.check('closed-form', lambda: all(
        refinement_orbits(g) == sorted((refinement_orbit_size(g, 0), refinement_orbit_size(g, 1)), reverse=True)
        for g in range(1, Constants.MAX_ARF_GENUS.value + 1)))
    threefold = HypersurfaceClass.of(3, 3)
    run.check('cubic-threefold-components', lambda: {"arf_0": component_count(threefold, 0),
                                                     "arf_1": component_count(threefold, 1)})
    run.check('single-component-cases', lambda: {"cubic_surface": component_count(HypersurfaceClass.of(2, 3)),
                                                 "plane_quartic": component_count(HypersurfaceClass.of(1, 4))})
    run.notes.append('Component counts assume the lattice isometry group surjects onto Sp_2g(F_2).')


_SCENARIOS = {
    'genus3': _genus3,
    'genus4': _genus4,
    'cubic-surface-weyl': _cubic_surface_weyl,
    'cubic-threefold-hodge': _cubic_threefold_hodge,
    'cubic-fourfold-hodge': _cubic_fourfold_hodge,
    'nikulin-glue-smoke': _nikulin_glue_smoke,
    'minus-id-residues': _minus_id_residues,
    'components-odd-odd': _components_odd_odd,
}


def run_scenario(name: str, limits=None) -> ScenarioReport:
    """Run one named scenario.

    Parameters
    ----------
        name:
            one of Constants.SCENARIOS
        limits:
            Limits for the searches, DEFAULT_LIMITS when omitted

    Returns
    -------
    report:
        ScenarioReport; a claim whose computation raised is recorded as failed
    """
    if name not in _SCENARIOS:
        raise LatkitValidationException('ERROR 03: unknown scenario {0}; choose from {1}.'.format(
            name, ', '.join(Constants.SCENARIOS.value)))
    run = _Runner(name, limits or DEFAULT_LIMITS)
    start = time.perf_counter()
    try:
        _SCENARIOS[name](run)
    except ResourceLimitException as e:
        run.claims.append(Claim('scenario-setup', name, None, None, Constants.PROVENANCE_TRIVIAL.value,
                                error=str(e), resource_limited=True))
    except (LatkitCalculationException, LatkitValidationException) as e:
        run.claims.append(Claim('scenario-setup', name, None, None, Constants.PROVENANCE_TRIVIAL.value,
                                error='{0}: {1}'.format(type(e).__name__, e)))
    elapsed = int(round((time.perf_counter() - start) * 1000))
    report = ScenarioReport(name, run.claims, run.notes, elapsed)
    logger.info('scenario %s: %d claims, %s in %d ms', name, len(report.claims),
                'pass' if report.passed else 'FAIL', elapsed)
    return report


def run_all(limits=None) -> list:
    return [run_scenario(name, limits) for name in Constants.SCENARIOS.value]

"""
Command-line front end: lattice and discriminant queries, gluing, Hodge
numbers, residue eigenvalues and the verification scenarios. Every command
writes one JSON document to stdout or to ``--output``.
"""
import argparse
import json
import logging
import os
import sys
import tempfile

from latkit import __version__
from latkit.constants import Constants
from latkit.exceptions.latkit_exception import (LatkitCalculationException, LatkitValidationException,
                                                ResourceLimitException)
from latkit.fqm import discriminant_module, is_p_elementary
from latkit.gluing import extend_isometry, glue_data
from latkit.griffiths import (HypersurfaceClass, ResidueSpace, action_from_json, middle_rank_and_signature,
                              polynomial_from_json, primitive_hodge_numbers, residue_eigenvalues, residue_twist)
from latkit.input import CliConfig, Limits
from latkit.isometry import automorphism_group, isometry_from_json
from latkit.lattice import Sublattice, classify_parity_unimodular, lattice_from_json, make_standard, signature
from latkit.scenarios import run_all, run_scenario

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='latkit', description="""Exact lattice, discriminant form and
    Griffiths residue computations, with scenario verification.""")
    parser.add_argument('--version', action='version', version='%(prog)s ' + __version__)
    parser.add_argument('--limit-group-order', dest='max_group_order', type=int,
                        default=Constants.MAX_GROUP_ORDER.value,
                        help='largest group whose elements may be enumerated (default: %(default)s)')
    parser.add_argument('--limit-fqm', dest='fqm_bound', type=int, default=Constants.FQM_SIZE_BOUND.value,
                        help='largest finite quadratic module searched for isometries (default: %(default)s)')
    parser.add_argument('--json', dest='as_json', action='store_true', default=True,
                        help='emit JSON (the only output format)')
    parser.add_argument('--output', '-o', dest='output', default=None, help='write the result to this file')
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument('--verbose', '-v', dest='verbosity', action='count', default=0)
    verbosity.add_argument('--quiet', '-q', dest='verbosity', action='store_const', const=-1)

    commands = parser.add_subparsers(dest='command', required=True)

    lattice = commands.add_parser('lattice', help='lattice invariants and automorphisms')
    lattice_commands = lattice.add_subparsers(dest='action', required=True)
    info = lattice_commands.add_parser('info', help='rank, signature, parity, det, discriminant module')
    info.add_argument('lattice', help='lattice JSON file or standard name (E7, U, I_1,7, ...)')
    aut = lattice_commands.add_parser('aut', help='automorphism group of a definite lattice')
    aut.add_argument('lattice')

    disc = commands.add_parser('disc', help='discriminant module')
    disc.add_argument('lattice')

    glue = commands.add_parser('glue', help='glue data of a primitive sublattice of a unimodular lattice')
    glue.add_argument('lattice')
    glue.add_argument('basis', help='sublattice basis JSON file')

    extend = commands.add_parser('extend', help='extend an isometry pair to the ambient lattice')
    extend.add_argument('lattice')
    extend.add_argument('basis')
    extend.add_argument('s_m', help='isometry JSON file for the sublattice')
    extend.add_argument('s_n', help='isometry JSON file for its complement')

    hodge = commands.add_parser('hodge', help='primitive Hodge numbers of a degree d hypersurface in P^(n+1)')
    hodge.add_argument('n', type=int)
    hodge.add_argument('d', type=int)

    residues = commands.add_parser('residues', help='eigenvalues of a diagonal action on residues')
    residues.add_argument('polynomial', help='polynomial JSON file')
    residues.add_argument('action', help='action JSON file')
    residues.add_argument('a', type=int, help='pole order')

    verify = commands.add_parser('verify', help='run a verification scenario')
    verify.add_argument('scenario', choices=Constants.SCENARIOS.value + ('all',))
    return parser


def _read_json(path: str):
    try:
        with open(path) as handle:
            return json.load(handle)
    except OSError as e:
        raise LatkitValidationException('Cannot read {0}: {1}'.format(path, e.strerror))
    except ValueError as e:
        raise LatkitValidationException('Malformed JSON in {0}: {1}'.format(path, e))


def load_lattice(argument: str):
    """A lattice JSON file, or a standard lattice name when no such file exists."""
    if os.path.exists(argument):
        return lattice_from_json(_read_json(argument))
    return make_standard(argument)


def load_basis(lattice, path: str) -> Sublattice:
    source = _read_json(path)
    if isinstance(source, dict):
        if set(source) != {'basis'}:
            raise LatkitValidationException("Basis JSON must have exactly a 'basis' field.")
        source = source['basis']
    if not isinstance(source, list) or not all(isinstance(row, list) and all(
            isinstance(x, int) and not isinstance(x, bool) for x in row) for row in source):
        raise LatkitValidationException("Basis must be a list of integer rows.")
    return Sublattice(lattice, source)


def _lattice_info(config: CliConfig) -> dict:
    lattice = load_lattice(config.inputs[0])
    parity = classify_parity_unimodular(lattice)
    module = discriminant_module(lattice)
    return {"name": lattice.name, "rank": lattice.rank, "det": lattice.det,
            "signature": list(signature(lattice)), "parity": parity.parity, "unimodular": parity.unimodular,
            "discriminant": module.to_json()}


def _lattice_aut(config: CliConfig) -> dict:
    lattice = load_lattice(config.inputs[0])
    return automorphism_group(lattice, config.limits).to_json()


def _disc(config: CliConfig) -> dict:
    module = discriminant_module(load_lattice(config.inputs[0]))
    out = module.to_json()
    if module.rank:
        elementary = is_p_elementary(module, module.invariants[0])
        out["p_elementary"] = {"p": module.invariants[0], "elementary": elementary.elementary,
                               "length": elementary.length}
    return out


def _glue(config: CliConfig) -> dict:
    lattice = load_lattice(config.inputs[0])
    return glue_data(lattice, load_basis(lattice, config.inputs[1])).to_json()


def _extend(config: CliConfig) -> dict:
    lattice = load_lattice(config.inputs[0])
    glue = glue_data(lattice, load_basis(lattice, config.inputs[1]))
    s_m = isometry_from_json(_read_json(config.inputs[2]))
    s_n = isometry_from_json(_read_json(config.inputs[3]))
    return extend_isometry(glue, s_m, s_n).to_json()


def _hodge(config: CliConfig) -> dict:
    h = HypersurfaceClass.of(int(config.inputs[0]), int(config.inputs[1]))
    out = {"n": h.n, "d": h.d, "hodge": primitive_hodge_numbers(h)}
    if h.n % 2 == 0:
        middle = middle_rank_and_signature(h, with_signature=True)
        plus, minus = middle.signature
        out.update(rank=middle.rank, signature=[plus, minus], primitive_signature=[plus - 1, minus])
    else:
        out["rank"] = middle_rank_and_signature(h).rank
    return out


def _residues(config: CliConfig) -> dict:
    polynomial = polynomial_from_json(_read_json(config.inputs[0]))
    action = action_from_json(_read_json(config.inputs[1]))
    a = int(config.inputs[2])
    space = ResidueSpace(polynomial, a)
    return {"space": space.to_json(),
            "eigenvalues": [e.to_json() for e in residue_eigenvalues(polynomial, action, a)],
            "twist": residue_twist(polynomial, action, a).to_json()}


_COMMANDS = {
    'lattice info': _lattice_info,
    'lattice aut': _lattice_aut,
    'disc': _disc,
    'glue': _glue,
    'extend': _extend,
    'hodge': _hodge,
    'residues': _residues,
}


def _verify(config: CliConfig):
    """(document, exit code) for one scenario or all of them."""
    if config.inputs[0] == 'all':
        reports = run_all(config.limits)
    else:
        reports = [run_scenario(config.inputs[0], config.limits)]
    if any(r.resource_limited for r in reports):
        code = Constants.EXIT_RESOURCE_LIMIT.value
    elif all(r.passed for r in reports):
        code = Constants.EXIT_OK.value
    else:
        code = Constants.EXIT_VERIFICATION_FAILED.value
    for report in reports:
        for claim in report.failed_claims():
            logger.warning('%s: claim %s failed', report.scenario, claim.claim_id)
    if len(reports) == 1:
        return reports[0].to_json(), code
    return {"reports": [r.to_json() for r in reports], "pass": all(r.passed for r in reports),
            "version": __version__}, code


def config_from_args(args: argparse.Namespace) -> CliConfig:
    if args.command == 'lattice':
        subcommand, inputs = 'lattice ' + args.action, [args.lattice]
    elif args.command == 'disc':
        subcommand, inputs = args.command, [args.lattice]
    elif args.command == 'glue':
        subcommand, inputs = args.command, [args.lattice, args.basis]
    elif args.command == 'extend':
        subcommand, inputs = args.command, [args.lattice, args.basis, args.s_m, args.s_n]
    elif args.command == 'hodge':
        subcommand, inputs = args.command, [args.n, args.d]
    elif args.command == 'residues':
        subcommand, inputs = args.command, [args.polynomial, args.action, args.a]
    else:
        subcommand, inputs = args.command, [args.scenario]
    limits = Limits(max_group_order=args.max_group_order, fqm_bound=args.fqm_bound)
    return CliConfig(subcommand, inputs, output=args.output, limits=limits, verbosity=args.verbosity,
                     as_json=args.as_json)


def write_output(document, output: str = None):
    """Emit the document in one piece; a file is replaced only once fully written."""
    text = json.dumps(document, indent=2, sort_keys=True) + '\n'
    if output is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    directory = os.path.dirname(os.path.abspath(output))
    handle = tempfile.NamedTemporaryFile('w', dir=directory, prefix='.latkit-', suffix='.tmp', delete=False)
    try:
        with handle:
            handle.write(text)
        os.replace(handle.name, output)
    except OSError:
        if os.path.exists(handle.name):
            os.remove(handle.name)
        raise


def _configure_logging(verbosity: int):
    level = logging.ERROR if verbosity < 0 else logging.INFO if verbosity > 0 else logging.WARNING
    logging.basicConfig(stream=sys.stderr, level=level, format='%(levelname)s %(name)s: %(message)s')
    logging.captureWarnings(True)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return Constants.EXIT_INPUT_ERROR.value if e.code else Constants.EXIT_OK.value
    try:
        config = config_from_args(args)
    except LatkitValidationException as e:
        sys.stderr.write('latkit: {0}\n'.format(e))
        return Constants.EXIT_INPUT_ERROR.value
    _configure_logging(config.verbosity)
    code = Constants.EXIT_OK.value
    try:
        if config.subcommand == 'verify':
            document, code = _verify(config)
        else:
            document = _COMMANDS[config.subcommand](config)
        write_output(document, config.output)
    except ResourceLimitException as e:
        logger.error('%s', e)
        return Constants.EXIT_RESOURCE_LIMIT.value
    except LatkitValidationException as e:
        logger.error('%s', e)
        return Constants.EXIT_INPUT_ERROR.value
    except LatkitCalculationException as e:
        logger.error('internal consistency failure: %s', e)
        return Constants.EXIT_VERIFICATION_FAILED.value
    except OSError as e:
        logger.error('cannot write output: %s', e)
        return Constants.EXIT_INPUT_ERROR.value
    return code


if __name__ == '__main__':
    sys.exit(main())

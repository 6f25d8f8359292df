from latkit.constants import Constants
from latkit.exceptions.latkit_exception import LatkitValidationException


class Limits:

    def __init__(self, max_group_order=Constants.MAX_GROUP_ORDER.value,
                 fqm_bound=Constants.FQM_SIZE_BOUND.value,
                 search_nodes=Constants.MAX_SEARCH_NODES.value):
        """

        :param max_group_order: largest group order for which elements are enumerated
        :param fqm_bound: largest finite quadratic module searched for isometries
        :param search_nodes: node budget of a single backtracking search
        """
        for label, value in (('max_group_order', max_group_order),
                             ('fqm_bound', fqm_bound),
                             ('search_nodes', search_nodes)):
            if not isinstance(value, int) or value <= 0:
                raise LatkitValidationException('ERROR 01: {0} must be a positive integer, got {1}.'.format(label, value))
        self.max_group_order = max_group_order
        self.fqm_bound = fqm_bound
        self.search_nodes = search_nodes

    def __repr__(self):
        return 'Limits(max_group_order={0}, fqm_bound={1}, search_nodes={2})'.format(
            self.max_group_order, self.fqm_bound, self.search_nodes)


DEFAULT_LIMITS = Limits()


class CliConfig:
    def __init__(self, subcommand, inputs=(), output=None, limits=None, verbosity=0, as_json=True):
        """
        Settings of one command-line invocation.

        :param subcommand: name of the subcommand, e.g. 'verify' or 'lattice aut'
        :param inputs: positional arguments of the subcommand, in order
        :param output: path of the output file, None for stdout
        :param limits: a Limits instance
        :param verbosity: -1 quiet, 0 default, 1 and above verbose
        :param as_json: emit indented JSON
        """
        if not subcommand:
            raise LatkitValidationException('ERROR 02: a subcommand is required.')
        self.subcommand = subcommand
        self.inputs = tuple(inputs)
        self.output = output
        self.limits = limits if limits is not None else Limits()
        self.verbosity = verbosity
        self.as_json = as_json

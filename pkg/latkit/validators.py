import functools

from latkit.constants import Constants
from latkit.exceptions.latkit_exception import (IndefiniteLatticeException, LatkitValidationException,
                                                ResourceLimitException)
from latkit.input import DEFAULT_LIMITS, Limits
from latkit.linalg import det_exact, elementary_divisors, inertia_ldlt


def _argument(args, kwargs, position, name):
    if name in kwargs:
        return kwargs[name]
    if len(args) > position:
        return args[position]
    return None


def definite_lattice(function):
    """ rejects lattices whose form is not definite """

    @functools.wraps(function)
    def definite_lattice_wrapper(*args, **kwargs):
        lattice = _argument(args, kwargs, 0, 'lattice')
        if lattice is not None and lattice.rank:
            inertia = inertia_ldlt(lattice.gram)
            if inertia.n_plus and inertia.n_minus:
                raise IndefiniteLatticeException('ERROR 20: {0} Signature is ({1},{2}).'.format(
                    Constants.ERR_NOT_DEFINITE.value, inertia.n_plus, inertia.n_minus))
        return function(*args, **kwargs)
    return definite_lattice_wrapper


def unimodular_ambient(function):
    """ the first argument must be a unimodular lattice """

    @functools.wraps(function)
    def unimodular_ambient_wrapper(*args, **kwargs):
        lattice = _argument(args, kwargs, 0, 'lattice')
        if lattice is not None and abs(det_exact(lattice.gram)) != 1:
            raise LatkitValidationException('ERROR 21: ambient lattice is not unimodular (det {0}).'.format(
                det_exact(lattice.gram)))
        return function(*args, **kwargs)
    return unimodular_ambient_wrapper


def primitive_sublattice(function):
    """ the second argument must be a primitive sublattice """

    @functools.wraps(function)
    def primitive_sublattice_wrapper(*args, **kwargs):
        sublattice = _argument(args, kwargs, 1, 'sublattice')
        if sublattice is not None and sublattice.rank:
            if any(d != 1 for d in elementary_divisors(sublattice.basis)):
                raise LatkitValidationException('ERROR 22: sublattice is not primitive.')
        return function(*args, **kwargs)
    return primitive_sublattice_wrapper


def within_fqm_bound(function):
    """ refuses isometry searches on modules above the configured size bound """

    @functools.wraps(function)
    def within_fqm_bound_wrapper(*args, **kwargs):
        module = _argument(args, kwargs, 0, 'module')
        limits = kwargs.get('limits') or next((a for a in args if isinstance(a, Limits)), DEFAULT_LIMITS)
        if module is not None and module.order > limits.fqm_bound:
            raise ResourceLimitException('ERROR 30: module of order {0} exceeds the bound {1}.'.format(
                module.order, limits.fqm_bound))
        return function(*args, **kwargs)
    return within_fqm_bound_wrapper

class LatkitCalculationException(Exception):
    """Internal consistency failure; never raised when preconditions hold"""
    pass

class LatkitValidationException(Exception):
    """Invalid input or violated precondition"""
    pass

class ResourceLimitException(Exception):
    """A configured search, order or size limit was exceeded"""
    pass

class IndefiniteLatticeException(LatkitValidationException):
    """A definite lattice was required"""
    pass

class GlueMismatchException(LatkitValidationException):
    """Discriminant actions of an isometry pair are incompatible with the glue map,
    so no extension to the ambient lattice exists"""
    pass

class NonIntegralGlueException(LatkitCalculationException):
    """The assembled rational extension is not integral"""
    pass

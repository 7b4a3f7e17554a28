class AbstractShapeInvariantStatesException(Exception):
    """Base class for all Shape Invariant States Exceptions"""


class DeferredFamilyException(AbstractShapeInvariantStatesException):
    """Family kind is recognised but its coherent states are not built"""


class InvalidFamilyConfigException(AbstractShapeInvariantStatesException):
    """Family constants violate the invariants of the family kind"""


class IncompatibleZSpecException(AbstractShapeInvariantStatesException):
    """Functional variant does not fit the family or its constraints"""


class DomainException(AbstractShapeInvariantStatesException):
    """Argument lies outside the domain of a formula"""


class UnsupportedConfigurationException(AbstractShapeInvariantStatesException):
    """Operation is not defined for the given configuration"""


class IndexOutOfRangeException(AbstractShapeInvariantStatesException):
    """Requested index lies beyond a computed table"""


class StateMismatchException(AbstractShapeInvariantStatesException):
    """Coherent states were built on different families or functionals"""


class DivergenceException(AbstractShapeInvariantStatesException):
    """Series diverges at the requested argument"""


class TruncationException(AbstractShapeInvariantStatesException):
    """Truncation cap reached before the tail tolerance was met"""


class ConfigNotFoundException(AbstractShapeInvariantStatesException):
    """Specified config not found on disk or in the configs directory"""


class ConfigValidationException(AbstractShapeInvariantStatesException):
    """Config document failed schema validation"""


class GridMismatchException(AbstractShapeInvariantStatesException):
    """Grid functions live on different grids"""


class NonNormalizableException(AbstractShapeInvariantStatesException):
    """Grid function does not decay at the grid boundary"""


class LadderResidualException(AbstractShapeInvariantStatesException):
    """Ladder eigenfunction fails its Hamiltonian residual check"""


class InstabilityException(AbstractShapeInvariantStatesException):
    """Norm drift detected during grid propagation"""


class UsageException(AbstractShapeInvariantStatesException):
    """Command line arguments could not be parsed"""

class TwistWZWError(Exception):
    """Base exception for twistwzw."""
    pass

class ConfigError(TwistWZWError):
    """Raised when there is an issue with the configuration."""
    pass

class ArithmeticDomainError(TwistWZWError, ZeroDivisionError):
    """Raised when an exact operation divides by zero."""
    pass

class PoleProximityError(TwistWZWError):
    """Raised when a complex evaluation point is too close to a pole."""
    pass

class TruncationError(TwistWZWError):
    """Raised when a requested order exceeds the available truncation."""
    pass

class AlgebraError(TwistWZWError):
    """Raised when Lie algebra data is inconsistent."""
    pass

class WeightError(TwistWZWError):
    """Raised when a weight is invalid for the requested operation."""
    pass

class ModuleConstructionError(TwistWZWError):
    """Raised when a graded module cannot be built consistently."""
    pass

class InconclusiveError(TwistWZWError):
    """Raised when a truncated computation cannot decide its result."""
    pass

class CheckFailedError(TwistWZWError):
    """Raised when an asserted identity does not hold."""
    pass

class IntegrationError(TwistWZWError):
    """Raised when numerical transport cannot proceed."""
    pass

class FileWriteError(TwistWZWError):
    """Raised when writing a file fails."""
    pass

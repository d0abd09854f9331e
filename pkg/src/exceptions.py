# src/exceptions.py


class NpdError(Exception):
    """Base class for every error raised by the npd-periods package"""

    pass


class DivisibilityViolation(NpdError):
    """A period set contains two periods where one divides the other"""

    pass


class NotNormalized(NpdError):
    """A coherence measure was requested on a dictionary with unnormalized columns"""

    pass


class KTooLarge(NpdError):
    """Cumulative coherence was requested for k >= N"""

    pass


class EmptyQkm(NpdError):
    """No admissible mixture exists for the requested (k, m)"""

    pass


class SOutOfRange(NpdError):
    """Sparsity level s outside 1..k"""

    pass


class SingularGram(NpdError):
    """The Gram matrix of a column subset is numerically singular"""

    pass


class ConditionNotMet(NpdError):
    """A noise threshold was requested while its recovery condition fails"""

    pass


class NoConvergence(NpdError):
    """An iterative solver hit its iteration cap"""

    pass


class MalformedDictionaryFile(NpdError):
    """A dictionary file could not be parsed"""

    pass


class ConfigError(NpdError):
    """An experiment configuration is invalid or unreadable"""

    pass

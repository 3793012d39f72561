"""Exception hierarchy shared by all modules."""


class ValidationError(ValueError):
    """Invalid input: bad parameters, malformed states, unsupported specs."""


class UndefinedConditioningError(ValidationError):
    """Conditioning on photon detection when the detection probability is zero."""


class DegenerateProbeError(ValidationError):
    """Probabilistic-sensing probe that coincides with the vacuum."""


class NumericalError(ArithmeticError):
    """A numerical procedure has no well-defined answer for this input."""


class IllDefinedSLDError(NumericalError):
    """The phase derivative leaks outside the support of the state."""


class IllDefinedEstimatorError(NumericalError):
    """The first prior moment leaks outside the support of the averaged state."""

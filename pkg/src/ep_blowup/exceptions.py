"""Exception types raised by the package."""


class InadmissibleDatumError(ValueError):
    """Initial data outside G0 < 1/4 or with non-positive initial density."""


class DegenerateDatumError(ValueError):
    """The closed-form parametrisation by M is singular for this datum."""


class OutOfEnvelopeError(ValueError):
    """M lies outside [M_minus, M_plus], so W(M) is not real."""


class IntegrationError(RuntimeError):
    """The ODE integrator failed before reaching the requested horizon.

    ``last_t`` and ``last_state`` hold the final accepted step.
    """

    def __init__(self, message, last_t=None, last_state=None):
        super().__init__(message)
        self.last_t = last_t
        self.last_state = last_state

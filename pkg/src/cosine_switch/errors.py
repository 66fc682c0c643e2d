"""Exception types raised across the package."""


class SwitchError(ValueError):
    """Base class for all model errors."""


class NonPositiveInput(SwitchError):
    pass


class NonPositiveCurrent(NonPositiveInput):
    pass


class InvalidDevice(SwitchError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid device: " + "; ".join(self.violations))


class FluxSingularity(SwitchError):
    """SQUID inductance diverges (cos(pi*phi) <= 0 with a symmetric SQUID)."""


class SelfResonance(SwitchError):
    """Inductor and its shunt capacitance resonate at the requested frequency."""


class SingularConversion(SwitchError):
    """Transfer matrix cannot be converted to scattering parameters."""


class NotBracketed(SwitchError):
    pass


class NoBracket(SwitchError):
    def __init__(self, message, interval=None):
        self.interval = interval
        super().__init__(message)


class DegenerateInput(SwitchError):
    pass


class Infeasible(SwitchError):
    pass


class OutOfRange(SwitchError):
    def __init__(self, message, attainable):
        self.attainable = attainable
        super().__init__(f"{message}; attainable interval {attainable[0]:.6g} .. {attainable[1]:.6g}")


class ConfigError(SwitchError):
    pass

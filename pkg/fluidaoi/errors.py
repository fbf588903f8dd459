class FluidAoiError(Exception):
    code = 0
    message = None
    data = None
    exit_code = 1

    def __init__(self, message=None, **data):
        if message is not None:
            self.message = message
        if data:
            self.data = data
        super(FluidAoiError, self).__init__(self.message)

    def tojson(self):
        return {
            'name': self.__class__.__name__,
            'code': self.code,
            'message': "%s: %s" % (self.__class__.__name__, self.message),
            'data': self.data
        }


# Configuration and input validation, exit code 2

class ConfigError(FluidAoiError):
    code = -32600
    message = "Invalid configuration."
    exit_code = 2


class ParseError(ConfigError):
    code = -32700
    message = "Parse Error."


class ValidationError(ConfigError):
    code = -32602
    message = "Invalid parameters."


class FractionSumMismatch(ValidationError):
    code = -32610
    message = "Class fractions do not sum to 1."


class NonIntegerClassSize(ValidationError):
    code = -32611
    message = "Class size is not a positive integer."


class OutOfRangeParameter(ValidationError):
    code = -32612
    message = "Parameter out of range."


class EpsilonOutOfRange(ValidationError):
    code = -32613
    message = "Epsilon must lie in [0, min fraction)."


class CflViolation(ValidationError):
    code = -32614
    message = "Time step exceeds the grid step."


class MassDeficit(ValidationError):
    code = -32615
    message = "Initial density leaks mass beyond the grid."


class ClassMismatch(ValidationError):
    code = -32616
    message = "Class structures differ."


# Numerical failures, exit code 3

class NumericalError(FluidAoiError):
    code = -32000
    message = "Numerical failure."
    exit_code = 3


class NoEquilibrium(NumericalError):
    code = -32001
    message = "Thresholds admit no positive equilibrium."


class NoConvergence(NumericalError):
    code = -32002
    message = "Solver did not converge."


class PartialResults(FluidAoiError):
    code = -32099
    message = "Some scenario cells failed."
    exit_code = 4

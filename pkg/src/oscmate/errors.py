"""Exception hierarchy.

Each exception carries a short machine-readable ``code`` and the CLI exit
status it maps to (2 for geometric domain errors, 3 for parse/argument
errors, 4 for I/O).
"""


class OscMateError(Exception):
    code = "Error"
    exit_status = 2


# numerics ---------------------------------------------------------------

class TooFewSamples(OscMateError):
    code = "TooFewSamples"


class NonMonotoneStations(OscMateError):
    code = "NonMonotoneStations"


class NonFiniteValue(OscMateError):
    code = "NonFiniteValue"

    def __init__(self, message, station=None):
        super().__init__(message)
        self.station = station


# curves -----------------------------------------------------------------

class NotFrenet(OscMateError):
    code = "NotFrenet"


class OutOfDomain(OscMateError):
    code = "OutOfDomain"


class Irregular(OscMateError):
    code = "Irregular"


class NonPositiveKappa(OscMateError):
    code = "NonPositiveKappa"


class DegenerateIndicatrix(OscMateError):
    code = "DegenerateIndicatrix"


class ZeroSpeedFrame(OscMateError):
    code = "ZeroSpeedFrame"


# mates ------------------------------------------------------------------

class DegenerateMate(OscMateError):
    code = "DegenerateMate"


class ZeroDenominator(OscMateError):
    code = "ZeroDenominator"


class NegativeKappaRecovered(OscMateError):
    code = "NegativeKappaRecovered"


# classification ---------------------------------------------------------

class InsufficientSamples(OscMateError):
    code = "InsufficientSamples"


# catalog ----------------------------------------------------------------

class UnknownName(OscMateError):
    code = "UnknownName"
    exit_status = 3


class InvalidParams(OscMateError):
    code = "InvalidParams"
    exit_status = 3


# expressions ------------------------------------------------------------

class ExprError(OscMateError):
    exit_status = 3


class ExprSyntaxError(ExprError):
    code = "SyntaxError"

    def __init__(self, message, offset, expected=()):
        self.offset = offset
        self.expected = tuple(expected)
        detail = f"{message} at offset {offset}"
        if self.expected:
            detail += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(detail)


class UnknownFunction(ExprError):
    code = "UnknownFunction"

    def __init__(self, name, offset):
        self.name = name
        self.offset = offset
        super().__init__(f"unknown function {name!r} at offset {offset}")


class DomainFault(ExprError):
    code = "DomainFault"
    exit_status = 2

    def __init__(self, s, subexpr, reason):
        self.s = s
        self.subexpr = subexpr
        super().__init__(f"{reason} in {subexpr} at s={s!r}")

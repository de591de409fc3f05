"""Exception hierarchy shared by all modules.

Input problems (bad files, bad shapes, degenerate data) derive from
InputError and map to CLI exit code 2.  InternalError marks a broken
internal invariant and maps to exit code 3.
"""


class AliasScopeError(Exception):
    pass


class InputError(AliasScopeError):
    pass


class FormatError(InputError):
    """Malformed array container (bad magic, header, or truncated data)."""


class UnsupportedDtypeError(InputError):
    """Array dtype outside the supported whitelist."""


class ValidationError(InputError):
    """Well-formed container holding invalid values (NaN/Inf, bad labels)."""


class SpecError(InputError):
    """Inconsistent downsampling specification (e.g. non-integral stride)."""


class ShapeError(InputError):
    """Mismatched array shapes between related inputs."""


class SizeError(InputError):
    """A window or kernel does not fit the target grid."""


class DegenerateFilterError(InputError):
    """A filter bank contains a zero-norm filter."""


class UndefinedRatioError(InputError):
    """Ratio metric requested on data with zero total power."""


class InternalError(AliasScopeError):
    """An internal invariant was violated; indicates a bug, not bad input."""

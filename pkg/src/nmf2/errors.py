"""Exception types raised by the nmf2 library.

Input-validation failures derive from :class:`InputError`; breakdowns of the
numerical machinery derive from :class:`NumericalError`. The CLI maps the two
families to distinct exit codes.
"""


class Nmf2Error(Exception):
    """Base class for all library errors."""


class InputError(Nmf2Error, ValueError):
    """The caller handed us something malformed or out of contract."""


class NumericalError(Nmf2Error, RuntimeError):
    """A numerical procedure failed to produce a usable result."""


class NegativeInput(InputError):
    """A matrix that must be nonnegative has an entry below -tol."""


class EmptyMatrix(InputError):
    """Every entry of the input is zero (or the matrix has no entries)."""


class ReducibleInput(NumericalError):
    """Dominant singular pair has mixed signs: input splits into blocks."""


class NoConvergence(NumericalError):
    """Iterative eigensolver did not meet its tolerance within max_iter."""


class DegenerateColumns(InputError):
    """Both columns of the least-squares design matrix are zero."""


class NonpositiveDominant(InputError):
    """Angular form requires strictly positive dominant singular vectors."""


class OutOfBox(InputError):
    """(t1, t2) lies outside the feasible rectangle of the rank-2 family."""


class InfeasibleAlpha(InputError):
    """Angle parameters violate their feasibility intervals."""


class InfeasibleParams(InputError):
    """Three-way parameters violate their feasibility constraints."""


class NotSymmetric(InputError):
    """A symmetric-only operation received an asymmetric matrix."""


class DegenerateFactor(NumericalError):
    """A factor column collapsed to zero during iteration and stayed dead."""


class RankDeficient(NumericalError):
    """A construction that needs two independent directions found only one."""


class RejectionLimit(NumericalError):
    """A rejection sampler exhausted its resampling budget."""

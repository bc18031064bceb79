"""Exception hierarchy.

Anything that signals a broken hypothesis of the convergence theory (an
operator that is not regular, powers that blow up, a vector that is not a
fixed point) derives from :class:`HypothesisError`.  The CLI maps those to
exit code 2; plain ``ValueError`` means bad input.
"""


class HypothesisError(ValueError):
    """An operator or vector violates an assumption of the theory."""


class NotFixedPointError(HypothesisError):
    """The order unit is not fixed by the operator."""


class RegularityError(HypothesisError):
    """Some nonzero positive vector never reaches the interior of the cone."""

    def __init__(self, message, basis_index=None):
        super().__init__(message)
        self.basis_index = basis_index


class UnboundedPowersError(HypothesisError):
    """The powers of the operator are not norm bounded."""


class SpectralRadiusError(HypothesisError):
    """The dominant eigenvalue is not 1 and the powers do not decay."""

    def __init__(self, message, rho=None):
        super().__init__(message)
        self.rho = rho


class NotConvergedError(HypothesisError):
    """An iteration failed to reach its tolerance within the step budget."""


class MultipleFixedPointsError(HypothesisError):
    """The eigenvalue 1 is not simple."""

    def __init__(self, message, nullity=None):
        super().__init__(message)
        self.nullity = nullity

"""Exception hierarchy. Every failure carries a short machine-readable code."""


class FibzetaError(Exception):
    code = "error"

    def __init__(self, message, **context):
        super().__init__(message)
        self.context = context


class InsufficientPrecision(FibzetaError):
    code = "insufficient_precision"


class LiftOutOfBounds(FibzetaError):
    code = "lift_out_of_bounds"


class EnumerationTooLarge(FibzetaError):
    code = "enumeration_too_large"


class InconsistentZeta(FibzetaError):
    code = "inconsistent_zeta"


class NotSquarefree(FibzetaError):
    code = "not_squarefree"


class FiberNotNodal(FibzetaError):
    code = "fiber_not_nodal"


class AssumptionViolation(FibzetaError):
    """Raised by the gate; ``violation`` is one of the codes in pencil.VIOLATIONS."""

    code = "assumption_violation"

    def __init__(self, violation, message, **context):
        super().__init__(f"{violation}: {message}", **context)
        self.violation = violation


class NonNilpotentMonodromy(FibzetaError):
    code = "non_nilpotent_finite_monodromy"


class ZeroEigenvalueAtInfinity(FibzetaError):
    code = "zero_eigenvalue_at_infinity"


class UnpreparedExponents(FibzetaError):
    code = "unprepared_exponents"


class GenusTooLarge(FibzetaError):
    code = "genus_too_large_for_counting_fallback"


class WindowTooSmall(FibzetaError):
    code = "window_too_small"


class RerunRequired(FibzetaError):
    """The computed Frobenius has negative valuation; rerun with larger N3."""

    code = "rerun_with_larger_N3"

    def __init__(self, message, suggested_N3, **context):
        super().__init__(message, **context)
        self.suggested_N3 = suggested_N3


class WeilDisambiguationFailed(FibzetaError):
    code = "weil_disambiguation_failed"


class VerificationFailed(FibzetaError):
    code = "verification_failed"


class ManifestError(FibzetaError):
    code = "manifest_parse_error"

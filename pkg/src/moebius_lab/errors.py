"""Exception taxonomy. The CLI maps these onto its exit-code contract."""


class MoebiusLabError(Exception):
    """Base class for all library errors."""


class UsageError(MoebiusLabError):
    """Bad specs, unknown names, parameters out of range, grids too small."""


class MathDomainError(MoebiusLabError):
    """Numerical domain failures: degenerate input, blow-up, lost rank."""


class DegenerateInputError(MathDomainError):
    """Rank deficiency / pivot collapse in an orthonormalization."""


class JetDomainError(MathDomainError):
    """Division by a near-zero jet value, bad branch for sqrt/pow, order misuse."""


class ChartError(MathDomainError):
    """Chart evaluation failed (non-conformal data, point pushed through infinity)."""


class RiccatiBlowupError(MathDomainError):
    """A Riccati trajectory exceeded the blow-up bound (movable pole)."""


class FrameError(MathDomainError):
    """Adapted-frame construction or alignment failure."""

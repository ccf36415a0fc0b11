"""Central tolerance block.

Every classification threshold used by the library lives here so that reports
can embed the exact values and the CLI can override the headline tolerance in
one place (``--tol``).
"""

from dataclasses import dataclass, replace, asdict


@dataclass(frozen=True)
class Tolerances:
    # relative rank / pivot cutoff for indefinite Gram-Schmidt
    rank: float = 1e-9
    # light-cone membership and chart conformality checks
    cone: float = 1e-10
    conformal_chart: float = 1e-8
    # Willmore residual classification on a grid
    willmore: float = 1e-6
    # |theta| below this counts as a conformal 2-plane lift
    conformal_lift: float = 1e-8
    # |<L,L>| / ||L|| thresholds for the isotropy flags
    isotropic: float = 1e-8
    # regularizer in the normalized parallelism test for the dual-surface flag
    parallel_eps: float = 1e-14
    parallel: float = 1e-8
    # umbilic detection, relative to the second-derivative scale
    umbilic: float = 1e-8
    # flatness classification: pass threshold = floor_factor * (lambda=+-1 floor)
    flatness_floor_factor: float = 10.0
    flatness_floor_min: float = 1e-13
    # Riccati integration
    riccati_blowup: float = 1e8
    riccati_rtol: float = 1e-10
    # degenerate dual-surface detection
    degenerate_dual: float = 1e-8

    def with_overrides(self, **kw) -> "Tolerances":
        return replace(self, **kw)

    def as_dict(self) -> dict:
        return asdict(self)


DEFAULT = Tolerances()

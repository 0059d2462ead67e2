"""Exact discrete renewal sequences for finite-support step laws.

Submodules: ``masses`` (step laws and the simplex A_k), ``renewal`` (u_n,
extremes, envelopes, limit), ``polylab`` (renewal polynomials P_l, Q_n and
class membership), ``conjecture`` (envelope probes), ``mc`` (Monte Carlo
cross-check) and ``cli``.
"""

__version__ = "0.1.0"

from renewal_lab.masses import (  # noqa: E402
    MassVector,
    SamplePlan,
    SimplexPoint,
    from_simplex_point,
    make_masses,
    period,
    sample_simplex,
)
from renewal_lab.renewal import (  # noqa: E402
    RenewalSeq,
    blackwell_limit,
    compute_renewal,
    envelopes,
    extremes,
)
from renewal_lab.polylab import MultiPoly, build_P, build_Q  # noqa: E402

__all__ = [
    "MassVector",
    "MultiPoly",
    "RenewalSeq",
    "SamplePlan",
    "SimplexPoint",
    "blackwell_limit",
    "build_P",
    "build_Q",
    "compute_renewal",
    "envelopes",
    "extremes",
    "from_simplex_point",
    "make_masses",
    "period",
    "sample_simplex",
]

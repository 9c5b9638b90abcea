"""Floating bodies, cap coverings and Poisson polytopes."""

from ._polylab import (
    PolylabError,
    Polytope,
    covering_report,
    flag_count,
    ks_normal,
    macbeath_volume,
    cap_volume,
    rinott_bound,
    run_experiment,
    v_at,
    __version__,
)

__all__ = [
    "PolylabError",
    "Polytope",
    "covering_report",
    "flag_count",
    "ks_normal",
    "macbeath_volume",
    "cap_volume",
    "rinott_bound",
    "run_experiment",
    "v_at",
    "__version__",
]

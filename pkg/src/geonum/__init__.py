"""Numerics for metrized lattices over Q and quadratic fields.

Gaussian lattice counts (h^0, h^1), Harder-Narasimhan polygons, effective
vanishing bounds and the rank-1 and rank-2 non-abelian zeta functions over Q.
"""

from .errors import GeonumError, HypothesisViolated
from .field import NumberField, make_field, parse_field
from .lattice import (
    MetrizedLattice,
    SublatticeHandle,
    chi,
    degree,
    diagonal_lattice,
    direct_sum,
    dual_lattice,
    from_basis,
    omega_twist,
    random_lattice,
    restrict_scalars,
    saturate_sublattice,
    scale,
    standard_lattice,
)
from .stability import (
    HNPolygon,
    canonical_polygon_over_Q,
    hn_filtration,
    is_semistable,
    max_slope_sublattice,
    polygon_leq,
    slope,
)
from .theta import ThetaValue, h0, h1, rr_check, rr_residual, short_vectors
from .vanishing import (
    DecayProbe,
    ExtremalEstimate,
    effective_h0_bound,
    effective_h1_bound,
    extremal_duality_residual,
    extremal_values_estimate,
    scaling_decay_probe,
)
from .zeta import (
    ModuliPointRank2,
    ZetaEval,
    moduli_volume_rank2,
    pole_check,
    rank1_zeta,
    rank2_zeta,
    xi_reference,
)

__version__ = "0.1.0"

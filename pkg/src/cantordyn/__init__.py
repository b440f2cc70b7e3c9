"""Exact computations over clopen algebras of Cantor minimal systems.

Clopen Boolean algebra with canonical cylinder presentations; odometers
and ordered Bratteli-Vershik systems; Kakutani-Rokhlin partition
sequences; topological-full-group elements, membership, and sign
analysis; orbit and strong-orbit equivalence engines; enumeration
streams; and a deterministic CLI.
"""

from __future__ import annotations

from .enumeration import (
    TupleCode,
    TupleCoder,
    as_level_permutation,
    clopen_at_index,
    clopen_index,
    enum_dgamma,
    enum_gamma,
    enum_tfg,
    is_in_gamma,
)
from .equiv import (
    CountVector,
    Obstruction,
    OrbitStatus,
    PartialIso,
    Rung,
    SOEVerdict,
    Stuck,
    base_point_witness,
    count_vector,
    orbit_decide,
    piecewise_merge,
    soe_backandforth,
    soe_cocycle_report,
    soe_decide,
    supernatural_valuations,
)
from .errors import (
    CantorDynError,
    CapExceededError,
    InadmissibleWordError,
    InputFormatError,
    PiecewiseValidationError,
    RefinementDepthError,
    SpaceMismatchError,
    StackingMismatchError,
    UnsupportedSystemError,
)
from .fullgroup import (
    CommutatorStatus,
    GammaMembership,
    PiecewisePower,
    SignVector,
    TowerPermutation,
    derived_approx,
    embed_level,
    embed_to,
    gamma_element,
    in_commutator,
    involution_in,
    membership_gamma,
    perm_cycles,
    perm_sign,
    propagate_signs,
    sign_vector,
    validate_piecewise,
)
from .space import Clopen, Point, ProductSpace, SpacePresentation, boolean_op, cylinder
from .systems import (
    BVDiagram,
    BVSystem,
    Odometer,
    System,
    invariant_measure,
    load_system,
    minimality_evidence,
    system_from_file,
)
from .towers import (
    KRPartition,
    KRSequence,
    StackingMap,
    Tower,
    atom_at,
    kr_from_clopen,
    kr_sequence,
    refine_with_clopen,
    stacking_map_between,
)

__version__ = "0.1.0"

__all__ = [
    "BVDiagram",
    "BVSystem",
    "CantorDynError",
    "CapExceededError",
    "Clopen",
    "CommutatorStatus",
    "CountVector",
    "GammaMembership",
    "InadmissibleWordError",
    "InputFormatError",
    "KRPartition",
    "KRSequence",
    "Obstruction",
    "Odometer",
    "OrbitStatus",
    "PartialIso",
    "PiecewisePower",
    "PiecewiseValidationError",
    "Point",
    "ProductSpace",
    "RefinementDepthError",
    "Rung",
    "SOEVerdict",
    "SignVector",
    "SpaceMismatchError",
    "SpacePresentation",
    "StackingMap",
    "StackingMismatchError",
    "Stuck",
    "System",
    "Tower",
    "TowerPermutation",
    "TupleCode",
    "TupleCoder",
    "UnsupportedSystemError",
    "as_level_permutation",
    "atom_at",
    "base_point_witness",
    "boolean_op",
    "clopen_at_index",
    "clopen_index",
    "count_vector",
    "cylinder",
    "derived_approx",
    "embed_level",
    "embed_to",
    "enum_dgamma",
    "enum_gamma",
    "enum_tfg",
    "gamma_element",
    "in_commutator",
    "invariant_measure",
    "involution_in",
    "is_in_gamma",
    "kr_from_clopen",
    "kr_sequence",
    "load_system",
    "membership_gamma",
    "minimality_evidence",
    "orbit_decide",
    "perm_cycles",
    "perm_sign",
    "piecewise_merge",
    "propagate_signs",
    "refine_with_clopen",
    "sign_vector",
    "soe_backandforth",
    "stacking_map_between",
    "soe_cocycle_report",
    "soe_decide",
    "supernatural_valuations",
    "system_from_file",
    "validate_piecewise",
]

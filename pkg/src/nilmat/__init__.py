"""Exact computations with unitriangular integer matrix groups.

The package builds matrix representations of finitely generated
torsion-free nilpotent groups (group-ring and coordinate-function
constructions), measures how distorted a subgroup's word metric is
inside the ambient unitriangular group, and constructs subgroups with
any prescribed rational distortion degree.
"""

from .distortion import (
    DistortionReport,
    GuardError,
    Stratum,
    SubgroupGens,
    ball,
    brute_force_degree,
    depth_by_powers,
    distorted_subgroup,
    distortion_degree,
    empirical_distortion,
    intersect_level_subgroup,
    lie_span,
    lower_central_gens,
    member,
    member_certificate,
    report_to_json,
    standardize,
    subgroup_depth,
    subgroup_from_json,
    subgroup_to_json,
)
from .jennings import (
    EmbeddingResult,
    JenningsBasis,
    embedding_to_json,
    image_weights,
    jennings_embedding,
)
from .matgroup import (
    PositionBasis,
    RationalNilpotentMatrix,
    RationalSquareMatrix,
    UnitriangularMatrix,
    commutator,
    elementary,
    exp_nilpotent,
    from_coordinates,
    identity,
    in_level_subgroup,
    level_weight,
    log_unipotent,
    malcev_coordinates,
    matrix_from_json,
    matrix_to_json,
)
from .nickel import (
    CoordinatePolynomial,
    FunctionModule,
    act,
    declared_ordering,
    function_module,
    nickel_embedding,
    ordering_search,
)
from .presentation import (
    NilpotentPresentation,
    builtin,
    presentation_from_json,
    presentation_to_json,
    relation_failures,
)

__version__ = "0.1.0"

__all__ = [
    "CoordinatePolynomial",
    "DistortionReport",
    "EmbeddingResult",
    "FunctionModule",
    "GuardError",
    "JenningsBasis",
    "NilpotentPresentation",
    "PositionBasis",
    "RationalNilpotentMatrix",
    "RationalSquareMatrix",
    "Stratum",
    "SubgroupGens",
    "UnitriangularMatrix",
    "act",
    "ball",
    "brute_force_degree",
    "builtin",
    "commutator",
    "declared_ordering",
    "depth_by_powers",
    "distorted_subgroup",
    "distortion_degree",
    "elementary",
    "embedding_to_json",
    "empirical_distortion",
    "exp_nilpotent",
    "from_coordinates",
    "function_module",
    "identity",
    "image_weights",
    "in_level_subgroup",
    "intersect_level_subgroup",
    "jennings_embedding",
    "level_weight",
    "lie_span",
    "log_unipotent",
    "lower_central_gens",
    "malcev_coordinates",
    "matrix_from_json",
    "matrix_to_json",
    "member",
    "member_certificate",
    "nickel_embedding",
    "ordering_search",
    "presentation_from_json",
    "presentation_to_json",
    "relation_failures",
    "report_to_json",
    "standardize",
    "subgroup_depth",
    "subgroup_from_json",
    "subgroup_to_json",
    "__version__",
]

"""Pointed presheaves over finite index categories: exact sequences, initial
normal covers, action classification and grid-lattice sheaves."""

from .actions import (
    ActionSet,
    LeftSplitSequence,
    classifying_morphism,
    enumerate_actions,
    induced_sequence,
    necessary_condition,
    push_forward,
    sequence_isomorphism,
    trivial_sequence,
    validate_sequence,
    verify_representability,
)
from .cover import (
    InitialNormalCover,
    NormalCover,
    VerificationError,
    closed_form_arrow,
    closed_form_boolean,
    generation_bound,
    initial_cover_generic,
    kernel_is_retract,
    slice_isomorphism,
    slice_morphisms,
    solution_set,
)
from .exactness import (
    NormalEpiWitness,
    SubPresheaf,
    cokernel,
    coproduct,
    embed,
    equalizer,
    generated_subpresheaf,
    image_subpresheaf,
    is_normal_epi,
    is_normal_epi_by_definition,
    kernel,
    kernel_inclusion,
    pushout,
    retraction_onto,
    subpresheaf,
    wide_pullback,
)
from .fincat import (
    FiniteCategory,
    PosetCategory,
    build_arrow,
    build_grid_poset,
    build_terminal,
    grid_coords,
    grid_index,
)
from .presheaf import (
    PointedPresheaf,
    PointedSet,
    PresheafMorphism,
    compose_morphisms,
    hom_enumerate,
    identity_morphism,
    is_isomorphism,
    isomorphic,
    zero_morphism,
    zero_object,
)
from .site import (
    GridSheaf,
    GridSite,
    build_site,
    build_target_sheaf,
    build_threshold_cover,
    build_threshold_sheaf,
    escape_index,
    is_sheaf,
    sheaf_epi,
    sheaf_normal_epi,
)

__version__ = "0.1.0"

"""On-demand navigation in relational concept structures.

Compute a focus concept's completed relational intent and its closed
neighbourhood (upper, lower and relational covers) straight from a
relational context family, without materialising whole lattices.
"""

from .algebra import (
    Strategy,
    closure,
    extent_of,
    grow_all,
    grow_context,
    intent_of,
    intersect,
    normalize_attributes,
    object_concept,
    object_poset,
)
from .io_formats import (
    ConceptRegistry,
    ParseError,
    attribute_display,
    concept_name,
    concept_payload,
    export_neighborhood_dot,
    neighborhood_payload,
    parse_rcf,
    serialize_rcf_json,
    serialize_rcf_table,
)
from .model import (
    Attribute,
    Concept,
    FormalContext,
    InputError,
    Intrinsic,
    InvariantError,
    NotClosedError,
    RelationalAttribute,
    RelationalContext,
    RelationalContextFamily,
    ScalingOperator,
    UnknownNameError,
    prime_attributes,
    prime_objects,
)
from .neighborhood import (
    GeneratorFamily,
    Neighborhood,
    RelationalCover,
    concept_from_query,
    generator_family,
    min_generators,
    min_transversals,
    rca_step,
)
from .oracle import (
    Lattice,
    build_lattice,
    neighborhood_from_lattice,
    rca_fixpoint,
    scaled_context,
    verify_one_step,
)
from .service import StaleTargetError, make_session, replay_log, run_query, run_step

__version__ = "0.1.0"

"""Exact min-plus polyhedral geometry for extension-probability text models."""

from .tropical import (
    ExtReal,
    NEG_INF,
    POS_INF,
    ZERO,
    TropMatrix,
    TropVector,
    close_log,
    funk,
    funk_q,
    max_plus_apply,
    min_plus_apply,
    neg,
    tmax,
    tmax_mul,
    tmin,
    tmul,
)
from .model import (
    ORDER_MODES,
    DirectedMetric,
    PartialOrder,
    Plm,
    Potential,
    ValidationFailed,
    ValidationReport,
    check_projector,
    ingest_corpus,
    is_subtext,
    kleene_closure,
    load_model_file,
    metric_from_dict,
    metric_from_plm,
    metric_to_dict,
    model_from_dict,
    model_to_dict,
    order_from_metric,
    plm_from_metric,
    potentials,
    truncate_big_m,
    validate_plm,
    write_json_atomic,
    write_text_atomic,
)
from .polyhedron import (
    QVector,
    SaturationGraph,
    Side,
    TerminalDecomposition,
    co_yoneda,
    combine,
    generator,
    side_metric,
    coordinates_as_distances,
    membership,
    normalize_to_simplex,
    project,
    saturation_graph,
    span_decompose,
    terminal_decompose,
    vector_from_strings,
    vector_to_strings,
    yoneda,
)
from .rays import (
    LowerSet,
    Ray,
    ResourceCapExceeded,
    certify_ray,
    cross_check_rays,
    diagonal_scaling,
    enumerate_connected_lower_sets,
    enumerate_rays,
    metric_cone_constraints,
    oracle_rays,
    plm_cone_constraints,
    ray_as_text_combination,
    ray_from_lower_set,
    ray_saturation_edges,
)
from .duality import DualityReport, check_fixed_negation, dual_decompose, map_a, map_b, side_map
from .isbell import isbell_member, map_l, map_r, max_closure
from .generate import (
    random_extended_vector,
    random_forest_plm,
    random_layered_plm,
    random_member,
    random_plm,
    random_weight,
)
from .extension import (
    BoltzmannResult,
    Embedding,
    IsometryError,
    RetractionOp,
    boltzmann,
    embed_model,
    filtration_retractions,
    retraction_from_subset,
    word_decompose,
)

__version__ = "0.1.0"

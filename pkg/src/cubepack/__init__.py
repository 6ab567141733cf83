"""cubepack: exact rational hypercube bin packing constructions and games.

The library builds packings of open cubes with sides (1 + eps)/k inside
the unit bin from combinatorial word families, derives adversarial
instances for bounded-space online bin packing, and analyzes the
induced selfish packing game (Nash / strong equilibria, price of
anarchy).  All arithmetic on coordinates and volumes is exact.
"""

from .geometry import (
    Bin,
    BinVerification,
    CubeClass,
    Interval,
    PlacedCube,
    as_rational,
    cube_volume,
    cubes_disjoint,
    find_free_position,
    format_rational,
    intervals_disjoint,
    occupied_volume,
    verify_bin,
)
from .languages import (
    FamilyCertificate,
    FamilyConstructionError,
    FSets,
    FSetsSamplingError,
    Language,
    SeparatedFamily,
    Word,
    are_separated,
    build_separated_family,
    count_good_words,
    estimate_good_words,
    is_bad_word,
    is_gapped,
    load_family,
    sample_f_sets,
    save_family,
    warmup_family,
)
from .packing import (
    DensePackingReport,
    HomogeneousBin,
    PackingVerificationError,
    PowerOfTwoPackingReport,
    TypedPacking,
    base_coordinate,
    build_homogeneous,
    build_packing,
    dense_packing_report,
    gap_inequality_holds,
    interval_for,
    load_packing,
    packing_from_dict,
    packing_to_dict,
    place_word,
    power_of_two_packing_report,
    power_of_two_s_prime,
    save_packing,
)
from .online import (
    AdversaryResult,
    ClassHarmonicBaseline,
    Decision,
    HarnessViolation,
    Instance,
    InvalidScaleError,
    RatioReport,
    RunResult,
    Segment,
    adversarial_instance,
    instance_from_dict,
    instance_to_dict,
    load_instance,
    lower_bound_certificate,
    minimal_scale,
    offline_certificate,
    paper_scale,
    run_bounded_space,
    save_instance,
    validate_scale,
)
from .game import (
    AnarchyInstance,
    CoalitionProposal,
    CoalitionSearchError,
    DynamicsResult,
    GameConfig,
    GameItem,
    MoveProposal,
    NashResult,
    RepackSearchError,
    SparseBinReport,
    StrongNashResult,
    apply_coalition,
    apply_move,
    best_response_dynamics,
    config_from_dict,
    config_to_dict,
    homogeneous_mixture,
    improving_moves,
    is_nash,
    is_strong_nash,
    load_config,
    meir_moser_predicate,
    poa_instance,
    potential,
    prop1_check,
    prop1_sweep,
    save_config,
    sparse_bin_report,
    spoa_instance,
)

__version__ = "0.1.0"

__all__ = [
    "AdversaryResult",
    "AnarchyInstance",
    "Bin",
    "BinVerification",
    "ClassHarmonicBaseline",
    "CoalitionProposal",
    "CoalitionSearchError",
    "CubeClass",
    "Decision",
    "DensePackingReport",
    "DynamicsResult",
    "FamilyCertificate",
    "FamilyConstructionError",
    "FSets",
    "FSetsSamplingError",
    "GameConfig",
    "GameItem",
    "HarnessViolation",
    "HomogeneousBin",
    "Instance",
    "Interval",
    "InvalidScaleError",
    "Language",
    "MoveProposal",
    "NashResult",
    "PackingVerificationError",
    "PlacedCube",
    "PowerOfTwoPackingReport",
    "RatioReport",
    "RepackSearchError",
    "RunResult",
    "Segment",
    "SeparatedFamily",
    "SparseBinReport",
    "StrongNashResult",
    "TypedPacking",
    "Word",
    "__version__",
    "adversarial_instance",
    "apply_coalition",
    "apply_move",
    "are_separated",
    "as_rational",
    "base_coordinate",
    "best_response_dynamics",
    "build_homogeneous",
    "build_packing",
    "build_separated_family",
    "config_from_dict",
    "config_to_dict",
    "count_good_words",
    "cube_volume",
    "cubes_disjoint",
    "dense_packing_report",
    "estimate_good_words",
    "find_free_position",
    "format_rational",
    "gap_inequality_holds",
    "homogeneous_mixture",
    "improving_moves",
    "instance_from_dict",
    "instance_to_dict",
    "interval_for",
    "intervals_disjoint",
    "is_bad_word",
    "is_gapped",
    "is_nash",
    "is_strong_nash",
    "load_config",
    "load_family",
    "load_instance",
    "load_packing",
    "lower_bound_certificate",
    "meir_moser_predicate",
    "minimal_scale",
    "occupied_volume",
    "offline_certificate",
    "packing_from_dict",
    "packing_to_dict",
    "paper_scale",
    "place_word",
    "poa_instance",
    "potential",
    "power_of_two_packing_report",
    "power_of_two_s_prime",
    "prop1_check",
    "prop1_sweep",
    "run_bounded_space",
    "sample_f_sets",
    "save_config",
    "save_family",
    "save_instance",
    "save_packing",
    "sparse_bin_report",
    "spoa_instance",
    "validate_scale",
    "verify_bin",
    "warmup_family",
]

"""S3-extensions of Q at a prime p > 3: neatness, degeneracy indices, the
x^3 + ax + 1 family search, finite S3-module models and the explicit universal
deformation over Z_p[[T1, T2, T3]]."""

from .classification import ClassificationReport, ClassifyParams, classify_extension, degeneracy_index, neatness_check
from .deformation import Mat2, SpecializationPoint, TruncSeries, evaluate_loci, universal_deformation, verify_group_relations
from .family_search import fast_genericity_witness, high_index_candidate_search, is_prime_wide, scan_family_range
from .number_field import CubicFieldData, find_fundamental_unit, maximal_order_basis
from .padic import PadicInt, hensel_lift_root, pth_power_index_qp
from .s3_modules import S3Module, build_degenerate_model, isotypic_decompose

__version__ = "0.1.0"

__all__ = [
    "ClassificationReport", "ClassifyParams", "classify_extension", "degeneracy_index", "neatness_check",
    "Mat2", "SpecializationPoint", "TruncSeries", "evaluate_loci", "universal_deformation",
    "verify_group_relations", "fast_genericity_witness", "high_index_candidate_search", "is_prime_wide",
    "scan_family_range", "CubicFieldData", "find_fundamental_unit", "maximal_order_basis", "PadicInt",
    "hensel_lift_root", "pth_power_index_qp", "S3Module", "build_degenerate_model", "isotypic_decompose",
]

"""Joint C-numerical ranges of matrix tuples and commutativity tests."""

__version__ = "0.1.0"

from .crange import (Halfspace, SupportProbe, WeightSpec, boundary2d, diagonal_vertices,
                     k_range, make_weight, point_at, sample_directions, support, support_many,
                     wk_complement_check)
from .decide import AnalysisReport, decide_commuting, decide_polyhedral, decide_via_conical
from .estimators import CNumericalRange, PolyhedralityTest
from .family import AffineMap, MatrixTuple, apply_affine, classify_flat, hermitian_expand, span_basis
from .linalg import commutator_norm, herm_eig, is_normal, jacobi_eigh, random_unitary
from .structure import (BlockDecomposition, ConicalCertificate, PinchDecomposition, extract_blocks,
                        find_conical, partition_support_check, pinch_decompose,
                        simultaneous_diagonalize, verify_conical_blocks)

__all__ = [
    "AffineMap", "AnalysisReport", "BlockDecomposition", "CNumericalRange", "ConicalCertificate",
    "Halfspace", "MatrixTuple", "PinchDecomposition", "PolyhedralityTest", "SupportProbe",
    "WeightSpec", "apply_affine", "boundary2d", "classify_flat", "commutator_norm",
    "decide_commuting", "decide_polyhedral", "decide_via_conical", "diagonal_vertices",
    "extract_blocks", "find_conical", "herm_eig", "hermitian_expand", "is_normal",
    "jacobi_eigh", "k_range", "make_weight", "partition_support_check", "pinch_decompose",
    "point_at", "random_unitary", "sample_directions", "simultaneous_diagonalize",
    "span_basis", "support", "support_many", "verify_conical_blocks", "wk_complement_check",
]

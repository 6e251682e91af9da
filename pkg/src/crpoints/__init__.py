"""Complex points of codimension-two real submanifolds: quadric pairs, normal forms,
nondegenerate homotopies, glued graph surfaces and Levi-form checks."""

from .canonical import BishopForm, TakagiFactorization, bishop_normal_form, symmetric_to_identity, takagi_factorize
from .cmatrix import Tolerance
from .consim import ConsimForm, ConSpectrum, con_spectrum, consim_diagonalize, consimilar, structured_perturbation
from .errors import (
    CertificationError,
    CRPointsError,
    DimensionError,
    GenericityError,
    IllPosedCountError,
    InternalConsistencyError,
    InvalidGroupElementError,
    NumericError,
    PathConstructionError,
    PreconditionError,
    SamplingError,
)
from .graph import ComplexPointList, GraphSurface, build_isotoped_graph, find_complex_points, realified_determinant
from .homotopy import (
    Certificate,
    HomotopyPath,
    HomotopySegment,
    SegmentKind,
    block_segment,
    certify,
    conjugation_segment,
    connecting_path,
    normal_form,
    normal_form_path,
)
from .levi import (
    LeviReport,
    ModelKind,
    ScalarField,
    complex_hessian,
    levi_value,
    model_field,
    pseudoconvexity_report,
    restricted_levi_check,
)
from .quadric import (
    GElement,
    PointClass,
    PointType,
    QuadricPair,
    classification_determinant,
    classify,
    direct_sum,
    g_act,
    lai_count,
    random_pair,
)

__version__ = "0.1.0"

"""Hopf maps, Hopf invariants and the radial Hopf soliton of SU(2) Yang-Mills-Higgs."""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    BoundaryNotAsymptotic,
    CurvesIntersect,
    CutoffExceedsMesh,
    HopfSolitonError,
    MeshMismatch,
    NonConvergence,
    NotOnSphere,
    OriginSingular,
    PoleOnCurve,
    ProfileFormatError,
    ResolutionTooLow,
    SingularJacobian,
    WindowTooNarrow,
)
from .profiles import ModelParams, RadialProfile  # noqa: F401

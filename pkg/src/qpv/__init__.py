"""Associated linear problem of q-P_V: exact deformation machinery and the
big q-Laguerre orthogonal-polynomial pipeline."""

from .exact import DomainError, Mat2, Poly, RatFunc
from .linprob import ConnectionData, SurfaceState, build_A
from .deform import compose_word, qpv_step, translate, verify_compat
from .ortho import OrthoPipeline, WeightParams, pipeline
from .qfun import PrecisionCtx

__all__ = [
    "DomainError", "Mat2", "Poly", "RatFunc",
    "ConnectionData", "SurfaceState", "build_A",
    "compose_word", "qpv_step", "translate", "verify_compat",
    "OrthoPipeline", "WeightParams", "pipeline",
    "PrecisionCtx",
]
__version__ = "0.1.0"

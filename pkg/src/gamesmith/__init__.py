"""gamesmith: synthesis, verification and interactive play of finite-memory
controllers for two-player multi-weighted graph games."""

from .model import (
    Edge,
    EnergyUnderflow,
    GameStructure,
    GamesmithError,
    MeanPayoffBound,
    ObjectiveSpec,
    SemanticError,
    SourceSpan,
    State,
    apply_edge,
    make_game,
    mp_transform,
    validate_game,
)
from .gdl import (
    GdlSyntaxError,
    StrategyDoc,
    parse_game,
    parse_strategy,
    serialize_game,
    serialize_strategy,
)
from .antichain import energy_fixpoint, min_elements
from .synth import SynthConfig, SynthesisResult, synthesize
from .verify import VerificationReport, verify_all
from .simulate import create_session, step

__version__ = "0.1.0"

__all__ = [
    "Edge",
    "EnergyUnderflow",
    "GameStructure",
    "GamesmithError",
    "GdlSyntaxError",
    "MeanPayoffBound",
    "ObjectiveSpec",
    "SemanticError",
    "SourceSpan",
    "State",
    "StrategyDoc",
    "SynthConfig",
    "SynthesisResult",
    "VerificationReport",
    "apply_edge",
    "create_session",
    "energy_fixpoint",
    "make_game",
    "min_elements",
    "mp_transform",
    "parse_game",
    "parse_strategy",
    "serialize_game",
    "serialize_strategy",
    "step",
    "synthesize",
    "validate_game",
    "verify_all",
    "__version__",
]

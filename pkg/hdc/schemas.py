from enum import Enum
from typing import Literal

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    field_serializer,
    field_validator,
    model_validator,
)

MAX_SEED = 2**64 - 1


# Custom Exceptions
class HDVError(Exception):
    """Base hyperdimensional engine error"""

    exit_code = 2


class InvalidDimensionError(HDVError):
    """Dimension below the supported minimum"""

    pass


class InvalidSeedError(HDVError):
    """Seed is not an unsigned 64-bit integer"""

    pass


class DimensionMismatchError(HDVError):
    """Operands of a binary operation differ in dimension"""

    pass


class IncompatibleArtifactsError(HDVError):
    """Artifacts disagree on seed, dimension or window length"""

    pass


class InvalidSymbolError(HDVError):
    """Symbol name is empty"""

    pass


class ReservedNameError(InvalidSymbolError):
    """Symbol name is reserved for internal use"""

    pass


class UnknownSymbolError(HDVError):
    """Symbol is not registered in the codebook"""

    pass


class EmptyCodebookError(HDVError):
    """Cleanup against a codebook without entries"""

    pass


class EmptyAccumulatorError(HDVError):
    """Normalization of an accumulator that holds no vectors"""

    pass


class AccumulatorOverflowError(HDVError):
    """Accumulator count would exceed its representable bound"""

    pass


class InsufficientDataError(HDVError):
    """No session or window qualifies for the requested operation"""

    pass


class UntrainedModelError(HDVError):
    """Prediction against a model with no trained windows"""

    pass


class PrefixLengthError(HDVError):
    """Prediction prefix length differs from n - 1"""

    exit_code = 1


class DuplicateRoleError(HDVError):
    """Role or attribute appears twice in one profile"""

    pass


class EmptyProfileError(HDVError):
    """Profile built without any role-filler pair"""

    pass


class ActionLogError(HDVError):
    """Action log contains malformed lines"""

    def __init__(self, problems: list[tuple[int, str]]):
        self.problems = problems
        super().__init__(
            "; ".join(f"line {line}: {message}" for line, message in problems)
        )


class ArtifactFormatError(HDVError):
    """Persisted artifact cannot be decoded"""

    pass


class InvalidTransitionMatrixError(HDVError):
    """Markov transition matrix is not row-stochastic"""

    pass


class SweepConfigError(HDVError):
    """Sweep grid cannot be evaluated"""

    pass


# Enums
class CodebookKind(str, Enum):
    ACTION = "action"
    STYLE_ATTRIBUTE = "style-attribute"
    STYLE_VALUE = "style-value"
    CONTEXT_ROLE = "context-role"
    CONTEXT_FILLER = "context-filler"


# Results
class CleanupResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    score: float
    runner_up_score: float
    confident: bool


class StyleChange(BaseModel):
    attribute: str
    source_value: str
    target_value: str | None = None
    score: float
    confident: bool


class RestyleReport(BaseModel):
    text: str
    applied: list[StyleChange]
    unresolved: list[StyleChange]


# Documents
class ActionEvent(BaseModel):
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    timestamp: int = Field(alias="ts")
    session: str = Field(min_length=1)
    action: str = Field(min_length=1)


class ArtifactHeader(BaseModel):
    """Fields shared by every persisted artifact."""

    version: Literal[1] = 1
    dimension: int = Field(ge=2)
    seed: int = Field(ge=0, le=MAX_SEED)

    @field_validator("seed", mode="before")
    @classmethod
    def parse_seed(cls, v: str | int) -> int:
        if isinstance(v, str):
            if not v.isdigit():
                raise ValueError("seed must be a decimal string")
            return int(v)
        return v

    @field_serializer("seed")
    def dump_seed(self, v: int) -> str:
        return str(v)


class CodebookFile(ArtifactHeader):
    kind: CodebookKind
    names: list[str]


class ModelFile(ArtifactHeader):
    n: int = Field(ge=2)
    windows_trained: int = Field(ge=0)
    codebook: list[str]
    sums: str = Field(description="base64 of little-endian int32 accumulator sums")


class ProfileFile(ArtifactHeader):
    pairs: list[tuple[str, str]]


class SweepConfig(BaseModel):
    dimensions: list[int] = Field(min_length=1)
    alphabet_sizes: list[int] = Field(min_length=1)
    windows: list[int] = Field(min_length=1)
    noise: list[float] = Field(default_factory=lambda: [0.0], min_length=1)
    trials: int = Field(default=10, ge=1)
    seed: int = Field(default=0, ge=0, le=MAX_SEED)
    n: int = Field(default=3, ge=2)
    workers: int = Field(default=1, ge=1)

    @field_validator("dimensions")
    @classmethod
    def validate_dimensions(cls, v: list[int]) -> list[int]:
        if any(d < 2 for d in v):
            raise ValueError("dimensions must be at least 2")
        return v

    @field_validator("alphabet_sizes", "windows")
    @classmethod
    def validate_positive(cls, v: list[int]) -> list[int]:
        if any(x < 1 for x in v):
            raise ValueError("sizes must be positive")
        return v

    @field_validator("noise")
    @classmethod
    def validate_noise(cls, v: list[float]) -> list[float]:
        if any(not 0.0 <= f < 1.0 for f in v):
            raise ValueError("noise fractions must lie in [0, 1)")
        return v

    @model_validator(mode="after")
    def validate_capacity(self) -> "SweepConfig":
        # every stored window needs a distinct prefix
        prefixes = min(self.alphabet_sizes) ** (self.n - 1)
        if max(self.windows) > prefixes:
            raise ValueError(
                f"windows must not exceed {prefixes} distinct prefixes "
                f"(alphabet {min(self.alphabet_sizes)}, n={self.n})"
            )
        return self


class SweepRow(BaseModel):
    dimension: int
    alphabet_size: int
    windows: int
    noise: float
    trials: int = Field(gt=0)
    accuracy: float = Field(ge=0.0, le=1.0)
    mean_match_score: float
    mean_top_distractor_score: float

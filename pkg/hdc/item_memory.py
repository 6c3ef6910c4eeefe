"""Codebooks of atomic hypervectors and nearest-neighbor cleanup."""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np
import numpy.typing as npt
from pydantic import ValidationError

from hdc.core import (
    DEFAULT_DIMENSION,
    DEFAULT_SEED,
    TIEBREAK_NAME,
    Hypervector,
    check_dimension,
    default_tau,
    generate,
    parse_seed,
)
from hdc.schemas import (
    ArtifactFormatError,
    CleanupResult,
    CodebookFile,
    CodebookKind,
    DimensionMismatchError,
    EmptyCodebookError,
    IncompatibleArtifactsError,
    InvalidSymbolError,
    ReservedNameError,
    UnknownSymbolError,
)
from utils.files import write_atomic
from utils.logger import get_logger

logger = get_logger()


class Codebook:
    """Ordered set of symbol names; vectors are regenerated from (name, seed, D)."""

    def __init__(
        self,
        kind: CodebookKind,
        seed: int = DEFAULT_SEED,
        dimension: int = DEFAULT_DIMENSION,
        names: Iterable[str] = (),
    ):
        self.kind = CodebookKind(kind)
        self.seed = parse_seed(seed)
        self.dimension = check_dimension(dimension)
        self._names: dict[str, None] = {}
        self._matrix: npt.NDArray[np.float32] | None = None
        for name in names:
            self.register(name)

    def __repr__(self) -> str:
        return (
            f"Codebook(kind={self.kind.value}, D={self.dimension}, "
            f"seed={self.seed:#x}, size={len(self)})"
        )

    def __len__(self) -> int:
        return len(self._names)

    def __contains__(self, name: object) -> bool:
        return name in self._names

    def __iter__(self) -> Iterator[str]:
        return iter(self._names)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self._names)

    def register(self, name: str) -> Codebook:
        if not name:
            raise InvalidSymbolError("Symbol name must be non-empty")
        if name == TIEBREAK_NAME:
            raise ReservedNameError(f"{TIEBREAK_NAME!r} is reserved")
        if name not in self._names:
            self._names[name] = None
            self._matrix = None
        return self

    def vector(self, name: str) -> Hypervector:
        if name not in self._names:
            raise UnknownSymbolError(
                f"{name!r} is not registered in the {self.kind.value} codebook"
            )
        return generate(name, self.seed, self.dimension)

    def compatible_with(self, other: Codebook) -> bool:
        return self.seed == other.seed and self.dimension == other.dimension

    def check_compatible(self, other: Codebook) -> None:
        if not self.compatible_with(other):
            raise IncompatibleArtifactsError(
                f"Codebooks disagree: seed {self.seed} / D {self.dimension} "
                f"vs seed {other.seed} / D {other.dimension}"
            )

    def matrix(self) -> npt.NDArray[np.float32]:
        """All registered vectors as rows; integer dot products stay exact in float32."""
        if self._matrix is None:
            if not self._names:
                raise EmptyCodebookError(f"The {self.kind.value} codebook is empty")
            self._matrix = np.stack(
                [self.vector(name).components for name in self._names]
            ).astype(np.float32)
        return self._matrix

    def to_file(self) -> CodebookFile:
        return CodebookFile(
            dimension=self.dimension, seed=self.seed, kind=self.kind, names=list(self)
        )

    @classmethod
    def from_file(cls, document: CodebookFile) -> Codebook:
        return cls(document.kind, document.seed, document.dimension, document.names)


def scores(codebook: Codebook, query: Hypervector) -> npt.NDArray[np.float64]:
    """Similarity of `query` to every codebook entry, in registration order."""
    if query.dimension != codebook.dimension:
        raise DimensionMismatchError(
            f"Query dimension {query.dimension} != codebook dimension {codebook.dimension}"
        )
    dots = codebook.matrix() @ query.components.astype(np.float32)
    return dots.astype(np.float64) / codebook.dimension


def best_match(names: tuple[str, ...], values: npt.NDArray[np.float64]) -> tuple[int, float]:
    """Index and score of the maximum; ties go to the lexicographically first name."""
    top = float(values.max())
    candidates = np.flatnonzero(values == top)
    index = min(candidates, key=lambda i: names[i])
    return int(index), top


def _resolve(
    codebook: Codebook, values: npt.NDArray[np.float64], tau: float | None
) -> CleanupResult:
    names = codebook.names
    index, top = best_match(names, values)
    if len(values) > 1:
        runner_up = float(np.max(np.delete(values, index)))
    else:
        runner_up = -1.0
    threshold = default_tau(codebook.dimension) if tau is None else tau
    return CleanupResult(
        name=names[index],
        score=top,
        runner_up_score=runner_up,
        confident=top >= threshold,
    )


def cleanup(
    codebook: Codebook, query: Hypervector, tau: float | None = None
) -> CleanupResult:
    """Nearest registered symbol to `query` by exhaustive scan."""
    if not len(codebook):
        raise EmptyCodebookError(f"The {codebook.kind.value} codebook is empty")
    return _resolve(codebook, scores(codebook, query), tau)


def cleanup_raw(
    codebook: Codebook, values: npt.NDArray[np.integer], tau: float | None = None
) -> CleanupResult:
    """Cosine cleanup of an integer-valued query such as unbound accumulator sums."""
    if not len(codebook):
        raise EmptyCodebookError(f"The {codebook.kind.value} codebook is empty")
    if values.shape != (codebook.dimension,):
        raise DimensionMismatchError(
            f"Query dimension {values.size} != codebook dimension {codebook.dimension}"
        )
    query = values.astype(np.float64)
    norm = float(np.linalg.norm(query))
    if norm == 0.0:
        cosine = np.zeros(len(codebook), dtype=np.float64)
    else:
        cosine = (codebook.matrix().astype(np.float64) @ query) / (
            norm * math.sqrt(codebook.dimension)
        )
    return _resolve(codebook, cosine, tau)


def save_codebook(codebook: Codebook, path: Path) -> None:
    write_atomic(Path(path), codebook.to_file().model_dump_json(indent=2) + "\n")


def load_codebook(path: Path) -> Codebook:
    try:
        document = CodebookFile.model_validate_json(Path(path).read_text(encoding="utf-8"))
    except (ValidationError, json.JSONDecodeError) as e:
        raise ArtifactFormatError(f"Malformed codebook file {path}: {e}") from e
    try:
        codebook = Codebook.from_file(document)
    except (InvalidSymbolError, ReservedNameError) as e:
        raise ArtifactFormatError(f"Malformed codebook file {path}: {e}") from e
    logger.info(
        "Codebook loaded",
        extra={"path": str(path), "kind": codebook.kind.value, "size": len(codebook)},
    )
    return codebook

"""Role-filler bundles shared by style profiles and project contexts."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, TypeVar

from pydantic import ValidationError

from hdc.core import Accumulator, Hypervector, bind, normalize
from hdc.item_memory import Codebook, cleanup
from hdc.schemas import (
    ArtifactFormatError,
    CleanupResult,
    DuplicateRoleError,
    EmptyProfileError,
    IncompatibleArtifactsError,
    ProfileFile,
)
from utils.files import write_atomic
from utils.logger import get_logger

logger = get_logger()

P = TypeVar("P", bound="RoleFillerProfile")


@dataclass(eq=False)
class RoleFillerProfile:
    pairs: list[tuple[str, str]]
    encoding: Accumulator
    roles: Codebook
    fillers: Codebook

    @classmethod
    def build(
        cls: type[P],
        pairs: Sequence[tuple[str, str]],
        roles: Codebook,
        fillers: Codebook,
        *,
        allow_empty: bool = False,
    ) -> P:
        """Bundle bind(role, filler) over `pairs`, registering unseen names."""
        roles.check_compatible(fillers)
        if not pairs and not allow_empty:
            raise EmptyProfileError("A profile needs at least one pair")
        seen: set[str] = set()
        for role, _ in pairs:
            if role in seen:
                raise DuplicateRoleError(f"{role!r} appears more than once")
            seen.add(role)
        encoding = Accumulator.zeros(roles.dimension)
        for role, filler in pairs:
            roles.register(role)
            fillers.register(filler)
            encoding.add(bind(roles.vector(role), fillers.vector(filler)))
        return cls([(r, f) for r, f in pairs], encoding, roles, fillers)

    @property
    def seed(self) -> int:
        return self.roles.seed

    @property
    def dimension(self) -> int:
        return self.roles.dimension

    def vector(self) -> Hypervector:
        return normalize(self.encoding, self.seed)

    def filler_of(self, role: str) -> str | None:
        return dict(self.pairs).get(role)

    def check_compatible(self, other: RoleFillerProfile) -> None:
        if self.seed != other.seed or self.dimension != other.dimension:
            raise IncompatibleArtifactsError(
                f"Profiles disagree: seed {self.seed} / D {self.dimension} "
                f"vs seed {other.seed} / D {other.dimension}"
            )

    def to_file(self) -> ProfileFile:
        return ProfileFile(dimension=self.dimension, seed=self.seed, pairs=self.pairs)


def cross_map(source: RoleFillerProfile, target: RoleFillerProfile) -> Hypervector:
    """Product of two normalized bundles; bidirectional since binding is self-inverse."""
    source.check_compatible(target)
    return bind(source.vector(), target.vector())


def translate(
    symbol: Hypervector, map_vector: Hypervector, codebook: Codebook, tau: float | None
) -> CleanupResult:
    return cleanup(codebook, bind(symbol, map_vector), tau)


def save_profile(profile: RoleFillerProfile, path: Path) -> None:
    write_atomic(Path(path), profile.to_file().model_dump_json(indent=2) + "\n")


def load_profile_file(path: Path) -> ProfileFile:
    try:
        document = ProfileFile.model_validate_json(Path(path).read_text(encoding="utf-8"))
    except ValidationError as e:
        raise ArtifactFormatError(f"Malformed profile file {path}: {e}") from e
    logger.info("Profile loaded", extra={"path": str(path), "pairs": len(document.pairs)})
    return document

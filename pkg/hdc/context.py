"""Project context as a role-filler bundle, e.g. (LANG * Python) + (API * TensorFlow)."""

from __future__ import annotations

from typing import Sequence

from hdc.core import Hypervector, bind, similarity
from hdc.item_memory import Codebook
from hdc.profiles import RoleFillerProfile, cross_map, translate
from hdc.schemas import CleanupResult, CodebookKind, IncompatibleArtifactsError


class ContextProfile(RoleFillerProfile):
    pass


def context_codebooks(seed: int, dimension: int) -> tuple[Codebook, Codebook]:
    return (
        Codebook(CodebookKind.CONTEXT_ROLE, seed, dimension),
        Codebook(CodebookKind.CONTEXT_FILLER, seed, dimension),
    )


def encode_context(
    pairs: Sequence[tuple[str, str]], roles: Codebook, fillers: Codebook
) -> ContextProfile:
    return ContextProfile.build(pairs, roles, fillers)


def query_role(
    ctx: ContextProfile, role: str, fillers: Codebook, tau: float | None = None
) -> CleanupResult:
    """Unbind `role` from the context and clean up against `fillers`."""
    return translate(ctx.roles.vector(role), ctx.vector(), fillers, tau)


def query_filler(
    ctx: ContextProfile, filler: str, roles: Codebook, tau: float | None = None
) -> CleanupResult:
    """The symmetric query: which role holds `filler`."""
    return translate(ctx.fillers.vector(filler), ctx.vector(), roles, tau)


def context_similarity(a: ContextProfile, b: ContextProfile) -> float:
    a.check_compatible(b)
    return similarity(a.vector(), b.vector())


def transition_map(source: ContextProfile, target: ContextProfile) -> Hypervector:
    return cross_map(source, target)


def apply_transition(map_vector: Hypervector, ctx: ContextProfile) -> Hypervector:
    return bind(map_vector, ctx.vector())


def translate_filler(
    filler: str,
    map_vector: Hypervector,
    source_fillers: Codebook,
    target_fillers: Codebook,
    tau: float | None = None,
) -> CleanupResult:
    """Carry one filler of the source context across a transition map."""
    source_fillers.check_compatible(target_fillers)
    if map_vector.dimension != target_fillers.dimension:
        raise IncompatibleArtifactsError("Transition map and codebook differ in dimension")
    return translate(source_fillers.vector(filler), map_vector, target_fillers, tau)

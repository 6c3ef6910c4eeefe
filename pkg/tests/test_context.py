import pytest

from hdc.context import (
    apply_transition,
    context_codebooks,
    context_similarity,
    encode_context,
    query_filler,
    query_role,
    transition_map,
    translate_filler,
)
from hdc.core import similarity
from hdc.profiles import load_profile_file, save_profile
from hdc.schemas import DuplicateRoleError, IncompatibleArtifactsError, UnknownSymbolError

WORK_CONTEXT = [("LANG", "Python"), ("API", "TensorFlow"), ("Pattern", "Observer")]
HOBBY_CONTEXT = [("LANG", "Rust"), ("API", "Bevy"), ("Pattern", "ECS")]


def codebooks(seed=0, dimension=10_000, extra_fillers=0):
    roles, fillers = context_codebooks(seed, dimension)
    for i in range(extra_fillers):
        fillers.register(f"filler-{i:02d}")
    return roles, fillers


def test_query_recovers_filler_across_seeds():
    found, quiet = 0, 0
    for seed in range(100):
        roles, fillers = codebooks(seed, extra_fillers=47)
        ctx = encode_context(WORK_CONTEXT, roles, fillers)
        assert len(fillers) == 50
        result = query_role(ctx, "LANG", fillers)
        found += result.name == "Python" and result.confident
        roles.register("LICENSE")
        quiet += not query_role(ctx, "LICENSE", fillers, tau=0.04).confident
    assert found >= 99
    assert quiet >= 95


def test_query_filler_finds_role():
    roles, fillers = codebooks()
    ctx = encode_context(WORK_CONTEXT, roles, fillers)
    assert query_filler(ctx, "TensorFlow", roles).name == "API"


def test_unregistered_role():
    roles, fillers = codebooks()
    ctx = encode_context(WORK_CONTEXT, roles, fillers)
    with pytest.raises(UnknownSymbolError):
        query_role(ctx, "BUILD", fillers)


def test_duplicate_role():
    with pytest.raises(DuplicateRoleError):
        encode_context([("LANG", "Python"), ("LANG", "Go")], *codebooks())


def test_similarity_tracks_shared_pairs():
    roles, fillers = codebooks()
    work = encode_context(WORK_CONTEXT, roles, fillers)
    near = encode_context(WORK_CONTEXT[:2] + [("Pattern", "Visitor")], roles, fillers)
    hobby = encode_context(HOBBY_CONTEXT, roles, fillers)
    assert context_similarity(work, work) == 1.0
    assert context_similarity(work, near) > 0.3
    assert abs(context_similarity(work, hobby)) < 0.05


def test_similarity_rejects_incompatible():
    work = encode_context(WORK_CONTEXT, *codebooks(seed=0, dimension=1000))
    other = encode_context(WORK_CONTEXT, *codebooks(seed=1, dimension=1000))
    with pytest.raises(IncompatibleArtifactsError):
        context_similarity(work, other)


def test_transition_between_contexts():
    roles, fillers = codebooks()
    hobby = encode_context(HOBBY_CONTEXT, roles, fillers)
    work = encode_context(WORK_CONTEXT, roles, fillers)
    map_vector = transition_map(hobby, work)
    assert similarity(apply_transition(map_vector, hobby), work.vector()) == 1.0
    assert apply_transition(map_vector, work) == hobby.vector()
    for (_, source), (_, target) in zip(HOBBY_CONTEXT, WORK_CONTEXT):
        assert translate_filler(source, map_vector, fillers, fillers).name == target


def test_profile_file_round_trip(tmp_path):
    roles, fillers = codebooks(seed=12, dimension=2048)
    ctx = encode_context(WORK_CONTEXT, roles, fillers)
    path = tmp_path / "context.json"
    save_profile(ctx, path)
    document = load_profile_file(path)
    reloaded = encode_context(document.pairs, *context_codebooks(document.seed, document.dimension))
    assert reloaded.vector() == ctx.vector()
    assert reloaded.filler_of("API") == "TensorFlow"

import functools
import json
import logging
from pathlib import Path
from typing import Any, Sequence
from uuid import uuid4

import click
from pydantic import ValidationError

from cli.config import CliConfig
from hdc import behavior, context, harness, style
from hdc.core import parse_seed, similarity
from hdc.item_memory import Codebook, load_codebook, save_codebook
from hdc.profiles import load_profile_file, save_profile
from hdc.schemas import (
    CleanupResult,
    CodebookKind,
    HDVError,
    IncompatibleArtifactsError,
    StyleChange,
)
from settings import Settings
from utils.files import write_atomic
from utils.logger import CommandContextVar, command_ctx_var, get_logger

logger = get_logger()

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NOT_CONFIDENT = 3

_existing_file = click.Path(exists=True, dir_okay=False, path_type=Path)
_output_file = click.Path(dir_okay=False, path_type=Path)


def _split_names(value: str) -> list[str]:
    return [part.strip() for part in value.split(",") if part.strip()]


def _parse_pairs(items: Sequence[str]) -> list[tuple[str, str]]:
    pairs = []
    for item in items:
        role, sep, filler = item.partition("=")
        if not sep or not role.strip() or not filler.strip():
            raise click.BadParameter(f"expected ROLE=VALUE, got {item!r}", param_hint="--pair")
        pairs.append((role.strip(), filler.strip()))
    return pairs


def _emit(config: CliConfig, payload: dict[str, Any], text: str) -> None:
    if config.json_output:
        click.echo(json.dumps(payload, sort_keys=True))
    else:
        click.echo(text)


def _format_result(result: CleanupResult) -> str:
    return (
        f"{result.name}\tscore={result.score:.6f}\t"
        f"runner_up={result.runner_up_score:.6f}\t"
        f"confident={'yes' if result.confident else 'no'}"
    )


def _exit_if_doubtful(ctx: click.Context, *confident: bool) -> None:
    if ctx.obj.strict and not all(confident):
        ctx.exit(EXIT_NOT_CONFIDENT)


@click.group()
@click.option("--dimension", type=click.IntRange(min=2), default=None, help="Hypervector dimension D (env HDV_DIMENSION).")
@click.option("--seed", type=str, default=None, help="Global seed, decimal or 0x-hex (env HDV_SEED).")
@click.option("--tau", type=float, default=None, help="Cleanup confidence threshold (env HDV_TAU; default 4/sqrt(D)).")
@click.option("--json", "json_output", is_flag=True, help="Emit machine-readable JSON.")
@click.option("--strict", is_flag=True, help="Exit with status 3 when a result is not confident.")
@click.option("--verbose", "-v", is_flag=True, help="Log progress and the effective configuration.")
@click.pass_context
def cli(
    ctx: click.Context,
    dimension: int | None,
    seed: str | None,
    tau: float | None,
    json_output: bool,
    strict: bool,
    verbose: bool,
) -> None:
    """Hyperdimensional modeling of developer actions, coding style and project context."""
    if seed is not None:
        try:
            parse_seed(seed)
        except HDVError as e:
            raise click.BadParameter(str(e), param_hint="--seed") from e
    config = CliConfig.resolve(
        Settings(),
        dimension=dimension,
        seed=seed,
        tau=tau,
        json_output=json_output,
        strict=strict,
        verbose=verbose,
    )
    ctx.obj = config
    command_ctx_var.set(
        CommandContextVar(run_id=str(uuid4()), command=ctx.invoked_subcommand or "")
    )
    if verbose:
        logger.setLevel(min(logger.getEffectiveLevel(), logging.INFO))
        logger.info("Effective configuration", extra=config.model_dump(mode="json"))


# Codebooks
@cli.group("codebook")
def codebook_group() -> None:
    """Create and inspect symbol codebooks."""


@codebook_group.command("create")
@click.option("--kind", type=click.Choice([k.value for k in CodebookKind]), default=CodebookKind.ACTION.value)
@click.option("--names", required=True, help="Comma-separated symbol names.")
@click.option("--out", type=_output_file, required=True)
@click.pass_obj
def codebook_create(config: CliConfig, kind: str, names: str, out: Path) -> None:
    codebook = Codebook(CodebookKind(kind), config.seed, config.dimension, _split_names(names))
    save_codebook(codebook, out)
    _emit(
        config,
        {"path": str(out), "kind": kind, "size": len(codebook)},
        f"{out}: {len(codebook)} {kind} symbols",
    )


@codebook_group.command("show")
@click.argument("path", type=_existing_file)
@click.pass_obj
def codebook_show(config: CliConfig, path: Path) -> None:
    codebook = load_codebook(path)
    _emit(
        config,
        codebook.to_file().model_dump(mode="json"),
        "\n".join(
            [
                f"kind={codebook.kind.value} dimension={codebook.dimension} seed={codebook.seed}",
                *codebook.names,
            ]
        ),
    )


# Sequence models
@cli.command("train")
@click.option("--log", "log_path", type=_existing_file, required=True, help="JSON-lines action log.")
@click.option("--model", "model_path", type=_output_file, default=None, help="Model file (env HDV_MODEL_PATH).")
@click.option("--n", "window", type=click.IntRange(min=2), default=None, help="Window length (env HDV_N).")
@click.option("--codebook", "codebook_path", type=_existing_file, default=None, help="Action codebook to start from.")
@click.option("--append", is_flag=True, help="Merge into the model already stored at --model.")
@click.pass_obj
def train_command(
    config: CliConfig,
    log_path: Path,
    model_path: Path | None,
    window: int | None,
    codebook_path: Path | None,
    append: bool,
) -> None:
    model_path = model_path or config.model_path
    existing = behavior.load_model(model_path) if append and model_path.exists() else None

    if existing is not None:
        if window is not None and window != existing.n:
            raise IncompatibleArtifactsError(
                f"--n {window} does not match the stored model's n={existing.n}"
            )
        n = existing.n
        codebook = Codebook(CodebookKind.ACTION, existing.seed, existing.dimension)
    else:
        n = window if window is not None else config.n
        codebook = Codebook(CodebookKind.ACTION, config.seed, config.dimension)
    if codebook_path is not None:
        loaded = load_codebook(codebook_path)
        if loaded.kind is not CodebookKind.ACTION:
            raise click.BadParameter("expected an action codebook", param_hint="--codebook")
        codebook.check_compatible(loaded)
        for name in loaded:
            codebook.register(name)

    model = behavior.train(behavior.read_action_log(log_path), n, codebook)
    if existing is not None:
        model = behavior.merge(existing, model)
    behavior.save_model(model, model_path)
    _emit(
        config,
        {
            "model": str(model_path),
            "n": model.n,
            "windows_trained": model.windows_trained,
            "actions": len(model.codebook),
            "dimension": model.dimension,
            "seed": str(model.seed),
        },
        f"{model_path}: {model.windows_trained} windows, {len(model.codebook)} actions, n={model.n}",
    )


@cli.command("predict")
@click.option("--model", "model_path", type=_existing_file, default=None)
@click.option("--prefix", required=True, help="Comma-separated n-1 preceding actions.")
@click.option("--raw", is_flag=True, help="Query the raw accumulator sums instead of the normalized bundle.")
@click.pass_context
def predict_command(ctx: click.Context, model_path: Path | None, prefix: str, raw: bool) -> None:
    config: CliConfig = ctx.obj
    model = behavior.load_model(model_path or config.model_path)
    result = behavior.predict(
        model, _split_names(prefix), config.tau_for(model.dimension), raw=raw
    )
    _emit(config, result.model_dump(), _format_result(result))
    _exit_if_doubtful(ctx, result.confident)


@cli.command("eval")
@click.option("--model", "model_path", type=_existing_file, default=None)
@click.option("--log", "log_path", type=_existing_file, required=True)
@click.pass_obj
def eval_command(config: CliConfig, model_path: Path | None, log_path: Path) -> None:
    model = behavior.load_model(model_path or config.model_path)
    sessions = behavior.group_sessions(behavior.read_action_log(log_path))
    windows = [
        window
        for actions in sessions.values()
        for window in behavior.sliding_windows(actions, model.n)
    ]
    row = harness.evaluate(model, windows)
    _emit(
        config,
        {**row.model_dump(), "evaluated_windows": len(windows)},
        f"accuracy={row.accuracy:.6f}\tmean_match_score={row.mean_match_score:.6f}\t"
        f"mean_top_distractor_score={row.mean_top_distractor_score:.6f}\twindows={len(windows)}",
    )


@cli.command("merge")
@click.argument("models", nargs=-1, required=True, type=_existing_file)
@click.option("--out", type=_output_file, required=True)
@click.pass_obj
def merge_command(config: CliConfig, models: tuple[Path, ...], out: Path) -> None:
    merged = functools.reduce(behavior.merge, (behavior.load_model(p) for p in models))
    behavior.save_model(merged, out)
    _emit(
        config,
        {"model": str(out), "windows_trained": merged.windows_trained, "merged": len(models)},
        f"{out}: {merged.windows_trained} windows from {len(models)} models",
    )


@cli.command("synth")
@click.option("--out", type=_output_file, required=True, help="Destination JSON-lines log.")
@click.option("--sessions", type=click.IntRange(min=1), default=10)
@click.option("--length", type=click.IntRange(min=1), default=50)
@click.option("--alphabet-size", type=click.IntRange(min=1), default=20)
@click.option("--transitions", "transitions_path", type=_existing_file, default=None, help="JSON {alphabet, transitions}; uniform when omitted.")
@click.option("--generator-seed", type=str, default="0")
@click.pass_obj
def synth_command(
    config: CliConfig,
    out: Path,
    sessions: int,
    length: int,
    alphabet_size: int,
    transitions_path: Path | None,
    generator_seed: str,
) -> None:
    """Generate synthetic sessions from a Markov chain."""
    seed = parse_seed(generator_seed)
    if transitions_path is not None:
        generator = harness.load_transitions(transitions_path, seed)
    else:
        generator = harness.MarkovGenerator.uniform(harness.action_names(alphabet_size), seed)
    events = harness.generate_sessions(generator, sessions, length)
    behavior.write_action_log(events, out)
    _emit(config, {"log": str(out), "events": len(events)}, f"{out}: {len(events)} events")


@cli.command("sweep")
@click.option("--config", "config_path", type=_existing_file, required=True, help="Sweep grid JSON.")
@click.option("--out", type=_output_file, default=None, help="CSV destination; stdout when omitted.")
@click.pass_obj
def sweep_command(config: CliConfig, config_path: Path, out: Path | None) -> None:
    report = harness.sweep(harness.load_sweep_config(config_path))
    if out is None:
        click.echo(report.to_csv(), nl=False)
        return
    harness.save_report(report, out)
    _emit(config, {"report": str(out), "rows": len(report.rows)}, f"{out}: {len(report.rows)} rows")


# Style
def _load_style_pair(
    source_path: Path, target_path: Path
) -> tuple[style.StyleProfile, style.StyleProfile]:
    source_doc = load_profile_file(source_path)
    target_doc = load_profile_file(target_path)
    if (source_doc.seed, source_doc.dimension) != (target_doc.seed, target_doc.dimension):
        raise IncompatibleArtifactsError(f"{source_path} and {target_path} disagree on seed or dimension")
    attributes, values = style.style_codebooks(source_doc.seed, source_doc.dimension)
    return (
        style.StyleProfile.build(source_doc.pairs, attributes, values),
        style.StyleProfile.build(target_doc.pairs, attributes, values),
    )


@cli.group("style")
def style_group() -> None:
    """Infer, map and apply coding style profiles."""


@style_group.command("infer")
@click.argument("source", type=_existing_file)
@click.option("--out", type=_output_file, default=None, help="Write the inferred profile here.")
@click.pass_obj
def style_infer(config: CliConfig, source: Path, out: Path | None) -> None:
    attributes, values = style.style_codebooks(config.seed, config.dimension)
    profile = style.infer_style(source.read_text(encoding="utf-8"), attributes, values)
    if out is not None:
        save_profile(profile, out)
    _emit(
        config,
        {"pairs": [list(p) for p in profile.pairs]},
        "\n".join(f"{a}={v}" for a, v in profile.pairs),
    )


@style_group.command("profile")
@click.option("--pair", "pairs", multiple=True, required=True, help="ATTRIBUTE=VALUE, repeatable.")
@click.option("--out", type=_output_file, required=True)
@click.pass_obj
def style_profile(config: CliConfig, pairs: tuple[str, ...], out: Path) -> None:
    profile = style.build_profile(
        _parse_pairs(pairs), *style.style_codebooks(config.seed, config.dimension)
    )
    save_profile(profile, out)
    _emit(config, {"profile": str(out), "pairs": len(profile.pairs)}, f"{out}: {len(profile.pairs)} pairs")


@style_group.command("map")
@click.option("--from", "source_path", type=_existing_file, required=True, help="Model (source) style profile.")
@click.option("--to", "target_path", type=_existing_file, required=True, help="User (target) style profile.")
@click.pass_context
def style_map(ctx: click.Context, source_path: Path, target_path: Path) -> None:
    config: CliConfig = ctx.obj
    source, target = _load_style_pair(source_path, target_path)
    mapping = style.build_mapping(source, target, str(source_path), str(target_path))
    tau = config.tau_for(mapping.dimension)
    changes = []
    for attribute, value in source.pairs:
        outcome = style.translate_value(value, mapping, source.fillers, tau)
        changes.append(
            StyleChange(
                attribute=attribute,
                source_value=value,
                target_value=outcome.name,
                score=outcome.score,
                confident=outcome.confident,
            )
        )
    _emit(
        config,
        {"translations": [c.model_dump() for c in changes]},
        "\n".join(
            f"{c.attribute}: {c.source_value} -> {c.target_value}\tscore={c.score:.6f}\t"
            f"confident={'yes' if c.confident else 'no'}"
            for c in changes
        ),
    )
    _exit_if_doubtful(ctx, *(c.confident for c in changes))


@style_group.command("translate")
@click.option("--from", "source_path", type=_existing_file, required=True)
@click.option("--to", "target_path", type=_existing_file, required=True)
@click.option("--value", required=True, help="Style value to carry across the mapping.")
@click.pass_context
def style_translate(ctx: click.Context, source_path: Path, target_path: Path, value: str) -> None:
    config: CliConfig = ctx.obj
    source, target = _load_style_pair(source_path, target_path)
    mapping = style.build_mapping(source, target)
    result = style.translate_value(value, mapping, source.fillers, config.tau_for(mapping.dimension))
    _emit(config, result.model_dump(), _format_result(result))
    _exit_if_doubtful(ctx, result.confident)


@style_group.command("restyle")
@click.option("--from", "source_path", type=_existing_file, required=True)
@click.option("--to", "target_path", type=_existing_file, required=True)
@click.option("--out", type=_output_file, default=None, help="Write restyled text here; stdout when omitted.")
@click.argument("text_path", type=_existing_file)
@click.pass_context
def style_restyle(
    ctx: click.Context, source_path: Path, target_path: Path, out: Path | None, text_path: Path
) -> None:
    config: CliConfig = ctx.obj
    source, target = _load_style_pair(source_path, target_path)
    mapping = style.build_mapping(source, target)
    report = style.restyle(
        text_path.read_text(encoding="utf-8"),
        mapping,
        source.fillers,
        config.tau_for(mapping.dimension),
    )
    if out is not None:
        write_atomic(out, report.text)
    if config.json_output:
        click.echo(report.model_dump_json())
    elif out is None:
        click.echo(report.text, nl=False)
    for change in report.unresolved:
        click.echo(f"unresolved: {change.attribute}={change.source_value}", err=True)
    _exit_if_doubtful(ctx, not report.unresolved)


# Context
def _load_context(
    path: Path, roles: Codebook | None = None, fillers: Codebook | None = None
) -> context.ContextProfile:
    document = load_profile_file(path)
    if roles is None or fillers is None:
        roles, fillers = context.context_codebooks(document.seed, document.dimension)
    elif (roles.seed, roles.dimension) != (document.seed, document.dimension):
        raise IncompatibleArtifactsError(f"{path} disagrees on seed or dimension")
    return context.encode_context(document.pairs, roles, fillers)


@cli.group("context")
def context_group() -> None:
    """Encode, query, compare and map project contexts."""


@context_group.command("encode")
@click.option("--pair", "pairs", multiple=True, required=True, help="ROLE=FILLER, repeatable.")
@click.option("--out", type=_output_file, required=True)
@click.pass_obj
def context_encode(config: CliConfig, pairs: tuple[str, ...], out: Path) -> None:
    ctx_profile = context.encode_context(
        _parse_pairs(pairs), *context.context_codebooks(config.seed, config.dimension)
    )
    save_profile(ctx_profile, out)
    _emit(config, {"context": str(out), "pairs": len(ctx_profile.pairs)}, f"{out}: {len(ctx_profile.pairs)} pairs")


@context_group.command("query")
@click.option("--context", "context_path", type=_existing_file, required=True)
@click.option("--role", required=True)
@click.option("--fillers", default="", help="Extra comma-separated filler symbols to clean up against.")
@click.option("--roles", "extra_roles", default="", help="Extra comma-separated role symbols to register.")
@click.pass_context
def context_query(
    ctx: click.Context, context_path: Path, role: str, fillers: str, extra_roles: str
) -> None:
    config: CliConfig = ctx.obj
    ctx_profile = _load_context(context_path)
    for name in _split_names(fillers):
        ctx_profile.fillers.register(name)
    for name in _split_names(extra_roles):
        ctx_profile.roles.register(name)
    result = context.query_role(
        ctx_profile, role, ctx_profile.fillers, config.tau_for(ctx_profile.dimension)
    )
    _emit(config, result.model_dump(), _format_result(result))
    _exit_if_doubtful(ctx, result.confident)


@context_group.command("diff")
@click.argument("first", type=_existing_file)
@click.argument("second", type=_existing_file)
@click.pass_obj
def context_diff(config: CliConfig, first: Path, second: Path) -> None:
    a = _load_context(first)
    b = _load_context(second, a.roles, a.fillers)
    value = context.context_similarity(a, b)
    _emit(config, {"similarity": value}, f"similarity={value:.6f}")


@context_group.command("transition")
@click.option("--from", "source_path", type=_existing_file, required=True)
@click.option("--to", "target_path", type=_existing_file, required=True)
@click.pass_context
def context_transition(ctx: click.Context, source_path: Path, target_path: Path) -> None:
    config: CliConfig = ctx.obj
    source = _load_context(source_path)
    target = _load_context(target_path, source.roles, source.fillers)
    map_vector = context.transition_map(source, target)
    restored = similarity(context.apply_transition(map_vector, source), target.vector())
    tau = config.tau_for(source.dimension)
    rows = []
    for role, filler in source.pairs:
        outcome = context.translate_filler(filler, map_vector, source.fillers, target.fillers, tau)
        rows.append({"role": role, "source": filler, **outcome.model_dump()})
    _emit(
        config,
        {"restored_similarity": restored, "translations": rows},
        "\n".join(
            [
                f"restored_similarity={restored:.6f}",
                *(
                    f"{r['role']}: {r['source']} -> {r['name']}\tscore={r['score']:.6f}\t"
                    f"confident={'yes' if r['confident'] else 'no'}"
                    for r in rows
                ),
            ]
        ),
    )
    _exit_if_doubtful(ctx, *(r["confident"] for r in rows))


def run(argv: Sequence[str] | None = None) -> int:
    """Invoke the CLI and map outcomes onto exit statuses."""
    try:
        status = cli.main(
            args=list(argv) if argv is not None else None,
            prog_name="hdv",
            standalone_mode=False,
        )
    except click.UsageError as e:
        e.show()
        return EXIT_USAGE
    except click.ClickException as e:
        e.show()
        return EXIT_DATA
    except click.Abort:
        return EXIT_USAGE
    except HDVError as e:
        logger.error("Command failed", extra={"error": str(e), "error_type": type(e).__name__})
        click.echo(f"Error: {e}", err=True)
        return e.exit_code
    except (ValidationError, OSError, ValueError) as e:
        logger.error("Command failed", extra={"error": str(e), "error_type": type(e).__name__})
        click.echo(f"Error: {e}", err=True)
        return EXIT_DATA
    return status if isinstance(status, int) else EXIT_OK

"""Next-action prediction from IDE action logs.

Windows of n actions are encoded as P^(n-1)(a1) * ... * P^0(an), bundled into
a user-behavior accumulator, and queried by unbinding a rotated prefix.
"""

from __future__ import annotations

import base64
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
from pydantic import ValidationError

from hdc.core import (
    DEFAULT_WINDOW,
    Accumulator,
    Hypervector,
    bind,
    identity,
    normalize,
    permute,
)
from hdc.item_memory import Codebook, cleanup, cleanup_raw
from hdc.schemas import (
    ActionEvent,
    ActionLogError,
    ArtifactFormatError,
    CleanupResult,
    CodebookKind,
    IncompatibleArtifactsError,
    InsufficientDataError,
    ModelFile,
    PrefixLengthError,
    UntrainedModelError,
)
from utils.files import write_atomic
from utils.logger import get_logger

logger = get_logger()


@dataclass(eq=False)
class SequenceModel:
    n: int
    behavior: Accumulator
    codebook: Codebook

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError("window length n must be at least 2")
        if self.behavior.dimension != self.codebook.dimension:
            raise IncompatibleArtifactsError(
                "Behavior accumulator and codebook differ in dimension"
            )

    @classmethod
    def empty(cls, codebook: Codebook, n: int = DEFAULT_WINDOW) -> SequenceModel:
        return cls(n, Accumulator.zeros(codebook.dimension), codebook)

    @property
    def windows_trained(self) -> int:
        return self.behavior.count

    @property
    def seed(self) -> int:
        return self.codebook.seed

    @property
    def dimension(self) -> int:
        return self.codebook.dimension

    def user_behavior(self) -> Hypervector:
        if not self.windows_trained:
            raise UntrainedModelError("Model has no trained windows")
        return normalize(self.behavior, self.seed)

    def fold(self, actions: Sequence[str]) -> int:
        """Add every window of one session; unknown actions are registered."""
        for action in actions:
            self.codebook.register(action)
        added = 0
        for window in sliding_windows(actions, self.n):
            self.behavior.add(encode_window(window, self.codebook))
            added += 1
        return added


def sliding_windows(actions: Sequence[str], n: int) -> list[tuple[str, ...]]:
    return [tuple(actions[i : i + n]) for i in range(len(actions) - n + 1)]


def encode_window(actions: Sequence[str], codebook: Codebook) -> Hypervector:
    """Bind of permute(v_i, n - 1 - i); the last action sits at P^0."""
    if not actions:
        raise ValueError("Cannot encode an empty window")
    n = len(actions)
    result = identity(codebook.dimension)
    for i, action in enumerate(actions):
        result = bind(result, permute(codebook.vector(action), n - 1 - i))
    return result


def group_sessions(events: Iterable[ActionEvent]) -> dict[str, list[str]]:
    """Actions per session ordered by timestamp, ties by input order."""
    grouped: dict[str, list[ActionEvent]] = {}
    for event in events:
        grouped.setdefault(event.session, []).append(event)
    return {
        session: [e.action for e in sorted(evs, key=lambda e: e.timestamp)]
        for session, evs in grouped.items()
    }


def train_sequences(
    sessions: Mapping[str, Sequence[str]],
    n: int,
    codebook: Codebook,
    model: SequenceModel | None = None,
) -> SequenceModel:
    if model is None:
        model = SequenceModel.empty(codebook, n)
    qualified = 0
    for session, actions in sessions.items():
        if len(actions) < n:
            logger.warning(
                "Session shorter than window, skipped",
                extra={"session": session, "events": len(actions), "n": n},
            )
            continue
        model.fold(actions)
        qualified += 1
    if not qualified:
        raise InsufficientDataError(f"No session has at least n={n} events")
    logger.info(
        "Model trained",
        extra={"sessions": qualified, "windows_trained": model.windows_trained},
    )
    return model


def train(
    events: Iterable[ActionEvent], n: int, codebook: Codebook
) -> SequenceModel:
    """Fold every session of `events` into one behavior accumulator."""
    return train_sequences(group_sessions(events), n, codebook)


def _prefix_query(model: SequenceModel, prefix: Sequence[str]) -> Hypervector:
    if len(prefix) != model.n - 1:
        raise PrefixLengthError(
            f"Expected {model.n - 1} prefix actions, got {len(prefix)}"
        )
    # one extra rotation lifts every prefix position, leaving the successor at P^0
    return permute(encode_window(prefix, model.codebook), 1)


def prediction_vector(model: SequenceModel, prefix: Sequence[str]) -> Hypervector:
    query = _prefix_query(model, prefix)
    return bind(model.user_behavior(), query)


def predict(
    model: SequenceModel,
    prefix: Sequence[str],
    tau: float | None = None,
    *,
    raw: bool = False,
) -> CleanupResult:
    """Most similar action to the unbound behavior vector.

    With `raw` the query is the unbound integer sums instead of the
    normalized bundle, scored by cosine.
    """
    if raw:
        query = _prefix_query(model, prefix)
        if not model.windows_trained:
            raise UntrainedModelError("Model has no trained windows")
        return cleanup_raw(model.codebook, model.behavior.bind(query).sums, tau)
    return cleanup(model.codebook, prediction_vector(model, prefix), tau)


def merge(a: SequenceModel, b: SequenceModel) -> SequenceModel:
    if a.n != b.n:
        raise IncompatibleArtifactsError(f"Window lengths differ: {a.n} != {b.n}")
    a.codebook.check_compatible(b.codebook)
    codebook = Codebook(
        CodebookKind.ACTION, a.seed, a.dimension, [*a.codebook, *b.codebook]
    )
    return SequenceModel(a.n, a.behavior.merge(b.behavior), codebook)


def parse_action_log(lines: Iterable[str]) -> list[ActionEvent]:
    events: list[ActionEvent] = []
    problems: list[tuple[int, str]] = []
    for number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            payload = json.loads(line)
        except json.JSONDecodeError as e:
            problems.append((number, f"invalid JSON ({e.msg})"))
            continue
        if not isinstance(payload, dict):
            problems.append((number, "event must be a JSON object"))
            continue
        missing = [key for key in ("ts", "session", "action") if key not in payload]
        if missing:
            problems.append((number, f"missing field(s) {', '.join(missing)}"))
            continue
        try:
            events.append(ActionEvent.model_validate(payload))
        except ValidationError as e:
            fields = ", ".join(str(err["loc"][0]) for err in e.errors())
            problems.append((number, f"invalid field(s) {fields}"))
    if problems:
        raise ActionLogError(problems)
    return events


def read_action_log(path: Path) -> list[ActionEvent]:
    with open(path, "r", encoding="utf-8") as f:
        events = parse_action_log(f)
    logger.info("Action log read", extra={"path": str(path), "events": len(events)})
    return events


def write_action_log(events: Iterable[ActionEvent], path: Path) -> None:
    text = "".join(e.model_dump_json(by_alias=True) + "\n" for e in events)
    write_atomic(Path(path), text)


def _encode_sums(acc: Accumulator) -> str:
    return base64.b64encode(acc.sums.astype("<i4").tobytes()).decode("ascii")


def _decode_sums(text: str, dimension: int) -> np.ndarray:
    raw = base64.b64decode(text, validate=True)
    sums = np.frombuffer(raw, dtype="<i4").astype(np.int32)
    if sums.size != dimension:
        raise ArtifactFormatError(
            f"sums hold {sums.size} components, expected {dimension}"
        )
    return sums


def to_file(model: SequenceModel) -> ModelFile:
    return ModelFile(
        n=model.n,
        dimension=model.dimension,
        seed=model.seed,
        windows_trained=model.windows_trained,
        codebook=list(model.codebook),
        sums=_encode_sums(model.behavior),
    )


def from_file(document: ModelFile) -> SequenceModel:
    try:
        sums = _decode_sums(document.sums, document.dimension)
        behavior = Accumulator(sums, document.windows_trained)
        behavior.check_invariants()
    except (ValueError, TypeError) as e:
        raise ArtifactFormatError(f"Corrupt behavior accumulator: {e}") from e
    codebook = Codebook(
        CodebookKind.ACTION, document.seed, document.dimension, document.codebook
    )
    return SequenceModel(document.n, behavior, codebook)


def save_model(model: SequenceModel, path: Path) -> None:
    write_atomic(Path(path), to_file(model).model_dump_json(indent=2) + "\n")


def load_model(path: Path) -> SequenceModel:
    try:
        document = ModelFile.model_validate_json(Path(path).read_text(encoding="utf-8"))
    except ValidationError as e:
        raise ArtifactFormatError(f"Malformed model file {path}: {e}") from e
    model = from_file(document)
    logger.info(
        "Model loaded",
        extra={"path": str(path), "n": model.n, "windows_trained": model.windows_trained},
    )
    return model

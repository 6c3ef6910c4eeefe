"""Synthetic action workloads and capacity / noise sweeps of sequence models."""

from __future__ import annotations

import csv
import io
import itertools
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
import numpy.typing as npt
from pydantic import ValidationError

from hdc.behavior import SequenceModel, encode_window, prediction_vector
from hdc.core import flip_components
from hdc.item_memory import Codebook, best_match, scores
from hdc.schemas import (
    ActionEvent,
    CodebookKind,
    IncompatibleArtifactsError,
    InsufficientDataError,
    InvalidTransitionMatrixError,
    SweepConfig,
    SweepConfigError,
    SweepRow,
)
from utils.files import write_atomic
from utils.logger import get_logger

logger = get_logger()

START_TIMESTAMP_MS = 1_700_000_000_000
SESSION_SPACING_MS = 86_400_000
MAX_STEP_MS = 5_000

CSV_COLUMNS = [
    "dimension",
    "alphabet_size",
    "windows",
    "noise",
    "trials",
    "accuracy",
    "mean_match_score",
    "mean_top_distractor_score",
]


def action_names(count: int) -> list[str]:
    return [f"action-{i:04d}" for i in range(count)]


@dataclass(frozen=True, eq=False)
class MarkovGenerator:
    alphabet: tuple[str, ...]
    transitions: npt.NDArray[np.float64]
    seed: int

    def __post_init__(self) -> None:
        matrix = np.asarray(self.transitions, dtype=np.float64)
        size = len(self.alphabet)
        if size == 0:
            raise InvalidTransitionMatrixError("Alphabet must not be empty")
        if matrix.shape != (size, size):
            raise InvalidTransitionMatrixError(
                f"Transition matrix shape {matrix.shape} does not match alphabet of {size}"
            )
        if np.any(matrix < 0) or not np.all(np.isfinite(matrix)):
            raise InvalidTransitionMatrixError("Transition probabilities must be finite and non-negative")
        if np.any(np.abs(matrix.sum(axis=1) - 1.0) > 1e-9):
            raise InvalidTransitionMatrixError("Every row must sum to 1")
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "transitions", matrix)

    @classmethod
    def uniform(cls, alphabet: Sequence[str], seed: int) -> MarkovGenerator:
        size = len(alphabet)
        return cls(tuple(alphabet), np.full((size, size), 1.0 / size), seed)

    @classmethod
    def identity(cls, alphabet: Sequence[str], seed: int) -> MarkovGenerator:
        return cls(tuple(alphabet), np.eye(len(alphabet)), seed)


def generate_sessions(
    generator: MarkovGenerator, sessions: int, length: int
) -> list[ActionEvent]:
    """Deterministic event stream; timestamps strictly increase within a session."""
    if sessions < 1 or length < 1:
        raise InsufficientDataError("Session count and length must be at least 1")
    rng = np.random.default_rng(generator.seed)
    cumulative = np.cumsum(generator.transitions, axis=1)
    last = len(generator.alphabet) - 1
    events: list[ActionEvent] = []
    for s in range(sessions):
        state = int(rng.integers(len(generator.alphabet)))
        timestamp = START_TIMESTAMP_MS + s * SESSION_SPACING_MS
        for step in range(length):
            if step:
                draw = rng.random()
                state = min(int(np.searchsorted(cumulative[state], draw, side="right")), last)
            timestamp += int(rng.integers(1, MAX_STEP_MS + 1))
            events.append(
                ActionEvent(
                    timestamp=timestamp,
                    session=f"session-{s:04d}",
                    action=generator.alphabet[state],
                )
            )
    return events


@dataclass
class _Tally:
    hits: int = 0
    queries: int = 0
    match_total: float = 0.0
    distractor_total: float = 0.0

    def row(self, **cell: int | float) -> SweepRow:
        return SweepRow(
            accuracy=self.hits / self.queries,
            mean_match_score=self.match_total / self.queries,
            mean_top_distractor_score=self.distractor_total / self.queries,
            **cell,  # type: ignore[arg-type]
        )


def _score_windows(
    model: SequenceModel, windows: Sequence[tuple[str, ...]], tally: _Tally
) -> None:
    names = model.codebook.names
    index = {name: i for i, name in enumerate(names)}
    for window in windows:
        values = scores(model.codebook, prediction_vector(model, window[:-1]))
        truth = index[window[-1]]
        predicted, _ = best_match(names, values)
        tally.hits += int(predicted == truth)
        tally.queries += 1
        tally.match_total += float(values[truth])
        tally.distractor_total += (
            float(np.max(np.delete(values, truth))) if len(values) > 1 else -1.0
        )


def evaluate(model: SequenceModel, windows: Sequence[Sequence[str]]) -> SweepRow:
    """Accuracy of predicting each window's last action from its prefix."""
    usable: list[tuple[str, ...]] = []
    skipped = 0
    for window in windows:
        if len(window) != model.n:
            raise IncompatibleArtifactsError(
                f"Window of length {len(window)} does not match model n={model.n}"
            )
        if all(action in model.codebook for action in window):
            usable.append(tuple(window))
        else:
            skipped += 1
    if skipped:
        logger.warning("Windows with unknown actions skipped", extra={"skipped": skipped})
    if not usable:
        raise InsufficientDataError("No evaluable window")

    tally = _Tally()
    _score_windows(model, usable, tally)
    return tally.row(
        dimension=model.dimension,
        alphabet_size=len(model.codebook),
        windows=model.windows_trained,
        noise=0.0,
        trials=1,
    )


def _run_trial(
    config: SweepConfig,
    dimension: int,
    alphabet_size: int,
    windows: int,
    noise: float,
    trial: int,
    tally: _Tally,
) -> None:
    sequence = np.random.SeedSequence(
        [config.seed, dimension, alphabet_size, windows, round(noise * 1_000_000), trial]
    )
    codebook_sequence, rng_sequence = sequence.spawn(2)
    codebook_seed = int(codebook_sequence.generate_state(1, dtype=np.uint64)[0])
    rng = np.random.default_rng(rng_sequence)

    names = action_names(alphabet_size)
    codebook = Codebook(CodebookKind.ACTION, codebook_seed, dimension, names)
    model = SequenceModel.empty(codebook, config.n)

    prefix_length = config.n - 1
    codes = rng.choice(alphabet_size**prefix_length, size=windows, replace=False)
    successors = rng.integers(alphabet_size, size=windows)
    stored: list[tuple[str, ...]] = []
    for code, successor in zip(codes, successors):
        digits = []
        code = int(code)
        for _ in range(prefix_length):
            code, digit = divmod(code, alphabet_size)
            digits.append(names[digit])
        window = (*reversed(digits), names[int(successor)])
        encoded = encode_window(window, codebook)
        if noise:
            encoded = flip_components(encoded, noise, rng)
        model.behavior.add(encoded)
        stored.append(window)

    _score_windows(model, stored, tally)


def _run_cell(config: SweepConfig, cell: tuple[int, int, int, float]) -> SweepRow:
    dimension, alphabet_size, windows, noise = cell
    tally = _Tally()
    for trial in range(config.trials):
        _run_trial(config, dimension, alphabet_size, windows, noise, trial, tally)
    row = tally.row(
        dimension=dimension,
        alphabet_size=alphabet_size,
        windows=windows,
        noise=noise,
        trials=config.trials,
    )
    logger.info("Sweep cell complete", extra=row.model_dump())
    return row


@dataclass
class SweepReport:
    config: SweepConfig
    rows: list[SweepRow]

    def to_csv(self) -> str:
        buffer = io.StringIO()
        buffer.write(f"# config: {self.config.model_dump_json()}\n")
        buffer.write(f"# seed: {self.config.seed}\n")
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in self.rows:
            writer.writerow(
                [
                    row.dimension,
                    row.alphabet_size,
                    row.windows,
                    f"{row.noise:.6f}",
                    row.trials,
                    f"{row.accuracy:.6f}",
                    f"{row.mean_match_score:.6f}",
                    f"{row.mean_top_distractor_score:.6f}",
                ]
            )
        return buffer.getvalue()


def sweep(config: SweepConfig) -> SweepReport:
    """Full-factorial evaluation over (D, alphabet size, K, noise)."""
    cells = list(
        itertools.product(
            config.dimensions, config.alphabet_sizes, config.windows, config.noise
        )
    )
    logger.info("Sweep started", extra={"cells": len(cells), "workers": config.workers})
    # map() yields in submission order, so rows never depend on completion order
    with ThreadPoolExecutor(max_workers=config.workers) as executor:
        rows = list(executor.map(lambda cell: _run_cell(config, cell), cells))
    return SweepReport(config, rows)


def load_sweep_config(path: Path) -> SweepConfig:
    try:
        return SweepConfig.model_validate_json(Path(path).read_text(encoding="utf-8"))
    except ValidationError as e:
        raise SweepConfigError(f"Invalid sweep config {path}: {e}") from e


def save_report(report: SweepReport, path: Path) -> None:
    write_atomic(Path(path), report.to_csv())


def load_transitions(path: Path, seed: int) -> MarkovGenerator:
    """Generator from a JSON document {"alphabet": [...], "transitions": [[...]]}."""
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        return MarkovGenerator(
            tuple(payload["alphabet"]), np.array(payload["transitions"]), seed
        )
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
        raise InvalidTransitionMatrixError(f"Invalid transition file {path}: {e}") from e

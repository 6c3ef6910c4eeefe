import csv
import io
import json
import math
from collections import Counter

import numpy as np
import pytest
from pydantic import ValidationError

from hdc.behavior import SequenceModel, group_sessions, sliding_windows, train, train_sequences
from hdc.harness import (
    CSV_COLUMNS,
    MarkovGenerator,
    action_names,
    evaluate,
    generate_sessions,
    load_sweep_config,
    load_transitions,
    save_report,
    sweep,
)
from hdc.item_memory import Codebook
from hdc.schemas import (
    CodebookKind,
    IncompatibleArtifactsError,
    InsufficientDataError,
    InvalidTransitionMatrixError,
    SweepConfig,
    SweepConfigError,
)


def parse_report(text: str) -> tuple[list[str], list[dict[str, str]]]:
    header = [line for line in text.splitlines() if line.startswith("#")]
    body = "\n".join(line for line in text.splitlines() if not line.startswith("#"))
    return header, list(csv.DictReader(io.StringIO(body)))


def distinct_trigrams(seed: int, count: int, size: int = 20) -> list[tuple[str, str, str]]:
    alphabet = action_names(size)
    rng = np.random.default_rng(seed)
    prefixes = rng.choice(size * size, size=count, replace=False)
    return [
        (alphabet[int(p) // size], alphabet[int(p) % size], alphabet[int(s)])
        for p, s in zip(prefixes, rng.integers(size, size=count))
    ]


def trained_on(windows: list[tuple[str, str, str]], seed: int, dimension: int) -> SequenceModel:
    codebook = Codebook(CodebookKind.ACTION, seed, dimension, action_names(20))
    return train_sequences({f"w{i}": list(w) for i, w in enumerate(windows)}, 3, codebook)


class TestGenerator:
    def test_rejects_bad_matrices(self):
        with pytest.raises(InvalidTransitionMatrixError):
            MarkovGenerator(("a", "b"), np.array([[0.5, 0.6], [0.5, 0.5]]), 0)
        with pytest.raises(InvalidTransitionMatrixError):
            MarkovGenerator(("a", "b"), np.array([[1.0, 0.0]]), 0)
        with pytest.raises(InvalidTransitionMatrixError):
            MarkovGenerator(("a", "b"), np.array([[1.5, -0.5], [0.5, 0.5]]), 0)
        with pytest.raises(InvalidTransitionMatrixError):
            MarkovGenerator((), np.zeros((0, 0)), 0)

    def test_deterministic_sessions(self):
        generator = MarkovGenerator.uniform(action_names(5), 42)
        first = generate_sessions(generator, 3, 20)
        assert first == generate_sessions(generator, 3, 20)
        assert first != generate_sessions(MarkovGenerator.uniform(action_names(5), 43), 3, 20)

    def test_timestamps_increase_within_session(self):
        events = generate_sessions(MarkovGenerator.uniform(action_names(4), 1), 4, 30)
        for session in {e.session for e in events}:
            stamps = [e.timestamp for e in events if e.session == session]
            assert stamps == sorted(stamps)
            assert len(set(stamps)) == len(stamps)

    def test_identity_chain_repeats_action(self):
        events = generate_sessions(MarkovGenerator.identity(action_names(6), 9), 2, 10)
        for actions in group_sessions(events).values():
            assert len(set(actions)) == 1

    def test_rejects_empty_request(self):
        with pytest.raises(InsufficientDataError):
            generate_sessions(MarkovGenerator.uniform(["a"], 0), 0, 5)

    def test_load_transitions(self, tmp_path):
        path = tmp_path / "chain.json"
        path.write_text(json.dumps({"alphabet": ["a", "b"], "transitions": [[0, 1], [1, 0]]}))
        generator = load_transitions(path, 3)
        assert generator.alphabet == ("a", "b")
        path.write_text(json.dumps({"alphabet": ["a", "b"]}))
        with pytest.raises(InvalidTransitionMatrixError):
            load_transitions(path, 3)

    def test_uniform_chain_frequencies(self):
        alphabet = action_names(20)
        events = generate_sessions(MarkovGenerator.uniform(alphabet, 17), 1, 100_000)
        counts = Counter(e.action for e in events)
        for action in alphabet:
            assert counts[action] / len(events) == pytest.approx(0.05, abs=0.02)


class TestEvaluate:
    def test_perfect_on_deterministic_cycle(self):
        alphabet = action_names(6)
        generator = MarkovGenerator(tuple(alphabet), np.roll(np.eye(6), 1, axis=1), 4)
        events = generate_sessions(generator, 3, 15)
        model = train(events, 3, Codebook(CodebookKind.ACTION, 4, 10_000))
        windows = [w for a in group_sessions(events).values() for w in sliding_windows(a, 3)]
        row = evaluate(model, windows)
        assert row.accuracy == 1.0
        assert row.mean_match_score > row.mean_top_distractor_score

    def test_skips_unknown_actions(self, commit_events, action_codebook):
        model = train(commit_events, 3, action_codebook)
        row = evaluate(model, [("OpenFile", "RunTest", "Commit"), ("OpenFile", "RunTest", "Deploy")])
        assert row.accuracy == 1.0
        with pytest.raises(InsufficientDataError):
            evaluate(model, [("Lint", "RunTest", "Commit")])

    def test_window_length_mismatch(self, commit_events, action_codebook):
        model = train(commit_events, 3, action_codebook)
        with pytest.raises(IncompatibleArtifactsError):
            evaluate(model, [("OpenFile", "RunTest")])

    def test_accuracy_grows_with_dimension(self):
        accuracy: dict[int, list[float]] = {64: [], 256: [], 10_000: []}
        for seed in range(30):
            windows = distinct_trigrams(seed, 50)
            for dimension, scores in accuracy.items():
                scores.append(evaluate(trained_on(windows, seed, dimension), windows).accuracy)
        assert min(accuracy[10_000]) >= 0.95
        assert np.mean(accuracy[10_000]) >= np.mean(accuracy[256])
        assert np.mean(accuracy[64]) < np.mean(accuracy[10_000])

    @pytest.mark.parametrize("stored", [10, 50, 100])
    def test_match_score_shrinks_with_load(self, stored):
        means = []
        for seed in range(5):
            windows = distinct_trigrams(seed, stored)
            means.append(evaluate(trained_on(windows, seed, 10_000), windows).mean_match_score)
        assert np.mean(means) == pytest.approx(math.sqrt(2 / (math.pi * stored)), rel=0.3)


class TestSweep:
    def test_config_validation(self):
        with pytest.raises(ValidationError):
            SweepConfig(dimensions=[1000], alphabet_sizes=[3], windows=[10], n=3)
        with pytest.raises(ValidationError):
            SweepConfig(dimensions=[1000], alphabet_sizes=[5], windows=[5], noise=[1.0])
        with pytest.raises(ValidationError):
            SweepConfig(dimensions=[1], alphabet_sizes=[5], windows=[5])

    def test_load_config_errors(self, tmp_path):
        path = tmp_path / "sweep.json"
        path.write_text('{"dimensions": []}')
        with pytest.raises(SweepConfigError):
            load_sweep_config(path)

    def test_report_is_reproducible_across_workers(self):
        config = SweepConfig(
            dimensions=[256, 2048],
            alphabet_sizes=[8],
            windows=[4, 16],
            noise=[0.0, 0.2],
            trials=2,
            seed=99,
        )
        serial = sweep(config).to_csv()
        parallel = sweep(config.model_copy(update={"workers": 4})).to_csv()
        header, rows = parse_report(serial)
        assert len(rows) == 8
        assert list(rows[0].keys()) == CSV_COLUMNS
        assert header[1] == "# seed: 99"
        assert serial.replace('"workers":1', "") == parallel.replace('"workers":4', "")

    def test_accuracy_degrades_with_load(self):
        config = SweepConfig(
            dimensions=[10_000], alphabet_sizes=[20], windows=[1, 50, 400], trials=3, seed=1
        )
        rows = sweep(config).rows
        assert rows[0].accuracy == 1.0
        assert rows[0].mean_match_score == 1.0
        assert rows[1].accuracy >= 0.95
        assert rows[2].mean_match_score < rows[1].mean_match_score

    def test_save_report(self, tmp_path):
        config = SweepConfig(dimensions=[128], alphabet_sizes=[4], windows=[2], trials=1)
        path = tmp_path / "out" / "report.csv"
        save_report(sweep(config), path)
        header, rows = parse_report(path.read_text())
        assert header[0].startswith("# config: ")
        assert json.loads(header[0].removeprefix("# config: "))["dimensions"] == [128]
        assert rows[0]["dimension"] == "128"
        assert rows[0]["noise"] == "0.000000"

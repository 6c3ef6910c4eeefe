import hypothesis
import numpy as np
import pytest

from hdc.item_memory import Codebook
from hdc.schemas import ActionEvent, CodebookKind

np.seterr(all="warn")

hypothesis.settings.register_profile("default", max_examples=50, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=5, deadline=None)
hypothesis.settings.register_profile("debugger", report_multiple_bugs=False, deadline=None)
hypothesis.settings.load_profile("default")

COMMIT_ACTIONS = ["OpenFile", "RunTest", "Commit"]


@pytest.fixture
def action_codebook() -> Codebook:
    return Codebook(CodebookKind.ACTION, seed=7, dimension=10_000)


@pytest.fixture
def commit_events() -> list[ActionEvent]:
    return [
        ActionEvent(timestamp=1000 + i, session="s1", action=action)
        for i, action in enumerate(COMMIT_ACTIONS)
    ]


@pytest.fixture
def commit_log(tmp_path, commit_events):
    path = tmp_path / "actions.jsonl"
    path.write_text(
        "".join(e.model_dump_json(by_alias=True) + "\n" for e in commit_events),
        encoding="utf-8",
    )
    return path

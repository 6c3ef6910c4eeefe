from pathlib import Path

import pytest

from hdc.item_memory import Codebook
from hdc.schemas import (
    CodebookKind,
    DuplicateRoleError,
    EmptyProfileError,
    IncompatibleArtifactsError,
)
from hdc.style import (
    CAMEL_CASE,
    INDENTATION,
    KEBAB_CASE,
    NAME_FORMAT,
    PASCAL_CASE,
    SCREAMING_SNAKE,
    SNAKE_CASE,
    SPACES_2,
    SPACES_4,
    TABS,
    build_mapping,
    build_profile,
    classify_identifier,
    detect_style,
    identifiers,
    identity_mapping,
    infer_style,
    recase,
    recase_text,
    reindent,
    restyle,
    split_words,
    style_codebooks,
    translate_value,
)

FIXTURES = Path(__file__).parent / "fixtures"

USER_STYLE = [(NAME_FORMAT, CAMEL_CASE), (INDENTATION, SPACES_4)]
MODEL_STYLE = [(NAME_FORMAT, SNAKE_CASE), (INDENTATION, TABS)]


def snake_to_camel_mapping(seed: int = 0, dimension: int = 10_000):
    attributes, values = style_codebooks(seed, dimension)
    model = build_profile(MODEL_STYLE, attributes, values)
    user = build_profile(USER_STYLE, attributes, values)
    return build_mapping(model, user), values


class TestIdentifiers:
    @pytest.mark.parametrize(
        "identifier, words",
        [
            ("parseHTTPResponse", ["parse", "HTTP", "Response"]),
            ("item_count", ["item", "count"]),
            ("MAX_SIZE", ["MAX", "SIZE"]),
            ("user-id", ["user", "id"]),
            ("Vector3D", ["Vector3", "D"]),
        ],
    )
    def test_split_words(self, identifier, words):
        assert split_words(identifier) == words

    @pytest.mark.parametrize(
        "identifier, expected",
        [
            ("itemCount", CAMEL_CASE),
            ("StockLedger", PASCAL_CASE),
            ("item_count", SNAKE_CASE),
            ("_private_name", SNAKE_CASE),
            ("MAX_SIZE", SCREAMING_SNAKE),
            ("user-id", KEBAB_CASE),
            ("value", None),
            ("Ledger", None),
            ("X", None),
            ("__init__", None),
            ("Mixed_case", None),
        ],
    )
    def test_classify(self, identifier, expected):
        assert classify_identifier(identifier) == expected

    @pytest.mark.parametrize(
        "name_format, expected",
        [
            (CAMEL_CASE, "_parseHttpResponse"),
            (PASCAL_CASE, "_ParseHttpResponse"),
            (SNAKE_CASE, "_parse_http_response"),
            (SCREAMING_SNAKE, "_PARSE_HTTP_RESPONSE"),
            (KEBAB_CASE, "_parse-http-response"),
        ],
    )
    def test_recase(self, name_format, expected):
        assert recase("_parseHTTPResponse", name_format) == expected

    def test_recase_unknown_format(self):
        with pytest.raises(ValueError):
            recase("item_count", "Hungarian")

    def test_strings_and_comments_are_skipped(self):
        text = 'total_sum = "not_an_identifier"  # trailing_comment\n'
        assert identifiers(text) == ["total_sum"]
        assert recase_text(text, SNAKE_CASE, CAMEL_CASE) == 'totalSum = "not_an_identifier"  # trailing_comment\n'

    def test_floor_division_is_not_a_comment(self):
        text = "pages = total_count // page_size\n"
        assert identifiers(text) == ["pages", "total_count", "page_size"]
        assert recase_text(text, SNAKE_CASE, CAMEL_CASE) == "pages = totalCount // pageSize\n"

    def test_subtraction_splits_operands(self):
        text = "elapsed = end_time-start_time\n"
        assert identifiers(text) == ["elapsed", "end_time", "start_time"]
        assert recase_text(text, SNAKE_CASE, CAMEL_CASE) == "elapsed = endTime-startTime\n"

    def test_kebab_needs_plain_lower_segments(self):
        assert identifiers("style: line-height\n") == ["style", "line-height"]
        assert identifiers("gap = row_end-col\n") == ["gap", "row_end", "col"]

    @pytest.mark.parametrize("identifier", ["itemCount", "parseHttpResponse", "loadFile", "userId2"])
    def test_camel_snake_camel_round_trip(self, identifier):
        assert recase(recase(identifier, SNAKE_CASE), CAMEL_CASE) == identifier


class TestDetection:
    def test_detects_majority(self):
        text = "def load_file(file_path):\n  first_line = read(file_path)\n  return first_line\n"
        assert detect_style(text) == [(NAME_FORMAT, SNAKE_CASE), (INDENTATION, SPACES_2)]

    def test_absent_evidence_is_omitted(self):
        assert detect_style("x = 1\ny = 2\n") == []
        assert infer_style("x = 1\n").pairs == []

    def test_nested_tabs_vote_once_per_step(self):
        text = "if a:\n\tif b:\n\t\tgo()\n\tdone()\n"
        assert detect_style(text) == [(INDENTATION, TABS)]

    def test_fixture_style(self):
        text = (FIXTURES / "restyle_snake_tabs.txt").read_text(encoding="utf-8")
        assert detect_style(text) == MODEL_STYLE

    def test_camel_majority_over_snake_minority(self):
        text = "itemCount = firstValue + secondValue\nlastName = userName + totalSize\nmax_value = min_value\n"
        assert infer_style(text).pairs == [(NAME_FORMAT, CAMEL_CASE)]


class TestProfiles:
    def test_duplicate_attribute(self):
        attributes, values = style_codebooks(0, 1000)
        with pytest.raises(DuplicateRoleError):
            build_profile([(NAME_FORMAT, CAMEL_CASE), (NAME_FORMAT, SNAKE_CASE)], attributes, values)

    def test_empty_profile(self):
        with pytest.raises(EmptyProfileError):
            build_profile([])

    def test_translation_succeeds_across_seeds(self):
        successes = 0
        for seed in range(100):
            attributes, values = style_codebooks(seed, 10_000)
            values.register("AllmanBraces").register("KAndRBraces")
            assert len(values) == 10
            mapping = build_mapping(
                build_profile(MODEL_STYLE, attributes, values),
                build_profile(USER_STYLE, attributes, values),
            )
            result = translate_value(SNAKE_CASE, mapping, values)
            successes += result.name == CAMEL_CASE and result.confident
        assert successes >= 99

    def test_five_attribute_translation_across_seeds(self):
        model_pairs = MODEL_STYLE + [("BraceStyle", "AllmanBraces"), ("Quotes", "SingleQuotes"), ("LineWidth", "Width80")]
        user_pairs = USER_STYLE + [("BraceStyle", "KAndRBraces"), ("Quotes", "DoubleQuotes"), ("LineWidth", "Width120")]
        successes = 0
        for seed in range(100):
            attributes, values = style_codebooks(seed, 10_000)
            mapping = build_mapping(
                build_profile(model_pairs, attributes, values),
                build_profile(user_pairs, attributes, values),
            )
            results = [translate_value(source, mapping, values) for _, source in model_pairs]
            successes += all(
                r.name == target and r.confident for r, (_, target) in zip(results, user_pairs)
            )
        assert successes >= 95

    def test_mapping_is_bidirectional(self):
        mapping, values = snake_to_camel_mapping()
        assert translate_value(CAMEL_CASE, mapping, values).name == SNAKE_CASE
        assert translate_value(SPACES_4, mapping, values).name == TABS

    def test_identity_mapping(self):
        attributes, values = style_codebooks(3, 10_000)
        mapping = identity_mapping(build_profile(USER_STYLE, attributes, values))
        result = translate_value(CAMEL_CASE, mapping, values)
        assert result.name == CAMEL_CASE
        assert result.score == 1.0

    def test_mapping_codebook_mismatch(self):
        mapping, _ = snake_to_camel_mapping(seed=0)
        _, other_values = style_codebooks(1, 10_000)
        with pytest.raises(IncompatibleArtifactsError):
            translate_value(SNAKE_CASE, mapping, other_values)


class TestRestyle:
    def test_golden(self):
        mapping, values = snake_to_camel_mapping()
        source = (FIXTURES / "restyle_snake_tabs.txt").read_text(encoding="utf-8")
        expected = (FIXTURES / "restyle_camel_spaces4.txt").read_text(encoding="utf-8")
        report = restyle(source, mapping, values)
        assert report.text == expected
        assert [c.target_value for c in report.applied] == [CAMEL_CASE, SPACES_4]
        assert report.unresolved == []

    def test_floor_division_and_subtraction_stay_consistent(self):
        mapping, values = snake_to_camel_mapping()
        text = (
            "def page_count(total_count, page_size):\n"
            "\tpages = total_count // page_size\n"
            "\treturn pages-first_page\n"
        )
        report = restyle(text, mapping, values)
        assert report.text == (
            "def pageCount(totalCount, pageSize):\n"
            "    pages = totalCount // pageSize\n"
            "    return pages-firstPage\n"
        )

    def test_idempotent_once_converged(self):
        mapping, values = snake_to_camel_mapping()
        attributes, _ = style_codebooks(0, 10_000)
        source = (FIXTURES / "restyle_snake_tabs.txt").read_text(encoding="utf-8")
        once = restyle(source, mapping, values).text
        assert infer_style(once, attributes, values).pairs == USER_STYLE
        settled = identity_mapping(build_profile(USER_STYLE, attributes, values))
        twice = restyle(once, settled, values)
        assert twice.text == once
        assert twice.unresolved == []

    def test_reindent_keeps_remainder(self):
        assert reindent("\t\t  x\n", TABS, SPACES_2) == "      x\n"
        assert reindent("      y\n", SPACES_4, TABS) == "\t  y\n"

    def test_unmapped_attribute_is_unresolved(self):
        attributes, values = style_codebooks(0, 10_000)
        mapping = build_mapping(
            build_profile([(INDENTATION, TABS)], attributes, values),
            build_profile([(INDENTATION, SPACES_4)], attributes, values),
        )
        text = "def load_file(path):\n\treturn path\n"
        report = restyle(text, mapping, values)
        assert report.text == "def load_file(path):\n    return path\n"
        assert [c.attribute for c in report.unresolved] == [NAME_FORMAT]
        assert report.unresolved[0].target_value is None

    def test_codebooks_hold_known_values(self):
        attributes, values = style_codebooks(0, 64)
        assert attributes.kind is CodebookKind.STYLE_ATTRIBUTE
        assert isinstance(values, Codebook)
        assert set(values) >= {CAMEL_CASE, SNAKE_CASE, TABS, SPACES_4}

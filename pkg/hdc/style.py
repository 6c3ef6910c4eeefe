"""Stylistic preference profiles, style-to-style mappings and restyling.

The hyperdimensional step decides the target value of each attribute; a
deterministic textual transform applies it to the source text.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from hdc.core import DEFAULT_DIMENSION, DEFAULT_SEED, Hypervector
from hdc.item_memory import Codebook
from hdc.profiles import RoleFillerProfile, cross_map, translate
from hdc.schemas import (
    CleanupResult,
    CodebookKind,
    IncompatibleArtifactsError,
    RestyleReport,
    StyleChange,
)
from utils.logger import get_logger

logger = get_logger()

NAME_FORMAT = "NameFormat"
INDENTATION = "Indentation"

CAMEL_CASE = "CamelCase"
PASCAL_CASE = "PascalCase"
SNAKE_CASE = "SnakeCase"
SCREAMING_SNAKE = "ScreamingSnake"
KEBAB_CASE = "KebabCase"
NAME_FORMATS = (CAMEL_CASE, PASCAL_CASE, SNAKE_CASE, SCREAMING_SNAKE, KEBAB_CASE)

TABS = "Tabs"
SPACES_2 = "Spaces2"
SPACES_4 = "Spaces4"
INDENTATIONS = (TABS, SPACES_2, SPACES_4)

ATTRIBUTE_VALUES: dict[str, tuple[str, ...]] = {
    NAME_FORMAT: NAME_FORMATS,
    INDENTATION: INDENTATIONS,
}

_INDENT_UNITS = {TABS: "\t", SPACES_2: "  ", SPACES_4: "    "}

_TOKEN_RE = re.compile(
    r"""
    (?P<string>
        [rRbBuUfF]{0,2}
        (?:'''[\s\S]*?'''|\"\"\"[\s\S]*?\"\"\"|'(?:\\.|[^'\\\n])*'|"(?:\\.|[^"\\\n])*")
    )
    |(?P<comment>\#[^\n]*)
    |(?P<identifier>
        [a-z][a-z0-9]*(?:-[a-z][a-z0-9]*)+(?![A-Za-z0-9_])  # kebab: lower segments only
        |[A-Za-z_][A-Za-z0-9_]*
    )
    """,
    re.VERBOSE,
)
_WORD_RE = re.compile(r"[A-Z]+(?![a-z])\d*|[A-Z]?[a-z]+\d*|\d+")
_LEADING_WS = re.compile(r"[ \t]*")


class StyleProfile(RoleFillerProfile):
    """(attribute, value) bundle, e.g. (NameFormat * CamelCase) + (Indentation * Spaces4)."""


@dataclass(frozen=True, eq=False)
class StyleMapping:
    map_vector: Hypervector
    seed: int
    source: str = ""
    target: str = ""

    @property
    def dimension(self) -> int:
        return self.map_vector.dimension


def style_codebooks(
    seed: int = DEFAULT_SEED, dimension: int = DEFAULT_DIMENSION
) -> tuple[Codebook, Codebook]:
    """Attribute and value codebooks with the known style symbols registered."""
    attributes = Codebook(CodebookKind.STYLE_ATTRIBUTE, seed, dimension, ATTRIBUTE_VALUES)
    values = Codebook(
        CodebookKind.STYLE_VALUE,
        seed,
        dimension,
        [value for options in ATTRIBUTE_VALUES.values() for value in options],
    )
    return attributes, values


def build_profile(
    pairs: Sequence[tuple[str, str]],
    attributes: Codebook | None = None,
    values: Codebook | None = None,
) -> StyleProfile:
    if attributes is None or values is None:
        attributes, values = style_codebooks()
    return StyleProfile.build(pairs, attributes, values)


def build_mapping(
    model_style: StyleProfile,
    user_style: StyleProfile,
    source: str = "",
    target: str = "",
) -> StyleMapping:
    return StyleMapping(cross_map(model_style, user_style), model_style.seed, source, target)


def identity_mapping(profile: StyleProfile) -> StyleMapping:
    return build_mapping(profile, profile)


def translate_value(
    value: str, mapping: StyleMapping, values: Codebook, tau: float | None = None
) -> CleanupResult:
    if values.seed != mapping.seed or values.dimension != mapping.dimension:
        raise IncompatibleArtifactsError("Value codebook and mapping disagree")
    return translate(values.vector(value), mapping.map_vector, values, tau)


def split_words(identifier: str) -> list[str]:
    """Segments split at '_', '-' and lower-to-upper transitions; acronym runs stay whole."""
    words: list[str] = []
    for part in re.split(r"[_\-]+", identifier):
        words.extend(_WORD_RE.findall(part))
    return words


def classify_identifier(identifier: str) -> str | None:
    """Name format an identifier gives evidence for, or None (e.g. single lower word)."""
    core = identifier.strip("_")
    if not core:
        return None
    if "-" in core:
        return KEBAB_CASE if "_" not in core and core.islower() else None
    if "_" in core:
        if core.isupper():
            return SCREAMING_SNAKE
        if core.islower():
            return SNAKE_CASE
        return None
    has_upper = any(c.isupper() for c in core)
    has_lower = any(c.islower() for c in core)
    if core[0].islower() and has_upper:
        return CAMEL_CASE
    if core[0].isupper() and has_lower and len(split_words(core)) >= 2:
        return PASCAL_CASE
    return None


def _capitalize(word: str) -> str:
    return word[:1].upper() + word[1:].lower()


def recase(identifier: str, name_format: str) -> str:
    """Re-render `identifier` in `name_format`, keeping leading/trailing underscores."""
    core = identifier.strip("_")
    if not core:
        return identifier
    lead = identifier[: len(identifier) - len(identifier.lstrip("_"))]
    trail = identifier[len(identifier.rstrip("_")) :]
    words = split_words(core)
    if name_format == SNAKE_CASE:
        rendered = "_".join(w.lower() for w in words)
    elif name_format == SCREAMING_SNAKE:
        rendered = "_".join(w.upper() for w in words)
    elif name_format == KEBAB_CASE:
        rendered = "-".join(w.lower() for w in words)
    elif name_format == CAMEL_CASE:
        rendered = words[0].lower() + "".join(_capitalize(w) for w in words[1:])
    elif name_format == PASCAL_CASE:
        rendered = "".join(_capitalize(w) for w in words)
    else:
        raise ValueError(f"Unknown name format: {name_format}")
    return lead + rendered + trail


def identifiers(text: str) -> list[str]:
    """Identifiers outside string literals and comments."""
    return [
        m.group(0) for m in _TOKEN_RE.finditer(text) if m.lastgroup == "identifier"
    ]


def _majority(votes: Counter[str], order: Sequence[str]) -> str | None:
    if not votes:
        return None
    return max(order, key=lambda value: (votes[value], -order.index(value)))


def _indent_votes(text: str) -> Counter[str]:
    # each indentation step (growth over the previous non-blank line) casts one vote
    votes: Counter[str] = Counter()
    previous = ""
    for line in text.splitlines():
        if not line.strip():
            continue
        indent = _LEADING_WS.match(line).group(0)  # type: ignore[union-attr]
        if len(indent) > len(previous) and indent.startswith(previous):
            added = indent[len(previous) :]
            if set(added) == {"\t"}:
                votes[TABS] += 1
            elif added == "  ":
                votes[SPACES_2] += 1
            elif added == "    ":
                votes[SPACES_4] += 1
        previous = indent
    return votes


def detect_style(text: str) -> list[tuple[str, str]]:
    """Majority NameFormat and Indentation; attributes without evidence are omitted."""
    pairs: list[tuple[str, str]] = []
    name_votes: Counter[str] = Counter(
        fmt for ident in identifiers(text) if (fmt := classify_identifier(ident))
    )
    if name_format := _majority(name_votes, NAME_FORMATS):
        pairs.append((NAME_FORMAT, name_format))
    if indentation := _majority(_indent_votes(text), INDENTATIONS):
        pairs.append((INDENTATION, indentation))
    return pairs


def infer_style(
    text: str, attributes: Codebook | None = None, values: Codebook | None = None
) -> StyleProfile:
    if attributes is None or values is None:
        attributes, values = style_codebooks()
    return StyleProfile.build(detect_style(text), attributes, values, allow_empty=True)


def recase_text(text: str, source: str, target: str) -> str:
    """Re-case identifiers in `source` format; strings and comments are untouched."""

    def _replace(match: re.Match[str]) -> str:
        token = match.group(0)
        if match.lastgroup != "identifier" or classify_identifier(token) != source:
            return token
        return recase(token, target)

    return _TOKEN_RE.sub(_replace, text)


def reindent(text: str, source: str, target: str) -> str:
    """Re-emit leading indentation at the same depth with the target unit."""
    source_unit, target_unit = _INDENT_UNITS[source], _INDENT_UNITS[target]
    lines = []
    for line in text.splitlines(keepends=True):
        indent = _LEADING_WS.match(line).group(0)  # type: ignore[union-attr]
        depth, rest = 0, indent
        while rest.startswith(source_unit):
            depth += 1
            rest = rest[len(source_unit) :]
        lines.append(target_unit * depth + rest + line[len(indent) :])
    return "".join(lines)


def restyle(
    text: str,
    mapping: StyleMapping,
    values: Codebook | None = None,
    tau: float | None = None,
) -> RestyleReport:
    """Translate each detected attribute through `mapping` and apply confident results."""
    if values is None:
        _, values = style_codebooks(mapping.seed, mapping.dimension)
    applied: list[StyleChange] = []
    unresolved: list[StyleChange] = []
    result = text

    for attribute, value in detect_style(text):
        outcome = translate_value(value, mapping, values, tau)
        change = StyleChange(
            attribute=attribute,
            source_value=value,
            target_value=outcome.name,
            score=outcome.score,
            confident=outcome.confident,
        )
        if not outcome.confident or outcome.name not in ATTRIBUTE_VALUES[attribute]:
            logger.warning(
                "Style attribute unresolved",
                extra={"attribute": attribute, "value": value, "score": outcome.score},
            )
            unresolved.append(change.model_copy(update={"target_value": None}))
            continue
        applied.append(change)
        if outcome.name == value:
            continue
        if attribute == NAME_FORMAT:
            result = recase_text(result, value, outcome.name)
        else:
            result = reindent(result, value, outcome.name)

    return RestyleReport(text=result, applied=applied, unresolved=unresolved)

"""User-defined transformation functions callable from mapping documents.

Each function is pure. Problems with the input value never raise; they are
reported through the optional ``warn`` callback and the function returns
``None`` (or an empty list). The registry wraps them with a uniform calling
convention for the materialiser.
"""
from __future__ import annotations

import csv
import re
import unicodedata
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from types import MappingProxyType
from typing import Any, Callable, Iterator, Mapping, Optional, Sequence, Union

from .rdf.terms import XSD_DATETIME, Iri, Literal

AAT_BASE = "http://vocab.getty.edu/aat/"
ORCID_BASE = "https://orcid.org/"
VIAF_BASE = "http://viaf.org/viaf/"
ULAN_BASE = "http://vocab.getty.edu/ulan/"

Warn = Optional[Callable[[str], None]]


def _warn(warn: Warn, message: str) -> None:
    if warn is not None:
        warn(message)


class LookupTableError(ValueError):
    pass


@dataclass(frozen=True)
class LookupTable:
    """Normalized term -> AAT numeric code."""

    entries: Mapping[str, str] = field(default_factory=dict)
    source_path: Optional[Path] = None

    def __post_init__(self) -> None:
        clean = {}
        for key, code in self.entries.items():
            norm = normalize_key(key)
            if not _DIGITS.match(code):
                raise LookupTableError(f"AAT code for {key!r} is not numeric: {code!r}")
            if norm in clean:
                raise LookupTableError(f"duplicate lookup key {norm!r}")
            clean[norm] = code
        object.__setattr__(self, "entries", MappingProxyType(clean))

    def get(self, value: str) -> Optional[str]:
        return self.entries.get(normalize_key(value))

    def __len__(self) -> int:
        return len(self.entries)


_DIGITS = re.compile(r"^[0-9]+$")


def normalize_key(value: str) -> str:
    return value.strip().lower()


def load_lookup_table(path: Union[str, Path]) -> LookupTable:
    """Read a ``key,code`` CSV (header row required) into a LookupTable."""
    path = Path(path)
    try:
        with path.open(encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except (OSError, UnicodeDecodeError) as exc:
        raise LookupTableError(f"cannot read lookup table {path}: {exc}") from exc
    if not rows:
        raise LookupTableError(f"lookup table {path} has no header row")
    entries: dict[str, str] = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if not any(cell.strip() for cell in row):
            continue
        if len(row) != 2:
            raise LookupTableError(f"{path}:{lineno}: expected 2 columns, got {len(row)}")
        key, code = normalize_key(row[0]), row[1].strip()
        if not _DIGITS.match(code):
            raise LookupTableError(f"{path}:{lineno}: AAT code is not numeric: {code!r}")
        if key in entries:
            raise LookupTableError(f"{path}:{lineno}: duplicate lookup key {key!r}")
        entries[key] = code
    return LookupTable(entries, path)


def slugify(value: str) -> str:
    """Fold ``value`` to a lowercase hyphenated ASCII slug (may be empty)."""
    decomposed = unicodedata.normalize("NFKD", value.strip())
    stripped = "".join(c for c in decomposed if not unicodedata.combining(c))
    return re.sub(r"[^a-z0-9]+", "-", stripped.lower()).strip("-")


def _check_base(base: str) -> None:
    if not base.endswith("/"):
        raise ValueError(f"IRI base must end with '/': {base!r}")
    Iri(base)


def normalize_and_convert_to_iri(value: str, base: str, *, warn: Warn = None) -> Optional[Iri]:
    _check_base(base)
    slug = slugify(value)
    if not slug:
        _warn(warn, f"value {value!r} yields an empty slug")
        return None
    return Iri(base + slug)


def _separator_pattern(separators: Sequence[str]) -> re.Pattern:
    if isinstance(separators, str):
        separators = [separators]
    if not separators or any(not s for s in separators):
        raise ValueError("separators must be a non-empty list of non-empty tokens")
    alternatives = sorted(set(separators), key=len, reverse=True)
    return re.compile("|".join(re.escape(s) for s in alternatives))


def multiple_separator_split_explode(value: str, separators: Sequence[str], *,
                                     warn: Warn = None) -> list[str]:
    items = [part.strip() for part in _separator_pattern(separators).split(value)]
    items = [item for item in items if item]
    if not items and value.strip():
        _warn(warn, f"value {value!r} contains only separators")
    return items


def _aat_lookup(value: str, table: LookupTable, warn: Warn, what: str) -> Optional[Iri]:
    code = table.get(value)
    if code is None:
        _warn(warn, f"no AAT code for {what} {normalize_key(value)!r}")
        return None
    return Iri(AAT_BASE + code)


def assess_aat_tool_type(value: str, table: LookupTable, *, warn: Warn = None) -> Optional[Iri]:
    return _aat_lookup(value, table, warn, "acquisition technique")


_ISO_DATE = re.compile(r"^([0-9]{4})-([0-9]{2})-([0-9]{2})$")


def date_to_xs_datetime(value: str, *, warn: Warn = None) -> Optional[Literal]:
    text = value.strip()
    m = _ISO_DATE.match(text)
    if not m:
        _warn(warn, f"{value!r} is not a YYYY-MM-DD date")
        return None
    try:
        date(int(m.group(1)), int(m.group(2)), int(m.group(3)))
    except ValueError:
        _warn(warn, f"{value!r} is not a valid calendar date")
        return None
    return Literal(f"{text}T00:00:00", datatype=XSD_DATETIME)


_YEAR_RANGE = re.compile(r"^([0-9]{4})(?:\s*-\s*([0-9]{4}))?$")


def split_year_range_to_dates(value: str, which: str, *, warn: Warn = None) -> Optional[Literal]:
    if which not in ("start", "end"):
        raise ValueError(f"'which' must be 'start' or 'end', got {which!r}")
    m = _YEAR_RANGE.match(value.strip())
    if not m:
        _warn(warn, f"{value!r} is not a year or YYYY-YYYY range")
        return None
    first = m.group(1)
    last = m.group(2) or first
    if int(first) > int(last):
        _warn(warn, f"year range {value!r} ends before it starts")
        return None
    if which == "start":
        return Literal(f"{first}-01-01T00:00:00", datatype=XSD_DATETIME)
    return Literal(f"{last}-12-31T23:59:59", datatype=XSD_DATETIME)


def convert_to_aat(value: str, separators: Sequence[str], table: LookupTable, *,
                   warn: Warn = None) -> list[Iri]:
    out = []
    for item in multiple_separator_split_explode(value, separators, warn=warn):
        iri = _aat_lookup(item, table, warn, "production technique")
        if iri is not None:
            out.append(iri)
    return out


def convert_documentary_type_to_aat(value: str, table: LookupTable, *,
                                    warn: Warn = None) -> Optional[Iri]:
    return _aat_lookup(value, table, warn, "documentary type")


def extract_title(value: str, *, warn: Warn = None) -> str:
    head, sep, _ = value.rpartition("@")
    return head.strip() if sep else value.strip()


_TAG = re.compile(r"^[a-z]{2,3}$")


def extract_title_lang(value: str, *, warn: Warn = None) -> Optional[str]:
    _, sep, tag = value.rpartition("@")
    if sep and _TAG.match(tag):
        return tag
    return None


_AUTHORITIES = (
    (re.compile(r"([0-9]{4}-[0-9]{4}-[0-9]{4}-[0-9]{3}[0-9X])"), ORCID_BASE),
    (re.compile(r"VIAF[\s:#/]*([0-9]+)", re.I), VIAF_BASE),
    (re.compile(r"ULAN[\s:#/]*([0-9]+)", re.I), ULAN_BASE),
)


def extract_documented_in_iri(value: str, *, warn: Warn = None) -> Optional[Iri]:
    for pattern, base in _AUTHORITIES:
        m = pattern.search(value)
        if m:
            return Iri(base + m.group(1))
    _warn(warn, f"no ORCID, VIAF or ULAN identifier in {value!r}")
    return None


def conditional_normalize_and_convert_to_iri(value: str, relation: str, expected: str,
                                             base: str, *, warn: Warn = None) -> Optional[Iri]:
    if normalize_key(relation) != normalize_key(expected):
        return None
    return normalize_and_convert_to_iri(value, base, warn=warn)


# -- registry ---------------------------------------------------------------

TEXT, TABLE, SEPARATORS = "text", "table", "separators"


@dataclass(frozen=True)
class UdfSpec:
    name: str
    func: Callable[..., Any]
    params: Mapping[str, str]
    # a None result without a warning is normal control flow, not a data problem
    silent_empty: bool = False

    def __call__(self, args: Mapping[str, Any], warn: Warn = None) -> list:
        missing = set(self.params) - set(args)
        if missing:
            raise TypeError(f"{self.name}: missing parameters {sorted(missing)}")
        extra = set(args) - set(self.params)
        if extra:
            raise TypeError(f"{self.name}: unexpected parameters {sorted(extra)}")
        result = self.func(**args, warn=warn)
        if result is None:
            return []
        if isinstance(result, list):
            return [r for r in result if r != ""]
        return [] if result == "" else [result]


class UdfRegistry(Mapping[str, UdfSpec]):
    def __init__(self, specs: Sequence[UdfSpec]) -> None:
        entries: dict[str, UdfSpec] = {}
        for spec in specs:
            if spec.name in entries:
                raise ValueError(f"duplicate function name {spec.name!r}")
            entries[spec.name] = spec
        self._entries = MappingProxyType(entries)

    def __getitem__(self, name: str) -> UdfSpec:
        return self._entries[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def extended(self, *specs: UdfSpec) -> "UdfRegistry":
        return UdfRegistry([*self._entries.values(), *specs])


STANDARD_FUNCTIONS = (
    "normalize_and_convert_to_iri",
    "multiple_separator_split_explode",
    "assess_aat_tool_type",
    "date_to_xs_datetime",
    "split_year_range_to_dates",
    "convert_to_aat",
    "convert_documentary_type_to_aat",
    "extract_title",
    "extract_documented_in_iri",
    "conditional_normalize_and_convert_to_iri",
)

_BUILTINS = (
    UdfSpec("normalize_and_convert_to_iri", normalize_and_convert_to_iri,
            {"value": TEXT, "base": TEXT}),
    UdfSpec("multiple_separator_split_explode", multiple_separator_split_explode,
            {"value": TEXT, "separators": SEPARATORS}),
    UdfSpec("assess_aat_tool_type", assess_aat_tool_type, {"value": TEXT, "table": TABLE}),
    UdfSpec("date_to_xs_datetime", date_to_xs_datetime, {"value": TEXT}),
    UdfSpec("split_year_range_to_dates", split_year_range_to_dates,
            {"value": TEXT, "which": TEXT}),
    UdfSpec("convert_to_aat", convert_to_aat,
            {"value": TEXT, "separators": SEPARATORS, "table": TABLE}),
    UdfSpec("convert_documentary_type_to_aat", convert_documentary_type_to_aat,
            {"value": TEXT, "table": TABLE}),
    UdfSpec("extract_title", extract_title, {"value": TEXT}),
    UdfSpec("extract_title_lang", extract_title_lang, {"value": TEXT}),
    UdfSpec("extract_documented_in_iri", extract_documented_in_iri, {"value": TEXT}),
    UdfSpec("conditional_normalize_and_convert_to_iri",
            conditional_normalize_and_convert_to_iri,
            {"value": TEXT, "relation": TEXT, "expected": TEXT, "base": TEXT},
            silent_empty=True),
)

DEFAULT_REGISTRY = UdfRegistry(_BUILTINS)


def default_registry() -> UdfRegistry:
    return DEFAULT_REGISTRY


__all__ = [
    "AAT_BASE", "DEFAULT_REGISTRY", "STANDARD_FUNCTIONS", "LookupTable", "LookupTableError",
    "UdfRegistry", "UdfSpec", "assess_aat_tool_type", "conditional_normalize_and_convert_to_iri",
    "convert_documentary_type_to_aat", "convert_to_aat", "date_to_xs_datetime",
    "default_registry", "extract_documented_in_iri", "extract_title", "extract_title_lang",
    "load_lookup_table", "multiple_separator_split_explode", "normalize_and_convert_to_iri",
    "normalize_key", "slugify", "split_year_range_to_dates",
]

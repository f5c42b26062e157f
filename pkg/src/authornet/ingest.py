"""Reading bibliographic exports into per-area sets of unique authors.

Authors are identified by last name plus the full sequence of initials,
case-folded and with diacritics removed where Unicode offers a
decomposition.  Four export formats are understood:

``wos-plain``
    Web of Science plain-text export (two-letter field tags, ``ER``
    record terminators, three-space continuation lines).
``ris``
    RIS records (``TY`` ... ``ER``), authors from ``AU``/``A1`` tags.
``csv``
    A delimited table with a declared authors column whose cells hold
    several names joined by a declared separator.
``author-lines``
    One raw author per nonblank line.  This is also the canonical
    serialization of an :class:`AreaAuthorList`.
"""

from __future__ import annotations

import csv
import io
import logging
import re
import unicodedata
from dataclasses import dataclass, field
from os import PathLike
from typing import BinaryIO, Iterable, NamedTuple

from .errors import FormatError, NormalizationError

log = logging.getLogger(__name__)

SOURCE_FORMATS = ("wos-plain", "ris", "csv", "author-lines")

# lowercase surname particles joined to the surname in "Given Last" order
PARTICLES = frozenset(
    "van von der den de del della di da dos das du la le ten ter bin ibn al el".split()
)
SUFFIXES = frozenset(["jr", "sr", "ii", "iii", "iv"])
_APOSTROPHES = str.maketrans({"’": "'", "‘": "'", "ʼ": "'", "`": "'"})


@dataclass(frozen=True)
class RawRecord:
    """One publication as read from an export, before any normalization."""

    source_format: str
    authors: tuple[str, ...]
    title: str | None = None
    year: str | None = None
    line: int | None = None


class AuthorKey(NamedTuple):
    """Matching identity of an author: case-folded last name and initials."""

    last_name: str
    initials: tuple[str, ...] = ()

    def __str__(self):
        if not self.initials:
            return f"{self.last_name},"
        return f"{self.last_name}, " + " ".join(f"{_upper(c)}." for c in self.initials)


@dataclass(frozen=True)
class AreaAuthorList:
    """A named area with its deduplicated authors.

    ``n_failed`` counts raw names that could not be normalized while the
    list was built; it is informational and does not take part in equality.
    """

    area_name: str
    authors: frozenset[AuthorKey]
    n_failed: int = field(default=0, compare=False)

    @property
    def size(self) -> int:
        return len(self.authors)

    def __len__(self):
        return len(self.authors)


def _upper(c):
    u = c.upper()
    return u if len(u) == 1 and u.casefold() == c else c


def _fold(text):
    text = unicodedata.normalize("NFKD", text).translate(_APOSTROPHES)
    return "".join(ch for ch in text if not unicodedata.combining(ch))


def _clean_last(text):
    text = text.casefold()
    text = "".join(ch if ch.isalpha() or ch in "-'" else " " for ch in text)
    text = re.sub(r"\s*-\s*", "-", text)
    return " ".join(text.split()).strip("-' ")


def _initials(tokens):
    out = []
    for token in tokens:
        for part in re.split(r"[.\-]", token):
            letters = "".join(ch for ch in part if ch.isalpha())
            if not letters:
                continue
            # "FG" as exported by Web of Science: a run of initials
            if "." not in token and 2 <= len(letters) <= 3 and letters.isupper():
                out.extend(ch.casefold()[0] for ch in letters)
            else:
                out.append(letters[0].casefold()[0])
    return tuple(out)


def _is_suffix(token):
    return token.strip(".").casefold() in SUFFIXES


def normalize_author(raw: str) -> AuthorKey:
    """Reduce a raw author string to its :class:`AuthorKey`.

    ``"Last, Given Names"`` is split at the first comma; otherwise the last
    whitespace-separated token (together with any lowercase particles such
    as *van der* right before it) is the surname.  Each given-name token
    contributes its first letter; hyphenated given names contribute one
    initial per part.

    Raises:
        NormalizationError: if the string is empty or yields no surname.
    """
    text = _fold(raw).strip()
    if not any(ch.isalpha() for ch in text):
        raise NormalizationError(raw)
    if "," in text:
        last, given = text.split(",", 1)
        given_tokens = [t for t in re.split(r"[\s,]+", given) if t and not _is_suffix(t)]
    else:
        tokens = text.split()
        while len(tokens) > 1 and _is_suffix(tokens[-1]):
            tokens.pop()
        start = len(tokens) - 1
        while start > 0 and tokens[start - 1] in PARTICLES:
            start -= 1
        last = " ".join(tokens[start:])
        given_tokens = tokens[:start]
    last_name = _clean_last(last)
    if not any(ch.isalpha() for ch in last_name):
        raise NormalizationError(raw, "no surname")
    return AuthorKey(last_name, _initials(given_tokens))


def _decode(data):
    if isinstance(data, (bytes, bytearray)):
        raw = bytes(data)
    else:
        raw = data.read()
    return raw.decode("utf-8-sig", errors="replace")


def parse_records(
    data: bytes | BinaryIO,
    format: str,
    *,
    authors_column: str = "Authors",
    separator: str = ";",
    title_column: str | None = "Title",
    year_column: str | None = "Year",
    delimiter: str = ",",
    path: str | PathLike | None = None,
) -> list[RawRecord]:
    """Parse an export into records, in file order.

    ``data`` is the raw byte content or a binary file object.  Undecodable
    bytes are replaced rather than rejected.  The ``csv`` options are
    ignored for the other formats; ``path`` only decorates error messages.

    Raises:
        FormatError: on structural problems, with the offending line number.
        ValueError: for an unknown ``format``.
    """
    if format not in SOURCE_FORMATS:
        raise ValueError(f"unknown source format {format!r}; expected one of {SOURCE_FORMATS}")
    text = _decode(data)
    if format == "author-lines":
        return _parse_author_lines(text)
    if format == "ris":
        return _parse_ris(text, path)
    if format == "wos-plain":
        return _parse_wos(text, path)
    return _parse_csv(text, authors_column, separator, title_column, year_column, delimiter, path)


def read_records(path: str | PathLike, format: str, **options) -> list[RawRecord]:
    """Open ``path`` and :func:`parse_records` it.  I/O errors propagate."""
    with open(path, "rb") as fh:
        return parse_records(fh, format, path=path, **options)


def _parse_author_lines(text):
    records = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if line.strip():
            records.append(RawRecord("author-lines", (line,), line=lineno))
    return records


_RIS_TAG = re.compile(r"^([A-Z][A-Z0-9])  -(?: (.*))?$")


def _ris_record(fields, start):
    authors = tuple(v for tag, v in fields if tag in ("AU", "A1") and v.strip())
    title = next((v for tag, v in fields if tag in ("TI", "T1")), None)
    year = next((v for tag, v in fields if tag in ("PY", "Y1")), None)
    return RawRecord("ris", authors, title, year, start)


def _parse_ris(text, path):
    records = []
    fields = None
    start = None
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        match = _RIS_TAG.match(line.rstrip())
        if match is None:
            if not fields:
                raise FormatError(f"unexpected text outside a tagged field: {line!r}", lineno, path)
            tag, value = fields[-1]
            fields[-1] = (tag, f"{value} {line.strip()}")
            continue
        tag, value = match.group(1), match.group(2) or ""
        if tag == "TY":
            if fields is not None:
                raise FormatError("TY tag inside an unterminated record", lineno, path)
            fields, start = [], lineno
        elif fields is None:
            raise FormatError(f"{tag} tag outside a record (expected TY first)", lineno, path)
        elif tag == "ER":
            records.append(_ris_record(fields, start))
            fields = None
        else:
            fields.append((tag, value))
    if fields is not None:
        raise FormatError(f"record starting at line {start} has no ER terminator", None, path)
    return records


_WOS_TAG = re.compile(r"^([A-Z][A-Z0-9])(?: (.*))?$")


def _wos_record(fields, start):
    authors = tuple(v for v in fields.get("AU", []) if v.strip())
    if not authors:
        authors = tuple(v for v in fields.get("AF", []) if v.strip())
    title = " ".join(fields["TI"]) if "TI" in fields else None
    year = fields["PY"][0] if "PY" in fields else None
    return RawRecord("wos-plain", authors, title, year, start)


def _parse_wos(text, path):
    records = []
    fields = None
    last_tag = None
    start = None
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        if line.startswith("   "):
            if fields is None or last_tag is None:
                raise FormatError("continuation line without a field", lineno, path)
            if last_tag == "TI":
                fields[last_tag][-1] += " " + line.strip()
            else:
                fields[last_tag].append(line.strip())
            continue
        match = _WOS_TAG.match(line.rstrip())
        if match is None:
            raise FormatError(f"unrecognized line {line!r}", lineno, path)
        tag, value = match.group(1), (match.group(2) or "").strip()
        if fields is None:
            if tag in ("FN", "VR"):
                continue
            if tag == "EF":
                break
            if tag == "ER":
                raise FormatError("ER without an open record", lineno, path)
            fields, start = {}, lineno
        if tag == "ER":
            records.append(_wos_record(fields, start))
            fields, last_tag = None, None
        elif tag == "EF":
            raise FormatError("EF inside an unterminated record", lineno, path)
        else:
            fields.setdefault(tag, []).append(value)
            last_tag = tag
    if fields is not None:
        raise FormatError(f"record starting at line {start} has no ER terminator", None, path)
    return records


def _parse_csv(text, authors_column, separator, title_column, year_column, delimiter, path):
    reader = csv.reader(io.StringIO(text, newline=""), delimiter=delimiter)
    header = next(reader, None)
    if header is None:
        return []
    header = [h.strip() for h in header]
    if authors_column not in header:
        raise FormatError(f"missing authors column {authors_column!r}", 1, path)
    col = header.index(authors_column)
    tcol = header.index(title_column) if title_column in header else None
    ycol = header.index(year_column) if year_column in header else None
    records = []
    for row in reader:
        lineno = reader.line_num
        if not any(cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise FormatError(
                f"expected {len(header)} columns, found {len(row)}", lineno, path
            )
        authors = tuple(a for a in (s.strip() for s in row[col].split(separator)) if a)
        title = row[tcol] if tcol is not None else None
        year = row[ycol] if ycol is not None else None
        records.append(RawRecord("csv", authors, title, year, lineno))
    return records


def build_area_list(records: Iterable[RawRecord], area_name: str) -> AreaAuthorList:
    """Union the normalized authors of ``records`` into one area list.

    Names that fail normalization are skipped; their count is kept on the
    result and logged.
    """
    if not area_name:
        raise ValueError("area_name must be non-empty")
    keys = set()
    failed = 0
    for record in records:
        for raw in record.authors:
            try:
                keys.add(normalize_author(raw))
            except NormalizationError as exc:
                failed += 1
                log.debug("%s: %s", area_name, exc)
    if failed:
        log.warning("%s: skipped %d unparseable author name(s)", area_name, failed)
    return AreaAuthorList(area_name, frozenset(keys), failed)


def format_author_lines(area: AreaAuthorList) -> str:
    """Canonical serialization: one sorted ``"last, I. J."`` line per author."""
    return "".join(f"{key}\n" for key in sorted(area.authors))


def write_author_lines(area: AreaAuthorList, path: str | PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_author_lines(area))


def read_author_list(path: str | PathLike, area_name: str) -> AreaAuthorList:
    """Load a canonical author-lines file back into an area list."""
    return build_area_list(read_records(path, "author-lines"), area_name)

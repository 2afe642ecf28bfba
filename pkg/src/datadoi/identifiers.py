"""DOI name syntax: parsing, formatting, and canonical form.

A DOI name is ``prefix/suffix``. The prefix is the directory indicator
``10.`` followed by 4-6 registrant digits; the suffix is chosen by the
registrant. The canonical form is lowercase, and parsing folds case so
that the same identifier always maps to the same :class:`DoiName`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

__all__ = [
    "DoiName",
    "MalformedDoi",
    "MalformedPrefix",
    "EmptySuffix",
    "IllegalSuffixCharacter",
    "parse_doi",
    "format_doi",
    "SUFFIX_ALPHABET",
    "MAX_SUFFIX_LENGTH",
]

# Registrant-chosen suffixes are restricted to characters that embed
# cleanly in URLs and journal text.
SUFFIX_ALPHABET = "abcdefghijklmnopqrstuvwxyz0123456789._;()/-"
MAX_SUFFIX_LENGTH = 64

_PREFIX_RE = re.compile(r"^10\.\d{4,6}$")
_SUFFIX_OK = frozenset(SUFFIX_ALPHABET)


class MalformedDoi(ValueError):
    """A string that does not denote a DOI name."""


class MalformedPrefix(MalformedDoi):
    """Prefix is not ``10.`` followed by 4-6 digits."""


class EmptySuffix(MalformedDoi):
    """No suffix after the prefix separator."""


class IllegalSuffixCharacter(MalformedDoi):
    """Suffix contains a character outside the allowed alphabet."""


@dataclass(frozen=True, order=True)
class DoiName:
    """A parsed persistent identifier in canonical (lowercase) form."""

    prefix: str
    suffix: str

    def __str__(self) -> str:
        return f"{self.prefix}/{self.suffix}"


def parse_doi(text: str | bytes) -> DoiName:
    """Parse arbitrary text into a canonical :class:`DoiName`.

    Case-insensitive; raises a :class:`MalformedDoi` subclass on any
    input that is not a DOI name, never any other exception.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8", errors="replace")
    if not isinstance(text, str):
        raise MalformedPrefix(f"expected a string, got {type(text).__name__}")
    candidate = text.strip().lower()
    prefix, sep, suffix = candidate.partition("/")
    if not _PREFIX_RE.match(prefix):
        raise MalformedPrefix(f"prefix must be '10.' plus 4-6 digits, got {prefix!r}")
    if not sep or not suffix:
        raise EmptySuffix(f"missing suffix in {candidate!r}")
    if len(suffix) > MAX_SUFFIX_LENGTH:
        raise IllegalSuffixCharacter(
            f"suffix longer than {MAX_SUFFIX_LENGTH} characters"
        )
    bad = set(suffix) - _SUFFIX_OK
    if bad:
        raise IllegalSuffixCharacter(
            f"illegal suffix character(s) {sorted(bad)!r} in {suffix!r}"
        )
    return DoiName(prefix=prefix, suffix=suffix)


def format_doi(name: DoiName) -> str:
    """Render a DOI name as its canonical lowercase ``prefix/suffix`` string."""
    return f"{name.prefix}/{name.suffix}".lower()

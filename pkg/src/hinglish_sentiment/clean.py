"""Tweet cleaning: mention removal, HTML stripping, letters-only filtering.

Stages always run in that order.  Nothing is lowercased.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

MENTION_RE = re.compile(r"@[A-Za-z0-9]+")
# a tag opens with a letter, '/' or '!' so that "a < b" or "<3" survive
TAG_RE = re.compile(r"<[A-Za-z/!][^<>]*>")
ENTITY_RE = re.compile(r"&(?:#([0-9]+)|#[xX]([0-9A-Fa-f]+)|(amp|lt|gt|quot|apos|nbsp));")
NON_LETTER_RE = re.compile(r"[^a-zA-Z]")
WHITESPACE_RE = re.compile(r"\s+")

NAMED_ENTITIES = {
    "amp": "&",
    "lt": "<",
    "gt": ">",
    "quot": '"',
    "apos": "'",
    "nbsp": "\xa0",
}


@dataclass(frozen=True)
class CleanConfig:
    remove_mentions: bool = True
    strip_html: bool = True
    letters_only: bool = True
    collapse_whitespace: bool = False


def remove_mentions(text: str) -> str:
    return MENTION_RE.sub("", text)


def _decode_entity(m: re.Match) -> str:
    dec, hexa, name = m.groups()
    if name is not None:
        return NAMED_ENTITIES[name]
    code = int(dec) if dec is not None else int(hexa, 16)
    if code == 0 or code > 0x10FFFF or 0xD800 <= code <= 0xDFFF:
        return m.group(0)
    return chr(code)


def strip_html(text: str) -> str:
    """Delete markup tags, then decode a fixed table of character references.

    Decoding is a single pass, so ``&amp;lt;`` becomes ``&lt;``.
    """
    return ENTITY_RE.sub(_decode_entity, TAG_RE.sub("", text))


def letters_only(text: str) -> str:
    """Replace each non-ASCII-letter character by one space."""
    return NON_LETTER_RE.sub(" ", text)


def collapse_whitespace(text: str) -> str:
    return WHITESPACE_RE.sub(" ", text).strip()


def clean_tweet(text: str, config: CleanConfig = CleanConfig()) -> str:
    if config.remove_mentions:
        text = remove_mentions(text)
    if config.strip_html:
        text = strip_html(text)
    if config.letters_only:
        text = letters_only(text)
    if config.collapse_whitespace:
        text = collapse_whitespace(text)
    return text

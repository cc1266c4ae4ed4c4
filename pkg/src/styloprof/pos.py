"""Reduced POS tag streams with special reference tags.

Fine-grained EAGLES-style tags (e.g. ``NCFS000``) are reduced to their
first-level category letter (``N``).  Tokens produced by the text
normalization phase -- mentions (``@us``), links (``htt``) -- plus
hashtags are relabeled with dedicated tags so their interaction with the
grammatical tags survives into POS n-grams.

A POS stream is a plain list of strings: single uppercase category
letters, or one of the three REF tags.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass

from .errors import DataError

REF_USERNAME = "REF@USERNAME"
REF_LINK = "REF#LINK"
REF_HASHTAG = "REF#HASHTAG"

MENTION_MARKER = "@us"
LINK_MARKER = "htt"

_HASHTAG = re.compile(r"#\w+")
_NUMERIC = re.compile(r"\d+(?:[.,]\d+)*")


@dataclass(frozen=True)
class TaggedToken:
    surface: str
    fine_tag: str


def reduce_tag(fine_tag: str) -> str:
    """First-level category of a fine-grained tag; REF tags pass through."""
    if not fine_tag:
        raise DataError("empty POS tag")
    if fine_tag.startswith("REF"):
        return fine_tag
    # some characters uppercase to more than one (ß -> SS); a category is
    # always exactly one letter
    return fine_tag[0].upper()[0]


def relabel(tokens: list[TaggedToken]) -> list[str]:
    """Reduced, relabeled tag stream for tokens of a *normalized* document.

    Special surfaces override whatever the tagger produced: ``@us`` ->
    REF@USERNAME, ``htt`` -> REF#LINK, ``#``+word chars -> REF#HASHTAG.
    Output has exactly one tag per token, in order.
    """
    stream = []
    for tok in tokens:
        if tok.surface == MENTION_MARKER:
            stream.append(REF_USERNAME)
        elif tok.surface == LINK_MARKER:
            stream.append(REF_LINK)
        elif tok.surface.startswith("#") and _HASHTAG.match(tok.surface):
            stream.append(REF_HASHTAG)
        elif not tok.fine_tag:
            raise DataError(f"token {tok.surface!r} has no POS tag and no special form")
        else:
            stream.append(reduce_tag(tok.fine_tag))
    return stream


def ingest_tagged_file(path) -> list[list[TaggedToken]]:
    """Read externally produced tags: ``surface<TAB>fine_tag`` per line,
    blank line between documents.  Returns one token list per document."""
    from .corpus import open_text  # gzip-aware

    docs: list[list[TaggedToken]] = []
    current: list[TaggedToken] = []
    with open_text(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                if current:
                    docs.append(current)
                    current = []
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise DataError(f"{path}:{lineno}: expected `surface<TAB>tag`, got {len(parts)} field(s)")
            surface, tag = parts
            if not surface or not tag:
                raise DataError(f"{path}:{lineno}: empty surface or tag")
            current.append(TaggedToken(surface, tag))
    if current:
        docs.append(current)
    return docs


def _is_punct_only(token: str) -> bool:
    return all(unicodedata.category(c)[0] in ("P", "S") for c in token)


def fallback_tag(tokens: list[str], lexicon: dict[str, str]) -> list[TaggedToken]:
    """Deterministic lexicon tagger used when no external tags are supplied.

    Lookup is on the lowercased surface; unknown words default to ``N``
    (the majority open class), digit tokens to ``Z``, punctuation-only
    tokens to ``F``.  A baseline, not a substitute for a real tagger.
    """
    tagged = []
    for tok in tokens:
        cat = lexicon.get(tok.lower())
        if cat is None:
            if _NUMERIC.fullmatch(tok):
                cat = "Z"
            elif tok and _is_punct_only(tok):
                cat = "F"
            else:
                cat = "N"
        tagged.append(TaggedToken(tok, cat))
    return tagged


def load_lexicon(path) -> dict[str, str]:
    """Lexicon file: ``word<TAB>letter`` per line, ``#`` comments allowed."""
    from .corpus import open_text

    lexicon: dict[str, str] = {}
    with open_text(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0] or not parts[1]:
                raise DataError(f"{path}:{lineno}: expected `word<TAB>letter`")
            lexicon[parts[0].lower()] = parts[1].upper()
    return lexicon


_KEEP_PREFIX = "@#"  # starts a mention marker or hashtag


def simple_tokenize(text: str) -> list[str]:
    """Whitespace tokenizer that peels leading/trailing punctuation into
    separate tokens, leaving normalization markers and hashtags intact."""
    tokens: list[str] = []
    for chunk in text.split():
        if _is_punct_only(chunk):
            tokens.append(chunk)
            continue
        i, j = 0, len(chunk)
        while i < j and _is_punct_only(chunk[i]) and chunk[i] not in _KEEP_PREFIX:
            i += 1
        while j > i and _is_punct_only(chunk[j - 1]) and chunk[j - 1] not in _KEEP_PREFIX:
            j -= 1
        if i:
            tokens.append(chunk[:i])
        if i < j:
            tokens.append(chunk[i:j])
        if j < len(chunk):
            tokens.append(chunk[j:])
    return tokens

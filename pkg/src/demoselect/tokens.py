"""Token-ID sets for demonstrations.

Demonstration text is converted to the deduplicated set of token IDs the
target LLM's tokenizer assigns to it. The similarity metric downstream is
set-based, so order and multiplicity are dropped here (the pre-dedup count
is retained on the TokenSet). Two builtin tokenizers make the whole
numerics pipeline testable without any model files:

  whitespace-hash  each whitespace-separated word -> 64-bit BLAKE2b hash
                   truncated to 32 bits
  byte-level       each UTF-8 byte -> its value (0..255)

Anything else is treated as a path to a tokenizer definition JSON file as
distributed with open-weight model releases (loaded via the `tokenizers`
library). Special tokens (BOS, padding, ...) are excluded by default: they
appear in every demonstration and would uniformly inflate similarity.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .errors import EncodeError, TokenizerError

BUILTIN_TOKENIZERS = ("whitespace-hash", "byte-level")


@dataclass(frozen=True)
class TokenSet:
    ids: tuple[int, ...]  # sorted, strictly increasing
    raw_len: int  # token count before dedup
    source: int = -1  # originating row index, -1 if unknown

    def __post_init__(self):
        if not self.ids:
            raise EncodeError("token set is empty")
        if any(b <= a for a, b in zip(self.ids, self.ids[1:])):
            raise ValueError("token ids must be strictly increasing")
        if self.raw_len < len(self.ids):
            raise ValueError("raw_len cannot be smaller than the deduplicated count")


@dataclass
class TokenizerHandle:
    kind: str  # "model-file" | "whitespace-hash" | "byte-level"
    identifier: str
    keep_special: bool = False
    _encode_raw: Callable[[str], list[int]] = field(repr=False, default=None)


def _whitespace_hash_ids(text: str) -> list[int]:
    ids = []
    for word in text.split():
        digest = hashlib.blake2b(word.encode("utf-8"), digest_size=8).digest()
        ids.append(int.from_bytes(digest, "big") & 0xFFFFFFFF)
    return ids


def _byte_level_ids(text: str) -> list[int]:
    return list(text.encode("utf-8"))


def load_tokenizer(spec: str, keep_special: bool = False) -> TokenizerHandle:
    """Resolve a builtin name or a tokenizer-definition file path to a handle.

    Loading the same spec twice yields behaviorally identical handles;
    encode on a handle is deterministic.
    """
    if spec == "whitespace-hash":
        return TokenizerHandle("whitespace-hash", spec, keep_special, _whitespace_hash_ids)
    if spec == "byte-level":
        return TokenizerHandle("byte-level", spec, keep_special, _byte_level_ids)

    path = Path(spec)
    if not path.exists():
        raise TokenizerError(
            f"unknown tokenizer {spec!r}: not a builtin {BUILTIN_TOKENIZERS} "
            "and no such file"
        )
    try:
        from tokenizers import Tokenizer
    except ImportError as exc:  # pragma: no cover - tokenizers is a hard dep
        raise TokenizerError(f"tokenizers library unavailable: {exc}") from exc
    try:
        tok = Tokenizer.from_file(str(path))
    except Exception as exc:
        raise TokenizerError(f"failed to parse tokenizer file {path}: {exc}") from exc

    def encode_model(text: str, _tok=tok, _special=keep_special) -> list[int]:
        return _tok.encode(text, add_special_tokens=_special).ids

    return TokenizerHandle("model-file", str(path), keep_special, encode_model)


def encode(handle: TokenizerHandle, text: str, source: int = -1) -> TokenSet:
    """Tokenize `text` and return its deduplicated token-ID set."""
    if not text:
        raise EncodeError("cannot encode empty text")
    raw = handle._encode_raw(text)
    if not raw:
        raise EncodeError(f"tokenizer {handle.identifier!r} produced no tokens for {text!r}")
    return TokenSet(ids=tuple(sorted(set(raw))), raw_len=len(raw), source=source)

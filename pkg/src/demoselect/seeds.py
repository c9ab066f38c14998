"""Named random substreams derived from a single master seed.

Every random choice in the pipeline draws from a stream named after its
purpose ("split", "kmeans", "select", "random-baseline", ...), so changing
one stage's sampling never reshuffles another stage's draws. Derivation is
a SHA-256 hash of the master seed and the name parts, which is stable
across platforms and library versions.
"""

from __future__ import annotations

import hashlib

import numpy as np


def substream_seed(master: int, *parts: int | str) -> int:
    """64-bit seed for the substream named by `parts` under `master`."""
    tag = "/".join([str(int(master))] + [str(p) for p in parts])
    digest = hashlib.sha256(tag.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def substream(master: int, *parts: int | str) -> np.random.Generator:
    return np.random.default_rng(substream_seed(master, *parts))

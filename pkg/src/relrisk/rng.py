"""Counter-based random streams keyed by (seed, purpose tag).

Draw ``i`` of a stream depends only on ``(seed, tag, i)``, so any partition
of individuals across chunks or workers reproduces the sequential result
bit for bit.
"""

from __future__ import annotations

import numpy as np

_WORDS_PER_BLOCK = 4  # Philox4x64 emits four 64-bit words per counter step


def _key(seed: int, tag: str) -> np.ndarray:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or seed < 0:
        raise ValueError(f"seed must be a nonnegative integer, got {seed!r}")
    tag_code = int.from_bytes(tag.encode("utf-8"), "little")
    return np.random.SeedSequence([int(seed), tag_code]).generate_state(2, np.uint64)


def raw_words(seed: int, tag: str, start: int, count: int) -> np.ndarray:
    """Words ``start .. start+count-1`` of the stream, as uint64."""
    if start < 0 or count < 0:
        raise ValueError("start and count must be nonnegative")
    bitgen = np.random.Philox(key=_key(seed, tag))
    block, skip = divmod(start, _WORDS_PER_BLOCK)
    if block:
        bitgen.advance(block)
    return bitgen.random_raw(count + skip)[skip:]


def uniforms(seed: int, tag: str, start: int, count: int) -> np.ndarray:
    """Doubles in [0, 1) built from the top 53 bits of each word."""
    words = raw_words(seed, tag, start, count)
    return (words >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)


def bernoulli(seed: int, tag: str, start: int, count: int, p: float) -> np.ndarray:
    return uniforms(seed, tag, start, count) < p

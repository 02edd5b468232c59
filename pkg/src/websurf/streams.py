"""Seeded random primitives shared by all generators.

Streams are keyed by a (master_seed, stream_id) pair fed into a Philox
counter-based bit generator, so distinct stream ids give statistically
independent draw sequences and the whole sequence is a pure function of
the key, on every platform.

Geometric convention: geo(p) is supported on {0, 1, 2, ...} with
P{geo(p) = k} = (1-p)^k * p.  Many libraries use support {1, 2, ...};
every formula downstream of this module assumes the 0-based convention.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

_UINT64_MAX = 2**64 - 1


def derive_stream_id(*parts) -> int:
    """Stable 64-bit stream id from arbitrary labels (names, trial indices).

    Uses blake2b so the derivation is identical across runs and platforms
    (the builtin hash() is salted per process and would not be).
    """
    h = hashlib.blake2b(digest_size=8)
    for part in parts:
        h.update(repr(part).encode())
        h.update(b"\x1f")
    return int.from_bytes(h.digest(), "big")


@dataclass(frozen=True)
class SeedSpec:
    """Key of one reproducible random stream (one per trial/component)."""

    master_seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("master_seed", "stream_id"):
            v = getattr(self, name)
            if not (0 <= int(v) <= _UINT64_MAX):
                raise ValueError(f"{name} must be a 64-bit unsigned integer, got {v!r}")

    def stream(self) -> "Stream":
        return Stream(self)


class Stream:
    """Stateful draw cursor over the Philox stream of a SeedSpec.

    A single Stream must not be shared between threads without external
    serialization; independent SeedSpecs are safe to drive concurrently.
    """

    def __init__(self, spec: SeedSpec):
        self.spec = spec
        key = np.array([spec.master_seed, spec.stream_id], dtype=np.uint64)
        self._gen = np.random.Generator(np.random.Philox(key=key))

    def uniforms(self, size=None):
        """Uniform draws on [0, 1)."""
        return self._gen.random(size)

    def exponentials(self, size=None):
        """Mean-1 exponential draws."""
        return self._gen.standard_exponential(size)

    def integers(self, upper: int, size=None):
        """Uniform integers on {0, ..., upper-1}."""
        return self._gen.integers(0, upper, size=size)


def _as_stream(stream) -> Stream:
    if isinstance(stream, SeedSpec):
        return stream.stream()
    return stream


def sample_geometric(p: float, stream, size=None):
    """Draw geo(p) on {0,1,2,...} by inversion: floor(log(1-U)/log(1-p)).

    One uniform is consumed per value (also when p == 1, where the result
    is forced to 0), so batched and scalar call patterns consume the
    stream identically.
    """
    if not 0.0 < p <= 1.0:
        raise ValueError(f"geometric parameter p must be in (0, 1], got {p}")
    stream = _as_stream(stream)
    u = stream.uniforms(size)
    if p == 1.0:
        return 0 if size is None else np.zeros(size, dtype=np.int64)
    k = np.floor(np.log1p(-u) / np.log1p(-p))
    if size is None:
        return int(k)
    return k.astype(np.int64)


def sample_exponential(stream, size=None):
    """Mean-1 exponential draw(s); strictly positive."""
    stream = _as_stream(stream)
    x = stream.exponentials(size)
    if size is None:
        return float(x)
    return x


def sample_L(p: float, beta: float, stream, size=None):
    """The mixture law: 0 with probability beta, otherwise geo(p).

    Draw consumption: beta == 0 consumes one uniform per value (it
    delegates to sample_geometric, so beta=0 runs couple exactly with
    plain geometric runs on the same stream); beta == 1 consumes nothing;
    otherwise one coin and one geometric uniform per value.
    """
    if not 0.0 < p <= 1.0:
        raise ValueError(f"parameter p must be in (0, 1], got {p}")
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"parameter beta must be in [0, 1], got {beta}")
    if beta == 0.0:
        return sample_geometric(p, stream, size)
    if beta == 1.0:
        return 0 if size is None else np.zeros(size, dtype=np.int64)
    stream = _as_stream(stream)
    coins = stream.uniforms(size)
    geo = sample_geometric(p, stream, size)
    if size is None:
        return 0 if coins < beta else geo
    return np.where(coins < beta, 0, geo)


def sample_uniform_vertex(s: int, stream, size=None):
    """Uniform vertex index in {0, ..., s-1} via the floor(s*U) construction."""
    if s < 1:
        raise ValueError(f"cannot pick from an empty vertex range (s={s})")
    stream = _as_stream(stream)
    u = stream.uniforms(size)
    k = np.minimum(np.floor(s * u), s - 1)
    if size is None:
        return int(k)
    return k.astype(np.int64)

"""Finite-range barrier models.

Every barrier is stored as a sequence of constant slabs ``[left, right)``
with heights ``V >= 0``. Rectangular and sampled barriers are special
cases of that representation, which is also what the transfer-matrix
solver consumes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidParameterError

__all__ = [
    "Barrier",
    "make_rectangular",
    "make_piecewise",
    "make_sampled",
    "evaluate",
]

KINDS = ("rectangular", "piecewise-constant", "sampled")


@dataclass(frozen=True)
class Barrier:
    """Piecewise-constant potential with compact support.

    ``edges`` has one more entry than ``heights``; slab ``i`` occupies
    ``[edges[i], edges[i+1])``. ``center`` and ``support_radius`` describe
    the smallest interval ``[center - D, center + D]`` outside which the
    potential is exactly zero.
    """

    kind: str
    edges: tuple[float, ...]
    heights: tuple[float, ...]
    center: float = field(default=0.0)
    support_radius: float = field(default=0.0)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidParameterError(f"unknown barrier kind {self.kind!r}")
        if len(self.edges) != len(self.heights) + 1:
            raise InvalidParameterError("edges must have one more entry than heights")
        if np.any(np.diff(self.edges) <= 0):
            raise InvalidParameterError("slab edges must be strictly increasing")
        if any(h < 0 for h in self.heights):
            raise InvalidParameterError("barrier heights must be non-negative")

    def __call__(self, q):
        return evaluate(self, q)

    @property
    def widths(self) -> np.ndarray:
        return np.diff(np.asarray(self.edges, dtype=float))

    @property
    def is_free(self) -> bool:
        return all(h == 0 for h in self.heights)

    @property
    def v_max(self) -> float:
        return max(self.heights) if self.heights else 0.0

    def area(self) -> float:
        """Integral of V over the real line."""
        return float(np.dot(self.widths, self.heights))

    def trimmed(self) -> tuple[np.ndarray, np.ndarray]:
        """Edges and heights with zero-height slabs stripped from both ends."""
        h = np.asarray(self.heights, dtype=float)
        e = np.asarray(self.edges, dtype=float)
        nz = np.flatnonzero(h)
        if nz.size == 0:
            return e[:1], h[:0]
        lo, hi = nz[0], nz[-1]
        return e[lo:hi + 2], h[lo:hi + 1]


def make_rectangular(v0: float, width: float, center: float = 0.0) -> Barrier:
    """Single slab of height ``v0`` and width ``width`` centred at ``center``."""
    if not v0 >= 0:
        raise InvalidParameterError(f"barrier height must be >= 0, got {v0}")
    if not width > 0:
        raise InvalidParameterError(f"barrier width must be > 0, got {width}")
    half = 0.5 * width
    return Barrier(
        kind="rectangular",
        edges=(center - half, center + half),
        heights=(float(v0),),
        center=float(center),
        support_radius=half,
    )


def make_piecewise(segments: Sequence[Sequence[float]]) -> Barrier:
    """Barrier from ordered ``(left, right, height)`` triples.

    Segments must be contiguous: each left edge equals the previous right
    edge.
    """
    if len(segments) == 0:
        raise InvalidParameterError("at least one segment is required")
    segs = [tuple(float(x) for x in s) for s in segments]
    for s in segs:
        if len(s) != 3:
            raise InvalidParameterError(f"segment {s} is not a (left, right, height) triple")
        if not s[1] > s[0]:
            raise InvalidParameterError(f"segment {s} has right edge <= left edge")
    for a, b in zip(segs[:-1], segs[1:]):
        if a[1] != b[0]:
            raise InvalidParameterError(
                f"segments {a} and {b} are not contiguous (overlap or gap)"
            )
    edges = tuple(s[0] for s in segs) + (segs[-1][1],)
    heights = tuple(s[2] for s in segs)
    left, right = edges[0], edges[-1]
    return Barrier(
        kind="piecewise-constant",
        edges=edges,
        heights=heights,
        center=0.5 * (left + right),
        support_radius=0.5 * (right - left),
    )


def make_sampled(q: Sequence[float], heights: Sequence[float]) -> Barrier:
    """Barrier from heights on a uniform grid.

    Each sample becomes a slab of one grid spacing centred on its grid
    point, so the transfer matrix is exact for the represented potential.
    """
    q = np.asarray(q, dtype=float)
    v = np.asarray(heights, dtype=float)
    if q.ndim != 1 or q.shape != v.shape or q.size < 2:
        raise InvalidParameterError("sampled barrier needs matching 1D q and heights, >= 2 points")
    dq = np.diff(q)
    if np.any(dq <= 0) or not np.allclose(dq, dq[0], rtol=1e-9, atol=0):
        raise InvalidParameterError("sampled barrier grid must be uniform and increasing")
    h = dq[0]
    edges = np.concatenate([q - 0.5 * h, [q[-1] + 0.5 * h]])
    left, right = edges[0], edges[-1]
    return Barrier(
        kind="sampled",
        edges=tuple(edges.tolist()),
        heights=tuple(v.tolist()),
        center=0.5 * (left + right),
        support_radius=0.5 * (right - left),
    )


def evaluate(b: Barrier, q):
    """V(q); scalar in, scalar out. Slab edges belong to the slab on their right."""
    qa = np.asarray(q, dtype=float)
    edges = np.asarray(b.edges)
    heights = np.concatenate([[0.0], np.asarray(b.heights, dtype=float), [0.0]])
    idx = np.searchsorted(edges, qa, side="right")
    out = heights[idx]
    if np.ndim(q) == 0:
        return float(out)
    return out

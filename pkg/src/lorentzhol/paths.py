"""Piecewise curves built from polynomial and circular-arc segments.

Points use the coordinate order (v, x_1, ..., x_n, u) so that coordinate
indices line up with the null frame (l, e_1, ..., e_n, l*).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import SEG_ARC, SEG_POLY, segment_state

JUNCTION_TOL = 1e-12


@dataclass(frozen=True)
class Segment:
    kind: int
    params: np.ndarray

    @classmethod
    def polynomial(cls, coeffs) -> "Segment":
        """Segment s -> sum_k coeffs[k] s^k for s in [0, 1]."""
        return cls(SEG_POLY, np.atleast_2d(np.asarray(coeffs, dtype=float)))

    @classmethod
    def line(cls, start, end) -> "Segment":
        start = np.asarray(start, dtype=float)
        return cls.polynomial([start, np.asarray(end, dtype=float) - start])

    @classmethod
    def arc(cls, center, axis1, axis2, radius, phi0, phi1) -> "Segment":
        """Circle arc center + r(cos phi axis1 + sin phi axis2), phi from phi0 to phi1."""
        center = np.asarray(center, dtype=float)
        p = np.zeros((4, center.size))
        p[0] = center
        p[1] = radius * np.asarray(axis1, dtype=float)
        p[2] = radius * np.asarray(axis2, dtype=float)
        p[3, 0], p[3, 1] = phi0, phi1
        return cls(SEG_ARC, p)

    def state(self, s: float):
        return segment_state(self.kind, self.params, float(s))

    def point(self, s: float) -> np.ndarray:
        return self.state(s)[0]

    def reversed(self) -> "Segment":
        if self.kind == SEG_ARC:
            p = self.params.copy()
            p[3, 0], p[3, 1] = self.params[3, 1], self.params[3, 0]
            return Segment(SEG_ARC, p)
        # q(s) = p(1 - s): expand by binomial coefficients
        c = self.params
        deg = c.shape[0] - 1
        out = np.zeros_like(c)
        from math import comb
        for k in range(deg + 1):
            for j in range(k + 1):
                out[j] += c[k] * comb(k, j) * (-1) ** j
        return Segment(SEG_POLY, out)

    @classmethod
    def from_data(cls, data) -> "Segment":
        kind = data.get("kind")
        if kind == "poly":
            return cls.polynomial(data["params"])
        if kind == "arc":
            return cls(SEG_ARC, np.asarray(data["params"], dtype=float))
        raise ValueError(f"unknown segment kind {kind!r}")

    def to_data(self):
        kind = "poly" if self.kind == SEG_POLY else "arc"
        return {"kind": kind, "params": self.params.tolist()}


@dataclass(frozen=True)
class PathSpec:
    segments: tuple

    def __post_init__(self):
        if not self.segments:
            raise ValueError("a path needs at least one segment")
        for first, second in zip(self.segments, self.segments[1:]):
            gap = np.abs(first.point(1.0) - second.point(0.0)).max()
            if gap > JUNCTION_TOL * max(1.0, np.abs(first.point(1.0)).max()):
                raise ValueError(f"path segments do not join (gap {gap:.2e})")

    @property
    def dim(self) -> int:
        return self.segments[0].params.shape[1]

    @property
    def start(self) -> np.ndarray:
        return self.segments[0].point(0.0)

    @property
    def end(self) -> np.ndarray:
        return self.segments[-1].point(1.0)

    @classmethod
    def line(cls, start, end) -> "PathSpec":
        return cls((Segment.line(start, end),))

    @classmethod
    def polyline(cls, points, closed: bool = False) -> "PathSpec":
        pts = [np.asarray(p, dtype=float) for p in points]
        if closed:
            pts.append(pts[0])
        return cls(tuple(Segment.line(a, b) for a, b in zip(pts, pts[1:])))

    def then(self, other: "PathSpec") -> "PathSpec":
        return PathSpec(self.segments + other.segments)

    def reversed(self) -> "PathSpec":
        return PathSpec(tuple(s.reversed() for s in reversed(self.segments)))

    def sample_points(self, per_segment: int = 33):
        s = np.linspace(0.0, 1.0, per_segment)
        return np.array([seg.point(t) for seg in self.segments for t in s])

    def to_data(self):
        return [seg.to_data() for seg in self.segments]

    @classmethod
    def from_data(cls, data) -> "PathSpec":
        return cls(tuple(Segment.from_data(d) for d in data))

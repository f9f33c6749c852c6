"""Polygonal curve model, arc-length bookkeeping, and curve file I/O.

Curves are ordered 2-D vertex sequences.  All downstream machinery works in
arc-length coordinates, so every curve carries cumulative segment lengths.
Instances are immutable after construction and safe to share between threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np


class CurveParseError(ValueError):
    """A curve file could not be parsed."""


class CurveValidationError(ValueError):
    """Parsed data does not describe a usable polygonal curve."""


class Point2(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class CurvePoint:
    """A point on a curve: segment index plus local parameter in [0, 1]."""

    segment_index: int
    local_param: float


@dataclass(frozen=True)
class PolygonalCurve:
    """An immutable polygonal curve with cumulative arc lengths.

    ``vertices`` is a (k, 2) float array with no zero-length segments;
    ``cum_len[i]`` is the arc length from the start to vertex ``i``.
    """

    vertices: np.ndarray
    cum_len: np.ndarray

    @property
    def n_segments(self) -> int:
        return len(self.vertices) - 1

    @property
    def length(self) -> float:
        return float(self.cum_len[-1])

    def segment(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        return self.vertices[i], self.vertices[i + 1]

    def segment_length(self, i: int) -> float:
        return float(self.cum_len[i + 1] - self.cum_len[i])

    def point_at_arclength(self, s: float) -> np.ndarray:
        """Point at arc length ``s`` from the start, clamped to the curve."""
        s = min(max(s, 0.0), self.length)
        i = int(np.searchsorted(self.cum_len, s, side="right")) - 1
        i = min(max(i, 0), self.n_segments - 1)
        seg_len = self.cum_len[i + 1] - self.cum_len[i]
        t = (s - self.cum_len[i]) / seg_len
        return (1.0 - t) * self.vertices[i] + t * self.vertices[i + 1]


def make_curve(points) -> PolygonalCurve:
    """Validate and normalize a vertex sequence into a PolygonalCurve.

    Consecutive duplicate vertices are merged; zero-length segments would
    otherwise degenerate the per-cell free-space description downstream.
    """
    arr = np.asarray(points, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise CurveValidationError(
            f"expected an (n, 2) array of vertices, got shape {arr.shape}"
        )
    if not np.all(np.isfinite(arr)):
        raise CurveValidationError("curve contains non-finite coordinates")
    keep = [0]
    for k in range(1, len(arr)):
        if arr[k, 0] != arr[keep[-1], 0] or arr[k, 1] != arr[keep[-1], 1]:
            keep.append(k)
    arr = arr[keep]
    if len(arr) < 2:
        raise CurveValidationError("curve needs at least 2 distinct vertices")
    seg_lens = np.hypot(*(arr[1:] - arr[:-1]).T)
    cum = np.concatenate([[0.0], np.cumsum(seg_lens)])
    arr.flags.writeable = False
    cum.flags.writeable = False
    return PolygonalCurve(vertices=arr, cum_len=cum)


def curve_length(c: PolygonalCurve) -> float:
    """Total arc length of the curve."""
    return c.length


def point_at(c: PolygonalCurve, p: CurvePoint) -> Point2:
    """Evaluate the curve at a (segment, local parameter) position.

    ``local_param = 1`` on segment ``k`` lands exactly on the start vertex of
    segment ``k + 1`` (the interpolation is evaluated as ``(1-t)a + tb``).
    """
    if not 0 <= p.segment_index < c.n_segments:
        raise IndexError(f"segment index {p.segment_index} out of range")
    if not 0.0 <= p.local_param <= 1.0:
        raise IndexError(f"local parameter {p.local_param} outside [0, 1]")
    a, b = c.segment(p.segment_index)
    t = p.local_param
    q = (1.0 - t) * a + t * b
    return Point2(float(q[0]), float(q[1]))


def load_curve(path) -> PolygonalCurve:
    """Load a curve file.

    ``.json`` files must contain ``{"points": [[x0, y0], [x1, y1], ...]}``;
    any other extension is parsed as whitespace text with one ``x y`` pair
    per line.
    """
    path = Path(path)
    if path.suffix.lower() == ".json":
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise CurveParseError(f"{path}: invalid JSON ({exc})") from exc
        if not isinstance(data, dict) or "points" not in data:
            raise CurveParseError(f'{path}: expected an object with a "points" key')
        points = data["points"]
    else:
        points = []
        try:
            text = path.read_text()
        except UnicodeDecodeError as exc:
            raise CurveParseError(f"{path}: not a text file") from exc
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise CurveParseError(f"{path}:{lineno}: expected two numbers")
            try:
                points.append([float(parts[0]), float(parts[1])])
            except ValueError as exc:
                raise CurveParseError(f"{path}:{lineno}: {exc}") from exc
    try:
        return make_curve(points)
    except CurveValidationError:
        raise
    except (TypeError, ValueError) as exc:
        raise CurveParseError(f"{path}: {exc}") from exc


def save_curve(c: PolygonalCurve, path) -> None:
    """Write a curve in the format implied by the file extension."""
    path = Path(path)
    if path.suffix.lower() == ".json":
        payload = {"points": [[float(x), float(y)] for x, y in c.vertices]}
        path.write_text(json.dumps(payload))
    else:
        lines = [f"{float(x)!r} {float(y)!r}" for x, y in c.vertices]
        path.write_text("\n".join(lines) + "\n")


def euclidean(p, q) -> float:
    return math.hypot(p[0] - q[0], p[1] - q[1])

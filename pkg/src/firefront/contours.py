"""Marching-squares iso-contour extraction.

Works on the pixel-center lattice: a contour vertex (r, c) with fractional
coordinates lies between adjacent pixel centers, linearly interpolated along
the connecting edge. Closed loops repeat their first vertex; open curves end
where the contour leaves the grid.
"""

from __future__ import annotations

import numpy as np

# Segment lookup per marching-squares case (corner above-level bits
# v0=top-left, v1=top-right, v2=bottom-right, v3=bottom-left).
# Edges: T=top, R=right, B=bottom, L=left. Saddles (5, 10) resolved at runtime.
_CASE_SEGMENTS = {
    1: [("L", "T")],
    2: [("T", "R")],
    3: [("L", "R")],
    4: [("R", "B")],
    6: [("T", "B")],
    7: [("L", "B")],
    8: [("B", "L")],
    9: [("T", "B")],
    11: [("R", "B")],
    12: [("R", "L")],
    13: [("T", "R")],
    14: [("L", "T")],
}


def _edge_key(side: str, i: int, j: int):
    if side == "T":
        return ("h", i, j)
    if side == "B":
        return ("h", i + 1, j)
    if side == "L":
        return ("v", i, j)
    return ("v", i, j + 1)  # R


def _edge_point(key, values: np.ndarray, level: float):
    kind, i, j = key
    if kind == "h":
        v0, v1 = values[i, j], values[i, j + 1]
        t = 0.5 if v1 == v0 else (level - v0) / (v1 - v0)
        return (float(i), j + float(np.clip(t, 0.0, 1.0)))
    v0, v1 = values[i, j], values[i + 1, j]
    t = 0.5 if v1 == v0 else (level - v0) / (v1 - v0)
    return (i + float(np.clip(t, 0.0, 1.0)), float(j))


def find_contours(values: np.ndarray, level: float) -> list[np.ndarray]:
    """Extract iso-contours of ``values`` at ``level``.

    Returns a list of (N, 2) float arrays of (row, col) vertices. Saddle cells
    are disambiguated with the cell-center average, matching the usual
    marching-squares convention.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim != 2 or min(values.shape) < 2:
        raise ValueError(f"need a 2D grid of at least 2x2 pixels, got {values.shape}")
    above = values > level
    a0 = above[:-1, :-1]
    a1 = above[:-1, 1:]
    a2 = above[1:, 1:]
    a3 = above[1:, :-1]
    case = (a0.astype(np.uint8) | (a1.astype(np.uint8) << 1)
            | (a2.astype(np.uint8) << 2) | (a3.astype(np.uint8) << 3))

    segments = []
    for i, j in np.argwhere((case != 0) & (case != 15)):
        c = case[i, j]
        if c == 5 or c == 10:
            center = 0.25 * (values[i, j] + values[i, j + 1]
                             + values[i + 1, j] + values[i + 1, j + 1])
            if c == 5:
                pairs = [("T", "R"), ("B", "L")] if center > level else [("L", "T"), ("R", "B")]
            else:
                pairs = [("L", "T"), ("R", "B")] if center > level else [("T", "R"), ("B", "L")]
        else:
            pairs = _CASE_SEGMENTS[c]
        for a, b in pairs:
            segments.append((_edge_key(a, i, j), _edge_key(b, i, j)))

    if not segments:
        return []

    # Chain segments into polylines: walk unused segments from edge to edge.
    seg_at: dict = {}
    for idx, (a, b) in enumerate(segments):
        seg_at.setdefault(a, []).append(idx)
        seg_at.setdefault(b, []).append(idx)
    used = [False] * len(segments)

    def walk(start):
        path = [start]
        node = start
        while True:
            nxt = next((i for i in seg_at[node] if not used[i]), None)
            if nxt is None:
                return path
            used[nxt] = True
            a, b = segments[nxt]
            node = b if a == node else a
            path.append(node)
            if node == start:
                return path

    contours = []
    keys = sorted(seg_at)
    # Open curves first (their endpoints touch an odd number of segments),
    # then whatever remains forms closed loops.
    for start in [k for k in keys if len(seg_at[k]) % 2 == 1] + keys:
        while any(not used[i] for i in seg_at[start]):
            path = walk(start)
            if len(path) > 1:
                contours.append(np.array([_edge_point(k, values, level) for k in path]))

    return contours


def contour_length(polyline: np.ndarray) -> float:
    diffs = np.diff(polyline, axis=0)
    return float(np.hypot(diffs[:, 0], diffs[:, 1]).sum())

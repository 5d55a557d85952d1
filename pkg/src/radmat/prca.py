"""Peak reflection cell area: the half-power region around the RA-map peak.

The region is the 4-connected component of cells whose amplitude is at
least peak/sqrt(2), grown from the global peak so isolated sidelobes are
excluded.  Each cell's polar corner coordinates (bin edges) are mapped to
Cartesian (x = r*sin(theta), y = r*cos(theta)) and its area evaluated
with the shoelace formula; the region area is the sum over cells.
"""

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .spectral import RangeAngleMap


@dataclass(frozen=True)
class PrcaRegion:
    cell_indices: tuple  # ((range_bin, angle_bin), ...)
    area_m2: float
    peak_index: tuple
    threshold_value: float

    def __post_init__(self):
        if self.area_m2 <= 0:
            raise DomainError("region area must be positive")
        if self.peak_index not in self.cell_indices:
            raise DomainError("region must contain its peak cell")

    def to_document(self) -> dict:
        return {
            "kind": "prca_region",
            "cells": [[int(i), int(j)] for i, j in self.cell_indices],
            "peak_cell": [int(self.peak_index[0]), int(self.peak_index[1])],
            "threshold_value": self.threshold_value,
            "area_m2": self.area_m2,
        }


def extract_region(ra_map: RangeAngleMap):
    """Half-power connected component containing the global peak.

    Returns (cells, peak_index, threshold).  Peak ties break toward the
    lowest (range_bin, angle_bin) in row-major order.
    """
    mags = ra_map.magnitudes
    peak_value = float(mags.max())
    if peak_value <= 0.0:
        raise DomainError("map has no positive peak")
    peak_index = tuple(int(v) for v in np.unravel_index(int(np.argmax(mags)), mags.shape))
    threshold = peak_value / np.sqrt(2.0)

    n_r, n_a = mags.shape
    seen = {peak_index}
    queue = deque([peak_index])
    cells = []
    while queue:
        i, j = queue.popleft()
        cells.append((i, j))
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            ni, nj = i + di, j + dj
            if 0 <= ni < n_r and 0 <= nj < n_a and (ni, nj) not in seen:
                if mags[ni, nj] >= threshold:
                    seen.add((ni, nj))
                    queue.append((ni, nj))
    cells.sort()
    return tuple(cells), peak_index, float(threshold)


def shoelace_area(vertices) -> float:
    """Absolute polygon area from an ordered vertex list (>= 3 points)."""
    pts = np.asarray(vertices, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 3:
        raise DomainError("shoelace needs at least 3 ordered 2D vertices")
    x, y = pts[:, 0], pts[:, 1]
    return float(0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y)))


def _angle_edges(grid: np.ndarray) -> np.ndarray:
    mids = (grid[:-1] + grid[1:]) / 2.0
    first = grid[0] - (grid[1] - grid[0]) / 2.0 if grid.size > 1 else grid[0] - 0.5
    last = grid[-1] + (grid[-1] - grid[-2]) / 2.0 if grid.size > 1 else grid[0] + 0.5
    return np.concatenate([[first], mids, [last]])


def region_area(cells, ra_map: RangeAngleMap) -> float:
    """Total Cartesian area of the region's polar grid cells."""
    if not cells:
        raise DomainError("region is empty")
    edges = _angle_edges(ra_map.angle_grid_rad)
    dr = ra_map.range_bin_m
    total = 0.0
    for i, j in cells:
        r_lo = max((i - 0.5) * dr, 0.0)
        r_hi = (i + 0.5) * dr
        t_lo, t_hi = edges[j], edges[j + 1]
        corners = [
            (r_lo * np.sin(t_lo), r_lo * np.cos(t_lo)),
            (r_hi * np.sin(t_lo), r_hi * np.cos(t_lo)),
            (r_hi * np.sin(t_hi), r_hi * np.cos(t_hi)),
            (r_lo * np.sin(t_hi), r_lo * np.cos(t_hi)),
        ]
        total += shoelace_area(corners)
    return total


def compute_prca(ra_map: RangeAngleMap) -> PrcaRegion:
    cells, peak_index, threshold = extract_region(ra_map)
    return PrcaRegion(
        cell_indices=cells,
        area_m2=region_area(cells, ra_map),
        peak_index=peak_index,
        threshold_value=threshold,
    )

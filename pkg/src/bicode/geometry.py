"""Half-plane intersections in the nonnegative (r1, r2) quadrant.

Regions here are down-left closed (every constraint has nonnegative
coefficients), so the interesting output is the upper-right boundary:
a polyline of vertices with increasing r1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

VERTEX_TOL = 1e-9


@dataclass
class Region2D:
    """Constraints a1*r1 + a2*r2 <= b (with r >= 0 implied) plus the
    computed boundary polyline."""

    constraints: list  # (a1, a2, b, tag)
    vertices: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.vertices is None:
            self.vertices = intersect_halfplanes(
                [(a1, a2, b) for (a1, a2, b, _) in self.constraints])

    def contains(self, r1: float, r2: float, tol: float = VERTEX_TOL) -> bool:
        if r1 < -tol or r2 < -tol:
            return False
        return all(a1 * r1 + a2 * r2 <= b + tol
                   for (a1, a2, b, _) in self.constraints)

    def max_r2(self, r1: float) -> float:
        """Largest feasible r2 at the given r1 (-inf if r1 is out of range)."""
        best = np.inf
        for (a1, a2, b, _) in self.constraints:
            slack = b - a1 * r1
            if a2 > 0.0:
                best = min(best, slack / a2)
            elif slack < 0.0:
                return -np.inf
        return max(best, -np.inf) if best != np.inf else np.inf

    def csv_rows(self):
        """One row per vertex then one per constraint, fixed order."""
        rows = [("vertex", g12(v[0]), g12(v[1]), "") for v in self.vertices]
        rows += [("constraint", g12(a1), g12(a2), f"{g12(b)};{tag}")
                 for (a1, a2, b, tag) in self.constraints]
        return rows


def g12(x: float) -> str:
    """12-significant-digit rendering used by every CSV emitter."""
    return format(float(x), ".12g")


def intersect_halfplanes(constraints) -> np.ndarray:
    """Boundary polyline of {r >= 0: a1*r1 + a2*r2 <= b for all}.

    Constraints must have a1, a2 >= 0 and a1 + a2 > 0.  Returns vertices
    sorted by increasing r1 (ties broken by decreasing r2); an empty
    interior degenerates to the single vertex (0, 0).
    """
    cons = [(float(a1), float(a2), float(b)) for (a1, a2, b) in constraints]
    if not cons:
        raise ValueError("need at least one constraint")
    for (a1, a2, b) in cons:
        if a1 < 0 or a2 < 0 or a1 + a2 <= 0:
            raise ValueError(f"not a down-left-closed constraint: {(a1, a2, b)}")
    if any(b < -VERTEX_TOL for (_, _, b) in cons):
        return np.zeros((1, 2))

    def feasible(pt):
        r1, r2 = pt
        if r1 < -VERTEX_TOL or r2 < -VERTEX_TOL:
            return False
        return all(a1 * r1 + a2 * r2 <= b + VERTEX_TOL for (a1, a2, b) in cons)

    cand = []
    # axis intercepts of the binding constraints
    tops = [b / a2 for (a1, a2, b) in cons if a2 > 0]
    rights = [b / a1 for (a1, a2, b) in cons if a1 > 0]
    if not tops or not rights:
        raise ValueError("region is unbounded")
    cand.append((0.0, min(tops)))
    cand.append((min(rights), 0.0))
    # pairwise line intersections
    for u in range(len(cons)):
        for v in range(u + 1, len(cons)):
            a1, a2, b = cons[u]
            c1, c2, d = cons[v]
            det = a1 * c2 - c1 * a2
            if abs(det) < 1e-15:
                continue
            r1 = (b * c2 - d * a2) / det
            r2 = (a1 * d - c1 * b) / det
            cand.append((r1, r2))

    verts = []
    for pt in cand:
        if not feasible(pt):
            continue
        pt = (max(pt[0], 0.0), max(pt[1], 0.0))
        if not any(abs(pt[0] - q[0]) <= VERTEX_TOL and abs(pt[1] - q[1]) <= VERTEX_TOL
                   for q in verts):
            verts.append(pt)
    if not verts:
        return np.zeros((1, 2))
    verts.sort(key=lambda q: (q[0], -q[1]))
    return np.array(verts)

#!/usr/bin/env python3
"""Generates the convex-polygon fixture meshes in data/.

Centroidal Voronoi tessellations of the unit square: random seeds,
Lloyd iterations, and the mirror trick (reflecting the generators across
all four sides) so every Voronoi cell is exactly clipped to the square
with shared vertices between neighboring cells.

The output meshes are checked into the repository; rerun this script
only to regenerate them (it is deterministic).
"""

import argparse
from pathlib import Path

import numpy as np
from scipy.spatial import Voronoi


def mirrored(points):
    left = points.copy()
    left[:, 0] = -left[:, 0]
    right = points.copy()
    right[:, 0] = 2.0 - right[:, 0]
    down = points.copy()
    down[:, 1] = -down[:, 1]
    up = points.copy()
    up[:, 1] = 2.0 - up[:, 1]
    return np.vstack([points, left, right, down, up])


def interior_cells(points):
    """Voronoi cells of the first len(points) generators; all closed."""
    vor = Voronoi(mirrored(points))
    cells = []
    for i in range(len(points)):
        region = vor.regions[vor.point_region[i]]
        assert -1 not in region, "unbounded interior cell"
        cells.append(vor.vertices[region])
    return cells


def polygon_centroid(v):
    x, y = v[:, 0], v[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cr = x * yn - xn * y
    a = cr.sum() / 2.0
    cx = ((x + xn) * cr).sum() / (6.0 * a)
    cy = ((y + yn) * cr).sum() / (6.0 * a)
    return np.array([cx, cy]), a


def signed_area(v):
    x, y = v[:, 0], v[:, 1]
    return (x * np.roll(y, -1) - np.roll(x, -1) * y).sum() / 2.0


def lloyd(points, iters):
    for _ in range(iters):
        cells = interior_cells(points)
        points = np.array([polygon_centroid(c)[0] for c in cells])
        points = np.clip(points, 1e-9, 1.0 - 1e-9)
    return points


def build_mesh(n_cells, seed, iters):
    rng = np.random.default_rng(seed)
    points = lloyd(rng.random((n_cells, 2)), iters)
    cells = interior_cells(points)

    # Merge Voronoi vertices shared between cells (and snap to the
    # square boundary) with a quantized lookup.
    tol = 1e-9
    vert_ids = {}
    verts = []

    def add(p):
        p = np.where(np.abs(p) < tol, 0.0, p)
        p = np.where(np.abs(p - 1.0) < tol, 1.0, p)
        key = (round(p[0] / tol), round(p[1] / tol))
        if key not in vert_ids:
            vert_ids[key] = len(verts)
            verts.append(p)
        return vert_ids[key]

    elements = []
    for cell in cells:
        if signed_area(cell) < 0:
            cell = cell[::-1]
        loop = []
        for p in cell:
            vid = add(p)
            if not loop or loop[-1] != vid:
                loop.append(vid)
        if loop[0] == loop[-1]:
            loop.pop()
        assert len(loop) >= 3
        elements.append(loop)
    return np.array(verts), elements


def write_mesh(path, verts, elements):
    with open(path, "w") as f:
        f.write("# centroidal Voronoi fixture (scripts/make_poly_fixtures.py)\n")
        f.write(f"counts {len(verts)} {len(elements)} 1\n")
        for p in verts:
            f.write(f"v {p[0]:.17g} {p[1]:.17g}\n")
        for loop in elements:
            f.write(f"e {len(loop)} 1 " + " ".join(map(str, loop)) + "\n")
        f.write("mat 1 1\n")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data"))
    ap.add_argument("--iters", type=int, default=120)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(exist_ok=True)
    for n in (16, 64, 256, 1024):
        verts, elements = build_mesh(n, seed=12345, iters=args.iters)
        total = sum(abs(signed_area(verts[np.array(l)])) for l in elements)
        assert abs(total - 1.0) < 1e-9, total
        sides = {}
        for l in elements:
            sides[len(l)] = sides.get(len(l), 0) + 1
        path = out / f"poly_{n}.mesh"
        write_mesh(path, verts, elements)
        print(f"{path.name}: {len(verts)} vertices, {len(elements)} cells, sides {sides}")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
# Copyright The crbm Authors
# SPDX-License-Identifier: Apache-2.0
"""Writes the curved-hole fixture meshes in Gmsh MSH 2.2 ASCII format.

box_circle:  [-1,1]^2 minus the disc of radius 0.3, O-grid.
duct_ellipse_pml: [-2,2]x[-1,1] minus the ellipse a=0.3, b=0.25, with
structured PML blocks for |x| > 1 sharing nodes with the O-grid.
"""

import argparse
import math
import os

TAGS = {"bottom": 1, "right": 2, "top": 3, "left": 4, "hole": 5}
REGIONS = {"interior": 1, "pml_left": 2, "pml_right": 3}


class Builder:
    def __init__(self):
        self.nodes = []
        self.index = {}
        self.edges = []
        self.tris = []

    def node(self, x, y):
        key = (round(x, 12), round(y, 12))
        if key not in self.index:
            self.index[key] = len(self.nodes)
            self.nodes.append((x, y))
        return self.index[key]

    def quad(self, a, b, c, d, region):
        # a-b-c-d counterclockwise; split along the shorter diagonal
        pa, pc = self.nodes[a], self.nodes[c]
        pb, pd = self.nodes[b], self.nodes[d]
        if math.dist(pa, pc) <= math.dist(pb, pd):
            self.tris += [(a, b, c, region), (a, c, d, region)]
        else:
            self.tris += [(a, b, d, region), (b, c, d, region)]


def square_perimeter(n):
    """Counterclockwise points on the unit square boundary, n per side, with side names."""
    pts = []
    for i in range(n):
        pts.append((-1.0 + 2.0 * i / n, -1.0, "bottom"))
    for i in range(n):
        pts.append((1.0, -1.0 + 2.0 * i / n, "right"))
    for i in range(n):
        pts.append((1.0 - 2.0 * i / n, 1.0, "top"))
    for i in range(n):
        pts.append((-1.0, 1.0 - 2.0 * i / n, "left"))
    return pts


def ogrid(b, n_side, layers, ax, by, grading):
    """Layers of nodes between the ellipse (ax, by) and the square [-1,1]^2."""
    outer = square_perimeter(n_side)
    ring = len(outer)
    grid = []
    for j in range(layers + 1):
        s = (j / layers) ** grading
        row = []
        for x, y, _ in outer:
            t = math.atan2(y, x)
            hx, hy = ax * math.cos(t), by * math.sin(t)
            if j == layers:
                px, py = x, y
            else:
                px, py = hx + s * (x - hx), hy + s * (y - hy)
            row.append(b.node(px, py))
        grid.append(row)
    for j in range(layers):
        for i in range(ring):
            i2 = (i + 1) % ring
            # inner ring first: counterclockwise order is inner_i, inner_i2, outer_i2, outer_i
            b.quad(grid[j][i], grid[j][i2], grid[j + 1][i2], grid[j + 1][i], REGIONS["interior"])
    for i in range(ring):
        b.edges.append((grid[0][(i + 1) % ring], grid[0][i], TAGS["hole"]))
    return grid, outer


def write_msh(path, b, names):
    with open(path, "w", encoding="ascii") as f:
        f.write("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n")
        f.write("$PhysicalNames\n%d\n" % len(names))
        for dim, tag, name in names:
            f.write('%d %d "%s"\n' % (dim, tag, name))
        f.write("$EndPhysicalNames\n")
        f.write("$Nodes\n%d\n" % len(b.nodes))
        for i, (x, y) in enumerate(b.nodes):
            f.write("%d %r %r 0\n" % (i + 1, x, y))
        f.write("$EndNodes\n")
        f.write("$Elements\n%d\n" % (len(b.edges) + len(b.tris)))
        k = 1
        for v0, v1, tag in b.edges:
            f.write("%d 1 2 %d %d %d %d\n" % (k, tag, tag, v0 + 1, v1 + 1))
            k += 1
        for v0, v1, v2, reg in b.tris:
            f.write("%d 2 2 %d %d %d %d %d\n" % (k, reg, reg, v0 + 1, v1 + 1, v2 + 1))
            k += 1
        f.write("$EndElements\n")


def box_circle(n_side, layers):
    b = Builder()
    grid, outer = ogrid(b, n_side, layers, 0.3, 0.3, 1.0)
    ring = len(outer)
    for i in range(ring):
        side = outer[i][2]
        b.edges.append((grid[-1][i], grid[-1][(i + 1) % ring], TAGS[side]))
    names = [(1, t, n) for n, t in TAGS.items()] + [(2, 1, "interior")]
    return b, names


def duct_ellipse(n_side, layers, n_pml):
    b = Builder()
    grid, outer = ogrid(b, n_side, layers, 0.3, 0.25, 1.0)
    ring = len(outer)
    for i in range(ring):
        side = outer[i][2]
        if side in ("bottom", "top"):
            b.edges.append((grid[-1][i], grid[-1][(i + 1) % ring], TAGS[side]))
    ys = [-1.0 + 2.0 * j / n_side for j in range(n_side + 1)]
    for sign, region in ((-1.0, "pml_left"), (1.0, "pml_right")):
        xs = [sign * (1.0 + i / n_pml) for i in range(n_pml + 1)]
        if sign < 0:
            xs.reverse()
        ids = [[b.node(x, y) for x in xs] for y in ys]
        for j in range(n_side):
            for i in range(n_pml):
                b.quad(ids[j][i], ids[j][i + 1], ids[j + 1][i + 1], ids[j + 1][i], REGIONS[region])
        for i in range(n_pml):
            b.edges.append((ids[0][i], ids[0][i + 1], TAGS["bottom"]))
            b.edges.append((ids[n_side][i + 1], ids[n_side][i], TAGS["top"]))
        outer_col = 0 if sign < 0 else n_pml
        side = "left" if sign < 0 else "right"
        for j in range(n_side):
            a, c = ids[j][outer_col], ids[j + 1][outer_col]
            b.edges.append((c, a) if sign < 0 else (a, c))
            b.edges[-1] = b.edges[-1] + (TAGS[side],)
    names = [(1, t, n) for n, t in TAGS.items()] + [(2, t, n) for n, t in REGIONS.items()]
    return b, names


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "data", "meshes"))
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    jobs = {
        "box_circle_coarse.msh": box_circle(12, 6),
        "box_circle.msh": box_circle(80, 28),
        "duct_ellipse_pml.msh": duct_ellipse(52, 20, 26),
    }
    for name, (b, names) in jobs.items():
        write_msh(os.path.join(args.out, name), b, names)
        print("%s: %d nodes, %d triangles" % (name, len(b.nodes), len(b.tris)))


if __name__ == "__main__":
    main()

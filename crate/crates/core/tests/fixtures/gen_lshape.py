"""Generate the L-shape fixture mesh.

Elastic body (-1,1)^2 minus [0,1)^2 on a structured grid, surrounded by a
fluid disk of radius 3 centred at the origin. Fluid nodes keep a distance
from the L boundary so every boundary segment is a Gabriel edge and the
Delaunay triangulation conforms to the interface.

    python3 gen_lshape.py > lshape.msh
"""

import sys

import numpy as np
from scipy.spatial import Delaunay

S = 0.5           # elastic grid spacing
SF = 0.4          # fluid spacing
R = 3.0


def in_l(x, y):
    return -1 <= x <= 1 and -1 <= y <= 1 and not (x > 0 and y > 0)


def dist_to_l_boundary(p):
    corners = [(-1, -1), (1, -1), (1, 0), (0, 0), (0, 1), (-1, 1)]
    best = np.inf
    for i in range(6):
        a = np.array(corners[i], float)
        b = np.array(corners[(i + 1) % 6], float)
        t = np.clip(np.dot(p - a, b - a) / np.dot(b - a, b - a), 0, 1)
        best = min(best, np.linalg.norm(p - (a + t * (b - a))))
    return best


def main():
    n = int(round(1 / S))
    pts = []
    for i in range(-n, n + 1):
        for j in range(-n, n + 1):
            x, y = i * S, j * S
            if in_l(x, y):
                pts.append((x, y))
    n_circle = int(np.ceil(2 * np.pi * R / SF))
    for k in range(n_circle):
        a = 2 * np.pi * k / n_circle
        pts.append((R * np.cos(a), R * np.sin(a)))
    rng = np.random.default_rng(7)
    m = int(np.ceil(R / SF))
    for i in range(-m, m + 1):
        for j in range(-m, m + 1):
            p = np.array([i * SF, j * SF]) + rng.uniform(-0.05, 0.05, 2) * SF
            if np.hypot(*p) > R - 0.7 * SF:
                continue
            if in_l(*p) or dist_to_l_boundary(p) < 0.8 * SF:
                continue
            pts.append(tuple(p))
    pts = np.array(pts)
    tri = Delaunay(pts)

    out = sys.stdout
    out.write("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\n%d\n" % len(pts))
    for i, (x, y) in enumerate(pts):
        out.write("%d %.17g %.17g 0\n" % (i + 1, x, y))
    out.write("$EndNodes\n$Elements\n%d\n" % len(tri.simplices))
    for k, s in enumerate(tri.simplices):
        c = pts[s].mean(axis=0)
        tag = 1 if in_l(*c) else 2
        out.write("%d 2 2 %d %d %d %d %d\n" % (k + 1, tag, tag, s[0] + 1, s[1] + 1, s[2] + 1))
    out.write("$EndElements\n")


if __name__ == "__main__":
    main()

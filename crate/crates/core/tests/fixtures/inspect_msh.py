"""Count elements and edge kinds of an MSH 2.2 triangle mesh.

Independent of the Rust importer: edges are classified purely from the
physical tags of the triangles that share them.

    python3 inspect_msh.py lshape.msh > lshape.manifest
"""

import math
import sys
from collections import defaultdict


def read(path):
    nodes, tris = {}, []
    with open(path) as f:
        lines = [l.strip() for l in f if l.strip()]
    i = 0
    while i < len(lines):
        if lines[i] == "$Nodes":
            for l in lines[i + 2 : i + 2 + int(lines[i + 1])]:
                k, x, y, _ = l.split()
                nodes[int(k)] = (float(x), float(y))
        if lines[i] == "$Elements":
            for l in lines[i + 2 : i + 2 + int(lines[i + 1])]:
                t = [int(v) for v in l.split()]
                if t[1] == 2:
                    tris.append((t[3], t[3 + t[2] :]))
        i += 1
    return nodes, tris


def main(path):
    nodes, tris = read(path)
    owners = defaultdict(list)
    h = 0.0
    for tag, vs in tris:
        for a, b in ((vs[0], vs[1]), (vs[1], vs[2]), (vs[2], vs[0])):
            owners[tuple(sorted((a, b)))].append(tag)
            h = max(h, math.dist(nodes[a], nodes[b]))
    counts = defaultdict(int)
    for tags in owners.values():
        if len(tags) == 2:
            kind = {(1, 1): "interior_elastic", (2, 2): "interior_fluid"}.get(tuple(tags), "interface")
        elif tags == [2]:
            kind = "artificial"
        else:
            kind = "free_elastic"
        counts[kind] += 1
    print("elements_elastic = %d" % sum(1 for t, _ in tris if t == 1))
    print("elements_fluid = %d" % sum(1 for t, _ in tris if t == 2))
    for k in ("interior_elastic", "interior_fluid", "interface", "artificial", "free_elastic"):
        print("%s = %d" % (k, counts[k]))
    print("mesh_size = %.17g" % h)


if __name__ == "__main__":
    main(sys.argv[1])

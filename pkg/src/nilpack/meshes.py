"""Static scene geometry: prism surfaces, ball arrangements, OBJ output."""
from __future__ import annotations

import io
from pathlib import Path

import numpy as np

from nilpack.geodesics import TriangleMesh, sphere_mesh
from nilpack.packing import kissing_tolerance, optimal_radius
from nilpack.tilings import DEFAULT_WORD_DEPTH, PrismTiling, orbit


def merge_meshes(meshes) -> TriangleMesh:
    verts, faces, offset = [], [], 0
    for m in meshes:
        verts.append(m.vertices)
        faces.append(m.faces + offset)
        offset += len(m.vertices)
    return TriangleMesh(np.vstack(verts), np.vstack(faces).astype(np.int64))


def prism_mesh(t: PrismTiling) -> TriangleMesh:
    """Triangulated boundary of the prism A1..Ap B1..Bp (2p vertices)."""
    p = t.p
    verts = np.array([[v.a, v.b, v.c] for v in t.base_vertices + t.top_vertices])
    faces = []
    for i in range(p):
        j = (i + 1) % p
        faces += [(i, j, p + j), (i, p + j, p + i)]
    for i in range(1, p - 1):
        faces += [(0, i + 1, i), (p, p + i, p + i + 1)]
    mesh = TriangleMesh(verts, np.array(faces, dtype=np.int64))
    if mesh.enclosed_volume() < 0:
        mesh = TriangleMesh(verts, mesh.faces[:, ::-1].copy())
    return mesh


def arrangement_mesh(t: PrismTiling, n_theta: int = 16, n_phi: int = 32,
                     word_depth: int = DEFAULT_WORD_DEPTH) -> tuple[TriangleMesh, int]:
    """Central ball, every ball touching it, and the prism around O.

    Returns the merged mesh and the number of balls in it.
    """
    r = optimal_radius(t)
    ball = sphere_mesh(r, n_theta, n_phi)
    tol = kissing_tolerance(r)
    shell = [o for o in orbit(t, word_depth) if abs(o.distance - 2.0 * r) <= tol]
    parts = [ball] + [ball.transformed(o.element) for o in shell] + [prism_mesh(t)]
    return merge_meshes(parts), 1 + len(shell)


def format_obj(mesh: TriangleMesh, precision: int = 10) -> str:
    buf = io.StringIO()
    for x, y, z in mesh.vertices:
        buf.write(f"v {x:.{precision}g} {y:.{precision}g} {z:.{precision}g}\n")
    for i, j, k in mesh.faces + 1:
        buf.write(f"f {i} {j} {k}\n")
    return buf.getvalue()


def write_obj(path, mesh: TriangleMesh, precision: int = 10):
    Path(path).write_text(format_obj(mesh, precision), newline="\n")


def read_obj(text: str) -> TriangleMesh:
    verts, faces = [], []
    for line in text.splitlines():
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "v":
            verts.append([float(v) for v in parts[1:4]])
        elif parts[0] == "f":
            faces.append([int(v.split("/")[0]) - 1 for v in parts[1:4]])
    return TriangleMesh(np.array(verts), np.array(faces, dtype=np.int64))

"""Dual lattice of the square-octagon color code on a torus.

Checks are colored vertices (red squares of the primal picture have weight
4, green/blue octagons weight 8), data qubits are the triangular faces, and
each triangle touches exactly one vertex of each color.  The torus is a
(d/2) x (d/2) tiling of an eight-qubit unit cell: cell (X, Y) sits at
octagon-grid position X*(1,1) + Y*(-1,1), which keeps the octagon
checkerboard consistent for every even distance d.

Only the Z-check / X-flip sector is represented (CSS halving); a flip
pattern is a plain boolean array over faces and a shift frame a float array
over faces.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .gkp import SQRT_PI, TWO_SQRT_PI, centered_mod, conditional_flip_prob

__all__ = [
    "RED",
    "GREEN",
    "BLUE",
    "COLOR_NAMES",
    "DualLattice",
    "AnalogSyndrome",
    "build_lattice",
    "syndrome_of",
    "measure_checks",
    "logical_flips",
]

RED, GREEN, BLUE = 0, 1, 2
COLOR_NAMES = {RED: "R", GREEN: "G", BLUE: "B"}

# face corners around a red square, in id order
_N, _E, _S, _W = 0, 1, 2, 3


@dataclass(frozen=True)
class AnalogSyndrome:
    """Continuous check outcomes with derived signs and reliabilities.

    ``sign`` is True where the check reads -1 (outcome nearest an odd
    multiple of sqrt(pi)); ``reliability`` is the probability that the sign
    is wrong given the outcome.
    """

    q_m: np.ndarray
    sign: np.ndarray
    reliability: np.ndarray


class DualLattice:
    """Immutable dual-lattice geometry for one code distance."""

    def __init__(self, d: int):
        if d < 4 or d % 2 != 0:
            raise ValueError("distance must be an even integer >= 4")
        self.d = d
        a = d // 2
        self.a = a
        self.n_red = 2 * a * a
        self.n_green = a * a
        self.n_blue = a * a
        self.n_vertices = d * d
        self.n_faces = 2 * d * d
        self.n_edges = 3 * d * d
        self._build()
        self._validate()

    # ---- index helpers -------------------------------------------------

    def _cell(self, i: int, j: int) -> tuple[int, int, int]:
        """Reduce an octagon-grid label to (X mod a, Y mod a, parity)."""
        s = (i + j) % 2
        x = ((i + j - s) // 2) % self.a
        y = ((j - i + s) // 2) % self.a
        return x, y, s

    def red_id(self, i: int, j: int) -> int:
        x, y, t = self._cell(i, j)
        return (x * self.a + y) * 2 + t

    def oct_id(self, i: int, j: int) -> int:
        x, y, s = self._cell(i, j)
        if s == 1:  # green
            return 2 * self.a * self.a + x * self.a + y
        return 3 * self.a * self.a + x * self.a + y

    def _square_of_red(self, rid: int) -> tuple[int, int]:
        t = rid % 2
        lin = rid // 2
        x, y = divmod(lin, self.a)
        return x - y + t, x + y

    # ---- construction --------------------------------------------------

    def _build(self) -> None:
        nf, nv, ne = self.n_faces, self.n_vertices, self.n_edges
        n_ro = 4 * self.n_red
        face_vertices = np.empty((nf, 3), np.int64)  # (red, green, blue)
        edge_endpoints = np.empty((ne, 2), np.int64)
        edge_faces = np.full((ne, 2), -1, np.int64)
        vertex_color = np.empty(nv, np.int8)
        vertex_color[:self.n_red] = RED
        vertex_color[self.n_red:self.n_red + self.n_green] = GREEN
        vertex_color[self.n_red + self.n_green:] = BLUE
        vertex_pos = np.zeros((nv, 2), np.float64)

        green_end = 3 * self.a * self.a

        def put_face(fid, red, oa, ob):
            # orient (red, green, blue) by color; green ids precede blue
            if oa < green_end:
                face_vertices[fid] = (red, oa, ob)
            else:
                face_vertices[fid] = (red, ob, oa)

        for rid in range(self.n_red):
            i, j = self._square_of_red(rid)
            vertex_pos[rid] = (i + 0.5, j + 0.5)
            o00 = self.oct_id(i, j)
            o10 = self.oct_id(i + 1, j)
            o01 = self.oct_id(i, j + 1)
            o11 = self.oct_id(i + 1, j + 1)
            base = rid * 4
            put_face(base + _N, rid, o01, o11)
            put_face(base + _E, rid, o10, o11)
            put_face(base + _S, rid, o00, o10)
            put_face(base + _W, rid, o00, o01)
            # red-octagon edges, slot k = 0..3 toward o00, o10, o01, o11
            for k, oid in enumerate((o00, o10, o01, o11)):
                edge_endpoints[base + k] = (rid, oid)
            edge_faces[base + 0] = (base + _S, base + _W)
            edge_faces[base + 1] = (base + _S, base + _E)
            edge_faces[base + 2] = (base + _W, base + _N)
            edge_faces[base + 3] = (base + _E, base + _N)

        for oid in range(2 * self.a * self.a):
            vid = 2 * self.a * self.a + oid
            s = 1 if oid < self.a * self.a else 0
            lin = oid % (self.a * self.a)
            x, y = divmod(lin, self.a)
            i, j = x - y + s, x + y
            vertex_pos[vid] = (i, j)
            # octagon-octagon edges owned by (i, j): east and north
            e_east = n_ro + oid * 2 + 0
            e_north = n_ro + oid * 2 + 1
            edge_endpoints[e_east] = (vid, self.oct_id(i + 1, j))
            edge_endpoints[e_north] = (vid, self.oct_id(i, j + 1))
            edge_faces[e_east] = (self.red_id(i, j) * 4 + _S,
                                  self.red_id(i, j - 1) * 4 + _N)
            edge_faces[e_north] = (self.red_id(i, j) * 4 + _W,
                                   self.red_id(i - 1, j) * 4 + _E)

        self.face_vertices = face_vertices
        self.edge_endpoints = edge_endpoints
        self.edge_faces = edge_faces
        self.vertex_color = vertex_color
        self.vertex_pos = vertex_pos

        # per-face edge of each color pair
        face_edge_rg = np.full(nf, -1, np.int64)
        face_edge_rb = np.full(nf, -1, np.int64)
        face_edge_gb = np.full(nf, -1, np.int64)
        for e in range(ne):
            ca = vertex_color[edge_endpoints[e, 0]]
            cb = vertex_color[edge_endpoints[e, 1]]
            pair = {ca, cb}
            for f in edge_faces[e]:
                if pair == {RED, GREEN}:
                    face_edge_rg[f] = e
                elif pair == {RED, BLUE}:
                    face_edge_rb[f] = e
                else:
                    face_edge_gb[f] = e
        self.face_edge_rg = face_edge_rg
        self.face_edge_rb = face_edge_rb
        self.face_edge_gb = face_edge_gb

        # vertex -> faces (CSR)
        flat_v = face_vertices.ravel()
        flat_f = np.repeat(np.arange(nf), 3)
        order = np.argsort(flat_v, kind="stable")
        counts = np.bincount(flat_v, minlength=nv)
        self.vertex_face_indptr = np.zeros(nv + 1, np.int64)
        np.cumsum(counts, out=self.vertex_face_indptr[1:])
        self.vertex_face_indices = flat_f[order]

        self._build_logicals()

    def oct_color(self, vid: int) -> int:
        return int(self.vertex_color[vid])

    def _faces_on_diagonal(self, start: tuple[int, int], step: tuple[int, int],
                           corners: tuple[int, int]) -> np.ndarray:
        """Face strip along a diagonal of squares; one corner pair each."""
        sel = np.zeros(self.n_faces, bool)
        i, j = start
        for _ in range(self.a):
            rid = self.red_id(i, j)
            for c in corners:
                sel[rid * 4 + c] = True
            i += step[0]
            j += step[1]
        return sel

    def _build_logicals(self) -> None:
        # four straight non-contractible face strips: one diagonal direction
        # per octagon color, weight d each
        cand = [
            self._faces_on_diagonal((1, 0), (1, 1), (_S, _E)),    # green "\"
            self._faces_on_diagonal((0, 0), (-1, 1), (_S, _W)),   # green "/"
            self._faces_on_diagonal((0, 0), (1, 1), (_S, _E)),    # blue "\"
            self._faces_on_diagonal((1, 0), (-1, 1), (_S, _W)),   # blue "/"
        ]
        for k, sel in enumerate(cand):
            if sel.sum() != self.d:
                raise AssertionError(f"logical candidate {k} has weight "
                                     f"{sel.sum()} != d")
            if syndrome_of(sel, self).any():
                raise AssertionError(f"logical candidate {k} anticommutes "
                                     "with a check")
        overlap = np.array([[int(np.sum(a & b)) % 2 for b in cand]
                            for a in cand])
        self.logical_x = np.array(cand)
        # pair each X representative with the Z candidate it overlaps oddly
        perm = []
        for i in range(4):
            js = np.flatnonzero(overlap[i])
            if len(js) != 1:
                raise AssertionError("logical pairing is not canonical; "
                                     f"overlap row {overlap[i]}")
            perm.append(int(js[0]))
        if sorted(perm) != [0, 1, 2, 3]:
            raise AssertionError("logical pairing is not a permutation")
        self.logical_z = np.array([cand[j] for j in perm])

    # ---- invariant checks ----------------------------------------------

    def _validate(self) -> None:
        fv = self.face_vertices
        if not (np.all(self.vertex_color[fv[:, 0]] == RED)
                and np.all(self.vertex_color[fv[:, 1]] == GREEN)
                and np.all(self.vertex_color[fv[:, 2]] == BLUE)):
            raise AssertionError("face does not touch one vertex per color")
        deg = np.bincount(fv.ravel(), minlength=self.n_vertices)
        if not np.all(deg[:self.n_red] == 4):
            raise AssertionError("red vertex face-degree != 4")
        if not np.all(deg[self.n_red:] == 8):
            raise AssertionError("octagon vertex face-degree != 8")
        ec = self.vertex_color[self.edge_endpoints]
        if np.any(ec[:, 0] == ec[:, 1]):
            raise AssertionError("edge endpoints share a color")
        if np.any(self.edge_faces < 0):
            raise AssertionError("edge with missing incident face")

    # ---- serialisation --------------------------------------------------

    def to_json_dict(self) -> dict:
        """Documented JSON layout: vertices, faces, edges, logicals."""
        return {
            "distance": self.d,
            "vertices": [
                {"id": v, "color": COLOR_NAMES[int(self.vertex_color[v])],
                 "pos": list(self.vertex_pos[v])}
                for v in range(self.n_vertices)
            ],
            "faces": [
                {"id": f, "vertices": self.face_vertices[f].tolist()}
                for f in range(self.n_faces)
            ],
            "edges": [
                {"id": e, "vertices": self.edge_endpoints[e].tolist(),
                 "faces": self.edge_faces[e].tolist()}
                for e in range(self.n_edges)
            ],
            "logical_x": [np.flatnonzero(row).tolist()
                          for row in self.logical_x],
            "logical_z": [np.flatnonzero(row).tolist()
                          for row in self.logical_z],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_json_dict(), **kwargs)


@lru_cache(maxsize=8)
def build_lattice(d: int) -> DualLattice:
    """Construct (and cache) the dual lattice for even distance d >= 4."""
    return DualLattice(d)


def syndrome_of(flips: np.ndarray, lattice: DualLattice) -> np.ndarray:
    """Vertex parity vector of a face flip pattern."""
    flips = np.asarray(flips)
    if flips.shape != (lattice.n_faces,):
        raise ValueError("flip vector has wrong length")
    touched = lattice.face_vertices[flips.astype(bool)].ravel()
    counts = np.bincount(touched, minlength=lattice.n_vertices)
    return (counts % 2).astype(bool)


def measure_checks(frame: np.ndarray, ancilla_noise: np.ndarray,
                   lattice: DualLattice, sigma_eff) -> AnalogSyndrome:
    """Accumulate incident data shifts into each check plus its own noise.

    ``sigma_eff`` (scalar or per-vertex) sets the reliability model; entries
    with sigma_eff = 0 are treated as perfectly reliable.
    """
    frame = np.asarray(frame, np.float64)
    noise = np.asarray(ancilla_noise, np.float64)
    if frame.shape != (lattice.n_faces,):
        raise ValueError("frame has wrong length")
    if noise.shape != (lattice.n_vertices,):
        raise ValueError("ancilla noise has wrong length")
    q_m = np.zeros(lattice.n_vertices)
    np.add.at(q_m, lattice.face_vertices.ravel(), np.repeat(frame, 3))
    q_m += noise
    sign = np.abs(centered_mod(q_m, TWO_SQRT_PI)) >= SQRT_PI / 2
    sig = np.broadcast_to(np.asarray(sigma_eff, np.float64),
                          q_m.shape).copy()
    reliability = np.zeros_like(q_m)
    for s in np.unique(sig):
        mask = sig == s
        if s > 0:
            reliability[mask] = conditional_flip_prob(q_m[mask], float(s))
    return AnalogSyndrome(q_m=q_m, sign=sign, reliability=reliability)


def logical_flips(residual: np.ndarray, lattice: DualLattice) -> np.ndarray:
    """4-bit logical outcome of a syndrome-free residual flip pattern."""
    residual = np.asarray(residual).astype(bool)
    if syndrome_of(residual, lattice).any():
        raise ValueError("residual has non-zero syndrome; correction "
                         "did not close")
    overlap = lattice.logical_z.astype(np.int64) @ residual.astype(np.int64)
    return overlap % 2 != 0

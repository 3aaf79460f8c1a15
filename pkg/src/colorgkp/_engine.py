"""Shared machinery of the restriction decoder (single- and multi-round).

The decoder restricts the dual lattice to two color pairs (red-blue and
red-green), matches flagged checks on each restricted graph (stacked over
measurement rounds when there are several), projects the matched edges to
the final time slice, and lifts the combined edge set to a face correction
around each red vertex.

Matching on each restricted graph is done twice, in both orders: the first
graph is weighted with the combined two-face odds of each edge, the second
with single-face odds conditioned on the faces selected by the first
matching; the cheaper of the two face-level corrections wins.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import lattice as lat_mod
from .gkp import clamp_probability
from .lattice import BLUE, GREEN, RED, DualLattice, build_lattice
from .matching import StaticGraph, match_defects

__all__ = [
    "LiftingFailure",
    "DecoderError",
    "RestrictedLattice",
    "restricted_lattice",
    "SpacetimeGraph",
    "spacetime_graph",
    "LIFT_TABLE",
    "first_pass_weight",
    "second_pass_weight",
    "lift_mask",
    "decode_layers",
]


class LiftingFailure(Exception):
    """No face subset reproduces the matched edges around a red vertex."""


class DecoderError(Exception):
    """Internal consistency violation (correction does not close syndrome)."""


@dataclass(frozen=True)
class RestrictedLattice:
    """Dual lattice with one octagon color removed.

    Nodes are the red vertices (keeping their ids) followed by the kept
    octagons; each surviving edge is a red-octagon lattice edge and carries
    the two data-qubit faces incident to it.
    """

    removed_color: int
    n_nodes: int
    node_to_vertex: np.ndarray
    vertex_to_node: np.ndarray
    edge_nodes: np.ndarray       # (n_re, 2) restricted node ids
    edge_faces: np.ndarray       # (n_re, 2) data-qubit faces
    edge_lattice_id: np.ndarray  # (n_re,) originating lattice edge
    face_edge: np.ndarray        # (n_faces,) restricted edge of each face


@lru_cache(maxsize=32)
def _restricted(d: int, removed_color: int) -> RestrictedLattice:
    lat = build_lattice(d)
    kept = GREEN if removed_color == BLUE else BLUE
    nv = lat.n_vertices
    vertex_to_node = np.full(nv, -1, np.int64)
    reds = np.arange(lat.n_red)
    vertex_to_node[reds] = reds
    octs = np.flatnonzero(lat.vertex_color == kept)
    vertex_to_node[octs] = lat.n_red + np.arange(octs.size)
    node_to_vertex = np.concatenate([reds, octs])

    n_ro = 4 * lat.n_red
    oct_end = lat.edge_endpoints[:n_ro, 1]
    sel = np.flatnonzero(lat.vertex_color[oct_end] == kept)
    edge_nodes = vertex_to_node[lat.edge_endpoints[sel]]
    edge_faces = lat.edge_faces[sel].copy()
    face_edge = np.full(lat.n_faces, -1, np.int64)
    for idx, faces in enumerate(edge_faces):
        face_edge[faces] = idx
    if np.any(face_edge < 0):
        raise AssertionError("restricted lattice does not cover all faces")
    return RestrictedLattice(
        removed_color=removed_color,
        n_nodes=int(lat.n_red + octs.size),
        node_to_vertex=node_to_vertex,
        vertex_to_node=vertex_to_node,
        edge_nodes=edge_nodes,
        edge_faces=edge_faces,
        edge_lattice_id=sel.astype(np.int64),
        face_edge=face_edge,
    )


def restricted_lattice(lattice: DualLattice,
                       removed_color: int) -> RestrictedLattice:
    if removed_color not in (GREEN, BLUE):
        raise ValueError("only an octagon color can be removed")
    return _restricted(lattice.d, removed_color)


@dataclass(frozen=True)
class SpacetimeGraph:
    """Restricted lattice copied over rounds with vertical check edges."""

    rl: RestrictedLattice
    rounds: int
    graph: StaticGraph
    n_re: int

    @property
    def n_horizontal(self) -> int:
        return self.rounds * self.n_re

    def horizontal_slots(self) -> np.ndarray:
        return np.arange(self.n_horizontal)


@lru_cache(maxsize=64)
def _spacetime(d: int, removed_color: int, rounds: int) -> SpacetimeGraph:
    rl = _restricted(d, removed_color)
    n_re = rl.edge_nodes.shape[0]
    nn = rl.n_nodes
    eu = []
    ev = []
    for t in range(rounds):
        eu.append(rl.edge_nodes[:, 0] + t * nn)
        ev.append(rl.edge_nodes[:, 1] + t * nn)
    for t in range(rounds - 1):
        eu.append(np.arange(nn) + t * nn)
        ev.append(np.arange(nn) + (t + 1) * nn)
    graph = StaticGraph(rounds * nn, np.concatenate(eu), np.concatenate(ev))
    return SpacetimeGraph(rl=rl, rounds=rounds, graph=graph, n_re=n_re)


def spacetime_graph(lattice: DualLattice, removed_color: int,
                    rounds: int) -> SpacetimeGraph:
    if rounds < 1:
        raise ValueError("need at least one round")
    return _spacetime(lattice.d, removed_color, rounds)


def _build_lift_table() -> list:
    """Minimal face subsets reproducing each local boundary mask.

    Edge slot k of a red vertex points at its k-th octagon neighbour; face
    corner c covers the two slots of its triangle.  Exhaustive search over
    the 16 subsets, ties broken by the smallest corner tuple.
    """
    face_masks = (0b1100, 0b1010, 0b0011, 0b0101)  # N, E, S, W
    table: list = [None] * 16
    for subset in range(16):
        m = 0
        corners = tuple(c for c in range(4) if subset >> c & 1)
        for c in corners:
            m ^= face_masks[c]
        best = table[m]
        if best is None or (len(corners), corners) < (len(best), best):
            table[m] = corners
    return table


LIFT_TABLE = _build_lift_table()


def first_pass_weight(p1, p2):
    """Combined two-face matching weight -log[(r1^2 + r2^2) / (r1 + r2)]."""
    p1 = clamp_probability(np.asarray(p1, np.float64))
    p2 = clamp_probability(np.asarray(p2, np.float64))
    r1 = p1 / (1.0 - p1)
    r2 = p2 / (1.0 - p2)
    return np.maximum(-np.log((r1 * r1 + r2 * r2) / (r1 + r2)), 0.0)


def second_pass_weight(p):
    """Single-face matching weight -log(p / (1 - p)), floored at zero."""
    p = clamp_probability(np.asarray(p, np.float64))
    return np.maximum(-np.log(p / (1.0 - p)), 0.0)


def lift_mask(mask: int):
    """Corner tuple for a 4-bit local edge mask, or None if unliftable."""
    return LIFT_TABLE[mask]


def _lift_faces(lattice: DualLattice, lattice_edge_ids: np.ndarray,
                ) -> np.ndarray:
    """Lift a projected set of red-octagon lattice edges to faces."""
    correction = np.zeros(lattice.n_faces, bool)
    if lattice_edge_ids.size == 0:
        return correction
    rids = lattice_edge_ids // 4
    slots = lattice_edge_ids % 4
    masks = np.zeros(lattice.n_red, np.int64)
    np.bitwise_or.at(masks, rids, np.int64(1) << slots)
    for rid in np.unique(rids):
        corners = LIFT_TABLE[masks[rid]]
        if corners is None:
            raise LiftingFailure(f"red vertex {rid}: no face subset matches "
                                 f"edge mask {masks[rid]:04b}")
        for c in corners:
            correction[rid * 4 + c] = True
    return correction


def _second_pass_probs(p_layer: np.ndarray, support_layer: np.ndarray,
                       rl: RestrictedLattice) -> np.ndarray:
    """Per-edge face probability conditioned on the first matching.

    Exactly one supported face selects it; both supported selects the
    likelier; neither selects the unlikelier.  Collapses to the common value
    for uniform reliabilities.
    """
    f1 = rl.edge_faces[:, 0]
    f2 = rl.edge_faces[:, 1]
    p1 = p_layer[f1]
    p2 = p_layer[f2]
    s1 = support_layer[f1]
    s2 = support_layer[f2]
    return np.where(s1 & s2, np.maximum(p1, p2),
                    np.where(~s1 & ~s2, np.minimum(p1, p2),
                             np.where(s1, p1, p2)))


def _defect_nodes(defects: np.ndarray, rl: RestrictedLattice) -> np.ndarray:
    """Space-time node ids of the defects living on this restricted graph."""
    rounds, _ = defects.shape
    nodes = []
    for t in range(rounds):
        vs = np.flatnonzero(defects[t])
        ns = rl.vertex_to_node[vs]
        nodes.append(ns[ns >= 0] + t * rl.n_nodes)
    return np.concatenate(nodes) if nodes else np.zeros(0, np.int64)


def decode_layers(lattice: DualLattice, signs: np.ndarray,
                  p_data: np.ndarray, p_meas: np.ndarray | None,
                  p_total: np.ndarray | None = None,
                  want_trace: bool = False):
    """Restriction decoding over one or more measurement rounds.

    ``signs`` is the (rounds, n_vertices) boolean check-sign history (True =
    -1), ``p_data`` the per-round face flip probabilities weighting the
    horizontal edges, and ``p_meas`` the per-round check error probabilities
    weighting the vertical edges (ignored for a single round).  ``p_total``
    is the per-face total flip probability used for the order-selection
    cost; it defaults to the single layer for rounds == 1.

    Returns (correction, trace_or_None); raises LiftingFailure / DecoderError
    when the trial cannot be decoded (callers count these as failures).
    """
    signs = np.atleast_2d(np.asarray(signs, bool))
    rounds, nv = signs.shape
    if nv != lattice.n_vertices:
        raise ValueError("sign history has wrong vertex count")
    p_data = np.atleast_2d(np.asarray(p_data, np.float64))
    if p_data.shape != (rounds, lattice.n_faces):
        raise ValueError("p_data must be (rounds, n_faces)")
    if rounds > 1:
        p_meas = np.asarray(p_meas, np.float64)
        if p_meas.shape != (rounds - 1, lattice.n_vertices):
            raise ValueError("p_meas must be (rounds - 1, n_vertices)")
    if p_total is None:
        if rounds == 1:
            p_total = p_data[0]
        else:
            p_total = 0.5 * (1.0 - np.prod(1.0 - 2.0 * p_data, axis=0))
    p_total = clamp_probability(np.asarray(p_total, np.float64))

    # defects: checks whose sign differs from the previous round
    defects = signs.copy()
    defects[1:] ^= signs[:-1]

    graphs = {
        "RB": spacetime_graph(lattice, GREEN, rounds),
        "RG": spacetime_graph(lattice, BLUE, rounds),
    }
    defect_nodes = {k: _defect_nodes(defects, g.rl)
                    for k, g in graphs.items()}

    # first-pass horizontal weights and vertical weights per graph
    w_first = {}
    w_vert = {}
    for key, g in graphs.items():
        rl = g.rl
        wh = np.empty((rounds, g.n_re))
        for t in range(rounds):
            wh[t] = first_pass_weight(p_data[t, rl.edge_faces[:, 0]],
                                      p_data[t, rl.edge_faces[:, 1]])
        w_first[key] = wh
        if rounds > 1:
            wv = np.empty((rounds - 1, rl.n_nodes))
            for t in range(rounds - 1):
                wv[t] = second_pass_weight(p_meas[t, rl.node_to_vertex])
            w_vert[key] = wv.ravel()
        else:
            w_vert[key] = np.zeros(0)

    uniform = all(np.ptp(p_data[t]) == 0.0 for t in range(rounds))

    def run_order(first_key: str):
        second_key = "RG" if first_key == "RB" else "RB"
        gf = graphs[first_key]
        gs = graphs[second_key]
        wf = np.concatenate([w_first[first_key].ravel(), w_vert[first_key]])
        rho_f, pairs_f, _ = match_defects(gf.graph, wf,
                                          defect_nodes[first_key])
        rho_f_h = rho_f[:gf.n_horizontal].reshape(rounds, gf.n_re)
        # faces selected by the first matching, per round
        support = np.zeros((rounds, lattice.n_faces), bool)
        for t in range(rounds):
            support[t] = rho_f_h[t, gf.rl.face_edge]
        if uniform:
            ws_h = w_first[second_key]
        else:
            ws_h = np.empty((rounds, gs.n_re))
            for t in range(rounds):
                psel = _second_pass_probs(p_data[t], support[t], gs.rl)
                ws_h[t] = second_pass_weight(psel)
        ws = np.concatenate([ws_h.ravel(), w_vert[second_key]])
        rho_s, pairs_s, _ = match_defects(gs.graph, ws,
                                          defect_nodes[second_key])
        rho_s_h = rho_s[:gs.n_horizontal].reshape(rounds, gs.n_re)
        # project to the final slice: edges used an odd number of times
        proj_f = rho_f_h.sum(axis=0) % 2 == 1
        proj_s = rho_s_h.sum(axis=0) % 2 == 1
        edge_ids = np.concatenate([
            gf.rl.edge_lattice_id[proj_f],
            gs.rl.edge_lattice_id[proj_s],
        ])
        faces = _lift_faces(lattice, edge_ids)
        r_tot = p_total[faces] / (1.0 - p_total[faces])
        cost = float(-np.log(r_tot).sum()) if faces.any() else 0.0
        info = None
        if want_trace:
            info = {
                "first": first_key,
                "rho_" + first_key.lower(): [
                    [int(t), int(e)] for t in range(rounds)
                    for e in np.flatnonzero(rho_f_h[t])],
                "rho_" + second_key.lower(): [
                    [int(t), int(e)] for t in range(rounds)
                    for e in np.flatnonzero(rho_s_h[t])],
                "matched_pairs_first": [[int(a), int(b)]
                                        for a, b, _ in pairs_f],
                "matched_pairs_second": [[int(a), int(b)]
                                         for a, b, _ in pairs_s],
                "lifted_faces": np.flatnonzero(faces).tolist(),
                "cost": cost,
            }
        return faces, cost, info

    candidates = []
    errors = []
    order_keys = ("RB",) if uniform else ("RB", "RG")
    for key in order_keys:
        try:
            candidates.append((key, *run_order(key)))
        except LiftingFailure as exc:
            errors.append(exc)
    if not candidates:
        raise errors[0]
    # lower cost wins; ties keep the RB-first result
    best = min(candidates, key=lambda c: (c[2], c[0] != "RB"))
    _, faces, cost, info = best

    if np.any(lat_mod.syndrome_of(faces, lattice) != signs[-1]):
        raise DecoderError("correction does not reproduce the syndrome")
    trace = None
    if want_trace:
        trace = {
            "rounds": rounds,
            "defects": [[int(t), int(v)] for t in range(rounds)
                        for v in np.flatnonzero(defects[t])],
            "orders": [c[3] for c in candidates],
            "chosen_first": best[0],
            "cost": cost,
            "correction": np.flatnonzero(faces).tolist(),
        }
    return faces, trace

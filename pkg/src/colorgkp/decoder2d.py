"""Restriction decoder for a single round of perfect stabilizer checks.

Given the binary check syndrome and a per-qubit flip probability (from the
analog outcomes, or one uniform value when that information is discarded),
the decoder matches flagged checks on the two restricted lattices with the
two-pass probabilistic weights, lifts the matched edges around red vertices
into a face correction, and returns the cheaper of the two matching orders.
"""

from __future__ import annotations

import numpy as np

from ._engine import (
    DecoderError,
    LiftingFailure,
    RestrictedLattice,
    decode_layers,
    first_pass_weight,
    lift_mask,
    restricted_lattice,
    second_pass_weight,
)
from .lattice import DualLattice

__all__ = [
    "RestrictedLattice",
    "restricted_lattice",
    "LiftingFailure",
    "DecoderError",
    "edge_weight_first_pass",
    "edge_weight_second_pass",
    "lift",
    "decode",
]


def edge_weight_first_pass(p1, p2):
    """Matching weight of an edge whose two faces have flip rates p1, p2."""
    return first_pass_weight(p1, p2)


def edge_weight_second_pass(p):
    """Matching weight of an edge pinned to a single face of rate p."""
    return second_pass_weight(p)


def lift(red_vertex: int, local_edges, lattice: DualLattice) -> list[int]:
    """Faces around a red vertex whose boundary equals the given edges.

    ``local_edges`` are lattice edge ids incident to the vertex (the
    matched-path edges).  Returns the minimal face set, smallest ids on
    ties; raises LiftingFailure when no subset works (odd edge parity).
    """
    if not 0 <= red_vertex < lattice.n_red:
        raise ValueError(f"{red_vertex} is not a red vertex")
    mask = 0
    for e in set(int(e) for e in local_edges):
        if e // 4 != red_vertex or not 0 <= e < 4 * lattice.n_red:
            raise ValueError(f"edge {e} is not incident to red vertex "
                             f"{red_vertex}")
        mask |= 1 << (e % 4)
    corners = lift_mask(mask)
    if corners is None:
        raise LiftingFailure(f"red vertex {red_vertex}: no face subset "
                             f"matches edge mask {mask:04b}")
    return [red_vertex * 4 + c for c in corners]


def decode(syndrome: np.ndarray, reliabilities, lattice: DualLattice,
           use_analog: bool = True, want_trace: bool = False):
    """Face correction reproducing the given check syndrome.

    ``reliabilities`` is the per-face flip probability array when
    ``use_analog`` is set, or a single uniform probability otherwise.
    Returns the correction (and the trace dict when requested).
    """
    syndrome = np.asarray(syndrome, bool)
    if syndrome.shape != (lattice.n_vertices,):
        raise ValueError("syndrome has wrong length")
    if use_analog:
        p = np.asarray(reliabilities, np.float64)
        if p.shape != (lattice.n_faces,):
            raise ValueError("need one reliability per face")
    else:
        p = np.full(lattice.n_faces, float(reliabilities))
    correction, trace = decode_layers(lattice, syndrome[None, :],
                                      p[None, :], None,
                                      want_trace=want_trace)
    if want_trace:
        return correction, trace
    return correction

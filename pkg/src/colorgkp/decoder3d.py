"""Restriction decoder on the space-time graph for noisy measurements.

Checks are repeated over rounds with the final round perfect; flagged
checks are differenced between consecutive rounds and matched in three
dimensions (horizontal edges carry the per-round data-qubit odds, vertical
edges the check-measurement odds).  The matched edges are projected to the
final slice with mod-2 cancellation and lifted exactly like the
single-round decoder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._engine import (
    DecoderError,
    LiftingFailure,
    SpacetimeGraph,
    decode_layers,
    spacetime_graph,
)
from .gkp import NoiseParams, Scheme
from .lattice import AnalogSyndrome, DualLattice

__all__ = [
    "SpacetimeGraph",
    "spacetime_graph",
    "RoundRecord",
    "difference_syndromes",
    "effective_sigmas",
    "decode_spacetime",
]


@dataclass(frozen=True)
class RoundRecord:
    """Per-round decoder inputs.

    ``syndrome`` holds the analog check outcomes (signs and measurement
    reliabilities) of the round; ``data_reliability`` the per-face flip
    probability of the data qubits during that round.  The final round is
    perfect: its measurement reliabilities are ignored.
    """

    syndrome: AnalogSyndrome
    data_reliability: np.ndarray


def difference_syndromes(rounds: list[np.ndarray] | np.ndarray,
                         ) -> list[tuple[int, int]]:
    """Defects (vertex, round) where a check sign differs from last round.

    Round 0 is differenced against the all-plus reference.
    """
    signs = np.atleast_2d(np.asarray(rounds, bool))
    defects = signs.copy()
    defects[1:] ^= signs[:-1]
    out = []
    for t in range(signs.shape[0]):
        for v in np.flatnonzero(defects[t]):
            out.append((int(v), t))
    return out


def effective_sigmas(scheme: Scheme, params: NoiseParams,
                     check_weight: int) -> tuple[float, float]:
    """Effective deviations feeding the reliability model of one round.

    The check outcome deviation combines one correction residual per qubit
    in the stabilizer support (sigma2^2 each for the plain scheme,
    eta*sigma2^2 for ME) with the measurement channel.  For the plain
    scheme the data deviation folds the fresh channel, the previous
    residual and the current ancilla into one sigma for the single-sigma
    rate formula; for ME the current ancilla is modelled separately by
    `me_conditional_flip_prob`, so the returned data sigma is the prior
    width sqrt(sigma1^2 + eta*sigma2^2) to use as its sigma1 argument.
    """
    if check_weight not in (4, 8):
        raise ValueError("stabilizer weight is 4 or 8")
    s1, s2, sm = params.sigma1, params.sigma2, params.sigma_m
    if scheme is Scheme.CONVENTIONAL:
        resid = s2 * s2
        sigma_data = math.sqrt(s1 * s1 + s2 * s2 + resid)
    elif scheme is Scheme.ME:
        resid = params.eta * s2 * s2
        sigma_data = math.sqrt(s1 * s1 + resid)
    else:
        raise ValueError("teleportation is not a stabilizer-check scheme")
    sigma_check = math.sqrt(check_weight * resid + sm * sm)
    return sigma_data, sigma_check


def decode_spacetime(records: list[RoundRecord], lattice: DualLattice,
                     want_trace: bool = False):
    """Face correction from d rounds of noisy checks (last round perfect)."""
    if not records:
        raise ValueError("need at least one round")
    signs = np.stack([np.asarray(r.syndrome.sign, bool) for r in records])
    p_data = np.stack([np.asarray(r.data_reliability, np.float64)
                       for r in records])
    if len(records) > 1:
        p_meas = np.stack([np.asarray(r.syndrome.reliability, np.float64)
                           for r in records[:-1]])
    else:
        p_meas = None
    correction, trace = decode_layers(lattice, signs, p_data, p_meas,
                                      want_trace=want_trace)
    if want_trace:
        return correction, trace
    return correction

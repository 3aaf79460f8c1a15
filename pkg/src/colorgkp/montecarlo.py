"""Monte Carlo estimation of logical error rates and thresholds.

Model 1 draws a single round of data shifts with perfect measurements and
decodes in 2D; model 2 repeats noisy rounds of GKP correction and checks
(final round perfect) and decodes on the space-time graph; the binary
phenomenological model does the same with plain bit flips, no analog
content.  Trials are independent, seeded per (point, trial) so results do
not depend on how work is split across processes.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import decoder2d, decoder3d
from ._engine import DecoderError, LiftingFailure
from .gkp import (
    PROB_EPS,
    SQRT_PI,
    TWO_SQRT_PI,
    NoiseParams,
    Scheme,
    average_flip_prob,
    centered_mod,
    conditional_flip_prob,
    correction,
    me_conditional_flip_prob,
)
from .lattice import (
    AnalogSyndrome,
    RED,
    build_lattice,
    logical_flips,
    measure_checks,
    syndrome_of,
)

__all__ = [
    "MODELS",
    "ExperimentConfig",
    "TrialResult",
    "PointResult",
    "ThresholdEstimate",
    "NoCrossingError",
    "run_trial_model1",
    "run_trial_model2",
    "run_trial_phenom_binary",
    "run_point",
    "run_experiment",
    "estimate_rate",
    "find_threshold",
    "write_csv",
]

MODELS = ("model1", "model2", "phenom_binary")

CSV_SCHEMA = ("model,scheme,d,noise,trials,failures,fail_l0,fail_l1,"
              "fail_l2,fail_l3,decoder_failures,rate,ci_low,ci_high")


class NoCrossingError(RuntimeError):
    """Logical-rate curves do not intersect inside the swept grid."""


@dataclass(frozen=True)
class ExperimentConfig:
    """One sweep: a noise grid crossed with a list of code distances."""

    model: str
    scheme: Scheme = Scheme.CONVENTIONAL
    d_list: tuple[int, ...] = (4, 6, 8)
    grid: tuple[float, ...] = ()
    use_analog: bool = True
    trials: int = 20_000
    base_seed: int = 0
    # model2: per-channel multiples of the grid value (sigma1, sigma2, sigma_m)
    sigma_ratios: tuple[float, float, float] = (1.0, 1.0, 1.0)

    def validate(self) -> None:
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.grid:
            raise ValueError("empty noise grid")
        if list(self.grid) != sorted(self.grid):
            raise ValueError("noise grid must be ascending")
        if any(g <= 0 for g in self.grid):
            raise ValueError("noise values must be positive")
        if self.model == "phenom_binary" and any(g >= 0.5 for g in self.grid):
            raise ValueError("flip probabilities must be below 0.5")
        for d in self.d_list:
            if d < 4 or d % 2:
                raise ValueError("distances must be even and >= 4")
        if self.scheme is Scheme.TELEPORTATION:
            raise ValueError("teleportation is not a stabilizer-check scheme")

    def params_for(self, noise: float) -> NoiseParams:
        r1, r2, rm = self.sigma_ratios
        return NoiseParams(r1 * noise, r2 * noise, rm * noise)


@dataclass(frozen=True)
class TrialResult:
    logical_bits: np.ndarray
    decoder_failed: bool
    seconds: float
    trace: dict | None = None

    @property
    def failed(self) -> bool:
        return self.decoder_failed or bool(self.logical_bits.any())


@dataclass
class PointResult:
    """Aggregated counts for one (model, scheme, d, noise) point."""

    model: str
    scheme: str
    d: int
    noise: float
    trials: int
    failures: int
    failures_per_logical: tuple[int, int, int, int]
    decoder_failures: int
    seconds: float = 0.0

    @property
    def rate(self) -> float:
        return self.failures / self.trials

    def interval(self) -> tuple[float, float, float]:
        return estimate_rate(self.failures, self.trials)


def run_trial_model1(d: int, sigma: float, use_analog: bool,
                     rng: np.random.Generator,
                     want_trace: bool = False) -> TrialResult:
    """Code-capacity trial: one noisy data round, perfect measurements."""
    t0 = time.perf_counter()
    lat = build_lattice(d)
    u1 = rng.normal(0.0, sigma, lat.n_faces)
    flips = np.abs(centered_mod(u1, TWO_SQRT_PI)) >= SQRT_PI / 2
    syn = syndrome_of(flips, lat)
    trace = None
    try:
        if use_analog:
            rel = conditional_flip_prob(u1, sigma)
            out = decoder2d.decode(syn, rel, lat, use_analog=True,
                                   want_trace=want_trace)
        else:
            out = decoder2d.decode(syn, average_flip_prob(sigma), lat,
                                   use_analog=False, want_trace=want_trace)
        corr, trace = out if want_trace else (out, None)
        bits = logical_flips(flips ^ corr, lat)
        failed = False
    except (LiftingFailure, DecoderError):
        bits = np.zeros(4, bool)
        failed = True
    return TrialResult(bits, failed, time.perf_counter() - t0, trace)


def _data_reliability(q_out: np.ndarray, scheme: Scheme, sigma_data: float,
                      sigma2: float) -> np.ndarray:
    if scheme is Scheme.ME and sigma2 > 0:
        return me_conditional_flip_prob(q_out, NoiseParams(sigma_data,
                                                           sigma2))
    return conditional_flip_prob(q_out, sigma_data)


def run_trial_model2(d: int, params: NoiseParams, scheme: Scheme,
                     rng: np.random.Generator, rounds: int | None = None,
                     want_trace: bool = False) -> TrialResult:
    """Phenomenological GKP trial: noisy rounds, perfect final readout.

    Per noisy round: fresh data shifts, one Steane-type correction with a
    noisy ancilla, then noisy stabilizer checks.  The final round snaps the
    frame to the lattice and reads exact checks.  ``rounds`` overrides the
    total round count (defaults to d).
    """
    t0 = time.perf_counter()
    lat = build_lattice(d)
    nf, nv = lat.n_faces, lat.n_vertices
    total = d if rounds is None else rounds
    if total < 1:
        raise ValueError("need at least one round")
    sigma_data, sigma_c4 = decoder3d.effective_sigmas(scheme, params, 4)
    _, sigma_c8 = decoder3d.effective_sigmas(scheme, params, 8)
    sigma_check = np.where(np.asarray(lat.vertex_color) == RED,
                           sigma_c4, sigma_c8)
    if scheme is Scheme.ME:
        sigma_resid = math.sqrt(params.eta) * params.sigma2
    else:
        sigma_resid = params.sigma2

    frame = np.zeros(nf)
    records: list[decoder3d.RoundRecord] = []
    for _ in range(total - 1):
        frame += rng.normal(0.0, params.sigma1, nf)
        u2 = rng.normal(0.0, params.sigma2, nf)
        q_out = frame + u2
        frame -= correction(q_out, scheme, params)
        p_data = _data_reliability(q_out, scheme, sigma_data, params.sigma2)
        noise_m = rng.normal(0.0, params.sigma_m, nv)
        syn = measure_checks(frame, noise_m, lat, sigma_check)
        records.append(decoder3d.RoundRecord(syn, p_data))

    # final round: perfect correction and perfect checks
    multiples = np.rint(frame / SQRT_PI)
    flips = (multiples.astype(np.int64) % 2).astype(bool)
    if sigma_resid > 0:
        p_final = conditional_flip_prob(frame, sigma_resid)
    else:
        p_final = np.zeros(nf)
    final_sign = syndrome_of(flips, lat)
    records.append(decoder3d.RoundRecord(
        AnalogSyndrome(q_m=np.zeros(nv), sign=final_sign,
                       reliability=np.zeros(nv)),
        p_final))
    trace = None
    try:
        out = decoder3d.decode_spacetime(records, lat, want_trace=want_trace)
        corr, trace = out if want_trace else (out, None)
        bits = logical_flips(flips ^ corr, lat)
        failed = False
    except (LiftingFailure, DecoderError):
        bits = np.zeros(4, bool)
        failed = True
    return TrialResult(bits, failed, time.perf_counter() - t0, trace)


def run_trial_phenom_binary(d: int, p: float, rng: np.random.Generator,
                            rounds: int | None = None,
                            want_trace: bool = False) -> TrialResult:
    """Plain color-code trial: iid flips and faulty checks, no analog info."""
    t0 = time.perf_counter()
    if not 0 < p < 0.5:
        raise ValueError("flip probability must be in (0, 0.5)")
    lat = build_lattice(d)
    nf, nv = lat.n_faces, lat.n_vertices
    total = d if rounds is None else rounds
    cum = np.zeros(nf, bool)
    records: list[decoder3d.RoundRecord] = []
    for _ in range(total - 1):
        cum ^= rng.random(nf) < p
        sign = syndrome_of(cum, lat) ^ (rng.random(nv) < p)
        records.append(decoder3d.RoundRecord(
            AnalogSyndrome(q_m=np.zeros(nv), sign=sign,
                           reliability=np.full(nv, p)),
            np.full(nf, p)))
    records.append(decoder3d.RoundRecord(
        AnalogSyndrome(q_m=np.zeros(nv), sign=syndrome_of(cum, lat),
                       reliability=np.zeros(nv)),
        np.full(nf, PROB_EPS)))
    trace = None
    try:
        out = decoder3d.decode_spacetime(records, lat, want_trace=want_trace)
        corr, trace = out if want_trace else (out, None)
        bits = logical_flips(cum ^ corr, lat)
        failed = False
    except (LiftingFailure, DecoderError):
        bits = np.zeros(4, bool)
        failed = True
    return TrialResult(bits, failed, time.perf_counter() - t0, trace)


def _trial_rng(base_seed: int, point_index: int,
               trial_index: int) -> np.random.Generator:
    seq = np.random.SeedSequence(base_seed,
                                 spawn_key=(point_index, trial_index))
    return np.random.default_rng(seq)


def run_one(config: ExperimentConfig, point_index: int, d: int, noise: float,
            trial_index: int, want_trace: bool = False) -> TrialResult:
    rng = _trial_rng(config.base_seed, point_index, trial_index)
    if config.model == "model1":
        return run_trial_model1(d, noise, config.use_analog, rng,
                                want_trace=want_trace)
    if config.model == "model2":
        return run_trial_model2(d, config.params_for(noise), config.scheme,
                                rng, want_trace=want_trace)
    return run_trial_phenom_binary(d, noise, rng, want_trace=want_trace)


def _run_chunk(args) -> tuple[int, int, np.ndarray, int, float]:
    config, point_index, d, noise, lo, hi = args
    failures = 0
    per_logical = np.zeros(4, np.int64)
    decoder_failures = 0
    seconds = 0.0
    for trial_index in range(lo, hi):
        res = run_one(config, point_index, d, noise, trial_index)
        seconds += res.seconds
        if res.decoder_failed:
            decoder_failures += 1
            failures += 1
        elif res.logical_bits.any():
            per_logical += res.logical_bits
            failures += 1
    return failures, decoder_failures, per_logical, hi - lo, seconds


def run_point(config: ExperimentConfig, point_index: int, d: int,
              noise: float, workers: int = 1, pool=None) -> PointResult:
    """All trials of one grid point, optionally across a process pool."""
    chunk = max(64, min(2048, config.trials // max(workers, 1) // 4 or 64))
    tasks = [(config, point_index, d, noise, lo,
              min(lo + chunk, config.trials))
             for lo in range(0, config.trials, chunk)]
    if pool is None:
        results = [_run_chunk(t) for t in tasks]
    else:
        results = pool.map(_run_chunk, tasks)
    failures = sum(r[0] for r in results)
    decoder_failures = sum(r[1] for r in results)
    per_logical = np.sum([r[2] for r in results], axis=0)
    seconds = sum(r[4] for r in results)
    return PointResult(
        model=config.model, scheme=config.scheme.value, d=d, noise=noise,
        trials=config.trials, failures=failures,
        failures_per_logical=tuple(int(x) for x in per_logical),
        decoder_failures=decoder_failures, seconds=seconds)


def run_experiment(config: ExperimentConfig, workers: int = 1,
                   progress=None) -> list[PointResult]:
    """Sweep the full (d, noise) grid; deterministic for a fixed seed."""
    config.validate()
    points = [(d, noise) for d in config.d_list for noise in config.grid]
    results = []
    pool = None
    try:
        if workers > 1:
            import multiprocessing as mp
            pool = mp.get_context("fork").Pool(workers)
        for idx, (d, noise) in enumerate(points):
            res = run_point(config, idx, d, noise, workers=workers, pool=pool)
            results.append(res)
            if progress is not None:
                progress(res)
    finally:
        if pool is not None:
            pool.close()
            pool.join()
    return results


def estimate_rate(failures: int, trials: int,
                  z: float = 1.959964) -> tuple[float, float, float]:
    """Failure fraction with a 95% Wilson confidence interval."""
    if trials < 100:
        raise ValueError("rate estimation needs at least 100 trials")
    if not 0 <= failures <= trials:
        raise ValueError("failure count out of range")
    phat = failures / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials
                         + z * z / (4 * trials * trials)) / denom
    return phat, max(0.0, center - half), min(1.0, center + half)


@dataclass(frozen=True)
class ThresholdEstimate:
    """Crossing points of adjacent-distance logical-rate curves."""

    crossings: dict
    value: float
    uncertainty: float


def _interp_crossing(noise: np.ndarray, log_lo: np.ndarray,
                     log_hi: np.ndarray) -> float | None:
    """First sign change of (log_hi - log_lo), linearly interpolated.

    Exact zeros count as a crossing only when flanked by opposite signs,
    so identical curves report no crossing.
    """
    diff = log_hi - log_lo
    ok = np.isfinite(diff)
    for i in range(len(noise) - 1):
        if not (ok[i] and ok[i + 1]):
            continue
        a, b = diff[i], diff[i + 1]
        if a < 0.0 < b or a > 0.0 > b:
            frac = a / (a - b)
            return float(noise[i] + frac * (noise[i + 1] - noise[i]))
    signs = np.sign(diff[ok])
    for i in range(len(noise)):
        if not ok[i] or diff[i] != 0.0:
            continue
        before = [s for j, s in zip(np.flatnonzero(ok), signs) if j < i and s]
        after = [s for j, s in zip(np.flatnonzero(ok), signs) if j > i and s]
        if before and after and before[-1] * after[0] < 0:
            return float(noise[i])
    return None


def find_threshold(curves: dict[int, list[PointResult]]) -> ThresholdEstimate:
    """Crossing estimate per adjacent-distance pair, pooled.

    ``curves`` maps distance -> results over the same noise grid.  The
    crossing of each adjacent pair is interpolated in (noise, log rate)
    space; its uncertainty comes from re-interpolating with each curve
    pushed to the ends of its confidence band.
    """
    ds = sorted(curves)
    if len(ds) < 2:
        raise ValueError("need at least two distances")
    crossings = {}
    for d1, d2 in zip(ds, ds[1:]):
        lo_res = sorted(curves[d1], key=lambda r: r.noise)
        hi_res = sorted(curves[d2], key=lambda r: r.noise)
        noise = np.array([r.noise for r in lo_res])
        if not np.array_equal(noise, np.array([r.noise for r in hi_res])):
            raise ValueError("curves must share the noise grid")
        if len(noise) < 3:
            raise ValueError("need at least three grid points")

        def logs(results, which):
            vals = []
            for r in results:
                rate, lo, hi = r.interval()
                v = {"mid": rate, "lo": lo, "hi": hi}[which]
                vals.append(math.log(v) if v > 0 else -math.inf)
            return np.array(vals)

        mid = _interp_crossing(noise, logs(lo_res, "mid"),
                               logs(hi_res, "mid"))
        if mid is None:
            dump = "; ".join(
                f"d={d}: " + ", ".join(f"{r.noise:g}:{r.rate:.3g}"
                                       for r in sorted(curves[d],
                                                       key=lambda r: r.noise))
                for d in (d1, d2))
            raise NoCrossingError(
                f"no crossing between d={d1} and d={d2} inside the grid "
                f"({dump})")
        lo_x = _interp_crossing(noise, logs(lo_res, "lo"),
                                logs(hi_res, "hi"))
        hi_x = _interp_crossing(noise, logs(lo_res, "hi"),
                                logs(hi_res, "lo"))
        ends = [x for x in (lo_x, hi_x) if x is not None]
        if ends:
            unc = max(abs(x - mid) for x in ends)
        else:
            unc = float(noise[-1] - noise[0]) / 2
        unc = max(unc, 1e-6)
        crossings[(d1, d2)] = (mid, unc)

    values = [v for v, _ in crossings.values()]
    uncs = [u for _, u in crossings.values()]
    pooled = float(np.mean(values))
    spread = float(max(np.std(values), max(uncs)))
    return ThresholdEstimate(crossings=crossings, value=pooled,
                             uncertainty=spread)


def write_csv(results: list[PointResult], path) -> None:
    """One row per grid point; schema versioned in the header comment."""
    lines = ["# colorgkp-results v1", CSV_SCHEMA]
    for r in results:
        rate, lo, hi = r.interval()
        row = [r.model, r.scheme, str(r.d), repr(float(r.noise)),
               str(r.trials), str(r.failures)]
        row += [str(x) for x in r.failures_per_logical]
        row += [str(r.decoder_failures), repr(rate), repr(lo), repr(hi)]
        lines.append(",".join(row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")

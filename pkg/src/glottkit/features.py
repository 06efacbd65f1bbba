"""Glottal features: NAQ, QOQ, H1-H2, HRF and the spectral distortion."""
from dataclasses import dataclass
import math

import numpy as np

from . import kernels
from .dsp_core import integrate

SD_BAND = (20.0, 4000.0)
CYCLE_TAIL = 0.1  # fraction of t0 kept after the GCI when cutting a cycle
MIN_TILES = 8


class FeatureError(ValueError):
    """The signal does not support the requested measurement."""


@dataclass(frozen=True)
class FeatureRecord:
    naq: float
    qoq: float
    h1h2: float
    hrf: float
    f0_used: float
    method: str
    valid: bool = True
    message: str = ""
    spectrum_of: str = "dflow"


def naq(flow, dflow, t0):
    """Normalized amplitude quotient ``(max - min flow) / (|min dflow| t0)``.

    ``flow`` must be the running sum of ``dflow`` on the same grid, so
    ``t0`` is in samples. The flow range is used instead of its maximum so
    that a constant offset from integration does not bias the result; for a
    cycle that closes completely the two agree.
    """
    flow = np.asarray(flow, dtype=float)
    dflow = np.asarray(dflow, dtype=float)
    dmin = float(np.min(dflow))
    if not dmin < 0.0:
        raise FeatureError("derivative never negative: no closure event")
    if t0 <= 0:
        raise FeatureError("t0 must be positive")
    return float(np.ptp(flow) / (-dmin * t0))


def qoq(flow, t0):
    """Quasi-open quotient: length of the run above half the flow range that
    contains the flow maximum, over ``t0``. Runs wrap around the cycle."""
    flow = np.asarray(flow, dtype=float)
    lo, hi = float(np.min(flow)), float(np.max(flow))
    if not hi > lo:
        raise FeatureError("constant flow")
    above = flow > lo + 0.5 * (hi - lo)
    labels, lengths = kernels.run_lengths_circular(above)
    return float(lengths[labels[int(np.argmax(flow))]] / t0)


# ---------------------------------------------------------------- spectra

def _spectrum(x, fs):
    x = np.asarray(x, dtype=float)
    nfft = max(8192, 1 << int(np.ceil(np.log2(4 * x.size))))
    mag = np.abs(np.fft.rfft(x * np.hanning(x.size), nfft))
    return mag, fs / nfft


def harmonic_amplitudes(x, f0, fs, n):
    """Peak magnitude within ``+-f0/4`` of each of the first ``n`` harmonics.

    When ``x`` spans a whole number of periods, a harmonic whose exact DFT
    coefficient is below ``1e-12`` of the largest one is reported as 0, so
    window leakage from its neighbours does not pass for harmonic energy.
    """
    if f0 <= 0:
        raise FeatureError("f0 must be positive")
    periods = x.size * f0 / fs
    if periods < 4.0 - 1e-9:
        raise FeatureError("need at least 4 periods, got %.2f" % periods)
    mag, df = _spectrum(x, fs)
    absent = np.zeros(n, dtype=bool)
    if abs(periods - round(periods)) < 1e-9:
        dft = np.abs(np.fft.rfft(x))
        bins = int(round(periods)) * np.arange(1, n + 1)
        ok = bins < dft.size
        absent[ok] = dft[bins[ok]] < 1e-12 * dft.max()
    amps = np.empty(n)
    for k in range(1, n + 1):
        lo = int(math.ceil((k - 0.25) * f0 / df))
        hi = int(math.floor((k + 0.25) * f0 / df))
        hi = min(hi, mag.size - 1)
        if lo > hi:
            raise FeatureError("harmonic %d is above Nyquist" % k)
        amps[k - 1] = mag[lo:hi + 1].max()
        if absent[k - 1]:
            amps[k - 1] = 0.0
    return amps, mag.max()


def max_harmonics(f0, fs):
    return int(math.floor((fs / 2.0) / f0)) - 1


def h1h2(x, f0, fs):
    """``20 log10(|S(f0)| / |S(2 f0)|)`` in dB."""
    if max_harmonics(f0, fs) < 1:
        raise FeatureError("fewer than 2 harmonics below Nyquist")
    (a1, a2), peak = harmonic_amplitudes(np.asarray(x, dtype=float), f0, fs, 2)
    if a2 < 1e-12 * peak:
        raise FeatureError("second harmonic below the noise floor")
    if a1 < 1e-12 * peak:
        raise FeatureError("fundamental below the noise floor")
    return float(20.0 * np.log10(a1 / a2))


def hrf(x, f0, fs, n_harmonics=None):
    """Harmonic richness factor ``20 log10(sum_{k>=2} |S(k f0)| / |S(f0)|)``.

    Uses harmonics 2 .. ``n_harmonics + 1``; the count is capped so that the
    highest one stays below Nyquist. Returns ``-inf`` when none of them rises
    above ``1e-12`` of the spectral peak.
    """
    cap = max_harmonics(f0, fs)
    if cap < 1:
        raise FeatureError("fewer than 2 harmonics below Nyquist")
    n = cap if n_harmonics is None else min(int(n_harmonics), cap)
    if n < 1:
        raise FeatureError("n_harmonics must be at least 1")
    amps, peak = harmonic_amplitudes(np.asarray(x, dtype=float), f0, fs, n + 1)
    if amps[0] < 1e-12 * peak:
        raise FeatureError("fundamental below the noise floor")
    rest = amps[1:]
    rest = rest[rest >= 1e-12 * peak]
    if rest.size == 0:
        return -math.inf
    return float(20.0 * np.log10(rest.sum() / amps[0]))


def spectral_distortion(estimate, reference, fs, normalize=True, nfft=4096):
    """Band-limited RMS log-spectral distance in dB.

    ``sqrt(2/8000 * sum_{20 <= f <= 4000} (20 log10 |E(f)/R(f)|)^2 df)``
    over the bins of an ``nfft``-point DFT. Both inputs are scaled to unit
    peak magnitude first unless ``normalize`` is False.
    """
    e = np.asarray(estimate, dtype=float)
    r = np.asarray(reference, dtype=float)
    if e.shape != r.shape:
        raise ValueError("estimate and reference lengths differ: %d vs %d" % (e.size, r.size))
    nfft = max(nfft, 1 << int(np.ceil(np.log2(e.size))))
    if normalize:
        pe, pr = np.max(np.abs(e)), np.max(np.abs(r))
        if not (pe > 0 and pr > 0):
            raise FeatureError("cannot peak-normalize an all-zero signal")
        e, r = e / pe, r / pr
    df = fs / nfft
    k = np.arange(nfft // 2 + 1)
    band = (k * df >= SD_BAND[0]) & (k * df <= SD_BAND[1])
    se = np.abs(np.fft.rfft(e, nfft))[band]
    sr = np.abs(np.fft.rfft(r, nfft))[band]
    if np.any(sr == 0.0):
        raise FeatureError("reference spectrum vanishes inside the band")
    with np.errstate(divide="ignore"):
        d = 20.0 * np.log10(se / sr)
    if not np.all(np.isfinite(d)):
        return math.inf
    return float(np.sqrt(2.0 / 8000.0 * np.sum(d * d) * df))


# ---------------------------------------------------------------- cycles

def cycle_bounds(t0, center, start=None):
    """One period starting at ``start`` (the opening instant) when known,
    otherwise ending ``ceil(0.1 t0)`` samples after the GCI at ``center``."""
    if start is not None:
        return start, start + t0
    tail = int(math.ceil(CYCLE_TAIL * t0))
    return center + tail - t0, center + tail


def extract_cycle(dflow, center, t0, start=None):
    """Cut one marker-anchored period of ``dflow`` and integrate it from zero."""
    lo, hi = cycle_bounds(t0, center, start)
    d = np.zeros(t0)
    src_lo, src_hi = max(lo, 0), min(hi, len(dflow))
    d[src_lo - lo:src_hi - lo] = np.asarray(dflow, dtype=float)[src_lo:src_hi]
    return integrate(d), d


def periodic(cycle, n_tiles=MIN_TILES):
    return np.tile(np.asarray(cycle, dtype=float), n_tiles)


def extract(est, n_harmonics=None):
    """All features of a :class:`GlottalEstimate` (GCI at index ``t0``).

    Harmonic measures are taken on the estimated derivative cycle repeated
    ``MIN_TILES`` times, so harmonics fall exactly on ``k fs / t0``.
    """
    t0, fs = est.t0, est.fs
    f0 = fs / t0
    nan = math.nan
    if not est.valid:
        return FeatureRecord(nan, nan, nan, nan, f0, est.method, False, est.message)
    flow, d = extract_cycle(est.dflow, t0, t0, getattr(est, "cycle_start", None))
    vals, problems = {}, []
    for name, fn in (("naq", lambda: naq(flow, d, t0)),
                     ("qoq", lambda: qoq(flow, t0)),
                     ("h1h2", lambda: h1h2(periodic(d), f0, fs)),
                     ("hrf", lambda: hrf(periodic(d), f0, fs, n_harmonics))):
        try:
            vals[name] = fn()
        except FeatureError as exc:
            vals[name] = nan
            problems.append("%s: %s" % (name, exc))
    ok = not problems and all(np.isfinite(v) for v in vals.values())
    if not np.isfinite(vals["hrf"]) and not problems:
        problems.append("hrf: no harmonic energy above the fundamental")
    return FeatureRecord(vals["naq"], vals["qoq"], vals["h1h2"], vals["hrf"], f0,
                         est.method, ok, "; ".join(problems))


def cycle_features(cycle, n_harmonics=None):
    """Ground-truth features of a synthesized :class:`GlottalCycle`."""
    d = cycle.dflow
    t0, fs = cycle.t0, cycle.fs
    f0 = fs / t0
    flow = integrate(d)
    return FeatureRecord(naq(flow, d, t0), qoq(flow, t0), h1h2(periodic(d), f0, fs),
                         hrf(periodic(d), f0, fs, n_harmonics), f0, "LF")

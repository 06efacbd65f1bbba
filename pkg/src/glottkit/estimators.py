"""Glottal source estimators.

Every estimator returns a :class:`GlottalEstimate` laid out on the same
GCI-centred grid of ``2 * t0`` samples, with the analysed GCI at index
``t0``. Estimates are scaled to unit peak-to-peak flow.
"""
from dataclasses import dataclass, field
import warnings

import numpy as np
from scipy.signal import butter, sosfiltfilt

from . import dsp_core
from .dsp_core import Frame, LPCError, SpectralZeroError
from .vocal_tract import ARModel, UnstableModelError, inverse_filter

METHODS = ("CPIF", "IAIF", "CCD", "ZZT")

IAIF_HIGHPASS_HZ = 70.0
IAIF_LEAK = 0.99


class ContextError(ValueError):
    """Inconsistent GCI/GOI markers."""


@dataclass(frozen=True)
class AnalysisContext:
    """Pitch-synchronous markers for one signal.

    ``gci`` and ``goi`` hold sample indices. Events must alternate in time
    (either kind may come first) and ``t0`` must agree with the median GCI
    spacing to within 20%.
    """

    gci: np.ndarray
    goi: np.ndarray
    t0: int
    fs: float

    def __post_init__(self):
        gci = np.asarray(self.gci, dtype=int)
        goi = np.asarray(self.goi, dtype=int)
        object.__setattr__(self, "gci", gci)
        object.__setattr__(self, "goi", goi)
        object.__setattr__(self, "t0", int(self.t0))
        if self.t0 < 2:
            raise ContextError("t0 must be at least 2 samples")
        if gci.size == 0:
            raise ContextError("no GCI markers")
        if np.any(np.diff(gci) <= 0) or np.any(np.diff(goi) <= 0):
            raise ContextError("markers must be strictly increasing")
        if goi.size:
            events = np.concatenate([gci, goi])
            kinds = np.concatenate([np.zeros(gci.size), np.ones(goi.size)])
            if np.unique(events).size != events.size:
                raise ContextError("a GCI and a GOI share a sample index")
            kinds = kinds[np.argsort(events, kind="stable")]
            if np.any(kinds[1:] == kinds[:-1]):
                raise ContextError("GCI and GOI markers do not alternate")
        if gci.size > 1:
            spacing = float(np.median(np.diff(gci)))
            if abs(spacing - self.t0) > 0.2 * self.t0:
                raise ContextError("t0=%d disagrees with median GCI spacing %.1f"
                                   % (self.t0, spacing))

    @classmethod
    def from_train(cls, train):
        t0 = int(round(np.median([c.t0 for c in train.cycles])))
        return cls(train.gci, train.goi, t0, train.fs)

    def center(self):
        return self.gci.size // 2


@dataclass
class GlottalEstimate:
    dflow: np.ndarray
    flow: np.ndarray
    method: str
    valid: bool = True
    message: str = ""
    fs: float = 16000.0
    t0: int = 0
    model: ARModel = field(default=None, repr=False)
    cycle_start: int = None  # frame index of the GOI opening the analysed cycle

    @property
    def gci_index(self):
        return self.t0


def _finish(dflow, method, t0, fs, model=None):
    dflow = np.asarray(dflow, dtype=float)
    if not np.all(np.isfinite(dflow)):
        return _invalid(method, t0, fs, "non-finite estimate")
    flow = dsp_core.integrate(dflow)
    span = np.ptp(flow)
    if not span > 0.0:
        return _invalid(method, t0, fs, "flat estimate")
    dflow = dflow / span
    return GlottalEstimate(dflow, dsp_core.integrate(dflow), method, True, "",
                           float(fs), int(t0), model)


def _invalid(method, t0, fs, message):
    z = np.zeros(2 * int(t0))
    return GlottalEstimate(z, z.copy(), method, False, message, float(fs), int(t0))


def _segment(x, start, stop):
    out = np.zeros(stop - start)
    lo, hi = max(start, 0), min(stop, x.size)
    if hi > lo:
        out[lo - start:hi - start] = x[lo:hi]
    return out


def _pick(ctx, gci_pos):
    pos = ctx.center() if gci_pos is None else int(gci_pos)
    if not 0 <= pos < ctx.gci.size:
        raise IndexError("GCI position %d out of range" % pos)
    return pos


def cycle_start(ctx, pos):
    """Frame index of the last GOI before ``ctx.gci[pos]``, if it lies
    within one period of it."""
    g = ctx.gci[pos]
    before = ctx.goi[(ctx.goi < g) & (ctx.goi >= g - ctx.t0)]
    if before.size == 0:
        return None
    return int(ctx.t0 + before[-1] - g)


def _with_start(est, ctx, pos):
    est.cycle_start = cycle_start(ctx, pos)
    return est


# ---------------------------------------------------------------- CPIF

def closed_phases(ctx, signal_length):
    """``(start, stop)`` spans ``[GCI + 1, next GOI - 1]`` per cycle, ``None``
    where no GOI follows inside the signal."""
    spans = []
    for g in ctx.gci:
        nxt = ctx.goi[ctx.goi > g]
        if nxt.size == 0 or nxt[0] > signal_length:
            spans.append(None)
            continue
        spans.append((int(g) + 1, int(nxt[0])))  # stop is exclusive
    return spans


def cpif(signal, ctx, order=18, gci_pos=None, preemphasis=1.0):
    """Closed-phase inverse filtering with a DAP vocal tract model.

    The tract is fitted on the closed phase after the analysed GCI. When it
    holds fewer than ``order + 2`` samples one neighbouring closed phase is
    pooled in (the next cycle's, or the previous one at the end of the
    signal).

    The fit sees the pre-emphasized signal ``x[n] - preemphasis * x[n-1]``.
    Closure is a step in the flow derivative, so the differenced closed
    phase is close to the tract impulse response, which an all-pole model
    matches; the raw free decay carries a numerator that biases the fit.
    The model then inverse-filters the original signal.
    """
    x = np.asarray(signal, dtype=float)
    pos = _pick(ctx, gci_pos)
    t0, fs = ctx.t0, ctx.fs
    spans = closed_phases(ctx, x.size)
    if all(s is None for s in spans):
        raise ContextError("no closed phase (GCI followed by a GOI) in the signal")
    need = order + 2
    chosen = [spans[pos]] if spans[pos] is not None else []
    if sum(b - a for a, b in chosen) < need:
        for k in (pos + 1, pos - 1):
            if 0 <= k < len(spans) and spans[k] is not None:
                chosen.append(spans[k])
                break
    emph = x.copy()
    emph[1:] -= preemphasis * x[:-1]
    segments = [emph[a:b] for a, b in chosen if b > a]
    total = sum(s.size for s in segments)
    if total < need:
        return _invalid("CPIF", t0, fs,
                        "closed phase too short: %d samples < %d" % (total, need))
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", dsp_core.DAPConvergenceWarning)
            fit = dsp_core.dap_fit(segments, order)
    except (LPCError, UnstableModelError, np.linalg.LinAlgError) as exc:
        return _invalid("CPIF", t0, fs, "DAP failed: %s" % exc)
    g = int(ctx.gci[pos])
    dflow = inverse_filter(x, fit.model)
    est = _finish(_segment(dflow, g - t0, g + t0), "CPIF", t0, fs, fit.model)
    return _with_start(est, ctx, pos)


# ---------------------------------------------------------------- IAIF

def _lpc_hann(x, order):
    w = np.hanning(x.size + 2)[1:-1]
    return dsp_core.lpc(x * w, order)


def iaif(signal, ctx, order_vt=18, order_glottis=4, gci_pos=None):
    """Iterative adaptive inverse filtering.

    The all-pole models are estimated on a Hann-windowed span of four
    periods around the analysed GCI (the whole signal if shorter).
    """
    x = np.asarray(signal, dtype=float)
    pos = _pick(ctx, gci_pos)
    t0, fs = ctx.t0, ctx.fs
    if x.size < 3 * t0:
        return _invalid("IAIF", t0, fs, "signal shorter than three periods")
    g = int(ctx.gci[pos])
    try:
        sos = butter(4, IAIF_HIGHPASS_HZ, btype="highpass", fs=fs, output="sos")
        hp = sosfiltfilt(sos, x)
        lo = max(g - 2 * t0, 0)
        hi = min(lo + 4 * t0, x.size)
        lo = max(hi - 4 * t0, 0)
        seg = hp[lo:hi]

        g1 = _lpc_hann(seg, 1)
        vt1 = _lpc_hann(inverse_filter(seg, g1), order_vt)
        v1 = dsp_core.integrate(inverse_filter(seg, vt1), IAIF_LEAK)
        g2 = _lpc_hann(v1, order_glottis)
        tract = dsp_core.integrate(inverse_filter(seg, g2), IAIF_LEAK)
        vt2 = _lpc_hann(tract, order_vt)
    except (LPCError, UnstableModelError, ValueError) as exc:
        return _invalid("IAIF", t0, fs, "LPC failed: %s" % exc)
    dflow = inverse_filter(hp, vt2)
    est = _finish(_segment(dflow, g - t0, g + t0), "IAIF", t0, fs, vt2)
    return _with_start(est, ctx, pos)


# ---------------------------------------------------------------- CCD / ZZT

def _anchor(values_circular, t0):
    """Place a circularly stored sequence so that its quefrency-0 sample
    lands on the frame GCI (index ``t0``)."""
    idx = (np.arange(2 * t0) - t0) % values_circular.size
    return values_circular[idx]


def ccd(frame, nfft=dsp_core.DEFAULT_NFFT):
    """Complex cepstrum decomposition: keep quefrencies ``n <= 0``."""
    if not isinstance(frame, Frame):
        raise TypeError("ccd expects a Frame")
    t0, fs = frame.t0, frame.fs
    nfft = max(nfft, 1 << int(np.ceil(np.log2(4 * frame.samples.size))))
    try:
        cc = dsp_core.complex_cepstrum(frame, nfft)
    except SpectralZeroError as exc:
        return _invalid("CCD", t0, fs, str(exc))
    xmax, _ = dsp_core.mixed_phase_split(cc)
    return _finish(_anchor(xmax, t0), "CCD", t0, fs)


def zzt(frame):
    """Zeros-of-the-z-transform decomposition: rebuild the maximum-phase
    part from the roots outside the unit circle."""
    if not isinstance(frame, Frame):
        raise TypeError("zzt expects a Frame")
    t0, fs = frame.t0, frame.fs
    try:
        zset = dsp_core.zzt_roots(frame)
    except ValueError as exc:
        return _invalid("ZZT", t0, fs, str(exc))
    seq = dsp_core.max_phase_from_zzt(zset)
    m = seq.size - 1
    buf = np.zeros(max(4 * t0, m + 1))
    buf[0] = seq[-1]
    if m:
        buf[buf.size - m:] = seq[:-1]
    est = _finish(_anchor(buf, t0), "ZZT", t0, fs)
    n_edge = int(zset.boundary_mask.sum())
    if n_edge and est.valid:
        est.message = "%d root(s) on the unit circle assigned inside" % n_edge
    return est


def estimate(method, signal, ctx, gci_pos=None, order=18):
    """Run one estimator on the frame around ``ctx.gci[gci_pos]``."""
    method = method.upper()
    if method == "CPIF":
        return cpif(signal, ctx, order, gci_pos)
    if method == "IAIF":
        return iaif(signal, ctx, order, gci_pos=gci_pos)
    if method in ("CCD", "ZZT"):
        pos = _pick(ctx, gci_pos)
        frame = dsp_core.make_frame(signal, ctx.gci[pos], ctx.t0, ctx.fs)
        est = ccd(frame) if method == "CCD" else zzt(frame)
        return _with_start(est, ctx, pos)
    raise ValueError("unknown method %r (choose from %s)" % (method, ", ".join(METHODS)))

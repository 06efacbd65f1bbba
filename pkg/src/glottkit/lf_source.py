"""Liljencrants-Fant glottal source synthesis.

One cycle runs from the glottal opening (sample 0) through the open phase,
whose end is the glottal closure instant (GCI), and then the exponential
return phase which decays to exactly zero at the end of the period::

    E(t) = E0 exp(alpha t) sin(wg t)                        0 <= t <= te
    E(t) = -Ee/(eps ta) [exp(-eps (t-te)) - exp(-eps (T0-te))]  te < t <= T0

with ``te = oq T0``, ``wg = pi / (alpha_m te)`` and ``ta = qa (T0 - te)``.
``eps`` solves ``eps ta = 1 - exp(-eps (T0 - te))`` and ``alpha`` is chosen so
that the sampled derivative sums to zero over the period (complete closure).
"""
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

MIN_PERIOD_SAMPLES = 32


class LFParameterError(ValueError):
    """LF parameters outside their admissible domain."""


class LFResolutionError(ValueError):
    """The period is too short for the sampling rate."""


class LFSynthesisError(RuntimeError):
    """The parameter combination produced a degenerate waveform."""


@dataclass(frozen=True)
class LFParams:
    f0: float
    oq: float
    alpha_m: float
    qa: float = 0.1
    ee: float = 1.0

    def __post_init__(self):
        if not (self.f0 > 0 and np.isfinite(self.f0)):
            raise LFParameterError("f0 must be positive, got %r" % self.f0)
        if not 0.0 < self.oq < 1.0:
            raise LFParameterError("oq must lie in (0, 1), got %r" % self.oq)
        if not 0.0 < self.alpha_m < 1.0:
            raise LFParameterError("alpha_m must lie in (0, 1), got %r" % self.alpha_m)
        if not 0.0 <= self.qa < 1.0:
            raise LFParameterError("qa must lie in [0, 1), got %r" % self.qa)
        if not self.ee > 0:
            raise LFParameterError("ee must be positive, got %r" % self.ee)

    def period_samples(self, fs):
        return int(round(fs / self.f0))


@dataclass(frozen=True)
class GlottalCycle:
    """One period starting at the glottal opening.

    ``gci_index`` is the closure instant ``te`` where the return phase
    begins. ``trough_index`` is the derivative minimum; the two coincide
    unless the growing sinusoid bottoms out before ``te`` (alpha_m below
    about 0.65).
    """

    flow: np.ndarray
    dflow: np.ndarray
    fs: float
    gci_index: int
    trough_index: int

    @property
    def t0(self):
        return len(self.dflow)

    @property
    def realized_f0(self):
        return self.fs / len(self.dflow)


def _return_decay(ta, span, rtol=1e-10):
    """Bisection for eps in ``eps ta = 1 - exp(-eps span)``, ``0 < ta < span``."""
    g = lambda e: e * ta - 1.0 + np.exp(-e * span)
    lo = (span - ta) / span**2
    hi = 1.0 / ta
    while g(lo) >= 0.0:
        lo *= 0.5
    while g(hi) <= 0.0:
        hi *= 2.0
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if g(mid) > 0.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def synth_lf_cycle(params, fs):
    """Synthesize one period of LF glottal flow and flow derivative.

    Parameters
    ----------
    params : LFParams
    fs : float
        Sampling rate in Hz (at least 8000).

    Returns
    -------
    GlottalCycle
        ``dflow`` in units of ``ee``; ``flow`` is ``cumsum(dflow) / fs``.
    """
    if not isinstance(params, LFParams):
        raise LFParameterError("params must be an LFParams instance")
    if fs < 8000:
        raise LFParameterError("fs must be at least 8000 Hz, got %r" % fs)
    n = params.period_samples(fs)
    if n < MIN_PERIOD_SAMPLES:
        raise LFResolutionError(
            "period of %d samples at f0=%g Hz, fs=%g Hz is below %d"
            % (n, params.f0, fs, MIN_PERIOD_SAMPLES))
    ne = int(round(params.oq * n))
    if not 1 <= ne <= n - 2:
        raise LFResolutionError("open phase of %d samples does not fit the period" % ne)

    t = np.arange(n) / fs
    t0 = n / fs
    te = ne / fs
    wg = np.pi / (params.alpha_m * te)
    ee = params.ee

    ret = np.zeros(n - ne - 1)
    tr = t[ne + 1:]
    span = t0 - te
    ta = params.qa * span
    if ta > 0.0:
        eps = _return_decay(ta, span)
        ret = -(ee / (eps * ta)) * (np.exp(-eps * (tr - te)) - np.exp(-eps * span))
    target = -ret.sum()

    # open phase, parameterized by beta = alpha * te so the bracket is scale-free
    to = t[:ne + 1]
    s_open = np.sin(wg * to)
    s_te = np.sin(wg * te)
    if s_te >= 0.0:
        raise LFSynthesisError(
            "alpha_m=%g leaves the derivative non-negative at closure" % params.alpha_m)
    rel = to / te - 1.0

    def balance(beta):
        return -ee * np.sum(np.exp(beta * rel) * s_open) / s_te - target

    lo, hi = -50.0, 50.0
    while balance(lo) < 0.0:
        lo *= 2.0
        if lo < -1e4:
            raise LFSynthesisError("no growth factor balances the flow for %r" % (params,))
    while balance(hi) > 0.0:
        hi *= 2.0
        if hi > 1e4:
            raise LFSynthesisError("no growth factor balances the flow for %r" % (params,))
    beta = brentq(balance, lo, hi, xtol=1e-14, rtol=1e-14, maxiter=500)
    opened = -ee * np.exp(beta * rel) * s_open / s_te

    dflow = np.concatenate([opened, ret])
    flow = np.cumsum(dflow) / fs
    if flow.min() < -1e-9 * flow.max():
        raise LFSynthesisError("negative flow for %r" % (params,))
    return GlottalCycle(flow=flow, dflow=dflow, fs=float(fs),
                        gci_index=ne, trough_index=int(np.argmin(dflow)))


@dataclass(frozen=True)
class LFTrain:
    signal: np.ndarray
    gci: np.ndarray
    goi: np.ndarray
    cycles: tuple
    fs: float

    def __iter__(self):
        # allows ``signal, gci, goi = synth_lf_train(...)``
        return iter((self.signal, self.gci, self.goi))

    @property
    def flow(self):
        return np.concatenate([c.flow for c in self.cycles])


def synth_lf_train(params_per_cycle, fs):
    """Concatenate LF cycles into a flow-derivative train.

    Returns an :class:`LFTrain`, which unpacks as ``(signal, gci, goi)``;
    ``gci``/``goi`` hold exact sample indices of each closure/opening.
    """
    params_per_cycle = list(params_per_cycle)
    if not params_per_cycle:
        raise LFParameterError("at least one cycle is required")
    cycles, gci, goi = [], [], []
    offset = 0
    for p in params_per_cycle:
        c = synth_lf_cycle(p, fs)
        cycles.append(c)
        goi.append(offset)
        gci.append(offset + c.gci_index)
        offset += c.t0
    signal = np.concatenate([c.dflow for c in cycles])
    return LFTrain(signal=signal, gci=np.array(gci), goi=np.array(goi),
                   cycles=tuple(cycles), fs=float(fs))

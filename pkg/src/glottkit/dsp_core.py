"""Shared numerical kernels: windows, LPC, DAP, complex cepstrum and ZZT."""
from dataclasses import dataclass, field
import warnings

import numpy as np
from scipy.linalg import solve_toeplitz

from . import kernels
from .vocal_tract import ARModel

DEFAULT_NFFT = 4096


class LPCError(ValueError):
    """Degenerate input for linear prediction."""


class SpectralZeroError(ValueError):
    """The spectrum vanishes on the sampling grid; its logarithm is undefined."""

    def __init__(self, bin_index, nfft):
        super().__init__("spectral zero at bin %d of %d" % (bin_index, nfft))
        self.bin_index = bin_index


class DAPConvergenceWarning(RuntimeWarning):
    pass


# ---------------------------------------------------------------- windows

def blackman(length):
    """Symmetric Blackman window; for odd ``length`` the midpoint is exactly 1."""
    if length < 4:
        raise ValueError("window length must be at least 4, got %d" % length)
    return np.blackman(length)


def _centered_blackman(t0):
    # periodic window of length 2*t0: peaks at exactly 1.0 on sample t0
    return np.blackman(2 * t0 + 1)[:-1]


@dataclass(frozen=True)
class Frame:
    """A GCI-centred analysis frame: ``samples[t0]`` is the anchoring GCI."""

    samples: np.ndarray
    fs: float
    center_gci: int
    t0: int
    windowed: bool = True

    def __post_init__(self):
        if len(self.samples) != 2 * self.t0:
            raise ValueError("frame length %d != 2*t0 = %d" % (len(self.samples), 2 * self.t0))

    @property
    def window(self):
        return _centered_blackman(self.t0)


def make_frame(signal, gci, t0, fs, window=True):
    """Cut ``signal[gci - t0 : gci + t0]`` (zero-padded at the edges) and
    apply the GCI-centred Blackman window."""
    signal = np.asarray(signal, dtype=float)
    t0 = int(t0)
    gci = int(gci)
    seg = np.zeros(2 * t0)
    lo, hi = gci - t0, gci + t0
    src_lo, src_hi = max(lo, 0), min(hi, signal.size)
    if src_hi > src_lo:
        seg[src_lo - lo:src_hi - lo] = signal[src_lo:src_hi]
    if window:
        seg = seg * _centered_blackman(t0)
    return Frame(samples=seg, fs=float(fs), center_gci=gci, t0=t0, windowed=window)


# ---------------------------------------------------------------- LPC / DAP

def autocorrelation(x, maxlag):
    x = np.asarray(x, dtype=float)
    n = x.size
    nfft = 1 << int(np.ceil(np.log2(2 * n)))
    r = np.fft.irfft(np.abs(np.fft.rfft(x, nfft)) ** 2, nfft)[:maxlag + 1]
    if r.size < maxlag + 1:
        r = np.concatenate([r, np.zeros(maxlag + 1 - r.size)])
    return r


def _check_lpc_input(x, order):
    if order < 0:
        raise LPCError("order must be non-negative")
    if x.size <= order:
        raise LPCError("need more than %d samples, got %d" % (order, x.size))
    if not np.all(np.isfinite(x)):
        raise LPCError("non-finite samples")
    if np.ptp(x) == 0.0:
        raise LPCError("constant signal: autocorrelation is degenerate")


def lpc(signal, order):
    """Autocorrelation-method linear prediction (Levinson-Durbin).

    The gain is ``sqrt(prediction_error / len(signal))``, so order 0 gives the
    RMS of the signal.
    """
    x = np.asarray(signal, dtype=float)
    _check_lpc_input(x, order)
    r = autocorrelation(x, order)
    try:
        a, err, _ = kernels.levinson(r, order)
    except FloatingPointError as exc:
        raise LPCError(str(exc)) from None
    return ARModel(a[1:], float(np.sqrt(err / x.size)))


def _is_stable(a):
    if a.size <= 1:
        return True
    return bool(np.max(np.abs(np.roots(a))) < 1.0)


@dataclass
class DAPResult:
    model: ARModel
    is_distance: float
    lpc_is_distance: float
    history: list = field(default_factory=list)
    converged: bool = True
    n_iter: int = 0


def _power_spectrum(segments, nbins):
    m = 2 * nbins
    p = np.zeros(nbins + 1)
    total = 0
    for seg in segments:
        seg = np.asarray(seg, dtype=float)
        if seg.size > m:
            raise ValueError("segment of %d samples exceeds the %d-point grid" % (seg.size, m))
        p += np.abs(np.fft.rfft(seg, m)) ** 2
        total += seg.size
    return p / total, total


def _is_distance(a, p, weights, m):
    q = p * np.abs(np.fft.rfft(a, m)) ** 2
    g2 = np.dot(weights, q)
    return -np.dot(weights, np.log(q / g2)), g2


def dap_fit(signal, order, nbins=512, tol=1e-6, max_iter=100):
    """Discrete all-pole model fit (El-Jaroudi & Makhoul).

    Minimizes the Itakura-Saito distance between the periodogram of
    ``signal`` sampled on ``2 * nbins`` uniform frequencies and the all-pole
    model spectrum, starting from the LPC solution on the same grid. Every
    accepted iterate lowers the distance; ``signal`` may also be a list of
    segments whose periodograms are pooled.

    Returns
    -------
    DAPResult
        ``history`` holds the IS distance after each accepted iteration;
        ``converged`` is False when ``max_iter`` was exhausted.
    """
    if isinstance(signal, (list, tuple)):
        segments = [np.asarray(s, dtype=float) for s in signal]
    else:
        segments = [np.asarray(signal, dtype=float)]
    total = sum(s.size for s in segments)
    if total < order + 2:
        raise LPCError("DAP needs at least %d samples, got %d" % (order + 2, total))
    if nbins < 2 * order:
        raise ValueError("nbins must be at least 2*order")
    m = 2 * nbins
    p, _ = _power_spectrum(segments, nbins)
    if not np.all(np.isfinite(p)) or p.max() <= 0.0:
        raise LPCError("degenerate (all-zero) spectrum")
    p = np.maximum(p, p.max() * 1e-15)
    weights = np.full(nbins + 1, 2.0 / m)
    weights[0] = weights[-1] = 1.0 / m
    r = np.fft.irfft(p, m)[:order + 1]

    if order == 0:
        d, g2 = _is_distance(np.ones(1), p, weights, m)
        return DAPResult(ARModel(np.zeros(0), float(np.sqrt(g2))), d, d, [d], True, 0)

    try:
        a, _, _ = kernels.levinson(r, order)
    except FloatingPointError as exc:
        raise LPCError(str(exc)) from None
    d, g2 = _is_distance(a, p, weights, m)
    lpc_d = d
    history = [d]
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        h = np.fft.irfft(1.0 / np.fft.rfft(a, m), m)
        target = np.concatenate(([h[0]], h[::-1][:order]))
        c = solve_toeplitz(r, target)
        step = c / c[0] - a
        lam = 1.0
        accepted = False
        while lam > 1e-4:
            cand = a + lam * step
            if _is_stable(cand):
                dc, gc = _is_distance(cand, p, weights, m)
                if dc <= d:
                    accepted = True
                    break
            lam *= 0.5
        if not accepted:
            converged = True
            break
        rel = (d - dc) / d if d > 0 else 0.0
        a, d, g2 = cand, dc, gc
        history.append(d)
        if rel < tol or d <= 1e-15:
            converged = True
            break
    if not converged:
        warnings.warn("DAP did not converge in %d iterations" % max_iter,
                      DAPConvergenceWarning, stacklevel=2)
    return DAPResult(ARModel(a[1:], float(np.sqrt(g2))), float(d), float(lpc_d),
                     history, converged, it)


# ---------------------------------------------------------------- cepstrum

@dataclass(frozen=True)
class ComplexCepstrum:
    """Complex cepstrum on quefrencies ``n = -nfft/2 .. nfft/2 - 1``.

    ``values[i]`` belongs to quefrency ``i - nfft // 2``. ``ndelay`` is the
    delay (in samples) of the linear-phase term removed before the inverse
    transform and ``sign`` the sign of the spectrum at DC.
    """

    values: np.ndarray
    nfft: int
    ndelay: int
    sign: float = 1.0

    def at(self, n):
        n = np.asarray(n)
        return self.values[n + self.nfft // 2]

    @property
    def quefrency(self):
        return np.arange(self.nfft) - self.nfft // 2

    def circular(self):
        """Values in FFT order (index ``k`` holds quefrency ``k`` mod nfft)."""
        return np.fft.ifftshift(self.values)


def _samples(frame):
    return frame.samples if isinstance(frame, Frame) else np.asarray(frame, dtype=float)


def complex_cepstrum(frame, nfft=DEFAULT_NFFT):
    """Complex cepstrum by DFT, unwrapped complex log and inverse DFT."""
    x = _samples(frame)
    if nfft < 4096 or nfft & (nfft - 1):
        raise ValueError("nfft must be a power of two >= 4096, got %d" % nfft)
    if nfft < 4 * x.size:
        raise ValueError("nfft=%d is below 4x the frame length %d" % (nfft, x.size))
    spec = np.fft.rfft(x, nfft)
    mag = np.abs(spec)
    bad = np.flatnonzero(mag < 1e-300)
    if bad.size:
        raise SpectralZeroError(int(bad[0]), nfft)
    sign = 1.0
    if spec[0].real < 0:
        sign = -1.0
        spec = -spec
    phase = np.unwrap(np.angle(spec))
    ndelay = -int(round(phase[-1] / np.pi))
    phase += np.pi * ndelay * np.arange(spec.size) / (nfft // 2)
    ceps = np.fft.irfft(np.log(mag) + 1j * phase, nfft)
    return ComplexCepstrum(np.fft.fftshift(ceps), nfft, ndelay, sign)


def mixed_phase_split(cc):
    """Split a complex cepstrum into maximum- and minimum-phase sequences.

    The maximum-phase part keeps quefrencies ``n <= 0`` (so it carries the
    gain term at ``n = 0``); the minimum-phase part keeps ``n > 0``. Both are
    returned in circular time order: the anticausal sequence lives at the
    end of the buffer.
    """
    c = cc.circular()
    half = cc.nfft // 2
    cmax = np.zeros_like(c)
    cmax[0] = c[0]
    cmax[half + 1:] = c[half + 1:]
    cmin = np.zeros_like(c)
    cmin[1:half] = c[1:half]
    xmax = np.fft.irfft(np.exp(np.fft.rfft(cmax)), cc.nfft) * cc.sign
    xmin = np.fft.irfft(np.exp(np.fft.rfft(cmin)), cc.nfft)
    return xmax, xmin


# ---------------------------------------------------------------- ZZT

@dataclass(frozen=True)
class ZZTSet:
    """Zeros of the z-transform of a (trimmed) frame.

    ``offset`` is the number of leading near-zero samples removed before
    factoring; ``leading`` is the first kept sample ``x(0)``.
    """

    zeros: np.ndarray
    leading: float
    offset: int = 0
    reconstruction_error: float = 0.0
    boundary: np.ndarray = None

    @property
    def outside(self):
        """Mask of maximum-phase zeros (strictly outside the unit circle)."""
        return (np.abs(self.zeros) > 1.0) & ~self.boundary_mask

    @property
    def boundary_mask(self):
        if self.boundary is None:
            return np.zeros(self.zeros.size, dtype=bool)
        return self.boundary

    @property
    def zmax(self):
        return self.zeros[self.outside]

    @property
    def zmin(self):
        return self.zeros[~self.outside]

    @property
    def n_outside(self):
        return int(self.outside.sum())

    @property
    def n_inside(self):
        return int(self.zeros.size - self.n_outside)


def poly_roots(coeffs):
    """Roots of ``c[0] z^(n-1) + ... + c[n-1]`` from the eigenvalues of the
    companion matrix (LAPACK balances it before the QR iterations)."""
    c = np.asarray(coeffs, dtype=float)
    deg = c.size - 1
    if deg < 1:
        return np.zeros(0, dtype=complex)
    comp = np.zeros((deg, deg))
    comp[0, :] = -c[1:] / c[0]
    if deg > 1:
        comp[np.arange(1, deg), np.arange(deg - 1)] = 1.0
    return np.linalg.eigvals(comp).astype(complex)


def _expand(roots, inverse=False):
    """Coefficients of ``prod_k (1 - roots[k] w)`` in ascending powers of ``w``.

    With ``w = 1/z`` this is the monic polynomial with these roots, highest
    power first. Evaluated on the unit circle in the log domain and brought
    back with an FFT, which stays accurate where sequential products lose
    digits to coefficient growth. ``inverse=True`` expands
    ``prod_k (1 - w / roots[k])`` instead.
    """
    roots = np.asarray(roots, dtype=complex)
    deg = roots.size
    if deg == 0:
        return np.ones(1)
    m = 1 << int(np.ceil(np.log2(2 * (deg + 1))))
    w = np.exp(-2j * np.pi * np.arange(m) / m)
    factors = roots if not inverse else 1.0 / roots
    logs = np.zeros(m, dtype=complex)
    for z in factors:
        logs += np.log(1.0 - z * w)
    return np.fft.ifft(np.exp(logs)).real[:deg + 1]


def zzt_roots(frame, boundary_tol=1e-8, trim_tol=1e-12):
    """Zeros of the z-transform of a frame (companion-matrix eigenvalues).

    Leading and trailing samples below ``trim_tol * max|x|`` are trimmed
    first: leading ones only shift the time origin (kept in ``offset``),
    trailing ones only add zeros at the origin.
    """
    x = _samples(frame)
    if x.size < 2:
        raise ValueError("ZZT needs at least 2 samples")
    big = np.flatnonzero(np.abs(x) > trim_tol * np.max(np.abs(x)))
    if big.size == 0:
        raise ValueError("frame is identically zero")
    first, last = int(big[0]), int(big[-1])
    xs = x[first:last + 1]
    if xs.size < 2:
        raise ValueError("fewer than 2 non-zero samples after trimming")
    zeros = poly_roots(xs)
    rebuilt = xs[0] * _expand(zeros)
    err = float(np.linalg.norm(rebuilt - xs) / np.linalg.norm(xs))
    boundary = np.abs(np.abs(zeros) - 1.0) <= boundary_tol
    return ZZTSet(zeros=zeros, leading=float(xs[0]), offset=first,
                  reconstruction_error=err, boundary=boundary)


def cepstrum_from_zzt(zset, nmax):
    """Complex cepstrum at quefrencies ``-nmax..nmax`` from the zeros alone.

    Returns an array of length ``2 * nmax + 1``; index ``nmax + n`` holds
    quefrency ``n``::

        x(0)  = log|x0 prod(-Zmax)|
        x(n)  = -sum Zmin**n / n           n > 0
        x(n)  =  sum Zmax**n / n           n < 0
    """
    out = np.zeros(2 * nmax + 1)
    n = np.arange(1, nmax + 1)
    zmin, zmax = zset.zmin, zset.zmax
    out[nmax + 1:] = -kernels.root_power_sums(zmin, nmax) / n
    out[:nmax] = (-kernels.root_power_sums(1.0 / zmax, nmax) / n)[::-1]
    out[nmax] = np.log(abs(zset.leading)) + np.sum(np.log(np.abs(zmax)))
    return out


def max_phase_from_zzt(zset):
    """Anticausal sequence ``K prod_k (1 - z / Zmax_k)`` with ``K = x0 prod(-Zmax)``.

    Returns coefficients for ``n = -M, ..., 0`` (time order) where ``M`` is
    the number of zeros outside the unit circle.
    """
    zmax = zset.zmax
    c = _expand(zmax, inverse=True)
    gain = zset.leading * np.prod(-zmax).real if zmax.size else zset.leading
    return (gain * c)[::-1]


# ---------------------------------------------------------------- calculus

def integrate(signal, leak=1.0):
    """Leaky integrator ``y[n] = leak * y[n-1] + x[n]``."""
    if not 0.9 < leak <= 1.0:
        raise ValueError("leak must lie in (0.9, 1.0], got %r" % leak)
    return kernels.leaky_integrate(np.asarray(signal, dtype=float), float(leak))


def differentiate(signal):
    """First difference ``y[n] = x[n] - x[n-1]`` with ``x[-1] = 0``."""
    x = np.asarray(signal, dtype=float)
    return np.diff(x, prepend=0.0)

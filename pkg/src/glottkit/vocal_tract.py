"""All-pole vocal tract models, vowel presets and additive noise."""
from dataclasses import dataclass, field

import numpy as np

from . import kernels


class UnstableModelError(ValueError):
    pass


@dataclass(frozen=True)
class ARModel:
    """All-pole filter ``gain / A(z)`` with ``A(z) = 1 + sum_k coeffs[k-1] z^-k``."""

    coeffs: np.ndarray
    gain: float = 1.0
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        a = np.atleast_1d(np.asarray(self.coeffs, dtype=float)).copy()
        a.setflags(write=False)
        object.__setattr__(self, "coeffs", a)
        if not np.all(np.isfinite(a)):
            raise ValueError("AR coefficients must be finite")
        if not (self.gain > 0 and np.isfinite(self.gain)):
            raise ValueError("gain must be positive, got %r" % self.gain)
        if self.check and a.size and np.max(np.abs(self.poles)) >= 1.0:
            raise UnstableModelError(
                "pole radius %.6f >= 1" % np.max(np.abs(self.poles)))

    @property
    def order(self):
        return self.coeffs.size

    @property
    def a(self):
        """Full polynomial ``[1, a_1, ..., a_p]``."""
        return np.concatenate(([1.0], self.coeffs))

    @property
    def poles(self):
        if not self.coeffs.size:
            return np.zeros(0, dtype=complex)
        return np.roots(self.a)

    def response(self, nfft=4096):
        """Complex frequency response on ``nfft // 2 + 1`` bins from 0 to Nyquist."""
        return self.gain / np.fft.rfft(self.a, nfft)

    @classmethod
    def identity(cls):
        return cls(np.zeros(0))


@dataclass(frozen=True)
class VowelPreset:
    label: str
    formants: tuple  # ((F Hz, B Hz), ...)

    @property
    def f1(self):
        return self.formants[0][0] if self.formants else float("nan")


# Approximate adult female formant frequencies for 14 vowels (F1 from 310 to
# 860 Hz), with fixed per-formant bandwidths. Two broad resonances above 5 kHz
# are shared by all vowels: an order-18 fit of real speech spends its spare
# poles there, and without them the spectrum falls 100 dB or more by Nyquist.
_BANDWIDTHS = (70.0, 90.0, 140.0, 200.0, 250.0)
_UPPER = ((6000.0, 500.0), (7300.0, 700.0))
_FORMANT_TABLE = {
    "i": (310, 2790, 3310, 4100, 4900),
    "y": (320, 1950, 2550, 3900, 4850),
    "u": (370, 950, 2670, 3900, 4850),
    "I": (430, 2480, 3070, 4150, 4950),
    "U": (470, 1160, 2680, 3850, 4850),
    "e": (480, 2550, 3000, 4200, 4950),
    "3": (500, 1640, 1960, 3900, 4850),
    "o": (520, 920, 2700, 3850, 4850),
    "O": (590, 920, 2710, 3900, 4900),
    "E": (610, 2330, 2990, 4100, 4900),
    "V": (760, 1400, 2780, 3900, 4850),
    "a": (800, 1700, 2800, 3900, 4850),
    "A": (850, 1220, 2810, 3900, 4850),
    "ae": (860, 2050, 2850, 4000, 4900),
}

VOWEL_PRESETS = {
    label: VowelPreset(label, tuple(zip(map(float, freqs), _BANDWIDTHS)) + _UPPER)
    for label, freqs in _FORMANT_TABLE.items()
}


def vowel_labels():
    return list(VOWEL_PRESETS)


def get_preset(label, presets=None):
    presets = VOWEL_PRESETS if presets is None else presets
    try:
        return presets[label]
    except KeyError:
        raise KeyError("unknown vowel label %r (known: %s)"
                       % (label, ", ".join(presets))) from None


def ar_from_formants(preset, fs, order=18):
    """Place one conjugate pole pair per (F, B) formant and pad with zeros.

    A pole pair sits at ``exp(-pi B / fs) exp(+-j 2 pi F / fs)``.
    """
    formants = list(preset.formants)
    if 2 * len(formants) > order:
        raise ValueError("order %d too small for %d formants" % (order, len(formants)))
    a = np.array([1.0])
    for f, b in formants:
        if not 0.0 < f < fs / 2.0:
            raise ValueError("formant %g Hz outside (0, %g) Hz" % (f, fs / 2.0))
        if b <= 0:
            raise ValueError("bandwidth must be positive, got %g" % b)
        r = np.exp(-np.pi * b / fs)
        a = np.convolve(a, [1.0, -2.0 * r * np.cos(2.0 * np.pi * f / fs), r * r])
    coeffs = np.zeros(order)
    coeffs[:a.size - 1] = a[1:]
    return ARModel(coeffs)


def filter(signal, model):
    """Synthesis: ``y[n] = gain x[n] - sum_k a_k y[n-k]``, zero initial state."""
    return kernels.allpole(np.asarray(signal, dtype=float), model.a, model.gain)


def inverse_filter(signal, model):
    """Analysis: FIR ``A(z) / gain``, the exact inverse of :func:`filter`."""
    return kernels.allzero(np.asarray(signal, dtype=float), model.a, model.gain)


def add_noise(signal, snr_db, seed):
    """Add white Gaussian noise scaled to an exact SNR (in dB) for this draw."""
    x = np.asarray(signal, dtype=float)
    p_sig = np.mean(x * x)
    if not p_sig > 0:
        raise ValueError("signal has zero energy; SNR is undefined")
    w = np.random.default_rng(seed).standard_normal(x.size)
    w *= np.sqrt(p_sig / (10.0 ** (snr_db / 10.0)) / np.mean(w * w))
    return x + w

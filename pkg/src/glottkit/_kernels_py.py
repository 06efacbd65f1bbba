"""Pure-Python implementations of the numerical kernels.

These mirror the compiled ``_kernels`` extension one for one and are used
whenever the extension is unavailable (or ``GLOTTKIT_PURE_PYTHON=1``).
"""
import numpy as np
from scipy.signal import lfilter


def levinson(r, order):
    """Levinson-Durbin recursion on autocorrelation lags ``r[0..order]``.

    Returns ``(a, err, k)`` with ``a[0] == 1`` the prediction polynomial,
    ``err`` the final prediction error power and ``k`` the reflection
    coefficients. Raises ``FloatingPointError`` when the recursion hits a
    non-positive error power.
    """
    r = np.asarray(r, dtype=float)
    a = np.zeros(order + 1)
    a[0] = 1.0
    k = np.zeros(order)
    err = r[0]
    if err <= 0.0:
        raise FloatingPointError("non-positive zero-lag autocorrelation")
    for i in range(1, order + 1):
        acc = r[i]
        for j in range(1, i):
            acc += a[j] * r[i - j]
        ki = -acc / err
        k[i - 1] = ki
        prev = a[1:i].copy()
        for j in range(1, i):
            a[j] = prev[j - 1] + ki * prev[i - j - 1]
        a[i] = ki
        err *= 1.0 - ki * ki
        if err <= 0.0:
            raise FloatingPointError("prediction error vanished at order %d" % i)
    return a, err, k


def allpole(x, a, gain):
    """y[n] = gain * x[n] - sum_{k>=1} a[k] y[n-k], zero initial state."""
    return lfilter([gain], a, np.asarray(x, dtype=float))


def allzero(x, a, gain):
    """y[n] = (sum_{k>=0} a[k] x[n-k]) / gain, zero initial state."""
    return lfilter(np.asarray(a, dtype=float) / gain, [1.0], np.asarray(x, dtype=float))


def leaky_integrate(x, leak):
    return lfilter([1.0], [1.0, -leak], np.asarray(x, dtype=float))


def root_power_sums(roots, nmax):
    """Power sums ``s[n-1] = sum_k roots[k]**n`` for n = 1..nmax (real part)."""
    roots = np.asarray(roots, dtype=complex)
    out = np.zeros(nmax)
    if roots.size == 0:
        return out
    p = np.ones_like(roots)
    for n in range(nmax):
        p = p * roots
        out[n] = p.sum().real
    return out


def run_lengths_circular(mask):
    """Length of each maximal run of True in a circular boolean array.

    Returns an integer array ``lab`` of run labels (-1 where False) and the
    list of run lengths indexed by label.
    """
    mask = np.asarray(mask, dtype=bool)
    n = mask.size
    lab = -np.ones(n, dtype=np.int64)
    if not mask.any():
        return lab, []
    if mask.all():
        lab[:] = 0
        return lab, [n]
    start = int(np.argmin(mask))  # a False position; runs never wrap past it
    lengths = []
    cur = -1
    for step in range(1, n + 1):
        i = (start + step) % n
        if mask[i]:
            if cur < 0:
                cur = len(lengths)
                lengths.append(0)
            lab[i] = cur
            lengths[cur] += 1
        else:
            cur = -1
    return lab, lengths

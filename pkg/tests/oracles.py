"""Independent reference computations used to freeze expected values.

The LF oracle works in continuous time: closed-form open and return
phases, alpha from the zero-net-flow condition on the continuous integral,
then a dense (192 kHz) grid for the flow and the extrema.
"""
import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

DENSE_FS = 192000.0


def lf_dense(f0, oq, alpha_m, qa, fs=DENSE_FS):
    """Dense LF derivative and flow over one period, time in seconds."""
    T0 = 1.0 / f0
    te = oq * T0
    wg = np.pi / (alpha_m * te)
    span = T0 - te
    ta = qa * span
    eps = brentq(lambda e: e * ta - 1.0 + np.exp(-e * span), 1e-9 / ta, 1e3 / ta)

    def ret(t):
        return -(np.exp(-eps * (t - te)) - np.exp(-eps * span)) / (eps * ta)

    ret_area = quad(ret, te, T0, limit=200)[0]

    s_te = np.sin(wg * te)

    def opened(t, beta):
        # E(te) = -1; beta = alpha * te keeps the exponent bounded
        return -np.exp(beta * (t / te - 1.0)) * np.sin(wg * t) / s_te

    def open_area(beta):
        return quad(opened, 0, te, args=(beta,), limit=200)[0]

    beta = brentq(lambda b: open_area(b) + ret_area, -60.0, 60.0, xtol=1e-13)
    t = np.arange(int(round(T0 * fs))) / fs
    d = np.where(t <= te, opened(t, beta), ret(t))
    flow = np.concatenate([[0.0], np.cumsum(0.5 * (d[1:] + d[:-1]))]) / fs
    return t, d, flow, T0


def lf_naq(f0, oq, alpha_m, qa):
    _, d, flow, T0 = lf_dense(f0, oq, alpha_m, qa)
    return float(flow.max() / (-d.min() * T0))


def lf_qoq(f0, oq, alpha_m, qa):
    t, _, flow, T0 = lf_dense(f0, oq, alpha_m, qa)
    above = flow > flow.min() + 0.5 * np.ptp(flow)
    idx = np.flatnonzero(above)
    return float((idx[-1] - idx[0] + 1) / DENSE_FS / T0)


def harmonic_dft(cycle, k):
    """Exact harmonic amplitude of a periodic signal from one period's DFT."""
    return float(np.abs(np.fft.fft(cycle)[k]))


if __name__ == "__main__":
    print("NAQ", repr(lf_naq(100.0, 0.6, 0.7, 0.05)))
    print("QOQ", repr(lf_qoq(100.0, 0.6, 0.7, 0.05)))
    for oq in np.round(np.arange(0.3, 0.91, 0.05), 2):
        print(oq, repr(lf_qoq(100.0, oq, 0.7, 0.1)))

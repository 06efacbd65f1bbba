"""SVG figures for bench and voice-quality runs. Byte-reproducible: no
timestamps and a fixed id salt."""
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

_RC = {"svg.hashsalt": "glottkit", "svg.fonttype": "none"}
_LABELS = {"naq_er": "NAQ error rate", "qoq_er": "QOQ error rate", "sd": "mean SD (dB)"}


def _save(fig, path):
    fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})
    plt.close(fig)


def measure_curves(keys, table, methods, xlabel, path, xvalues=None):
    """One panel per measure, one line per method."""
    xs = list(keys) if xvalues is None else list(xvalues)
    with matplotlib.rc_context(_RC):
        fig, axes = plt.subplots(1, 3, figsize=(12, 3.6))
        for ax, measure in zip(axes, ("naq_er", "qoq_er", "sd")):
            for m in methods:
                ax.plot(xs, [table[k, m][measure] for k in keys], marker="o", label=m)
            ax.set_xlabel(xlabel)
            ax.set_ylabel(_LABELS[measure])
            ax.grid(alpha=0.3)
        axes[0].legend()
        fig.tight_layout()
        _save(fig, path)


def vq_histograms(result, features, path):
    methods = sorted({k[0] for k in result.histograms}, key=list(("CPIF", "IAIF", "CCD")).index)
    with matplotlib.rc_context(_RC):
        fig, axes = plt.subplots(len(features), len(methods),
                                 figsize=(4 * len(methods), 3 * len(features)), squeeze=False)
        styles = ("--", "-", ":")
        for j, m in enumerate(methods):
            for i, f in enumerate(features):
                ax = axes[i][j]
                for c, ls in zip(result.classes, styles):
                    h = result.histograms.get((m, f, c))
                    if h is None:
                        continue
                    centers = 0.5 * (h.bin_edges[1:] + h.bin_edges[:-1])
                    ax.plot(centers, h.probabilities, ls, label=c)
                ax.set_title("%s %s" % (m, f))
        axes[0][0].legend()
        fig.tight_layout()
        _save(fig, path)


def vq_distances(result, features, path):
    rows = result.rows()
    with matplotlib.rc_context(_RC):
        fig, axes = plt.subplots(1, len(features), figsize=(4 * len(features), 3.4), squeeze=False)
        for ax, f in zip(axes[0], features):
            sel = [r for r in rows if r[1] == f]
            ax.bar(range(len(sel)), [r[4] for r in sel])
            ax.set_xticks(range(len(sel)))
            ax.set_xticklabels(["%s\n%s-%s" % (r[0], r[2], r[3]) for r in sel], fontsize=6)
            ax.set_ylabel("JS divergence (bits)")
            ax.set_title(f)
        fig.tight_layout()
        _save(fig, path)

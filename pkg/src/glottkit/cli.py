"""``glottkit synth|estimate|bench|vq --config <path> [--seed N] [--out DIR] [--threads N]``"""
import argparse
import os
import sys

import numpy as np

from . import fileio, metrics_bench as mb
from .estimators import AnalysisContext, ContextError, estimate
from .features import extract
from .fileio import ConfigError, MarkerError, WavFormatError
from .lf_source import LFParameterError, LFParams, LFResolutionError, synth_lf_train
from .metrics_bench import fmt
from .vocal_tract import VOWEL_PRESETS, VowelPreset, add_noise, ar_from_formants, filter, get_preset

FS = 16000.0
PEAK = 0.9  # full-scale fraction for written speech


class UsageError(Exception):
    pass


def _presets(cfg):
    table = dict(VOWEL_PRESETS)
    for label, formants in cfg.get("presets", {}).items():
        freqs = [f for f, _ in formants]
        if any(b <= a for a, b in zip(freqs, freqs[1:])):
            raise ConfigError("preset %r: formant frequencies must increase" % label)
        if any(b <= 0 for _, b in formants) or any(not 0 < f < FS / 2 for f in freqs):
            raise ConfigError("preset %r: bad formant or bandwidth" % label)
        table[label] = VowelPreset(label, tuple((float(f), float(b)) for f, b in formants))
    return table


def cmd_synth(cfg, seed, out, threads):
    sc = fileio.section(cfg, "synth")
    name = sc.get("name", "synth")
    presets = _presets(cfg)
    preset = get_preset(sc.get("vowel", "a"), presets)
    params = LFParams(sc.get("f0", 120.0), sc.get("oq", 0.6), sc.get("alpha_m", 0.7),
                      qa=sc.get("qa", 0.05))
    train = synth_lf_train([params] * sc.get("n_cycles", 10), FS)
    speech = filter(train.signal, ar_from_formants(preset, FS, sc.get("order", 18)))
    snr = sc.get("snr_db")
    if snr is not None:
        speech = add_noise(speech, snr, seed)
    speech = speech * (PEAK / np.max(np.abs(speech)))
    wav = os.path.join(out, name + ".wav")
    fileio.write_wav(wav, speech, FS)
    fileio.write_markers(os.path.join(out, name + ".markers"), train.gci, train.goi)
    fileio.write_wav(os.path.join(out, name + "_source.wav"),
                     train.signal * (PEAK / np.max(np.abs(train.signal))), FS)
    return [wav]


def _frames_ok(ctx, n):
    return [i for i, g in enumerate(ctx.gci) if g - ctx.t0 >= 0 and g + ctx.t0 <= n]


def cmd_estimate(cfg, seed, out, threads):
    ec = fileio.section(cfg, "estimate")
    x, fs = fileio.read_wav(ec["wav"])
    gci, goi = fileio.read_markers(ec["markers"], x.size)
    if gci.size < 2:
        raise MarkerError("need at least two GCIs to derive the period")
    t0 = int(round(np.median(np.diff(gci))))
    ctx = AnalysisContext(gci, goi, t0, fs)
    methods = ec.get("methods", ["CPIF", "IAIF", "CCD"])
    rows, dumps = [], []
    for pos in _frames_ok(ctx, x.size):
        for m in methods:
            est = estimate(m, x, ctx, gci_pos=pos, order=ec.get("order", 18))
            rec = extract(est)
            rows.append([int(gci[pos]), m, fmt(rec.valid), fmt(rec.naq), fmt(rec.qoq),
                         fmt(rec.h1h2), fmt(rec.hrf), fmt(rec.f0_used), rec.message])
            if ec.get("dump_estimates", True):
                for n, (d, f) in enumerate(zip(est.dflow, est.flow)):
                    dumps.append([int(gci[pos]), m, n - t0, fmt(d), fmt(f)])
    path = os.path.join(out, "features.csv")
    fileio.write_rows(path, ["gci", "method", "valid", "naq", "qoq", "h1h2", "hrf",
                             "f0", "message"], rows)
    if ec.get("dump_estimates", True):
        fileio.write_rows(os.path.join(out, "estimates.csv"),
                          ["gci", "method", "offset", "dflow", "flow"], dumps)
    return [path]


def _grid_spec(cfg, seed):
    bc = fileio.section(cfg, "bench")
    desk = mb.GridSpec.desk()
    kw = {k: bc[k] for k in ("f0_range", "oq_range", "alpha_m_range", "vowel_labels",
                             "snr_list_db", "qa", "n_cycles", "methods") if k in bc}
    base = {"f0_range": desk.f0_range, "oq_range": desk.oq_range,
            "alpha_m_range": desk.alpha_m_range, "vowel_labels": desk.vowel_labels,
            "snr_list_db": desk.snr_list_db}
    base.update(kw)
    return mb.GridSpec(seed=seed, presets=_presets(cfg), **base), bc.get("plots", False)


def cmd_bench(cfg, seed, out, threads):
    spec, plots = _grid_spec(cfg, seed)
    path = os.path.join(out, "bench.csv")
    rows = []
    with open(path, "w", newline="") as fh:
        import csv
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(mb.csv_header(spec.methods))
        for rec in mb.run_grid(spec, threads=threads):
            w.writerow(mb.csv_row(rec, spec.methods))
            rows.append(mb.record_to_row(rec, spec.methods))
    outputs = [path]
    for by in ("snr_db", "f0", "vowel"):
        keys, table = mb.summarize(rows, by, spec.methods)
        header = [by] + (["f1"] if by == "vowel" else []) + [
            "%s_%s" % (m.lower(), q) for m in spec.methods for q in mb.MEASURES] + ["n"]
        body = []
        for k in keys:
            row = [fmt(k)]
            if by == "vowel":
                row.append(fmt(get_preset(k, spec.presets).f1))
            row += [fmt(table[k, m][q]) for m in spec.methods for q in mb.MEASURES]
            row.append(fmt(table[k, spec.methods[0]]["n"]))
            body.append(row)
        p = os.path.join(out, "summary_by_%s.csv" % by)
        fileio.write_rows(p, header, body)
        outputs.append(p)
        if plots:
            from . import plots as pl
            if by == "vowel":
                keys = sorted(keys, key=lambda k: get_preset(k, spec.presets).f1)
                xs = [get_preset(k, spec.presets).f1 for k in keys]
                pl.measure_curves(keys, table, spec.methods, "F1 (Hz)",
                                  os.path.join(out, "by_f1.svg"), xs)
            else:
                pl.measure_curves(keys, table, spec.methods, by,
                                  os.path.join(out, "by_%s.svg" % by))
    return outputs


def _stimuli_spec(cfg, seed):
    vc = fileio.section(cfg, "vq")
    kw = {k: vc[k] for k in ("n_per_class", "snr_db", "nbins", "methods") if k in vc}
    if "vowel_labels" in vc:
        kw["vowel_labels"] = tuple(vc["vowel_labels"])
    if "classes" in vc:
        kw["classes"] = tuple(
            mb.StimulusClass(c["name"], tuple(c["oq"]), tuple(c["alpha_m"]), tuple(c["qa"]),
                             tuple(c.get("f0", (160.0, 220.0))))
            for c in vc["classes"])
    presets = _presets(cfg)
    for v in kw.get("vowel_labels", ()):
        get_preset(v, presets)
    return mb.StimuliSpec(seed=seed, presets=presets, **kw), vc.get("plots", False)


def cmd_vq(cfg, seed, out, threads):
    spec, plots = _stimuli_spec(cfg, seed)
    res = mb.voice_quality_protocol(spec, threads=threads)
    path = os.path.join(out, "vq_js.csv")
    fileio.write_rows(path, ["method", "feature", "class_a", "class_b", "js_bits"],
                      [[m, f, a, b, fmt(v)] for (m, f, a, b), v in sorted(res.table.items())])
    med = os.path.join(out, "vq_medians.csv")
    fileio.write_rows(med, ["method", "feature", "class", "median", "n_valid"],
                      [[m, f, c, fmt(v), fmt(res.values[m, f, c].size)]
                       for (m, f, c), v in sorted(res.medians.items())])
    for (m, c), n in sorted(res.flagged.items()):
        print("warning: %s/%s has only %d valid frames" % (m, c, n), file=sys.stderr)
    if plots:
        from . import plots as pl
        pl.vq_histograms(res, mb.VQ_FEATURES, os.path.join(out, "vq_histograms.svg"))
        pl.vq_distances(res, mb.VQ_FEATURES, os.path.join(out, "vq_js.svg"))
    return [path, med]


COMMANDS = {"synth": cmd_synth, "estimate": cmd_estimate, "bench": cmd_bench, "vq": cmd_vq}


def build_parser():
    p = argparse.ArgumentParser(prog="glottkit", description="Glottal source estimation toolkit")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", required=True, help="JSON run configuration")
    p.add_argument("--seed", type=int, help="overrides the config seed")
    p.add_argument("--out", help="output directory (else $%s, else config out_dir)" % fileio.OUT_ENV)
    p.add_argument("--threads", type=int, help="worker processes for bench/vq")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = fileio.load_config(args.config)
        seed = args.seed if args.seed is not None else cfg.get("seed", 0)
        if seed < 0:
            raise UsageError("--seed must be non-negative")
        threads = args.threads if args.threads is not None else cfg.get("threads", 1)
        if threads < 1:
            raise UsageError("--threads must be at least 1")
        out = fileio.resolve_out_dir(args.out, cfg)
        os.makedirs(out, exist_ok=True)
        written = COMMANDS[args.command](cfg, seed, out, threads)
    except (ConfigError, UsageError, MarkerError, WavFormatError, ContextError,
            LFParameterError, LFResolutionError, KeyError, ValueError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print("glottkit %s: error: %s" % (args.command, msg), file=sys.stderr)
        return 2
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())

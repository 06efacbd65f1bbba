import csv
import json
import os
import subprocess
import sys
import wave

import numpy as np
import pytest

from glottkit import cli, fileio
from glottkit.fileio import ConfigError, MarkerError, WavFormatError


def write_cfg(tmp_path, **sections):
    cfg = {"schema_version": 1}
    cfg.update(sections)
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(cfg))
    return str(p)


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


SMALL_BENCH = {"f0_range": [120, 60, 180], "oq_range": [0.5, 0.1, 0.6],
               "alpha_m_range": [0.7, 0.1, 0.7], "vowel_labels": ["a", "i"],
               "snr_list_db": [20, 80]}


# ---------------------------------------------------------------- fileio

def test_wav_round_trip(tmp_path):
    x = np.sin(np.arange(1000) * 0.01) * 0.9
    pcm = fileio.write_wav(tmp_path / "a.wav", x, 16000)
    y, fs = fileio.read_wav(tmp_path / "a.wav")
    assert fs == 16000.0
    np.testing.assert_array_equal(np.round(y * 32768).astype(int), pcm)
    assert np.max(np.abs(y - x)) <= 0.5 / 32768


def test_wav_rejects_stereo_and_8bit(tmp_path):
    for ch, width in ((2, 2), (1, 1)):
        p = tmp_path / ("w%d%d.wav" % (ch, width))
        with wave.open(str(p), "wb") as w:
            w.setnchannels(ch)
            w.setsampwidth(width)
            w.setframerate(16000)
            w.writeframes(b"\x00" * 40)
        with pytest.raises(WavFormatError):
            fileio.read_wav(p)
    (tmp_path / "junk.wav").write_bytes(b"not a wav")
    with pytest.raises(WavFormatError):
        fileio.read_wav(tmp_path / "junk.wav")


def test_markers(tmp_path):
    p = tmp_path / "m.txt"
    fileio.write_markers(p, [96, 256], [0, 160])
    assert p.read_text() == "0 GOI\n96 GCI\n160 GOI\n256 GCI\n"
    gci, goi = fileio.read_markers(p, 300)
    assert list(gci) == [96, 256] and list(goi) == [0, 160]
    p.write_text("# header\n10 GCI  # first\n\n30 GOI\n")
    assert list(fileio.read_markers(p)[0]) == [10]
    for bad in ("20 GCI\n10 GCI\n", "10 GXI\n", "x GCI\n", "10 GOI\n", "400 GCI\n"):
        p.write_text(bad)
        with pytest.raises(MarkerError):
            fileio.read_markers(p, 300)


def test_config_schema(tmp_path):
    assert fileio.validate_config({"schema_version": 1, "bench": SMALL_BENCH})
    for bad in ({}, {"schema_version": 2}, {"schema_version": 1, "colour": 1},
                {"schema_version": 1, "bench": {"f0_range": [1, 2]}},
                {"schema_version": 1, "synth": {"oq": 0.5, "typo": 1}},
                {"schema_version": 1, "estimate": {"wav": "a.wav"}}):
        with pytest.raises(ConfigError):
            fileio.validate_config(bad)
    (tmp_path / "x.json").write_text("{")
    with pytest.raises(ConfigError, match="not valid JSON"):
        fileio.load_config(tmp_path / "x.json")


def test_out_dir_precedence(monkeypatch):
    monkeypatch.delenv(fileio.OUT_ENV, raising=False)
    assert fileio.resolve_out_dir(None, {}) == fileio.DEFAULT_OUT
    assert fileio.resolve_out_dir(None, {"out_dir": "c"}) == "c"
    monkeypatch.setenv(fileio.OUT_ENV, "e")
    assert fileio.resolve_out_dir(None, {"out_dir": "c"}) == "e"
    assert fileio.resolve_out_dir("o", {"out_dir": "c"}) == "o"


# ---------------------------------------------------------------- commands

def test_synth_then_estimate(tmp_path, capsys):
    out = tmp_path / "out"
    cfg = write_cfg(tmp_path, synth={"name": "v", "f0": 125, "n_cycles": 6, "vowel": "E"})
    assert cli.main(["synth", "--config", cfg, "--out", str(out)]) == 0
    x, fs = fileio.read_wav(out / "v.wav")
    assert fs == 16000.0 and x.size == 6 * 128
    assert np.max(np.abs(x)) == pytest.approx(0.9, abs=1e-4)
    gci, goi = fileio.read_markers(out / "v.markers", x.size)
    assert gci.size == goi.size == 6

    cfg2 = write_cfg(tmp_path, estimate={"wav": str(out / "v.wav"),
                                         "markers": str(out / "v.markers"),
                                         "methods": ["CPIF", "CCD", "ZZT"]})
    assert cli.main(["estimate", "--config", cfg2, "--out", str(out)]) == 0
    feats = rows(out / "features.csv")
    assert feats[0] == ["gci", "method", "valid", "naq", "qoq", "h1h2", "hrf", "f0", "message"]
    fit = [g for g in gci if g - 128 >= 0 and g + 128 <= x.size]
    assert len(feats) - 1 == 3 * len(fit)
    assert {r[1] for r in feats[1:]} == {"CPIF", "CCD", "ZZT"}
    assert all(r[2] == "1" for r in feats[1:])
    dumps = rows(out / "estimates.csv")
    assert len(dumps) - 1 == 3 * len(fit) * 256


def test_synth_is_byte_reproducible(tmp_path):
    cfg = write_cfg(tmp_path, synth={"snr_db": 30, "n_cycles": 5})
    for d in ("a", "b"):
        assert cli.main(["synth", "--config", cfg, "--out", str(tmp_path / d), "--seed", "4"]) == 0
    assert (tmp_path / "a/synth.wav").read_bytes() == (tmp_path / "b/synth.wav").read_bytes()


@pytest.mark.parametrize("cfg_kw, msg", [
    ({"synth": {"vowel": "zz"}}, "unknown vowel"),
    ({"synth": {"oq": 1.5}}, "oq"),
    ({"bogus": 1}, "Additional properties"),
    ({"bench": {"vowel_labels": ["q"]}}, "unknown vowel"),
])
def test_errors_exit_2(tmp_path, capsys, cfg_kw, msg):
    cmd = "bench" if "bench" in cfg_kw else "synth"
    cfg = write_cfg(tmp_path, **cfg_kw)
    assert cli.main([cmd, "--config", cfg, "--out", str(tmp_path)]) == 2
    assert msg in capsys.readouterr().err


def test_estimate_bad_markers(tmp_path, capsys):
    fileio.write_wav(tmp_path / "a.wav", np.random.default_rng(0).uniform(-.5, .5, 800), 16000)
    (tmp_path / "m").write_text("300 GCI\n100 GCI\n")
    cfg = write_cfg(tmp_path, estimate={"wav": str(tmp_path / "a.wav"), "markers": str(tmp_path / "m")})
    assert cli.main(["estimate", "--config", cfg, "--out", str(tmp_path)]) == 2
    assert "strictly increasing" in capsys.readouterr().err


def test_missing_config(tmp_path, capsys):
    assert cli.main(["vq", "--config", str(tmp_path / "none.json")]) == 2
    assert "cannot read config" in capsys.readouterr().err


def test_bad_seed_and_threads(tmp_path):
    cfg = write_cfg(tmp_path)
    assert cli.main(["synth", "--config", cfg, "--seed", "-1", "--out", str(tmp_path)]) == 2
    assert cli.main(["synth", "--config", cfg, "--threads", "0", "--out", str(tmp_path)]) == 2


def test_bench_outputs_and_env_override(tmp_path, monkeypatch):
    out = tmp_path / "env_out"
    monkeypatch.setenv(fileio.OUT_ENV, str(out))
    cfg = write_cfg(tmp_path, out_dir=str(tmp_path / "ignored"),
                    bench=dict(SMALL_BENCH, plots=True))
    assert cli.main(["bench", "--config", cfg]) == 0
    assert not (tmp_path / "ignored").exists()
    bench = rows(out / "bench.csv")
    assert len(bench) == 1 + 2 * 2 * 1 * 2 * 2
    assert bench[0][:8] == ["index", "f0", "oq", "alpha_m", "vowel", "snr_db", "naq_true",
                            "qoq_true"]
    by_vowel = rows(out / "summary_by_vowel.csv")
    assert by_vowel[0][:2] == ["vowel", "f1"] and len(by_vowel) == 3
    assert len(rows(out / "summary_by_snr_db.csv")) == 3
    for svg in ("by_snr_db.svg", "by_f0.svg", "by_f1.svg"):
        assert (out / svg).read_text().lstrip().startswith("<?xml")


def test_bench_determinism_across_threads(tmp_path):
    cfg = write_cfg(tmp_path, seed=3, bench=dict(SMALL_BENCH, plots=True))
    assert cli.main(["bench", "--config", cfg, "--out", str(tmp_path / "a")]) == 0
    assert cli.main(["bench", "--config", cfg, "--out", str(tmp_path / "b"), "--threads", "2"]) == 0
    for name in ("bench.csv", "summary_by_f0.csv", "by_snr_db.svg"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_vq_small_run_flags(tmp_path, capsys):
    cfg = write_cfg(tmp_path, vq={"n_per_class": 8, "methods": ["CCD"], "vowel_labels": ["a"],
                                  "nbins": 5, "plots": True})
    assert cli.main(["vq", "--config", cfg, "--out", str(tmp_path)]) == 0
    err = capsys.readouterr().err
    assert err.count("warning") == 3
    js = rows(tmp_path / "vq_js.csv")
    assert js[0] == ["method", "feature", "class_a", "class_b", "js_bits"]
    assert len(js) == 1 + 3 * 9
    med = rows(tmp_path / "vq_medians.csv")
    assert len(med) == 1 + 3 * 3
    assert (tmp_path / "vq_histograms.svg").exists() and (tmp_path / "vq_js.svg").exists()


def test_custom_preset(tmp_path):
    cfg = write_cfg(tmp_path, presets={"x": [[400, 80], [1500, 100], [2500, 150]]},
                    synth={"vowel": "x", "n_cycles": 5})
    assert cli.main(["synth", "--config", cfg, "--out", str(tmp_path)]) == 0
    cfg = write_cfg(tmp_path, presets={"x": [[1500, 80], [400, 100]]}, synth={"vowel": "x"})
    assert cli.main(["synth", "--config", cfg, "--out", str(tmp_path)]) == 2


def test_module_entry_point(tmp_path):
    cfg = write_cfg(tmp_path, synth={"n_cycles": 5})
    r = subprocess.run([sys.executable, "-m", "glottkit.cli", "synth", "--config", cfg,
                        "--out", str(tmp_path)], capture_output=True, text=True)
    assert r.returncode == 0
    assert r.stdout.strip() == os.path.join(str(tmp_path), "synth.wav")
    r = subprocess.run([sys.executable, "-m", "glottkit.cli", "nope", "--config", cfg],
                       capture_output=True, text=True)
    assert r.returncode == 2

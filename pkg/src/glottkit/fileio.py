"""WAV, marker, config and CSV plumbing for the command line tool."""
import copy
import csv
import json
import os
import wave

import jsonschema
import numpy as np

SCHEMA_VERSION = 1
OUT_ENV = "GLOTTKIT_OUT"
DEFAULT_OUT = "glottkit_out"


class ConfigError(ValueError):
    pass


class WavFormatError(ValueError):
    pass


class MarkerError(ValueError):
    pass


# ---------------------------------------------------------------- WAV

def write_wav(path, samples, fs):
    """Write float samples in [-1, 1) as 16-bit PCM mono. Returns the int16 data."""
    x = np.asarray(samples, dtype=float)
    if x.ndim != 1:
        raise WavFormatError("only mono signals can be written")
    pcm = np.clip(np.round(x * 32768.0), -32768, 32767).astype("<i2")
    with wave.open(str(path), "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(int(round(fs)))
        w.writeframes(pcm.tobytes())
    return pcm


def read_wav(path):
    """Read a 16-bit PCM mono WAV as floats in [-1, 1) plus its rate."""
    try:
        with wave.open(str(path), "rb") as w:
            if w.getnchannels() != 1:
                raise WavFormatError("%s: %d channels, only mono is supported"
                                     % (path, w.getnchannels()))
            if w.getsampwidth() != 2:
                raise WavFormatError("%s: %d-bit samples, only 16-bit PCM is supported"
                                     % (path, 8 * w.getsampwidth()))
            fs = w.getframerate()
            raw = w.readframes(w.getnframes())
    except wave.Error as exc:
        raise WavFormatError("%s: %s" % (path, exc)) from None
    return np.frombuffer(raw, dtype="<i2").astype(float) / 32768.0, float(fs)


# ---------------------------------------------------------------- markers

def write_markers(path, gci, goi):
    events = sorted([(int(i), "GCI") for i in gci] + [(int(i), "GOI") for i in goi])
    with open(path, "w") as fh:
        for idx, kind in events:
            fh.write("%d %s\n" % (idx, kind))


def read_markers(path, n_samples=None):
    """Parse ``<sample_index> <GCI|GOI>`` lines (``#`` starts a comment)."""
    gci, goi, last = [], [], None
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2 or parts[1] not in ("GCI", "GOI"):
                raise MarkerError("%s:%d: expected '<index> GCI|GOI'" % (path, lineno))
            try:
                idx = int(parts[0])
            except ValueError:
                raise MarkerError("%s:%d: bad sample index %r" % (path, lineno, parts[0])) from None
            if idx < 0 or (n_samples is not None and idx >= n_samples):
                raise MarkerError("%s:%d: index %d outside the signal" % (path, lineno, idx))
            if last is not None and idx <= last:
                raise MarkerError("%s:%d: markers are not strictly increasing" % (path, lineno))
            last = idx
            (gci if parts[1] == "GCI" else goi).append(idx)
    if not gci:
        raise MarkerError("%s: no GCI markers" % path)
    return np.array(gci, dtype=int), np.array(goi, dtype=int)


# ---------------------------------------------------------------- config

_TRIPLE = {"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3}
_METHODS = {"type": "array", "minItems": 1, "uniqueItems": True,
            "items": {"enum": ["CPIF", "IAIF", "CCD", "ZZT"]}}
_BENCH_METHODS = {"type": "array", "minItems": 1, "uniqueItems": True,
                  "items": {"enum": ["CPIF", "IAIF", "CCD"]}}
_RANGE = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}


def _obj(props, required=()):
    return {"type": "object", "properties": props, "required": list(required),
            "additionalProperties": False}


CONFIG_SCHEMA = _obj({
    "schema_version": {"const": SCHEMA_VERSION},
    "seed": {"type": "integer", "minimum": 0},
    "out_dir": {"type": "string"},
    "threads": {"type": "integer", "minimum": 1},
    "presets": {
        "type": "object",
        "additionalProperties": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
        },
    },
    "synth": _obj({
        "name": {"type": "string", "pattern": "^[A-Za-z0-9_.-]+$"},
        "f0": {"type": "number"},
        "oq": {"type": "number"},
        "alpha_m": {"type": "number"},
        "qa": {"type": "number"},
        "n_cycles": {"type": "integer", "minimum": 1},
        "vowel": {"type": "string"},
        "snr_db": {"type": ["number", "null"]},
        "order": {"type": "integer", "minimum": 2},
    }),
    "estimate": _obj({
        "wav": {"type": "string"},
        "markers": {"type": "string"},
        "methods": _METHODS,
        "order": {"type": "integer", "minimum": 2},
        "dump_estimates": {"type": "boolean"},
    }, required=("wav", "markers")),
    "bench": _obj({
        "f0_range": _TRIPLE,
        "oq_range": _TRIPLE,
        "alpha_m_range": _TRIPLE,
        "vowel_labels": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "snr_list_db": {"type": "array", "items": {"type": "number"}, "minItems": 1},
        "qa": {"type": "number"},
        "n_cycles": {"type": "integer", "minimum": 5},
        "methods": _BENCH_METHODS,
        "plots": {"type": "boolean"},
    }),
    "vq": _obj({
        "n_per_class": {"type": "integer", "minimum": 1},
        "snr_db": {"type": "number"},
        "nbins": {"type": "integer", "minimum": 1},
        "vowel_labels": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "methods": _BENCH_METHODS,
        "plots": {"type": "boolean"},
        "classes": {
            "type": "array", "minItems": 3, "maxItems": 3,
            "items": _obj({"name": {"type": "string"}, "oq": _RANGE, "alpha_m": _RANGE,
                           "qa": _RANGE, "f0": _RANGE},
                          required=("name", "oq", "alpha_m", "qa")),
        },
    }),
}, required=("schema_version",))


def validate_config(cfg):
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError("config %s: %s" % (where, exc.message)) from None
    return cfg


def load_config(path):
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError("cannot read config %s: %s" % (path, exc.strerror)) from None
    except json.JSONDecodeError as exc:
        raise ConfigError("config %s is not valid JSON: %s" % (path, exc)) from None
    return validate_config(cfg)


def resolve_out_dir(cli_out, cfg):
    """``--out`` wins, then ``$GLOTTKIT_OUT``, then the config, then a default."""
    for cand in (cli_out, os.environ.get(OUT_ENV), cfg.get("out_dir")):
        if cand:
            return cand
    return DEFAULT_OUT


def section(cfg, name):
    return copy.deepcopy(cfg.get(name, {}))


# ---------------------------------------------------------------- CSV

def write_rows(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)

"""Channel specs (JSON) and the plain-text artifact formats: CSV, PGM, JSON."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .channels import KrausChannel, identity_channel
from .maps import quantum_baker, quantum_standard_map
from .noise import (GadModel, amplitude_damping_qubit, gad_channel, rup_gaussian, sdc_channel,
                    sloppy_noise)
from .torus import TorusSpace


class SpecError(ValueError):
    """Malformed channel or map specification."""


def _space(spec, default_phases=(0.0, 0.0)) -> TorusSpace:
    try:
        n = int(spec["n"])
    except (KeyError, TypeError, ValueError):
        raise SpecError(f"spec needs an integer 'n': {spec!r}") from None
    return TorusSpace(n, float(spec.get("theta_q", default_phases[0])),
                      float(spec.get("theta_p", default_phases[1])))


def channel_from_spec(spec: dict, space: TorusSpace | None = None) -> KrausChannel:
    """Build a channel from ``{"type": ..., parameters...}``.

    ``space`` overrides the dimension and phases given in the spec, which is
    how a noise spec is placed on the same torus as a unitary map.
    """
    if not isinstance(spec, dict) or "type" not in spec:
        raise SpecError(f"channel spec must be an object with a 'type': {spec!r}")
    kind = spec["type"]
    if kind == "amplitude_damping":
        return amplitude_damping_qubit(float(spec["gamma"]))
    sp = space or _space(spec)
    try:
        if kind == "identity":
            return identity_channel(sp)
        if kind == "sdc":
            return sdc_channel(sp, float(spec["eps"]), float(spec["alpha"]),
                               bool(spec.get("signed", False)))
        if kind == "sloppy":
            return sloppy_noise(sp, float(spec["delta"]))
        if kind == "rup":
            return rup_gaussian(sp, float(spec["sigma"]))
        if kind == "gad":
            c = {(int(n), int(k)): complex(re, im) for n, k, re, im in spec["c"]}
            model = GadModel(sp.N, c, bool(spec.get("periodic", False)),
                             spec.get("basis", "momentum"))
            return gad_channel(sp, model)
        if kind == "kraus":
            ops = np.array(spec["ops"], dtype=float)
            if ops.ndim != 4 or ops.shape[-1] != 2:
                raise SpecError("'ops' must be a list of matrices of [re, im] pairs")
            return KrausChannel(sp, ops[..., 0] + 1j * ops[..., 1], {"type": "kraus"})
    except KeyError as exc:
        raise SpecError(f"{kind!r} spec is missing {exc}") from None
    raise SpecError(f"unknown channel type {kind!r}")


def channel_to_spec(ch: KrausChannel) -> dict:
    """Raw Kraus export; round-trips through :func:`channel_from_spec`."""
    K = ch.kraus
    return {"type": "kraus", "n": ch.N, "theta_q": ch.space.theta_q,
            "theta_p": ch.space.theta_p,
            "ops": np.stack([K.real, K.imag], axis=-1).tolist()}


def map_space(spec: dict, n: int) -> TorusSpace:
    """Torus for a map spec; the baker defaults to antiperiodic phases."""
    phases = (0.5, 0.5) if spec.get("type") == "baker" else (0.0, 0.0)
    return _space({**spec, "n": spec.get("n", n)}, phases)


def unitary_from_spec(spec: dict, space: TorusSpace) -> np.ndarray:
    kind = spec.get("type")
    if kind == "standard":
        return quantum_standard_map(space, float(spec["k"]))
    if kind == "baker":
        return quantum_baker(space)
    if kind == "identity":
        return np.eye(space.N, dtype=complex)
    raise SpecError(f"unknown map type {kind!r}")


# --- file formats -----------------------------------------------------------

def fmt(x) -> str:
    """Shortest round-tripping text for a number."""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def write_csv(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def write_json(path, obj):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(_jsonable(obj), indent=2, sort_keys=True, ensure_ascii=False)
    path.write_text(text + "\n", encoding="utf-8")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if np.isfinite(x) else str(x)
    return obj


def gray_levels(values):
    """Map a field to 0..255 with black (0) at the maximum.

    Returns ``(pixels, constant)``; a constant field maps to 128.
    """
    v = np.asarray(values, dtype=float)
    vmax, vmin = float(v.max()), float(v.min())
    if vmax == vmin:
        return np.full(v.shape, 128, dtype=int), True
    return np.rint(255.0 * (vmax - v) / (vmax - vmin)).astype(int), False


def field_image(values):
    """Turn a ``[q, p]`` field into image rows: ``q`` left-to-right, ``p`` upwards."""
    return np.asarray(values).T[::-1]


def write_pgm(path, pixels, comments=()):
    """Plain (P2) greymap with maxval 255."""
    pixels = np.asarray(pixels, dtype=int)
    h, w = pixels.shape
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = ["P2"]
    lines += [f"# {c}" for c in comments]
    lines += [f"{w} {h}", "255"]
    lines += [" ".join(str(int(x)) for x in row) for row in pixels]
    path.write_text("\n".join(lines) + "\n", encoding="ascii")


def read_pgm(path):
    tokens = []
    comments = []
    for line in Path(path).read_text(encoding="ascii").splitlines():
        if line.startswith("#"):
            comments.append(line[1:].strip())
            continue
        tokens += line.split()
    if tokens[0] != "P2":
        raise ValueError("not a plain PGM file")
    w, h, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    data = np.array(tokens[4:], dtype=int).reshape(h, w)
    return data, maxval, comments


def montage(images, ncols: int, pad: int = 2, fill: int = 255):
    """Tile equally sized images row-major with ``pad`` pixels of ``fill``."""
    h, w = images[0].shape
    nrows = -(-len(images) // ncols)
    out = np.full((nrows * h + (nrows - 1) * pad, ncols * w + (ncols - 1) * pad), fill, dtype=int)
    for i, img in enumerate(images):
        r, c = divmod(i, ncols)
        out[r * (h + pad): r * (h + pad) + h, c * (w + pad): c * (w + pad) + w] = img
    return out


def grid_rows(values, qs=None, ps=None):
    """``(q_index, p_index[, q, p], value)`` rows in q-major order."""
    values = np.asarray(values)
    nq, np_ = values.shape
    for j in range(nq):
        for k in range(np_):
            if qs is None:
                yield (j, k, values[j, k])
            else:
                yield (j, k, qs[j], ps[k], values[j, k])


def read_grid_csv(path, column=None):
    """Load a grid CSV written by the CLI back into an ``[q, p]`` array."""
    header, rows = read_csv(path)
    col = header.index(column) if column else len(header) - 1
    iq = np.array([int(r[0]) for r in rows])
    ip = np.array([int(r[1]) for r in rows])
    out = np.zeros((iq.max() + 1, ip.max() + 1))
    out[iq, ip] = [float(r[col]) for r in rows]
    return out

"""Descriptor parsing and report/trajectory serialization."""

from __future__ import annotations

import csv
import json
import os
from pathlib import Path
from typing import Iterable, Sequence

from .algebra import GaussianRational
from .canonical import GeneralSystem, Nor

SCHEMA = "quadsolve.report/1"
TRAJECTORY_HEADER = ["t", "re_x1", "im_x1", "re_x2", "im_x2"]


class DescriptorError(ValueError):
    pass


def _value(v):
    if isinstance(v, str):
        try:
            return GaussianRational.parse(v)
        except ValueError as exc:
            raise DescriptorError(f"cannot parse exact value {v!r}") from exc
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(x, (int, float)) for x in v):
        re, im = v
        if isinstance(re, int) and isinstance(im, int):
            return GaussianRational(re, im)
        return complex(re, im)
    if isinstance(v, int):
        return GaussianRational(v)
    if isinstance(v, float):
        return complex(v)
    raise DescriptorError(f"bad numeric value {v!r}")


def parse_descriptor(data) -> GeneralSystem | Nor:
    """Parse the JSON system descriptor (already decoded, or as text)."""
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise DescriptorError(f"malformed JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise DescriptorError("descriptor must be a JSON object")
    keys = {"general", "canonical"} & set(data)
    if len(keys) != 1:
        raise DescriptorError('descriptor needs exactly one of "general" or "canonical"')
    if "general" in data:
        g = data["general"]
        try:
            vals = [_value(g[k]) for k in GeneralSystem.names()]
        except KeyError as exc:
            raise DescriptorError(f"missing coefficient {exc}") from exc
        try:
            return GeneralSystem(*vals)
        except ValueError as exc:
            raise DescriptorError(str(exc)) from exc
    c = data["canonical"]
    try:
        A = _value(c["A"])
        B2 = _value(c.get("B2", "0"))
    except KeyError as exc:
        raise DescriptorError(f"missing field {exc}") from exc
    sign = c.get("Bsign", 1)
    if sign not in (1, -1):
        raise DescriptorError("Bsign must be 1 or -1")
    try:
        return Nor(A, B2, sign)
    except ValueError as exc:
        raise DescriptorError(str(exc)) from exc


def load_descriptor(path: str) -> GeneralSystem | Nor:
    if path == "-":
        import sys

        text = sys.stdin.read()
    else:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise DescriptorError(str(exc)) from exc
    return parse_descriptor(text)


def descriptor_of(obj) -> dict:
    if isinstance(obj, GeneralSystem):
        return obj.to_json()
    if isinstance(obj, Nor):
        enc = lambda v: str(v) if isinstance(v, GaussianRational) else [complex(v).real, complex(v).imag]
        return {"canonical": {"A": enc(obj.A), "B2": enc(obj.Bsq), "Bsign": obj.Bsign}}
    raise TypeError(type(obj))


def cjson(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def write_trajectory_csv(path: str | os.PathLike, times: Sequence[complex], states: Iterable[Sequence[complex]]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        header = list(TRAJECTORY_HEADER)
        complex_t = any(complex(t).imag != 0 for t in times)
        if complex_t:
            header = ["re_t", "im_t"] + header[1:]
        w.writerow(header)
        for t, (x1, x2) in zip(times, states):
            t = complex(t)
            tcols = [f"{t.real:.17g}", f"{t.imag:.17g}"] if complex_t else [f"{t.real:.17g}"]
            x1, x2 = complex(x1), complex(x2)
            w.writerow(tcols + [f"{v:.17g}" for v in (x1.real, x1.imag, x2.real, x2.imag)])


def read_trajectory_csv(path: str | os.PathLike) -> tuple[list[complex], list[tuple[complex, complex]]]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    ts, xs = [], []
    off = 2 if header[0] == "re_t" else 1
    for r in body:
        t = complex(float(r[0]), float(r[1])) if off == 2 else complex(float(r[0]))
        v = [float(x) for x in r[off:]]
        ts.append(t)
        xs.append((complex(v[0], v[1]), complex(v[2], v[3])))
    return ts, xs


def write_columns(path: str | os.PathLike, header: Sequence[str], columns: Sequence[Sequence[float]]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in zip(*columns):
            w.writerow([f"{float(v):.17g}" for v in row])


def read_columns(path: str | os.PathLike) -> tuple[list[str], list[list[float]]]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header = rows[0]
    cols = [[float(r[i]) for r in rows[1:]] for i in range(len(header))]
    return header, cols


def write_report(path: str | os.PathLike, command: str, body: dict) -> dict:
    report = {"schema": SCHEMA, "command": command}
    report.update(body)
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=False, default=_default)
    return report


def _default(o):
    if isinstance(o, complex):
        return [o.real, o.imag]
    if isinstance(o, GaussianRational):
        return str(o)
    if hasattr(o, "to_json"):
        return o.to_json()
    if hasattr(o, "tolist"):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, default=_default)

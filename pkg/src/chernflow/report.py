"""Run configuration, JSON reports and CSV tables."""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import __version__

TOOL = "chernflow"

_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_ENTRY = re.compile(rf"^([+-]?{_NUM})(?:([+-])({_NUM})?i)?$")


def parse_complex_vector(text: str) -> np.ndarray:
    """Parse ``"a, a+bi, a-bi"`` into a complex vector; whitespace is ignored."""
    entries = "".join(text.split()).split(",")
    out = []
    for e in entries:
        m = _ENTRY.match(e)
        if not m:
            raise ValueError(f"bad complex literal {e!r}; use a, a+bi or a-bi")
        re_part = float(m.group(1))
        im_part = 0.0
        if m.group(2):
            im_part = float(m.group(3) or 1.0)
            if m.group(2) == "-":
                im_part = -im_part
        out.append(complex(re_part, im_part))
    return np.array(out, dtype=complex)


def complex_pairs(v) -> list:
    """Complex vector as ``[[re, im], ...]``."""
    return [[float(x.real), float(x.imag)] for x in np.asarray(v, dtype=complex).ravel()]


@dataclass
class RunConfig:
    subcommand: str
    n: int | None = None
    T0: float | None = None
    lam: float | None = None
    t: float | None = None
    t_end: float | None = None
    steps: int | None = None
    z: str | None = None
    starts: int = 32
    samples: int = 8
    seed: int = 42
    out: str | None = None
    format: str = "json"
    quantity: str = "hsc"
    resolution: float = 1e-4
    lambda_min: float | None = None
    lambda_max: float | None = None
    allow_near_tmax: bool = False

    def __post_init__(self):
        if self.lam is not None and self.t is not None:
            raise ValueError("give either --lambda or --t, not both")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in d.items() if k in names})


@dataclass
class Report:
    config: RunConfig
    results: dict
    tolerances: dict = field(default_factory=dict)
    tool: str = TOOL
    version: str = __version__

    def to_dict(self) -> dict:
        return {
            "tool": self.tool,
            "version": self.version,
            "config": self.config.to_dict(),
            "tolerances": self.tolerances,
            "results": self.results,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Report":
        d = json.loads(text)
        return cls(
            config=RunConfig.from_dict(d["config"]),
            results=d["results"],
            tolerances=d.get("tolerances", {}),
            tool=d.get("tool", TOOL),
            version=d.get("version", __version__),
        )


def format_double(x) -> str:
    return format(float(x), ".17g")


def to_csv(header, rows) -> str:
    """Comma-separated table; floats written with 17 significant digits."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format_double(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()

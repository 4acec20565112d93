"""Run configuration: a sectioned key = value document.

Example::

    [model]
    V =
    W = 1 0 -1, -1 0 1      # W(x) = 2 sin(2 pi x) as (m, re, im) triples
    wall = tanh
    wall_width = 1          # in units of |nu_star| / |theta_star|

    [sweep]
    deltas = 0.04, 0.02, 0.01

Unknown sections or keys are rejected.  Fractions such as ``1/64`` are
accepted for real-valued keys.
"""

from __future__ import annotations

import configparser
import hashlib
import json
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction

from .errors import ValidationError
from .fourier import EVEN, ODD, PeriodicFunction, make_potential


@dataclass
class ModelConfig:
    V: list[tuple[int, float, float]] = field(default_factory=list)
    W: list[tuple[int, float, float]] = field(default_factory=lambda: [(1, 0.0, -1.0), (-1, 0.0, 1.0)])
    wall: str = "tanh"
    wall_width: float = 1.0
    wall_units: str = "natural"
    dirac_index: int = 1


@dataclass
class NumericsConfig:
    K: int = 16
    xi_points: int = 257
    n_bands: int = 4
    h: float = 1 / 64
    X: float | None = None            # None: saturation length plus 12 decay lengths, over delta
    evans_steps: int = 2 ** 14
    scan_points: int = 2001
    grid_n: int = 2 ** 13
    Y: float | None = None            # None: saturation length plus 12 decay lengths
    richardson: bool = True
    margin: float = 0.02


@dataclass
class SweepSection:
    deltas: list[float] = field(default_factory=lambda: [0.08, 0.04, 0.02, 0.01])
    theta_sharp: float = 0.95
    quasimodes: bool = True


@dataclass
class RunSection:
    delta: float = 0.02
    seed: int = 0
    threads: int = 1


@dataclass
class OutputConfig:
    directory: str = "out"
    formats: list[str] = field(default_factory=lambda: ["json", "csv", "svg"])
    eigenvectors: bool = False


@dataclass
class RunConfig:
    model: ModelConfig = field(default_factory=ModelConfig)
    numerics: NumericsConfig = field(default_factory=NumericsConfig)
    sweep: SweepSection = field(default_factory=SweepSection)
    run: RunSection = field(default_factory=RunSection)
    output: OutputConfig = field(default_factory=OutputConfig)

    def potentials(self) -> tuple[PeriodicFunction, PeriodicFunction]:
        V = make_potential({m: complex(re, im) for m, re, im in self.model.V}, EVEN)
        W = make_potential({m: complex(re, im) for m, re, im in self.model.W}, ODD)
        return V, W

    def canonical(self) -> str:
        """Result-relevant settings as canonical JSON (output location and threads excluded)."""
        doc = asdict(self)
        doc["output"].pop("directory")
        doc["run"].pop("threads")
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))

    def hash(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:12]


SECTIONS = {"model": ModelConfig, "numerics": NumericsConfig, "sweep": SweepSection,
            "run": RunSection, "output": OutputConfig}


def _real(text: str, name: str) -> float:
    try:
        return float(Fraction(text.strip())) if "/" in text else float(text)
    except (ValueError, ZeroDivisionError):
        raise ValidationError(f"{name}: expected a number, got {text!r}") from None


def _int(text: str, name: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ValidationError(f"{name}: expected an integer, got {text!r}") from None


def _bool(text: str, name: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValidationError(f"{name}: expected a boolean, got {text!r}")


def _triples(text: str, name: str) -> list[tuple[int, float, float]]:
    out = []
    for item in filter(None, (s.strip() for s in text.split(","))):
        parts = item.split()
        if len(parts) != 3:
            raise ValidationError(f"{name}: each coefficient needs 'm re im', got {item!r}")
        out.append((_int(parts[0], name), _real(parts[1], name), _real(parts[2], name)))
    return out


def _convert(key: str, text: str, default, name: str):
    text = text.strip()
    if key in ("V", "W"):
        return _triples(text, name)
    if key in ("X", "Y"):
        return None if text.lower() in ("", "auto") else _real(text, name)
    if isinstance(default, bool):
        return _bool(text, name)
    if isinstance(default, int):
        return _int(text, name)
    if isinstance(default, float):
        return _real(text, name)
    if isinstance(default, list):
        items = [s.strip() for s in text.split(",") if s.strip()]
        return [_real(s, name) for s in items] if key == "deltas" else items
    return text


def parse_config(text: str) -> RunConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    parser.optionxform = str  # keys are case-sensitive (V, W, K, X, Y)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ValidationError(f"config parse error: {exc}") from None
    cfg = RunConfig()
    for section in parser.sections():
        if section not in SECTIONS:
            raise ValidationError(f"unknown section [{section}]")
        target = getattr(cfg, section)
        known = {f.name for f in fields(target)}
        for key, value in parser.items(section):
            if key not in known:
                raise ValidationError(f"unknown key {key!r} in [{section}]")
            setattr(target, key, _convert(key, value, getattr(target, key), f"{section}.{key}"))
    validate(cfg)
    return cfg


def load_config(path) -> RunConfig:
    try:
        with open(path) as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ValidationError(f"cannot read config {path}: {exc}") from None


def validate(cfg: RunConfig) -> None:
    m, n, s, r, o = cfg.model, cfg.numerics, cfg.sweep, cfg.run, cfg.output

    def positive(name, value):
        if value is not None and not value > 0:
            raise ValidationError(f"{name} must be positive (got {value})")

    if m.wall not in ("tanh", "smoothstep"):
        raise ValidationError(f"model.wall must be tanh or smoothstep (got {m.wall!r})")
    if m.wall_units not in ("natural", "absolute"):
        raise ValidationError("model.wall_units must be natural or absolute")
    positive("model.wall_width", m.wall_width)
    positive("model.dirac_index", m.dirac_index)
    for name in ("K", "xi_points", "n_bands", "h", "X", "evans_steps", "scan_points", "grid_n", "Y"):
        positive(f"numerics.{name}", getattr(n, name))
    if not 0 <= n.margin < 0.5:
        raise ValidationError("numerics.margin must lie in [0, 0.5)")
    for d in s.deltas:
        positive("sweep.deltas", d)
    if not s.deltas:
        raise ValidationError("sweep.deltas must not be empty")
    if not 0 < s.theta_sharp < 1:
        raise ValidationError("sweep.theta_sharp must lie in (0, 1)")
    if r.delta < 0:
        raise ValidationError("run.delta must be non-negative")
    positive("run.threads", r.threads)
    bad = set(o.formats) - {"json", "csv", "svg"}
    if bad:
        raise ValidationError(f"output.formats: unknown format(s) {sorted(bad)}")
    try:
        cfg.potentials()
    except ValueError as exc:
        raise ValidationError(f"model potentials: {exc}") from None

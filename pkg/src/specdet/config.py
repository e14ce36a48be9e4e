"""Scenario files: INI-style text with dotted section names.

Grammar (``#`` or ``;`` start comments)::

    [scenario]
    task = levinson            # jost | det | spectrum | levinson | trace-check | ssf | tracenorm
    name = my_run              # optional, used as output file prefix

    [potential.edge1]
    family = square_well       # zero | square_well | exponential | gaussian | tabulated
    depth = -4
    width = 1
    # tabulated:  file = table.csv   (relative to the config file)
    # optional:   support_hint = 12

    [potential.edge2]
    family = zero

    [interaction]
    preset = delta             # kirchhoff | delta | delta_prime | density | delta_delta1
    params = -2                # comma separated
    phi = 0
    # or raw:  phi = 0, a = 1, b = 0, c = -2, d = -1   (one key per line)

    [numeric]
    ...                        # see NumericSettings for keys and defaults

    [output]
    dir = out
    dump_matrix = false

Every parse problem is reported as ConfigError with the field and the line
number of the offending key where one exists.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, fields
from pathlib import Path

from .errors import ConfigError, InvalidInteraction, InvalidPotential, NonIntegrable, SpecDetError
from .interaction import InteractionMatrix, parameter_warnings, preset
from .potential import EdgePotentials, PotentialProfile, moment

TASKS = ("jost", "det", "spectrum", "levinson", "trace-check", "ssf", "tracenorm")
FAMILY_KEYS = {
    "zero": (),
    "square_well": ("depth", "width"),
    "exponential": ("amplitude", "rate"),
    "gaussian": ("amplitude", "center", "sigma"),
    "tabulated": (),
}


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in text.replace(";", ",").split(",") if t.strip())


def _complexes(text: str) -> tuple[complex, ...]:
    return tuple(complex(t.strip().replace(" ", "")) for t in text.split(",") if t.strip())


@dataclass
class NumericSettings:
    """Grid and tolerance overrides; every field maps to a key in [numeric]."""

    zeta: tuple[complex, ...] = ()
    kappa_min: float = 0.1
    kappa_max: float = 100.0
    n_kappa: int = 41
    k_min: float = 1e-3
    k_max: float = 30.0
    t_list: tuple[float, ...] = (4.0, 9.0, 16.0)
    h_ladder: tuple[float, ...] = (0.02, 0.01)
    box: float = 30.0
    trace_norm_t: tuple[float, ...] = (4.0, 8.0, 16.0, 32.0, 64.0)
    trace_norm_h: float = 0.01
    trace_norm_box: float = 8.0
    lambda_min: float = -10.0
    lambda_max: float = 10.0
    n_lambda: int = 201
    ssf_center: float = 0.5
    ssf_halfwidth: float = 3.5
    ssf_box: float = 60.0
    tol_tail: float = 1e-8
    trace_x: tuple[float, ...] = ()
    winding: bool = True
    kappa_search_max: float | None = None

    _parsers = {
        "zeta": _complexes,
        "t_list": _floats,
        "h_ladder": _floats,
        "trace_norm_t": _floats,
        "trace_x": _floats,
    }


@dataclass
class OutputSettings:
    dir: Path = Path("out")
    dump_matrix: bool = False


@dataclass
class Scenario:
    task: str
    potentials: EdgePotentials
    interaction: InteractionMatrix
    numeric: NumericSettings = field(default_factory=NumericSettings)
    output: OutputSettings = field(default_factory=OutputSettings)
    name: str = "scenario"
    source: Path | None = None

    def describe(self) -> dict:
        return {
            "name": self.name,
            "task": self.task,
            "potential": {"edge1": self.potentials.v1.to_dict(), "edge2": self.potentials.v2.to_dict()},
            "interaction": self.interaction.to_dict(),
        }


class _LineTracker(configparser.ConfigParser):
    """ConfigParser that remembers the line number of every key."""

    def __init__(self):
        super().__init__(inline_comment_prefixes=("#", ";"), interpolation=None)
        self.lines: dict[tuple[str, str], int] = {}

    def _read(self, fp, fpname):
        lines = list(fp)
        section = None
        for no, raw in enumerate(lines, start=1):
            text = raw.strip()
            if text.startswith("[") and text.endswith("]"):
                section = text[1:-1].strip()
            elif section and text and text[0] not in "#;" and ("=" in text or ":" in text):
                key = text.split("=", 1)[0].split(":", 1)[0].strip().lower()
                self.lines.setdefault((section, key), no)
        return super()._read(iter(lines), fpname)


def _get(cp: _LineTracker, section: str, key: str, conv, default=None, *, required=False):
    if not cp.has_option(section, key):
        if required:
            raise ConfigError(f"missing key {key!r} in [{section}]", field=f"{section}.{key}")
        return default
    raw = cp.get(section, key)
    try:
        return conv(raw)
    except (ValueError, TypeError) as exc:
        raise ConfigError(
            f"cannot parse {raw!r}: {exc}", field=f"{section}.{key}", line=cp.lines.get((section, key))
        ) from None


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError("expected a boolean")


def _profile(cp: _LineTracker, section: str, base: Path) -> PotentialProfile:
    if not cp.has_section(section):
        return PotentialProfile.zero()
    family = _get(cp, section, "family", str.strip, "zero")
    if family not in FAMILY_KEYS:
        raise ConfigError(f"unknown family {family!r}", field=f"{section}.family", line=cp.lines.get((section, "family")))
    kw = {k: _get(cp, section, k, float, required=True) for k in FAMILY_KEYS[family]}
    hint = _get(cp, section, "support_hint", float)
    try:
        if family == "tabulated":
            path = _get(cp, section, "file", str.strip, required=True)
            prof = PotentialProfile.from_csv((base / path) if not Path(path).is_absolute() else path)
        else:
            prof = PotentialProfile(family, **kw)
        if hint is not None:
            prof = PotentialProfile(**{**{f.name: getattr(prof, f.name) for f in fields(prof)}, "support_hint": hint})
    except (InvalidPotential, OSError) as exc:
        raise ConfigError(str(exc), field=section, line=cp.lines.get((section, "family"))) from None
    return prof


def _interaction(cp: _LineTracker) -> InteractionMatrix:
    s = "interaction"
    if not cp.has_section(s):
        raise ConfigError("missing [interaction] section", field=s)
    phi = _get(cp, s, "phi", float, 0.0)
    name = _get(cp, s, "preset", str.strip)
    try:
        if name is not None:
            params = _get(cp, s, "params", _floats, ())
            return preset(name, *params, phi=phi)
        vals = {k: _get(cp, s, k, float, required=True) for k in "abcd"}
        return InteractionMatrix(phi, **vals)
    except InvalidInteraction as exc:
        line = cp.lines.get((s, "preset")) or cp.lines.get((s, "a"))
        raise ConfigError(str(exc), field=s, line=line) from None


def _numeric(cp: _LineTracker) -> NumericSettings:
    ns = NumericSettings()
    s = "numeric"
    if not cp.has_section(s):
        return ns
    known = {f.name: f for f in fields(ns)}
    for key in cp.options(s):
        if key not in known:
            raise ConfigError(f"unknown numeric key {key!r}", field=f"{s}.{key}", line=cp.lines.get((s, key)))
        default = getattr(ns, key)
        if key in NumericSettings._parsers:
            conv = NumericSettings._parsers[key]
        elif isinstance(default, bool):
            conv = _bool
        elif isinstance(default, int):
            conv = int
        else:
            conv = float
        setattr(ns, key, _get(cp, s, key, conv))
    return ns


def parse(text: str, *, source: Path | None = None) -> Scenario:
    cp = _LineTracker()
    try:
        cp.read_string(text, source=str(source or "<string>"))
    except configparser.Error as exc:
        raise ConfigError(f"syntax error: {exc}", line=getattr(exc, "lineno", None)) from None
    base = source.parent if source else Path(".")
    task = _get(cp, "scenario", "task", str.strip, required=True) if cp.has_section("scenario") else None
    if task is None:
        raise ConfigError("missing [scenario] section with a task", field="scenario.task")
    if task not in TASKS:
        raise ConfigError(f"unknown task {task!r}", field="scenario.task", line=cp.lines.get(("scenario", "task")))
    name = _get(cp, "scenario", "name", str.strip, source.stem if source else "scenario")
    pots = EdgePotentials(_profile(cp, "potential.edge1", base), _profile(cp, "potential.edge2", base))
    out = OutputSettings()
    if cp.has_section("output"):
        out.dir = Path(_get(cp, "output", "dir", str.strip, "out"))
        out.dump_matrix = _get(cp, "output", "dump_matrix", _bool, False)
    return Scenario(task, pots, _interaction(cp), _numeric(cp), out, name, source)


def load(path: str | Path) -> Scenario:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {p}: {exc.strerror}") from None
    return parse(text, source=p)


@dataclass(frozen=True)
class Diagnostic:
    level: str  # "error" | "warning"
    message: str

    def __str__(self):
        return f"{self.level}: {self.message}"


def validate_text(text: str, *, source: Path | None = None) -> list[Diagnostic]:
    """Dry-run checks without computing anything expensive."""
    try:
        sc = parse(text, source=source)
    except ConfigError as exc:
        return [Diagnostic("error", str(exc))]
    return validate(sc)


def validate(sc: Scenario) -> list[Diagnostic]:
    out = []
    for label, p in zip(("edge1", "edge2"), sc.potentials):
        try:
            moment(p, 1)
        except NonIntegrable as exc:
            out.append(Diagnostic("error", f"{label}: {exc}"))
    out += [Diagnostic("warning", w) for w in parameter_warnings(sc.interaction)]
    n = sc.numeric
    for h in n.h_ladder:
        if h > n.box / 200:
            out.append(Diagnostic("error", f"grid step {h} exceeds box/200 = {n.box / 200:g}"))
        elif abs(round(n.box / h) * h - n.box) > 1e-9 * n.box:
            out.append(Diagnostic("error", f"box {n.box} is not a multiple of grid step {h}"))
    if any(t <= 0 for t in n.t_list):
        out.append(Diagnostic("error", "t_list entries must be positive"))
    if not 0 < n.kappa_min < n.kappa_max:
        out.append(Diagnostic("error", "need 0 < kappa_min < kappa_max"))
    if not 0 < n.k_min < n.k_max:
        out.append(Diagnostic("error", "need 0 < k_min < k_max"))
    if any(z.imag < 0 for z in n.zeta):
        out.append(Diagnostic("error", "zeta values must have Im >= 0"))
    if not math.isfinite(n.tol_tail) or n.tol_tail <= 0:
        out.append(Diagnostic("error", "tol_tail must be positive"))
    return out


def validate_file(path: str | Path) -> list[Diagnostic]:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        return [Diagnostic("error", f"cannot read {p}: {exc.strerror}")]
    return validate_text(text, source=p)


__all__ = [
    "Scenario",
    "NumericSettings",
    "OutputSettings",
    "Diagnostic",
    "parse",
    "load",
    "validate",
    "validate_text",
    "validate_file",
    "TASKS",
    "SpecDetError",
]

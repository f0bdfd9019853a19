"""Analysis configuration files.

A config is an INI file with one ``[analysis]`` section and one
``[variable <name>]`` section per variable::

    [analysis]
    command = regress

    [variable liking]
    kind = numerical
    role = dependent
    c_n = 1
    c_x = 7, 7, 9        ; one value per --input when pooling
    target = 0-1         ; preset (0-1, 0-100, -1-1) or "lo, hi"

    [variable region]
    kind = nominal
    role = independent
    categories = north, south, west
    reference = north

Optional ``[analysis]`` keys: ``iv`` (focal IV for compare-impact,
percent-diff and mediate), ``part_labels`` and ``part_effects`` (pool),
``inputs`` (fallback for ``--input``, relative to the config file) and
``variables`` (columns for anchors-suggest). Numerical variables may carry
``scale_min``/``scale_max``: the printed bounds of a closed-ended scale.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import ConfigError
from .scales import TARGET_PRESETS, Kind, Role, ScaleAnchor, VariableSpec

COMMANDS = (
    "percentize",
    "regress",
    "compare-importance",
    "compare-impact",
    "percent-diff",
    "pool",
    "mediate",
    "anchors-suggest",
)
FORMATS = ("text", "table")

_SECTION_PREFIX = "variable "


@dataclass(frozen=True)
class AnalysisConfig:
    command: str
    inputs: tuple
    specs: tuple
    out: Optional[Path] = None
    format: str = "text"
    delimiter: str = ","
    precision: int = 4
    iv: Optional[str] = None
    part_labels: Optional[tuple] = None
    part_effects: bool = False
    suggest_for: tuple = ()
    # name -> tuple of per-input anchors, only for variables with list-valued c_n/c_x
    part_anchors: dict = field(default_factory=dict)
    declared_bounds: dict = field(default_factory=dict)

    def spec(self, name) -> VariableSpec:
        for s in self.specs:
            if s.name == name:
                return s
        raise ConfigError(f"variable {name!r} is not declared")

    def with_role(self, role: Role) -> list[VariableSpec]:
        return [s for s in self.specs if s.role is role]

    @property
    def categorical_columns(self) -> list[str]:
        return [s.name for s in self.specs if s.kind is Kind.NOMINAL or (s.kind is Kind.BINARY and s.categories)]

    def validate(self) -> "AnalysisConfig":
        cmd = self.command
        if cmd not in COMMANDS:
            raise ConfigError(f"unknown command {cmd!r}; expected one of {', '.join(COMMANDS)}")
        if self.format not in FORMATS:
            raise ConfigError(f"unknown format {self.format!r}")
        if len(self.delimiter) != 1:
            raise ConfigError("delimiter must be a single character")
        if self.precision < 0:
            raise ConfigError("precision must be non-negative")
        if not self.inputs:
            raise ConfigError("no input files given")
        if not self.specs:
            raise ConfigError("no variables declared")
        if cmd != "pool" and len(self.inputs) > 1:
            raise ConfigError(f"{cmd} takes exactly one input")
        if self.part_anchors and cmd != "pool":
            raise ConfigError("per-part anchor lists are only valid for the pool command")
        for name, anchors in self.part_anchors.items():
            if len(anchors) != len(self.inputs):
                raise ConfigError(f"{name}: {len(anchors)} anchors given for {len(self.inputs)} inputs")
        if self.iv is not None:
            self.spec(self.iv)
        for name in self.suggest_for:
            self.spec(name)

        dvs = self.with_role(Role.DEPENDENT)
        ivs = self.with_role(Role.INDEPENDENT)
        if cmd in ("regress", "compare-importance", "mediate", "percent-diff") and len(dvs) != 1:
            raise ConfigError(f"{cmd} needs exactly one dependent variable, found {len(dvs)}")
        if cmd == "compare-impact" and not dvs:
            raise ConfigError("compare-impact needs at least one dependent variable")
        if cmd in ("compare-impact", "percent-diff", "mediate"):
            self.focal_iv()
        if cmd == "mediate" and not self.with_role(Role.MEDIATOR):
            raise ConfigError("mediate needs at least one mediator")
        if cmd == "percent-diff" and self.spec(self.focal_iv()).kind is not Kind.BINARY:
            raise ConfigError("percent-diff needs a binary grouping variable as its independent variable")
        if cmd in ("regress", "compare-importance") and not (ivs or self.with_role(Role.CONTROL)):
            raise ConfigError(f"{cmd} needs at least one predictor")
        return self

    def focal_iv(self) -> str:
        if self.iv is not None:
            return self.iv
        ivs = self.with_role(Role.INDEPENDENT)
        if len(ivs) != 1:
            raise ConfigError(f"{self.command} needs 'iv' in [analysis] when {len(ivs)} independent variables are declared")
        return ivs[0].name


def _split(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _number(section, key, text) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: {text!r} is not a number") from None


def _target(section, text) -> tuple[float, float]:
    text = text.strip()
    if text in TARGET_PRESETS:
        return TARGET_PRESETS[text]
    parts = _split(text)
    if len(parts) != 2:
        raise ConfigError(f"[{section}] target: expected a preset {sorted(TARGET_PRESETS)} or 'lo, hi'")
    return _number(section, "target", parts[0]), _number(section, "target", parts[1])


def _parse_variable(section: str, items) -> tuple[VariableSpec, Optional[tuple], Optional[tuple]]:
    name = section[len(_SECTION_PREFIX):].strip()
    if not name:
        raise ConfigError(f"[{section}] has no variable name")
    known = {"kind", "role", "c_n", "c_x", "target", "categories", "reference", "scale_min", "scale_max"}
    unknown = set(items) - known
    if unknown:
        raise ConfigError(f"[{section}] unknown key(s): {', '.join(sorted(unknown))}")
    try:
        kind = Kind(items.get("kind", "numerical").strip())
        role = Role(items.get("role", "independent").strip())
    except ValueError as exc:
        raise ConfigError(f"[{section}] {exc}") from None

    anchor = None
    part_anchors = None
    if ("c_n" in items) != ("c_x" in items):
        raise ConfigError(f"[{section}] c_n and c_x must be given together")
    if "c_n" in items:
        if kind is not Kind.NUMERICAL:
            raise ConfigError(f"[{section}] anchors apply to numerical variables only")
        lo_t, hi_t = _target(section, items.get("target", "0-1"))
        lows = [_number(section, "c_n", t) for t in _split(items["c_n"])]
        highs = [_number(section, "c_x", t) for t in _split(items["c_x"])]
        if not lows or not highs:
            raise ConfigError(f"[{section}] empty anchor")
        if len(lows) > 1 or len(highs) > 1:
            if len(lows) == 1:
                lows = lows * len(highs)
            if len(highs) == 1:
                highs = highs * len(lows)
            if len(lows) != len(highs):
                raise ConfigError(f"[{section}] c_n and c_x lists differ in length")
            part_anchors = tuple(ScaleAnchor(a, b, lo_t, hi_t) for a, b in zip(lows, highs))
        else:
            anchor = ScaleAnchor(lows[0], highs[0], lo_t, hi_t)

    bounds = None
    if ("scale_min" in items) != ("scale_max" in items):
        raise ConfigError(f"[{section}] scale_min and scale_max must be given together")
    if "scale_min" in items:
        bounds = (_number(section, "scale_min", items["scale_min"]), _number(section, "scale_max", items["scale_max"]))

    try:
        spec = VariableSpec(
            name,
            role,
            kind,
            anchor,
            tuple(_split(items.get("categories", ""))),
            items.get("reference", "").strip() or None,
        )
    except ValueError as exc:
        raise ConfigError(f"[{section}] {exc}") from None
    return spec, part_anchors, bounds


def load_config(
    path,
    inputs=(),
    out=None,
    format="text",
    delimiter=",",
    precision=4,
) -> AnalysisConfig:
    """Parse and validate a config file; command-line values fill the rest."""
    path = Path(path)
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"), interpolation=None)
    parser.optionxform = str
    try:
        with path.open(encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from None

    if not parser.has_section("analysis"):
        raise ConfigError("config has no [analysis] section")
    analysis = dict(parser["analysis"])
    allowed = {"command", "iv", "part_labels", "part_effects", "inputs", "variables"}
    unknown = set(analysis) - allowed
    if unknown:
        raise ConfigError(f"[analysis] unknown key(s): {', '.join(sorted(unknown))}")
    if "command" not in analysis:
        raise ConfigError("[analysis] needs a command")

    specs, part_anchors, bounds = [], {}, {}
    for section in parser.sections():
        if section == "analysis":
            continue
        if not section.startswith(_SECTION_PREFIX):
            raise ConfigError(f"unexpected section [{section}]")
        spec, parts, declared = _parse_variable(section, dict(parser[section]))
        if any(s.name == spec.name for s in specs):
            raise ConfigError(f"variable {spec.name!r} declared twice")
        specs.append(spec)
        if parts is not None:
            part_anchors[spec.name] = parts
        if declared is not None:
            bounds[spec.name] = declared

    inputs = tuple(Path(p) for p in inputs)
    if not inputs and analysis.get("inputs"):
        inputs = tuple(path.parent / p for p in _split(analysis["inputs"]))
    labels = _split(analysis.get("part_labels", ""))
    effects = analysis.get("part_effects", "no").strip().lower()
    if effects not in ("yes", "no", "true", "false"):
        raise ConfigError("[analysis] part_effects must be yes or no")

    config = AnalysisConfig(
        command=analysis["command"].strip(),
        inputs=inputs,
        specs=tuple(specs),
        out=Path(out) if out else None,
        format=format,
        delimiter=delimiter,
        precision=precision,
        iv=(analysis.get("iv") or "").strip() or None,
        part_labels=tuple(labels) or None,
        part_effects=effects in ("yes", "true"),
        suggest_for=tuple(_split(analysis.get("variables", ""))),
        part_anchors=part_anchors,
        declared_bounds=bounds,
    )
    return config.validate()

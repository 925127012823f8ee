"""Experiment configuration: INI-style ``[section]`` / ``key = value`` text."""
from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from importlib import resources

from .grid import GridError, build_phase_space_grid
from .potential import PotentialError, make_potential
from .state import StateError, gaussian_wavepacket

PRESETS = ("quadratic-equivalence", "quartic-divergence", "hydro-closure")
MECHANICS = ("classical", "quantum", "both")
SNAPSHOT_FORMATS = ("binary", "csv")

# section -> key -> default (None marks a required key)
SCHEMA = {
    "experiment": {"preset": ""},
    "grid": {"nx": None, "np": None, "x_min": None, "x_max": None,
             "p_min": None, "p_max": None, "hbar": "1.0"},
    "potential": {"family": None, "coefficients": ""},
    "initial": {"x0": "0.0", "p0": "0.0", "sigma_x": None},
    "run": {"mechanics": None, "dt": None, "t_final": None, "record_every": "1",
            "mass": "1.0", "eigen_every": "1"},
    "output": {"directory": "out", "snapshots": "none", "snapshot_every": "0",
               "hydro": "false"},
}


class ConfigError(ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.violations))


@dataclass
class GridBlock:
    nx: int
    np: int
    x_min: float
    x_max: float
    p_min: float
    p_max: float
    hbar: float = 1.0

    def build(self):
        return build_phase_space_grid(self.nx, self.np, self.x_min, self.x_max,
                                      self.p_min, self.p_max, self.hbar)


@dataclass
class PotentialBlock:
    family: str
    coefficients: list = field(default_factory=list)

    def build(self):
        return make_potential(self.family, self.coefficients)


@dataclass
class InitialBlock:
    sigma_x: float
    x0: float = 0.0
    p0: float = 0.0


@dataclass
class RunBlock:
    mechanics: str
    dt: float
    t_final: float
    record_every: int = 1
    mass: float = 1.0
    eigen_every: int = 1

    @property
    def n_steps(self) -> int:
        return int(round(self.t_final / self.dt))

    @property
    def mechanics_list(self):
        return ["classical", "quantum"] if self.mechanics == "both" else [self.mechanics]


@dataclass
class OutputBlock:
    directory: str = "out"
    snapshots: list = field(default_factory=list)
    snapshot_every: int = 0
    hydro: bool = False


@dataclass
class ExperimentConfig:
    grid: GridBlock
    potential: PotentialBlock
    initial: InitialBlock
    run: RunBlock
    output: OutputBlock
    preset: str = ""

    def echo(self) -> str:
        """The fully resolved configuration, defaults included, as config text."""
        def fmt(v):
            if isinstance(v, bool):
                return "true" if v else "false"
            if isinstance(v, float):
                return repr(v)
            if isinstance(v, list):
                return ", ".join(fmt(x) for x in v)
            return str(v)

        lines = ["[experiment]", f"preset = {self.preset}", ""]
        for name in ("grid", "potential", "initial", "run", "output"):
            block = getattr(self, name)
            lines.append(f"[{name}]")
            for key in SCHEMA[name]:
                lines.append(f"{key} = {fmt(getattr(block, key))}")
            lines.append("")
        return "\n".join(lines)


def _parser():
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str  # keys are case-sensitive
    return cp


def preset_text(name: str) -> str:
    if name not in PRESETS:
        raise ConfigError([f"unknown preset {name!r}; available: {', '.join(PRESETS)}"])
    return resources.files("wignerlab.presets").joinpath(f"{name}.ini").read_text("utf-8")


def parse_config(*texts: str) -> ExperimentConfig:
    """Parse and validate one or more config texts (later texts override earlier).

    Every problem found is collected and raised together as :class:`ConfigError`.
    """
    cp = _parser()
    violations = []
    for text in texts:
        try:
            cp.read_string(text)
        except configparser.Error as exc:
            raise ConfigError([f"malformed config text: {exc}"]) from None

    raw = {}
    for section in cp.sections():
        if section not in SCHEMA:
            violations.append(f"unknown section [{section}]")
            continue
        for key in cp[section]:
            if key not in SCHEMA[section]:
                violations.append(f"unknown key {key!r} in [{section}]")
    for section, keys in SCHEMA.items():
        raw[section] = {}
        for key, default in keys.items():
            if cp.has_option(section, key):
                raw[section][key] = cp[section][key].strip()
            elif default is None:
                violations.append(f"missing required key {key!r} in [{section}]")
            else:
                raw[section][key] = default

    def conv(section, key, kind):
        if key not in raw[section]:
            return None
        text = raw[section][key]
        try:
            if kind is int:
                return int(text)
            if kind is float:
                return float(text)
            if kind is bool:
                low = text.lower()
                if low in ("true", "yes", "1", "on"):
                    return True
                if low in ("false", "no", "0", "off"):
                    return False
                raise ValueError(text)
            if kind is list:
                return [float(v) for v in text.replace(",", " ").split()]
            return text
        except ValueError:
            violations.append(f"[{section}] {key} = {text!r} is not a valid {kind.__name__}")
            return None

    g = {k: conv("grid", k, int if k in ("nx", "np") else float) for k in SCHEMA["grid"]}
    pot = {"family": conv("potential", "family", str),
           "coefficients": conv("potential", "coefficients", list)}
    ini = {k: conv("initial", k, float) for k in SCHEMA["initial"]}
    run = {"mechanics": conv("run", "mechanics", str), "dt": conv("run", "dt", float),
           "t_final": conv("run", "t_final", float),
           "record_every": conv("run", "record_every", int),
           "mass": conv("run", "mass", float), "eigen_every": conv("run", "eigen_every", int)}
    snaps_text = raw["output"]["snapshots"].lower().replace(",", " ").split()
    snaps = [] if snaps_text in ([], ["none"]) else snaps_text
    for s in snaps:
        if s not in SNAPSHOT_FORMATS:
            violations.append(f"[output] snapshots: unknown format {s!r} (use binary, csv or none)")
    out = {"directory": raw["output"]["directory"], "snapshots": snaps,
           "snapshot_every": conv("output", "snapshot_every", int),
           "hydro": conv("output", "hydro", bool)}
    preset = raw["experiment"]["preset"]

    # semantic checks
    for name in ("nx", "np"):
        n = g[name]
        if n is not None and (n <= 0 or n & (n - 1)):
            violations.append(f"{name} must be a power of two")
    grid = None
    if all(v is not None for v in g.values()):
        try:
            grid = build_phase_space_grid(**g)
        except GridError as exc:
            violations.extend(v for v in str(exc).split("; ") if "power of two" not in v)
    if pot["family"] is not None and pot["coefficients"] is not None:
        try:
            make_potential(pot["family"], pot["coefficients"])
        except PotentialError as exc:
            violations.append(str(exc))
    if run["mechanics"] is not None and run["mechanics"] not in MECHANICS:
        violations.append(f"mechanics must be one of {', '.join(MECHANICS)}")
    if run["dt"] is not None and not run["dt"] > 0:
        violations.append("dt must be positive")
    if run["mass"] is not None and not run["mass"] > 0:
        violations.append("mass must be positive")
    for key in ("record_every", "eigen_every"):
        if run[key] is not None and run[key] < 1:
            violations.append(f"{key} must be >= 1")
    if out["snapshot_every"] is not None and out["snapshot_every"] < 0:
        violations.append("snapshot_every must be >= 0")
    if run["dt"] and run["t_final"] is not None and run["dt"] > 0:
        ratio = run["t_final"] / run["dt"]
        if run["t_final"] <= 0:
            violations.append("t_final must be positive")
        elif abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio):
            violations.append(f"t_final/dt = {ratio!r} is not an integer step count")
    if preset and preset not in PRESETS:
        violations.append(f"unknown preset name {preset!r}")
    if grid is not None and ini["sigma_x"] is not None and None not in ini.values():
        try:
            gaussian_wavepacket(grid, ini["x0"], ini["p0"], ini["sigma_x"])
        except StateError as exc:
            violations.append(f"[initial] {exc}")

    if violations:
        raise ConfigError(violations)
    return ExperimentConfig(
        GridBlock(**g), PotentialBlock(**pot),
        InitialBlock(sigma_x=ini["sigma_x"], x0=ini["x0"], p0=ini["p0"]),
        RunBlock(**run), OutputBlock(**out), preset)


def load_config(path=None, preset=None) -> ExperimentConfig:
    """Load a preset, a config file, or a config file layered over a preset."""
    texts = []
    if preset:
        texts.append(preset_text(preset))
    if path:
        with open(path, encoding="utf-8") as fh:
            texts.append(fh.read())
    if not texts:
        raise ConfigError(["either a config path or a preset name is required"])
    return parse_config(*texts)

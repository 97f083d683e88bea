"""TOML run configurations.

Example::

    mode = "temp-min"          # forward | temp-min | switching
    output = "out/case2-4"

    [mesh]
    nx = 32
    ny = 32

    [[regions]]
    tag = "heat"               # heat | protect | protect_prime
    rect = [0.45, 0.45, 0.55, 0.55]

    [[boundary]]
    side = "bottom"            # bottom | right | top | left
    kind = "dirichlet"
    interval = [0.0, 1.0]      # optional, whole side by default

    [source]
    magnitude = 1.0e5

    [material]
    k = 10.0
    c = 20.0
    b = 0.3
    eps = 1.0e-4
    eps_prime = 1.0e-4

    [optimizer]                # optimization modes
    max_iters = 1000

    [design]                   # forward mode: fixed values
    xi = -1.0
"""
from __future__ import annotations

import dataclasses
import os
import re
import sys
from dataclasses import dataclass, field
from importlib import resources

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigurationError
from .material import MaterialParams
from .mesh import Boundary, Region, RegionSpec, Side
from .optimizer import OptimizerConfig

MODES = ("forward", "temp-min", "switching")

_TOP_KEYS = {"mode", "output", "solver_tol", "title"}
_SECTIONS = {
    "mesh": {"nx", "ny", "width", "height"},
    "source": {"magnitude"},
    "material": {f.name for f in dataclasses.fields(MaterialParams)},
    "optimizer": {f.name for f in dataclasses.fields(OptimizerConfig)} - {"solver_tol"},
    "design": {"xi", "eta", "s", "a", "a_prime"},
}
_LIST_SECTIONS = {"regions": {"tag", "rect"}, "boundary": {"side", "kind", "interval"}}


@dataclass
class RunConfig:
    mode: str
    nx: int = 32
    ny: int = 32
    width: float = 1.0
    height: float = 1.0
    regions: list = field(default_factory=list)     # RegionSpec, applied in order
    boundary: list = field(default_factory=list)    # (Side, interval or None, Boundary)
    material: MaterialParams = field(default_factory=MaterialParams)
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    design: dict = field(default_factory=dict)
    source_magnitude: float = 1.0e5
    output: str = "output"
    solver_tol: float = 1e-10
    title: str = ""
    source_path: str | None = None


class _Locator:
    """Best-effort line lookup for error messages."""

    def __init__(self, text, path):
        self.lines = text.splitlines()
        self.path = path

    def line(self, section=None, key=None, occurrence=0):
        start, seen = 0, -1
        if section is not None:
            pat = re.compile(r"^\s*\[{1,2}\s*" + re.escape(section) + r"\s*\]{1,2}")
            for i, ln in enumerate(self.lines):
                if pat.match(ln):
                    seen += 1
                    if seen == occurrence:
                        start = i
                        break
            else:
                return None
            if key is None:
                return start + 1
        if key is not None:
            kpat = re.compile(r"^\s*" + re.escape(key) + r"\s*=")
            for i in range(start, len(self.lines)):
                if i > start and section is not None and self.lines[i].lstrip().startswith("["):
                    break
                if section is None and self.lines[i].lstrip().startswith("["):
                    break
                if kpat.match(self.lines[i]):
                    return i + 1
        return None

    def error(self, message, section=None, key=None, occurrence=0):
        ln = self.line(section, key, occurrence)
        where = f"{self.path}:{ln}" if ln else f"{self.path}"
        return ConfigurationError(f"{where}: {message}")


def parse_config(text, path="<config>"):
    """Parse and validate TOML text into a :class:`RunConfig`."""
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigurationError(f"{path}: {exc}") from None
    loc = _Locator(text, path)

    for key, value in raw.items():
        if isinstance(value, dict):
            if key not in _SECTIONS:
                raise loc.error(f"unknown section [{key}]", section=key)
            unknown = set(value) - _SECTIONS[key]
            if unknown:
                k = sorted(unknown)[0]
                raise loc.error(f"unknown key {k!r} in [{key}]", section=key, key=k)
        elif isinstance(value, list) and value and all(isinstance(v, dict) for v in value):
            if key not in _LIST_SECTIONS:
                raise loc.error(f"unknown section [[{key}]]", section=key)
            for i, item in enumerate(value):
                unknown = set(item) - _LIST_SECTIONS[key]
                if unknown:
                    k = sorted(unknown)[0]
                    raise loc.error(f"unknown key {k!r} in [[{key}]]", section=key, key=k, occurrence=i)
        elif key not in _TOP_KEYS:
            raise loc.error(f"unknown key {key!r}", key=key)

    mode = raw.get("mode")
    if mode not in MODES:
        raise loc.error(f"mode must be one of {', '.join(MODES)}, got {mode!r}", key="mode")
    cfg = RunConfig(mode=mode, source_path=path)
    cfg.output = str(raw.get("output", cfg.output))
    cfg.title = str(raw.get("title", ""))
    cfg.solver_tol = float(raw.get("solver_tol", cfg.solver_tol))

    m = raw.get("mesh", {})
    cfg.nx = m.get("nx", cfg.nx)
    cfg.ny = m.get("ny", cfg.nx)
    cfg.width = float(m.get("width", cfg.width))
    cfg.height = float(m.get("height", cfg.height))
    if not (isinstance(cfg.nx, int) and isinstance(cfg.ny, int) and cfg.nx >= 1 and cfg.ny >= 1):
        raise loc.error("nx and ny must be positive integers", section="mesh")
    if not (cfg.width > 0 and cfg.height > 0):
        raise loc.error("width and height must be positive", section="mesh")

    for i, item in enumerate(raw.get("regions", [])):
        try:
            rect = item["rect"]
            if len(rect) != 4:
                raise ConfigurationError("rect needs [xmin, ymin, xmax, ymax]")
            spec = RegionSpec(*map(float, rect), tag=item["tag"])
        except KeyError as exc:
            raise loc.error(f"region is missing {exc.args[0]!r}", "regions", occurrence=i) from None
        except (ConfigurationError, TypeError, ValueError) as exc:
            raise loc.error(str(exc), "regions", occurrence=i) from None
        cfg.regions.append(spec)

    for i, item in enumerate(raw.get("boundary", [])):
        try:
            side = Side[str(item["side"]).upper()]
            kind = Boundary[str(item.get("kind", "dirichlet")).upper()]
        except KeyError as exc:
            raise loc.error(f"invalid or missing boundary entry {exc.args[0]!r}", "boundary", occurrence=i) from None
        interval = item.get("interval")
        if interval is not None and len(interval) != 2:
            raise loc.error("interval needs [lo, hi]", "boundary", occurrence=i)
        cfg.boundary.append((side, None if interval is None else tuple(map(float, interval)), kind))
    if not any(kind == Boundary.DIRICHLET for _, _, kind in cfg.boundary):
        raise loc.error("no Dirichlet boundary: the temperature is not uniquely defined", section="boundary")

    cfg.source_magnitude = float(raw.get("source", {}).get("magnitude", cfg.source_magnitude))

    try:
        cfg.material = MaterialParams(**{k: float(v) for k, v in raw.get("material", {}).items()})
    except ConfigurationError as exc:
        raise loc.error(str(exc), section="material") from None
    try:
        opt = dict(raw.get("optimizer", {}))
        cfg.optimizer = OptimizerConfig(solver_tol=cfg.solver_tol, **opt)
    except (ConfigurationError, TypeError) as exc:
        raise loc.error(str(exc), section="optimizer") from None

    tags = {r.tag for r in cfg.regions}
    required = {"forward": [Region.HEAT], "temp-min": [Region.HEAT, Region.PROTECT],
                "switching": [Region.HEAT, Region.PROTECT, Region.PROTECT_PRIME]}[mode]
    for tag in required:
        if tag not in tags:
            raise loc.error(f"mode {mode!r} requires a region with tag {tag.name.lower()!r}", section="regions")

    if mode == "forward":
        design = raw.get("design")
        if design is None:
            raise loc.error("forward mode requires a [design] section with fixed values", key="mode")
        for k, v in design.items():
            if not -1.0 <= float(v) <= 1.0:
                raise loc.error(f"design value {k} = {v} outside [-1, 1]", section="design", key=k)
        cfg.design = {k: float(v) for k, v in design.items()}
    elif "design" in raw:
        raise loc.error("[design] is only used in forward mode", section="design")
    return cfg


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigurationError(f"{path}: cannot read config ({exc.strerror})") from None
    return parse_config(text, os.fspath(path))


def preset_names():
    return sorted(p.name[:-5] for p in resources.files("hallfmo.presets").iterdir() if p.name.endswith(".toml"))


def preset_path(name):
    """Filesystem path of a bundled preset such as ``"case2-4"``."""
    p = resources.files("hallfmo.presets") / f"{name}.toml"
    if not p.is_file():
        raise ConfigurationError(f"unknown preset {name!r}; available: {', '.join(preset_names())}")
    return str(p)

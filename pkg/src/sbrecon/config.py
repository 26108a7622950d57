"""Experiment configuration files (INI syntax).

Example::

    [problem]
    kind = fourier          ; fourier | radon | inpaint
    phantom = texture-mix   ; or: image = path/to/file.raw
    n = 128
    lines = 25              ; fourier: radial lines
    seed = 0

    [transform]
    type = wavelet          ; wavelet | shearlet | none
    family = db2
    levels = 4

    [solver]
    preset = wavelet        ; wavelet | shearlet | radon
    reweight = ml-max
    max_iter = 100

    [output]
    name = WIRL1+TGV
"""

import configparser
import dataclasses
import os
import re
from dataclasses import dataclass, field

from .solver import SolverConfig


class ConfigError(ValueError):
    """Invalid configuration; ``line`` is the 1-based line of the offending key."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(where + message)


_PROBLEM_KEYS = {"kind", "phantom", "image", "n", "lines", "angles", "keep", "seed"}
_TRANSFORM_KEYS = {"type", "family", "levels", "directions"}
_OUTPUT_KEYS = {"name", "dir"}
_IHT_KEYS = {"method", "iht_strategy", "iht_param", "iht_eps", "iht_sigma", "iht_iters"}
_SOLVER_FIELDS = {f.name: f for f in dataclasses.fields(SolverConfig)}
_PRESETS = {
    "wavelet": SolverConfig.wavelet_defaults,
    "shearlet": SolverConfig.shearlet_defaults,
    "radon": SolverConfig.radon_defaults,
}


@dataclass
class ExperimentConfig:
    kind: str = "fourier"
    phantom: str = "texture-mix"
    image: str = None
    n: int = 128
    lines: int = 25
    angles: int = 45
    keep: float = 0.5
    seed: int = 0
    transform: str = "wavelet"
    family: str = "db2"
    levels: int = 4
    directions: tuple = (1, 1, 2, 2)
    preset: str = "wavelet"
    solver: SolverConfig = field(default_factory=SolverConfig)
    method: str = "split-bregman"
    iht_strategy: str = "f2"
    iht_param: float = 0.1
    iht_eps: float = 1e-3
    iht_sigma: float = 0.95
    iht_iters: int = 100
    name: str = "run"
    out_dir: str = None
    source: str = None

    def setup_key(self):
        """What must agree between runs that are compared with each other."""
        src = self.image if self.image else self.phantom
        samp = {"fourier": self.lines, "radon": self.angles, "inpaint": self.keep}[self.kind]
        return (self.kind, src, self.n, samp, self.seed)


def _line_of(text, section, key):
    sec = None
    for i, raw in enumerate(text.splitlines(), 1):
        s = raw.strip()
        m = re.match(r"\[(.+)\]$", s)
        if m:
            sec = m.group(1).strip().lower()
            continue
        if sec == section and re.match(rf"{re.escape(key)}\s*[=:]", s, re.IGNORECASE):
            return i
    return None


def _convert(value, typ, what):
    if typ is bool:
        v = value.strip().lower()
        if v in ("1", "true", "yes", "on"):
            return True
        if v in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"{what}: expected a boolean, got {value!r}")
    if typ is int:
        return int(value)
    if typ is float:
        return float(value)
    return value.strip()


def _solver_type(name):
    # the dataclass annotations are plain types, optional ones default to None
    typ = _SOLVER_FIELDS[name].type
    if isinstance(typ, str):
        typ = {"float": float, "int": int, "bool": bool, "str": str}[typ]
    return typ


def parse_config(text, path=None):
    """Parse configuration text into an :class:`ExperimentConfig`."""
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        line = getattr(exc, "lineno", None)
        raise ConfigError(f"syntax error: {exc.message if hasattr(exc, 'message') else exc}",
                          path, line) from None

    def fail(msg, section=None, key=None):
        line = _line_of(text, section, key) if section and key else None
        raise ConfigError(msg, path, line)

    known = {"problem": _PROBLEM_KEYS, "transform": _TRANSFORM_KEYS,
             "solver": set(_SOLVER_FIELDS) | {"preset"} | _IHT_KEYS, "output": _OUTPUT_KEYS}
    for sec in cp.sections():
        if sec not in known:
            raise ConfigError(f"unknown section [{sec}]", path, _section_line(text, sec))
        for key in cp[sec]:
            if key not in known[sec]:
                fail(f"unknown key {key!r} in [{sec}]", sec, key)

    cfg = ExperimentConfig(source=path)

    def get(section, key, typ, target=None):
        if not cp.has_option(section, key):
            return
        raw = cp.get(section, key)
        try:
            val = _convert(raw, typ, key)
        except ValueError:
            fail(f"{key}: cannot read {raw!r} as {typ.__name__}", section, key)
        setattr(cfg if target is None else target, key, val)

    get("problem", "kind", str)
    get("problem", "phantom", str)
    get("problem", "image", str)
    get("problem", "n", int)
    get("problem", "lines", int)
    get("problem", "angles", int)
    get("problem", "keep", float)
    get("problem", "seed", int)
    if cp.has_option("transform", "type"):
        cfg.transform = cp.get("transform", "type").strip()
    get("transform", "family", str)
    get("transform", "levels", int)
    if cp.has_option("transform", "directions"):
        raw = cp.get("transform", "directions")
        try:
            cfg.directions = tuple(int(x) for x in raw.replace(",", " ").split())
        except ValueError:
            fail(f"directions: expected integers, got {raw!r}", "transform", "directions")
    for key in ("name",):
        get("output", key, str)
    if cp.has_option("output", "dir"):
        cfg.out_dir = cp.get("output", "dir").strip()

    preset = cp.get("solver", "preset", fallback=None)
    if preset is None:
        preset = {"radon": "radon"}.get(cfg.kind, "shearlet" if cfg.transform == "shearlet"
                                        else "wavelet")
    preset = preset.strip()
    if preset not in _PRESETS:
        fail(f"preset must be one of {sorted(_PRESETS)}, got {preset!r}", "solver", "preset")
    cfg.preset = preset
    solver = _PRESETS[preset]()
    if cp.has_section("solver"):
        for key in cp["solver"]:
            if key in _SOLVER_FIELDS:
                get("solver", key, _solver_type(key), target=solver)
    for key, typ in (("method", str), ("iht_strategy", str), ("iht_param", float),
                     ("iht_eps", float), ("iht_sigma", float), ("iht_iters", int)):
        get("solver", key, typ)
    cfg.solver = solver
    _validate(cfg, text, fail)
    return cfg


def _section_line(text, section):
    for i, raw in enumerate(text.splitlines(), 1):
        if raw.strip().lower() == f"[{section}]":
            return i
    return None


def _validate(cfg, text, fail):
    from .phantoms import PHANTOMS

    if cfg.kind not in ("fourier", "radon", "inpaint"):
        fail(f"kind must be fourier, radon or inpaint, got {cfg.kind!r}", "problem", "kind")
    if cfg.image is None and cfg.phantom not in PHANTOMS:
        fail(f"unknown phantom {cfg.phantom!r}", "problem", "phantom")
    if cfg.image is not None:
        base = os.path.dirname(cfg.source) if cfg.source else ""
        full = cfg.image if os.path.isabs(cfg.image) else os.path.join(base, cfg.image)
        if not os.path.exists(full):
            fail(f"image file {cfg.image!r} does not exist", "problem", "image")
        cfg.image = full
    if cfg.n < 32:
        fail("n must be >= 32", "problem", "n")
    if cfg.kind == "fourier" and not 1 <= cfg.lines <= cfg.n:
        fail(f"lines must be in [1, n]", "problem", "lines")
    if cfg.kind == "radon" and cfg.angles < 1:
        fail("angles must be >= 1", "problem", "angles")
    if cfg.kind == "inpaint" and not 0 < cfg.keep <= 1:
        fail("keep must be in (0, 1]", "problem", "keep")
    if cfg.transform not in ("wavelet", "shearlet", "none"):
        fail(f"transform type must be wavelet, shearlet or none", "transform", "type")
    if cfg.transform == "wavelet" and cfg.n % (2**cfg.levels):
        fail(f"n={cfg.n} is not divisible by 2**levels", "transform", "levels")
    if cfg.transform == "shearlet":
        if cfg.n & (cfg.n - 1):
            fail("shearlets need a power-of-two n", "problem", "n")
        if len(cfg.directions) != cfg.levels:
            fail("need one direction exponent per level", "transform", "directions")
    if cfg.transform == "none":
        cfg.solver.use_transform = False
    if cfg.method not in ("split-bregman", "iht"):
        fail("method must be split-bregman or iht", "solver", "method")
    if cfg.method == "iht":
        if cfg.kind != "inpaint":
            fail("iht only applies to inpainting", "solver", "method")
        if cfg.transform == "none":
            fail("iht needs a transform", "transform", "type")
        if cfg.iht_strategy not in ("f1", "f2"):
            fail("iht_strategy must be f1 or f2", "solver", "iht_strategy")
        if not 0 < cfg.iht_sigma < 1:
            fail("iht_sigma must be in (0, 1)", "solver", "iht_sigma")
    try:
        cfg.solver.validate()
    except ValueError as exc:
        key = str(exc).split()[0]
        fail(str(exc), "solver", key if key in _SOLVER_FIELDS else None)


def load_config(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", path) from None
    return parse_config(text, path)


def serialize_config(cfg):
    """Render a config back to text; ``parse_config`` of the result is equivalent."""
    lines = ["[problem]", f"kind = {cfg.kind}"]
    if cfg.image:
        lines.append(f"image = {cfg.image}")
    else:
        lines.append(f"phantom = {cfg.phantom}")
    lines += [f"n = {cfg.n}", f"lines = {cfg.lines}", f"angles = {cfg.angles}",
              f"keep = {cfg.keep!r}", f"seed = {cfg.seed}", "",
              "[transform]", f"type = {cfg.transform}", f"family = {cfg.family}",
              f"levels = {cfg.levels}",
              "directions = " + ", ".join(str(d) for d in cfg.directions), "",
              "[solver]", f"preset = {cfg.preset}"]
    for f in dataclasses.fields(SolverConfig):
        val = getattr(cfg.solver, f.name)
        if val is None:
            continue
        lines.append(f"{f.name} = {val!r}" if isinstance(val, float) else f"{f.name} = {val}")
    lines += [f"method = {cfg.method}", f"iht_strategy = {cfg.iht_strategy}",
              f"iht_param = {cfg.iht_param!r}", f"iht_eps = {cfg.iht_eps!r}",
              f"iht_sigma = {cfg.iht_sigma!r}", f"iht_iters = {cfg.iht_iters}", "",
              "[output]", f"name = {cfg.name}"]
    if cfg.out_dir:
        lines.append(f"dir = {cfg.out_dir}")
    return "\n".join(lines) + "\n"

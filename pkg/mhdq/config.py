"""
Scenario configuration: a flat ``key = value`` text file.

``#`` starts a comment and blank lines are ignored. Every key must be known,
may appear once and is converted to the type of its default below.
"""

import logging
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from .compat import CompatTolerances
from .errors import ConfigError
from .grid import KINDS, Grid
from .mhd_core import EquationOfState
from .presets import RECIPES, DatumRecipe
from .stencils import ONE_SIDED_MIN_CELLS

logger = logging.getLogger(__name__)

RESOLVED_NAME = "config.resolved"

HELP = {
    "domain": "quarter | half | periodic",
    "L1": "extent along x1",
    "L2": "extent along x2 (periodic)",
    "L3": "extent along x3 (quarter box; the half box covers [-L3, L3])",
    "n": "shorthand setting n1 = n2 = n3",
    "n1": "cells along x1",
    "n2": "cells along x2",
    "n3": "cells along x3 in the quarter box",
    "eos": "exponential | polytropic",
    "kappa": "exponential closure scale",
    "gamma": "polytropic exponent",
    "cv": "polytropic heat capacity",
    "c": "background H1 (nonzero)",
    "p0": "background pressure (default 0 exponential, 1 polytropic)",
    "datum": " | ".join(RECIPES),
    "amplitude": "perturbation amplitude",
    "width": "support radius of bump presets",
    "cfl": "Courant number in (0, 1]",
    "epsilon": "fourth-difference dissipation coefficient",
    "t_end": "final time",
    "max_steps": "step cap (0 = none)",
    "output_every": "diagnostics/snapshot cadence in steps (0 = start and end only)",
    "output_dir": "directory for snapshots, CSV and the resolved config",
    "require_compat": "reject data that fail the admissibility checks",
    "seed": "seed for randomized verification",
    "serial_reductions": "reduce on one thread",
    "h1_threshold": "minimum |H1| on x1 walls as a fraction of |c|",
    "tol_factor": "scale of the discrete admissibility tolerances",
    "persistence_factor": "allowed H^3 growth factor in persistence checks",
    "divh_growth_factor": "allowed div H growth in units of h^2",
}


@dataclass
class ScenarioConfig:
    domain: str = "quarter"
    L1: float = 1.0
    L2: float = 1.0
    L3: float = 1.0
    n1: int = 32
    n2: int = 32
    n3: int = 32
    eos: str = "exponential"
    kappa: float = 1.0
    gamma: float = 5.0 / 3.0
    cv: float = 1.0
    c: float = 1.0
    p0: Optional[float] = None
    datum: str = "interior-bump"
    amplitude: float = 0.01
    width: float = 0.2
    cfl: float = 0.5
    epsilon: float = 0.02
    t_end: float = 0.5
    max_steps: int = 0
    output_every: int = 10
    output_dir: str = "mhdq-output"
    require_compat: bool = True
    seed: int = 0
    serial_reductions: bool = True
    h1_threshold: float = 0.1
    tol_factor: float = 10.0
    persistence_factor: float = 2.0
    divh_growth_factor: float = 10.0

    def validate(self) -> "ScenarioConfig":
        if self.domain not in KINDS:
            raise ConfigError(f"domain must be one of {', '.join(KINDS)}", key="domain")
        for key in ("L1", "L2", "L3"):
            if not getattr(self, key) > 0:
                raise ConfigError(f"{key} must be positive", key=key)
        for key in ("n1", "n2", "n3"):
            if getattr(self, key) < 1:
                raise ConfigError(f"{key} must be at least 1", key=key)
        if self.eos not in ("exponential", "polytropic"):
            raise ConfigError("eos must be exponential or polytropic", key="eos")
        if self.eos == "exponential" and not self.kappa > 0:
            raise ConfigError("kappa must be positive", key="kappa")
        if self.eos == "polytropic":
            if not self.gamma > 1:
                raise ConfigError("gamma must exceed 1", key="gamma")
            if not self.cv > 0:
                raise ConfigError("cv must be positive", key="cv")
            if self.p0 is not None and not self.p0 > 0:
                raise ConfigError("polytropic closure needs p0 > 0", key="p0")
        if self.c == 0:
            raise ConfigError("c = 0 is rejected: existence for a vanishing normal background "
                              "field is an open problem", key="c")
        if self.datum not in RECIPES:
            raise ConfigError(f"datum must be one of {', '.join(RECIPES)}", key="datum")
        if self.amplitude < 0:
            raise ConfigError("amplitude must be non-negative", key="amplitude")
        if not self.width > 0:
            raise ConfigError("width must be positive", key="width")
        if not 0 < self.cfl <= 1:
            raise ConfigError("cfl must lie in (0, 1]", key="cfl")
        if self.epsilon < 0:
            raise ConfigError("epsilon must be non-negative", key="epsilon")
        if not self.t_end > 0:
            raise ConfigError("t_end must be positive", key="t_end")
        for key in ("max_steps", "output_every"):
            if getattr(self, key) < 0:
                raise ConfigError(f"{key} must be non-negative", key=key)
        for key in ("h1_threshold", "tol_factor", "persistence_factor", "divh_growth_factor"):
            if getattr(self, key) < 0:
                raise ConfigError(f"{key} must be non-negative", key=key)
        return self

    def require_run_size(self, minimum: int = 16):
        for key in ("n1", "n2", "n3"):
            if getattr(self, key) < minimum:
                raise ConfigError(f"{key} must be at least {minimum} for runs", key=key)

    def require_check_size(self, minimum: int = ONE_SIDED_MIN_CELLS):
        """walled axes need room for the one-sided derivative stencils"""
        periodic = self.grid().periodic
        for axis, key in enumerate(("n1", "n2", "n3")):
            if not periodic[axis] and getattr(self, key) < minimum:
                raise ConfigError(f"{key} must be at least {minimum} along a walled axis "
                                  f"for the compatibility checks", key=key)

    def grid(self) -> Grid:
        return Grid(self.domain, (self.L1, self.L2, self.L3), (self.n1, self.n2, self.n3))

    def equation_of_state(self) -> EquationOfState:
        if self.eos == "exponential":
            return EquationOfState.exponential(self.kappa)
        return EquationOfState.polytropic(self.gamma, self.cv)

    def recipe(self) -> DatumRecipe:
        return DatumRecipe(self.datum, self.amplitude, self.width, self.c, self.p0)

    def tolerances(self) -> CompatTolerances:
        return CompatTolerances(tol_factor=self.tol_factor, h1_threshold=self.h1_threshold)

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None:
                lines.append(f"# {f.name} = (default)")
            else:
                lines.append(f"{f.name} = {_format(value)}")
        return "\n".join(lines) + "\n"

    def write_resolved(self, directory: Optional[Union[str, Path]] = None) -> Path:
        """Echo the fully resolved config next to the run's outputs"""
        directory = Path(directory or self.output_dir)
        directory.mkdir(parents=True, exist_ok=True)
        path = directory / RESOLVED_NAME
        path.write_text(self.to_text())
        return path


def _format(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


_TYPES: Dict[str, type] = {
    "domain": str, "L1": float, "L2": float, "L3": float, "n1": int, "n2": int, "n3": int,
    "eos": str, "kappa": float, "gamma": float, "cv": float, "c": float, "p0": float,
    "datum": str, "amplitude": float, "width": float, "cfl": float, "epsilon": float,
    "t_end": float, "max_steps": int, "output_every": int, "output_dir": str,
    "require_compat": bool, "seed": int, "serial_reductions": bool, "h1_threshold": float,
    "tol_factor": float, "persistence_factor": float, "divh_growth_factor": float,
}


def _convert(key: str, raw: str, line: int):
    kind = _TYPES[key]
    if kind is bool:
        lowered = raw.lower()
        if lowered in ("true", "yes", "1", "on"):
            return True
        if lowered in ("false", "no", "0", "off"):
            return False
        raise ConfigError(f"'{raw}' is not a boolean", key=key, line=line)
    try:
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
    except ValueError as exc:
        raise ConfigError(f"'{raw}' is not a valid {kind.__name__} for {key}", key=key,
                          line=line) from exc
    return raw


def _convert_int_shorthand(raw: str, line: int) -> int:
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"'{raw}' is not a valid int for n", key="n", line=line) from exc


def parse_config_text(text: str) -> ScenarioConfig:
    values = {}
    seen: Dict[str, int] = {}
    for number, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got '{line}'", line=number)
        key, _, raw = line.partition("=")
        key, raw = key.strip(), raw.strip()
        if key not in _TYPES and key != "n":
            raise ConfigError(f"unknown key '{key}'", key=key, line=number)
        if key in seen:
            raise ConfigError(f"duplicate key '{key}' (first on line {seen[key]})", key=key, line=number)
        if not raw:
            raise ConfigError(f"missing value for '{key}'", key=key, line=number)
        seen[key] = number
        if key == "n":
            shorthand = _convert_int_shorthand(raw, number)
        else:
            values[key] = _convert(key, raw, number)
    # explicit n1/n2/n3 win over the shorthand whatever the order
    if "n" in seen:
        for axis in ("n1", "n2", "n3"):
            values.setdefault(axis, shorthand)
    return ScenarioConfig(**values).validate()


def parse_config(path: Union[str, Path]) -> ScenarioConfig:
    """Read and validate a scenario file"""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file '{path}' does not exist")
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read '{path}': {exc}") from exc
    config = parse_config_text(text)
    logger.info("loaded config %s (%s, datum=%s)", path, config.domain, config.datum)
    return config


def help_lines() -> List[Tuple[str, str, str]]:
    """(key, default, description) for the --help epilog"""
    defaults = ScenarioConfig()
    rows = []
    for key, text in HELP.items():
        default = "n1/n2/n3" if key == "n" else getattr(defaults, key)
        rows.append((key, "(auto)" if default is None else _format(default), text))
    return rows

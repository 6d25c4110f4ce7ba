"""Project configuration: a TOML document validated with strict keys.

Frequencies may be written either as plain numbers (rad/s) or as strings
with an explicit unit suffix, e.g. ``"20.44 Hz"`` or ``"128.4 rad/s"``;
they are stored in rad/s after parsing.  All other quantities are SI.
"""

from __future__ import annotations

import hashlib
import math
import re
import sys
from pathlib import Path
from typing import Annotated, Literal

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, ValidationError, model_validator

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

from .exceptions import ModelInputError

_FREQ = re.compile(r"^\s*([-+0-9.eE]+)\s*(hz|rad/s)\s*$", re.IGNORECASE)


def parse_frequency(value) -> float:
    """Number -> rad/s as is; ``"<x> Hz"`` -> 2 pi x; ``"<x> rad/s"`` -> x."""
    if isinstance(value, bool):
        raise ValueError("frequency must be a number or a string with a unit")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        m = _FREQ.match(value)
        if not m:
            raise ValueError(f"cannot read frequency {value!r}; use e.g. '20.44 Hz' or '128.4 rad/s'")
        x = float(m.group(1))
        return 2 * math.pi * x if m.group(2).lower() == "hz" else x
    raise ValueError(f"cannot read frequency {value!r}")


Frequency = Annotated[float, BeforeValidator(parse_frequency), Field(gt=0)]
Positive = Annotated[float, Field(gt=0)]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class MeasuredConfig(_Strict):
    """Measured modal data: couplings per transducer and capacitances."""

    omega1: Frequency
    gamma: list[float] | list[list[float]]
    capacitance: list[Positive]
    frequency_ratios: list[Positive] | None = None

    @model_validator(mode="after")
    def _shapes(self):
        rows = self.gamma_rows
        n = len(self.capacitance)
        if n < 2:
            raise ValueError("measured data needs at least 2 transducers")
        for k, row in enumerate(rows):
            if len(row) != n:
                raise ValueError(f"gamma row {k + 1} has {len(row)} values but there are {n} capacitances")
        if self.frequency_ratios is not None and len(self.frequency_ratios) != len(rows):
            raise ValueError(f"{len(self.frequency_ratios)} frequency ratios for {len(rows)} gamma rows")
        return self

    @property
    def gamma_rows(self) -> list[list[float]]:
        if self.gamma and isinstance(self.gamma[0], list):
            return self.gamma  # type: ignore[return-value]
        return [self.gamma]  # type: ignore[list-item]


class PhysicsConfig(_Strict):
    """Beam, transducer array and actuator description (laminate section model)."""

    length: Positive
    E_beam: Positive
    width_beam: Positive
    thickness_beam: Positive
    density_beam: Positive
    n: int = Field(ge=0)
    E_piezo: Positive | None = None
    width_piezo: Positive | None = None
    thickness_piezo: Positive | None = None
    density_piezo: Positive | None = None
    d31: float | None = None
    first_x: float | None = None
    pitch: Positive | None = None
    patch_length: Positive | None = None
    capacitance: Positive | list[Positive] | None = None
    actuator_x: float | None = None
    actuator_length: Positive | None = None

    @model_validator(mode="after")
    def _complete(self):
        needs_piezo = self.n > 0 or self.actuator_x is not None
        if needs_piezo:
            missing = [
                k
                for k in ("E_piezo", "width_piezo", "thickness_piezo", "density_piezo", "d31")
                if getattr(self, k) is None
            ]
            if missing:
                raise ValueError(f"transducer properties missing: {', '.join(missing)}")
        if self.n > 0:
            missing = [k for k in ("first_x", "pitch", "patch_length", "capacitance") if getattr(self, k) is None]
            if missing:
                raise ValueError(f"transducer array needs: {', '.join(missing)}")
            if isinstance(self.capacitance, list) and len(self.capacitance) != self.n:
                raise ValueError(f"{len(self.capacitance)} capacitances for n = {self.n} transducers")
        if self.actuator_x is not None and self.actuator_length is None:
            raise ValueError("actuator_length is required with actuator_x")
        return self


class NetworkConfig(_Strict):
    kind: Literal["rl", "r"] = "rl"
    n: int | None = Field(default=None, ge=2)
    alpha0: float | None = Field(default=None, ge=-1, le=1)
    alpha_n: float | None = Field(default=None, ge=-1, le=1)
    scan_resolution: int = Field(default=81, ge=11)
    damping_rule: Literal["nominal", "flat"] = "nominal"
    L_line: Positive | None = None

    @model_validator(mode="after")
    def _pair(self):
        if (self.alpha0 is None) != (self.alpha_n is None):
            raise ValueError("give both alpha0 and alpha_n, or neither (boundary scan)")
        return self


class SolverConfig(_Strict):
    elements_per_segment: int = Field(default=8, ge=1)
    modes: int = Field(default=5, ge=1)
    grid_points: int = Field(default=4001, ge=3)
    omega_max: Positive = 3.0
    zeta: list[Annotated[float, Field(ge=0)]] = Field(default_factory=list)


class SynthesisConfig(_Strict):
    capacitors: list[Positive] = Field(default_factory=list)
    extra_resistors: list[Positive] = Field(default_factory=list)
    resistor_min: Positive = 1.0
    resistor_max: Positive = 10e6
    tolerance: float = Field(default=0.01, ge=0, lt=1)
    dielectric: str = "polyester"
    compose_capacitors: bool = False
    terminal_target: Positive | None = None


class OutputConfig(_Strict):
    directory: str = "out"


class ProjectConfig(_Strict):
    title: str = ""
    measured: MeasuredConfig | None = None
    physics: PhysicsConfig | None = None
    network: NetworkConfig = NetworkConfig()
    solver: SolverConfig = SolverConfig()
    synthesis: SynthesisConfig = SynthesisConfig()
    output: OutputConfig = OutputConfig()

    @model_validator(mode="after")
    def _mode(self):
        if self.measured is None and self.physics is None:
            raise ValueError("configure at least one of [measured] or [physics]")
        if self.network.n is not None and self.measured is not None and self.network.n != len(self.measured.capacitance):
            raise ValueError(
                f"network.n = {self.network.n} but measured data has {len(self.measured.capacitance)} transducers"
            )
        return self

    def default_mode(self) -> str:
        return "measured" if self.measured is not None else "physics"


def _format_errors(exc: ValidationError) -> str:
    lines = []
    for err in exc.errors():
        where = ".".join(str(p) for p in err["loc"]) or "<root>"
        lines.append(f"  {where}: {err['msg']}")
    return "invalid configuration:\n" + "\n".join(lines)


def load_config_text(text: str) -> ProjectConfig:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ModelInputError(f"cannot parse configuration: {exc}") from exc
    try:
        return ProjectConfig.model_validate(data)
    except ValidationError as exc:
        raise ModelInputError(_format_errors(exc)) from exc


def load_config(path) -> tuple[ProjectConfig, str]:
    """Parse and validate ``path``; returns the config and the sha256 of its bytes."""
    raw = Path(path).read_bytes()
    return load_config_text(raw.decode("utf-8")), hashlib.sha256(raw).hexdigest()


def bundled_config_path(name: str = "prototype") -> Path:
    return Path(__file__).parent / "data" / f"{name}.toml"

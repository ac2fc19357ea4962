"""Experiment configuration: a flat dataclass that round-trips through JSON."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from ..channel import ArrayGeometry
from ..errors import ConfigError

ESTIMATORS = ("rice", "ricer", "omp", "ls", "benchmark", "genie")
AXES = ("snr", "k", "mr")
SCENARIO_MODES = ("paper-fixed", "grid", "random")
SNR_REFERENCES = ("signal", "channel")

# Phase tables (in units of pi) for the two fixed identifiability scenarios.
PHASE_TABLES = {
    "fig2a": np.array([[0.8, 0.57, 0.1, 0.33],
                       [0.36, 0.7, 0.53, 0.2],
                       [0.8, 0.33, 0.57, 0.1]]),
    "fig2b": np.array([[0.8, 0.4, 0.3, 0.1, 0.5, 0.2, 0.7, 0.6],
                       [0.34, 0.49, 0.41, 0.27, 0.56, 0.7, 0.2, 0.63],
                       [0.2, 0.3, 0.5, 0.8, 0.1, 0.6, 0.7, 0.4]]),
}


@dataclass
class ExperimentConfig:
    """Everything needed to reproduce one sweep.

    ``k`` is the path count unless the sweep axis is ``k``; for the ``mr``
    axis the path count is ``m_r + k_offset`` when ``k_offset`` is set.
    """

    name: str = "custom"
    m_r: int = 4
    m_x: int = 10
    m_y: int = 10
    spacing_ratio: float = 0.5
    l: int = 2
    k: int = 4
    k_offset: int | None = None
    estimators: list[str] = field(default_factory=lambda: ["rice", "ricer", "benchmark"])
    sweep_axis: str = "snr"
    sweep_values: list[float] = field(default_factory=lambda: [0, 5, 10, 15, 20])
    snr_db: float = 10.0
    snr_reference: str = "signal"
    trials: int = 200
    seed: int = 0
    scenario: str = "random"
    phase_table: str | None = None
    min_sep: float = 0.05
    k_factor_db: float = 10.0
    omp_bits: int = 5
    n_symbols: int = 10_000
    timing: bool = False
    out: str | None = None

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not self.sweep_values:
            raise ConfigError("sweep_values must be nonempty")
        if self.sweep_axis not in AXES:
            raise ConfigError(f"sweep_axis must be one of {AXES}, got {self.sweep_axis!r}")
        if self.scenario not in SCENARIO_MODES:
            raise ConfigError(f"scenario must be one of {SCENARIO_MODES}, got {self.scenario!r}")
        if self.scenario == "paper-fixed":
            if self.phase_table not in PHASE_TABLES:
                raise ConfigError(f"paper-fixed scenarios need phase_table in {sorted(PHASE_TABLES)}")
            if self.sweep_axis != "snr":
                raise ConfigError("paper-fixed scenarios only support the snr axis")
        bad = [e for e in self.estimators if e not in ESTIMATORS]
        if bad or not self.estimators:
            raise ConfigError(f"unknown estimators {bad}; choose from {ESTIMATORS}")
        if self.snr_reference not in SNR_REFERENCES:
            raise ConfigError(f"snr_reference must be one of {SNR_REFERENCES}")
        if self.l < 2:
            raise ConfigError("l must be >= 2")
        if self.omp_bits < 1 or self.n_symbols < 1:
            raise ConfigError("omp_bits and n_symbols must be positive")
        try:
            self.geometry(self.m_r)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def geometry(self, m_r: int | None = None) -> ArrayGeometry:
        return ArrayGeometry(self.m_r if m_r is None else int(m_r), self.m_x, self.m_y,
                             self.spacing_ratio)

    def point(self, value):
        """``(geometry, k, snr_db)`` at one sweep value."""
        if self.sweep_axis == "snr":
            return self.geometry(), self.path_count(self.m_r), float(value)
        if self.sweep_axis == "k":
            return self.geometry(), int(value), float(self.snr_db)
        m_r = int(value)
        return self.geometry(m_r), self.path_count(m_r), float(self.snr_db)

    def path_count(self, m_r: int) -> int:
        if self.scenario == "paper-fixed":
            return PHASE_TABLES[self.phase_table].shape[1]
        if self.sweep_axis == "mr" and self.k_offset is not None:
            return m_r + self.k_offset
        return self.k

    def with_overrides(self, **kw) -> "ExperimentConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        extra = set(doc) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        try:
            return cls(**doc)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConfigError("config document must be a JSON object")
        return cls.from_dict(doc)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_json(text)

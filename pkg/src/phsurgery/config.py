"""Campaign configuration: defaults, validation, YAML round-trip."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict

import yaml

from . import saddle

SUITES = ("saddle", "blowup", "cones", "volume", "moser", "homogeneous")

DEFAULT_TOLERANCES = {
    "commutation": 1e-7,
    "volume_residual": 1e-10,
    "volume_control_min": 1e-3,
    "density_match": 1e-6,
    "density_floor": 0.05,
    "distortion_ratio": 2.0,
    "cone_ratio": 2.0,
    "expansion_deficit": 0.05,
    "jacobian_fd": 1e-5,
    "richardson": 1e-8,
    "moser_identity": 1e-10,
    "moser_invariance": 1e-9,
    "moser_transport": 1e-6,
    "moser_commutation": 1e-6,
    "moser_commutator": 1e-8,
    "group_invariant": 1e-10,
    "conj_residual": 1e-9,
    "horocycle_scaling": 1e-10,
    "t_conjugation": 1e-9,
}


class ConfigError(ValueError):
    """Malformed campaign configuration; message carries the field path."""


@dataclass
class CampaignConfig:
    """Everything a verification run needs, serializable to YAML.

    Defaults mirror the main worked example: a 4-dimensional saddle with
    rates (-1, -1, 1, 1) transverse to a base with rates (-2, 0, 2),
    comparison constants exp(-2) and exp(2), slow-down exponent picked
    automatically (0.5), aperture 0.1, atlas exponent -(k-1)/k.
    """

    suite: str = "all"
    seed: int = 42
    saddle_rates: list = field(default_factory=lambda: [-1.0, -1.0, 1.0, 1.0])
    anosov_stable: list = field(default_factory=lambda: [-2.0])
    anosov_unstable: list = field(default_factory=lambda: [2.0])
    lam: float = math.exp(-2.0)
    mu: float = math.exp(2.0)
    rho0: float | str = "auto"
    volume_mode: bool = False
    alpha: float | str = "auto"
    omega: float = 0.1
    delta: float = 0.1
    delta_sweep: list = field(default_factory=lambda: [1e-1, 1e-2, 1e-3])
    samples: int = 1000
    cone_orbits: int = 24
    crossing_entries: int = 1000
    n_values: list = field(default_factory=lambda: [2, 3, 4])
    step: float = 1e-3
    moser_strength: float = 0.1
    moser_radius: float = 0.5
    moser_steps: int = 1000
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.suite not in SUITES + ("all",):
            raise ConfigError(f"suite: unknown suite {self.suite!r}; "
                              f"expected one of {('all',) + SUITES}")
        tol = dict(DEFAULT_TOLERANCES)
        unknown = set(self.tolerances) - set(tol)
        if unknown:
            raise ConfigError(f"tolerances: unknown keys {sorted(unknown)}")
        tol.update(self.tolerances)
        self.tolerances = tol
        if self.rho0 != "auto" and not isinstance(self.rho0, (int, float)):
            raise ConfigError("rho0: must be a number or 'auto'")
        if self.alpha != "auto" and not isinstance(self.alpha, (int, float)):
            raise ConfigError("alpha: must be a number or 'auto'")
        if not 0 < self.omega < math.pi / 4:
            raise ConfigError("omega: aperture must lie in (0, pi/4)")
        if self.samples < 1:
            raise ConfigError("samples: must be positive")

    # derived model objects -------------------------------------------------

    @property
    def k(self):
        return len(self.saddle_rates)

    def saddle_spec(self):
        return saddle.SaddleSpec(rates=tuple(self.saddle_rates))

    def anosov_model(self):
        return saddle.AnosovModel(stable_rates=tuple(self.anosov_stable),
                                  unstable_rates=tuple(self.anosov_unstable),
                                  lam=self.lam, mu=self.mu)

    def resolved_rho0(self):
        if self.rho0 != "auto":
            return float(self.rho0)
        spec = self.saddle_spec()
        return saddle.pick_rho0(self.lam, self.mu, spec.lam_prime, spec.mu_prime,
                                k=self.k, volume_mode=self.volume_mode)

    def resolved_alpha(self):
        if self.alpha != "auto":
            return float(self.alpha)
        return -(self.k - 1) / self.k

    def bump_profile(self, delta=None):
        return saddle.BumpProfile(delta=self.delta if delta is None else delta,
                                  rho0=self.resolved_rho0())

    # serialization ----------------------------------------------------------

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise ConfigError(f"top level: expected a mapping, got {type(data).__name__}")
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown fields {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    def to_yaml(self):
        return yaml.safe_dump(self.to_dict(), sort_keys=True)

    @classmethod
    def from_yaml(cls, text):
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigError(f"YAML parse error: {exc}") from exc
        if data is None:
            data = {}
        return cls.from_dict(data)

    @classmethod
    def load(cls, path):
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_yaml(fh.read())

"""YAML run configuration."""
import logging
import os
from dataclasses import asdict
from dataclasses import dataclass
from dataclasses import field
from dataclasses import replace
from enum import Enum
from typing import Any
from typing import Dict
from typing import List
from typing import Optional
from typing import Union

import yaml

from .errors import ConfigError
from .errors import IoError
from .radar import RadarParams
from .radar import ValidatedParams
from .radar import WindowKind
from .radar import validate_params
from .simulator import LeakageModel
from .simulator import PhaseNoiseParams
from .simulator import PointTarget
from .simulator import leakage_for_isolation
from .simulator import point_scene

logger = logging.getLogger(__name__)


class Method(Enum):
    CONVENTIONAL = "conventional"
    PROPOSED = "proposed"
    BOTH = "both"


# Leakage 60 dB above the unit target, 0.05 rad RMS phase noise
DEFAULT_ISOLATION_DB = 60.0
DEFAULT_NOISE_SIGMA = 0.1

_TOP_KEYS = {"radar", "scene", "leakage", "noise_sigma", "seed", "method", "output_dir"}
_TARGET_KEYS = {"x_along": float, "y_cross": float, "amplitude": float}
_LEAKAGE_KEYS = {"amplitude": float, "beat_freq": float, "static_phase": float}
_PHASE_NOISE_KEYS = {"rms": float, "corner_hz": float, "seed": int}


def _check_keys(data: Any, allowed, where: str) -> Dict[str, Any]:
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"{where or 'config'} must be a mapping", payload={"key": where})
    for key in data:
        if key not in allowed:
            path = f"{where}.{key}" if where else str(key)
            raise ConfigError(f"unknown config key {path!r}", payload={"key": path})
    return data


def _coerce(value: Any, kind: type, path: str) -> Any:
    try:
        if kind is int:
            if isinstance(value, float) and not value.is_integer():
                raise ValueError(value)
            return int(value)
        if kind is WindowKind:
            return WindowKind(str(value))
        return kind(value)
    except (TypeError, ValueError):
        raise ConfigError(
            f"bad value {value!r} for {path!r} (expected {kind.__name__})",
            payload={"key": path},
        )


def _typed(data: Dict[str, Any], types: Dict[str, type], where: str) -> Dict[str, Any]:
    return {k: _coerce(v, types[k], f"{where}.{k}") for k, v in data.items()}


def _target_from_dict(data: Any, where: str) -> PointTarget:
    data = _check_keys(data, _TARGET_KEYS, where)
    return PointTarget(**_typed(data, _TARGET_KEYS, where))


def radar_from_dict(data: Optional[Dict[str, Any]]) -> RadarParams:
    types = RadarParams.field_types()
    data = _check_keys(data, types, "radar")
    return RadarParams(**_typed(data, types, "radar"))


def leakage_from_dict(data: Optional[Dict[str, Any]], seed: int) -> LeakageModel:
    if data is None:
        return default_leakage(seed)
    data = _check_keys(data, set(_LEAKAGE_KEYS) | {"phase_noise"}, "leakage")
    pn_data = _check_keys(data.get("phase_noise"), _PHASE_NOISE_KEYS, "leakage.phase_noise")
    pn_values = _typed(pn_data, _PHASE_NOISE_KEYS, "leakage.phase_noise")
    pn_values.setdefault("seed", seed)
    values = _typed(
        {k: v for k, v in data.items() if k != "phase_noise"}, _LEAKAGE_KEYS, "leakage"
    )
    return LeakageModel(phase_noise=PhaseNoiseParams(**pn_values), **values)


def default_leakage(seed: int) -> LeakageModel:
    return leakage_for_isolation(
        1.0, DEFAULT_ISOLATION_DB, phase_noise=PhaseNoiseParams(rms=0.05, seed=seed)
    )


@dataclass
class RunConfig:
    radar: RadarParams = field(default_factory=RadarParams)
    scene: List[PointTarget] = field(default_factory=point_scene)
    leakage: LeakageModel = field(default_factory=lambda: default_leakage(0))
    noise_sigma: float = DEFAULT_NOISE_SIGMA
    seed: int = 0
    method: Method = Method.BOTH
    output_dir: str = "out"

    @classmethod
    def from_dict(cls, data: Optional[Dict[str, Any]]) -> "RunConfig":
        data = _check_keys(data, _TOP_KEYS, "")
        seed = _coerce(data.get("seed", 0), int, "seed")
        if "method" in data:
            try:
                method = Method(data["method"])
            except ValueError:
                raise ConfigError(
                    f"method must be conventional, proposed or both, got {data['method']!r}",
                    payload={"key": "method"},
                )
        else:
            method = Method.BOTH

        scene_data = data.get("scene")
        if scene_data is None:
            scene = point_scene()
        elif isinstance(scene_data, list):
            scene = [_target_from_dict(t, f"scene[{i}]") for i, t in enumerate(scene_data)]
        else:
            raise ConfigError("scene must be a list of targets", payload={"key": "scene"})

        return cls(
            radar=radar_from_dict(data.get("radar")),
            scene=scene,
            leakage=leakage_from_dict(data.get("leakage"), seed),
            noise_sigma=_coerce(data.get("noise_sigma", DEFAULT_NOISE_SIGMA), float, "noise_sigma"),
            seed=seed,
            method=method,
            output_dir=str(data.get("output_dir", "out")),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "radar": self.radar.to_dict(),
            "scene": [asdict(t) for t in self.scene],
            "leakage": asdict(self.leakage),
            "noise_sigma": self.noise_sigma,
            "seed": self.seed,
            "method": self.method.value,
            "output_dir": self.output_dir,
        }

    def with_seed(self, seed: int) -> "RunConfig":
        """Override the run seed and the phase-noise seed."""
        leakage = replace(
            self.leakage, phase_noise=replace(self.leakage.phase_noise, seed=seed)
        )
        return replace(self, seed=seed, leakage=leakage)

    def validated(self) -> ValidatedParams:
        return validate_params(self.radar)

    @property
    def methods(self) -> List[str]:
        if self.method == Method.BOTH:
            return [Method.CONVENTIONAL.value, Method.PROPOSED.value]
        return [self.method.value]


def load_config(path: Optional[Union[str, os.PathLike]]) -> RunConfig:
    """Load a YAML config; no path means every default."""
    if path is None:
        return RunConfig()
    try:
        with open(path) as f:
            data = yaml.safe_load(f)
    except OSError as exc:
        raise IoError(f"cannot read config {path}: {exc.strerror}", payload={"path": str(path)})
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}", payload={"path": str(path)})

    logger.debug(f"loaded config from {path}")
    return RunConfig.from_dict(data)

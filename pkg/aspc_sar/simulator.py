"""Synthetic raw data: point-target echoes, a leakage tone with phase noise, and thermal noise."""
import logging
import math
from dataclasses import dataclass
from dataclasses import field
from typing import List
from typing import Optional
from typing import Sequence
from typing import Tuple

import numpy as np
from scipy import signal

from .backend import get_backend
from .errors import DimensionMismatchError
from .errors import DimensionOverflowError
from .errors import InvalidParamError
from .radar import ValidatedParams
from .radar import beat_frequency_of_range
from .radar import chirp_rate
from .radar import SPEED_OF_LIGHT

logger = logging.getLogger(__name__)

# complex128 cube budget
DEFAULT_MAX_CUBE_BYTES = 512 * 1024 * 1024

_PHASE_NOISE_STREAM = 0
_THERMAL_NOISE_STREAM = 1


@dataclass(frozen=True)
class PointTarget:
    x_along: float
    y_cross: float
    amplitude: float = 1.0

    def __post_init__(self) -> None:
        if not self.y_cross > 0:
            raise InvalidParamError("y_cross", f"must be > 0, got {self.y_cross}")
        if not self.amplitude >= 0:
            raise InvalidParamError("amplitude", f"must be >= 0, got {self.amplitude}")


@dataclass(frozen=True)
class PhaseNoiseParams:
    """Single-pole shaped Gaussian phase noise, rescaled to an exact RMS."""

    rms: float = 0.05
    corner_hz: float = 100e3
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.rms >= 0:
            raise InvalidParamError("phase_noise.rms", f"must be >= 0, got {self.rms}")
        if not self.corner_hz > 0:
            raise InvalidParamError(
                "phase_noise.corner_hz", f"must be > 0, got {self.corner_hz}"
            )


@dataclass(frozen=True)
class LeakageModel:
    """Direct TX to RX coupling seen as a near-DC beat tone."""

    amplitude: float = 0.0
    beat_freq: float = 1e3
    static_phase: float = 0.0
    phase_noise: PhaseNoiseParams = field(default_factory=PhaseNoiseParams)

    def __post_init__(self) -> None:
        if not self.amplitude >= 0:
            raise InvalidParamError(
                "leakage.amplitude", f"must be >= 0, got {self.amplitude}"
            )

    @property
    def enabled(self) -> bool:
        return self.amplitude > 0

    @property
    def has_phase_noise(self) -> bool:
        return self.enabled and self.phase_noise.rms > 0


@dataclass
class DataCube:
    """Complex raw beat matrix x[n, m], fast time along rows, one sweep per column."""

    data: np.ndarray
    params_snapshot: ValidatedParams

    def __post_init__(self) -> None:
        expected = (self.params_snapshot.n_samples, self.params_snapshot.m_sweeps)
        if self.data.shape != expected:
            raise DimensionMismatchError(
                f"cube has shape {self.data.shape}, params imply {expected}"
            )
        if not np.all(np.isfinite(self.data)):
            raise DimensionMismatchError("cube holds non-finite samples")

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def m(self) -> int:
        return self.data.shape[1]

    def sweep(self, m: int) -> np.ndarray:
        return self.data[:, m]


def phase_noise_sequence(
    pn: PhaseNoiseParams, count: int, stream_id: int, fs: float
) -> np.ndarray:
    """Phase noise in rad, deterministic given `(pn.seed, stream_id)`."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    if pn.rms == 0:
        return np.zeros(count)

    rng = np.random.default_rng(
        np.random.SeedSequence(pn.seed, spawn_key=(_PHASE_NOISE_STREAM, stream_id))
    )
    a = math.exp(-2.0 * math.pi * pn.corner_hz / fs)
    # Start the filter in its stationary state
    y_prev = rng.standard_normal() * math.sqrt((1.0 - a) / (1.0 + a))
    white = rng.standard_normal(count)
    shaped, _ = signal.lfilter([1.0 - a], [1.0, -a], white, zi=[a * y_prev])

    rms = math.sqrt(float(np.mean(shaped ** 2)))
    if rms == 0:
        return np.zeros(count)
    return shaped * (pn.rms / rms)


def _platform_position(p: ValidatedParams, m: int) -> float:
    return p.v_platform * p.t_sweep * (m - p.m_sweeps / 2)


def target_phase_history(
    p: ValidatedParams, tgt: PointTarget, m: int
) -> Tuple[float, float]:
    """Stop-and-go beat frequency (Hz) and two-way carrier phase (rad) at sweep `m`."""
    u = _platform_position(p, m)
    r = math.hypot(tgt.y_cross, tgt.x_along - u)
    return beat_frequency_of_range(p, r), -4.0 * math.pi * r / p.wavelength


def _scene_histories(
    p: ValidatedParams, scene: Sequence[PointTarget], m: int
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    x = np.array([t.x_along for t in scene])
    y = np.array([t.y_cross for t in scene])
    amp = np.array([t.amplitude for t in scene])

    dx = x - _platform_position(p, m)
    r = np.hypot(y, dx)
    # Rectangular beam
    amp = np.where(np.arctan2(np.abs(dx), y) <= p.beamwidth / 2, amp, 0.0)

    beat = 2.0 * r * chirp_rate(p) / SPEED_OF_LIGHT
    psi = -4.0 * np.pi * r / p.wavelength
    return beat, psi, amp


def simulate_sweep(
    p: ValidatedParams,
    scene: Sequence[PointTarget],
    leak: LeakageModel,
    m: int,
    noise_sigma: float,
    rng: Optional[np.random.Generator],
) -> np.ndarray:
    """One deramped sweep: echoes + leakage (with phase noise) + complex white noise."""
    n = np.arange(p.n_samples)
    x = np.zeros(p.n_samples, dtype=np.complex128)

    if scene:
        beat, psi, amp = _scene_histories(p, scene, m)
        phase = 2.0 * np.pi * np.outer(beat, n) / p.fs + psi[:, None]
        x += amp @ np.exp(1j * phase)

    if leak.enabled:
        phi = phase_noise_sequence(leak.phase_noise, p.n_samples, m, p.fs)
        x += leak.amplitude * np.exp(
            1j * (2.0 * np.pi * leak.beat_freq * n / p.fs + leak.static_phase + phi)
        )

    if noise_sigma > 0:
        if rng is None:
            raise ValueError("a random generator is required when noise_sigma > 0")
        x += noise_sigma * (
            rng.standard_normal(p.n_samples) + 1j * rng.standard_normal(p.n_samples)
        )

    return x


def check_scene(
    p: ValidatedParams, scene: Sequence[PointTarget], leak: Optional[LeakageModel] = None
) -> None:
    """Targets must sit above the leakage search band, the leakage tone inside it."""
    for tgt in scene:
        if beat_frequency_of_range(p, tgt.y_cross) <= p.leak_search_max_hz:
            raise InvalidParamError(
                "scene",
                f"target at {tgt.y_cross} m beats inside the leakage search band "
                f"(<= {p.leak_search_max_hz} Hz)",
            )
    if leak is not None and leak.enabled and not leak.beat_freq < p.leak_search_max_hz:
        raise InvalidParamError(
            "leakage.beat_freq",
            f"{leak.beat_freq} Hz must be below leak_search_max_hz={p.leak_search_max_hz}",
        )


def simulate_cube(
    p: ValidatedParams,
    scene: Sequence[PointTarget],
    leak: LeakageModel,
    noise_sigma: float,
    seed: int,
    max_bytes: int = DEFAULT_MAX_CUBE_BYTES,
) -> DataCube:
    """Stack `simulate_sweep` over m = 0..M-1 with per-sweep random streams."""
    nbytes = 16 * p.n_samples * p.m_sweeps
    if nbytes > max_bytes:
        raise DimensionOverflowError(
            f"cube of {p.n_samples}x{p.m_sweeps} needs {nbytes} bytes (budget {max_bytes})",
            payload={"n": p.n_samples, "m": p.m_sweeps, "bytes": nbytes},
        )
    check_scene(p, scene, leak)

    def _sweep(m: int) -> np.ndarray:
        rng = np.random.default_rng(
            np.random.SeedSequence(seed, spawn_key=(_THERMAL_NOISE_STREAM, m))
        )
        return simulate_sweep(p, scene, leak, m, noise_sigma, rng)

    logger.info(
        f"simulating {p.m_sweeps} sweeps of {p.n_samples} samples "
        f"({len(scene)} targets, leakage={leak.enabled})"
    )
    columns = get_backend().map(_sweep, range(p.m_sweeps))
    return DataCube(data=np.stack(columns, axis=1), params_snapshot=p)


def point_scene(
    x_along: float = 0.0, y_cross: float = 1000.0, amplitude: float = 1.0
) -> List[PointTarget]:
    return [PointTarget(x_along=x_along, y_cross=y_cross, amplitude=amplitude)]


def distributed_scene(
    count: int,
    seed: int,
    x_span: float = 1.0,
    y_min: float = 900.0,
    y_max: float = 1100.0,
) -> List[PointTarget]:
    """Jittered grid of `count` scatterers with Rayleigh-distributed amplitudes."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    rng = np.random.default_rng(seed)
    cols = max(1, int(math.floor(math.sqrt(count * x_span / (y_max - y_min)))))
    rows = int(math.ceil(count / cols))
    dy = (y_max - y_min) / rows
    dx = x_span / cols

    out: List[PointTarget] = []
    for i in range(count):
        row, col = divmod(i, cols)
        y = y_min + (row + rng.uniform(0.0, 1.0)) * dy
        x = -x_span / 2 + (col + rng.uniform(0.0, 1.0)) * dx
        out.append(PointTarget(x_along=x, y_cross=y, amplitude=rng.rayleigh(1.0)))
    return out


def leakage_for_isolation(
    target_amplitude: float,
    isolation_db: float,
    beat_freq: float = 1e3,
    static_phase: float = 0.3,
    phase_noise: Optional[PhaseNoiseParams] = None,
) -> LeakageModel:
    """Leakage tone `isolation_db` above a target of `target_amplitude`.

    A narrower TX-RX interval means a stronger leakage, i.e. a larger value here.
    """
    return LeakageModel(
        amplitude=target_amplitude * 10.0 ** (isolation_db / 20.0),
        beat_freq=beat_freq,
        static_phase=static_phase,
        phase_noise=phase_noise or PhaseNoiseParams(),
    )

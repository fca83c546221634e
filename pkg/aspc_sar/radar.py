"""Radar waveform/geometry parameters and the closed-form FMCW conversions."""
import logging
import math
from dataclasses import asdict
from dataclasses import dataclass
from dataclasses import fields
from dataclasses import replace
from enum import Enum
from typing import Any
from typing import Dict

from .errors import InvalidParamError
from .errors import NegativeInputError

logger = logging.getLogger(__name__)

SPEED_OF_LIGHT = 299_792_458.0


class WindowKind(Enum):
    """Supported fast-time windows."""

    RECT = "rect"
    HANN = "hann"


@dataclass(frozen=True)
class RadarParams:
    """Waveform, sampling, geometry and processing parameters.

    The defaults mirror the Ku-band FMCW SAR: 14.35-14.50 GHz band (center
    taken as the carrier), 150 MHz sweeps of 800 us sampled at 5 MHz, a 2^19
    point leakage FFT, Hann range window and a vehicle at 60 km/h.
    """

    f_center: float = 14.425e9
    bw: float = 150e6
    t_sweep: float = 800e-6
    fs: float = 5e6
    nfft_leak: int = 2 ** 19
    f_if_carrier: float = 0.0
    digital_bw: float = 2.5e6
    window: WindowKind = WindowKind.HANN
    v_platform: float = 60.0 / 3.6
    beamwidth: float = math.radians(34.0)
    m_sweeps: int = 1024
    range_fft_len: int = 4096
    leak_search_max_hz: float = 50e3
    leak_min_prominence_db: float = 20.0
    rcmc_kernel_taps: int = 8

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["window"] = self.window.value
        return data

    @classmethod
    def field_types(cls) -> Dict[str, type]:
        return {f.name: type(f.default) for f in fields(cls)}


@dataclass(frozen=True)
class ValidatedParams:
    """Parameters that passed `validate_params`, with derived quantities cached."""

    params: RadarParams
    n_samples: int
    wavelength: float
    prf: float

    def __getattr__(self, name: str) -> Any:
        """Allow to access the radar parameters as regular attributes."""
        if name == "params":
            raise AttributeError(name)
        return getattr(self.params, name)

    @property
    def bin_hz_leak(self) -> float:
        return self.params.fs / self.params.nfft_leak

    @property
    def range_bin_m(self) -> float:
        """Range spacing of one range-FFT bin."""
        return range_of_beat_frequency(self, self.params.fs / self.params.range_fft_len)

    @property
    def azimuth_spacing_m(self) -> float:
        return self.params.v_platform * self.params.t_sweep


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def validate_params(p: RadarParams) -> ValidatedParams:  # noqa: C901
    """Check every parameter invariant and cache N, wavelength and PRF."""
    if isinstance(p, ValidatedParams):
        p = p.params
    if not isinstance(p.window, WindowKind):
        try:
            p = replace(p, window=WindowKind(p.window))
        except ValueError:
            raise InvalidParamError("window", f"unsupported window {p.window!r}")

    if not p.f_center > 0:
        raise InvalidParamError("f_center", "must be > 0")
    if not p.bw > 0:
        raise InvalidParamError("bw", "must be > 0")
    if not p.t_sweep > 0:
        raise InvalidParamError("t_sweep", "must be > 0")
    if not p.fs > 0:
        raise InvalidParamError("fs", "must be > 0")
    if not p.v_platform >= 0:
        raise InvalidParamError("v_platform", "must be >= 0")
    if p.m_sweeps < 1:
        raise InvalidParamError("m_sweeps", "must be >= 1")
    if p.f_if_carrier != 0:
        raise InvalidParamError("f_if_carrier", "only a 0 Hz final IF is supported")

    n_samples = int(round(p.t_sweep * p.fs))
    if n_samples < 2:
        raise InvalidParamError("t_sweep", f"round(t_sweep * fs) = {n_samples} < 2")
    if not _is_power_of_two(p.nfft_leak) or p.nfft_leak < n_samples:
        raise InvalidParamError(
            "nfft_leak", f"{p.nfft_leak} must be a power of two >= {n_samples}"
        )
    if not _is_power_of_two(p.range_fft_len) or p.range_fft_len < n_samples:
        raise InvalidParamError(
            "range_fft_len", f"{p.range_fft_len} must be a power of two >= {n_samples}"
        )
    if not 0 <= p.digital_bw <= p.fs / 2:
        raise InvalidParamError("digital_bw", f"must be within [0, fs/2 = {p.fs / 2}]")
    if not 0 < p.leak_search_max_hz <= p.fs / 2:
        raise InvalidParamError(
            "leak_search_max_hz", f"must be within (0, fs/2 = {p.fs / 2}]"
        )
    if not p.leak_min_prominence_db >= 0:
        raise InvalidParamError("leak_min_prominence_db", "must be >= 0")
    if not 0 < p.beamwidth < math.pi:
        raise InvalidParamError("beamwidth", "must be within (0, pi) rad")
    if p.rcmc_kernel_taps < 2:
        raise InvalidParamError("rcmc_kernel_taps", "must be >= 2")

    vp = ValidatedParams(
        params=p,
        n_samples=n_samples,
        wavelength=SPEED_OF_LIGHT / p.f_center,
        prf=1.0 / p.t_sweep,
    )
    logger.debug(f"validated params: N={n_samples} PRF={vp.prf} lambda={vp.wavelength}")
    return vp


def chirp_rate(p: ValidatedParams) -> float:
    """Sweep slope in Hz/s."""
    return p.bw / p.t_sweep


def beat_frequency_of_range(p: ValidatedParams, r: float) -> float:
    """Deramped beat frequency of a target at range `r` (m)."""
    if r < 0:
        raise NegativeInputError(f"range must be >= 0, got {r}")
    return 2.0 * r * chirp_rate(p) / SPEED_OF_LIGHT


def range_of_beat_frequency(p: ValidatedParams, f: float) -> float:
    """Range (m) of a deramped beat frequency `f` (Hz)."""
    if f < 0:
        raise NegativeInputError(f"beat frequency must be >= 0, got {f}")
    return f * SPEED_OF_LIGHT / (2.0 * chirp_rate(p))


def range_resolution(p: ValidatedParams) -> float:
    return SPEED_OF_LIGHT / (2.0 * p.bw)


def max_unambiguous_range(p: ValidatedParams) -> float:
    return range_of_beat_frequency(p, p.digital_bw)

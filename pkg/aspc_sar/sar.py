"""Range compression, range-Doppler focusing and the two end-to-end pipelines."""
import logging
import math
from dataclasses import dataclass
from dataclasses import replace
from enum import Enum
from typing import Dict
from typing import List
from typing import Optional
from typing import Tuple
from typing import Type
from typing import Union

import numpy as np
from scipy import fft as sp_fft
from scipy.signal import windows

from .aspc import LeakageEstimate
from .aspc import aspc_cube
from .backend import get_backend
from .errors import AllZeroError
from .errors import DimensionMismatchError
from .errors import ZeroVelocityError
from .radar import SPEED_OF_LIGHT
from .radar import ValidatedParams
from .radar import WindowKind
from .radar import chirp_rate
from .radar import max_unambiguous_range
from .simulator import DataCube

logger = logging.getLogger(__name__)

DB_FLOOR = -120.0


class MethodTag(Enum):
    """Image synthesis method."""

    CONVENTIONAL = "conventional"
    PROPOSED = "proposed"


# Will be used to keep track of the defined pipelines
_PIPELINE_CLS: Dict[MethodTag, Type["BasePipeline"]] = {}


@dataclass
class RangeProfileMatrix:
    """Range-compressed data, one range profile per sweep (column)."""

    data: np.ndarray
    range_axis: np.ndarray
    prf: float


@dataclass
class SarImage:
    """Focused image in dB, normalized to a 0 dB peak and floor-clipped."""

    db: np.ndarray
    range_axis: np.ndarray
    azimuth_axis: np.ndarray
    method_tag: MethodTag
    rcmc_applied: bool = False
    single_look: bool = False

    def peak_index(self):
        return np.unravel_index(int(np.argmax(self.db)), self.db.shape)

    def intensity(self) -> np.ndarray:
        return 10.0 ** (self.db / 10.0)

    def crop_range(self, min_range_m: float) -> "SarImage":
        """Keep the range gates at or beyond `min_range_m`, renormalized to 0 dB."""
        keep = self.range_axis >= min_range_m
        if not np.any(keep):
            raise DimensionMismatchError(f"no range gate beyond {min_range_m} m")
        db = self.db[keep]
        return replace(self, db=db - db.max(), range_axis=self.range_axis[keep])


def _window(kind: WindowKind, n: int) -> np.ndarray:
    if kind == WindowKind.HANN:
        return windows.hann(n, sym=True)
    return np.ones(n)


def range_compress(data: np.ndarray, p: ValidatedParams) -> RangeProfileMatrix:
    """Windowed, zero-padded fast-time FFT of every sweep.

    Complex input keeps all `range_fft_len` bins; real input keeps the
    non-negative frequencies with the one-sided amplitude convention (bins other
    than DC and Nyquist doubled).
    """
    if data.ndim != 2 or data.shape[0] != p.n_samples:
        raise DimensionMismatchError(
            f"expected {p.n_samples} fast-time samples per sweep, got shape {data.shape}"
        )

    size = p.range_fft_len
    tapered = data * _window(p.window, p.n_samples)[:, None]
    workers = get_backend().fft_workers()
    if np.iscomplexobj(data):
        profiles = sp_fft.fft(tapered, n=size, axis=0, workers=workers)
        n_bins = size
    else:
        profiles = sp_fft.rfft(tapered, n=size, axis=0, workers=workers)
        profiles[1 : size // 2] *= 2.0
        n_bins = size // 2 + 1

    beat = np.arange(n_bins) * p.fs / size
    range_axis = beat * SPEED_OF_LIGHT / (2.0 * chirp_rate(p))
    return RangeProfileMatrix(data=profiles, range_axis=range_axis, prf=p.prf)


def crop_to_digital_bandwidth(
    rpm: RangeProfileMatrix, p: ValidatedParams
) -> RangeProfileMatrix:
    keep = rpm.range_axis <= max_unambiguous_range(p) * (1.0 + 1e-12)
    return RangeProfileMatrix(
        data=rpm.data[keep], range_axis=rpm.range_axis[keep], prf=rpm.prf
    )


def doppler_axis(m: int, p: ValidatedParams) -> np.ndarray:
    return sp_fft.fftfreq(m, d=p.t_sweep)


def doppler_rate(p: ValidatedParams, r0: Union[float, np.ndarray]):
    """Azimuth FM rate Ka = 2 V^2 / (lambda R0)."""
    if p.v_platform == 0:
        raise ZeroVelocityError("Doppler rate is undefined for a still platform")
    return 2.0 * p.v_platform ** 2 / (p.wavelength * r0)


def range_migration(
    p: ValidatedParams, f_az: Union[float, np.ndarray], r0: Union[float, np.ndarray]
):
    """Range-Doppler migration dR = lambda^2 f^2 R0 / (8 V^2)."""
    if p.v_platform == 0:
        raise ZeroVelocityError("range migration is undefined for a still platform")
    return p.wavelength ** 2 * np.square(f_az) * r0 / (8.0 * p.v_platform ** 2)


def max_migration(p: ValidatedParams, r0_axis: np.ndarray, m: int) -> float:
    """Largest migration at the edge of the signal Doppler support."""
    r0 = np.asarray(r0_axis, dtype=float)
    r0 = r0[r0 > 0]
    if r0.size == 0:
        return 0.0
    t_aperture = m * p.t_sweep
    beam_edge = 2.0 * p.v_platform * math.sin(p.beamwidth / 2.0) / p.wavelength
    edge = np.minimum(doppler_rate(p, r0) * t_aperture / 2.0, beam_edge)
    edge = np.minimum(edge, p.prf / 2.0)
    return float(np.max(range_migration(p, edge, r0)))


def rcmc_needed(p: ValidatedParams, r0_axis: np.ndarray, m: int) -> bool:
    if len(r0_axis) < 2:
        return False
    cell = r0_axis[1] - r0_axis[0]
    return max_migration(p, r0_axis, m) >= 0.5 * cell


def rcmc(rd: np.ndarray, p: ValidatedParams, r0_axis: np.ndarray) -> np.ndarray:
    """Range cell migration correction in the range-Doppler domain.

    Every Doppler column is resampled along range with a Hann-weighted
    truncated sinc so a target migrating to R0 + dR is brought back to R0.
    """
    if p.v_platform == 0:
        raise ZeroVelocityError("RCMC needs a non-zero platform speed")
    n_gates, m = rd.shape
    if not rcmc_needed(p, r0_axis, m):
        logger.info("RCMC pass-through: migration below half a range cell")
        return rd

    f_az = doppler_axis(m, p)
    cell = r0_axis[1] - r0_axis[0]
    half = p.rcmc_kernel_taps // 2
    offsets = np.arange(-half + 1, half + 1)
    gates = np.arange(n_gates)

    def _column(j: int) -> np.ndarray:
        pos = gates + range_migration(p, f_az[j], r0_axis) / cell
        idx = np.floor(pos).astype(np.int64)[:, None] + offsets[None, :]
        d = pos[:, None] - idx
        weights = np.sinc(d) * 0.5 * (1.0 + np.cos(np.pi * d / half))
        valid = (idx >= 0) & (idx < n_gates)
        samples = np.where(valid, rd[np.clip(idx, 0, n_gates - 1), j], 0.0)
        return np.sum(samples * weights, axis=1)

    logger.info(f"RCMC over {m} Doppler bins ({p.rcmc_kernel_taps} taps)")
    return np.stack(get_backend().map(_column, range(m)), axis=1)


def azimuth_compress(
    rd: np.ndarray, p: ValidatedParams, r0_axis: np.ndarray
) -> np.ndarray:
    """Azimuth matched filter per range gate, then inverse azimuth FFT.

    H(f; R0) = exp(-j pi f^2 / Ka(R0)), the conjugate of the Doppler spectrum of
    a psi = -4 pi R / lambda phase history. Doppler centroid is 0 (broadside).
    """
    if p.v_platform == 0:
        raise ZeroVelocityError("azimuth compression needs a non-zero platform speed")
    f_az = doppler_axis(rd.shape[1], p)
    r0 = np.asarray(r0_axis, dtype=float)[:, None]
    # f^2 / Ka written without the division so R0 = 0 stays finite
    h = np.exp(-1j * np.pi * f_az[None, :] ** 2 * p.wavelength * r0 / (2.0 * p.v_platform ** 2))
    return sp_fft.ifft(rd * h, axis=1, workers=get_backend().fft_workers())


def azimuth_axis(p: ValidatedParams, m: int) -> np.ndarray:
    return (np.arange(m) - m / 2) * p.v_platform * p.t_sweep


def form_image(
    focused: np.ndarray,
    p: ValidatedParams,
    tag: MethodTag,
    range_axis: np.ndarray,
    rcmc_applied: bool = False,
    single_look: bool = False,
) -> SarImage:
    mag = np.abs(focused)
    peak = float(mag.max()) if mag.size else 0.0
    if peak == 0:
        raise AllZeroError("image has no energy")
    db = 20.0 * np.log10(np.maximum(mag / peak, 10.0 ** (DB_FLOOR / 20.0)))
    return SarImage(
        db=db,
        range_axis=np.asarray(range_axis),
        azimuth_axis=azimuth_axis(p, focused.shape[1]),
        method_tag=tag,
        rcmc_applied=rcmc_applied,
        single_look=single_look,
    )


class _PipelineMeta(type):
    """Metaclass for keeping track of the pipelines."""

    def __new__(meta, name, bases, class_dict):
        cls = type.__new__(meta, name, bases, class_dict)

        # Ensure the class has a method defined
        if name != "BasePipeline" and not cls.METHOD:
            raise ValueError(f"class {name} has no METHOD")

        # Register it
        if cls.METHOD:
            _PIPELINE_CLS[cls.METHOD] = cls
        return cls


class BasePipeline(object, metaclass=_PipelineMeta):
    """Range compression then range-Doppler focusing of a prepared cube."""

    METHOD: Optional[MethodTag] = None

    def __init__(self, p: ValidatedParams) -> None:
        self.p = p

    def _prepare(self, cube: DataCube) -> np.ndarray:
        """Fast-time data handed to range compression."""
        raise NotImplementedError  # pragma: no cover

    def range_profiles(self, cube: DataCube) -> RangeProfileMatrix:
        if cube.data.shape[0] != self.p.n_samples:
            raise DimensionMismatchError(
                f"cube has {cube.data.shape[0]} samples per sweep, params imply {self.p.n_samples}"
            )
        logger.info(f"running the {self.METHOD.value} pipeline")  # type: ignore
        return crop_to_digital_bandwidth(range_compress(self._prepare(cube), self.p), self.p)

    def run(self, cube: DataCube) -> SarImage:
        return self.focus(self.range_profiles(cube))

    def focus_complex(self, rpm: RangeProfileMatrix) -> Tuple[np.ndarray, bool]:
        """Focused complex image before dB conversion, and whether RCMC ran."""
        rd = sp_fft.fft(rpm.data, axis=1, workers=get_backend().fft_workers())
        applied = rcmc_needed(self.p, rpm.range_axis, rpm.data.shape[1])
        rd = rcmc(rd, self.p, rpm.range_axis)
        return azimuth_compress(rd, self.p, rpm.range_axis), applied

    def focus(self, rpm: RangeProfileMatrix) -> SarImage:
        if rpm.data.shape[1] == 1:
            logger.warning("single sweep: azimuth compression skipped")
            return form_image(
                rpm.data, self.p, self.METHOD, rpm.range_axis, single_look=True  # type: ignore
            )

        focused, applied = self.focus_complex(rpm)
        return form_image(
            focused, self.p, self.METHOD, rpm.range_axis, rcmc_applied=applied  # type: ignore
        )


class ConventionalPipeline(BasePipeline):
    """Identical chain minus A-SPC, fed with the complex raw data."""

    METHOD = MethodTag.CONVENTIONAL

    def _prepare(self, cube: DataCube) -> np.ndarray:
        return cube.data


class ProposedPipeline(BasePipeline):
    METHOD = MethodTag.PROPOSED

    def __init__(self, p: ValidatedParams) -> None:
        super().__init__(p)
        self.estimates: List[LeakageEstimate] = []

    def _prepare(self, cube: DataCube) -> np.ndarray:
        real, self.estimates = aspc_cube(cube, self.p)
        return real


def get_pipeline(tag: Union[MethodTag, str]) -> Type[BasePipeline]:
    try:
        return _PIPELINE_CLS[MethodTag(tag)]
    except (KeyError, ValueError):
        raise ValueError(f"unsupported method {tag!r}")


def pipeline_conventional(cube: DataCube, p: ValidatedParams) -> SarImage:
    return ConventionalPipeline(p).run(cube)


def pipeline_proposed(cube: DataCube, p: ValidatedParams) -> SarImage:
    return ProposedPipeline(p).run(cube)

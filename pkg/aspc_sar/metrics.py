"""Image quality metrics: noise floor, SNR, IRW, PSLR, entropy and leakage residual."""
import logging
import math
from dataclasses import asdict
from dataclasses import dataclass
from dataclasses import replace
from typing import Any
from typing import Callable
from typing import Dict
from typing import List
from typing import Optional
from typing import Sequence
from typing import Tuple

import numpy as np
from scipy import stats

from .errors import AllZeroError
from .errors import BoundaryError
from .errors import MetricsError
from .errors import NoCrossingError
from .errors import NoSidelobeError
from .errors import TooFewBinsError
from .radar import ValidatedParams
from .radar import range_of_beat_frequency
from .sar import DB_FLOOR
from .sar import ConventionalPipeline
from .sar import MethodTag
from .sar import ProposedPipeline
from .sar import SarImage
from .simulator import DataCube
from .simulator import LeakageModel
from .simulator import PointTarget
from .simulator import check_scene
from .simulator import simulate_cube

logger = logging.getLogger(__name__)

# Hann mainlobe plus first sidelobes at the default FFT sizes
EXCLUSION_HALF_WIDTH = 10
MIN_FLOOR_BINS = 16

NOISE_FLOOR_ESTIMATOR = "median"

_DELTA_FIELDS = [
    "noise_floor_db",
    "snr_db",
    "target_peak_db",
    "irw_range_m",
    "irw_azimuth_m",
    "pslr_db",
    "entropy",
    "leakage_residual_db",
]


@dataclass(frozen=True)
class MetricsReport:
    method_tag: MethodTag
    noise_floor_db: float
    snr_db: float
    target_peak_db: float
    irw_range_m: float
    irw_azimuth_m: float
    pslr_db: float
    entropy: float
    leakage_residual_db: float
    rcmc_applied: bool = False

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["method_tag"] = self.method_tag.value
        return data


def noise_floor(profile: np.ndarray, exclusions: Sequence[Tuple[int, int]]) -> float:
    """Median of the dB profile outside the (inclusive) excluded bin intervals."""
    profile = np.asarray(profile, dtype=float)
    keep = np.ones(profile.shape[0], dtype=bool)
    for lo, hi in exclusions:
        keep[max(lo, 0) : max(hi + 1, 0)] = False
    if int(keep.sum()) < MIN_FLOOR_BINS:
        raise TooFewBinsError(
            f"only {int(keep.sum())} bins left for the noise floor (need {MIN_FLOOR_BINS})"
        )
    return float(np.median(profile[keep]))


def _check_peak(profile: np.ndarray, peak_bin: int) -> None:
    if peak_bin <= 0 or peak_bin >= profile.shape[0] - 1:
        raise BoundaryError(f"peak bin {peak_bin} is on the profile boundary")


def irw(profile: np.ndarray, peak_bin: int, axis_scale: float) -> float:
    """-3 dB width of a linear magnitude profile, in physical units."""
    profile = np.asarray(profile, dtype=float)
    _check_peak(profile, peak_bin)
    level = profile[peak_bin] / math.sqrt(2.0)

    i = peak_bin
    while i > 0 and profile[i] > level:
        i -= 1
    j = peak_bin
    while j < profile.shape[0] - 1 and profile[j] > level:
        j += 1
    if profile[i] > level or profile[j] > level:
        raise NoCrossingError("profile never falls 3 dB below its peak")

    left = i + (level - profile[i]) / (profile[i + 1] - profile[i])
    right = (j - 1) + (profile[j - 1] - level) / (profile[j - 1] - profile[j])
    return float((right - left) * axis_scale)


def pslr(profile: np.ndarray, peak_bin: int) -> float:
    """Highest sidelobe beyond the first nulls relative to the peak, in dB."""
    profile = np.asarray(profile, dtype=float)
    _check_peak(profile, peak_bin)

    i = peak_bin
    while i > 0 and profile[i - 1] < profile[i]:
        i -= 1
    j = peak_bin
    while j < profile.shape[0] - 1 and profile[j + 1] < profile[j]:
        j += 1

    sidelobes = np.concatenate([profile[:i], profile[j + 1 :]])
    if sidelobes.size == 0 or sidelobes.max() <= 0:
        raise NoSidelobeError("no sidelobe beyond the first nulls")
    return float(20.0 * np.log10(sidelobes.max() / profile[peak_bin]))


def image_entropy(img: SarImage) -> float:
    """Shannon entropy (nats) of the normalized intensity; floor pixels carry none."""
    intensity = np.where(img.db > DB_FLOOR, img.intensity(), 0.0)
    total = float(intensity.sum())
    if total == 0:
        raise AllZeroError("image has no energy")
    prob = intensity[intensity > 0] / total
    return float(max(0.0, -np.sum(prob * np.log(prob))))


def _nearest(axis: np.ndarray, value: float) -> int:
    return int(np.argmin(np.abs(axis - value)))


def _measure(name: str, fn: Callable[[], float]) -> float:
    try:
        return fn()
    except MetricsError as exc:
        logger.warning(f"{name} not measurable: {exc.message}")
        return float("nan")


def leakage_band_edge(p: ValidatedParams, img: SarImage) -> float:
    """First range considered part of the scene (leakage band plus guard bins)."""
    cell = img.range_axis[1] - img.range_axis[0] if img.range_axis.shape[0] > 1 else 0.0
    return range_of_beat_frequency(p, p.leak_search_max_hz) + EXCLUSION_HALF_WIDTH * cell


def measure_image(
    img: SarImage, scene: Sequence[PointTarget], p: ValidatedParams
) -> MetricsReport:
    """Build a report from an image and the ground-truth scene."""
    edge = leakage_band_edge(p, img)
    scene_img = img.crop_range(edge)
    axis = scene_img.range_axis

    if scene:
        strongest = max(scene, key=lambda t: t.amplitude)
        center = _nearest(axis, strongest.y_cross)
        lo = max(center - EXCLUSION_HALF_WIDTH, 0)
        window = scene_img.db[lo : center + EXCLUSION_HALF_WIDTH + 1]
        r_off, a_idx = np.unravel_index(int(np.argmax(window)), window.shape)
        r_idx = lo + int(r_off)
    else:
        r_idx, a_idx = scene_img.peak_index()
    r_idx, a_idx = int(r_idx), int(a_idx)

    target_peak_db = float(scene_img.db[r_idx, a_idx])
    profile = 10.0 * np.log10(np.mean(scene_img.intensity(), axis=1))
    centers = [_nearest(axis, t.y_cross) for t in scene if t.y_cross >= axis[0]]
    exclusions = [(c - EXCLUSION_HALF_WIDTH, c + EXCLUSION_HALF_WIDTH) for c in centers]
    floor = _measure("noise floor", lambda: noise_floor(profile, exclusions))

    rng_cut = 10.0 ** (scene_img.db[:, a_idx] / 20.0)
    az_cut = 10.0 ** (scene_img.db[r_idx, :] / 20.0)
    cell = axis[1] - axis[0] if axis.shape[0] > 1 else 0.0
    irw_range = _measure("range IRW", lambda: irw(rng_cut, r_idx, cell))
    irw_azimuth = _measure(
        "azimuth IRW", lambda: irw(az_cut, a_idx, p.v_platform * p.t_sweep)
    )
    peak_sidelobe = _measure("PSLR", lambda: pslr(rng_cut, r_idx))

    band = img.db[img.range_axis < edge]
    target_in_full = float(img.db[r_idx + (img.db.shape[0] - scene_img.db.shape[0]), a_idx])
    residual = float(band.max() - target_in_full) if band.size else float("nan")

    return MetricsReport(
        method_tag=img.method_tag,
        noise_floor_db=floor,
        snr_db=target_peak_db - floor,
        target_peak_db=target_peak_db,
        irw_range_m=irw_range,
        irw_azimuth_m=irw_azimuth,
        pslr_db=peak_sidelobe,
        entropy=image_entropy(scene_img),
        leakage_residual_db=residual,
        rcmc_applied=img.rcmc_applied,
    )


def report_deltas(conventional: MetricsReport, proposed: MetricsReport) -> Dict[str, float]:
    """Per-field conventional minus proposed (a positive noise floor delta favours A-SPC)."""
    return {
        name: getattr(conventional, name) - getattr(proposed, name)
        for name in _DELTA_FIELDS
    }


def compare_pipelines(
    cube: DataCube, p: ValidatedParams, scene: Sequence[PointTarget]
) -> Tuple[MetricsReport, MetricsReport, Dict[str, float]]:
    """Run both pipelines on the same cube and report both plus their deltas."""
    check_scene(p, scene)
    conventional = measure_image(ConventionalPipeline(p).run(cube), scene, p)
    proposed = measure_image(ProposedPipeline(p).run(cube), scene, p)
    deltas = report_deltas(conventional, proposed)
    logger.info(f"noise floor delta: {deltas['noise_floor_db']:.2f} dB")
    return conventional, proposed, deltas


@dataclass(frozen=True)
class SweepResult:
    levels: List[float]
    mean_noise_floor_delta_db: List[float]
    spearman_rho: float


def _delta_vs_levels(
    levels: Sequence[float],
    make_leak: Callable[[float, int], LeakageModel],
    p: ValidatedParams,
    scene: Sequence[PointTarget],
    noise_sigma: float,
    seeds: Sequence[int],
) -> SweepResult:
    means = []
    for level in levels:
        deltas = []
        for seed in seeds:
            cube = simulate_cube(p, scene, make_leak(level, seed), noise_sigma, seed)
            _, _, d = compare_pipelines(cube, p, scene)
            deltas.append(d["noise_floor_db"])
        means.append(float(np.mean(deltas)))
        logger.info(f"level {level}: mean noise floor delta {means[-1]:.2f} dB")

    rho = float("nan")
    if len(levels) > 1:
        rho, _ = stats.spearmanr(levels, means)
    return SweepResult(
        levels=list(levels), mean_noise_floor_delta_db=means, spearman_rho=float(rho)
    )


def phase_noise_sweep(
    p: ValidatedParams,
    scene: Sequence[PointTarget],
    leak: LeakageModel,
    sigmas: Sequence[float],
    noise_sigma: float,
    seeds: Sequence[int],
) -> SweepResult:
    """Noise floor improvement versus the leakage phase-noise RMS."""

    def _leak(sigma: float, seed: int) -> LeakageModel:
        return replace(leak, phase_noise=replace(leak.phase_noise, rms=sigma, seed=seed))

    return _delta_vs_levels(sigmas, _leak, p, scene, noise_sigma, seeds)


def isolation_sweep(
    p: ValidatedParams,
    scene: Sequence[PointTarget],
    leak: LeakageModel,
    isolations_db: Sequence[float],
    noise_sigma: float,
    seeds: Sequence[int],
    reference_amplitude: Optional[float] = None,
) -> SweepResult:
    """Noise floor improvement versus leakage strength (TX-RX isolation).

    The leakage amplitude is set `isolation_db` above `reference_amplitude`
    (default: the strongest scene target).
    """
    if reference_amplitude is None:
        reference_amplitude = max(t.amplitude for t in scene)

    def _leak(isolation_db: float, seed: int) -> LeakageModel:
        return replace(
            leak,
            amplitude=reference_amplitude * 10.0 ** (isolation_db / 20.0),
            phase_noise=replace(leak.phase_noise, seed=seed),
        )

    return _delta_vs_levels(isolations_db, _leak, p, scene, noise_sigma, seeds)

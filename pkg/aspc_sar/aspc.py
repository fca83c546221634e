"""Advanced stationary point concentration (A-SPC).

For every sweep m, the leakage tone is located on a zero-padded FFT, a numerically
controlled oscillator (NCO) is synthesized at its frequency and phase, the sweep is
mixed with the conjugated NCO and the real part is kept. The leakage lands at DC
with zero phase, where the cosine is stationary: its phase noise only survives to
second order.
"""
import logging
import math
from dataclasses import dataclass
from typing import List
from typing import Tuple

import numpy as np
from scipy import fft as sp_fft

from .backend import get_backend
from .errors import BadLengthError
from .errors import LengthMismatchError
from .errors import NoPeakError
from .radar import ValidatedParams
from .simulator import DataCube

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LeakageEstimate:
    k_leak: int
    f_leak: float
    theta_leak: float
    peak_mag: float
    detected: bool = True


@dataclass(frozen=True)
class Spectrum:
    bins: np.ndarray
    bin_hz: float


def zero_pad_fft(sweep: np.ndarray, nfft_leak: int, fs: float) -> Spectrum:
    """Unwindowed FFT of the sweep extended with trailing zeros up to `nfft_leak`."""
    if nfft_leak < sweep.shape[0]:
        raise BadLengthError(
            f"nfft_leak={nfft_leak} is shorter than the sweep ({sweep.shape[0]})"
        )
    if nfft_leak & (nfft_leak - 1):
        raise BadLengthError(f"nfft_leak={nfft_leak} is not a power of two")
    return Spectrum(bins=sp_fft.fft(sweep, n=nfft_leak), bin_hz=fs / nfft_leak)


def _principal(theta: float) -> float:
    if theta <= -math.pi:
        theta += 2.0 * math.pi
    return theta


def estimate_leakage(sweep: np.ndarray, p: ValidatedParams) -> LeakageEstimate:
    """Frequency and phase of the strongest tone in the leakage search band."""
    if not np.any(sweep):
        raise NoPeakError("sweep is all zeros")

    spec = zero_pad_fft(sweep, p.nfft_leak, p.fs)
    k_max = int(math.floor(p.leak_search_max_hz / spec.bin_hz))
    band = np.abs(spec.bins[: k_max + 1])
    if band.size == 0:
        raise NoPeakError("empty leakage search band")

    # argmax keeps the lowest index on ties
    k = int(np.argmax(band))
    peak_mag = float(band[k])
    if peak_mag == 0:
        raise NoPeakError("no energy in the leakage search band")

    median = float(np.median(band))
    if median > 0 and 20.0 * math.log10(peak_mag / median) < p.leak_min_prominence_db:
        logger.debug(
            f"no leakage tone: peak {peak_mag:.3g} is less than "
            f"{p.leak_min_prominence_db} dB above the band median"
        )
        return LeakageEstimate(
            k_leak=0, f_leak=0.0, theta_leak=0.0, peak_mag=peak_mag, detected=False
        )

    return LeakageEstimate(
        k_leak=k,
        f_leak=k * p.fs / p.nfft_leak,
        theta_leak=_principal(float(np.angle(spec.bins[k]))),
        peak_mag=peak_mag,
    )


def generate_nco(est: LeakageEstimate, n: int, fs: float) -> np.ndarray:
    """NCO[n] = exp(j(2 pi f_leak n / fs + theta_leak)), unit modulus."""
    if n < 1:
        raise ValueError(f"NCO length must be >= 1, got {n}")
    idx = np.arange(n)
    return np.exp(1j * (2.0 * np.pi * est.f_leak * idx / fs + est.theta_leak))


def mix_extract_real(sweep: np.ndarray, nco: np.ndarray) -> np.ndarray:
    """Re(x[n] * conj(NCO[n]))."""
    if sweep.shape != nco.shape:
        raise LengthMismatchError(
            f"sweep has {sweep.shape[0]} samples, NCO has {nco.shape[0]}"
        )
    return np.real(sweep * np.conj(nco))


def aspc_sweep(sweep: np.ndarray, p: ValidatedParams) -> Tuple[np.ndarray, LeakageEstimate]:
    est = estimate_leakage(sweep, p)
    return mix_extract_real(sweep, generate_nco(est, sweep.shape[0], p.fs)), est


def aspc_cube(
    cube: DataCube, p: ValidatedParams
) -> Tuple[np.ndarray, List[LeakageEstimate]]:
    """Apply A-SPC to every sweep; returns the real N x M matrix and the M estimates."""

    def _process(m: int) -> Tuple[np.ndarray, LeakageEstimate]:
        try:
            return aspc_sweep(cube.data[:, m], p)
        except NoPeakError as exc:
            raise NoPeakError(f"sweep {m}: {exc.message}", payload={"sweep": m})

    logger.info(f"running A-SPC on {cube.m} sweeps (NFFT={p.nfft_leak})")
    results = get_backend().map(_process, range(cube.m))

    estimates = [est for _, est in results]
    missed = sum(1 for est in estimates if not est.detected)
    if missed:
        logger.warning(f"no leakage tone detected in {missed}/{cube.m} sweeps")

    return np.stack([col for col, _ in results], axis=1), estimates


def ac_power(x: np.ndarray) -> float:
    """Power of a real vector about its mean."""
    return float(np.var(x))


def residual_power(x: np.ndarray, reference: np.ndarray) -> float:
    return float(np.mean((x - reference) ** 2))

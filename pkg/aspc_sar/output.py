"""Result files: PGM images, CSV dB matrices, key = value reports and CSV tables."""
import logging
import math
import os
from pathlib import Path
from typing import Dict
from typing import Iterable
from typing import List
from typing import Optional
from typing import Sequence
from typing import Union

import numpy as np

from .aspc import LeakageEstimate
from .errors import IoError
from .metrics import NOISE_FLOOR_ESTIMATOR
from .metrics import MetricsReport
from .metrics import SweepResult
from .sar import SarImage

logger = logging.getLogger(__name__)

PGM_MIN_DB = -80.0
PGM_COMMENT = "dB [-80, 0] mapped linearly to gray [0, 255]"

BASELINE_NOTE = "conventional = identical chain minus A-SPC, fed the complex raw data"

PathLike = Union[str, os.PathLike]


def output_path(output_dir: PathLike, kind: str, method: str, seed: int, ext: str) -> Path:
    """Result filenames embed the method and the seed."""
    return Path(output_dir) / f"{kind}_{method}_seed{seed}.{ext}"


def _write_bytes(path: PathLike, data: bytes) -> None:
    try:
        with open(path, "wb") as f:
            f.write(data)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc.strerror}", payload={"path": str(path)})
    logger.info(f"wrote {path}")


def db_to_gray(db: np.ndarray) -> np.ndarray:
    """0 dB -> 255, <= -80 dB -> 0, linear in between."""
    scaled = (np.clip(db, PGM_MIN_DB, 0.0) - PGM_MIN_DB) * (255.0 / -PGM_MIN_DB)
    return np.round(scaled).astype(np.uint8)


def write_pgm(path: PathLike, img: SarImage) -> None:
    """Binary (P5) PGM, one row per range bin, one column per azimuth bin."""
    gray = db_to_gray(img.db)
    rows, cols = gray.shape
    header = f"P5\n# {PGM_COMMENT}\n{cols} {rows}\n255\n".encode("ascii")
    _write_bytes(path, header + np.ascontiguousarray(gray).tobytes())


def write_db_csv(path: PathLike, img: SarImage) -> None:
    """Full-precision dB matrix, comma-separated, one row per range bin."""
    try:
        np.savetxt(path, img.db, fmt="%.17g", delimiter=",")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc.strerror}", payload={"path": str(path)})
    logger.info(f"wrote {path}")


def _format_value(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return "nan" if math.isnan(value) else repr(float(value))
    return str(value)


def format_report(
    report: MetricsReport, seed: int, extra: Optional[Dict[str, object]] = None
) -> str:
    lines = [
        f"# {BASELINE_NOTE}",
        f"# noise floor estimator: {NOISE_FLOOR_ESTIMATOR}",
        f"seed = {seed}",
    ]
    for key, value in report.to_dict().items():
        lines.append(f"{key} = {_format_value(value)}")
    for key, value in (extra or {}).items():
        lines.append(f"{key} = {_format_value(value)}")
    return "\n".join(lines) + "\n"


def write_report(
    path: PathLike,
    report: MetricsReport,
    seed: int,
    extra: Optional[Dict[str, object]] = None,
) -> None:
    _write_bytes(path, format_report(report, seed, extra).encode("utf-8"))


def format_deltas(deltas: Dict[str, float]) -> str:
    lines = [
        f"# {BASELINE_NOTE}",
        "# delta = conventional - proposed (positive noise_floor_db favours A-SPC)",
    ]
    lines.extend(f"{key} = {_format_value(value)}" for key, value in deltas.items())
    return "\n".join(lines) + "\n"


def write_deltas(path: PathLike, deltas: Dict[str, float]) -> None:
    _write_bytes(path, format_deltas(deltas).encode("utf-8"))


def _csv(header: Sequence[str], rows: Iterable[Sequence[object]]) -> bytes:
    out: List[str] = [",".join(header)]
    out.extend(",".join(_format_value(v) for v in row) for row in rows)
    return ("\n".join(out) + "\n").encode("utf-8")


def write_estimates_csv(path: PathLike, estimates: Sequence[LeakageEstimate]) -> None:
    rows = (
        (m, e.k_leak, e.f_leak, e.theta_leak, e.peak_mag, e.detected)
        for m, e in enumerate(estimates)
    )
    _write_bytes(
        path, _csv(("m", "k_leak", "f_leak", "theta_leak", "peak_mag", "detected"), rows)
    )


def write_sweep_csv(path: PathLike, result: SweepResult, level_name: str) -> None:
    rows = zip(result.levels, result.mean_noise_floor_delta_db)
    data = _csv((level_name, "mean_noise_floor_delta_db"), rows)
    data += f"# spearman_rho = {_format_value(result.spearman_rho)}\n".encode("utf-8")
    _write_bytes(path, data)

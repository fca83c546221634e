import logging
import math

import numpy as np
import pytest
from aspc_sar.aspc import LeakageEstimate
from aspc_sar.errors import IoError
from aspc_sar.metrics import MetricsReport
from aspc_sar.metrics import SweepResult
from aspc_sar.output import PGM_COMMENT
from aspc_sar.output import db_to_gray
from aspc_sar.output import format_report
from aspc_sar.output import output_path
from aspc_sar.output import write_db_csv
from aspc_sar.output import write_deltas
from aspc_sar.output import write_estimates_csv
from aspc_sar.output import write_pgm
from aspc_sar.output import write_report
from aspc_sar.output import write_sweep_csv
from aspc_sar.sar import MethodTag
from aspc_sar.sar import SarImage

logging.basicConfig(level=logging.DEBUG)


def _parse(text):
    out = {}
    for line in text.splitlines():
        if not line or line.startswith("#"):
            continue
        key, value = line.split(" = ")
        out[key] = value
    return out


@pytest.fixture
def img():
    db = np.array([[0.0, -40.0, -80.0], [-120.0, -3.0103, -60.5]])
    return SarImage(
        db=db,
        range_axis=np.array([10.0, 11.0]),
        azimuth_axis=np.array([-1.0, 0.0, 1.0]),
        method_tag=MethodTag.PROPOSED,
    )


@pytest.fixture
def report():
    return MetricsReport(
        method_tag=MethodTag.PROPOSED,
        noise_floor_db=-71.25,
        snr_db=71.25,
        target_peak_db=0.0,
        irw_range_m=1.4,
        irw_azimuth_m=float("nan"),
        pslr_db=-31.5,
        entropy=2.5,
        leakage_residual_db=-20.0,
        rcmc_applied=True,
    )


def test_output_path(tmp_path):
    path = output_path(tmp_path, "image", "proposed", 7, "pgm")
    assert path == tmp_path / "image_proposed_seed7.pgm"


def test_db_to_gray():
    gray = db_to_gray(np.array([0.0, -40.0, -80.0, -120.0, 3.0]))
    assert gray.dtype == np.uint8
    assert gray.tolist() == [255, 128, 0, 0, 255]


def test_write_pgm(tmp_path, img):
    path = tmp_path / "image.pgm"
    write_pgm(path, img)
    raw = path.read_bytes()

    header = f"P5\n# {PGM_COMMENT}\n3 2\n255\n".encode("ascii")
    assert raw.startswith(header)
    pixels = np.frombuffer(raw[len(header) :], dtype=np.uint8)
    assert pixels.tolist() == [255, 128, 0, 0, 245, 62]


def test_write_db_csv(tmp_path, img):
    path = tmp_path / "image.csv"
    write_db_csv(path, img)

    back = np.loadtxt(path, delimiter=",")
    assert np.array_equal(back, img.db)


def test_format_report(report):
    text = format_report(report, 3, extra={"sweeps": 16})
    values = _parse(text)

    assert text.startswith("# ")
    assert values["seed"] == "3"
    assert values["method_tag"] == "proposed"
    assert float(values["noise_floor_db"]) == -71.25
    assert values["irw_azimuth_m"] == "nan"
    assert values["rcmc_applied"] == "true"
    assert values["sweeps"] == "16"


def test_write_report(tmp_path, report):
    path = tmp_path / "report.txt"
    write_report(path, report, 0)

    values = _parse(path.read_text())
    assert float(values["snr_db"]) == 71.25
    assert math.isnan(float(values["irw_azimuth_m"]))


def test_write_deltas(tmp_path):
    path = tmp_path / "delta.txt"
    write_deltas(path, {"noise_floor_db": 12.5, "entropy": 0.25})

    assert _parse(path.read_text()) == {"noise_floor_db": "12.5", "entropy": "0.25"}


def test_write_estimates_csv(tmp_path):
    estimates = [
        LeakageEstimate(k_leak=105, f_leak=1001.3, theta_leak=0.5, peak_mag=4000.0),
        LeakageEstimate(k_leak=0, f_leak=0.0, theta_leak=0.0, peak_mag=0.0, detected=False),
    ]
    path = tmp_path / "estimates.csv"
    write_estimates_csv(path, estimates)
    lines = path.read_text().splitlines()

    assert lines[0] == "m,k_leak,f_leak,theta_leak,peak_mag,detected"
    assert lines[1] == "0,105,1001.3,0.5,4000.0,true"
    assert lines[2] == "1,0,0.0,0.0,0.0,false"


def test_write_sweep_csv(tmp_path):
    result = SweepResult(
        levels=[0.01, 0.02], mean_noise_floor_delta_db=[1.5, 4.0], spearman_rho=1.0
    )
    path = tmp_path / "sweep.csv"
    write_sweep_csv(path, result, "sigma_rad")

    assert path.read_text().splitlines() == [
        "sigma_rad,mean_noise_floor_delta_db",
        "0.01,1.5",
        "0.02,4.0",
        "# spearman_rho = 1.0",
    ]


def test_write_errors(tmp_path, img):
    with pytest.raises(IoError):
        write_pgm(tmp_path / "missing" / "image.pgm", img)
    with pytest.raises(IoError):
        write_db_csv(tmp_path / "missing" / "image.csv", img)

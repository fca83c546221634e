import logging

import numpy as np
import pytest
from aspc_sar.backend import use_backend
from aspc_sar.errors import AllZeroError
from aspc_sar.errors import DimensionMismatchError
from aspc_sar.errors import ZeroVelocityError
from aspc_sar.metrics import irw
from aspc_sar.radar import RadarParams
from aspc_sar.radar import WindowKind
from aspc_sar.radar import beat_frequency_of_range
from aspc_sar.radar import max_unambiguous_range
from aspc_sar.radar import validate_params
from aspc_sar.sar import ConventionalPipeline
from aspc_sar.sar import MethodTag
from aspc_sar.sar import ProposedPipeline
from aspc_sar.sar import azimuth_axis
from aspc_sar.sar import azimuth_compress
from aspc_sar.sar import crop_to_digital_bandwidth
from aspc_sar.sar import doppler_rate
from aspc_sar.sar import form_image
from aspc_sar.sar import get_pipeline
from aspc_sar.sar import pipeline_conventional
from aspc_sar.sar import pipeline_proposed
from aspc_sar.sar import range_compress
from aspc_sar.sar import range_migration
from aspc_sar.sar import rcmc
from aspc_sar.sar import rcmc_needed
from aspc_sar.simulator import DataCube
from aspc_sar.simulator import LeakageModel
from aspc_sar.simulator import PointTarget
from aspc_sar.simulator import simulate_cube

from test_backend import ReversedBackend

logging.basicConfig(level=logging.DEBUG)


def _tone(p, freq, n_sweeps=1):
    idx = np.arange(p.n_samples)
    return np.tile(np.exp(2j * np.pi * freq * idx / p.fs)[:, None], (1, n_sweeps))


@pytest.fixture(autouse=True)
def reset_backend():
    yield
    use_backend(None)


@pytest.fixture(scope="module")
def focused_images():
    p = validate_params(RadarParams(m_sweeps=1024, nfft_leak=2 ** 13))
    cube = simulate_cube(p, [PointTarget(x_along=3.0, y_cross=1000.0)], LeakageModel(), 0.0, seed=0)
    return p, pipeline_conventional(cube, p), pipeline_proposed(cube, p)


def test_range_compress_complex_tone():
    p = validate_params(RadarParams())
    rpm = range_compress(_tone(p, beat_frequency_of_range(p, 1000.0), 2), p)

    assert rpm.data.shape == (4096, 2)
    assert rpm.prf == pytest.approx(1250.0)
    assert np.all(np.diff(rpm.range_axis) > 0)
    peak = int(np.argmax(np.abs(rpm.data[:, 0])))
    assert abs(rpm.range_axis[peak] - 1000.0) <= p.range_bin_m


def test_range_mapping_of_the_digital_bandwidth():
    p = validate_params(RadarParams())
    rpm = crop_to_digital_bandwidth(range_compress(_tone(p, 2.5e6), p), p)

    assert rpm.data.shape[0] == 2049
    assert rpm.range_axis[-1] == pytest.approx(max_unambiguous_range(p))
    peak = int(np.argmax(np.abs(rpm.data[:, 0])))
    assert peak == rpm.data.shape[0] - 1
    assert rpm.range_axis[peak] == pytest.approx(2000.0, rel=2e-3)


def test_range_compress_real_input_keeps_the_peak_level():
    p = validate_params(RadarParams())
    freq = 1000 * p.fs / p.range_fft_len
    complex_rpm = range_compress(_tone(p, freq), p)
    real_rpm = range_compress(np.real(_tone(p, freq)), p)

    assert real_rpm.data.shape == (2049, 1)
    assert int(np.argmax(np.abs(real_rpm.data[:, 0]))) == 1000
    assert np.abs(real_rpm.data[1000, 0]) == pytest.approx(
        np.abs(complex_rpm.data[1000, 0]), rel=1e-3
    )
    assert np.allclose(real_rpm.range_axis, complex_rpm.range_axis[:2049])


def test_range_compress_checks_the_shape():
    p = validate_params(RadarParams())
    with pytest.raises(DimensionMismatchError):
        range_compress(np.zeros((100, 2), dtype=complex), p)


def test_doppler_rate_and_migration():
    p = validate_params(RadarParams())

    assert doppler_rate(p, 1000.0) == pytest.approx(26.73, rel=1e-3)
    expected = p.wavelength ** 2 * 100.0 ** 2 * 1000.0 / (8.0 * p.v_platform ** 2)
    assert range_migration(p, 100.0, 1000.0) == pytest.approx(expected)
    assert range_migration(p, 100.0, 1000.0) == pytest.approx(1.944, rel=1e-3)


def test_still_platform():
    p = validate_params(RadarParams(v_platform=0.0))

    with pytest.raises(ZeroVelocityError):
        doppler_rate(p, 1000.0)
    with pytest.raises(ZeroVelocityError):
        range_migration(p, 10.0, 1000.0)


def test_rcmc_pass_through():
    p = validate_params(RadarParams())
    r0_axis = np.array([1000.0, 1000.0 + p.range_bin_m])
    rd = np.ones((2, 64), dtype=complex)

    assert not rcmc_needed(p, r0_axis, 64)
    assert rcmc(rd, p, r0_axis) is rd


def test_rcmc_needed_on_the_full_range_axis():
    p = validate_params(RadarParams(m_sweeps=1024))
    rpm = crop_to_digital_bandwidth(range_compress(_tone(p, 1e6), p), p)

    assert rcmc_needed(p, rpm.range_axis, 1024)


def test_rcmc_straightens_the_migration():
    p = validate_params(RadarParams())
    m = 1024
    r0_axis = np.arange(1, 301) * 1.0
    gates = np.arange(300)
    f_az = np.fft.fftfreq(m, d=p.t_sweep)
    g0 = 199

    shift = range_migration(p, f_az, r0_axis[g0])
    rd = np.exp(-0.5 * ((gates[:, None] - g0 - shift[None, :]) / 2.0) ** 2).astype(complex)
    assert rcmc_needed(p, r0_axis, m)
    out = rcmc(rd, p, r0_axis)

    assert out.shape == rd.shape
    peaks = np.argmax(np.abs(out), axis=0)
    assert np.all(np.abs(peaks - g0) <= 1)


def test_form_image():
    p = validate_params(RadarParams())
    focused = np.array([[1.0, 0.5], [0.0, 2.0]], dtype=complex)
    img = form_image(focused, p, MethodTag.CONVENTIONAL, np.array([10.0, 11.0]))

    assert img.db.max() == 0.0
    assert img.db[1, 0] == pytest.approx(-120.0)
    assert np.all(np.isfinite(img.db))
    assert img.peak_index() == (1, 1)
    assert img.azimuth_axis == pytest.approx([-p.azimuth_spacing_m, 0.0])

    with pytest.raises(AllZeroError):
        form_image(np.zeros((2, 2)), p, MethodTag.CONVENTIONAL, np.array([10.0, 11.0]))


def test_crop_range():
    p = validate_params(RadarParams())
    focused = np.array([[4.0, 0.0], [0.0, 2.0], [1.0, 0.0]], dtype=complex)
    img = form_image(focused, p, MethodTag.PROPOSED, np.array([10.0, 11.0, 12.0]))
    cropped = img.crop_range(11.0)

    assert cropped.db.shape == (2, 2)
    assert cropped.db.max() == 0.0
    assert cropped.range_axis.tolist() == [11.0, 12.0]
    assert cropped.method_tag == MethodTag.PROPOSED

    with pytest.raises(DimensionMismatchError):
        img.crop_range(100.0)


def test_get_pipeline():
    assert get_pipeline("conventional") is ConventionalPipeline
    assert get_pipeline(MethodTag.PROPOSED) is ProposedPipeline

    with pytest.raises(ValueError):
        get_pipeline("backprojection")


def test_single_sweep_is_a_single_look():
    p = validate_params(RadarParams(m_sweeps=1, nfft_leak=2 ** 13))
    cube = simulate_cube(p, [PointTarget(0.0, 1000.0)], LeakageModel(), 0.0, seed=0)
    img = pipeline_conventional(cube, p)

    assert img.single_look
    assert img.db.shape == (2049, 1)


def test_pipeline_checks_the_cube():
    p = validate_params(RadarParams(m_sweeps=4, nfft_leak=2 ** 13))
    other = validate_params(RadarParams(m_sweeps=4, nfft_leak=2 ** 13, t_sweep=400e-6))
    cube = DataCube(data=np.ones((4000, 4), dtype=complex), params_snapshot=p)

    with pytest.raises(DimensionMismatchError):
        ConventionalPipeline(other).run(cube)


def test_proposed_pipeline_keeps_the_estimates():
    p = validate_params(RadarParams(m_sweeps=8, nfft_leak=2 ** 13))
    leak = LeakageModel(amplitude=1000.0, beat_freq=2 * p.bin_hz_leak)
    cube = simulate_cube(p, [PointTarget(0.0, 1000.0)], leak, 0.1, seed=1)
    pipeline = ProposedPipeline(p)
    img = pipeline.run(cube)

    assert img.method_tag == MethodTag.PROPOSED
    assert len(pipeline.estimates) == 8
    assert all(e.detected and e.k_leak == 2 for e in pipeline.estimates)


def test_pipelines_are_schedule_independent():
    p = validate_params(RadarParams(m_sweeps=16, nfft_leak=2 ** 13))
    leak = LeakageModel(amplitude=1000.0, beat_freq=2 * p.bin_hz_leak)
    cube = simulate_cube(p, [PointTarget(0.0, 1000.0)], leak, 0.1, seed=1)
    conventional = pipeline_conventional(cube, p)
    proposed = pipeline_proposed(cube, p)

    use_backend(ReversedBackend())
    assert np.array_equal(conventional.db, pipeline_conventional(cube, p).db)
    assert np.array_equal(proposed.db, pipeline_proposed(cube, p).db)


def test_point_target_focuses_at_its_position(focused_images):
    p, conventional, proposed = focused_images
    expected_range = int(np.argmin(np.abs(conventional.range_axis - 1000.0)))
    expected_azimuth = int(np.argmin(np.abs(azimuth_axis(p, 1024) - 3.0)))

    assert expected_azimuth == 737
    for img in (conventional, proposed):
        r_idx, a_idx = img.peak_index()
        assert abs(int(r_idx) - expected_range) <= 1
        assert abs(int(a_idx) - expected_azimuth) <= 1
        assert img.rcmc_applied
        assert img.db.shape == (2049, 1024)


def test_clean_scene_peak_is_preserved(focused_images):
    _, conventional, proposed = focused_images

    assert conventional.peak_index() == proposed.peak_index()
    assert conventional.db.shape == proposed.db.shape


def test_point_target_azimuth_resolution(focused_images):
    p, conventional, proposed = focused_images
    expected = p.wavelength * 1000.0 / (2.0 * p.azimuth_spacing_m * 1024)

    assert expected == pytest.approx(0.761, rel=1e-3)
    for img in (conventional, proposed):
        r_idx, a_idx = img.peak_index()
        cut = 10.0 ** (img.db[r_idx, :] / 20.0)
        assert irw(cut, int(a_idx), p.azimuth_spacing_m) == pytest.approx(expected, rel=0.2)


def test_azimuth_compress_preserves_gate_energy():
    p = validate_params(RadarParams(m_sweeps=64, nfft_leak=2 ** 13))
    rng = np.random.default_rng(4)
    x = rng.standard_normal((5, 64)) + 1j * rng.standard_normal((5, 64))
    r0_axis = np.array([0.0, 250.0, 500.0, 1000.0, 2000.0])

    out = azimuth_compress(np.fft.fft(x, axis=1), p, r0_axis)
    energy = np.sum(np.abs(out) ** 2, axis=1)
    assert np.allclose(energy, np.sum(np.abs(x) ** 2, axis=1), rtol=1e-9, atol=0.0)


def test_window_kind_changes_the_mainlobe():
    p_rect = validate_params(RadarParams(window=WindowKind.RECT))
    p_hann = validate_params(RadarParams(window=WindowKind.HANN))
    freq = 1000 * p_rect.fs / p_rect.range_fft_len
    rect = np.abs(range_compress(_tone(p_rect, freq), p_rect).data[:, 0])
    hann = np.abs(range_compress(_tone(p_hann, freq), p_hann).data[:, 0])

    # Hann halves the coherent gain
    assert hann[1000] == pytest.approx(rect[1000] / 2.0, rel=1e-3)

"""Shared fixtures: a calibrated synthetic setup reused across the suite.

All simulator fixtures share one geometry and one bin-centered range so
that calibration ratios cancel processing gains exactly.
"""

import numpy as np
import pytest

from radmat import (
    ArrayGeometry,
    ChirpConfig,
    SceneTarget,
    calibrate_plate,
    calibrate_sphere,
    default_geometry,
    synthesize_frame,
)
from radmat.calibration import estimate_noise_power
from radmat.spectral import detect_target, range_angle, range_doppler

SPHERE_DIAMETER_M = 0.063
FIXTURE_NOISE_W = 1e-2
GATE_M = (0.1, 0.6)
METAL_EPSILON = 1.0e6


def padded_range_bin_m(config: ChirpConfig) -> float:
    n_fft = 1 << (config.samples_per_chirp - 1).bit_length()
    return 3.0e8 * config.sample_rate_hz / (2.0 * config.slope_hz_per_s * n_fft)


@pytest.fixture(scope="session")
def config() -> ChirpConfig:
    return ChirpConfig()


@pytest.fixture(scope="session")
def geometry(config) -> ArrayGeometry:
    return default_geometry(config, element_count=8)


@pytest.fixture(scope="session")
def fixture_range_m(config) -> float:
    # centered on padded FFT bin 16 so detection recovers the range exactly
    return 16 * padded_range_bin_m(config)


@pytest.fixture(scope="session")
def fixture_position(fixture_range_m) -> np.ndarray:
    return np.array([0.0, 0.0, fixture_range_m])


def make_plate(position, epsilon, area_m2=0.04, label=""):
    return SceneTarget(
        position_m=np.asarray(position, dtype=float),
        dielectric_constant=epsilon,
        facet_normal=np.array([0.0, 0.0, -1.0]),
        facet_area_m2=area_m2,
        label=label,
    )


def make_sphere(position, diameter_m=SPHERE_DIAMETER_M):
    return SceneTarget(
        position_m=np.asarray(position, dtype=float),
        dielectric_constant=1.0e12,
        facet_normal=np.array([0.0, 0.0, -1.0]),
        facet_area_m2=np.pi * (diameter_m / 2.0) ** 2,
        label="calibration sphere",
    )


@pytest.fixture(scope="session")
def frame_factory(config, geometry):
    def build(targets, seed, noise_power_w=FIXTURE_NOISE_W, **kwargs):
        return synthesize_frame(targets, config, geometry, noise_power_w, seed, **kwargs)

    return build


@pytest.fixture(scope="session")
def noise_power(frame_factory) -> float:
    return estimate_noise_power(frame_factory([], seed=99))


def detect(cube, gate=GATE_M):
    rd = range_doppler(cube)
    ra = range_angle(cube)
    return rd, ra, detect_target(rd, ra, gate)


def build_profile(config, geometry, position, frame_factory, noise_power, cube_noise_w):
    sphere_cube = frame_factory(
        [make_sphere(position)], seed=11, noise_power_w=cube_noise_w
    )
    _, _, sphere_det = detect(sphere_cube)
    partial = calibrate_sphere(sphere_det, geometry, config, SPHERE_DIAMETER_M, noise_power)
    plate_cube = frame_factory(
        [make_plate(position, METAL_EPSILON, label="metal reference plate")],
        seed=12,
        noise_power_w=cube_noise_w,
    )
    _, plate_ra, plate_det = detect(plate_cube)
    return calibrate_plate(plate_det, plate_ra, geometry, config, partial)


@pytest.fixture(scope="session")
def profile(config, geometry, fixture_position, frame_factory, noise_power):
    """Sphere + metal plate calibration against the shared fixture scene."""
    return build_profile(
        config, geometry, fixture_position, frame_factory, noise_power, FIXTURE_NOISE_W
    )


@pytest.fixture(scope="session")
def clean_profile(config, geometry, fixture_position, frame_factory, noise_power):
    """Calibration from noise-free cubes, for exact phase-identity checks."""
    return build_profile(
        config, geometry, fixture_position, frame_factory, noise_power, 0.0
    )

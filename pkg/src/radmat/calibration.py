"""System calibration from a metal sphere and a smooth metal plate.

The sphere (diameter well into the optical scattering region, enforced
as d >= 5*lambda) pins the radar-equation constant K = SNR_c * R_c^4 /
sigma_c with sigma_c = pi*(d/2)^2, and yields per-antenna phase phasors
C_j = exp(-j*(phi_meas_j - phi_cali_j)) that cancel hardware offsets.
The plate, measured after the sphere, provides the power reflection of a
perfect reflector; material reflectivities are later normalized by it.

Enhanced (synthesis) SNR is used for both calibration and measurement so
the two sides of every ratio share the same processing gain.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import CalibrationError, DomainError
from .signal_model import ArrayGeometry, ChirpConfig, RadarCube
from .spectral import RangeAngleMap, TargetDetection, detection_voxel, range_doppler

OPTICAL_REGION_FACTOR = 5.0  # minimum sphere diameter in wavelengths


@dataclass(frozen=True)
class CalibrationProfile:
    system_constant_k: float
    sphere_rcs_m2: float
    sphere_range_m: float
    sphere_snr_linear: float
    phase_phasors: np.ndarray  # complex, unit magnitude, one per antenna
    noise_power_w: float
    metal_plate_rho: float | None = None

    def __post_init__(self):
        if min(
            self.system_constant_k,
            self.sphere_rcs_m2,
            self.sphere_range_m,
            self.sphere_snr_linear,
            self.noise_power_w,
        ) <= 0:
            raise DomainError("all calibration scalars must be positive")
        phasors = np.asarray(self.phase_phasors, dtype=np.complex128)
        if np.any(np.abs(np.abs(phasors) - 1.0) > 1e-9):
            raise DomainError("phase phasors must have unit magnitude")
        if self.metal_plate_rho is not None and self.metal_plate_rho <= 0:
            raise DomainError("metal plate reflectivity must be positive")
        object.__setattr__(self, "phase_phasors", phasors)

    @property
    def is_complete(self) -> bool:
        return self.metal_plate_rho is not None

    def to_document(self) -> dict:
        return {
            "kind": "calibration_profile",
            "version": 1,
            "system_constant_k": self.system_constant_k,
            "sphere_rcs_m2": self.sphere_rcs_m2,
            "sphere_range_m": self.sphere_range_m,
            "sphere_snr_linear": self.sphere_snr_linear,
            "phase_phasors_re_im": [[float(c.real), float(c.imag)] for c in self.phase_phasors],
            "noise_power_w": self.noise_power_w,
            "metal_plate_rho": self.metal_plate_rho,
        }

    @classmethod
    def from_document(cls, doc: dict) -> "CalibrationProfile":
        try:
            phasors = np.array(
                [complex(re, im) for re, im in doc["phase_phasors_re_im"]]
            )
            return cls(
                system_constant_k=float(doc["system_constant_k"]),
                sphere_rcs_m2=float(doc["sphere_rcs_m2"]),
                sphere_range_m=float(doc["sphere_range_m"]),
                sphere_snr_linear=float(doc["sphere_snr_linear"]),
                phase_phasors=phasors,
                noise_power_w=float(doc["noise_power_w"]),
                metal_plate_rho=(
                    None if doc.get("metal_plate_rho") is None else float(doc["metal_plate_rho"])
                ),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CalibrationError(f"invalid calibration profile document: {exc}") from exc


def estimate_noise_power(empty_cube: RadarCube) -> float:
    """Per-bin noise power from an empty-scene cube.

    Median of |X|^2 over all range-Doppler bins and antennas, corrected
    by 1/ln(2) (the median of an exponential is ln(2) times its mean), so
    the estimate is unbiased for pure noise yet robust to leakage.
    """
    spectra = range_doppler(empty_cube).per_antenna
    power = np.abs(spectra) ** 2
    estimate = float(np.median(power)) / math.log(2.0)
    if estimate <= 0:
        raise CalibrationError("empty-scene cube has zero power; cannot estimate noise")
    return estimate


def calibrate_sphere(
    detection: TargetDetection,
    geometry: ArrayGeometry,
    config: ChirpConfig,
    sphere_diameter_m: float,
    noise_power_w: float,
) -> CalibrationProfile:
    """Build the sphere-referenced part of the calibration profile."""
    lam = config.wavelength_m
    if sphere_diameter_m < OPTICAL_REGION_FACTOR * lam:
        raise CalibrationError(
            f"sphere diameter {sphere_diameter_m * 1e3:.1f} mm is not in the optical "
            f"scattering region (need >= {OPTICAL_REGION_FACTOR * lam * 1e3:.1f} mm)"
        )
    if noise_power_w <= 0:
        raise CalibrationError("noise power must be positive")

    sigma_c = math.pi * (sphere_diameter_m / 2.0) ** 2
    voxel = detection_voxel(detection)
    dists = np.linalg.norm(geometry.element_positions - voxel, axis=1)
    expected_phase = -4.0 * np.pi * dists / lam
    measured_phase = np.angle(detection.gated_signal)
    phasors = np.exp(-1j * (measured_phase - expected_phase))

    # focused signals are real-positive by construction at the sphere voxel
    from .synthesis import synthesize

    focused = detection.gated_signal * phasors * np.exp(4j * np.pi * dists / lam)
    snr_c = synthesize(focused, geometry, voxel, noise_power_w).enhanced_snr_linear
    if snr_c <= 0:
        raise CalibrationError("sphere signal has zero synthesized power")

    return CalibrationProfile(
        system_constant_k=snr_c * detection.range_m**4 / sigma_c,
        sphere_rcs_m2=sigma_c,
        sphere_range_m=detection.range_m,
        sphere_snr_linear=snr_c,
        phase_phasors=phasors,
        noise_power_w=noise_power_w,
    )


def rcs_from_snr(snr_linear: float, range_m: float, profile: CalibrationProfile) -> float:
    """Distance-independent RCS via the calibrated sphere reference."""
    if snr_linear <= 0 or range_m <= 0:
        raise DomainError("SNR and range must be positive")
    return (
        profile.sphere_rcs_m2
        * (snr_linear / profile.sphere_snr_linear)
        * (range_m / profile.sphere_range_m) ** 4
    )


def calibrate_plate(
    detection: TargetDetection,
    ra_map: RangeAngleMap,
    geometry: ArrayGeometry,
    config: ChirpConfig,
    profile: CalibrationProfile | None,
) -> CalibrationProfile:
    """Store the metal plate's power reflection as the unity reference.

    Requires a sphere-calibrated profile; repeating the measurement
    deterministically overwrites any previous plate value.
    """
    if profile is None:
        raise CalibrationError("sphere calibration must run before the plate")
    from .prca import compute_prca
    from .synthesis import focus, synthesize

    focused = focus(detection, profile, geometry, config)
    result = synthesize(focused, geometry, detection_voxel(detection), profile.noise_power_w)
    if result.enhanced_snr_linear <= 1.0:
        raise CalibrationError("plate SNR is below the usable threshold")
    sigma = rcs_from_snr(result.enhanced_snr_linear, detection.range_m, profile)
    region = compute_prca(ra_map)
    return replace(profile, metal_plate_rho=sigma / region.area_m2)

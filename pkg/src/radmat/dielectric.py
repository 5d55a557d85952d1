"""Dielectric constant extraction from calibrated radar measurements.

The chain: enhanced SNR -> RCS (sphere-referenced) -> power reflection
rho = sigma / A_r (PRCA-normalized) -> Fresnel coefficient r_p =
sqrt(rho / rho_metal_plate) -> relative dielectric constant via inversion
of the p-polarized Fresnel formula.

The inversion at normal incidence is eps = ((1 + r) / (1 - r))^2; at
oblique incidence both branches of

    eps = (r+1)^2 * [1 +/- sqrt(1 - (sin(2t)*(r-1)/(r+1))^2)]
          / (2 * cos(t)^2 * (r-1)^2)

are evaluated and the one whose forward Fresnel value best reproduces
the measured r_p wins.  Measurement is power-based, so r_p is stored as
a magnitude and clamped just below 1 to keep the inverse finite for
metal-like reflectors.
"""

import math
from contextlib import contextmanager
from dataclasses import dataclass

from .calibration import CalibrationProfile, rcs_from_snr
from .errors import CalibrationError, DomainError, RadmatError
from .prca import PrcaRegion
from .signal_model import fresnel_amplitude
from .spectral import TargetDetection
from .synthesis import SynthesisResult

R_P_CEILING = 1.0 - 1e-9


@dataclass(frozen=True)
class EmFeatureVector:
    """The eight radar-derived parameters handed to matching and fusion."""

    range_m: float
    velocity_m_s: float
    angle_rad: float
    snr_db: float
    rcs_m2: float
    power_reflection: float
    fresnel_coefficient: float
    dielectric_constant: float
    prca_area_m2: float

    def __post_init__(self):
        if not 0.0 <= self.fresnel_coefficient < 1.0:
            raise DomainError("fresnel coefficient must lie in [0, 1)")
        if self.dielectric_constant < 1.0:
            raise DomainError("dielectric constant must be >= 1")
        if self.prca_area_m2 <= 0:
            raise DomainError("PRCA area must be positive")
        if abs(self.rcs_m2 - self.power_reflection * self.prca_area_m2) > 1e-9 * max(
            abs(self.rcs_m2), 1e-300
        ):
            raise DomainError("rcs must equal power_reflection * prca_area")

    def to_document(self) -> dict:
        return {
            "kind": "em_feature_vector",
            "range_m": self.range_m,
            "velocity_m_s": self.velocity_m_s,
            "angle_rad": self.angle_rad,
            "snr_db": self.snr_db,
            "rcs_m2": self.rcs_m2,
            "power_reflection": self.power_reflection,
            "fresnel_coefficient": self.fresnel_coefficient,
            "dielectric_constant": self.dielectric_constant,
            "prca_area_m2": self.prca_area_m2,
        }

    @classmethod
    def from_document(cls, doc: dict) -> "EmFeatureVector":
        try:
            return cls(
                range_m=float(doc["range_m"]),
                velocity_m_s=float(doc["velocity_m_s"]),
                angle_rad=float(doc["angle_rad"]),
                snr_db=float(doc["snr_db"]),
                rcs_m2=float(doc["rcs_m2"]),
                power_reflection=float(doc["power_reflection"]),
                fresnel_coefficient=float(doc["fresnel_coefficient"]),
                dielectric_constant=float(doc["dielectric_constant"]),
                prca_area_m2=float(doc["prca_area_m2"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"invalid feature record: {exc}") from exc

    @property
    def snr_linear(self) -> float:
        return 10.0 ** (self.snr_db / 10.0)


def reflection_coefficients(
    rcs_m2: float, area_m2: float, profile: CalibrationProfile
):
    """(rho, r_p): PRCA-normalized reflectivity and its metal-referenced root."""
    if area_m2 <= 0:
        raise DomainError("PRCA area must be positive")
    if rcs_m2 < 0:
        raise DomainError("RCS must be non-negative")
    if not profile.is_complete:
        raise CalibrationError("metal plate calibration missing")
    rho = rcs_m2 / area_m2
    r_p = min(math.sqrt(rho / profile.metal_plate_rho), R_P_CEILING)
    return rho, r_p


def dielectric_from_fresnel(r_p: float, incidence_angle_rad: float) -> float:
    """Invert the p-polarized Fresnel magnitude to a dielectric constant."""
    if not 0.0 <= r_p < 1.0:
        raise DomainError("r_p must lie in [0, 1)")
    if not 0.0 <= incidence_angle_rad < math.pi / 2:
        raise DomainError("incidence angle must lie in [0, pi/2)")
    if incidence_angle_rad == 0.0:
        return ((1.0 + r_p) / (1.0 - r_p)) ** 2

    theta = incidence_angle_rad
    q = ((1.0 + r_p) / (1.0 - r_p)) ** 2
    discriminant = 1.0 - (math.sin(2.0 * theta) * (r_p - 1.0) / (r_p + 1.0)) ** 2
    if discriminant < 0.0:
        raise DomainError("no real dielectric constant for this (r_p, angle)")
    root = math.sqrt(discriminant)
    denom = 2.0 * math.cos(theta) ** 2
    candidates = [q * (1.0 + root) / denom, q * (1.0 - root) / denom]
    valid = [eps for eps in candidates if eps >= 1.0 - 1e-12]
    if not valid:
        raise DomainError("both inversion branches fall below the physical floor of 1")
    best = min(valid, key=lambda eps: abs(fresnel_amplitude(max(eps, 1.0), theta) - r_p))
    return max(best, 1.0)


def itu_dielectric(coeff_a: float, coeff_b: float, frequency_ghz: float) -> float:
    """Frequency-dependent reference model eps_r(f) = a * f^b, f in GHz."""
    if coeff_a <= 0 or frequency_ghz <= 0:
        raise DomainError("coefficient a and frequency must be positive")
    return coeff_a * frequency_ghz**coeff_b


@contextmanager
def _stage(label: str):
    try:
        yield
    except RadmatError as exc:
        raise type(exc)(f"{label}: {exc}") from exc


def extract_features(
    detection: TargetDetection,
    synthesis_result: SynthesisResult,
    prca_region: PrcaRegion,
    profile: CalibrationProfile,
) -> EmFeatureVector:
    """Assemble the full feature vector; errors carry their stage label."""
    snr = synthesis_result.enhanced_snr_linear
    with _stage("rcs"):
        sigma = rcs_from_snr(snr, detection.range_m, profile)
    with _stage("reflection"):
        rho, r_p = reflection_coefficients(sigma, prca_region.area_m2, profile)
    with _stage("inversion"):
        epsilon = dielectric_from_fresnel(r_p, abs(detection.angle_rad))
    return EmFeatureVector(
        range_m=detection.range_m,
        velocity_m_s=detection.velocity_m_s,
        angle_rad=detection.angle_rad,
        snr_db=10.0 * math.log10(snr) if snr > 0 else -math.inf,
        rcs_m2=rho * prca_region.area_m2,
        power_reflection=rho,
        fresnel_coefficient=r_p,
        dielectric_constant=epsilon,
        prca_area_m2=prca_region.area_m2,
    )

"""FMCW waveform configuration and synthetic multi-antenna echo generation.

Beat-signal model for a point-like facet at position v with radial
velocity V and relative dielectric constant eps_r:

    x[n, m, j] = A * exp(j*(2*pi*f_b*n/f_s  -  4*pi*V*T_c*m/lambda
                            -  4*pi*||p_j - v||/lambda))

    f_b = 2*R*S/c                      (dechirped beat frequency)
    A   = |r_p(eps_r, psi)| * sqrt(A_facet) * cos(psi)^n_facet / R^2

where psi is the angle between the facet normal and the line of sight,
r_p the p-polarized Fresnel reflection coefficient, and T_c the chirp
duration.  Circular complex white noise of a configured power is added
from a mandatory seed, so frames are bit-reproducible.

The synthesizer acts as the independent oracle for the processing chain:
its amplitude law is the quantity the extraction pipeline is meant to
recover (effective RCS = A_facet * r_p^2 * cos(psi)^(2*n_facet)).

Array convention: boresight is +z, a uniform linear array lies along x.
Per-antenna phases are two-way (4*pi/lambda), i.e. each element is
treated as the phase center of its own round trip.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, SceneError

SPEED_OF_LIGHT = 3.0e8  # m/s, radar convention

# Paper-style 60 GHz production settings used as defaults throughout.
DEFAULT_CARRIER_HZ = 60.0e9
DEFAULT_BANDWIDTH_HZ = 3.96e9
DEFAULT_SLOPE_HZ_PER_S = 66.0e12  # 66 MHz/us
DEFAULT_SAMPLE_RATE_HZ = 10.0e6


@dataclass(frozen=True)
class ChirpConfig:
    """Sawtooth FMCW chirp and frame timing parameters."""

    carrier_frequency_hz: float = DEFAULT_CARRIER_HZ
    bandwidth_hz: float = DEFAULT_BANDWIDTH_HZ
    slope_hz_per_s: float = DEFAULT_SLOPE_HZ_PER_S
    sample_rate_hz: float = DEFAULT_SAMPLE_RATE_HZ
    samples_per_chirp: int = 600
    chirps_per_frame: int = 64

    def __post_init__(self):
        if self.carrier_frequency_hz <= 0:
            raise DomainError("carrier frequency must be positive")
        if self.bandwidth_hz <= 0 or self.slope_hz_per_s <= 0 or self.sample_rate_hz <= 0:
            raise DomainError("bandwidth, slope and sample rate must be positive")
        if self.samples_per_chirp < 2 or self.chirps_per_frame < 1:
            raise DomainError("need at least 2 samples per chirp and 1 chirp")
        if self.chirp_duration_s + 1e-15 < self.samples_per_chirp / self.sample_rate_hz:
            raise DomainError(
                "chirp duration B/S is shorter than the sampling window "
                f"({self.chirp_duration_s:.3e} s < "
                f"{self.samples_per_chirp / self.sample_rate_hz:.3e} s)"
            )

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_frequency_hz

    @property
    def chirp_duration_s(self) -> float:
        return self.bandwidth_hz / self.slope_hz_per_s

    @property
    def sampled_bandwidth_hz(self) -> float:
        """Bandwidth actually swept while the ADC samples."""
        return self.slope_hz_per_s * self.samples_per_chirp / self.sample_rate_hz

    @property
    def range_resolution_m(self) -> float:
        return SPEED_OF_LIGHT / (2.0 * self.sampled_bandwidth_hz)

    @property
    def unambiguous_range_m(self) -> float:
        # complex baseband: beat frequencies alias at f_s
        return SPEED_OF_LIGHT * self.sample_rate_hz / (2.0 * self.slope_hz_per_s)


@dataclass(frozen=True)
class ArrayGeometry:
    """Receive array element positions, in meters, boresight along +z."""

    element_positions: np.ndarray  # shape (N, 3)

    def __post_init__(self):
        pos = np.asarray(self.element_positions, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 3:
            raise DomainError("element_positions must have shape (N, 3)")
        if pos.shape[0] < 2:
            raise DomainError("array needs at least 2 elements")
        if len({tuple(p) for p in pos.round(12)}) != pos.shape[0]:
            raise DomainError("element positions must be distinct")
        object.__setattr__(self, "element_positions", pos)

    @property
    def element_count(self) -> int:
        return self.element_positions.shape[0]

    @classmethod
    def uniform_linear(cls, element_count: int, spacing_m: float) -> "ArrayGeometry":
        """ULA along x, centered on the origin."""
        if element_count < 2 or spacing_m <= 0:
            raise DomainError("ULA needs >= 2 elements and positive spacing")
        x = (np.arange(element_count) - (element_count - 1) / 2.0) * spacing_m
        pos = np.zeros((element_count, 3))
        pos[:, 0] = x
        return cls(pos)


def default_geometry(config: ChirpConfig, element_count: int = 8) -> ArrayGeometry:
    """Quarter-wavelength ULA.

    With two-way per-element phases (4*pi/lambda), lambda/4 spacing keeps
    the full +/-90 deg field of view free of grating lobes.
    """
    return ArrayGeometry.uniform_linear(element_count, config.wavelength_m / 4.0)


@dataclass(frozen=True)
class SceneTarget:
    """A material-parameterized point facet in the scene."""

    position_m: np.ndarray
    radial_velocity_m_s: float = 0.0
    dielectric_constant: float = 1.0
    facet_normal: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, -1.0]))
    facet_area_m2: float = 0.01
    label: str = ""

    def __post_init__(self):
        pos = np.asarray(self.position_m, dtype=float)
        nrm = np.asarray(self.facet_normal, dtype=float)
        if pos.shape != (3,) or nrm.shape != (3,):
            raise DomainError("position and facet normal must be 3-vectors")
        if self.dielectric_constant < 1.0:
            raise DomainError("dielectric constant must be >= 1")
        if abs(np.linalg.norm(nrm) - 1.0) > 1e-9:
            raise DomainError("facet normal must be a unit vector")
        if self.facet_area_m2 <= 0:
            raise DomainError("facet area must be positive")
        object.__setattr__(self, "position_m", pos)
        object.__setattr__(self, "facet_normal", nrm)

    @property
    def range_m(self) -> float:
        return float(np.linalg.norm(self.position_m))


@dataclass(frozen=True)
class RadarCube:
    """Complex baseband samples shaped [fast_time, chirp, antenna]."""

    samples: np.ndarray
    config: ChirpConfig
    geometry: ArrayGeometry

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=np.complex128)
        expected = (
            self.config.samples_per_chirp,
            self.config.chirps_per_frame,
            self.geometry.element_count,
        )
        if s.shape != expected:
            raise DomainError(f"cube shape {s.shape} does not match config {expected}")
        if not np.all(np.isfinite(s)):
            raise DomainError("cube contains non-finite samples")
        object.__setattr__(self, "samples", s)


def beat_frequency(range_m: float, config: ChirpConfig) -> float:
    """Dechirped beat frequency 2*R*S/c for a target at the given range."""
    if range_m <= 0:
        raise DomainError("range must be positive")
    return 2.0 * range_m * config.slope_hz_per_s / SPEED_OF_LIGHT


def fresnel_amplitude(dielectric_constant: float, incidence_angle_rad: float) -> float:
    """p-polarized Fresnel reflection coefficient of a dielectric half-space.

    Returns (eps*cos(t) - sqrt(eps - sin(t)^2)) / (eps*cos(t) + sqrt(eps - sin(t)^2)).
    Positive for eps >= 1 at the incidence angles used here (< 45 deg).
    """
    if dielectric_constant < 1.0:
        raise DomainError("dielectric constant must be >= 1")
    if not 0.0 <= incidence_angle_rad < np.pi / 2:
        raise DomainError("incidence angle must lie in [0, pi/2)")
    eps = dielectric_constant
    cos_t = np.cos(incidence_angle_rad)
    root = np.sqrt(eps - np.sin(incidence_angle_rad) ** 2)
    return float((eps * cos_t - root) / (eps * cos_t + root))


def synthesize_frame(
    scene,
    config: ChirpConfig,
    geometry: ArrayGeometry,
    noise_power_w: float,
    rng_seed: int,
    *,
    phase_offsets_rad=None,
    facet_exponent: float = 2.0,
) -> RadarCube:
    """Generate one frame of multi-antenna baseband echoes.

    Each target contributes a beat tone at beat_frequency(R), a per-chirp
    Doppler phase increment, and exact two-way per-antenna geometric
    phases.  Back-facing facets contribute nothing.  `phase_offsets_rad`
    injects per-antenna hardware phase errors (calibration fixtures).
    Deterministic for a fixed seed.
    """
    if noise_power_w < 0:
        raise DomainError("noise power must be >= 0")
    n_fast = config.samples_per_chirp
    n_chirp = config.chirps_per_frame
    positions = geometry.element_positions
    n_ant = geometry.element_count

    cube = np.zeros((n_fast, n_chirp, n_ant), dtype=np.complex128)
    lam = config.wavelength_m
    fast_idx = np.arange(n_fast)
    chirp_idx = np.arange(n_chirp)

    for index, target in enumerate(scene):
        name = target.label or f"target {index}"
        v = target.position_m
        rng_m = target.range_m
        if rng_m <= 0:
            raise SceneError(f"{name}: position coincides with the radar origin")
        if rng_m >= config.unambiguous_range_m:
            raise SceneError(
                f"{name}: range {rng_m:.3f} m exceeds the unambiguous range "
                f"{config.unambiguous_range_m:.3f} m"
            )
        facing = float(np.dot(target.facet_normal, -v / rng_m))
        if facing <= 0:
            continue
        psi = float(np.arccos(np.clip(facing, 0.0, 1.0)))
        amplitude = (
            abs(fresnel_amplitude(target.dielectric_constant, psi))
            * np.sqrt(target.facet_area_m2)
            * facing**facet_exponent
            / rng_m**2
        )
        f_beat = beat_frequency(rng_m, config)
        fast = np.exp(2j * np.pi * f_beat * fast_idx / config.sample_rate_hz)
        slow = np.exp(
            -4j
            * np.pi
            * target.radial_velocity_m_s
            * config.chirp_duration_s
            * chirp_idx
            / lam
        )
        dists = np.linalg.norm(positions - v, axis=1)
        ant = np.exp(-4j * np.pi * dists / lam)
        cube += amplitude * fast[:, None, None] * slow[None, :, None] * ant[None, None, :]

    if phase_offsets_rad is not None:
        offsets = np.asarray(phase_offsets_rad, dtype=float)
        if offsets.shape != (n_ant,):
            raise DomainError("phase offsets must provide one value per antenna")
        cube *= np.exp(1j * offsets)[None, None, :]

    if noise_power_w > 0:
        rng = np.random.default_rng(rng_seed)
        scale = np.sqrt(noise_power_w / 2.0)
        cube = cube + scale * (
            rng.standard_normal(cube.shape) + 1j * rng.standard_normal(cube.shape)
        )

    return RadarCube(cube, config, geometry)

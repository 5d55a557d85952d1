"""Weighted vector synthesis of the gated array signal.

Given the calibrated, phase-focused per-antenna signals I_j at a voxel v:

    S        = sum_j I_j                       (coherent sum)
    w_j      = Re(I_j) Re(S) + Im(I_j) Im(S)) / |S|
    u_j      = (p_j - v) / ||p_j - v||
    S_w      = sum_j w_j * u_j                 (reconstructed vector)
    c        = |S|^2 / (N * sum_j |I_j|^2)     (coherence factor)
    SNR      = ||S_w||^2 / P_noise * c

w_j is the projection of I_j onto the direction of S, so sum(w_j) == |S|
exactly; incoherent antennas receive small or negative weights and are
kept as-is.  The direction of S_w encodes the surface slope seen by the
array, its magnitude the coherent signal strength.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .errors import DomainError
from .signal_model import ArrayGeometry, ChirpConfig
from .spectral import TargetDetection, detection_voxel

if TYPE_CHECKING:  # avoids a runtime cycle with calibration
    from .calibration import CalibrationProfile


@dataclass(frozen=True)
class SynthesisResult:
    focused_signals: np.ndarray  # complex, per antenna
    coherent_sum: complex
    weights: np.ndarray  # real, per antenna
    unit_vectors: np.ndarray  # (N, 3)
    weighted_vector: np.ndarray  # (3,)
    coherence_factor: float
    enhanced_snr_linear: float

    def to_document(self) -> dict:
        return {
            "kind": "synthesis_result",
            "focused_signals_re_im": [[float(z.real), float(z.imag)] for z in self.focused_signals],
            "coherent_sum_re_im": [float(self.coherent_sum.real), float(self.coherent_sum.imag)],
            "weights": [float(w) for w in self.weights],
            "weighted_vector": [float(v) for v in self.weighted_vector],
            "coherence_factor": self.coherence_factor,
            "enhanced_snr_linear": self.enhanced_snr_linear,
        }


def focus(
    detection: TargetDetection,
    profile: CalibrationProfile,
    geometry: ArrayGeometry,
    config: ChirpConfig,
    voxel=None,
) -> np.ndarray:
    """Phase-align the gated signal toward a voxel.

    I_j = x_j * C_j * exp(j * 4*pi*||p_j - v|| / lambda).  The stored
    calibration phasors cancel hardware phase offsets; the exponential
    removes the two-way geometric delay, so a true point source at v
    leaves all I_j with a common phase.
    """
    x = detection.gated_signal
    phasors = profile.phase_phasors
    if len(phasors) != geometry.element_count or len(x) != geometry.element_count:
        raise DomainError(
            "antenna count mismatch between detection, profile and geometry"
        )
    v = detection_voxel(detection) if voxel is None else np.asarray(voxel, dtype=float)
    dists = np.linalg.norm(geometry.element_positions - v, axis=1)
    return x * phasors * np.exp(4j * np.pi * dists / config.wavelength_m)


def synthesize(
    focused_signals: np.ndarray,
    geometry: ArrayGeometry,
    voxel,
    noise_power_w: float,
) -> SynthesisResult:
    """Coherence-weighted vector reconstruction and enhanced SNR."""
    signals = np.asarray(focused_signals, dtype=np.complex128)
    n = geometry.element_count
    if signals.shape != (n,):
        raise DomainError("need one focused signal per antenna")
    if n < 2:
        raise DomainError("synthesis needs at least 2 antennas")
    if noise_power_w <= 0:
        raise DomainError("noise power must be positive")

    total = signals.sum()
    magnitude = abs(total)
    if magnitude == 0.0:
        raise DomainError("coherent sum is zero; weights are undefined")

    weights = (signals.real * total.real + signals.imag * total.imag) / magnitude
    v = np.asarray(voxel, dtype=float)
    offsets = geometry.element_positions - v
    norms = np.linalg.norm(offsets, axis=1)
    if np.any(norms == 0):
        raise DomainError("voxel coincides with an antenna position")
    units = offsets / norms[:, None]
    weighted_vector = (weights[:, None] * units).sum(axis=0)

    power = float(np.sum(np.abs(signals) ** 2))
    coherence = float(np.clip(magnitude**2 / (n * power), 0.0, 1.0))
    snr = float(weighted_vector @ weighted_vector) / noise_power_w * coherence

    return SynthesisResult(
        focused_signals=signals,
        coherent_sum=complex(total),
        weights=weights,
        unit_vectors=units,
        weighted_vector=weighted_vector,
        coherence_factor=coherence,
        enhanced_snr_linear=snr,
    )


def surface_tilt(result: SynthesisResult) -> float:
    """Signed in-plane angle of the reconstructed surface orientation.

    The unit vectors run from the target back toward the array, so for a
    front-facing surface S_w points along -z; the tilt is measured from
    that radar-pointing direction, positive toward +x antennas.
    """
    vec = result.weighted_vector
    if np.linalg.norm(vec) == 0:
        raise DomainError("weighted vector is zero; tilt undefined")
    return float(np.arctan2(vec[0], -vec[2]))

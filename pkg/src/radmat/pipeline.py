"""End-to-end orchestration: cube -> features -> candidates -> decision.

These functions are the programmatic form of the CLI subcommands so that
library users and tests can drive the identical chain.
"""

from dataclasses import dataclass

from .calibration import CalibrationProfile
from .dielectric import EmFeatureVector, extract_features
from .errors import CalibrationError
from .fusion import FusionConfig, FusionDecision, RadarContext, VisualContext, decide
from .knowledge import DEFAULT_TOP_K, MaterialStore, RadarCandidateSet, match, prune_visual
from .prca import PrcaRegion, compute_prca
from .signal_model import RadarCube
from .spectral import (
    DEFAULT_THRESHOLD_DB,
    RangeAngleMap,
    RangeDopplerMap,
    TargetDetection,
    detect_target,
    detection_voxel,
    range_angle,
    range_doppler,
)
from .synthesis import SynthesisResult, focus, synthesize


@dataclass(frozen=True)
class ExtractionResult:
    features: EmFeatureVector
    detection: TargetDetection
    synthesis: SynthesisResult
    region: PrcaRegion
    rd_map: RangeDopplerMap
    ra_map: RangeAngleMap


def extract_from_cube(
    cube: RadarCube,
    profile: CalibrationProfile,
    gate_m,
    threshold_db: float = DEFAULT_THRESHOLD_DB,
) -> ExtractionResult:
    """Run the full radar-side chain on one frame."""
    if not profile.is_complete:
        raise CalibrationError("profile lacks the metal plate reference")
    rd_map = range_doppler(cube)
    ra_map = range_angle(cube)
    detection = detect_target(rd_map, ra_map, gate_m, threshold_db)
    focused = focus(detection, profile, cube.geometry, cube.config)
    result = synthesize(
        focused, cube.geometry, detection_voxel(detection), profile.noise_power_w
    )
    region = compute_prca(ra_map)
    features = extract_features(detection, result, region, profile)
    return ExtractionResult(features, detection, result, region, rd_map, ra_map)


def radar_context_from_features(
    features: EmFeatureVector,
    candidates: RadarCandidateSet,
    max_distance_m: float,
) -> RadarContext:
    return RadarContext(
        snr_linear=features.snr_linear,
        distance_m=features.range_m,
        max_distance_m=max_distance_m,
        incidence_angle_rad=abs(features.angle_rad),
        candidates=candidates,
    )


@dataclass(frozen=True)
class PipelineOutcome:
    decision: FusionDecision
    features: EmFeatureVector
    radar_candidates: RadarCandidateSet
    visual: VisualContext

    def to_document(self) -> dict:
        doc = self.decision.to_document()
        doc["inputs"] = {
            "features": self.features.to_document(),
            "radar_candidates": self.radar_candidates.to_document(),
            "visual_context": self.visual.to_document(),
        }
        return doc


def run_identification(
    features: EmFeatureVector,
    visual: VisualContext,
    store: MaterialStore,
    *,
    max_distance_m: float = 5.0,
    top_k: int = DEFAULT_TOP_K,
    tolerance_sigma: float = 2.0,
    fusion_config: FusionConfig | None = None,
) -> PipelineOutcome:
    """Match, prune the visual set against the measurement, and fuse."""
    radar_candidates = match(features.dielectric_constant, store, top_k)
    pruned = prune_visual(
        visual.candidates, features.dielectric_constant, store, tolerance_sigma
    )
    pruned_visual = VisualContext(
        luminance=visual.luminance,
        complexity=visual.complexity,
        vlm_entropy=visual.vlm_entropy,
        candidates=tuple(pruned),
    )
    radar_ctx = radar_context_from_features(features, radar_candidates, max_distance_m)
    decision = decide(pruned_visual, radar_ctx, fusion_config)
    return PipelineOutcome(decision, features, radar_candidates, pruned_visual)

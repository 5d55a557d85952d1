"""Command-line surface for batch processing and golden-file testing.

Subcommands: simulate, calibrate, extract, identify, fuse, pipeline.
All outputs are canonical JSON documents (binary only for radar cubes),
so identical inputs and seeds produce byte-identical files.

Exit codes partition the error classes:

    0  success
    2  input/output file error
    3  scene error (e.g. target outside the unambiguous range)
    4  format error (corrupt cube or malformed document)
    5  no target inside the gate
    6  calibration error
    7  domain error (invalid values, inversion failure)
    8  visual provider error
"""

import argparse
import sys

from . import calibration, cube_io, docio, knowledge, pipeline, signal_model, vlm
from .dielectric import EmFeatureVector
from .errors import (
    CalibrationError,
    DocumentError,
    DomainError,
    FormatError,
    NoTargetError,
    ProviderError,
    SceneError,
)
from .fusion import FusionConfig, RadarContext, VisualContext, decide
from .spectral import DEFAULT_THRESHOLD_DB

EXIT_OK = 0
EXIT_IO = 2
EXIT_SCENE = 3
EXIT_FORMAT = 4
EXIT_NO_TARGET = 5
EXIT_CALIBRATION = 6
EXIT_DOMAIN = 7
EXIT_PROVIDER = 8

_EXIT_BY_ERROR = (
    (SceneError, EXIT_SCENE, "scene"),
    (NoTargetError, EXIT_NO_TARGET, "no-target"),
    (CalibrationError, EXIT_CALIBRATION, "calibration"),
    (FormatError, EXIT_FORMAT, "format"),
    (DocumentError, EXIT_FORMAT, "format"),
    (ProviderError, EXIT_PROVIDER, "provider"),
    (DomainError, EXIT_DOMAIN, "domain"),
    (OSError, EXIT_IO, "io"),
)

_EPILOG = (
    "exit codes: 0 ok, 2 io, 3 scene, 4 format, 5 no-target, "
    "6 calibration, 7 domain, 8 provider"
)


def _load_profile(path) -> calibration.CalibrationProfile:
    return calibration.CalibrationProfile.from_document(docio.read_document(path))


def _load_store(path) -> knowledge.MaterialStore:
    return knowledge.default_store() if path is None else knowledge.load_store(path)


def _fusion_config(path) -> FusionConfig:
    if path is None:
        return FusionConfig()
    return FusionConfig.from_document(docio.read_document(path))


def _detect(cube, gate, threshold_db):
    from .spectral import detect_target, range_angle, range_doppler

    rd = range_doppler(cube)
    ra = range_angle(cube)
    return rd, ra, detect_target(rd, ra, gate, threshold_db)


def cmd_simulate(args) -> int:
    targets, config, geometry, noise, seed = cube_io.load_scene(args.scene)
    if args.seed is not None:
        seed = args.seed
    cube = signal_model.synthesize_frame(targets, config, geometry, noise, seed)
    cube_io.write_cube(args.output, cube)
    print(
        f"wrote {args.output}: {config.samples_per_chirp} samples x "
        f"{config.chirps_per_frame} chirps x {geometry.element_count} antennas"
    )
    return EXIT_OK


def cmd_calibrate(args) -> int:
    sphere_cube = cube_io.read_cube(args.sphere)
    if args.noise_power is not None:
        noise_power = args.noise_power
    elif args.noise_cube is not None:
        noise_power = calibration.estimate_noise_power(cube_io.read_cube(args.noise_cube))
    else:
        raise CalibrationError("provide --noise-power or --noise-cube")
    gate = (args.gate[0], args.gate[1])
    _, _, sphere_det = _detect(sphere_cube, gate, args.threshold_db)
    profile = calibration.calibrate_sphere(
        sphere_det, sphere_cube.geometry, sphere_cube.config, args.sphere_diameter, noise_power
    )
    plate_cube = cube_io.read_cube(args.plate)
    _, plate_ra, plate_det = _detect(plate_cube, gate, args.threshold_db)
    profile = calibration.calibrate_plate(
        plate_det, plate_ra, plate_cube.geometry, plate_cube.config, profile
    )
    docio.write_document(args.output, profile.to_document())
    print(f"wrote {args.output}: K={profile.system_constant_k:.6g}")
    return EXIT_OK


def cmd_extract(args) -> int:
    cube = cube_io.read_cube(args.cube)
    profile = _load_profile(args.profile)
    result = pipeline.extract_from_cube(
        cube, profile, (args.gate[0], args.gate[1]), args.threshold_db
    )
    docio.write_document(args.output, result.features.to_document())
    if args.debug:
        base = args.output.rsplit(".", 1)[0]
        docio.write_document(f"{base}.rd_map.json", result.rd_map.to_document())
        docio.write_document(f"{base}.ra_map.json", result.ra_map.to_document())
        docio.write_document(f"{base}.synthesis.json", result.synthesis.to_document())
        docio.write_document(f"{base}.prca.json", result.region.to_document())
    print(
        f"wrote {args.output}: eps_r={result.features.dielectric_constant:.4g} "
        f"snr={result.features.snr_db:.1f} dB"
    )
    return EXIT_OK


def cmd_identify(args) -> int:
    features = EmFeatureVector.from_document(docio.read_document(args.features))
    store = _load_store(args.store)
    candidates = knowledge.match(features.dielectric_constant, store, args.top_k)
    docio.write_document(args.output, candidates.to_document())
    print(f"wrote {args.output}: top={candidates.top[0]}")
    return EXIT_OK


def cmd_fuse(args) -> int:
    visual = VisualContext.from_document(docio.read_document(args.visual))
    radar = RadarContext.from_document(docio.read_document(args.radar))
    decision = decide(visual, radar, _fusion_config(args.fusion_config))
    docio.write_document(args.output, decision.to_document())
    print(f"wrote {args.output}: {decision.material} ({decision.mode})")
    return EXIT_OK


def cmd_pipeline(args) -> int:
    if (args.cube is None) == (args.scene is None):
        raise DomainError("provide exactly one of --cube or --scene")
    if args.cube is not None:
        cube = cube_io.read_cube(args.cube)
    else:
        targets, config, geometry, noise, seed = cube_io.load_scene(args.scene)
        if args.seed is not None:
            seed = args.seed
        cube = signal_model.synthesize_frame(targets, config, geometry, noise, seed)
    profile = _load_profile(args.profile)
    store = _load_store(args.store)
    provider_cfg = vlm.ProviderConfig.from_document(docio.read_document(args.provider))

    extraction = pipeline.extract_from_cube(
        cube, profile, (args.gate[0], args.gate[1]), args.threshold_db
    )
    visual = vlm.propose(vlm.VisualQuery(image_ref=args.image), provider_cfg)
    outcome = pipeline.run_identification(
        extraction.features,
        visual,
        store,
        max_distance_m=args.max_distance,
        top_k=args.top_k,
        tolerance_sigma=args.tolerance_sigma,
        fusion_config=_fusion_config(args.fusion_config),
    )
    docio.write_document(args.output, outcome.to_document())
    if args.debug:
        base = args.output.rsplit(".", 1)[0]
        docio.write_document(f"{base}.features.json", extraction.features.to_document())
        docio.write_document(f"{base}.synthesis.json", extraction.synthesis.to_document())
        docio.write_document(f"{base}.prca.json", extraction.region.to_document())
    print(f"wrote {args.output}: {outcome.decision.material} ({outcome.decision.mode})")
    return EXIT_OK


def _add_gate(parser):
    parser.add_argument(
        "--gate", nargs=2, type=float, metavar=("LO_M", "HI_M"), required=True,
        help="range gate in meters",
    )
    parser.add_argument(
        "--threshold-db", type=float, default=DEFAULT_THRESHOLD_DB,
        help="detection threshold above the map median (dB)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="radmat",
        description="FMCW radar material identification toolchain",
        epilog=_EPILOG,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="synthesize a radar cube from a scene document")
    p.add_argument("scene")
    p.add_argument("--output", "-o", required=True)
    p.add_argument("--seed", type=int, default=None, help="override the scene seed")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("calibrate", help="build a calibration profile from sphere and plate cubes")
    p.add_argument("--sphere", required=True, help="metal sphere cube")
    p.add_argument("--plate", required=True, help="smooth metal plate cube")
    p.add_argument("--sphere-diameter", type=float, required=True, help="meters")
    p.add_argument("--noise-cube", default=None, help="empty-scene cube for the noise floor")
    p.add_argument("--noise-power", type=float, default=None, help="direct noise power override (W)")
    _add_gate(p)
    p.add_argument("--output", "-o", required=True)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("extract", help="radar cube -> electromagnetic feature record")
    p.add_argument("cube")
    p.add_argument("--profile", required=True)
    _add_gate(p)
    p.add_argument("--output", "-o", required=True)
    p.add_argument("--debug", action="store_true", help="also dump maps, synthesis, region")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("identify", help="feature record -> ranked material candidates")
    p.add_argument("features")
    p.add_argument("--store", default=None, help="material store (default: built-in)")
    p.add_argument("--top-k", type=int, default=knowledge.DEFAULT_TOP_K)
    p.add_argument("--output", "-o", required=True)
    p.set_defaults(func=cmd_identify)

    p = sub.add_parser("fuse", help="visual + radar context documents -> decision")
    p.add_argument("--visual", required=True)
    p.add_argument("--radar", required=True)
    p.add_argument("--fusion-config", default=None)
    p.add_argument("--output", "-o", required=True)
    p.set_defaults(func=cmd_fuse)

    p = sub.add_parser("pipeline", help="full chain: extract, identify, propose, fuse")
    p.add_argument("--cube", default=None)
    p.add_argument("--scene", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--profile", required=True)
    p.add_argument("--store", default=None)
    p.add_argument("--provider", required=True, help="provider config document")
    p.add_argument("--image", required=True, help="image reference for the visual branch")
    _add_gate(p)
    p.add_argument("--max-distance", type=float, default=5.0)
    p.add_argument("--top-k", type=int, default=knowledge.DEFAULT_TOP_K)
    p.add_argument("--tolerance-sigma", type=float, default=2.0)
    p.add_argument("--fusion-config", default=None)
    p.add_argument("--output", "-o", required=True)
    p.add_argument("--debug", action="store_true")
    p.set_defaults(func=cmd_pipeline)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except tuple(cls for cls, _, _ in _EXIT_BY_ERROR) as exc:
        for cls, code, label in _EXIT_BY_ERROR:
            if isinstance(exc, cls):
                print(f"{label}: {exc}", file=sys.stderr)
                return code
        raise  # unreachable


if __name__ == "__main__":
    sys.exit(main())

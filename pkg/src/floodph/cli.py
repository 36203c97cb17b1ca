"""Command line surface: generate clouds, compute diagrams, compare, bench.

File formats:
  point clouds  binary FPC1 (magic "FPC1", little-endian u32 dim, u64 count,
                float64 row-major) for .fpc paths, otherwise whitespace-
                separated text with '#' comments, one point per line
  diagrams      JSON {"dims": {"0": [[birth, death], ...], ...}} with
                infinite deaths spelled "inf", bars sorted by (birth, death)

Settings resolve as flags > environment (FLOOD_ prefix) > defaults.
Exit codes: 0 ok, 2 usage, 3 data, 4 guard refusal.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import struct
import sys
import time

import numpy as np

from .datagen import gen_circle, gen_swisscheese, gen_torus
from .errors import DegeneracyError, GenerationError, GuardError, IntegrityError
from .filtration import (
    STAGE_DELAUNAY,
    STAGE_FILTRATION,
    STAGE_LANDMARKS,
    STAGE_MASKING,
    FloodConfig,
    build_flood_filtration,
)
from .metrics import bottleneck_distance
from .oracles import cech_filtration
from .persistence import PersistenceDiagram, boundary_matrix, reduce_and_extract

STAGE_PH = "PH computation"
STAGE_OTHER = "Other"
STAGES = (
    STAGE_LANDMARKS,
    STAGE_DELAUNAY,
    STAGE_MASKING,
    STAGE_FILTRATION,
    STAGE_PH,
    STAGE_OTHER,
)

EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_GUARD = 4

_MAGIC = b"FPC1"


def write_cloud(path: str, points: np.ndarray) -> None:
    pts = np.ascontiguousarray(points, dtype=np.float64)
    if path.endswith(".fpc"):
        with open(path, "wb") as fh:
            fh.write(_MAGIC)
            fh.write(struct.pack("<IQ", pts.shape[1], pts.shape[0]))
            fh.write(pts.tobytes())
    else:
        with open(path, "w") as fh:
            for row in pts:
                fh.write(" ".join("%.17g" % c for c in row))
                fh.write("\n")


def read_cloud(path: str) -> np.ndarray:
    with open(path, "rb") as fh:
        if fh.read(4) == _MAGIC:
            dim, count = struct.unpack("<IQ", fh.read(12))
            raw = fh.read()
            if len(raw) != 8 * dim * count:
                raise IntegrityError(f"truncated point file {path}")
            data = np.frombuffer(raw, dtype="<f8")
            return data.reshape(count, dim).copy()
    rows = []
    with open(path) as fh:
        for line in fh:
            bare = line.split("#", 1)[0].strip()
            if bare:
                rows.append([float(tok) for tok in bare.split()])
    if not rows:
        raise IntegrityError(f"no points in {path}")
    return np.array(rows, dtype=np.float64)


def write_diagram(path: str, dgm: PersistenceDiagram) -> None:
    # one bar per line; repr round-trips float64 exactly
    with open(path, "w") as fh:
        fh.write('{\n "dims": {\n')
        keys = sorted(dgm.dimensions())
        for pos, k in enumerate(keys):
            bars = sorted(dgm.in_dim(k))
            rows = ",\n".join(
                "   [%s, %s]" % (repr(b), '"inf"' if math.isinf(d) else repr(d))
                for b, d in bars
            )
            body = "[\n%s\n  ]" % rows if rows else "[]"
            tail = "," if pos + 1 < len(keys) else ""
            fh.write('  "%d": %s%s\n' % (k, body, tail))
        fh.write(" }\n}\n")


def read_diagram(path: str) -> PersistenceDiagram:
    with open(path) as fh:
        payload = json.load(fh)
    bars = {}
    for key, pairs in payload["dims"].items():
        bars[int(key)] = [
            (float(b), math.inf if d == "inf" else float(d)) for b, d in pairs
        ]
    return PersistenceDiagram(bars)


def _env(name: str, cast, fallback):
    raw = os.environ.get("FLOOD_" + name)
    if raw is None:
        return fallback
    try:
        return cast(raw)
    except ValueError:
        raise ValueError(f"bad FLOOD_{name}={raw!r}") from None


def _resolve(flag_value, env_name: str, cast, default):
    if flag_value is not None:
        return flag_value
    return _env(env_name, cast, default)


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def _checksum(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def cmd_gen(args) -> int:
    seed = _resolve(args.seed, "SEED", int, 0)
    out = args.out if args.out is not None else args.shape + ".fpc"
    voids = None
    if args.shape == "circle":
        cloud = gen_circle(args.n, mode=args.mode, seed=seed)
    elif args.shape == "swisscheese":
        cloud, voids = gen_swisscheese(
            args.n,
            args.holes,
            box=args.box,
            radius_range=(args.radius_min, args.radius_max),
            seed=seed,
        )
    else:
        cloud = gen_torus(args.n, major=args.major, minor=args.minor, seed=seed)
    write_cloud(out, cloud.points)
    if voids is not None:
        sidecar = out + ".voids.json"
        with open(sidecar, "w") as fh:
            json.dump(
                [{"center": list(c), "radius": r} for c, r in voids], fh, indent=1
            )
            fh.write("\n")
        _log(f"voids -> {sidecar}")
    n, d = cloud.points.shape
    print(f"n={n} d={d} sha256={_checksum(out)}")
    return 0


def _flood_config(args) -> FloodConfig:
    return FloodConfig(
        grid_resolution=_resolve(args.grid, "GRID", int, 20),
        batch_size=_resolve(args.batch, "BATCH", int, 256),
        backend=_resolve(args.backend, "BACKEND", str, "masked-batch"),
        fps_start=_resolve(args.fps_start, "FPS_START", int, 0),
        threads=_resolve(args.threads, "THREADS", int, os.cpu_count()),
    )


def _run_pipeline(points: np.ndarray, landmarks, config: FloodConfig):
    """Filtration plus reduction, returning (diagram, stage timings dict)."""
    t0 = time.perf_counter()
    fc = build_flood_filtration(points, landmarks, config)
    t1 = time.perf_counter()
    dgm = reduce_and_extract(boundary_matrix(fc), fc)
    t2 = time.perf_counter()
    timings = dict(fc.meta["timings"])
    timings[STAGE_PH] = t2 - t1
    timings[STAGE_OTHER] = max(0.0, (t2 - t0) - sum(timings.values()))
    for note in fc.meta.get("warnings", []):
        _log(f"warning: {note}")
    return dgm, timings


def _log_stages(timings: dict) -> None:
    total = sum(timings.values()) or 1.0
    for stage in STAGES:
        seconds = timings.get(stage, 0.0)
        _log(f"{stage:<17} {seconds:9.3f} s {100.0 * seconds / total:6.1f}%")


def cmd_flood(args) -> int:
    points = read_cloud(args.input)
    config = _flood_config(args)
    if args.strict:
        _log("strict: exact evaluation (always on)")
    if args.landmark_file is not None:
        landmarks = read_cloud(args.landmark_file)
    else:
        landmarks = _resolve(args.landmarks, "LANDMARKS", int, 2000)
        if landmarks > points.shape[0]:
            raise ValueError(
                f"requested {landmarks} landmarks from {points.shape[0]} points"
            )
    dgm, timings = _run_pipeline(points, landmarks, config)
    _log_stages(timings)
    write_diagram(args.out, dgm)
    _log(f"diagram -> {args.out}")
    return 0


def cmd_cech(args) -> int:
    points = read_cloud(args.input)
    max_dim = args.max_dim
    if max_dim is None:
        max_dim = min(points.shape[1], 3)
    fc = cech_filtration(points, max_dim=max_dim)
    dgm = reduce_and_extract(boundary_matrix(fc), fc)
    write_diagram(args.out, dgm)
    _log(f"diagram -> {args.out}")
    return 0


def cmd_bottleneck(args) -> int:
    a = read_diagram(args.a)
    b = read_diagram(args.b)
    print("%.17g" % bottleneck_distance(a, b, args.dim))
    return 0


def cmd_bench(args) -> int:
    seed = _resolve(args.seed, "SEED", int, 0)
    if args.shape == "circle":
        cloud = gen_circle(args.points, seed=seed)
    elif args.shape == "swisscheese":
        cloud, _ = gen_swisscheese(args.points, args.holes, seed=seed)
    else:
        cloud = gen_torus(args.points, seed=seed)
    config = _flood_config(args)
    landmarks = _resolve(args.landmarks, "LANDMARKS", int, 1000)
    totals = {stage: 0.0 for stage in STAGES}
    for _ in range(args.repeats):
        _, timings = _run_pipeline(cloud.points, landmarks, config)
        for stage in STAGES:
            totals[stage] += timings.get(stage, 0.0)
    means = {stage: totals[stage] / args.repeats for stage in STAGES}
    total = sum(means.values()) or 1.0
    print("stage,seconds,percent")
    for stage in STAGES:
        print(f"{stage},{means[stage]:.6f},{100.0 * means[stage] / total:.3f}")
    return 0


class _Parser(argparse.ArgumentParser):
    """Argparse that fails with a single parseable line instead of usage text."""

    def error(self, message):
        print(f"error[usage]: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _add_flood_flags(sub) -> None:
    sub.add_argument("--grid", type=int, help="barycentric grid resolution")
    sub.add_argument("--batch", type=int, help="simplices per masking batch")
    sub.add_argument("--backend", choices=["masked-batch", "kdtree"])
    sub.add_argument("--fps-start", type=int, help="index of the first FPS pick")
    sub.add_argument("--threads", type=int, help="filtration worker threads")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="floodph", description=__doc__.splitlines()[0])
    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser("gen", help="write a synthetic point cloud")
    gen.add_argument("shape", choices=["circle", "swisscheese", "torus"])
    gen.add_argument("--n", type=int, required=True, help="point count")
    gen.add_argument("--seed", type=int)
    gen.add_argument("--out", help="output path (.fpc for binary)")
    gen.add_argument("--mode", choices=["uniform-angle", "random"], default="uniform-angle")
    gen.add_argument("--holes", type=int, default=10, help="swisscheese void count")
    gen.add_argument("--box", type=float, default=5.0)
    gen.add_argument("--radius-min", type=float, default=0.1)
    gen.add_argument("--radius-max", type=float, default=0.5)
    gen.add_argument("--major", type=float, default=2.0)
    gen.add_argument("--minor", type=float, default=0.5)
    gen.set_defaults(func=cmd_gen)

    flood = commands.add_parser("flood", help="flood filtration diagram")
    flood.add_argument("--input", required=True, help="point cloud file")
    pick = flood.add_mutually_exclusive_group()
    pick.add_argument("--landmarks", type=int, help="FPS landmark count")
    pick.add_argument("--landmark-file", help="explicit landmark cloud")
    flood.add_argument("--strict", action="store_true",
                       help="forbid approximate shortcuts (exact is the default)")
    flood.add_argument("--out", default="dgm.json")
    _add_flood_flags(flood)
    flood.set_defaults(func=cmd_flood)

    cech = commands.add_parser("cech", help="brute-force oracle diagram")
    cech.add_argument("--input", required=True)
    cech.add_argument("--max-dim", type=int)
    cech.add_argument("--out", default="dgm.json")
    cech.set_defaults(func=cmd_cech)

    bottleneck = commands.add_parser("bottleneck", help="distance between diagrams")
    bottleneck.add_argument("a")
    bottleneck.add_argument("b")
    bottleneck.add_argument("--dim", type=int, default=0)
    bottleneck.set_defaults(func=cmd_bottleneck)

    bench = commands.add_parser("bench", help="stage timing CSV")
    bench.add_argument("--shape", choices=["circle", "swisscheese", "torus"],
                       default="swisscheese")
    bench.add_argument("--points", type=int, required=True)
    bench.add_argument("--landmarks", type=int)
    bench.add_argument("--repeats", type=int, default=1)
    bench.add_argument("--seed", type=int)
    bench.add_argument("--holes", type=int, default=10)
    _add_flood_flags(bench)
    bench.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GuardError as exc:
        print(f"error[guard]: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (DegeneracyError, GenerationError, IntegrityError, OSError) as exc:
        print(f"error[data]: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"error[usage]: {exc}", file=sys.stderr)
        return EXIT_USAGE

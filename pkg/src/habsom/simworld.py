"""Deterministic 2-D corridor stand-in for the robot: line-segment
environments, a scripted path and a 16-beam sonar model.

Worlds are loaded from a line-oriented text format:

    # comment
    segment x1 y1 x2 y2 [tag]
    path x y
    start x y heading
    param key value

Distances are metres, angles radians.  ``path`` records list the
vertices of the scripted route polyline in order.  Segment tags mark
features (``wall``, ``door``, ``crack``, ``box``); door instances can be
distinguished with a suffix, e.g. ``door:2``.  Segments tagged ``box``
sit below the sonar plane and are never raycast.

``param door_open <id|true>`` opens the matching door instance(s): the
instance's closed geometry is replaced by a recessed opening of depth
``param door_open_depth`` (default 4.5 m) between the two points where
the door attaches to the wall, so the sonar sees a deep gap where the
closed leaf used to be.

Sonar: 16 beams at bearings heading + k * 22.5 deg, ranges thresholded
at R_MAX = 4 m and inverted, so input[i] = 1 - min(range, 4) / 4 and
closer surfaces give larger components.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path as _FsPath

import numpy as np

__all__ = [
    "R_MAX", "N_BEAMS", "Pose", "ScanSample", "World", "WorldFormatError",
    "raycast", "sonar_scan", "walk_path", "load_world", "parse_world",
    "load_builtin", "builtin_names", "feature_intervals",
]

R_MAX = 4.0
N_BEAMS = 16
_BEAM_STEP = 2.0 * math.pi / N_BEAMS
DEFAULT_OPEN_DEPTH = 4.5


class WorldFormatError(ValueError):
    """Raised for malformed world files, naming the offending line."""


def _normalise_angle(a: float) -> float:
    """Map an angle to (-pi, pi]."""
    a = math.fmod(a, 2.0 * math.pi)
    if a <= -math.pi:
        a += 2.0 * math.pi
    elif a > math.pi:
        a -= 2.0 * math.pi
    return a


@dataclass(frozen=True)
class Pose:
    """Robot position and heading; heading normalised to (-pi, pi]."""

    x: float
    y: float
    heading: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "heading", _normalise_angle(self.heading))


@dataclass(frozen=True)
class ScanSample:
    """One sonar presentation along a trial.

    ranges holds the effective per-beam ranges (after smoothing and the
    4 m threshold); input is the inverted, normalised vector fed to the
    novelty filter: input[i] = 1 - ranges[i] / R_MAX.
    """

    arc_position: float
    pose: Pose
    ranges: np.ndarray
    input: np.ndarray


class World:
    """Immutable 2-D environment: tagged segments plus a scripted path."""

    def __init__(self, segments, tags, path, start: Pose, name: str = "world",
                 params: dict | None = None):
        segments = np.asarray(segments, dtype=float).reshape(-1, 4)
        if segments.shape[0] < 1:
            raise ValueError("a world needs at least one segment")
        if not np.all(np.isfinite(segments)):
            raise ValueError("segment coordinates must be finite")
        lengths = np.hypot(segments[:, 2] - segments[:, 0], segments[:, 3] - segments[:, 1])
        if np.any(lengths <= 0.0):
            raise ValueError("zero-length segment")
        self.segments = segments
        self.tags = list(tags)
        if len(self.tags) != segments.shape[0]:
            raise ValueError("one tag entry per segment required")
        self.path = np.asarray(path, dtype=float).reshape(-1, 2) if path is not None else None
        self.start = start
        self.name = name
        self.params = dict(params or {})
        # box segments sit below the sonar plane
        self._sonar_mask = np.array([t is None or not _tag_class(t) == "box" for t in self.tags])

    @property
    def sonar_segments(self) -> np.ndarray:
        return self.segments[self._sonar_mask]

    def without_tag(self, tag: str) -> "World":
        """Copy of the world with all segments of a tag (class or full id) removed."""
        keep = [i for i, t in enumerate(self.tags) if not _tag_matches(t, tag)]
        if not keep:
            raise ValueError(f"removing tag {tag!r} would empty the world")
        return World(self.segments[keep], [self.tags[i] for i in keep],
                     self.path, self.start, self.name, self.params)

    def path_length(self) -> float:
        if self.path is None or len(self.path) < 2:
            return 0.0
        d = np.diff(self.path, axis=0)
        return float(np.hypot(d[:, 0], d[:, 1]).sum())


def _tag_class(tag: str | None) -> str | None:
    return None if tag is None else tag.split(":", 1)[0]


def _tag_matches(tag: str | None, wanted: str) -> bool:
    if tag is None:
        return False
    return tag == wanted or _tag_class(tag) == wanted


def raycast(world: World, origin, bearing: float, segments: np.ndarray | None = None) -> float:
    """Distance from origin along bearing to the nearest segment, or +inf.

    origin may be a Pose or an (x, y) pair; bearing is absolute, in
    radians.  Box-tagged segments are ignored (below the sonar plane).
    """
    if segments is None:
        segments = world.sonar_segments
    x = origin.x if isinstance(origin, Pose) else float(origin[0])
    y = origin.y if isinstance(origin, Pose) else float(origin[1])
    ux, uy = math.cos(bearing), math.sin(bearing)

    ax, ay = segments[:, 0], segments[:, 1]
    dx, dy = segments[:, 2] - ax, segments[:, 3] - ay
    denom = ux * dy - uy * dx
    ok = np.abs(denom) > 1e-12
    with np.errstate(divide="ignore", invalid="ignore"):
        wx, wy = ax - x, ay - y
        t = np.where(ok, (wx * dy - wy * dx) / denom, np.inf)
        s = np.where(ok, (wx * uy - wy * ux) / denom, np.inf)
    hit = ok & (t >= 0.0) & (s >= 0.0) & (s <= 1.0)
    if not hit.any():
        return math.inf
    return float(t[hit].min())


def sonar_scan(world: World, pose: Pose) -> ScanSample:
    """Sixteen-beam scan from a pose, thresholded at R_MAX and inverted.

    Beams point at heading + k * 22.5 deg (counterclockwise) for
    k = 0..15.  Surfaces beyond R_MAX, and beams that hit nothing, read
    R_MAX and therefore input 0.
    """
    ranges = _scan_ranges(world, pose)
    return _make_sample(0.0, pose, ranges)


def _scan_ranges(world: World, pose: Pose) -> np.ndarray:
    segs = world.sonar_segments
    out = np.empty(N_BEAMS)
    for k in range(N_BEAMS):
        r = raycast(world, pose, pose.heading + k * _BEAM_STEP, segs)
        out[k] = min(r, R_MAX)
    return out


def _make_sample(arc: float, pose: Pose, ranges: np.ndarray) -> ScanSample:
    ranges = np.minimum(np.maximum(ranges, 0.0), R_MAX)
    return ScanSample(arc, pose, ranges, 1.0 - ranges / R_MAX)


def walk_path(world: World, length: float = 10.0, step: float = 0.1,
              smoothing_window: int = 3, noise: float = 0.0,
              rng: np.random.Generator | None = None) -> list[ScanSample]:
    """Scans every `step` metres along the world's path polyline.

    Produces int(length / step) + 1 samples at arc positions 0, step,
    ..., length.  Per-beam ranges are passed through a trailing moving
    average over the last smoothing_window samples (window 1 disables
    smoothing).  Optional uniform range noise of the given amplitude is
    added before smoothing; it requires an rng and is off by default.
    """
    if world.path is None or len(world.path) < 2:
        raise ValueError(f"world {world.name!r} has no path polyline")
    if step <= 0:
        raise ValueError("step must be positive")
    if smoothing_window < 1:
        raise ValueError("smoothing window must be >= 1")
    if noise > 0.0 and rng is None:
        raise ValueError("range noise requires an rng")
    total = world.path_length()
    if total + 1e-9 < length:
        raise ValueError(
            f"path of world {world.name!r} is {total:.3f} m, shorter than the "
            f"requested {length} m")

    n = int(round(length / step)) + 1
    arcs = np.arange(n) * step
    poses = [_pose_at(world.path, a) for a in arcs]
    raw = np.stack([_scan_ranges(world, p) for p in poses])
    if noise > 0.0:
        raw = raw + rng.uniform(-noise, noise, size=raw.shape)
        raw = np.minimum(np.maximum(raw, 0.0), R_MAX)
    smoothed = _trailing_mean(raw, smoothing_window)
    return [_make_sample(float(a), p, r) for a, p, r in zip(arcs, poses, smoothed)]


def _pose_at(path: np.ndarray, arc: float) -> Pose:
    """Position and tangent heading at an arc length along the polyline."""
    seg = np.diff(path, axis=0)
    seg_len = np.hypot(seg[:, 0], seg[:, 1])
    cum = np.concatenate([[0.0], np.cumsum(seg_len)])
    arc = min(max(arc, 0.0), cum[-1])
    i = int(np.searchsorted(cum[1:], arc, side="right"))
    i = min(i, len(seg) - 1)
    frac = (arc - cum[i]) / seg_len[i]
    x, y = path[i] + frac * seg[i]
    heading = math.atan2(seg[i, 1], seg[i, 0])
    return Pose(float(x), float(y), heading)


def _trailing_mean(rows: np.ndarray, window: int) -> np.ndarray:
    if window == 1:
        return rows
    out = np.empty_like(rows)
    for i in range(rows.shape[0]):
        lo = max(0, i - window + 1)
        out[i] = rows[lo:i + 1].mean(axis=0)
    return out


# ---------------------------------------------------------------------------
# world file parsing

def parse_world(text: str, name: str = "world") -> World:
    """Parse the world file format; see the module docstring."""
    segments, tags, path, start, params = [], [], [], None, {}
    for lineno, rawline in enumerate(text.splitlines(), start=1):
        line = rawline.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        kind, args = fields[0], fields[1:]
        try:
            if kind == "segment":
                if len(args) not in (4, 5):
                    raise ValueError("expected: segment x1 y1 x2 y2 [tag]")
                segments.append([float(v) for v in args[:4]])
                tags.append(args[4] if len(args) == 5 else None)
            elif kind == "path":
                if len(args) != 2:
                    raise ValueError("expected: path x y")
                path.append([float(args[0]), float(args[1])])
            elif kind == "start":
                if len(args) != 3:
                    raise ValueError("expected: start x y heading")
                start = Pose(float(args[0]), float(args[1]), float(args[2]))
            elif kind == "param":
                if len(args) != 2:
                    raise ValueError("expected: param key value")
                params[args[0]] = args[1]
            else:
                raise ValueError(f"unknown record {kind!r}")
        except ValueError as exc:
            raise WorldFormatError(f"line {lineno}: {exc} (in {rawline.strip()!r})") from None
    if not segments:
        raise WorldFormatError("world file defines no segments")
    if start is None and path:
        p0 = _pose_at(np.asarray(path, dtype=float), 0.0)
        start = p0
    name = params.get("name", name)
    world = World(segments, tags, path if path else None, start, name, params)
    door_open = params.get("door_open", "false")
    if door_open not in ("false", "none"):
        depth = float(params.get("door_open_depth", DEFAULT_OPEN_DEPTH))
        world = _open_doors(world, door_open, depth)
    return world


def load_world(source) -> World:
    """Load a world from a filesystem path."""
    p = _FsPath(source)
    return parse_world(p.read_text(), name=p.stem)


_BUILTIN_FILES = {
    "A": "corridor_a.world",
    "B": "corridor_b.world",
    "A*": "corridor_a_open.world",
    "CONTROL": "control.world",
}


def builtin_names() -> list[str]:
    return list(_BUILTIN_FILES)


def load_builtin(name: str) -> World:
    """Load one of the shipped environments: A, B, A* or CONTROL."""
    key = name.upper()
    if key == "A_STAR" or key == "ASTAR":
        key = "A*"
    if key not in _BUILTIN_FILES:
        raise ValueError(f"unknown builtin world {name!r}; known: {builtin_names()}")
    from importlib.resources import files
    text = files("habsom.worlds").joinpath(_BUILTIN_FILES[key]).read_text()
    return parse_world(text, name=key)


def _open_doors(world: World, which: str, depth: float) -> World:
    """Open one or all door instances.

    An instance's closed geometry (leaf plus any recess walls) is
    replaced by a deep rectangular opening: the two mouth corners, where
    the instance attaches to the rest of the world, are kept, and the
    doorway between them is recessed `depth` metres away from the path.
    """
    if world.path is None:
        raise WorldFormatError("door_open requires a path to orient the opening")
    instances = sorted({t for t in world.tags
                        if t is not None and _tag_class(t) == "door"})
    if which != "true":
        instances = [t for t in instances if t == which]
        if not instances:
            raise WorldFormatError(f"door_open names unknown door instance {which!r}")
    segments = [seg for seg in world.segments]
    tags = list(world.tags)
    for inst in instances:
        idx = [i for i, t in enumerate(tags) if t == inst]
        inst_pts = [p for i in idx for p in (tuple(segments[i][:2]), tuple(segments[i][2:]))]
        other_pts = {p for i, t in enumerate(tags) if t != inst
                     for p in (tuple(segments[i][:2]), tuple(segments[i][2:]))}
        mouth = [np.asarray(p) for p in dict.fromkeys(inst_pts)
                 if any(np.hypot(p[0] - q[0], p[1] - q[1]) < 1e-9 for q in other_pts)]
        if len(mouth) != 2:
            raise WorldFormatError(
                f"door instance {inst!r} must attach to the wall at exactly two points")
        mid = (mouth[0] + mouth[1]) / 2
        near = _closest_on_polyline(world.path, mid)
        direction = mid - near
        norm = float(np.hypot(*direction))
        if norm < 1e-9:
            raise WorldFormatError(f"door instance {inst!r} lies on the path")
        n = direction / norm
        back0, back1 = mouth[0] + n * depth, mouth[1] + n * depth
        segments = [s for i, s in enumerate(segments) if i not in idx]
        tags = [t for i, t in enumerate(tags) if i not in idx]
        for a, b in ((mouth[0], back0), (back0, back1), (back1, mouth[1])):
            segments.append(np.array([a[0], a[1], b[0], b[1]]))
            tags.append(inst)
    return World(np.stack(segments), tags, world.path, world.start, world.name, world.params)


def _closest_on_polyline(path: np.ndarray, point: np.ndarray) -> np.ndarray:
    best, best_d = None, math.inf
    for a, b in zip(path[:-1], path[1:]):
        ab = b - a
        denom = float(ab @ ab)
        t = 0.0 if denom == 0 else float(np.clip((point - a) @ ab / denom, 0.0, 1.0))
        q = a + t * ab
        d = float(np.hypot(*(point - q)))
        if d < best_d:
            best, best_d = q, d
    return best


def _dist_to_polyline(path: np.ndarray, point: np.ndarray) -> float:
    q = _closest_on_polyline(path, point)
    return float(np.hypot(*(point - q)))


def feature_span(world: World, tag: str) -> tuple[float, float]:
    """Arc interval alongside a tagged feature.

    Projects every endpoint of the tag's segments onto the path and
    returns the [min, max] arc positions, i.e. the stretch of the route
    that runs past the feature itself (narrower than the stretch from
    which the feature is merely visible; see feature_intervals).
    """
    if world.path is None:
        raise ValueError(f"world {world.name!r} has no path")
    pts = [np.asarray(p, dtype=float)
           for seg, t in zip(world.segments, world.tags) if _tag_matches(t, tag)
           for p in (seg[:2], seg[2:])]
    if not pts:
        raise ValueError(f"world {world.name!r} has no segments tagged {tag!r}")
    # use the mouth-side endpoints (those on the wall line the path runs
    # along), not the recessed corners, which can sit closer to another
    # stretch of a bending path
    dists = [_dist_to_polyline(world.path, p) for p in pts]
    lim = min(dists) + 0.5
    arcs = [_arc_of_closest(world.path, p) for p, d in zip(pts, dists) if d <= lim]
    return (min(arcs), max(arcs))


def _arc_of_closest(path: np.ndarray, point: np.ndarray) -> float:
    best_arc, best_d, arc0 = 0.0, math.inf, 0.0
    for a, b in zip(path[:-1], path[1:]):
        ab = b - a
        denom = float(ab @ ab)
        t = 0.0 if denom == 0 else float(np.clip((point - a) @ ab / denom, 0.0, 1.0))
        q = a + t * ab
        d = float(np.hypot(*(point - q)))
        if d < best_d:
            best_d = d
            best_arc = arc0 + t * math.sqrt(denom)
        arc0 += math.sqrt(denom)
    return best_arc


def feature_intervals(world: World, tag: str, length: float = 10.0,
                      step: float = 0.1, smoothing_window: int = 3) -> list[tuple[float, float]]:
    """Arc intervals along the path where a feature influences the scans.

    A sample belongs to the feature's region when its input vector
    differs from the input the same pose would produce with every
    segment of that tag (class or full instance id) removed.  Returns
    merged [lo, hi] arc intervals; empty if the feature is never
    perceptible.
    """
    with_feature = walk_path(world, length, step, smoothing_window)
    without = walk_path(world.without_tag(tag), length, step, smoothing_window)
    flags = [not np.array_equal(a.input, b.input)
             for a, b in zip(with_feature, without)]
    intervals, lo = [], None
    for smp, flag in zip(with_feature, flags):
        if flag and lo is None:
            lo = smp.arc_position
        elif not flag and lo is not None:
            intervals.append((lo, prev))
            lo = None
        prev = smp.arc_position
    if lo is not None:
        intervals.append((lo, with_feature[-1].arc_position))
    return intervals

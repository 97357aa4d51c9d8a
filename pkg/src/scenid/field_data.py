"""Drive-log data model, text parser, and timeline normalization.

A drive log is a time-ordered sequence of frames, each holding the ego
state plus the object list reported by the vehicle sensors at that
instant. The text format is line oriented (one frame per line) so logs
stream well and diff cleanly:

    t=<float> ego=<speed>,<lane_id>,<lat_offset>,<lane_width> \
        obj=<id>,<dx>,<dy>,<dv>[,<lane_offset>[,<lat_in_lane>]] obj=...

Tokens are whitespace separated, fields within a token comma separated,
``#`` starts a comment line. Optional object fields may only be omitted
from the right. All units are SI (m, m/s, s); dy and lane_offset are
positive toward the left.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable

DEFAULT_GAP_TOLERANCE_S = 0.5


class DriveLogError(Exception):
    """Base class for drive-log parsing failures."""


class LogSyntaxError(DriveLogError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class NonMonotonicTimestamp(DriveLogError):
    def __init__(self, line_no: int, t: float, previous: float):
        super().__init__(
            f"line {line_no}: timestamp {t!r} does not increase over {previous!r}"
        )
        self.line_no = line_no


class EmptyLog(DriveLogError):
    def __init__(self, source: str):
        super().__init__(f"no frames in {source}")


@dataclass(frozen=True)
class EgoState:
    """Ego vehicle state as reported by the lane-detection stack.

    lateral_offset_in_lane is the signed distance of the vehicle center
    from the current lane center, positive toward the left marking.
    """

    speed: float
    lane_id: int
    lateral_offset_in_lane: float
    lane_width: float


@dataclass(frozen=True)
class ObjectState:
    """One tracked object, positioned relative to the ego vehicle.

    lane_offset (object lane relative to the ego lane: -1 right adjacent,
    0 same, +1 left adjacent) and lateral_offset_in_lane are optional;
    production sensor data typically carries neither for objects.
    """

    track_id: int
    dx: float
    dy: float
    dv: float
    lane_offset: int | None = None
    lateral_offset_in_lane: float | None = None


@dataclass(frozen=True)
class Frame:
    t: float
    ego: EgoState
    objects: tuple[ObjectState, ...] = ()


@dataclass(frozen=True)
class DriveLog:
    """Time-ordered frames plus the nominal sample period and a source tag."""

    frames: tuple[Frame, ...]
    sample_period: float
    meta: str = "<memory>"

    @property
    def span(self) -> tuple[float, float]:
        return self.frames[0].t, self.frames[-1].t


def _parse_float(text: str, line_no: int, what: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise LogSyntaxError(line_no, f"bad {what} {text!r}") from None


def _parse_int(text: str, line_no: int, what: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise LogSyntaxError(line_no, f"bad {what} {text!r}") from None


def _parse_ego(body: str, line_no: int) -> EgoState:
    parts = body.split(",")
    if len(parts) != 4:
        raise LogSyntaxError(line_no, f"ego token needs 4 fields, got {len(parts)}")
    ego = EgoState(
        speed=_parse_float(parts[0], line_no, "ego speed"),
        lane_id=_parse_int(parts[1], line_no, "ego lane_id"),
        lateral_offset_in_lane=_parse_float(parts[2], line_no, "ego lateral offset"),
        lane_width=_parse_float(parts[3], line_no, "ego lane width"),
    )
    if ego.speed < 0:
        raise LogSyntaxError(line_no, f"negative ego speed {ego.speed!r}")
    if ego.lane_width <= 0:
        raise LogSyntaxError(line_no, f"non-positive lane width {ego.lane_width!r}")
    if abs(ego.lateral_offset_in_lane) > ego.lane_width:
        raise LogSyntaxError(
            line_no,
            f"ego lateral offset {ego.lateral_offset_in_lane!r} exceeds lane width",
        )
    return ego


def _parse_object(body: str, line_no: int) -> ObjectState:
    parts = body.split(",")
    if not 4 <= len(parts) <= 6:
        raise LogSyntaxError(line_no, f"obj token needs 4..6 fields, got {len(parts)}")
    return ObjectState(
        track_id=_parse_int(parts[0], line_no, "track id"),
        dx=_parse_float(parts[1], line_no, "dx"),
        dy=_parse_float(parts[2], line_no, "dy"),
        dv=_parse_float(parts[3], line_no, "dv"),
        lane_offset=_parse_int(parts[4], line_no, "lane_offset") if len(parts) > 4 else None,
        lateral_offset_in_lane=(
            _parse_float(parts[5], line_no, "lateral offset") if len(parts) > 5 else None
        ),
    )


def _parse_frame(line: str, line_no: int) -> Frame:
    t: float | None = None
    ego: EgoState | None = None
    objects: list[ObjectState] = []
    seen_ids: set[int] = set()
    for token in line.split():
        key, sep, body = token.partition("=")
        if not sep:
            raise LogSyntaxError(line_no, f"token {token!r} is not key=value")
        if key == "t":
            t = _parse_float(body, line_no, "timestamp")
        elif key == "ego":
            ego = _parse_ego(body, line_no)
        elif key == "obj":
            obj = _parse_object(body, line_no)
            if obj.track_id in seen_ids:
                raise LogSyntaxError(line_no, f"duplicate track id {obj.track_id}")
            seen_ids.add(obj.track_id)
            objects.append(obj)
        else:
            raise LogSyntaxError(line_no, f"unknown token {key!r}")
    if t is None:
        raise LogSyntaxError(line_no, "missing t token")
    if ego is None:
        raise LogSyntaxError(line_no, "missing ego token")
    return Frame(t=t, ego=ego, objects=tuple(objects))


def _nominal_sample_period(times: list[float]) -> float:
    if len(times) < 2:
        return 0.0
    gaps = sorted(times[i + 1] - times[i] for i in range(len(times) - 1))
    return gaps[len(gaps) // 2]


def parse_drive_log(text: str | Iterable[str], source: str | None = None) -> DriveLog:
    """Parse the line-oriented log format into a strictly time-ordered DriveLog.

    Accepts a string or an iterable of lines (e.g. an open file).
    Raises LogSyntaxError / NonMonotonicTimestamp with 1-based line
    numbers and EmptyLog when no frame line is present.
    """
    lines = text.splitlines() if isinstance(text, str) else text
    frames: list[Frame] = []
    meta = source
    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if meta is None and line[1:].strip().startswith("source:"):
                meta = line[1:].split(":", 1)[1].strip()
            continue
        frame = _parse_frame(line, line_no)
        if frames and frame.t <= frames[-1].t:
            raise NonMonotonicTimestamp(line_no, frame.t, frames[-1].t)
        frames.append(frame)
    if meta is None:
        meta = "<memory>"
    if not frames:
        raise EmptyLog(meta)
    times = [f.t for f in frames]
    return DriveLog(frames=tuple(frames), sample_period=_nominal_sample_period(times), meta=meta)


def serialize_drive_log(log: DriveLog) -> str:
    """Render a DriveLog back to its text form; parse(serialize(log)) == log."""
    out = [f"# source: {log.meta}"]
    for frame in log.frames:
        ego = frame.ego
        tokens = [
            f"t={frame.t!r}",
            f"ego={ego.speed!r},{ego.lane_id},{ego.lateral_offset_in_lane!r},{ego.lane_width!r}",
        ]
        for obj in frame.objects:
            fields = [repr(obj.dx), repr(obj.dy), repr(obj.dv)]
            if obj.lane_offset is not None:
                fields.append(str(obj.lane_offset))
                if obj.lateral_offset_in_lane is not None:
                    fields.append(repr(obj.lateral_offset_in_lane))
            tokens.append(f"obj={obj.track_id}," + ",".join(fields))
        out.append(" ".join(tokens))
    return "\n".join(out) + "\n"


def normalize_timeline(
    log: DriveLog, gap_tolerance: float = DEFAULT_GAP_TOLERANCE_S
) -> list[DriveLog]:
    """Split a log at inter-frame gaps larger than gap_tolerance.

    No frame is dropped or resampled; detectors run on native timestamps
    and the matcher never bridges a gap. Returns the segments in time
    order; a gap-free log comes back as a single segment.
    """
    cuts = [0]
    for i in range(1, len(log.frames)):
        if log.frames[i].t - log.frames[i - 1].t > gap_tolerance:
            cuts.append(i)
    cuts.append(len(log.frames))
    n_segments = len(cuts) - 1
    if n_segments == 1:
        return [log]
    return [
        replace(
            log,
            frames=log.frames[cuts[i] : cuts[i + 1]],
            meta=f"{log.meta}[seg {i + 1}/{n_segments}]",
        )
        for i in range(n_segments)
    ]


def infer_lane_offset(obj: ObjectState, ego: EgoState) -> int:
    """Quantize an object's lateral position, rebased to the ego lane center.

    Reproduces the production sensor behaviour on straight roads: the
    lane assignment uses only the lateral offset to the ego vehicle.
    """
    return round((obj.dy + ego.lateral_offset_in_lane) / ego.lane_width)

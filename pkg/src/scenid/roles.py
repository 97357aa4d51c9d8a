"""Relative-position roles for tracked objects.

Each frame, every tracked object is assigned to at most one of six
roles: the nearest and second-nearest vehicle ahead per lane (ego lane
and both adjacent lanes). "First" is the first object detected in the
respective lane in the direction of travel, "Second" drives in front of
the First. Adjacent-lane roles extend slightly behind the ego so that
vehicles driving next to it still qualify.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .field_data import DriveLog, Frame, infer_lane_offset


class Role(Enum):
    FIRST_EGO = "first-ego"
    SECOND_EGO = "second-ego"
    FIRST_LEFT = "first-left"
    SECOND_LEFT = "second-left"
    FIRST_RIGHT = "first-right"
    SECOND_RIGHT = "second-right"


SIDE_ROLES = frozenset(
    {Role.FIRST_LEFT, Role.SECOND_LEFT, Role.FIRST_RIGHT, Role.SECOND_RIGHT}
)
LEFT_ROLES = frozenset({Role.FIRST_LEFT, Role.SECOND_LEFT})
RIGHT_ROLES = frozenset({Role.FIRST_RIGHT, Role.SECOND_RIGHT})

# (first, second) role pair per lane offset relative to the ego lane.
_LANE_ROLES: dict[int, tuple[Role, Role]] = {
    0: (Role.FIRST_EGO, Role.SECOND_EGO),
    1: (Role.FIRST_LEFT, Role.SECOND_LEFT),
    -1: (Role.FIRST_RIGHT, Role.SECOND_RIGHT),
}


@dataclass(frozen=True)
class RoleConfig:
    """Role-assignment windows; the paper gives no numeric bounds."""

    sensor_range_m: float = 80.0
    dx_beside_m: float = -5.0


@dataclass(frozen=True)
class RoleMap:
    t: float
    bindings: dict[Role, int] = field(default_factory=dict)


@dataclass(frozen=True)
class RoleTimeline:
    maps: tuple[RoleMap, ...]

    def __len__(self) -> int:
        return len(self.maps)


def lane_offset_of(obj, ego) -> int:
    return obj.lane_offset if obj.lane_offset is not None else infer_lane_offset(obj, ego)


def assign_roles(frame: Frame, cfg: RoleConfig = RoleConfig()) -> RoleMap:
    """Bind the up-to-six roles for one frame.

    Ego-lane roles need dx > 0 (a leader must be ahead); adjacent-lane
    roles need dx > dx_beside_m. Everything beyond sensor_range_m or
    more than one lane away stays roleless. dx ties break on the
    smaller track id so reruns are deterministic.
    """
    buckets: dict[int, list[tuple[float, int]]] = {0: [], 1: [], -1: []}
    for obj in frame.objects:
        lane = lane_offset_of(obj, frame.ego)
        if lane not in buckets:
            continue
        lower = 0.0 if lane == 0 else cfg.dx_beside_m
        if lower < obj.dx <= cfg.sensor_range_m:
            buckets[lane].append((obj.dx, obj.track_id))
    bindings: dict[Role, int] = {}
    for lane, candidates in buckets.items():
        candidates.sort()
        first, second = _LANE_ROLES[lane]
        if candidates:
            bindings[first] = candidates[0][1]
        if len(candidates) > 1:
            bindings[second] = candidates[1][1]
    return RoleMap(t=frame.t, bindings=bindings)


def build_role_timeline(log: DriveLog, cfg: RoleConfig = RoleConfig()) -> RoleTimeline:
    """One RoleMap per frame, aligned with the log segment."""
    return RoleTimeline(maps=tuple(assign_roles(frame, cfg) for frame in log.frames))

"""Polygon and zigzag descriptions, angle classification, exceptional decomposition."""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

TOL_ANGLE = 1e-12
J_MAX = 200

SPECIAL = "special"
EXCEPTIONAL = "exceptional"
GENERIC = "generic"


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class AngleClass:
    """An interior angle together with its arithmetic type.

    ``k`` indexes the angle as pi/(2k+1) (special) or pi/(2k) (exceptional).
    For classified angles the trigonometric data below is exact, which keeps
    the vertex matrices and polynomial coefficients free of rounding noise.
    """

    value: float
    kind: str = GENERIC
    k: int | None = None

    @property
    def parity(self) -> int | None:
        if self.kind == GENERIC:
            return None
        return -1 if self.k % 2 else 1

    @property
    def is_exceptional(self) -> bool:
        return self.kind == EXCEPTIONAL

    @property
    def is_special(self) -> bool:
        return self.kind == SPECIAL

    @property
    def mu(self) -> float:
        return math.pi ** 2 / (2.0 * self.value)

    @property
    def sin_mu(self) -> float:
        if self.kind == SPECIAL:
            return float(self.parity)
        if self.kind == EXCEPTIONAL:
            return 0.0
        return math.sin(self.mu)

    @property
    def cos_mu(self) -> float:
        if self.kind == SPECIAL:
            return 0.0
        if self.kind == EXCEPTIONAL:
            return float(self.parity)
        return math.cos(self.mu)

    @property
    def tan_half_mu(self) -> float:
        """Eigenvalue of the vertex matrix on the odd vector, tan(pi^2/(4 alpha))."""
        if self.kind == EXCEPTIONAL:
            raise GeometryError("vertex matrix undefined at an exceptional angle")
        return (1.0 - self.cos_mu) / self.sin_mu

    @property
    def cot_half_mu(self) -> float:
        return 1.0 / self.tan_half_mu

    def __repr__(self) -> str:
        tag = self.kind if self.k is None else f"{self.kind}({self.k})"
        return f"AngleClass({self.value!r}, {tag})"


def classify_angle(value: float, tol_angle: float = TOL_ANGLE, j_max: int = J_MAX,
                   unsafe_angles: bool = False) -> AngleClass:
    """Classify ``value`` as pi/j with the smallest matching j, else generic."""
    upper = 2 * math.pi if unsafe_angles else math.pi
    if not (0.0 < value < upper):
        raise GeometryError(f"angle {value!r} outside (0, {'2pi' if unsafe_angles else 'pi'})")
    if tol_angle <= 0:
        raise GeometryError("tol_angle must be positive")
    for j in range(1, j_max + 1):
        if abs(value - math.pi / j) <= tol_angle:
            if j % 2 == 0:
                return AngleClass(value, EXCEPTIONAL, j // 2)
            return AngleClass(value, SPECIAL, (j - 1) // 2)
    return AngleClass(value, GENERIC, None)


def force_angle(value: float, force: str = "auto", k: int | None = None,
                tol_angle: float = TOL_ANGLE, unsafe_angles: bool = False) -> AngleClass:
    """Build an AngleClass with a user override of the numeric classification."""
    if force in (None, "auto"):
        return classify_angle(value, tol_angle, unsafe_angles=unsafe_angles)
    upper = 2 * math.pi if unsafe_angles else math.pi
    if not (0.0 < value < upper):
        raise GeometryError(f"angle {value!r} outside the admissible range")
    if force == GENERIC:
        return AngleClass(value, GENERIC, None)
    if force not in (SPECIAL, EXCEPTIONAL):
        raise GeometryError(f"unknown force value {force!r}")
    if k is None:
        if force == SPECIAL:
            k = max(0, round((math.pi / value - 1) / 2))
        else:
            k = max(1, round(math.pi / value / 2))
    return AngleClass(value, force, int(k))


_PI_EXPR = re.compile(r"^\s*([0-9.eE+-]*)\s*\*?\s*pi\s*(?:/\s*([0-9.eE+-]+))?\s*$")


def parse_angle_value(raw) -> float:
    """Accept radians as a number or strings like "pi/3", "3pi/5", "2*pi/3"."""
    if isinstance(raw, (int, float)):
        return float(raw)
    text = str(raw).strip().lower()
    m = _PI_EXPR.match(text)
    if m:
        num = float(m.group(1)) if m.group(1) not in ("", "+") else 1.0
        if m.group(1) == "-":
            num = -1.0
        den = float(m.group(2)) if m.group(2) else 1.0
        return num * math.pi / den
    try:
        return float(text)
    except ValueError as exc:
        raise GeometryError(f"cannot parse angle {raw!r}") from exc


def _as_angle(a, tol_angle: float, unsafe_angles: bool) -> AngleClass:
    if isinstance(a, AngleClass):
        return a
    return classify_angle(float(a), tol_angle, unsafe_angles=unsafe_angles)


def _check_lengths(lengths: Sequence[float]) -> tuple[float, ...]:
    out = tuple(float(x) for x in lengths)
    if any(not (x > 0 and math.isfinite(x)) for x in out):
        raise GeometryError("all lengths must be positive and finite")
    return out


@dataclass(frozen=True)
class PolygonSpec:
    """Angles alpha_1..alpha_n and lengths l_1..l_n; side I_j joins V_{j-1} and V_j."""

    angles: tuple[AngleClass, ...]
    lengths: tuple[float, ...]

    def __post_init__(self):
        if len(self.angles) < 1:
            raise GeometryError("a polygon needs at least one vertex")
        if len(self.angles) != len(self.lengths):
            raise GeometryError("need as many lengths as angles")
        _check_lengths(self.lengths)

    @classmethod
    def from_values(cls, angles, lengths, tol_angle: float = TOL_ANGLE,
                    unsafe_angles: bool = False) -> "PolygonSpec":
        return cls(tuple(_as_angle(a, tol_angle, unsafe_angles) for a in angles),
                   _check_lengths(lengths))

    @property
    def n(self) -> int:
        return len(self.angles)

    @property
    def perimeter(self) -> float:
        return math.fsum(self.lengths)

    @property
    def is_exceptional(self) -> bool:
        return any(a.is_exceptional for a in self.angles)

    def with_lengths(self, lengths) -> "PolygonSpec":
        return PolygonSpec(self.angles, _check_lengths(lengths))


@dataclass(frozen=True)
class ZigzagSpec:
    """An open chain of n sides with n-1 interior angles and end conditions."""

    angles: tuple[AngleClass, ...]
    lengths: tuple[float, ...]
    bc_start: str = "N"
    bc_end: str = "N"

    def __post_init__(self):
        if len(self.lengths) < 1:
            raise GeometryError("a zigzag needs at least one side")
        if len(self.angles) != len(self.lengths) - 1:
            raise GeometryError("a zigzag with n sides has n-1 angles")
        _check_lengths(self.lengths)
        for bc in (self.bc_start, self.bc_end):
            if bc not in ("N", "D"):
                raise GeometryError(f"boundary condition must be 'N' or 'D', got {bc!r}")

    @classmethod
    def from_values(cls, angles, lengths, bc_start="N", bc_end="N",
                    tol_angle: float = TOL_ANGLE, unsafe_angles: bool = False) -> "ZigzagSpec":
        return cls(tuple(_as_angle(a, tol_angle, unsafe_angles) for a in angles),
                   _check_lengths(lengths), bc_start, bc_end)

    @property
    def n(self) -> int:
        return len(self.lengths)

    @property
    def length(self) -> float:
        return math.fsum(self.lengths)

    @property
    def is_exceptional(self) -> bool:
        return any(a.is_exceptional for a in self.angles)


@dataclass(frozen=True)
class Component:
    """Boundary arc between two consecutive exceptional vertices.

    ``angles`` holds the non-exceptional interior angles, ``left``/``right`` the
    terminal exceptional angles, ``first_side`` the 0-based index of the first
    side of the arc in the polygon.
    """

    angles: tuple[AngleClass, ...]
    lengths: tuple[float, ...]
    left: AngleClass
    right: AngleClass
    first_side: int = 0

    @property
    def odd(self) -> bool:
        return self.left.parity != self.right.parity

    @property
    def length(self) -> float:
        return math.fsum(self.lengths)

    @property
    def poly_angles(self) -> tuple[AngleClass, ...]:
        """Interior angles followed by the terminal exceptional angle."""
        return self.angles + (self.right,)


@dataclass(frozen=True)
class ExceptionalDecomposition:
    components: tuple[Component, ...]

    @property
    def odd_flags(self) -> tuple[bool, ...]:
        return tuple(c.odd for c in self.components)

    @property
    def K(self) -> int:
        return len(self.components)

    @property
    def n_odd(self) -> int:
        return sum(self.odd_flags)


def decompose(p: PolygonSpec) -> ExceptionalDecomposition:
    """Split the boundary at exceptional vertices.

    Components start right after the exceptional vertex with the largest index,
    so the last component ends at that vertex.
    """
    exc = [j for j, a in enumerate(p.angles) if a.is_exceptional]
    if not exc:
        raise GeometryError("non-exceptional polygon")
    n = p.n
    comps = []
    prev = exc[-1]
    for e in exc:
        # sides prev+1 .. e (0-based side j joins vertex j-1 and vertex j)
        sides = [(prev + 1 + i) % n for i in range((e - prev) % n or n)]
        interior = tuple(p.angles[s] for s in sides[:-1])
        comps.append(Component(interior, tuple(p.lengths[s] for s in sides),
                               p.angles[prev], p.angles[e], sides[0]))
        prev = e
    return ExceptionalDecomposition(tuple(comps))


def zigzag_components(z: ZigzagSpec):
    """Split an exceptional zigzag into (first, middle components, last).

    ``first`` and ``last`` are (interior angles, lengths, exceptional angle).
    """
    exc = [j for j, a in enumerate(z.angles) if a.is_exceptional]
    if not exc:
        raise GeometryError("zigzag has no exceptional angle")
    first = (tuple(z.angles[:exc[0]]), tuple(z.lengths[:exc[0] + 1]), z.angles[exc[0]])
    middle = []
    for a, b in zip(exc[:-1], exc[1:]):
        middle.append(Component(tuple(z.angles[a + 1:b]), tuple(z.lengths[a + 1:b + 1]),
                                z.angles[a], z.angles[b], a + 1))
    last = (tuple(z.angles[exc[-1] + 1:]), tuple(z.lengths[exc[-1] + 1:]), z.angles[exc[-1]])
    return first, tuple(middle), last


def perimeter(p: PolygonSpec) -> float:
    return p.perimeter


def _angle_from_json(entry, tol_angle: float, unsafe_angles: bool) -> AngleClass:
    if isinstance(entry, dict):
        if "value" not in entry:
            raise GeometryError("angle entry missing 'value'")
        value = parse_angle_value(entry["value"])
        return force_angle(value, entry.get("force", "auto"), entry.get("k"),
                           tol_angle, unsafe_angles)
    return classify_angle(parse_angle_value(entry), tol_angle, unsafe_angles=unsafe_angles)


def spec_from_dict(data: dict, tol_angle: float = TOL_ANGLE, unsafe_angles: bool = False):
    """Build a PolygonSpec, or a ZigzagSpec when a "bc" pair is present."""
    if not isinstance(data, dict):
        raise GeometryError("spec must be a JSON object")
    try:
        raw_angles = data["angles"]
        raw_lengths = data["lengths"]
    except KeyError as exc:
        raise GeometryError(f"spec missing key {exc}") from exc
    unsafe_angles = bool(data.get("unsafe_angles", unsafe_angles))
    angles = tuple(_angle_from_json(a, tol_angle, unsafe_angles) for a in raw_angles)
    lengths = _check_lengths([parse_angle_value(x) for x in raw_lengths])
    bc = data.get("bc")
    if bc is not None:
        if len(bc) != 2:
            raise GeometryError("'bc' must list two conditions")
        return ZigzagSpec(angles, lengths, str(bc[0]).upper(), str(bc[1]).upper())
    return PolygonSpec(angles, lengths)


def load_spec(path, tol_angle: float = TOL_ANGLE, unsafe_angles: bool = False):
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise GeometryError(f"cannot read spec file {path}: {exc}") from exc
    return spec_from_dict(data, tol_angle, unsafe_angles)

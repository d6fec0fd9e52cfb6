"""Jenkins-Strebel cylinder decompositions.

A decomposition records the flat cylinders of a Jenkins-Strebel differential
(core curve label, circumference, modulus), how the boundary circles of the
cylinders are glued along arc-length intervals, and the orders of the critical
points. Everything here is immutable; validation never raises but collects
violations into a :class:`ValidationReport`.
"""

from __future__ import annotations

import cmath
import itertools
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping

from .errors import InvalidOrderError, SpecParseError, ValidationError

# relative tolerance for interval lengths, coverage and the unit-norm area
LENGTH_RTOL = 1e-9

SIDES = (1, 2)


@dataclass(frozen=True)
class Cylinder:
    label: str
    circumference: float
    modulus: float

    @property
    def height(self) -> float:
        return self.modulus * self.circumference

    @property
    def area(self) -> float:
        return self.modulus * self.circumference**2


@dataclass(frozen=True)
class BoundaryInterval:
    """Half-open arc-length interval ``[start, end)`` on one boundary circle of a cylinder."""

    cylinder: str
    side: int
    start: float
    end: float

    @property
    def length(self) -> float:
        return self.end - self.start

    @property
    def key(self):
        return (self.cylinder, self.side, self.start, self.end)


@dataclass(frozen=True)
class Gluing:
    first: BoundaryInterval
    second: BoundaryInterval


@dataclass(frozen=True)
class CylinderDecomposition:
    genus: int
    punctures: int
    cylinders: tuple[Cylinder, ...]
    gluings: tuple[Gluing, ...] = ()
    critical_orders: tuple[int, ...] = ()
    unit_norm: bool = False

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(c.label for c in self.cylinders)

    @property
    def moduli(self) -> tuple[float, ...]:
        return tuple(c.modulus for c in self.cylinders)

    @property
    def area(self) -> float:
        return math.fsum(c.area for c in self.cylinders)

    def cylinder(self, label: str) -> Cylinder:
        for c in self.cylinders:
            if c.label == label:
                return c
        raise KeyError(label)

    def disks(self) -> list[tuple[str, int]]:
        """Half-annuli ``(label, side)`` in canonical order (cylinder order, then side)."""
        return [(c.label, l) for c in self.cylinders for l in SIDES]

    def relabel(self, mapping: Mapping[str, str]) -> "CylinderDecomposition":
        def iv(b):
            return replace(b, cylinder=mapping[b.cylinder])

        return replace(
            self,
            cylinders=tuple(replace(c, label=mapping[c.label]) for c in self.cylinders),
            gluings=tuple(Gluing(iv(g.first), iv(g.second)) for g in self.gluings),
        )

    # -- serialization -------------------------------------------------------

    def to_dict(self) -> dict:
        def iv(b):
            return {"cylinder": b.cylinder, "side": b.side, "start": b.start, "end": b.end}

        return {
            "genus": self.genus,
            "punctures": self.punctures,
            "unit_norm": self.unit_norm,
            "cylinders": [
                {"label": c.label, "circumference": c.circumference, "modulus": c.modulus}
                for c in self.cylinders
            ],
            "gluings": [[iv(g.first), iv(g.second)] for g in self.gluings],
            "critical_points": [{"order": n} for n in self.critical_orders],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "CylinderDecomposition":
        try:
            cylinders = tuple(
                Cylinder(str(c["label"]), float(c["circumference"]), float(c["modulus"]))
                for c in data["cylinders"]
            )
            gluings = tuple(
                Gluing(_interval_from(g[0]), _interval_from(g[1])) for g in data.get("gluings", [])
            )
            orders = tuple(_as_int(p["order"]) for p in data.get("critical_points", []))
            return cls(
                genus=_as_int(data["genus"]),
                punctures=_as_int(data["punctures"]),
                cylinders=cylinders,
                gluings=gluings,
                critical_orders=orders,
                unit_norm=bool(data.get("unit_norm", False)),
            )
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise SpecParseError(f"malformed surface spec: {exc!r}") from exc

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_json(cls, text: str) -> "CylinderDecomposition":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SpecParseError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(data)

    @classmethod
    def load(cls, path) -> "CylinderDecomposition":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise SpecParseError(f"cannot read {path}: {exc.strerror or exc}") from exc
        return cls.from_json(text)


def _as_int(x) -> int:
    if isinstance(x, bool) or (isinstance(x, float) and not x.is_integer()):
        raise ValueError(f"expected integer, got {x!r}")
    return int(x)


def _interval_from(d: Mapping) -> BoundaryInterval:
    return BoundaryInterval(str(d["cylinder"]), _as_int(d["side"]), float(d["start"]), float(d["end"]))


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {"valid": self.valid, "violations": list(self.violations), "warnings": list(self.warnings)}


def _close(a: float, b: float, scale: float) -> bool:
    return abs(a - b) <= LENGTH_RTOL * max(scale, abs(a), abs(b), 1e-300)


def validate_decomposition(spec: CylinderDecomposition) -> ValidationReport:
    """Check every structural invariant of ``spec`` and report all violations found."""
    rep = ValidationReport()
    bad = rep.violations.append

    if spec.genus < 0 or spec.punctures < 0:
        bad("genus and punctures must be non-negative")
    if 3 * spec.genus - 3 + spec.punctures <= 0:
        bad(f"3g-3+n must be positive (g={spec.genus}, n={spec.punctures})")

    if not spec.cylinders:
        bad("decomposition has no cylinders")
    labels = [c.label for c in spec.cylinders]
    if len(set(labels)) != len(labels):
        bad("core curve labels are not distinct")
    by_label = {c.label: c for c in spec.cylinders}
    for c in spec.cylinders:
        if not (math.isfinite(c.circumference) and c.circumference > 0):
            bad(f"cylinder {c.label}: circumference must be positive")
        if not (math.isfinite(c.modulus) and c.modulus > 0):
            bad(f"cylinder {c.label}: modulus must be positive")

    # gluing involution
    seen: dict[tuple, int] = {}
    per_circle: dict[tuple[str, int], list[BoundaryInterval]] = {}
    for i, g in enumerate(spec.gluings):
        ok = True
        for b in (g.first, g.second):
            if b.cylinder not in by_label:
                bad(f"gluing {i}: unknown cylinder {b.cylinder!r}")
                ok = False
                continue
            if b.side not in SIDES:
                bad(f"gluing {i}: boundary side must be 1 or 2, got {b.side}")
                ok = False
                continue
            circ = by_label[b.cylinder].circumference
            if not (b.start < b.end) or b.start < -LENGTH_RTOL * circ or b.end > circ * (1 + LENGTH_RTOL):
                bad(f"gluing {i}: interval [{b.start}, {b.end}) is not inside [0, {circ})")
                ok = False
            if b.key in seen:
                bad(f"gluing {i}: interval {b.key} already glued by gluing {seen[b.key]}")
                ok = False
            seen[b.key] = i
            per_circle.setdefault((b.cylinder, b.side), []).append(b)
        if g.first.key == g.second.key:
            bad(f"gluing {i}: interval glued to itself")
        elif ok and not _close(g.first.length, g.second.length, 0.0):
            bad(
                f"gluing {i}: interval length mismatch "
                f"({g.first.length!r} vs {g.second.length!r})"
            )

    for c in spec.cylinders:
        for side in SIDES:
            ivs = sorted(per_circle.get((c.label, side), []), key=lambda b: b.start)
            if not ivs:
                bad(f"boundary ({c.label}, {side}) is not glued")
                continue
            pos = 0.0
            for b in ivs:
                if b.start < pos and not _close(b.start, pos, c.circumference):
                    bad(f"boundary ({c.label}, {side}): overlapping intervals at {b.start}")
                elif not _close(b.start, pos, c.circumference):
                    bad(f"boundary ({c.label}, {side}): not covered on [{pos}, {b.start})")
                pos = max(pos, b.end)
            if not _close(pos, c.circumference, c.circumference):
                bad(f"boundary ({c.label}, {side}): not covered on [{pos}, {c.circumference})")

    if any(n < -1 for n in spec.critical_orders):
        bad("critical point orders must be >= -1")
    poles = sum(1 for n in spec.critical_orders if n == -1)
    if poles != spec.punctures:
        bad(f"expected {spec.punctures} critical points of order -1, found {poles}")

    total = sum(spec.critical_orders)
    if total != 4 * spec.genus - 4:
        rep.warnings.append(
            f"Gauss-Bonnet: sum of critical orders is {total}, expected 4g-4 = {4 * spec.genus - 4}"
        )

    if spec.unit_norm and spec.cylinders and not _close(spec.area, 1.0, 1.0):
        bad(f"unit norm requested but total area sum(m_j c_j^2) = {spec.area!r}")
    return rep


def require_valid(spec: CylinderDecomposition) -> CylinderDecomposition:
    rep = validate_decomposition(spec)
    if not rep.valid:
        raise ValidationError(rep)
    return spec


def critical_local_chart(order: int, z: complex) -> complex:
    """Natural coordinate near a critical point of order ``order``.

    Returns ``2/(n+2) * z**((n+2)/2)`` with the principal branch, ``arg z`` in ``(-pi, pi]``.
    """
    if order < -1:
        raise InvalidOrderError(f"critical point order must be >= -1, got {order}")
    z = complex(z)
    if z == 0:
        return 0j
    k = order + 2
    if k % 2 == 0:
        return (2.0 / k) * z ** (k // 2)
    return (2.0 / k) * cmath.exp(0.5 * k * cmath.log(z))


# -- components of the half-annulus gluing graph ----------------------------


def half_annulus_components(spec: CylinderDecomposition) -> list[tuple[tuple[str, int], ...]]:
    """Connected components of the gluing graph on half-annuli ``(label, side)``.

    Components are listed by their smallest disk in canonical order; disks inside
    a component keep canonical order as well.
    """
    disks = spec.disks()
    index = {d: i for i, d in enumerate(disks)}
    parent = list(range(len(disks)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for g in spec.gluings:
        a = index.get((g.first.cylinder, g.first.side))
        b = index.get((g.second.cylinder, g.second.side))
        if a is None or b is None:
            continue
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    groups: dict[int, list[tuple[str, int]]] = {}
    for i, d in enumerate(disks):
        groups.setdefault(find(i), []).append(d)
    return [tuple(groups[r]) for r in sorted(groups)]


# -- rays and similarity -----------------------------------------------------


@dataclass(frozen=True)
class CurveSystem:
    curves: tuple[str, ...]

    def __post_init__(self):
        if not self.curves:
            raise ValueError("a curve system needs at least one curve")
        if len(set(self.curves)) != len(self.curves):
            raise ValueError("curve ids must be distinct")

    @property
    def k(self) -> int:
        return len(self.curves)


@dataclass(frozen=True)
class RaySpec:
    """A Jenkins-Strebel ray: the base decomposition at time 0."""

    decomposition: CylinderDecomposition
    name: str = ""

    @property
    def curve_system(self) -> CurveSystem:
        return CurveSystem(self.decomposition.labels)


@dataclass(frozen=True)
class SimilarPair:
    left: RaySpec
    right: RaySpec
    curve_match: tuple[tuple[str, str], ...]
    component_match: tuple[int, ...]
    end_distance: float | None = None

    def __post_init__(self):
        if self.end_distance is not None and not (self.end_distance >= 0 and math.isfinite(self.end_distance)):
            raise ValueError(f"end distance must be a finite non-negative number, got {self.end_distance!r}")

    @property
    def k(self) -> int:
        return len(self.curve_match)

    @property
    def left_moduli(self) -> tuple[float, ...]:
        d = self.left.decomposition
        return tuple(d.cylinder(a).modulus for a, _ in self.curve_match)

    @property
    def right_moduli(self) -> tuple[float, ...]:
        d = self.right.decomposition
        return tuple(d.cylinder(b).modulus for _, b in self.curve_match)

    def with_end_distance(self, d: float) -> "SimilarPair":
        return replace(self, end_distance=float(d))

    def swapped(self) -> "SimilarPair":
        inv = [0] * len(self.component_match)
        for i, j in enumerate(self.component_match):
            inv[j] = i
        return SimilarPair(
            self.right,
            self.left,
            tuple((b, a) for a, b in self.curve_match),
            tuple(inv),
            self.end_distance,
        )


@dataclass(frozen=True)
class NotSimilar:
    reason: str


def _partition_under(components, label_map, flips) -> frozenset:
    out = []
    for comp in components:
        out.append(frozenset((label_map[a], s if a not in flips else 3 - s) for a, s in comp))
    return frozenset(out)


def similarity_check(
    a: RaySpec, b: RaySpec, curve_match: Mapping[str, str] | None = None
) -> SimilarPair | NotSimilar:
    """Decide whether two rays are similar.

    Curve ids are opaque; without ``curve_match`` they are matched by equality.
    Besides equal curve systems, the half-annuli must split into limit components
    the same way, allowing the two boundary sides of any cylinder to be exchanged.
    """
    da = require_valid(a.decomposition)
    db = require_valid(b.decomposition)
    if (da.genus, da.punctures) != (db.genus, db.punctures):
        return NotSimilar(f"surface types differ: {(da.genus, da.punctures)} vs {(db.genus, db.punctures)}")
    if len(da.cylinders) != len(db.cylinders):
        return NotSimilar(f"curve systems have different sizes: {len(da.cylinders)} vs {len(db.cylinders)}")
    if curve_match is None:
        curve_match = {lab: lab for lab in da.labels}
    cm = dict(curve_match)
    if set(cm) != set(da.labels) or sorted(cm.values()) != sorted(db.labels):
        return NotSimilar("core curve labels do not correspond")

    comps_a = half_annulus_components(da)
    comps_b = half_annulus_components(db)
    target = frozenset(frozenset(c) for c in comps_b)
    # only cylinders whose sides lie in different components are affected by a side swap
    where = {d: i for i, comp in enumerate(comps_a) for d in comp}
    free = [lab for lab in da.labels if where[(lab, 1)] != where[(lab, 2)]]
    for bits in itertools.product((False, True), repeat=len(free)):
        flips = {lab for lab, f in zip(free, bits) if f}
        if _partition_under(comps_a, cm, flips) == target:
            lookup = {frozenset(c): j for j, c in enumerate(comps_b)}
            comp_match = tuple(
                lookup[frozenset((cm[x], s if x not in flips else 3 - s) for x, s in comp)]
                for comp in comps_a
            )
            return SimilarPair(a, b, tuple((lab, cm[lab]) for lab in da.labels), comp_match)
    return NotSimilar("gluing graphs are not compatible under the curve matching")


def load_surface(source) -> CylinderDecomposition:
    """Accept a path, a JSON string or an already-parsed mapping."""
    if isinstance(source, CylinderDecomposition):
        return source
    if isinstance(source, Mapping):
        return CylinderDecomposition.from_dict(source)
    return CylinderDecomposition.load(source)


def torus(modulus: float = 1.0, circumference: float = 1.0, label: str = "a", unit_norm: bool = False):
    """One cylinder whose two boundary circles are glued to each other; one marked point."""
    c = circumference
    return CylinderDecomposition(
        genus=1,
        punctures=1,
        cylinders=(Cylinder(label, c, modulus),),
        gluings=(Gluing(BoundaryInterval(label, 1, 0.0, c), BoundaryInterval(label, 2, 0.0, c)),),
        critical_orders=(-1, 1),
        unit_norm=unit_norm,
    )


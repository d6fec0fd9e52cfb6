"""Teichmueller geodesic flow on Jenkins-Strebel rays in the annulus model.

Each half-cylinder of modulus ``m`` is the round annulus ``exp(-m*pi) <= |z| < 1``.
Flowing for time ``t`` replaces ``m`` by ``exp(2t) m``, so inner radii collapse
doubly exponentially; they are stored as logarithms throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .surface import CylinderDecomposition, Gluing, half_annulus_components, require_valid


@dataclass(frozen=True)
class RayPoint:
    t: float
    labels: tuple[str, ...]
    base_moduli: tuple[float, ...]

    @property
    def moduli(self) -> tuple[float, ...]:
        s = math.exp(2.0 * self.t)
        return tuple(s * m for m in self.base_moduli)

    @property
    def log_inner_radii(self) -> tuple[float, ...]:
        return tuple(-m * math.pi for m in self.moduli)

    @property
    def inner_radii(self) -> tuple[float, ...]:
        # underflows to 0.0 for large t; use log_inner_radii in computations
        return tuple(math.exp(L) for L in self.log_inner_radii)

    def flow(self, dt: float) -> "RayPoint":
        return RayPoint(_check_time(self.t + dt), self.labels, self.base_moduli)

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "cylinders": [
                {"label": lab, "modulus": m, "log_inner_radius": L}
                for lab, m, L in zip(self.labels, self.moduli, self.log_inner_radii)
            ],
        }


def _check_time(t: float) -> float:
    if not (t >= 0 and math.isfinite(t)):
        raise DomainError(f"ray time must be finite and >= 0, got {t!r}")
    return float(t)


def ray_point(spec: CylinderDecomposition, t: float) -> RayPoint:
    return RayPoint(_check_time(t), spec.labels, spec.moduli)


def radial_stretch(t: float, r: float) -> float:
    """The Teichmueller map on one annulus: ``r -> r**exp(2t)``."""
    if not 0.0 < r < 1.0:
        raise DomainError(f"radius must lie in (0, 1), got {r!r}")
    return math.exp(math.exp(2.0 * t) * math.log(r))


def limit_radius(modulus: float, r: float) -> float:
    """Fixed log-linear choice of the collapsing diffeomorphism ``[exp(-m pi), 1) -> [0, 1)``."""
    lo = math.exp(-modulus * math.pi)
    if not lo <= r < 1.0:
        raise DomainError(f"radius {r!r} outside [{lo!r}, 1)")
    return 1.0 + math.log(r) / (modulus * math.pi)


@dataclass(frozen=True)
class AffineStretch:
    """Linear map ``x + iy -> a x + i b y`` with ``a, b > 0``.

    ``AffineStretch.teichmueller(K)`` is the normal form ``K**-0.5 x + i K**0.5 y``.
    """

    a: float
    b: float

    @classmethod
    def teichmueller(cls, K: float) -> "AffineStretch":
        if not K >= 1.0:
            raise DomainError(f"dilatation must be >= 1, got {K!r}")
        return cls(K**-0.5, K**0.5)

    @classmethod
    def ray_map(cls, t: float) -> "AffineStretch":
        return cls(math.exp(-t), math.exp(t))

    def __call__(self, z: complex) -> complex:
        return complex(self.a * z.real, self.b * z.imag)

    def compose(self, other: "AffineStretch") -> "AffineStretch":
        """``self o other``."""
        return AffineStretch(self.a * other.a, self.b * other.b)

    def inverse(self) -> "AffineStretch":
        return AffineStretch(1.0 / self.a, 1.0 / self.b)

    @property
    def beltrami(self) -> float:
        # d/dz = (a+b)/2, d/dzbar = (a-b)/2
        return (self.a - self.b) / (self.a + self.b)

    @property
    def K(self) -> float:
        # equals (1+|mu|)/(1-|mu|) but stays finite when |mu| rounds to 1
        return max(self.a / self.b, self.b / self.a)


def distance_along_ray(s: float, t: float) -> float:
    _check_time(s)
    _check_time(t)
    return abs(s - t)


def distance_via_stretch(s: float, t: float) -> float:
    """Half the log-dilatation of ``g_t o g_s^-1``; agrees with :func:`distance_along_ray`."""
    g = AffineStretch.ray_map(t).compose(AffineStretch.ray_map(s).inverse())
    return 0.5 * math.log(g.K)


@dataclass(frozen=True)
class Node:
    label: str
    disks: tuple[tuple[str, int], tuple[str, int]]


@dataclass(frozen=True)
class LimitComponent:
    disks: tuple[tuple[str, int], ...]
    gluings: tuple[Gluing, ...]


@dataclass(frozen=True)
class NodedLimit:
    nodes: tuple[Node, ...]
    components: tuple[LimitComponent, ...]

    @property
    def n_components(self) -> int:
        return len(self.components)

    def component_of(self, disk: tuple[str, int]) -> int:
        for i, comp in enumerate(self.components):
            if disk in comp.disks:
                return i
        raise KeyError(disk)

    def to_dict(self) -> dict:
        return {
            "nodes": [{"label": n.label, "disks": [list(d) for d in n.disks]} for n in self.nodes],
            "components": [
                {
                    "disks": [list(d) for d in comp.disks],
                    "n_gluings": len(comp.gluings),
                }
                for comp in self.components
            ],
        }


def limit_point(spec: CylinderDecomposition) -> NodedLimit:
    """End point of the ray in the augmented space: every core curve pinched to a node."""
    require_valid(spec)
    nodes = tuple(Node(lab, ((lab, 1), (lab, 2))) for lab in spec.labels)
    comps = []
    for disks in half_annulus_components(spec):
        members = set(disks)
        glu = tuple(g for g in spec.gluings if (g.first.cylinder, g.first.side) in members)
        comps.append(LimitComponent(disks, glu))
    return NodedLimit(nodes, tuple(comps))

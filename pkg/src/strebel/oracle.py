"""Discrete conformal modulus by Dirichlet-energy minimisation.

Domains are triangulated grids; the stiffness matrix uses cotangent weights,
which on the right-isosceles triangulation of a square grid is exactly the
5-point Laplacian. The harmonic potential (0 on one marked boundary, 1 on the
other) is found with conjugate gradients and its energy gives the modulus.

Conventions, fixed against the rectangle: an ``a x b`` rectangle whose two
sides of length ``a`` carry the boundary values has modulus ``a / b`` (the
energy). A round annulus ``r_in <= |z| <= r_out`` has modulus
``log(r_out / r_in) / (2 pi)`` (the reciprocal energy), so the half-cylinder
annulus ``exp(-m pi) <= |z| < 1`` has modulus ``m / 2``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import cg

from .errors import DomainError, NotOrientationPreservingError, SolverError

log = logging.getLogger(__name__)

CG_RTOL = 1e-10
MIN_DISCRETE_RADIUS = 1e-8


@dataclass(frozen=True)
class GridDomain:
    kind: Literal["quadrilateral", "annulus"]
    a: float = 1.0
    b: float = 1.0
    marked: Literal["horizontal", "vertical"] = "horizontal"
    r_in: float = 0.5
    r_out: float = 1.0
    resolution: int = 64

    def __post_init__(self):
        if self.kind not in ("quadrilateral", "annulus"):
            raise DomainError(f"unknown domain kind {self.kind!r}")
        if self.resolution < 8:
            raise DomainError("resolution must be at least 8")
        if self.kind == "quadrilateral":
            if not (self.a > 0 and self.b > 0):
                raise DomainError("rectangle sides must be positive")
            if self.marked not in ("horizontal", "vertical"):
                raise DomainError(f"marked must be 'horizontal' or 'vertical', got {self.marked!r}")
        elif not 0 < self.r_in < self.r_out:
            raise DomainError(f"need 0 < r_in < r_out, got {self.r_in!r}, {self.r_out!r}")

    def with_resolution(self, resolution: int) -> "GridDomain":
        return GridDomain(self.kind, self.a, self.b, self.marked, self.r_in, self.r_out, resolution)

    def conjugate(self) -> "GridDomain":
        swap = "vertical" if self.marked == "horizontal" else "horizontal"
        return GridDomain(self.kind, self.a, self.b, swap, self.r_in, self.r_out, self.resolution)

    @classmethod
    def annulus_of_modulus(cls, m: float, resolution: int = 64) -> "GridDomain":
        """Half-cylinder annulus ``exp(-m pi) <= |z| < 1``."""
        return cls("annulus", r_in=math.exp(-m * math.pi), r_out=1.0, resolution=resolution)


@dataclass(frozen=True)
class Mesh:
    points: np.ndarray
    triangles: np.ndarray
    zero: np.ndarray
    one: np.ndarray


def build_mesh(dom: GridDomain) -> Mesh:
    if dom.kind == "quadrilateral":
        h = min(dom.a, dom.b) / dom.resolution
        nx, ny = max(1, round(dom.a / h)), max(1, round(dom.b / h))
        x = np.linspace(0.0, dom.a, nx + 1)
        y = np.linspace(0.0, dom.b, ny + 1)
        pts = (x[:, None] + 1j * y[None, :]).ravel()
        idx = np.arange((nx + 1) * (ny + 1)).reshape(nx + 1, ny + 1)
        p00, p10 = idx[:-1, :-1].ravel(), idx[1:, :-1].ravel()
        p11, p01 = idx[1:, 1:].ravel(), idx[:-1, 1:].ravel()
        if dom.marked == "horizontal":
            zero, one = idx[:, 0], idx[:, -1]
        else:
            zero, one = idx[0, :], idx[-1, :]
    else:
        n_th = dom.resolution
        span = math.log(dom.r_out / dom.r_in)
        n_s = max(8, math.ceil(n_th * span / (2 * math.pi)))
        s = np.linspace(math.log(dom.r_in), math.log(dom.r_out), n_s + 1)
        th = 2 * np.pi * np.arange(n_th) / n_th
        pts = np.exp(s[:, None] + 1j * th[None, :]).ravel()
        idx = np.arange((n_s + 1) * n_th).reshape(n_s + 1, n_th)
        nxt = np.roll(idx, -1, axis=1)
        p00, p10 = idx[:-1, :].ravel(), idx[1:, :].ravel()
        p11, p01 = nxt[1:, :].ravel(), nxt[:-1, :].ravel()
        zero, one = idx[0, :], idx[-1, :]
    tris = np.concatenate([np.stack([p00, p10, p11], 1), np.stack([p00, p11, p01], 1)])
    return Mesh(pts, tris, np.asarray(zero), np.asarray(one))


def _signed_double_areas(pts, tris) -> np.ndarray:
    e1 = pts[tris[:, 1]] - pts[tris[:, 0]]
    e2 = pts[tris[:, 2]] - pts[tris[:, 0]]
    return (np.conj(e1) * e2).imag


def stiffness(pts: np.ndarray, tris: np.ndarray) -> sp.csr_matrix:
    n = len(pts)
    rows, cols, vals = [], [], []
    for k in range(3):
        i, j, o = tris[:, (k + 1) % 3], tris[:, (k + 2) % 3], tris[:, k]
        e1, e2 = pts[i] - pts[o], pts[j] - pts[o]
        prod = np.conj(e1) * e2
        w = 0.5 * prod.real / prod.imag
        rows += [i, j, i, j]
        cols += [j, i, i, j]
        vals += [-w, -w, w, w]
    return sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    ).tocsr()


@dataclass(frozen=True)
class EnergySolve:
    energy: float
    residual: float
    iterations: int


def dirichlet_energy(pts: np.ndarray, mesh: Mesh) -> EnergySolve:
    """Energy of the discrete harmonic potential on ``mesh`` with vertices moved to ``pts``."""
    L = stiffness(pts, mesh.triangles)
    n = len(pts)
    u = np.zeros(n)
    u[mesh.one] = 1.0
    fixed = np.zeros(n, dtype=bool)
    fixed[mesh.zero] = True
    fixed[mesh.one] = True
    free = np.flatnonzero(~fixed)
    A = L[free][:, free]
    rhs = -(L[free][:, fixed] @ u[fixed])
    count = [0]

    def tick(_):
        count[0] += 1

    x, info = cg(A, rhs, rtol=CG_RTOL, atol=0.0, maxiter=20 * len(free) + 100, callback=tick)
    res = float(np.linalg.norm(A @ x - rhs) / max(np.linalg.norm(rhs), 1e-300))
    if info != 0:
        raise SolverError(f"conjugate gradients did not converge after {count[0]} iterations", res)
    u[free] = x
    energy = float(u @ (L @ u))
    log.debug("cg: n=%d iterations=%d residual=%.2e energy=%.12g", len(free), count[0], res, energy)
    return EnergySolve(energy, res, count[0])


def _discrete_value(dom: GridDomain) -> float:
    mesh = build_mesh(dom)
    e = dirichlet_energy(mesh.points, mesh).energy
    return e if dom.kind == "quadrilateral" else 1.0 / e


@dataclass(frozen=True)
class ModulusResult:
    value: float
    err_est: float
    resolution: int

    def to_dict(self) -> dict:
        return {"value": self.value, "err_est": self.err_est, "resolution": self.resolution}


def _with_error(dom: GridDomain) -> ModulusResult:
    v = _discrete_value(dom)
    coarse = dom.resolution // 2
    # O(h^2) scheme: Richardson estimate from the halved resolution
    err = abs(v - _discrete_value(dom.with_resolution(coarse))) / 3.0 if coarse >= 8 else math.nan
    return ModulusResult(v, err, dom.resolution)


def quad_modulus(dom: GridDomain) -> ModulusResult:
    if dom.kind != "quadrilateral":
        raise DomainError("quad_modulus needs a quadrilateral domain")
    return _with_error(dom)


@dataclass(frozen=True)
class AnnulusModulus:
    analytic: float
    discrete: float | None
    err_est: float | None
    resolution: int
    analytic_only: bool = False

    def to_dict(self) -> dict:
        return {
            "value": self.discrete if self.discrete is not None else self.analytic,
            "analytic": self.analytic,
            "discrete": self.discrete,
            "err_est": self.err_est,
            "resolution": self.resolution,
            "analytic_only": self.analytic_only,
        }


def annulus_modulus(r_in: float, resolution: int = 256, r_out: float = 1.0) -> AnnulusModulus:
    if not 0 < r_in < r_out:
        raise DomainError(f"need 0 < r_in < r_out, got {r_in!r}")
    analytic = math.log(r_out / r_in) / (2 * math.pi)
    if r_in / r_out <= MIN_DISCRETE_RADIUS:
        log.warning("r_in=%g too small for the grid solver; analytic value only", r_in)
        return AnnulusModulus(analytic, None, None, resolution, analytic_only=True)
    res = _with_error(GridDomain("annulus", r_in=r_in, r_out=r_out, resolution=resolution))
    return AnnulusModulus(analytic, res.value, res.err_est, resolution)


def pushforward_modulus(f: Callable, dom: GridDomain) -> float:
    """Modulus of ``f(dom)`` for an annulus ``dom``, computed on the image of the grid.

    ``f`` must accept a complex numpy array.
    """
    if dom.kind != "annulus":
        raise DomainError("pushforward_modulus needs an annulus domain")
    mesh = build_mesh(dom)
    img = np.asarray(f(mesh.points), dtype=complex)
    if not np.all(np.isfinite(img)):
        raise DomainError("map produced non-finite values on the grid")
    if np.any(_signed_double_areas(img, mesh.triangles) <= 0):
        raise NotOrientationPreservingError("map reverses orientation of some grid triangle")
    return 1.0 / dirichlet_energy(img, mesh).energy

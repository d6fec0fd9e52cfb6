"""Explicit quasiconformal maps between Jenkins-Strebel rays.

On a half-cylinder annulus ``delta(t) <= |z| < 1`` of the left ray the comparison
map ``F`` to the right ray is assembled from three pieces:

* ``P`` on ``delta <= |z| <= Delta``: affine in ``log z``; it squeezes the inner
  circle to radius ``delta**M`` and ends with the twist ``c z`` on ``|z| = Delta``;
* ``Q`` on ``Delta <= |z| <= 2 Delta``: interpolates from ``c z`` to the germ
  ``h(z) = c z + psi(z)`` of the end-point map;
* ``h`` itself further out, represented by its power series near the node.

``delta(t) = exp(-exp(2t) m pi)`` underflows quickly, so ``P`` is evaluated in the
logarithmic chart and ``Q`` in the scaled variable ``z / Delta``.

The module also holds the node correction ``H_eps``, a numerical quasisymmetry
functional and the cross ratio used to analyse boundary maps.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import (
    DomainError,
    HomotopyViolationError,
    NotOrientationPreservingError,
    NumericalInstabilityError,
    SingularConfigurationError,
    UndefinedCrossRatioError,
    UseReciprocalError,
)

# relative slack when deciding whether a point lies on a closed annulus
_EDGE_RTOL = 1e-12


def exponent_bound(M: float, eps: float) -> float:
    """``log(eps / (M + eps - 1)) / log M``; exponents below it make ``lim K(P) < M + eps``."""
    if not M > 1.0:
        raise UseReciprocalError(f"modulus ratio must exceed 1, got {M!r}; swap the rays")
    if not 0.0 < eps < 1.0:
        raise DomainError(f"eps must lie in (0, 1), got {eps!r}")
    return math.log(eps / (M + eps - 1.0)) / math.log(M)


def choose_X(M: float, eps: float) -> float:
    return 2.0 * exponent_bound(M, eps)


@dataclass(frozen=True)
class InterpolationParams:
    """Data for one half-cylinder ``(label, side)``.

    ``psi`` lists the coefficients of ``z**2, z**3, ...`` in ``h(z) = c z + psi(z)``.
    ``X`` defaults to :func:`choose_X`. For ``M == 1`` the twist annulus is
    ``delta <= |z| <= delta**twist_fraction`` instead.
    """

    M: float
    m: float = 1.0
    c: complex = 1.0 + 0.0j
    psi: tuple[complex, ...] = ()
    eps: float = 0.05
    X: float | None = None
    K_h: float = 1.0
    label: str = ""
    side: int = 1
    twist_fraction: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "c", complex(self.c))
        object.__setattr__(self, "psi", tuple(complex(a) for a in self.psi))
        if not (self.M > 0 and math.isfinite(self.M)):
            raise DomainError(f"M must be positive, got {self.M!r}")
        if not self.m > 0:
            raise DomainError(f"base modulus must be positive, got {self.m!r}")
        if self.c == 0:
            raise DomainError("leading coefficient c must be nonzero")
        if not 0.0 < self.eps < 1.0:
            raise DomainError(f"eps must lie in (0, 1), got {self.eps!r}")
        if self.X is not None and not self.X < 0:
            raise DomainError(f"X must be negative, got {self.X!r}")
        if not self.K_h >= 1.0:
            raise DomainError(f"K_h must be >= 1, got {self.K_h!r}")
        if not 0.0 < self.twist_fraction < 1.0:
            raise DomainError("twist_fraction must lie in (0, 1)")

    @property
    def exponent(self) -> float:
        """``M**X`` for ``M > 1`` (``log Delta / log delta``), the twist fraction for ``M == 1``."""
        if self.M > 1.0:
            X = self.X if self.X is not None else choose_X(self.M, self.eps)
            return self.M**X
        if self.M == 1.0:
            return self.twist_fraction
        raise UseReciprocalError(f"modulus ratio {self.M!r} < 1; construct the map for the reciprocal pair")

    @property
    def resolved_X(self) -> float | None:
        if self.M > 1.0:
            return self.X if self.X is not None else choose_X(self.M, self.eps)
        return None

    def satisfies_limit_bound(self) -> bool:
        return self.M <= 1.0 or self.resolved_X < exponent_bound(self.M, self.eps)

    def log_delta(self, t: float) -> float:
        return -math.exp(2.0 * t) * self.m * math.pi

    def log_Delta(self, t: float) -> float:
        return self.exponent * self.log_delta(t)

    def h(self, z):
        return self.c * z + psi_eval(self.psi, z)

    def reciprocal(self) -> "InterpolationParams":
        """Parameters of the inverse comparison (right ray to left ray)."""
        return replace(
            self,
            M=1.0 / self.M,
            m=self.m * self.M,
            c=1.0 / self.c,
            psi=invert_series(self.c, self.psi),
            X=None,
        )

    def oriented(self) -> "InterpolationParams":
        return self.reciprocal() if self.M < 1.0 else self


def psi_eval(coeffs: Sequence[complex], z):
    """``sum_i coeffs[i] * z**(i + 2)``."""
    acc = 0j * z
    for a in reversed(coeffs):
        acc = (acc + a) * z
    return acc * z


def invert_series(c: complex, coeffs: Sequence[complex]) -> tuple[complex, ...]:
    """Higher-order coefficients of the compositional inverse of ``c z + psi(z)``, same truncation."""
    n = len(coeffs) + 1
    h = np.zeros(n + 1, dtype=complex)
    h[1] = c
    h[2:] = coeffs
    g = np.zeros(n + 1, dtype=complex)
    g[1] = 1.0 / c

    def compose(h, g):
        out = np.zeros(n + 1, dtype=complex)
        power = np.zeros(n + 1, dtype=complex)
        power[0] = 1.0
        for k in range(1, n + 1):
            power = np.convolve(power, g)[: n + 1]
            out += h[k] * power
        return out

    for p in range(2, n + 1):
        g[p] = -compose(h, g)[p] / c
    return tuple(g[2:])


# -- threshold ---------------------------------------------------------------


def threshold_time(params: InterpolationParams) -> float:
    """Smallest ``t >= 0`` with ``delta**M < |c| * Delta``, solved in log space."""
    e = params.exponent
    gap = params.M - e
    log_c = math.log(abs(params.c))
    if gap <= 0:
        raise SingularConfigurationError("threshold needs M > M**X")
    if log_c >= 0:
        return 0.0
    # need log_delta(t) < log|c| / gap
    target = log_c / gap
    t = 0.5 * math.log(-target / (params.m * math.pi))
    return max(0.0, t)


# -- the map P -----------------------------------------------------------------


def _p_coeffs(params: InterpolationParams, t: float):
    l0 = params.log_delta(t)
    l1 = params.log_Delta(t)
    span = l1 - l0
    a = (params.M - 1.0) * l0 / span
    return l0, l1, span, a


def eval_P_log(params: InterpolationParams, t: float, w, *, check: bool = True):
    """``log P(exp w)`` for ``w`` with real part in ``[log delta(t), log Delta(t)]``."""
    l0, l1, span, a = _p_coeffs(params, t)
    w = np.asarray(w, dtype=complex)
    u = w.real
    if check:
        tol = _EDGE_RTOL * abs(l0)
        if np.any(u < l0 - tol) or np.any(u > l1 + tol):
            raise DomainError("point outside the annulus delta(t) <= |z| <= Delta(t)")
    s = (u - l0) / span
    out = a * (l1 - u) + s * cmath.log(params.c) + w
    return out if out.ndim else complex(out)


def eval_P(params: InterpolationParams, t: float, z, *, check: bool = True):
    z = np.asarray(z, dtype=complex)
    out = np.exp(eval_P_log(params, t, np.log(z), check=check))
    return out if np.ndim(out) else complex(out)


@dataclass(frozen=True)
class PDilatation:
    value: float
    limit: float


def dilatation_P(params: InterpolationParams, t: float) -> PDilatation:
    """Maximal dilatation of ``P`` at time ``t`` and its ``t -> infinity`` limit.

    In the chart ``w = log z`` the map is ``u + i theta -> (1 + 2T) u + i theta + const``,
    hence ``K = (|T + 1| + |T|) / (|T + 1| - |T|)``.
    """
    l0, l1, span, a = _p_coeffs(params, t)
    T = 0.5 * (cmath.log(params.c) / span - a)
    num, den = abs(T + 1.0) + abs(T), abs(T + 1.0) - abs(T)
    if not den > 0:
        raise SingularConfigurationError(f"degenerate dilatation formula at t={t!r} (|T+1| = |T|)")
    e = params.exponent
    limit = (params.M - e) / (1.0 - e) if params.M > 1.0 else 1.0
    return PDilatation(num / den, limit)


# -- the map Q -----------------------------------------------------------------


def _check_radius(z, lo, hi):
    r = np.abs(z)
    if np.any(r < lo * (1 - _EDGE_RTOL)) or np.any(r > hi * (1 + _EDGE_RTOL)):
        raise DomainError(f"point outside the annulus {lo!r} <= |z| <= {hi!r}")


def eval_Q_delta(params: InterpolationParams, Delta: float, z, *, check: bool = True):
    """``Q(z) = c z + (|z|/Delta - 1) psi(z)`` on ``Delta <= |z| <= 2 Delta``."""
    z = np.asarray(z, dtype=complex)
    if check:
        _check_radius(z, Delta, 2 * Delta)
    out = params.c * z + (np.abs(z) / Delta - 1.0) * psi_eval(params.psi, z)
    return out if out.ndim else complex(out)


def eval_Q(params: InterpolationParams, t: float, z, *, check: bool = True):
    return eval_Q_delta(params, math.exp(params.log_Delta(t)), z, check=check)


def q_derivatives(params: InterpolationParams, log_Delta: float, zeta):
    """``(dQ/dz, dQ/dzbar)`` at ``z = Delta * zeta`` from the closed-form derivatives.

    Powers of ``Delta`` are formed from ``log_Delta`` so tiny annuli are fine.
    """
    zeta = np.asarray(zeta, dtype=complex)
    rho = np.abs(zeta)
    phase = zeta / rho
    psi_over_D = np.zeros_like(zeta)
    dpsi = np.zeros_like(zeta)
    for i, a in enumerate(params.psi):
        p = i + 2
        scale = math.exp((p - 1) * log_Delta)
        psi_over_D = psi_over_D + a * scale * zeta**p
        dpsi = dpsi + p * a * scale * zeta ** (p - 1)
    dzbar = 0.5 * phase * psi_over_D
    dz = params.c + 0.5 * np.conj(phase) * psi_over_D + (rho - 1.0) * dpsi
    return dz, dzbar


def q_dilatation_sup(params: InterpolationParams, log_Delta: float, n_r: int = 33, n_theta: int = 256) -> float:
    if not params.psi or not any(params.psi):
        return 1.0
    r = np.linspace(1.0, 2.0, n_r)
    th = np.linspace(0.0, 2 * np.pi, n_theta, endpoint=False)
    zeta = (r[:, None] * np.exp(1j * th[None, :])).ravel()
    dz, dzbar = q_derivatives(params, log_Delta, zeta)
    a, b = np.abs(dz), np.abs(dzbar)
    if np.any(a <= b):
        raise NotOrientationPreservingError("Q has non-positive Jacobian on its annulus")
    return float(np.max((a + b) / (a - b)))


def tail_constant(params: InterpolationParams, Delta: float, n: int = 512) -> float:
    """``C`` with ``|psi(z)| <= C Delta**2`` on ``|z| <= 2 Delta`` (maximum modulus on the outer circle)."""
    z = 2 * Delta * np.exp(2j * np.pi * np.arange(n) / n)
    return float(np.max(np.abs(psi_eval(params.psi, z)))) / Delta**2


# -- finite-difference Beltrami oracle ----------------------------------------


@dataclass(frozen=True)
class BeltramiSample:
    mu: complex
    K: float
    jacobian: float
    dz: complex
    dzbar: complex


def _fd(f, z, h):
    fx = (f(z + h) - f(z - h)) / (2 * h)
    fy = (f(z + 1j * h) - f(z - 1j * h)) / (2 * h)
    return 0.5 * (fx - 1j * fy), 0.5 * (fx + 1j * fy)


def _k_from(dz, dzbar):
    if not abs(dzbar) < abs(dz):
        raise NotOrientationPreservingError(f"|dzbar| = {abs(dzbar):.6g} >= |dz| = {abs(dz):.6g}")
    mu = dzbar / dz
    return mu, (1 + abs(mu)) / (1 - abs(mu))


def beltrami_numeric(f: Callable, z: complex, h: float, *, rtol: float = 1e-6, check: bool = True) -> BeltramiSample:
    """Beltrami coefficient of ``f`` at ``z`` by central differences with step ``h``.

    With ``check`` the dilatation is recomputed at ``h/2`` and the sample is refused
    when the two differ by more than ``10 * rtol`` (relative).
    """
    z = complex(z)
    dz, dzbar = _fd(f, z, h)
    mu, K = _k_from(dz, dzbar)
    if check:
        K2 = _k_from(*_fd(f, z, h / 2))[1]
        if abs(K - K2) > 10 * rtol * K:
            raise NumericalInstabilityError(f"K(h)={K!r} vs K(h/2)={K2!r} at z={z!r}")
    return BeltramiSample(mu, K, abs(dz) ** 2 - abs(dzbar) ** 2, dz, dzbar)


# -- piecewise maps --------------------------------------------------------------


@dataclass(frozen=True)
class Piece:
    name: str
    contains: Callable[[complex], bool]
    fn: Callable


@dataclass(frozen=True)
class Seam:
    """A curve shared by two pieces; ``sample(n, rng)`` returns points on it."""

    left: str
    right: str
    sample: Callable[[int, np.random.Generator], np.ndarray]


@dataclass(frozen=True)
class PiecewiseMap:
    pieces: tuple[Piece, ...]
    seams: tuple[Seam, ...] = ()

    def piece(self, name: str) -> Piece:
        for p in self.pieces:
            if p.name == name:
                return p
        raise KeyError(name)

    def __call__(self, z):
        z = complex(z)
        for p in self.pieces:
            if p.contains(z):
                return complex(p.fn(z))
        raise DomainError(f"{z!r} is outside the domain of the piecewise map")

    def seam_mismatch(self, n: int = 1000, rng: np.random.Generator | None = None) -> dict[str, float]:
        """Largest ``|f_left(z) - f_right(z)| / |z|`` over ``n`` points of each seam, keyed by piece pair."""
        rng = rng if rng is not None else np.random.default_rng(0)
        out: dict[str, float] = {}
        for s in self.seams:
            z = s.sample(n, rng)
            a = np.asarray(self.piece(s.left).fn(z))
            b = np.asarray(self.piece(s.right).fn(z))
            key = f"{s.left}|{s.right}"
            out[key] = max(out.get(key, 0.0), float(np.max(np.abs(a - b) / np.abs(z))))
        return out


def build_F(params: InterpolationParams, t: float, series_radius: float = 1.0) -> PiecewiseMap:
    """The comparison map on one half-cylinder, with the end-point map ``h`` as its power series."""
    p = params
    l0, l1 = p.log_delta(t), p.log_Delta(t)
    D = math.exp(l1)
    if D == 0.0:
        raise DomainError(f"Delta(t) underflows at t={t!r}; evaluate P in the log chart instead")

    def in_P(z):
        lr = math.log(abs(z)) if z else -math.inf
        return l0 * (1 + _EDGE_RTOL) <= lr <= l1 + _EDGE_RTOL * abs(l1)

    def on_circle(radius):
        return lambda n, rng: radius * np.exp(2j * np.pi * rng.random(n))

    pieces = (
        Piece("P", in_P, lambda z: eval_P(p, t, z, check=False)),
        Piece("Q", lambda z: D <= abs(z) <= 2 * D, lambda z: eval_Q_delta(p, D, z, check=False)),
        Piece("h", lambda z: 2 * D <= abs(z) <= series_radius, p.h),
    )
    seams = (Seam("P", "Q", on_circle(D)), Seam("Q", "h", on_circle(2 * D)))
    return PiecewiseMap(pieces, seams)


@dataclass(frozen=True)
class PieceReport:
    label: str
    side: int
    M: float
    K_P: float
    K_P_limit: float
    K_Q: float
    K_h: float
    series_ok: bool

    @property
    def K_F(self) -> float:
        return max(self.K_P, self.K_Q, self.K_h)


@dataclass(frozen=True)
class FAssembly:
    t: float
    K: float
    pieces: tuple[PieceReport, ...] = field(default_factory=tuple)

    @property
    def half_log_K(self) -> float:
        return 0.5 * math.log(self.K)


def twist_audit(params_seq: Sequence[InterpolationParams]) -> None:
    by_label: dict[str, list[InterpolationParams]] = {}
    for p in params_seq:
        by_label.setdefault(p.label, []).append(p)
    for label, ps in by_label.items():
        sides = {p.side: p for p in ps}
        if 1 in sides and 2 in sides:
            total = cmath.phase(sides[1].c) + cmath.phase(sides[2].c)
            if not abs(total) < 2 * math.pi:
                raise HomotopyViolationError(f"cylinder {label!r}: |arg c1 + arg c2| = {abs(total)!r} >= 2 pi")


def assemble_F(
    params_seq: Sequence[InterpolationParams], t: float, *, series_radius: float = 1.0
) -> FAssembly:
    """Dilatation of the glued comparison map ``F_t`` and the contribution of every piece.

    Half-cylinders with ``M < 1`` are handled through the inverse map, which has
    the same dilatation.
    """
    twist_audit(params_seq)
    reports = []
    for params in params_seq:
        p = params.oriented()
        t0 = threshold_time(p)
        if t < t0 * (1 - 1e-12):
            raise DomainError(f"t={t!r} is below the threshold time {t0!r} for {params.label!r}/{params.side}")
        kp = dilatation_P(p, t)
        log_D = p.log_Delta(t)
        kq = q_dilatation_sup(p, log_D)
        series_ok = log_D + math.log(2.0) < math.log(series_radius)
        reports.append(PieceReport(params.label, params.side, params.M, kp.value, kp.limit, kq, params.K_h, series_ok))
    K = max(r.K_F for r in reports)
    return FAssembly(t, K, tuple(reports))


# -- node correction H_eps -------------------------------------------------------


def _h_case1(e, x, y):
    return x + 1j * y


def _h_case2(e, x, y):
    return x + 1j * (y - e**3) / (1 - e)


def _h_case3(e, x, y):
    return x + 1j * (x + 1 - e - e**2) / (1 - e) * y


def _h_case4(e, x, y):
    return x + 1j * ((1 - e**2 - e * (x + 1 - e - e**2)) * y + e**2 * (x - e)) / (1 - e) ** 2


H_CASES = {"H1": _h_case1, "H2": _h_case2, "H3": _h_case3, "H4": _h_case4}


def h_outer(eps: float, z):
    z = np.asarray(z, dtype=complex)
    out = z.real + 1j * (1 + eps) * z.imag
    return out if out.ndim else complex(out)


def _h_case_name(e, x, y):
    e2 = e * e
    if x <= e2 and y <= e2:
        return "H1"
    if x <= e2:
        return "H2"
    if y <= e2:
        return "H3"
    return "H4"


def eval_H(eps: float, z: complex) -> complex:
    """Node correction on ``[-eps, eps] x [0, eps]`` minus the origin (mirror-symmetric in ``x``)."""
    if not 0.0 < eps < 1.0:
        raise DomainError(f"eps must lie in (0, 1), got {eps!r}")
    z = complex(z)
    x, y = z.real, z.imag
    tol = _EDGE_RTOL * eps
    if z == 0:
        raise DomainError("H is not defined at the node z = 0")
    if abs(x) > eps + tol or y < -tol or y > eps + tol:
        raise DomainError(f"{z!r} outside [-eps, eps] x [0, eps]")
    ax = abs(x)
    w = H_CASES[_h_case_name(eps, ax, y)](eps, ax, y)
    return complex(-w.real, w.imag) if x < 0 else w


def _mirror(fn):
    def g(e, x, y):
        w = fn(e, -x, y)
        return -np.real(w) + 1j * np.imag(w)

    return g


def build_H(eps: float) -> PiecewiseMap:
    """``H_eps`` on ``[-eps, eps] x [0, eps]`` together with the outer map ``x + i(1+eps) y``."""
    e = eps
    e2 = e * e

    def piece(name, fn, xr, yr):
        def contains(z):
            return xr[0] <= z.real <= xr[1] and yr[0] <= z.imag <= yr[1] and z != 0

        return Piece(name, contains, lambda z: fn(e, np.real(z), np.imag(z)))

    pieces = [
        piece("H1", _h_case1, (0, e2), (0, e2)),
        piece("H2", _h_case2, (0, e2), (e2, e)),
        piece("H3", _h_case3, (e2, e), (0, e2)),
        piece("H4", _h_case4, (e2, e), (e2, e)),
    ]
    pieces += [
        piece("-" + name, _mirror(H_CASES[name]), (-xr1, -xr0), yr)
        for name, (xr0, xr1), yr in [
            ("H1", (0, e2), (0, e2)),
            ("H2", (0, e2), (e2, e)),
            ("H3", (e2, e), (0, e2)),
            ("H4", (e2, e), (e2, e)),
        ]
    ]
    pieces.append(Piece("outer", lambda z: True, lambda z: h_outer(e, z)))

    def hseg(y, x0, x1):
        return lambda n, rng: (x0 + (x1 - x0) * rng.random(n)) + 1j * y

    def vseg(x, y0, y1):
        return lambda n, rng: x + 1j * (y0 + (y1 - y0) * rng.random(n))

    def nonzero(sampler):
        def s(n, rng):
            z = sampler(n, rng)
            return np.where(z == 0, complex(e2 / 2, e2 / 2), z)

        return s

    seams = [
        Seam("H1", "H2", nonzero(hseg(e2, 0, e2))),
        Seam("H1", "H3", nonzero(vseg(e2, 0, e2))),
        Seam("H2", "H4", vseg(e2, e2, e)),
        Seam("H3", "H4", hseg(e2, e2, e)),
        Seam("H2", "outer", hseg(e, 0, e2)),
        Seam("H4", "outer", hseg(e, e2, e)),
        Seam("H3", "outer", vseg(e, 0, e2)),
        Seam("H4", "outer", vseg(e, e2, e)),
        Seam("H1", "-H1", nonzero(vseg(0.0, 0, e2))),
        Seam("H2", "-H2", vseg(0.0, e2, e)),
        Seam("-H2", "outer", hseg(e, -e2, 0)),
        Seam("-H4", "outer", hseg(e, -e, -e2)),
        Seam("-H3", "outer", vseg(-e, 0, e2)),
        Seam("-H4", "outer", vseg(-e, e2, e)),
    ]
    return PiecewiseMap(tuple(pieces), tuple(seams))


def h_dilatation_sup(eps: float, n: int = 24, *, include_outer: bool = False) -> float:
    """Numerical sup of ``K(H_eps)`` over interior sample points of every piece."""
    hm = build_H(eps)
    e, e2 = eps, eps * eps
    boxes = {"H1": (0, e2, 0, e2), "H2": (0, e2, e2, e), "H3": (e2, e, 0, e2), "H4": (e2, e, e2, e)}
    best = 1.0
    for name, (x0, x1, y0, y1) in boxes.items():
        fn = hm.piece(name).fn
        diam = math.hypot(x1 - x0, y1 - y0)
        h = 1e-5 * diam
        # stay 2h away from seams so each stencil sees one formula
        xs = np.linspace(x0 + 4 * h, x1 - 4 * h, n)
        ys = np.linspace(y0 + 4 * h, y1 - 4 * h, n)
        for x in xs:
            for y in ys:
                best = max(best, beltrami_numeric(fn, complex(x, y), h).K)
    if include_outer:
        best = max(best, 1 + eps)
    return best


# -- boundary maps -----------------------------------------------------------------


def quasisymmetry_quotient(f: Callable, x, t):
    return (f(x + t) - f(x)) / (f(x) - f(x - t))


# evaluation points live on 2**-_LATTICE_BITS * Z, where x +- t is exact for |x|, t < 2**_LATTICE_SPAN
_LATTICE_BITS = 30
_LATTICE_SPAN = 22


def _snap(v):
    return np.ldexp(np.round(np.ldexp(v, _LATTICE_BITS)), -_LATTICE_BITS)


def _grid_axes(x_range, t_range, grid):
    t_lo, t_hi = t_range
    x_lo, x_hi = x_range
    half = grid // 2
    mag = t_lo
    neg = -np.geomspace(max(-x_lo, mag), mag, half) if x_lo < 0 else np.empty(0)
    pos = np.geomspace(mag, x_hi, grid - half) if x_hi > 0 else np.empty(0)
    zero = [0.0] if x_lo <= 0 <= x_hi else []
    xs = np.unique(_snap(np.concatenate([neg, zero, pos])))
    ts = np.unique(_snap(np.geomspace(t_lo, t_hi, grid)))
    return xs, ts


def quasisymmetry_sup(
    f: Callable,
    x_range: tuple[float, float] = (-1e3, 1e3),
    t_range: tuple[float, float] = (1e-3, 1e3),
    grid: int = 200,
    *,
    refine: bool = True,
    rounds: int = 4,
) -> float:
    """Numerical ``sup_{x, t>0} (f(x+t) - f(x)) / (f(x) - f(x-t))``.

    A log-spaced grid search followed by alternating bounded 1-D maximisation
    around the best cell. This is a numerical supremum, not a certified bound.
    Points are rounded to a dyadic lattice so maps with dyadic affine
    coefficients are evaluated without rounding.
    """
    if not 0 < t_range[0] < t_range[1]:
        raise DomainError("t_range must be positive and increasing")
    bound = 2.0**_LATTICE_SPAN
    if max(abs(x_range[0]), abs(x_range[1])) + t_range[1] >= bound or t_range[0] < 2.0 ** (8 - _LATTICE_BITS):
        raise DomainError(f"ranges must satisfy |x| + t < 2**{_LATTICE_SPAN} and t >= 2**{8 - _LATTICE_BITS}")
    xs, ts = _grid_axes(x_range, t_range, grid)
    X, T = np.meshgrid(xs, ts, indexing="ij")
    fx = np.asarray(f(X), dtype=float)
    num = np.asarray(f(X + T), dtype=float) - fx
    den = fx - np.asarray(f(X - T), dtype=float)
    if not (np.all(num > 0) and np.all(den > 0)):
        raise DomainError("f is not strictly increasing on the sampled range")
    q = num / den
    i, j = np.unravel_index(int(np.argmax(q)), q.shape)
    best = float(q[i, j])
    if not refine:
        return best

    def val(x, t):
        x, t = float(_snap(x)), float(_snap(t))
        v = float(quasisymmetry_quotient(f, x, t))
        if not v > 0:
            raise DomainError("quasisymmetry quotient must be positive")
        return v

    x, t = float(xs[i]), float(ts[j])
    xa, xb = float(xs[max(i - 1, 0)]), float(xs[min(i + 1, len(xs) - 1)])
    ta, tb = float(ts[max(j - 1, 0)]), float(ts[min(j + 1, len(ts) - 1)])
    for _ in range(rounds):
        if xb > xa:
            r = minimize_scalar(lambda s: -val(s, t), bounds=(xa, xb), method="bounded", options={"xatol": 1e-12 * max(1.0, abs(x))})
            if -r.fun > val(x, t):
                x = float(_snap(r.x))
        if tb > ta:
            r = minimize_scalar(lambda s: -val(x, s), bounds=(ta, tb), method="bounded", options={"xatol": 1e-12 * t})
            if -r.fun > val(x, t):
                t = float(_snap(r.x))
    return max(best, val(x, t))


def _is_inf(z) -> bool:
    return z is None or cmath.isinf(complex(z))


def cross_ratio(z1, z2, z3, z4) -> complex:
    """``(z1 - z2)/(z1 - z3) * (z3 - z4)/(z2 - z4)`` on the Riemann sphere.

    ``math.inf`` (or ``None``) stands for the point at infinity; its two factors are
    replaced by their limit ``+-1``.
    """
    pts = [z1, z2, z3, z4]
    infs = [k for k, z in enumerate(pts) if _is_inf(z)]
    if len(infs) > 1:
        raise UndefinedCrossRatioError("more than one point at infinity")
    a, b, c, d = (None if _is_inf(z) else complex(z) for z in pts)
    k = infs[0] if infs else None
    if k is None:
        den = (a - c) * (b - d)
        if den == 0:
            raise UndefinedCrossRatioError("degenerate quadruple")
        return (a - b) * (c - d) / den
    if k == 0:
        num, den = (c - d), (b - d)
    elif k == 1:
        num, den = -(c - d), (a - c)
    elif k == 2:
        num, den = -(a - b), (b - d)
    else:
        num, den = (a - b), (a - c)
    if den == 0:
        raise UndefinedCrossRatioError("degenerate quadruple")
    return num / den

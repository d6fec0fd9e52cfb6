"""Scenario files (pair, params, domain) and table output."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Sequence

from .errors import SpecParseError, StrebelError
from .oracle import GridDomain
from .qc_maps import InterpolationParams
from .surface import CylinderDecomposition, NotSimilar, RaySpec, SimilarPair, similarity_check


def read_json(path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise SpecParseError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise SpecParseError(f"{path}: invalid JSON: {exc}") from exc


def parse_grid(text: str) -> list[float]:
    """``start:stop:step`` (inclusive of ``stop`` up to rounding) or a comma list."""
    try:
        if ":" in text:
            start, stop, step = (float(s) for s in text.split(":"))
            if not step > 0 or stop < start:
                raise ValueError("need step > 0 and stop >= start")
            n = int(math.floor((stop - start) / step + 1e-9))
            return [start + i * step for i in range(n + 1)]
        return [float(s) for s in text.split(",") if s.strip()]
    except ValueError as exc:
        raise SpecParseError(f"bad grid {text!r}: {exc}") from exc


def check_grid(values: Sequence[float], name: str, *, nonnegative: bool = False) -> list[float]:
    vals = [float(v) for v in values]
    if not vals:
        raise SpecParseError(f"{name} grid is empty")
    if not all(math.isfinite(v) for v in vals):
        raise SpecParseError(f"{name} grid has non-finite values")
    if nonnegative and any(v < 0 for v in vals):
        raise SpecParseError(f"{name} grid must be non-negative")
    return vals


def as_complex(v) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, Sequence) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    raise SpecParseError(f"expected a number or [re, im], got {v!r}")


def _surface_from(entry, base: Path) -> CylinderDecomposition:
    if isinstance(entry, str):
        return CylinderDecomposition.from_dict(read_json(base / entry))
    if isinstance(entry, Mapping):
        return CylinderDecomposition.from_dict(entry)
    raise SpecParseError("surface must be an object or a path")


@dataclass
class PairScenario:
    left: CylinderDecomposition
    right: CylinderDecomposition
    curve_match: dict[str, str] | None
    end_distance: float
    eps: float = 0.05
    K_h: float | None = None
    c: dict[str, tuple[complex, complex]] = field(default_factory=dict)
    psi: dict[str, tuple[complex, ...]] = field(default_factory=dict)
    t_grid: list[float] | None = None
    alpha_grid: list[float] | None = None

    def pair(self) -> SimilarPair | NotSimilar:
        res = similarity_check(RaySpec(self.left, "left"), RaySpec(self.right, "right"), self.curve_match)
        if isinstance(res, NotSimilar):
            return res
        return res.with_end_distance(self.end_distance)

    def interpolation_params(self, pair: SimilarPair) -> list[InterpolationParams]:
        K_h = self.K_h if self.K_h is not None else math.exp(2 * self.end_distance)
        out = []
        for (lab, _), m, mp in zip(pair.curve_match, pair.left_moduli, pair.right_moduli):
            cs = self.c.get(lab, (1.0, 1.0))
            for side in (1, 2):
                out.append(
                    InterpolationParams(
                        M=mp / m, m=m, c=cs[side - 1], psi=self.psi.get(lab, ()), eps=self.eps,
                        K_h=K_h, label=lab, side=side,
                    )
                )
        return out


def load_pair(path) -> PairScenario:
    path = Path(path)
    data = read_json(path)
    try:
        interp = data.get("interpolation", {}) or {}
        c = {}
        for lab, v in (interp.get("c") or {}).items():
            if isinstance(v, Sequence) and len(v) == 2 and isinstance(v[0], (list, tuple)):
                c[lab] = (as_complex(v[0]), as_complex(v[1]))
            else:
                c[lab] = (as_complex(v),) * 2
        psi = {lab: tuple(as_complex(a) for a in v) for lab, v in (interp.get("psi") or {}).items()}
        end = data.get("end_distance")
        if end is None:
            raise SpecParseError("pair file needs end_distance")
        return PairScenario(
            left=_surface_from(data["left"], path.parent),
            right=_surface_from(data["right"], path.parent),
            curve_match=data.get("curve_match"),
            end_distance=float(end),
            eps=float(interp.get("eps", 0.05)),
            K_h=interp.get("K_h"),
            c=c,
            psi=psi,
            t_grid=data.get("t_grid"),
            alpha_grid=data.get("alpha_grid"),
        )
    except StrebelError:
        raise
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise SpecParseError(f"{path}: malformed pair file: {exc!r}") from exc


@dataclass
class ParamsScenario:
    annuli: list[InterpolationParams]
    t_grid: list[float] | None = None
    eps_grid: list[float] | None = None


def params_from_dict(d: Mapping) -> InterpolationParams:
    return InterpolationParams(
        M=float(d["M"]),
        m=float(d.get("m", 1.0)),
        c=as_complex(d.get("c", 1.0)),
        psi=tuple(as_complex(a) for a in d.get("psi", [])),
        eps=float(d.get("eps", 0.05)),
        X=None if d.get("X") is None else float(d["X"]),
        K_h=float(d.get("K_h", 1.0)),
        label=str(d.get("label", "")),
        side=int(d.get("side", 1)),
    )


def load_params(path) -> ParamsScenario:
    data = read_json(path)
    try:
        items = data["annuli"] if isinstance(data, Mapping) and "annuli" in data else data
        if isinstance(items, Mapping):
            items = [items]
        annuli = [params_from_dict(d) for d in items]
        if not annuli:
            raise SpecParseError("params file lists no annuli")
        grids = data if isinstance(data, Mapping) else {}
        return ParamsScenario(annuli, grids.get("t_grid"), grids.get("eps_grid"))
    except StrebelError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecParseError(f"{path}: malformed params file: {exc!r}") from exc


def load_domain(path, resolution: int | None = None) -> GridDomain:
    data = read_json(path)
    try:
        kind = data["kind"]
        res = int(resolution if resolution is not None else data.get("resolution", 64))
        if kind == "quadrilateral":
            return GridDomain("quadrilateral", a=float(data["a"]), b=float(data["b"]),
                              marked=data.get("marked", "horizontal"), resolution=res)
        if kind == "annulus":
            if "m" in data:
                r_in = math.exp(-float(data["m"]) * math.pi)
            else:
                r_in = float(data["r_in"])
            return GridDomain("annulus", r_in=r_in, r_out=float(data.get("r_out", 1.0)), resolution=res)
        raise SpecParseError(f"unknown domain kind {kind!r}")
    except StrebelError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecParseError(f"{path}: malformed domain file: {exc!r}") from exc


def fmt(v) -> str:
    if isinstance(v, str):
        return v
    if v is None:
        return ""
    return f"{float(v):.12g}"


def to_csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()

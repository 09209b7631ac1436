"""Forward and inverse map projections on the unit sphere.

Supported projections: Mercator, Robinson, Gall-Peters and Albers equal-area
conic with six regional presets.  Map units are unit-sphere lengths with y
increasing northward; the screen y-flip happens in the scene fit, not here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InputError, PoleSingularity

MERCATOR_MAX_LAT = 89.999

# Regional standard parallels / origin / central meridian (degrees).
# Widely used parameter sets; Africa follows the common continental Albers
# configuration because symmetric parallels about the equator degenerate
# (the cone constant would be zero).
ALBERS_PRESETS: dict[str, tuple[float, float, float, float]] = {
    "US": (29.5, 45.5, 37.5, -96.0),
    "Europe": (43.0, 62.0, 52.5, 10.0),
    "Africa": (20.0, -23.0, 0.0, 25.0),
    "SouthAmerica": (-5.0, -42.0, -32.0, -60.0),
    "Australia": (-18.0, -36.0, -27.0, 134.0),
    "China": (25.0, 47.0, 36.0, 105.0),
}

# Robinson lookup table, one row per 5 degrees of latitude: scaled meridian
# length (X) and scaled parallel distance from the equator (Y).
_ROBINSON_X = (
    1.0000, 0.9986, 0.9954, 0.9900, 0.9822, 0.9730, 0.9600, 0.9427, 0.9216,
    0.8962, 0.8679, 0.8350, 0.7986, 0.7597, 0.7186, 0.6732, 0.6213, 0.5722,
    0.5322,
)
_ROBINSON_Y = (
    0.0000, 0.0620, 0.1240, 0.1860, 0.2480, 0.3100, 0.3720, 0.4340, 0.4958,
    0.5571, 0.6176, 0.6769, 0.7346, 0.7903, 0.8435, 0.8936, 0.9394, 0.9761,
    1.0000,
)
_ROBINSON_XSCALE = 0.8487
_ROBINSON_YSCALE = 1.3523


@dataclass(frozen=True)
class ProjectionSpec:
    """A projection choice plus its parameters.

    ``kind`` is one of ``mercator``, ``robinson``, ``gall_peters`` or
    ``albers``.  Albers carries standard parallels ``phi1``/``phi2``, the
    latitude of origin ``phi0`` and central meridian ``lam0`` (degrees),
    normally taken from :data:`ALBERS_PRESETS` via ``preset``.
    """

    kind: str
    preset: str | None = None
    phi1: float = 0.0
    phi2: float = 0.0
    phi0: float = 0.0
    lam0: float = 0.0

    def __post_init__(self):
        if self.kind not in ("mercator", "robinson", "gall_peters", "albers"):
            raise InputError(f"unknown projection kind {self.kind!r}")
        if self.kind == "albers":
            for v in (self.phi1, self.phi2, self.phi0, self.lam0):
                if not math.isfinite(v):
                    raise InputError("albers parameters must be finite")
            if math.isclose(math.sin(math.radians(self.phi1)),
                            -math.sin(math.radians(self.phi2))):
                raise InputError("albers standard parallels must not be opposite")

    @classmethod
    def mercator(cls) -> "ProjectionSpec":
        return cls("mercator")

    @classmethod
    def robinson(cls) -> "ProjectionSpec":
        return cls("robinson")

    @classmethod
    def gall_peters(cls) -> "ProjectionSpec":
        return cls("gall_peters")

    @classmethod
    def albers(cls, preset: str) -> "ProjectionSpec":
        try:
            phi1, phi2, phi0, lam0 = ALBERS_PRESETS[preset]
        except KeyError:
            raise InputError(
                f"unknown albers preset {preset!r} (choose from {', '.join(ALBERS_PRESETS)})"
            ) from None
        return cls("albers", preset=preset, phi1=phi1, phi2=phi2, phi0=phi0, lam0=lam0)

    @classmethod
    def albers_custom(cls, phi1: float, phi2: float, phi0: float, lam0: float) -> "ProjectionSpec":
        return cls("albers", phi1=phi1, phi2=phi2, phi0=phi0, lam0=lam0)

    @property
    def display_name(self) -> str:
        if self.kind == "mercator":
            return "Mercator"
        if self.kind == "robinson":
            return "Robinson"
        if self.kind == "gall_peters":
            return "Gall-Peters"
        region = self.preset or "custom"
        return f"Albers equal-area ({region})"

    def to_dict(self) -> dict:
        if self.kind == "albers":
            d: dict = {"kind": "albers"}
            if self.preset is not None:
                d["preset"] = self.preset
            else:
                d.update(phi1=self.phi1, phi2=self.phi2, phi0=self.phi0, lam0=self.lam0)
            return d
        return {"kind": self.kind}

    @classmethod
    def from_dict(cls, d: dict) -> "ProjectionSpec":
        kind = d.get("kind")
        if kind == "albers":
            if "preset" in d:
                return cls.albers(d["preset"])
            return cls.albers_custom(d["phi1"], d["phi2"], d["phi0"], d["lam0"])
        if not isinstance(kind, str):
            raise InputError("projection spec needs a 'kind' string")
        return cls(kind)


def _albers_constants(spec: ProjectionSpec) -> tuple[float, float, float, float]:
    f1 = math.radians(spec.phi1)
    f2 = math.radians(spec.phi2)
    f0 = math.radians(spec.phi0)
    n = 0.5 * (math.sin(f1) + math.sin(f2))
    c = math.cos(f1) ** 2 + 2.0 * n * math.sin(f1)
    rho0 = math.sqrt(c - 2.0 * n * math.sin(f0)) / n
    return n, c, rho0, math.radians(spec.lam0)


def _robinson_row(abs_lat: float) -> tuple[float, float]:
    i = min(int(abs_lat // 5.0), 17)
    t = (abs_lat - 5.0 * i) / 5.0
    x = _ROBINSON_X[i] + (_ROBINSON_X[i + 1] - _ROBINSON_X[i]) * t
    y = _ROBINSON_Y[i] + (_ROBINSON_Y[i + 1] - _ROBINSON_Y[i]) * t
    return x, y


def project_point(spec: ProjectionSpec, lon: float, lat: float) -> tuple[float, float]:
    """Forward-project WGS84 degrees to map units (y grows northward)."""
    if not (math.isfinite(lon) and math.isfinite(lat)):
        raise InputError(f"non-finite coordinate ({lon!r}, {lat!r})")
    lam = math.radians(lon)
    phi = math.radians(lat)
    if spec.kind == "mercator":
        if abs(lat) >= MERCATOR_MAX_LAT:
            raise PoleSingularity(lat)
        # atanh(sin phi) == ln(tan(pi/4 + phi/2)), exact at the equator
        return lam, math.atanh(math.sin(phi))
    if spec.kind == "gall_peters":
        return lam / math.sqrt(2.0), math.sqrt(2.0) * math.sin(phi)
    if spec.kind == "robinson":
        xf, yf = _robinson_row(abs(lat))
        y = _ROBINSON_YSCALE * yf
        return _ROBINSON_XSCALE * xf * lam, y if lat >= 0 else -y
    n, c, rho0, lam0 = _albers_constants(spec)
    rho = math.sqrt(max(c - 2.0 * n * math.sin(phi), 0.0)) / n
    theta = n * (lam - lam0)
    return rho * math.sin(theta), rho0 - rho * math.cos(theta)


def unproject_point(spec: ProjectionSpec, x: float, y: float) -> tuple[float, float]:
    """Inverse of :func:`project_point`, returning (lon, lat) degrees."""
    if spec.kind == "mercator":
        return math.degrees(x), math.degrees(math.asin(math.tanh(y)))
    if spec.kind == "gall_peters":
        return math.degrees(x * math.sqrt(2.0)), math.degrees(math.asin(y / math.sqrt(2.0)))
    if spec.kind == "robinson":
        yf = abs(y) / _ROBINSON_YSCALE
        # Y is piecewise linear and strictly increasing: invert the segment.
        i = 17
        for j in range(18):
            if yf <= _ROBINSON_Y[j + 1]:
                i = j
                break
        seg = _ROBINSON_Y[i + 1] - _ROBINSON_Y[i]
        t = (yf - _ROBINSON_Y[i]) / seg
        abs_lat = 5.0 * (i + t)
        xf, _ = _robinson_row(abs_lat)
        lon = math.degrees(x / (_ROBINSON_XSCALE * xf))
        return lon, abs_lat if y >= 0 else -abs_lat
    n, c, rho0, lam0 = _albers_constants(spec)
    sgn = 1.0 if n >= 0 else -1.0
    rho = sgn * math.hypot(x, rho0 - y)
    theta = math.atan2(sgn * x, sgn * (rho0 - y))
    sin_phi = (c - (rho * n) ** 2) / (2.0 * n)
    phi = math.asin(min(1.0, max(-1.0, sin_phi)))
    return math.degrees(lam0 + theta / n), math.degrees(phi)

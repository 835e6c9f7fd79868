"""Coordinate transformations between the supported CRS codes.

* EPSG:4326 -- WGS84 longitude/latitude in degrees.
* EPSG:3857 -- spherical Web Mercator on R = 6378137 m.
* EPSG:326zz / 327zz -- UTM zone zz north/south on the WGS84 ellipsoid,
  computed with the 6th-order Krueger series in the form given by
  Karney (2011), "Transverse Mercator with an accuracy of a few nanometers".
"""

from __future__ import annotations

import math

from .errors import CRSError, ProjectionDomainError
from .model import CrsRef

WGS84_A = 6378137.0
WGS84_F = 1 / 298.257223563
UTM_K0 = 0.9996
UTM_FALSE_EASTING = 500000.0
UTM_FALSE_NORTHING_SOUTH = 10000000.0

MERCATOR_MAX_LAT = 85.051129
UTM_MAX_LON_OFFSET = 30.0

_N = WGS84_F / (2 - WGS84_F)
_E2 = WGS84_F * (2 - WGS84_F)
_E = math.sqrt(_E2)


def _series(n: float):
    n2, n3, n4, n5, n6 = n**2, n**3, n**4, n**5, n**6
    alpha = (
        n / 2 - 2 * n2 / 3 + 5 * n3 / 16 + 41 * n4 / 180 - 127 * n5 / 288 + 7891 * n6 / 37800,
        13 * n2 / 48 - 3 * n3 / 5 + 557 * n4 / 1440 + 281 * n5 / 630 - 1983433 * n6 / 1935360,
        61 * n3 / 240 - 103 * n4 / 140 + 15061 * n5 / 26880 + 167603 * n6 / 181440,
        49561 * n4 / 161280 - 179 * n5 / 168 + 6601661 * n6 / 7257600,
        34729 * n5 / 80640 - 3418889 * n6 / 1995840,
        212378941 * n6 / 319334400,
    )
    beta = (
        n / 2 - 2 * n2 / 3 + 37 * n3 / 96 - n4 / 360 - 81 * n5 / 512 + 96199 * n6 / 604800,
        n2 / 48 + n3 / 15 - 437 * n4 / 1440 + 46 * n5 / 105 - 1118711 * n6 / 3870720,
        17 * n3 / 480 - 37 * n4 / 840 - 209 * n5 / 4480 + 5569 * n6 / 90720,
        4397 * n4 / 161280 - 11 * n5 / 504 - 830251 * n6 / 7257600,
        4583 * n5 / 161280 - 108847 * n6 / 3991680,
        20648693 * n6 / 638668800,
    )
    rectifying = WGS84_A / (1 + n) * (1 + n2 / 4 + n4 / 64 + n6 / 256)
    return alpha, beta, rectifying


_ALPHA, _BETA, _A_RECT = _series(_N)


def _taup(tau: float) -> float:
    """Conformal latitude tangent from geodetic latitude tangent."""
    tau1 = math.hypot(1.0, tau)
    sig = math.sinh(_E * math.atanh(_E * tau / tau1))
    return math.hypot(1.0, sig) * tau - sig * tau1


def _tau_from_taup(taup: float) -> float:
    tau = taup
    for _ in range(10):
        taupa = _taup(tau)
        dtau = ((taup - taupa) / math.hypot(1.0, taupa)
                * (1 + (1 - _E2) * tau * tau) / ((1 - _E2) * math.hypot(1.0, tau)))
        tau += dtau
        if abs(dtau) <= 1e-15 * max(1.0, abs(tau)):
            break
    return tau


def utm_central_meridian(zone: int) -> float:
    return -183.0 + 6.0 * zone


def _wrap180(deg: float) -> float:
    d = math.fmod(deg + 180.0, 360.0)
    if d < 0:
        d += 360.0
    return d - 180.0


def tm_forward(lon: float, lat: float, lon0: float) -> tuple[float, float]:
    """Transverse Mercator easting/northing (unscaled offsets, k0 applied)."""
    dlon = _wrap180(lon - lon0)
    lam = math.radians(dlon)
    phi = math.radians(lat)
    taup = _taup(math.tan(phi))
    xip = math.atan2(taup, math.cos(lam))
    etap = math.asinh(math.sin(lam) / math.hypot(taup, math.cos(lam)))
    xi, eta = xip, etap
    for j, a in enumerate(_ALPHA, start=1):
        xi += a * math.sin(2 * j * xip) * math.cosh(2 * j * etap)
        eta += a * math.cos(2 * j * xip) * math.sinh(2 * j * etap)
    return UTM_K0 * _A_RECT * eta, UTM_K0 * _A_RECT * xi


def tm_inverse(x: float, y: float, lon0: float) -> tuple[float, float]:
    xi = y / (UTM_K0 * _A_RECT)
    eta = x / (UTM_K0 * _A_RECT)
    xip, etap = xi, eta
    for j, b in enumerate(_BETA, start=1):
        xip -= b * math.sin(2 * j * xi) * math.cosh(2 * j * eta)
        etap -= b * math.cos(2 * j * xi) * math.sinh(2 * j * eta)
    s = math.sinh(etap)
    c = math.cos(xip)
    taup = math.sin(xip) / math.hypot(s, c)
    lam = math.atan2(s, c)
    tau = _tau_from_taup(taup)
    return _wrap180(lon0 + math.degrees(lam)), math.degrees(math.atan(tau))


def mercator_forward(lon: float, lat: float) -> tuple[float, float]:
    lam = math.radians(lon)
    phi = math.radians(lat)
    return WGS84_A * lam, WGS84_A * math.asinh(math.tan(phi))


def mercator_inverse(x: float, y: float) -> tuple[float, float]:
    lon = math.degrees(x / WGS84_A)
    lat = math.degrees(math.atan(math.sinh(y / WGS84_A)))
    return lon, lat


def _check_finite(p):
    if not (math.isfinite(p[0]) and math.isfinite(p[1])):
        raise ProjectionDomainError(f"non-finite coordinate {p!r}")


def _to_geographic(crs: CrsRef, x: float, y: float) -> tuple[float, float]:
    if crs.epsg == 4326:
        if not -90.0 <= y <= 90.0:
            raise ProjectionDomainError(f"latitude {y} outside [-90, 90]")
        return x, y
    if crs.epsg == 3857:
        return mercator_inverse(x, y)
    zone, south = crs.utm_zone
    northing = y - (UTM_FALSE_NORTHING_SOUTH if south else 0.0)
    return tm_inverse(x - UTM_FALSE_EASTING, northing, utm_central_meridian(zone))


def _from_geographic(crs: CrsRef, lon: float, lat: float) -> tuple[float, float]:
    if crs.epsg == 4326:
        return lon, lat
    if crs.epsg == 3857:
        if abs(lat) >= MERCATOR_MAX_LAT:
            raise ProjectionDomainError(
                f"latitude {lat} outside Web Mercator domain |lat| < {MERCATOR_MAX_LAT}"
            )
        return mercator_forward(lon, lat)
    zone, south = crs.utm_zone
    lon0 = utm_central_meridian(zone)
    if abs(_wrap180(lon - lon0)) > UTM_MAX_LON_OFFSET:
        raise ProjectionDomainError(
            f"longitude {lon} is more than {UTM_MAX_LON_OFFSET} degrees from zone {zone} central meridian"
        )
    if abs(lat) >= 90.0:
        raise ProjectionDomainError(f"latitude {lat} at or beyond the pole")
    e, n = tm_forward(lon, lat, lon0)
    return e + UTM_FALSE_EASTING, n + (UTM_FALSE_NORTHING_SOUTH if south else 0.0)


def project_point(src: CrsRef, dst: CrsRef, p: tuple[float, float]) -> tuple[float, float]:
    """Transform ``p`` from ``src`` to ``dst``.

    Raises :class:`CRSError` when either side is ``None`` and
    :class:`ProjectionDomainError` for points outside the target domain.
    """
    if src.is_none or dst.is_none:
        raise CRSError("cannot transform coordinates with a cleared (None) CRS")
    _check_finite(p)
    if src == dst:
        return (float(p[0]), float(p[1]))
    lon, lat = _to_geographic(src, float(p[0]), float(p[1]))
    return _from_geographic(dst, lon, lat)


def utm_zone_for(lon: float, lat: float) -> CrsRef:
    """UTM CRS whose zone contains ``(lon, lat)``; no Norway/Svalbard exceptions."""
    zone = int(math.floor((_wrap180(lon) + 180.0) / 6.0)) % 60 + 1
    return CrsRef.utm(zone, south=lat < 0)

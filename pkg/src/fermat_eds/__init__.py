"""Divisibility sequences from rational points on u^3 + v^3 = d."""

__version__ = "0.1.0"

from .curves import CubicCurve, CubicPoint, WeierstrassCurve, WeierstrassPoint  # noqa: E402
from .eds import EdsContext, EdsTerm  # noqa: E402
from .power_cert import PowerCertificate, build_certificate, scan_powers  # noqa: E402

__all__ = [
    "CubicCurve",
    "CubicPoint",
    "EdsContext",
    "EdsTerm",
    "PowerCertificate",
    "WeierstrassCurve",
    "WeierstrassPoint",
    "build_certificate",
    "scan_powers",
]

"""Coplanar-waveguide design calculator.

Zero-thickness, infinite-substrate conformal-mapping model: the effective
permittivity is (eps_r + 1) / 2 and the impedance follows from the ratio
of complete elliptic integrals of the geometry modulus k = w / (w + 2s).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

C_LIGHT = 299792458.0  # m/s

AGM_TOL = 1e-12


def ellipk_agm(k: float) -> float:
    """Complete elliptic integral of the first kind K(k), modulus convention.

    Arithmetic-geometric mean iteration, quadratically convergent to
    ``AGM_TOL``.
    """
    if not 0.0 <= k < 1.0:
        raise ValueError(f"modulus must be in [0, 1), got {k}")
    a, b = 1.0, float(np.sqrt(1.0 - k * k))
    while abs(a - b) > AGM_TOL:
        a, b = 0.5 * (a + b), float(np.sqrt(a * b))
    return float(np.pi / (2.0 * a))


@dataclass(frozen=True)
class CpwGeometry:
    """Center conductor width and vacuum gap in um, substrate permittivity."""

    center_width: float
    gap_width: float
    eps_r: float

    def __post_init__(self):
        if self.center_width <= 0 or self.gap_width <= 0:
            raise ValueError("center_width and gap_width must be > 0")
        if self.eps_r < 1:
            raise ValueError(f"eps_r must be >= 1, got {self.eps_r}")


@dataclass(frozen=True)
class CpwDerived:
    z0: float  # ohm
    v_ph: float  # m/s
    eps_eff: float


def cpw_derive(g: CpwGeometry) -> CpwDerived:
    """Characteristic impedance and phase velocity of the CPW geometry."""
    k = g.center_width / (g.center_width + 2.0 * g.gap_width)
    if k <= 0.0 or k >= 1.0:
        raise ValueError(f"degenerate geometry modulus k = {k}")
    kp = float(np.sqrt(1.0 - k * k))
    eps_eff = (g.eps_r + 1.0) / 2.0
    z0 = 30.0 * np.pi * ellipk_agm(kp) / (np.sqrt(eps_eff) * ellipk_agm(k))
    return CpwDerived(z0=float(z0), v_ph=C_LIGHT / float(np.sqrt(eps_eff)),
                      eps_eff=eps_eff)


def wavelength(omega: float, v_ph: float) -> float:
    """Guided wavelength in meters for angular frequency omega in rad/s."""
    if omega <= 0:
        raise ValueError(f"omega must be > 0, got {omega}")
    return 2.0 * np.pi * v_ph / omega


def lambda_ratio_for_freq(freq_ghz: float, geom: CpwGeometry, x2_mm: float = 18.4) -> float:
    """lambda / x2 at the given qubit frequency for this waveguide geometry."""
    if freq_ghz <= 0 or x2_mm <= 0:
        raise ValueError("freq_ghz and x2_mm must be > 0")
    derived = cpw_derive(geom)
    lam = wavelength(2.0 * np.pi * freq_ghz * 1e9, derived.v_ph)
    return lam / (x2_mm * 1e-3)

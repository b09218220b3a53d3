"""Physical model: wavelength-dependent rates, Hamiltonian and Lindblad generator.

All rates are angular frequencies in rad/us; time is in us.  The two-qubit
basis is |b a> (qubit a is the fast index), matching :mod:`wgqed.linalg`.

The Hamiltonian is built in a frame rotating at a common reference
frequency, so only the waveguide-induced shifts and the optional bare
detuning enter; concurrence is invariant under the local z-rotations this
removes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import I2, I4, SIGMA_MINUS, SIGMA_PLUS, SIGMA_Z, tensor

TWO_PI = 2.0 * np.pi

# two-qubit operators, qubit a fast
SM_A = tensor(I2, SIGMA_MINUS)
SP_A = tensor(I2, SIGMA_PLUS)
SZ_A = tensor(I2, SIGMA_Z)
SM_B = tensor(SIGMA_MINUS, I2)
SP_B = tensor(SIGMA_PLUS, I2)
SZ_B = tensor(SIGMA_Z, I2)


def mhz(value: float) -> float:
    """Convert a linear frequency in MHz to angular frequency in rad/us."""
    return TWO_PI * value


@dataclass(frozen=True)
class WaveguideParams:
    """Bare physical parameters of the two-qubit / transmission-line system.

    gamma        bare qubit-waveguide coupling rate (rad/us)
    gamma_nr     intrinsic non-radiative relaxation rate (rad/us)
    lambda_ratio wavelength over qubit separation, dimensionless
    delta_bare   bare qubit detuning omega_a - omega_b (rad/us)
    g            switchable direct exchange coupling (rad/us)
    """

    gamma: float
    gamma_nr: float
    lambda_ratio: float
    delta_bare: float = 0.0
    g: float = 0.0

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")
        if self.gamma_nr < 0:
            raise ValueError(f"gamma_nr must be >= 0, got {self.gamma_nr}")
        if self.lambda_ratio <= 0:
            raise ValueError(f"lambda_ratio must be > 0, got {self.lambda_ratio}")


@dataclass(frozen=True)
class DerivedRates:
    """Wavelength-dependent rates and couplings (all rad/us, phi in rad)."""

    phi: float
    gamma_a: float
    gamma_b: float
    gamma_col: float
    g_x: float
    d_omega1: float
    d_omega2: float


def derive_rates(p: WaveguideParams) -> DerivedRates:
    """Rates and couplings induced by the shorted line at the given wavelength.

    phi = 2*pi*x2/lambda is the propagation phase between the two coupling
    points; every derived quantity is a trigonometric function of phi.
    """
    phi = TWO_PI / p.lambda_ratio
    c1, c2, c3 = np.cos(phi), np.cos(2 * phi), np.cos(3 * phi)
    s1, s2, s3 = np.sin(phi), np.sin(2 * phi), np.sin(3 * phi)
    return DerivedRates(
        phi=phi,
        gamma_a=p.gamma * (1 + c1) + p.gamma_nr,
        gamma_b=p.gamma * (1 + c3) + p.gamma_nr,
        gamma_col=p.gamma * (c1 + c2),
        g_x=p.gamma * (s1 + s2) / 2,
        d_omega1=p.gamma / 2 * s1,
        d_omega2=p.gamma / 2 * s3,
    )


def build_hamiltonian(r: DerivedRates, p: WaveguideParams) -> np.ndarray:
    """Rotating-frame two-qubit Hamiltonian (4x4, Hermitian)."""
    d_a = r.d_omega1 + p.delta_bare / 2
    d_b = r.d_omega2 - p.delta_bare / 2
    exchange = SM_A @ SP_B + SP_A @ SM_B
    return d_a * SZ_A / 2 + d_b * SZ_B / 2 + (r.g_x + p.g) * exchange


def lindblad_generator(h: np.ndarray, jumps: list[tuple[float, np.ndarray]]) -> np.ndarray:
    """Superoperator matrix for rho_dot = -i[H,rho] + sum_k rate_k D[A_k]rho.

    Acts on row-major vectorized density matrices: vec(A rho B) =
    kron(A, B.T) vec(rho).
    """
    dim = h.shape[0]
    eye = np.eye(dim, dtype=complex)
    gen = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    for rate, a in jumps:
        ada = a.conj().T @ a
        gen += rate * (
            np.kron(a, a.conj())
            - 0.5 * np.kron(ada, eye)
            - 0.5 * np.kron(eye, ada.T)
        )
    return gen


def build_generator(r: DerivedRates, p: WaveguideParams) -> np.ndarray:
    """Full Lindblad generator (16x16) including the collective decay term."""
    h = build_hamiltonian(r, p)
    gen = lindblad_generator(h, [(r.gamma_a, SM_A), (r.gamma_b, SM_B)])
    # collective term: s-a rho s+b + s-b rho s+a - 1/2 {s+a s-b + s+b s-a, rho}
    cross = SP_A @ SM_B + SP_B @ SM_A
    gen += r.gamma_col * (
        np.kron(SM_A, SM_B.conj())
        + np.kron(SM_B, SM_A.conj())
        - 0.5 * np.kron(cross, I4)
        - 0.5 * np.kron(I4, cross.T)
    )
    return gen


def apply_generator(gen: np.ndarray, rho: np.ndarray) -> np.ndarray:
    dim = rho.shape[0]
    return (gen @ rho.reshape(-1)).reshape(dim, dim)


def dissipation_min_eigval(r: DerivedRates) -> float:
    """Smallest eigenvalue of the 2x2 decay-rate matrix.

    Negative values signal that the collective rate exceeds the geometric
    mean of the individual rates (the generator is then not completely
    positive).  Diagnostic only: callers may log, never assert.
    """
    m = np.array([[r.gamma_a, r.gamma_col], [r.gamma_col, r.gamma_b]])
    return float(np.linalg.eigvalsh(m).min())

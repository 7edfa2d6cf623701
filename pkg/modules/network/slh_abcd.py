"""
This module houses the SLH description of passive linear networks and its state-space (ABCD) form.

For a network of modes a with Hamiltonian a^dag Omega a, coupling operators L = Phi a and scattering matrix S, the
Heisenberg equations read

    da/dt   = A a + B b_in,       A = -1/2 Phi^dag Phi - i Omega,   B = -Phi^dag S
    b_out   = C a + D b_in,       C = Phi,                          D = S

and, when A does not depend on time, the frequency-domain transfer function is Xi(w) = C (i w I - A)^-1 B + D.
Internal loss is added to the diagonal of A as -kappa_int / 2 rather than through extra ports.

Classes:
    Port
    SlhTriple
    AbcdSystem

Functions:
    abcd_from_slh()
    transfer_function()
    passivity_residual()
    is_lossless()
"""


# Standard Library Imports
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

# Third-Party Library Imports
import numpy as np
from scipy.linalg import lu_factor, lu_solve

# Local Application/Library-Specific Imports
from modules.core.configs import numerical_tolerances
from modules.core.errors import (
    DimensionMismatch,
    NonHermitianOmega,
    NonUnitaryScattering,
    SingularResolvent,
    TimeDependentA,
)


class Port(NamedTuple):
    mode: int
    side: str
    frequency: float = 0.0

    @property
    def name(self):
        return f"c{self.mode + 1}{self.side}"


@dataclass(frozen=True, eq=False)
class SlhTriple:
    S: np.ndarray
    Omega: np.ndarray
    Phi: np.ndarray
    modulation: Optional[Callable] = None   # t -> additional Hermitian mode matrix

    def __post_init__(self):
        S = np.atleast_2d(np.asarray(self.S, dtype=complex))
        Omega = np.atleast_2d(np.asarray(self.Omega, dtype=complex))
        Phi = np.atleast_2d(np.asarray(self.Phi, dtype=complex))

        if S.shape[0] != S.shape[1] or Omega.shape[0] != Omega.shape[1]:
            raise DimensionMismatch(f"S {S.shape} and Omega {Omega.shape} must be square")
        if Phi.shape != (S.shape[0], Omega.shape[0]):
            raise DimensionMismatch(f"Phi must be ports x modes = {(S.shape[0], Omega.shape[0])}, got {Phi.shape}")
        if not np.allclose(S.conj().T @ S, np.eye(S.shape[0]), atol=numerical_tolerances['unitarity'], rtol=0):
            raise NonUnitaryScattering("S is not unitary")
        scale = max(1.0, np.max(np.abs(Omega)))
        if np.max(np.abs(Omega - Omega.conj().T), initial=0.0) > numerical_tolerances['hermiticity'] * scale:
            raise NonHermitianOmega("Omega is not Hermitian")

        object.__setattr__(self, 'S', S)
        object.__setattr__(self, 'Omega', Omega)
        object.__setattr__(self, 'Phi', Phi)


@dataclass(frozen=True, eq=False)
class AbcdSystem:
    """
    State-space form of a passive linear network.

    Attributes:
        A, B, C, D:  modes x modes, modes x ports, ports x modes, ports x ports
        ports:       optional Port labels, one per port
        drive:       optional t -> matrix added to A; when present the system is time dependent
    """
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    ports: tuple = ()
    drive: Optional[Callable] = None

    @property
    def time_dependent(self):
        return self.drive is not None

    @property
    def modes(self):
        return self.A.shape[0]

    def a_at(self, t):
        if self.drive is None:
            return self.A
        return self.A + self.drive(t)


def abcd_from_slh(triple, kappa_int=0.0, ports=()):
    Phi = triple.Phi
    A = -0.5 * Phi.conj().T @ Phi - 1j * triple.Omega - 0.5 * kappa_int * np.eye(triple.Omega.shape[0])
    B = -Phi.conj().T @ triple.S
    drive = None
    if triple.modulation is not None:
        modulation = triple.modulation
        drive = lambda t: -1j * np.asarray(modulation(t), dtype=complex)
    return AbcdSystem(A, B, Phi.copy(), triple.S.copy(), tuple(ports), drive)


def transfer_function(abcd, omega):
    if abcd.time_dependent:
        raise TimeDependentA("A(t) is time dependent; build the effective system through the RWA engine first")

    n = abcd.modes
    if n == 0:
        return abcd.D.astype(complex)
    resolvent = 1j * omega * np.eye(n) - abcd.A
    lu, pivots = lu_factor(resolvent, check_finite=True)
    pivot_floor = numerical_tolerances['singular_pivot'] * max(1.0, np.max(np.abs(resolvent)))
    if np.min(np.abs(np.diag(lu))) <= pivot_floor:
        raise SingularResolvent(f"(i w I - A) is singular at w={omega}: an undamped eigenvalue sits on the probe frequency")
    return abcd.C @ lu_solve((lu, pivots), abcd.B) + abcd.D


def passivity_residual(abcd):
    return float(np.max(np.abs(abcd.A + abcd.A.conj().T + abcd.C.conj().T @ abcd.C), initial=0.0))


def is_lossless(abcd, tol=1e-10):
    return passivity_residual(abcd) <= tol * max(1.0, np.max(np.abs(abcd.A)))

"""Physical parameters of the honeycomb Dirac system."""

from __future__ import annotations

from dataclasses import dataclass

HAMILTONIAN = "hamiltonian"
PAPER_LITERAL = "paper_literal"

#: Sobolev index left invariant by the equation's scaling: 1/2 for the
#: cubic power coupling (ell=1, mass-supercritical), 0 for the Hartree
#: coupling (ell=2, mass-critical).
CRITICAL_INDEX = {1: 0.5, 2: 0.0}


def critical_index(ell: int) -> float:
    if ell not in CRITICAL_INDEX:
        raise ValueError(f"ell must be 1 (power) or 2 (Hartree), got {ell}")
    return CRITICAL_INDEX[ell]


@dataclass(frozen=True)
class DiracParams:
    """Coupling constants of the Dirac system.

    kappa        : real coupling strength of the nonlinearity.
    lambda_sharp : nonzero complex honeycomb lattice constant; enters the
                   Dirac matrices through the conjugation diag(conj, lam)
                   and rescales time through its modulus only.
    b1, b2       : positive Bloch-wave amplitudes weighting the cubic
                   coupling (b1 diagonal, 2*b2 cross term).
    ell          : 1 selects the pointwise cubic coupling, 2 the nonlocal
                   Hartree coupling.
    coupling_form: 'hamiltonian' uses the charge-conserving factor -i*kappa#
                   in the time-derivative form; 'paper_literal' uses -kappa#
                   (a literal transcription of the split equations, which
                   does not conserve charge).  Kept switchable for fidelity
                   experiments.
    """

    kappa: float = 1.0
    lambda_sharp: complex = 1.0 + 0.0j
    b1: float = 1.0
    b2: float = 1.0
    ell: int = 1
    coupling_form: str = HAMILTONIAN

    def __post_init__(self):
        if abs(self.lambda_sharp) == 0:
            raise ValueError("lambda_sharp must be nonzero")
        if not (self.b1 > 0 and self.b2 > 0):
            raise ValueError("Bloch amplitudes b1, b2 must be positive")
        if self.ell not in (1, 2):
            raise ValueError(f"ell must be 1 or 2, got {self.ell}")
        if self.coupling_form not in (HAMILTONIAN, PAPER_LITERAL):
            raise ValueError(f"unknown coupling_form {self.coupling_form!r}")

    @property
    def kappa_sharp(self) -> float:
        """kappa / |lambda_sharp|, the coupling after rescaling time."""
        return self.kappa / abs(self.lambda_sharp)

    @property
    def gamma(self) -> complex:
        """Coefficient of the projected nonlinearity in d(psi_pm)/dt."""
        if self.coupling_form == HAMILTONIAN:
            return -1j * self.kappa_sharp
        return complex(-self.kappa_sharp)

    @property
    def critical_index(self) -> float:
        return critical_index(self.ell)

"""Local isotropic plane constitutive law in Voigt form.

Moduli are the planar bulk modulus K and the shear modulus G.  Strain
vectors are (e11, e22, 2*e12) with engineering shear, stress vectors are
(s11, s22, s12), so the stiffness is

    [[K+G, K-G, 0],
     [K-G, K+G, 0],
     [0,   0,   G]].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class IsotropicModuli:
    K: float
    G: float

    def __post_init__(self):
        if not (self.K > 0 and self.G > 0):
            raise ValidationError("moduli K, G must be positive")


def hooke_matrix(m: IsotropicModuli) -> np.ndarray:
    K, G = m.K, m.G
    return np.array([[K + G, K - G, 0.0], [K - G, K + G, 0.0], [0.0, 0.0, G]])


def compliance_matrix(m: IsotropicModuli) -> np.ndarray:
    """Inverse of hooke_matrix, written out in closed form."""
    K, G = m.K, m.G
    p = 0.25 * (1.0 / K + 1.0 / G)
    q = 0.25 * (1.0 / K - 1.0 / G)
    return np.array([[p, q, 0.0], [q, p, 0.0], [0.0, 0.0, 1.0 / G]])


def moduli_from_compliance(c: np.ndarray) -> tuple[float, float, float]:
    """Extract (K, G, G45) from a square-symmetric 3x3 compliance matrix.

    The caller is responsible for having checked the zero pattern; only the
    entries c11, c12, c33 are read.
    """
    c = np.asarray(c, dtype=float)
    inv_k = 2.0 * (c[0, 0] + c[0, 1])
    inv_g = 2.0 * (c[0, 0] - c[0, 1])
    inv_g45 = c[2, 2]
    if inv_k <= 0 or inv_g <= 0 or inv_g45 <= 0:
        raise ValidationError("effective tensor not positive definite")
    return 1.0 / inv_k, 1.0 / inv_g, 1.0 / inv_g45

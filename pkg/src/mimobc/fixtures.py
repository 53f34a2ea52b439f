"""Built-in two-user scenarios used throughout the experiments.

Four Kronecker-correlated setups (two 2x2, two 4x4) plus a Rician variant that
reuses the first setup's correlations.  Correlations are normalized so that
tr(R_r) tr(R_t) = N_r N_t, i.e. the average channel energy per user equals
N_r N_t; weights are equal and the power budget defaults to 1 (0 dB at N0 = 1).
"""

from __future__ import annotations

import numpy as np

from .channels import Kronecker, Rician, Scenario
from .linalg import ValidationError

_EX12_R_R1 = np.array(
    [
        [1.0, -0.1 - 0.05j],
        [-0.1 + 0.05j, 1.0],
    ]
)
_EX12_R_R2 = np.array(
    [
        [1.0, -0.05 - 0.1j],
        [-0.05 + 0.1j, 1.0],
    ]
)
_EX1_R_T1 = np.array(
    [
        [1.0, 0.85 + 0.13j],
        [0.85 - 0.13j, 1.0],
    ]
)
_EX1_R_T2 = np.array(
    [
        [1.0, -0.8 - 0.11j],
        [-0.8 + 0.11j, 1.0],
    ]
)
_EX2_R_T1 = np.array(
    [
        [1.0, 0.95 + 0.12j],
        [0.95 - 0.12j, 1.0],
    ]
)
_EX2_R_T2 = np.array(
    [
        [1.0, -0.9 + 0.09j],
        [-0.9 - 0.09j, 1.0],
    ]
)

_EX34_R_R1 = np.array(
    [
        [1.0, -0.12 - 0.18j, 0.08 + 0.05j, -0.02 - 0.13j],
        [-0.12 + 0.18j, 1.0, -0.17 - 0.16j, 0.11 + 0.04j],
        [0.08 - 0.05j, -0.17 + 0.16j, 1.0, -0.17 - 0.16j],
        [-0.02 + 0.13j, 0.11 - 0.04j, -0.17 + 0.16j, 1.0],
    ]
)
_EX34_R_R2 = np.array(
    [
        [1.0, -0.11 + 0.15j, 0.07 + 0.04j, -0.01 - 0.10j],
        [-0.11 - 0.15j, 1.0, 0.10 + 0.10j, 0.05 - 0.02j],
        [0.07 - 0.04j, 0.10 - 0.10j, 1.0, -0.10 - 0.20j],
        [-0.01 + 0.10j, 0.05 + 0.02j, -0.10 + 0.20j, 1.0],
    ]
)


def _hermitian_circulant(first_row: list[complex]) -> np.ndarray:
    """Hermitian circulant from its first row (row k is the row above shifted right)."""
    n = len(first_row)
    M = np.empty((n, n), dtype=complex)
    row = np.asarray(first_row, dtype=complex)
    for k in range(n):
        M[k] = np.roll(row, k)
    return M


_EX3_R_T1 = _hermitian_circulant([1.0, 0.61 + 0.34j, 0.28, 0.61 - 0.34j])
_EX3_R_T2 = _hermitian_circulant([1.0, -0.24 - 0.71j, -0.48, -0.24 + 0.71j])
_EX4_R_T1 = _hermitian_circulant([1.0, 0.94 + 0.01j, 0.93, 0.94 - 0.01j])
_EX4_R_T2 = _hermitian_circulant([1.0, 0.00 - 0.92j, -0.92, 0.00 + 0.92j])

_RICIAN_HBAR1 = np.array(
    [
        [0.5898, 1.1795],
        [0.2949, 1.4744],
    ]
)
_RICIAN_HBAR2 = np.array(
    [
        [0.3849, 1.1547],
        [0.3849, 1.5396],
    ]
)

FIXTURE_NAMES = ("example1", "example2", "example3", "example4", "rician-example")


def load_fixture(name: str, k_factor: float = 1.0) -> Scenario:
    """Build one of the named two-user scenarios at unit power and unit noise.

    ``k_factor`` applies to "rician-example" only (ratio of line-of-sight to
    scattered energy).
    """
    if name == "example1":
        models = (
            Kronecker(_EX12_R_R1, _EX1_R_T1),
            Kronecker(_EX12_R_R2, _EX1_R_T2),
        )
    elif name == "example2":
        models = (
            Kronecker(_EX12_R_R1, _EX2_R_T1),
            Kronecker(_EX12_R_R2, _EX2_R_T2),
        )
    elif name == "example3":
        models = (
            Kronecker(_EX34_R_R1, _EX3_R_T1),
            Kronecker(_EX34_R_R2, _EX3_R_T2),
        )
    elif name == "example4":
        models = (
            Kronecker(_EX34_R_R1, _EX4_R_T1),
            Kronecker(_EX34_R_R2, _EX4_R_T2),
        )
    elif name == "rician-example":
        models = (
            Rician(_RICIAN_HBAR1, k_factor, _EX12_R_R1, _EX1_R_T1),
            Rician(_RICIAN_HBAR2, k_factor, _EX12_R_R2, _EX1_R_T2),
        )
    else:
        raise ValidationError(
            f"unknown fixture {name!r}; available: {', '.join(FIXTURE_NAMES)}"
        )
    return Scenario(models=models, weights=np.ones(2), power=1.0, noise=1.0)

"""Shared builders: small finite-support scenarios (exact expectations) and
random transmit designs.  Imported directly by the test modules."""

import numpy as np

from mimobc.channels import FiniteSupport, SampleSet, Scenario, complex_gaussian
from mimobc.rates import Design


def finite_scenario(rng, L=2, n_t=2, n_r=2, n_atoms=3, power=1.5, noise=0.7,
                    weights=None):
    """Scenario with per-user finite-support channels plus exact sample sets."""
    models = []
    for _ in range(L):
        atoms = complex_gaussian(rng, (n_atoms, n_r, n_t))
        probs = rng.random(n_atoms) + 0.1
        models.append(FiniteSupport(atoms, probs / probs.sum()))
    w = np.ones(L) if weights is None else np.asarray(weights, dtype=float)
    scen = Scenario(models=tuple(models), weights=w, power=power, noise=noise)
    samples = [SampleSet(H=m.atoms, w=m.probs, exact=True) for m in models]
    return scen, samples


def random_design(rng, L, n_t, power=None):
    """Random full-rank design; optionally rescaled to total power exactly."""
    F = [np.zeros((n_t, n_t), dtype=complex)] + [
        0.3 * complex_gaussian(rng, (n_t, n_t)) for _ in range(L - 1)
    ]
    P = [complex_gaussian(rng, (n_t, n_t)) + 0.5 * np.eye(n_t) for _ in range(L)]
    if power is not None:
        total = sum(np.linalg.norm(M) ** 2 for M in P)
        P = [np.sqrt(power / total) * M for M in P]
    return Design(F=tuple(F), P=tuple(P))


def random_psd(rng, n, jitter=0.0):
    A = complex_gaussian(rng, (n, n))
    return A @ A.conj().T / n + jitter * np.eye(n)

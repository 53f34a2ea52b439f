"""Baselines: water-filled TDMA, opportunistic single-antenna scheduling, and
the deterministic known-channel benchmark."""

import numpy as np
import pytest

from conftest import finite_scenario, random_psd
from mimobc.baselines import (
    deterministic_dpc_rate,
    opportunistic_schedule,
    tdma_rate,
    waterfilled_covariance,
)
from mimobc.channels import FiniteSupport, Scenario
from mimobc.linalg import PreconditionError, herm, logdet2, water_fill
from mimobc.rates import no_interference_bound


def test_waterfilled_covariance_structure():
    rng = np.random.default_rng(0)
    Rg = random_psd(rng, 3, jitter=0.2)
    S = waterfilled_covariance(Rg, budget=2.0, noise=0.5)
    assert abs(np.trace(S).real - 2.0) < 1e-9
    # shares eigenvectors with Rg, powers follow the water-filling rule
    lam, V = np.linalg.eigh(Rg)
    p = water_fill(lam / 0.5, 2.0)
    assert np.allclose(S, V @ np.diag(p) @ herm(V), atol=1e-9)


def test_tdma_rate_against_direct_sum():
    rng = np.random.default_rng(1)
    scen, samples = finite_scenario(rng, L=2, n_atoms=4)
    rep = tdma_rate(scen, samples)
    want = 0.0
    for l in range(2):
        S = waterfilled_covariance(scen.second_order_stats()[l], scen.power, scen.noise)
        want += 0.5 * sum(
            w * logdet2(np.eye(2) + H @ S @ herm(H) / scen.noise)
            for w, H in zip(samples[l].w, samples[l].H)
        )
    assert abs(rep.value - want) < 1e-9


def test_tdma_below_genie_bound_at_same_covariances():
    rng = np.random.default_rng(2)
    scen, samples = finite_scenario(rng, L=2, n_atoms=4)
    Sigmas = [
        waterfilled_covariance(R, scen.power, scen.noise)
        for R in scen.second_order_stats()
    ]
    genie = no_interference_bound(Sigmas, scen, samples)
    # serving users one at a time cannot beat genie-aided simultaneous service
    assert tdma_rate(scen, samples).value <= genie.value + 1e-9


def test_opportunistic_requires_single_transmit_antenna():
    rng = np.random.default_rng(3)
    scen, samples = finite_scenario(rng, L=2, n_t=2)
    with pytest.raises(PreconditionError):
        opportunistic_schedule(scen, samples)


def test_opportunistic_picks_strongest_user():
    rng = np.random.default_rng(4)
    scen, samples = finite_scenario(rng, L=3, n_t=1, n_r=2, n_atoms=4, power=2.0)
    rep = opportunistic_schedule(scen, samples)
    gains = [float(np.real(R[0, 0])) for R in scen.second_order_stats()]
    assert rep.selected == int(np.argmax(gains))
    l = rep.selected
    want = sum(
        w * np.log2(1.0 + np.linalg.norm(H) ** 2 * scen.power / scen.noise)
        for w, H in zip(samples[l].w, samples[l].H)
    )
    assert abs(rep.report.value - want) < 1e-9


def test_deterministic_benchmark_matches_grid_search():
    # two single-antenna users with known scalar channels: compare against a
    # brute-force sweep over the power split (encoding order 1 -> 2 fixed)
    h = [1.3, 0.7]
    models = tuple(
        FiniteSupport(atoms=np.array([[[hl]]], dtype=complex), probs=np.array([1.0]))
        for hl in h
    )
    scen = Scenario(models=models, weights=np.ones(2), power=2.0, noise=1.0)
    res = deterministic_dpc_rate([np.array([[hl]]) for hl in h], scen,
                                 n_starts=4, seed=0)

    best = -np.inf
    for a in np.linspace(0.0, 1.0, 2001):
        p1, p2 = a * 2.0, (1 - a) * 2.0
        r1 = np.log2(1 + h[0] ** 2 * (p1 + p2)) - np.log2(1 + h[0] ** 2 * p2)
        r2 = np.log2(1 + h[1] ** 2 * p2)
        best = max(best, r1 + r2)
    assert abs(res.value - best) < 1e-3
    assert res.kkt_residual <= 1e-6

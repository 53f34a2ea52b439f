"""Reference transmission schemes the optimized designs are measured against.

* TDMA: users take equal time shares; in its slot each user transmits alone at
  full power with the covariance water-filled on its channel statistic.
* Opportunistic scheduling (single transmit antenna): only the statistically
  strongest user is served.
* Deterministic dirty-paper design: the genie sum rate at fixed channel
  matrices, maximized over the covariances — the statistical designs approach
  it as channel uncertainty vanishes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import Scenario, as_sample_set, second_order_stat
from .linalg import PreconditionError, batched_logdet2, herm, water_fill
from .optimize import PgaResult, _default_inits, maximize_suffix_logdet
from .rates import RateReport, SumRateReport, _mean_and_stderr


def waterfilled_covariance(Rg: np.ndarray, budget: float, noise: float) -> np.ndarray:
    """Single-user covariance from water-filling over the eigenmodes of R_g / N0."""
    w, V = np.linalg.eigh(Rg)
    powers = water_fill(np.clip(w, 0.0, None) / noise, budget)
    return (V * powers) @ herm(V)


def tdma_rate(scenario: Scenario, samples: list) -> SumRateReport:
    """Equal-time-share baseline: user l gets rate E[log2 det(I + H S_l H^H/N0)] / L.

    S_l water-fills the full budget on R_g of user l; the weighted sum uses the
    scenario weights.
    """
    L = scenario.n_users
    reports = []
    for l in range(L):
        ss = as_sample_set(samples[l])
        S = waterfilled_covariance(
            second_order_stat(scenario.models[l]), scenario.power, scenario.noise
        )
        H = ss.H
        n_r = H.shape[1]
        M = H @ S @ herm(H) / scenario.noise + np.eye(n_r)
        vals = batched_logdet2(M) / L
        mean, stderr = _mean_and_stderr(vals, ss)
        reports.append(RateReport(mean, stderr, ss.n, ss.exact))
    mu = scenario.weights
    value = float(sum(m * r.value for m, r in zip(mu, reports)))
    stderr = float(np.sqrt(sum((m * r.stderr) ** 2 for m, r in zip(mu, reports))))
    return SumRateReport(value, stderr, tuple(reports))


@dataclass(frozen=True)
class OpportunisticReport:
    """Single-antenna scheduling outcome: who was picked and what it earns."""

    selected: int
    report: SumRateReport


def opportunistic_schedule(scenario: Scenario, samples: list) -> OpportunisticReport:
    """Serve only the user with the largest mean channel gain (N_t = 1 only).

    The winner l~ = argmax_l E[h_l^H h_l] (lowest index on ties) gets
    E[log2(1 + ||h||^2 P / N0)]; everyone else gets zero.
    """
    if scenario.n_tx != 1:
        raise PreconditionError("opportunistic scheduling is defined for N_t = 1")
    gains = [float(np.real(second_order_stat(m)[0, 0])) for m in scenario.models]
    selected = int(np.argmax(gains))
    reports = []
    for l in range(scenario.n_users):
        ss = as_sample_set(samples[l])
        if l != selected:
            reports.append(RateReport(0.0, 0.0, ss.n, ss.exact))
            continue
        h = ss.H[:, :, 0]
        snr = np.sum(np.abs(h) ** 2, axis=1) * scenario.power / scenario.noise
        vals = np.log2(1.0 + snr)
        mean, stderr = _mean_and_stderr(vals, ss)
        reports.append(RateReport(mean, stderr, ss.n, ss.exact))
    mu = scenario.weights
    value = float(sum(m * r.value for m, r in zip(mu, reports)))
    stderr = float(np.sqrt(sum((m * r.stderr) ** 2 for m, r in zip(mu, reports))))
    return OpportunisticReport(selected, SumRateReport(value, stderr, tuple(reports)))


def deterministic_dpc_rate(
    H: list[np.ndarray],
    scenario: Scenario,
    n_starts: int = 4,
    seed: int = 0,
    grad_tol: float = 1e-8,
    max_iters: int = 500,
) -> PgaResult:
    """Best genie weighted sum rate at fixed channel matrices.

        max_{Sigma, sum tr <= P} sum_l mu_l log2 det(I + (N0 I + H_l S_{l+1} H_l^H)^{-1}
                                                      H_l Sigma_l H_l^H)

    with S_{l+1} the later users' covariance sum — the dirty-paper sum rate for
    the fixed encoding order, found by projected gradient ascent.
    """
    if len(H) != scenario.n_users:
        raise PreconditionError("need one channel matrix per user")
    gains = [np.asarray(M, dtype=complex) for M in H]
    n_t = scenario.n_tx
    if any(M.shape[1] != n_t for M in gains):
        raise PreconditionError("channel matrices must have N_t columns")
    inits = _default_inits(n_t, scenario.n_users, scenario.power, n_starts, seed)
    return maximize_suffix_logdet(
        gains,
        scenario.weights,
        scenario.power,
        scenario.noise,
        inits,
        grad_tol=grad_tol,
        max_iters=max_iters,
    )

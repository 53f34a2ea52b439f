"""Achievable-rate evaluation for linear-assignment broadcast transmission.

A transmit design assigns user l the signal x_l = u_l - F_l s_l, where s_l is
the known interference already encoded for earlier users and u_l has covariance
Sigma_l = P_l P_l^H.  The first user sees no earlier interference, so F_1 = 0 by
convention.  The per-user achievable rate ("LAAR") is

    R_l = log2 det(Sigma_l) - E_H[ log2 det(Sigma_{u|y}(H)) ]

with Sigma_{u|y}(H) the conditional covariance of u_l given the received signal
under channel draw H; the weighted sum over users ("LAWSR") is the design
objective.  Closed-form Jensen-type upper bounds on both live here as well.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import SampleSet, Scenario, as_sample_set, second_order_stat
from .linalg import (
    PreconditionError,
    ValidationError,
    batched_logdet2,
    herm,
    hermitianize,
    logdet2,
    psd_sqrt,
    solve_hermitian,
)

LOG2E = np.log2(np.e)


@dataclass(frozen=True)
class Design:
    """Linear-assignment transmit design: interference weights F_l and factors P_l.

    Sigma_l = P_l P_l^H is user l's signal covariance.  All matrices are square
    N_t x N_t; F[0] must be exactly zero (the first user has nothing to cancel).
    """

    F: tuple[np.ndarray, ...]
    P: tuple[np.ndarray, ...]

    def __post_init__(self):
        F = tuple(np.asarray(M, dtype=complex) for M in self.F)
        P = tuple(np.asarray(M, dtype=complex) for M in self.P)
        if len(F) != len(P) or not F:
            raise ValidationError("design needs matching, nonempty F and P lists")
        n_t = P[0].shape[0]
        for M in (*F, *P):
            if M.shape != (n_t, n_t):
                raise ValidationError("all design matrices must be square N_t x N_t")
        if np.any(F[0] != 0):
            raise ValidationError("F_1 must be zero (first user sees no known interference)")
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "P", P)

    @property
    def n_users(self) -> int:
        return len(self.P)

    @property
    def n_tx(self) -> int:
        return self.P[0].shape[0]

    def sigma(self, l: int) -> np.ndarray:
        return self.P[l] @ herm(self.P[l])

    def sigmas(self) -> list[np.ndarray]:
        return [self.sigma(l) for l in range(self.n_users)]

    def total_power(self) -> float:
        return float(sum(np.trace(S).real for S in self.sigmas()))


@dataclass(frozen=True)
class CovariancePack:
    """Per-user covariance blocks derived from a design.

    Sigma_S is the covariance of the known earlier-user interference,
    Sigma_after the covariance of the not-yet-encoded users' signals.  A, B, C
    are the joint second moments of the auxiliary signal u = x + F s with the
    transmitted parts, and D = B - A^H C^{-1} A the residual after removing the
    component explained by u.
    """

    F: np.ndarray
    Sigma: np.ndarray
    Sigma_S: np.ndarray
    Sigma_after: np.ndarray
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    @property
    def D(self) -> np.ndarray:
        X = solve_hermitian(hermitianize(self.C), self.A)
        return hermitianize(self.B - herm(self.A) @ X)


def covariance_pack(l: int, design: Design) -> CovariancePack:
    """Blocks for user l (0-based) under the fixed encoding order."""
    sigmas = design.sigmas()
    F = design.F[l]
    Sigma = hermitianize(sigmas[l])
    Sigma_S = hermitianize(sum(sigmas[:l])) if l > 0 else np.zeros_like(Sigma)
    Sigma_after = (
        hermitianize(sum(sigmas[l + 1 :])) if l + 1 < len(sigmas) else np.zeros_like(Sigma)
    )
    A = F @ Sigma_S + Sigma
    B = Sigma_S + Sigma
    C = F @ Sigma_S @ herm(F) + Sigma
    return CovariancePack(
        F=F, Sigma=Sigma, Sigma_S=Sigma_S, Sigma_after=Sigma_after, A=A, B=B, C=hermitianize(C)
    )


def _is_zero_power(P_l: np.ndarray) -> bool:
    """Exactly-zero factor: the user transmits nothing and contributes zero rate."""
    return not np.any(P_l)


def _check_sigma_invertible(Sigma: np.ndarray, l: int) -> None:
    n_t = Sigma.shape[0]
    tr = np.trace(Sigma).real
    w_min = float(np.linalg.eigvalsh(Sigma).min())
    if w_min < 1e-10 * tr / n_t:
        raise PreconditionError(
            f"user {l + 1} covariance is singular to working precision "
            f"(min eig {w_min:.3e} vs trace {tr:.3e})"
        )


def conditional_covariance_stack(
    pack: CovariancePack, H: np.ndarray, noise: float
) -> tuple[np.ndarray, np.ndarray]:
    """Per-sample receive-side estimates for one user.

    Returns (T, Sigma_uy): T(H) = A H^H (H B H^H + H Sigma_after H^H + N0 I)^{-1} H
    is the MMSE-style regression of u on the received signal, and
    Sigma_uy(H) = C - T(H) A^H the conditional covariance of u given it.
    Shapes: H (n, N_r, N_t) -> T (n, N_t, N_t), Sigma_uy (n, N_t, N_t).
    """
    n_r = H.shape[1]
    M = H @ (pack.B + pack.Sigma_after) @ herm(H) + noise * np.eye(n_r)
    Z = solve_hermitian(hermitianize(M), H)
    T = (pack.A @ herm(H)) @ Z
    Sigma_uy = pack.C - T @ herm(pack.A)
    return T, Sigma_uy


@dataclass(frozen=True)
class RateReport:
    """A rate estimate in b/s/Hz with its Monte-Carlo standard error."""

    value: float
    stderr: float
    samples_used: int
    exact: bool = False


def _mean_and_stderr(vals: np.ndarray, samples: SampleSet) -> tuple[float, float]:
    mean = float(np.dot(samples.w, vals))
    if samples.exact or samples.n < 2:
        return mean, 0.0
    return mean, float(np.std(vals, ddof=1) / np.sqrt(samples.n))


def laar(l: int, design: Design, scenario: Scenario, samples) -> RateReport:
    """Linear-assignment achievable rate of user l (0-based) under the design.

    ``samples`` is a SampleSet, a stacked array of channel draws, or a
    FiniteSupport model (evaluated exactly).  Requires Sigma_l nonsingular; an
    exactly-zero P_l is the no-transmission case and reports rate 0.
    """
    samples = as_sample_set(samples)
    if _is_zero_power(design.P[l]):
        return RateReport(0.0, 0.0, samples.n, samples.exact)
    pack = covariance_pack(l, design)
    _check_sigma_invertible(pack.Sigma, l)
    _, Sigma_uy = conditional_covariance_stack(pack, samples.H, scenario.noise)
    vals = logdet2(pack.Sigma) - batched_logdet2(Sigma_uy)
    mean, stderr = _mean_and_stderr(vals, samples)
    return RateReport(mean, stderr, samples.n, samples.exact)


@dataclass(frozen=True)
class SumRateReport:
    """Weighted sum rate with per-user breakdown."""

    value: float
    stderr: float
    per_user: tuple[RateReport, ...]

    @property
    def samples_used(self) -> int:
        return max(r.samples_used for r in self.per_user)


def lawsr(design: Design, scenario: Scenario, samples: list) -> SumRateReport:
    """Weighted sum of per-user achievable rates; one sample set per user.

    Per-user standard errors combine as independent contributions,
    sqrt(sum_l mu_l^2 stderr_l^2).
    """
    if len(samples) != scenario.n_users:
        raise ValidationError("need one sample set per user")
    reports = tuple(
        laar(l, design, scenario, samples[l]) for l in range(scenario.n_users)
    )
    mu = scenario.weights
    value = float(sum(m * r.value for m, r in zip(mu, reports)))
    stderr = float(np.sqrt(sum((m * r.stderr) ** 2 for m, r in zip(mu, reports))))
    return SumRateReport(value, stderr, reports)


def _logdet2_weighted(Rg_sqrt: np.ndarray, X: np.ndarray, noise: float) -> float:
    """log2 det(R_g X + N0 I) for Hermitian PSD R_g, X, via the symmetric form."""
    n = Rg_sqrt.shape[0]
    return logdet2(Rg_sqrt @ X @ Rg_sqrt + noise * np.eye(n))


def upper_bound_laar(l: int, design: Design, scenario: Scenario) -> float:
    """Closed-form Jensen-type upper bound on user l's rate.

    Uses only the transmit-side statistic R_g = E[H^H H]:

        R_l <= log2 det(Sigma) - log2 det(C)
               - log2 det(R_g (D + Sigma_after) + N0 I)
               + log2 det(R_g (B + Sigma_after) + N0 I)
    """
    if _is_zero_power(design.P[l]):
        return 0.0
    pack = covariance_pack(l, design)
    _check_sigma_invertible(pack.Sigma, l)
    G = psd_sqrt(second_order_stat(scenario.models[l]))
    n0 = scenario.noise
    return (
        logdet2(pack.Sigma)
        - logdet2(pack.C)
        - _logdet2_weighted(G, pack.D + pack.Sigma_after, n0)
        + _logdet2_weighted(G, pack.B + pack.Sigma_after, n0)
    )


def suffix_sums(Sigmas: list[np.ndarray]) -> list[np.ndarray]:
    """S_l = sum_{t >= l} Sigma_t for l = 0..L (S_L is the zero matrix)."""
    n_t = Sigmas[0].shape[0]
    out = [np.zeros((n_t, n_t), dtype=complex)]
    for S in reversed(Sigmas):
        out.append(hermitianize(out[-1] + S))
    return out[::-1]


def simplified_upper_bound(l: int, Sigmas: list[np.ndarray], scenario: Scenario) -> float:
    """Upper bound on user l's rate depending only on the covariances.

        log2 det(R_g sum_{t>=l} Sigma_t + N0 I) - log2 det(R_g sum_{t>l} Sigma_t + N0 I)

    This is the bound the closed-form design maximizes; it is nonnegative and
    matches :func:`upper_bound_laar` at that design's interference weights.
    """
    S = suffix_sums(Sigmas)
    G = psd_sqrt(second_order_stat(scenario.models[l]))
    n0 = scenario.noise
    return _logdet2_weighted(G, S[l], n0) - _logdet2_weighted(G, S[l + 1], n0)


def no_interference_bound(Sigmas: list[np.ndarray], scenario: Scenario, samples: list) -> SumRateReport:
    """Genie upper bound: each user decodes with all earlier interference removed.

        sum_l mu_l E[ log2 det(N0 I + H S_l H^H) - log2 det(N0 I + H S_{l+1} H^H) ]

    with S_l the covariance of users l..L.  Evaluated on per-user sample sets.
    """
    if len(samples) != scenario.n_users:
        raise ValidationError("need one sample set per user")
    S = suffix_sums(Sigmas)
    reports = []
    for l in range(scenario.n_users):
        ss = as_sample_set(samples[l])
        H = ss.H
        n_r = H.shape[1]
        eye = scenario.noise * np.eye(n_r)
        vals = batched_logdet2(H @ S[l] @ herm(H) + eye) - batched_logdet2(
            H @ S[l + 1] @ herm(H) + eye
        )
        mean, stderr = _mean_and_stderr(vals, ss)
        reports.append(RateReport(mean, stderr, ss.n, ss.exact))
    mu = scenario.weights
    value = float(sum(m * r.value for m, r in zip(mu, reports)))
    stderr = float(np.sqrt(sum((m * r.stderr) ** 2 for m, r in zip(mu, reports))))
    return SumRateReport(value, stderr, tuple(reports))


def iid_sum_rate_bound(scenario: Scenario) -> float:
    """Weighted-sum-rate cap for i.i.d. channels: N_t log2(N_r P / (N_t N0) + 1)."""
    n_t = scenario.n_tx
    n_r = scenario.n_rx(0)
    if any(scenario.n_rx(l) != n_r for l in range(scenario.n_users)):
        raise PreconditionError("the i.i.d. cap assumes a common receive dimension")
    return n_t * np.log2(n_r * scenario.power / (n_t * scenario.noise) + 1.0)

"""Matrix-valued ascent gradients of the weighted sum rate.

All gradients follow the conjugate-coordinate convention for real scalar
functions of complex matrices,

    grad_W f = (df/dRe(W) + 1j * df/dIm(W)) / 2,

so that f(W + t*Delta) increases fastest along Delta = grad and the directional
derivative along any Delta equals 2 Re tr(grad^H Delta).  Expectations over the
channel are evaluated on caller-supplied sample sets so that optimization can
hold them frozen (common random numbers).
"""

from __future__ import annotations

import numpy as np

from .channels import Scenario, as_sample_set
from .linalg import PreconditionError, herm, hermitianize, solve_hermitian
from .rates import (
    LOG2E,
    CovariancePack,
    Design,
    conditional_covariance_stack,
    covariance_pack,
)


def t_matrix(H: np.ndarray, pack: CovariancePack, noise: float) -> np.ndarray:
    """Receive-side regression matrix T(H) = A H^H (H(B + Sigma_after)H^H + N0 I)^{-1} H.

    Accepts a single (N_r, N_t) channel or a stack (n, N_r, N_t).
    """
    H = np.asarray(H, dtype=complex)
    single = H.ndim == 2
    T, _ = conditional_covariance_stack(pack, H[None] if single else H, noise)
    return T[0] if single else T


def _expected_quadratic(X: np.ndarray, Sigma_uy: np.ndarray, w: np.ndarray) -> np.ndarray:
    """E[X^H Sigma_uy^{-1} X] over the sample axis, weights w."""
    Y = solve_hermitian(hermitianize(Sigma_uy), X)
    return np.einsum("i,iab,iac->bc", w, np.conjugate(X), Y)


def grad_F(l: int, design: Design, scenario: Scenario, samples) -> np.ndarray:
    """Ascent gradient of the weighted sum rate in the interference weight F_l.

        mu_l * log2(e) * E[ Sigma_uy(H)^{-1} (T(H) - F_l) Sigma_S ]

    The first user has no known interference to weight, so the gradient is zero.
    """
    n_t = design.n_tx
    if l == 0:
        return np.zeros((n_t, n_t), dtype=complex)
    samples = as_sample_set(samples)
    pack = covariance_pack(l, design)
    T, Sigma_uy = conditional_covariance_stack(pack, samples.H, scenario.noise)
    inner = solve_hermitian(hermitianize(Sigma_uy), T - pack.F) @ pack.Sigma_S
    mean = np.einsum("i,iab->ab", samples.w, inner)
    return scenario.weights[l] * LOG2E * mean


def _penalty_terms(t: int, design: Design, scenario: Scenario, samples: list) -> np.ndarray:
    """Weighted sum of the quadratic interference penalties hitting P_t.

    User l's rate depends on P_t through (relative position of t in the
    encoding order):

        l < t : Q = T_l^H Sigma_uy^{-1} T_l              (t is later interference)
        l = t : Q = (I - T_t)^H Sigma_uy^{-1} (I - T_t)  (own signal)
        l > t : Q = (F_l - T_l)^H Sigma_uy^{-1} (F_l - T_l)  (t is known interference)
    """
    n_t = design.n_tx
    eye = np.eye(n_t)
    acc = np.zeros((n_t, n_t), dtype=complex)
    for l in range(design.n_users):
        ss = as_sample_set(samples[l])
        pack = covariance_pack(l, design)
        T, Sigma_uy = conditional_covariance_stack(pack, ss.H, scenario.noise)
        if l < t:
            X = T
        elif l == t:
            X = eye - T
        else:
            X = pack.F - T
        acc = acc + scenario.weights[l] * _expected_quadratic(X, Sigma_uy, ss.w)
    return acc


def _penalty_terms_direct(t: int, design: Design, scenario: Scenario, samples: list) -> np.ndarray:
    """Same penalties via the expanded per-case sums (independent cross-check path)."""
    n_t = design.n_tx
    acc = np.zeros((n_t, n_t), dtype=complex)
    for l in range(design.n_users):
        ss = as_sample_set(samples[l])
        pack = covariance_pack(l, design)
        T, Sigma_uy = conditional_covariance_stack(pack, ss.H, scenario.noise)
        inv = np.linalg.inv(hermitianize(Sigma_uy))
        Th = herm(T)
        if l < t:
            Q = Th @ inv @ T
        elif l == t:
            Q = inv - Th @ inv - inv @ T + Th @ inv @ T
        else:
            F = pack.F
            Fh = herm(F)
            Q = Fh @ inv @ F - Th @ inv @ F - Fh @ inv @ T + Th @ inv @ T
        acc = acc + scenario.weights[l] * np.einsum("i,iab->ab", ss.w, Q)
    return acc


def grad_P(t: int, design: Design, scenario: Scenario, samples: list) -> np.ndarray:
    """Ascent gradient of the weighted sum rate in the covariance factor P_t.

        mu_t log2(e) (P_t^H)^{-1}
        - log2(e) [ sum_l mu_l E[Q_l(H)] ] P_t

    with the per-user penalties Q_l of :func:`_penalty_terms`.  Needs one sample
    set per user and an invertible P_t.
    """
    P_t = design.P[t]
    sv = np.linalg.svd(P_t, compute_uv=False)
    if sv.min() < 1e-12 * max(sv.max(), 1.0):
        raise PreconditionError(f"P_{t + 1} is singular; the log-det term has no gradient")
    lead = scenario.weights[t] * LOG2E * np.linalg.inv(herm(P_t))
    return lead - LOG2E * _penalty_terms(t, design, scenario, samples) @ P_t


def grad_F_upper_bound(l: int, design: Design, scenario: Scenario) -> np.ndarray:
    """Ascent gradient of the closed-form rate bound in F_l.

        -log2(e) * N^{-1} [ F (Sigma_S - Sigma_S W Sigma_S) - Sigma W Sigma_S ]

    with W = (B + Sigma_after + N0 R_g^{-1})^{-1} and N = C - A W A^H.  Vanishes
    at the bound's maximizer F = Sigma (Sigma + Sigma_after + N0 R_g^{-1})^{-1}.
    """
    from .channels import second_order_stat  # local import to avoid cycle noise

    n_t = design.n_tx
    if l == 0:
        return np.zeros((n_t, n_t), dtype=complex)
    pack = covariance_pack(l, design)
    Rg = second_order_stat(scenario.models[l])
    M = Rg @ (pack.B + pack.Sigma_after) + scenario.noise * np.eye(n_t)
    W = hermitianize(np.linalg.solve(M, Rg))  # = (B + Sigma_after + N0 R_g^{-1})^{-1}
    N = hermitianize(pack.C - pack.A @ W @ herm(pack.A))
    rhs = pack.F @ (pack.Sigma_S - pack.Sigma_S @ W @ pack.Sigma_S) - pack.Sigma @ W @ pack.Sigma_S
    return -LOG2E * np.linalg.solve(N, rhs)


def finite_diff_gradient(fn, W: np.ndarray, eps: float = 1e-6) -> np.ndarray:
    """Central-difference gradient of a real scalar fn over a complex matrix.

    Matches the convention above: G = (d/dRe + 1j d/dIm)/2, entry by entry.
    """
    W = np.asarray(W, dtype=complex)
    G = np.zeros_like(W)
    it = np.nditer(np.zeros(W.shape), flags=["multi_index"])
    for _ in it:
        idx = it.multi_index
        E = np.zeros_like(W)
        E[idx] = 1.0
        d_re = fn(W + eps * E) - fn(W - eps * E)
        d_im = fn(W + 1j * eps * E) - fn(W - 1j * eps * E)
        G[idx] = (d_re + 1j * d_im) / (4.0 * eps)
    return G

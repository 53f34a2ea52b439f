"""Design optimization: Monte-Carlo gradient ascent and the closed-form bound design.

Two routes to a transmit design:

* :func:`algorithm1` — backtracking gradient ascent directly on the sampled
  weighted sum rate, alternating an F-block and a power-projected P-block per
  iteration.  Sample sets stay frozen for the whole run (common random
  numbers), which makes the recorded objective trace exactly nondecreasing.
* :func:`algorithm2` — deterministic: maximize the closed-form sum-rate upper
  bound over the covariances by projected gradient ascent, then set each
  interference weight to the bound's closed-form maximizer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channels import SampleSet, Scenario, complex_gaussian, second_order_stat
from .gradients import grad_F, grad_P
from .linalg import NumericalError, PreconditionError, herm, hermitianize, logdet2, psd_sqrt
from .rates import LOG2E, Design, lawsr, suffix_sums


def power_projection(P: list[np.ndarray], budget: float) -> list[np.ndarray]:
    """Scale the factor list back onto the total-power ball if it overshoots.

    Inside the budget the factors are returned unchanged; outside, all are
    scaled by the same factor so that sum tr(P_l P_l^H) == budget.
    """
    total = float(sum(np.linalg.norm(M) ** 2 for M in P))
    if total <= budget:
        return list(P)
    scale = math.sqrt(budget / total)
    return [scale * M for M in P]


@dataclass(frozen=True)
class Alg1Params:
    """Line-search and stopping controls for the sampled-objective ascent."""

    eps1: float = 1e-3   # smallest admissible line-search step scale
    eps2: float = 1e-4   # stop when an iteration improves by no more than this
    max_iters: int = 60
    beta: float = 0.5    # step shrink factor, in (0, 1)


@dataclass
class OptimTrace:
    """Objective trajectory of one ascent run.  ``objective[0]`` is the start value."""

    objective: list[float] = field(default_factory=list)
    step_F: list[float] = field(default_factory=list)
    step_P: list[float] = field(default_factory=list)
    converged: bool = False

    @property
    def n_iters(self) -> int:
        return len(self.step_F)


def algorithm1(
    scenario: Scenario,
    init: Design,
    samples: list[SampleSet],
    params: Alg1Params = Alg1Params(),
) -> tuple[Design, OptimTrace]:
    """Backtracking gradient ascent on the sampled weighted sum rate.

    Per iteration: take the F-gradient at the current point and backtrack the
    step scale from 1 by ``beta`` until the objective does not decrease (a
    search that bottoms out below ``eps1`` keeps the previous matrices); then
    the same for the P-factors with the iterate projected back onto the power
    ball.  Stops when an iteration gains at most ``eps2`` or after
    ``max_iters`` iterations.
    """
    L = scenario.n_users
    F = [np.array(M, dtype=complex) for M in init.F]
    P = [np.array(M, dtype=complex) for M in init.P]
    trace = OptimTrace()

    def objective(Fs, Ps) -> float:
        return lawsr(Design(F=tuple(Fs), P=tuple(Ps)), scenario, samples).value

    def candidate_objective(Fs, Ps) -> float:
        # a probe step may leave the domain (near-singular covariance); treat
        # it as rejected rather than aborting the search
        try:
            return objective(Fs, Ps)
        except (PreconditionError, NumericalError):
            return -np.inf

    current = objective(F, P)
    trace.objective.append(current)

    for _ in range(params.max_iters):
        design = Design(F=tuple(F), P=tuple(P))
        gF = [grad_F(l, design, scenario, samples[l]) for l in range(L)]

        t = 1.0
        F_next, accepted_t = F, 0.0
        best = current
        while t >= params.eps1:
            cand = [F[l] + t * gF[l] for l in range(L)]
            val = candidate_objective(cand, P)
            t_used, t = t, params.beta * t
            if val >= current:
                F_next, best, accepted_t = cand, val, t_used
                break
        F = F_next
        trace.step_F.append(accepted_t)

        design = Design(F=tuple(F), P=tuple(P))
        gP = [grad_P(l, design, scenario, samples) for l in range(L)]

        u = 1.0
        P_next, accepted_u = P, 0.0
        while u >= params.eps1:
            cand = power_projection([P[l] + u * gP[l] for l in range(L)], scenario.power)
            val = candidate_objective(F, cand)
            u_used, u = u, params.beta * u
            if val >= current:
                P_next, best, accepted_u = cand, val, u_used
                break
        P = P_next
        trace.step_P.append(accepted_u)

        improvement = best - current
        current = best
        trace.objective.append(current)
        if improvement <= params.eps2:
            trace.converged = True
            break

    return Design(F=tuple(F), P=tuple(P)), trace


# ---------------------------------------------------------------------------
# deterministic maximization of suffix log-det objectives
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PgaResult:
    """Outcome of one projected-gradient run on a deterministic objective."""

    P: tuple[np.ndarray, ...]
    value: float
    kkt_residual: float
    iterations: int
    converged: bool


def _suffix_objective(gains: list[np.ndarray], weights, Ps, noise: float) -> float:
    Sigmas = [M @ herm(M) for M in Ps]
    S = suffix_sums(Sigmas)
    val = 0.0
    for l, G in enumerate(gains):
        m = G.shape[0]
        eye = noise * np.eye(m)
        val += weights[l] * (
            logdet2(G @ S[l] @ herm(G) + eye) - logdet2(G @ S[l + 1] @ herm(G) + eye)
        )
    return val


def _suffix_gradients(gains: list[np.ndarray], weights, Ps, noise: float) -> list[np.ndarray]:
    """Ascent gradients in each P_t of the suffix log-det objective.

    d/dSigma of log2 det(G S G^H + N0 I) contributes the Hermitian kernel
    G^H (G S G^H + N0 I)^{-1} G; P_t collects the kernels of every term whose
    suffix sum contains Sigma_t.
    """
    L = len(Ps)
    Sigmas = [M @ herm(M) for M in Ps]
    S = suffix_sums(Sigmas)

    def kernel(G, Ssub):
        m = G.shape[0]
        M = hermitianize(G @ Ssub @ herm(G)) + noise * np.eye(m)
        return hermitianize(herm(G) @ np.linalg.solve(M, G))

    acc = None
    grads = []
    for t in range(L):
        G = gains[t]
        inc = weights[t] * kernel(G, S[t])
        if t > 0:
            inc = inc - weights[t - 1] * kernel(gains[t - 1], S[t])
        acc = inc if acc is None else acc + inc
        grads.append(LOG2E * acc @ Ps[t])
    return grads


def _kkt_residual(Ps, grads, budget: float) -> float:
    """Projected-gradient norm for the trace-ball constraint.

    On the boundary the radial multiplier component is removed first; in the
    interior the plain gradient norm is the residual.
    """
    total = float(sum(np.linalg.norm(M) ** 2 for M in Ps))
    flat_g = np.concatenate([g.ravel() for g in grads])
    if total >= budget * (1.0 - 1e-9):
        flat_p = np.concatenate([M.ravel() for M in Ps])
        theta = max(0.0, float(np.real(np.vdot(flat_p, flat_g))) / total)
        return float(np.linalg.norm(flat_g - theta * flat_p))
    return float(np.linalg.norm(flat_g))


def maximize_suffix_logdet(
    gains: list[np.ndarray],
    weights,
    budget: float,
    noise: float,
    inits: list[list[np.ndarray]],
    grad_tol: float = 1e-8,
    max_iters: int = 500,
) -> PgaResult:
    """Projected gradient ascent with backtracking over P-factor lists.

    Maximizes sum_l w_l [log2 det(G_l S_l G_l^H + N0 I) - log2 det(G_l S_{l+1}
    G_l^H + N0 I)] with S_l the covariance suffix sums, subject to total power
    ``budget``.  Runs every init, returns the best converged point.
    """
    best: PgaResult | None = None
    for init in inits:
        Ps = power_projection([np.array(M, dtype=complex) for M in init], budget)
        val = _suffix_objective(gains, weights, Ps, noise)
        step = 1.0
        iters = 0
        converged = False
        resid = np.inf
        while iters < max_iters:
            iters += 1
            grads = _suffix_gradients(gains, weights, Ps, noise)
            resid = _kkt_residual(Ps, grads, budget)
            if resid <= grad_tol:
                converged = True
                break
            improved = False
            while step >= 1e-14:
                cand = power_projection([Ps[l] + step * g for l, g in enumerate(grads)], budget)
                gain_lin = 2.0 * sum(
                    float(np.real(np.vdot(g, c - M))) for g, c, M in zip(grads, cand, Ps)
                )
                cand_val = _suffix_objective(gains, weights, cand, noise)
                if cand_val >= val + 1e-4 * gain_lin and cand_val >= val:
                    Ps, val = cand, cand_val
                    step = min(step * 2.0, 1e6)
                    improved = True
                    break
                step *= 0.5
            if not improved:
                # no ascent step representable; treat as stationary
                converged = resid <= max(grad_tol, 1e-7)
                break
        out = PgaResult(tuple(Ps), val, resid, iters, converged)
        if best is None or out.value > best.value:
            best = out
    return best


def _default_inits(n_t: int, L: int, budget: float, n_starts: int, seed: int):
    """Isotropic split plus seeded random factor sets, all at full power."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, n_t, L]))
    iso = [math.sqrt(budget / (L * n_t)) * np.eye(n_t, dtype=complex) for _ in range(L)]
    inits = [iso]
    for _ in range(max(0, n_starts - 1)):
        raw = [complex_gaussian(rng, (n_t, n_t)) for _ in range(L)]
        total = sum(np.linalg.norm(M) ** 2 for M in raw)
        inits.append([math.sqrt(budget / total) * M for M in raw])
    return inits


@dataclass(frozen=True)
class Alg2Result:
    """Closed-form design with diagnostics of its bound maximization."""

    design: Design
    bound: float
    kkt_residual: float
    iterations: int
    converged: bool


def closed_form_F(Sigmas: list[np.ndarray], scenario: Scenario) -> list[np.ndarray]:
    """Interference weights maximizing the per-user rate bound at fixed covariances.

        F_l = Sigma_l (R_g (Sigma_l + Sigma_after) + N0 I)^{-1} R_g,

    equal to Sigma_l (Sigma_l + Sigma_after + N0 R_g^{-1})^{-1} when R_g is
    invertible; the first user's weight is identically zero.
    """
    L = len(Sigmas)
    n_t = Sigmas[0].shape[0]
    S = suffix_sums(Sigmas)
    out = [np.zeros((n_t, n_t), dtype=complex)]
    for l in range(1, L):
        Rg = second_order_stat(scenario.models[l])
        M = Rg @ S[l] + scenario.noise * np.eye(n_t)
        out.append(Sigmas[l] @ np.linalg.solve(M, Rg))
    return out


def _floor_factors(Ps: list[np.ndarray], budget: float) -> list[np.ndarray]:
    """Lift near-null covariance directions so every Sigma_l stays invertible.

    Adds a relative eigenvalue floor of 1e-8 * budget / (L * N_t) and rescales
    the total back inside the budget; the objective moves by O(1e-8).
    """
    L = len(Ps)
    n_t = Ps[0].shape[0]
    floor = 1e-8 * budget / (L * n_t)
    out = []
    for M in Ps:
        w, V = np.linalg.eigh(hermitianize(M @ herm(M)))
        w = np.maximum(w, floor)
        out.append((V * np.sqrt(w)) @ herm(V))
    return power_projection(out, budget)


def algorithm2(
    scenario: Scenario,
    n_starts: int = 4,
    seed: int = 0,
    grad_tol: float = 1e-8,
    max_iters: int = 500,
) -> Alg2Result:
    """Low-complexity design: maximize the closed-form bound, then set F in closed form.

    The covariance step is deterministic (no channel sampling).  For a
    single-antenna transmitter with distinct channel gains the bound maximum
    sits on a vertex of the power simplex, which is returned exactly.
    """
    L = scenario.n_users
    n_t = scenario.n_tx
    P_bud = scenario.power
    n0 = scenario.noise
    mu = scenario.weights
    Rgs = scenario.second_order_stats()

    if n_t == 1:
        r = np.array([float(np.real(R[0, 0])) for R in Rgs])
        vertex_vals = mu * np.log2(1.0 + r * P_bud / n0)
        j = int(np.argmax(vertex_vals))
        Ps = [
            (math.sqrt(P_bud) if l == j else 0.0) * np.ones((1, 1), dtype=complex)
            for l in range(L)
        ]
        Sigmas = [M @ herm(M) for M in Ps]
        design = Design(F=tuple(closed_form_F(Sigmas, scenario)), P=tuple(Ps))
        return Alg2Result(design, float(vertex_vals[j]), 0.0, 0, True)

    gains = [psd_sqrt(R) for R in Rgs]
    inits = _default_inits(n_t, L, P_bud, n_starts, seed)
    pga = maximize_suffix_logdet(
        gains, mu, P_bud, n0, inits, grad_tol=grad_tol, max_iters=max_iters
    )
    Ps = _floor_factors(list(pga.P), P_bud)
    Sigmas = [M @ herm(M) for M in Ps]
    design = Design(F=tuple(closed_form_F(Sigmas, scenario)), P=tuple(Ps))
    return Alg2Result(design, pga.value, pga.kkt_residual, pga.iterations, pga.converged)


# ---------------------------------------------------------------------------
# starts and sample-count selection
# ---------------------------------------------------------------------------


def multi_start(scenario: Scenario, n_starts: int, seed: int = 0) -> list[Design]:
    """Starting designs for the sampled ascent: the closed-form design, then
    seeded random ones.

    Random starts use full transmit power exactly; the closed-form seed gets
    near-null directions lifted so the ascent's log-det terms stay finite.
    """
    L = scenario.n_users
    n_t = scenario.n_tx
    starts = []
    if n_starts >= 1:
        base = algorithm2(scenario, seed=seed).design
        P_full = _floor_factors(list(base.P), scenario.power)
        starts.append(Design(F=base.F, P=tuple(P_full)))
    rng = np.random.default_rng(np.random.SeedSequence([seed, 7, L, n_t]))
    for _ in range(max(0, n_starts - 1)):
        raw = [complex_gaussian(rng, (n_t, n_t)) for _ in range(L)]
        total = sum(np.linalg.norm(M) ** 2 for M in raw)
        P = [math.sqrt(scenario.power / total) * M for M in raw]
        F = [np.zeros((n_t, n_t), dtype=complex)] + [
            0.1 * complex_gaussian(rng, (n_t, n_t)) for _ in range(L - 1)
        ]
        starts.append(Design(F=tuple(F), P=tuple(P)))
    return starts


def best_of_starts(
    scenario: Scenario,
    samples: list[SampleSet],
    n_starts: int = 3,
    seed: int = 0,
    params: Alg1Params = Alg1Params(),
) -> tuple[Design, OptimTrace]:
    """Run the sampled ascent from several starts on shared frozen samples."""
    best = None
    for init in multi_start(scenario, n_starts, seed):
        design, trace = algorithm1(scenario, init, samples, params)
        if best is None or trace.objective[-1] > best[1].objective[-1]:
            best = (design, trace)
    return best


@dataclass(frozen=True)
class SampleCountSelection:
    """Chosen Monte-Carlo sample count with the stabilization history."""

    count: int
    capped: bool
    values: tuple[float, ...]


def select_sample_count(
    estimator,
    k: int = 1000,
    alpha: float = 0.01,
    gamma: float = 0.05,
    grad_estimator=None,
    max_multiple: int = 100,
) -> SampleCountSelection:
    """Smallest multiple of k whose estimate has stabilized on nested sample sets.

    ``estimator(count)`` evaluates on the first ``count`` samples of a frozen
    pool; the count i*k is accepted once growing to (i+1)*k moves the value by
    less than ``alpha`` (and, when ``grad_estimator`` is given, moves its norm
    by less than ``gamma``).  Hits the cap ``max_multiple * k`` with
    ``capped=True`` when nothing stabilizes.
    """
    values = [float(estimator(k))]
    grads = [float(grad_estimator(k))] if grad_estimator is not None else None
    i = 1
    while i < max_multiple:
        nxt = float(estimator((i + 1) * k))
        ok = abs(nxt - values[-1]) < alpha
        if grads is not None:
            g_nxt = float(grad_estimator((i + 1) * k))
            ok = ok and abs(g_nxt - grads[-1]) < gamma
            grads.append(g_nxt)
        values.append(nxt)
        if ok:
            return SampleCountSelection(i * k, False, tuple(values))
        i += 1
    return SampleCountSelection(max_multiple * k, True, tuple(values))

"""Experiment runner: sweep designs over an SNR grid and emit CSV rows.

A run is described by a JSON config (or an :class:`ExperimentConfig`): a
scenario (fixture name or inline model description), an SNR grid in dB, the
algorithms to evaluate, a sample count (fixed or "auto"), and a seed.  Output
is one CSV row per (snr, algorithm) with the weighted sum rate, per-user rates,
Monte-Carlo standard error, samples used, wall time and seed.  Identical
config and seed give identical rows apart from wall_seconds.

Files only: no service endpoints, no databases, no dashboards.
"""

from __future__ import annotations

import csv
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .baselines import opportunistic_schedule, tdma_rate
from .channels import (
    FiniteSupport,
    Kronecker,
    Rician,
    SampleSet,
    Scenario,
    sample_channel,
)
from .fixtures import FIXTURE_NAMES, load_fixture
from .gradients import grad_F, grad_P
from .linalg import ValidationError
from .optimize import Alg1Params, algorithm2, best_of_starts, select_sample_count
from .rates import Design, SumRateReport, lawsr, no_interference_bound, simplified_upper_bound

ALGORITHMS = (
    "alg1",
    "alg2",
    "tdma",
    "opportunistic",
    "no_interference_bound",
    "simplified_bound",
)


def matrix_from_json(entries) -> np.ndarray:
    """Nested lists with complex entries as [re, im] (bare reals allowed)."""

    def scalar(x):
        if isinstance(x, (list, tuple)):
            if len(x) != 2:
                raise ValidationError(f"complex entries are [re, im] pairs, got {x!r}")
            return complex(float(x[0]), float(x[1]))
        return complex(float(x), 0.0)

    try:
        num = np.asarray(entries, dtype=float)
    except (ValueError, TypeError):
        num = None
    if num is not None and num.ndim == 3 and num.shape[-1] == 2:
        return num[..., 0] + 1j * num[..., 1]
    if num is not None and num.ndim == 2:
        return num.astype(complex)
    return np.array([[scalar(x) for x in row] for row in entries], dtype=complex)


def matrix_to_json(M: np.ndarray) -> list:
    """Inverse of :func:`matrix_from_json`: every entry becomes [re, im]."""
    M = np.asarray(M, dtype=complex)
    return [[[float(x.real), float(x.imag)] for x in row] for row in M]


def _model_from_json(spec: dict):
    kind = spec.get("type")
    if kind == "kronecker":
        return Kronecker(matrix_from_json(spec["R_r"]), matrix_from_json(spec["R_t"]))
    if kind == "rician":
        return Rician(
            matrix_from_json(spec["Hbar"]),
            float(spec["K"]),
            matrix_from_json(spec["R_r"]),
            matrix_from_json(spec["R_t"]),
        )
    if kind == "finite_support":
        atoms = np.stack([matrix_from_json(a) for a in spec["atoms"]])
        return FiniteSupport(atoms, np.asarray(spec["probs"], dtype=float))
    raise ValidationError(f"unknown model type {kind!r}")


def _normalize_model(model):
    """Rescale so the mean channel energy is N_r * N_t per user."""
    if isinstance(model, Kronecker):
        n_r, n_t = model.shape
        c = np.sqrt(n_r * n_t / (np.trace(model.R_r).real * np.trace(model.R_t).real))
        return Kronecker(c * model.R_r, c * model.R_t)
    if isinstance(model, Rician):
        n_r, n_t = model.shape
        energy = np.linalg.norm(model.Hbar) ** 2
        Hbar = model.Hbar * np.sqrt(n_r * n_t / energy)
        c = np.sqrt(n_r * n_t / (np.trace(model.R_r).real * np.trace(model.R_t).real))
        return Rician(Hbar, model.K, c * model.R_r, c * model.R_t)
    if isinstance(model, FiniteSupport):
        n_r, n_t = model.shape
        energy = float(np.einsum("i,iab,iab->", model.probs, np.conjugate(model.atoms), model.atoms).real)
        return FiniteSupport(model.atoms * np.sqrt(n_r * n_t / energy), model.probs)
    return model


@dataclass
class ExperimentConfig:
    """Everything needed to reproduce one experiment sweep."""

    scenario: str | dict
    snr_grid_db: list[float]
    algorithms: list[str]
    samples: int | str = 10000
    seed: int = 0
    out: str | None = None
    k_factor: float = 1.0
    normalize: bool = False
    alg1_starts: int = 3
    alg2_starts: int = 4
    auto_k: int = 1000
    auto_alpha: float = 0.01
    auto_gamma: float = 0.05
    alg1_params: Alg1Params = field(default_factory=Alg1Params)

    def __post_init__(self):
        for a in self.algorithms:
            if a not in ALGORITHMS:
                raise ValidationError(
                    f"unknown algorithm {a!r}; valid: {', '.join(ALGORITHMS)}"
                )
        if not self.algorithms:
            raise ValidationError("no algorithms requested")
        if not len(self.snr_grid_db):
            raise ValidationError("snr_grid_db is empty")
        if isinstance(self.samples, str):
            if self.samples != "auto":
                raise ValidationError('samples must be a positive integer or "auto"')
        elif int(self.samples) <= 0:
            raise ValidationError("samples must be positive")

    def build_scenario(self) -> Scenario:
        if isinstance(self.scenario, str):
            scen = load_fixture(self.scenario, k_factor=self.k_factor)
        else:
            spec = self.scenario
            models = tuple(_model_from_json(m) for m in spec["models"])
            weights = np.asarray(spec.get("weights", np.ones(len(models))), dtype=float)
            scen = Scenario(
                models=models, weights=weights, power=1.0, noise=float(spec.get("noise", 1.0))
            )
        if self.normalize:
            scen = Scenario(
                models=tuple(_normalize_model(m) for m in scen.models),
                weights=scen.weights,
                power=scen.power,
                noise=scen.noise,
            )
        if "opportunistic" in self.algorithms and scen.n_tx != 1:
            raise ValidationError("opportunistic scheduling requires a single transmit antenna")
        return scen


def load_config(path: str) -> ExperimentConfig:
    """Read a JSON experiment config; unknown keys are rejected."""
    with open(path) as fh:
        raw = json.load(fh)
    known = {
        "scenario",
        "snr_grid_db",
        "algorithms",
        "samples",
        "seed",
        "out",
        "k_factor",
        "normalize",
        "alg1_starts",
        "alg2_starts",
        "auto_k",
        "auto_alpha",
        "auto_gamma",
    }
    extra = set(raw) - known
    if extra:
        raise ValidationError(f"unknown config keys: {', '.join(sorted(extra))}")
    return ExperimentConfig(**raw)


@dataclass(frozen=True)
class ExperimentRow:
    """One CSV row: an algorithm's result at one SNR point."""

    snr_db: float
    algorithm: str
    sum_rate: float
    rate_user: tuple[float, ...]
    mc_stderr: float
    samples_used: int
    wall_seconds: float
    seed: int


def _prefix(samples: list[SampleSet], n: int) -> list[SampleSet]:
    """First n draws of each user's frozen pool (exact sets pass through whole)."""
    out = []
    for ss in samples:
        if ss.exact or ss.n <= n:
            out.append(ss)
        else:
            out.append(SampleSet(H=ss.H[:n]))
    return out


def _draw_pool(scenario: Scenario, n: int, seed_seq) -> list[SampleSet]:
    streams = seed_seq.spawn(scenario.n_users)
    sets = []
    for model, ss in zip(scenario.models, streams):
        if isinstance(model, FiniteSupport):
            sets.append(SampleSet(H=model.atoms, w=model.probs, exact=True))
        else:
            rng = np.random.default_rng(ss)
            sets.append(SampleSet(H=sample_channel(model, n, rng)))
    return sets


def _gradient_norm(design: Design, scenario: Scenario, samples: list[SampleSet]) -> float:
    total = 0.0
    for l in range(scenario.n_users):
        total += float(np.linalg.norm(grad_F(l, design, scenario, samples[l])) ** 2)
        total += float(np.linalg.norm(grad_P(l, design, scenario, samples)) ** 2)
    return float(np.sqrt(total))


def _report_row(
    snr_db: float, algorithm: str, report: SumRateReport, elapsed: float, seed: int
) -> ExperimentRow:
    return ExperimentRow(
        snr_db=snr_db,
        algorithm=algorithm,
        sum_rate=report.value,
        rate_user=tuple(r.value for r in report.per_user),
        mc_stderr=report.stderr,
        samples_used=report.samples_used,
        wall_seconds=elapsed,
        seed=seed,
    )


def _run_point(config: ExperimentConfig, base: Scenario, index: int, snr_db: float) -> list[ExperimentRow]:
    scen = base.with_power(base.noise * 10.0 ** (snr_db / 10.0))
    seed_seq = np.random.SeedSequence([int(config.seed), index])

    auto = config.samples == "auto"
    pool_n = config.auto_k * 100 if auto else int(config.samples)
    pool = _draw_pool(scen, pool_n, seed_seq)

    alg2_cache: dict[str, object] = {}

    def alg2_result():
        if "res" not in alg2_cache:
            t0 = time.perf_counter()
            alg2_cache["res"] = algorithm2(scen, n_starts=config.alg2_starts, seed=config.seed)
            alg2_cache["secs"] = time.perf_counter() - t0
        return alg2_cache["res"]

    if auto and not all(ss.exact for ss in pool):
        d2 = alg2_result().design
        nonsingular = all(
            np.linalg.svd(M, compute_uv=False).min() > 1e-12 for M in d2.P
        )

        def value_at(m):
            return lawsr(d2, scen, _prefix(pool, m)).value

        grad_at = (
            (lambda m: _gradient_norm(d2, scen, _prefix(pool, m))) if nonsingular else None
        )
        sel = select_sample_count(
            value_at,
            k=config.auto_k,
            alpha=config.auto_alpha,
            gamma=config.auto_gamma,
            grad_estimator=grad_at,
        )
        n_used = sel.count
    else:
        n_used = pool[0].n if all(ss.exact for ss in pool) else pool_n
    samples = _prefix(pool, n_used)

    designs: dict[str, Design] = {}
    design_secs: dict[str, float] = {}
    if "alg1" in config.algorithms:
        t0 = time.perf_counter()
        d1, _ = best_of_starts(
            scen, samples, n_starts=config.alg1_starts, seed=config.seed, params=config.alg1_params
        )
        designs["alg1"] = d1
        design_secs["alg1"] = time.perf_counter() - t0
    if {"alg2", "no_interference_bound", "simplified_bound"} & set(config.algorithms):
        designs["alg2"] = alg2_result().design
        design_secs["alg2"] = alg2_cache["secs"]

    rows = []
    for algorithm in config.algorithms:
        t0 = time.perf_counter()
        if algorithm == "alg1":
            report = lawsr(designs["alg1"], scen, samples)
            elapsed = design_secs["alg1"] + (time.perf_counter() - t0)
            rows.append(_report_row(snr_db, algorithm, report, elapsed, config.seed))
        elif algorithm == "alg2":
            report = lawsr(designs["alg2"], scen, samples)
            elapsed = design_secs["alg2"] + (time.perf_counter() - t0)
            rows.append(_report_row(snr_db, algorithm, report, elapsed, config.seed))
        elif algorithm == "tdma":
            report = tdma_rate(scen, samples)
            rows.append(_report_row(snr_db, algorithm, report, time.perf_counter() - t0, config.seed))
        elif algorithm == "opportunistic":
            report = opportunistic_schedule(scen, samples).report
            rows.append(_report_row(snr_db, algorithm, report, time.perf_counter() - t0, config.seed))
        elif algorithm == "no_interference_bound":
            best = designs.get("alg1", designs["alg2"])
            report = no_interference_bound(best.sigmas(), scen, samples)
            rows.append(_report_row(snr_db, algorithm, report, time.perf_counter() - t0, config.seed))
        elif algorithm == "simplified_bound":
            Sigmas = designs["alg2"].sigmas()
            mu = scen.weights
            per = tuple(
                float(simplified_upper_bound(l, Sigmas, scen)) for l in range(scen.n_users)
            )
            value = float(sum(m * v for m, v in zip(mu, per)))
            rows.append(
                ExperimentRow(
                    snr_db=snr_db,
                    algorithm=algorithm,
                    sum_rate=value,
                    rate_user=per,
                    mc_stderr=0.0,
                    samples_used=0,
                    wall_seconds=time.perf_counter() - t0,
                    seed=config.seed,
                )
            )
    return rows


def run_experiment(config: ExperimentConfig) -> list[ExperimentRow]:
    """Execute the sweep; rows come back grouped by SNR in config order.

    The MIMOBC_WORKERS environment variable parallelizes over SNR points
    (threads; results keep deterministic order).  Writes CSV when config.out
    is set.
    """
    base = config.build_scenario()
    points = list(enumerate(config.snr_grid_db))
    workers = int(os.environ.get("MIMOBC_WORKERS", "1") or "1")
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            chunks = list(ex.map(lambda p: _run_point(config, base, p[0], p[1]), points))
    else:
        chunks = [_run_point(config, base, i, s) for i, s in points]
    rows = [row for chunk in chunks for row in chunk]
    if config.out:
        write_csv(rows, config.out, base.n_users)
    return rows


def _fmt(x: float) -> str:
    """Nine significant digits, plain decimal/exponent form."""
    return format(float(x), ".9g")


def csv_header(n_users: int) -> list[str]:
    return (
        ["snr_db", "algorithm", "sum_rate"]
        + [f"rate_user{l + 1}" for l in range(n_users)]
        + ["mc_stderr", "samples_used", "wall_seconds", "seed"]
    )


def write_csv(rows: list[ExperimentRow], dest, n_users: int) -> None:
    """Write rows (to a path or open file) with fixed columns and 9-digit values."""
    if hasattr(dest, "write"):
        _write_csv(rows, dest, n_users)
    else:
        with open(dest, "w", newline="") as fh:
            _write_csv(rows, fh, n_users)


def _write_csv(rows, fh, n_users: int) -> None:
    writer = csv.writer(fh)
    writer.writerow(csv_header(n_users))
    for row in rows:
        if len(row.rate_user) != n_users:
            raise ValidationError("row user count does not match the scenario")
        writer.writerow(
            [
                _fmt(row.snr_db),
                row.algorithm,
                _fmt(row.sum_rate),
                *[_fmt(v) for v in row.rate_user],
                _fmt(row.mc_stderr),
                str(int(row.samples_used)),
                format(row.wall_seconds, ".3f"),
                str(int(row.seed)),
            ]
        )

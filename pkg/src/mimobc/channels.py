"""Channel models and sampling for the statistical-CSI broadcast setup.

Three fading models are supported, all producing per-user channel matrices H of
shape (N_r, N_t):

* Kronecker      H = R_r^{1/2} H_w R_t^{1/2},  H_w i.i.d. CN(0, 1)
* Rician         H = sqrt(K/(K+1)) Hbar + sqrt(1/(K+1)) R_r^{1/2} H_w R_t^{1/2}
* FiniteSupport  H drawn from a finite atom set with given probabilities

Only the transmit-side second-order statistic R_g = E[H^H H] is needed by the
closed-form design path; each model provides it exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .linalg import ValidationError, check_correlation, herm, psd_sqrt


def complex_gaussian(rng: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
    """i.i.d. CN(0, 1) entries: unit variance split between real and imaginary."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


@dataclass(frozen=True)
class Kronecker:
    """Separable correlation model: receive correlation R_r, transmit correlation R_t."""

    R_r: np.ndarray
    R_t: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "R_r", check_correlation(self.R_r, "R_r"))
        object.__setattr__(self, "R_t", check_correlation(self.R_t, "R_t"))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.R_r.shape[0], self.R_t.shape[0])


@dataclass(frozen=True)
class Rician:
    """Deterministic mean Hbar plus correlated scattering, mixed by the K-factor."""

    Hbar: np.ndarray
    K: float
    R_r: np.ndarray
    R_t: np.ndarray

    def __post_init__(self):
        H = np.asarray(self.Hbar, dtype=complex)
        if H.ndim != 2:
            raise ValidationError("Hbar must be a matrix")
        if self.K < 0:
            raise ValidationError("Rician K-factor must be nonnegative")
        object.__setattr__(self, "Hbar", H)
        object.__setattr__(self, "R_r", check_correlation(self.R_r, "R_r"))
        object.__setattr__(self, "R_t", check_correlation(self.R_t, "R_t"))
        if self.R_r.shape[0] != H.shape[0] or self.R_t.shape[0] != H.shape[1]:
            raise ValidationError("Hbar shape does not match R_r / R_t")

    @property
    def shape(self) -> tuple[int, int]:
        return self.Hbar.shape


@dataclass(frozen=True)
class FiniteSupport:
    """Discrete channel: atoms (k, N_r, N_t) taken with probabilities probs (k,).

    Expectations over this model are finite sums, so rate and gradient values are
    exact — handy as an oracle when checking Monte-Carlo code paths.
    """

    atoms: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        atoms = np.asarray(self.atoms, dtype=complex)
        probs = np.asarray(self.probs, dtype=float)
        if atoms.ndim != 3:
            raise ValidationError("atoms must have shape (k, N_r, N_t)")
        if probs.shape != (atoms.shape[0],):
            raise ValidationError("probs length must match the number of atoms")
        if probs.min() < 0 or abs(probs.sum() - 1.0) > 1e-9:
            raise ValidationError("probs must be nonnegative and sum to 1")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "probs", probs / probs.sum())

    @property
    def shape(self) -> tuple[int, int]:
        return (self.atoms.shape[1], self.atoms.shape[2])


ChannelModel = Kronecker | Rician | FiniteSupport


def sample_channel(model: ChannelModel, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw n channel realizations, shape (n, N_r, N_t).

    Identical generator state gives a bitwise-identical batch.
    """
    if n <= 0:
        raise ValidationError("sample count must be positive")
    if isinstance(model, Kronecker):
        n_r, n_t = model.shape
        Hw = complex_gaussian(rng, (n, n_r, n_t))
        return psd_sqrt(model.R_r) @ Hw @ psd_sqrt(model.R_t)
    if isinstance(model, Rician):
        n_r, n_t = model.shape
        Hw = complex_gaussian(rng, (n, n_r, n_t))
        scatter = psd_sqrt(model.R_r) @ Hw @ psd_sqrt(model.R_t)
        a = np.sqrt(model.K / (model.K + 1.0))
        b = np.sqrt(1.0 / (model.K + 1.0))
        return a * model.Hbar[None, :, :] + b * scatter
    if isinstance(model, FiniteSupport):
        idx = rng.choice(model.atoms.shape[0], size=n, p=model.probs)
        return model.atoms[idx]
    raise ValidationError(f"unknown channel model {type(model).__name__}")


def second_order_stat(model: ChannelModel) -> np.ndarray:
    """Transmit-side second-order statistic R_g = E[H^H H], in closed form.

    Kronecker:     tr(R_r) * R_t
    Rician:        K/(K+1) * Hbar^H Hbar + tr(R_r)/(K+1) * R_t
    FiniteSupport: sum_i p_i * H_i^H H_i
    """
    if isinstance(model, Kronecker):
        return np.trace(model.R_r).real * model.R_t
    if isinstance(model, Rician):
        K = model.K
        los = herm(model.Hbar) @ model.Hbar
        return (K / (K + 1.0)) * los + (np.trace(model.R_r).real / (K + 1.0)) * model.R_t
    if isinstance(model, FiniteSupport):
        return np.einsum("i,iab,iac->bc", model.probs, np.conjugate(model.atoms), model.atoms)
    raise ValidationError(f"unknown channel model {type(model).__name__}")


@dataclass(frozen=True)
class Scenario:
    """One broadcast instance: per-user channel models, rate weights, power budget.

    Encoding/decoding order is the user order.  Weights are normalized to sum to
    the number of users; noise is the per-antenna variance N0.
    """

    models: tuple[ChannelModel, ...]
    weights: np.ndarray = None
    power: float = 1.0
    noise: float = 1.0

    def __post_init__(self):
        models = tuple(self.models)
        if not models:
            raise ValidationError("scenario needs at least one user")
        n_t = models[0].shape[1]
        if any(m.shape[1] != n_t for m in models):
            raise ValidationError("all users must share the transmit dimension N_t")
        w = self.weights
        w = np.ones(len(models)) if w is None else np.asarray(w, dtype=float)
        if w.shape != (len(models),) or w.min() < 0:
            raise ValidationError("weights must be a nonnegative vector, one per user")
        if abs(w.sum() - len(models)) > 1e-9:
            raise ValidationError("weights must sum to the number of users")
        if self.power <= 0 or self.noise <= 0:
            raise ValidationError("power budget and noise variance must be positive")
        object.__setattr__(self, "models", models)
        object.__setattr__(self, "weights", w)

    @property
    def n_users(self) -> int:
        return len(self.models)

    @property
    def n_tx(self) -> int:
        return self.models[0].shape[1]

    def n_rx(self, l: int) -> int:
        return self.models[l].shape[0]

    def with_power(self, power: float) -> "Scenario":
        return replace(self, power=power)

    def second_order_stats(self) -> list[np.ndarray]:
        return [second_order_stat(m) for m in self.models]


@dataclass(frozen=True)
class SampleSet:
    """A batch of channel draws for one user, with expectation weights.

    ``exact`` marks finite-support enumerations whose weighted sums are exact
    expectations (Monte-Carlo standard errors are then zero).
    """

    H: np.ndarray           # (n, N_r, N_t)
    w: np.ndarray = None    # (n,), sums to 1
    exact: bool = False

    def __post_init__(self):
        H = np.asarray(self.H, dtype=complex)
        if H.ndim == 2:
            H = H[None, :, :]
        if H.ndim != 3:
            raise ValidationError("samples must have shape (n, N_r, N_t)")
        w = self.w
        w = np.full(H.shape[0], 1.0 / H.shape[0]) if w is None else np.asarray(w, dtype=float)
        if w.shape != (H.shape[0],) or w.min() < 0 or abs(w.sum() - 1.0) > 1e-9:
            raise ValidationError("sample weights must be nonnegative and sum to 1")
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "w", w)

    @property
    def n(self) -> int:
        return self.H.shape[0]


def as_sample_set(samples) -> SampleSet:
    """Coerce raw draws (array or list of matrices) or a SampleSet into a SampleSet."""
    if isinstance(samples, SampleSet):
        return samples
    if isinstance(samples, FiniteSupport):
        return SampleSet(H=samples.atoms, w=samples.probs, exact=True)
    arr = np.asarray(samples, dtype=complex)
    if arr.ndim == 2:
        arr = arr[None, :, :]
    return SampleSet(H=arr)


def draw_scenario_samples(scenario: Scenario, n: int, seed) -> list[SampleSet]:
    """One frozen sample set per user (common random numbers for a whole run).

    Users get independent child streams of the seed, so the sets are reproducible
    and uncorrelated across users.  Finite-support users get their exact atom
    enumeration instead of draws.
    """
    streams = np.random.SeedSequence(seed).spawn(scenario.n_users)
    sets = []
    for model, ss in zip(scenario.models, streams):
        if isinstance(model, FiniteSupport):
            sets.append(SampleSet(H=model.atoms, w=model.probs, exact=True))
        else:
            rng = np.random.default_rng(ss)
            sets.append(SampleSet(H=sample_channel(model, n, rng)))
    return sets

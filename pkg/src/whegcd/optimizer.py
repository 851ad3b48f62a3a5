"""Sample-efficient Bayesian optimization over the unit hypercube.

Reference stack fixed for reproducibility: Matern-5/2 GP with per-dimension
lengthscales, log-marginal-likelihood hyperparameter fitting (multi-start
grid plus Nelder-Mead refinement under a fixed evaluation cap), expected
improvement acquisition maximized by random candidates plus coordinate
refinement, and a scrambled Sobol initial design. Everything is driven by a
single seed; repeated runs are identical.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import cho_factor, cho_solve, solve_triangular
from scipy.optimize import minimize
from scipy.special import erf
from scipy.stats import qmc

from .design_space import Bounds, Design, from_unit
from .metrics import ObjectiveValue

SQRT5 = math.sqrt(5.0)


@dataclass(frozen=True)
class GpModel:
    x_train: np.ndarray  # (n, d) in the unit cube
    y_std: np.ndarray  # standardized targets
    lengthscales: np.ndarray  # (d,)
    signal_var: float
    noise_var: float
    chol: tuple  # cho_factor of K + noise I
    alpha: np.ndarray
    y_mean: float
    y_scale: float


@dataclass
class HistoryEntry:
    iteration: int
    unit_point: np.ndarray
    design: Design
    objective: ObjectiveValue


@dataclass
class OptHistory:
    seed: int
    objective_key: str
    entries: list[HistoryEntry] = field(default_factory=list)
    incumbent_values: list[float] = field(default_factory=list)

    @property
    def best_entry(self) -> HistoryEntry:
        best = max(self.entries, key=lambda e: _scalar(e.objective, self.objective_key))
        return best

    @property
    def best_value(self) -> float:
        return self.incumbent_values[-1]


def _scalar(obj: ObjectiveValue, key: str) -> float:
    return obj.efficiency_m_per_j if key == "efficiency" else obj.speed_m_per_s


def sobol_init(n: int, dim: int, seed: int) -> np.ndarray:
    """n scrambled Sobol points in [0,1]^dim, deterministic in the seed."""
    if n < 1:
        raise ValueError("n must be >= 1")
    sampler = qmc.Sobol(d=dim, scramble=True, seed=seed)
    if n & (n - 1) == 0:
        return sampler.random_base2(int(math.log2(n)))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        return sampler.random(n)


def _sq_dists(xa: np.ndarray, xb: np.ndarray, ls: np.ndarray) -> np.ndarray:
    a = xa / ls
    b = xb / ls
    return np.maximum(
        np.sum(a**2, axis=1)[:, None] + np.sum(b**2, axis=1)[None, :] - 2.0 * a @ b.T,
        0.0,
    )


def matern52(xa: np.ndarray, xb: np.ndarray, ls: np.ndarray, signal_var: float) -> np.ndarray:
    r = np.sqrt(_sq_dists(xa, xb, ls))
    t = SQRT5 * r
    return signal_var * (1.0 + t + t**2 / 3.0) * np.exp(-t)


def _chol_with_jitter(k: np.ndarray):
    jitter = 0.0
    for _ in range(8):
        try:
            return cho_factor(k + jitter * np.eye(len(k)), lower=True)
        except np.linalg.LinAlgError:
            jitter = 1e-10 if jitter == 0.0 else jitter * 10.0
    raise np.linalg.LinAlgError("kernel matrix is not positive definite")


def _log_marginal(x: np.ndarray, y: np.ndarray, ls: np.ndarray, sv: float, nv: float) -> float:
    n = len(y)
    k = matern52(x, x, ls, sv) + nv * np.eye(n)
    try:
        c = _chol_with_jitter(k)
    except np.linalg.LinAlgError:
        return -np.inf
    alpha = cho_solve(c, y)
    logdet = 2.0 * np.sum(np.log(np.diag(c[0])))
    return float(-0.5 * y @ alpha - 0.5 * logdet - 0.5 * n * math.log(2.0 * math.pi))


def gp_fit(
    x: np.ndarray,
    y: np.ndarray,
    noise_floor: float = 1e-6,
    hyper_budget: int = 200,
) -> GpModel:
    """Fit the GP by maximizing log marginal likelihood.

    Multi-start search: a 3x3x3 grid over isotropic log-lengthscale, log
    signal variance and log noise variance, then Nelder-Mead refinement of
    the full per-dimension parameter vector from the best grid points, with
    at most `hyper_budget` likelihood evaluations in total.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 2 or len(x) != len(y):
        raise ValueError("x must be (n, d) with matching y")
    if len(x) < 2:
        raise ValueError("need at least 2 training points")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("training data must be finite")
    d = x.shape[1]
    y_mean = float(np.mean(y))
    y_scale = float(np.std(y))
    if y_scale == 0.0:
        y_scale = 1.0
    ys = (y - y_mean) / y_scale

    evals = [0]

    def lml(theta: np.ndarray) -> float:
        evals[0] += 1
        ls = np.exp(theta[:d])
        sv = math.exp(theta[d])
        nv = max(math.exp(theta[d + 1]), noise_floor)
        return _log_marginal(x, ys, ls, sv, nv)

    grid_ls = np.log([0.1, 0.3, 1.0])
    grid_sv = np.log([0.25, 1.0, 4.0])
    grid_nv = np.log([1e-6, 1e-4, 1e-2])
    starts = []
    for gl in grid_ls:
        for gs in grid_sv:
            for gn in grid_nv:
                theta = np.concatenate([np.full(d, gl), [gs, gn]])
                starts.append((lml(theta), theta))
    starts.sort(key=lambda t: -t[0])
    budget_left = max(hyper_budget - evals[0], 0)
    n_refine = 3
    best_val, best_theta = starts[0]
    for val, theta in starts[:n_refine]:
        if budget_left <= 0:
            break
        maxfev = max(budget_left // n_refine, 10)
        res = minimize(
            lambda th: -lml(th),
            theta,
            method="Nelder-Mead",
            options={"maxfev": maxfev, "xatol": 1e-3, "fatol": 1e-4},
        )
        if -res.fun > best_val:
            best_val, best_theta = -res.fun, res.x

    ls = np.exp(best_theta[:d])
    sv = math.exp(best_theta[d])
    nv = max(math.exp(best_theta[d + 1]), noise_floor)
    k = matern52(x, x, ls, sv) + nv * np.eye(len(x))
    c = _chol_with_jitter(k)
    alpha = cho_solve(c, ys)
    return GpModel(
        x_train=x,
        y_std=ys,
        lengthscales=ls,
        signal_var=sv,
        noise_var=nv,
        chol=c,
        alpha=alpha,
        y_mean=y_mean,
        y_scale=y_scale,
    )


def gp_posterior(model: GpModel, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Posterior mean and (latent) variance at query points, original units.

    Accepts a single point (d,) or a batch (m, d); variance is clamped at
    zero against roundoff.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    ks = matern52(x, model.x_train, model.lengthscales, model.signal_var)
    mean_std = ks @ model.alpha
    c, lower = model.chol
    sol = solve_triangular(c, ks.T, lower=lower)
    var_std = np.maximum(model.signal_var - np.sum(sol**2, axis=0), 0.0)
    mean = model.y_mean + model.y_scale * mean_std
    var = model.y_scale**2 * var_std
    return mean, var


def expected_improvement(mean, variance, best_so_far: float):
    """Closed-form EI for maximization; sigma = 0 collapses to max(mu-f*,0)."""
    mean = np.asarray(mean, dtype=float)
    variance = np.asarray(variance, dtype=float)
    sigma = np.sqrt(np.maximum(variance, 0.0))
    improve = mean - best_so_far
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(sigma > 0.0, improve / np.where(sigma > 0.0, sigma, 1.0), 0.0)
    phi = np.exp(-0.5 * z**2) / math.sqrt(2.0 * math.pi)
    cdf = 0.5 * (1.0 + erf(z / math.sqrt(2.0)))
    ei = np.where(sigma > 0.0, improve * cdf + sigma * phi, np.maximum(improve, 0.0))
    out = np.maximum(ei, 0.0)
    return float(out) if out.ndim == 0 else out


def propose_next(model: GpModel, rng: np.random.Generator,
                 n_candidates: int = 1024, refine_starts: int = 8) -> np.ndarray:
    """Maximize EI: random candidate pool, then coordinate refinement of the
    best few. The returned point's EI is >= the best raw candidate's.
    """
    d = model.x_train.shape[1]
    best_f = float(np.max(model.y_mean + model.y_scale * model.y_std))
    cands = rng.random((n_candidates, d))
    mean, var = gp_posterior(model, cands)
    ei = expected_improvement(mean, var, best_f)
    order = np.argsort(-ei)
    top = cands[order[:refine_starts]].copy()
    top_ei = ei[order[:refine_starts]].copy()
    offsets = np.linspace(-1.0, 1.0, 9)
    for step in (0.1, 0.03, 0.01):
        for dim in range(d):
            # evaluate all starts x all offsets in one batch
            trial = np.repeat(top[:, None, :], len(offsets), axis=1)
            trial[:, :, dim] = np.clip(
                top[:, None, dim] + step * offsets[None, :], 0.0, 1.0
            )
            flat = trial.reshape(-1, d)
            m, v = gp_posterior(model, flat)
            e = expected_improvement(m, v, best_f).reshape(len(top), len(offsets))
            idx = np.argmax(e, axis=1)
            better = e[np.arange(len(top)), idx] > top_ei
            top[better] = trial[np.arange(len(top)), idx][better]
            top_ei[better] = e[np.arange(len(top)), idx][better]
    return top[int(np.argmax(top_ei))].copy()


def optimize(
    objective: Callable[[Design], ObjectiveValue],
    bounds: Bounds,
    *,
    budget: int = 100,
    init_points: int = 16,
    seed: int = 0,
    objective_key: str = "efficiency",
    noise_floor: float = 1e-6,
    hyper_budget: int = 200,
    n_candidates: int = 1024,
    refine_starts: int = 8,
) -> OptHistory:
    """Run the full BO loop: Sobol initialization then fit/propose/evaluate.

    Objective failures are recorded as worst-case values (the callable is
    expected to return an ObjectiveValue in all cases); the loop never
    aborts. Deterministic given (seed, settings).
    """
    if budget < init_points:
        raise ValueError("budget must be >= init_points")
    history = OptHistory(seed=seed, objective_key=objective_key)
    rng = np.random.default_rng(seed)
    x_unit = list(sobol_init(init_points, 7, seed))
    xs: list[np.ndarray] = []
    ys: list[float] = []
    best = -math.inf
    for it in range(1, budget + 1):
        if it <= init_points:
            u = np.clip(x_unit[it - 1], 0.0, 1.0)
        else:
            model = gp_fit(
                np.array(xs), np.array(ys), noise_floor=noise_floor, hyper_budget=hyper_budget
            )
            u = propose_next(model, rng, n_candidates=n_candidates, refine_starts=refine_starts)
        design = from_unit(u, bounds)
        obj = objective(design)
        val = _scalar(obj, objective_key)
        if not math.isfinite(val):
            val = 0.0
        xs.append(u)
        ys.append(val)
        best = max(best, val)
        history.entries.append(HistoryEntry(it, u.copy(), design, obj))
        history.incumbent_values.append(best)
    return history

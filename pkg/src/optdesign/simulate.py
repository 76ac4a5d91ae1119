"""Monte Carlo validation of the design-based regression identities.

An experiment draws m observations apportioned across the design atoms,
fits the degree-s polynomial by least squares, and repeats over
independent trials.  The empirical covariance of the coefficient
estimates should match sigma^2 (V* V)^{-1}, and the per-point prediction
variance should match (sigma^2 / m) K(z) with K the Christoffel function
of the realized (apportioned) design.  Randomness comes from a
counter-based generator keyed by (seed, trial), so serial and parallel
executions of the same experiment are bit-identical.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .basis import eval_basis_many, monomial_basis, space_dimension
from .gram import christoffel_many, moment_matrix, orthonormal_factor
from .measure import DiscreteDesign, make_design, unit_weight


@dataclass(frozen=True)
class RegressionExperiment:
    """A repeated polynomial regression on a fixed design.

    ``theta`` holds the true coefficients in the monomial basis
    (graded lexicographic order); ``num_obs`` observations are split
    across the design atoms by largest-remainder apportionment.
    """

    design: DiscreteDesign
    degree: int
    theta: np.ndarray
    sigma: float
    num_obs: int
    trials: int
    seed: int

    def __post_init__(self):
        n = space_dimension(self.design.dimension, self.degree)
        th = np.asarray(self.theta, dtype=complex).reshape(-1)
        if th.shape[0] != n:
            raise ValueError(f"theta has length {th.shape[0]}, expected {n}")
        object.__setattr__(self, "theta", th)
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")
        if self.num_obs < n:
            raise ValueError(f"need at least {n} observations for degree {self.degree}")
        if self.trials < 1:
            raise ValueError("at least one trial is required")


def apportion(weights, num_obs: int) -> np.ndarray:
    """Largest-remainder apportionment of num_obs slots to the weights.

    Ties in the fractional parts resolve toward the lowest index, so the
    split is deterministic.
    """
    w = np.asarray(weights, dtype=float)
    if num_obs < 0:
        raise ValueError("cannot apportion a negative count")
    quota = w * num_obs
    counts = np.floor(quota).astype(int)
    short = num_obs - int(counts.sum())
    if short > 0:
        frac = quota - counts
        order = np.lexsort((np.arange(w.size), -frac))
        counts[order[:short]] += 1
    return counts


def _observation_matrix(exp: RegressionExperiment) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    counts = apportion(exp.design.weights, exp.num_obs)
    reps = np.repeat(np.arange(exp.design.size), counts)
    obs_pts = exp.design.points[reps]
    basis = monomial_basis(exp.design.dimension, exp.degree)
    V = eval_basis_many(basis, obs_pts)
    return V, counts, obs_pts


def _is_complex_design(design: DiscreteDesign) -> bool:
    return bool(np.any(np.abs(design.points.imag) > 0))


def _trial_estimates(exp: RegressionExperiment, V: np.ndarray) -> np.ndarray:
    """Least-squares estimates for every trial, stacked (trials, n)."""
    m = V.shape[0]
    complex_noise = _is_complex_design(exp.design)
    y0 = V @ exp.theta
    noise = np.empty((exp.trials, m), dtype=complex)
    for t in range(exp.trials):
        rng = np.random.Generator(np.random.Philox(key=np.array([exp.seed, t], dtype=np.uint64)))
        if complex_noise:
            re = rng.standard_normal(m)
            im = rng.standard_normal(m)
            noise[t] = exp.sigma / math.sqrt(2.0) * (re + 1j * im)
        else:
            noise[t] = exp.sigma * rng.standard_normal(m)
    Y = y0[None, :] + noise
    Q, R = np.linalg.qr(V)
    rhs = Y @ Q.conj()
    return sla.solve_triangular(R, rhs.T, lower=False).T


@dataclass(frozen=True)
class PredictionRow:
    point: np.ndarray
    empirical_var: float
    theoretical_var: float

    @property
    def ratio(self) -> float:
        if self.theoretical_var == 0.0:
            return 1.0 if self.empirical_var == 0.0 else math.inf
        return self.empirical_var / self.theoretical_var


@dataclass(frozen=True)
class ExperimentStats:
    """Aggregates of a simulated experiment.

    ``volume_proxy`` is det(V* V)^(-1/2), proportional to the volume of a
    fixed-level confidence ellipsoid for the coefficients.
    """

    theta_mean: np.ndarray
    empirical_cov: np.ndarray
    theoretical_cov: np.ndarray
    counts: np.ndarray
    volume_proxy: float
    prediction: tuple[PredictionRow, ...]
    trials: int

    def to_json(self) -> str:
        payload = {
            "trials": self.trials,
            "counts": [int(c) for c in self.counts],
            "volume_proxy": self.volume_proxy,
            "theta_mean": _complex_list(self.theta_mean),
            "empirical_cov": _complex_matrix(self.empirical_cov),
            "theoretical_cov": _complex_matrix(self.theoretical_cov),
            "prediction": [
                {
                    "point": _complex_list(r.point),
                    "empirical_var": r.empirical_var,
                    "theoretical_var": r.theoretical_var,
                    "ratio": r.ratio,
                }
                for r in self.prediction
            ],
        }
        return json.dumps(payload, sort_keys=True)


def _complex_list(arr) -> list:
    return [[float(np.real(v)), float(np.imag(v))] for v in np.asarray(arr).reshape(-1)]


def _complex_matrix(mat) -> list:
    return [_complex_list(row) for row in np.asarray(mat)]


def _apportioned_christoffel(exp: RegressionExperiment, counts: np.ndarray):
    pos = counts > 0
    mu_x = make_design(exp.design.points[pos], counts[pos] / counts.sum())
    basis = monomial_basis(exp.design.dimension, exp.degree)
    mm = moment_matrix(mu_x, unit_weight(), exp.degree, basis)
    return orthonormal_factor(mm, unit_weight())


def simulate_regression(exp: RegressionExperiment) -> ExperimentStats:
    """Run the experiment and aggregate coefficient and prediction statistics.

    Aggregation uses numpy's fixed-order pairwise summation over the trial
    axis, so results are reproducible bit for bit for a given seed.
    """
    V, counts, _ = _observation_matrix(exp)
    theta_hats = _trial_estimates(exp, V)
    mean = theta_hats.mean(axis=0)
    centered = theta_hats - mean[None, :]
    denom = max(exp.trials - 1, 1)
    emp_cov = centered.T.conj() @ centered / denom
    gram = V.conj().T @ V
    theo_cov = exp.sigma**2 * np.linalg.inv(gram)
    sign, logdet = np.linalg.slogdet(gram)
    volume = math.exp(-0.5 * logdet) if sign != 0 else math.inf

    ev = _apportioned_christoffel(exp, counts)
    rows = []
    for i in range(exp.design.size):
        z = exp.design.points[i]
        rows.append(_prediction_row(exp, theta_hats, ev, z))
    return ExperimentStats(
        theta_mean=mean,
        empirical_cov=emp_cov,
        theoretical_cov=theo_cov,
        counts=counts,
        volume_proxy=volume,
        prediction=tuple(rows),
        trials=exp.trials,
    )


def _prediction_row(exp, theta_hats, ev, z) -> PredictionRow:
    basis = monomial_basis(exp.design.dimension, exp.degree)
    p = eval_basis_many(basis, np.asarray(z, dtype=complex).reshape(1, -1))[0]
    vals = theta_hats @ p  # plain transpose: sum_j p_j theta_hat_j
    mv = vals.mean()
    denom = max(exp.trials - 1, 1)
    emp = float(np.sum(np.abs(vals - mv) ** 2) / denom)
    K = christoffel_many(ev, np.asarray(z, dtype=complex).reshape(1, -1))[0]
    theo = exp.sigma**2 / exp.num_obs * float(K)
    return PredictionRow(point=np.asarray(z, dtype=complex).reshape(-1), empirical_var=emp, theoretical_var=theo)


@dataclass(frozen=True)
class VarianceCheck:
    rows: tuple[PredictionRow, ...]
    passed: bool

    def to_csv(self) -> str:
        lines = ["point,empirical_var,theoretical_var,ratio"]
        for r in self.rows:
            pt = ";".join(f"{np.real(v):.17g}{np.imag(v):+.17g}j" for v in r.point)
            lines.append(f"{pt},{r.empirical_var:.17g},{r.theoretical_var:.17g},{r.ratio:.17g}")
        return "\n".join(lines) + "\n"


def variance_identity_check(exp: RegressionExperiment, eval_points) -> VarianceCheck:
    """Compare prediction variances with (sigma^2 / m) K(z) at given points.

    The check passes when every ratio lies in [0.9, 1.1] and the
    experiment ran at least 10^4 trials.
    """
    V, counts, _ = _observation_matrix(exp)
    theta_hats = _trial_estimates(exp, V)
    ev = _apportioned_christoffel(exp, counts)
    pts = np.asarray(eval_points, dtype=complex)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    rows = tuple(_prediction_row(exp, theta_hats, ev, z) for z in pts)
    ok = all(0.9 <= r.ratio <= 1.1 for r in rows) and exp.trials >= 10**4
    return VarianceCheck(rows=rows, passed=ok)

"""Asymptotic identities and convergence diagnostics.

``f_of_t`` freezes an optimal design mu_s and perturbs the weight along
an external field u, w_t = w * exp(-t * u); the map
t -> -log det M(mu_s, w_t) / (2 m_s) is concave with derivative
(d+1)/d * integral of u against mu_s at t = 0.  ``convergence_sweep``
quantifies weak-* convergence of optimal designs toward the equilibrium
measure through moment and Kolmogorov distances.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .basis import degree_sum, multi_indices, space_dimension
from .equilibrium import EquilibriumMeasure, eq_cdf, eq_moment, eq_moment_mixed
from .gram import moment_matrix
from .measure import (
    DesignSpace,
    DiscreteDesign,
    WeightFunction,
    basis_for_space,
    callable_weight,
)
from .optimal import OptimalResult, d_optimal


def _perturbed_weight(weight: WeightFunction, u: Callable, t: float) -> WeightFunction:
    def w_t(z):
        return weight(z) * math.exp(-t * float(np.real(u(z))))

    return callable_weight(w_t)


def f_of_t(
    space: DesignSpace,
    weight: WeightFunction,
    s: int,
    u: Callable,
    t: float,
    mu_s: DiscreteDesign,
    basis=None,
) -> float:
    """-log det M(mu_s, w * exp(-t u)) / (2 m_s), monomial normalization.

    ``u`` receives a scalar for one-dimensional spaces and a coordinate
    vector otherwise, and must return a real value.
    """
    if basis is None:
        basis = basis_for_space(space, s)
    m_s = degree_sum(space.dimension, s)
    mm = moment_matrix(mu_s, _perturbed_weight(weight, u, t), s, basis)
    if not math.isfinite(mm.log_det):
        raise ArithmeticError(f"perturbed moment matrix is singular at t={t}")
    return -mm.log_det_monomial / (2.0 * m_s)


def first_derivative_residual(
    space: DesignSpace,
    weight: WeightFunction,
    s: int,
    u: Callable,
    mu_s: DiscreteDesign,
    h: float = 1e-4,
) -> float:
    """|centered difference of f_of_t at 0 - (d+1)/d * integral u d mu_s|."""
    basis = basis_for_space(space, s)
    fd = (
        f_of_t(space, weight, s, u, h, mu_s, basis)
        - f_of_t(space, weight, s, u, -h, mu_s, basis)
    ) / (2.0 * h)
    d = space.dimension
    pts = mu_s.points
    u_vals = np.array([float(np.real(u(p[0] if d == 1 else p))) for p in pts])
    exact = (d + 1) / d * float(mu_s.weights @ u_vals)
    return abs(fd - exact)


def concavity_probe(
    space: DesignSpace,
    weight: WeightFunction,
    s: int,
    u: Callable,
    mu_s: DiscreteDesign,
    t_grid,
) -> float:
    """Largest centered second difference of f_of_t over the grid interior.

    Concavity makes every second difference nonpositive, so the returned
    value should not exceed rounding error.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.size < 3:
        raise ValueError("concavity probe needs at least three t values")
    basis = basis_for_space(space, s)
    fs = np.array([f_of_t(space, weight, s, u, t, mu_s, basis) for t in t_grid])
    second = fs[:-2] - 2.0 * fs[1:-1] + fs[2:]
    return float(second.max())


def kolmogorov_distance(design: DiscreteDesign, target: EquilibriumMeasure) -> float:
    """sup_x |F_design(x) - F_target(x)| for one-dimensional real designs."""
    if design.dimension != 1:
        raise ValueError("Kolmogorov distance needs a one-dimensional design")
    x = design.points[:, 0]
    if np.any(np.abs(x.imag) > 1e-12):
        raise ValueError("Kolmogorov distance needs real atoms")
    order = np.argsort(x.real)
    xs = x.real[order]
    cum = np.cumsum(design.weights[order])
    F = np.array([eq_cdf(target, xi) for xi in xs])
    below = np.abs(F - np.concatenate([[0.0], cum[:-1]]))
    above = np.abs(F - cum)
    return float(max(below.max(), above.max()))


def moment_distance(design: DiscreteDesign, target: EquilibriumMeasure, t_max: int = 6) -> float:
    """max over monomials of degree <= t_max of |design moment - target moment|.

    Real spaces range over monomials x^alpha; the weighted complex ball
    ranges over mixed monomials z^beta conj(z)^gamma, which see the
    angular structure that holomorphic moments miss.
    """
    w = design.weights
    pts = design.points
    if target.kind == "weighted-ball":
        if design.dimension != 1:
            raise ValueError("mixed moments are implemented for d = 1")
        z = pts[:, 0]
        worst = 0.0
        for b in range(t_max + 1):
            for g in range(t_max + 1 - b):
                if b == 0 and g == 0:
                    continue
                dm = complex(np.sum(w * z**b * np.conj(z) ** g))
                tm = eq_moment_mixed(target, b, g)
                worst = max(worst, abs(dm - tm))
        return worst
    worst = 0.0
    for alpha in multi_indices(design.dimension, t_max):
        if sum(alpha) == 0:
            continue
        vals = np.ones(design.size, dtype=complex)
        for i, k in enumerate(alpha):
            if k:
                vals *= pts[:, i] ** k
        dm = complex(np.sum(w * vals))
        tm = eq_moment(target, alpha)
        worst = max(worst, abs(dm - tm))
    return worst


@dataclass(frozen=True)
class SweepRow:
    s: int
    n: int
    m_s: int
    kw_gap: float
    moment_distance: float
    ks_distance: float | None
    runtime: float


@dataclass(frozen=True)
class ConvergenceReport:
    """Per-degree distances between optimal designs and the target measure."""

    rows: tuple[SweepRow, ...]
    space_kind: str
    weight_kind: str
    target_kind: str

    def to_csv(self) -> str:
        lines = ["s,n,m_s,kw_gap,moment_distance,ks_distance,runtime"]
        for r in self.rows:
            ks = "" if r.ks_distance is None else f"{r.ks_distance:.17g}"
            lines.append(
                f"{r.s},{r.n},{r.m_s},{r.kw_gap:.17g},{r.moment_distance:.17g},{ks},{r.runtime:.17g}"
            )
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        payload = {
            "space_kind": self.space_kind,
            "weight_kind": self.weight_kind,
            "target_kind": self.target_kind,
            "rows": [
                {
                    "s": r.s,
                    "n": r.n,
                    "m_s": r.m_s,
                    "kw_gap": r.kw_gap,
                    "moment_distance": r.moment_distance,
                    "ks_distance": r.ks_distance,
                    "runtime": r.runtime,
                }
                for r in self.rows
            ],
        }
        return json.dumps(payload, sort_keys=True)

    def plot_data(self, metric: str) -> str:
        """Two-column text (s, metric) ready for external plotting."""
        if metric not in ("moment_distance", "ks_distance", "kw_gap"):
            raise ValueError(f"unknown metric {metric!r}")
        lines = []
        for r in self.rows:
            val = getattr(r, metric)
            if val is None:
                continue
            lines.append(f"{r.s} {val:.17g}")
        return "\n".join(lines) + "\n"


def convergence_sweep(
    space: DesignSpace,
    weight: WeightFunction,
    s_values,
    target: EquilibriumMeasure,
    *,
    t_max: int = 6,
    epsilon: float = 1e-5,
    max_iter: int | None = None,
    optimal_results: dict[int, OptimalResult] | None = None,
) -> ConvergenceReport:
    """Solve (or reuse) the optimal design per degree and measure distances."""
    rows = []
    one_dim_real = space.dimension == 1 and not space.is_complex
    for s in sorted(int(v) for v in s_values):
        start = time.perf_counter()
        opt = None if optimal_results is None else optimal_results.get(s)
        if opt is None:
            opt = d_optimal(space, weight, s, epsilon=epsilon, max_iter=max_iter)
        md = moment_distance(opt.design, target, t_max=t_max)
        ks = kolmogorov_distance(opt.design, target) if one_dim_real else None
        rows.append(
            SweepRow(
                s=s,
                n=space_dimension(space.dimension, s),
                m_s=degree_sum(space.dimension, s),
                kw_gap=opt.kw_gap,
                moment_distance=md,
                ks_distance=ks,
                runtime=time.perf_counter() - start,
            )
        )
    return ConvergenceReport(
        rows=tuple(rows),
        space_kind=space.kind,
        weight_kind=weight.kind,
        target_kind=target.kind,
    )

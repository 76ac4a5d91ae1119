"""Approximate weighted Fekete points and transfinite-diameter tables.

A weighted Fekete configuration maximizes |VDM(z_1..z_n)| * prod w(z_k)^s
over n-subsets of the grid.  The 2 m_s-th root of that maximum is the
s-th order diameter delta_s, whose limit in s is the weighted transfinite
diameter of the space; the matching root of the optimal-design
determinant converges to the same limit, and ``tfd_table`` tabulates both
sequences side by side.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .basis import degree_sum, eval_basis_many
from .measure import DesignSpace, WeightFunction, basis_for_space
from .optimal import OptimalResult, d_optimal

_EXHAUSTIVE_LIMIT = 2 * 10**6


@dataclass(frozen=True)
class FeketeResult:
    """A near-maximal-volume configuration.

    ``weighted_vdm_log`` is log(|VDM| * prod w^s) in the monomial
    normalization; ``delta_s`` its 1/m_s-th power... more precisely
    exp(weighted_vdm_log / m_s) with m_s the basis degree sum.
    """

    points: np.ndarray
    indices: np.ndarray
    weighted_vdm_log: float
    delta_s: float
    method: str


def _selection_log(A: np.ndarray, sel: list[int], log_lead: float) -> float:
    _, log_abs = np.linalg.slogdet(A[sel, :])
    return float(log_abs) - log_lead


def approx_fekete(
    space: DesignSpace,
    weight: WeightFunction,
    s: int,
    *,
    exchange_passes: int = 2,
    exhaustive: bool = False,
) -> FeketeResult:
    """Select an (approximately) extremal n-point configuration on the grid.

    The default path picks rows greedily by pivoted QR volume maximization
    and then sweeps pairwise exchanges, each of which strictly increases
    the weighted Vandermonde modulus.  ``exhaustive=True`` enumerates every
    n-subset instead (guarded, for small grids only).
    """
    basis = basis_for_space(space, s)
    n = basis.n
    grid = space.grid
    m = grid.shape[0]
    if m < n:
        raise ValueError(f"grid of {m} points cannot support {n} Fekete points")
    B = eval_basis_many(basis, grid)
    ws = weight.values(grid) ** s
    A = B * ws[:, None]

    if exhaustive:
        pos = np.flatnonzero(ws > 0)
        count = math.comb(pos.size, n)
        if count > _EXHAUSTIVE_LIMIT:
            raise ValueError(f"exhaustive search over {count} subsets exceeds the limit")
        best_log = -math.inf
        best: tuple[int, ...] | None = None
        combos = itertools.combinations(pos.tolist(), n)
        while True:
            chunk = list(itertools.islice(combos, 20000))
            if not chunk:
                break
            mats = A[np.array(chunk), :]
            _, logs = np.linalg.slogdet(mats)
            k = int(np.argmax(logs))
            if logs[k] > best_log:
                best_log = float(logs[k])
                best = chunk[k]
        sel = list(best)
        log_vdm = best_log - basis.log_lead
        method = "exhaustive"
    else:
        if np.linalg.matrix_rank(A) < n:
            raise ValueError("weighted Vandermonde is rank-deficient on this grid")
        _, _, piv = sla.qr(A.T, mode="economic", pivoting=True)
        sel = list(piv[:n])
        for _ in range(max(0, exchange_passes)):
            improved = False
            for k in range(n):
                V_inv = np.linalg.inv(A[sel, :])
                ratios = np.abs(A @ V_inv[:, k])
                j = int(np.argmax(ratios))
                if ratios[j] > 1.0 + 1e-10 and j != sel[k]:
                    sel[k] = j
                    improved = True
            if not improved:
                break
        log_vdm = _selection_log(A, sel, basis.log_lead)
        method = "greedy+exchange" if exchange_passes > 0 else "greedy"

    sel_sorted = [sel[i] for i in np.lexsort((grid[sel, 0].imag, grid[sel, 0].real))]
    m_s = degree_sum(space.dimension, s)
    return FeketeResult(
        points=grid[sel_sorted].copy(),
        indices=np.asarray(sel_sorted),
        weighted_vdm_log=log_vdm,
        delta_s=math.exp(log_vdm / m_s) if m_s > 0 else math.nan,
        method=method,
    )


def sth_diameter(space: DesignSpace, weight: WeightFunction, s: int, **opts) -> float:
    """delta_s = (max weighted Vandermonde modulus)^(1/m_s) on the grid."""
    return approx_fekete(space, weight, s, **opts).delta_s


@dataclass(frozen=True)
class TfdRow:
    s: int
    m_s: int
    delta_s: float
    gram_root: float
    gap: float


def tfd_table(
    space: DesignSpace,
    weight: WeightFunction,
    s_values,
    *,
    epsilon: float = 1e-5,
    max_iter: int | None = None,
    exchange_passes: int = 2,
    optimal_results: dict[int, OptimalResult] | None = None,
) -> list[TfdRow]:
    """Tabulate delta_s against det(M_s)^(1/(2 m_s)) of the optimal design.

    Both columns converge to the weighted transfinite diameter of the
    space; ``gap`` is their absolute difference.  Precomputed optimal
    solves may be passed in to avoid repeating them.
    """
    rows = []
    for s in sorted(int(v) for v in s_values):
        fek = approx_fekete(space, weight, s, exchange_passes=exchange_passes)
        opt = None if optimal_results is None else optimal_results.get(s)
        if opt is None:
            opt = d_optimal(space, weight, s, epsilon=epsilon, max_iter=max_iter)
        m_s = degree_sum(space.dimension, s)
        gram_root = math.exp(opt.log_det / (2.0 * m_s))
        rows.append(
            TfdRow(
                s=s,
                m_s=m_s,
                delta_s=fek.delta_s,
                gram_root=gram_root,
                gap=abs(fek.delta_s - gram_root),
            )
        )
    return rows


def tfd_to_csv(rows: list[TfdRow]) -> str:
    """CSV text for a transfinite-diameter table (LF line endings)."""
    lines = ["s,m_s,delta_s,gram_root,gap"]
    for r in rows:
        lines.append(f"{r.s},{r.m_s},{r.delta_s:.17g},{r.gram_root:.17g},{r.gap:.17g}")
    return "\n".join(lines) + "\n"

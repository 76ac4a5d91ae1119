"""Weighted moment matrices and Christoffel functions.

For a design mu and weight w, the degree-s moment matrix has entries

    M[i, j] = sum_k mu_k * conj(p_i(x_k)) * p_j(x_k) * w(x_k)**(2*s),

the Gram matrix of the basis in the weighted inner product.  Its inverse
Cholesky factor turns the basis into an orthonormal family, and the
Christoffel function

    K(z) = w(z)**(2*s) * p(z)^T inv(M) conj(p(z)) = sum_j |q_j(z)|^2 * w(z)**(2*s)

over that family drives both the optimality certificate and the
prediction-variance identities.  The transpose-conjugate pairing (not
p^H inv(M) p) is what makes the design-mass identity sum(mu_k K(z_k)) = n
exact for complex atoms; the two coincide whenever M is real.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .basis import PolyBasis, as_points, eval_basis_many
from .measure import DiscreteDesign, WeightFunction

_PIVOT_REL_TOL = 1e-14  # smallest admissible eigenvalue, relative to n * ||M||


class SingularGramError(np.linalg.LinAlgError):
    """Moment matrix is numerically singular or indefinite.

    ``pivot`` is the 1-based index of the Cholesky pivot that failed (or
    nearly failed) to stay positive.
    """

    def __init__(self, message: str, pivot: int):
        super().__init__(message)
        self.pivot = pivot


@dataclass(frozen=True)
class MomentMatrix:
    """A Hermitian moment matrix together with its provenance.

    ``log_det`` refers to the basis the matrix was assembled in;
    ``log_det_monomial`` maps it to the monomial normalization via the
    triangular change-of-basis determinant (they coincide for the monomial
    basis).  Singularity is encoded as -inf, never as an exception.
    """

    matrix: np.ndarray
    degree: int
    basis: PolyBasis
    log_det: float

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def log_det_monomial(self) -> float:
        return self.log_det - 2.0 * self.basis.log_lead


def _cholesky_log_det(M: np.ndarray) -> tuple[np.ndarray | None, float, int]:
    """Attempt a Cholesky factorization; returns (lower factor, log det, pivot).

    ``pivot`` is 0 on success, else the 1-based index where the
    factorization lost positivity (log det is then -inf).
    """
    (potrf,) = sla.get_lapack_funcs(("potrf",), (M,))
    C, info = potrf(M, lower=True, clean=True, overwrite_a=False)
    if info > 0:
        return None, -math.inf, int(info)
    if info < 0:
        raise ValueError(f"illegal moment matrix passed to potrf (argument {-info})")
    diag = np.real(np.diag(C))
    return C, float(2.0 * np.sum(np.log(diag))), 0


def moment_matrix(
    design: DiscreteDesign,
    weight: WeightFunction,
    s: int,
    basis: PolyBasis,
) -> MomentMatrix:
    """Assemble the degree-s weighted moment matrix of a design.

    The result is Hermitian by construction (symmetrized to kill roundoff)
    and positive semidefinite up to rounding.
    """
    if basis.dimension != design.dimension:
        raise ValueError("basis and design dimensions differ")
    B = eval_basis_many(basis, design.points)
    wv = weight.values(design.points)
    coef = design.weights * wv ** (2 * s)
    M = (B.conj().T * coef) @ B
    M = 0.5 * (M + M.conj().T)
    _, log_det, _ = _cholesky_log_det(M)
    return MomentMatrix(matrix=M, degree=s, basis=basis, log_det=log_det)


@dataclass(frozen=True)
class ChristoffelEvaluator:
    """Holds the lower-triangular L with inv(M) = L* L.

    The rows of conj(L) express an orthonormal polynomial family
    q = conj(L) p in the basis carried alongside; L has positive diagonal,
    so the factor is the canonical one.
    """

    L: np.ndarray
    basis: PolyBasis
    degree: int
    weight: WeightFunction

    @property
    def n(self) -> int:
        return self.L.shape[0]


def orthonormal_factor(mm: MomentMatrix, weight: WeightFunction) -> ChristoffelEvaluator:
    """Invert the Cholesky factor of a moment matrix.

    Refuses matrices whose smallest eigenvalue does not clear
    n * 1e-14 * ||M||, reporting the offending pivot index.
    """
    M = mm.matrix
    n = M.shape[0]
    C, _, pivot = _cholesky_log_det(M)
    if pivot:
        raise SingularGramError(f"moment matrix is not positive definite at pivot {pivot}", pivot)
    norm = float(np.linalg.norm(M, 2))
    eig_min = float(np.linalg.eigvalsh(M)[0])
    if eig_min <= n * _PIVOT_REL_TOL * norm:
        weakest = 1 + int(np.argmin(np.real(np.diag(C))))
        raise SingularGramError(
            f"moment matrix is numerically singular (eig_min {eig_min:.3e} vs "
            f"threshold {n * _PIVOT_REL_TOL * norm:.3e}) at pivot {weakest}",
            weakest,
        )
    L = sla.solve_triangular(C, np.eye(n, dtype=C.dtype), lower=True)
    return ChristoffelEvaluator(L=L, basis=mm.basis, degree=mm.degree, weight=weight)


def christoffel_many(ev: ChristoffelEvaluator, points) -> np.ndarray:
    """Evaluate K(z) = ||conj(L) p(z)||^2 * w(z)**(2*s) at many points."""
    pts = as_points(points, ev.basis.dimension)
    B = eval_basis_many(ev.basis, pts)
    Y = B @ ev.L.conj().T
    wv = ev.weight.values(pts)
    return np.sum(np.abs(Y) ** 2, axis=1) * wv ** (2 * ev.degree)


def christoffel(ev: ChristoffelEvaluator, z) -> float:
    """The Christoffel function at a single point."""
    return float(christoffel_many(ev, z)[0])

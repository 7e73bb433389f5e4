"""Dense complex block-matrix substrate.

Matrices are plain ``numpy`` arrays of ``complex128``; this module adds the
three structures the lattice hierarchies need on top of them:

* :class:`SpectralMatrixPoly` -- a Laurent polynomial in the spectral
  parameter whose coefficients are square complex matrices.  Additive-lambda
  Lax matrices are ordinary polynomials (min degree 0); the multiplicative
  z-parameter lattice uses genuinely negative degrees.
* :class:`RankOnePair` -- a pair of rectangular matrices ``(bhat, b)`` closed
  under triple products, ``bhat @ b @ bhat = kappa * bhat``.  Every matrix
  soliton formula in the package rides on such a pair.
* :func:`dense_solve` -- Gaussian elimination with partial pivoting and an
  explicit singularity threshold.

All values are immutable after construction; operations are pure functions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, SingularMatrix, VariantUnavailable

# Coefficient blocks with sup-norm below this are trimmed to zero when a
# polynomial is normalized (double-precision noise floor after ~N products).
ZERO_COEFF_TOL = 1e-13


def as_cmatrix(a) -> np.ndarray:
    """Coerce to a 2-d complex128 array (copies only when needed)."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise DimensionError(f"expected a 2-d matrix, got ndim={m.ndim}")
    return m


def sup_norm(a) -> float:
    """Entrywise max-modulus norm; 0.0 for empty arrays."""
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SpectralMatrixPoly:
    """Laurent polynomial sum_k lambda^k C_k with square matrix coefficients.

    ``coeffs[i]`` is the coefficient of ``lambda**(min_degree + i)``.  The
    normalized form has nonzero leading and trailing blocks (or is the empty
    zero polynomial with ``min_degree == 0``).
    """

    min_degree: int
    coeffs: np.ndarray = field(repr=False)  # shape (K, d, d)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.ndim != 3 or (c.size and c.shape[1] != c.shape[2]):
            raise DimensionError("coefficients must be a stack of square matrices")
        object.__setattr__(self, "coeffs", _frozen(c))

    @staticmethod
    def zero(dim: int) -> "SpectralMatrixPoly":
        return SpectralMatrixPoly(0, np.zeros((0, dim, dim)))

    @staticmethod
    def from_coeff_dict(d: dict[int, np.ndarray]) -> "SpectralMatrixPoly":
        """Build from {degree: matrix}; missing degrees are zero blocks."""
        if not d:
            raise DimensionError("empty coefficient dict")
        mats = {k: as_cmatrix(v) for k, v in d.items()}
        dim = next(iter(mats.values())).shape[0]
        lo, hi = min(mats), max(mats)
        c = np.zeros((hi - lo + 1, dim, dim), dtype=np.complex128)
        for k, m in mats.items():
            if m.shape != (dim, dim):
                raise DimensionError("coefficient dimensions differ")
            c[k - lo] = m
        return SpectralMatrixPoly(lo, c).normalized()

    @property
    def dim(self) -> int:
        return self.coeffs.shape[1] if self.coeffs.size else 0

    @property
    def max_degree(self) -> int:
        return self.min_degree + self.coeffs.shape[0] - 1

    def coeff(self, degree: int) -> np.ndarray:
        """Coefficient block of lambda**degree (zero block if absent)."""
        i = degree - self.min_degree
        if 0 <= i < self.coeffs.shape[0]:
            return self.coeffs[i]
        return np.zeros((self.dim, self.dim), dtype=np.complex128)

    def normalized(self, tol: float = ZERO_COEFF_TOL) -> "SpectralMatrixPoly":
        """Trim leading/trailing blocks with sup-norm below ``tol``."""
        k = self.coeffs.shape[0]
        lo, hi = 0, k
        while lo < hi and sup_norm(self.coeffs[lo]) < tol:
            lo += 1
        while hi > lo and sup_norm(self.coeffs[hi - 1]) < tol:
            hi -= 1
        if lo == hi:
            return SpectralMatrixPoly(0, np.zeros((0, self.dim, self.dim)))
        return SpectralMatrixPoly(self.min_degree + lo, self.coeffs[lo:hi])

    def __add__(self, other: "SpectralMatrixPoly") -> "SpectralMatrixPoly":
        if self.coeffs.size == 0:
            return other
        if other.coeffs.size == 0:
            return self
        if self.dim != other.dim:
            raise DimensionError("polynomial dimensions differ")
        lo = min(self.min_degree, other.min_degree)
        hi = max(self.max_degree, other.max_degree)
        c = np.zeros((hi - lo + 1, self.dim, self.dim), dtype=np.complex128)
        c[self.min_degree - lo : self.min_degree - lo + len(self.coeffs)] += self.coeffs
        c[other.min_degree - lo : other.min_degree - lo + len(other.coeffs)] += other.coeffs
        return SpectralMatrixPoly(lo, c).normalized()

    def __sub__(self, other: "SpectralMatrixPoly") -> "SpectralMatrixPoly":
        return self + other.scaled(-1.0)

    def scaled(self, s: complex) -> "SpectralMatrixPoly":
        return SpectralMatrixPoly(self.min_degree, self.coeffs * s)

    def eval(self, lam: complex) -> np.ndarray:
        """Evaluate by Horner on the positive part, then the Laurent tail."""
        if self.coeffs.size == 0:
            return np.zeros((self.dim, self.dim), dtype=np.complex128)
        acc = np.zeros((self.dim, self.dim), dtype=np.complex128)
        for c in self.coeffs[::-1]:
            acc = acc * lam + c
        return acc * lam**self.min_degree

    def distance(self, other: "SpectralMatrixPoly") -> float:
        """Sup-norm of the coefficientwise difference."""
        return sup_norm_poly(self - other)

    def equals(self, other: "SpectralMatrixPoly", tol: float = 1e-10) -> bool:
        return self.distance(other) < tol


def sup_norm_poly(p: SpectralMatrixPoly) -> float:
    return sup_norm(p.coeffs) if p.coeffs.size else 0.0


def poly_mul(p: SpectralMatrixPoly, q: SpectralMatrixPoly) -> SpectralMatrixPoly:
    """Cauchy product of two matrix Laurent polynomials."""
    if p.coeffs.size == 0 or q.coeffs.size == 0:
        return SpectralMatrixPoly.zero(max(p.dim, q.dim))
    if p.dim != q.dim:
        raise DimensionError(f"coefficient dims {p.dim} and {q.dim} differ")
    kp, kq = p.coeffs.shape[0], q.coeffs.shape[0]
    out = np.zeros((kp + kq - 1, p.dim, p.dim), dtype=np.complex128)
    for i in range(kp):
        # batched matmul of one p-block against the whole q stack
        out[i : i + kq] += p.coeffs[i] @ q.coeffs
    return SpectralMatrixPoly(p.min_degree + q.min_degree, out).normalized()


@dataclass(frozen=True)
class RankOnePair:
    """Rectangular pair closed under triple products.

    Invariants (checked on construction):
        ``bhat @ b @ bhat == kappa * bhat`` and ``b @ bhat @ b == kappa * b``.
    The identity-closure variant additionally satisfies
    ``bhat @ b == kappa * I`` (which forces square blocks).
    """

    bhat: np.ndarray
    b: np.ndarray
    kappa: complex

    def __post_init__(self):
        bh, b = as_cmatrix(self.bhat), as_cmatrix(self.b)
        if bh.shape != b.shape[::-1]:
            raise DimensionError("bhat and b must have transposed shapes")
        object.__setattr__(self, "bhat", _frozen(bh))
        object.__setattr__(self, "b", _frozen(b))
        object.__setattr__(self, "kappa", complex(self.kappa))
        if self.triple_residual() > 1e-12:
            raise InvalidRankOnePair(
                f"triple closure violated by {self.triple_residual():.3e}"
            )

    @property
    def n_dim(self) -> int:
        return self.bhat.shape[0]

    @property
    def m_dim(self) -> int:
        return self.bhat.shape[1]

    def triple_residual(self) -> float:
        r1 = sup_norm(self.bhat @ self.b @ self.bhat - self.kappa * self.bhat)
        r2 = sup_norm(self.b @ self.bhat @ self.b - self.kappa * self.b)
        return max(r1, r2)

    def identity_residual(self) -> float:
        """Deviation from the identity closure (inf for rectangular pairs)."""
        if self.n_dim != self.m_dim:
            return np.inf
        eye = np.eye(self.n_dim)
        r1 = sup_norm(self.bhat @ self.b - self.kappa * eye)
        r2 = sup_norm(self.b @ self.bhat - self.kappa * eye)
        return max(r1, r2)


class InvalidRankOnePair(DimensionError):
    """Constructed pair does not satisfy its closure relations."""


def make_rank_one_pair(
    n_dim: int,
    m_dim: int,
    kappa: complex,
    variant: str = "triple",
    unitary: np.ndarray | None = None,
) -> RankOnePair:
    """Canonical rank-one pair constructions.

    ``variant="triple"`` places a single nonzero entry: bhat[0,0] = 1,
    b[0,0] = kappa.  ``variant="identity"`` needs square blocks and returns
    bhat = U, b = kappa * U^dagger for a unitary U (identity by default).
    """
    if kappa == 0:
        raise VariantUnavailable("kappa must be nonzero")
    if variant == "triple":
        bhat = np.zeros((n_dim, m_dim), dtype=np.complex128)
        b = np.zeros((m_dim, n_dim), dtype=np.complex128)
        bhat[0, 0] = 1.0
        b[0, 0] = kappa
        return RankOnePair(bhat, b, kappa)
    if variant == "identity":
        if n_dim != m_dim:
            raise VariantUnavailable("identity closure requires square blocks")
        u = np.eye(n_dim, dtype=np.complex128) if unitary is None else as_cmatrix(unitary)
        if sup_norm(u @ u.conj().T - np.eye(n_dim)) > 1e-12:
            raise VariantUnavailable("supplied matrix is not unitary")
        return RankOnePair(u, kappa * u.conj().T, kappa)
    raise VariantUnavailable(f"unknown variant {variant!r}")


def dense_solve(a, rhs) -> np.ndarray:
    """Solve a @ x = rhs by Gaussian elimination with partial pivoting.

    Raises :class:`SingularMatrix` when the largest available pivot falls
    below ``1e-14 * sup_norm(a)``.
    """
    a = as_cmatrix(a).copy()
    rhs = np.asarray(rhs, dtype=np.complex128)
    rhs_was_vector = rhs.ndim == 1
    x = rhs.reshape(-1, 1).copy() if rhs_was_vector else rhs.copy()
    n = a.shape[0]
    if a.shape[1] != n:
        raise DimensionError("coefficient matrix must be square")
    if x.shape[0] != n:
        raise DimensionError("rhs row count does not match matrix")
    threshold = 1e-14 * max(sup_norm(a), 1e-300)
    for col in range(n):
        piv = col + int(np.argmax(np.abs(a[col:, col])))
        if abs(a[piv, col]) < threshold:
            raise SingularMatrix(f"pivot {abs(a[piv, col]):.3e} below threshold")
        if piv != col:
            a[[col, piv]] = a[[piv, col]]
            x[[col, piv]] = x[[piv, col]]
        factors = a[col + 1 :, col] / a[col, col]
        a[col + 1 :, col:] -= np.outer(factors, a[col, col:])
        x[col + 1 :] -= np.outer(factors, x[col])
    for col in range(n - 1, -1, -1):
        x[col] = (x[col] - a[col, col + 1 :] @ x[col + 1 :]) / a[col, col]
    return x[:, 0] if rhs_was_vector else x

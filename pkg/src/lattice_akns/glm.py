"""Discrete factorization machinery on an integer window.

Hankel mode data (matrices constant along antidiagonals) solving one of two
linear lattice schemes feed a triangular factorization problem

    (I + K+)(I + F) = (I + K-),

with K+ supported on column >= row and K- strictly below.  Solving the
factorization row by row yields the component blocks whose diagonal elements
reproduce closed-form soliton profiles.

Window convention: abstract indices i, j run over -N..N; storage offsets
them by +N.  Hankel data is stored by the sum m = i + j over -2N..2N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import as_cmatrix, dense_solve, sup_norm
from .errors import (
    DegenerateMode,
    DimensionError,
    ModeOverflow,
    SingularGlm,
    SingularMatrix,
)

FORWARD_BACKWARD = "forward-backward"
SYMMETRIC = "symmetric"

OVERFLOW_LIMIT = 1e12


# --------------------------------------------------------------------------
# Difference operators
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class DifferenceOps:
    """Forward and backward difference matrices on the window.

    d has -1 on the diagonal and +1 on the superdiagonal; dstar is its
    transpose pattern.  Powers truncate cleanly at the window edge because
    difference paths never re-enter once they leave.
    """

    window_n: int
    d: np.ndarray = field(repr=False)
    dstar: np.ndarray = field(repr=False)


def build_difference_ops(window_n: int) -> DifferenceOps:
    if window_n < 1:
        raise ValueError("window_n must be at least 1")
    size = 2 * window_n + 1
    d = -np.eye(size, dtype=np.complex128)
    d += np.diag(np.ones(size - 1), k=1)
    dstar = -np.eye(size, dtype=np.complex128)
    dstar += np.diag(np.ones(size - 1), k=-1)
    return DifferenceOps(window_n, d, dstar)


def difference_power_closed_form(window_n: int, alpha: int, star: bool = False) -> np.ndarray:
    """Binomial closed form of the alpha-th difference-operator power."""
    size = 2 * window_n + 1
    out = np.zeros((size, size), dtype=np.complex128)
    for k in range(alpha + 1):
        coeff = (-1) ** (alpha - k) * math.comb(alpha, k)
        diag = np.full(size - k, coeff) if k < size else None
        if diag is None:
            continue
        out += np.diag(diag, k=-k if star else k)
    return out


# --------------------------------------------------------------------------
# Hankel mode data
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class GlmMode:
    """One discrete mode of the linear problem: hatted and unhatted parts."""

    amp_hat: np.ndarray  # n_dim x m_dim
    lam_hat: complex
    amp: np.ndarray  # m_dim x n_dim
    lam: complex

    def __post_init__(self):
        object.__setattr__(self, "amp_hat", as_cmatrix(self.amp_hat))
        object.__setattr__(self, "amp", as_cmatrix(self.amp))
        if self.amp_hat.shape != self.amp.shape[::-1]:
            raise DimensionError("mode amplitude shapes must be transposed")


def scheme_dispersions(mode: GlmMode, scheme: str, weight_w: complex, alpha: int):
    """(lam_hat_disp, lam_disp) for the mode under the given scheme."""
    if scheme == FORWARD_BACKWARD:
        lam_hat = (np.exp(-mode.lam_hat) - 1.0) ** alpha
        lam = weight_w**alpha * (np.exp(mode.lam) - 1.0) ** alpha
    elif scheme == SYMMETRIC:
        lam_hat = (np.exp(-mode.lam_hat / 2) - np.exp(mode.lam_hat / 2)) ** 2
        lam = weight_w * (np.exp(mode.lam / 2) - np.exp(-mode.lam / 2)) ** 2
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    return complex(lam_hat), complex(lam)


@dataclass(frozen=True)
class GlmSystem:
    """Hankel data plus scheme metadata, frozen at one time."""

    scheme: str
    weight_w: complex
    alpha: int
    window_n: int
    n_dim: int
    m_dim: int
    time: float
    modes: tuple[GlmMode, ...]
    fhat: np.ndarray = field(repr=False)  # (4N+1, n_dim, m_dim), index m+2N
    f: np.ndarray = field(repr=False)  # (4N+1, m_dim, n_dim)

    def fhat_at(self, m: int) -> np.ndarray:
        return self.fhat[m + 2 * self.window_n]

    def f_at(self, m: int) -> np.ndarray:
        return self.f[m + 2 * self.window_n]

    def linear_residual(self, samples=12, rng: np.random.Generator | None = None) -> float:
        """Residual of the scheme's lattice equation at random (i, j) pairs.

        Evaluated directly from the modes so the shifted values are exact
        even when they leave the storage window.
        """
        rng = rng or np.random.default_rng(0)
        n = self.window_n
        worst = 0.0
        for _ in range(samples):
            m = int(rng.integers(-2 * n, 2 * n + 1))
            t = self.time
            fh_dot = np.zeros((self.n_dim, self.m_dim), dtype=complex)
            f_dot = np.zeros((self.m_dim, self.n_dim), dtype=complex)
            fh_shift = np.zeros_like(fh_dot)
            f_shift = np.zeros_like(f_dot)
            for mode in self.modes:
                lam_hat, lam = scheme_dispersions(mode, self.scheme, self.weight_w, self.alpha)
                eh = np.exp(-mode.lam_hat * m + lam_hat * t)
                e = np.exp(-mode.lam * m + lam * t)
                fh_dot += lam_hat * eh * mode.amp_hat
                f_dot += lam * e * mode.amp
                if self.scheme == FORWARD_BACKWARD:
                    sh = sum(
                        (-1) ** (self.alpha - k)
                        * math.comb(self.alpha, k)
                        * np.exp(-mode.lam_hat * (m + k))
                        for k in range(self.alpha + 1)
                    )
                    s = self.weight_w**self.alpha * sum(
                        (-1) ** (self.alpha - k)
                        * math.comb(self.alpha, k)
                        * np.exp(-mode.lam * (m - k))
                        for k in range(self.alpha + 1)
                    )
                else:
                    sh = (
                        np.exp(-mode.lam_hat * (m + 1))
                        - 2 * np.exp(-mode.lam_hat * m)
                        + np.exp(-mode.lam_hat * (m - 1))
                    )
                    s = self.weight_w * (
                        np.exp(-mode.lam * (m + 1))
                        - 2 * np.exp(-mode.lam * m)
                        + np.exp(-mode.lam * (m - 1))
                    )
                fh_shift += sh * np.exp(lam_hat * t) * mode.amp_hat
                f_shift += s * np.exp(lam * t) * mode.amp
            worst = max(worst, sup_norm(fh_dot - fh_shift), sup_norm(f_dot - f_shift))
        return worst

    def to_json_dict(self) -> dict:
        def cplx(z):
            z = complex(z)
            return [z.real, z.imag]

        def mat(m):
            return [[cplx(v) for v in row] for row in np.asarray(m)]

        return {
            "scheme": self.scheme,
            "weight_w": cplx(self.weight_w),
            "alpha": self.alpha,
            "window_n": self.window_n,
            "time": self.time,
            "modes": [
                {
                    "amp_hat": mat(m.amp_hat),
                    "lam_hat": cplx(m.lam_hat),
                    "amp": mat(m.amp),
                    "lam": cplx(m.lam),
                }
                for m in self.modes
            ],
        }


def glm_system_from_json(d: dict) -> "GlmSystem":
    def cplx(v):
        return complex(v[0], v[1])

    def mat(rows):
        return np.array([[cplx(v) for v in row] for row in rows], dtype=complex)

    modes = [
        GlmMode(mat(m["amp_hat"]), cplx(m["lam_hat"]), mat(m["amp"]), cplx(m["lam"]))
        for m in d["modes"]
    ]
    return build_hankel_data(
        modes,
        d["scheme"],
        cplx(d["weight_w"]),
        int(d["window_n"]),
        int(d["alpha"]),
        float(d["time"]),
    )


def build_hankel_data(
    modes,
    scheme: str,
    weight_w: complex,
    window_n: int,
    alpha: int = 1,
    time: float = 0.0,
) -> GlmSystem:
    """Evaluate mode sums into Hankel storage at the given time.

    Raises ModeOverflow when any entry magnitude exceeds 1e12 on the window
    (the factorization would then be numerically meaningless).
    """
    modes = tuple(modes)
    if not modes:
        raise DegenerateMode("need at least one mode")
    if scheme == SYMMETRIC and alpha != 1:
        raise ValueError("the symmetric scheme carries a single flow")
    nd, md = modes[0].amp_hat.shape
    for m in modes:
        if m.amp_hat.shape != (nd, md):
            raise DimensionError("mode amplitude shapes differ")
    size = 4 * window_n + 1
    fhat = np.zeros((size, nd, md), dtype=complex)
    f = np.zeros((size, md, nd), dtype=complex)
    ms = np.arange(-2 * window_n, 2 * window_n + 1)
    for mode in modes:
        lam_hat, lam = scheme_dispersions(mode, scheme, weight_w, alpha)
        eh = np.exp(-mode.lam_hat * ms + lam_hat * time)
        e = np.exp(-mode.lam * ms + lam * time)
        fhat += eh[:, None, None] * mode.amp_hat[None]
        f += e[:, None, None] * mode.amp[None]
    peak = max(sup_norm(fhat), sup_norm(f))
    if not np.isfinite(peak) or peak > OVERFLOW_LIMIT:
        raise ModeOverflow(f"mode data peaks at {peak:.3e} on the window")
    return GlmSystem(
        scheme, complex(weight_w), alpha, window_n, nd, md, time, modes, fhat, f
    )


# --------------------------------------------------------------------------
# Factorization solve
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class GlmSolution:
    """Component blocks of the factorization on the window.

    a, b, c, d are indexed [i+N, j+N] and populated for j >= i; kminus_big
    is the strictly-lower remainder of the assembled product.
    """

    window_n: int
    n_dim: int
    m_dim: int
    a: np.ndarray = field(repr=False)
    b: np.ndarray = field(repr=False)
    c: np.ndarray = field(repr=False)
    d: np.ndarray = field(repr=False)
    kminus_big: np.ndarray = field(repr=False)
    factorization_residual: float = 0.0

    def kplus_block(self, i: int, j: int) -> np.ndarray:
        wi, wj = i + self.window_n, j + self.window_n
        return np.block(
            [[self.a[wi, wj], self.b[wi, wj]], [self.c[wi, wj], self.d[wi, wj]]]
        )


def _big_f(system: GlmSystem) -> np.ndarray:
    n = system.window_n
    size = 2 * n + 1
    dim = system.n_dim + system.m_dim
    big = np.zeros((size * dim, size * dim), dtype=complex)
    for wi in range(size):
        for wj in range(size):
            m = (wi - n) + (wj - n)
            big[
                wi * dim : wi * dim + system.n_dim,
                wj * dim + system.n_dim : (wj + 1) * dim,
            ] = system.fhat_at(m)
            big[
                wi * dim + system.n_dim : (wi + 1) * dim,
                wj * dim : wj * dim + system.n_dim,
            ] = system.f_at(m)
    return big


def solve_glm(system: GlmSystem) -> GlmSolution:
    """Row-window solve of the factorization equations.

    Each abstract row i yields one dense linear system for the off-diagonal
    block row (the sums truncate at the upper window edge, which assumes
    decaying data there); the diagonal-block rows follow by substitution.
    """
    n = system.window_n
    nd, md = system.n_dim, system.m_dim
    size = 2 * n + 1
    a = np.zeros((size, size, nd, nd), dtype=complex)
    b = np.zeros((size, size, nd, md), dtype=complex)
    c = np.zeros((size, size, md, nd), dtype=complex)
    d = np.zeros((size, size, md, md), dtype=complex)
    for i in range(-n, n + 1):
        ls = np.arange(i, n + 1)
        w = len(ls)
        # gram blocks: gb[l', j] = sum_l f(l'+l) fhat(l+j)  (m_dim square)
        f_stack = np.stack([[system.f_at(lp + l) for l in ls] for lp in ls])
        fh_stack = np.stack([[system.fhat_at(l + j) for j in ls] for l in ls])
        gb = np.einsum("plab,ljbc->pjac", f_stack, fh_stack)
        big_b = np.eye(w * md, dtype=complex) - _flatten_blocks(gb, md, md)
        rhs_b = np.concatenate([system.fhat_at(i + j) for j in ls], axis=1)
        try:
            brow = dense_solve(big_b.T, -rhs_b.T).T
        except SingularMatrix as exc:
            raise SingularGlm(f"row {i}: {exc}") from exc
        # gram blocks for the lower component: gb2[l', j] = sum_l fhat(l'+l) f(l+j)
        gb2 = np.einsum("plab,ljbc->pjac", fh_stack, f_stack)
        big_c = np.eye(w * nd, dtype=complex) - _flatten_blocks(gb2, nd, nd)
        rhs_c = np.concatenate([system.f_at(i + j) for j in ls], axis=1)
        try:
            crow = dense_solve(big_c.T, -rhs_c.T).T
        except SingularMatrix as exc:
            raise SingularGlm(f"row {i}: {exc}") from exc
        bs = brow.reshape(nd, w, md).transpose(1, 0, 2)
        cs = crow.reshape(md, w, nd).transpose(1, 0, 2)
        for jdx, j in enumerate(ls):
            b[i + n, j + n] = bs[jdx]
            c[i + n, j + n] = cs[jdx]
        for jdx, j in enumerate(ls):
            a[i + n, j + n] = -sum(bs[ldx] @ system.f_at(l + j) for ldx, l in enumerate(ls))
            d[i + n, j + n] = -sum(cs[ldx] @ system.fhat_at(l + j) for ldx, l in enumerate(ls))
    sol = GlmSolution(n, nd, md, a, b, c, d, np.zeros((0, 0)), 0.0)
    kplus = _big_kplus(system, sol)
    big_f = _big_f(system)
    prod = kplus + big_f + kplus @ big_f
    dim = nd + md
    upper = np.zeros_like(prod)
    kminus = np.zeros_like(prod)
    for wi in range(size):
        for wj in range(size):
            blk = prod[wi * dim : (wi + 1) * dim, wj * dim : (wj + 1) * dim]
            if wj >= wi:
                upper[wi * dim : (wi + 1) * dim, wj * dim : (wj + 1) * dim] = blk
            else:
                kminus[wi * dim : (wi + 1) * dim, wj * dim : (wj + 1) * dim] = blk
    return GlmSolution(n, nd, md, a, b, c, d, kminus, float(sup_norm(upper)))


def _flatten_blocks(gb: np.ndarray, rows: int, cols: int) -> np.ndarray:
    w = gb.shape[0]
    return gb.transpose(0, 2, 1, 3).reshape(w * rows, w * cols)


def _big_kplus(system: GlmSystem, sol: GlmSolution) -> np.ndarray:
    n = system.window_n
    size = 2 * n + 1
    dim = system.n_dim + system.m_dim
    big = np.zeros((size * dim, size * dim), dtype=complex)
    for wi in range(size):
        for wj in range(wi, size):
            big[wi * dim : (wi + 1) * dim, wj * dim : (wj + 1) * dim] = sol.kplus_block(
                wi - n, wj - n
            )
    return big


# --------------------------------------------------------------------------
# Closed-form single-mode solution and local fields
# --------------------------------------------------------------------------


def one_soliton_closed_form(
    mode: GlmMode,
    kappa: complex,
    window_n: int,
    time: float,
    scheme: str = FORWARD_BACKWARD,
    weight_w: complex = 1.0,
    alpha: int = 1,
):
    """Closed-form off-diagonal blocks for single-mode data.

    B_{kj} = -exp(-lam_hat (k+j) + LamHat t) / (1 - kappa h_k) * amp_hat
    C_{kj} = -exp(-lam (k+j) + Lam t) / (1 - kappa h_k) * amp
    h_k    = exp(-2 (lam+lam_hat) k + (Lam+LamHat) t) / (exp(-(lam+lam_hat)) - 1)^2

    assuming the geometric sums extend past the window edge (decaying data).
    kappa is the triple-closure constant of the amplitude pair.
    """
    lam_hat_d, lam_d = scheme_dispersions(mode, scheme, weight_w, alpha)
    s = mode.lam + mode.lam_hat
    if abs(np.exp(-s) - 1.0) < 1e-12:
        raise DegenerateMode("lam + lam_hat = 0 makes the geometric factor singular")
    size = 2 * window_n + 1
    nd, md = mode.amp_hat.shape
    b = np.zeros((size, size, nd, md), dtype=complex)
    c = np.zeros((size, size, md, nd), dtype=complex)
    denom_geo = (np.exp(-s) - 1.0) ** 2
    for k in range(-window_n, window_n + 1):
        h_k = np.exp(-2 * s * k + (lam_d + lam_hat_d) * time) / denom_geo
        damp = 1.0 - kappa * h_k
        for j in range(-window_n, window_n + 1):
            b[k + window_n, j + window_n] = (
                -np.exp(-mode.lam_hat * (k + j) + lam_hat_d * time) / damp * mode.amp_hat
            )
            c[k + window_n, j + window_n] = (
                -np.exp(-mode.lam * (k + j) + lam_d * time) / damp * mode.amp
            )
    return b, c


def extract_local_fields(sol: GlmSolution):
    """Diagonal blocks as candidate lattice fields (x_n, y_n) = (B_nn, C_nn)."""
    n = sol.window_n
    idx = np.arange(2 * n + 1)
    return sol.b[idx, idx], sol.c[idx, idx]

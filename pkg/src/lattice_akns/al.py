"""Multiplicative-spectral-parameter lattice (matrix Ablowitz-Ladik type).

State: per-site blocks ``bhat[n]`` (N-dim x M-dim) and ``b[n]`` (M-dim x
N-dim), Lax matrix

    L_n(z) = [[z*I, bhat_n], [b_n, (1/z)*I]].

Two flow variants are implemented: the standard one whose time component is
the degree-2 Laurent matrix minus the grading (giving the saturable-coupling
lattice with -2*bhat damping terms), and the network variant with plain-sum
off-diagonal entries, which admits the symmetric reduction bhat = b.

Soliton factories: the fundamental Darboux recursion (static construction,
checked through the gauge-intertwining identity) and the oscillator-type
construction driven by a solution of the symmetric discrete heat equation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import RankOnePair, SpectralMatrixPoly, _frozen, sup_norm
from .errors import (
    BlowUp,
    DegenerateMode,
    InconsistentDressing,
    SingularDressing,
    SpectralPole,
)

PERIODIC = "periodic"
VANISHING = "vanishing"
VARIANT_AL = "al"
VARIANT_NETWORK = "network"


@dataclass(frozen=True)
class AlState:
    """Immutable lattice state; ``boundary`` selects shift semantics."""

    n_sites: int
    n_dim: int
    m_dim: int
    bhat: np.ndarray = field(repr=False)  # (n_sites, n_dim, m_dim)
    b: np.ndarray = field(repr=False)  # (n_sites, m_dim, n_dim)
    boundary: str = PERIODIC

    def __post_init__(self):
        bh = np.asarray(self.bhat, dtype=np.complex128)
        bb = np.asarray(self.b, dtype=np.complex128)
        if bh.shape != (self.n_sites, self.n_dim, self.m_dim):
            raise ValueError(f"bhat has shape {bh.shape}")
        if bb.shape != (self.n_sites, self.m_dim, self.n_dim):
            raise ValueError(f"b has shape {bb.shape}")
        if self.boundary not in (PERIODIC, VANISHING):
            raise ValueError(f"unknown boundary {self.boundary!r}")
        object.__setattr__(self, "bhat", _frozen(bh))
        object.__setattr__(self, "b", _frozen(bb))

    @property
    def dim(self) -> int:
        return self.n_dim + self.m_dim

    def with_fields(self, bhat: np.ndarray, b: np.ndarray) -> "AlState":
        return AlState(self.n_sites, self.n_dim, self.m_dim, bhat, b, self.boundary)


def zero_state(n_sites: int, n_dim: int = 1, m_dim: int = 1, boundary: str = PERIODIC) -> AlState:
    return AlState(
        n_sites,
        n_dim,
        m_dim,
        np.zeros((n_sites, n_dim, m_dim), dtype=np.complex128),
        np.zeros((n_sites, m_dim, n_dim), dtype=np.complex128),
        boundary,
    )


def random_state(
    rng: np.random.Generator,
    n_sites: int,
    n_dim: int = 1,
    m_dim: int = 1,
    scale: float = 0.4,
    boundary: str = PERIODIC,
) -> AlState:
    def draw(*shape):
        return scale * (rng.uniform(-1, 1, shape) + 1j * rng.uniform(-1, 1, shape))

    return AlState(
        n_sites, n_dim, m_dim, draw(n_sites, n_dim, m_dim), draw(n_sites, m_dim, n_dim), boundary
    )


def validate_vanishing(state: AlState, tol: float = 1e-10) -> None:
    """Check both fields are below tol at the first and last window site."""
    edges = max(
        sup_norm(state.bhat[0]),
        sup_norm(state.bhat[-1]),
        sup_norm(state.b[0]),
        sup_norm(state.b[-1]),
    )
    if edges > tol:
        raise ValueError(f"edge fields {edges:.3e} exceed vanishing tolerance")


def _shift(state: AlState, a: np.ndarray, k: int) -> np.ndarray:
    """result[n] = a[n+k]; periodic roll or zero-padded window shift."""
    if state.boundary == PERIODIC:
        return np.roll(a, -k, axis=0)
    out = np.zeros_like(a)
    if k >= 0:
        if k < a.shape[0]:
            out[: a.shape[0] - k] = a[k:]
    else:
        out[-k:] = a[: a.shape[0] + k]
    return out


def al_lax(state: AlState, site: int, z: complex) -> np.ndarray:
    if z == 0:
        raise SpectralPole("Lax matrix has a pole at z = 0")
    n = site % state.n_sites
    return np.block(
        [
            [z * np.eye(state.n_dim), state.bhat[n]],
            [state.b[n], (1.0 / z) * np.eye(state.m_dim)],
        ]
    )


def al_lax_poly(state: AlState, site: int) -> SpectralMatrixPoly:
    """Lax matrix as a Laurent polynomial of degrees -1..1."""
    n = site % state.n_sites
    nd, md = state.n_dim, state.m_dim
    zn, zm, znm, zmn = (
        np.zeros((nd, nd)),
        np.zeros((md, md)),
        np.zeros((nd, md)),
        np.zeros((md, nd)),
    )
    c_minus = np.block([[zn, znm], [zmn, np.eye(md)]])
    c_zero = np.block([[zn, state.bhat[n]], [state.b[n], zm]])
    c_plus = np.block([[np.eye(nd), znm], [zmn, zm]])
    return SpectralMatrixPoly(-1, np.stack([c_minus, c_zero, c_plus]))


def _v_blocks(state: AlState, site: int, variant: str):
    nsites = state.n_sites
    n = site % nsites
    bh, b = state.bhat, state.b
    bh_m = _shift(state, bh, -1)[n]
    b_m = _shift(state, b, -1)[n]
    return bh[n], b[n], bh_m, b_m


def al_v_operator_poly(state: AlState, site: int, variant: str) -> SpectralMatrixPoly:
    """Degree-2 Laurent time component for the requested variant.

    "al": the degree-2 matrix minus the grading diag(I, -I); its zero
    curvature gives the saturable lattice with the -2*bhat_n terms.
    "network": the plain-sum matrix; the constant part is the identity and
    drops out of the curvature, so it is returned as printed.
    """
    nd, md = state.n_dim, state.m_dim
    bh, b, bh_m, b_m = _v_blocks(state, site, variant)
    zn, zm = np.zeros((nd, nd)), np.zeros((md, md))
    znm, zmn = np.zeros((nd, md)), np.zeros((md, nd))
    eye_n, eye_m = np.eye(nd), np.eye(md)
    if variant == VARIANT_AL:
        sign = -1.0
    elif variant == VARIANT_NETWORK:
        sign = 1.0
    else:
        raise ValueError(f"unknown variant {variant!r}")
    c2 = np.block([[eye_n, znm], [zmn, zm]])
    c1 = np.block([[zn, bh], [b_m, zm]])
    c0 = np.block([[-bh @ b_m, znm], [zmn, sign * (-(b @ bh_m))]])
    cm1 = np.block([[zn, sign * bh_m], [sign * b, zm]])
    cm2 = np.block([[zn, znm], [zmn, sign * eye_m]])
    if variant == VARIANT_AL:
        # subtract the grading diag(I, -I)
        c0 = c0 - np.block([[eye_n, znm], [zmn, -eye_m]])
    return SpectralMatrixPoly(-2, np.stack([cm2, cm1, c0, c1, c2]))


def al_v_operator(state: AlState, site: int, variant: str, z: complex) -> np.ndarray:
    if z == 0:
        raise SpectralPole("V operator has a pole at z = 0")
    return al_v_operator_poly(state, site, variant).eval(z)


def al_eom_rhs(state: AlState, variant: str) -> tuple[np.ndarray, np.ndarray]:
    """Right-hand sides of the two flow variants.

    "al":      dbhat_n = bhat_{n+1} + bhat_{n-1} - 2 bhat_n
                         - bhat_n b_n bhat_{n-1} - bhat_{n+1} b_n bhat_n
               db_n    = -b_{n+1} - b_{n-1} + 2 b_n
                         + b_{n+1} bhat_n b_n + b_n bhat_n b_{n-1}
    "network": dbhat_n = bhat_{n+1} - bhat_{n-1}
                         + bhat_n b_n bhat_{n-1} - bhat_{n+1} b_n bhat_n
               db_n    = b_{n+1} - b_{n-1}
                         - b_{n+1} bhat_n b_n + b_n bhat_n b_{n-1}
    """
    bh, b = state.bhat, state.b
    bh_p, bh_m = _shift(state, bh, 1), _shift(state, bh, -1)
    b_p, b_m = _shift(state, b, 1), _shift(state, b, -1)
    if variant == VARIANT_AL:
        dbh = bh_p + bh_m - 2 * bh - bh @ b @ bh_m - bh_p @ b @ bh
        db = -b_p - b_m + 2 * b + b_p @ bh @ b + b @ bh @ b_m
        return dbh, db
    if variant == VARIANT_NETWORK:
        dbh = bh_p - bh_m + bh @ b @ bh_m - bh_p @ b @ bh
        db = b_p - b_m - b_p @ bh @ b + b @ bh @ b_m
        return dbh, db
    raise ValueError(f"unknown variant {variant!r}")


def al_zero_curvature_residual(state: AlState, variant: str, z_samples) -> list[float]:
    """Residual of d/dt L_n - (V_{n+1} L_n - L_n V_n) per spectral sample."""
    zs = list(z_samples)
    if not zs:
        raise ValueError("need at least one spectral sample")
    dbh, db = al_eom_rhs(state, variant)
    out = []
    for z in zs:
        if z == 0:
            raise SpectralPole("z = 0 sample")
        lmat = np.stack([al_lax(state, n, z) for n in range(state.n_sites)])
        v = np.stack(
            [al_v_operator(state, n, variant, z) for n in range(state.n_sites)]
        )
        v_next = _shift(state, v, 1)
        dl = np.zeros_like(lmat)
        dl[:, : state.n_dim, state.n_dim :] = dbh
        dl[:, state.n_dim :, : state.n_dim] = db
        resid = dl - (v_next @ lmat - lmat @ v)
        if state.boundary == VANISHING:
            resid = resid[1:-1]  # window edges see truncated neighbors
        out.append(sup_norm(resid))
    return out


def al_evolve(
    state: AlState,
    variant: str,
    dt: float,
    steps: int,
    save_every: int | None = None,
) -> list[tuple[float, AlState]]:
    """Fixed-step RK4 on the selected flow variant."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    stride = save_every or steps or 1
    bh, b = state.bhat.copy(), state.b.copy()
    samples = [(0.0, state)]

    def rhs(bha, ba):
        return al_eom_rhs(state.with_fields(bha, ba), variant)

    # overflow is detected and reported via BlowUp, not warned about
    with np.errstate(over="ignore", invalid="ignore"):
        for step in range(steps):
            k1h, k1b = rhs(bh, b)
            k2h, k2b = rhs(bh + 0.5 * dt * k1h, b + 0.5 * dt * k1b)
            k3h, k3b = rhs(bh + 0.5 * dt * k2h, b + 0.5 * dt * k2b)
            k4h, k4b = rhs(bh + dt * k3h, b + dt * k3b)
            bh = bh + (dt / 6.0) * (k1h + 2 * k2h + 2 * k3h + k4h)
            b = b + (dt / 6.0) * (k1b + 2 * k2b + 2 * k3b + k4b)
            if not (
                np.all(np.isfinite(bh.view(np.float64)))
                and np.all(np.isfinite(b.view(np.float64)))
            ):
                raise BlowUp(step + 1)
            if (step + 1) % stride == 0 or step == steps - 1:
                samples.append(((step + 1) * dt, state.with_fields(bh, b)))
    return samples


def al_hamiltonian(state: AlState, c: complex = 1.0) -> complex:
    """Diagnostic energy sum tr(bhat_{n+1} b_n + c * b_{n+1} bhat_n)."""
    bh_p = _shift(state, state.bhat, 1)
    b_p = _shift(state, state.b, 1)
    return complex(
        np.trace(bh_p @ state.b, axis1=1, axis2=2).sum()
        + c * np.trace(b_p @ state.bhat, axis1=1, axis2=2).sum()
    )


# --------------------------------------------------------------------------
# Soliton constructions
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class AlDarbouxParams:
    """Parameters of the gauge (Darboux) soliton factories.

    big_q is the free gauge constant; kappa and zeta enter the oscillator
    closure constraint A_n = kappa * h_n * b_{n-1} + zeta.  The seeds feed
    the fundamental recursion; the rank-one pair carries the matrix shape.
    """

    big_q: complex
    pair: RankOnePair
    kappa: complex = 1.0
    zeta: complex = 0.0
    a1: complex = 0.0
    d1: complex = 0.0
    bhat1: complex = 0.0
    b1: complex = 0.0

    def __post_init__(self):
        if self.big_q == 0:
            raise ValueError("big_q must be nonzero")


def al_fundamental_scalars(params: AlDarbouxParams, n_lo: int, n_hi: int):
    """Scalar sequences (a, d, bhat, b) on sites n_lo..n_hi inclusive.

    Forward recursion from the site-1 seeds:
        a_{n+1} = a_n - bhat_n b_n (1 + kappa a_n)
        d_{n+1} = d_n - b_n bhat_n (1 + kappa d_n)
        bhat_{n+1} = bhat_n / (Q^2 (1 + kappa d_{n+1}))
        b_{n+1}    = Q^2 b_n / (1 + kappa a_{n+1})
    and the same relations inverted for sites left of 1.
    """
    q2 = params.big_q**2
    kap = params.pair.kappa
    span = n_hi - n_lo + 1
    if span <= 0:
        raise ValueError("empty site range")
    a = {1: complex(params.a1)}
    d = {1: complex(params.d1)}
    bh = {1: complex(params.bhat1)}
    b = {1: complex(params.b1)}

    def checked(value, site):
        if abs(value) < 1e-14:
            raise SingularDressing(site)
        return value

    for n in range(1, n_hi):
        a[n + 1] = a[n] - bh[n] * b[n] * (1 + kap * a[n])
        d[n + 1] = d[n] - b[n] * bh[n] * (1 + kap * d[n])
        bh[n + 1] = bh[n] / (q2 * checked(1 + kap * d[n + 1], n + 1))
        b[n + 1] = q2 * b[n] / checked(1 + kap * a[n + 1], n + 1)
    for n in range(1, n_lo, -1):
        # invert one step: the forward a-relation is linear in a_{n-1}
        bh[n - 1] = q2 * (1 + kap * d[n]) * bh[n]
        b[n - 1] = (1 + kap * a[n]) * b[n] / q2
        a[n - 1] = (a[n] + bh[n - 1] * b[n - 1]) / checked(
            1 - kap * bh[n - 1] * b[n - 1], n - 1
        )
        d[n - 1] = (d[n] + b[n - 1] * bh[n - 1]) / checked(
            1 - kap * b[n - 1] * bh[n - 1], n - 1
        )
    ns = range(n_lo, n_hi + 1)
    arr = lambda seq: np.array([seq[n] for n in ns], dtype=complex)  # noqa: E731
    return arr(a), arr(d), arr(bh), arr(b)


def al_soliton_fundamental(
    params: AlDarbouxParams, n_sites: int, boundary: str = VANISHING
) -> AlState:
    """State built from the fundamental Darboux recursion seeds."""
    _, _, bh, b = al_fundamental_scalars(params, 1, n_sites)
    bhat_blocks = bh[:, None, None] * params.pair.bhat[None]
    b_blocks = b[:, None, None] * params.pair.b[None]
    return AlState(
        n_sites, params.pair.n_dim, params.pair.m_dim, bhat_blocks, b_blocks, boundary
    )


def al_darboux_identity_residual(
    params: AlDarbouxParams, n_sites: int, z_samples
) -> float:
    """Max residual of M_{n+1}(z) L0_n(z) - L_n(z) M_n(z) over sites/samples.

    L0 is the zero-field Lax matrix diag(z I, I/z); M carries the recursion
    data with off-diagonal blocks B_n = -bhat_{n-1}/Q and C_n = Q b_{n-1}.
    """
    a, d, bh, b = al_fundamental_scalars(params, 0, n_sites + 1)
    pair = params.pair
    q = params.big_q
    nd, md = pair.n_dim, pair.m_dim
    eye_n, eye_m = np.eye(nd), np.eye(md)
    state = al_soliton_fundamental(params, n_sites)

    def mmat(idx: int, z: complex) -> np.ndarray:
        # idx is the lattice site; scalars array starts at site 0
        amat = eye_n + a[idx] * (pair.bhat @ pair.b)
        dmat = eye_m + d[idx] * (pair.b @ pair.bhat)
        bmat = -(1 / q) * bh[idx - 1] * pair.bhat
        cmat = q * b[idx - 1] * pair.b
        return np.block(
            [
                [q * z * eye_n - (1 / (q * z)) * amat, bmat],
                [cmat, q * z * dmat - (1 / (q * z)) * eye_m],
            ]
        )

    worst = 0.0
    for z in z_samples:
        l0 = np.block([[z * eye_n, np.zeros((nd, md))], [np.zeros((md, nd)), eye_m / z]])
        for n in range(1, n_sites + 1):
            lhs = mmat(n + 1, z) @ l0
            rhs = al_lax(state, n - 1, z) @ mmat(n, z)
            worst = max(worst, sup_norm(lhs - rhs))
    return worst


@dataclass(frozen=True)
class OscillatorSoliton:
    """Oscillator-construction data: evaluate fields and exact derivatives.

    The driving data h_n(t) is a mode sum over the symmetric discrete heat
    equation; the auxiliary sequence u_n = 1/b_n solves the one-term linear
    recursion u_n = mu u_{n-1} + (kappa_eff/Q^2) h_n with mu = zeta/Q^2 and
    is itself a heat solution (the resummed particular part plus one free
    mu-geometric mode).  The closure constraint is solvable for generic heat
    data only when zeta = kappa_eff / Q^2; this is validated on entry.
    """

    params: AlDarbouxParams
    heat_modes: tuple[tuple[complex, complex], ...]  # (amplitude, base)
    u_modes: tuple[tuple[complex, complex], ...]
    kappa_eff: complex

    def _mode_sum(self, modes, n, t, shift=0):
        n = np.asarray(n)
        acc = np.zeros(n.shape, dtype=complex)
        for c, xi in modes:
            lam = (np.sqrt(xi) - 1 / np.sqrt(xi)) ** 2
            acc = acc + c * xi ** (n - 1 + shift) * np.exp(lam * t)
        return acc

    def scalars(self, n, t):
        """(bhat, b) scalar field values at sites n, time t."""
        q2 = self.params.big_q**2
        u = self._mode_sum(self.u_modes, n, t)
        u_next = self._mode_sum(self.u_modes, n, t, shift=1)
        h = self._mode_sum(self.heat_modes, n, t)
        h_next = self._mode_sum(self.heat_modes, n, t, shift=1)
        b = 1.0 / u
        bhat = q2 * (u_next * h - u * h_next) / u
        return bhat, b

    def scalars_with_derivative(self, n, t):
        """Fields and their exact time derivatives (mode-by-mode rule)."""
        q2 = self.params.big_q**2

        def pair(modes, shift):
            val = self._mode_sum(modes, n, t, shift)
            der = np.zeros_like(val)
            for c, xi in modes:
                lam = (np.sqrt(xi) - 1 / np.sqrt(xi)) ** 2
                der = der + lam * c * xi ** (np.asarray(n) - 1 + shift) * np.exp(lam * t)
            return val, der

        u, du = pair(self.u_modes, 0)
        up, dup = pair(self.u_modes, 1)
        h, dh = pair(self.heat_modes, 0)
        hp, dhp = pair(self.heat_modes, 1)
        b = 1.0 / u
        db = -du / u**2
        num = up * h - u * hp
        dnum = dup * h + up * dh - du * hp - u * dhp
        bhat = q2 * num / u
        dbhat = q2 * (dnum * u - num * du) / u**2
        return bhat, b, dbhat, db

    def state(self, n_sites: int, t: float = 0.0, boundary: str = PERIODIC) -> AlState:
        pair = self.params.pair
        bhat, b = self.scalars(np.arange(1, n_sites + 1), t)
        return AlState(
            n_sites,
            pair.n_dim,
            pair.m_dim,
            bhat[:, None, None] * pair.bhat[None],
            b[:, None, None] * pair.b[None],
            boundary,
        )


def al_soliton_oscillator(
    params: AlDarbouxParams,
    heat_modes,
    u_seed: complex = 0.0,
    constraint_tol: float = 1e-10,
) -> OscillatorSoliton:
    """Build the oscillator-type soliton from symmetric heat-equation data.

    heat_modes: iterable of (amplitude, base) pairs; each base xi carries the
    dispersion (sqrt(xi) - 1/sqrt(xi))^2.  u_seed is the amplitude of the
    free geometric mode with base mu = zeta/Q^2.  Raises InconsistentDressing
    unless zeta = kappa_eff/Q^2 (with kappa_eff = kappa * pair-kappa), the
    condition under which the closure constraint is solvable for generic
    heat data, and DegenerateMode when a heat base collides with mu.
    """
    modes = tuple((complex(c), complex(xi)) for c, xi in heat_modes)
    if any(xi == 0 for _, xi in modes):
        raise DegenerateMode("zero heat-mode base")
    kappa_eff = params.kappa * params.pair.kappa
    q2 = params.big_q**2
    mu = params.zeta / q2
    if abs(params.zeta - kappa_eff / q2) > constraint_tol * max(1.0, abs(kappa_eff)):
        raise InconsistentDressing(
            "closure constraint needs zeta = kappa*pair_kappa/Q^2 "
            f"(got zeta={params.zeta}, required {kappa_eff / q2})"
        )
    u_modes = []
    for c, xi in modes:
        if abs(xi - mu) < 1e-12:
            raise DegenerateMode("heat base resonates with the geometric base")
        u_modes.append(((kappa_eff / q2) * c / (1 - mu / xi), xi))
    if u_seed != 0:
        if mu == 0:
            raise DegenerateMode("geometric mode needs nonzero zeta")
        # store with the same (n-1)-power convention: c*mu^{n-1} = (c*mu)*mu^{n-2}...
        u_modes.append((complex(u_seed) * mu, mu))  # u_seed * mu^n = (u_seed*mu) mu^{n-1}
    return OscillatorSoliton(params, modes, tuple(u_modes), kappa_eff)

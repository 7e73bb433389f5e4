"""Transfer matrix, local charges, and conservation diagnostics.

The ordered product T(lam) = L_N ... L_1 of site Lax matrices generates the
integrals of motion: every coefficient of tr T is conserved under periodic
dynamics, and for width-1 states the logarithm of the normalized trace
lam^{-N} tr T(lam) expands into the local charges H_k.

The first four charges also have closed forms as traces of local field
products; both routes are implemented and cross-checked in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import count

import numpy as np

from . import al as _al
from . import dnls as _dnls
from .algebra import SpectralMatrixPoly, poly_mul
from .errors import NotNormalized, UnvalidatedOrder

VALIDATED_CHARGE_ORDER = 4


def transfer_poly(state) -> SpectralMatrixPoly:
    """Ordered product of site Lax polynomials, site N down to site 1."""
    if isinstance(state, _al.AlState):
        site_poly = lambda n: _al.al_lax_poly(state, n)  # noqa: E731
    else:
        site_poly = lambda n: _dnls.lax_poly(state, n)  # noqa: E731
    t = site_poly(state.n_sites - 1)
    for n in range(state.n_sites - 2, -1, -1):
        t = poly_mul(t, site_poly(n))
    return t


def transfer_trace(state, lam: complex) -> complex:
    """tr T(lam) by direct numeric products (cheap path for diagnostics)."""
    if isinstance(state, _al.AlState):
        mat = _al.al_lax(state, state.n_sites - 1, lam)
        for n in range(state.n_sites - 2, -1, -1):
            mat = mat @ _al.al_lax(state, n, lam)
    else:
        mat = _dnls.lax_matrix(state, state.n_sites - 1, lam)
        for n in range(state.n_sites - 2, -1, -1):
            mat = mat @ _dnls.lax_matrix(state, n, lam)
    return complex(np.trace(mat))


def _shift(a: np.ndarray, k: int) -> np.ndarray:
    return np.roll(a, -k, axis=0)


def closed_form_charges(state: _dnls.DnlsState) -> tuple[complex, complex, complex, complex]:
    """The four local charges as traces of field products (indices mod N).

    H1 = tr sum nmat_n
    H2 = tr sum (x_n y_{n-1} - nmat_n^2 / 2)
    H3 = tr sum (x_n y_{n-2} - (nmat_n + nmat_{n-1}) x_n y_{n-1} + nmat_n^3 / 3)
    H4 = tr sum (x_n y_{n-3} - (nmat_{n-2}+nmat_{n-1}+nmat_n) x_n y_{n-2}
                 + nmat_{n-1} nmat_n x_n y_{n-1}
                 + (nmat_{n-1}^2 + nmat_n^2) x_n y_{n-1}
                 - (x_n y_{n-1})^2 / 2 - x_n y_{n-1} x_{n-1} y_{n-2}
                 - nmat_n^4 / 4)
    The quartic term is the alternating product (x_n y_{n-1})^2, the only
    reading that is well-typed for rectangular blocks (and the one the
    transfer-matrix expansion produces).
    """
    x, y = state.x, state.y
    nn = state.nmat()
    xy1 = x @ _shift(y, -1)

    def trsum(blocks):
        return complex(np.trace(blocks, axis1=1, axis2=2).sum())

    h1 = trsum(nn)
    h2 = trsum(xy1 - 0.5 * nn @ nn)
    h3 = trsum(x @ _shift(y, -2) - (nn + _shift(nn, -1)) @ xy1 + nn @ nn @ nn / 3.0)
    h4 = trsum(
        x @ _shift(y, -3)
        - (_shift(nn, -2) + _shift(nn, -1) + nn) @ x @ _shift(y, -2)
        + _shift(nn, -1) @ nn @ xy1
        + (_shift(nn, -1) @ _shift(nn, -1) + nn @ nn) @ xy1
        - 0.5 * xy1 @ xy1
        - xy1 @ _shift(x, -1) @ _shift(y, -2)
        - 0.25 * nn @ nn @ nn @ nn
    )
    return h1, h2, h3, h4


def tau_coefficients(state: _dnls.DnlsState, up_to: int = 4) -> tuple[complex, ...]:
    """Coefficients tau_k of lam^{-k} in lam^{-N} tr T(lam), width-1 only.

    For block width > 1 the leading trace is not 1 and the logarithmic
    expansion has no canonical normalization; NotNormalized is raised.
    """
    if state.n_dim != 1:
        raise NotNormalized("tau extraction requires width-1 upper blocks")
    t = transfer_poly(state)
    n = state.n_sites
    return tuple(complex(np.trace(t.coeff(n - k))) for k in range(up_to + 1))


@dataclass(frozen=True)
class ChargeReport:
    """Charges, trace coefficients, and sampled transfer traces of a state."""

    h: tuple[complex, ...]
    tau: tuple[complex, ...]  # empty when width > 1
    trace_samples: dict[complex, complex] = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        out: dict = {}
        for k, v in enumerate(self.h, start=1):
            out[f"h{k}"] = [v.real, v.imag]
        for k, v in enumerate(self.tau):
            out[f"tau{k}"] = [v.real, v.imag]
        out["trace_samples"] = [
            {"lambda": [lam.real, lam.imag], "trace": [tr.real, tr.imag]}
            for lam, tr in self.trace_samples.items()
        ]
        return out


def local_charges(
    state: _dnls.DnlsState, lambda_samples=()
) -> ChargeReport:
    """Closed-form charges plus, for width-1 states, the trace coefficients."""
    h = closed_form_charges(state)
    tau = tau_coefficients(state) if state.n_dim == 1 else ()
    samples = {complex(lam): transfer_trace(state, lam) for lam in lambda_samples}
    return ChargeReport(h, tau, samples)


def _weighted_partitions(k: int):
    """All (j_1 .. j_{k-1}) with sum i*j_i = k, excluding the trivial j_k."""
    parts = []

    def rec(i, remaining, current):
        if i == k:
            if remaining == 0:
                parts.append(tuple(current))
            return
        for j in count(0):
            if j * i > remaining:
                break
            rec(i + 1, remaining - j * i, current + [j])

    rec(1, k, [])
    return parts


def charge_recursion(tau, up_to: int = 4, experimental_weight: str | None = None):
    """Local charges from trace coefficients.

    The validated relations (orders 2..4):
        H2 = tau2 - H1^2/2
        H3 = tau3 - H1 H2 - H1^3/6
        H4 = tau4 - H1 H3 - H2^2/2 - H1^2 H2 / 2 - H1^4/24
    with H1 = tau1.  Orders above 4 are available only in experimental mode,
    with ``experimental_weight`` choosing the combinatorial weight
    ("product" for 1/(j_1!...j_{k-1}!), "max" for 1/max(j_1!,...,j_{k-1}!)).
    The two weights agree through order 5 and diverge from order 6 on only
    when two exponents exceed 1; neither is validated beyond order 4.
    """
    tau = list(tau)
    if up_to > VALIDATED_CHARGE_ORDER and experimental_weight is None:
        raise UnvalidatedOrder(f"order {up_to} needs an experimental weight choice")
    if len(tau) <= up_to:
        raise ValueError("need tau_0..tau_k inclusive")
    if experimental_weight is None:
        h1 = tau[1]
        out = [h1]
        if up_to >= 2:
            out.append(tau[2] - 0.5 * h1**2)
        if up_to >= 3:
            out.append(tau[3] - h1 * out[1] - h1**3 / 6.0)
        if up_to >= 4:
            out.append(
                tau[4]
                - h1 * out[2]
                - 0.5 * out[1] ** 2
                - 0.5 * h1**2 * out[1]
                - h1**4 / 24.0
            )
        return tuple(out[:up_to])
    if experimental_weight not in ("product", "max"):
        raise ValueError("experimental_weight must be 'product' or 'max'")
    hs: list[complex] = []
    for k in range(1, up_to + 1):
        acc = tau[k]
        # partitions run over powers of H_1..H_{k-1} only, so H_k = tau_k - ...
        for js in _weighted_partitions(k):
            facts = [math.factorial(j) for j in js if j > 0]
            weight = 1.0 / (math.prod(facts) if experimental_weight == "product" else max(facts))
            term = weight
            for i, j in enumerate(js, start=1):
                if j:
                    term = term * hs[i - 1] ** j
            acc = acc - term
        hs.append(acc)
    return tuple(hs)

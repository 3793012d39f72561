"""Single-shot Bayesian phase estimation under the mean-square-error cost.

For a prior ``z`` the averaged operators are ``varrho = int z rho(phi)`` and
``varrho' = int z phi rho(phi)``. The optimal estimator ``S`` solves
``S varrho + varrho S = 2 varrho'``; its eigenvectors are the optimal
measurement and its eigenvalues the optimal estimates. The metrological
power is ``P = [Tr(varrho S^2) - Tr(varrho S)^2] / sigma0^4`` and the optimal
error is ``sigma0^2 (1 - sigma0^2 P)``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import fock_core as fc
from .errors import IllDefinedEstimatorError, UndefinedConditioningError, ValidationError
from .fock_core import DensityOperator, HermitianOperator, PureState, State, to_density
from .linalg import EPS_SUPPORT, LEAK_TOL, solve_symmetric_lyapunov

log = logging.getLogger(__name__)

DEFAULT_NODES = 200
WIDE_PRIOR_WIDTH = 2.0
KAPPA_SWITCH = 1e-3


@dataclass(frozen=True, eq=False)
class Prior:
    """Phase prior on a bounded interval with a Gauss-Legendre rule.

    Build with :meth:`flat` or :meth:`tabulated`. Tabulated densities are
    piecewise linear between samples and are normalised on construction;
    the quadrature is composite over the sample intervals so the kinks
    never fall inside a panel.
    """

    kind: str
    support: tuple[float, float]
    nodes: int = DEFAULT_NODES
    samples: tuple[np.ndarray, np.ndarray] | None = None
    rule: str = "gauss-legendre"

    def __post_init__(self):
        a, b = (float(x) for x in self.support)
        if not (math.isfinite(a) and math.isfinite(b)) or b <= a:
            raise ValidationError(f"prior support must be a bounded interval with positive width, got {self.support!r}")
        if isinstance(self.nodes, bool) or int(self.nodes) != self.nodes or self.nodes < 2:
            raise ValidationError("quadrature needs at least 2 nodes")
        if self.kind not in ("flat", "tabulated"):
            raise ValidationError(f"unknown prior kind {self.kind!r}")
        object.__setattr__(self, "support", (a, b))
        object.__setattr__(self, "nodes", int(self.nodes))
        if self.kind == "tabulated":
            xs, zs = (np.asarray(v, dtype=float) for v in self.samples)
            if xs.ndim != 1 or xs.shape != zs.shape or len(xs) < 2:
                raise ValidationError("tabulated prior needs matching 1-D sample arrays of length >= 2")
            if np.any(np.diff(xs) <= 0) or np.any(zs < 0) or not np.all(np.isfinite(zs)):
                raise ValidationError("tabulated prior needs increasing abscissae and nonnegative density")
            mass = float(np.trapezoid(zs, xs))
            if mass <= 0:
                raise ValidationError("tabulated prior has zero mass")
            xs.setflags(write=False)
            zs = zs / mass
            zs.setflags(write=False)
            object.__setattr__(self, "samples", (xs, zs))
        x, w = self.quadrature()
        if abs(float(w.sum()) - 1.0) > 1e-10:
            raise ValidationError(f"prior does not integrate to 1 under its quadrature ({w.sum()!r})")

    @classmethod
    def flat(cls, width: float, center: float = 0.0, nodes: int = DEFAULT_NODES) -> "Prior":
        if not width > 0:
            raise ValidationError(f"prior width must be positive, got {width!r}")
        return cls("flat", (center - width / 2, center + width / 2), nodes)

    @classmethod
    def tabulated(cls, xs, density, nodes: int = DEFAULT_NODES) -> "Prior":
        xs = np.asarray(xs, dtype=float)
        return cls("tabulated", (float(xs[0]), float(xs[-1])), nodes, (xs, np.asarray(density, dtype=float)))

    @property
    def width(self) -> float:
        return self.support[1] - self.support[0]

    @property
    def wide(self) -> bool:
        """Width beyond which the square error no longer mimics a periodic cost."""
        return self.width > WIDE_PRIOR_WIDTH

    def density(self, phi) -> np.ndarray:
        phi = np.asarray(phi, dtype=float)
        a, b = self.support
        inside = (phi >= a) & (phi <= b)
        if self.kind == "flat":
            return np.where(inside, 1.0 / self.width, 0.0)
        xs, zs = self.samples
        return np.where(inside, np.interp(phi, xs, zs), 0.0)

    def quadrature(self) -> tuple[np.ndarray, np.ndarray]:
        """Nodes and weights ``w_i z(phi_i)`` so that ``sum f(phi_i) w_i ~ int z f``."""
        if self.kind == "flat":
            edges = np.array(self.support)
            per_panel = self.nodes
        else:
            edges = self.samples[0]
            per_panel = max(4, -(-self.nodes // (len(edges) - 1)))
        t, wt = np.polynomial.legendre.leggauss(per_panel)
        lo, hi = edges[:-1, None], edges[1:, None]
        x = (0.5 * (hi - lo) * t + 0.5 * (hi + lo)).ravel()
        w = (0.5 * (hi - lo) * wt).ravel()
        return x, w * self.density(x)

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"kind": self.kind, "support": list(self.support),
                               "nodes": self.nodes, "rule": self.rule}
        if self.kind == "flat":
            out.update(width=self.width, center=0.5 * sum(self.support))
        else:
            out.update(xs=self.samples[0].tolist(), density=self.samples[1].tolist())
        return out


def prior_moments(prior: Prior) -> tuple[float, float]:
    """Mean and variance of the prior."""
    if prior.kind == "flat":
        return 0.5 * sum(prior.support), prior.width**2 / 12
    x, w = prior.quadrature()
    mean = float(w @ x)
    return mean, float(w @ (x - mean) ** 2)


def _phase_kernel(basis, nodes, weights, sign, power: int) -> np.ndarray:
    """``sum_i w_i phi_i^power exp(sign i phi_i (k_j - k_k))`` for all (j, k)."""
    k = fc.k_diagonal(basis)
    diff = k[:, None] - k[None, :]
    ph = np.exp(sign * 1j * np.multiply.outer(nodes, diff))
    return np.tensordot(weights * nodes**power, ph, axes=1)


def averaged_states(state_or_spec, prior: Prior, *, sign: int = fc.PHASE_SIGN,
                    centered: bool = False) -> tuple[DensityOperator, HermitianOperator]:
    """Quadrature averages ``varrho`` and ``varrho'`` over the prior.

    Encoding is diagonal in the Fock basis, so summing ``encode_phase`` over
    the nodes reduces to multiplying ``rho`` entrywise by the quadrature sum
    of the node phases. With ``centered=True`` the first moment is taken
    about the prior mean instead of zero.
    """
    rho = to_density(_as_state(state_or_spec))
    x, w = prior.quadrature()
    if centered:
        shift = prior_moments(prior)[0]
        x = x - shift
        # nodes are now offsets from the mean; rho(mean + d) = encode(rho(mean), d)
        rho = fc.encode_phase(rho, shift, sign)
    zeroth = rho.matrix * _phase_kernel(rho.basis, x, w, sign, 0)
    first = rho.matrix * _phase_kernel(rho.basis, x, w, sign, 1)
    varrho = DensityOperator(rho.basis, zeroth, rho.n_max, "prior_average", dict(rho.parameters))
    varrho1 = HermitianOperator(rho.basis, first, rho.n_max, "prior_first_moment")
    return varrho, varrho1


def personick_estimator(varrho: DensityOperator, varrho1: HermitianOperator, *,
                        mean: float = 0.0, eps_support: float = EPS_SUPPORT) -> HermitianOperator:
    """Solve ``S varrho + varrho S = 2 varrho'`` on the support of ``varrho``.

    ``mean`` is a shift ``c`` such that ``varrho1`` is the first moment about
    ``c``; the returned estimator is shifted back by ``c`` times the identity
    on the active basis.
    """
    if tuple(varrho.basis) != tuple(varrho1.basis):
        basis = fc.union_basis(varrho.basis, varrho1.basis)
        r, r1 = varrho.on_basis(basis), varrho1.on_basis(basis)
    else:
        basis, r, r1 = varrho.basis, varrho.matrix, varrho1.matrix
    S = solve_symmetric_lyapunov(r, r1, eps_support=eps_support, leak_tol=LEAK_TOL,
                                 error=IllDefinedEstimatorError)
    if mean:
        S = S + mean * np.eye(len(basis))
    return HermitianOperator(basis, S, varrho.n_max, "personick_estimator")


@dataclass(frozen=True, eq=False)
class BayesResult:
    P: float
    optimal_error: float
    S: HermitianOperator
    sigma0_sq: float
    prior_mean: float = 0.0
    wide_prior: bool = False
    flags: tuple[str, ...] = field(default_factory=tuple)

    @property
    def estimates(self) -> np.ndarray:
        """Optimal phase estimates: eigenvalues of S."""
        return np.linalg.eigvalsh(self.S.matrix)

    def measurement(self) -> tuple[np.ndarray, np.ndarray]:
        """Eigenvalues and eigenvectors (columns over ``S.basis``) of S."""
        return np.linalg.eigh(self.S.matrix)

    def to_dict(self, include_operator: bool = False) -> dict:
        out: dict[str, Any] = {"P": self.P, "optimal_error": self.optimal_error,
                               "sigma0_sq": self.sigma0_sq, "wide_prior_flag": self.wide_prior}
        if include_operator:
            out["S"] = fc.state_to_dict(self.S)["entries"]
            out["estimates"] = self.estimates.tolist()
        return out


def metrological_power(state_or_spec, prior: Prior, *, sign: int = fc.PHASE_SIGN,
                       eps_support: float = EPS_SUPPORT) -> BayesResult:
    """Bayesian metrological power and the optimal single-shot error."""
    if prior.wide:
        log.warning("prior width %.3g exceeds %.3g; square error no longer approximates a periodic cost",
                    prior.width, WIDE_PRIOR_WIDTH)
    mean, var = prior_moments(prior)
    varrho, varrho1 = averaged_states(state_or_spec, prior, sign=sign, centered=True)
    Sc = personick_estimator(varrho, varrho1, eps_support=eps_support)
    r, s = varrho.matrix, Sc.matrix
    second = float(np.trace(r @ s @ s).real)
    first = float(np.trace(r @ s).real)
    flags = []
    if abs(first) > 1e-10:
        log.warning("Tr(varrho S) deviates from the prior mean by %.3e", first)
        flags.append("estimator_mean_mismatch")
    P = (second - first**2) / var**2
    S = HermitianOperator(Sc.basis, s + mean * np.eye(Sc.dim), Sc.n_max, "personick_estimator")
    if prior.wide:
        flags.append("wide_prior")
    return BayesResult(P=P, optimal_error=var - second, S=S, sigma0_sq=var, prior_mean=mean,
                       wide_prior=prior.wide, flags=tuple(flags))


def kappa(x: float) -> float:
    """Prior-width attenuation ``9 (x cos x - sin x)^2 / x^6``, with range [0, 1]."""
    x = float(x)
    if abs(x) <= KAPPA_SWITCH:
        x2 = x * x
        return 1.0 - x2 / 5 + 3 * x2 * x2 / 175
    return 9.0 * (x * math.cos(x) - math.sin(x)) ** 2 / x**6


def closed_form_P(N: int, alpha: float, beta: float, W: float) -> float:
    """Metrological power of the N00N-family master state under a centred flat prior."""
    fc.MasterState(N, alpha, beta)
    if not W > 0:
        raise ValidationError("prior width must be positive")
    return kappa(N * W / 2) * beta * N**2


def closed_form_estimator(N: int, W: float, sign: int = fc.PHASE_SIGN) -> HermitianOperator:
    """Optimal estimator for every master state under a centred flat prior of width W.

    Supported on ``{|N0>, |0N>}``; with ``sign = +1`` the ``<0N|S|N0>`` entry is
    ``i (N W cos(NW/2) - 2 sin(NW/2)) / (N^2 W)``. The other sign convention
    negates S.
    """
    c = 1j * (N * W * math.cos(N * W / 2) - 2 * math.sin(N * W / 2)) / (N**2 * W)
    c = c if sign == 1 else -c
    return HermitianOperator.from_entries({((0, N), (N, 0)): c, ((N, 0), (0, N)): -c},
                                          N, kind="personick_estimator")


def closed_form_averages(N: int, alpha: float, beta: float, W: float,
                         sign: int = fc.PHASE_SIGN) -> tuple[np.ndarray, np.ndarray, tuple]:
    """Analytic ``varrho`` and ``varrho'`` of the master state, flat prior on [-W/2, W/2].

    Returns matrices over the basis ``((0,0), (0,N), (N,0), (N,N))``.
    """
    s, c = math.sin(N * W / 2), math.cos(N * W / 2)
    basis = (fc.FockIndex(0, 0), fc.FockIndex(0, N), fc.FockIndex(N, 0), fc.FockIndex(N, N))
    r = np.zeros((4, 4), dtype=complex)
    r[0, 0] = alpha
    r[3, 3] = 1 - alpha - beta
    r[1, 1] = r[2, 2] = beta / 2
    r[1, 2] = r[2, 1] = beta * s / (N * W)
    r1 = np.zeros((4, 4), dtype=complex)
    coef = 1j * beta * (N * W * c - 2 * s) / (2 * N**2 * W)
    coef = coef if sign == 1 else -coef
    r1[1, 2] = coef
    r1[2, 1] = -coef
    return r, r1, basis


def conditioned_power(state_or_spec, prior: Prior, **kwargs) -> float:
    """Metrological power per detection event: ``P / (1 - <0|rho|0>)``."""
    state = _as_state(state_or_spec)
    p_click = 1.0 - fc.vacuum_probability(state)
    if p_click <= 0.0:
        raise UndefinedConditioningError("state is pure vacuum; conditioning on detection is undefined")
    return metrological_power(state, prior, **kwargs).P / p_click


def _as_state(state_or_spec) -> State:
    if isinstance(state_or_spec, (PureState, DensityOperator)):
        return state_or_spec
    return fc.make_state(state_or_spec)

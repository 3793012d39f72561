"""Local (frequentist) phase estimation: QFI, SLD, classical Fisher information.

QFI convention: for pure states ``F = <(n1-n2)^2> - <n1-n2>^2``, which is the
same as ``Tr(rho L^2)`` for the SLD ``L`` of the encoding generated by
``K = (n1-n2)/2``. A N00N state gives ``F = N^2``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from . import fock_core as fc
from .errors import (DegenerateProbeError, IllDefinedSLDError, UndefinedConditioningError,
                     ValidationError)
from .fock_core import (DensityOperator, FockIndex, HermitianOperator, PureState, State,
                        encode_phase, k_diagonal, to_density)
from .linalg import EPS_SUPPORT, LEAK_TOL, solve_symmetric_lyapunov

log = logging.getLogger(__name__)

EPS_PROB = 1e-12
POVM_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class QfiResult:
    value: float
    method: str  # "pure-variance" | "spectral-sld" | "closed-form"
    sld: HermitianOperator | None = None

    def __post_init__(self):
        if not self.value >= 0:
            raise ValidationError(f"QFI must be nonnegative, got {self.value!r}")

    def __float__(self) -> float:
        return float(self.value)

    def to_dict(self, include_sld: bool = False) -> dict:
        out: dict[str, Any] = {"value": self.value, "method": self.method}
        if include_sld and self.sld is not None:
            out["sld"] = fc.state_to_dict(self.sld)["entries"]
        return out


@dataclass(frozen=True, eq=False)
class Povm:
    """Effects over (possibly different) subsets of the Fock basis.

    Each effect is PSD and the effects sum to the identity on the union of
    their supports, which is the space the POVM is defined on.
    """

    effects: tuple[HermitianOperator, ...]
    labels: tuple

    def __post_init__(self):
        effects = tuple(self.effects)
        labels = tuple(self.labels)
        if len(effects) != len(labels) or not effects:
            raise ValidationError("POVM needs one label per effect and at least one effect")
        for e in effects:
            if np.linalg.eigvalsh(e.matrix)[0] < -POVM_TOL:
                raise ValidationError("POVM effect is not positive semidefinite")
        space = fc.union_basis(*(e.basis for e in effects))
        total = sum(e.on_basis(space) for e in effects)
        resid = float(np.max(np.abs(total - np.eye(len(space)))))
        if resid > POVM_TOL:
            raise ValidationError(f"POVM effects do not sum to identity (residual {resid:.3e})")
        object.__setattr__(self, "effects", effects)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "completeness_residual", resid)

    def traces(self, op: HermitianOperator) -> np.ndarray:
        """``Tr(Pi_x op)`` for every effect."""
        missing = set(op.basis) - set(self.space)
        if missing:
            raise ValidationError(f"state has support outside the POVM space, e.g. {tuple(sorted(missing)[0])}")
        out = np.empty(len(self.effects))
        present = set(op.basis)
        for n, e in enumerate(self.effects):
            common = [i for i in e.basis if i in present]
            if not common:
                out[n] = 0.0
                continue
            ei = [e.basis.index(i) for i in common]
            oi = [op.basis.index(i) for i in common]
            out[n] = float(np.sum(e.matrix[np.ix_(ei, ei)] * op.matrix[np.ix_(oi, oi)].T).real)
        return out


@dataclass(frozen=True, eq=False)
class PureDecomposition:
    weights: tuple[float, ...]
    states: tuple[PureState, ...]

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        if len(w) != len(self.states) or not w:
            raise ValidationError("decomposition needs one weight per state")
        if min(w) < 0 or abs(sum(w) - 1.0) > 1e-12:
            raise ValidationError("decomposition weights must be nonnegative and sum to 1")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "states", tuple(self.states))

    def density(self) -> DensityOperator:
        basis = fc.union_basis(*(s.basis for s in self.states))
        m = np.zeros((len(basis), len(basis)), dtype=complex)
        for w, s in zip(self.weights, self.states):
            v = s.vector_on(basis)
            m += w * np.outer(v, v.conj())
        n_max = max(s.n_max for s in self.states)
        return DensityOperator(basis, m, n_max, "mixture")


def decompose(spec) -> PureDecomposition:
    """Pure-state decomposition of the named mixed families."""
    if isinstance(spec, (fc.RhoONs, fc.RhoONN, fc.MasterState)):
        N = spec.N
        if isinstance(spec, fc.MasterState):
            w = (spec.alpha, spec.beta, 1 - spec.alpha - spec.beta)
        else:
            c2 = (1 + spec.eta**2) ** 2
            if isinstance(spec, fc.RhoONs):
                w = (1 / c2, 2 * spec.eta**2 / c2, spec.eta**4 / c2)
            else:
                w = ((1 + spec.eta**4) / c2, 2 * spec.eta**2 / c2, 0.0)
        kets = (PureState.from_amplitudes({(0, 0): 1}, N),
                fc.make_state(fc.Noon(N)),
                PureState.from_amplitudes({(N, N): 1}, N))
        keep = [(x, k) for x, k in zip(w, kets) if x > 0]
        return PureDecomposition(tuple(x for x, _ in keep), tuple(k for _, k in keep))
    if isinstance(spec, fc.ProbMix):
        inner = fc.make_state(spec.inner)
        if not isinstance(inner, PureState):
            raise ValidationError("only ProbMix with a pure inner state has a two-term decomposition")
        vac = PureState.from_amplitudes({(0, 0): 1}, inner.n_max)
        pairs = [(x, k) for x, k in ((1 - spec.p, vac), (spec.p, inner)) if x > 0]
        return PureDecomposition(tuple(x for x, _ in pairs), tuple(k for _, k in pairs))
    state = fc.make_state(spec)
    if isinstance(state, PureState):
        return PureDecomposition((1.0,), (state,))
    raise ValidationError(f"no known pure decomposition for {type(spec).__name__}")


def _diff_moments(state: PureState) -> tuple[float, float]:
    d = 2 * k_diagonal(state.basis)
    pop = np.abs(state.amplitudes) ** 2
    return float(pop @ d), float(pop @ d**2)


def qfi_pure(state: PureState) -> QfiResult:
    """Variance of ``n1 - n2`` in a pure state."""
    if not isinstance(state, PureState):
        raise ValidationError("qfi_pure needs a PureState")
    if abs(float(np.vdot(state.amplitudes, state.amplitudes).real) - 1.0) > fc.NORM_TOL:
        raise ValidationError("qfi_pure needs a normalised state")
    m1, m2 = _diff_moments(state)
    return QfiResult(max(0.0, m2 - m1 * m1), "pure-variance")


def phase_derivative(state: State, phi: float = 0.0, sign: int = fc.PHASE_SIGN) -> HermitianOperator:
    """``d rho / d phi = sign * i [K, rho(phi)]``, computed exactly."""
    rho = encode_phase(to_density(state), phi, sign)
    k = k_diagonal(rho.basis)
    d = sign * 1j * (k[:, None] - k[None, :]) * rho.matrix
    return HermitianOperator(rho.basis, d, rho.n_max, "phase_derivative")


def sld(rho: State, phi: float = 0.0, *, sign: int = fc.PHASE_SIGN,
        eps_support: float = EPS_SUPPORT) -> HermitianOperator:
    """Symmetric logarithmic derivative of ``rho(phi)`` on its support."""
    rho = to_density(rho)
    enc = encode_phase(rho, phi, sign)
    drho = phase_derivative(rho, phi, sign)
    L = solve_symmetric_lyapunov(enc.matrix, drho.matrix, eps_support=eps_support,
                                 leak_tol=LEAK_TOL, error=IllDefinedSLDError)
    return HermitianOperator(rho.basis, L, rho.n_max, "sld", {"phi": phi})


def qfi_mixed(rho: State, phi: float = 0.0, *, sign: int = fc.PHASE_SIGN,
              eps_support: float = EPS_SUPPORT) -> QfiResult:
    L = sld(rho, phi, sign=sign, eps_support=eps_support)
    enc = encode_phase(to_density(rho), phi, sign).matrix
    value = float(np.trace(enc @ L.matrix @ L.matrix).real)
    return QfiResult(max(0.0, value), "spectral-sld", L)


def qfi(state: State, phi: float = 0.0, **kwargs) -> QfiResult:
    """Pure-variance formula for kets, spectral SLD for density operators."""
    if isinstance(state, PureState):
        return qfi_pure(state)
    return qfi_mixed(state, phi, **kwargs)


def cfi(rho: State, phi: float, povm: Povm, *, sign: int = fc.PHASE_SIGN,
        eps_prob: float = EPS_PROB) -> float:
    """Classical Fisher information of ``povm`` on ``rho(phi)``.

    Outcomes with negligible probability and derivative are dropped. An
    outcome with negligible probability but finite derivative makes the
    information divergent; ``math.inf`` is returned and a warning logged.
    """
    rho = to_density(rho)
    probs = povm.traces(encode_phase(rho, phi, sign))
    dprobs = povm.traces(phase_derivative(rho, phi, sign))
    total = 0.0
    for p, dp in zip(probs, dprobs):
        if p < eps_prob:
            if abs(dp) >= eps_prob:
                log.warning("divergent classical Fisher information at phi=%r", phi)
                return math.inf
            continue
        total += dp * dp / p
    return float(total)


def convexity_bound(decomp: PureDecomposition) -> float:
    """Convex-roof upper bound on the QFI of the mixture.

    The weights are phase-independent numbers, so the classical Fisher
    information of the weights vanishes and only the averaged pure-state
    QFIs remain.
    """
    weight_cfi = 0.0
    return weight_cfi + sum(w * qfi_pure(s).value for w, s in zip(decomp.weights, decomp.states))


def conditioned_qfi(state_or_spec, phi: float = 0.0) -> float:
    """QFI divided by the probability of detecting at least one photon."""
    state = _as_state(state_or_spec)
    p_click = 1.0 - fc.vacuum_probability(state)
    if p_click <= 0.0:
        raise UndefinedConditioningError("state is pure vacuum; conditioning on detection is undefined")
    return qfi(state, phi).value / p_click


def _as_state(state_or_spec) -> State:
    if isinstance(state_or_spec, (PureState, DensityOperator)):
        return state_or_spec
    return fc.make_state(state_or_spec)


def _vacuum_overlap_sq(phi_state: PureState) -> float:
    return abs(phi_state.amplitude((0, 0))) ** 2


def prob_mix_qfi_closed(phi_state: PureState, p: float) -> float:
    """QFI of ``(1-p)|0><0| + p|phi><phi|``."""
    fc._check_prob(p)
    c0 = _vacuum_overlap_sq(phi_state)
    if c0 >= 1.0 - 1e-15:
        raise DegenerateProbeError("probe coincides with the vacuum")
    m1, _ = _diff_moments(phi_state)
    return p * qfi_pure(phi_state).value - p * (1 - p) * m1 * m1 * c0 / (1 - c0)


def prob_mix_qfi_nonorthogonal(phi_state: PureState, p: float) -> float:
    """Same QFI from overlaps of the probe and its phase derivative.

    ``4p(<d|d> + <phi|d>^2) + 4p(1-p)|<phi|0>|^2 <d|phi>^2 / (1 - |<phi|0>|^2)``
    with ``|d> = d|phi>/dphi``.
    """
    fc._check_prob(p)
    c0 = _vacuum_overlap_sq(phi_state)
    if c0 >= 1.0 - 1e-15:
        raise DegenerateProbeError("probe coincides with the vacuum")
    a = phi_state.amplitudes
    d = fc.PHASE_SIGN * 1j * k_diagonal(phi_state.basis) * a
    dd = np.vdot(d, d)
    pd = np.vdot(a, d)
    dp = np.vdot(d, a)
    val = 4 * p * (dd + pd**2) + 4 * p * (1 - p) * c0 * dp**2 / (1 - c0)
    return float(val.real)


def prob_mix_sld(phi_state: PureState, p: float, phi: float = 0.0,
                 sign: int = fc.PHASE_SIGN) -> HermitianOperator:
    """SLD of the probabilistic mixture built in the {|0>, |phi>, |phi'>} frame.

    ``L = 2/(1 - |<0|phi>|^2) [p<phi'|phi><0|phi> |0><phi| - <0|phi> |0><phi'|
    + |phi'><phi| + h.c.]``, an independent route to the spectral SLD.
    """
    c0sq = _vacuum_overlap_sq(phi_state)
    if c0sq >= 1.0 - 1e-15:
        raise DegenerateProbeError("probe coincides with the vacuum")
    if not 0.0 < p <= 1.0:
        raise ValidationError("p must lie in (0, 1]")
    enc = encode_phase(phi_state, phi, sign)
    basis = fc.union_basis(enc.basis, (FockIndex(0, 0),))
    f = enc.vector_on(basis)
    d = sign * 1j * k_diagonal(basis) * f
    z = np.zeros(len(basis), dtype=complex)
    z[basis.index(FockIndex(0, 0))] = 1.0
    c0 = np.vdot(z, f)  # <0|phi>
    dp = np.vdot(d, f)  # <phi'|phi>
    out = (p * dp * c0 * np.outer(z, f.conj())
           + p * np.conj(dp) * np.conj(c0) * np.outer(f, z.conj())
           - c0 * np.outer(z, d.conj())
           - np.conj(c0) * np.outer(d, z.conj())
           + np.outer(d, f.conj()) + np.outer(f, d.conj()))
    L = 2 * out / (1 - c0sq)
    return HermitianOperator(basis, L, phi_state.n_max, "sld", {"phi": phi})


def coherent_mix_qfi_closed(phi_state: PureState, p: float) -> float:
    """QFI of ``sqrt(1-p)|0> + sqrt(p)|phi>`` with ``<0|phi> = 0``."""
    fc._check_prob(p)
    if _vacuum_overlap_sq(phi_state) > 0:
        raise ValidationError("coherent probabilistic mixing requires <0|phi> = 0")
    m1, m2 = _diff_moments(phi_state)
    return p * m2 - p * p * m1 * m1


def coherent_mix_conditioned_ratio(phi_state: PureState, p: float) -> float:
    """F/p for the coherent mixture: ``F(phi) + (1-p)<n1-n2>^2``."""
    if p <= 0:
        raise UndefinedConditioningError("p = 0: no detection events")
    return coherent_mix_qfi_closed(phi_state, p) / p


def prob_mix_conditioned_ratio(phi_state: PureState, p: float) -> float:
    """F/p for the incoherent mixture; equals F(phi) when <0|phi> = 0."""
    if p <= 0:
        raise UndefinedConditioningError("p = 0: no detection events")
    return prob_mix_qfi_closed(phi_state, p) / p


def loss_bound(n_mean: float, gamma: float) -> float:
    """Upper bound ``n_mean * gamma / (1 - gamma)`` on the QFI under loss ``gamma``."""
    if not (0.0 < gamma < 1.0):
        raise ValidationError(f"loss rate gamma must lie in (0, 1), got {gamma!r}")
    if n_mean < 0:
        raise ValidationError("mean photon number must be nonnegative")
    return n_mean * gamma / (1.0 - gamma)


def qcrb_variance(F: float, nu: int = 1) -> float:
    """``1/(nu F)``; ``math.inf`` when the state carries no information."""
    if isinstance(nu, bool) or int(nu) != nu or nu < 1:
        raise ValidationError("repetitions nu must be an integer >= 1")
    if F < 0:
        raise ValidationError("QFI must be nonnegative")
    if F == 0:
        return math.inf
    return 1.0 / (nu * F)


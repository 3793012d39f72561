"""Two-mode truncated Fock space: states, operators and the named probe families.

States and operators are stored densely over their *active basis*, the
sorted set of Fock indices ``(n1, n2)`` they actually touch. Everything
outside the active basis is an implicit zero. Phase encoding is diagonal in
the Fock basis, so the active basis never grows under the operations here.

Phase convention: ``rho(phi) = exp(sign*i*phi*K) rho exp(-sign*i*phi*K)`` with
``K = (n1 - n2)/2`` and ``sign = -1`` by default. Flipping ``sign`` is the
same as flipping the sign of ``phi``; Fisher information and metrological
power are unchanged, while SLDs and estimators change sign.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from numbers import Integral, Real
from typing import Any, Mapping, NamedTuple, Union

import numpy as np

from .errors import ValidationError

PHASE_SIGN = -1

NORM_TOL = 1e-12
RENORM_TOL = 1e-9
HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10


class FockIndex(NamedTuple):
    n1: int
    n2: int

    @property
    def total(self) -> int:
        return self.n1 + self.n2

    @property
    def difference(self) -> int:
        return self.n1 - self.n2


def as_index(value: Any) -> FockIndex:
    try:
        n1, n2 = value
    except (TypeError, ValueError):
        raise ValidationError(f"Fock index must be a pair of integers, got {value!r}") from None
    if not _is_int(n1) or not _is_int(n2) or n1 < 0 or n2 < 0:
        raise ValidationError(f"Fock index must hold nonnegative integers, got {value!r}")
    return FockIndex(int(n1), int(n2))


def _is_int(value: Any) -> bool:
    return isinstance(value, Integral) and not isinstance(value, bool)


def full_basis(n_max: int) -> tuple[FockIndex, ...]:
    """All indices with ``0 <= n1, n2 <= n_max``."""
    return tuple(FockIndex(a, b) for a in range(n_max + 1) for b in range(n_max + 1))


def k_diagonal(basis) -> np.ndarray:
    """Diagonal of the generator K = (n1 - n2)/2 over ``basis``."""
    return np.array([0.5 * (i.n1 - i.n2) for i in basis], dtype=float)


def total_numbers(basis) -> np.ndarray:
    return np.array([i.n1 + i.n2 for i in basis], dtype=float)


def _check_basis(basis, n_max: int) -> tuple[FockIndex, ...]:
    basis = tuple(as_index(i) for i in basis)
    if len(set(basis)) != len(basis):
        raise ValidationError("basis contains repeated Fock indices")
    if not _is_int(n_max) or n_max < 0:
        raise ValidationError(f"n_max must be a nonnegative integer, got {n_max!r}")
    for i in basis:
        if i.n1 > n_max or i.n2 > n_max:
            raise ValidationError(f"index {tuple(i)} exceeds truncation n_max={n_max}")
    return basis


def _freeze(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class PureState:
    """Unit-norm ket over an active Fock basis."""

    basis: tuple[FockIndex, ...]
    amplitudes: np.ndarray
    n_max: int
    kind: str = "custom"
    parameters: dict = field(default_factory=dict)

    def __post_init__(self):
        basis = _check_basis(self.basis, self.n_max)
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape[0] != len(basis):
            raise ValidationError("amplitude count does not match basis size")
        if not np.all(np.isfinite(amps)):
            raise ValidationError("amplitudes must be finite")
        norm_sq = float(np.vdot(amps, amps).real)
        if abs(norm_sq - 1.0) > RENORM_TOL:
            raise ValidationError(f"state is not normalised (norm^2 = {norm_sq!r})")
        if abs(norm_sq - 1.0) > 0.0:
            amps = amps / math.sqrt(norm_sq)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "amplitudes", _freeze(amps))

    @classmethod
    def from_amplitudes(cls, amplitudes: Mapping, n_max: int | None = None,
                        kind: str = "custom", parameters: dict | None = None) -> "PureState":
        items = [(as_index(k), complex(v)) for k, v in amplitudes.items() if complex(v) != 0]
        if not items:
            raise ValidationError("a pure state needs at least one nonzero amplitude")
        items.sort()
        if n_max is None:
            n_max = max(max(i) for i, _ in items)
        return cls(tuple(i for i, _ in items), np.array([a for _, a in items]), n_max,
                   kind, dict(parameters or {}))

    def amplitude(self, index) -> complex:
        index = as_index(index)
        try:
            return complex(self.amplitudes[self.basis.index(index)])
        except ValueError:
            return 0j

    def as_dict(self) -> dict[FockIndex, complex]:
        return {i: complex(a) for i, a in zip(self.basis, self.amplitudes)}

    def vector_on(self, basis) -> np.ndarray:
        return embed_vector(self.amplitudes, self.basis, basis)

    def density(self) -> "DensityOperator":
        a = self.amplitudes
        return DensityOperator(self.basis, np.outer(a, a.conj()), self.n_max,
                               self.kind, dict(self.parameters))


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """Hermitian operator over an active Fock basis (zero elsewhere)."""

    basis: tuple[FockIndex, ...]
    matrix: np.ndarray
    n_max: int
    kind: str = "custom"
    parameters: dict = field(default_factory=dict)

    def __post_init__(self):
        basis = _check_basis(self.basis, self.n_max)
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (len(basis), len(basis)):
            raise ValidationError(f"matrix shape {m.shape} does not match basis size {len(basis)}")
        if not np.all(np.isfinite(m)):
            raise ValidationError("operator entries must be finite")
        scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
        if m.size and np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL * scale:
            raise ValidationError("operator is not Hermitian")
        m = 0.5 * (m + m.conj().T)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "matrix", _freeze(m))

    @classmethod
    def from_entries(cls, entries: Mapping, n_max: int | None = None, **kwargs):
        """Build from ``{(i, j): value}``; one triangle suffices."""
        cells: dict[tuple[FockIndex, FockIndex], complex] = {}
        for (i, j), v in entries.items():
            i, j = as_index(i), as_index(j)
            v = complex(v)
            if (j, i) in cells and abs(cells[(j, i)] - v.conjugate()) > HERMITIAN_TOL:
                raise ValidationError(f"entries ({i},{j}) and ({j},{i}) are not conjugate")
            cells[(i, j)] = v
            cells[(j, i)] = v.conjugate()
        basis = sorted({i for i, _ in cells} | {j for _, j in cells})
        if not basis:
            raise ValidationError("operator needs at least one entry")
        if n_max is None:
            n_max = max(max(i) for i in basis)
        pos = {idx: k for k, idx in enumerate(basis)}
        m = np.zeros((len(basis), len(basis)), dtype=complex)
        for (i, j), v in cells.items():
            m[pos[i], pos[j]] = v
        return cls(tuple(basis), m, n_max, **kwargs)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def entry(self, a, b) -> complex:
        a, b = as_index(a), as_index(b)
        if a not in self.basis or b not in self.basis:
            return 0j
        return complex(self.matrix[self.basis.index(a), self.basis.index(b)])

    def entries(self, atol: float = 0.0) -> dict[tuple[FockIndex, FockIndex], complex]:
        """Upper-triangle entries (including the diagonal) with ``|value| > atol``."""
        out = {}
        for j in range(self.dim):
            for k in range(j, self.dim):
                v = complex(self.matrix[j, k])
                if abs(v) > atol:
                    out[(self.basis[j], self.basis[k])] = v
        return out

    def on_basis(self, basis) -> np.ndarray:
        """Matrix of this operator expressed over ``basis`` (a superset)."""
        return embed_matrix(self.matrix, self.basis, basis)

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def _like(self, matrix: np.ndarray):
        return type(self)(self.basis, matrix, self.n_max, self.kind, dict(self.parameters))


@dataclass(frozen=True, eq=False)
class DensityOperator(HermitianOperator):
    """Unit-trace positive semidefinite Hermitian operator."""

    def __post_init__(self):
        super().__post_init__()
        tr = float(np.trace(self.matrix).real)
        if abs(tr - 1.0) > RENORM_TOL:
            raise ValidationError(f"density operator trace is {tr!r}, not 1")
        if tr != 1.0:
            object.__setattr__(self, "matrix", _freeze(self.matrix / tr))
        lam_min = float(np.linalg.eigvalsh(self.matrix)[0])
        if lam_min < -PSD_TOL:
            raise ValidationError(f"density operator has negative eigenvalue {lam_min!r}")


State = Union[PureState, DensityOperator]


def embed_vector(vector, basis, target) -> np.ndarray:
    pos = {idx: k for k, idx in enumerate(target)}
    out = np.zeros(len(target), dtype=complex)
    try:
        rows = [pos[i] for i in basis]
    except KeyError as exc:
        raise ValidationError(f"index {tuple(exc.args[0])} is outside the target basis") from None
    out[rows] = vector
    return out


def embed_matrix(matrix, basis, target) -> np.ndarray:
    pos = {idx: k for k, idx in enumerate(target)}
    try:
        rows = np.array([pos[i] for i in basis], dtype=int)
    except KeyError as exc:
        raise ValidationError(f"index {tuple(exc.args[0])} is outside the target basis") from None
    out = np.zeros((len(target), len(target)), dtype=complex)
    out[np.ix_(rows, rows)] = matrix
    return out


def union_basis(*bases) -> tuple[FockIndex, ...]:
    return tuple(sorted(set().union(*[set(b) for b in bases])))


def to_density(state: State) -> DensityOperator:
    if isinstance(state, PureState):
        return state.density()
    if isinstance(state, DensityOperator):
        return state
    raise ValidationError(f"expected a PureState or DensityOperator, got {type(state).__name__}")


# ---------------------------------------------------------------------------
# State families


def _check_N(N):
    if not _is_int(N) or N < 1:
        raise ValidationError(f"N must be an integer >= 1, got {N!r}")


def _check_eta(eta):
    if not isinstance(eta, Real) or not math.isfinite(eta) or eta <= 0:
        raise ValidationError(f"eta must be a finite positive number, got {eta!r}")


def _check_prob(p, name="p"):
    if not isinstance(p, Real) or not (0.0 <= p <= 1.0):
        raise ValidationError(f"{name} must lie in [0, 1], got {p!r}")


@dataclass(frozen=True)
class Noon:
    N: int

    def __post_init__(self):
        _check_N(self.N)


@dataclass(frozen=True)
class VacuumFockSquared:
    """(|0> + eta|N>)^{(x)2} / (1 + eta^2)."""

    N: int
    eta: float

    def __post_init__(self):
        _check_N(self.N)
        _check_eta(self.eta)


@dataclass(frozen=True)
class RhoONs:
    """Total-number twirl of the vacuum-Fock product state."""

    N: int
    eta: float

    def __post_init__(self):
        _check_N(self.N)
        _check_eta(self.eta)


@dataclass(frozen=True)
class RhoONN:
    """Mixture of vacuum and N00N, with the |NN> component discarded."""

    N: int
    eta: float

    def __post_init__(self):
        _check_N(self.N)
        _check_eta(self.eta)


@dataclass(frozen=True)
class PsiONN:
    """Coherent counterpart of RhoONN: vacuum plus N00N superposition."""

    N: int
    eta: float

    def __post_init__(self):
        _check_N(self.N)
        _check_eta(self.eta)


@dataclass(frozen=True)
class MasterState:
    """alpha|00><00| + beta|N00N><N00N| + (1 - alpha - beta)|NN><NN|."""

    N: int
    alpha: float
    beta: float

    def __post_init__(self):
        _check_N(self.N)
        _check_prob(self.alpha, "alpha")
        _check_prob(self.beta, "beta")
        if self.alpha + self.beta > 1.0 + 1e-12:
            raise ValidationError("alpha + beta must not exceed 1")


@dataclass(frozen=True)
class ProbMix:
    """(1 - p)|00><00| + p * inner."""

    inner: Any
    p: float

    def __post_init__(self):
        _check_prob(self.p)
        if not isinstance(self.inner, SPEC_TYPES):
            raise ValidationError("ProbMix.inner must be a state spec")


@dataclass(frozen=True)
class CoherentProbMix:
    """sqrt(1 - p)|00> + sqrt(p)|inner>, inner pure and orthogonal to vacuum."""

    inner: Any
    p: float

    def __post_init__(self):
        _check_prob(self.p)
        if not isinstance(self.inner, SPEC_TYPES):
            raise ValidationError("CoherentProbMix.inner must be a state spec")


@dataclass(frozen=True, eq=False)
class Custom:
    """User-supplied amplitudes ``{(n1, n2): a}`` or density entries ``{((n1, n2), (m1, m2)): v}``."""

    amplitudes: Mapping | None = None
    density: Mapping | None = None
    n_max: int | None = None

    def __post_init__(self):
        if (self.amplitudes is None) == (self.density is None):
            raise ValidationError("Custom needs exactly one of amplitudes or density")


SPEC_TYPES = (Noon, VacuumFockSquared, RhoONs, RhoONN, PsiONN, MasterState,
              ProbMix, CoherentProbMix, Custom)
StateSpec = Union[Noon, VacuumFockSquared, RhoONs, RhoONN, PsiONN, MasterState,
                  ProbMix, CoherentProbMix, Custom]

SPEC_KINDS = {
    Noon: "noon",
    VacuumFockSquared: "vacuum_fock_squared",
    RhoONs: "rho_ons",
    RhoONN: "rho_onn",
    PsiONN: "psi_onn",
    MasterState: "master",
    ProbMix: "prob_mix",
    CoherentProbMix: "coherent_prob_mix",
    Custom: "custom",
}
KIND_SPECS = {v: k for k, v in SPEC_KINDS.items()}


def spec_parameters(spec) -> dict:
    if isinstance(spec, (ProbMix, CoherentProbMix)):
        return {"inner": spec_to_dict(spec.inner), "p": spec.p}
    if isinstance(spec, Custom):
        return {}
    return {k: getattr(spec, k) for k in spec.__dataclass_fields__}


def required_n_max(spec) -> int:
    """Largest single-mode occupation appearing in ``spec``."""
    if isinstance(spec, (ProbMix, CoherentProbMix)):
        return required_n_max(spec.inner)
    if isinstance(spec, Custom):
        return make_state(spec).n_max
    return spec.N


def _noon_amplitudes(N: int) -> dict:
    r = 1 / math.sqrt(2)
    return {(N, 0): r, (0, N): r}


def make_state(spec, n_max: int | None = None) -> State:
    """Construct the normalised state described by ``spec``.

    Pure families give a :class:`PureState`, mixtures a :class:`DensityOperator`.
    ``n_max`` defaults to the largest occupation used by the state family.
    """
    if not isinstance(spec, SPEC_TYPES):
        raise ValidationError(f"unknown state spec {spec!r}")
    if isinstance(spec, Custom):
        return _make_custom(spec, n_max)
    need = required_n_max(spec)
    if n_max is None:
        n_max = need
    elif not _is_int(n_max) or n_max < need:
        raise ValidationError(f"n_max={n_max!r} is below the required truncation {need}")
    kind = SPEC_KINDS[type(spec)]
    params = spec_parameters(spec)

    if isinstance(spec, Noon):
        return PureState.from_amplitudes(_noon_amplitudes(spec.N), n_max, kind, params)

    if isinstance(spec, VacuumFockSquared):
        N, eta = spec.N, spec.eta
        c = 1 + eta**2
        return PureState.from_amplitudes(
            {(0, 0): 1 / c, (N, 0): eta / c, (0, N): eta / c, (N, N): eta**2 / c},
            n_max, kind, params)

    if isinstance(spec, PsiONN):
        N, eta = spec.N, spec.eta
        c = 1 + eta**2
        r = 1 / math.sqrt(2)
        return PureState.from_amplitudes(
            {(0, 0): math.sqrt(1 + eta**4) / c,
             (N, 0): math.sqrt(2) * eta / c * r, (0, N): math.sqrt(2) * eta / c * r},
            n_max, kind, params)

    if isinstance(spec, (RhoONs, RhoONN, MasterState)):
        N = spec.N
        if isinstance(spec, MasterState):
            w0, w1, w2 = spec.alpha, spec.beta, 1.0 - spec.alpha - spec.beta
        else:
            c2 = (1 + spec.eta**2) ** 2
            w1 = 2 * spec.eta**2 / c2
            if isinstance(spec, RhoONs):
                w0, w2 = 1 / c2, spec.eta**4 / c2
            else:
                w0, w2 = (1 + spec.eta**4) / c2, 0.0
        return _noon_family_density(N, w0, w1, w2, n_max, kind, params)

    if isinstance(spec, ProbMix):
        inner = to_density(make_state(spec.inner, n_max))
        vac = (FockIndex(0, 0),)
        basis = union_basis(inner.basis, vac)
        m = spec.p * inner.on_basis(basis) + (1 - spec.p) * embed_matrix(np.ones((1, 1)), vac, basis)
        return DensityOperator(basis, m, n_max, kind, params)

    # CoherentProbMix
    inner = make_state(spec.inner, n_max)
    if not isinstance(inner, PureState):
        raise ValidationError("CoherentProbMix requires a pure inner state")
    if abs(inner.amplitude((0, 0))) > 0:
        raise ValidationError("CoherentProbMix requires an inner state orthogonal to the vacuum")
    amps = {i: math.sqrt(spec.p) * a for i, a in inner.as_dict().items()}
    amps[FockIndex(0, 0)] = math.sqrt(1 - spec.p)
    return PureState.from_amplitudes(amps, n_max, kind, params)


def _noon_family_density(N, w_vac, w_noon, w_nn, n_max, kind, params) -> DensityOperator:
    cells: dict = {}
    if w_vac > 0:
        cells[((0, 0), (0, 0))] = w_vac
    if w_noon > 0:
        for a in ((N, 0), (0, N)):
            for b in ((N, 0), (0, N)):
                cells[(a, b)] = w_noon / 2
    if w_nn > 0:
        cells[((N, N), (N, N))] = w_nn
    return DensityOperator.from_entries(cells, n_max, kind=kind, parameters=params)


def _make_custom(spec: Custom, n_max):
    if spec.amplitudes is not None:
        st = PureState.from_amplitudes(spec.amplitudes, spec.n_max, "custom", {})
    else:
        st = DensityOperator.from_entries(spec.density, spec.n_max, kind="custom", parameters={})
    if n_max is not None and n_max != st.n_max:
        if n_max < max(max(i) for i in st.basis):
            raise ValidationError(f"n_max={n_max} is below the largest occupation of the custom state")
        if isinstance(st, PureState):
            st = PureState(st.basis, st.amplitudes, n_max, "custom", {})
        else:
            st = DensityOperator(st.basis, st.matrix, n_max, "custom", {})
    return st


# ---------------------------------------------------------------------------
# Operations


def generator_K(n_max: int) -> HermitianOperator:
    """K = (n1 - n2)/2 on the full truncated space."""
    basis = full_basis(n_max)
    return HermitianOperator(basis, np.diag(k_diagonal(basis)).astype(complex), n_max, "generator_K")


def phase_factors(basis, phi: float, sign: int = PHASE_SIGN) -> np.ndarray:
    return np.exp(sign * 1j * phi * k_diagonal(basis))


def encode_phase(state: State, phi: float, sign: int = PHASE_SIGN):
    """Apply ``exp(sign*i*phi*K)`` to a ket, or conjugate an operator by it."""
    if sign not in (1, -1):
        raise ValidationError("sign must be +1 or -1")
    d = phase_factors(state.basis, phi, sign)
    if isinstance(state, PureState):
        return PureState(state.basis, state.amplitudes * d, state.n_max,
                         state.kind, dict(state.parameters))
    if isinstance(state, HermitianOperator):
        return state._like(state.matrix * np.outer(d, d.conj()))
    raise ValidationError(f"cannot encode a phase on {type(state).__name__}")


def twirl_total_number(state: State) -> DensityOperator:
    """Average over global total-number phases: drops coherences between sectors."""
    rho = to_density(state)
    t = total_numbers(rho.basis)
    mask = t[:, None] == t[None, :]
    return DensityOperator(rho.basis, np.where(mask, rho.matrix, 0), rho.n_max,
                           rho.kind, dict(rho.parameters))


def populations(state: State) -> np.ndarray:
    """Fock-basis occupation probabilities over ``state.basis``."""
    if isinstance(state, PureState):
        return np.abs(state.amplitudes) ** 2
    return np.real(np.diag(to_density(state).matrix)).copy()


def mean_total_number(state: State) -> float:
    return float(populations(state) @ total_numbers(state.basis))


def mean_total_number_squared(state: State) -> float:
    return float(populations(state) @ total_numbers(state.basis) ** 2)


def vacuum_probability(state: State) -> float:
    vac = FockIndex(0, 0)
    if vac not in state.basis:
        return 0.0
    return float(populations(state)[state.basis.index(vac)])


def total_number_distribution(state: State) -> dict[int, float]:
    dist: dict[int, float] = {}
    for idx, prob in zip(state.basis, populations(state)):
        dist[idx.total] = dist.get(idx.total, 0.0) + float(prob)
    return dict(sorted(dist.items()))


# ---------------------------------------------------------------------------
# Serialisation


def spec_to_dict(spec) -> dict:
    if isinstance(spec, Custom):
        out: dict = {"kind": "custom"}
        if spec.amplitudes is not None:
            out["amplitudes"] = [{"i": list(as_index(i)), "re": complex(v).real, "im": complex(v).imag}
                                 for i, v in spec.amplitudes.items()]
        else:
            out["density"] = [{"i": list(as_index(i)), "j": list(as_index(j)),
                               "re": complex(v).real, "im": complex(v).imag}
                              for (i, j), v in spec.density.items()]
        if spec.n_max is not None:
            out["n_max"] = spec.n_max
        return out
    return {"kind": SPEC_KINDS[type(spec)], **spec_parameters(spec)}


def spec_from_dict(data: Mapping):
    data = dict(data)
    kind = data.pop("kind", None)
    if kind not in KIND_SPECS:
        raise ValidationError(f"unknown spec kind {kind!r}; expected one of {sorted(KIND_SPECS)}")
    cls = KIND_SPECS[kind]
    if cls is Custom:
        amps = data.get("amplitudes")
        dens = data.get("density")
        return Custom(
            amplitudes=None if amps is None else
            {tuple(e["i"]): complex(e.get("re", 0.0), e.get("im", 0.0)) for e in amps},
            density=None if dens is None else
            {(tuple(e["i"]), tuple(e["j"])): complex(e.get("re", 0.0), e.get("im", 0.0)) for e in dens},
            n_max=data.get("n_max"),
        )
    if cls in (ProbMix, CoherentProbMix):
        if "inner" not in data:
            raise ValidationError(f"{kind} needs an 'inner' spec")
        data["inner"] = spec_from_dict(data["inner"])
    try:
        return cls(**data)
    except TypeError as exc:
        raise ValidationError(f"bad parameters for {kind}: {exc}") from None


def state_to_dict(state: State) -> dict:
    """JSON-ready form: ``{kind, parameters, n_max, form, entries}``.

    Pure states list ``{i, re, im}`` amplitudes; operators list the upper
    triangle as ``{i, j, re, im}``.
    """
    out = {"kind": state.kind, "parameters": state.parameters, "n_max": state.n_max}
    if isinstance(state, PureState):
        out["form"] = "pure"
        out["entries"] = [{"i": list(i), "re": a.real, "im": a.imag}
                          for i, a in zip(state.basis, state.amplitudes.tolist())]
    else:
        out["form"] = "density" if isinstance(state, DensityOperator) else "hermitian"
        out["entries"] = [{"i": list(i), "j": list(j), "re": v.real, "im": v.imag}
                          for (i, j), v in state.entries().items()]
    return out


def state_from_dict(data: Mapping) -> State | HermitianOperator:
    form = data.get("form", "density")
    kind = data.get("kind", "custom")
    params = dict(data.get("parameters", {}))
    n_max = data.get("n_max")
    if form == "pure":
        amps = {tuple(e["i"]): complex(e["re"], e["im"]) for e in data["entries"]}
        return PureState.from_amplitudes(amps, n_max, kind, params)
    cells = {(tuple(e["i"]), tuple(e["j"])): complex(e["re"], e["im"]) for e in data["entries"]}
    cls = DensityOperator if form == "density" else HermitianOperator
    return cls.from_entries(cells, n_max, kind=kind, parameters=params)

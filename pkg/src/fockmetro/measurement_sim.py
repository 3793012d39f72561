"""Photon-counting measurements, Born-rule sampling and detection-event classes."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from . import fock_core as fc
from .errors import ValidationError
from .fock_core import FockIndex, HermitianOperator, State, encode_phase, to_density
from .freq_estimation import Povm

RECOMBINERS = ("none", "balanced")


def sector_basis(n_total: int) -> tuple[FockIndex, ...]:
    return tuple(FockIndex(j, n_total - j) for j in range(n_total + 1))


def beam_splitter_block(n_total: int, theta: float = math.pi / 4) -> np.ndarray:
    """``exp(theta (a^dag b - a b^dag))`` on the total-number sector ``n_total``.

    Rows and columns follow :func:`sector_basis`. ``theta = pi/4`` is 50:50.
    """
    dim = n_total + 1
    g = np.zeros((dim, dim))
    for j in range(n_total):
        # a^dag b |j, n-j> = sqrt((j+1)(n-j)) |j+1, n-j-1>
        g[j + 1, j] = math.sqrt((j + 1) * (n_total - j))
    return expm(theta * (g - g.T))


def photon_counting_povm(n_max: int, recombiner: str = "none") -> Povm:
    """Number-resolving detection on both modes.

    ``recombiner="none"`` counts the modes directly: projectors on every
    ``|n1, n2>`` with ``n1, n2 <= n_max``. Direct counting is blind to the
    relative phase. ``recombiner="balanced"`` first interferes the modes on a
    50:50 beam splitter; the effects then cover every sector with total
    number up to ``2 n_max`` and labels are the output counts.
    """
    if isinstance(n_max, bool) or int(n_max) != n_max or n_max < 0:
        raise ValidationError("n_max must be a nonnegative integer")
    n_max = int(n_max)
    if recombiner == "none":
        basis = fc.full_basis(n_max)
        effects = [HermitianOperator((i,), np.ones((1, 1)), n_max, "projector") for i in basis]
        return Povm(tuple(effects), tuple(basis))
    if recombiner != "balanced":
        raise ValidationError(f"unknown recombiner {recombiner!r}; expected one of {RECOMBINERS}")
    effects, labels = [], []
    top = 2 * n_max
    for n in range(top + 1):
        basis = sector_basis(n)
        u = beam_splitter_block(n)
        for k, out in enumerate(basis):
            row = u[k]
            # effect = U^dag |out><out| U
            effects.append(HermitianOperator(basis, np.outer(row.conj(), row), top, "projector"))
            labels.append(out)
    return Povm(tuple(effects), tuple(labels))


def outcome_distribution(state: State, phi: float, povm: Povm, *,
                         sign: int = fc.PHASE_SIGN) -> dict:
    """Born probabilities ``Tr(Pi_x rho(phi))`` keyed by outcome label."""
    rho = encode_phase(to_density(state), phi, sign)
    probs = povm.traces(rho)
    total = float(probs.sum())
    if abs(total - 1.0) > 1e-12:
        raise ValidationError(f"outcome probabilities sum to {total!r}")
    return dict(zip(povm.labels, probs.tolist()))


def class_distribution(distribution: dict) -> dict[int, float]:
    """Marginal over the total photon number of each outcome label."""
    out: dict[int, float] = {}
    for label, prob in distribution.items():
        t = sum(label)
        out[t] = out.get(t, 0.0) + prob
    return dict(sorted(out.items()))


@dataclass(frozen=True)
class CountingRecord:
    histogram: dict
    shots: int
    seed: int
    worst_case_photons: int
    mean_photons_per_shot: float
    rng: str = "numpy.Philox"
    labels: tuple = field(default=(), repr=False)

    def class_frequencies(self) -> dict[int, float]:
        return class_distribution({k: v / self.shots for k, v in self.histogram.items()})

    def to_dict(self) -> dict:
        return {
            "shots": self.shots,
            "seed": self.seed,
            "rng": self.rng,
            "worst_case_photons": self.worst_case_photons,
            "mean_photons_per_shot": self.mean_photons_per_shot,
            "histogram": [{"n1": k[0], "n2": k[1], "count": v} for k, v in self.histogram.items()],
        }

    def csv_rows(self) -> list[tuple[int, int, int]]:
        return [(k[0], k[1], v) for k, v in self.histogram.items()]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["label_n1", "label_n2", "count"])
        w.writerows(self.csv_rows())
        return buf.getvalue()


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based 64-bit generator fully determined by ``seed``."""
    return np.random.Generator(np.random.Philox(seed))


def sample_counts(state: State, phi: float, povm: Povm, shots: int, seed: int, *,
                  sign: int = fc.PHASE_SIGN) -> CountingRecord:
    """Draw ``shots`` i.i.d. outcomes and tally them.

    Only outcomes that occurred appear in the histogram, in POVM label order.
    """
    if isinstance(shots, bool) or int(shots) != shots or shots < 1:
        raise ValidationError(f"shots must be an integer >= 1, got {shots!r}")
    if isinstance(seed, bool) or int(seed) != seed or seed < 0:
        raise ValidationError(f"seed must be a nonnegative integer, got {seed!r}")
    dist = outcome_distribution(state, phi, povm, sign=sign)
    labels = list(dist)
    p = np.clip(np.array([dist[k] for k in labels]), 0.0, None)
    p /= p.sum()
    draws = make_rng(int(seed)).choice(len(labels), size=int(shots), p=p)
    counts = np.bincount(draws, minlength=len(labels))
    hist = {labels[i]: int(c) for i, c in enumerate(counts) if c}
    photons = np.array([sum(labels[i]) for i in range(len(labels))])
    seen = counts > 0
    return CountingRecord(
        histogram=hist,
        shots=int(shots),
        seed=int(seed),
        worst_case_photons=int(photons[seen].max()),
        mean_photons_per_shot=float(counts @ photons) / shots,
        labels=tuple(labels),
    )


@dataclass(frozen=True)
class EventClass:
    probability: float
    photons: int
    informative: bool


VACUUM_FOCK_FAMILY = (fc.VacuumFockSquared, fc.RhoONs, fc.RhoONN, fc.PsiONN)


def event_class_summary(spec) -> dict[str, EventClass]:
    """Probabilities of the no-click, N-photon and 2N-photon detection classes.

    Only the N-photon class carries phase information: nothing passes the
    sample in the first, and in the last both arms carry N photons so no
    relative phase accrues.
    """
    if not isinstance(spec, VACUUM_FOCK_FAMILY):
        raise ValidationError(f"event classes are defined for the vacuum-Fock family, not {type(spec).__name__}")
    N = spec.N
    dist = fc.total_number_distribution(fc.make_state(spec))
    return {
        "no-click": EventClass(dist.get(0, 0.0), 0, False),
        "N-class": EventClass(dist.get(N, 0.0), N, True),
        "2N-class": EventClass(dist.get(2 * N, 0.0), 2 * N, False),
    }

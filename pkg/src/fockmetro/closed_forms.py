"""Analytic number statistics and Fisher information of the named families.

Used by the CLI to print closed forms next to the numerically computed
values. Nothing here is used on the numerical path.
"""

from __future__ import annotations

from .fock_core import (CoherentProbMix, MasterState, Noon, ProbMix, PsiONN, RhoONN,
                        RhoONs, VacuumFockSquared)


def mean_number(spec) -> float | None:
    if isinstance(spec, Noon):
        return float(spec.N)
    if isinstance(spec, (VacuumFockSquared, RhoONs)):
        return 2 * spec.eta**2 * spec.N / (1 + spec.eta**2)
    if isinstance(spec, (PsiONN, RhoONN)):
        return 2 * spec.eta**2 * spec.N / (1 + spec.eta**2) ** 2
    if isinstance(spec, MasterState):
        return spec.N * (spec.beta + 2 * (1 - spec.alpha - spec.beta))
    return None


def mean_number_squared(spec) -> float | None:
    if isinstance(spec, Noon):
        return float(spec.N**2)
    if isinstance(spec, (VacuumFockSquared, RhoONs)):
        e2 = spec.eta**2
        return 2 * e2 * (1 + 2 * e2) * spec.N**2 / (1 + e2) ** 2
    if isinstance(spec, (PsiONN, RhoONN)):
        return 2 * spec.eta**2 * spec.N**2 / (1 + spec.eta**2) ** 2
    if isinstance(spec, MasterState):
        return spec.N**2 * (spec.beta + 4 * (1 - spec.alpha - spec.beta))
    return None


def vacuum_probability(spec) -> float | None:
    if isinstance(spec, Noon):
        return 0.0
    if isinstance(spec, (VacuumFockSquared, RhoONs)):
        return 1 / (1 + spec.eta**2) ** 2
    if isinstance(spec, (PsiONN, RhoONN)):
        return (1 + spec.eta**4) / (1 + spec.eta**2) ** 2
    if isinstance(spec, MasterState):
        return float(spec.alpha)
    return None


def qfi(spec) -> float | None:
    if isinstance(spec, Noon):
        return float(spec.N**2)
    if isinstance(spec, (VacuumFockSquared, RhoONs, PsiONN, RhoONN)):
        return 2 * spec.eta**2 * spec.N**2 / (1 + spec.eta**2) ** 2
    if isinstance(spec, MasterState):
        return spec.beta * spec.N**2
    if isinstance(spec, (ProbMix, CoherentProbMix)):
        # the vacuum branch is phase-blind, so only a N00N inner state is simple
        if isinstance(spec.inner, Noon):
            return spec.p * spec.inner.N**2
    return None


def conditioned_qfi(spec) -> float | None:
    if isinstance(spec, Noon):
        return float(spec.N**2)
    if isinstance(spec, (VacuumFockSquared, RhoONs)):
        return spec.N**2 / (1 + spec.eta**2 / 2)
    if isinstance(spec, (PsiONN, RhoONN)):
        return float(spec.N**2)
    return None

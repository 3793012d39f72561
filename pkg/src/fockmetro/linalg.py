"""Spectral solver for ``X rho + rho X = 2 Y`` on the support of a Hermitian ``rho``."""

from __future__ import annotations

import numpy as np

from .errors import NumericalError

EPS_SUPPORT = 1e-10
LEAK_TOL = 1e-10


def solve_symmetric_lyapunov(rho: np.ndarray, rhs: np.ndarray, *,
                             eps_support: float = EPS_SUPPORT,
                             leak_tol: float = LEAK_TOL,
                             error: type[NumericalError] = NumericalError) -> np.ndarray:
    """Return the Hermitian ``X`` with ``(X rho + rho X)/2 = rhs`` on supp(rho).

    Components of ``X`` between eigenvectors whose eigenvalue sum is at most
    ``eps_support`` are set to zero. If ``rhs`` has a component larger than
    ``leak_tol`` there, the equation has no solution and ``error`` is raised.
    """
    lam, vecs = np.linalg.eigh(rho)
    r = vecs.conj().T @ rhs @ vecs
    denom = lam[:, None] + lam[None, :]
    inside = denom > eps_support
    if not np.all(inside):
        leak = float(np.max(np.abs(r[~inside])))
        if leak > leak_tol:
            raise error(f"right-hand side leaks {leak:.3e} outside the support "
                        f"(eigenvalue sums <= {eps_support:g})")
    x = np.zeros_like(r)
    x[inside] = 2 * r[inside] / denom[inside]
    x = vecs @ x @ vecs.conj().T
    return 0.5 * (x + x.conj().T)

"""Brute-force reference computations used only by the tests.

Everything here works on the full (n_max+1)^2 two-mode basis with dense
matrices and deliberately avoids the package's own state and solver code.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


def basis(n_max):
    return list(itertools.product(range(n_max + 1), repeat=2))


def ket(amps, n_max):
    b = basis(n_max)
    v = np.zeros(len(b), dtype=complex)
    for idx, a in amps.items():
        v[b.index(tuple(idx))] = a
    return v / np.linalg.norm(v)


def proj(v):
    return np.outer(v, v.conj())


def number_ops(n_max):
    b = np.array(basis(n_max))
    return np.diag(b[:, 0]).astype(float), np.diag(b[:, 1]).astype(float)


def encode(rho, phi, n_max, sign=-1):
    n1, n2 = number_ops(n_max)
    u = np.diag(np.exp(sign * 1j * phi * (np.diag(n1) - np.diag(n2)) / 2))
    return u @ rho @ u.conj().T


def fd_derivative(rho, phi, n_max, h=1e-6, sign=-1):
    return (encode(rho, phi + h, n_max, sign) - encode(rho, phi - h, n_max, sign)) / (2 * h)


def lyapunov_lstsq(rho, rhs):
    """Minimum-norm X with (X rho + rho X)/2 = rhs, via the vectorised system."""
    d = rho.shape[0]
    eye = np.eye(d)
    a = 0.5 * (np.kron(eye, rho) + np.kron(rho.T, eye))
    x, *_ = np.linalg.lstsq(a, rhs.reshape(-1, order="F"), rcond=1e-9)
    x = x.reshape(d, d, order="F")
    return 0.5 * (x + x.conj().T)


def fd_sld(rho, phi, n_max, h=1e-6):
    return lyapunov_lstsq(encode(rho, phi, n_max), fd_derivative(rho, phi, n_max, h))


def fd_qfi(rho, phi, n_max, h=1e-6):
    L = fd_sld(rho, phi, n_max, h)
    return float(np.trace(encode(rho, phi, n_max) @ L @ L).real)


def noon(N, n_max=None):
    return ket({(N, 0): 1, (0, N): 1}, n_max or N)


def vacuum_fock_squared(N, eta, n_max=None):
    single = {0: 1.0, N: eta}
    amps = {(a, b): single[a] * single[b] for a in single for b in single}
    return ket(amps, n_max or N)


def psi_onn(N, eta, n_max=None):
    c = 1 + eta**2
    v = math.sqrt(1 + eta**4) / c * ket({(0, 0): 1}, n_max or N) + math.sqrt(2) * eta / c * noon(N, n_max)
    return v


def twirl(rho, n_max):
    tot = np.array([a + b for a, b in basis(n_max)])
    return rho * (tot[:, None] == tot[None, :])


def master(N, alpha, beta, n_max=None):
    n_max = n_max or N
    return (alpha * proj(ket({(0, 0): 1}, n_max)) + beta * proj(noon(N, n_max))
            + (1 - alpha - beta) * proj(ket({(N, N): 1}, n_max)))


def mean_total(rho, n_max):
    n1, n2 = number_ops(n_max)
    return float(np.trace(rho @ (n1 + n2)).real)


def flat_prior_average(rho, n_max, W, nodes=4000):
    """Midpoint-rule averages of rho(phi) and phi rho(phi) over [-W/2, W/2]."""
    xs = (np.arange(nodes) + 0.5) / nodes * W - W / 2
    r0 = sum(encode(rho, x, n_max) for x in xs) / nodes
    r1 = sum(x * encode(rho, x, n_max) for x in xs) / nodes
    return r0, r1


def beam_splitter(n_max, theta=math.pi / 4):
    """Dense two-mode beam splitter on all sectors up to total 2 n_max, via ladder operators."""
    from scipy.linalg import expm

    dim = 2 * n_max + 1
    a = np.diag(np.sqrt(np.arange(1, dim)), 1)
    A = np.kron(a, np.eye(dim))
    B = np.kron(np.eye(dim), a)
    return expm(theta * (A.conj().T @ B - A @ B.conj().T)), dim


def random_pure(rng, n_max, support=None):
    b = basis(n_max)
    k = support or rng.integers(1, len(b) + 1)
    chosen = rng.choice(len(b), size=k, replace=False)
    v = np.zeros(len(b), dtype=complex)
    v[chosen] = rng.normal(size=k) + 1j * rng.normal(size=k)
    return v / np.linalg.norm(v)


def random_mixture(rng, n_max, terms=None):
    """Random weights and pure states; returns (weights, kets)."""
    k = terms or int(rng.integers(2, 5))
    w = rng.dirichlet(np.ones(k))
    return w, [random_pure(rng, n_max) for _ in range(k)]


def var_diff(v, n_max):
    n1, n2 = number_ops(n_max)
    d = n1 - n2
    m1 = float(np.vdot(v, d @ v).real)
    m2 = float(np.vdot(v, d @ d @ v).real)
    return m2 - m1 * m1

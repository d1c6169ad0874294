"""Compiled objective functions and the Nelder-Mead simplex search.

Objectives return the logarithm of the quantity being maximized, or -inf
when a factor underflows.  ``kind`` selects the objective:
0 pure-state product, 1 mixed-state product, 2 qubit Y_a over downstream
bases.
"""

import numpy as np
from numba import njit

PURE, MIXED, YA = 0, 1, 2
FLOOR = 1e-14  # factors below this are rounding noise; the value is reported as 0
PENALTY = 1e6


@njit(cache=True, nogil=True)
def locals_from_params(params, k, n):
    us = np.zeros((k, n, n), dtype=np.complex128)
    m = n * n
    off = n * (n - 1)
    for l in range(k):
        b = params[l * m:(l + 1) * m]
        for i in range(n):
            us[l, i, i] = np.exp(1j * b[off + i])
        idx = 0
        for p in range(n - 1):
            for q in range(p + 1, n):
                c = np.cos(b[idx])
                s = np.sin(b[idx])
                e = np.exp(1j * b[idx + 1])
                idx += 2
                for r in range(n):
                    a = us[l, r, p]
                    bb = us[l, r, q]
                    us[l, r, p] = c * a + e * s * bb
                    us[l, r, q] = -np.conj(e) * s * a + c * bb
    return us


@njit(cache=True, nogil=True)
def product_columns(us):
    k, n, _ = us.shape
    d = n**k
    x = np.ones((d, n), dtype=np.complex128)
    for row in range(d):
        rem = row
        for l in range(k - 1, -1, -1):
            i = rem % n
            rem //= n
            for j in range(n):
                x[row, j] *= us[l, i, j]
    return x


@njit(cache=True, nogil=True)
def log_pure(params, amps, k, n):
    x = product_columns(locals_from_params(params, k, n))
    tot = 0.0
    for j in range(n):
        o = 0j
        for r in range(amps.size):
            o += np.conj(x[r, j]) * amps[r]
        a = abs(o)
        if a < FLOOR:
            return -np.inf
        tot += 2.0 * np.log(a)
    return tot


@njit(cache=True, nogil=True)
def log_mixed(params, mat, k, n):
    x = product_columns(locals_from_params(params, k, n))
    m = np.conj(x.T) @ (mat @ x)
    tot = 0.0
    for j in range(n):
        for l in range(n):
            a = abs(m[j, l])
            if a < FLOOR:
                return -np.inf
            tot += np.log(a)
    return tot / n


@njit(cache=True, nogil=True)
def log_ya(params, amps, k, n):
    # params hold K-1 qubit unitaries for subsystems 1..K-1
    y = product_columns(locals_from_params(params, k - 1, 2))
    rest = y.shape[0]
    phi = np.zeros((2, 2), dtype=np.complex128)
    for a in range(2):
        for j in range(2):
            o = 0j
            for r in range(rest):
                o += amps[a * rest + r] * np.conj(y[r, j])
            phi[a, j] = o
    g11 = (abs(phi[0, 0]) ** 2 + abs(phi[1, 0]) ** 2)
    g22 = (abs(phi[0, 1]) ** 2 + abs(phi[1, 1]) ** 2)
    g12 = np.conj(phi[0, 0]) * phi[0, 1] + np.conj(phi[1, 0]) * phi[1, 1]
    rad = g11 * g22 - abs(g12) ** 2
    if rad < 0.0:
        rad = 0.0
    v = 0.25 * (np.sqrt(g11 * g22) + np.sqrt(rad)) ** 2
    if v < FLOOR:
        return -np.inf
    return np.log(v)


@njit(cache=True, nogil=True)
def _neg(kind, x, data, k, n):
    if kind == PURE:
        v = log_pure(x, data[:, 0], k, n)
    elif kind == MIXED:
        v = log_mixed(x, data, k, n)
    else:
        v = log_ya(x, data[:, 0], k, n)
    if v == -np.inf:
        return PENALTY
    return -v


@njit(cache=True, nogil=True)
def nelder_mead(kind, x0, data, k, n, maxiter, xatol, fatol, step):
    """Minimize the negated objective; adaptive coefficients for dimension ``dim``.

    Returns ``(x_best, f_best, converged, iterations)``.
    """
    dim = x0.size
    rho = 1.0
    chi = 1.0 + 2.0 / dim
    psi = 0.75 - 1.0 / (2.0 * dim)
    sigma = 1.0 - 1.0 / dim
    sim = np.empty((dim + 1, dim))
    fs = np.empty(dim + 1)
    sim[0] = x0
    for i in range(dim):
        sim[i + 1] = x0
        sim[i + 1, i] += step
    for i in range(dim + 1):
        fs[i] = _neg(kind, sim[i], data, k, n)
    it = 0
    converged = False
    while True:
        order = np.argsort(fs)
        sim = sim[order]
        fs = fs[order]
        if np.max(np.abs(sim[1:] - sim[0])) <= xatol and np.max(np.abs(fs[1:] - fs[0])) <= fatol:
            converged = True
            break
        if it >= maxiter:
            break
        it += 1
        xbar = sim[:-1].sum(axis=0) / dim
        xr = (1.0 + rho) * xbar - rho * sim[-1]
        fr = _neg(kind, xr, data, k, n)
        shrink = False
        if fr < fs[0]:
            xe = (1.0 + rho * chi) * xbar - rho * chi * sim[-1]
            fe = _neg(kind, xe, data, k, n)
            if fe < fr:
                sim[-1] = xe
                fs[-1] = fe
            else:
                sim[-1] = xr
                fs[-1] = fr
        elif fr < fs[-2]:
            sim[-1] = xr
            fs[-1] = fr
        elif fr < fs[-1]:
            xc = (1.0 + psi * rho) * xbar - psi * rho * sim[-1]
            fc = _neg(kind, xc, data, k, n)
            if fc <= fr:
                sim[-1] = xc
                fs[-1] = fc
            else:
                shrink = True
        else:
            xcc = (1.0 - psi) * xbar + psi * sim[-1]
            fcc = _neg(kind, xcc, data, k, n)
            if fcc < fs[-1]:
                sim[-1] = xcc
                fs[-1] = fcc
            else:
                shrink = True
        if shrink:
            for j in range(1, dim + 1):
                sim[j] = sim[0] + sigma * (sim[j] - sim[0])
                fs[j] = _neg(kind, sim[j], data, k, n)
    return sim[0].copy(), fs[0], converged, it

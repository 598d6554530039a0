"""Compiled inner loops for the pair minimisation.

Coordinates: for a pair (k, l) with phi_k - phi_l = D, write the remaining
m = n - 2 phases as phi_i = c + u_i with c = (phi_k + phi_l) / 2. The zero-sum
constraint fixes c = -sum(u) / n and the feasible set becomes

    u in [-h, h]^m,   sum(u^2) - sum(u)^2 / n <= r2,

with h = D / 2 and r2 = E0 - D^2 / 2. The objective is

    const + sum_i a_i sin(h - u_i) + b_i sin(h + u_i),

where a_i (b_i) flags adjacency of interior node i to k (to l). Every sine
argument lies in [0, D] with D < pi, so the objective is concave.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def quad_form(u, n):
    s = 0.0
    ss = 0.0
    for x in u:
        s += x
        ss += x * x
    return ss - s * s / n


@njit(cache=True)
def objective(u, a, b, const, h):
    f = const
    for i in range(u.size):
        if a[i] != 0.0:
            f += a[i] * np.sin(h - u[i])
        if b[i] != 0.0:
            f += b[i] * np.sin(h + u[i])
    return f


@njit(cache=True)
def gradient(u, a, b, h, out):
    for i in range(u.size):
        out[i] = -a[i] * np.cos(h - u[i]) + b[i] * np.cos(h + u[i])


@njit(cache=True)
def _clip(x, h):
    if x > h:
        return h
    if x < -h:
        return -h
    return x


@njit(cache=True)
def _box_prox(v, mu, h, n, out):
    """Minimiser over the box of 0.5|z - v|^2 + 0.5 mu (|z|^2 - sum(z)^2 / n).

    Stationarity gives z_i = clip((v_i + mu c) / (1 + mu)) with c = sum(z) / n;
    c is the unique root of a decreasing piecewise-linear function, found by
    iterating the active set and falling back to bisection.
    """
    m = v.size
    inv = 1.0 / (1.0 + mu)
    c = 0.0
    for _ in range(50):
        nfree = 0
        sfree = 0.0
        sclip = 0.0
        for i in range(m):
            z = (v[i] + mu * c) * inv
            if z > h:
                sclip += h
            elif z < -h:
                sclip -= h
            else:
                nfree += 1
                sfree += v[i]
        denom = 1.0 - nfree * mu * inv / n
        c_new = (sfree * inv + sclip) / n / denom
        if abs(c_new - c) <= 1e-15 * (1.0 + abs(c)):
            c = c_new
            break
        c = c_new
    else:
        lo = -h
        hi = h
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            s = 0.0
            for i in range(m):
                s += _clip((v[i] + mu * mid) * inv, h)
            if s / n - mid > 0.0:
                lo = mid
            else:
                hi = mid
        c = 0.5 * (lo + hi)
    for i in range(m):
        out[i] = _clip((v[i] + mu * c) * inv, h)


@njit(cache=True)
def project(v, h, r2, n, out):
    """Euclidean projection of ``v`` onto the feasible set (box intersect ellipsoid)."""
    m = v.size
    for i in range(m):
        out[i] = _clip(v[i], h)
    if quad_form(out, n) <= r2:
        return
    if r2 <= 0.0:
        for i in range(m):
            out[i] = 0.0
        return
    lo = 0.0
    hi = 1.0
    _box_prox(v, hi, h, n, out)
    while quad_form(out, n) > r2 and hi < 1e300:
        lo = hi
        hi *= 4.0
        _box_prox(v, hi, h, n, out)
    # regula falsi (Illinois) on q(mu) - r2; q is nonincreasing in mu
    tmp = np.empty(m)
    _box_prox(v, lo, h, n, tmp)
    flo = quad_form(tmp, n) - r2
    fhi = quad_form(out, n) - r2
    side = 0
    for _ in range(200):
        if hi - lo <= 1e-15 * hi or fhi == 0.0:
            break
        mid = (lo * fhi - hi * flo) / (fhi - flo)
        if not (lo < mid < hi):
            mid = 0.5 * (lo + hi)
        _box_prox(v, mid, h, n, tmp)
        fmid = quad_form(tmp, n) - r2
        if fmid > 0.0:
            lo = mid
            flo = fmid
            if side == -1:
                fhi *= 0.5
            side = -1
        else:
            hi = mid
            fhi = fmid
            if side == 1:
                flo *= 0.5
            side = 1
        if abs(fmid) <= 1e-15 * (1.0 + r2):
            break
    # ``out`` always holds the feasible (hi) side
    _box_prox(v, hi, h, n, out)


@njit(cache=True)
def local_solve(u0, a, b, const, h, r2, n, step, tol, maxiter, out):
    """Projected gradient from ``u0``; returns (objective, iterations, converged).

    For a concave objective any step length gives monotone descent, since
    f(u') <= f(u) + g.(u' - u) <= f(u) - |u' - u|^2 / step.
    """
    m = u0.size
    u = np.empty(m)
    g = np.empty(m)
    trial = np.empty(m)
    cand = np.empty(m)
    project(u0, h, r2, n, u)
    f = objective(u, a, b, const, h)
    it = 0
    converged = False
    while it < maxiter:
        it += 1
        gradient(u, a, b, h, g)
        for i in range(m):
            trial[i] = u[i] - step * g[i]
        project(trial, h, r2, n, cand)
        fn = objective(cand, a, b, const, h)
        dmax = 0.0
        for i in range(m):
            d = abs(cand[i] - u[i])
            if d > dmax:
                dmax = d
        df = f - fn
        if fn <= f:
            for i in range(m):
                u[i] = cand[i]
            f = fn
        if dmax <= tol or df <= tol:
            converged = True
            break
    for i in range(m):
        out[i] = u[i]
    return f, it, converged


@njit(cache=True)
def multistart(starts, a, b, const, h, r2, n, step, tol, maxiter):
    """Run :func:`local_solve` from every row of ``starts``."""
    S, m = starts.shape
    values = np.empty(S)
    sols = np.empty((S, m))
    iters = np.empty(S, dtype=np.int64)
    conv = np.empty(S, dtype=np.bool_)
    row = np.empty(m)
    for s in range(S):
        f, it, c = local_solve(starts[s], a, b, const, h, r2, n, step, tol, maxiter, row)
        values[s] = f
        iters[s] = it
        conv[s] = c
        for i in range(m):
            sols[s, i] = row[i]
    return values, sols, iters, conv

"""Hot loops: term evaluation, the transport integrator and closure dedup.

Every function here is written in the numba-compatible subset of Python so the
same source runs compiled or interpreted.  Where numpy has a natural vectorized
form (term evaluation, nearest-element search) the interpreted path uses it.
"""
import numpy as np

from ._accel import USE_NUMBA, njit

SEG_POLY = 0
SEG_ARC = 1


def _eval_exprs_loop(coef, exps, trig, freq, offsets, x):
    nexpr = offsets.shape[0] - 1
    out = np.zeros(nexpr)
    dim = x.shape[0]
    for k in range(nexpr):
        acc = 0.0
        for t in range(offsets[k], offsets[k + 1]):
            val = coef[t]
            for j in range(dim):
                e = exps[t, j]
                if e != 0:
                    val *= x[j] ** e
                kind = trig[t, j]
                if kind == 1:
                    val *= np.cos(freq[t, j] * x[j])
                elif kind == 2:
                    val *= np.sin(freq[t, j] * x[j])
            acc += val
        out[k] = acc
    return out


def _eval_exprs_numpy(coef, exps, trig, freq, offsets, x):
    if coef.shape[0] == 0:
        return np.zeros(offsets.shape[0] - 1)
    powers = np.prod(np.where(exps != 0, x[None, :] ** exps, 1.0), axis=1)
    phase = freq * x[None, :]
    waves = np.where(trig == 1, np.cos(phase), np.where(trig == 2, np.sin(phase), 1.0))
    terms = coef * powers * np.prod(waves, axis=1)
    sums = np.concatenate(([0.0], np.cumsum(terms)))
    return sums[offsets[1:]] - sums[offsets[:-1]]


eval_exprs = njit(_eval_exprs_loop) if USE_NUMBA else _eval_exprs_numpy


@njit
def segment_state(kind, params, s):
    """Position and velocity of a path segment at parameter ``s``."""
    dim = params.shape[1]
    pos = np.zeros(dim)
    vel = np.zeros(dim)
    if kind == SEG_POLY:
        power = 1.0
        dpower = 0.0
        for k in range(params.shape[0]):
            for j in range(dim):
                pos[j] += params[k, j] * power
                vel[j] += params[k, j] * k * dpower
            dpower = power
            power *= s
    else:
        phi0 = params[3, 0]
        dphi = params[3, 1] - phi0
        phi = phi0 + s * dphi
        c = np.cos(phi)
        sn = np.sin(phi)
        for j in range(dim):
            pos[j] = params[0, j] + c * params[1, j] + sn * params[2, j]
            vel[j] = dphi * (-sn * params[1, j] + c * params[2, j])
    return pos, vel


@njit
def connection_matrix(vals, vel):
    """Matrix A with dV/ds = -A V for parallel vector fields, coordinates (v, x, u).

    ``vals`` holds f followed by its first partial derivatives in coordinate order.
    """
    dim = vel.shape[0]
    last = dim - 1
    f = vals[0]
    fv = vals[1]
    fu = vals[dim]
    du = vel[last]
    a = np.zeros((dim, dim))
    top = (fu + 2.0 * f * fv) * du + fv * vel[0]
    for i in range(1, last):
        fx = vals[1 + i]
        top += fx * vel[i]
        a[0, i] = fx * du
        a[i, last] = -fx * du
    a[0, last] = top
    a[0, 0] = fv * du
    a[last, last] = -fv * du
    return a


@njit
def _rhs(kind, params, coef, exps, trig, freq, offsets, s, y):
    pos, vel = segment_state(kind, params, s)
    vals = eval_exprs(coef, exps, trig, freq, offsets, pos)
    return -connection_matrix(vals, vel) @ y


# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = np.array([
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1 / 5, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3 / 40, 9 / 40, 0.0, 0.0, 0.0, 0.0],
    [44 / 45, -56 / 15, 32 / 9, 0.0, 0.0, 0.0],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729, 0.0, 0.0],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656, 0.0],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
])
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])


@njit
def integrate_segment(kind, params, coef, exps, trig, freq, offsets, atol, rtol, max_steps):
    """Transport matrix along one segment, s in [0, 1], by adaptive Dormand-Prince.

    Returns (matrix, accepted steps, success flag).
    """
    dim = params.shape[1]
    y = np.eye(dim)
    s = 0.0
    h = 0.05
    steps = 0
    ks = np.zeros((7, dim, dim))
    while s < 1.0:
        if steps >= max_steps:
            return y, steps, False
        if s + h > 1.0:
            h = 1.0 - s
        for i in range(7):
            yi = y.copy()
            for j in range(i):
                if _A[i, j] != 0.0:
                    yi += h * _A[i, j] * ks[j]
            ks[i] = _rhs(kind, params, coef, exps, trig, freq, offsets, s + _C[i] * h, yi)
        y5 = y.copy()
        y4 = y.copy()
        for i in range(7):
            y5 += h * _B5[i] * ks[i]
            y4 += h * _B4[i] * ks[i]
        err = 0.0
        for a in range(dim):
            for b in range(dim):
                scale = atol + rtol * max(abs(y[a, b]), abs(y5[a, b]))
                e = abs(y5[a, b] - y4[a, b]) / scale
                if e > err:
                    err = e
        if err <= 1.0:
            s += h
            y = y5
            steps += 1
        if err == 0.0:
            factor = 5.0
        else:
            factor = min(5.0, max(0.2, 0.9 * err ** -0.2))
        h *= factor
        if h < 1e-14:
            return y, steps, False
    return y, steps, True


def _nearest_loop(stack, count, mat):
    best = -1
    best_dist = np.inf
    rows = mat.shape[0]
    cols = mat.shape[1]
    for i in range(count):
        d = 0.0
        for a in range(rows):
            for b in range(cols):
                diff = abs(stack[i, a, b] - mat[a, b])
                if diff > d:
                    d = diff
        if d < best_dist:
            best_dist = d
            best = i
    return best, best_dist


def _nearest_numpy(stack, count, mat):
    if count == 0:
        return -1, np.inf
    dists = np.abs(stack[:count] - mat).max(axis=(1, 2))
    best = int(np.argmin(dists))
    return best, float(dists[best])


nearest_element = njit(_nearest_loop) if USE_NUMBA else _nearest_numpy

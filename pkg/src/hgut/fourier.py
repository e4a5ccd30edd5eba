"""Fourier analysis over Z_M with characters x -> prod_i w_i^{u_i x_i}.

Functions on the grid are numpy arrays whose shape is the grid shape.
Coefficients follow f^(u) = (1/N) sum_x f(x) prod_i w_i^{-u_i x_i}, so that
f(x) = sum_u f^(u) chi_u(x).
"""

from __future__ import annotations

import itertools

import numpy as np

FOURIER_CAP = 10**5


def _field(f) -> np.ndarray:
    f = np.asarray(f, dtype=np.complex128)
    if f.ndim < 1 or any(m < 2 for m in f.shape):
        raise ValueError(f"not a function on a hypergrid: shape {f.shape}")
    if f.size > FOURIER_CAP:
        from .grid import CapacityError
        raise CapacityError(f"{f.size} cells exceeds the Fourier cap {FOURIER_CAP}")
    return f


def omega(m: int) -> complex:
    return np.exp(2j * np.pi / m)


def _char_matrix(m: int, sign: int) -> np.ndarray:
    # entry [u, x] = w^{sign * u * x}, computed from exact residues u*x mod m
    ux = np.outer(np.arange(m), np.arange(m)) % m
    return np.exp(sign * 2j * np.pi * ux / m)


def _apply_axis(f: np.ndarray, mat: np.ndarray, axis: int) -> np.ndarray:
    return np.moveaxis(np.tensordot(mat, f, axes=([1], [axis])), 0, axis)


def dft(f) -> np.ndarray:
    """Fourier coefficients, one axis at a time."""
    F = _field(f)
    for i, m in enumerate(F.shape):
        F = _apply_axis(F, _char_matrix(m, -1) / m, i)
    return F


def idft(F) -> np.ndarray:
    f = _field(F)
    for i, m in enumerate(f.shape):
        f = _apply_axis(f, _char_matrix(m, +1), i)
    return f


def character(dims, u) -> np.ndarray:
    """chi_u as an array over the grid."""
    out = np.ones(tuple(dims), dtype=np.complex128)
    for i, (m, ui) in enumerate(zip(dims, u)):
        shape = [1] * len(dims)
        shape[i] = m
        out = out * np.exp(2j * np.pi * ((ui * np.arange(m)) % m) / m).reshape(shape)
    return out


def support_size(dims) -> np.ndarray:
    """#u = number of nonzero entries of u, as an integer array over Z_M."""
    out = np.zeros(tuple(dims), dtype=np.int64)
    for i, m in enumerate(dims):
        shape = [1] * len(dims)
        shape[i] = m
        out = out + (np.arange(m) != 0).reshape(shape)
    return out


def laplacian(f, i: int) -> np.ndarray:
    """L_i f(x) = f(x) - E_a f(x with coordinate i set to a)."""
    f = _field(f)
    return f - f.mean(axis=i, keepdims=True)


def laplacian_spectral(f, i: int) -> np.ndarray:
    F = dft(f)
    keep = np.zeros(F.shape[i], dtype=bool)
    keep[1:] = True
    shape = [1] * F.ndim
    shape[i] = F.shape[i]
    return idft(F * keep.reshape(shape))


def partial_laplacian(f, i: int, a: int) -> np.ndarray:
    """L_i^a f(x) = (f(x) - f(x with coordinate i set to a)) / m_i."""
    f = _field(f)
    m = f.shape[i]
    if not 0 <= a < m:
        raise ValueError(f"symbol {a} out of range for side {m}")
    return (f - np.take(f, [a], axis=i)) / m


def noise_operator(f, rho: float) -> np.ndarray:
    """T_rho f(x) = E f(y), y_i = x_i w.p. rho and uniform otherwise.

    The expectation factorises over coordinates, so it is applied as one
    Markov kernel per axis.
    """
    if not 0.0 <= rho <= 1.0:
        raise ValueError("rho must lie in [0, 1]")
    f = _field(f)
    for i, m in enumerate(f.shape):
        K = rho * np.eye(m) + (1.0 - rho) / m * np.ones((m, m))
        f = _apply_axis(f, K, i)
    return f


def noise_operator_spectral(f, rho: float) -> np.ndarray:
    if not 0.0 <= rho <= 1.0:
        raise ValueError("rho must lie in [0, 1]")
    F = dft(f)
    return idft(F * np.power(float(rho), support_size(F.shape)))


def two_point_smooth(g, t: float, x, y) -> complex:
    """E g(z), z_i = x_i w.p. t and y_i otherwise, summed over all 2^n patterns."""
    if not 0.0 <= t <= 1.0:
        raise ValueError("t must lie in [0, 1]")
    g = _field(g)
    n = g.ndim
    total = 0j
    for pick in itertools.product((True, False), repeat=n):
        k = sum(pick)
        w = t**k * (1.0 - t) ** (n - k)
        if w == 0.0:
            continue
        z = tuple(int(a) if p else int(b) for p, a, b in zip(pick, x, y))
        total += w * g[z]
    return complex(total)


def two_point_smooth_spectral(g, t: float, x, y) -> complex:
    """sum_u g^(u) prod_i (t w^{u_i x_i} + (1 - t) w^{u_i y_i})."""
    G = dft(g)
    factor = np.ones(G.shape, dtype=np.complex128)
    for i, m in enumerate(G.shape):
        u = np.arange(m)
        fx = np.exp(2j * np.pi * ((u * int(x[i])) % m) / m)
        fy = np.exp(2j * np.pi * ((u * int(y[i])) % m) / m)
        shape = [1] * G.ndim
        shape[i] = m
        factor = factor * (t * fx + (1.0 - t) * fy).reshape(shape)
    return complex((G * factor).sum())


def two_point_table(g, t: float) -> np.ndarray:
    """g_{t,1-t}(x, y) for every pair, as an array of shape dims + dims."""
    g = _field(g)
    n = g.ndim
    operands = [g, list(range(2 * n, 3 * n))]
    for i, m in enumerate(g.shape):
        K = np.zeros((m, m, m))
        for a in range(m):
            for b in range(m):
                K[a, b, a] += t
                K[a, b, b] += 1.0 - t
        operands += [K, [i, n + i, 2 * n + i]]
    return np.einsum(*operands, list(range(2 * n)), optimize=True)


def delta_gamma(f, gamma: float) -> np.ndarray:
    """Spectral multiplier (#u)^gamma; the u = 0 coefficient is sent to 0."""
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    F = dft(f)
    s = support_size(F.shape).astype(np.float64)
    mult = np.where(s > 0, np.power(s, gamma, where=s > 0, out=np.zeros_like(s)), 0.0)
    return idft(F * mult)


def lp_norm(f, s: float) -> float:
    if s < 1:
        raise ValueError("s must be >= 1")
    f = _field(f)
    return float(np.mean(np.abs(f) ** s) ** (1.0 / s))


def inner(f, g) -> complex:
    """<f, g> = E_x f(x) conj(g(x))."""
    return complex(np.mean(_field(f) * np.conj(_field(g))))


def dft_bruteforce(f) -> np.ndarray:
    """Direct character sum, one coefficient at a time.  Used as a test oracle."""
    f = _field(f)
    dims = f.shape
    N = f.size
    out = np.zeros(dims, dtype=np.complex128)
    for u in itertools.product(*(range(m) for m in dims)):
        out[u] = (f * np.conj(character(dims, u))).sum() / N
    return out

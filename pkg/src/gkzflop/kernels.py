"""Scalar special-function kernels: polygamma stacks and log Gamma.

These sit in the innermost loops of the series and contour evaluators, so
they come in two interchangeable flavors: a numba-compiled version and a
plain numpy version.  Selection:

  * GKZFLOP_BACKEND=numpy  forces the plain path,
  * GKZFLOP_BACKEND=numba  requires numba (ImportError if missing),
  * unset: numba when importable, else numpy.

Method: downward recurrence pushes the argument to real part >= 8 + order,
then the standard asymptotic series with Bernoulli numbers through B_30.
"""

import math
import os

import numpy as np

_BERNOULLI = np.array([
    1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66, -691.0 / 2730,
    7.0 / 6, -3617.0 / 510, 43867.0 / 798, -174611.0 / 330,
    854513.0 / 138, -236364091.0 / 2730, 8553103.0 / 6,
    -23749461029.0 / 870, 8615841276005.0 / 14322,
])

_HALF_LOG_TWO_PI = 0.5 * math.log(2.0 * math.pi)


def _polygamma_stack_py(z, kmax):
    """psi(z), psi'(z), ..., psi^(kmax)(z) as a complex array."""
    z = complex(z)
    target = 8.0 + kmax
    acc = np.zeros(kmax + 1, dtype=np.complex128)
    w = z
    while w.real < target:
        winv = 1.0 / w
        p = winv
        fact = 1.0
        sign = 1.0
        for k in range(kmax + 1):
            acc[k] -= sign * fact * p
            p *= winv
            fact *= (k + 1)
            sign = -sign
        w = w + 1.0
    w2 = 1.0 / (w * w)
    # k = 0: log w - 1/(2w) - sum B_2n / (2n w^2n)
    s = np.log(w) - 0.5 / w
    term = w2
    for n in range(_BERNOULLI.size):
        s -= _BERNOULLI[n] * term / (2 * (n + 1))
        term *= w2
    acc[0] += s
    # k >= 1: (-1)^(k-1) [ (k-1)!/w^k + k!/(2 w^(k+1))
    #                      + sum_n B_2n (2n+k-1)!/(2n)! w^(-2n-k) ]
    for k in range(1, kmax + 1):
        fk = 1.0
        for i in range(1, k):
            fk *= i
        s = fk / w ** k + fk * k / (2.0 * w ** (k + 1))
        base = 1.0  # (2n+k-1)!/(2n)! at n=1 is (k+1)!/2
        for i in range(3, k + 2):
            base *= i
        term = base * w ** (-(2 + k))
        for n in range(_BERNOULLI.size):
            s += _BERNOULLI[n] * term
            tn = 2 * (n + 1)
            term *= (tn + k) * (tn + k + 1) / ((tn + 1) * (tn + 2))
            term *= w2
        if (k - 1) % 2 == 1:
            s = -s
        acc[k] += s
    return acc


def _log_gamma_py(z):
    """A branch of log Gamma(z) whose exp is exactly Gamma(z)."""
    z = complex(z)
    shift = 0.0 + 0.0j
    w = z
    while w.real < 12.0:
        shift += np.log(w)
        w = w + 1.0
    w2 = 1.0 / (w * w)
    s = (w - 0.5) * np.log(w) - w + _HALF_LOG_TWO_PI
    term = 1.0 / w
    for n in range(_BERNOULLI.size):
        tn = 2 * (n + 1)
        s += _BERNOULLI[n] * term / (tn * (tn - 1))
        term *= w2
    return s - shift


def _recip_gamma_series_py(z, kmax):
    """Taylor coefficients c_m of 1/Gamma(z + u) = sum c_m u^m, m <= kmax.

    For Re z < 1/2 the argument is shifted right through the functional
    equation, 1/Gamma(z+u) = (z+u)...(z+K-1+u)/Gamma(z+K+u); the product
    is an exact polynomial in u, which keeps the log-derivative route away
    from the poles and from the cancellation region left of them.
    """
    z = complex(z)
    shift = 0
    while (z + shift).real < 0.5:
        shift += 1
    zs = z + shift
    out = np.zeros(kmax + 1, dtype=np.complex128)
    f0 = np.exp(-_log_gamma_py(zs))
    out[0] = f0
    if kmax > 0:
        psi = _polygamma_stack_py(zs, kmax - 1)
        # f = exp(g), g' = -psi: f^(m) = sum_j C(m-1,j) g^(m-j) f^(j)
        g = np.zeros(kmax + 1, dtype=np.complex128)
        for m in range(1, kmax + 1):
            g[m] = -psi[m - 1]
        f = np.zeros(kmax + 1, dtype=np.complex128)
        f[0] = f0
        binom = np.zeros((kmax + 1, kmax + 1))
        for i in range(kmax + 1):
            binom[i, 0] = 1.0
            for j in range(1, i + 1):
                upper = binom[i - 1, j] if j <= i - 1 else 0.0
                binom[i, j] = binom[i - 1, j - 1] + upper
        for m in range(1, kmax + 1):
            acc = 0.0 + 0.0j
            for j in range(m):
                acc += binom[m - 1, j] * g[m - j] * f[j]
            f[m] = acc
        fact = 1.0
        for m in range(1, kmax + 1):
            fact *= m
            out[m] = f[m] / fact
    for j in range(shift - 1, -1, -1):
        a = z + j
        prev = 0.0 + 0.0j
        for m in range(kmax + 1):
            cur = out[m]
            out[m] = a * cur + prev
            prev = cur
    return out


def _select_backend():
    choice = os.environ.get("GKZFLOP_BACKEND", "").strip().lower()
    if choice not in ("", "numba", "numpy"):
        raise ValueError(f"GKZFLOP_BACKEND must be numba or numpy, got {choice!r}")
    if choice == "numpy":
        return "numpy", None
    try:
        import numba
    except ImportError:
        if choice == "numba":
            raise
        return "numpy", None
    return "numba", numba


BACKEND, _numba = _select_backend()

if BACKEND == "numba":
    _polygamma_stack = _numba.njit(cache=True)(_polygamma_stack_py)
    _log_gamma = _numba.njit(cache=True)(_log_gamma_py)

    def _recip_with(polygamma, log_gamma):
        def impl(z, kmax):
            z = complex(z)
            shift = 0
            while (z + shift).real < 0.5:
                shift += 1
            zs = z + shift
            out = np.zeros(kmax + 1, dtype=np.complex128)
            f0 = np.exp(-log_gamma(zs))
            out[0] = f0
            if kmax > 0:
                psi = polygamma(zs, kmax - 1)
                g = np.zeros(kmax + 1, dtype=np.complex128)
                for m in range(1, kmax + 1):
                    g[m] = -psi[m - 1]
                f = np.zeros(kmax + 1, dtype=np.complex128)
                f[0] = f0
                binom = np.zeros((kmax + 1, kmax + 1))
                for i in range(kmax + 1):
                    binom[i, 0] = 1.0
                    for j in range(1, i + 1):
                        upper = binom[i - 1, j] if j <= i - 1 else 0.0
                        binom[i, j] = binom[i - 1, j - 1] + upper
                for m in range(1, kmax + 1):
                    acc = 0.0 + 0.0j
                    for j in range(m):
                        acc += binom[m - 1, j] * g[m - j] * f[j]
                    f[m] = acc
                fact = 1.0
                for m in range(1, kmax + 1):
                    fact *= m
                    out[m] = f[m] / fact
            for j in range(shift - 1, -1, -1):
                a = z + j
                prev = 0.0 + 0.0j
                for m in range(kmax + 1):
                    cur = out[m]
                    out[m] = a * cur + prev
                    prev = cur
            return out
        return impl

    _recip_gamma_series = _numba.njit(cache=True)(
        _recip_with(_polygamma_stack, _log_gamma))
else:
    _polygamma_stack = _polygamma_stack_py
    _log_gamma = _log_gamma_py
    _recip_gamma_series = _recip_gamma_series_py


def polygamma_stack(z, kmax):
    """psi^(k)(z) for k = 0..kmax."""
    return _polygamma_stack(complex(z), int(kmax))


def log_gamma(z):
    """log Gamma(z), branch chosen so exp(log_gamma(z)) == Gamma(z)."""
    return complex(_log_gamma(complex(z)))


def recip_gamma(z):
    """1/Gamma(z) for scalar complex z, zero at the poles of Gamma."""
    z = complex(z)
    fac = 1.0 + 0.0j
    while z.real < 0.5:
        fac *= z
        z += 1.0
    return complex(fac * np.exp(-_log_gamma(z)))


def recip_gamma_series(z, kmax):
    """Taylor coefficients of u -> 1/Gamma(z + u) through order kmax."""
    return _recip_gamma_series(complex(z), int(kmax))

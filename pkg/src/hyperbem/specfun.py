"""Complex special functions for the anisotropic fundamental solution.

The square root is taken with the branch cut along the negative imaginary
axis, so that arguments in the closed upper half plane (where the
deformed distance of a lossy medium lives) map continuously into the
first quadrant.  Hankel functions are evaluated for complex arguments
in the closed first quadrant.
"""

import numpy as np
from scipy import special as _sp

try:
    import numba as _nb
except ImportError:  # pragma: no cover
    _nb = None

__all__ = ["SpecfunDomainError", "branch_sqrt", "hankel1_0", "hankel1_1"]

_EULER_GAMMA = 0.5772156649015328606
# the ascending series loses eps*exp(|z| + Im z)/2 relative accuracy to
# cancellation (J0 and i*Y0 both grow like exp(Im z) while H0 decays);
# the asymptotic expansion truncated at its smallest term is accurate to
# about exp(-2|z|).  At the shared bound both routes hold ~2e-11; the
# wedge near the imaginary axis where neither does falls back to the
# library evaluator, with a margin on the series side.
_REGIME_BOUND = 12.7
_SERIES_BOUND = 11.5


def _h0_point(z, az):
    if az < _REGIME_BOUND:
        # ascending series, DLMF 10.2.2 / 10.8.1 with w = -z^2/4
        w = -0.25 * z * z
        aw = w.real * w.real + w.imag * w.imag
        term = 1.0 + 0.0j
        j0 = term
        harm = 0.0
        hsum = 0.0 + 0.0j
        m2 = 1.0
        for k in range(1, 48):
            rk = 1.0 / (k * k)
            term *= w * rk
            j0 += term
            harm += 1.0 / k
            hsum += harm * term
            m2 *= aw * (rk * rk)
            if m2 < 1e-36 and k > 4:
                break
        y0 = (2.0 / np.pi) * ((np.log(0.5 * z) + _EULER_GAMMA) * j0 - hsum)
        return j0 + 1j * y0
    # asymptotic expansion, DLMF 10.17.5, truncated at the smallest term
    a2 = 1.0 / (az * az)
    s = 1.0 + 0.0j
    t = 1.0 + 0.0j
    m2 = 1.0
    for k in range(1, 44):
        f = 2.0 * k - 1.0
        r = f * f / (8.0 * k)
        if r >= az:
            break
        t *= -1j * r / z
        s += t
        m2 *= r * r * a2
        if m2 < 1e-26:
            break
    pref = np.sqrt(2.0 / (np.pi * z)) * np.exp(1j * (z - 0.25 * np.pi))
    return pref * s


def _h1_point(z, az):
    if az < _REGIME_BOUND:
        w = -0.25 * z * z
        aw = w.real * w.real + w.imag * w.imag
        term = 1.0 + 0.0j
        j1s = term
        harm1 = 0.0
        harm2 = 1.0
        hsum = term
        m2 = 1.0
        for k in range(1, 48):
            rk = 1.0 / (k * (k + 1.0))
            term *= w * rk
            j1s += term
            harm1 += 1.0 / k
            harm2 += 1.0 / (k + 1.0)
            hsum += (harm1 + harm2) * term
            m2 *= aw * (rk * rk)
            if m2 < 1e-36 and k > 4:
                break
        j1 = 0.5 * z * j1s
        y1 = ((2.0 / np.pi) * (np.log(0.5 * z) + _EULER_GAMMA) * j1
              - 2.0 / (np.pi * z) - z / (2.0 * np.pi) * hsum)
        return j1 + 1j * y1
    a2 = 1.0 / (az * az)
    s = 1.0 + 0.0j
    t = 1.0 + 0.0j
    m2 = 1.0
    for k in range(1, 44):
        f = 2.0 * k - 1.0
        r = (4.0 - f * f) / (8.0 * k)
        if abs(r) >= az:
            break
        t *= 1j * r / z
        s += t
        m2 *= r * r * a2
        if m2 < 1e-26:
            break
    pref = np.sqrt(2.0 / (np.pi * z)) * np.exp(1j * (z - 0.75 * np.pi))
    return pref * s


def _h0_array(z, az):
    out = np.empty_like(z)
    for i in range(z.size):
        out[i] = _h0_point(z[i], az[i])
    return out


def _h1_array(z, az):
    out = np.empty_like(z)
    for i in range(z.size):
        out[i] = _h1_point(z[i], az[i])
    return out


if _nb is not None:
    _sig_pt = "complex128(complex128, float64)"
    _sig_arr = "complex128[:](complex128[:], float64[:])"
    _h0_point = _nb.njit(_sig_pt, cache=True, inline="always")(_h0_point)
    _h1_point = _nb.njit(_sig_pt, cache=True, inline="always")(_h1_point)
    _h0_array = _nb.njit(_sig_arr, cache=True)(_h0_array)
    _h1_array = _nb.njit(_sig_arr, cache=True)(_h1_array)


def _hankel_compiled(order, arr):
    """First-quadrant evaluation via compiled series/asymptotics.

    Points in the annulus where neither route reaches 1e-11 relative
    accuracy are recomputed with the library evaluator.
    """
    flat = np.ascontiguousarray(arr.ravel())
    az = np.abs(flat)
    out = (_h0_array if order == 0 else _h1_array)(flat, az)
    gap = (az < _REGIME_BOUND) & (az + flat.imag > _SERIES_BOUND)
    if gap.any():
        out[gap] = _sp.hankel1(order, flat[gap])
    return out.reshape(arr.shape)


def _first_quadrant(arr):
    return bool(np.all(arr.real >= 0.0) and np.all(arr.imag >= 0.0))


class SpecfunDomainError(ValueError):
    """Argument lies outside the domain of the requested function."""


def _as_complex(z):
    arr = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(arr)):
        raise SpecfunDomainError("non-finite argument")
    return arr


def branch_sqrt(z):
    """Square root with arg(z) taken in (-pi/2, 3*pi/2).

    Analytic on the complex plane cut along {-i*t : t >= 0}; maps the
    closed upper half plane into the closed first quadrant.  Accepts
    scalars or arrays.
    """
    arr = _as_complex(z)
    on_cut = (arr.real == 0.0) & (arr.imag <= 0.0)
    if np.any(on_cut):
        raise SpecfunDomainError("argument on the negative imaginary axis branch cut")
    # the principal square root differs from this branch exactly where the
    # argument sits below the negative real axis (including -0.0 imag)
    out = np.sqrt(arr)
    flip = (arr.real < 0.0) & np.signbit(arr.imag)
    if flip.any():
        out = np.where(flip, -out, out)
    return out if out.ndim else complex(out)


def hankel1_0(z):
    """Zero-order Hankel function of the first kind, complex argument."""
    arr = _as_complex(z)
    if np.any(arr == 0.0):
        raise SpecfunDomainError("hankel1_0 is log-singular at z = 0")
    # lossless media yield exactly real positive arguments; the paired
    # real-valued Bessel routines are several times faster than the
    # complex evaluator and agree to machine precision
    if arr.ndim and not arr.imag.any() and np.all(arr.real > 0.0):
        out = _sp.j0(arr.real) + 1j * _sp.y0(arr.real)
    elif _nb is not None and arr.ndim and _first_quadrant(arr):
        out = _hankel_compiled(0, arr)
    else:
        out = _sp.hankel1(0, arr)
    return out if out.ndim else complex(out)


def hankel1_1(z):
    """First-order Hankel function of the first kind; H0' = -H1."""
    arr = _as_complex(z)
    if np.any(arr == 0.0):
        raise SpecfunDomainError("hankel1_1 is singular at z = 0")
    if arr.ndim and not arr.imag.any() and np.all(arr.real > 0.0):
        out = _sp.j1(arr.real) + 1j * _sp.y1(arr.real)
    elif _nb is not None and arr.ndim and _first_quadrant(arr):
        out = _hankel_compiled(1, arr)
    else:
        out = _sp.hankel1(1, arr)
    return out if out.ndim else complex(out)

"""Independent high-precision reference implementation for the phase model.

Everything here is computed at 50 decimal digits with mpmath, and wherever
the library uses a closed form, this oracle deliberately takes a different
route: the inverse rise profile and the pulse jump are obtained by
root-finding / composition against the *definition* (add delta to the rise
value, invert numerically), and thresholds by solving jump(theta, m) = 1.
Tests compare the library's closed forms against these values, so an
algebra slip in either side shows up as a mismatch.
"""

from __future__ import annotations

import mpmath as mp

mp.mp.dps = 50


def o_rise(b: float, theta) -> mp.mpf:
    """Concave rise profile: log1p(expm1(b)*theta)/b, evaluated in mp."""
    b = mp.mpf(b)
    return mp.log1p(mp.expm1(b) * mp.mpf(theta)) / b


def o_rise_inv(b: float, x) -> mp.mpf:
    """Inverse of o_rise by bracketed root-finding (no closed form used)."""
    b = mp.mpf(b)
    x = mp.mpf(x)
    if x == 0:
        return mp.mpf(0)
    hi = mp.mpf(1)
    while o_rise(b, hi) < x:
        hi *= 2
    return mp.findroot(lambda th: o_rise(b, th) - x, (mp.mpf(0), hi), solver="anderson")


def o_jump(b: float, theta, delta) -> mp.mpf:
    """Definitional pulse jump: invert the rise, add delta, flow back.

    jump(theta, delta) = rise^{-1}(rise(theta) + delta), unclamped.
    """
    return o_rise_inv(b, o_rise(b, theta) + mp.mpf(delta))


def o_response(b: float, theta, delta) -> mp.mpf:
    """Phase advance caused by a pulse: jump minus identity."""
    return o_jump(b, theta, delta) - mp.mpf(theta)


def o_trigger(b: float, eps_hat, m: int) -> mp.mpf:
    """Smallest phase from which m simultaneous pulses reach threshold:
    the root of jump(theta, m*eps_hat) = 1, bracketed on [0, 1]."""
    d = m * mp.mpf(eps_hat)
    return mp.findroot(
        lambda th: o_jump(b, th, d) - 1, (mp.mpf(0), mp.mpf(1)), solver="anderson"
    )

"""
   Copyright 2020 The sorptrack developers

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

     http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
"""
import numpy as np
from scipy.integrate import quad

DEFAULT_RTOL = 1e-10
ACCEPT_RTOL = 1e-8
_LIMIT = 200


class QuadratureError(RuntimeError):
    pass


def _quad(func, a, b, **kwargs):
    """
    Adaptive quadrature that raises ``QuadratureError`` unless the error estimate
    is within ``ACCEPT_RTOL`` of the result.
    """
    out = quad(func, a, b, epsabs=0.0, epsrel=DEFAULT_RTOL, limit=_LIMIT, full_output=1, **kwargs)
    val, abserr, info = out[0], out[1], out[2]
    if len(out) > 3 and not abserr <= ACCEPT_RTOL * abs(val) + 1e-300:
        neval = info.get('neval', -1) if isinstance(info, dict) else -1
        msg = 'Quadrature on [%g, %g] did not converge: %s ' % (a, b, out[3])
        msg += '(value=%.17g, abserr=%.3g, neval=%s).' % (val, abserr, neval)
        raise QuadratureError(msg)
    return val


def _check_m(m):
    if not 0 < m < 1:
        raise ValueError('m must lie in (0, 1) (got %r).' % m)


def head_integral(x0, m):
    """
    :math:`\\int_0^{x_0} x^{-m} / (1 + x) \\, dx`, with the singularity at zero
    handled by an algebraic quadrature weight.
    """
    _check_m(m)
    if x0 < 0:
        raise ValueError('x0 must be nonnegative.')
    if x0 == 0:
        return 0.0
    if x0 <= 1:
        return _quad(lambda x: 1.0 / (1.0 + x), 0.0, x0, weight='alg', wvar=(-m, 0.0))
    return full_integral(m) - tail_integral(x0, m)


def tail_integral(x0, m):
    """
    :math:`\\int_{x_0}^{\\infty} x^{-m} / (1 + x) \\, dx`.

    The substitution :math:`t = 1 / (1 + x)` maps the tail onto
    :math:`\\int_0^{t_0} t^{m-1} (1 - t)^{-m} \\, dt` with :math:`t_0 = 1/(1 + x_0)`,
    which removes the algebraic decay at infinity.
    """
    _check_m(m)
    if x0 < 0:
        raise ValueError('x0 must be nonnegative.')
    if x0 >= 1:
        t0 = 1.0 / (1.0 + x0)
        return _quad(lambda t: (1.0 - t) ** (-m), 0.0, t0, weight='alg', wvar=(m - 1.0, 0.0))
    return tail_integral(1.0, m) + head_integral(1.0, m) - head_integral(x0, m)


def full_integral(m):
    """
    :math:`\\int_0^{\\infty} x^{-m} / (1 + x) \\, dx` by quadrature. Equal to
    :math:`\\pi / \\sin((1 - m)\\pi)`; see ``full_integral_closed_form``.
    """
    return head_integral(1.0, m) + tail_integral(1.0, m)


def full_integral_closed_form(m):
    _check_m(m)
    return np.pi / np.sin((1.0 - m) * np.pi)


def deviation_series(A, m, K_min, n_terms=1):
    """
    Ascending series in ``K_min`` for the relative deviation of the combined isotherm
    from the Freundlich isotherm,

    .. math::

        \\epsilon \\approx \\frac{\\sin((1-m)\\pi)}{\\pi}
            \\sum_{n=0}^{N-1} (-1)^n \\frac{x_0^{n+1-m}}{n+1-m}, \\quad x_0 = [A] K_{min}.

    The one-term estimate is the one inverted by ``critical_concentration``. The series
    converges for :math:`x_0 < 1`.
    """
    _check_m(m)
    if n_terms < 1:
        raise ValueError('n_terms must be at least 1.')
    x0 = A * K_min
    n = np.arange(n_terms)
    terms = (-1.0) ** n * x0 ** (n + 1.0 - m) / (n + 1.0 - m)
    return float(np.sin((1.0 - m) * np.pi) / np.pi * np.sum(terms))

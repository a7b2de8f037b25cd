"""Independent reference computations used only by the tests.

None of these share code paths with the package: matrix elements come from the
normal-ordered (disentangled) form of the squeezer, dense evolution uses
``scipy.linalg.expm`` on the full truncated two-mode space, and closed forms
are evaluated in exact rational arithmetic.
"""
import math
from fractions import Fraction

import numpy as np
from scipy.linalg import expm


def squeezer_element(r, phi, k, l, n, m):
    """<k, l| exp(r(e^{i phi} a^dag b^dag - e^{-i phi} a b)) |n, m> via

    S = exp(t a^dag b^dag) cosh(r)^-(N_a + N_b + 1) exp(-t^* a b),  t = e^{i phi} tanh r.
    """
    if k - l != n - m:
        return 0.0
    t = np.exp(1j * phi) * math.tanh(r)
    ch = math.cosh(r)
    total = 0.0
    for j in range(min(n, m) + 1):
        # lower j pairs, then raise i pairs
        i = k - (n - j)
        if i < 0:
            continue
        a, b = n - j, m - j
        lower = math.sqrt(math.factorial(n) / math.factorial(a) * math.factorial(m) / math.factorial(b))
        raise_ = math.sqrt(math.factorial(a + i) / math.factorial(a) * math.factorial(b + i) / math.factorial(b))
        total += (t ** i / math.factorial(i)) * ((-np.conj(t)) ** j / math.factorial(j)) \
            * lower * raise_ * ch ** (-(a + b + 1))
    return total


def dense_output_pmf(mu1, mu2, muk, phi, dim):
    """Output joint pmf from dense expm on the dim x dim truncated space."""
    r = math.asinh(math.sqrt(muk))
    a = np.diag(np.sqrt(np.arange(1, dim)), 1)
    eye = np.eye(dim)
    a1, a2 = np.kron(a, eye), np.kron(eye, a)
    pair = a1 @ a2
    gen = r * (np.exp(1j * phi) * pair.conj().T - np.exp(-1j * phi) * pair)
    U = expm(gen)
    q = np.arange(dim)
    p1 = mu1 ** q / (1 + mu1) ** (q + 1) if mu1 > 0 else (q == 0).astype(float)
    p2 = mu2 ** q / (1 + mu2) ** (q + 1) if mu2 > 0 else (q == 0).astype(float)
    w = np.kron(p1, p2)
    out = (np.abs(U) ** 2) @ w
    return out.reshape(dim, dim)


def exact_gammas(mu1, mu2, muk):
    """Closed forms evaluated in rationals (inputs converted exactly)."""
    m1, m2, k = Fraction(mu1), Fraction(mu2), Fraction(muk)
    s = 1 + m1 + m2
    den = 2 * k * s + m1 + m2
    gc = (2 * k * s - m1 ** 2 - m2 ** 2) / den
    gn = 2 * (k * s - m1 ** 2 - m2 ** 2 + m1 * m2) / den
    ge = 2 * (k * s - m1 * m2) / den
    return gc, gn, ge


def pmf_moments(P):
    """Means, variances, covariance and var(k - l) of a joint pmf array."""
    P = P / P.sum()
    k = np.arange(P.shape[0])[:, None]
    l = np.arange(P.shape[1])[None, :]
    E = lambda f: float(np.sum(f * P))
    n1, n2 = E(k + 0 * l), E(l + 0 * k)
    return {
        "n1": n1,
        "n2": n2,
        "var1": E((k - n1) ** 2 + 0 * l),
        "var2": E((l - n2) ** 2 + 0 * k),
        "cov12": E((k - n1) * (l - n2)),
        "varH": E((k - l - (n1 - n2)) ** 2),
    }

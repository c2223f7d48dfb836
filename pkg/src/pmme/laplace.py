"""Inverse Laplace transforms for the spectral solver.

Two routes:

* exact partial fractions for rational transforms (poles from the
  denominator polynomial, residues in closed form, multiplicities up to 3);
* fixed-Talbot numerical inversion (Abate & Valko 2004) for everything
  else, with a node-count consistency check.

Polynomial coefficient arrays are in descending powers (``numpy.polyval``
convention).
"""

from __future__ import annotations

from math import factorial

import numpy as np

from .errors import LaplaceDomainError, MultiplicityError, TalbotConvergenceError

ROOT_CLUSTER_RTOL = 1e-7


def poly_shift(coeffs, shift):
    """Coefficients of p(s + shift) given those of p(s)."""
    coeffs = np.atleast_1d(np.asarray(coeffs, dtype=complex))
    out = np.array([coeffs[0]], dtype=complex)
    for c in coeffs[1:]:
        out = np.polymul(out, np.array([1.0, shift], dtype=complex))
        out[-1] += c
    return out


def rational_xi_transform(num, den, lam):
    """Numerator/denominator of 1 / (s - lam * k~(s - lam)) for k~ = num/den.

    Over a common denominator this is Q(s - lam) / (s Q(s - lam) - lam P(s - lam)).
    """
    lam = complex(lam)
    p_sh = poly_shift(num, -lam)
    q_sh = poly_shift(den, -lam)
    d = np.polyadd(np.polymul(np.array([1.0, 0.0], dtype=complex), q_sh), -lam * p_sh)
    return q_sh, d


def cluster_roots(roots, rtol=ROOT_CLUSTER_RTOL):
    """Group near-identical roots; returns list of (mean root, multiplicity)."""
    roots = sorted(roots, key=lambda z: (z.real, z.imag))
    clusters = []
    for r in roots:
        if clusters and abs(r - clusters[-1][-1]) <= rtol * max(1.0, abs(r)):
            clusters[-1].append(r)
        else:
            clusters.append([r])
    return [(complex(np.mean(c)), len(c)) for c in clusters]


def _rational_derivative(num, den):
    """(num/den)' as a (numerator, denominator) pair of polynomials."""
    dn = np.polyder(num) if len(num) > 1 else np.array([0.0], dtype=complex)
    dd = np.polyder(den) if len(den) > 1 else np.array([0.0], dtype=complex)
    new_num = np.polysub(np.polymul(dn, den), np.polymul(num, dd))
    return new_num, np.polymul(den, den)


def partial_fractions(num, den, max_multiplicity=3):
    """Expand num/den into terms c / (s - p)^j.

    Returns a list of (pole, [c_1, ..., c_m]) where c_j is the coefficient
    of 1/(s - p)^j.  Requires deg num < deg den.  Repeated roots beyond
    ``max_multiplicity`` raise :class:`MultiplicityError`.
    """
    num = np.atleast_1d(np.asarray(num, dtype=complex))
    den = np.atleast_1d(np.asarray(den, dtype=complex))
    num = num / den[0]
    den = den / den[0]
    roots = np.roots(den)
    terms = []
    for pole, mult in cluster_roots(list(roots)):
        if mult > max_multiplicity:
            raise MultiplicityError(
                f"pole {pole} has multiplicity {mult} > {max_multiplicity}"
            )
        # deflate (s - pole)^mult out of the denominator
        red = den
        for _ in range(mult):
            red, rem = np.polydiv(red, np.array([1.0, -pole], dtype=complex))
        # H(s) = num / red;  c_{m-i} = H^(i)(pole) / i!
        coeffs = [0.0] * mult
        h_num, h_den = num, red
        for i in range(mult):
            coeffs[mult - 1 - i] = complex(
                np.polyval(h_num, pole) / np.polyval(h_den, pole) / factorial(i)
            )
            if i + 1 < mult:
                h_num, h_den = _rational_derivative(h_num, h_den)
        terms.append((pole, coeffs))
    return terms


def exponential_sum(terms):
    """Vectorized t -> sum over (pole, coeffs) of c_j t^(j-1) e^(pole t) / (j-1)!."""

    def fn(t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape, dtype=complex)
        for pole, coeffs in terms:
            ept = np.exp(pole * t)
            for j, c in enumerate(coeffs, start=1):
                if c != 0.0:
                    out = out + (c / factorial(j - 1)) * t ** (j - 1) * ept
        return out

    return fn


def talbot_inverse(F, t, nodes):
    """Fixed-Talbot inverse Laplace transform of F at a single time t > 0.

    Nodes lie on the deformed contour s(theta) = (r/t) theta (cot theta + i)
    with r = 2 nodes / 5.  F must be analytic to the right of the contour;
    evaluations that raise :class:`LaplaceDomainError` (quadrature-backed
    transforms queried far left) are replaced by the asymptotic 1/s, whose
    contribution there is negligible.
    """
    if t <= 0.0:
        raise ValueError("talbot_inverse requires t > 0")
    M = int(nodes)
    r = 2.0 * M / 5.0
    theta = np.arange(1, M) * np.pi / M
    cot = 1.0 / np.tan(theta)
    s = (r / t) * theta * (cot + 1j)
    gamma = (1.0 + 1j * theta * (1.0 + cot**2) - 1j * cot) * np.exp(t * s)
    total = 0.5 * np.exp(r) * _eval_transform(F, r / t)
    for sk, gk in zip(s, gamma):
        total += gk * _eval_transform(F, sk)
    return (2.0 / (5.0 * t)) * total.real


def _eval_transform(F, s):
    try:
        return complex(F(s))
    except LaplaceDomainError:
        return 1.0 / s


def talbot_function(F, nodes, check_nodes=None, rtol=1e-6, atol=1e-9):
    """Wrap a transform into a vectorized time-domain function via fixed Talbot.

    When ``check_nodes`` is given, every evaluation is repeated at that node
    count and disagreement beyond tolerance raises
    :class:`TalbotConvergenceError`.  t = 0 is not evaluable this way and
    must be handled by the caller.
    """

    def fn(t):
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        tt = np.atleast_1d(t)
        out = np.empty(tt.shape, dtype=complex)
        for i, ti in enumerate(tt):
            val = talbot_inverse(F, float(ti), nodes)
            if check_nodes is not None:
                ref = talbot_inverse(F, float(ti), check_nodes)
                if abs(val - ref) > max(atol, rtol * abs(val)):
                    raise TalbotConvergenceError(
                        f"Talbot values at {nodes} and {check_nodes} nodes "
                        f"differ by {abs(val - ref):.3e} at t={ti}"
                    )
            out[i] = val
        return complex(out[0]) if scalar else out

    return fn

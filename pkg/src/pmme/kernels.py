"""Memory kernels: time-domain evaluation and exact Laplace transforms.

Rational kernels carry their transform as a ratio of polynomials
(coefficient arrays in descending powers, ``numpy.polyval`` convention),
which downstream solvers invert exactly by partial fractions.  Kernels
built from a bare time function get a quadrature-backed transform valid
to the right of their convergence abscissa.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import quad

from .errors import (
    DistributionalKernelError,
    KernelParameterError,
    KernelPoleError,
    LaplaceDomainError,
)

POLE_TOL = 1e-9


@dataclass(frozen=True)
class MemoryKernel:
    """A memory kernel k(t) together with its Laplace transform.

    Attributes
    ----------
    name : registry name of the kernel family.
    params : constructor parameters (informational).
    time_fn : vectorized t >= 0 -> value, or None for distributional kernels.
    laplace_fn : complex s -> complex transform value.
    is_rational : whether the transform is a ratio of polynomials.
    rational_form : (numerator, denominator) coefficient arrays, or None.
    abscissa : abscissa of convergence of the transform integral.
    """

    name: str
    params: dict = field(default_factory=dict)
    time_fn: Optional[Callable] = None
    laplace_fn: Optional[Callable] = None
    is_rational: bool = False
    rational_form: Optional[tuple] = None
    abscissa: float = -np.inf

    def __call__(self, t):
        """Evaluate k(t); raises for distributional kernels."""
        if self.time_fn is None:
            raise DistributionalKernelError(
                f"kernel '{self.name}' has no pointwise time-domain form"
            )
        return self.time_fn(np.asarray(t, dtype=float))

    def laplace(self, s):
        """Evaluate the transform k~(s); raises at poles of a rational form."""
        if self.rational_form is not None:
            num, den = self.rational_form
            dval = np.polyval(den, s)
            scale = max(1.0, float(np.abs(den).max())) * max(1.0, abs(s)) ** max(len(den) - 1, 0)
            if np.min(np.abs(dval)) < POLE_TOL * scale:
                raise KernelPoleError(f"kernel '{self.name}' transform evaluated at a pole, s={s}")
            return np.polyval(num, s) / dval
        return self.laplace_fn(s)


def _require_positive(name, **values):
    for key, val in values.items():
        if not val > 0.0:
            raise KernelParameterError(f"{name}: parameter {key}={val} must be positive")


def exponential_kernel(A, gamma):
    """k(t) = A exp(-gamma t), with transform A / (s + gamma).  A, gamma > 0."""
    A, gamma = float(A), float(gamma)
    _require_positive("exponential", A=A, gamma=gamma)
    return MemoryKernel(
        name="exponential",
        params={"A": A, "gamma": gamma},
        time_fn=lambda t: A * np.exp(-gamma * t),
        is_rational=True,
        rational_form=(np.array([A]), np.array([1.0, gamma])),
        abscissa=-gamma,
    )


def damped_oscillatory_kernel(A, gamma, a, mu):
    """k(t) = A exp(-(gamma - a) t) [cos(mu t) - (gamma/mu) sin(mu t)].

    Transform: A (s - a) / ((s + gamma - a)^2 + mu^2).  Requires mu != 0.
    """
    A, gamma, a, mu = float(A), float(gamma), float(a), float(mu)
    if mu == 0.0:
        raise KernelParameterError("damped_oscillatory: mu must be nonzero")
    g = gamma - a
    num = A * np.array([1.0, -a])
    den = np.array([1.0, 2.0 * g, g * g + mu * mu])
    return MemoryKernel(
        name="damped_oscillatory",
        params={"A": A, "gamma": gamma, "a": a, "mu": mu},
        time_fn=lambda t: A * np.exp(-g * t) * (np.cos(mu * t) - (gamma / mu) * np.sin(mu * t)),
        is_rational=True,
        rational_form=(num, den),
        abscissa=-g,
    )


def delta_kernel():
    """Dirac-delta kernel: k~(s) = 1 identically (Markovian limit).

    Represented purely by its transform; time-domain evaluation raises.
    """
    return MemoryKernel(
        name="delta",
        params={},
        time_fn=None,
        is_rational=True,
        rational_form=(np.array([1.0]), np.array([1.0])),
        abscissa=-np.inf,
    )


def appendix_kernel(gamma):
    """Normalized exponential kernel k(t) = gamma exp(-gamma t); k~(0) = 1."""
    gamma = float(gamma)
    _require_positive("appendix", gamma=gamma)
    k = exponential_kernel(gamma, gamma)
    return MemoryKernel(
        name="appendix",
        params={"gamma": gamma},
        time_fn=k.time_fn,
        is_rational=True,
        rational_form=k.rational_form,
        abscissa=k.abscissa,
    )


def composite_kernel(terms: Sequence[tuple]):
    """Weighted sum of kernels: k = sum_i w_i k_i.

    The transform is the matching weighted sum (Laplace linearity).  The
    result is rational when every term is; the time function exists when
    every term has one.  Weights may be negative, which is how
    CP-violating parameter regions are explored.
    """
    terms = [(k, float(w)) for k, w in terms]
    if not terms:
        raise KernelParameterError("composite: needs at least one term")
    all_rational = all(k.is_rational for k, _ in terms)
    rational_form = None
    if all_rational:
        num = np.array([0.0])
        den = np.array([1.0])
        for k, w in terms:
            kn, kd = k.rational_form
            num = np.polyadd(np.polymul(num, kd), w * np.polymul(kn, den))
            den = np.polymul(den, kd)
        rational_form = (num, den)
    time_fn = None
    if all(k.time_fn is not None for k, _ in terms):
        fns = [(k.time_fn, w) for k, w in terms]

        def time_fn(t, _fns=fns):
            t = np.asarray(t, dtype=float)
            return sum(w * f(t) for f, w in _fns)

    lfns = [(k, w) for k, w in terms]

    def laplace_fn(s, _terms=lfns):
        return sum(w * k.laplace(s) for k, w in _terms)

    return MemoryKernel(
        name="composite",
        params={"terms": tuple((k.name, dict(k.params), w) for k, w in terms)},
        time_fn=time_fn,
        laplace_fn=laplace_fn if not all_rational else None,
        is_rational=all_rational,
        rational_form=rational_form,
        abscissa=max(k.abscissa for k, _ in terms),
    )


def kernel_from_time_fn(fn, *, abscissa, name="custom", params=None):
    """Wrap a user time function; the transform is computed by quadrature.

    The quadrature transform is defined for Re s > abscissa and raises
    :class:`LaplaceDomainError` to the left of it.  ``abscissa`` must bound
    the exponential growth rate of ``fn``.
    """
    abscissa = float(abscissa)

    def laplace_fn(s):
        return laplace_by_quadrature(fn, s, abscissa)

    return MemoryKernel(
        name=name,
        params=dict(params or {}),
        time_fn=lambda t: np.asarray(fn(np.asarray(t, dtype=float))),
        laplace_fn=laplace_fn,
        is_rational=False,
        abscissa=abscissa,
    )


def laplace_by_quadrature(time_fn, s, abscissa=-np.inf, margin=1e-6):
    """Numerically evaluate the Laplace transform of ``time_fn`` at ``s``.

    Integrates k(t) exp(-s t) on [0, inf) by adaptive quadrature.  Only
    valid for Re s > abscissa; left of that the integral diverges and a
    :class:`LaplaceDomainError` is raised.
    """
    s = complex(s)
    if np.isfinite(abscissa) and s.real <= abscissa + margin:
        raise LaplaceDomainError(
            f"transform requested at Re s = {s.real}, abscissa = {abscissa}"
        )
    val, _ = quad(
        lambda t: time_fn(t) * np.exp(-s * t),
        0.0,
        np.inf,
        complex_func=True,
        limit=400,
    )
    return val

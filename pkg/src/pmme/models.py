"""Closed-form reference models: qubit dephasing and amplitude damping.

These are the ground truth the spectral and Volterra solvers are validated
against.  The dephasing coherence factors f1/f2 correspond to the
exponential and damped-oscillatory kernels; the amplitude-damping model
has hyperbolic relaxation factors xi(A, B, t).

Degenerate branches (vanishing discriminants) switch to series limits at a
relative threshold of 1e-10 to avoid catastrophic cancellation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .liouville import (
    SIGMA_MINUS,
    SIGMA_PLUS,
    SIGMA_Z,
    DensityMatrix,
    Superoperator,
    build_gksl_generator,
)

DEGENERATE_RTOL = 1e-10


@dataclass(frozen=True)
class DephasingParams:
    """Rates of the dephasing model: kernel amplitude A, dephasing rate a,
    kernel decay gamma, and (for the oscillatory kernel) frequency mu."""

    A: float
    a: float
    gamma: float
    mu: float | None = None

    def __post_init__(self):
        for name in ("A", "a", "gamma"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive")
        if self.mu is not None and self.mu == 0.0:
            raise ValueError("mu must be nonzero when given")

    @property
    def oscillatory(self):
        """True when 4 a A > (a + gamma)^2, so f1 oscillates."""
        return 4.0 * self.a * self.A > (self.a + self.gamma) ** 2

    @property
    def omega(self):
        """sqrt(4 a A - (a + gamma)^2) / 2; imaginary -> overdamped branch."""
        disc = 4.0 * self.a * self.A - (self.a + self.gamma) ** 2
        return 0.5 * np.sqrt(complex(disc))

    @property
    def big_omega(self):
        """sqrt(mu^2 + A a), the oscillation frequency of f2."""
        if self.mu is None:
            raise ValueError("big_omega requires mu")
        return float(np.sqrt(self.mu**2 + self.A * self.a))


def dephasing_generator(a):
    """Dephasing generator L(rho) = (a/2)(sigma_z rho sigma_z - rho).

    Eigenvalues {0, -a, -a, 0} with the normalized Pauli damping basis.
    """
    if not a > 0.0:
        raise ValueError("a must be positive")
    return build_gksl_generator(np.zeros((2, 2), dtype=complex), [(SIGMA_Z, 0.5 * a)])


def _damped_cos_mix(t, decay, freq_sq_minus, mix):
    """e^(-decay t) [cos(w t) + (mix/w) sin(w t)] with w^2 = freq_sq_minus.

    Handles the oscillatory (w real), overdamped (w imaginary: cos -> cosh)
    and critically damped (w -> 0: limit 1 + mix*t) branches.
    """
    t = np.asarray(t, dtype=float)
    scale = max(abs(freq_sq_minus), decay**2, 1e-300)
    if abs(freq_sq_minus) <= DEGENERATE_RTOL * scale:
        return np.exp(-decay * t) * (1.0 + mix * t)
    if freq_sq_minus > 0.0:
        w = np.sqrt(freq_sq_minus)
        return np.exp(-decay * t) * (np.cos(w * t) + (mix / w) * np.sin(w * t))
    w = np.sqrt(-freq_sq_minus)
    return np.exp(-decay * t) * (np.cosh(w * t) + (mix / w) * np.sinh(w * t))


def f1(t, p: DephasingParams):
    """Coherence factor for the exponential kernel.

    f1(t) = e^(-t(a+gamma)/2) [cos(omega t) + sin(omega t)(a+gamma)/(2 omega)],
    omega = sqrt(4 a A - (gamma+a)^2)/2; analytic continuation off the
    oscillatory regime, series limit at the critical damping boundary.
    """
    b = 0.5 * (p.a + p.gamma)
    disc = p.a * p.A - b * b  # omega^2
    return _damped_cos_mix(t, b, disc, b)


def f1_prime(t, p: DephasingParams):
    """d f1/dt = -(a A / omega) e^(-t(a+gamma)/2) sin(omega t) (all branches)."""
    t = np.asarray(t, dtype=float)
    b = 0.5 * (p.a + p.gamma)
    disc = p.a * p.A - b * b
    aA = p.a * p.A
    scale = max(abs(disc), b * b, 1e-300)
    if abs(disc) <= DEGENERATE_RTOL * scale:
        return -aA * t * np.exp(-b * t)
    if disc > 0.0:
        w = np.sqrt(disc)
        return -(aA / w) * np.exp(-b * t) * np.sin(w * t)
    w = np.sqrt(-disc)
    return -(aA / w) * np.exp(-b * t) * np.sinh(w * t)


def f2(t, p: DephasingParams):
    """Coherence factor for the damped-oscillatory kernel.

    f2(t) = 1 - (A a/(gamma^2 + Omega^2)) [1 - e^(-gamma t)(cos(Omega t)
    + (gamma/Omega) sin(Omega t))], Omega = sqrt(mu^2 + A a).  Approaches a
    nonzero asymptotic coherence 1 - A a/(gamma^2 + Omega^2).
    """
    t = np.asarray(t, dtype=float)
    Om = p.big_omega
    C = p.A * p.a / (p.gamma**2 + Om**2)
    osc = np.exp(-p.gamma * t) * (np.cos(Om * t) + (p.gamma / Om) * np.sin(Om * t))
    return 1.0 - C * (1.0 - osc)


def f2_prime(t, p: DephasingParams):
    """d f2/dt = -(A a / Omega) e^(-gamma t) sin(Omega t)."""
    t = np.asarray(t, dtype=float)
    Om = p.big_omega
    return -(p.A * p.a / Om) * np.exp(-p.gamma * t) * np.sin(Om * t)


def sigma_closed_form(dx, dy, dz, f, fprime):
    """Trace-distance derivative for a dephasing pair with Bloch deltas (dx, dy, dz).

    sigma = (1/2) (dx^2 + dy^2) f f' / sqrt((dx^2 + dy^2) f^2 + dz^2).

    The 1/2 is fixed by the eigenvalue oracle: the difference of two Bloch
    states is (1/2)(dx f sigma_x + dy f sigma_y + dz sigma_z), so the trace
    distance is half the root above.  Returns NaN where the denominator
    vanishes (coincident pair, or f = 0 on the equator).
    """
    f = np.asarray(f, dtype=float)
    fprime = np.asarray(fprime, dtype=float)
    perp = dx * dx + dy * dy
    denom = np.sqrt(perp * f * f + dz * dz)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = 0.5 * perp * f * fprime / denom
    return np.where(denom > 0.0, out, np.nan)


def _bracketed_roots(fn, t_max, samples):
    """All roots of fn on (0, t_max] found by sign-change bisection."""
    ts = np.linspace(0.0, t_max, samples)
    vals = fn(ts)
    roots = []
    for i in range(len(ts) - 1):
        lo, hi = vals[i], vals[i + 1]
        if lo == 0.0 and ts[i] > 0.0:
            roots.append(float(ts[i]))
        elif lo * hi < 0.0:
            roots.append(float(bisect(fn, ts[i], ts[i + 1], xtol=1e-12)))
    if vals[-1] == 0.0:
        roots.append(float(ts[-1]))
    return roots


def sigma_windows(p: DephasingParams, kernel="exponential", t_max=10.0, samples=None):
    """Positive windows of f f' on [0, t_max] (where backflow occurs).

    Roots of f and f' are located separately by bracketed bisection, then
    the sign of f f' at each mid-interval decides the windows.  Outside the
    oscillatory regime f f' < 0 throughout and the list is empty.
    """
    if kernel == "exponential":
        if not p.oscillatory:
            return ()
        fv = lambda t: f1(t, p)
        fp = lambda t: f1_prime(t, p)
        freq = float(p.omega.real)
    elif kernel == "damped_oscillatory":
        fv = lambda t: f2(t, p)
        fp = lambda t: f2_prime(t, p)
        freq = p.big_omega
    else:
        raise ValueError(f"unknown kernel choice {kernel!r}")
    if samples is None:
        samples = max(1000, int(40 * t_max * max(freq, 1.0) / np.pi))
    zeros = sorted(set(_bracketed_roots(fv, t_max, samples) + _bracketed_roots(fp, t_max, samples)))
    edges = [0.0] + [z for z in zeros if 0.0 < z < t_max] + [t_max]
    windows = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid = 0.5 * (lo + hi)
        if fv(mid) * fp(mid) > 0.0:
            if windows and windows[-1][1] == lo:
                windows[-1] = (windows[-1][0], hi)
            else:
                windows.append((lo, hi))
    return tuple(windows)


@dataclass(frozen=True)
class AmplitudeDampingParams:
    """Amplitude-damping model: dissipation rate gamma0, mean excitation
    number N, kernel rate gamma.  Derived constants A = (1+2N) gamma gamma0
    and B = gamma + (1+2N) gamma0."""

    gamma0: float
    N: float
    gamma: float

    def __post_init__(self):
        if not self.gamma0 > 0.0 or not self.gamma > 0.0:
            raise ValueError("gamma0 and gamma must be positive")
        if self.N < 0.0:
            raise ValueError("N must be nonnegative")

    @property
    def A(self):
        return (1.0 + 2.0 * self.N) * self.gamma * self.gamma0

    @property
    def B(self):
        return self.gamma + (1.0 + 2.0 * self.N) * self.gamma0

    def stationary_state(self):
        n = self.N
        return DensityMatrix(np.diag([(1.0 + n) / (1.0 + 2.0 * n), n / (1.0 + 2.0 * n)]).astype(complex))


def amplitude_damping_generator(p: AmplitudeDampingParams):
    """L(rho) = gamma0(N+1) D[sigma_-] + gamma0 N D[sigma_+] with the usual
    dissipator D[A](rho) = A rho A^dag - {A^dag A, rho}/2."""
    return build_gksl_generator(
        np.zeros((2, 2), dtype=complex),
        [(SIGMA_MINUS, p.gamma0 * (p.N + 1.0)), (SIGMA_PLUS, p.gamma0 * p.N)],
    )


def _xi_hyperbolic(Aval, Bval, t):
    """e^(-Bt/2) [cosh(rt/2) + (B/r) sinh(rt/2)], r = sqrt(B^2 - 4A).

    Series limit e^(-Bt/2)(1 + Bt/2) at the degenerate point B^2 = 4A.
    """
    t = np.asarray(t, dtype=float)
    disc = Bval * Bval - 4.0 * Aval
    scale = max(Bval * Bval, abs(4.0 * Aval), 1e-300)
    if abs(disc) <= DEGENERATE_RTOL * scale:
        return np.exp(-0.5 * Bval * t) * (1.0 + 0.5 * Bval * t)
    r = np.sqrt(complex(disc))
    out = np.exp(-0.5 * Bval * t) * (np.cosh(0.5 * r * t) + (Bval / r) * np.sinh(0.5 * r * t))
    return out.real


def appendix_xi(p: AmplitudeDampingParams, t):
    """Population relaxation factor xi(A, B, t) of the amplitude-damping model.

    Note B^2 - 4A = (gamma - (1+2N) gamma0)^2, a perfect square, so the
    hyperbolic branch is the generic one.
    """
    return _xi_hyperbolic(p.A, p.B, t)


def appendix_xi_coherence(p: AmplitudeDampingParams, t):
    """Coherence relaxation factor: same hyperbolic form with A -> A/2 and
    B -> (B + gamma)/2, matching the generator eigenvalue -(1+2N) gamma0 / 2.

    The population factor applies only to the diagonal deviation; applying
    it to coherences as well disagrees with direct integration of the
    memory-kernel equation for any nondiagonal initial state.
    """
    return _xi_hyperbolic(0.5 * p.A, 0.5 * (p.B + p.gamma), t)


def appendix_state(p: AmplitudeDampingParams, rho0: DensityMatrix, t):
    """Closed-form evolved state of the amplitude-damping model.

    rho(t) = rho_ss + xi(A,B,t) * (diagonal deviation) + xi_coh(t) * (coherences).
    """
    m0 = rho0.matrix
    n = p.N
    pop_dev = float(m0[0, 0].real) - (1.0 + n) / (1.0 + 2.0 * n)
    b = complex(m0[0, 1])
    xi_p = appendix_xi(p, t)
    xi_c = appendix_xi_coherence(p, t)
    out = p.stationary_state().matrix.copy()
    out[0, 0] += xi_p * pop_dev
    out[1, 1] -= xi_p * pop_dev
    out[0, 1] += xi_c * b
    out[1, 0] += xi_c * np.conj(b)
    return DensityMatrix(out)


def appendix_sigma(p: AmplitudeDampingParams, a, c, t):
    """Trace-distance derivative for the diagonal pair diag(a, 1-a), diag(c, 1-c).

    sigma(t) = -(2A/r) |a - c| e^(-Bt/2) sinh(rt/2), r = sqrt(B^2 - 4A);
    always <= 0 because r is real (B^2 - 4A is a perfect square).  The
    prefactor is half the bare Bloch-difference expression, matching the
    numerically computed trace-distance derivative.
    """
    t = np.asarray(t, dtype=float)
    a = np.asarray(a, dtype=float)
    c = np.asarray(c, dtype=float)
    A, B = p.A, p.B
    disc = B * B - 4.0 * A
    scale = max(B * B, abs(4.0 * A), 1e-300)
    if abs(disc) <= DEGENERATE_RTOL * scale:
        body = 0.5 * t  # sinh(rt/2)/r -> t/2
    else:
        r = np.sqrt(complex(disc))
        body = (np.sinh(0.5 * r * t) / r).real
    return -2.0 * A * np.abs(a - c) * np.exp(-0.5 * B * t) * body

"""Green's functions for u'' + a(t) u = sigma(t) on [0, T].

Every kernel object evaluates G(t, s) elementwise over broadcast arrays and on
outer grids, knows the interior zeros of its slices G(t, .), and reports which
construction produced it.  Closed forms exist for constant potentials under
periodic and Dirichlet conditions; every other nonresonant case is served by a
kernel assembled from the RK4 fundamental system.

Construction of the numeric kernel: with u1, u2 the normalized fundamental
pair and k(t, s) = u1(s) u2(t) - u1(t) u2(s) the Cauchy kernel, every Green's
function here has the form

    G(t, s) = [u1(t) u2(t)] C [u1(s) u2(s)]^T + k(t, s) * 1{s <= t}

for a 2x2 coupling matrix C fixed by the boundary condition.  The boundary
determinant that must not vanish is det(I - Phi(T)) for the periodic case,
det(I + Phi(T)) for the antiperiodic one, and a single monodromy entry for the
separated conditions.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import OutOfRange, ResonantPotential, UnsupportedBoundaryKind
from .fundamental import FundamentalSolutions
from .potentials import (BoundaryKind, ConstantPotential, Interval, Potential,
                         SampledPotential)

RESONANCE_TOL = 1e-9


def _constant_margin(rho: float, T: float, bc: BoundaryKind) -> tuple[float, float]:
    """(boundary determinant, fundamental-solution scale) for a = rho**2."""
    x = rho * T
    sin_env = 1.0 if x >= math.pi / 2 else math.sin(x)  # max |sin(rho t)| on [0, T]
    if bc is BoundaryKind.PERIODIC:
        return 2.0 - 2.0 * math.cos(x), max(1.0, sin_env / rho, rho * sin_env)
    if bc is BoundaryKind.ANTIPERIODIC:
        return 2.0 + 2.0 * math.cos(x), max(1.0, sin_env / rho, rho * sin_env)
    if bc is BoundaryKind.DIRICHLET:
        return math.sin(x) / rho, sin_env / rho
    if bc is BoundaryKind.NEUMANN:
        # the rho -> 0 limit is resonant (constant eigenfunction), mirror the
        # periodic threshold there
        if x * x < RESONANCE_TOL:
            return 0.0, 1.0
        return -rho * math.sin(x), rho * sin_env
    if bc in (BoundaryKind.MIXED1, BoundaryKind.MIXED2):
        return math.cos(x), 1.0
    raise UnsupportedBoundaryKind(str(bc))


def _numeric_margin(fs: FundamentalSolutions, bc: BoundaryKind) -> tuple[float, float]:
    u1T, u2T = fs.u1[-1], fs.u2[-1]
    p1T, p2T = fs.p1[-1], fs.p2[-1]
    if bc is BoundaryKind.PERIODIC:
        det = (1.0 - u1T) * (1.0 - p2T) - u2T * p1T
        return det, fs.scale
    if bc is BoundaryKind.ANTIPERIODIC:
        det = (1.0 + u1T) * (1.0 + p2T) - u2T * p1T
        return det, fs.scale
    if bc is BoundaryKind.DIRICHLET:
        return u2T, float(np.max(np.abs(fs.u2)))
    if bc is BoundaryKind.NEUMANN:
        return p1T, float(np.max(np.abs(fs.p1)))
    if bc is BoundaryKind.MIXED1:
        return u1T, float(np.max(np.abs(fs.u1)))
    if bc is BoundaryKind.MIXED2:
        return p2T, float(np.max(np.abs(fs.p2)))
    raise UnsupportedBoundaryKind(str(bc))


def is_resonant(potential: Potential, bc: BoundaryKind, grid_size: int | None = None) -> bool:
    """Whether the homogeneous problem has a nontrivial solution (no kernel)."""
    if isinstance(potential, ConstantPotential):
        det, scale = _constant_margin(potential.rho, potential.interval.T, bc)
    else:
        fs = FundamentalSolutions(potential, 0.0, grid_size)
        det, scale = _numeric_margin(fs, bc)
    return abs(det) < RESONANCE_TOL * scale


class _KernelBase:
    """Shared evaluation plumbing; subclasses fill the coupling pieces."""

    potential: Potential
    bc: BoundaryKind
    form: str

    @property
    def T(self) -> float:
        return self.potential.interval.T

    def _pair(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    # coupling matrix entries, as floats
    _C: np.ndarray

    def __call__(self, t, s):
        t = np.asarray(t, dtype=float)
        s = np.asarray(s, dtype=float)
        t, s = np.broadcast_arrays(t, s)
        u1t, u2t = self._pair(t)
        u1s, u2s = self._pair(s)
        C = self._C
        g = ((C[0, 0] * u1t + C[1, 0] * u2t) * u1s
             + (C[0, 1] * u1t + C[1, 1] * u2t) * u2s)
        g = g + np.where(s <= t, u1s * u2t - u1t * u2s, 0.0)
        return g if g.ndim else float(g)

    def grid_eval(self, ts, ss) -> np.ndarray:
        """G on the outer grid, shape (len(ts), len(ss))."""
        ts = np.asarray(ts, dtype=float)
        ss = np.asarray(ss, dtype=float)
        u1t, u2t = self._pair(ts)
        u1s, u2s = self._pair(ss)
        C = self._C
        g = (np.outer(C[0, 0] * u1t + C[1, 0] * u2t, u1s)
             + np.outer(C[0, 1] * u1t + C[1, 1] * u2t, u2s))
        k = np.outer(u2t, u1s) - np.outer(u1t, u2s)
        return g + np.where(ts[:, None] >= ss[None, :], k, 0.0)

    def s_roots(self, t: float) -> np.ndarray:
        """Interior zeros of G(t, .), sorted."""
        from .quadrature import scan_kernel_roots
        return scan_kernel_roots(self, float(t))

    def parts(self):
        return KernelPart(self, +1), KernelPart(self, -1)


class KernelPart:
    """max(G, 0) or max(-G, 0), sharing the parent kernel's plumbing."""

    def __init__(self, kernel, sign: int):
        self.kernel = kernel
        self.sign = sign

    def __call__(self, t, s):
        g = self.kernel(t, s)
        return np.maximum(self.sign * g, 0.0)

    def grid_eval(self, ts, ss):
        return np.maximum(self.sign * self.kernel.grid_eval(ts, ss), 0.0)


class PeriodicConstantKernel(_KernelBase):
    """G for a = rho**2 under periodic conditions; depends only on |t - s|."""

    form = "closed"
    bc = BoundaryKind.PERIODIC

    def __init__(self, rho: float, T: float = 1.0):
        det, scale = _constant_margin(rho, T, self.bc)
        if abs(det) < RESONANCE_TOL * scale:
            raise ResonantPotential(f"rho*T = {rho * T} is within tolerance of a multiple of 2*pi")
        self.potential = ConstantPotential(rho, Interval(T))
        self.rho = float(rho)
        self._den = 2.0 * rho * (1.0 - math.cos(rho * T))

    def __call__(self, t, s):
        u = np.abs(np.asarray(t, dtype=float) - np.asarray(s, dtype=float))
        g = (np.sin(self.rho * u) + np.sin(self.rho * (self.T - u))) / self._den
        return g if g.ndim else float(g)

    def grid_eval(self, ts, ss):
        return self(np.asarray(ts, dtype=float)[:, None], np.asarray(ss, dtype=float)[None, :])

    def s_roots(self, t: float) -> np.ndarray:
        # zeros of cos(rho (u - T/2)) at u = T/2 + (2j+1) pi / (2 rho), u = |t - s|
        rho, T = self.rho, self.T
        jmax = int(rho * T / math.pi) + 2
        us = T / 2 + (2 * np.arange(-jmax, jmax + 1) + 1) * math.pi / (2 * rho)
        us = us[(us > 0) & (us < T)]
        roots = np.concatenate([t - us, t + us])
        roots = roots[(roots > 0) & (roots < T)]
        return np.unique(roots)

    def parts(self):
        return KernelPart(self, +1), KernelPart(self, -1)


class DirichletConstantKernel(_KernelBase):
    """G for a = rho**2 with u(0) = u(T) = 0; symmetric in (t, s)."""

    form = "closed"
    bc = BoundaryKind.DIRICHLET

    def __init__(self, rho: float, T: float = 1.0):
        det, scale = _constant_margin(rho, T, self.bc)
        if abs(det) < RESONANCE_TOL * scale:
            raise ResonantPotential(f"rho*T = {rho * T} is within tolerance of a multiple of pi")
        self.potential = ConstantPotential(rho, Interval(T))
        self.rho = float(rho)
        self._den = rho * math.sin(rho * T)

    def __call__(self, t, s):
        t = np.asarray(t, dtype=float)
        s = np.asarray(s, dtype=float)
        lo = np.minimum(t, s)
        hi = np.maximum(t, s)
        g = -np.sin(self.rho * lo) * np.sin(self.rho * (self.T - hi)) / self._den
        return g if g.ndim else float(g)

    def grid_eval(self, ts, ss):
        return self(np.asarray(ts, dtype=float)[:, None], np.asarray(ss, dtype=float)[None, :])

    def s_roots(self, t: float) -> np.ndarray:
        rho, T = self.rho, self.T
        j = np.arange(1, int(rho * T / math.pi) + 1)
        left = j * math.pi / rho
        right = T - j * math.pi / rho
        roots = np.concatenate([left[left < t], right[right > t]])
        roots = roots[(roots > 0) & (roots < T)]
        return np.unique(roots)

    def parts(self):
        return KernelPart(self, +1), KernelPart(self, -1)


class NumericKernel(_KernelBase):
    """Kernel for any nonresonant potential/boundary pair, built from the
    fundamental system sampled on a uniform grid (cubic Hermite between nodes).
    """

    form = "numeric"

    def __init__(self, potential: Potential, bc: BoundaryKind, grid_size: int | None = None):
        if not isinstance(bc, BoundaryKind):
            raise UnsupportedBoundaryKind(repr(bc))
        fs = FundamentalSolutions(potential, 0.0, grid_size)
        det, scale = _numeric_margin(fs, bc)
        if abs(det) < RESONANCE_TOL * scale:
            raise ResonantPotential(f"boundary determinant {det:.3e} below tolerance for {bc}")
        self.potential = potential
        self.bc = bc
        self.fs = fs
        self.grid_size = len(fs.ts)
        u1T, u2T = fs.u1[-1], fs.u2[-1]
        p1T, p2T = fs.p1[-1], fs.p2[-1]
        if bc is BoundaryKind.PERIODIC or bc is BoundaryKind.ANTIPERIODIC:
            sgn = 1.0 if bc is BoundaryKind.PERIODIC else -1.0
            A = sgn * np.eye(2) - np.array([[u1T, u2T], [p1T, p2T]])
            B = np.array([[u2T, -u1T], [p2T, -p1T]])
            self._C = np.linalg.solve(A, B)
        elif bc is BoundaryKind.DIRICHLET:
            self._C = np.array([[0.0, 0.0], [-1.0, u1T / u2T]])
        elif bc is BoundaryKind.NEUMANN:
            self._C = np.array([[-p2T / p1T, 1.0], [0.0, 0.0]])
        elif bc is BoundaryKind.MIXED1:
            self._C = np.array([[-u2T / u1T, 1.0], [0.0, 0.0]])
        else:  # MIXED2
            self._C = np.array([[0.0, 0.0], [-1.0, p1T / p2T]])

    def _pair(self, x):
        return self.fs.eval_pair(x)


def greens_periodic_constant(rho: float, T: float, t, s):
    """Closed-form periodic G for a = rho**2, evaluated at (t, s)."""
    _check_domain(T, t, s)
    return PeriodicConstantKernel(rho, T)(t, s)


def greens_dirichlet_constant(rho: float, T: float, t, s):
    """Closed-form Dirichlet G for a = rho**2, evaluated at (t, s)."""
    _check_domain(T, t, s)
    return DirichletConstantKernel(rho, T)(t, s)


def _check_domain(T, t, s):
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    if np.any(t < 0) or np.any(t > T) or np.any(s < 0) or np.any(s > T):
        raise OutOfRange(f"(t, s) must lie inside [0, {T}]^2")


def greens_numeric(potential: Potential, bc: BoundaryKind,
                   grid_size: int | None = None) -> NumericKernel:
    """Kernel from the fundamental system, for any nonresonant pairing."""
    return NumericKernel(potential, bc, grid_size)


def build_kernel(potential: Potential, bc: BoundaryKind,
                 grid_size: int | None = None):
    """Closed form when one exists for this pairing, numeric otherwise."""
    if isinstance(potential, ConstantPotential):
        if bc is BoundaryKind.PERIODIC:
            return PeriodicConstantKernel(potential.rho, potential.interval.T)
        if bc is BoundaryKind.DIRICHLET:
            return DirichletConstantKernel(potential.rho, potential.interval.T)
    return NumericKernel(potential, bc, grid_size)


def kernel_parts(kernel) -> tuple[KernelPart, KernelPart]:
    """(positive part, negative part) of a kernel, as evaluators."""
    return kernel.parts()

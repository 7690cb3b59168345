"""Panelized Gauss-Legendre quadrature and sign-change scanning.

Integrands here are piecewise smooth: kernels are C^1 away from the diagonal
t = s, their positive/negative parts additionally kink at the interior zeros
of G(t, .), and sampled potentials kink at their grid nodes.  Splitting panels
at every such point keeps a modest fixed-order rule accurate.
"""
from __future__ import annotations

import math

import numpy as np

GAUSS_ORDER = 16

_gauss_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def gauss_nodes(order: int = GAUSS_ORDER) -> tuple[np.ndarray, np.ndarray]:
    """(nodes, weights) of the order-point rule on [-1, 1], cached."""
    got = _gauss_cache.get(order)
    if got is None:
        got = np.polynomial.legendre.leggauss(order)
        _gauss_cache[order] = got
    return got


def build_edges(a: float, b: float, points=(), max_len: float | None = None) -> np.ndarray:
    """Sorted panel edges of [a, b]: interior break points plus a length cap."""
    if not b > a:
        raise ValueError(f"empty integration range [{a}, {b}]")
    pts = np.asarray(points, dtype=float)
    pts = pts[(pts > a + 1e-15 * (b - a)) & (pts < b - 1e-15 * (b - a))]
    edges = np.unique(np.concatenate([[a, b], pts]))
    if max_len is None or max_len <= 0:
        return edges
    pieces = [np.array([a])]
    for lo, hi in zip(edges[:-1], edges[1:]):
        n = max(1, int(math.ceil((hi - lo) / max_len)))
        pieces.append(np.linspace(lo, hi, n + 1)[1:])
    return np.concatenate(pieces)


def composite_gauss(f, edges: np.ndarray, order: int = GAUSS_ORDER) -> float:
    """Integral of vectorized f over the union of panels given by edges."""
    nodes, weights = gauss_nodes(order)
    lo = edges[:-1]
    hi = edges[1:]
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    xs = mid[:, None] + half[:, None] * nodes[None, :]
    vals = np.asarray(f(xs.ravel()), dtype=float).reshape(xs.shape)
    return float(np.sum(vals * (half[:, None] * weights[None, :])))


def integrate(f, a: float, b: float, points=(), max_len: float | None = None,
              order: int = GAUSS_ORDER) -> float:
    """Convenience wrapper: build edges, then integrate."""
    return composite_gauss(f, build_edges(a, b, points, max_len), order)


def default_max_len(potential) -> float:
    """Panel-length cap keeping a handful of panels per kernel half-wave."""
    T = potential.interval.T
    return min(T / 8.0, math.pi / math.sqrt(max(potential.sup_norm, 1.0)))


def scan_kernel_roots(kernel, t: float, n_scan: int = 512, tol: float = 1e-12) -> np.ndarray:
    """Interior zeros of s -> G(t, s) by dense sign scan plus bisection.

    Fallback for kernels without an analytic root list.  Tangential zeros
    (touching without crossing) are only caught if a scan node lands on them,
    which is acceptable: the quadratures that consume these roots only need
    panels that are sign-pure, and a touch point does not break that.
    """
    T = kernel.T
    base = np.linspace(0.0, T, n_scan + 1)
    extra = np.asarray([t] + list(kernel.potential.breakpoints), dtype=float)
    ss = np.unique(np.concatenate([base, extra[(extra >= 0) & (extra <= T)]]))
    g = np.asarray(kernel(np.full(ss.shape, t), ss), dtype=float)

    roots = [ss[i] for i in range(1, len(ss) - 1) if g[i] == 0.0]

    flips = np.nonzero(g[:-1] * g[1:] < 0.0)[0]
    if flips.size:
        lo = ss[flips].copy()
        hi = ss[flips + 1].copy()
        glo = g[flips].copy()
        it = max(1, int(math.ceil(math.log2(max(T / n_scan / tol, 2.0)))))
        for _ in range(it):
            mid = 0.5 * (lo + hi)
            gm = np.asarray(kernel(np.full(mid.shape, t), mid), dtype=float)
            same = (gm > 0) == (glo > 0)
            lo = np.where(same, mid, lo)
            glo = np.where(same, gm, glo)
            hi = np.where(same, hi, mid)
        roots.extend((0.5 * (lo + hi)).tolist())

    roots = np.array([r for r in roots if 0.0 < r < T], dtype=float)
    return np.unique(roots)

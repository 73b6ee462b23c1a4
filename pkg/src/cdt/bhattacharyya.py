"""Comparative-mean Bhattacharyya affinities and distances.

For comparable means M <= N the distance is the negative log-ratio of the
two affinity coefficients

    c_alpha^M(p:q) = sum_i / integral  M(p_i, q_i; 1-alpha, alpha),

with weight 1-alpha on p throughout (so the classical skewed Bhattacharyya
distance, defined with exponent alpha on p, appears with alpha and 1-alpha
swapped).  The arithmetic-mean coefficient of two normalized distributions
is identically 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .convexity import Verdict, function_model, is_mn_convex
from .divergences import ZERO_FLOOR, DivergenceValue
from .errors import (
    DomainError,
    DominanceError,
    KindMismatch,
    LengthMismatch,
    ParamError,
    UnsupportedWeights,
    WeightError,
)
from .generators import IDENTITY, Generator, Interval
from .means import MeanSpec, dominates, mean_value
from .quadrature import QuadratureConfig, integrate, ladder_breakpoints


@dataclass(frozen=True)
class DiscreteDist:
    """Probability mass sequence; optionally carries a value grid.

    ``normalized=False`` admits unnormalized positive measures (used e.g. by
    homogeneity checks and unnormalized expectations).
    """

    masses: tuple[float, ...]
    values: tuple[float, ...] | None = None
    normalized: bool = True

    def __post_init__(self) -> None:
        m = tuple(float(v) for v in self.masses)
        object.__setattr__(self, "masses", m)
        if not m:
            raise WeightError("distribution must have at least one mass")
        if any(v < 0.0 for v in m):
            raise DomainError("masses must be nonnegative")
        if self.normalized and abs(math.fsum(m) - 1.0) > 1e-9:
            raise WeightError(f"masses sum to {math.fsum(m)!r}, expected 1 within 1e-9")
        if self.values is not None:
            vals = tuple(float(v) for v in self.values)
            object.__setattr__(self, "values", vals)
            if len(vals) != len(m):
                raise LengthMismatch("values and masses differ in length")


@dataclass(frozen=True)
class CauchyParam:
    """Scale of a centered Cauchy density s / (pi (x^2 + s^2))."""

    scale: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "scale", float(self.scale))
        if not self.scale > 0.0:
            raise ParamError(f"Cauchy scale must be positive, got {self.scale!r}")


@dataclass(frozen=True)
class DensityModel:
    """Positive density with quadrature configuration.

    Unbounded supports are encoded through finite ``truncation`` bounds plus
    a ``tail_tol`` bound on the discarded mass; the normalization check at
    construction allows abs_tol + tail_tol.  ``breakpoints`` seed the panel
    decomposition of every integral against this density.
    """

    eval: Callable = field(repr=False)
    support: Interval = Interval()
    truncation: tuple[float, float] = (-1e6, 1e6)
    tail_tol: float = 0.0
    quadrature: QuadratureConfig = QuadratureConfig()
    breakpoints: tuple[float, ...] = ()
    normalized: bool = True

    def __post_init__(self) -> None:
        lo, hi = float(self.truncation[0]), float(self.truncation[1])
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise DomainError(f"truncation bounds must be finite and ordered, got {self.truncation!r}")
        object.__setattr__(self, "truncation", (lo, hi))
        object.__setattr__(self, "breakpoints", tuple(float(b) for b in self.breakpoints))
        if self.normalized:
            total = integrate(self.eval, lo, hi, self.quadrature, self.breakpoints)
            budget = self.quadrature.abs_tol + self.tail_tol + 1e-12
            if abs(total - 1.0) > budget:
                raise WeightError(
                    f"density integrates to {total!r} over {self.truncation}, "
                    f"expected 1 within {budget:g}"
                )


def cauchy_density(s: CauchyParam | float, cfg: QuadratureConfig = QuadratureConfig()) -> DensityModel:
    """Centered Cauchy density with scale s, truncated where the envelope is
    ~1e-14 of its peak; the discarded tail mass is charged to tail_tol."""
    scale = s.scale if isinstance(s, CauchyParam) else float(CauchyParam(s).scale)
    bound = 1e7 * scale
    tail = 2.0 * scale / (math.pi * bound)

    def pdf(x):
        return scale / (math.pi * (np.asarray(x, dtype=float) ** 2 + scale * scale))

    return DensityModel(
        eval=pdf,
        support=Interval(),
        truncation=(-bound, bound),
        tail_tol=tail,
        quadrature=cfg,
        breakpoints=ladder_breakpoints(-bound, bound, 0.0, scale),
    )


def histogram_density(
    edges: Sequence[float],
    masses: Sequence[float],
    cfg: QuadratureConfig = QuadratureConfig(),
) -> DensityModel:
    """Piecewise-constant density from bin edges and bin probability masses."""
    e = np.asarray(edges, dtype=float)
    m = np.asarray(masses, dtype=float)
    if len(e) != len(m) + 1:
        raise LengthMismatch("need len(edges) == len(masses) + 1")
    if np.any(np.diff(e) <= 0.0):
        raise DomainError("edges must be strictly increasing")
    if np.any(m < 0.0):
        raise DomainError("masses must be nonnegative")
    heights = m / np.diff(e)

    def pdf(x):
        x = np.asarray(x, dtype=float)
        idx = np.clip(np.searchsorted(e, x, side="right") - 1, 0, len(m) - 1)
        out = heights[idx]
        return np.where((x >= e[0]) & (x <= e[-1]), out, 0.0)

    return DensityModel(
        eval=pdf,
        support=Interval(float(e[0]) - 1e-12, float(e[-1]) + 1e-12),
        truncation=(float(e[0]), float(e[-1])),
        quadrature=cfg,
        breakpoints=tuple(float(v) for v in e[1:-1]),
    )


def _bary_arrays(spec: MeanSpec, A: np.ndarray, B: np.ndarray, alpha: float) -> np.ndarray:
    """Barycentric mean M(a, b; 1-alpha, alpha) on nonnegative arrays.

    Zeros are handled by continuous extension: entries whose direct formula
    is non-finite (geometric/harmonic-type collapse) evaluate to 0.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if np.any(A < 0.0) or np.any(B < 0.0):
        raise DomainError("distribution values must be nonnegative")
    w0, w1 = 1.0 - alpha, alpha
    fam = spec.family
    with np.errstate(all="ignore"):
        if fam == "quasi_arithmetic" or fam == "power":
            gid = spec.generator.id if fam == "quasi_arithmetic" else None
            delta = spec.delta if fam == "power" else None
            if gid == "identity":
                return w0 * A + w1 * B
            if gid == "log" or (delta is not None and abs(delta) < 1e-7) or gid == "power:0":
                out = np.exp(w0 * np.log(A) + w1 * np.log(B))
            elif gid == "reciprocal":
                out = 1.0 / (w0 / A + w1 / B)
            elif delta is not None or (gid or "").startswith("power:"):
                d = delta if delta is not None else float(gid.split(":", 1)[1])
                out = (w0 * A**d + w1 * B**d) ** (1.0 / d)
            else:
                gen = spec.generator
                vals = []
                for a, b in zip(np.atleast_1d(A), np.atleast_1d(B)):
                    try:
                        vals.append(mean_value(spec, float(a), float(b), alpha))
                    except DomainError:
                        vals.append(0.0)
                return np.asarray(vals)
        elif fam == "lehmer":
            d = spec.delta
            out = (w0 * A ** (d + 1.0) + w1 * B ** (d + 1.0)) / (w0 * A**d + w1 * B**d)
        elif fam == "gini":
            d1, d2 = spec.delta, spec.delta2
            if d1 == d2:
                t0, t1 = w0 * A**d1, w1 * B**d1
                out = np.exp((t0 * np.log(A) + t1 * np.log(B)) / (t0 + t1))
            else:
                out = ((w0 * A**d1 + w1 * B**d1) / (w0 * A**d2 + w1 * B**d2)) ** (1.0 / (d1 - d2))
        else:
            raise UnsupportedWeights(f"{fam} mean has no weighted form")
    out = np.where(np.isfinite(out), out, 0.0)
    return np.minimum(np.maximum(out, np.minimum(A, B)), np.maximum(A, B))


def _is_discrete(d) -> bool:
    return isinstance(d, DiscreteDist)


def _check_kinds(p, q) -> bool:
    """True for the discrete case; raises on mixed operands."""
    if _is_discrete(p) and _is_discrete(q):
        if len(p.masses) != len(q.masses):
            raise LengthMismatch("distributions have different lengths")
        if p.values is not None and q.values is not None and p.values != q.values:
            raise KindMismatch("distributions are defined on different value grids")
        return True
    if isinstance(p, DensityModel) and isinstance(q, DensityModel):
        return False
    raise KindMismatch(f"mixed operands: {type(p).__name__} vs {type(q).__name__}")


def _merged_quadrature(p: DensityModel, q: DensityModel) -> tuple[float, float, QuadratureConfig, tuple]:
    lo = min(p.truncation[0], q.truncation[0])
    hi = max(p.truncation[1], q.truncation[1])
    cfg = p.quadrature if p.quadrature.abs_tol <= q.quadrature.abs_tol else q.quadrature
    brk = tuple(sorted(set(p.breakpoints) | set(q.breakpoints)))
    return lo, hi, cfg, brk


def _integral_of_mean(M: MeanSpec, alpha: float, p: DensityModel, q: DensityModel) -> float:
    lo, hi, cfg, brk = _merged_quadrature(p, q)
    f = lambda x: _bary_arrays(M, p.eval(x), q.eval(x), alpha)
    return integrate(f, lo, hi, cfg, brk)


def bhat_coefficient(M: MeanSpec, alpha: float, p, q) -> float:
    """Generalized affinity coefficient: the total M-barycenter of (p, q)."""
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ParamError(f"alpha={alpha!r} outside (0, 1)")
    if not M.supports_weights:
        raise UnsupportedWeights(f"mean {M} does not support weights")
    if _check_kinds(p, q):
        vals = _bary_arrays(M, np.asarray(p.masses), np.asarray(q.masses), alpha)
        return float(math.fsum(vals.tolist()))
    return _integral_of_mean(M, alpha, p, q)


_POWER_ORDER_QA = {"identity": 1.0, "log": 0.0, "reciprocal": -1.0}
_POWER_ORDER_LEHMER = {0.0: 1.0, -0.5: 0.0, -1.0: -1.0}


def _power_order(spec: MeanSpec) -> float | None:
    if spec.family == "power":
        return spec.delta
    if spec.family == "quasi_arithmetic":
        gid = spec.generator.id
        if gid in _POWER_ORDER_QA:
            return _POWER_ORDER_QA[gid]
        if gid.startswith("power:"):
            return float(gid.split(":", 1)[1])
    if spec.family == "lehmer":
        return _POWER_ORDER_LEHMER.get(spec.delta)
    return None


def _builtin_comparable(M: MeanSpec, N: MeanSpec) -> bool:
    om, on = _power_order(M), _power_order(N)
    if om is not None and on is not None:
        return om <= on
    if M.family == "lehmer" and N.family == "lehmer":
        return M.delta <= N.delta
    return False


def _value_window(p, q) -> tuple[float, float]:
    if _is_discrete(p):
        vals = [v for v in (*p.masses, *q.masses) if v > 0.0]
    else:
        vals = []
        for d in (p, q):
            lo, hi = d.truncation
            xs = np.linspace(lo, hi, 257)
            vals.extend(v for v in np.asarray(d.eval(xs), dtype=float).tolist() if v > 0.0)
    lo, hi = min(vals), max(vals)
    return 0.5 * lo, 2.0 * hi + 1e-12


def _check_dominance(M: MeanSpec, N: MeanSpec, p, q, seed: int) -> None:
    res = dominates(M, N, _value_window(p, q), samples=2000, seed=seed)
    if res.above is not None:
        raise DominanceError(
            f"sampling found {M} > {N} at {res.above!r}; means are not ordered M <= N"
        )


def cmbd(
    M: MeanSpec,
    N: MeanSpec,
    alpha: float,
    p,
    q,
    trusted_dominance: bool = False,
    seed: int = 0,
) -> DivergenceValue:
    """Comparative-mean skewed Bhattacharyya distance -log(c^M / c^N).

    Requires M <= N (checked by sampling unless the pair is a built-in
    comparable pair such as G <= A, H <= A, H <= G, or ordered power means,
    or ``trusted_dominance`` is set).  Satisfies the skew-swap identity
    cmbd(alpha, q, p) = cmbd(1-alpha, p, q).
    """
    if not (trusted_dominance or _builtin_comparable(M, N)):
        _check_dominance(M, N, p, q, seed)
    cM = bhat_coefficient(M, alpha, p, q)
    cN = bhat_coefficient(N, alpha, p, q)
    if cM <= 0.0 or cN <= 0.0:
        raise DomainError("affinity coefficient vanished; distributions are mutually singular")
    return DivergenceValue.create(-math.log(cM / cN), ("p", "q"))


def power_cmbd(delta1: float, delta2: float, alpha: float, p, q) -> float:
    """Power-mean Bhattacharyya divergence:
    log(c^{P_delta1} / c^{P_delta2}) / (delta1 - delta2), both deltas nonzero."""
    delta1, delta2 = float(delta1), float(delta2)
    if delta1 == delta2:
        raise ParamError("delta1 and delta2 must differ")
    if abs(delta1) < 1e-12 or abs(delta2) < 1e-12:
        raise ParamError("zero delta: use cmbd with the geometric mean instead")
    from .means import power

    c1 = bhat_coefficient(power(delta1), alpha, p, q)
    c2 = bhat_coefficient(power(delta2), alpha, p, q)
    value = math.log(c1 / c2) / (delta1 - delta2)
    return 0.0 if -ZERO_FLOOR <= value < 0.0 else value


def alpha_divergence(alpha: float, p, q) -> float:
    """Alpha-divergence (1 - c_alpha) / (alpha(1-alpha)) with the geometric
    coefficient carrying exponent alpha on p and 1-alpha on q."""
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ParamError(f"alpha={alpha!r} outside (0, 1)")
    from .means import GEOMETRIC

    c = bhat_coefficient(GEOMETRIC, 1.0 - alpha, p, q)
    value = (1.0 - c) / (alpha * (1.0 - alpha))
    return 0.0 if -ZERO_FLOOR <= value < 0.0 else value


def cauchy_ha_closed_form(s1: CauchyParam | float, s2: CauchyParam | float, alpha: float) -> float:
    """Closed-form harmonic-arithmetic Bhattacharyya distance between two
    centered Cauchy densities.

    The weighted harmonic barycenter of the densities is itself of Cauchy
    shape: 1/pi(a x^2 + b) with a = (1-alpha)/s1 + alpha/s2 and
    b = (1-alpha) s1 + alpha s2, so c^H = 1/sqrt(ab) and the distance is
    log(ab)/2.  Confirmed against the adaptive-quadrature oracle.
    """
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ParamError(f"alpha={alpha!r} outside (0, 1)")
    v1 = s1.scale if isinstance(s1, CauchyParam) else CauchyParam(s1).scale
    v2 = s2.scale if isinstance(s2, CauchyParam) else CauchyParam(s2).scale
    a = (1.0 - alpha) / v1 + alpha / v2
    b = (1.0 - alpha) * v1 + alpha * v2
    return 0.5 * math.log(a * b)


def mean_gap_distance(f: Generator, g: Generator, p, q) -> float:
    """Symmetric distance gap sum/integral of M_g(p,q) - M_f(p,q).

    Requires M_f <= M_g, certified by checking that g o f^{-1} is convex on
    the shared value window (necessary and sufficient for quasi-arithmetic
    dominance).
    """
    window = f.domain.intersect(g.domain)
    comp = function_model(
        f"{g.id}({f.id}^-1)",
        f.image().intersect(Interval(*_image_window(f, window))),
        lambda u: g.value(f.inv(float(u))),
    )
    rep = is_mn_convex(comp, IDENTITY, IDENTITY)
    if rep.verdict is Verdict.NOT_CONVEX:
        raise DominanceError(
            f"{g.id}({f.id}^-1) is not convex: M_{f.id} does not lie below M_{g.id}"
        )
    from .means import quasi_arithmetic

    Mf, Mg = quasi_arithmetic(f), quasi_arithmetic(g)
    if _check_kinds(p, q):
        A, B = np.asarray(p.masses), np.asarray(q.masses)
        gap = _bary_arrays(Mg, A, B, 0.5) - _bary_arrays(Mf, A, B, 0.5)
        value = float(math.fsum(gap.tolist()))
    else:
        lo, hi, cfg, brk = _merged_quadrature(p, q)
        fn = lambda x: (
            _bary_arrays(Mg, p.eval(x), q.eval(x), 0.5)
            - _bary_arrays(Mf, p.eval(x), q.eval(x), 0.5)
        )
        value = integrate(fn, lo, hi, cfg, brk)
    return max(value, 0.0) if value >= -ZERO_FLOOR else value


def _image_window(gen: Generator, window: Interval) -> tuple[float, float]:
    a, b = window.finite_window()
    return gen.value(a), gen.value(b)

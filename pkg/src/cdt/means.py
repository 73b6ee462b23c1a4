"""Abstract mean families: quasi-arithmetic, power, Lehmer, Gini, Lagrange,
Cauchy, Stolarsky, and dual means, with weighted variants and a sampled
dominance comparison.

Every mean here is symmetric; the weight convention throughout the package
puts weight (1 - alpha) on the first argument and alpha on the second.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import (
    DomainError,
    NonInvertibleDerivative,
    NonInvertibleRatio,
    ParamError,
    UnsupportedWeights,
    WeightError,
)
from .generators import IDENTITY, LOG, RECIPROCAL, Generator, Interval, get_generator, power_generator

WEIGHT_SUM_TOL = 1e-9

#: Relative argument gap below which Lagrange/Cauchy/Stolarsky means return the
#: midpoint (removable singularity, first-order accurate).
NEAR_EQUAL_REL = 1e-9

#: Power means switch to the geometric branch below this |delta| to avoid
#: catastrophic cancellation; P_0 = G by continuous extension.
GEOMETRIC_BRANCH_EPS = 1e-7

_MONOTONE_SAMPLES = 33


@dataclass(frozen=True)
class MeanSpec:
    """Tagged description of a weighted bivariate or n-ary mean."""

    family: str
    generator: Generator | None = None
    generator2: Generator | None = None
    delta: float | None = None
    delta2: float | None = None
    inner: "MeanSpec | None" = None

    @property
    def supports_weights(self) -> bool:
        return self.family in ("quasi_arithmetic", "power", "lehmer", "gini")

    @property
    def symmetric(self) -> bool:
        # Every built-in family is invariant under swapping its two arguments.
        return True

    @property
    def homogeneous(self) -> bool:
        if self.family in ("power", "lehmer", "gini", "stolarsky"):
            return True
        if self.family == "quasi_arithmetic":
            gid = self.generator.id
            return gid in ("identity", "log", "reciprocal") or gid.startswith("power:")
        if self.family == "dual":
            return self.inner.homogeneous
        # Lagrange/Cauchy means are homogeneous only for special generators;
        # flag conservatively.
        return False

    def __str__(self) -> str:
        return format_mean(self)


def _num(x: float) -> str:
    f = float(x)
    return str(int(f)) if f == int(f) and abs(f) < 1e15 else repr(f)


def quasi_arithmetic(gen: Generator) -> MeanSpec:
    return MeanSpec("quasi_arithmetic", generator=gen)


def power(delta: float) -> MeanSpec:
    return MeanSpec("power", delta=float(delta))


def lehmer(delta: float) -> MeanSpec:
    return MeanSpec("lehmer", delta=float(delta))


def gini(delta1: float, delta2: float) -> MeanSpec:
    return MeanSpec("gini", delta=float(delta1), delta2=float(delta2))


def lagrange(gen: Generator) -> MeanSpec:
    return MeanSpec("lagrange", generator=gen)


def cauchy(f: Generator, g: Generator) -> MeanSpec:
    return MeanSpec("cauchy", generator=f, generator2=g)


def stolarsky(p: float) -> MeanSpec:
    return MeanSpec("stolarsky", delta=float(p))


def dual(spec: MeanSpec) -> MeanSpec:
    if not (spec.symmetric and spec.homogeneous):
        raise ParamError("dual mean requires a symmetric homogeneous base mean")
    return MeanSpec("dual", inner=spec)


ARITHMETIC = quasi_arithmetic(IDENTITY)
GEOMETRIC = quasi_arithmetic(LOG)
HARMONIC = quasi_arithmetic(RECIPROCAL)


def _require_positive(x: np.ndarray, family: str) -> None:
    if np.any(x <= 0.0):
        raise DomainError(f"{family} mean requires strictly positive values")


def _family_weighted(spec: MeanSpec, values: Sequence[float], weights: Sequence[float]) -> float:
    """Weighted mean for a weight-supporting family.

    Weights are assumed normalized; zero weights are tolerated here so that
    barycentric endpoints M_0 and M_1 evaluate cleanly.  Public entry points
    enforce strictly positive weights.
    """
    x = np.asarray(values, dtype=float)
    w = np.asarray(weights, dtype=float)
    if spec.family == "quasi_arithmetic":
        gen = spec.generator
        fx = np.array([gen.value(float(v)) for v in x])
        out = gen.inv(float(np.dot(w, fx)))
    elif spec.family == "power":
        _require_positive(x, "power")
        d = spec.delta
        if abs(d) < GEOMETRIC_BRANCH_EPS:
            out = float(np.exp(np.dot(w, np.log(x))))
        else:
            xm = float(np.max(x))
            s = float(np.dot(w, (x / xm) ** d))
            out = xm * s ** (1.0 / d)
    elif spec.family == "lehmer":
        _require_positive(x, "lehmer")
        d = spec.delta
        xm = float(np.max(x))
        r = x / xm
        out = xm * float(np.dot(w, r ** (d + 1.0))) / float(np.dot(w, r**d))
    elif spec.family == "gini":
        _require_positive(x, "gini")
        d1, d2 = spec.delta, spec.delta2
        xm = float(np.max(x))
        r = x / xm
        if d1 == d2:
            t = w * r**d1
            out = float(np.exp(np.dot(t, np.log(x)) / np.sum(t)))
        else:
            ratio = float(np.dot(w, r**d1)) / float(np.dot(w, r**d2))
            out = xm * math.exp(math.log(ratio) / (d1 - d2))
    else:  # pragma: no cover - guarded by callers
        raise UnsupportedWeights(f"{spec.family} mean has no weighted form")
    lo, hi = float(np.min(x)), float(np.max(x))
    return min(max(out, lo), hi)


def weighted_mean(spec: MeanSpec, values: Sequence[float], weights: Sequence[float]) -> float:
    """Weighted n-ary mean.

    For families without a barycentric form (Lagrange, Cauchy, Stolarsky,
    dual) only the plain bivariate call with weights (1/2, 1/2) is accepted.
    """
    values = [float(v) for v in values]
    weights = [float(w) for w in weights]
    if not values or len(values) != len(weights):
        raise WeightError("values and weights must be nonempty and of equal length")
    if any(w <= 0.0 for w in weights):
        raise WeightError("weights must be strictly positive")
    total = math.fsum(weights)
    if abs(total - 1.0) > WEIGHT_SUM_TOL:
        raise WeightError(f"weights sum to {total!r}, expected 1 within {WEIGHT_SUM_TOL:g}")
    if spec.supports_weights:
        return _family_weighted(spec, values, weights)
    if len(values) == 2 and abs(weights[0] - 0.5) <= 1e-12 and abs(weights[1] - 0.5) <= 1e-12:
        return mean_value(spec, values[0], values[1])
    raise UnsupportedWeights(
        f"{spec.family} mean has no weighted form (only the plain bivariate call is supported)"
    )


def mean_value(spec: MeanSpec, x: float, y: float, alpha: float = 0.5) -> float:
    """Barycentric bivariate mean M(x, y; 1-alpha, alpha).

    alpha may take the closed endpoints 0 and 1, where the mean interpolates
    its arguments exactly.
    """
    x, y, alpha = float(x), float(y), float(alpha)
    if not 0.0 <= alpha <= 1.0:
        raise WeightError(f"alpha={alpha!r} outside [0, 1]")
    if spec.supports_weights:
        return _family_weighted(spec, (x, y), (1.0 - alpha, alpha))
    if abs(alpha - 0.5) > 1e-12:
        raise UnsupportedWeights(f"{spec.family} mean has no weighted form")
    if spec.family == "lagrange":
        return lagrange_mean(spec.generator, x, y)
    if spec.family == "cauchy":
        return cauchy_mean(spec.generator, spec.generator2, x, y)
    if spec.family == "stolarsky":
        return stolarsky_mean(spec.delta, x, y)
    if spec.family == "dual":
        return dual_mean(spec.inner, x, y)
    raise ParamError(f"unknown mean family {spec.family!r}")  # pragma: no cover


def _nearly_equal(p: float, q: float) -> bool:
    return abs(p - q) < NEAR_EQUAL_REL * max(1.0, abs(p))


def _invert_monotone(fun, target: float, lo: float, hi: float, tol: float = 1e-14) -> float:
    """Bisection solve fun(m) = target for monotone fun on [lo, hi]."""
    flo, fhi = float(fun(lo)), float(fun(hi))
    increasing = fhi >= flo
    fmin, fmax = min(flo, fhi), max(flo, fhi)
    # Floating-point drift can push the target marginally outside the bracket.
    target = min(max(target, fmin), fmax)
    a, b = lo, hi
    for _ in range(200):
        if (b - a) <= tol * max(1.0, abs(a), abs(b)):
            break
        m = 0.5 * (a + b)
        fm = float(fun(m))
        if (fm < target) == increasing:
            a = m
        else:
            b = m
    return 0.5 * (a + b)


def _check_monotone(fun, lo: float, hi: float) -> bool:
    xs = np.linspace(lo, hi, _MONOTONE_SAMPLES)
    vals = [float(fun(float(x))) for x in xs]
    diffs = np.diff(vals)
    return bool(np.all(diffs > 0.0) or np.all(diffs < 0.0))


def lagrange_mean(f: Generator, p: float, q: float) -> float:
    """Mean-value mean: (f')^{-1}((f(q) - f(p)) / (q - p))."""
    p, q = float(p), float(q)
    for v in (p, q):
        if not f.domain.contains(v):
            raise DomainError(f"{v!r} outside domain of generator {f.id!r}")
    if _nearly_equal(p, q):
        return 0.5 * (p + q)
    a, b = min(p, q), max(p, q)
    if not _check_monotone(f.deriv, a, b):
        raise NonInvertibleDerivative(
            f"derivative of {f.id!r} is not monotone on [{a!r}, {b!r}]"
        )
    target = (f.value(q) - f.value(p)) / (q - p)
    m = _invert_monotone(f.deriv, target, a, b)
    return min(max(m, a), b)


def cauchy_mean(f: Generator, g: Generator, p: float, q: float) -> float:
    """Cauchy mean-value mean: (f'/g')^{-1}((f(q) - f(p)) / (g(q) - g(p)))."""
    p, q = float(p), float(q)
    for gen in (f, g):
        for v in (p, q):
            if not gen.domain.contains(v):
                raise DomainError(f"{v!r} outside domain of generator {gen.id!r}")
    if _nearly_equal(p, q):
        return 0.5 * (p + q)
    a, b = min(p, q), max(p, q)
    ratio = lambda x: f.deriv(x) / g.deriv(x)
    if not _check_monotone(ratio, a, b):
        raise NonInvertibleRatio(
            f"derivative ratio {f.id}'/{g.id}' is not monotone on [{a!r}, {b!r}]"
        )
    target = (f.value(q) - f.value(p)) / (g.value(q) - g.value(p))
    m = _invert_monotone(ratio, target, a, b)
    return min(max(m, a), b)


def stolarsky_mean(p_param: float, x: float, y: float) -> float:
    """Stolarsky mean with limit branches: logarithmic at p=0, identric at p=1."""
    p_param, x, y = float(p_param), float(x), float(y)
    if x <= 0.0 or y <= 0.0:
        raise DomainError("Stolarsky mean requires strictly positive arguments")
    if _nearly_equal(x, y):
        return 0.5 * (x + y)
    if abs(p_param) < 1e-7:
        out = (x - y) / (math.log(x) - math.log(y))
    elif abs(p_param - 1.0) < 1e-7:
        out = math.exp((x * math.log(x) - y * math.log(y)) / (x - y) - 1.0)
    else:
        # Anchor on max for p > 0 and min for p < 0 so the normalized powers
        # stay in (0, 1]; keeps huge |p| finite.
        c = max(x, y) if p_param > 0.0 else min(x, y)
        rx, ry = x / c, y / c
        quot = (rx**p_param - ry**p_param) / (p_param * (x - y))
        log_base = p_param * math.log(c) + math.log(quot)
        out = math.exp(log_base / (p_param - 1.0))
    return min(max(out, min(x, y)), max(x, y))


def dual_mean(spec: MeanSpec, x: float, y: float) -> float:
    """Dual mean M*(x, y) = xy / M(x, y) of a symmetric homogeneous mean."""
    x, y = float(x), float(y)
    if x <= 0.0 or y <= 0.0:
        raise DomainError("dual mean requires strictly positive arguments")
    if not (spec.symmetric and spec.homogeneous):
        raise ParamError("dual mean requires a symmetric homogeneous base mean")
    out = x * y / mean_value(spec, x, y)
    return min(max(out, min(x, y)), max(x, y))


class Dominance(Enum):
    DOMINATES = "dominates"
    DOMINATED_BY = "dominated_by"
    INCOMPARABLE = "incomparable"


@dataclass(frozen=True)
class DominanceResult:
    """Sampling verdict for mean dominance; a falsification, never a proof."""

    verdict: Dominance
    #: triple (x, y, alpha) where the first mean exceeded the second, if found
    above: tuple[float, float, float] | None
    #: triple (x, y, alpha) where the first mean fell below the second, if found
    below: tuple[float, float, float] | None


def dominates(
    a: MeanSpec,
    b: MeanSpec,
    domain: tuple[float, float] | Interval,
    samples: int = 10_000,
    seed: int = 0,
) -> DominanceResult:
    """Compare two means on sampled (x, y, alpha) triples over ``domain``.

    Returns DOMINATES when a >= b at every sample, DOMINATED_BY when a <= b at
    every sample (equality everywhere therefore reports DOMINATES), and
    INCOMPARABLE otherwise, with a counterexample triple for each violated
    direction.
    """
    lo, hi = (domain.lo, domain.hi) if isinstance(domain, Interval) else (float(domain[0]), float(domain[1]))
    rng = np.random.default_rng(seed)
    xs = rng.uniform(lo, hi, samples)
    ys = rng.uniform(lo, hi, samples)
    weighted = a.supports_weights and b.supports_weights
    als = rng.uniform(0.0, 1.0, samples) if weighted else np.full(samples, 0.5)
    above = below = None
    for x, y, al in zip(xs, ys, als):
        va = mean_value(a, float(x), float(y), float(al))
        vb = mean_value(b, float(x), float(y), float(al))
        tol = 1e-12 * max(1.0, abs(va), abs(vb))
        if above is None and va > vb + tol:
            above = (float(x), float(y), float(al))
        if below is None and va < vb - tol:
            below = (float(x), float(y), float(al))
        if above is not None and below is not None:
            break
    if below is None:
        return DominanceResult(Dominance.DOMINATES, above, None)
    if above is None:
        return DominanceResult(Dominance.DOMINATED_BY, None, below)
    return DominanceResult(Dominance.INCOMPARABLE, above, below)


def format_mean(spec: MeanSpec) -> str:
    """Compact string form, e.g. ``qa:log``, ``power:2``, ``dual:power:1``."""
    fam = spec.family
    if fam == "quasi_arithmetic":
        return f"qa:{spec.generator.id}"
    if fam == "power":
        return f"power:{_num(spec.delta)}"
    if fam == "lehmer":
        return f"lehmer:{_num(spec.delta)}"
    if fam == "gini":
        return f"gini:{_num(spec.delta)}:{_num(spec.delta2)}"
    if fam == "lagrange":
        return f"lagrange:{spec.generator.id}"
    if fam == "cauchy":
        return f"cauchy:{spec.generator.id}:{spec.generator2.id}"
    if fam == "stolarsky":
        return f"stolarsky:{_num(spec.delta)}"
    if fam == "dual":
        return f"dual:{format_mean(spec.inner)}"
    raise ParamError(f"unknown mean family {fam!r}")  # pragma: no cover


def _take_float(tokens: list[str], i: int, what: str) -> tuple[float, int]:
    if i >= len(tokens):
        raise ParamError(f"missing {what} in mean spec")
    try:
        return float(tokens[i]), i + 1
    except ValueError as exc:
        raise ParamError(f"bad {what} {tokens[i]!r} in mean spec") from exc


def _take_generator(tokens: list[str], i: int) -> tuple[Generator, int]:
    if i >= len(tokens):
        raise ParamError("missing generator name in mean spec")
    tok = tokens[i]
    if tok == "power":
        d, j = _take_float(tokens, i + 1, "power exponent")
        return power_generator(d), j
    return get_generator(tok), i + 1


def parse_mean(text: str) -> MeanSpec:
    """Parse the compact string form produced by :func:`format_mean`."""
    tokens = [t for t in text.strip().split(":") if t != ""]
    if not tokens:
        raise ParamError("empty mean spec")
    head, rest = tokens[0], 1

    def _done(spec: MeanSpec, i: int) -> MeanSpec:
        if i != len(tokens):
            raise ParamError(f"trailing tokens in mean spec {text!r}")
        return spec

    if head == "qa":
        gen, i = _take_generator(tokens, rest)
        return _done(quasi_arithmetic(gen), i)
    if head == "power":
        d, i = _take_float(tokens, rest, "power exponent")
        return _done(power(d), i)
    if head == "lehmer":
        d, i = _take_float(tokens, rest, "lehmer order")
        return _done(lehmer(d), i)
    if head == "gini":
        d1, i = _take_float(tokens, rest, "gini exponent")
        d2, i = _take_float(tokens, i, "gini exponent")
        return _done(gini(d1, d2), i)
    if head == "lagrange":
        gen, i = _take_generator(tokens, rest)
        return _done(lagrange(gen), i)
    if head == "cauchy":
        f, i = _take_generator(tokens, rest)
        g, i = _take_generator(tokens, i)
        return _done(cauchy(f, g), i)
    if head == "stolarsky":
        p, i = _take_float(tokens, rest, "stolarsky exponent")
        return _done(stolarsky(p), i)
    if head == "dual":
        inner = parse_mean(":".join(tokens[rest:]))
        return dual(inner)
    raise ParamError(f"unknown mean family {head!r}")

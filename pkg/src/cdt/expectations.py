"""Quasi-arithmetic means of samples and expected values of distributions.

The n-ary form f^{-1}((1/n) sum f(x_i)) is the constructive characterization
of means satisfying reflexivity, symmetry, monotone continuity, and
associativity; the expectation form f^{-1}(E[f(X)]) extends it to discrete
and continuous laws (e.g. geometric and harmonic expected values).
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .bhattacharyya import DensityModel, DiscreteDist
from .errors import DomainError, KindMismatch
from .generators import Generator
from .quadrature import integrate


def qa_mean(f: Generator, samples: Sequence[float]) -> float:
    """f^{-1} of the arithmetic mean of f-images."""
    xs = [float(x) for x in samples]
    if not xs:
        raise DomainError("qa_mean requires at least one sample")
    fx = np.array([f.value(x) for x in xs])
    out = f.inv(float(np.mean(fx)))
    return min(max(out, min(xs)), max(xs))


def _apply_gen(f: Generator, xs: np.ndarray) -> np.ndarray:
    try:
        with np.errstate(all="ignore"):
            out = np.asarray(f.forward(xs), dtype=float)
        if out.shape == xs.shape:
            return out
    except Exception:
        pass
    return np.array([f.value(float(x)) for x in xs])


def qa_expected_value(f: Generator, dist, normalize: bool = False) -> float:
    """Quasi-arithmetic expected value f^{-1}(E[f(X)]).

    For a DiscreteDist the value grid is required.  With ``normalize=True``
    the f-moment is divided by the total mass, extending the definition to
    positive unnormalized measures.
    """
    if isinstance(dist, DiscreteDist):
        if dist.values is None:
            raise DomainError("qa_expected_value needs a DiscreteDist with a value grid")
        xs = np.asarray(dist.values)
        ms = np.asarray(dist.masses)
        fx = np.array([f.value(float(x)) for x in xs])
        moment = float(np.dot(ms, fx))
        if normalize:
            moment /= float(np.sum(ms))
        out = f.inv(moment)
        return min(max(out, float(np.min(xs))), float(np.max(xs)))
    if isinstance(dist, DensityModel):
        lo, hi = dist.truncation
        if not (f.domain.contains(lo) and f.domain.contains(hi)):
            raise DomainError(
                f"support [{lo!r}, {hi!r}] is not inside the domain of generator {f.id!r}"
            )
        moment = integrate(
            lambda x: np.asarray(dist.eval(x), dtype=float) * _apply_gen(f, np.asarray(x, dtype=float)),
            lo,
            hi,
            dist.quadrature,
            dist.breakpoints,
        )
        if normalize:
            total = integrate(dist.eval, lo, hi, dist.quadrature, dist.breakpoints)
            moment /= total
        return f.inv(moment)
    raise KindMismatch(f"unsupported distribution type {type(dist).__name__}")

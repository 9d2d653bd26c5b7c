"""Two-piece composite densities and the power-transform machinery.

A composite density splices a light-bodied head f1 on [0, theta) to a
Pareto-type tail f2 on [theta, inf), both weighted by one normalizing
constant c:

    pdf(x) = c * f1(x)   for 0 <= x < theta
    pdf(x) = c * f2(x)   for x >= theta

Conventions used throughout: the head cdf F1 is the full distribution
function of the head family on [0, inf); the tail cdf F2 is the
distribution function of the tail piece on its own support, so
F2(theta) = 0 and the tail carries probability mass exactly c.  Partial
moment functions follow the same split: the head one integrates
x^r * f1 from 0, the tail one from theta.

The power transform Y = X**(1/eta) maps a composite parent X to an
exponentiated composite with density

    c * f_i(y**eta) * eta * y**(eta - 1)

and piece boundary theta**(1/eta).  The transformed density is itself a
composite (see as_composite_spec), which is what makes repeated
exponentiation close under composition of the exponents.

Piece callables stored on a CompositeSpec must accept scalars or numpy
arrays.  The quadrature and root-finding fallbacks call them with scalars.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .special import QUAD_TOL, adaptive_quadrature, find_root_bracketed

__all__ = [
    "InfiniteMomentError",
    "LimitedMomentQuery",
    "CompositeSpec",
    "ExponentiatedComposite",
    "VerificationReport",
    "exponentiate",
    "as_composite_spec",
    "parent_moment",
    "verify_composite",
]

# Relative step for the central-difference derivative checks.
DERIVATIVE_STEP_REL = 1e-6

# Default relative tolerances for verify_composite, sized for models whose
# constants are stored at printed precision.  Exactly solved constants land
# orders of magnitude below these.
CONTINUITY_TOL = 1e-5
DERIVATIVE_TOL = 1e-4
NORMALIZATION_TOL = 1e-5


class InfiniteMomentError(ValueError):
    """Requested moment diverges: t/eta reaches the tail decay exponent."""


@dataclass(frozen=True)
class LimitedMomentQuery:
    """Order t and cap b of a limited moment E[(Y ^ b)^t].

    Order zero is admitted because the defining identity makes the answer
    exactly one; it doubles as a cheap self-check of the cdf/partial-moment
    wiring.
    """

    order: float
    cap: float

    def __post_init__(self) -> None:
        if not self.order >= 0.0:
            raise ValueError(f"limited-moment order must be >= 0, got {self.order}")
        if not self.cap > 0.0:
            raise ValueError(f"limited-moment cap must be > 0, got {self.cap}")


@dataclass(frozen=True)
class CompositeSpec:
    """Pieces and auxiliary functions of one composite density.

    Required: the two piece densities, the breakpoint, the normalizing
    constant, and the two cdfs.  Partial moments, log densities, and
    quantile inverses are optional; missing ones fall back to adaptive
    quadrature or bracketed root finding.

    tail_moment_sup is the supremum of r with E[X^r] finite (the Pareto
    decay exponent of the tail piece).  Moment routines compare against it
    instead of attempting a divergent integral.
    """

    head_density: Callable
    tail_density: Callable
    breakpoint: float
    norm_const: float
    head_cdf: Callable
    tail_cdf: Callable
    head_partial_moment: Callable | None = None  # (u, r) -> int_0^u x^r f1
    tail_partial_moment: Callable | None = None  # (u, r) -> int_theta^u x^r f2
    # log densities take log(x), not x, so y**eta never has to be formed
    head_log_density: Callable | None = None  # log_x -> log f1(x)
    tail_log_density: Callable | None = None  # log_x -> log f2(x)
    head_ppf: Callable | None = None  # inverse of head_cdf
    tail_ppf: Callable | None = None  # inverse of tail_cdf
    tail_moment_sup: float = math.inf
    label: str = "composite"

    def __post_init__(self) -> None:
        if not self.breakpoint > 0.0:
            raise ValueError(f"breakpoint must be > 0, got {self.breakpoint}")
        if not 0.0 < self.norm_const <= 1.0:
            raise ValueError(
                f"normalizing constant must lie in (0, 1], got {self.norm_const}"
            )
        if not self.tail_moment_sup > 0.0:
            raise ValueError("tail_moment_sup must be positive")

    # -- fallback-dispatching helpers ------------------------------------

    def head_partial(self, u: float, r: float) -> float:
        """int_0^u x^r f1(x) dx."""
        if self.head_partial_moment is not None:
            return float(self.head_partial_moment(u, r))
        if u == 0.0:
            return 0.0
        res = adaptive_quadrature(
            lambda x: x**r * float(self.head_density(x)), 0.0, u
        )
        return res.value

    def tail_partial(self, u: float, r: float) -> float:
        """int_theta^u x^r f2(x) dx."""
        if self.tail_partial_moment is not None:
            return float(self.tail_partial_moment(u, r))
        if u == self.breakpoint:
            return 0.0
        theta = self.breakpoint
        if u / theta > 100.0:
            # x = e^v turns many decades of algebraic decay into a short
            # exponential-decay integral the adaptive rule certifies easily
            res = adaptive_quadrature(
                lambda v: math.exp((r + 1.0) * v) * float(self.tail_density(math.exp(v))),
                math.log(theta),
                math.log(u),
            )
        else:
            res = adaptive_quadrature(
                lambda x: x**r * float(self.tail_density(x)), theta, u
            )
        return res.value

    def invert_head_cdf(self, q: float) -> float:
        if self.head_ppf is not None:
            return float(self.head_ppf(q))
        theta = self.breakpoint
        lo = theta
        for _ in range(400):
            lo *= 0.5
            if float(self.head_cdf(lo)) < q:
                break
        else:
            raise ValueError(f"could not bracket head quantile for q={q}")
        return find_root_bracketed(lambda x: float(self.head_cdf(x)) - q, lo, theta)

    def invert_tail_cdf(self, q: float) -> float:
        if self.tail_ppf is not None:
            return float(self.tail_ppf(q))
        theta = self.breakpoint
        if q == 0.0:
            return theta
        hi = theta
        for _ in range(2100):
            hi *= 2.0
            if float(self.tail_cdf(hi)) > q:
                break
        else:
            raise ValueError(f"could not bracket tail quantile for q={q}")
        return find_root_bracketed(lambda x: float(self.tail_cdf(x)) - q, theta, hi)

    def total_mass(self) -> float:
        """c*F1(theta) + c*(F2(inf) - F2(theta)); one for a valid spec."""
        f2_inf = float(self.tail_cdf(math.inf))
        return self.norm_const * (
            float(self.head_cdf(self.breakpoint))
            + f2_inf
            - float(self.tail_cdf(self.breakpoint))
        )


@dataclass(frozen=True)
class ExponentiatedComposite:
    """Distribution of Y = X**(1/exponent) for a composite parent X."""

    parent: CompositeSpec
    exponent: float

    def __post_init__(self) -> None:
        if not self.exponent > 0.0:
            raise ValueError(f"exponent must be > 0, got {self.exponent}")

    @property
    def breakpoint(self) -> float:
        """Piece boundary of the transformed density, theta**(1/eta)."""
        return self.parent.breakpoint ** (1.0 / self.exponent)

    @property
    def head_mass(self) -> float:
        return self.parent.norm_const * float(
            self.parent.head_cdf(self.parent.breakpoint)
        )

    # -- density ----------------------------------------------------------

    def _pdf_at_zero(self) -> float:
        if self.exponent > 1.0:
            return 0.0
        with np.errstate(all="ignore"):
            f10 = float(np.asarray(self.parent.head_density(0.0)))
        if math.isnan(f10):
            return 0.0
        if self.exponent == 1.0:
            return self.parent.norm_const * f10
        return math.inf if f10 > 0.0 else 0.0

    def pdf(self, y):
        """Density of Y; zero for y < 0, tail branch at exactly y = breakpoint."""
        arr = np.asarray(y, dtype=float)
        scalar = arr.ndim == 0
        arr = np.atleast_1d(arr)
        out = np.zeros(arr.shape)
        eta = self.exponent
        c = self.parent.norm_const
        yb = self.breakpoint
        head = (arr > 0.0) & (arr < yb)
        tail = arr >= yb
        # y**eta can overflow (or the jacobian blow up at tiny y when eta < 1)
        # while the parent density underflows to 0; the density always wins, so
        # a vanished density forces a zero product instead of 0 * inf = nan.
        with np.errstate(over="ignore", invalid="ignore"):
            if head.any():
                yh = arr[head]
                dens = np.asarray(self.parent.head_density(yh**eta), dtype=float)
                out[head] = np.where(dens == 0.0, 0.0, c * dens * eta * yh ** (eta - 1.0))
            if tail.any():
                yt = arr[tail]
                dens = np.asarray(self.parent.tail_density(yt**eta), dtype=float)
                out[tail] = np.where(dens == 0.0, 0.0, c * dens * eta * yt ** (eta - 1.0))
        zero = arr == 0.0
        if zero.any():
            out[zero] = self._pdf_at_zero()
        out[np.isnan(arr)] = np.nan
        return float(out[0]) if scalar else out

    def log_pdf(self, y):
        """log pdf(y) in log space; -inf where the density vanishes."""
        arr = np.asarray(y, dtype=float)
        scalar = arr.ndim == 0
        arr = np.atleast_1d(arr)
        out = np.full(arr.shape, -math.inf)
        eta = self.exponent
        log_c = math.log(self.parent.norm_const)
        log_eta = math.log(eta)
        yb = self.breakpoint
        head = (arr > 0.0) & (arr < yb)
        tail = arr >= yb
        for mask, piece, log_piece in (
            (head, self.parent.head_density, self.parent.head_log_density),
            (tail, self.parent.tail_density, self.parent.tail_log_density),
        ):
            if not mask.any():
                continue
            ym = arr[mask]
            log_y = np.log(ym)
            if log_piece is not None:
                lp = log_piece(eta * log_y)
            else:
                with np.errstate(divide="ignore"):
                    lp = np.log(piece(ym**eta))
            out[mask] = log_c + lp + log_eta + (eta - 1.0) * log_y
        out[np.isnan(arr)] = np.nan
        return float(out[0]) if scalar else out

    # -- distribution function and inverse --------------------------------

    def cdf(self, y):
        arr = np.asarray(y, dtype=float)
        scalar = arr.ndim == 0
        arr = np.atleast_1d(arr)
        out = np.zeros(arr.shape)
        eta = self.exponent
        c = self.parent.norm_const
        yb = self.breakpoint
        theta = self.parent.breakpoint
        f1_theta = float(self.parent.head_cdf(theta))
        f2_theta = float(self.parent.tail_cdf(theta))
        head = (arr > 0.0) & (arr < yb)
        tail = arr >= yb
        if head.any():
            out[head] = c * self.parent.head_cdf(arr[head] ** eta)
        if tail.any():
            out[tail] = c * f1_theta + c * (
                self.parent.tail_cdf(arr[tail] ** eta) - f2_theta
            )
        out[np.isnan(arr)] = np.nan
        return float(np.clip(out, 0.0, 1.0)[0]) if scalar else np.clip(out, 0.0, 1.0)

    def quantile(self, u):
        """Inverse cdf on (0, 1), closed-form piece inversion when wired."""
        arr = np.asarray(u, dtype=float)
        scalar = arr.ndim == 0
        arr = np.atleast_1d(arr)
        if not np.all((arr > 0.0) & (arr < 1.0)):
            raise ValueError("quantile requires probabilities strictly inside (0, 1)")
        c = self.parent.norm_const
        hm = self.head_mass
        f2_theta = float(self.parent.tail_cdf(self.parent.breakpoint))
        x = np.empty(arr.shape)
        head = arr < hm
        tail = ~head
        if head.any():
            q = arr[head] / c
            if self.parent.head_ppf is not None:
                x[head] = self.parent.head_ppf(q)
            else:
                x[head] = [self.parent.invert_head_cdf(float(qi)) for qi in q]
        if tail.any():
            q = (arr[tail] - hm) / c + f2_theta
            if self.parent.tail_ppf is not None:
                x[tail] = self.parent.tail_ppf(q)
            else:
                x[tail] = [self.parent.invert_tail_cdf(float(qi)) for qi in q]
        y = x ** (1.0 / self.exponent)
        return float(y[0]) if scalar else y

    def sample(self, n: int, seed: int) -> np.ndarray:
        """n inversion draws from a seeded generator; same seed, same draws."""
        if not (isinstance(n, (int, np.integer)) and n >= 1):
            raise ValueError(f"sample size must be a positive integer, got {n}")
        rng = np.random.default_rng(seed)
        return np.asarray(self.quantile(rng.random(int(n))))

    # -- moments -----------------------------------------------------------

    def moment_numeric(self, t: float, *, tol: float = QUAD_TOL) -> float:
        """E[Y^t] by quadrature on the y scale.

        Divergence is decided by comparing t/eta with the declared tail
        exponent, never by integrating.
        """
        if not t > 0.0:
            raise ValueError(f"moment order must be > 0, got {t}")
        if t / self.exponent >= self.parent.tail_moment_sup:
            raise InfiniteMomentError(
                f"moment of order {t} diverges: t/eta = {t / self.exponent} "
                f"reaches the tail exponent {self.parent.tail_moment_sup}"
            )
        res = adaptive_quadrature(
            lambda y: y**t * float(self.pdf(y)),
            0.0,
            math.inf,
            breakpoints=[self.breakpoint],
            tol=tol,
        )
        return res.value

    def limited_moment(self, q) -> float:
        """E[(Y ^ b)^t] via the three-branch split at b = theta**(1/eta).

        Accepts a LimitedMomentQuery or an (order, cap) pair.
        """
        if not isinstance(q, LimitedMomentQuery):
            q = LimitedMomentQuery(*q)
        t, b = q.order, q.cap
        s = t / self.exponent
        parent = self.parent
        theta = parent.breakpoint
        c = parent.norm_const
        yb = self.breakpoint
        f2_theta = float(parent.tail_cdf(theta))
        if b < yb:
            xb = b**self.exponent
            return (
                c * parent.head_partial(xb, s)
                + c * b**t * (float(parent.head_cdf(theta)) - float(parent.head_cdf(xb)))
                + c * b**t * (1.0 - f2_theta)
            )
        if b == yb:
            return c * parent.head_partial(theta, s) + c * b**t * (1.0 - f2_theta)
        xb = b**self.exponent
        return (
            c * parent.head_partial(theta, s)
            + c * (parent.tail_partial(xb, s) - parent.tail_partial(theta, s))
            + c * b**t * (1.0 - float(parent.tail_cdf(xb)))
        )


@dataclass(frozen=True)
class VerificationReport:
    """Smoothness and normalization diagnostics at the piece boundary."""

    continuity_gap: float  # |g1 - g2| / g1 at the breakpoint
    derivative_gap: float  # |g1' - g2'| / max(1, |g1'|), central differences
    normalization_defect: float  # |integral of pdf - 1|
    continuity_tol: float = CONTINUITY_TOL
    derivative_tol: float = DERIVATIVE_TOL
    normalization_tol: float = NORMALIZATION_TOL

    @property
    def continuity_ok(self) -> bool:
        return self.continuity_gap <= self.continuity_tol

    @property
    def derivative_ok(self) -> bool:
        return self.derivative_gap <= self.derivative_tol

    @property
    def normalization_ok(self) -> bool:
        return self.normalization_defect <= self.normalization_tol

    @property
    def passed(self) -> bool:
        return self.continuity_ok and self.derivative_ok and self.normalization_ok


def _transformed_piece(d: ExponentiatedComposite, piece: Callable, y: float) -> float:
    eta = d.exponent
    return (
        d.parent.norm_const * float(piece(y**eta)) * eta * y ** (eta - 1.0)
    )


def verify_composite(
    d: ExponentiatedComposite,
    *,
    continuity_tol: float = CONTINUITY_TOL,
    derivative_tol: float = DERIVATIVE_TOL,
    normalization_tol: float = NORMALIZATION_TOL,
) -> VerificationReport:
    """Measure continuity/differentiability gaps at the breakpoint and the
    normalization defect.  Always returns the diagnostics; thresholds only
    classify them."""
    u = d.breakpoint
    g1 = lambda y: _transformed_piece(d, d.parent.head_density, y)
    g2 = lambda y: _transformed_piece(d, d.parent.tail_density, y)
    g1u = g1(u)
    g2u = g2(u)
    denom = g1u if g1u > 0.0 else 1.0
    continuity_gap = abs(g1u - g2u) / denom

    h = DERIVATIVE_STEP_REL * u
    d1 = (g1(u + h) - g1(u - h)) / (2.0 * h)
    d2 = (g2(u + h) - g2(u - h)) / (2.0 * h)
    derivative_gap = abs(d1 - d2) / max(1.0, abs(d1))

    total = adaptive_quadrature(
        lambda y: float(d.pdf(y)), 0.0, math.inf, breakpoints=[u]
    )
    normalization_defect = abs(total.value - 1.0)

    return VerificationReport(
        continuity_gap=continuity_gap,
        derivative_gap=derivative_gap,
        normalization_defect=normalization_defect,
        continuity_tol=continuity_tol,
        derivative_tol=derivative_tol,
        normalization_tol=normalization_tol,
    )


def as_composite_spec(d: ExponentiatedComposite) -> CompositeSpec:
    """Materialize the transformed density as a composite in its own right.

    The transformed head and tail pieces are again proper densities (the
    head on [0, inf), the tail on [breakpoint, inf)), the normalizing
    constant carries over unchanged, and every auxiliary function composes
    with the power map.  This is the closure property that makes repeated
    exponentiation associative.
    """
    parent = d.parent
    eta = d.exponent
    inv = 1.0 / eta

    def promote(piece):
        return lambda y: piece(np.asarray(y) ** eta) * eta * np.asarray(y) ** (
            eta - 1.0
        )

    def promote_cdf(cdf):
        return lambda u: cdf(np.asarray(u) ** eta)

    def promote_partial(partial):
        if partial is None:
            return None
        return lambda u, r: partial(u**eta, r / eta)

    def promote_ppf(ppf):
        if ppf is None:
            return None
        return lambda p: np.asarray(ppf(p)) ** inv

    # Log densities are not carried over: the stored ones take log(x) as
    # argument, and composing that convention through the jacobian buys
    # nothing over the generic log-of-piece fallback in log_pdf.
    return CompositeSpec(
        head_density=promote(parent.head_density),
        tail_density=promote(parent.tail_density),
        breakpoint=parent.breakpoint**inv,
        norm_const=parent.norm_const,
        head_cdf=promote_cdf(parent.head_cdf),
        tail_cdf=promote_cdf(parent.tail_cdf),
        head_partial_moment=promote_partial(parent.head_partial_moment),
        tail_partial_moment=promote_partial(parent.tail_partial_moment),
        head_log_density=None,
        tail_log_density=None,
        head_ppf=promote_ppf(parent.head_ppf),
        tail_ppf=promote_ppf(parent.tail_ppf),
        tail_moment_sup=eta * parent.tail_moment_sup,
        label=f"{parent.label}**(1/{eta:g})",
    )


def exponentiate(parent, eta: float) -> ExponentiatedComposite:
    """Distribution of X**(1/eta).

    Accepts a CompositeSpec or an already exponentiated composite; the
    latter is first materialized back into piece form, so composing two
    exponentiations exercises the closure rather than a shortcut on the
    exponents.
    """
    if not eta > 0.0:
        raise ValueError(f"exponent must be > 0, got {eta}")
    if isinstance(parent, ExponentiatedComposite):
        return ExponentiatedComposite(as_composite_spec(parent), eta)
    return ExponentiatedComposite(parent, eta)


def parent_moment(spec: CompositeSpec, r: float, *, tol: float = QUAD_TOL) -> float:
    """Fractional parent moment E[X^r] by quadrature on the x scale."""
    if not r > 0.0:
        raise ValueError(f"moment order must be > 0, got {r}")
    if r >= spec.tail_moment_sup:
        raise InfiniteMomentError(
            f"parent moment of order {r} diverges (tail exponent "
            f"{spec.tail_moment_sup})"
        )
    c = spec.norm_const
    head = adaptive_quadrature(
        lambda x: x**r * float(spec.head_density(x)), 0.0, spec.breakpoint, tol=tol
    )
    tail = adaptive_quadrature(
        lambda x: x**r * float(spec.tail_density(x)),
        spec.breakpoint,
        math.inf,
        tol=tol,
    )
    return c * (head.value + tail.value)

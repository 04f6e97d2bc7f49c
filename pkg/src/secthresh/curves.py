"""Threshold curves for l1 recovery over Gaussian measurements.

Three curves in the (alpha, beta) = (m/n, k/n) plane are computed:

* ``weak``      — the exact weak-recovery threshold, the root in beta of
                  ``(1-b)*sqrt(2/pi)*exp(-q^2)/a - sqrt(2)*q`` with
                  ``q = erfinv((1-a)/(1-b))``.
* ``sec-lower`` — a lower bound on the sectional threshold, obtained by
                  solving an auxiliary scalar equation for ``theta_hat`` and
                  evaluating a closed-form bound ``alpha(beta)``; the curve is
                  traced parametrically in beta and interpolated onto the
                  requested alpha grid.
* ``sec-upper`` — an upper bound on the sectional threshold: the weak
                  equation with the denominator alpha inflated to
                  ``a - b + b*(1 + xi*sqrt(b/(1-a)))^2``, where ``xi`` is the
                  scaled ground-state energy constant of the
                  Sherrington-Kirkpatrick bilinear form (default 0.7632).

All roots are located by a linear sign-change scan (400 points) followed by
bisection, and every returned root re-checks its own residual.  The scan
refuses to proceed if it sees more than one sign change, so an unexpected
multi-root geometry fails loudly instead of returning garbage.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Sequence

from .errors import ConsistencyError, DomainError, NumericalError
from .special import erfinv

#: Scaled Sherrington-Kirkpatrick ground-state energy constant used by the
#: sectional upper bound.  Exposed so sensitivity to it can be explored.
XI_SK_DEFAULT = 0.7632

SQRT_2 = math.sqrt(2.0)
SQRT_2_PI = math.sqrt(2.0 / math.pi)

_SCAN_POINTS = 400
_BRACKET_MARGIN = 1e-6
_SWEEP_POINTS = 600


class CurveKind(Enum):
    """Which of the three threshold curves a point belongs to."""

    WeakExact = "weak"
    SectionalLower = "sec-lower"
    SectionalUpper = "sec-upper"


@dataclass(frozen=True)
class ThresholdPoint:
    alpha: float
    beta: float
    kind: CurveKind


@dataclass(frozen=True)
class SectionalLowerSolve:
    """Solution of the sectional lower-bound system at one beta."""

    beta: float
    theta_hat: float
    alpha_bound: float
    epsilon: float = 0.0


@dataclass(frozen=True)
class AdjustedDims:
    """Surrogate problem-size ratios used by the sectional upper bound."""

    xi_l: float
    kg_ratio: float
    mg_ratio: float
    ng_ratio: float
    xi_sk: float


@dataclass
class CurveSet:
    points: list[ThresholdPoint] = field(default_factory=list)

    def by_kind(self, kind: CurveKind) -> list[ThresholdPoint]:
        return [p for p in self.points if p.kind is kind]


def _check_open_region(alpha: float, beta: float) -> None:
    if not (0.0 < beta < alpha < 1.0):
        raise DomainError(f"need 0 < beta < alpha < 1, got alpha={alpha!r} beta={beta!r}")


def weak_residual(alpha: float, beta: float) -> float:
    """Residual of the weak-threshold equation at (alpha, beta).

    Positive residual means beta is below the weak threshold at this alpha;
    the threshold itself is the root in beta.
    """
    _check_open_region(alpha, beta)
    q = erfinv((1.0 - alpha) / (1.0 - beta))
    return (1.0 - beta) * SQRT_2_PI * math.exp(-q * q) / alpha - SQRT_2 * q


def mg_ratio_closed_form(alpha: float, beta: float, xi_sk: float) -> float:
    """Inflated denominator of the sectional upper bound (closed form)."""
    return alpha - beta + beta * (1.0 + xi_sk * math.sqrt(beta / (1.0 - alpha))) ** 2


def sec_upper_residual(alpha: float, beta: float, xi_sk: float = XI_SK_DEFAULT) -> float:
    """Weak residual with alpha replaced by the inflated denominator."""
    _check_open_region(alpha, beta)
    if xi_sk < 0.0:
        raise DomainError(f"xi_sk must be >= 0, got {xi_sk!r}")
    q = erfinv((1.0 - alpha) / (1.0 - beta))
    denom = mg_ratio_closed_form(alpha, beta, xi_sk)
    return (1.0 - beta) * SQRT_2_PI * math.exp(-q * q) / denom - SQRT_2 * q


def adjusted_dims(alpha: float, beta: float, xi_sk: float = XI_SK_DEFAULT) -> AdjustedDims:
    """Map (alpha, beta) to the surrogate dimension ratios.

    ``xi_l = beta * (sqrt((1-alpha)/beta) + xi_sk)`` is the scaled mixed-term
    bound; the surrogate sparsity ratio is ``kg = xi_l^2 / (1-alpha)`` and the
    measurement/ambient ratios shift by the same amount:
    ``mg = alpha - beta + kg``, ``ng = 1 - beta + kg``.
    """
    _check_open_region(alpha, beta)
    if xi_sk < 0.0:
        raise DomainError(f"xi_sk must be >= 0, got {xi_sk!r}")
    xi_l = beta * (math.sqrt((1.0 - alpha) / beta) + xi_sk)
    kg = xi_l * xi_l / (1.0 - alpha)
    return AdjustedDims(
        xi_l=xi_l,
        kg_ratio=kg,
        mg_ratio=alpha - beta + kg,
        ng_ratio=1.0 - beta + kg,
        xi_sk=xi_sk,
    )


def _sec_lower_theta_residual(theta: float, beta: float) -> float:
    q = erfinv((1.0 - theta) / (1.0 - beta))
    return ((1.0 - beta) * SQRT_2_PI * math.exp(-q * q) - SQRT_2_PI * beta) / theta - SQRT_2 * q


def _sec_lower_alpha_bound(theta: float, beta: float) -> float:
    q = erfinv((1.0 - theta) / (1.0 - beta))
    sqrt_2pi = math.sqrt(2.0 * math.pi)
    first = (1.0 - beta) / sqrt_2pi * (
        sqrt_2pi
        + 2.0 * math.sqrt(2.0 * q * q) * math.exp(-q * q)
        - sqrt_2pi * (1.0 - theta) / (1.0 - beta)
    )
    second = ((1.0 - beta) * SQRT_2_PI * math.exp(-q * q) - SQRT_2_PI * beta) ** 2 / theta
    return first + beta - second


def _scan_bracket(f: Callable[[float], float], lo: float, hi: float,
                  points: int = _SCAN_POINTS) -> tuple[float, float, float, float]:
    """Locate exactly one sign change of f on [lo, hi] by a linear scan."""
    xs = [lo + (hi - lo) * i / (points - 1) for i in range(points)]
    vals = [f(x) for x in xs]
    brackets = []
    for i in range(points - 1):
        if vals[i] == 0.0:
            brackets.append((xs[i], xs[i], vals[i], vals[i]))
        elif vals[i] * vals[i + 1] < 0.0:
            brackets.append((xs[i], xs[i + 1], vals[i], vals[i + 1]))
    if vals[-1] == 0.0:
        brackets.append((xs[-1], xs[-1], vals[-1], vals[-1]))
    if not brackets:
        raise NumericalError(
            f"no sign change on [{lo:.6g}, {hi:.6g}] over {points} scan points"
        )
    if len(brackets) > 1:
        raise NumericalError(
            f"{len(brackets)} sign changes on [{lo:.6g}, {hi:.6g}]; refusing to pick one"
        )
    return brackets[0]


def _bisect(f: Callable[[float], float], lo: float, hi: float,
            flo: float, fhi: float, width_tol: float, resid_tol: float) -> float:
    """Bisection to bracket width <= width_tol, then residual certification."""
    if lo == hi:
        return lo
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if flo * fm < 0.0:
            hi, fhi = mid, fm
        else:
            lo, flo = mid, fm
        if hi - lo <= width_tol and min(abs(flo), abs(fhi)) <= resid_tol:
            break
    root = lo if abs(flo) <= abs(fhi) else hi
    if abs(f(root)) > resid_tol:
        raise NumericalError(
            f"root residual {f(root):.3e} exceeds certification tolerance {resid_tol:.1e}"
        )
    return root


def _beta_root(residual: Callable[[float], float], alpha: float, tol: float) -> float:
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")
    if tol <= 0.0:
        raise DomainError(f"tol must be positive, got {tol!r}")
    lo, hi = 1e-6, alpha - _BRACKET_MARGIN
    if hi <= lo:
        raise DomainError(f"alpha={alpha!r} leaves no beta bracket")
    a, b, fa, fb = _scan_bracket(residual, lo, hi)
    return _bisect(residual, a, b, fa, fb, width_tol=tol, resid_tol=1e-9)


def weak_beta(alpha: float, tol: float = 1e-10) -> float:
    """Root in beta of the weak-threshold equation at the given alpha."""
    return _beta_root(lambda b: weak_residual(alpha, b), alpha, tol)


def sec_upper_beta(alpha: float, xi_sk: float = XI_SK_DEFAULT, tol: float = 1e-10) -> float:
    """Root in beta of the sectional upper-bound equation at the given alpha."""
    return _beta_root(lambda b: sec_upper_residual(alpha, b, xi_sk), alpha, tol)


def sec_lower_solve(beta: float, tol: float = 1e-10) -> SectionalLowerSolve:
    """Solve the sectional lower-bound system at one beta.

    Solves the auxiliary equation for ``theta_hat`` on
    ``[beta + 1e-9, 1 - 1e-9]`` (scan + bisection), then evaluates the
    closed-form bound ``alpha_bound``.  The pair traces the lower-bound curve
    parametrically: beta is the ordinate, alpha_bound the abscissa.
    """
    if not (0.0 < beta < 0.5):
        # At beta >= 1/2 the theta equation's numerator is negative for every
        # theta in (beta, 1), so the system has no solution at all.
        raise DomainError(f"beta must lie in (0, 0.5), got {beta!r}")
    if tol <= 0.0:
        raise DomainError(f"tol must be positive, got {tol!r}")
    f = lambda t: _sec_lower_theta_residual(t, beta)
    a, b, fa, fb = _scan_bracket(f, beta + 1e-9, 1.0 - 1e-9)
    theta = _bisect(f, a, b, fa, fb, width_tol=tol, resid_tol=1e-10)
    if not (beta <= theta <= 1.0):
        raise ConsistencyError(f"theta_hat={theta!r} escaped [beta, 1]")
    alpha_bound = _sec_lower_alpha_bound(theta, beta)
    if not (beta < alpha_bound < 1.0):
        raise ConsistencyError(
            f"alpha_bound={alpha_bound!r} outside (beta, 1) at beta={beta!r}"
        )
    return SectionalLowerSolve(beta=beta, theta_hat=theta, alpha_bound=alpha_bound)


def _sec_lower_sweep() -> tuple[list[float], list[float]]:
    """Trace the lower-bound curve parametrically: beta grid -> alpha grid."""
    alphas: list[float] = []
    betas: list[float] = []
    for i in range(_SWEEP_POINTS):
        beta = 1e-4 + (0.4999 - 1e-4) * i / (_SWEEP_POINTS - 1)
        try:
            solve = sec_lower_solve(beta)
        except NumericalError:
            continue
        alphas.append(solve.alpha_bound)
        betas.append(beta)
    if len(alphas) < 2:
        raise NumericalError("sectional lower-bound sweep produced < 2 points")
    if any(a2 <= a1 for a1, a2 in zip(alphas, alphas[1:])):
        raise ConsistencyError("sectional lower-bound sweep is not monotone in alpha")
    return alphas, betas


def _interp(x: float, xs: Sequence[float], ys: Sequence[float]) -> float:
    """Linear interpolation with strictly increasing xs; refuses extrapolation."""
    if not (xs[0] <= x <= xs[-1]):
        raise NumericalError(f"alpha={x!r} outside the swept range [{xs[0]:.4g}, {xs[-1]:.4g}]")
    j = bisect.bisect_left(xs, x)
    if j == 0:
        return ys[0]
    if xs[j - 1] == x:
        return ys[j - 1]
    t = (x - xs[j - 1]) / (xs[j] - xs[j - 1])
    return ys[j - 1] + t * (ys[j] - ys[j - 1])


def emit_curves(alphas: Iterable[float], xi_sk: float = XI_SK_DEFAULT,
                tol: float = 1e-10) -> CurveSet:
    """Sample all three curves on an alpha grid.

    Weak and sectional-upper points come from direct root solves at each
    alpha; sectional-lower points come from the parametric beta sweep
    interpolated onto the grid.  Emitted points are checked against the
    ordering invariant sec-lower <= sec-upper <= weak.
    """
    grid = [float(a) for a in alphas]
    for a in grid:
        if not (0.02 < a < 0.98):
            raise DomainError(f"grid alpha {a!r} outside supported range (0.02, 0.98)")
    out = CurveSet()
    if not grid:
        return out
    sweep_alpha, sweep_beta = _sec_lower_sweep()
    for a in grid:
        try:
            bw = weak_beta(a, tol)
            bu = sec_upper_beta(a, xi_sk, tol)
            bl = _interp(a, sweep_alpha, sweep_beta)
        except NumericalError as exc:
            raise NumericalError(f"curve solve failed at alpha={a!r}: {exc}") from exc
        if not (bl <= bu + 1e-12 and bu <= bw + 1e-12):
            raise ConsistencyError(
                f"ordering violated at alpha={a!r}: sec-lower={bl!r} sec-upper={bu!r} weak={bw!r}"
            )
        for beta, kind in ((bw, CurveKind.WeakExact),
                           (bl, CurveKind.SectionalLower),
                           (bu, CurveKind.SectionalUpper)):
            if not (0.0 < beta < a < 1.0):
                raise ConsistencyError(
                    f"emitted point out of range: alpha={a!r} beta={beta!r} kind={kind}"
                )
            out.points.append(ThresholdPoint(alpha=a, beta=beta, kind=kind))
    return out

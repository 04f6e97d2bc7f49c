"""Sectional-failure functional: exact dual solves, bit-flip search, certificates.

Terminology: coordinates 1..n-k are the *head* (off the designated support
block), coordinates n-k+1..n are the *tail* (the block).  l1 recovery fails
sectionally iff some null-space vector w carries more l1 mass on the tail
than on the head; the search looks for such a w one sign pattern at a time.

For a fixed tail sign pattern b the inner problem is the distance from the
box slice {|z_i| <= 1 head, z_i = -b_i tail} to the row space of A:

    distance(b) = min ||Dperp z||_2  over the slice,

a box-constrained least-squares problem solved here by projected gradient
steps with Nesterov momentum and adaptive restart (plain step 1/2 on the
squared objective; the momentum changes the path, not the fixed point).
A positive distance yields, through the KKT conditions, a null-space vector
w = -Q z* whose tail l1 beats its head l1 by at least distance^2 — an
arithmetically checkable failure certificate.

The outer search climbs distance(b) by cyclic single-bit flips.  Below the
positivity threshold the distance is identically zero across wide regions of
{-1,+1}^k and carries no search signal, so ties are broken by a *tail margin*:
the squared norm of the minimum-head-energy row-space point with tail pinned
at -b.  That margin is the quadratic form b^T G b of a Gram matrix built once
per instance, so each tentative flip costs O(k) to score.  Patterns with
larger margin force row-space vectors to carry more head energy, which is
exactly what drives the slice off the row space and the distance positive.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

import numpy as np

from .errors import CertificateError, DomainError, UsageError
from .instances import GaussianInstance, NullProjector, null_projector

__all__ = [
    "SolveOptions", "DualSolve", "Certificate", "ConstructionReport",
    "Verdict", "TauOutcome", "as_sign_pattern", "dual_distance",
    "primal_tau_reference", "extract_certificate",
    "verify_theorem2_construction", "bit_flip_search", "estimate_failure",
]


@dataclass(frozen=True)
class SolveOptions:
    """Knobs shared by the inner solver and the outer search."""

    fixed_point_tol: float = 1e-9
    max_iterations: int = 50_000
    accept_tol: float = 1e-9
    positivity_coeff: float = 1e-6   # threshold = coeff * sqrt(n)
    max_passes: int = 64
    check_every: int = 10
    primal_iterations: int = 50_000
    primal_step: float = 0.1
    primal_size_cap: int = 60

    def positivity_threshold(self, n: int) -> float:
        return self.positivity_coeff * np.sqrt(n)


DEFAULT_OPTIONS = SolveOptions()


@dataclass(frozen=True)
class DualSolve:
    """Result of one box-slice-to-row-space distance computation."""

    b: np.ndarray
    z_star: np.ndarray
    distance: float
    iterations: int
    converged: bool


@dataclass(frozen=True)
class Certificate:
    """Null-space vector whose tail l1 mass exceeds its head l1 mass."""

    w: np.ndarray
    head_l1: float
    tail_l1: float
    gap: float
    nullspace_residual: float


@dataclass(frozen=True)
class ConstructionReport:
    """Arithmetic check of the sparse-vector construction from a certificate."""

    passed: bool
    l1_original: float
    l1_competitor: float
    head_l1: float
    tail_l1: float
    measurement_residual: float


class Verdict(Enum):
    CertifiedFailure = "CertifiedFailure"
    NotCertified = "NotCertified"


@dataclass(frozen=True)
class TauOutcome:
    verdict: Verdict
    best_b: np.ndarray
    best_distance: float
    certificate: Optional[Certificate]
    flips_evaluated: int
    seconds: float = 0.0
    diagnostic: str = ""

    def __post_init__(self):
        if (self.verdict is Verdict.CertifiedFailure) != (self.certificate is not None):
            raise DomainError("verdict and certificate presence must agree")


def as_sign_pattern(b, k: int) -> np.ndarray:
    """Validate and canonicalize a +-1 pattern of length k."""
    arr = np.asarray(b, dtype=float).ravel()
    if arr.shape != (k,):
        raise DomainError(f"sign pattern must have length {k}, got shape {arr.shape}")
    if k and not np.all(np.abs(arr) == 1.0):
        raise DomainError("sign pattern entries must be exactly +-1")
    return arr


def _box_lsq(M: np.ndarray, c: np.ndarray, x0: np.ndarray,
             tol: float, max_iter: int, check_every: int) -> tuple[np.ndarray, int, bool]:
    """min ||M x - c||^2 over the unit box, by accelerated projected gradient.

    The gradient step is the plain step-1/2 projected-gradient update (the
    operator norm of M is at most 1 because its rows sit in an orthonormal
    basis); Nesterov momentum with gradient-based restart accelerates the
    linear tail.  Convergence is declared when the *unaccelerated* projected
    step from the current iterate moves no coordinate by more than tol, so
    the returned point satisfies the same fixed-point criterion the plain
    method would.
    """
    x = x0.copy()
    y = x.copy()
    t_mom = 1.0
    it = 0
    for it in range(1, max_iter + 1):
        g = M.T @ (M @ y - c)
        xn = np.clip(y - g, -1.0, 1.0)
        if np.dot(g, xn - x) > 0.0:
            t_mom, y = 1.0, xn
        else:
            t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t_mom * t_mom))
            y = xn + ((t_mom - 1.0) / t_next) * (xn - x)
            t_mom = t_next
        x = xn
        if it % check_every == 0 or it == max_iter:
            gx = M.T @ (M @ x - c)
            if np.max(np.abs(np.clip(x - gx, -1.0, 1.0) - x), initial=0.0) <= tol:
                return x, it, True
    return x, it, False


def dual_distance(P: NullProjector, k: int, b, opts: SolveOptions = DEFAULT_OPTIONS,
                  x0: Optional[np.ndarray] = None) -> DualSolve:
    """Distance from the box slice for pattern b to the row space of A.

    Parameters
    ----------
    P : NullProjector
        Factorization of the instance.
    k : int
        Tail block length, 0 <= k < n.
    b : array-like
        Sign pattern of length k (entries +-1).
    opts : SolveOptions
        Solver tolerances.
    x0 : ndarray, optional
        Warm start for the head block (defaults to zeros).

    Returns
    -------
    DualSolve
        With z_star feasible (head clipped to the box, tail pinned at -b) and
        distance recomputed as ||Dperp z_star|| at return.
    """
    n = P.shape.n
    if not (0 <= k < n):
        raise DomainError(f"need 0 <= k < n={n}, got k={k}")
    b = as_sign_pattern(b, k)
    Dperp = P.Dperp
    M = Dperp[:, :n - k]
    c = Dperp[:, n - k:] @ b if k else np.zeros(Dperp.shape[0])
    start = np.zeros(n - k) if x0 is None else np.clip(np.asarray(x0, dtype=float), -1.0, 1.0)
    x, iterations, converged = _box_lsq(
        M, c, start, opts.fixed_point_tol, opts.max_iterations, opts.check_every
    )
    z = np.concatenate([x, -b])
    distance = float(np.linalg.norm(Dperp @ z))
    return DualSolve(b=b, z_star=z, distance=distance,
                     iterations=iterations, converged=converged)


def primal_tau_reference(P: NullProjector, k: int, b,
                         opts: SolveOptions = DEFAULT_OPTIONS) -> float:
    """Direct minimization of head-l1 minus signed tail sum over the null ball.

    Cross-check oracle for small instances only: a projected subgradient
    descent over u (w = Dperp^T u, ||u|| <= 1) with diminishing steps.  The
    value is always <= 0 (u = 0 is feasible) and should match -distance(b)
    to about 1e-3 absolute.
    """
    n = P.shape.n
    if n > opts.primal_size_cap:
        raise UsageError(
            f"primal reference capped at n <= {opts.primal_size_cap}, got n={n}"
        )
    if not (0 <= k < n):
        raise DomainError(f"need 0 <= k < n={n}, got k={k}")
    b = as_sign_pattern(b, k)
    Dperp = P.Dperp
    nk = n - k
    u = np.zeros(Dperp.shape[0])
    best = 0.0
    sub = np.empty(n)
    for t in range(1, opts.primal_iterations + 1):
        w = Dperp.T @ u
        value = float(np.sum(np.abs(w[:nk])) - np.dot(b, w[nk:]))
        if value < best:
            best = value
        sub[:nk] = np.sign(w[:nk])
        sub[nk:] = -b
        u -= (opts.primal_step / np.sqrt(t)) * (Dperp @ sub)
        norm = np.linalg.norm(u)
        if norm > 1.0:
            u /= norm
    return best


def extract_certificate(P: NullProjector, k: int, solve: DualSolve,
                        opts: SolveOptions = DEFAULT_OPTIONS) -> Certificate:
    """Turn a converged positive-distance solve into a verified certificate.

    The candidate is w = -Q z*; at the optimum the supporting-hyperplane
    identity forces tail_l1(w) - head_l1(w) >= distance^2 up to solver slack.
    The gap and the null-space residual are re-measured arithmetically here,
    and a candidate failing either check raises instead of being returned.
    """
    n = P.shape.n
    threshold = opts.positivity_threshold(n)
    if not solve.converged:
        raise UsageError("certificate extraction requires a converged solve")
    if solve.distance <= threshold:
        raise UsageError(
            f"distance {solve.distance:.3e} not above positivity threshold {threshold:.3e}"
        )
    w = -P.apply_q(solve.z_star)
    head_l1 = float(np.sum(np.abs(w[:n - k])))
    tail_l1 = float(np.sum(np.abs(w[n - k:])))
    gap = tail_l1 - head_l1
    norm_a = float(np.linalg.norm(P.A))
    residual = float(np.linalg.norm(P.A @ w)) / norm_a if norm_a else 0.0
    if gap <= 0.0:
        raise CertificateError(
            f"candidate gap {gap:.3e} is not positive (distance {solve.distance:.3e})",
            gap=gap,
        )
    if residual > 1e-8:
        raise CertificateError(
            f"null-space residual {residual:.3e} exceeds 1e-8", gap=gap
        )
    return Certificate(w=w, head_l1=head_l1, tail_l1=tail_l1, gap=gap,
                       nullspace_residual=residual)


def verify_theorem2_construction(A: np.ndarray, k: int,
                                 cert: Certificate) -> ConstructionReport:
    """Check the explicit sparse vector built from a certificate.

    Builds x supported on the tail with x_j = -w_j there; then x + w agrees
    with w on the head and vanishes on the tail, so the construction fails l1
    recovery iff ||x + w||_1 < ||x||_1 and both vectors measure identically.
    The report carries all the measured numbers; nothing raises.
    """
    A = np.asarray(A, dtype=float)
    w = cert.w
    n = w.shape[0]
    x = np.zeros(n)
    x[n - k:] = -w[n - k:]
    l1_original = float(np.sum(np.abs(x)))
    l1_competitor = float(np.sum(np.abs(x + w)))
    norm_a = float(np.linalg.norm(A))
    norm_w = float(np.linalg.norm(w))
    meas = float(np.linalg.norm(A @ (x + w) - A @ x))
    passed = (l1_competitor < l1_original
              and meas <= 1e-8 * norm_a * max(norm_w, 1e-300))
    return ConstructionReport(
        passed=passed,
        l1_original=l1_original,
        l1_competitor=l1_competitor,
        head_l1=cert.head_l1,
        tail_l1=cert.tail_l1,
        measurement_residual=meas,
    )


def _tail_margin_gram(P: NullProjector, k: int) -> Optional[np.ndarray]:
    """Gram matrix G with b^T G b = squared tail margin of pattern b.

    The margin is min ||z_head||_2 over row-space points z with z_tail = -b.
    Writing row-space points as z = D c (D = orthonormal row-space basis),
    the tail constraint picks c from an affine family and the minimum head
    energy becomes ||T b||^2 for a precomputable matrix T.  Returns None when
    the tail rows of D are rank deficient (k > m, say); callers then fall
    back to a signal-less search.
    """
    n, m = P.shape.n, P.shape.m
    D = P.rowspace.T                      # n x m, orthonormal columns
    Dh, Dt = D[:n - k], D[n - k:]         # (n-k) x m, k x m
    u, s, vt = np.linalg.svd(Dt, full_matrices=True)
    if s.shape[0] < k or s[-1] <= 1e-10:
        return None
    pinv_dt = (vt[:k].T / s) @ u.T        # m x k
    r_map = -Dh @ pinv_dt                 # (n-k) x k
    z_basis = vt[k:].T                    # m x (m-k): null basis of Dt
    if z_basis.shape[1]:
        q, _ = np.linalg.qr(Dh @ z_basis)
        t_map = r_map - q @ (q.T @ r_map)
    else:
        t_map = r_map
    return t_map.T @ t_map


def bit_flip_search(P: NullProjector, k: int,
                    opts: SolveOptions = DEFAULT_OPTIONS) -> TauOutcome:
    """Cyclic single-bit local search for a certifiably failing sign pattern.

    Starts from the all-ones pattern and walks the lexicographic objective
    (distance quantized at the positivity threshold, then the tail margin):
    a tentative flip is kept iff the quantized distance strictly increases by
    the accept tolerance, or ties while the margin strictly increases.  Every
    converged evaluation above the threshold attempts certificate extraction;
    the first verified certificate ends the search.  The search gives up
    after a full cycle of k consecutive non-improving flips, or after
    max_passes * k tentative evaluations.
    """
    if k < 1:
        raise UsageError(f"bit-flip search needs k >= 1, got k={k}")
    n = P.shape.n
    if k >= n:
        raise DomainError(f"need k < n={n}, got k={k}")
    started = time.perf_counter()
    threshold = opts.positivity_threshold(n)
    unconverged = 0

    def finish(verdict, b, distance, cert, flips):
        note = f"unconverged-solves={unconverged}" if unconverged else ""
        return TauOutcome(
            verdict=verdict, best_b=b.copy(), best_distance=distance,
            certificate=cert, flips_evaluated=flips,
            seconds=time.perf_counter() - started, diagnostic=note,
        )

    def try_certify(solve):
        if not (solve.converged and solve.distance > threshold):
            return None
        try:
            return extract_certificate(P, k, solve, opts)
        except CertificateError:
            return None

    gram = _tail_margin_gram(P, k)
    b = np.ones(k)
    if gram is not None:
        gram_b = gram @ b
        margin = float(b @ gram_b)
    else:
        gram_b = np.zeros(k)
        margin = 0.0

    solve = dual_distance(P, k, b, opts)
    if not solve.converged:
        unconverged += 1
    cert = try_certify(solve)
    if cert is not None:
        return finish(Verdict.CertifiedFailure, b, solve.distance, cert, 0)

    head = solve.z_star[:n - k]
    incumbent = solve.distance
    quantized = incumbent if incumbent > threshold else 0.0
    flips = 0
    rejects = 0
    cap = opts.max_passes * k
    while rejects < k and flips < cap:
        i = flips % k
        flips += 1
        margin_delta = float(-4.0 * b[i] * gram_b[i] + 4.0 * gram[i, i]) if gram is not None else 0.0
        b[i] = -b[i]
        cand = dual_distance(P, k, b, opts, x0=head)
        if not cand.converged:
            unconverged += 1
        cand_q = cand.distance if cand.distance > threshold else 0.0
        cert = try_certify(cand)
        if cert is not None:
            return finish(Verdict.CertifiedFailure, b, cand.distance, cert, flips)
        margin_cand = margin + margin_delta
        improves = (cand_q > quantized + opts.accept_tol
                    or (cand_q == quantized
                        and margin_cand > margin + 1e-12 * max(1.0, abs(margin))))
        if improves:
            if gram is not None:
                gram_b = gram_b + 2.0 * b[i] * gram[:, i]
            margin = margin_cand
            incumbent = cand.distance
            quantized = cand_q
            head = cand.z_star[:n - k]
            rejects = 0
        else:
            b[i] = -b[i]
            rejects += 1
    return finish(Verdict.NotCertified, b, incumbent, None, flips)


def estimate_failure(instance: GaussianInstance, k: int,
                     opts: SolveOptions = DEFAULT_OPTIONS) -> TauOutcome:
    """Full pipeline for one instance: factor, search, verify, time.

    k = 0 short-circuits to NotCertified (no sign pattern exists, and the
    functional is identically nonnegative there).
    """
    started = time.perf_counter()
    if k == 0:
        return TauOutcome(
            verdict=Verdict.NotCertified, best_b=np.zeros(0), best_distance=0.0,
            certificate=None, flips_evaluated=0,
            seconds=time.perf_counter() - started,
        )
    if instance.shape.k != k:
        instance = replace(instance, shape=replace(instance.shape, k=k))
    P = null_projector(instance)
    outcome = bit_flip_search(P, k, opts)
    if outcome.verdict is Verdict.CertifiedFailure:
        report = verify_theorem2_construction(instance.A, k, outcome.certificate)
        if not report.passed:
            raise CertificateError(
                "certified outcome failed the construction check",
                gap=outcome.certificate.gap,
            )
    return replace(outcome, seconds=time.perf_counter() - started)

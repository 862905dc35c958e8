"""Continued fractions, finite-degree measures, spectral masses, eigenvectors.

The two Jacobi-type continued fractions attached to a monic recurrence are
evaluated through their polynomial ratio representations

    E(x) = P^(1)_{n-1}(x) / P_n(x),          F(x) = -P_n(x) / P^(1)_{n-1}(x),

truncated at depth n, where P^(1) is the first associated OPS (coefficients
shifted by one).  E is the finite-depth Stieltjes transform: its poles sit at
the zeros of P_n, which flow to the spectrum, and its partial fraction
expansion has positive weights summing to one.  F vanishes exactly where E
has poles, and E*F = -lambda_0 = -1 identically at matched depth.

Evaluating the ratios over the rescaled, overflow-proof polynomial streams
(rather than by forward Lentz-style iteration) inherits the unlimited dynamic
range of the recurrence kernels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


import numpy as np

from .errors import Divergent, NotMinimal, PoleHit
from .flows import zeros_of
from .recurrence import (
    MonicRecurrence,
    RawRecurrence,
    _RESCALE_EXP,
    _RESCALE_LIMIT,
    _ratio,
    _terminal_values,
    _value_and_derivative,
)
from .scaled import ScaledReal

__all__ = [
    "DiscreteMeasure",
    "SpectralMass",
    "EigenvectorResult",
    "eval_F",
    "eval_E",
    "partial_fractions",
    "spectral_mass",
    "reconstruct_eigenvector",
]

_EPS = float(np.finfo(float).eps)


@dataclass(frozen=True)
class DiscreteMeasure:
    """Step-function measure of degree n: jumps M_{n,k} > 0 at the zeros
    x_{n,k} of P_n, with sum(M) = 1 up to 64*eps*n."""

    nodes: np.ndarray
    weights: np.ndarray
    degree: int

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        if nodes.shape != weights.shape or nodes.ndim != 1:
            raise ValueError("nodes and weights must be equal-length vectors")
        if nodes.size > 1 and not np.all(np.diff(nodes) > 0):
            raise ValueError("nodes must be strictly increasing")
        if not np.all(weights > 0.0):
            raise ValueError("all weights must be strictly positive")
        defect = abs(float(np.sum(weights)) - 1.0)
        if defect > 64.0 * _EPS * max(self.degree, 1):
            raise ValueError(f"weights sum to 1 {defect:.3e} off, beyond tolerance")

    def stieltjes(self, z: float) -> float:
        """sum_k M_k / (z - x_k), the partial fraction form of E at this degree."""
        return float(np.sum(self.weights / (z - self.nodes)))

    def moment(self, j: int) -> float:
        """j-th moment sum_k M_k x_k**j."""
        return float(np.sum(self.weights * self.nodes ** j))


@dataclass(frozen=True)
class SpectralMass:
    """Jump of the limiting measure at a spectral point xi:
    mass = 1 / sum_l P_l(xi)^2 / n_l, with n_l = lambda_1 ... lambda_l.

    tail_estimate bounds the truncated remainder of the (un-inverted) sum;
    the relative error of mass is about mass * tail_estimate.
    """

    xi: float
    mass: float
    tail_estimate: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.mass < 1.0):
            raise ValueError(f"mass must lie in (0, 1), got {self.mass!r}")


@dataclass(frozen=True)
class EigenvectorResult:
    """Minimal-solution expansion coefficients at a spectral point,
    normalized to phi_0 = 1, with the Bargmann-norm diagnostics."""

    phi: np.ndarray
    bargmann_partial_sums: np.ndarray
    bargmann_saturated: bool
    two_term_residual: float


def _associated_arrays(c: np.ndarray, lam: np.ndarray):
    """Coefficient slices generating P^(1)_{n-1} from the same materialization."""
    return c[1:], lam[1:]


def _E_parts(rec: MonicRecurrence, xs: np.ndarray, depth: int):
    """(num, num_exp, den, den_exp) with E = num/den = P^(1)_{depth-1}/P_depth."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    xs = np.asarray(xs, dtype=float)
    c, lam = rec.coeff_arrays(depth)
    den, _, den_exp = _terminal_values(c, lam, xs)
    if depth == 1:
        num = np.ones_like(xs)
        num_exp = np.zeros(xs.shape, dtype=np.int64)
    else:
        ca, lama = _associated_arrays(c, lam)
        num, _, num_exp = _terminal_values(ca, lama, xs)
    return num, num_exp, den, den_exp


def eval_E(rec: MonicRecurrence, x: float, depth: int) -> float:
    """Depth-truncated Stieltjes fraction E(x) = P^(1)_{depth-1}(x)/P_depth(x).

    E has its poles at the zeros of P_depth, i.e. at the finite-degree
    spectrum approximants; depth 1 gives 1/(x - c_0).
    """
    num, num_exp, den, den_exp = _E_parts(rec, np.array([float(x)]), depth)
    if den[0] == 0.0:
        raise PoleHit(f"E({x!r}) hit a zero of P_{depth} exactly")
    return float(_ratio(num, num_exp, den, den_exp)[0])


def eval_F(rec: MonicRecurrence, x: float, depth: int) -> float:
    """Depth-truncated quantization function F(x) = -P_depth(x)/P^(1)_{depth-1}(x).

    Backward evaluation of the depth-term continued fraction
    (c_0 - x) + lambda_1/(x - c_1 - lambda_2/(...)) in ratio form; its zeros
    are the zeros of P_depth and E*F = -lambda_0 = -1 at matched depth.
    """
    num, num_exp, den, den_exp = _E_parts(rec, np.array([float(x)]), depth)
    if num[0] == 0.0:
        raise PoleHit(f"F({x!r}) hit a zero of P^(1)_{depth - 1} exactly")
    return float(-_ratio(den, den_exp, num, num_exp)[0])


def _eval_F_many(rec: MonicRecurrence, xs: np.ndarray, depth: int) -> np.ndarray:
    """Vectorized F on a grid; poles come out as +-inf rather than raising."""
    num, num_exp, den, den_exp = _E_parts(rec, xs, depth)
    return -_ratio(den, den_exp, num, num_exp)


def partial_fractions(rec: MonicRecurrence, n: int) -> DiscreteMeasure:
    """Finite-degree measure: nodes are the zeros of P_n with the residue
    weights of E at depth n, computed through the Christoffel identity

        M_{n,k} = [ sum_{l=0}^{n-1} P_l(x_{n,k})^2 / n_l ]^{-1}.

    The textbook residue form P^(1)_{n-1}(x_k)/P_n'(x_k) is algebraically the
    same number but numerically treacherous here: zeros of the associated OPS
    coagulate with the nodes (the same phenomenon that blinds the continued
    fraction), leaving the numerator inside its own rounding noise at
    converged nodes.  The sum of squares has no cancellation, so positivity
    survives at every node whose weight is representable at all; a weight
    below the double underflow threshold raises instead of flushing to zero.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    nodes = zeros_of(rec, n, n).zeros
    if n == 1:
        return DiscreteMeasure(nodes=nodes, weights=np.array([1.0]), degree=1)
    c, lam = rec.coeff_arrays(n)
    inv_m, inv_e = _christoffel_sums(c, lam, nodes)

    # Once a zero flow has converged to within bisection resolution of its
    # limit, the Christoffel polynomial varies by orders of magnitude across
    # one node-location ulp and the finite-degree weight is no longer encoded
    # in double precision at all.  Detect that by re-evaluating the sums a few
    # node tolerances away: in the stable regime they barely move.
    h = 8.0 * 2.0**-50 * np.maximum(1.0, np.abs(nodes))
    probe_m, probe_e = _christoffel_sums(c, lam, nodes + h)
    with np.errstate(divide="ignore", over="ignore"):
        drift = np.abs(np.log2(probe_m / inv_m) + (probe_e - inv_e))
    if np.any(drift > 0.07):  # log2(1.05)
        k = int(np.argmax(drift))
        raise ValueError(
            f"degree {n} is past the coagulation horizon (node {k + 1} weight varies "
            f"2**{float(drift[k]):.1f}-fold across one node ulp); the finite-degree "
            "measure is not resolvable in double precision here, reduce the degree"
        )

    with np.errstate(under="ignore"):
        weights = np.ldexp(1.0 / inv_m, _clip_exp(-inv_e))
    dead = np.flatnonzero(weights == 0.0)
    if dead.size:
        k = int(dead[0])
        mag = -(float(inv_e[k]) + math.log2(inv_m[k]))
        raise ValueError(
            f"weight M_{{{n},{k + 1}}} ~ 2**{mag:.0f} underflows double precision; "
            "reduce the degree or use a more strongly coupled model"
        )
    return DiscreteMeasure(nodes=nodes, weights=weights, degree=n)


def _clip_exp(e: np.ndarray) -> np.ndarray:
    # np.ldexp saturates anyway; keep exponents inside a safe integer window
    return np.clip(e, -(1 << 20), 1 << 20).astype(np.int64)


def _christoffel_sums(c: np.ndarray, lam: np.ndarray, xs: np.ndarray):
    """S(x) = sum_{l=0}^{n-1} P_l(x)^2 / n_l as (mantissa, exp2) pairs,
    n = len(c), n_l = lambda_1 ... lambda_l.  All terms are nonnegative, so
    the accumulation is cancellation-free at any dynamic range."""
    n = c.shape[0]
    xs = np.asarray(xs, dtype=float)
    acc_m = np.ones_like(xs)  # l = 0 term: P_0^2 / n_0 = 1
    acc_e = np.zeros(xs.shape, dtype=np.int64)
    p_prev = np.ones_like(xs)
    p_cur = xs - c[0]
    off = np.zeros(xs.shape, dtype=np.int64)
    norm_m, norm_e = 1.0, 0
    for l in range(1, n):
        if l >= 2:
            p_next = (xs - c[l - 1]) * p_cur - lam[l - 1] * p_prev
            m = np.maximum(np.abs(p_next), np.abs(p_cur))
            big = m > _RESCALE_LIMIT
            if big.any():
                p_next = np.where(big, p_next * 2.0**-_RESCALE_EXP, p_next)
                p_cur = np.where(big, p_cur * 2.0**-_RESCALE_EXP, p_cur)
                off += big * _RESCALE_EXP
            small = (m < 2.0**-_RESCALE_EXP) & (m > 0.0)
            if small.any():
                p_next = np.where(small, p_next * 2.0**_RESCALE_EXP, p_next)
                p_cur = np.where(small, p_cur * 2.0**_RESCALE_EXP, p_cur)
                off -= small * _RESCALE_EXP
            p_prev, p_cur = p_cur, p_next
        norm_m *= lam[l]
        frac, ex = math.frexp(norm_m)
        norm_m, norm_e = frac, norm_e + ex

        term_m = p_cur * p_cur / norm_m
        term_e = 2 * off - norm_e
        # exact power-of-two alignment onto the larger exponent
        top = np.maximum(acc_e, term_e)
        with np.errstate(under="ignore"):
            acc_m = acc_m * np.exp2((acc_e - top).astype(float)) + term_m * np.exp2(
                (term_e - top).astype(float)
            )
        acc_e = top
        acc_m, de = np.frexp(acc_m)
        acc_e = acc_e + de
    # normalize mantissas into [1, 2)
    acc_m, de = np.frexp(acc_m)
    return 2.0 * acc_m, acc_e + de - 1


def _derivative_weights(rec: MonicRecurrence, n: int, nodes: np.ndarray) -> np.ndarray:
    """Residue form M_{n,k} = P^(1)_{n-1}(x_k)/P_n'(x_k); kept as an
    independent cross-check route for degrees low enough that the associated
    zeros have not yet coagulated with the nodes."""
    c, lam = rec.coeff_arrays(n)
    ca, lama = _associated_arrays(c, lam)
    q, _, q_exp = _terminal_values(ca, lama, nodes)
    _, d, d_exp = _value_and_derivative(c, lam, nodes)
    return _ratio(q, q_exp, d, d_exp)


def spectral_mass(
    rec: MonicRecurrence,
    xi: float,
    l_max: int = 1000,
    divergence_threshold: float = 1e12,
    divergence_run: int = 100,
    tail_rtol: float = 1e-13,
    tail_run: int = 12,
    saturate_rtol: float = 1e-12,
) -> SpectralMass:
    """Mass of the limiting measure at a converged spectral point xi.

    Accumulates S_L = sum_{l<=L} P_l(xi)^2 / n_l.  At a spectral point the
    terms decay superexponentially once l passes the resonant range, so S
    saturates and mass = 1/S; off the spectrum only a dominant solution
    exists, the terms grow without bound, and Divergent is raised.

    Because xi carries rounding error, the terms of a saturated sum
    eventually turn around and grow again like (dominant * error)^2; the
    running minimum of term/S is kept as a saturation candidate so the sum
    is cut at the turnaround, exactly like an asymptotic series.  Divergence
    is declared heuristically (thresholds exposed): S above
    divergence_threshold, terms rising over divergence_run consecutive l,
    and no saturation candidate better than saturate_rtol.  Spectral points
    deeper than about divergence_run levels need divergence_run raised, as
    their sums legitimately climb for that long before saturating.
    """
    if l_max < tail_run + 2:
        raise ValueError("l_max too small to certify anything")
    xi = float(xi)
    c, lam = rec.coeff_arrays(l_max + 1)

    total = 1.0  # l = 0 term: P_0^2 / n_0 = 1
    p_prev, p_cur = 1.0, xi - c[0]
    offset = 0
    norm_m, norm_e = 1.0, 0  # n_l as mantissa * 2**exp
    small_run = 0
    rise_run = 0
    prev_term = 1.0
    best_ratio = 1.0
    best_total = total
    best_term = 1.0
    shift = int(round(math.log2(_RESCALE_LIMIT)))
    inv_limit = 1.0 / _RESCALE_LIMIT

    def saturated(total_at: float, term_at: float, ratio_at: float) -> SpectralMass:
        tail = term_at + ratio_at * total_at
        return SpectralMass(xi=xi, mass=1.0 / total_at, tail_estimate=tail)

    for l in range(1, l_max + 1):
        if l >= 2:
            p_next = (xi - c[l - 1]) * p_cur - lam[l - 1] * p_prev
            m = max(abs(p_next), abs(p_cur))
            if m > _RESCALE_LIMIT:
                p_next = math.ldexp(p_next, -shift)
                p_cur = math.ldexp(p_cur, -shift)
                offset += shift
            elif 0.0 < m < inv_limit:
                p_next = math.ldexp(p_next, shift)
                p_cur = math.ldexp(p_cur, shift)
                offset -= shift
            p_prev, p_cur = p_cur, p_next
        norm_m *= lam[l]
        frac, ex = math.frexp(norm_m)
        norm_m, norm_e = frac, norm_e + ex

        try:
            term = math.ldexp(p_cur * p_cur / norm_m, 2 * offset - norm_e)
        except OverflowError:
            term = math.inf
        if math.isinf(term) or math.isinf(total + term):
            if best_ratio <= saturate_rtol:
                return saturated(best_total, best_term, best_ratio)
            raise Divergent(f"partial sums overflow at l={l}: {xi!r} is not a spectral point")
        total += term
        ratio = term / total
        if ratio < best_ratio:
            best_ratio, best_total, best_term = ratio, total, term

        if term <= tail_rtol * total:
            small_run += 1
            if small_run >= tail_run:
                return saturated(total, term, ratio)
        else:
            small_run = 0
        rise_run = rise_run + 1 if term > prev_term else 0
        prev_term = term
        if (
            rise_run >= divergence_run
            and total > divergence_threshold
            and best_ratio > saturate_rtol
        ):
            raise Divergent(
                f"partial sums exceed {divergence_threshold:g} and grew over the last "
                f"{divergence_run} terms: {xi!r} is not a spectral point"
            )

    if best_ratio <= saturate_rtol:
        return saturated(best_total, best_term, best_ratio)
    raise ValueError(
        f"sum neither saturated nor certified divergent by l_max={l_max}; increase l_max"
    )


def reconstruct_eigenvector(
    rec: MonicRecurrence,
    raw: RawRecurrence,
    xi: float,
    n_max: int,
    match_rtol: float = 1e-8,
    residual_tol: float = 1e-6,
) -> EigenvectorResult:
    """Expansion coefficients phi_0..phi_{n_max} of the state at energy xi.

    Backward recurrence from a far tail (start >= 2*n_max, re-run from twice
    as far and compared) isolates the minimal solution; the result is
    normalized to phi_0 = 1.  The solution is a physical eigenvector only if
    (a) the Bargmann partial sums sum |phi_n|^2 n! saturate and (b) the
    two-term condition phi_1 + a_0(xi) phi_0 = 0 holds; off the spectrum the
    unique solution with the two-term initial condition is dominant and (b)
    fails by an O(1) residual.  NotMinimal is raised in either case, and when
    the two tail runs disagree (no minimal/dominant separation at xi).
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    xi = float(xi)
    _check_same_model(rec, raw)
    start = max(2 * n_max, n_max + 32)
    phi_a = _backward_minimal(raw, xi, n_max, start, seed=1234)
    phi_b = _backward_minimal(raw, xi, n_max, 2 * start, seed=987654321)

    floor = ScaledReal.from_float(1.0, -1000)
    for k in range(n_max + 1):
        a, b = phi_a[k], phi_b[k]
        mag = max(abs(a), abs(b))
        if mag <= floor:
            continue
        diff = abs(a - b)
        if diff > match_rtol * mag:
            raise NotMinimal(
                f"backward runs from tails {start} and {2 * start} disagree at n={k}; "
                f"no stable minimal solution at {xi!r}"
            )

    phi = np.array([p.to_float() for p in phi_a])

    # Bargmann partial sums sum |phi_n|^2 n! in scaled arithmetic
    sums = np.empty(n_max + 1)
    fact = ScaledReal.one()
    total = ScaledReal.zero()
    for k in range(n_max + 1):
        if k > 0:
            fact = fact * float(k)
        total = total + phi_a[k] * phi_a[k] * fact
        sums[k] = total.to_float()
    window = min(max(4, n_max // 8), n_max)
    head = sums[-window - 1]
    saturated = bool(
        np.isfinite(sums[-1]) and head > 0.0 and (sums[-1] - head) <= 1e-10 * sums[-1]
    )

    a0 = float(np.asarray(raw.a(np.array([0]), xi), dtype=float)[0])
    phi1 = phi[1]
    residual = abs(phi1 + a0) / max(1.0, abs(phi1), abs(a0))

    if not saturated:
        raise NotMinimal(
            f"Bargmann partial sums did not saturate by n_max={n_max} at {xi!r}"
        )
    if residual > residual_tol:
        raise NotMinimal(
            f"two-term condition violated at {xi!r} (residual {residual:.3e}): the physical "
            "solution there is dominant, so xi is not a spectral point"
        )
    return EigenvectorResult(
        phi=phi,
        bargmann_partial_sums=sums,
        bargmann_saturated=saturated,
        two_term_residual=float(residual),
    )


def _check_same_model(rec: MonicRecurrence, raw: RawRecurrence) -> None:
    """rec must be the monic form of raw; a coefficient-prefix comparison
    catches mismatched pairs before they produce silent nonsense."""
    from .recurrence import to_monic

    derived = to_monic(raw, probe_terms=8)
    probe = 8 if rec.n_cap is None else min(8, rec.n_cap)
    c_a, lam_a = rec.coeff_arrays(probe)
    c_b, lam_b = derived.coeff_arrays(probe)
    scale_c = np.maximum(1.0, np.abs(c_a))
    scale_l = np.maximum(1.0, np.abs(lam_a))
    if np.any(np.abs(c_a - c_b) > 1e-6 * scale_c) or np.any(
        np.abs(lam_a - lam_b) > 1e-6 * scale_l
    ):
        raise ValueError("rec is not the monic form of raw: coefficient prefixes disagree")


def _backward_minimal(
    raw: RawRecurrence, xi: float, n_max: int, start: int, seed: int
) -> list[ScaledReal]:
    """Miller backward pass phi_{n-1} = -(phi_{n+1} + a_n phi_n)/b_n from a
    random tail seed at `start`, returned for n = 0..n_max normalized to
    phi_0 = 1."""
    rng = np.random.default_rng(seed)
    idx = np.arange(start + 1, dtype=np.int64)
    a_vals = np.asarray(raw.a(idx, xi), dtype=float)
    b_vals = np.asarray(raw.b(np.maximum(idx, 1)), dtype=float)
    if np.any(b_vals[1:] == 0.0):
        raise ValueError("b_n must be nonzero for n >= 1")

    shift = int(round(math.log2(_RESCALE_LIMIT)))
    hi, cur = float(rng.uniform(0.25, 1.0)), float(rng.uniform(0.25, 1.0))
    offset = 0
    out: dict[int, ScaledReal] = {}
    for n in range(start, 0, -1):
        if n <= n_max:
            out[n] = ScaledReal.from_float(cur, offset)
        nxt = -(hi + a_vals[n] * cur) / b_vals[n]
        m = max(abs(nxt), abs(cur))
        if m > _RESCALE_LIMIT:
            nxt = math.ldexp(nxt, -shift)
            cur = math.ldexp(cur, -shift)
            offset += shift
        elif 0.0 < m < 1.0 / _RESCALE_LIMIT:
            nxt = math.ldexp(nxt, shift)
            cur = math.ldexp(cur, shift)
            offset -= shift
        hi, cur = cur, nxt
    out[0] = ScaledReal.from_float(cur, offset)
    if out[0].sign == 0:
        raise NotMinimal(f"phi_0 vanished in the backward pass at {xi!r}")
    phi0 = out[0]
    return [out[n] / phi0 for n in range(n_max + 1)]

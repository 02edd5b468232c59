"""Numerical engine for the model's rate functions and growth constants.

Closed-form rate functions, implicit-equation roots, and exact
small-instance probability oracles used to cross-check the asymptotic
height/diameter behaviour of the walk-based tree models.

Everything is double precision.  Implicit equations are solved by
bracketed bisection with a fixed 1e-12 x-tolerance (brackets are sign
certificates, so convergence never depends on smoothness constants),
and binomial coefficients are evaluated in the log domain.

The two headline constants for the d=1 tree model are ``c_lower(p)`` and
``c_upper(p)``: the height divided by log(n) converges into
[c_lower, c_upper], and the two coincide for p >= crossover_p() ~ 0.206.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special, stats

XTOL = 1e-12


def _bisect(fn, lo: float, hi: float, xtol: float = XTOL, max_iter: int = 200) -> float:
    """Bracketed bisection; fn(lo) and fn(hi) must have opposite signs."""
    flo = fn(lo)
    fhi = fn(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo < 0.0) == (fhi < 0.0):
        raise ValueError(f"root not bracketed on [{lo}, {hi}]: f={flo}, {fhi}")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= xtol or mid == lo or mid == hi:
            return mid
        fm = fn(mid)
        if fm == 0.0:
            return mid
        if (fm < 0.0) == (flo < 0.0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _check_p_open(p: float) -> None:
    if not 0.0 < p < 1.0:
        raise ValueError(f"model parameter p must be in (0, 1), got {p}")


def _int_strictly_above(x: float) -> int:
    """Smallest integer > x, snapping near-integer floats to the lattice."""
    r = round(x)
    if abs(x - r) < 1e-9:
        return int(r) + 1
    return int(math.floor(x)) + 1


def exp_rate(x: float) -> float:
    """Lower-tail rate for sums of mean-1 exponentials: x-1-log(x) on (0,1], else 0."""
    if x <= 0.0:
        raise ValueError(f"exp_rate needs x > 0, got {x}")
    if x <= 1.0:
        return x - 1.0 - math.log(x)
    return 0.0


def step_base_log(x: float, p: float) -> float:
    """log of step_base, stable for very negative x."""
    _check_p_open(p)
    if x > 1.0:
        raise ValueError(f"step base is defined for x <= 1, got {x}")
    if x == 1.0:
        return math.log(p)
    return (
        (2.0 - x) * math.log(2.0 - x)
        + math.log(p)
        + (1.0 - x) * math.log1p(-p)
        + (x - 1.0) * math.log1p(-x)
    )


def step_base(x: float, p: float) -> float:
    """Per-step tail base for sums of weight steps 1 - geo(p).

    Equals (2-x)^(2-x) p (1-p)^(1-x) (1-x)^(x-1), with the 0^0 = 1
    convention at x = 1 (value p there).  Unimodal: increasing up to
    2 - 1/p, decreasing from there to 1.
    """
    return math.exp(step_base_log(x, p))


def clamped_base(x: float, p: float) -> float:
    """Tail base for the clamped partial-sum recursion; continuous on [0, 1]."""
    _check_p_open(p)
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"clamped base is defined on [0, 1], got {x}")
    if p >= 0.5 and x <= 2.0 - 1.0 / p:
        return 1.0
    if p < 0.5 and x <= (1.0 - 2.0 * p) / (1.0 - p):
        return (p / (1.0 - p)) ** x
    return step_base(x, p)


def saddle_eq(a: float, s: float, p: float) -> float:
    """Saddle equation p(1-p)(2-s)^2 (s-a) - a(1-s); linear in a."""
    return p * (1.0 - p) * (2.0 - s) ** 2 * (s - a) - a * (1.0 - s)


def saddle_point(a: float, p: float) -> float:
    """Unique root s in [a, 1] of the saddle equation, by bisection.

    Maps a in (0,1) strictly into (a, 1); fixes 0 and 1 exactly.
    """
    _check_p_open(p)
    if not 0.0 <= a <= 1.0:
        raise ValueError(f"saddle_point needs a in [0, 1], got {a}")
    if a == 0.0 or a == 1.0:
        return a
    return _bisect(lambda s: saddle_eq(a, s, p), a, 1.0)


def saddle_point_inv(s: float, p: float) -> float:
    """Closed-form inverse of saddle_point (the equation is linear in a)."""
    _check_p_open(p)
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"saddle_point_inv needs s in [0, 1], got {s}")
    if s == 0.0 or s == 1.0:
        return s
    sigma = p * (1.0 - p)
    return sigma * (2.0 - s) ** 2 * s / (sigma * (2.0 - s) ** 2 + (1.0 - s))


def lower_base(a: float, p: float) -> float:
    """Base of the coin-thinned lower tail bound (lower height constant)."""
    _check_p_open(p)
    if not 0.0 < a < 1.0:
        raise ValueError(f"lower_base is defined on (0, 1), got {a}")
    if p > 0.5 and a < 1.0 - 1.0 / (2.0 * p):
        return 0.5
    s = saddle_point(a, p)
    return (s - a) / s * ((1.0 - p) * (2.0 - s) / (1.0 - s)) ** a


def upper_base(a: float, p: float) -> float:
    """Base of the coin-thinned upper tail bound (upper height constant).

    Continuous and nondecreasing on [0, 1] with value 1/2 at 0 and 1/p at 1.
    """
    _check_p_open(p)
    if not 0.0 <= a <= 1.0:
        raise ValueError(f"upper_base is defined on [0, 1], got {a}")
    if a == 1.0:
        return 1.0 / p
    if p >= 0.5 and a <= 1.0 - 1.0 / (2.0 * p):
        return 0.5
    if p < 0.5 and a <= (1.0 - 2.0 * p) / (2.0 - 2.0 * p):
        return ((1.0 - p) / p) ** a / 2.0
    s = saddle_point(a, p)
    return (s - a) / s * ((1.0 - p) * (2.0 - s) / (1.0 - s)) ** a


def upper_base_deriv(a: float, p: float) -> float:
    """Derivative of upper_base on (0, 1); piecewise per its case split."""
    _check_p_open(p)
    if not 0.0 < a < 1.0:
        raise ValueError(f"upper_base_deriv is defined on (0, 1), got {a}")
    if p >= 0.5 and a <= 1.0 - 1.0 / (2.0 * p):
        return 0.0
    if p < 0.5 and a <= (1.0 - 2.0 * p) / (2.0 - 2.0 * p):
        return math.log((1.0 - p) / p) * upper_base(a, p)
    s = saddle_point(a, p)
    return math.log((1.0 - p) * (2.0 - s) / (1.0 - s)) * upper_base(a, p)


def height_root(p: float) -> float:
    """Unique s in (0, 1) with s*log((1-p)(2-s)/(1-s)) = 1.

    Solved in the equivalent monotone form
    log(1-p) + log(2-s) - log(1-s) - 1/s = 0.
    """
    _check_p_open(p)

    def mu(s: float) -> float:
        return math.log1p(-p) + math.log(2.0 - s) - math.log1p(-s) - 1.0 / s

    return _bisect(mu, 1e-12, 1.0 - 1e-12)


@lru_cache(maxsize=1)
def crossover_p() -> float:
    """The p below which the upper constant leaves the lower one (~0.206)."""

    def r(p: float) -> float:
        return math.log((1.0 - p) / p) - (1.0 - p) / (1.0 - 2.0 * p)

    return _bisect(r, 1e-9, 0.5 - 1e-9)


def c_lower(p: float) -> float:
    """Lower growth constant of height/log(n) for the d=1 tree model."""
    s = height_root(p)
    return math.exp(1.0 / s) * s * (2.0 - s) * p


def c_upper(p: float) -> float:
    """Upper growth constant; equals c_lower above the crossover point."""
    _check_p_open(p)
    if p >= crossover_p():
        return c_lower(p)
    return 1.0 / math.log((1.0 - p) / p)


@dataclass(frozen=True)
class TheoryProfile:
    """All derived constants for one value of p."""

    p: float
    s: float
    p0: float
    cL: float
    cU: float
    a_star: float
    rho_star: float


def theory_profile(p: float) -> TheoryProfile:
    """Solve every constant for p and package them, with domain checks."""
    _check_p_open(p)
    s = height_root(p)
    a_star = saddle_point_inv(s, p)
    rho_star = 1.0 - a_star / s
    if not (0.0 < a_star < s < 1.0 and 0.0 < rho_star < 1.0):
        raise ValueError(f"degenerate profile at p={p}: a*={a_star}, s={s}")
    return TheoryProfile(
        p=p,
        s=s,
        p0=crossover_p(),
        cL=c_lower(p),
        cU=c_upper(p),
        a_star=a_star,
        rho_star=rho_star,
    )


@dataclass(frozen=True)
class VariationalSolution:
    """Optimum of the constrained ratio a/rho defining the upper constant."""

    a: float
    rho: float
    ratio: float
    tau_of_a: float


def _tau(x: float, p: float) -> float:
    """Solve log(upper_base(x)) + t - 1 - log(t) = 0 for t in (0, 1]."""
    lg = math.log(upper_base(x, p))
    if lg >= -1e-15:
        return 1.0
    # t - 1 - log(t) decreases from +inf to 0 on (0, 1]
    lo = 0.5
    while lg + lo - 1.0 - math.log(lo) <= 0.0:
        lo *= 0.5
    return _bisect(lambda t: lg + t - 1.0 - math.log(t), lo, 1.0)


def c_upper_variational(p: float, grid_size: int = 1000) -> VariationalSolution:
    """Compute the upper constant from its variational characterisation.

    The feasible set is a in (0, a_max] where a_max is the unique point
    with upper_base(a_max) = 1; for each a the constraint pins tau(a) in
    (0, 1].  The ratio a/tau(a) is scanned on a grid, refined by
    golden-section search, and polished by bisecting the stationarity
    condition (1 - tau) = a * d log(upper_base)/da.  Serves as an
    independent cross-check of ``c_upper``.
    """
    _check_p_open(p)
    if grid_size < 8:
        raise ValueError("grid_size too small")
    a_max = _bisect(lambda a: upper_base(a, p) - 1.0, 0.0, 1.0)

    def ratio(x: float) -> float:
        return x / _tau(x, p)

    xs = np.linspace(a_max / grid_size, a_max * (1.0 - 1e-12), grid_size)
    vals = [ratio(float(x)) for x in xs]
    i = int(np.argmax(vals))
    lo = float(xs[max(i - 1, 0)])
    hi = float(xs[min(i + 1, grid_size - 1)])

    # golden-section refinement on the bracketing interval
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - invphi * (hi - lo)
    x2 = lo + invphi * (hi - lo)
    f1, f2 = ratio(x1), ratio(x2)
    for _ in range(120):
        if hi - lo < 1e-13:
            break
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + invphi * (hi - lo)
            f2 = ratio(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - invphi * (hi - lo)
            f1 = ratio(x1)
    x_star = 0.5 * (lo + hi)

    # polish: the maximiser satisfies (1 - tau(x)) - x g'(x)/g(x) = 0
    def stationarity(x: float) -> float:
        return (1.0 - _tau(x, p)) - x * upper_base_deriv(x, p) / upper_base(x, p)

    width = max(a_max / grid_size, 1e-9)
    plo = max(x_star - width, a_max * 1e-9)
    phi_ = min(x_star + width, a_max * (1.0 - 1e-12))
    # a stationary point this close to the grid optimum is the optimum
    try:
        if stationarity(plo) * stationarity(phi_) < 0.0:
            x_star = _bisect(stationarity, plo, phi_)
    except ValueError:
        pass

    t = _tau(x_star, p)
    return VariationalSolution(a=x_star, rho=t, ratio=x_star / t, tau_of_a=t)


def step_sum_pmf(m: int, total: int, p: float) -> float:
    """Exact P{sum of m weight steps (each 1 - geo(p)) equals total}.

    Uses the negative-binomial identity
    C(2m - total - 1, m - 1) p^m (1-p)^(m - total), evaluated with
    log-gamma binomials.  Zero for total > m.
    """
    _check_p_open(p)
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    total = int(total)
    if total > m:
        return 0.0
    top = 2 * m - total - 1
    k = m - 1
    log_c = special.gammaln(top + 1) - special.gammaln(k + 1) - special.gammaln(top - k + 1)
    return float(math.exp(log_c + m * math.log(p) + (m - total) * math.log1p(-p)))


def clamped_sum_dist(m: int, p: float) -> np.ndarray:
    """Exact law of the clamped sum S_m, S_1 = 1, S_{i+1} = max(S_i + Y, 1).

    Y = 1 - geo(p), so S_i lives on the integers {1, ..., i}; the clamp
    folds the entire lower geometric tail into state 1, which makes the
    DP exact with no truncation.  Returns probs indexed by value
    (probs[v] = P{S_m = v}, probs[0] unused).
    """
    _check_p_open(p)
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    q = 1.0 - p
    probs = np.zeros(m + 1)
    probs[1] = 1.0
    for i in range(2, m + 1):
        # suffix transform T[u] = sum_{s >= u} probs[s] q^(s-u)
        T = np.zeros(m + 2)
        for u in range(i - 1, 0, -1):
            T[u] = probs[u] + q * T[u + 1]
        new = np.zeros(m + 1)
        new[1] = q * T[1]  # P(drop to the clamp) = q^s from state s
        for v in range(2, i + 1):
            new[v] = p * T[v - 1]
        probs = new
    return probs


def clamped_tail(m: int, a: float, p: float) -> float:
    """Exact P{S_m > a*m} for the clamped sum (DP oracle)."""
    probs = clamped_sum_dist(m, p)
    thr = _int_strictly_above(a * m)
    if thr > m:
        return 0.0
    return float(probs[max(thr, 0):].sum())


def thinned_clamped_tail(m: int, a: float, p: float) -> float:
    """Exact P{sum of coin-thinned clamped steps > a*m}.

    A fair coin keeps or zeroes each step; conditioned on k kept steps the
    kept increments follow the clamped recursion of length k, so the tail
    is a Binomial(m, 1/2) mixture of the plain DP tails.
    """
    _check_p_open(p)
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    thr = _int_strictly_above(a * m)
    if thr > m:
        return 0.0
    q = 1.0 - p
    total = 0.0
    probs = np.zeros(m + 1)
    probs[1] = 1.0
    half_pow = 0.5**m
    for k in range(1, m + 1):
        if k > 1:
            T = np.zeros(m + 2)
            for u in range(k - 1, 0, -1):
                T[u] = probs[u] + q * T[u + 1]
            new = np.zeros(m + 1)
            new[1] = q * T[1]
            for v in range(2, k + 1):
                new[v] = p * T[v - 1]
            probs = new
        tail_k = probs[max(thr, 0):].sum() if thr <= k else 0.0
        total += math.comb(m, k) * half_pow * tail_k
    return float(total)


def exp_sum_lower_tail(m: int, x: float) -> float:
    """Exact P{sum of m mean-1 exponentials <= x*m} (Erlang CDF)."""
    if m < 1 or x < 0.0:
        raise ValueError("need m >= 1 and x >= 0")
    return float(special.gammainc(m, x * m))


def exp_sum_lower_bound(m: int, x: float) -> float:
    """Chernoff bound exp(-m * exp_rate(x)) for the exponential lower tail."""
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    return math.exp(-m * exp_rate(x))


def shifted_geo_tail(m: int, kappa: float, p: float) -> float:
    """Exact P{sum of m draws of 1 + geo(p) >= kappa*m} (negative-binomial tail)."""
    _check_p_open(p)
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    t = kappa * m - m  # threshold for the geo-part sum
    r = round(t)
    k_min = int(r) if abs(t - r) < 1e-9 else int(math.ceil(t))
    if k_min <= 0:
        return 1.0
    return float(stats.nbinom.sf(k_min - 1, m, p))


def shifted_geo_tail_bound(m: int, kappa: float, p: float) -> float:
    """Chernoff bound step_base(2 - kappa)^m, valid for kappa >= 1/p."""
    _check_p_open(p)
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    if kappa < 1.0 / p:
        raise ValueError(f"bound requires kappa >= 1/p, got kappa={kappa}, p={p}")
    return math.exp(m * step_base_log(2.0 - kappa, p))


def diameter_margin(p: float, c: float) -> float:
    """Margin of the inequality certifying the webgraph diameter bound.

    With eta = 4 e^p / p and 0 < c <= p*eta the quantity
    -c*exp_rate(1/c) + c*log(step_base(2 - eta/c)) must stay strictly
    below max(eta(1-p)log(1-p^3), -0.15 p eta) - 1; returns rhs - lhs,
    which must be positive.
    """
    _check_p_open(p)
    eta = 4.0 * math.exp(p) / p
    if not 0.0 < c <= p * eta:
        raise ValueError(f"need 0 < c <= p*eta = {p * eta}, got {c}")
    lhs = -c * exp_rate(1.0 / c) + c * step_base_log(2.0 - eta / c, p)
    rhs = max(eta * (1.0 - p) * math.log1p(-(p**3)), -0.15 * p * eta) - 1.0
    return rhs - lhs


@dataclass(frozen=True)
class MarginReport:
    min_margin: float
    argmin_p: float
    argmin_c: float
    n_points: int


def diameter_margin_grid(p_grid=None, c_fracs=None) -> MarginReport:
    """Scan diameter_margin over a (p, c) grid; c = frac * p * eta.

    Defaults give a 100 x 100 grid (1e4 points).  All margins must be
    positive; the report carries the minimum and where it occurs.
    """
    if p_grid is None:
        p_grid = np.linspace(0.02, 0.98, 100)
    if c_fracs is None:
        c_fracs = np.linspace(0.01, 1.0, 100)
    best = math.inf
    arg = (math.nan, math.nan)
    count = 0
    for p in p_grid:
        p = float(p)
        eta = 4.0 * math.exp(p) / p
        for frac in c_fracs:
            c = float(frac) * p * eta
            m = diameter_margin(p, c)
            count += 1
            if m < best:
                best = m
                arg = (p, c)
    return MarginReport(min_margin=best, argmin_p=arg[0], argmin_c=arg[1], n_points=count)

"""Closed-form predictions and numeric checks for the percolation thresholds.

The 2D threshold constant lambda solves exp(-2*lambda^r / r!) = 1/2, so
lambda = (r! * ln 2 / 2)^(1/r).  In 3D the critical exponent is
-1 - 1/(r - gamma) with s the largest integer satisfying s(s+1) <= r and
gamma = (r + s(s+1)) / (2(s+1)), kept as an exact rational so the boundary
case gamma = s (exactly when r = s(s+1)) is detected without rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import gammaln

from .grid import InputError

SUPERCRITICAL = "supercritical"


def lambda_r(r: int) -> float:
    """Unique positive root of exp(-2 x^r / r!) = 1/2."""
    if r < 2:
        raise InputError(f"infection parameter must be >= 2, got {r}")
    return (math.factorial(r) * math.log(2.0) / 2.0) ** (1.0 / r)


def s_of_r(r: int) -> int:
    """Largest natural s with s(s+1) <= r, by direct enumeration."""
    if r < 2:
        raise InputError(f"infection parameter must be >= 2, got {r}")
    s = 0
    while (s + 1) * (s + 2) <= r:
        s += 1
    return s


def s_of_r_floor(r: int) -> int:
    """The equivalent floor form floor(sqrt(r + 1/4) - 1/2), in exact integers."""
    return (math.isqrt(4 * r + 1) - 1) // 2


def gamma_of_r(r: int) -> Fraction:
    """Effective threshold reduction (r + s(s+1)) / (2(s+1)), exact."""
    s = s_of_r(r)
    return Fraction(r + s * (s + 1), 2 * (s + 1))


def pc2_exponent(r: int) -> Fraction:
    """2D critical exponent: p_c scales as n^(-1 - 1/r)."""
    if r < 2:
        raise InputError(f"infection parameter must be >= 2, got {r}")
    return Fraction(-1, 1) - Fraction(1, r)


def pc3_exponent(r: int) -> Fraction:
    """3D critical exponent: p_c scales as n^(-1 - 1/(r - gamma))."""
    g = gamma_of_r(r)
    return Fraction(-1, 1) - 1 / (r - g)


def theta2_regime_exponents(r: int) -> list[tuple[int, int]]:
    """For each regime s' in [0, r-1]: the (n, np) exponents of theta.

    theta scales as n^(2s'+1) * (np)^(r(2s'+1) - s'(s'+1)) inside regime s'.
    """
    if r < 2:
        raise InputError(f"infection parameter must be >= 2, got {r}")
    return [(2 * s + 1, r * (2 * s + 1) - s * (s + 1)) for s in range(r)]


def regime_of(n: int, p: float, r: int):
    """The regime index s for (n, p), or SUPERCRITICAL above n^(-1-1/r).

    A p exactly equal to a regime boundary belongs to the smaller s.
    Comparisons are done as ln p vs exponent * ln n to avoid needless
    rounding.
    """
    if n < 2:
        raise InputError(f"need n >= 2, got {n}")
    if r < 2:
        raise InputError(f"infection parameter must be >= 2, got {r}")
    if not (0.0 < p < 1.0):
        raise InputError(f"need 0 < p < 1, got {p}")
    ln_n = math.log(n)
    ln_p = math.log(p)
    if ln_p > (-1.0 - 1.0 / r) * ln_n:
        return SUPERCRITICAL
    for s in range(r - 1):
        if ln_p >= (-1.0 - 1.0 / (r - s - 1)) * ln_n:
            return s
    return r - 1


def predicted_theta2(n: int, p: float, r: int) -> float:
    """The regime formula n^(2s+1) (np)^(r(2s+1)-s(s+1)), up to constants.

    Returns 1.0 in the supercritical regime.  Computed in log space.
    """
    if p >= 1.0:
        raise InputError(f"need p < 1, got {p}")
    s = regime_of(n, p, r)
    if s == SUPERCRITICAL:
        return 1.0
    a, b = theta2_regime_exponents(r)[s]
    return math.exp(a * math.log(n) + b * (math.log(n) + math.log(p)))


# ---------------------------------------------------------------------------
# binomial bounds (numeric verification, exact log-space arithmetic)
# ---------------------------------------------------------------------------


def log_binom_pmf(N: int, p: float, k) -> np.ndarray:
    """log P(Bin(N, p) = k), vectorized over k, computed via lgamma."""
    k = np.asarray(k, dtype=np.int64)
    if np.any((k < 0) | (k > N)):
        raise InputError("k out of range [0, N]")
    if not (0.0 <= p <= 1.0):
        raise InputError(f"p must lie in [0, 1], got {p}")
    log_p = math.log(p) if p > 0 else -math.inf
    log_q = math.log1p(-p) if p < 1 else -math.inf
    out = (
        gammaln(N + 1)
        - gammaln(k + 1)
        - gammaln(N - k + 1)
        + np.where(k > 0, k * log_p, 0.0)
        + np.where(N - k > 0, (N - k) * log_q, 0.0)
    )
    return out


def _logsumexp(values: np.ndarray) -> float:
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return -math.inf
    m = float(values.max())
    if m == -math.inf:
        return -math.inf
    return m + math.log(float(np.exp(values - m).sum()))


@dataclass(frozen=True)
class BinomialBoundsReport:
    """Outcome of the pointwise pmf sandwich and the Chernoff tail check."""

    N: int
    p: float
    k: int
    pmf_lower_ok: bool | None  # None when p > 1/2 (bound not asserted there)
    pmf_upper_ok: bool | None
    chernoff_ok: dict[float, bool]

    @property
    def all_ok(self) -> bool:
        claims = [self.pmf_lower_ok, self.pmf_upper_ok] + list(
            self.chernoff_ok.values()
        )
        return all(c is not False for c in claims)


def check_binomial_bounds(
    N: int, p: float, k: int, deltas: tuple[float, ...] = (0.1, 0.3, 0.5, 0.9)
) -> BinomialBoundsReport:
    """Verify the pmf sandwich at (N, p, k) and the Chernoff tail for deltas.

    For k >= 1 and p <= 1/2 the sandwich is
    exp(-2 mu) (mu/k)^k <= P(X = k) <= exp(-mu) (2 e mu / k)^k,
    and for k = 0 it is exp(-2 mu) <= P(X = 0) <= exp(-mu).  The tail check
    compares the exact two-sided tail P(|X - mu| > delta mu), summed in log
    space, against exp(-delta^2 mu / 3).
    """
    if k < 0 or k > N:
        raise InputError(f"k must lie in [0, {N}], got {k}")
    if not (0.0 <= p <= 1.0):
        raise InputError(f"p must lie in [0, 1], got {p}")
    mu = N * p
    if p > 0.5:
        lower_ok = upper_ok = None
    else:
        log_pmf = float(log_binom_pmf(N, p, k))
        if k == 0:
            log_lower = -2.0 * mu
            log_upper = -mu
        else:
            log_lower = -2.0 * mu + k * (math.log(mu) - math.log(k)) if mu > 0 else -math.inf
            log_upper = -mu + k * (math.log(2.0 * math.e * mu) - math.log(k)) if mu > 0 else math.inf
        lower_ok = bool(log_lower <= log_pmf)
        upper_ok = bool(log_pmf <= log_upper)
    ks = np.arange(N + 1, dtype=np.int64)
    log_all = log_binom_pmf(N, p, ks)
    chernoff = {}
    for delta in deltas:
        if not (0.0 < delta < 1.0):
            raise InputError(f"delta must lie in (0, 1), got {delta}")
        tail = np.abs(ks - mu) > delta * mu
        log_tail = _logsumexp(log_all[tail])
        chernoff[float(delta)] = bool(log_tail <= -delta * delta * mu / 3.0)
    return BinomialBoundsReport(N, p, k, lower_ok, upper_ok, chernoff)


# ---------------------------------------------------------------------------
# consolidated report
# ---------------------------------------------------------------------------


def check_binomial_bounds_grid(
    N: int,
    p: float,
    k_max: int | None = None,
    deltas: tuple[float, ...] = (0.1, 0.3, 0.5, 0.9),
) -> dict:
    """Vectorized sweep of the pmf sandwich over k = 0..k_max plus the
    Chernoff checks; the same inequalities as ``check_binomial_bounds``.

    Returns {"pmf_failures": [k, ...], "chernoff_ok": {delta: bool}}.
    """
    if not (0.0 < p <= 0.5):
        raise InputError(f"the pmf sandwich needs 0 < p <= 1/2, got {p}")
    mu = N * p
    if k_max is None:
        k_max = min(N, int(math.ceil(3 * mu)) + 10)
    k_max = min(k_max, N)
    ks = np.arange(k_max + 1, dtype=np.int64)
    log_pmf = log_binom_pmf(N, p, ks)
    kpos = ks[1:].astype(np.float64)
    log_lower = np.empty(k_max + 1)
    log_upper = np.empty(k_max + 1)
    log_lower[0] = -2.0 * mu
    log_upper[0] = -mu
    log_lower[1:] = -2.0 * mu + kpos * (math.log(mu) - np.log(kpos))
    log_upper[1:] = -mu + kpos * (math.log(2.0 * math.e * mu) - np.log(kpos))
    bad = ks[(log_pmf < log_lower) | (log_pmf > log_upper)]
    full = log_binom_pmf(N, p, np.arange(N + 1, dtype=np.int64))
    chern = {}
    for delta in deltas:
        tail = np.abs(np.arange(N + 1) - mu) > delta * mu
        chern[float(delta)] = bool(
            _logsumexp(full[tail]) <= -delta * delta * mu / 3.0
        )
    return {"pmf_failures": bad.tolist(), "chernoff_ok": chern}


@dataclass(frozen=True)
class TheoryReport:
    r: int
    lam: float
    s: int
    gamma: Fraction
    pc2_exponent: Fraction
    pc3_exponent: Fraction
    theta2_regime_exponents: tuple[tuple[int, int], ...]

    def to_json_dict(self) -> dict:
        return {
            "r": self.r,
            "lambda": round(self.lam, 12),
            "s": self.s,
            "gamma": f"{self.gamma.numerator}/{self.gamma.denominator}",
            "pc2_exponent": float(self.pc2_exponent),
            "pc3_exponent": float(self.pc3_exponent),
            "theta2_regime_exponents": [
                {"s": s, "n_exponent": a, "np_exponent": b}
                for s, (a, b) in enumerate(self.theta2_regime_exponents)
            ],
        }


def theory_report(r: int) -> TheoryReport:
    lam = lambda_r(r)
    residual = abs(math.exp(-2.0 * lam**r / math.factorial(r)) - 0.5)
    assert residual < 1e-12
    return TheoryReport(
        r=r,
        lam=lam,
        s=s_of_r(r),
        gamma=gamma_of_r(r),
        pc2_exponent=pc2_exponent(r),
        pc3_exponent=pc3_exponent(r),
        theta2_regime_exponents=tuple(theta2_regime_exponents(r)),
    )

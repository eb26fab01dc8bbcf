"""High-precision evaluation of generalized hypergeometric series.

Parameters are exact rationals (:class:`fractions.Fraction`); floating values
are :mod:`mpmath` numbers evaluated at the precision carried by a
:class:`PrecisionCtx`.  The public functions enter ``mp.workdps`` themselves,
so callers do not need to manage the global mpmath context.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath as mp

from .errors import ConvergenceError, DomainError, PoleError

Rational = Fraction

__all__ = [
    "Rational",
    "PrecisionCtx",
    "HyperParams",
    "ExactSeries",
    "to_rational",
    "parse_vector",
    "to_mpf",
    "pochhammer",
    "series_coeff",
    "exact_series",
    "exact_product_series",
    "eval_pFq",
    "eval_f_mu",
    "gamma_ratio",
    "derivative_pFq",
    "derivative_table",
]


def to_rational(value) -> Fraction:
    """Convert an int, Fraction, or string such as ``"3/2"`` / ``"0.25"`` exactly."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not parameters")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not text:
            raise ValueError("empty rational literal")
        return Fraction(text)
    if isinstance(value, float):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as a rational")


def parse_vector(text: str | Iterable) -> tuple[Fraction, ...]:
    """Parse ``"1,2,3/2"`` (or an iterable) into a tuple of rationals; ``""`` is empty."""
    if isinstance(text, str):
        parts = [s for s in (t.strip() for t in text.split(",")) if s]
        return tuple(to_rational(s) for s in parts)
    return tuple(to_rational(v) for v in text)


def to_mpf(value):
    """Convert a rational, numeric string or mpmath number at the current precision."""
    if isinstance(value, Fraction):
        return mp.mpf(value.numerator) / value.denominator
    if isinstance(value, (mp.mpf, mp.mpc)):
        return +value
    if isinstance(value, str):
        if "/" in value:
            return to_mpf(Fraction(value.strip()))
        return mp.mpf(value.strip())
    return mp.mpf(value)


@dataclass(frozen=True)
class PrecisionCtx:
    """Working precision: decimal digits, target relative error, term budget."""

    digits: int = 50
    eps: float = 1e-30
    max_terms: int = 100_000

    def __post_init__(self):
        if self.digits < 15:
            raise ValueError("digits must be >= 15")
        if not 0 < self.eps < 1:
            raise ValueError("eps must lie in (0, 1)")
        if self.max_terms < 100:
            raise ValueError("max_terms must be >= 100")

    @property
    def mp_eps(self):
        return mp.mpf(self.eps)

    def doubled(self) -> "PrecisionCtx":
        """Context with twice the digits and a correspondingly smaller eps."""
        return PrecisionCtx(2 * self.digits, self.eps ** 2 if self.eps ** 2 > 0 else 1e-300,
                            self.max_terms)


DEFAULT_CTX = PrecisionCtx()


def _resolve(ctx: PrecisionCtx | None) -> PrecisionCtx:
    return DEFAULT_CTX if ctx is None else ctx


def _is_nonpositive_integer(v) -> bool:
    return v <= 0 and v == int(v)


@dataclass(frozen=True)
class HyperParams:
    """Upper and lower parameter vectors, optionally split into two blocks.

    ``split=(p1, q1)`` declares ``a1 = upper[:p1]``, ``a2 = upper[p1:]`` and
    likewise for the lower vector.  Only the second block is shifted by
    :func:`eval_f_mu`.  Without a split every parameter is shifted.
    """

    upper: tuple = ()
    lower: tuple = ()
    split: tuple[int, int] | None = None

    def __post_init__(self):
        object.__setattr__(self, "upper", parse_vector(self.upper))
        object.__setattr__(self, "lower", parse_vector(self.lower))
        for b in self.lower:
            if _is_nonpositive_integer(b):
                raise PoleError(f"lower parameter {b} is a non-positive integer")
        if self.split is not None:
            p1, q1 = (int(s) for s in self.split)
            if not (0 <= p1 <= self.p and 0 <= q1 <= self.q):
                raise ValueError(f"split {self.split} out of range for p={self.p}, q={self.q}")
            object.__setattr__(self, "split", (p1, q1))

    @classmethod
    def from_strings(cls, upper: str, lower: str, split: str | None = None) -> "HyperParams":
        sp = None
        if split:
            p1, q1 = (int(s) for s in split.split(","))
            sp = (p1, q1)
        return cls(parse_vector(upper), parse_vector(lower), sp)

    @classmethod
    def from_blocks(cls, a1, b1, a2, b2) -> "HyperParams":
        a1, b1, a2, b2 = (parse_vector(v) for v in (a1, b1, a2, b2))
        return cls(a1 + a2, b1 + b2, (len(a1), len(b1)))

    @property
    def p(self) -> int:
        return len(self.upper)

    @property
    def q(self) -> int:
        return len(self.lower)

    @property
    def a1(self) -> tuple[Fraction, ...]:
        return self.upper[: self.split[0]] if self.split else ()

    @property
    def a2(self) -> tuple[Fraction, ...]:
        return self.upper[self.split[0]:] if self.split else self.upper

    @property
    def b1(self) -> tuple[Fraction, ...]:
        return self.lower[: self.split[1]] if self.split else ()

    @property
    def b2(self) -> tuple[Fraction, ...]:
        return self.lower[self.split[1]:] if self.split else self.lower

    def shifted(self, k) -> "HyperParams":
        """All parameters shifted by ``k`` (split dropped)."""
        k = to_rational(k)
        return HyperParams(tuple(a + k for a in self.upper), tuple(b + k for b in self.lower))

    def describe(self) -> dict:
        d = {"upper": [str(a) for a in self.upper], "lower": [str(b) for b in self.lower]}
        if self.split is not None:
            d["split"] = list(self.split)
        return d


@dataclass(frozen=True)
class ExactSeries:
    """Truncated power series with exact rational coefficients ``c_0 .. c_M``."""

    coeffs: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(to_rational(c) for c in self.coeffs))
        if not self.coeffs:
            raise ValueError("an ExactSeries needs at least one coefficient")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, i):
        return self.coeffs[i]

    def __iter__(self):
        return iter(self.coeffs)

    def __mul__(self, other: "ExactSeries") -> "ExactSeries":
        return exact_product_series(self, other)

    def __sub__(self, other: "ExactSeries") -> "ExactSeries":
        m = min(self.order, other.order)
        return ExactSeries(tuple(self.coeffs[i] - other.coeffs[i] for i in range(m + 1)))

    def scale(self, factor) -> "ExactSeries":
        factor = to_rational(factor)
        return ExactSeries(tuple(factor * c for c in self.coeffs))

    def truncate(self, order: int) -> "ExactSeries":
        return ExactSeries(self.coeffs[: order + 1])

    def evaluate(self, x):
        """Horner evaluation of the truncated polynomial (mpmath at current precision)."""
        x = to_mpf(x)
        acc = mp.mpf(0)
        for c in reversed(self.coeffs):
            acc = acc * x + to_mpf(c)
        return acc

    def to_strings(self) -> list[str]:
        return [str(c) for c in self.coeffs]


def pochhammer(a, n: int):
    """Rising factorial ``a (a+1) ... (a+n-1)``; exact for rationals."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if isinstance(a, (int, str)):
        a = to_rational(a)
    result = Fraction(1) if isinstance(a, Fraction) else mp.mpf(1)
    for j in range(n):
        result *= a + j
    return result


def series_coeff(params: HyperParams, n: int) -> Fraction:
    """Exact Taylor coefficient ``(a)_n / ((b)_n n!)``."""
    num = Fraction(1)
    den = Fraction(math.factorial(n))
    for a in params.upper:
        num *= pochhammer(a, n)
    for b in params.lower:
        den *= pochhammer(b, n)
    if den == 0:
        raise PoleError("lower Pochhammer symbol vanished")
    return num / den


def exact_series(params: HyperParams, order: int) -> ExactSeries:
    """Coefficients ``c_0..c_order`` via the term-ratio recurrence."""
    coeffs = [Fraction(1)]
    c = Fraction(1)
    for n in range(order):
        num = 1
        den = n + 1
        for a in params.upper:
            num *= a + n
        for b in params.lower:
            den *= b + n
        c = c * num / den
        coeffs.append(c)
    return ExactSeries(tuple(coeffs))


def exact_product_series(s1: ExactSeries, s2: ExactSeries) -> ExactSeries:
    """Cauchy product truncated to ``min(s1.order, s2.order)``."""
    m = min(s1.order, s2.order)
    a, b = s1.coeffs, s2.coeffs
    out = []
    for k in range(m + 1):
        acc = Fraction(0)
        for i in range(k + 1):
            acc += a[i] * b[k - i]
        out.append(acc)
    return ExactSeries(tuple(out))


# -- floating summation -------------------------------------------------------


def _min_index(upper: Sequence, lower: Sequence) -> int:
    vals = [float(mp.re(v)) if isinstance(v, (mp.mpf, mp.mpc)) else float(v)
            for v in list(upper) + list(lower)]
    if not vals:
        return 5
    return max(0, math.ceil(-min(vals))) + 5


def _partial_sum(upper, lower, x, eps, max_terms, nmin):
    """Sum the series at the current mp precision.

    Returns ``(sum, peak)`` where ``peak`` is the largest term magnitude seen
    (used by the caller to detect cancellation).
    """
    term = mp.mpf(1)
    total = mp.mpf(1)
    peak = mp.mpf(1)
    quiet = 0
    n = 0
    while True:
        num = mp.mpf(1)
        for a in upper:
            num *= a + n
        if num == 0:
            return total, peak
        den = mp.mpf(n + 1)
        for b in lower:
            den *= b + n
        ratio = num / den
        rho = abs(ratio * x)
        if n > nmin and abs(term) < eps * abs(total) and rho < 1 and \
                abs(term) * rho / (1 - rho) < eps * abs(total):
            quiet += 1
            if quiet >= 3:
                return total, peak
        else:
            quiet = 0
        if ratio * x == 0:
            return total, peak
        term *= ratio * x
        n += 1
        total += term
        mag = abs(term)
        if mag > peak:
            peak = mag
        if n >= max_terms:
            raise ConvergenceError(f"series not converged after {max_terms} terms")


def _sum_series(upper, lower, x, ctx: PrecisionCtx):
    """Sum ``pFq(upper; lower; x)`` to ``ctx.digits`` correct digits.

    Parameters and ``x`` may be rationals or mpmath numbers (``x`` may be
    complex).  Working precision is raised until the cancellation loss
    measured as ``peak / |sum|`` is covered by guard digits.
    """
    nmin = _min_index(upper, lower)
    guard = 10
    cap = 2 * ctx.digits + 40
    while True:
        with mp.workdps(ctx.digits + guard):
            up = [to_mpf(a) for a in upper]
            lo = [to_mpf(b) for b in lower]
            xv = to_mpf(x)
            eps = mp.mpf(ctx.eps)
            total, peak = _partial_sum(up, lo, xv, eps, ctx.max_terms, nmin)
            if total == 0:
                loss = math.inf
            else:
                loss = float(mp.log10(peak / abs(total)))
        if loss <= guard - 3 or guard >= cap:
            return total
        guard = min(cap, int(loss) + 13)


def _check_domain(p: int, q: int, x, upper) -> None:
    terminating = any(_is_nonpositive_integer(a) for a in upper)
    if p > q + 1 and not terminating:
        raise DomainError(f"p={p} > q+1={q + 1}: series diverges for x != 0")
    if p == q + 1 and not terminating and abs(x) >= 1:
        raise DomainError("p = q+1 requires |x| < 1 (analytic continuation not supported)")


def eval_pFq(params: HyperParams, x, ctx: PrecisionCtx | None = None):
    """Evaluate ``pFq(a; b; x)`` for real ``x``.

    >>> with mp.workdps(20): print(eval_pFq(HyperParams((1,), ()), "1/2"))
    2.0
    """
    ctx = _resolve(ctx)
    with mp.workdps(ctx.digits):
        xv = to_mpf(x)
        if isinstance(xv, mp.mpc):
            raise DomainError("complex arguments are not supported")
        _check_domain(params.p, params.q, xv, params.upper)
        if xv == 0:
            return mp.mpf(1)
    return _sum_series(params.upper, params.lower, x, ctx)


def gamma_ratio(upper, lower, ctx: PrecisionCtx | None = None):
    """``prod Gamma(upper) / prod Gamma(lower)`` via log-gamma; all arguments must be > 0."""
    ctx = _resolve(ctx)
    with mp.workdps(ctx.digits + 10):
        acc = mp.mpf(0)
        for a in upper:
            v = to_mpf(a)
            if v <= 0:
                raise DomainError(f"Gamma argument {a} is not positive")
            acc += mp.loggamma(v)
        for b in lower:
            v = to_mpf(b)
            if v <= 0:
                raise DomainError(f"Gamma argument {b} is not positive")
            acc -= mp.loggamma(v)
        return mp.exp(acc)


def _shift(values, mu):
    if isinstance(mu, Fraction):
        return tuple(v + mu for v in values)
    return tuple(to_mpf(v) + mu for v in values)


def eval_f_mu(params: HyperParams, mu, x, ctx: PrecisionCtx | None = None):
    """``Gamma(a2+mu)/Gamma(b2+mu) * pFq(a1, a2+mu; b1, b2+mu; x)``.

    Without a split every parameter belongs to the shifted block.
    """
    ctx = _resolve(ctx)
    if isinstance(mu, (int, str)):
        mu = to_rational(mu)
    with mp.workdps(ctx.digits + 10):
        if not isinstance(mu, Fraction):
            mu = to_mpf(mu)
        if mu < 0:
            raise DomainError("mu must be nonnegative")
        a2 = _shift(params.a2, mu)
        b2 = _shift(params.b2, mu)
        upper = tuple(params.a1) + a2
        lower = tuple(params.b1) + b2
    pref = gamma_ratio(a2, b2, ctx)
    with mp.workdps(ctx.digits):
        xv = to_mpf(x)
        _check_domain(len(upper), len(lower), xv, upper)
    series = _sum_series(upper, lower, x, ctx)
    with mp.workdps(ctx.digits + 10):
        return pref * series


def _derivative_factor(upper, lower, k: int):
    f = Fraction(1)
    for a in upper:
        f *= pochhammer(a, k)
    for b in lower:
        f /= pochhammer(b, k)
    return f


def derivative_pFq(params: HyperParams, x, k: int, ctx: PrecisionCtx | None = None):
    """k-th derivative via ``d/dx pFq(a;b;x) = (a)/(b) pFq(a+1;b+1;x)`` applied k times."""
    if k < 0:
        raise ValueError("derivative order must be nonnegative")
    ctx = _resolve(ctx)
    if k == 0:
        return eval_pFq(params, x, ctx)
    factor = _derivative_factor(params.upper, params.lower, k)
    if factor == 0:
        return mp.mpf(0)
    value = eval_pFq(params.shifted(k), x, ctx)
    with mp.workdps(ctx.digits + 10):
        return to_mpf(factor) * value


def derivative_table(params: HyperParams, x, kmax: int, ctx: PrecisionCtx | None = None) -> list:
    """``[f(x), f'(x), ..., f^(kmax)(x)]`` for ``f = pFq(params)``."""
    return [derivative_pFq(params, x, k, ctx) for k in range(kmax + 1)]

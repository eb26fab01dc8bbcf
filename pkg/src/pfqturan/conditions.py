"""Sufficient conditions on parameters: Muntz polynomials, weak supermajorization,
elementary symmetric polynomial chains and the positivity cases for the
unshifted block."""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath as mp
import numpy as np

from .errors import DimensionError, DomainError
from .hyperfn import PrecisionCtx, _resolve, parse_vector, pochhammer, to_mpf

STRICT_TOL = 1e-30
GOLDEN_WIDTH = 1e-20
DEFAULT_GRID = 4097
# number of grid minima refined at working precision
MAX_REFINED = 24


class MuntzTag(str, enum.Enum):
    VERIFIED_NONNEG = "VerifiedNonneg"
    VIOLATION = "Violation"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class MuntzVerdict:
    tag: MuntzTag
    witness_t: object = None
    witness_value: object = None

    @property
    def ok(self) -> bool:
        return self.tag is MuntzTag.VERIFIED_NONNEG

    def to_dict(self) -> dict:
        return {
            "tag": self.tag.value,
            "witness_t": None if self.witness_t is None else mp.nstr(self.witness_t, 30),
            "witness_value": None if self.witness_value is None else mp.nstr(self.witness_value, 30),
        }


@dataclass(frozen=True)
class EspChainVerdict:
    holds: bool
    first_failing_index: int | None
    ratios: tuple = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {
            "holds": self.holds,
            "first_failing_index": self.first_failing_index,
            "ratios": [str(r) for r in self.ratios],
        }


def _pair_up(a, b):
    a = parse_vector(a)
    b = parse_vector(b)
    if len(a) != len(b):
        raise DimensionError(f"Muntz polynomial needs |a| = |b| (got {len(a)} and {len(b)})")
    if any(v <= 0 for v in a + b):
        raise DomainError("Muntz exponents must be positive")
    # sorting makes identical multisets cancel exactly
    return tuple(sorted(a)), tuple(sorted(b))


def _muntz_mp(a, b, t):
    if t == 0:
        return mp.mpf(0)
    acc = mp.mpf(0)
    for ak, bk in zip(a, b):
        acc += t ** ak - t ** bk
    return acc


def muntz_value(a, b, t, ctx: PrecisionCtx | None = None):
    """``sum_k t**a_k - t**b_k`` on ``[0, 1]``."""
    ctx = _resolve(ctx)
    a, b = _pair_up(a, b)
    with mp.workdps(ctx.digits):
        tv = to_mpf(t)
        if not 0 <= tv <= 1:
            raise DomainError("t must lie in [0, 1]")
        return _muntz_mp([to_mpf(x) for x in a], [to_mpf(x) for x in b], tv)


def _golden_min(fun, lo, hi, width):
    invphi = (mp.sqrt(5) - 1) / 2
    c = hi - invphi * (hi - lo)
    d = lo + invphi * (hi - lo)
    fc, fd = fun(c), fun(d)
    while hi - lo > width:
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - invphi * (hi - lo)
            fc = fun(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + invphi * (hi - lo)
            fd = fun(d)
    return (c, fc) if fc <= fd else (d, fd)


def muntz_nonneg(a, b, grid_size: int = DEFAULT_GRID, ctx: PrecisionCtx | None = None,
                 strict_tol: float = STRICT_TOL) -> MuntzVerdict:
    """Classify ``v_{a,b} >= 0`` on ``[0, 1]``.

    A Chebyshev grid in double precision locates candidate minima; the lowest
    ones are refined by golden-section search at working precision.
    """
    ctx = _resolve(ctx)
    a, b = _pair_up(a, b)
    if a == b or not a:
        return MuntzVerdict(MuntzTag.VERIFIED_NONNEG)
    j = np.arange(grid_size)
    t = 0.5 * (1.0 - np.cos(np.pi * j / (grid_size - 1)))
    af = np.array([float(x) for x in a])
    bf = np.array([float(x) for x in b])
    with np.errstate(divide="ignore", invalid="ignore"):
        v = (t[:, None] ** af).sum(axis=1) - (t[:, None] ** bf).sum(axis=1)
    v[0] = 0.0
    interior = np.flatnonzero((v[1:-1] <= v[:-2]) & (v[1:-1] <= v[2:])) + 1
    order = interior[np.argsort(v[interior], kind="stable")][:MAX_REFINED]
    # the endpoint neighbourhoods are always examined
    candidates = sorted(set(order.tolist()) | {1, grid_size - 2})

    with mp.workdps(ctx.digits):
        amp = [to_mpf(x) for x in a]
        bmp = [to_mpf(x) for x in b]
        fun = lambda s: _muntz_mp(amp, bmp, s)  # noqa: E731
        grid_mp = lambda i: (1 - mp.cos(mp.pi * i / (grid_size - 1))) / 2  # noqa: E731
        best_t, best_v = mp.mpf(0), mp.mpf(0)
        width = mp.mpf(GOLDEN_WIDTH)
        for i in candidates:
            lo, hi = grid_mp(i - 1), grid_mp(i + 1)
            ts, vs = _golden_min(fun, lo, hi, width)
            if vs < best_v:
                best_t, best_v = ts, vs
        tol = mp.mpf(strict_tol)
        if best_v < -tol:
            return MuntzVerdict(MuntzTag.VIOLATION, best_t, best_v)
        if best_v < 0:
            return MuntzVerdict(MuntzTag.INCONCLUSIVE, best_t, best_v)
        return MuntzVerdict(MuntzTag.VERIFIED_NONNEG, None, best_v)


def weak_supermajorize(a, b) -> bool:
    """True when every ascending prefix sum of ``a`` is at most that of ``b``.

    This is the relation b <_w a used as a sufficient condition for
    ``v_{a,b} >= 0``.
    """
    a = sorted(parse_vector(a))
    b = sorted(parse_vector(b))
    if len(a) != len(b):
        raise DimensionError("weak supermajorization needs vectors of equal length")
    if any(v <= 0 for v in a + b):
        raise DomainError("entries must be positive")
    sa = sb = Fraction(0)
    for x, y in zip(a, b):
        sa += x
        sb += y
        if sa > sb:
            return False
    return True


def esp_all(values) -> list[Fraction]:
    """``[e_0, ..., e_n]`` of ``values`` by the product recurrence."""
    e = [Fraction(1)]
    for v in parse_vector(values):
        e.append(Fraction(0))
        for m in range(len(e) - 1, 0, -1):
            e[m] += v * e[m - 1]
    return e


def esp(values, m: int) -> Fraction:
    """m-th elementary symmetric polynomial; zero when ``m > len(values)``."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    e = esp_all(values)
    return e[m] if m < len(e) else Fraction(0)


def _chain(top, bottom) -> EspChainVerdict:
    # ratios e_{P-j}(top) / e_{Q-j}(bottom) for j = 0..Q, P >= Q
    et, eb = esp_all(top), esp_all(bottom)
    P, Q = len(top), len(bottom)
    ratios = tuple(et[P - j] / eb[Q - j] for j in range(Q + 1))
    for j in range(Q):
        if ratios[j] > ratios[j + 1]:
            return EspChainVerdict(False, j, ratios)
    return EspChainVerdict(True, None, ratios)


def _positive_pair(a, b):
    a, b = parse_vector(a), parse_vector(b)
    if any(v <= 0 for v in a + b):
        raise DomainError("chain conditions need positive entries")
    return a, b


def esp_chain_incr(a, b) -> EspChainVerdict:
    """Chain under which ``prod(a+x)/prod(b+x)`` increases on (0, inf); needs p >= q."""
    a, b = _positive_pair(a, b)
    if len(a) < len(b):
        raise DimensionError("incr chain requires p >= q")
    return _chain(a, b)


def esp_chain_decr(a, b) -> EspChainVerdict:
    """Mirror of :func:`esp_chain_incr` with the roles of a and b exchanged; needs p <= q."""
    a, b = _positive_pair(a, b)
    if len(a) > len(b):
        raise DimensionError("decr chain requires p <= q")
    return _chain(b, a)


def rpq_exact(a, b, x) -> Fraction:
    num = Fraction(1)
    for ak in a:
        num *= ak + x
    den = Fraction(1)
    for bk in b:
        den *= bk + x
    return num / den


def rpq_eval(a, b, x, ctx: PrecisionCtx | None = None):
    """``prod(a_k + x) / prod(b_k + x)`` for ``x > 0``."""
    ctx = _resolve(ctx)
    a, b = parse_vector(a), parse_vector(b)
    with mp.workdps(ctx.digits):
        xv = to_mpf(x)
        if xv <= 0:
            raise DomainError("R_{p,q} is evaluated for x > 0 only")
        num = mp.mpf(1)
        for ak in a:
            num *= to_mpf(ak) + xv
        den = mp.mpf(1)
        for bk in b:
            den *= to_mpf(bk) + xv
        return num / den


# -- positivity of the unshifted block -------------------------------------------


def sign_stable_index(a1, b1) -> int:
    """Index beyond which every new Pochhammer factor is positive."""
    vals = list(a1) + list(b1)
    if not vals:
        return 0
    return max(0, math.ceil(-min(vals))) + 1


def positive_sequence(a1, b1, horizon: int = 200) -> bool:
    """Whether ``(a1)_n / (b1)_n > 0`` for every ``n >= 0``.

    Checked exactly for ``n`` up to ``max(horizon, N)`` where ``N`` is the
    sign-stability index; past ``N`` all factors are positive, so the check
    is a certificate rather than a truncation.
    """
    a1, b1 = parse_vector(a1), parse_vector(b1)
    if all(v > 0 for v in a1 + b1):
        return True
    if floor_pairing(a1, b1):
        return True
    n_stop = max(horizon, sign_stable_index(a1, b1))
    value = Fraction(1)
    for n in range(n_stop + 1):
        if value <= 0:
            return False
        for a in a1:
            value *= a + n
        for b in b1:
            value /= b + n
    return True


def floor_pairing(a1, b1) -> bool:
    """Negative entries pair up as ``floor(alpha_i) = floor(beta_i)``, the rest are positive."""
    a1, b1 = parse_vector(a1), parse_vector(b1)
    neg_a = sorted(v for v in a1 if v < 0)
    neg_b = sorted(v for v in b1 if v < 0)
    if any(v == 0 for v in a1 + b1) or len(neg_a) != len(neg_b):
        return False
    if any(v == math.floor(v) for v in neg_b):
        return False
    fa = sorted(math.floor(v) for v in neg_a)
    fb = sorted(math.floor(v) for v in neg_b)
    return fa == fb


def _muntz_ok(a, b, ctx) -> bool:
    if len(a) != len(b):
        return False
    if any(v <= 0 for v in list(a) + list(b)):
        return False
    return muntz_nonneg(a, b, ctx=ctx).ok


def theorem2_case(case: str, a1, b1, x, horizon: int = 200,
                  ctx: PrecisionCtx | None = None) -> bool:
    """Whether the hypotheses of positivity case A, B, C or D hold for ``(a1, b1, x)``."""
    a1, b1 = parse_vector(a1), parse_vector(b1)
    x = Fraction(x) if isinstance(x, (int, Fraction)) else to_rational(str(x))
    p1, q1 = len(a1), len(b1)
    case = case.upper()
    if case == "A":
        if p1 > q1 + 1:
            raise DimensionError("case A needs p1 <= q1 + 1")
        if p1 < q1 + 1:
            x_ok = x >= 0
        else:
            x_ok = 0 <= x < 1
        return x_ok and positive_sequence(a1, b1, horizon)
    if case == "B":
        if not (p1 == q1 + 1 and p1 >= 1):
            raise DimensionError("case B needs p1 = q1 + 1 >= 1")
        if x >= 1:
            return False
        reduced = sorted(a1)[:-1]
        if any(v <= 0 for v in reduced):
            return False
        return not reduced or _muntz_ok(reduced, b1, ctx)
    if case == "C":
        if p1 != q1:
            raise DimensionError("case C needs p1 = q1")
        if any(v <= 0 for v in a1):
            return False
        return p1 == 0 or _muntz_ok(a1, b1, ctx)
    if case == "D":
        if not (p1 == q1 - 1 and p1 >= 1):
            raise DimensionError("case D needs 1 <= p1 = q1 - 1")
        if any(v <= 0 for v in a1):
            return False
        ahat = a1 + (Fraction(3, 2),)
        for k, s in itertools.product(range(q1), range(q1)):
            if ahat[k] <= min(Fraction(1), b1[s] - 1):
                ra = ahat[:k] + ahat[k + 1:]
                rb = b1[:s] + b1[s + 1:]
                if not ra or _muntz_ok(ra, rb, ctx):
                    return True
        return False
    raise ValueError(f"unknown case {case!r}")


def theorem2_cases(a1, b1, x, ctx: PrecisionCtx | None = None) -> list[str]:
    """All positivity cases whose hypotheses hold (dimension mismatches skipped)."""
    held = []
    for case in "ABCD":
        try:
            if theorem2_case(case, a1, b1, x, ctx=ctx):
                held.append(case)
        except DimensionError:
            continue
    return held

"""Extended Laguerre operators, Laguerre-Polya membership and zeros of entire pFq."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath as mp
import numpy as np

from .errors import DomainError, TruncationError
from .hyperfn import (
    HyperParams,
    PrecisionCtx,
    _resolve,
    _sum_series,
    derivative_table,
    to_mpf,
)

MAX_DEGREE = 400
REAL_TOL = 1e-20


def laguerre_inequality(params: HyperParams, x, ctx: PrecisionCtx | None = None):
    """``f'(x)**2 - f(x) f''(x)`` for ``f = pFq(params)``."""
    ctx = _resolve(ctx)
    f0, f1, f2 = derivative_table(params, x, 2, ctx)
    with mp.workdps(ctx.digits + 10):
        return f1 * f1 - f0 * f2


def laguerre_Ln(params: HyperParams, x, n: int, ctx: PrecisionCtx | None = None):
    """``sum_{k=0}^{2n} (-1)^(k+n) C(2n,k) f^(k) f^(2n-k) / (2n)!`` from one derivative table."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    ctx = _resolve(ctx)
    table = derivative_table(params, x, 2 * n, ctx)
    return _ln_from_table(table, n, ctx)


def _ln_from_table(table, n, ctx, with_scale=False):
    with mp.workdps(ctx.digits + 10):
        acc = mp.mpf(0)
        mag = mp.mpf(0)
        for k in range(2 * n + 1):
            term = math.comb(2 * n, k) * table[k] * table[2 * n - k]
            acc += (-1) ** (k + n) * term
            mag += abs(term)
        den = math.factorial(2 * n)
        return (acc / den, mag / den) if with_scale else acc / den


def laguerre_Ln_all(params: HyperParams, x, n_max: int, ctx: PrecisionCtx | None = None,
                    with_scale: bool = False) -> list:
    """``[L_0, ..., L_{n_max}]`` at ``x`` sharing a single derivative table.

    With ``with_scale`` each entry is ``(L_n, sum of |terms|)``, the size
    against which cancellation error should be judged.
    """
    ctx = _resolve(ctx)
    table = derivative_table(params, x, 2 * n_max, ctx)
    return [_ln_from_table(table, n, ctx, with_scale) for n in range(n_max + 1)]


@dataclass(frozen=True)
class LPVerdict:
    member: bool
    matching: tuple | None = None
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "member": self.member,
            "matching": None if self.matching is None else [list(m) for m in self.matching],
            "note": self.note,
        }


def _match(upper, lower) -> list | None:
    # Kuhn's augmenting paths over edges a_i - b_j in N_0
    adj = [[j for j, b in enumerate(lower) if (a - b).denominator == 1 and a - b >= 0]
           for a in upper]
    owner = [-1] * len(lower)

    def augment(i, seen):
        for j in adj[i]:
            if j in seen:
                continue
            seen.add(j)
            if owner[j] < 0 or augment(owner[j], seen):
                owner[j] = i
                return True
        return False

    for i in range(len(upper)):
        if not augment(i, set()):
            return None
    pairs = sorted((owner[j], j) for j in range(len(lower)) if owner[j] >= 0)
    return [(i, j, int(upper[i] - lower[j])) for i, j in pairs]


def lp_membership(params: HyperParams) -> LPVerdict:
    """Sufficient parameter condition for ``pFq`` to lie in the Laguerre-Polya class.

    Requires ``p <= q``, positive parameters and an injective assignment of each
    upper parameter to a lower one with a nonnegative integer difference.
    """
    a, b = params.upper, params.lower
    note = ""
    if params.p < params.q:
        note = "p < q: each upper parameter matched to a distinct lower one; unmatched lower parameters are free"
    if params.p > params.q:
        return LPVerdict(False, None, "p > q")
    if any(v <= 0 for v in a + b):
        return LPVerdict(False, None, "parameters must be positive")
    matching = _match(a, b)
    if matching is None:
        return LPVerdict(False, None, note or "no integer-difference matching")
    return LPVerdict(True, tuple(matching), note)


# -- zeros ---------------------------------------------------------------------


@dataclass
class ZeroSet:
    zeros: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    truncation_degree: int = 0
    radius: object = None
    discarded: int = 0

    def __len__(self):
        return len(self.zeros)

    def to_dict(self, digits: int = 40) -> dict:
        return {
            "zeros": [[mp.nstr(mp.re(z), digits), mp.nstr(mp.im(z), digits)] for z in self.zeros],
            "residuals": [mp.nstr(r, 5) for r in self.residuals],
            "truncation_degree": self.truncation_degree,
            "radius": None if self.radius is None else mp.nstr(self.radius, 10),
            "discarded": self.discarded,
        }


def _taylor_mp(params: HyperParams, order: int) -> list:
    c = mp.mpf(1)
    out = [c]
    up = [to_mpf(a) for a in params.upper]
    lo = [to_mpf(b) for b in params.lower]
    for n in range(order):
        num = mp.mpf(1)
        for a in up:
            num *= a + n
        den = mp.mpf(n + 1)
        for b in lo:
            den *= b + n
        c = c * num / den
        out.append(c)
        if c == 0:
            break
    return out


def truncation_degree(params: HyperParams, radius, digits: int, max_degree: int = MAX_DEGREE) -> int:
    """Smallest degree whose dropped tail on ``|z| <= radius`` is below ``10**-(digits-10)``
    relative to the largest term."""
    with mp.workdps(digits + 10):
        R = to_mpf(radius)
        coeffs = _taylor_mp(params, max_degree + 1)
        if coeffs[-1] == 0:
            return len(coeffs) - 2 if len(coeffs) > 1 else 0
        mags = [abs(c) * R ** n for n, c in enumerate(coeffs)]
        peak = max(mags)
        tol = peak * mp.mpf(10) ** (-(digits - 10))
        for n in range(1, len(mags) - 1):
            # geometric tail bound once successive ratios fall below 1/2
            if mags[n] < tol and mags[n + 1] <= mags[n] / 2:
                return n - 1
    raise TruncationError(f"no truncation degree <= {max_degree} for radius {radius}")


def _log10_peak(upper, lower, r: float) -> float:
    """log10 of the largest term magnitude of the series at ``|z| = r`` (double precision)."""
    up = [float(v) for v in upper]
    lo = [float(v) for v in lower]
    if r == 0:
        return 0.0
    logt = best = 0.0
    lr = math.log10(r)
    for n in range(100_000):
        num = 1.0
        for a in up:
            num *= abs(a + n)
        if num == 0:
            break
        den = float(n + 1)
        for b in lo:
            den *= abs(b + n)
        step = math.log10(num / den) + lr
        logt += step
        best = max(best, logt)
        if step < -0.3 and n > 5 + max([0.0] + [-v for v in up + lo]):
            break
    return best


def _value_and_slope(upper, lower, z, digits: int):
    """``(f(z), f'(z))`` from one pass over the series with precision fixed in advance."""
    peak = _log10_peak(upper, lower, float(abs(z)))
    dps = digits + 10 + max(0, math.ceil(peak))
    with mp.workdps(dps):
        z = +z
        up = [to_mpf(a) for a in upper]
        lo = [to_mpf(b) for b in lower]
        tol = mp.mpf(10) ** (peak - dps)
        c = mp.mpf(1)
        zn = mp.mpf(1)
        f = mp.mpf(1)
        df = mp.mpf(0)
        n = 0
        nmin = 5 + max([0] + [math.ceil(-float(v)) for v in list(upper) + list(lower)])
        while True:
            num = mp.mpf(1)
            for a in up:
                num *= a + n
            if num == 0:
                break
            den = mp.mpf(n + 1)
            for b in lo:
                den *= b + n
            c = c * num / den
            df += (n + 1) * c * zn
            zn *= z
            term = c * zn
            f += term
            n += 1
            if n > nmin and abs(term) * (n + 1) * max(1, abs(z)) < tol and \
                    abs(num / den * z) < mp.mpf(1) / 2:
                break
        return f, df


def _newton_stage(params, z, digits, step_digits, maxiter, radius):
    up, lo = params.upper, params.lower
    for _ in range(maxiter):
        f, d = _value_and_slope(up, lo, z, digits)
        with mp.workdps(digits + 10):
            if d == 0:
                return None
            step = f / d
            z = z - step
            if abs(z) > 1.5 * radius:
                return None
            if abs(step) <= mp.mpf(10) ** (-step_digits) * max(1, abs(z)):
                return z
    return None


def _newton(params: HyperParams, z0, ctx: PrecisionCtx, radius):
    """Newton refinement: 20-digit iterations, then a full-precision polish.

    Returns ``(z, |f(z)|, |f'(z)|)`` or ``None`` when either stage fails.
    """
    z = _newton_stage(params, z0, 20, 14, 30, radius)
    if z is None:
        return None
    z = _newton_stage(params, z, ctx.digits, ctx.digits - 3, 8, radius)
    if z is None:
        return None
    f, d = _value_and_slope(params.upper, params.lower, z, ctx.digits)
    with mp.workdps(ctx.digits + 10):
        return +z, abs(f), abs(d)


def _real_bracket_candidates(params, R, samples):
    # sign detection only: 20 digits suffice, cancellation guard adds the rest
    rough = PrecisionCtx(20, 1e-15)
    xs = np.linspace(-float(R), float(R), samples)
    vals = []
    for x in xs:
        v = _sum_series(params.upper, params.lower, mp.mpf(float(x)), rough)
        vals.append(mp.sign(v))
    out = []
    for i in range(len(xs) - 1):
        if vals[i] * vals[i + 1] < 0:
            out.append(0.5 * (xs[i] + xs[i + 1]))
    return out


def _zeros_in_disk(params, R, ctx, degree_hint, max_degree):
    deg = truncation_degree(params, R, ctx.digits, max_degree)
    if degree_hint:
        deg = max(deg, int(degree_hint))
        if deg > max_degree:
            raise TruncationError(f"degree {deg} exceeds cap {max_degree}")
    candidates = []
    if deg >= 1:
        with mp.workdps(ctx.digits + 10):
            Rm = to_mpf(R)
            coeffs = _taylor_mp(params, deg)[: deg + 1]
            scaled = [c * Rm ** n for n, c in enumerate(coeffs)]
            peak = max(abs(s) for s in scaled)
            poly = np.array([float(s / peak) for s in reversed(scaled)])
        nz = np.flatnonzero(poly)
        if nz.size:
            poly = poly[nz[0]:]
        if poly.size > 1:
            roots = np.roots(poly) * float(R)
            candidates.extend(complex(r) for r in roots if abs(r) <= 0.9 * float(R))
    candidates.extend(complex(x, 0.0) for x in _real_bracket_candidates(params, R, 241))

    found = []
    discarded = 0
    with mp.workdps(ctx.digits):
        res_tol = mp.mpf(10) ** (-(ctx.digits - 20))
        merge_tol = mp.mpf(10) ** (-(ctx.digits // 2))
    for c in candidates:
        z0 = mp.mpf(c.real) if abs(c.imag) < 1e-12 * max(1.0, abs(c)) else mp.mpc(c.real, c.imag)
        out = _newton(params, z0, ctx, R)
        if out is None:
            discarded += 1
            continue
        z, fz, dz = out
        with mp.workdps(ctx.digits + 10):
            if abs(z) > R:
                continue
            if fz >= res_tol * max(1, dz * abs(z)):
                discarded += 1
                continue
            if any(abs(z - w) <= merge_tol * max(1, abs(z)) for w, _ in found):
                continue
            found.append((z, fz))
    return found, deg, discarded


def _sort_key(item):
    z = item[0]
    return (float(abs(z)), float(mp.im(z)))


def find_zeros(params: HyperParams, ctx: PrecisionCtx | None = None, degree_hint: int | None = None,
               radius=None, max_degree: int = MAX_DEGREE, max_radius=64) -> ZeroSet:
    """Zeros of the entire function ``pFq(params; z)`` (p <= q) inside an adaptive disk.

    Candidates come from the roots of the truncated Taylor polynomial and from
    sign changes on the real axis; each is refined by Newton's method on the
    full series and kept only if its residual is below ``10**-(digits-20)``
    relative to ``max(1, |f'(z) z|)``.

    For ``p = q`` the radius doubles from 8 until the zero count stabilises or
    ``max_radius`` is reached; for
    ``p < q`` (infinitely many zeros) a fixed disk of radius 50 is searched
    unless ``radius`` is given.
    """
    ctx = _resolve(ctx)
    if params.p > params.q:
        raise DomainError("zero search needs an entire function (p <= q)")
    if radius is not None:
        found, deg, disc = _zeros_in_disk(params, radius, ctx, degree_hint, max_degree)
        R = radius
    elif params.p < params.q:
        R = 50
        found, deg, disc = _zeros_in_disk(params, R, ctx, degree_hint, max_degree)
    else:
        R = 8
        found, deg, disc = _zeros_in_disk(params, R, ctx, degree_hint, max_degree)
        while 2 * R <= max_radius:
            try:
                nxt = _zeros_in_disk(params, 2 * R, ctx, degree_hint, max_degree)
            except TruncationError:
                break
            stable = len(nxt[0]) == len(found)
            R *= 2
            found, deg, disc = nxt
            if stable:
                break
    found.sort(key=_sort_key)
    return ZeroSet([z for z, _ in found], [r for _, r in found], deg, mp.mpf(R), disc)


def check_zeros_real_negative(zeros, tol: float = REAL_TOL):
    """``(True, None)`` when every zero is real (within ``tol*max(1,|z|)``) and negative,
    else ``(False, offending_zero)``."""
    items = zeros.zeros if isinstance(zeros, ZeroSet) else list(zeros)
    for z in items:
        z = mp.mpc(z)
        if abs(mp.im(z)) > tol * max(1, abs(z)) or mp.re(z) >= 0:
            return False, z
    return True, None

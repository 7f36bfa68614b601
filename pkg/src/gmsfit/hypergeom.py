"""
Gauss hypergeometric function 2F1(a, b; c; z) for real arguments, |z| <= 1.

Summation uses the term-ratio recurrence

    t_{k+1} = t_k * (a + k)(b + k) z / ((c + k)(k + 1))

and stops once two consecutive terms are below ``rel_tol`` relative to the
partial sum *and* a geometric bound on the remaining tail is below the same
tolerance. Negative z goes through the Pfaff transformation. Near z = 1 the Euler
transformation is applied; very close to
z = 1 the 1 - z connection formula is used when c - a - b is not an integer.
z = 1 itself is evaluated by Gauss summation in log-gamma space.

Both a scalar path (:func:`hyp2f1`) and a vectorised path
(:func:`hyp2f1_array`) are provided. They perform the same floating point
operations in the same order, so they agree bit for bit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NonConvergence

__all__ = [
    "SeriesControl",
    "HypParams",
    "DEFAULT_CONTROL",
    "pochhammer",
    "lgamma_signed",
    "hyp2f1",
    "hyp2f1_series",
    "hyp2f1_euler",
    "hyp2f1_at_one",
    "hyp2f1_array",
]

# Connection formula is tried once the direct series would need more terms
# than this; below it the Euler route is cheap enough.
_CONNECTION_TERM_ESTIMATE = 20_000
# Reject a connection-formula result when the two pieces cancel by more
# than this factor.
_MAX_CANCELLATION = 1e3
# Negative arguments go through the Pfaff transformation.
_PFAFF_BELOW = 0.0


@dataclass(frozen=True)
class SeriesControl:
    """Truncation policy for 2F1 summation."""

    rel_tol: float = 1e-14
    max_terms: int = 2_000_000
    boundary_switch: float = 0.75

    def __post_init__(self):
        if not (0.0 < self.rel_tol < 1e-6):
            raise DomainError(f"rel_tol must lie in (0, 1e-6), got {self.rel_tol}")
        if self.max_terms < 1000:
            raise DomainError(f"max_terms must be >= 1000, got {self.max_terms}")
        if not (0.5 <= self.boundary_switch < 1.0):
            raise DomainError(
                f"boundary_switch must lie in [0.5, 1), got {self.boundary_switch}"
            )


DEFAULT_CONTROL = SeriesControl()


def _is_nonpositive_int(x: float) -> bool:
    return x <= 0 and x == math.floor(x)


def _is_int(x: float) -> bool:
    return x == math.floor(x)


@dataclass(frozen=True)
class HypParams:
    a: float
    b: float
    c: float
    z: float

    def __post_init__(self):
        for name in ("a", "b", "c", "z"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if _is_nonpositive_int(self.c):
            raise DomainError(f"c must not be zero or a negative integer, got {self.c}")
        if abs(self.z) > 1.0:
            raise DomainError(f"|z| must be <= 1, got z={self.z}")
        if self.z == 1.0 and not self._terminates() and self.c - self.a - self.b <= 0:
            raise DomainError(
                f"series diverges at z=1 unless c-a-b > 0 (c-a-b={self.c - self.a - self.b})"
            )
        if self.z == -1.0 and not self._terminates() and self.c - self.a - self.b <= -1:
            raise DomainError("series diverges at z=-1 unless c-a-b > -1")

    def _terminates(self) -> bool:
        return _is_nonpositive_int(self.a) or _is_nonpositive_int(self.b)


def pochhammer(a: float, k: int) -> float:
    """Rising factorial a(a+1)...(a+k-1), with (a)_0 = 1."""
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    out = 1.0
    for j in range(k):
        out *= a + j
    return out


def lgamma_signed(x: float) -> tuple[float, int]:
    """Return (log|Gamma(x)|, sign Gamma(x)). Poles give (inf, 0)."""
    if _is_nonpositive_int(x):
        return math.inf, 0
    if x > 0:
        return math.lgamma(x), 1
    sign = -1 if math.floor(-x) % 2 == 0 else 1
    return math.lgamma(x), sign


def _gamma_quotient(num: tuple[float, ...], den: tuple[float, ...]) -> float:
    """prod Gamma(num) / prod Gamma(den) in log space. Poles in den give 0."""
    log_total = 0.0
    sign = 1
    for x in den:
        lg, s = lgamma_signed(x)
        if s == 0:
            return 0.0
        log_total -= lg
        sign *= s
    for x in num:
        lg, s = lgamma_signed(x)
        if s == 0:
            raise DomainError(f"Gamma pole at {x} in numerator")
        log_total += lg
        sign *= s
    return sign * math.exp(log_total)


def _tail_ratio(a: float, b: float, c: float, z: float, j: int) -> float:
    # Bound on |t_{i+1}/t_i| for i >= j once the ratio sequence is monotone.
    g = abs((a + j) * (b + j) / ((c + j) * (j + 1)))
    return abs(z) * max(g, 1.0)


def hyp2f1_series(a: float, b: float, c: float, z: float,
                  ctrl: SeriesControl = DEFAULT_CONTROL) -> float:
    """Direct power series, no transformations. Requires |z| < 1 or termination."""
    rel_tol = ctrl.rel_tol
    term = 1.0
    total = 1.0
    small = 0
    for k in range(ctrl.max_terms):
        coef = (a + k) * (b + k) / ((c + k) * (k + 1))
        term *= coef * z
        total += term
        if term == 0.0:
            return total
        if abs(term) <= rel_tol * abs(total):
            small += 1
            if small >= 2:
                r = _tail_ratio(a, b, c, z, k + 1)
                if r < 1.0 and abs(term) * r / (1.0 - r) <= rel_tol * abs(total):
                    return total
        else:
            small = 0
    raise NonConvergence(
        f"2F1({a}, {b}; {c}; {z}) not converged after {ctrl.max_terms} terms"
    )


def hyp2f1_euler(a: float, b: float, c: float, z: float,
                 ctrl: SeriesControl = DEFAULT_CONTROL) -> float:
    """Evaluate through 2F1(a,b;c;z) = (1-z)^(c-a-b) 2F1(c-a,c-b;c;z)."""
    return (1.0 - z) ** (c - a - b) * hyp2f1_series(c - a, c - b, c, z, ctrl)


def _connection(a: float, b: float, c: float, z: float,
                ctrl: SeriesControl) -> float | None:
    """1 - z connection formula for non-integer c - a - b.

    Returns None when the two pieces cancel too strongly to trust.
    """
    s = c - a - b
    w = 1.0 - z
    first_coef = _gamma_quotient((c, s), (c - a, c - b))
    second_coef = _gamma_quotient((c, -s), (a, b))
    first = 0.0
    second = 0.0
    if first_coef != 0.0:
        first = first_coef * hyp2f1_series(a, b, 1.0 - s, w, ctrl)
    if second_coef != 0.0:
        second = second_coef * w**s * hyp2f1_series(c - a, c - b, s + 1.0, w, ctrl)
    value = first + second
    if abs(first) + abs(second) > _MAX_CANCELLATION * abs(value):
        return None
    return value


def _pfaff_order(a: float, b: float, c: float) -> tuple[float, float]:
    # 2F1(a,b;c;z) = (1-z)^-a 2F1(a, c-b; c; z/(z-1)), with a and b swapped
    # when that keeps the new parameters further from negative values.
    if min(b, c - a) > min(a, c - b):
        return b, a
    return a, b


def _euler_safe(a: float, b: float, c: float) -> bool:
    # The transform turns a positive-term series into an alternating one
    # when c - a or c - b is negative; skip it in that case.
    lowest = min(c - a, c - b)
    return lowest >= 0 or lowest >= min(a, b)


def _wants_connection(a: float, b: float, c: float, z: float,
                      ctrl: SeriesControl) -> bool:
    if _is_int(c - a - b):
        return False
    return math.log(1.0 / ctrl.rel_tol) / (1.0 - z) > _CONNECTION_TERM_ESTIMATE


def hyp2f1_at_one(a: float, b: float, c: float) -> float:
    """Gauss summation Gamma(c)Gamma(c-a-b) / (Gamma(c-a)Gamma(c-b))."""
    if _is_nonpositive_int(c):
        raise DomainError(f"c must not be zero or a negative integer, got {c}")
    if a == 0.0 or b == 0.0:
        return 1.0
    if c - a - b <= 0:
        raise DomainError(f"Gauss summation needs c-a-b > 0, got {c - a - b}")
    return _gamma_quotient((c, c - a - b), (c - a, c - b))


def hyp2f1(a: float, b: float, c: float, z: float,
           ctrl: SeriesControl = DEFAULT_CONTROL) -> float:
    """2F1(a, b; c; z) for real parameters and -1 <= z <= 1."""
    HypParams(a, b, c, z)
    if z == 0.0 or a == 0.0 or b == 0.0:
        return 1.0
    if z == 1.0:
        return hyp2f1_at_one(a, b, c)
    if _is_nonpositive_int(a) or _is_nonpositive_int(b):
        return hyp2f1_series(a, b, c, z, ctrl)
    if z < _PFAFF_BELOW:
        a, b = _pfaff_order(a, b, c)
        return (1.0 - z) ** (-a) * hyp2f1_series(a, c - b, c, z / (z - 1.0), ctrl)
    if z > ctrl.boundary_switch:
        if _wants_connection(a, b, c, z, ctrl):
            value = _connection(a, b, c, z, ctrl)
            if value is not None:
                return value
        if _euler_safe(a, b, c):
            return hyp2f1_euler(a, b, c, z, ctrl)
    return hyp2f1_series(a, b, c, z, ctrl)


# -- vectorised path ---------------------------------------------------------

def _series_array(a: float, b: float, c: float, z: np.ndarray,
                  ctrl: SeriesControl) -> np.ndarray:
    out = np.empty_like(z)
    if z.size == 0:
        return out
    rel_tol = ctrl.rel_tol
    idx = np.arange(z.size)
    zz = z.copy()
    term = np.ones_like(z)
    total = np.ones_like(z)
    small = np.zeros(z.size, dtype=np.int64)
    for k in range(ctrl.max_terms):
        coef = (a + k) * (b + k) / ((c + k) * (k + 1))
        term *= coef * zz
        total += term
        if coef == 0.0:
            out[idx] = total
            return out
        below = np.abs(term) <= rel_tol * np.abs(total)
        small = np.where(below, small + 1, 0)
        g = abs((a + k + 1) * (b + k + 1) / ((c + k + 1) * (k + 2)))
        r = np.abs(zz) * max(g, 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            tail_ok = (r < 1.0) & (np.abs(term) * r / (1.0 - r) <= rel_tol * np.abs(total))
        done = (term == 0.0) | ((small >= 2) & tail_ok)
        if done.any():
            out[idx[done]] = total[done]
            keep = ~done
            if not keep.any():
                return out
            idx, zz, term, total, small = idx[keep], zz[keep], term[keep], total[keep], small[keep]
    raise NonConvergence(
        f"2F1({a}, {b}; {c}; z) not converged after {ctrl.max_terms} terms "
        f"for {idx.size} argument(s), max z={zz.max()}"
    )


def _pow_each(x: np.ndarray, y: float) -> np.ndarray:
    # libm pow per element so results match the scalar path exactly
    return np.array([v**y for v in x.tolist()])


def hyp2f1_array(a: float, b: float, c: float, z,
                 ctrl: SeriesControl = DEFAULT_CONTROL) -> np.ndarray:
    """Vectorised :func:`hyp2f1` over an array of arguments."""
    z = np.asarray(z, dtype=float)
    flat = z.ravel()
    if flat.size:
        HypParams(a, b, c, float(flat.max()))
        HypParams(a, b, c, float(flat.min()))
    out = np.ones_like(flat)
    if a == 0.0 or b == 0.0 or flat.size == 0:
        return out.reshape(z.shape)

    at_one = flat == 1.0
    if at_one.any():
        out[at_one] = hyp2f1_at_one(a, b, c)
    rest = (flat != 0.0) & ~at_one

    if _is_nonpositive_int(a) or _is_nonpositive_int(b):
        sel = np.flatnonzero(rest)
        out[sel] = _series_array(a, b, c, flat[sel], ctrl)
        return out.reshape(z.shape)

    pfaff = rest & (flat < _PFAFF_BELOW)
    if pfaff.any():
        zp = flat[pfaff]
        pa, pb = _pfaff_order(a, b, c)
        out[pfaff] = _pow_each(1.0 - zp, -pa) * _series_array(pa, c - pb, c, zp / (zp - 1.0), ctrl)

    high = rest & (flat > ctrl.boundary_switch)
    pending = high.copy()
    if high.any() and not _is_int(c - a - b):
        near = high & (np.log(1.0 / ctrl.rel_tol) / (1.0 - np.where(high, flat, 0.0))
                       > _CONNECTION_TERM_ESTIMATE)
        for i in np.flatnonzero(near):
            value = _connection(a, b, c, float(flat[i]), ctrl)
            if value is not None:
                out[i] = value
                pending[i] = False
    if pending.any() and _euler_safe(a, b, c):
        ze = flat[pending]
        out[pending] = _pow_each(1.0 - ze, c - a - b) * _series_array(c - a, c - b, c, ze, ctrl)
        pending[:] = False

    low = rest & ~pfaff & (~high | pending)
    if low.any():
        out[low] = _series_array(a, b, c, flat[low], ctrl)
    return out.reshape(z.shape)

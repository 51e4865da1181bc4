"""Exact symbolic volumes and their log-space evaluation.

Every closed-form quantity here is a product of: a rational coefficient,
rational powers of 2, 3 and pi, and integer powers of Gamma(i/2), zeta(i)
and i!.  :class:`SymbolicVolume` keeps those exponents exact (Fractions
and ints), so identities between formulas can be checked with zero drift;
floats only appear when ``log_value``/``value`` are called.

Gamma(i/2) factors are rewritten into the factorial/pi/2 basis on
construction (Gamma(m) = (m-1)!, Gamma(m + 1/2) = sqrt(pi) (2m)!/(4^m m!)),
which makes equal quantities structurally equal and keeps printed forms
clean.  Arbitrary positive constants (a non-canonical Siegel parameter t,
say) are tracked as labeled numeric factors with exact exponents.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import InvalidArgumentError
from .iwasawa import MINIMAL_PARAMS, SiegelParams

_LN2 = math.log(2.0)
_LN3 = math.log(3.0)
_LNPI = math.log(math.pi)

# Bernoulli numbers B_2 .. B_20 for the Euler-Maclaurin tail.
_BERNOULLI = (
    Fraction(1, 6),
    Fraction(-1, 30),
    Fraction(1, 42),
    Fraction(-1, 30),
    Fraction(5, 66),
    Fraction(-691, 2730),
    Fraction(7, 6),
    Fraction(-3617, 510),
    Fraction(43867, 798),
    Fraction(-174611, 330),
)

_ZETA_CUTOFF = 16


@lru_cache(maxsize=None)
def _zeta_default(s: int) -> float:
    total = math.fsum(k ** -float(s) for k in range(1, _ZETA_CUTOFF))
    n = float(_ZETA_CUTOFF)
    total += 0.5 * n ** -float(s)
    total += n ** (1.0 - s) / (s - 1.0)
    rising = float(s)
    npow = n ** (-float(s) - 1.0)
    for j, bern in enumerate(_BERNOULLI, start=1):
        total += float(bern) / math.factorial(2 * j) * rising * npow
        rising *= (s + 2 * j - 1) * (s + 2 * j)
        npow /= n * n
    return total


def zeta(s: int, rel_tol: float = 1e-14) -> float:
    """Riemann zeta at an integer s >= 2.

    Direct summation to a fixed cutoff plus the Euler-Maclaurin tail with
    Bernoulli corrections through B_20; the first omitted term is below
    1e-20 relative for every s >= 2, so the result is correct to binary64
    rounding.  Tolerances tighter than 1e-15 are outside what binary64
    can certify and are rejected.
    """
    if not isinstance(s, (int, np.integer)) or s < 2:
        raise InvalidArgumentError(f"zeta requires an integer s >= 2, got {s!r}")
    if rel_tol < 1e-15:
        raise InvalidArgumentError("rel_tol below 1e-15 is not attainable in binary64")
    return _zeta_default(int(s))


def _merge(d1: dict, d2: dict, sign: int) -> dict:
    out = dict(d1)
    for key, exp in d2.items():
        new = out.get(key, 0) + sign * exp
        if new:
            out[key] = new
        else:
            out.pop(key, None)
    return out


def _scale(d: dict, mult: int) -> dict:
    return {k: v * mult for k, v in d.items() if v * mult}


def _adic_split(value: int, base: int) -> tuple[int, int]:
    exp = 0
    while value % base == 0:
        value //= base
        exp += 1
    return value, exp


def _split_coeff(c: Fraction) -> tuple[Fraction, Fraction, Fraction]:
    """Factor a rational as (rest, pow2, pow3) with rest coprime to 6."""
    num, den = abs(c.numerator), c.denominator
    num, a2 = _adic_split(num, 2)
    num, a3 = _adic_split(num, 3)
    den, b2 = _adic_split(den, 2)
    den, b3 = _adic_split(den, 3)
    rest = Fraction(num, den)
    if c < 0:
        rest = -rest
    return rest, Fraction(a2 - b2), Fraction(a3 - b3)


@dataclass(frozen=True)
class SymbolicVolume:
    """Exact multiplicative expression with a log-space evaluator.

    Fields hold exact exponents: ``pow2``/``pow3``/``pow_pi`` are rational,
    the maps give integer exponents per Gamma(i/2), zeta(i), i! factor, and
    ``numeric`` holds exact rational exponents of arbitrary positive floats.
    Multiplication and division add exponents exactly; nothing is rounded
    until ``log_value``/``value``.
    """

    coeff: Fraction = Fraction(1)
    pow2: Fraction = Fraction(0)
    pow3: Fraction = Fraction(0)
    pow_pi: Fraction = Fraction(0)
    gamma_half: dict = field(default_factory=dict)  # i -> exponent of Gamma(i/2)
    zeta_pow: dict = field(default_factory=dict)  # i -> exponent of zeta(i)
    factorial: dict = field(default_factory=dict)  # i -> exponent of i!
    numeric: dict = field(default_factory=dict)  # float base -> Fraction exponent

    # --- constructors ---

    @classmethod
    def one(cls) -> "SymbolicVolume":
        return cls()

    @classmethod
    def rational(cls, p, q=1) -> "SymbolicVolume":
        c = Fraction(p, q)
        if c == 0:
            raise InvalidArgumentError("volumes are nonzero")
        rest, p2, p3 = _split_coeff(c)
        return cls(coeff=rest, pow2=p2, pow3=p3)

    @classmethod
    def two_pow(cls, exp) -> "SymbolicVolume":
        return cls(pow2=Fraction(exp))

    @classmethod
    def three_pow(cls, exp) -> "SymbolicVolume":
        return cls(pow3=Fraction(exp))

    @classmethod
    def pi_pow(cls, exp) -> "SymbolicVolume":
        return cls(pow_pi=Fraction(exp))

    @classmethod
    def zeta_factor(cls, i: int, exp: int = 1) -> "SymbolicVolume":
        if i < 2:
            raise InvalidArgumentError("zeta factors need i >= 2")
        return cls(zeta_pow={i: exp} if exp else {})

    @classmethod
    def factorial_factor(cls, i: int, exp: int = 1) -> "SymbolicVolume":
        """i! to an integer power, folded so that 0!, 1! vanish and 2! -> 2."""
        if i < 0:
            raise InvalidArgumentError("factorial factors need i >= 0")
        if exp == 0 or i <= 1:
            return cls()
        if i == 2:
            return cls(pow2=Fraction(exp))
        return cls(factorial={i: exp})

    @classmethod
    def gamma_half_factor(cls, i: int, exp: int = 1) -> "SymbolicVolume":
        """Gamma(i/2) to an integer power, rewritten into the factorial basis.

        Even i = 2m: Gamma(m) = (m-1)!.  Odd i = 2m+1:
        Gamma(m + 1/2) = sqrt(pi) * (2m)! / (4**m * m!).
        """
        if i < 1:
            raise InvalidArgumentError("gamma factors need i >= 1")
        if exp == 0:
            return cls()
        if i % 2 == 0:
            return cls.factorial_factor(i // 2 - 1, exp)
        m = (i - 1) // 2
        out = cls(pow_pi=Fraction(exp, 2), pow2=Fraction(-2 * m * exp))
        out = out * cls.factorial_factor(2 * m, exp) * cls.factorial_factor(m, -exp)
        return out

    @classmethod
    def numeric_factor(cls, base: float, exp) -> "SymbolicVolume":
        """base**exp for an arbitrary positive base, recognizing bases that
        are exactly expressible through 2 and 3 (1, 2, 1/2, 4, 3, 2/sqrt(3))."""
        exp = Fraction(exp)
        base = float(base)
        if base <= 0.0 or not math.isfinite(base):
            raise InvalidArgumentError("numeric bases must be positive and finite")
        if exp == 0 or base == 1.0:
            return cls()
        if base == 2.0:
            return cls(pow2=exp)
        if base == 0.5:
            return cls(pow2=-exp)
        if base == 4.0:
            return cls(pow2=2 * exp)
        if base == 3.0:
            return cls(pow3=exp)
        if base == 2.0 / math.sqrt(3.0):
            return cls(pow2=exp, pow3=-exp / 2)
        return cls(numeric={base: exp})

    # --- algebra ---

    def __mul__(self, other: "SymbolicVolume") -> "SymbolicVolume":
        return SymbolicVolume(
            coeff=self.coeff * other.coeff,
            pow2=self.pow2 + other.pow2,
            pow3=self.pow3 + other.pow3,
            pow_pi=self.pow_pi + other.pow_pi,
            gamma_half=_merge(self.gamma_half, other.gamma_half, +1),
            zeta_pow=_merge(self.zeta_pow, other.zeta_pow, +1),
            factorial=_merge(self.factorial, other.factorial, +1),
            numeric=_merge(self.numeric, other.numeric, +1),
        )

    def __truediv__(self, other: "SymbolicVolume") -> "SymbolicVolume":
        return SymbolicVolume(
            coeff=self.coeff / other.coeff,
            pow2=self.pow2 - other.pow2,
            pow3=self.pow3 - other.pow3,
            pow_pi=self.pow_pi - other.pow_pi,
            gamma_half=_merge(self.gamma_half, other.gamma_half, -1),
            zeta_pow=_merge(self.zeta_pow, other.zeta_pow, -1),
            factorial=_merge(self.factorial, other.factorial, -1),
            numeric=_merge(self.numeric, other.numeric, -1),
        )

    def __pow__(self, exp: int) -> "SymbolicVolume":
        if not isinstance(exp, int):
            raise InvalidArgumentError("only integer powers of expressions")
        return SymbolicVolume(
            coeff=self.coeff**exp,
            pow2=self.pow2 * exp,
            pow3=self.pow3 * exp,
            pow_pi=self.pow_pi * exp,
            gamma_half=_scale(self.gamma_half, exp),
            zeta_pow=_scale(self.zeta_pow, exp),
            factorial=_scale(self.factorial, exp),
            numeric={k: v * exp for k, v in self.numeric.items()},
        )

    def normalized(self) -> "SymbolicVolume":
        """Canonical form: coefficient coprime to 6, Gamma factors
        rewritten, trivial keys folded."""
        rest, p2, p3 = _split_coeff(self.coeff)
        out = SymbolicVolume(
            coeff=rest,
            pow2=self.pow2 + p2,
            pow3=self.pow3 + p3,
            pow_pi=self.pow_pi,
            numeric={k: v for k, v in self.numeric.items() if v},
            zeta_pow={k: v for k, v in self.zeta_pow.items() if v},
        )
        for i, e in self.factorial.items():
            out = out * SymbolicVolume.factorial_factor(i, e)
        for i, e in self.gamma_half.items():
            out = out * SymbolicVolume.gamma_half_factor(i, e)
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymbolicVolume):
            return NotImplemented
        a, b = self.normalized(), other.normalized()
        return (
            a.coeff == b.coeff
            and a.pow2 == b.pow2
            and a.pow3 == b.pow3
            and a.pow_pi == b.pow_pi
            and a.gamma_half == b.gamma_half
            and a.zeta_pow == b.zeta_pow
            and a.factorial == b.factorial
            and a.numeric == b.numeric
        )

    __hash__ = None

    # --- evaluation ---

    def log_value(self) -> float:
        """Natural log of the absolute value; exact-exponent sums over atom logs."""
        total = math.log(abs(self.coeff.numerator)) - math.log(self.coeff.denominator)
        total += float(self.pow2) * _LN2
        total += float(self.pow3) * _LN3
        total += float(self.pow_pi) * _LNPI
        for i, e in self.gamma_half.items():
            total += e * math.lgamma(i / 2.0)
        for i, e in self.zeta_pow.items():
            total += e * math.log(zeta(i))
        for i, e in self.factorial.items():
            total += e * math.lgamma(i + 1.0)
        for base, e in self.numeric.items():
            total += float(e) * math.log(base)
        return total

    def sign(self) -> int:
        return -1 if self.coeff < 0 else 1

    def value(self) -> float:
        """Binary64 value; overflows to inf for astronomically large results."""
        log = self.log_value()
        if log > 709.0:
            return math.inf * self.sign()
        return self.sign() * math.exp(log)

    # --- pretty printing ---

    @staticmethod
    def _pow_str(base: str, exp: Fraction) -> str:
        if exp == 1:
            return base
        if exp == Fraction(1, 2):
            return f"sqrt({base})"
        if exp.denominator == 1:
            e = exp.numerator
            return f"{base}^{e}" if e >= 0 else f"{base}^({e})"
        return f"{base}^({exp.numerator}/{exp.denominator})"

    def __str__(self) -> str:
        parts = []
        if self.coeff != 1:
            parts.append(str(self.coeff))
        if self.pow2:
            parts.append(self._pow_str("2", self.pow2))
        if self.pow3:
            parts.append(self._pow_str("3", self.pow3))
        if self.pow_pi:
            parts.append(self._pow_str("pi", self.pow_pi))
        for i in sorted(self.gamma_half):
            e = self.gamma_half[i]
            label = f"gamma({i // 2})" if i % 2 == 0 else f"gamma({i}/2)"
            parts.append(self._pow_str(label, Fraction(e)))
        for i in sorted(self.factorial):
            e = self.factorial[i]
            parts.append(f"{i}!" if e == 1 else f"({i}!)^{'(%d)' % e if e < 0 else e}")
        for i in sorted(self.zeta_pow):
            e = self.zeta_pow[i]
            parts.append(self._pow_str(f"zeta({i})", Fraction(e)))
        for base in sorted(self.numeric):
            parts.append(self._pow_str(repr(base), self.numeric[base]))
        return " * ".join(parts) if parts else "1"


def sphere_volume(m: int) -> SymbolicVolume:
    """Surface volume of the unit sphere S^m: 2 pi^((m+1)/2) / Gamma((m+1)/2)."""
    if m < 1:
        raise InvalidArgumentError("sphere dimension must be >= 1")
    return (
        SymbolicVolume.rational(2)
        * SymbolicVolume.pi_pow(Fraction(m + 1, 2))
        / SymbolicVolume.gamma_half_factor(m + 1)
    )


def vol_so(n: int) -> SymbolicVolume:
    """Volume of SO(n): 2^((n-1)(n/4+1)) * prod_{i=2}^n pi^(i/2)/Gamma(i/2).

    Normalized so that SO(n) -> S^(n-1) is a Riemannian submersion after a
    1/sqrt(2) rescale, whence the recursion
    vol(SO(n)) = 2^((n-1)/2) vol(S^(n-1)) vol(SO(n-1)) that the closed
    form must reproduce exactly (tested symbolically).
    """
    if n < 1:
        raise InvalidArgumentError("n must be >= 1")
    out = SymbolicVolume.two_pow(Fraction(n - 1) * (Fraction(n, 4) + 1))
    for i in range(2, n + 1):
        out = out * SymbolicVolume.pi_pow(Fraction(i, 2))
        out = out / SymbolicVolume.gamma_half_factor(i)
    return out


def vol_so_recursive(n: int) -> SymbolicVolume:
    """The submersion recursion evaluated symbolically (cross-check route)."""
    if n < 1:
        raise InvalidArgumentError("n must be >= 1")
    out = SymbolicVolume.one()
    for m in range(2, n + 1):
        out = out * SymbolicVolume.two_pow(Fraction(m - 1, 2)) * sphere_volume(m - 1)
    return out


def signed_perm_order(n: int) -> int:
    """Order of the signed permutation matrices of determinant +1: 2^(n-1) n!."""
    if n < 1:
        raise InvalidArgumentError("n must be >= 1")
    return 2 ** (n - 1) * math.factorial(n)


def vol_siegel(n: int, p: SiegelParams = MINIMAL_PARAMS) -> SymbolicVolume:
    """Volume of the Siegel set:
    (1/2) vol(SO(n)) (2 lam)^(n(n-1)/2) t^(n(n^2-1)/6) / ((n-1)!)^2.

    For the canonical parameters (t = 2/sqrt(3), lam = 1/2) the t-power is
    an exact power of 2 and 3; other parameters enter as labeled numeric
    factors with exact exponents.
    """
    if n < 2:
        raise InvalidArgumentError("n must be >= 2")
    out = SymbolicVolume.rational(1, 2) * vol_so(n)
    out = out * SymbolicVolume.numeric_factor(2.0 * p.lam, Fraction(n * (n - 1), 2))
    out = out * SymbolicVolume.numeric_factor(p.t, Fraction(n * (n * n - 1), 6))
    out = out * SymbolicVolume.factorial_factor(n - 1, -2)
    return out


def vol_quotient(n: int) -> SymbolicVolume:
    """Covolume of SL(n,Z) in SL(n,R):
    sqrt(2) * prod_{i=2}^n zeta(i) * prod_{i=1}^{n-1} 1/(2^(i-1) i!).

    The base case evaluates to sqrt(2) zeta(2).  See
    :func:`compare_quotient_forms` for the (inequivalent) fully-simplified
    variant that drops a factor n!.
    """
    if n < 2:
        raise InvalidArgumentError("n must be >= 2")
    out = SymbolicVolume.two_pow(Fraction(1, 2))
    for i in range(2, n + 1):
        out = out * SymbolicVolume.zeta_factor(i)
    for i in range(1, n):
        out = out * SymbolicVolume.two_pow(-(i - 1)) / SymbolicVolume.factorial_factor(i)
    return out


def vol_quotient_rightmost(n: int) -> SymbolicVolume:
    """Fully-simplified covolume variant:
    prod zeta(i) / (2^((n^2-3n+1)/2) prod_{i=2}^n i!).

    Differs from :func:`vol_quotient` by exactly 1/n!; kept as a labeled
    alternative for the dual-evaluation check, never used as the value.
    """
    if n < 2:
        raise InvalidArgumentError("n must be >= 2")
    out = SymbolicVolume.two_pow(-Fraction(n * n - 3 * n + 1, 2))
    for i in range(2, n + 1):
        out = out * SymbolicVolume.zeta_factor(i)
        out = out / SymbolicVolume.factorial_factor(i)
    return out


def ratio_C(n: int) -> SymbolicVolume:
    """Ratio vol(Siegel set, canonical params) / vol(SL(n,Z)\\SL(n,R)).

    Computed as the direct symbolic quotient; the published simplification
    is evaluated separately in :func:`compare_ratio_forms` only.
    """
    return vol_siegel(n, MINIMAL_PARAMS) / vol_quotient(n)


def ratio_C_display(n: int) -> SymbolicVolume:
    """The displayed single-formula simplification of the same ratio.

    2^((2n^3+9n^2+25n-30)/12) pi^((n^2+n-2)/4) prod i! /
    (3^((n^3-n)/12) ((n-1)!)^2 prod Gamma(i/2) prod zeta(i)).
    Disagrees with the direct quotient by 2^(3n-1); kept for the check.
    """
    out = SymbolicVolume.two_pow(Fraction(2 * n**3 + 9 * n**2 + 25 * n - 30, 12))
    out = out * SymbolicVolume.pi_pow(Fraction(n * n + n - 2, 4))
    for i in range(1, n):
        out = out * SymbolicVolume.factorial_factor(i)
    out = out * SymbolicVolume.three_pow(-Fraction(n**3 - n, 12))
    out = out * SymbolicVolume.factorial_factor(n - 1, -2)
    for i in range(2, n + 1):
        out = out / SymbolicVolume.gamma_half_factor(i)
        out = out / SymbolicVolume.zeta_factor(i)
    return out


def vol_symmetric_space(n: int) -> SymbolicVolume:
    """Covolume of SL(n,Z) acting on SL(n,R)/SO(n): vol_quotient / vol_so."""
    if n < 2:
        raise InvalidArgumentError("n must be >= 2")
    return vol_quotient(n) / vol_so(n)


def harder_tau(n: int) -> int:
    """Parity constant in the canonical-normalization covolume: n odd -> n,
    n even -> n-1."""
    return n if n % 2 == 1 else n - 1


def harder_volume(n: int) -> SymbolicVolume:
    """Covolume of the symmetric-space quotient in the canonical (Killing
    form) normalization:
    prod_{i=1}^{n-1} i! * prod_{i=2}^n zeta(i) / ((2 pi)^(n(n+3)/2) 2^tau n!).
    """
    if n < 2:
        raise InvalidArgumentError("n must be >= 2")
    tau = harder_tau(n)
    e = Fraction(n * (n + 3), 2)
    out = SymbolicVolume.two_pow(-e - tau) * SymbolicVolume.pi_pow(-e)
    for i in range(1, n):
        out = out * SymbolicVolume.factorial_factor(i)
    for i in range(2, n + 1):
        out = out * SymbolicVolume.zeta_factor(i)
    return out / SymbolicVolume.factorial_factor(n)


def normalization_ratio(n: int) -> SymbolicVolume:
    """Conversion factor between the two symmetric-space normalizations,
    computed as the direct quotient harder_volume / vol_symmetric_space."""
    return harder_volume(n) / vol_symmetric_space(n)


def normalization_ratio_display(n: int) -> SymbolicVolume:
    """The displayed simplification of the same conversion factor:
    2^((n^2-5n-2)/4 - tau) (prod i!)^2 / (n! pi^((n^2+5n+2)/4) prod Gamma(i/2)).
    Disagrees with the direct quotient by 2^n; kept for the check."""
    tau = harder_tau(n)
    out = SymbolicVolume.two_pow(Fraction(n * n - 5 * n - 2, 4) - tau)
    for i in range(1, n):
        out = out * SymbolicVolume.factorial_factor(i, 2)
    out = out / SymbolicVolume.factorial_factor(n)
    out = out * SymbolicVolume.pi_pow(-Fraction(n * n + 5 * n + 2, 4))
    for i in range(2, n + 1):
        out = out / SymbolicVolume.gamma_half_factor(i)
    return out


@dataclass(frozen=True)
class FormulaComparison:
    """Dual evaluation of a structural expression vs its published
    simplification.  ``agrees`` uses a 1e-9 relative log criterion; a
    mismatch is a documented discrepancy, not an error."""

    label: str
    log_direct: float
    log_displayed: float
    log_mismatch: float
    agrees: bool

    def to_json_dict(self) -> dict:
        return {
            "label": self.label,
            "log_direct": self.log_direct,
            "log_displayed": self.log_displayed,
            "log_mismatch": self.log_mismatch,
            "agrees": self.agrees,
        }


def _compare(label: str, direct: SymbolicVolume, displayed: SymbolicVolume) -> FormulaComparison:
    ld, lp = direct.log_value(), displayed.log_value()
    mismatch = lp - ld
    agrees = abs(mismatch) <= 1e-9 * max(1.0, abs(ld))
    return FormulaComparison(label, ld, lp, mismatch, agrees)


def compare_quotient_forms(n: int) -> FormulaComparison:
    """Structural covolume vs its fully-simplified variant (differs by n!)."""
    return _compare("covolume_forms", vol_quotient(n), vol_quotient_rightmost(n))


def compare_ratio_forms(n: int) -> FormulaComparison:
    """Direct Siegel/covolume ratio vs its displayed simplification
    (differs by 2^(3n-1))."""
    return _compare("siegel_ratio_forms", ratio_C(n), ratio_C_display(n))


def compare_normalization_forms(n: int) -> FormulaComparison:
    """Direct normalization conversion vs its displayed simplification
    (differs by 2^n)."""
    return _compare(
        "normalization_forms", normalization_ratio(n), normalization_ratio_display(n)
    )


@dataclass(frozen=True)
class GrowthRow:
    """One row of the growth table (all natural logs)."""

    n: int
    log_vol_siegel: float
    log_vol_quotient: float
    log_C: float
    log_height_bound: float

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "log_vol_siegel": self.log_vol_siegel,
            "log_vol_quotient": self.log_vol_quotient,
            "log_C": self.log_C,
            "log_height_bound": self.log_height_bound,
        }


def _so_pow2_exponent(n: int) -> Fraction:
    return Fraction(n - 1) * (Fraction(n, 4) + 1)


def growth_table(n_max: int) -> list[GrowthRow]:
    """Log-space growth data for n = 2..n_max (canonical Siegel parameters).

    log_C comes from the symbolic quotient, so the identity
    log_C = log_vol_siegel - log_vol_quotient holds up to float rounding
    of the evaluation, exactly in the algebra.  The SO(n) and covolume
    expressions are extended incrementally per row; rebuilding them from
    scratch for every n would be cubic in n_max.
    """
    if not (2 <= n_max <= 2000):
        raise InvalidArgumentError("n_max must be in [2, 2000]")
    rows = []
    so = vol_so(2)
    quo = vol_quotient(2)
    t = MINIMAL_PARAMS.t
    for n in range(2, n_max + 1):
        if n > 2:
            so = so * SymbolicVolume.two_pow(
                _so_pow2_exponent(n) - _so_pow2_exponent(n - 1)
            ) * SymbolicVolume.pi_pow(Fraction(n, 2)) / SymbolicVolume.gamma_half_factor(n)
            quo = quo * SymbolicVolume.zeta_factor(n) * SymbolicVolume.two_pow(
                -(n - 2)
            ) / SymbolicVolume.factorial_factor(n - 1)
        sie = (
            SymbolicVolume.rational(1, 2)
            * so
            * SymbolicVolume.numeric_factor(t, Fraction(n * (n * n - 1), 6))
            * SymbolicVolume.factorial_factor(n - 1, -2)
        )
        rows.append(
            GrowthRow(
                n=n,
                log_vol_siegel=sie.log_value(),
                log_vol_quotient=quo.log_value(),
                log_C=(sie / quo).log_value(),
                log_height_bound=(n * n - 1) / 2.0 * math.log(n),
            )
        )
    return rows


GROWTH_CSV_HEADER = "n,log_vol_siegel,log_vol_quotient,log_C,log_height_bound"


def growth_table_csv(rows: list[GrowthRow]) -> str:
    """CSV with 17 significant digits (binary64 round-trip exact)."""
    lines = [GROWTH_CSV_HEADER]
    for r in rows:
        lines.append(
            "%d,%.17g,%.17g,%.17g,%.17g"
            % (r.n, r.log_vol_siegel, r.log_vol_quotient, r.log_C, r.log_height_bound)
        )
    return "\n".join(lines) + "\n"

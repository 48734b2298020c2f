"""Exact and capped-precision arithmetic in Q_p and Q_p(sqrt p).

Elements of the ramified quadratic extension are stored as ``x + y*s`` with
``s = sqrt(p)`` and exact rational coordinates.  Because every quantity we
need is a rational expression in the inputs, the exact type doubles as the
oracle for the capped (ball) type, which models an element known only up to
``O(p^N)``.

Valuations take values in ``(1/2)Z`` together with ``+infinity``; they are
represented by :class:`HalfInt`.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from numbers import Rational

from zigzag.errors import (
    DivisionByZero,
    InsufficientPrecision,
    NegativeValuation,
    NonSquareResidue,
    NotPrime,
    OddValuation,
    ParseError,
    PreconditionError,
    PrimeMismatch,
)

DEFAULT_PRECISION = 40


# --------------------------------------------------------------------------
# primes and rational valuations
# --------------------------------------------------------------------------

def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def check_prime(p: int, allow_p3: bool = False) -> int:
    """Validate the working prime.

    The main results need ``p >= 5``; ``p = 3`` is accepted only with
    ``allow_p3`` and callers must then mark their output as conjectural.
    """
    if not isinstance(p, int) or not is_prime(p) or p == 2:
        raise NotPrime(f"p must be an odd prime, got {p!r}")
    if p == 3 and not allow_p3:
        raise PreconditionError("p = 3 requires the allow_p3 override")
    return p


def vp_int(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def vp(q, p: int):
    """p-adic valuation of a rational; ``None`` for zero."""
    q = Fraction(q)
    if q == 0:
        return None
    return vp_int(q.numerator, p) - vp_int(q.denominator, p)


def reduce_mod(q, p: int, m: int) -> Fraction:
    """Canonical representative of ``q`` modulo ``p**m Z_p``.

    The result has a power of ``p`` as denominator and lies in ``[0, p**m)``.
    ``q`` must be p-integral after scaling, which is always true for rationals.
    """
    q = Fraction(q)
    if q == 0:
        return q
    e = max(0, -m, -vp(q, p))
    scaled = q * p**e
    mod = p ** (m + e)
    r = scaled.numerator * pow(scaled.denominator, -1, mod) % mod
    return Fraction(r, p**e)


def sqrt_mod_prime(a: int, p: int) -> int:
    """Tonelli-Shanks.  Returns the root in ``{0, ..., (p-1)/2}``."""
    a %= p
    if a == 0:
        return 0
    if pow(a, (p - 1) // 2, p) != 1:
        raise NonSquareResidue(f"{a} is not a square mod {p}")
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return min(r, p - r)


# --------------------------------------------------------------------------
# half-integers
# --------------------------------------------------------------------------

@total_ordering
@dataclass(frozen=True, eq=False)
class HalfInt:
    """An element of (1/2)Z, or +infinity when ``twice`` is None."""

    twice: int | None

    @classmethod
    def of(cls, value) -> HalfInt:
        if isinstance(value, HalfInt):
            return value
        q = Fraction(value)
        if (2 * q).denominator != 1:
            raise ValueError(f"{value} is not a half-integer")
        return cls(int(2 * q))

    @classmethod
    def parse(cls, text: str) -> HalfInt:
        text = text.strip()
        if text in ("inf", "+inf", "∞"):
            return INFINITY
        try:
            return cls.of(Fraction(text))
        except ValueError as exc:
            raise ParseError(f"bad half-integer {text!r}") from exc

    @property
    def is_infinite(self) -> bool:
        return self.twice is None

    @property
    def is_integer(self) -> bool:
        return self.twice is not None and self.twice % 2 == 0

    def to_fraction(self) -> Fraction:
        if self.twice is None:
            raise OverflowError("infinite half-integer")
        return Fraction(self.twice, 2)

    def __int__(self) -> int:
        if not self.is_integer:
            raise ValueError(f"{self} is not an integer")
        return self.twice // 2

    def floor(self) -> int:
        return self.to_fraction().__floor__()

    def ceil(self) -> int:
        return self.to_fraction().__ceil__()

    def __add__(self, other):
        other = _as_halfint(other)
        if other is NotImplemented:
            return other
        if self.twice is None or other.twice is None:
            return INFINITY
        return HalfInt(self.twice + other.twice)

    __radd__ = __add__

    def __neg__(self):
        if self.twice is None:
            raise OverflowError("cannot negate infinity")
        return HalfInt(-self.twice)

    def __sub__(self, other):
        other = _as_halfint(other)
        if other is NotImplemented:
            return other
        if other.twice is None:
            raise OverflowError("cannot subtract infinity")
        return self + (-other)

    def __rsub__(self, other):
        return _as_halfint(other) - self

    def _key(self):
        return (1, 0) if self.twice is None else (0, self.twice)

    def __eq__(self, other):
        other = _as_halfint(other)
        if other is NotImplemented:
            return False
        return self.twice == other.twice

    def __lt__(self, other):
        other = _as_halfint(other)
        if other is NotImplemented:
            return other
        return self._key() < other._key()

    def __hash__(self):
        return hash(float("inf")) if self.twice is None else hash(Fraction(self.twice, 2))

    def __str__(self):
        if self.twice is None:
            return "inf"
        if self.twice % 2 == 0:
            return str(self.twice // 2)
        return f"{self.twice}/2"

    def __repr__(self):
        return f"<HalfInt {self}>"


def _as_halfint(value):
    if isinstance(value, HalfInt):
        return value
    if isinstance(value, (int, Fraction)):
        try:
            return HalfInt.of(value)
        except ValueError:
            return NotImplemented
    return NotImplemented


INFINITY = HalfInt(None)


# --------------------------------------------------------------------------
# exact elements of Q(sqrt p)
# --------------------------------------------------------------------------

def _coerce_exact(p: int, other):
    if isinstance(other, ExactElement):
        if other.p != p:
            raise PrimeMismatch(f"p={p} vs p={other.p}")
        return other
    if isinstance(other, (int, Rational)):
        return ExactElement(p, Fraction(other))
    return NotImplemented


@dataclass(frozen=True)
class ExactElement:
    """``x + y*sqrt(p)`` with rational ``x`` and ``y``."""

    p: int
    x: Fraction = Fraction(0)
    y: Fraction = Fraction(0)

    def __post_init__(self):
        if not isinstance(self.x, Fraction):
            object.__setattr__(self, "x", Fraction(self.x))
        if not isinstance(self.y, Fraction):
            object.__setattr__(self, "y", Fraction(self.y))

    @classmethod
    def sqrt_p(cls, p: int) -> ExactElement:
        return cls(p, 0, 1)

    @classmethod
    def pi_power(cls, p: int, n: int) -> ExactElement:
        """``sqrt(p)**n`` for any integer ``n``."""
        q, r = divmod(n, 2)
        scale = Fraction(p) ** q
        return cls(p, 0, scale) if r else cls(p, scale)

    @classmethod
    def parse(cls, text: str, p: int) -> ExactElement:
        return parse_element(text, p)

    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0

    def __bool__(self):
        return not self.is_zero()

    def is_rational(self) -> bool:
        return self.y == 0

    def conjugate(self) -> ExactElement:
        return ExactElement(self.p, self.x, -self.y)

    def norm(self) -> Fraction:
        return self.x * self.x - self.p * self.y * self.y

    def valuation(self) -> HalfInt:
        vx = vp(self.x, self.p)
        vy = vp(self.y, self.p)
        cands = []
        if vx is not None:
            cands.append(2 * vx)
        if vy is not None:
            cands.append(2 * vy + 1)
        return HalfInt(min(cands)) if cands else INFINITY

    def residue(self) -> int:
        """Image in the residue field F_p (an integer in ``[0, p)``)."""
        v = self.valuation()
        if v < 0:
            raise NegativeValuation(f"residue of {self} (valuation {v})")
        if v > 0:
            return 0
        return self.x.numerator * pow(self.x.denominator, -1, self.p) % self.p

    def __neg__(self):
        return ExactElement(self.p, -self.x, -self.y)

    def __pos__(self):
        return self

    def __add__(self, other):
        other = _coerce_exact(self.p, other)
        if other is NotImplemented:
            return other
        return ExactElement(self.p, self.x + other.x, self.y + other.y)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce_exact(self.p, other)
        if other is NotImplemented:
            return other
        return ExactElement(self.p, self.x - other.x, self.y - other.y)

    def __rsub__(self, other):
        other = _coerce_exact(self.p, other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = _coerce_exact(self.p, other)
        if other is NotImplemented:
            return other
        x1, y1, x2, y2 = self.x, self.y, other.x, other.y
        return ExactElement(self.p, x1 * x2 + self.p * y1 * y2, x1 * y2 + x2 * y1)

    __rmul__ = __mul__

    def inverse(self) -> ExactElement:
        n = self.norm()
        if n == 0:
            raise DivisionByZero("inverse of zero")
        return ExactElement(self.p, self.x / n, -self.y / n)

    def __truediv__(self, other):
        other = _coerce_exact(self.p, other)
        if other is NotImplemented:
            return other
        if other.y == 0:
            if other.x == 0:
                raise DivisionByZero(f"{self} / 0")
            return ExactElement(self.p, self.x / other.x, self.y / other.x)
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _coerce_exact(self.p, other)
        if other is NotImplemented:
            return other
        return other / self

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = ExactElement(self.p, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __str__(self):
        if self.y == 0:
            return str(self.x)
        ay = abs(self.y)
        ys = "s" if ay == 1 else f"{ay}*s"
        if self.x == 0:
            return ("-" if self.y < 0 else "") + ys
        return f"{self.x} {'+' if self.y > 0 else '-'} {ys}"


def parse_element(text: str, p: int) -> ExactElement:
    """Parse ``x``, ``x/y``, ``x + y*s`` ... where ``s`` is sqrt(p)."""
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"cannot parse element {text!r}") from exc
    return _eval_node(tree.body, p, text)


def _eval_node(node, p, text):
    if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
        return ExactElement(p, node.value)
    if isinstance(node, ast.Name) and node.id == "s":
        return ExactElement.sqrt_p(p)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        val = _eval_node(node.operand, p, text)
        return -val if isinstance(node.op, ast.USub) else val
    if isinstance(node, ast.BinOp):
        left = _eval_node(node.left, p, text)
        right = _eval_node(node.right, p, text)
        if isinstance(node.op, ast.Add):
            return left + right
        if isinstance(node.op, ast.Sub):
            return left - right
        if isinstance(node.op, ast.Mult):
            return left * right
        if isinstance(node.op, ast.Div):
            return left / right
        if isinstance(node.op, ast.Pow):
            if not right.is_rational() or right.x.denominator != 1:
                raise ParseError(f"non-integer exponent in {text!r}")
            return left ** int(right.x)
    raise ParseError(f"unsupported syntax in element {text!r}")


def pi_adic_reduce(a: ExactElement, abs_prec: HalfInt) -> ExactElement:
    """Canonical representative of ``a`` modulo ``{z : v(z) >= abs_prec}``."""
    if abs_prec.is_infinite:
        return a
    p = a.p
    mx = abs_prec.ceil()
    my = (abs_prec - HalfInt(1)).ceil()
    return ExactElement(p, reduce_mod(a.x, p, mx), reduce_mod(a.y, p, my))


# --------------------------------------------------------------------------
# capped (ball) elements
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CappedElement:
    """A ball ``approx + O(p^abs_prec)`` in Q_p(sqrt p).

    ``approx`` is kept reduced to its canonical representative.  An infinite
    ``abs_prec`` means the value is known exactly.
    """

    approx: ExactElement
    abs_prec: HalfInt

    @classmethod
    def ball(cls, approx: ExactElement, abs_prec) -> CappedElement:
        abs_prec = HalfInt.of(abs_prec)
        return cls(pi_adic_reduce(approx, abs_prec), abs_prec)

    @classmethod
    def from_exact(cls, a, prec=DEFAULT_PRECISION, *, p=None, absolute=False) -> CappedElement:
        """Round an exact value to a ball.

        By default ``prec`` is relative (digits beyond the leading term); with
        ``absolute=True`` it is the absolute cap ``O(p^prec)``.  Zero gets the
        absolute cap ``prec`` in both modes.
        """
        if not isinstance(a, ExactElement):
            a = ExactElement(p, a)
        prec = HalfInt.of(prec)
        if absolute or a.is_zero():
            return cls.ball(a, prec)
        return cls.ball(a, a.valuation() + prec)

    @classmethod
    def exact(cls, a: ExactElement) -> CappedElement:
        return cls(a, INFINITY)

    @classmethod
    def zero(cls, p: int, abs_prec) -> CappedElement:
        return cls(ExactElement(p), HalfInt.of(abs_prec))

    @property
    def p(self) -> int:
        return self.approx.p

    @property
    def is_exact(self) -> bool:
        return self.abs_prec.is_infinite

    @property
    def lead_valuation(self) -> HalfInt | None:
        v = self.approx.valuation()
        if self.abs_prec.is_infinite or v < self.abs_prec:
            return v
        return None

    def certify_valuation(self) -> HalfInt:
        v = self.lead_valuation
        if v is None:
            raise InsufficientPrecision(self.abs_prec)
        return v

    def valuation_lower_bound(self) -> HalfInt:
        v = self.lead_valuation
        return self.abs_prec if v is None else v

    def residue(self) -> int:
        v = self.lead_valuation
        if v is not None and v < 0:
            raise NegativeValuation(f"residue of element of valuation {v}")
        if self.abs_prec <= 0:
            raise InsufficientPrecision(self.abs_prec, "residue needs absolute precision > 0")
        return self.approx.residue()

    def contains(self, exact: ExactElement) -> bool:
        """True when ``exact`` lies in this ball."""
        if self.abs_prec.is_infinite:
            return exact == self.approx
        return (exact - self.approx).valuation() >= self.abs_prec

    def digits(self) -> list[int]:
        """pi-adic digits of the known part, from the leading term upwards."""
        v = self.certify_valuation()
        if self.abs_prec.is_infinite:
            raise ValueError("exact element has infinitely many digits")
        p = self.p
        z = self.approx * ExactElement.pi_power(p, -v.twice)
        out = []
        for _ in range(self.abs_prec.twice - v.twice):
            d = z.residue()
            out.append(d)
            z = (z - d) * ExactElement.pi_power(p, -1)
        return out

    def _coerce(self, other):
        if isinstance(other, CappedElement):
            if other.p != self.p:
                raise PrimeMismatch(f"p={self.p} vs p={other.p}")
            return other
        other = _coerce_exact(self.p, other)
        if other is NotImplemented:
            return other
        return CappedElement.exact(other)

    def __neg__(self):
        return CappedElement(pi_adic_reduce(-self.approx, self.abs_prec), self.abs_prec)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CappedElement.ball(self.approx + other.approx, min(self.abs_prec, other.abs_prec))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CappedElement.ball(self.approx - other.approx, min(self.abs_prec, other.abs_prec))

    def __rsub__(self, other):
        return -self + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a_prec, b_prec = self.abs_prec, other.abs_prec
        va, vb = self.approx.valuation(), other.approx.valuation()
        prec = min(va + b_prec, vb + a_prec, a_prec + b_prec)
        return CappedElement.ball(self.approx * other.approx, prec)

    __rmul__ = __mul__

    def inverse(self) -> CappedElement:
        if self.is_exact:
            if self.approx.is_zero():
                raise DivisionByZero("inverse of zero")
            return CappedElement.exact(self.approx.inverse())
        v = self.certify_valuation()
        return CappedElement.ball(self.approx.inverse(), self.abs_prec - v - v)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = CappedElement.exact(ExactElement(self.p, 1))
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __str__(self):
        if self.is_exact:
            return str(self.approx)
        return f"{self.approx} + O({self.p}^{self.abs_prec})"


def parse_capped(text: str, p: int) -> CappedElement:
    """Inverse of ``str(CappedElement)``: ``approx + O(p^N)``."""
    head, sep, tail = text.rpartition(" + O(")
    if not sep or not tail.endswith(")"):
        return CappedElement.exact(parse_element(text, p))
    base, _, expo = tail[:-1].partition("^")
    if base.strip() != str(p):
        raise ParseError(f"ball radius in {text!r} is not a power of {p}")
    return CappedElement.ball(parse_element(head, p), HalfInt.parse(expo))


def as_capped(a, prec=DEFAULT_PRECISION) -> CappedElement:
    if isinstance(a, CappedElement):
        return a
    return CappedElement.from_exact(a, prec)


def valuation(a) -> HalfInt:
    """Valuation of an exact or capped value; capped values must be certified."""
    if isinstance(a, CappedElement):
        return a.certify_valuation()
    return a.valuation()


def certify_valuation(a: CappedElement) -> HalfInt:
    return a.certify_valuation()


def residue(a) -> int:
    return a.residue()


# --------------------------------------------------------------------------
# square roots and the logarithm
# --------------------------------------------------------------------------

def sqrt(a, prec=DEFAULT_PRECISION, *, match=None) -> CappedElement:
    """Square root by Hensel lifting, returned as a ball.

    ``a`` must have integral valuation ``m`` and its unit part ``a/p^m`` a
    nonzero square residue.  The result has relative precision ``prec``
    (or less when ``a`` is itself a ball).  By default the root whose unit
    part reduces into ``{1, ..., (p-1)/2}`` is returned; with ``match`` the
    root ``r`` satisfying ``residue(r / match) == 1`` is returned instead.
    """
    a = as_capped(a, prec)
    p = a.p
    if a.is_exact and a.approx.is_zero():
        raise PreconditionError("sqrt of zero")
    v = a.certify_valuation()
    if not v.is_integer:
        raise OddValuation(f"valuation {v} is not integral")
    m = int(v)
    rel = HalfInt.of(prec) if a.is_exact else a.abs_prec - v
    u = a.approx * ExactElement.pi_power(p, -2 * m)
    root = sqrt_mod_prime(u.residue(), p)
    if root == 0:
        raise NonSquareResidue("unit part has zero residue")

    s = ExactElement(p, root)
    known = 1  # correct pi-adic digits of s
    target = rel.twice
    while known < target:
        s = (s + u / s) / 2
        known *= 2
        s = pi_adic_reduce(s, HalfInt(known + 2))
    result = CappedElement.ball(s * ExactElement.pi_power(p, m), HalfInt(m) + rel)

    if match is not None:
        if not isinstance(match, (ExactElement, CappedElement)):
            match = ExactElement(p, match)
        ratio = result / as_capped(match, prec)
        if ratio.certify_valuation() != 0:
            raise PreconditionError("target has the wrong valuation for a branch match")
        r = ratio.residue()
        if r not in (1, p - 1):
            raise PreconditionError("no square root branch matches the target")
        if r == p - 1:
            result = -result
    return result


def log_one_plus_p(p: int, n: int = DEFAULT_PRECISION) -> CappedElement:
    """``log(1 + p)`` to absolute precision ``O(p^n)``."""
    if p < 3 or not is_prime(p):
        raise NotPrime(f"bad prime {p}")
    if n < 1:
        raise PreconditionError("precision must be >= 1")
    total = Fraction(0)
    for k in range(1, 2 * n + 2):
        if k - vp_int(k, p) < n:
            total += Fraction((-1) ** (k + 1) * p**k, k)
    return CappedElement.ball(ExactElement(p, total), n)


# --------------------------------------------------------------------------
# combinatorics
# --------------------------------------------------------------------------

def binomial(n, m: int):
    """Generalized binomial ``n(n-1)...(n-m+1)/m!``; ``n`` may be rational."""
    if m < 0:
        raise PreconditionError("binomial needs m >= 0")
    num = 1
    den = 1
    for j in range(m):
        num = num * (n - j)
        den *= j + 1
    if isinstance(num, int):
        return Fraction(num, den)
    return num / den


def harmonic(l: int) -> Fraction:
    if l < 0:
        raise PreconditionError("harmonic needs l >= 0")
    return sum((Fraction(1, i) for i in range(1, l + 1)), Fraction(0))

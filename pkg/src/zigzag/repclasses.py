"""Semisimplified two-dimensional mod p representation classes.

Classes are built from the cyclotomic character ``w``, the level-2
fundamental character ``w2`` and unramified characters ``mu(L)``.  The
unramified constants live in F_{p^2} = F_p[th]/(th^2 - n), with ``n`` the
smallest quadratic non-residue mod p.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache

from zigzag.errors import LevelUnavailable, ParseError, PreconditionError, ZeroInverse, ZeroLambda
from zigzag.padic import sqrt_mod_prime


@lru_cache(maxsize=None)
def nonresidue(p: int) -> int:
    n = 2
    while pow(n, (p - 1) // 2, p) != p - 1:
        n += 1
    return n


@dataclass(frozen=True)
class Fp2Element:
    """``a + b*th`` in F_{p^2}."""

    p: int
    a: int
    b: int = 0

    def __post_init__(self):
        object.__setattr__(self, "a", self.a % self.p)
        object.__setattr__(self, "b", self.b % self.p)

    def _other(self, other):
        if isinstance(other, Fp2Element):
            if other.p != self.p:
                raise PreconditionError("mixed characteristics")
            return other
        if isinstance(other, int):
            return Fp2Element(self.p, other)
        return NotImplemented

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def in_base_field(self) -> bool:
        return self.b == 0

    def __add__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return Fp2Element(self.p, self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __neg__(self):
        return Fp2Element(self.p, -self.a, -self.b)

    def __sub__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __mul__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        n = nonresidue(self.p)
        return Fp2Element(
            self.p,
            self.a * other.a + n * self.b * other.b,
            self.a * other.b + self.b * other.a,
        )

    __rmul__ = __mul__

    def norm(self) -> int:
        return (self.a * self.a - nonresidue(self.p) * self.b * self.b) % self.p

    def inverse(self) -> Fp2Element:
        if self.is_zero():
            raise ZeroInverse("0 has no inverse in F_p^2")
        inv_n = pow(self.norm(), -1, self.p)
        return Fp2Element(self.p, self.a * inv_n, -self.b * inv_n)

    def __truediv__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def frobenius(self) -> Fp2Element:
        return Fp2Element(self.p, self.a, -self.b)

    def sort_key(self):
        return (self.a, self.b)

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        return f"{self.a}+{self.b}*th"

    @classmethod
    def parse(cls, text: str, p: int) -> Fp2Element:
        m = re.fullmatch(r"\s*(-?\d+)\s*(?:\+\s*(-?\d+)\s*\*\s*th)?\s*", text)
        if not m:
            raise ParseError(f"bad F_p^2 literal {text!r}")
        return cls(p, int(m.group(1)), int(m.group(2) or 0))


def fp2(op: str, x: Fp2Element, y: Fp2Element | None = None) -> Fp2Element:
    if op == "add":
        return x + y
    if op == "mul":
        return x * y
    if op == "inv":
        return x.inverse()
    if op == "frobenius":
        return x.frobenius()
    raise PreconditionError(f"unknown F_p^2 operation {op!r}")


def solve_selfdual(s) -> tuple[Fp2Element, Fp2Element]:
    """Roots of ``L^2 - s*L + 1`` in F_{p^2}, sorted; they are mutually inverse."""
    if not s.in_base_field():
        raise PreconditionError("trace must lie in F_p")
    p = s.p
    disc = (s.a * s.a - 4) % p
    half = pow(2, -1, p)
    if disc == 0 or pow(disc, (p - 1) // 2, p) == 1:
        d = Fp2Element(p, sqrt_mod_prime(disc, p))
    else:
        # disc = n * c^2 for the fixed non-residue n, so sqrt(disc) = c*th
        c = sqrt_mod_prime(disc * pow(nonresidue(p), -1, p) % p, p)
        d = Fp2Element(p, 0, c)
    roots = ((s + d) * half, (s - d) * half)
    return tuple(sorted(roots, key=Fp2Element.sort_key))


@dataclass(frozen=True)
class Irreducible:
    """``ind(w2^c)``, stored with the canonical exponent."""

    p: int
    c: int

    @property
    def inertia_only(self) -> bool:
        return False

    @property
    def reducible_as_representation(self) -> bool:
        # w2^c extends to G_{Q_p} exactly when (p+1) | c
        return self.c % (self.p + 1) == 0

    def det_exponent(self) -> int:
        return self.c % (self.p - 1)

    def render(self) -> str:
        return f"ind(w2^{self.c})"

    def to_dict(self) -> dict:
        return {"type": "irreducible", "c": self.c}

    __str__ = render


@dataclass(frozen=True)
class Reducible:
    """``mu(L)*w^a + mu(L^-1)*w^b``; ``lam`` is None when only inertia data is known."""

    p: int
    a: int
    b: int
    lam: Fp2Element | None = None

    @property
    def inertia_only(self) -> bool:
        return self.lam is None

    def summands(self):
        if self.lam is None:
            return ((self.a, None), (self.b, None))
        return ((self.a, self.lam), (self.b, self.lam.inverse()))

    def det_exponent(self) -> int:
        return (self.a + self.b) % (self.p - 1)

    def render(self) -> str:
        # larger exponent first, matching the usual w^{r0-i} + w^{1+i} layout
        parts = sorted(self.summands(), key=_summand_key, reverse=True)
        out = []
        for e, lam in parts:
            out.append(f"w^{e}" if lam is None else f"mu({lam})*w^{e}")
        return " + ".join(out)

    def to_dict(self) -> dict:
        return {
            "type": "reducible",
            "a": self.a,
            "b": self.b,
            "lambda": None if self.lam is None else str(self.lam),
        }

    __str__ = render


RepClass = Irreducible | Reducible


def _summand_key(summand):
    e, lam = summand
    return (e, (-1, -1) if lam is None else lam.sort_key())


def make_irreducible(p: int, c: int) -> Irreducible:
    m = p * p - 1
    return Irreducible(p, min(c % m, p * c % m))


def make_reducible(p: int, a: int, b: int, lam: Fp2Element | int | None = None) -> Reducible:
    a %= p - 1
    b %= p - 1
    if isinstance(lam, int):
        lam = Fp2Element(p, lam)
    if lam is None:
        a, b = min(a, b), max(a, b)
        return Reducible(p, a, b, None)
    if lam.is_zero():
        raise ZeroLambda("unramified constant must be nonzero")
    inv = lam.inverse()
    if _summand_key((b, inv)) < _summand_key((a, lam)):
        a, b, lam = b, a, inv
    return Reducible(p, a, b, lam)


def det_exponent(r: RepClass) -> int:
    return r.det_exponent()


def equals(r1: RepClass, r2: RepClass, level: str = "inertia") -> bool:
    """Compare classes on inertia or on the full Galois group."""
    if r1.p != r2.p:
        raise PreconditionError("classes over different primes")
    if level not in ("inertia", "full"):
        raise PreconditionError(f"unknown level {level!r}")
    if level == "full" and (r1.inertia_only or r2.inertia_only):
        raise LevelUnavailable("full comparison needs unramified data on both sides")
    if type(r1) is not type(r2):
        return False
    if isinstance(r1, Irreducible):
        return r1.c == r2.c
    if level == "inertia":
        return sorted((r1.a, r1.b)) == sorted((r2.a, r2.b))
    return sorted(r1.summands(), key=_summand_key) == sorted(r2.summands(), key=_summand_key)


_IND_RE = re.compile(r"\s*ind\(w2\^(-?\d+)\)\s*")
_SUMMAND_RE = re.compile(r"\s*(?:mu\(([^)]*)\)\*)?w\^(-?\d+)\s*")


def parse_rep(text: str, p: int) -> RepClass:
    """Inverse of the canonical text rendering."""
    m = _IND_RE.fullmatch(text)
    if m:
        return make_irreducible(p, int(m.group(1)))
    parts = text.split(" + ")
    if len(parts) != 2:
        raise ParseError(f"bad representation literal {text!r}")
    parsed = []
    for part in parts:
        sm = _SUMMAND_RE.fullmatch(part)
        if not sm:
            raise ParseError(f"bad summand {part!r}")
        lam = None if sm.group(1) is None else Fp2Element.parse(sm.group(1), p)
        parsed.append((int(sm.group(2)), lam))
    (a, la), (b, lb) = parsed
    if (la is None) != (lb is None):
        raise ParseError("either both or neither summand carries mu(...)")
    if la is not None and la * lb != Fp2Element(p, 1):
        raise ParseError("unramified constants must be mutually inverse")
    return make_reducible(p, a, b, la)

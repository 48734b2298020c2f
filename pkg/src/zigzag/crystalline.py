"""Reduction table for crystalline representations of exceptional weight.

Given ``(p, k, a_p)`` with half-integral slope ``v(a_p)`` in ``[1/2, (p-1)/2]``
and ``k`` in the exceptional class ``k0 = 2 v(a_p) + 2 mod (p-1)``, compute

    c   = (a_p^2 - C(r - v-, v+) C(r - v+, v-) p^r0) / (p a_p)
    tau = v(c),   t = v(k - k0)

and locate ``tau`` on the ladder ``t-1 < t < t+1 < ...``: open rungs give
``ind(w2^(r0+1+i(p-1)))``, integer points ``tau = t+i`` give
``mu(L_i) w^(r0-i) + mu(L_i^-1) w^(1+i)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from zigzag.errors import (
    DegenerateWeight,
    InsufficientPrecision,
    NonHalfIntegralSlope,
    PreconditionError,
    SlopeOutOfRange,
    UnknownFactor,
    WeightBelowBase,
    WeightCongruenceViolation,
)
from zigzag.padic import (
    INFINITY,
    CappedElement,
    ExactElement,
    HalfInt,
    binomial,
    check_prime,
    harmonic,
    parse_capped,
    parse_element,
    vp_int,
)
from zigzag.repclasses import (
    Fp2Element,
    Irreducible,
    RepClass,
    make_irreducible,
    make_reducible,
    parse_rep,
    solve_selfdual,
)

INTERVAL = "interval"
POINT = "point"

THEOREM = "theorem"
CONJECTURAL = "conjectural"
UNSUPPORTED = "unsupported"


@dataclass(frozen=True)
class ExceptionalData:
    p: int
    slope: HalfInt
    k0: int
    r0: int
    v_minus: int
    v_plus: int
    H_minus: Fraction
    H_plus: Fraction


def exceptional_data(p: int, a_p, *, allow_p3: bool = False) -> ExceptionalData:
    """Base weight and harmonic data attached to the slope of ``a_p``.

    ``a_p`` may also be given directly as a slope (HalfInt, int or Fraction).
    """
    check_prime(p, allow_p3)
    if isinstance(a_p, (ExactElement, CappedElement)):
        slope = a_p.certify_valuation() if isinstance(a_p, CappedElement) else a_p.valuation()
    else:
        try:
            slope = HalfInt.of(a_p)
        except ValueError as exc:
            raise NonHalfIntegralSlope(f"slope {a_p} is not in (1/2)Z") from exc
    if slope.is_infinite or not (HalfInt(1) <= slope <= HalfInt(p - 1)):
        raise SlopeOutOfRange(f"slope {slope} outside [1/2, {p - 1}/2]")
    r0 = slope.twice
    if slope.is_integer:
        v_minus, v_plus = int(slope) - 1, int(slope) + 1
    else:
        v_minus, v_plus = slope.floor(), slope.ceil()
    return ExceptionalData(
        p=p,
        slope=slope,
        k0=r0 + 2,
        r0=r0,
        v_minus=v_minus,
        v_plus=v_plus,
        H_minus=harmonic(v_minus),
        H_plus=harmonic(v_plus),
    )


def check_weight(p: int, k: int, k0: int) -> None:
    if (k - k0) % (p - 1):
        raise WeightCongruenceViolation(f"k={k} is not congruent to k0={k0} mod {p - 1}")
    if k < k0:
        raise WeightBelowBase(f"k={k} < k0={k0}")


def weight_valuation(p: int, k: int, k0: int) -> HalfInt:
    """``t = v_p(k - k0)``, infinite at ``k = k0``."""
    return INFINITY if k == k0 else HalfInt.of(vp_int(k - k0, p))


def compute_c(p: int, k: int, a_p, *, allow_p3: bool = False):
    ed = exceptional_data(p, a_p, allow_p3=allow_p3)
    check_weight(p, k, ed.k0)
    r = k - 2
    coeff = binomial(r - ed.v_minus, ed.v_plus) * binomial(r - ed.v_plus, ed.v_minus)
    return (a_p * a_p - coeff * p**ed.r0) / (a_p * p)


def compute_tau_t(p: int, k: int, k0: int, a_p, *, allow_p3: bool = False) -> tuple[HalfInt, HalfInt]:
    ed = exceptional_data(p, a_p, allow_p3=allow_p3)
    if ed.k0 != k0:
        raise PreconditionError(f"slope of a_p gives k0={ed.k0}, not {k0}")
    c = compute_c(p, k, a_p, allow_p3=allow_p3)
    tau = c.certify_valuation() if isinstance(c, CappedElement) else c.valuation()
    return tau, weight_valuation(p, k, k0)


def star_prime(i: int, r0: int, r: int) -> Fraction:
    """Fudge factor ``(-1)^i (i+1) C(r0-i, i+1) / (r0 - r)``."""
    if not 0 <= 2 * i <= r0:
        raise PreconditionError(f"index i={i} outside [0, r0/2]")
    if r == r0:
        raise DegenerateWeight("r = r0")
    return Fraction((-1) ** i * (i + 1)) * binomial(r0 - i, i + 1) / (r0 - r)


def legacy_star(i: int, r0: int, r: int) -> Fraction:
    """Historical fudge factors for slopes 1/2, 1, 3/2."""
    if i == 0 and r0 in (1, 2, 3):
        return Fraction(r0, r0 - r)
    if (i, r0) == (1, 3):
        return Fraction(r0 - 1, (r0 - r - 1) * (r0 - r))
    raise UnknownFactor(f"no known factor for (i, r0) = ({i}, {r0})")


def select_case(d: HalfInt, r0: int) -> tuple[str, int]:
    """Locate ``d = tau - t`` on the ladder, with the terminal conventions.

    Odd ``r0``: the last point becomes the closed ray ``[(r0-1)/2, inf]``.
    Even ``r0``: the last interval becomes ``(r0/2 - 1, inf]`` and the final
    point is dropped.  The first interval always extends to ``-inf``.
    """
    if r0 % 2:
        last = (r0 - 1) // 2
        if d >= last:
            return POINT, last
    else:
        if d > r0 // 2 - 1:
            return INTERVAL, r0 // 2
    if d < 0:
        return INTERVAL, 0
    if d.is_integer:
        return POINT, int(d)
    return INTERVAL, d.ceil()


def case_is_determined(lower: HalfInt, r0: int) -> bool:
    """Whether ``d >= lower`` alone pins down the case (the terminal one)."""
    if r0 % 2:
        return lower >= (r0 - 1) // 2
    return lower > r0 // 2 - 1


def is_selfdual(i: int, r0: int) -> bool:
    return r0 % 2 == 1 and 2 * i == r0 - 1


def irreducible_for(p: int, r0: int, i: int) -> Irreducible:
    rep = make_irreducible(p, r0 + 1 + i * (p - 1))
    if rep.reducible_as_representation:
        raise AssertionError(f"classifier produced a reducible induced class {rep}")
    return rep


def reducible_for(p: int, r0: int, i: int, residue: int, notes: list[str]):
    """Point case ``i`` given the residue of the constant (or trace)."""
    value = Fp2Element(p, residue)
    if is_selfdual(i, r0):
        if residue == 0:
            notes.append("self-dual trace is 0, so lambda^2 = -1")
        lam = solve_selfdual(value)[0]
        return make_reducible(p, r0 - i, 1 + i, lam), value
    return make_reducible(p, r0 - i, 1 + i, value), None


@dataclass(frozen=True)
class ZigZagVerdict:
    kind: str
    p: int
    r0: int
    case: str
    i: int
    rep: RepClass
    regime: str
    tau: HalfInt | None = None
    t: HalfInt | None = None
    nu: HalfInt | None = None
    c: ExactElement | CappedElement | None = None
    trace: Fp2Element | None = None
    notes: tuple[str, ...] = field(default=())

    @property
    def lam(self):
        """``lambda_i``: the constant on the ``w^(r0-i)`` summand."""
        if getattr(self.rep, "lam", None) is None:
            return None
        target = (self.r0 - self.i) % (self.p - 1)
        for e, lam in self.rep.summands():
            if e == target:
                return lam
        raise AssertionError("point verdict without a w^(r0-i) summand")

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "p": self.p, "r0": self.r0, "case": self.case, "i": self.i,
             "rep": self.rep.render()}
        if self.kind == "crystalline":
            d["tau"] = _str_or_none(self.tau)
            d["t"] = _str_or_none(self.t)
            d["c"] = _str_or_none(self.c)
        else:
            d["nu"] = _str_or_none(self.nu)
        d["lambda"] = _str_or_none(self.lam)
        d["trace"] = _str_or_none(self.trace)
        d["regime"] = self.regime
        d["notes"] = list(self.notes)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> ZigZagVerdict:
        p = d["p"]
        c = d.get("c")
        if c is not None:
            c = parse_capped(c, p) if "O(" in c else parse_element(c, p)
        return cls(
            kind=d["kind"],
            p=p,
            r0=d["r0"],
            case=d["case"],
            i=d["i"],
            rep=parse_rep(d["rep"], p),
            regime=d["regime"],
            tau=_halfint_or_none(d.get("tau")),
            t=_halfint_or_none(d.get("t")),
            nu=_halfint_or_none(d.get("nu")),
            c=c,
            trace=None if d.get("trace") is None else Fp2Element.parse(d["trace"], p),
            notes=tuple(d.get("notes", ())),
        )


def _str_or_none(x):
    return None if x is None else str(x)


def _halfint_or_none(x):
    return None if x is None else HalfInt.parse(x)


def classify_crystalline(p: int, k: int, a_p, *, tmin=None, allow_p3: bool = False) -> ZigZagVerdict:
    """Predicted reduction of ``V_{k, a_p}``.

    ``a_p`` may be exact or capped; with a capped value the case must be
    certifiable or :class:`InsufficientPrecision` is raised.  ``tmin`` (default
    ``r0``) only affects the reported regime, never the verdict.
    """
    ed = exceptional_data(p, a_p, allow_p3=allow_p3)
    check_weight(p, k, ed.k0)
    r0, r = ed.r0, k - 2
    t = weight_valuation(p, k, ed.k0)
    c = compute_c(p, k, a_p, allow_p3=allow_p3)
    notes = []
    trace = None

    if isinstance(c, CappedElement):
        tau = c.lead_valuation
        if tau is None and c.is_exact:
            tau = INFINITY
    else:
        tau = c.valuation()

    if t.is_infinite:
        case, i = INTERVAL, 0
        rep = irreducible_for(p, r0, 0)
        notes.append("k = k0: the first interval covers everything")
    else:
        if tau is None:
            lower = c.abs_prec - t
            if not case_is_determined(lower, r0):
                raise InsufficientPrecision(c.abs_prec, f"tau >= {c.abs_prec} does not locate the case")
            case, i = select_case(lower, r0)
        else:
            case, i = select_case(tau - t, r0)
        if case == INTERVAL:
            rep = irreducible_for(p, r0, i)
        else:
            arg = c * star_prime(i, r0, r) / p**i
            rep, trace = reducible_for(p, r0, i, arg.residue(), notes)

    tmin = r0 if tmin is None else tmin
    if p >= 5 and t >= tmin:
        regime = THEOREM
    else:
        regime = CONJECTURAL
        notes.append("p = 3" if p == 3 else f"t = {t} below tmin = {tmin}")
    return ZigZagVerdict(
        kind="crystalline", p=p, r0=r0, case=case, i=i, rep=rep, regime=regime,
        tau=tau, t=t, c=c, trace=trace, notes=tuple(notes),
    )

"""Weight families ``a_p(k) = sum_j c_j (k - k0)^j`` with ``a_p(k0) = p^(r0/2)``.

Besides evaluation this module extracts the L-invariant ``2 a_p'(k0)/a_p(k0)``,
checks ``tau = r0/2 - 1 + nu + t`` along the family, compares the crystalline
and semi-stable verdicts, and computes points of the trianguline chart

    (y^2, (1+p)^(k-1) - 1, y^2 - p^r0 : (1+p)^(k-1) - (1+p)^(k0-1))

where ``y = y(k)`` is the unit-ish root of ``Y^2 - a_p Y + p^(k-1)``.

Write ``d = k - k0`` and ``u_j = c_j / c0``.  Then

    a_p(k)^2 - C(r-v-, v+) C(r-v+, v-) p^r0 = p^r0 * F(d)
    F(d) = (sum_j u_j d^j)^2 - prod_{j<=v+} (1 + d/j) prod_{j<=v-} (1 + d/j)

with ``F_1 = L - H- - H+``.  The "excess polynomial" ``F`` gives a
certificate: once every higher term ``F_j d^j`` is strictly smaller than the
linear one, ``v(F(d)) = nu + t`` and the identity must hold exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from zigzag.crystalline import (
    ZigZagVerdict,
    check_weight,
    classify_crystalline,
    compute_c,
    exceptional_data,
    weight_valuation,
)
from zigzag.errors import FamilyError, LevelUnavailable, ParseError, PreconditionError
from zigzag.padic import (
    DEFAULT_PRECISION,
    INFINITY,
    CappedElement,
    ExactElement,
    HalfInt,
    binomial,
    check_prime,
    log_one_plus_p,
    parse_element,
    sqrt,
)
from zigzag.repclasses import equals
from zigzag.semistable import SemistableInput, classify_semistable, compute_nu


@dataclass(frozen=True)
class ApFamily:
    p: int
    k0: int
    coeffs: tuple[ExactElement, ...]
    allow_p3: bool = False

    def __post_init__(self):
        check_prime(self.p, self.allow_p3)
        if not 3 <= self.k0 <= self.p + 1:
            raise FamilyError(f"k0={self.k0} outside [3, p+1]")
        coeffs = tuple(c if isinstance(c, ExactElement) else ExactElement(self.p, c) for c in self.coeffs)
        if not coeffs:
            raise FamilyError("family needs at least the constant coefficient")
        if any(c.p != self.p for c in coeffs):
            raise FamilyError("coefficient over a different prime")
        if coeffs[0] != ExactElement.pi_power(self.p, self.k0 - 2):
            raise FamilyError(f"a_p(k0) must be p^(r0/2), got {coeffs[0]}")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def r0(self) -> int:
        return self.k0 - 2

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def evaluate(self, k: int) -> ExactElement:
        check_weight(self.p, k, self.k0)
        d = k - self.k0
        acc = ExactElement(self.p)
        for c in reversed(self.coeffs):
            acc = acc * d + c
        return acc

    __call__ = evaluate

    def l_invariant(self) -> ExactElement:
        if len(self.coeffs) < 2:
            return ExactElement(self.p)
        return self.coeffs[1] * 2 / self.coeffs[0]

    def unit_coeffs(self) -> list[ExactElement]:
        return [c / self.coeffs[0] for c in self.coeffs]

    def excess_poly(self) -> list[ExactElement]:
        """Coefficients ``F_0, F_1, ...`` of the excess polynomial (``F_0 = 0``)."""
        ed = exceptional_data(self.p, HalfInt(self.r0), allow_p3=self.allow_p3)
        u = self.unit_coeffs()
        square = _poly_mul(u, u)
        binom = [Fraction(1)]
        for top in (ed.v_plus, ed.v_minus):
            for j in range(1, top + 1):
                binom = _poly_mul(binom, [Fraction(1), Fraction(1, j)])
        size = max(len(square), len(binom))
        square += [ExactElement(self.p)] * (size - len(square))
        binom += [Fraction(0)] * (size - len(binom))
        out = [s - b for s, b in zip(square, binom)]
        while len(out) > 2 and out[-1].is_zero():
            out.pop()
        return out

    def __str__(self):
        return f"{self.p};{self.k0};[{','.join(str(c) for c in self.coeffs)}]"

    @classmethod
    def parse(cls, text: str, *, allow_p3: bool = False) -> ApFamily:
        """Parse ``p;k0;[c0,c1,...]``."""
        parts = text.strip().split(";")
        if len(parts) != 3:
            raise ParseError(f"family literal needs 'p;k0;[...]', got {text!r}")
        try:
            p, k0 = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise ParseError(f"bad prime or base weight in {text!r}") from exc
        body = parts[2].strip()
        if not (body.startswith("[") and body.endswith("]")):
            raise ParseError(f"coefficient list must be bracketed in {text!r}")
        items = [s for s in body[1:-1].split(",") if s.strip()]
        return cls(p, k0, tuple(parse_element(s, p) for s in items), allow_p3)


def _poly_mul(a, b):
    out = [None] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            term = x * y
            out[i + j] = term if out[i + j] is None else out[i + j] + term
    return out


def evaluate(f: ApFamily, k: int) -> ExactElement:
    return f.evaluate(k)


def l_invariant(f: ApFamily) -> ExactElement:
    return f.l_invariant()


def slope_is_stable(f: ApFamily, t: HalfInt) -> bool:
    """``v(a_p(k)) = r0/2`` is guaranteed for every ``k`` with ``v(k - k0) = t``."""
    for j, u in enumerate(f.unit_coeffs()[1:], start=1):
        if not u.is_zero() and u.valuation() + HalfInt.of(j * t.to_fraction()) <= 0:
            return False
    return True


def is_certified(f: ApFamily, t: HalfInt) -> bool:
    """Whether theory forces the family identities at every ``k`` with ``v(k-k0) = t``.

    For finite ``nu`` the linear term of the excess polynomial must strictly
    dominate all higher ones.  For ``nu = inf`` the higher terms must push
    ``tau - t`` strictly into the terminal case.
    """
    if t.is_infinite or not slope_is_stable(f, t):
        return False
    tf = t.to_fraction()
    F = f.excess_poly()
    higher = [F[j].valuation() + HalfInt.of(j * tf) for j in range(2, len(F)) if not F[j].is_zero()]
    if not F[1].is_zero():
        linear = F[1].valuation() + t
        return all(h > linear for h in higher)
    lowest = min(higher, default=INFINITY)
    need = t if f.r0 % 2 == 0 else t + HalfInt(1)
    return lowest > need


def identity_threshold(f: ApFamily, t_max: int = 64) -> int | None:
    """Smallest integer ``t >= 1`` from which every ``t' in [t, t_max]`` is certified."""
    best = None
    for t in range(t_max, 0, -1):
        if not is_certified(f, HalfInt.of(t)):
            break
        best = t
    return best


@dataclass(frozen=True)
class TauReport:
    k: int
    t: HalfInt
    tau: HalfInt
    nu: HalfInt
    residual: HalfInt | None
    tau_minus_t: HalfInt
    unbounded: bool
    binomial_check: bool
    certified: bool


def verify_tau_identity(f: ApFamily, k: int) -> TauReport:
    """Compare ``tau`` with ``r0/2 - 1 + nu + t`` at weight ``k``."""
    p, k0, r0 = f.p, f.k0, f.r0
    check_weight(p, k, k0)
    if k == k0:
        raise PreconditionError("the identity needs k != k0")
    a = f.evaluate(k)
    c = compute_c(p, k, a, allow_p3=f.allow_p3)
    tau = c.valuation()
    t = weight_valuation(p, k, k0)
    nu = compute_nu(SemistableInput(p, k0, f.l_invariant(), f.allow_p3))
    if nu.is_infinite:
        residual = None
    else:
        residual = tau - (HalfInt(r0) - 1 + nu + t)

    ed = exceptional_data(p, HalfInt(r0), allow_p3=f.allow_p3)
    d, r = k - k0, k - 2
    first = binomial(r - ed.v_minus, ed.v_plus) - 1 - d * ed.H_plus
    second = binomial(r - ed.v_plus, ed.v_minus) - 1 - d * ed.H_minus
    bound = t + t
    binomial_check = all(ExactElement(p, x).valuation() >= bound for x in (first, second))

    return TauReport(
        k=k, t=t, tau=tau, nu=nu, residual=residual,
        tau_minus_t=tau - t if not tau.is_infinite else INFINITY,
        unbounded=nu.is_infinite, binomial_check=binomial_check,
        certified=is_certified(f, t),
    )


@dataclass(frozen=True)
class ConsistencyReport:
    k: int
    crys: ZigZagVerdict
    st: ZigZagVerdict
    inertia_match: bool
    full_match: bool | None
    certified: bool


def consistency_check(f: ApFamily, k: int, *, tmin=None) -> ConsistencyReport:
    """Classify ``V_{k, a_p(k)}`` and ``V_{k0, L}`` and compare the answers."""
    if k == f.k0:
        raise PreconditionError("consistency needs k != k0")
    crys = classify_crystalline(f.p, k, f.evaluate(k), tmin=tmin, allow_p3=f.allow_p3)
    st = classify_semistable(SemistableInput(f.p, f.k0, f.l_invariant(), f.allow_p3))
    inertia = equals(crys.rep, st.rep, "inertia")
    try:
        full = equals(crys.rep, st.rep, "full")
    except LevelUnavailable:
        full = None
    return ConsistencyReport(
        k=k, crys=crys, st=st, inertia_match=inertia, full_match=full,
        certified=is_certified(f, weight_valuation(f.p, k, f.k0)),
    )


# --------------------------------------------------------------------------
# trianguline chart
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ChartPoint:
    """Chart coordinates ``(x, y, a : b)``; the pair ``(a : b)`` is unreduced."""

    x: CappedElement | ExactElement
    y: CappedElement | ExactElement
    a: CappedElement | ExactElement
    b: CappedElement | ExactElement
    root: CappedElement | None = None


def _power_ball(p: int, e: int, cap) -> CappedElement:
    """``p**e`` as a ball with absolute cap ``cap`` (never builds huge integers)."""
    cap = HalfInt.of(cap)
    if e >= cap:
        return CappedElement.zero(p, cap)
    return CappedElement.exact(ExactElement(p, Fraction(p) ** e))


def frobenius_root(f: ApFamily, k: int, prec: int = DEFAULT_PRECISION) -> CappedElement:
    """``y(k) = (a_p + sqrt(a_p^2 - 4 p^(k-1))) / 2`` on the branch ``y -> p^(r0/2)``."""
    p, r0 = f.p, f.r0
    a = CappedElement.from_exact(f.evaluate(k), prec)
    va = a.certify_valuation()
    # a_p^2 - 4p^(k-1) = a_p^2 (1 - 4 p^(k-1) / a_p^2): one sqrt of a 1-unit
    small = _power_ball(p, k - 1, prec + va.twice) * 4 / (a * a)
    if small.valuation_lower_bound() <= 0:
        raise PreconditionError("k - 1 must exceed r0 for the chart")
    unit_root = sqrt(1 - small, prec, match=1)
    return a * (1 + unit_root) / 2


def chart_point(f: ApFamily, k: int, prec: int = DEFAULT_PRECISION) -> ChartPoint:
    p, k0, r0 = f.p, f.k0, f.r0
    check_weight(p, k, k0)
    if k == k0:
        raise PreconditionError("chart points need k > k0")
    root = frobenius_root(f, k, prec)
    a_p = f.evaluate(k)
    # y^2 = a_p y - p^(k-1) keeps x inside Q(sqrt p)
    x = root * a_p - _power_ball(p, k - 1, root.abs_prec + root.certify_valuation())
    one_plus_p = CappedElement.from_exact(ExactElement(p, 1 + p), prec)
    big = one_plus_p ** (k - 1)
    base = (1 + p) ** (k0 - 1)
    return ChartPoint(x=x, y=big - 1, a=x - p**r0, b=big - base, root=root)


def chart_relation_defect(pt: ChartPoint, f: ApFamily) -> CappedElement:
    """``(x - p^r0) b - (y - ((1+p)^(k0-1) - 1)) a``; zero on the chart."""
    p, r0, k0 = f.p, f.r0, f.k0
    return (pt.x - p**r0) * pt.b - (pt.y - ((1 + p) ** (k0 - 1) - 1)) * pt.a


def chart_limit(f: ApFamily, prec: int = DEFAULT_PRECISION) -> ChartPoint:
    """Limit point ``(p^r0, (1+p)^(k0-1) - 1, 2 a_p(k0) a_p'(k0) : (1+p)^(k0-1) log(1+p))``."""
    p, k0, r0 = f.p, f.k0, f.r0
    c0 = f.coeffs[0]
    c1 = f.coeffs[1] if len(f.coeffs) > 1 else ExactElement(p)
    base = (1 + p) ** (k0 - 1)
    return ChartPoint(
        x=ExactElement(p, p**r0),
        y=ExactElement(p, base - 1),
        a=c0 * c1 * 2,
        b=log_one_plus_p(p, prec) * base,
    )


@dataclass(frozen=True)
class ConvergenceRow:
    k: int
    t: HalfInt
    gap: HalfInt | None


def chart_gap(f: ApFamily, k: int, prec: int = DEFAULT_PRECISION, limit: ChartPoint | None = None) -> HalfInt | None:
    """``v(b/a at k - b/a at the limit)``, both scaled by ``1/(k - k0)``.

    ``None`` when the limit direction is degenerate (``a_p'(k0) = 0``).
    """
    limit = limit or chart_limit(f, prec)
    if limit.a.is_zero():
        return None
    pt = chart_point(f, k, prec)
    d = k - f.k0
    ratio = (pt.b / d) / (pt.a / d)
    return (ratio - limit.b / limit.a).certify_valuation()


def chart_convergence(f: ApFamily, ks, prec: int = DEFAULT_PRECISION) -> list[ConvergenceRow]:
    limit = chart_limit(f, prec)
    rows = []
    for k in ks:
        if k == f.k0:
            raise PreconditionError("k = k0 has no chart point")
        rows.append(ConvergenceRow(k, weight_valuation(f.p, k, f.k0), chart_gap(f, k, prec, limit)))
    return rows

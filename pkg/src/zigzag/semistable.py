"""Reduction table for semi-stable representations ``V_{k0, L}``.

Everything is governed by ``nu = v(L - H- - H+)``.  Under ``tau = t + r0/2 - 1 + nu``
the semi-stable ladder ``nu in (i - r0/2, i - r0/2 + 1)`` / ``nu = i - r0/2 + 1``
is the crystalline one, so both tables share :func:`select_case`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from zigzag.crystalline import (
    INTERVAL,
    THEOREM,
    UNSUPPORTED,
    ZigZagVerdict,
    case_is_determined,
    exceptional_data,
    irreducible_for,
    reducible_for,
    select_case,
)
from zigzag.errors import InsufficientPrecision, NegativeValuation, PreconditionError
from zigzag.padic import INFINITY, CappedElement, ExactElement, HalfInt, binomial, check_prime


@dataclass(frozen=True)
class SemistableInput:
    p: int
    k0: int
    L: ExactElement | CappedElement
    allow_p3: bool = False

    def __post_init__(self):
        check_prime(self.p, self.allow_p3)
        if not 3 <= self.k0 <= self.p + 1:
            raise PreconditionError(f"k0={self.k0} outside [3, p+1]")
        if self.L.p != self.p:
            raise PreconditionError("L-invariant over a different prime")

    @property
    def r0(self) -> int:
        return self.k0 - 2

    def harmonic_shift(self) -> Fraction:
        ed = exceptional_data(self.p, HalfInt(self.r0), allow_p3=self.allow_p3)
        return ed.H_minus + ed.H_plus

    def shifted(self):
        """``L - H- - H+``."""
        return self.L - self.harmonic_shift()


def _valuation_or_none(x):
    if isinstance(x, CappedElement):
        v = x.lead_valuation
        if v is None and x.is_exact:
            return INFINITY
        return v
    return x.valuation()


def compute_nu(inp: SemistableInput) -> HalfInt:
    shifted = inp.shifted()
    if isinstance(shifted, CappedElement):
        return shifted.certify_valuation() if not shifted.is_exact else shifted.approx.valuation()
    return shifted.valuation()


def lambda_st(i: int, inp: SemistableInput) -> int:
    """Residue of ``(-1)^(i+1) (i+1) C(r0-i, i+1) (L - H- - H+) / p^(i+1-r0/2)``.

    This is ``lambda_i`` itself, or the trace ``lambda + 1/lambda`` in the
    self-dual case ``i = (r0-1)/2``.
    """
    r0, p = inp.r0, inp.p
    if not 0 <= 2 * i <= r0:
        raise PreconditionError(f"index i={i} outside [0, r0/2]")
    shifted = inp.shifted()
    nu = _valuation_or_none(shifted)
    floor = HalfInt(2 * i + 2 - r0)
    if nu is not None and nu < floor:
        raise NegativeValuation(f"nu = {nu} < {floor}")
    factor = (-1) ** (i + 1) * (i + 1) * binomial(r0 - i, i + 1)
    arg = shifted * factor * ExactElement.pi_power(p, r0 - 2 * i - 2)
    return arg.residue()


def classify_semistable(inp: SemistableInput) -> ZigZagVerdict:
    """Predicted reduction of ``V_{k0, L}``; ``t`` does not apply."""
    p, r0 = inp.p, inp.r0
    shifted = inp.shifted()
    nu = _valuation_or_none(shifted)
    offset = HalfInt(r0) - 1
    notes = []
    trace = None
    if nu is None:
        lower = shifted.abs_prec + offset
        if not case_is_determined(lower, r0):
            raise InsufficientPrecision(shifted.abs_prec, f"nu >= {shifted.abs_prec} does not locate the case")
        case, i = select_case(lower, r0)
    else:
        case, i = select_case(nu + offset, r0)
    if case == INTERVAL:
        rep = irreducible_for(p, r0, i)
    else:
        rep, trace = reducible_for(p, r0, i, lambda_st(i, inp), notes)
    if p >= 5:
        regime = THEOREM
    else:
        regime = UNSUPPORTED
        notes.append("semi-stable table is only established for p >= 5")
    return ZigZagVerdict(
        kind="semistable", p=p, r0=r0, case=case, i=i, rep=rep, regime=regime,
        nu=nu, trace=trace, notes=tuple(notes),
    )

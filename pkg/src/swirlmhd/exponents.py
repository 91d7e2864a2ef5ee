"""Exponent algebra of the small-data global regularity criterion.

Every function accepts ``float`` or :class:`fractions.Fraction` inputs. Rational formulas
evaluated on ``Fraction`` (or ``int``) inputs stay exact; anything involving a real power
falls back to ``float``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from pydantic import BaseModel, ConfigDict, Field

from .exceptions import DomainError

__all__ = [
    "P_MAX",
    "ExponentSet",
    "InitialNorms",
    "Number",
    "SmallnessReport",
    "a_frak_of_p",
    "check_smallness",
    "compute_M0",
    "compute_N0",
    "continuity_ratio",
    "epsilon_of_p",
    "exponent_set",
    "lambda_interp",
    "q1_of_p",
    "q2_of_p",
    "s_of_p",
    "v_dissipation_prefactor",
]

Number = Union[float, Fraction]

P_MAX = Fraction(63, 61)
_P_RANGE = "]1, 63/61]"


def _exact(value: Number | int) -> Number:
    if isinstance(value, bool):
        raise DomainError.out_of_range("value", value, "real numbers")
    if isinstance(value, int):
        return Fraction(value)
    return value


def _check_p(p: Number | int) -> Number:
    p = _exact(p)
    upper_ok = p <= P_MAX if isinstance(p, Fraction) else float(p) <= float(P_MAX)
    if not (p > 1 and upper_ok):
        raise DomainError.out_of_range("p", p, _P_RANGE)
    return p


def epsilon_of_p(p: Number | int) -> Number:
    p = _check_p(p)
    return Fraction(2, 7) - 60 * (p - 1) / (7 * (3 - p))


def a_frak_of_p(p: Number | int) -> Number:
    p = _check_p(p)
    return (3 - p) * (23 * p - 21) / (12 * (3 * p + 1))


def s_of_p(p: Number | int) -> Number:
    """Energy exponent of B inside M(t)."""
    p = _check_p(p)
    return 6 * p / (3 + p)


def q1_of_p(p: Number | int) -> Number:
    p = _check_p(p)
    return 5 * p / (3 - p)


def q2_of_p(p: Number | int) -> Number:
    p = _check_p(p)
    return 5 * p / (3 * (2 * p - 1))


def v_dissipation_prefactor(p: Number | int) -> Number:
    """Prefactor of the V dissipation in the L^{7/4} estimate; positive exactly when p < 33/31."""
    p = _check_p(p)
    return 48 * (2 * p - 1) * (33 - 31 * p) / (49 * (3 - p) ** 2)


def lambda_interp(p: Number | int, q: Number | int) -> Number:
    """Interpolation index of the ``u^r/r`` estimate; ``q`` may be ``math.inf``."""
    p = _exact(p)
    if not (1 < p < 3):
        raise DomainError.out_of_range("p", p, "]1, 3[")
    threshold = 3 * p / (3 - p)
    if isinstance(q, float) and math.isinf(q) and q > 0:
        return (p - 1) / 2
    q = _exact(q)
    if not q > threshold:
        raise DomainError.out_of_range("q", q, f"]{threshold}, inf]")
    return (p - 1) / 2 + 3 * p / (2 * q)


def _power(base: float, exponent: float) -> float:
    base = float(base)
    exponent = float(exponent)
    if base == 0.0:
        if exponent < 0:
            return math.inf
        return 0.0 if exponent > 0 else 1.0
    return base**exponent


def compute_M0(eta0_norm_p: Number, V0_norm: Number, B0_norm_s: Number, p: Number | int) -> Number:
    p = _check_p(p)
    for name, value in (("eta0_norm_p", eta0_norm_p), ("V0_norm", V0_norm), ("B0_norm_s", B0_norm_s)):
        if value < 0:
            raise DomainError.negative(name, value)
    s = s_of_p(p)
    return _exact(eta0_norm_p) ** p + _exact(V0_norm) ** Fraction(7, 4) + _exact(B0_norm_s) ** s


def compute_N0(omega0_norm: Number, J0_norm: Number, swirl_sup: Number, M0: Number, p: Number | int) -> Number:
    p = _check_p(p)
    for name, value in (("omega0_norm", omega0_norm), ("J0_norm", J0_norm), ("swirl_sup", swirl_sup), ("M0", M0)):
        if value < 0:
            raise DomainError.negative(name, value)
    total = _exact(omega0_norm) ** Fraction(3, 2) + _exact(J0_norm) ** 3
    if swirl_sup == 0:
        return total
    if M0 == 0:
        raise DomainError("M0 = 0 with a nonzero swirl: negative power of zero", {"name": "M0"})
    swirl_power = 3 * (39 * p - 37) / (16 * (2 * p - 1))
    m_power = -3 * (p + 2) / (4 * (2 * p - 1))
    return total + _exact(swirl_sup) ** swirl_power * (2 * _exact(M0)) ** m_power


@dataclass(frozen=True, slots=True)
class ExponentSet:
    """Every derived exponent for one admissible ``p``."""

    p: Number
    epsilon: Number
    a_frak: Number
    s: Number
    q1: Number
    q2: Number
    ell: Number
    ell_alt: Number
    v_prefactor: Number

    @property
    def B_critical(self) -> Number:
        return Fraction(3, 2) * self.p

    @property
    def B_exponents(self) -> tuple[Number, Number, Number]:
        """The three L^k norms of B checked for decay: 3/2, s and 3p/2."""
        return (Fraction(3, 2), self.s, self.B_critical)

    def as_floats(self) -> dict[str, float]:
        names = ("p", "epsilon", "a_frak", "s", "q1", "q2", "ell", "ell_alt", "v_prefactor")
        return {name: float(getattr(self, name)) for name in names}


def exponent_set(p: Number | int) -> ExponentSet:
    p = _check_p(p)
    a_frak = a_frak_of_p(p)
    ell = a_frak / (p - 1)
    return ExponentSet(
        p=p,
        epsilon=epsilon_of_p(p),
        a_frak=a_frak,
        s=s_of_p(p),
        q1=q1_of_p(p),
        q2=q2_of_p(p),
        ell=ell,
        ell_alt=ell * (25 * p - 21) / (23 * p - 21),
        v_prefactor=v_dissipation_prefactor(p),
    )


class InitialNorms(BaseModel):
    """Norms of the initial data entering the smallness conditions."""

    model_config = ConfigDict(frozen=True)

    ru_linf: float = Field(ge=0)
    ru_lell: float = Field(ge=0)
    B_l3_2: float = Field(ge=0)
    B_l3p_2: float = Field(ge=0)
    M0: float = Field(ge=0)
    ru_lell_alt: float | None = Field(default=None, ge=0)
    B_ls: float | None = Field(default=None, ge=0)


class SmallnessReport(BaseModel):
    """Outcome of both smallness conditions; margins are rhs/lhs (``inf`` when lhs vanishes)."""

    model_config = ConfigDict(frozen=True)

    lhs_swirl: float
    rhs_swirl: float
    lhs_B: float
    rhs_B: float
    c0: float
    passed: bool
    margins: tuple[float, float]
    continuity_ratios: tuple[float, float] | None = None

    @property
    def swirl_passed(self) -> bool:
        return self.lhs_swirl <= self.rhs_swirl

    @property
    def B_passed(self) -> bool:
        return self.lhs_B <= self.rhs_B


def _margin(lhs: float, rhs: float) -> float:
    if lhs == 0.0:
        return math.inf
    return rhs / lhs


def continuity_ratio(p: Number, ru_linf: float, ru_radial: float, B_ls: float, M0: float) -> float:
    """Size of the continuity-argument prefactor relative to ``p - 1`` (constant taken as one)."""
    p = float(_check_p(p))
    two_m0 = 2.0 * M0
    swirl_part = _power(ru_linf, 7 * (3 - p) / (20 * p)) * _power(two_m0, (p + 2) / (5 * p))
    radial_part = (_power(ru_radial, (25 * p - 21) / (16 * p)) + math.sqrt(B_ls)) * _power(two_m0, (p - 1) / (4 * p))
    return (swirl_part + radial_part) / (p - 1)


def check_smallness(p: Number | int, c0: float, norms: InitialNorms) -> SmallnessReport:
    p_exact = _check_p(p)
    if not c0 > 0:
        raise DomainError.out_of_range("c0", c0, "]0, inf[")
    p = float(p_exact)
    two_m0 = 2.0 * norms.M0
    m_factor = _power(two_m0, -2 * (p - 1) / p)
    first = _power(p - 1, 20 * p / (7 * (3 - p))) * _power(two_m0, -4 * (p + 2) / (7 * (3 - p)))
    second = (p - 1) ** 8 * m_factor * _power(norms.ru_lell, -(23 * p - 21) / (2 * p))
    rhs_swirl = c0 * min(first, second)
    rhs_B = c0 * (p - 1) ** 8 * m_factor * _power(norms.B_l3p_2, -3.0)
    ratios = None
    if norms.ru_lell_alt is not None and norms.B_ls is not None:
        ratios = (
            continuity_ratio(p_exact, norms.ru_linf, norms.ru_lell, norms.B_ls, norms.M0),
            continuity_ratio(p_exact, norms.ru_linf, norms.ru_lell_alt, norms.B_ls, norms.M0),
        )
    return SmallnessReport(
        lhs_swirl=norms.ru_linf,
        rhs_swirl=rhs_swirl,
        lhs_B=norms.B_l3_2,
        rhs_B=rhs_B,
        c0=c0,
        passed=norms.ru_linf <= rhs_swirl and norms.B_l3_2 <= rhs_B,
        margins=(_margin(norms.ru_linf, rhs_swirl), _margin(norms.B_l3_2, rhs_B)),
        continuity_ratios=ratios,
    )

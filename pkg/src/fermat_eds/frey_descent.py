"""Frey curves for cubic forms, Kraus's (l, l, l) recipe and the Z[sqrt(-3)] descent.

Everything here is exact integer arithmetic.  The level-lowering and
modularity statements these computations feed into are not implemented; only
the concrete recipes are.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations

from . import arith
from .arith import IncompleteFactorization


class DescentInconsistency(ArithmeticError):
    """No (a, b, s) matches: the fixture contradicts the expected factorization."""


# --- Frey curve of a binary cubic form ----------------------------------------


@dataclass(frozen=True)
class CubicForm:
    """t0 x^3 + t1 x^2 y + t2 x y^2 + t3 y^3, required to be separable."""

    t0: int
    t1: int
    t2: int
    t3: int

    def __post_init__(self):
        if self.disc == 0:
            raise ValueError(f"{self} is not separable")

    @property
    def disc(self) -> int:
        t0, t1, t2, t3 = self.t0, self.t1, self.t2, self.t3
        return 18 * t0 * t1 * t2 * t3 - 4 * t1**3 * t3 + t1**2 * t2**2 - 4 * t0 * t2**3 - 27 * t0**2 * t3**2

    def __call__(self, a: int, b: int) -> int:
        return self.t0 * a**3 + self.t1 * a * a * b + self.t2 * a * b * b + self.t3 * b**3


@dataclass(frozen=True)
class FreyCurve:
    a2: int
    a4: int
    a6: int

    @property
    def disc(self) -> int:
        """Discriminant of y^2 = x^3 + a2 x^2 + a4 x + a6."""
        a2, a4, a6 = self.a2, self.a4, self.a6
        b2, b4, b6 = 4 * a2, 2 * a4, 4 * a6
        b8 = 4 * a2 * a6 - a4 * a4
        return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    def to_json(self) -> dict:
        return {k: str(getattr(self, k)) for k in ("a2", "a4", "a6", "disc")}


def frey_from_cubic_form(F: CubicForm, a: int, b: int) -> FreyCurve:
    if math.gcd(a, b) != 1:
        raise ValueError(f"gcd({a}, {b}) != 1")
    t0, t1, t2, t3 = F.t0, F.t1, F.t2, F.t3
    E = FreyCurve(
        a2=t1 * a - t2 * b,
        a4=t0 * t2 * a * a + (3 * t0 * t3 - t1 * t2) * a * b + t1 * t3 * b * b,
        a6=t0 * t0 * t3 * a**3
        - t0 * (t2 * t2 - 2 * t1 * t3) * a * a * b
        + t3 * (t1 * t1 - 2 * t0 * t2) * a * b * b
        - t0 * t3 * t3 * b**3,
    )
    if E.disc != 16 * F.disc * F(a, b) ** 2:
        raise ArithmeticError(f"discriminant identity fails for {F} at ({a}, {b})")
    return E


# --- Kraus recipe -----------------------------------------------------------


def kraus_alpha(ord2_R: int, y_even: bool) -> int:
    """2-exponent of the conductor of Y^2 = X(X - A x^l)(X + B y^l)."""
    if ord2_R >= 5 or ord2_R == 0:
        return 1
    if y_even:
        return 1
    if ord2_R == 4:
        return 0
    if ord2_R >= 2:
        return 3
    return 5


def kraus_beta(ord2_R: int, y_even: bool) -> int:
    """2-exponent of the lowered level N0."""
    if ord2_R >= 5 or ord2_R == 0:
        return 1
    if ord2_R == 4:
        return 0
    if y_even:
        return 1
    if ord2_R >= 2:
        return 3
    return 5


@dataclass(frozen=True)
class KrausData:
    A: int
    B: int
    C: int
    x: int
    y: int
    z: int
    l: int
    R: int
    alpha: int
    beta: int
    conductor: int
    level: int

    @property
    def conductor_shape(self) -> tuple[int, int]:
        return self.alpha, self.conductor >> self.alpha

    def to_json(self) -> dict:
        return {k: str(v) for k, v in self.__dict__.items()}


class KrausPreconditionError(ValueError):
    def __init__(self, clause: str):
        super().__init__(clause)
        self.clause = clause


def kraus_recipe(A: int, B: int, C: int, x: int, y: int, z: int, l: int, **budget) -> KrausData:
    """Normalize A x^l + B y^l + C z^l = 0 and read off conductor and level.

    The three terms are permuted and, if needed, all negated so that
    B y^l is even and A x^l = -1 mod 4.
    """
    if l < 5 or not arith.is_probable_prime(l):
        raise KrausPreconditionError("l must be a prime >= 5")
    terms = [(A, x), (B, y), (C, z)]
    values = [k * v**l for k, v in terms]
    if sum(values) != 0:
        raise KrausPreconditionError("A x^l + B y^l + C z^l != 0")
    if any(v == 0 for v in values):
        raise KrausPreconditionError("terms must be nonzero")
    for i in range(3):
        for j in range(i + 1, 3):
            if math.gcd(values[i], values[j]) != 1:
                raise KrausPreconditionError("terms must be pairwise coprime")
    R = A * B * C
    if abs(R) > 1:
        fac = arith.factor_with_effort(abs(R), **budget)
        if not fac.complete:
            raise IncompleteFactorization(abs(R), fac.cofactor)
        heavy = [q for q, e in fac.factors if e >= l]
        if heavy:
            raise KrausPreconditionError(f"ord_q(R) >= l for q = {heavy[0]}")

    for order in permutations(range(3)):
        for sign in (1, -1):
            (a_, xa), (b_, yb), (c_, zc) = [(sign * terms[i][0], terms[i][1]) for i in order]
            if (b_ * yb**l) % 2 == 0 and (a_ * xa**l) % 4 == 3:
                break
        else:
            continue
        break
    else:
        raise KrausPreconditionError("no permutation/sign achieves the normalization")

    r2 = arith.ord(2, R) if R else 0
    y_even = yb % 2 == 0
    alpha, beta = kraus_alpha(r2, y_even), kraus_beta(r2, y_even)
    rad_R = arith.odd_radical(R, **budget)
    rad_Rxyz = arith.odd_radical(R * xa * yb * zc, **budget)
    return KrausData(a_, b_, c_, xa, yb, zc, l, R, alpha, beta, 2**alpha * rad_Rxyz, 2**beta * rad_R)


# --- exponent bound ---------------------------------------------------------


def _bound_parts(p: int, degree: int) -> tuple[int, int]:
    """(X, Y) with (1 + sqrt(p))^(2 degree) = X + Y sqrt(p)."""
    X, Y = 1, 0
    for _ in range(degree):
        X, Y = X * (1 + p) + Y * 2 * p, X * 2 + Y * (1 + p)
    return X, Y


def exponent_bound(p: int, degree: int = 1):
    """Exact predicate l -> (l < (1 + sqrt(p))^(2 degree))."""
    if not arith.is_probable_prime(p) or degree < 1:
        raise ValueError("need p prime and degree >= 1")
    X, Y = _bound_parts(p, degree)

    def below(l: int) -> bool:
        # l < X + Y sqrt(p)  <=>  l - X < 0  or  (l - X)^2 < Y^2 p
        t = l - X
        return t < 0 or t * t < Y * Y * p

    return below


def exponent_bound_floor(p: int, degree: int = 1) -> int:
    """Largest integer strictly below (1 + sqrt(p))^(2 degree)."""
    X, Y = _bound_parts(p, degree)
    s, _ = arith.iroot(Y * Y * p, 2)  # sqrt(p) is irrational, so never exact
    return X + s


# --- descent over Z[sqrt(-3)] ---------------------------------------------------
#
#   C + 12 d B^3 sqrt(-3) = (-1 + sqrt(-3))^s (a + b sqrt(-3))^3 / 2^(s+3)


def case_equations(s: int, a: int, b: int) -> tuple[int, int, int, int, int]:
    """(k_C, C_num, k_T, T_num, four_A): k_C*C = C_num, k_T*d*B^3 = T_num, 4A = four_A."""
    if s == 0:
        return 8, a * (a * a - 9 * b * b), 32, b * (a * a - b * b), a * a + 3 * b * b
    if s == 1:
        return (
            16,
            -(a**3) + 9 * a * b * b - 9 * a * a * b + 9 * b**3,
            192,
            a**3 - 3 * a * a * b - 9 * a * b * b + 3 * b**3,
            a * a + 3 * b * b,
        )
    if s == 2:
        return (
            32,
            -2 * a**3 + 18 * a * a * b + 18 * a * b * b - 18 * b**3,
            384,
            -2 * a**3 - 6 * a * a * b + 18 * a * b * b + 6 * b**3,
            a * a + 3 * b * b,
        )
    raise ValueError("s must be 0, 1 or 2")


@dataclass(frozen=True)
class DescentSolution:
    s: int
    a: int
    b: int
    A_n: int
    B_n: int
    C_n: int
    d: int

    def holds(self) -> bool:
        kC, cn, kT, tn, four_a = case_equations(self.s, self.a, self.b)
        return (
            kC * self.C_n == cn
            and kT * self.d * self.B_n**3 == tn
            and 4 * self.A_n == four_a
            and (self.a - self.b) % 2 == 0
        )

    def to_json(self) -> dict:
        return {k: str(v) for k, v in self.__dict__.items()}


def descent_solve(A_n: int, B_n: int, C_n: int, d: int, **budget) -> list[DescentSolution]:
    """Every (s, a, b) with C + 12 d B^3 sqrt(-3) = w^s ((a + b sqrt(-3))/2)^3."""
    if B_n < 1:
        raise ValueError("B_n must be >= 1")
    if C_n * C_n != A_n**3 - 432 * d * d * B_n**6:
        raise ValueError("C_n^2 != A_n^3 - 432 d^2 B_n^6")
    sols = []
    for a0, b0 in arith.cornacchia_3(4 * A_n, **budget):
        for a, b in sorted(arith.signed_variants(a0, b0)):
            for s in (0, 1, 2):
                cand = DescentSolution(s, a, b, A_n, B_n, C_n, d)
                if cand.holds():
                    sols.append(cand)
    if not sols:
        raise DescentInconsistency(f"no descent solution for A={A_n}, B={B_n}, C={C_n}, d={d}")
    return sols


def forward_case(s: int, a: int, b: int) -> tuple[int, int, int, int] | None:
    """Build (A_n, B_n, C_n, d) from (s, a, b), or None if not integral.

    d B^3 is split with B the largest cube dividing it, so d comes out
    cube-free when the factorization finishes.
    """
    kC, cn, kT, tn, four_a = case_equations(s, a, b)
    if (a - b) % 2 or cn % kC or tn % kT or four_a % 4 or tn == 0:
        return None
    C, T, A = cn // kC, tn // kT, four_a // 4
    B = 1
    if abs(T) > 1:
        fac = arith.factor_with_effort(abs(T))
        B = math.prod(p ** (e // 3) for p, e in fac.factors)
    return A, B, C, T // B**3


@dataclass
class DescentCheck:
    equation: str
    applicable: bool
    holds: bool | None = None
    terms: tuple = ()
    note: str = ""

    def to_json(self) -> dict:
        return {
            "equation": self.equation,
            "applicable": self.applicable,
            "holds": self.holds,
            "terms": [str(t) for t in self.terms],
            "note": self.note,
        }


@dataclass(frozen=True)
class PowerDecomposition:
    """A_n = 3^e A^l, A_n^3 + 8*432 d^2 B_n^6 = 3^f Abar^l, C_n = +-3^g C^l,
    and for the odd-l step: a = C'^l (a odd) or 2 C'^l (a even),
    a^2 - 9b^2 = 8 Cbar^l (a odd) or 4 Cbar^l (a even)."""

    e: int
    f: int
    g: int
    A: int
    Abar: int
    C: int
    C_sign: int = 1
    t_root: int | None = None
    t_bar: int | None = None


def _l_th_power_after_3(n: int, l: int) -> tuple[int, int] | None:
    """n = 3^k r^l with r an integer; returns (k, r) or None."""
    if n == 0:
        return None
    k = arith.ord(3, n)
    rest = n // 3**k
    sign = -1 if rest < 0 else 1
    r, exact = arith.iroot(abs(rest), l)
    if not exact or (sign < 0 and l % 2 == 0):
        return None
    return k, sign * r


def power_decomposition(sol: DescentSolution, l: int) -> PowerDecomposition | None:
    """Try to write the descent data as l-th powers times powers of 3."""
    d, An, Bn, Cn = sol.d, sol.A_n, sol.B_n, sol.C_n
    pa = _l_th_power_after_3(An, l)
    pf = _l_th_power_after_3(An**3 + 8 * 432 * d * d * Bn**6, l)
    pc = _l_th_power_after_3(abs(Cn), l)
    if not (pa and pf and pc):
        return None
    rest = sol.a * sol.a - 9 * sol.b * sol.b
    if sol.a % 2:
        t_root, t_bar = _signed_root(sol.a, 1, l), _signed_root(rest, 8, l)
    else:
        t_root, t_bar = _signed_root(sol.a, 2, l), _signed_root(rest, 4, l)
    return PowerDecomposition(pa[0], pf[0], pc[0], pa[1], pf[1], pc[1], 1 if Cn >= 0 else -1, t_root, t_bar)


def _signed_root(n: int, k: int, l: int) -> int | None:
    if n % k:
        return None
    q = n // k
    r, exact = arith.iroot(abs(q), l)
    if not exact or (q < 0 and l % 2 == 0):
        return None
    return r if q >= 0 else -r


def power_descent_equations(
    sol: DescentSolution | None, l: int, case: str, decomposition: PowerDecomposition | None = None
) -> list[DescentCheck]:
    """Check the three-term identity and the b^2 equation on an l-th power decomposition.

    The three-term identity 3^f Abar^l + 8 * 3^(2g) C^(2l) = 3^(2+3e) A^(3l)
    is reported after removing the common power of 3, which leaves at most
    one term divisible by 3.  case is "odd_a" (C^(2l) - 8 Cbar^l = 9 b^2) or
    "even_a" (4 C^(2l) - 4 Cbar^l = 9 b^2).
    """
    if case not in ("odd_a", "even_a"):
        raise ValueError("case must be 'odd_a' or 'even_a'")
    dec = decomposition
    if dec is None and sol is not None:
        dec = power_decomposition(sol, l)
    if dec is None:
        return [
            DescentCheck("three_term", False, note="no l-th power decomposition"),
            DescentCheck(case, False, note="no l-th power decomposition"),
        ]
    t1 = 3**dec.f * dec.Abar**l
    t2 = 8 * 3 ** (2 * dec.g) * dec.C ** (2 * l)
    t3 = 3 ** (2 + 3 * dec.e) * dec.A ** (3 * l)
    holds = t1 + t2 == t3
    nonzero = [abs(t) for t in (t1, t2, t3) if t]
    k = min(arith.ord(3, t) for t in nonzero) if nonzero else 0
    reduced = tuple(t // 3**k for t in (t1, t2, t3))
    out = [DescentCheck("three_term", True, holds, reduced, note=f"divided by 3^{k}")]

    if dec.t_root is None or dec.t_bar is None or sol is None:
        out.append(DescentCheck(case, False, note="a or a^2 - 9b^2 is not of the required shape"))
        return out
    b = sol.b
    if case == "odd_a":
        lhs = dec.t_root ** (2 * l) - 8 * dec.t_bar**l
    else:
        lhs = 4 * dec.t_root ** (2 * l) - 4 * dec.t_bar**l
    out.append(DescentCheck(case, True, lhs == 9 * b * b, (lhs, 9 * b * b)))
    return out


def t_equation(case: str, C: int, Cbar: int, l: int, b: int) -> bool:
    """a odd: C^(2l) - 8 Cbar^l = 9 b^2.  a even: 4 C^(2l) - 4 Cbar^l = 9 b^2."""
    if case == "odd_a":
        return C ** (2 * l) - 8 * Cbar**l == 9 * b * b
    if case == "even_a":
        return 4 * C ** (2 * l) - 4 * Cbar**l == 9 * b * b
    raise ValueError("case must be 'odd_a' or 'even_a'")


# --- auxiliary curves -------------------------------------------------------

# curve_id -> (coefficient of Y^2, polynomial in X low degree first)
AUX_CURVES: dict[str, tuple[int, list[int]]] = {
    "quintic1": (1, [0, -27, 0, -6, 0, 1]),
    "quartic+": (1, [-3, 0, 2, 0, 1]),
    "quartic-": (-1, [-3, 0, 2, 0, 1]),
    "quartic8+": (8, [-3, 0, 2, 0, 1]),
    "quartic8-": (-8, [-3, 0, 2, 0, 1]),
    "power5_e0": (1, [1, 0, 0, 0, 0, 1]),
    "power5_e1": (1, [1, 0, 0, 0, 0, 8]),
    # Z^6 + X^3 = Y^2 on the chart Z = 1
    "sextic": (1, [1, 0, 0, 1]),
}


def _rational_sqrt(q: Fraction) -> Fraction | None:
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    if arith.is_square(n) and arith.is_square(d):
        return Fraction(math.isqrt(n), math.isqrt(d))
    return None


@dataclass
class AuxScan:
    curve_id: str
    height_bound: int
    points: list = field(default_factory=list)
    conclusive: bool = False
    note: str = "naive small-height scan; absence of points is NOT a proof"

    def to_json(self) -> dict:
        return {
            "curve_id": self.curve_id,
            "height_bound": self.height_bound,
            "points": [[str(x), str(y)] for x, y in self.points],
            "conclusive": self.conclusive,
            "note": self.note,
        }


def aux_curve_scan(curve_id: str, height_bound: int) -> AuxScan:
    """All (X, Y) with X = p/q, |p| <= H, 1 <= q <= H, on the named curve."""
    if curve_id not in AUX_CURVES:
        raise ValueError(f"unknown curve_id {curve_id!r}; expected one of {sorted(AUX_CURVES)}")
    if height_bound < 1:
        raise ValueError("height_bound must be >= 1")
    lead, poly = AUX_CURVES[curve_id]
    scan = AuxScan(curve_id, height_bound)
    seen = set()
    for q in range(1, height_bound + 1):
        for p in range(-height_bound, height_bound + 1):
            if math.gcd(p, q) != 1:
                continue
            X = Fraction(p, q)
            if X in seen:
                continue
            seen.add(X)
            rhs = sum(c * X**i for i, c in enumerate(poly)) / lead
            Y = _rational_sqrt(rhs)
            if Y is not None:
                scan.points += [(X, Y)] if Y == 0 else [(X, Y), (X, -Y)]
    scan.points.sort()
    return scan

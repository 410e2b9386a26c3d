"""Elementary exponent-based vanishing criterion for J_{1,m}(4M).

A nonzero form forces a solution (r, s, t) of r^2 (M/m) + s^2 t = 0 mod 4M
with 0 < r < m and t a divisor of M; when the congruence has no solution the
space vanishes.  The criterion is one-directional: an Inconclusive outcome
carries a witness but says nothing about nonvanishing.
"""

from __future__ import annotations

from dataclasses import dataclass

from .arith import divisors


@dataclass(frozen=True)
class ExponentWitness:
    r: int
    s: int
    t: int

    def check(self, m: int, aux: int) -> bool:
        if not (0 < self.r < m) or aux % self.t:
            return False
        mprime = aux // m
        return (self.r * self.r * mprime + self.s * self.s * self.t) % (4 * aux) == 0


@dataclass(frozen=True)
class CriterionOutcome:
    vanishes: bool
    witness: ExponentWitness | None = None


def exponent_criterion(m: int, aux: int) -> CriterionOutcome:
    """Exhaustive scan of the obstruction congruence; m must divide M.

    s ranges over a full period [0, 4M) of the congruence, so the bounded
    scan is complete.  Returns the lexicographically least witness in
    (r, s, t) order when one exists.
    """
    if m < 1 or aux < 1 or aux % m:
        raise ValueError("need positive m dividing M")
    mprime = aux // m
    mod = 4 * aux
    ts = divisors(aux)
    for r in range(1, m):
        base = (r * r * mprime) % mod
        for s in range(mod):
            ss = (s * s) % mod
            for t in ts:
                if (base + ss * t) % mod == 0:
                    return CriterionOutcome(False, ExponentWitness(r, s, t))
    return CriterionOutcome(True)


def expsapp_suite(a_max: int) -> dict[tuple[int, int], CriterionOutcome]:
    """Vanishing scan for the index 2, 3, 4 prime-power families.

    Runs the criterion for (m, M) = (2, 2^a), (3, 3^a) and (4, 2^a), for every
    exponent a <= a_max making m | M, and insists on a Vanishes outcome each
    time.
    """
    if a_max < 1:
        raise ValueError("a_max must be at least 1")
    out = {}
    for m, base in ((2, 2), (3, 3), (4, 2)):
        for a in range(0, a_max + 1):
            aux = base**a
            if aux % m:
                continue
            res = exponent_criterion(m, aux)
            if not res.vanishes:
                raise AssertionError(f"criterion unexpectedly inconclusive at (m={m}, M={aux})")
            out[(m, aux)] = res
    return out

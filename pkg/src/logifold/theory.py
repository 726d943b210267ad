"""Exact interval machinery for the dyadic counterexample: a target bit
function with infinitely many jumps accumulating at 0, bounded-size interval
classifiers, their majority ensemble, and exact Lebesgue-measure agreement.

All arithmetic in this module is exact (integers, Fractions, dyadic
rationals); floats are deliberately never used, since the quantities of
interest differ by amounts of order 2**(-3N).

Conventions: every interval is half-open of the form (a, b]; the target is
1 on (2**(-n-1), 2**(-n)] for even n and 0 for odd n; the majority combiner
outputs 1 on exact ties.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import total_ordering

from .errors import BudgetExceeded, KTooSmall, OutOfDomain

ZERO = Fraction(0)
ONE = Fraction(1)


@total_ordering
@dataclass(frozen=True)
class DyadicRational:
    """numerator / 2**exponent in [0, 1], kept in canonical form
    (numerator odd, or zero with exponent zero)."""

    numerator: int
    exponent: int

    def __post_init__(self):
        num, exp = self.numerator, self.exponent
        if exp < 0:
            raise ValueError("exponent must be nonnegative")
        if num == 0:
            num, exp = 0, 0
        else:
            while num % 2 == 0:
                num //= 2
                exp -= 1
            if exp < 0:  # value > 1 after reduction
                raise ValueError("dyadic value must lie in [0, 1]")
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "exponent", exp)
        if not (ZERO <= self.fraction <= ONE):
            raise ValueError(f"dyadic value {self.fraction} outside [0, 1]")

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.numerator, 2 ** self.exponent)

    @classmethod
    def from_fraction(cls, fr: Fraction) -> "DyadicRational":
        fr = Fraction(fr)
        den = fr.denominator
        exp = den.bit_length() - 1
        if 2 ** exp != den:
            raise ValueError(f"{fr} is not dyadic")
        return cls(fr.numerator, exp)

    def __lt__(self, other):
        return self.fraction < other.fraction

    def __repr__(self):
        return f"{self.numerator}/2^{self.exponent}"


def dyadic_level(x: Fraction) -> int:
    """The unique n >= 0 with 2**(-n-1) < x <= 2**(-n), for x in (0, 1]."""
    if not (ZERO < x <= ONE):
        raise OutOfDomain(f"{x} not in (0, 1]")
    n = 0
    while x <= Fraction(1, 2 ** (n + 1)):
        n += 1
    return n


def target_value(x) -> int:
    """Target bit at x: 1 on even-level dyadic intervals, 0 on odd."""
    x = x.fraction if isinstance(x, DyadicRational) else Fraction(x)
    return 1 if dyadic_level(x) % 2 == 0 else 0


def measure_ones_below(c: Fraction) -> Fraction:
    """Exact Lebesgue measure of {x in (0, c] : target_value(x) = 1}.

    Closed form: the bounded piece inside the level interval containing c
    plus the alternating geometric tail below it.
    """
    c = Fraction(c)
    if c == 0:
        return ZERO
    n = dyadic_level(c)
    m = n + 1
    tail = (Fraction(2, 3) if m % 2 == 0 else Fraction(1, 3)) / 2 ** m
    bounded = c - Fraction(1, 2 ** (n + 1)) if n % 2 == 0 else ZERO
    return tail + bounded


@dataclass
class StepFunction:
    """Bit-valued step function on (0, 1] with strictly decreasing dyadic
    breakpoints; values[j] holds on (breakpoints[j], breakpoints[j-1]] with
    implicit endpoints 1 above and 0 below."""

    breakpoints: list[DyadicRational]
    values: list[int]

    def __post_init__(self):
        if len(self.values) != len(self.breakpoints) + 1:
            raise ValueError("need one value per interval")
        fr = [b.fraction for b in self.breakpoints]
        if any(not (ZERO < f < ONE) for f in fr):
            raise ValueError("breakpoints must lie in (0, 1)")
        if any(a <= b for a, b in zip(fr, fr[1:])):
            raise ValueError("breakpoints must be strictly decreasing")
        if any(v not in (0, 1) for v in self.values):
            raise ValueError("values must be bits")

    def value_at(self, x) -> int:
        x = x.fraction if isinstance(x, DyadicRational) else Fraction(x)
        if not (ZERO < x <= ONE):
            raise OutOfDomain(f"{x} not in (0, 1]")
        for j, b in enumerate(self.breakpoints):
            if x > b.fraction:
                return self.values[j]
        return self.values[-1]

    def discontinuities(self) -> int:
        return sum(1 for a, b in zip(self.values, self.values[1:]) if a != b)

    def coalesced(self) -> "StepFunction":
        """Drop breakpoints where the value does not actually change."""
        bps, vals = [], [self.values[0]]
        for b, v in zip(self.breakpoints, self.values[1:]):
            if v != vals[-1]:
                bps.append(b)
                vals.append(v)
        return StepFunction(bps, vals)

    def intervals(self):
        """Yield (a, b, value) triples with the interval (a, b]."""
        edges = [ONE] + [b.fraction for b in self.breakpoints] + [ZERO]
        for j, v in enumerate(self.values):
            yield edges[j + 1], edges[j], v


@dataclass
class Family:
    """A finite family of step-function classifiers with a shared size budget
    N (maximum number of discontinuities per member)."""

    members: list[StepFunction]
    N: int

    def __post_init__(self):
        if not self.members:
            raise ValueError("family must be nonempty")
        for m in self.members:
            if m.discontinuities() > self.N:
                raise ValueError(
                    f"member has {m.discontinuities()} discontinuities, budget {self.N}"
                )

    @property
    def K(self) -> int:
        return len(self.members)


@dataclass
class VoteProfile:
    """Per-interval count of members voting 1, over the merged breakpoints
    of all family members."""

    merged_breakpoints: list[DyadicRational]
    ones_count: list[int]

    def __post_init__(self):
        if len(self.ones_count) != len(self.merged_breakpoints) + 1:
            raise ValueError("need one count per merged interval")


def vote_profile(family: Family) -> VoteProfile:
    merged = sorted({b.fraction for m in family.members for b in m.breakpoints},
                    reverse=True)
    # evaluate members at the right endpoint of each interval (included by
    # the half-open convention)
    rights = [ONE] + merged
    counts = [sum(m.value_at(r) for m in family.members) for r in rights]
    return VoteProfile([DyadicRational.from_fraction(f) for f in merged], counts)


def ensemble(family: Family) -> StepFunction:
    """Majority vote of the family per merged interval, ties to 1, with
    non-jump breakpoints coalesced away."""
    profile = vote_profile(family)
    k = family.K
    vals = [1 if 2 * u >= k else 0 for u in profile.ones_count]
    return StepFunction(profile.merged_breakpoints, vals).coalesced()


def consistency(family: Family) -> Fraction:
    """Minimum over points of the majority fraction max(M0, M1) / K."""
    profile = vote_profile(family)
    k = family.K
    return min(Fraction(max(u, k - u), k) for u in profile.ones_count)


def agreement_measure(g: StepFunction) -> Fraction:
    """Exact Lebesgue measure of the set where g equals the target."""
    total = ZERO
    for a, b, v in g.intervals():
        ones = measure_ones_below(b) - measure_ones_below(a)
        total += ones if v == 1 else (b - a) - ones
    return total


def discontinuity_bound(K: int, N: int) -> Fraction:
    """Upper bound K*N / (2*floor(K/4)) - 1 on the ensemble's number of
    discontinuities, valid for families of consistency above 3/4."""
    if K < 4:
        raise KTooSmall(f"K={K}: floor(K/4) vanishes, bound undefined")
    return Fraction(K * N, 2 * (K // 4)) - 1


@dataclass
class ProofReport:
    """Outcome of checking the vote-jump inequalities on one family."""

    K: int
    N: int
    consistency: Fraction
    applicable: bool  # consistency > 3/4
    deltas: list[int]
    delta_floor: int  # required jump size 2*floor(K/4)
    delta_ok: bool | None  # None when not applicable
    sum_deltas: int
    sum_ok: bool
    disc: int
    bound: Fraction
    disc_ok: bool | None
    witnesses: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        checks = [self.sum_ok]
        if self.applicable:
            checks += [self.delta_ok, self.disc_ok]
        return all(checks)


def check_proof_quantities(family: Family) -> ProofReport:
    """Verify the jump-size inequalities: every majority flip of the ensemble
    moves the 1-vote count by at least 2*floor(K/4) (when consistency exceeds
    3/4), the total vote variation is at most K*N, and the ensemble has at
    most floor(bound) discontinuities."""
    k, n = family.K, family.N
    bound = discontinuity_bound(k, n)
    cons = consistency(family)
    applicable = cons > Fraction(3, 4)

    profile = vote_profile(family)
    counts = profile.ones_count
    sum_deltas = sum(abs(b - a) for a, b in zip(counts, counts[1:]))
    sum_ok = sum_deltas <= k * n

    g = ensemble(family)
    g_bps = {b.fraction for b in g.breakpoints}
    deltas = []
    witnesses = []
    for j, bp in enumerate(profile.merged_breakpoints):
        if bp.fraction in g_bps:
            # counts[j] holds above bp, counts[j+1] below
            deltas.append(abs(counts[j + 1] - counts[j]))
    floor_req = 2 * (k // 4)
    delta_ok = None
    disc_ok = None
    if applicable:
        delta_ok = all(d >= floor_req for d in deltas)
        if not delta_ok:
            witnesses.append(f"jump below {floor_req}: deltas={deltas}")
        disc_ok = g.discontinuities() <= int(bound)
        if not disc_ok:
            witnesses.append(f"disc {g.discontinuities()} > floor({bound})")
    if not sum_ok:
        witnesses.append(f"sum of jumps {sum_deltas} > K*N = {k * n}")
    return ProofReport(
        K=k, N=n, consistency=cons, applicable=applicable,
        deltas=deltas, delta_floor=floor_req, delta_ok=delta_ok,
        sum_deltas=sum_deltas, sum_ok=sum_ok,
        disc=g.discontinuities(), bound=bound, disc_ok=disc_ok,
        witnesses=witnesses,
    )


# --------------------------------------------------------------------------
# search for the best attainable agreement


@dataclass
class SearchConfig:
    depth: int = 8  # breakpoints drawn from {2**-1, ..., 2**-depth}
    mode: str = "auto"  # auto | exhaustive | random
    budget: int = 200_000  # max candidate breakpoint sets for exhaustive mode
    restarts: int = 500
    seed: int = 0


def best_values_for_breakpoints(bps: list[Fraction]) -> tuple[Fraction, list[int]]:
    """Optimal agreement achievable with the given (descending) breakpoints:
    each interval independently takes the majority-overlap bit."""
    edges = [ONE] + list(bps) + [ZERO]
    total = ZERO
    values = []
    for a, b in zip(edges[1:], edges[:-1]):
        ones = measure_ones_below(b) - measure_ones_below(a)
        zeros = (b - a) - ones
        values.append(1 if ones >= zeros else 0)
        total += max(ones, zeros)
    return total, values


def search_max_agreement(N: int, K: int, config: SearchConfig | None = None):
    """Best agreement with the target attainable by a step function with at
    most floor(discontinuity_bound(K, N)) discontinuities and breakpoints on
    the dyadic grid {2**-1, ..., 2**-depth}.

    Returns (best step function, exact agreement).  Exhaustive over all
    admissible breakpoint subsets when that count fits the budget, otherwise
    seeded random restarts.
    """
    cfg = config or SearchConfig()
    if N < 1:
        raise ValueError("N must be positive")
    max_disc = int(discontinuity_bound(K, N))  # raises KTooSmall for K < 4
    points = [Fraction(1, 2 ** i) for i in range(1, cfg.depth + 1)]
    max_size = min(max_disc, len(points))

    n_subsets = sum(_ncr(len(points), j) for j in range(max_size + 1))
    mode = cfg.mode
    if mode == "auto":
        mode = "exhaustive" if n_subsets <= cfg.budget else "random"
    if mode == "exhaustive" and n_subsets > cfg.budget:
        raise BudgetExceeded(f"{n_subsets} candidate sets exceed budget {cfg.budget}")

    best = None  # (agreement, breakpoints, values)
    def consider(subset):
        nonlocal best
        bps = sorted(subset, reverse=True)
        agreement, values = best_values_for_breakpoints(bps)
        # ties resolved toward the lexicographically smallest breakpoint list
        if best is None or agreement > best[0] or (
                agreement == best[0] and bps < best[1]):
            best = (agreement, bps, values)

    if mode == "exhaustive":
        for size in range(max_size + 1):
            for subset in itertools.combinations(points, size):
                consider(subset)
    else:
        rng = random.Random(cfg.seed)
        consider([])
        for _ in range(cfg.restarts):
            size = rng.randint(0, max_size)
            consider(rng.sample(points, size))

    agreement, bps, values = best
    g = StepFunction([DyadicRational.from_fraction(b) for b in bps], values).coalesced()
    return g, agreement


def _ncr(n, r):
    return math.comb(n, r)


# --------------------------------------------------------------------------
# seeded generators used by the verification suites


def random_step_function(N: int, depth: int, rng: random.Random,
                         grid: int | None = None) -> StepFunction:
    """Random bit step function with at most N discontinuities and dyadic
    breakpoints of denominator 2**(grid or depth)."""
    g = grid or depth
    denom = 2 ** g
    n_bp = rng.randint(0, N)
    nums = rng.sample(range(1, denom), min(n_bp, denom - 1)) if denom > 1 else []
    bps = sorted({Fraction(n, denom) for n in nums}, reverse=True)
    while True:
        values = [rng.randint(0, 1) for _ in range(len(bps) + 1)]
        sf = StepFunction([DyadicRational.from_fraction(b) for b in bps],
                          values).coalesced()
        if sf.discontinuities() <= N:
            return sf


def theory_report(N: int, K: int, config: SearchConfig | None = None,
                  n_families: int = 200, family_seed: int = 0) -> dict:
    """Run the proof-quantity checks on seeded random consistent families and
    the best-agreement search; collect everything a report needs."""
    cfg = config or SearchConfig()
    bound = discontinuity_bound(K, N)
    g, agreement = search_max_agreement(N, K, cfg)

    rng = random.Random(family_seed)
    n_applicable = 0
    n_pass = 0
    failures = []
    for i in range(n_families):
        fam = random_consistent_family(K, N, cfg.depth, rng)
        rep = check_proof_quantities(fam)
        if rep.applicable:
            n_applicable += 1
        if rep.passed:
            n_pass += 1
        elif len(failures) < 5:
            failures.append(rep.witnesses)

    floor_l = int(bound)
    claimed = ONE - 3 * Fraction(1, 2 ** (3 * N))
    tail_bound = ONE - Fraction(1, 3) / 2 ** (floor_l + 1)
    return {
        "K": K,
        "N": N,
        "depth": cfg.depth,
        "mode": cfg.mode,
        "seed": cfg.seed,
        "family_seed": family_seed,
        "consistency_floor": Fraction(3, 4),
        "max_agreement": agreement,
        "best_breakpoints": [b.fraction for b in g.breakpoints],
        "best_disc": g.discontinuities(),
        "L": bound,
        "floor_L": floor_l,
        "claimed_bound": claimed,
        "claimed_bound_respected": agreement < claimed,
        "tail_bound": tail_bound,
        "tail_bound_respected": agreement <= tail_bound,
        "families_checked": n_families,
        "families_applicable": n_applicable,
        "families_passed": n_pass,
        "failures": failures,
    }


def format_theory_report(rep: dict) -> str:
    """Structured text report for the best-agreement search and the
    proof-quantity checks."""
    def frac(f):
        return f"{f} (~{float(f):.6f})"

    lines = [
        f"K={rep['K']} N={rep['N']} depth={rep['depth']} mode={rep['mode']} "
        f"seed={rep['seed']} family_seed={rep['family_seed']}",
        f"L={rep['L']} floor_L={rep['floor_L']}",
        f"max_agreement={frac(rep['max_agreement'])}",
        "best_breakpoints=" + (",".join(str(b) for b in rep["best_breakpoints"])
                               or "(none)"),
        f"best_disc={rep['best_disc']}",
        f"tail_bound={frac(rep['tail_bound'])} "
        f"respected={'yes' if rep['tail_bound_respected'] else 'no'}",
        # informational only: the stated constant is not attained by explicit
        # unanimous families, so violations are reported, not asserted
        f"claimed_bound={frac(rep['claimed_bound'])} "
        f"respected={'yes' if rep['claimed_bound_respected'] else 'no'} "
        "(informational)",
        f"families_checked={rep['families_checked']} "
        f"applicable={rep['families_applicable']} "
        f"passed={rep['families_passed']}",
        f"proof_checks={'pass' if rep['families_passed'] == rep['families_checked'] else 'FAIL'}",
    ]
    for w in rep["failures"]:
        lines.append(f"failure: {w}")
    return "\n".join(lines) + "\n"


def random_consistent_family(K: int, N: int, depth: int,
                             rng: random.Random) -> Family:
    """Seeded family of size K with consistency above 3/4: all members copy
    one base classifier except for at most ceil(K/4) - 1 free deviators."""
    base = random_step_function(N, depth, rng)
    n_dev = rng.randint(0, max(0, -(-K // 4) - 1))
    members = [base] * (K - n_dev)
    members += [random_step_function(N, depth, rng) for _ in range(n_dev)]
    return Family(members=list(members), N=N)

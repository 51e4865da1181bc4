"""Which integer matrices can map the Siegel set back onto itself.

For gamma in SL(n,Z), ``gamma @ Sigma`` meets ``Sigma`` only if gamma's
entries are small: writing a witness pair s, gamma @ s in the u-left
order ``s = mu @ diag(alpha) @ kappa`` gives
``gamma = nu @ diag(beta) @ kappa' @ diag(alpha)^-1 @ mu^-1``, and a chain
of inequalities relating alpha and beta through gamma's leading entries
and block structure bounds every entry by ``sqrt(n)**(n**2 - 1)``.

This module provides those combinatorial gadgets (leading entries, finest
block partition, the height bound with its published variants), evaluates
the inequality chain on concrete witnesses, searches for witnesses by
seeded importance sampling plus local refinement, and exhaustively
enumerates the small-n candidate set together with the two-sided count
bounds.  The search is one-sided: it can certify membership in the
intersecting set, and can exclude only via the height bound; everything
else stays ``unknown``.

Caveat on conventions: witnesses are verified against the k-left
membership predicate (the one :func:`siegel.iwasawa.siegel_membership`
implements), while the chain and the height bound are certified for the
u-left reading of the Siegel set.  The two predicates provably differ,
and under the k-left one the height bound is heuristic: at n = 2 the
shear with entry 5 admits a verified k-left witness.  ``witnessed``
therefore always means a concretely verified pair that also passes the
chain; ``excluded`` means the published bound fails; near-witnesses that
break the chain are counted in ``rejected_witnesses`` and the candidate
stays ``unknown``.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import product as _iter_product

import numpy as np

from .errors import (
    DimensionTooLargeError,
    InvalidArgumentError,
    InvalidWitnessError,
)
from .haar import RngStream, SiegelCoordinatePoint, _point_weight, sample_haar_so
from .iwasawa import (
    MINIMAL_PARAMS,
    SiegelParams,
    UnimodularIntMatrix,
    a_from_b,
    decompose_nak,
    membership_excess,
)
from .volumes import ratio_C

STATUS_WITNESSED = "witnessed"
STATUS_EXCLUDED = "excluded"
STATUS_UNKNOWN = "unknown"

DEFAULT_WITNESS_TOL = 1e-7
STRICT_WITNESS_TOL = 1e-9
DEFAULT_BUDGET = 400


def height(gamma: UnimodularIntMatrix) -> int:
    """Largest absolute entry."""
    return gamma.height()


def leading_entries(gamma: UnimodularIntMatrix) -> list[tuple[int, int]]:
    """Per row, the (row, col) of the leftmost nonzero entry (1-based)."""
    out = []
    for i, row in enumerate(gamma.entries, start=1):
        for j, x in enumerate(row, start=1):
            if x != 0:
                out.append((i, j))
                break
        else:
            raise InvalidArgumentError(f"row {i} is zero; matrix not invertible")
    return out


@dataclass(frozen=True)
class PartitionAnalysis:
    """Finest interval partition w.r.t. which gamma is block upper triangular.

    ``components`` are inclusive 1-based intervals (start, end) covering
    1..n; a cut after index k is allowed iff every entry below-left of the
    (k, k) corner vanishes, and components are the maximal uncut runs.
    """

    gamma: UnimodularIntMatrix
    leading_entries: list[tuple[int, int]]
    components: list[tuple[int, int]]

    def component_of(self, i: int) -> int:
        for idx, (lo, hi) in enumerate(self.components):
            if lo <= i <= hi:
                return idx
        raise InvalidArgumentError(f"index {i} outside 1..n")

    def same_component(self, i: int, j: int) -> bool:
        return self.component_of(i) == self.component_of(j)


def finest_partition(gamma: UnimodularIntMatrix) -> PartitionAnalysis:
    """Scan for allowed cuts; a cut after k needs gamma[i, j] == 0 for all
    i > k, j <= k."""
    n = gamma.n
    e = gamma.entries
    cuts = []
    for k in range(1, n):
        if all(e[i][j] == 0 for i in range(k, n) for j in range(k)):
            cuts.append(k)
    components = []
    start = 1
    for k in cuts:
        components.append((start, k))
        start = k + 1
    components.append((start, n))
    return PartitionAnalysis(
        gamma=gamma, leading_entries=leading_entries(gamma), components=components
    )


def reachability_components(gamma: UnimodularIntMatrix) -> list[tuple[int, int]]:
    """Independent route to the same partition, via index sequences.

    Build edges i -> j whenever i <= j or (i, j) is a leading entry; two
    indices share a component iff each reaches the other.  Used as the
    exact cross-check oracle for :func:`finest_partition`.
    """
    n = gamma.n
    reach = [[i <= j for j in range(n)] for i in range(n)]
    for (i, j) in leading_entries(gamma):
        reach[i - 1][j - 1] = True
    for mid in range(n):
        for i in range(n):
            if reach[i][mid]:
                row_mid = reach[mid]
                row_i = reach[i]
                for j in range(n):
                    if row_mid[j]:
                        row_i[j] = True
    # upward reachability is free, so indices i < j are mutually reachable
    # iff j reaches i; component breaks are exactly the non-mutual
    # adjacent pairs, and components are intervals.
    components = []
    start = 1
    for c in range(n - 1):
        if not reach[c + 1][c]:
            components.append((start, c + 1))
            start = c + 2
    components.append((start, n))
    return components


def log_height_bound(n: int) -> float:
    """log of the proof-traceable bound (sqrt n)^(n^2 - 1)."""
    if n < 2:
        raise InvalidArgumentError("n must be >= 2")
    return (n * n - 1) / 2.0 * math.log(n)


def height_bound(n: int) -> float:
    """Entry bound certified for every intersecting gamma: (sqrt n)^(n^2-1).

    This is the constant the bound's own derivation produces; the
    published statements carry the smaller exponent (n^2 - n)/2, exposed
    in :func:`height_bound_variants`.  The larger exponent is the safe
    choice for an exclusion test.
    """
    return math.exp(log_height_bound(n))


def height_bound_variants(n: int) -> dict[str, float]:
    """All published forms of the bound, keyed by their exponent of sqrt(n)."""
    if n < 2:
        raise InvalidArgumentError("n must be >= 2")
    return {
        "exponent_n2_minus_1": math.exp((n * n - 1) / 2.0 * math.log(n)),
        "exponent_n2_minus_n": math.exp((n * n - n) / 2.0 * math.log(n)),
    }


@dataclass(frozen=True)
class FilterCheck:
    """One evaluated necessary condition: name, 1-based indices, verdict."""

    name: str
    indices: tuple[int, ...]
    passed: bool
    lhs: float
    rhs: float

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "indices": list(self.indices),
            "passed": self.passed,
            "lhs": self.lhs,
            "rhs": self.rhs,
        }


def lemma_filter_chain(
    gamma: UnimodularIntMatrix,
    s: np.ndarray,
    gamma_s: np.ndarray | None = None,
    p: SiegelParams = MINIMAL_PARAMS,
    membership_tol: float = DEFAULT_WITNESS_TOL,
    chain_tol: float = 1e-9,
) -> list[FilterCheck]:
    """Evaluate the full inequality chain on a concrete witness pair.

    ``alpha`` and ``beta`` are the diagonal u-left factors of s and
    gamma @ s (the order in which the chain's derivation writes Siegel
    elements).  Raises :class:`InvalidWitnessError` unless both elements
    satisfy the membership constraints within ``membership_tol``.  Every
    check is recorded; on a genuine witness all of them are expected to
    pass, and a failure is a loud signal of a numerical or logical fault.
    """
    n = gamma.n
    gf = gamma.to_array()
    if gamma_s is None:
        gamma_s = gf @ s
    exc_s = membership_excess(s, p, check=False)
    exc_gs = membership_excess(gamma_s, p, check=False)
    if exc_s > membership_tol or exc_gs > membership_tol:
        raise InvalidWitnessError(
            f"membership violated: excess(s)={exc_s:.3e}, excess(gamma s)={exc_gs:.3e}"
        )
    alpha = decompose_nak(s, check=False).a
    beta = decompose_nak(gamma_s, check=False).a
    sqrt_n = math.sqrt(n)
    checks: list[FilterCheck] = []

    def record(name, indices, lhs, rhs):
        checks.append(
            FilterCheck(
                name=name,
                indices=indices,
                passed=bool(lhs <= rhs + chain_tol * max(1.0, rhs)),
                lhs=float(lhs),
                rhs=float(rhs),
            )
        )

    leads = leading_entries(gamma)
    for (i, j) in leads:
        record("leading_entry_ratio", (i, j), alpha[j - 1], sqrt_n * beta[i - 1])
    for k in range(1, n + 1):
        record("diagonal_ratio", (k,), alpha[k - 1], sqrt_n * beta[k - 1])
    rev = sqrt_n ** (n - 1)
    for j in range(1, n + 1):
        record("reverse_ratio", (j,), beta[j - 1], rev * alpha[j - 1])
    comp = sqrt_n ** (n * n - 1)
    partition = finest_partition(gamma)
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if partition.same_component(i, j):
                record("component_ratio", (i, j), beta[j - 1], comp * alpha[i - 1])
    record("height_bound", (), float(gamma.height()), comp)
    return checks


@dataclass(frozen=True)
class IntersectionReport:
    """Per-candidate outcome of the witness search.

    ``witnessed`` carries a verified witness point and its residual
    membership excess; ``excluded`` means the height bound (a proven
    necessary condition) failed; ``unknown`` is an honest timeout.
    """

    gamma: UnimodularIntMatrix
    status: str
    witness: SiegelCoordinatePoint | None
    filter_trace: list[FilterCheck]
    witness_excess: float | None = None
    rejected_witnesses: int = 0

    def to_json_dict(self) -> dict:
        return {
            "gamma": self.gamma.to_json_dict(),
            "status": self.status,
            "witness": self.witness.to_json_dict() if self.witness else None,
            "witness_excess": self.witness_excess,
            "rejected_witnesses": self.rejected_witnesses,
            "filter_trace": [c.to_json_dict() for c in self.filter_trace],
        }


def _strict_upper_indices(n: int):
    return np.triu_indices(n, k=1)


def _probe_points(n: int, p: SiegelParams) -> list[SiegelCoordinatePoint]:
    """Deterministic first guesses: identity diagonal, every corner/center
    pattern of the unipotent box.  These sit exactly on the boundary, which
    is where translate overlaps concentrate."""
    iu = _strict_upper_indices(n)
    m = iu[0].size
    b = np.ones(n - 1)
    out = []
    for pattern in _iter_product((0.0, -p.lam, p.lam), repeat=m):
        u = np.eye(n)
        u[iu] = pattern
        out.append(
            SiegelCoordinatePoint(b=b.copy(), u=u, k=np.eye(n), weight=_point_weight(b))
        )
    return out


def _pair_excess(gf: np.ndarray, point: SiegelCoordinatePoint, p: SiegelParams) -> float:
    s = point.to_group_element()
    return membership_excess(gf @ s, p, check=False)


def _givens(n: int, i: int, j: int, theta: float) -> np.ndarray:
    r = np.eye(n)
    c, s = math.cos(theta), math.sin(theta)
    r[i, i] = c
    r[j, j] = c
    r[i, j] = -s
    r[j, i] = s
    return r


def _refine_point(
    gf: np.ndarray,
    point: SiegelCoordinatePoint,
    p: SiegelParams,
    target: float,
    max_rounds: int = 60,
) -> tuple[SiegelCoordinatePoint, float]:
    """Coordinate descent on the witness coordinates (log b, u, k-angles),
    keeping the point itself inside the box, minimizing the membership
    excess of gamma @ s."""
    n = point.n
    iu = _strict_upper_indices(n)
    m = iu[0].size
    log_t = math.log(p.t)
    log_b = np.minimum(np.log(point.b), log_t)
    u_vals = point.u[iu].copy()
    k = point.k.copy()

    def build(log_b, u_vals, k):
        u = np.eye(n)
        u[iu] = u_vals
        b = np.exp(log_b)
        return SiegelCoordinatePoint(b=b, u=u, k=k, weight=_point_weight(b))

    current = build(log_b, u_vals, k)
    best = _pair_excess(gf, current, p)
    pairs = list(zip(*iu))
    step_b = np.full(n - 1, 0.25)
    step_u = np.full(m, 0.2 * p.lam)
    step_k = np.full(m, 0.25)
    for _ in range(max_rounds):
        improved = False
        for c in range(n - 1):
            for sign in (1.0, -1.0):
                trial = log_b.copy()
                trial[c] = min(trial[c] + sign * step_b[c], log_t)
                cand = build(trial, u_vals, k)
                exc = _pair_excess(gf, cand, p)
                if exc < best:
                    log_b, best, improved = trial, exc, True
                    break
        for c in range(m):
            for sign in (1.0, -1.0):
                trial = u_vals.copy()
                trial[c] = float(np.clip(trial[c] + sign * step_u[c], -p.lam, p.lam))
                cand = build(log_b, trial, k)
                exc = _pair_excess(gf, cand, p)
                if exc < best:
                    u_vals, best, improved = trial, exc, True
                    break
        for c, (i, j) in enumerate(pairs):
            for sign in (1.0, -1.0):
                trial_k = k @ _givens(n, int(i), int(j), sign * step_k[c])
                cand = build(log_b, u_vals, trial_k)
                exc = _pair_excess(gf, cand, p)
                if exc < best:
                    k, best, improved = trial_k, exc, True
                    break
        if best <= target:
            break
        if not improved:
            step_b *= 0.5
            step_u *= 0.5
            step_k *= 0.5
            if max(step_b.max(), step_u.max(), step_k.max()) < 1e-13:
                break
    return build(log_b, u_vals, k), best


def _sample_search_point(
    gen: np.random.Generator, n: int, p: SiegelParams, b_min: float, emphasize: bool
) -> SiegelCoordinatePoint:
    lo = p.t / math.sqrt(2.0) if emphasize else b_min
    b = np.exp(gen.uniform(math.log(lo), math.log(p.t), size=n - 1))
    iu = _strict_upper_indices(n)
    u = np.eye(n)
    u[iu] = gen.uniform(-p.lam, p.lam, size=iu[0].size)
    k = sample_haar_so(n, gen)
    return SiegelCoordinatePoint(b=b, u=u, k=k, weight=_point_weight(b))


def find_witness(
    gamma: UnimodularIntMatrix,
    p: SiegelParams = MINIMAL_PARAMS,
    budget: int = DEFAULT_BUDGET,
    rng: RngStream | None = None,
    *,
    witness_tol: float = DEFAULT_WITNESS_TOL,
    strict_tol: float = STRICT_WITNESS_TOL,
    b_min: float | None = None,
    near_hit: float = 0.08,
) -> IntersectionReport:
    """Search for s in the Siegel set with gamma @ s also in the set.

    Order of business: the height bound (failing it proves exclusion),
    then deterministic boundary probes, then seeded random points (half
    of them with diagonal ratios in the top band [t/sqrt(2), t], where
    overlaps concentrate) with coordinate-descent refinement of near
    hits.  A candidate witness only counts once the inequality chain
    passes on it; a chain violation is recorded in the trace and the
    search continues, so a ``witnessed`` verdict is always backed by a
    clean trace.  Larger budgets extend the same sample sequence, so
    verdicts never regress from witnessed to unknown.
    """
    if rng is None:
        rng = RngStream(0, 0)
    n = gamma.n
    height_check = FilterCheck(
        "height_bound", (), float(gamma.height()) <= height_bound(n),
        float(gamma.height()), height_bound(n),
    )
    if not height_check.passed:
        return IntersectionReport(gamma, STATUS_EXCLUDED, None, [height_check], None)
    gf = gamma.to_array()
    if b_min is None:
        b_min = p.t / 16.0
    rejected: list[FilterCheck] = []

    def attempt(point: SiegelCoordinatePoint, excess: float):
        """Chain-check a verified candidate; return a report or None."""
        try:
            checks = lemma_filter_chain(
                gamma,
                point.to_group_element(),
                p=p,
                membership_tol=max(witness_tol, excess * 2.0 + 1e-15),
            )
        except InvalidWitnessError:
            return None
        if all(c.passed for c in checks):
            return IntersectionReport(
                gamma,
                STATUS_WITNESSED,
                point,
                [height_check] + checks,
                float(excess),
                rejected_witnesses=len(rejected),
            )
        rejected.extend(c for c in checks if not c.passed)
        return None

    for point in _probe_points(n, p):
        exc = _pair_excess(gf, point, p)
        if exc <= strict_tol:
            report = attempt(point, exc)
            if report is not None:
                return report

    gen = rng.generator()
    for i in range(budget):
        point = _sample_search_point(gen, n, p, b_min, emphasize=bool(i % 2))
        exc = _pair_excess(gf, point, p)
        if exc <= near_hit:
            refined, final = _refine_point(gf, point, p, target=strict_tol)
            if final <= witness_tol:
                report = attempt(refined, final)
                if report is not None:
                    return report
    # chain failures from rejected near-witnesses stay visible in the trace
    return IntersectionReport(
        gamma, STATUS_UNKNOWN, None, [height_check] + rejected, None,
        rejected_witnesses=len(rejected),
    )


def verify_witness(
    gamma: UnimodularIntMatrix,
    point: SiegelCoordinatePoint,
    p: SiegelParams = MINIMAL_PARAMS,
    tol: float = STRICT_WITNESS_TOL,
    refine: bool = True,
) -> bool:
    """Re-verify a claimed witness at a stricter tolerance, optionally
    running extra refinement first."""
    gf = gamma.to_array()
    exc = _pair_excess(gf, point, p)
    if exc > tol and refine:
        point, exc = _refine_point(gf, point, p, target=tol, max_rounds=120)
    return exc <= tol and membership_excess(point.to_group_element(), p, check=False) <= tol


def _primitive_rows(n: int, max_h: int) -> list[tuple[int, ...]]:
    rows = []
    for row in _iter_product(range(-max_h, max_h + 1), repeat=n):
        g = 0
        for x in row:
            g = math.gcd(g, abs(x))
        if g == 1:
            rows.append(row)
    return rows


def sl_candidates(n: int, max_h: int) -> list[UnimodularIntMatrix]:
    """Every SL(n,Z) element with all entries bounded by max_h, in
    lexicographic row order.

    Backtracking over rows; rows with gcd != 1 can never appear in a
    determinant-1 matrix, and partial row sets must stay of full rank.
    """
    from fractions import Fraction

    from .iwasawa import _bareiss_det

    rows = _primitive_rows(n, max_h)
    out: list[UnimodularIntMatrix] = []
    chosen: list[tuple[int, ...]] = []

    def full_rank(new_row) -> bool:
        # exact rank check over Q for the partial row set
        m = [[Fraction(x) for x in r] for r in chosen + [new_row]]
        rank = 0
        for col in range(n):
            piv = next((r for r in range(rank, len(m)) if m[r][col]), None)
            if piv is None:
                continue
            m[rank], m[piv] = m[piv], m[rank]
            for r in range(rank + 1, len(m)):
                f = m[r][col] / m[rank][col]
                if f:
                    for c in range(col, n):
                        m[r][c] -= f * m[rank][c]
            rank += 1
        return rank == len(chosen) + 1

    def recurse():
        if len(chosen) == n:
            if _bareiss_det([list(r) for r in chosen]) == 1:
                out.append(UnimodularIntMatrix.from_rows(chosen))
            return
        for row in rows:
            if chosen and len(chosen) < n - 1 and not full_rank(row):
                continue
            chosen.append(row)
            recurse()
            chosen.pop()

    recurse()
    return out


def count_bounds(n: int) -> tuple[float, float]:
    """(log lower, log upper) bounds on the number of intersecting matrices.

    Lower: the volume ratio from :func:`siegel.volumes.ratio_C`.  Upper:
    the crude lattice-point count (n * height_bound(n))**(n^2 - n).
    """
    if n < 2:
        raise InvalidArgumentError("n must be >= 2")
    log_lower = ratio_C(n).log_value()
    log_upper = (n * n - n) * (math.log(n) + log_height_bound(n))
    return log_lower, log_upper


def _witness_task(args):
    gamma, p, budget, seed, idx, kwargs = args
    return idx, find_witness(gamma, p, budget, RngStream(seed, idx), **kwargs)


def enumerate_intersections(
    n: int,
    p: SiegelParams = MINIMAL_PARAMS,
    budget_per_candidate: int = DEFAULT_BUDGET,
    rng: RngStream | None = None,
    *,
    max_height: int | None = None,
    workers: int = 1,
    **witness_kwargs,
) -> tuple[list[IntersectionReport], dict]:
    """Run the witness search over every candidate of height up to the bound.

    Candidates are exactly the SL(n,Z) elements with height at most
    floor(height_bound(n)) (overridable via ``max_height``; at n = 3 the
    full bound is 81 and the exhaustive grid is astronomically large, so
    practical runs cap it).  Each candidate owns the stream
    (seed, candidate_index), so reports are deterministic and
    worker-count independent.
    """
    if n < 2:
        raise InvalidArgumentError("n must be >= 2")
    if n > 3:
        raise DimensionTooLargeError("exhaustive enumeration is desk-scale only (n <= 3)")
    if rng is None:
        rng = RngStream(0, 0)
    cap = int(math.floor(height_bound(n))) if max_height is None else int(max_height)
    candidates = sl_candidates(n, cap)
    tasks = [
        (gamma, p, budget_per_candidate, rng.seed, idx, witness_kwargs)
        for idx, gamma in enumerate(candidates)
    ]
    reports: list[IntersectionReport | None] = [None] * len(candidates)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for idx, rep in pool.map(_witness_task, tasks, chunksize=8):
                reports[idx] = rep
    else:
        for task in tasks:
            idx, rep = _witness_task(task)
            reports[idx] = rep
    reports = [r for r in reports if r is not None]
    counts = {
        STATUS_WITNESSED: sum(r.status == STATUS_WITNESSED for r in reports),
        STATUS_EXCLUDED: sum(r.status == STATUS_EXCLUDED for r in reports),
        STATUS_UNKNOWN: sum(r.status == STATUS_UNKNOWN for r in reports),
    }
    log_lower, log_upper = count_bounds(n)
    lower_bound = math.ceil(math.exp(log_lower))
    summary = {
        "n": n,
        "candidates": len(candidates),
        "witnessed": counts[STATUS_WITNESSED],
        "excluded": counts[STATUS_EXCLUDED],
        "unknown": counts[STATUS_UNKNOWN],
        "lower_bound": lower_bound,
        "upper_log_count": log_upper,
        "meets_lower_bound": counts[STATUS_WITNESSED] >= lower_bound,
        "lower_bound_gap": max(0, lower_bound - counts[STATUS_WITNESSED]),
        "seed": rng.seed,
        "budgets": {"budget_per_candidate": budget_per_candidate},
        "height_cap": cap,
    }
    return reports, summary


def reports_to_jsonl(reports: list[IntersectionReport]) -> str:
    import json

    return "\n".join(json.dumps(r.to_json_dict(), sort_keys=True) for r in reports) + "\n"

"""Resonant neighbourhoods of rational hyperplanes and their exact measures.

Four set shapes live here, all subsets of [0,1]^{nm} attached to a nonzero
integer vector q (coordinates x are read as m blocks x_1..x_m of length n):

  weighted          |q.x_j - p_j| < delta_j for some integers p_j
  weighted_coprime  same, but every witness p_j must satisfy gcd(p_j, q)=1
  mult              prod_j ||q.x_j|| < delta
  mult_coprime      prod_j |q.x_j - p_j| < delta with coprime witnesses

The measure of each weighted factor depends only on d = gcd(q): pushing
forward by y = q.x mod 1 is measure preserving onto {y : |d y - p| < delta},
which gives the closed forms min(2 delta, 1) and 2 delta phi(d)/d.  The
multiplicative star has measure P(prod U_j < 2^m delta) for iid uniform U_j,
i.e. V_m(2^m delta) with V_m(t) = t * sum_{k<m} log^k(1/t)/k!.

The dyadic decomposition splits a multiplicative star into weighted
rectangles indexed by k in Z^m_{>=0} with sum k_i = N - m where
2^{-N-1} < delta <= 2^{-N}; the classic sandwich

  M'(q, delta)  subset  union_k R'(q, 2^{-k})  subset  M'(q, 2^{m+1} delta)

is checked pointwise by `sandwich_check`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import product as iter_product

import numpy as np

from ._rng import monte_carlo_fraction
from .funcspace import ApproximatingFunction, WeightSystem
from .intervals import (
    Box,
    IntervalSet,
    box_union_intersection_measure,
    resonant_interval_set,
)


@dataclass(frozen=True)
class LatticePoint:
    """A nonzero integer vector with its norms and gcd precomputed."""

    coords: tuple[int, ...]

    def __post_init__(self):
        coords = tuple(int(c) for c in self.coords)
        if not coords or all(c == 0 for c in coords):
            raise ValueError("lattice point must be a nonzero integer vector")
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "sup_norm", max(abs(c) for c in coords))
        object.__setattr__(self, "gcd", math.gcd(*[abs(c) for c in coords]))
        object.__setattr__(self, "norm2", math.sqrt(sum(c * c for c in coords)))

    sup_norm: int = 0
    gcd: int = 0
    norm2: float = 0.0

    @property
    def n(self) -> int:
        return len(self.coords)

    def __neg__(self) -> "LatticePoint":
        return LatticePoint(tuple(-c for c in self.coords))

    def dot(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x) @ np.asarray(self.coords, dtype=float)


def shell_count(n: int, q: int) -> int:
    """Number of integer vectors with sup norm exactly q."""
    if q < 1:
        raise ValueError("shell radius must be a positive integer")
    return (2 * q + 1) ** n - (2 * q - 1) ** n

def enumerate_shell(n: int, q: int, budget: int = 20_000_000) -> list[LatticePoint]:
    """All lattice points with sup norm exactly q, in lexicographic order."""
    if (2 * q + 1) ** n > budget:
        raise ValueError(
            f"shell (n={n}, q={q}) has around {(2*q+1)**n} candidates, over the budget"
        )
    out = []
    for coords in iter_product(range(-q, q + 1), repeat=n):
        if max(abs(c) for c in coords) == q:
            out.append(LatticePoint(coords))
    return out


def shell_weight_sum(weights: WeightSystem, n: int, q: int) -> float:
    """Sum of prod_j psi_j(v) over the shell |v| = q."""
    if weights.univariable:
        return shell_count(n, q) * float(np.prod(weights.values_at_norm(q)))
    return math.fsum(
        float(np.prod(weights.evaluate(v))) for v in enumerate_shell(n, q)
    )


# ---------------------------------------------------------------------------
# totients
# ---------------------------------------------------------------------------


@lru_cache(maxsize=8)
def totient_sieve(limit: int) -> np.ndarray:
    """phi(0..limit) by a linear sieve."""
    phi = np.arange(limit + 1, dtype=np.int64)
    for p in range(2, limit + 1):
        if phi[p] == p:  # p is prime
            phi[p::p] -= phi[p::p] // p
    return phi


@dataclass(frozen=True)
class LambdaReport:
    k: int
    qmax: int
    count: int
    densities: tuple[tuple[int, float], ...]
    members_head: tuple[int, ...]


def lambda_set(k: int, qmax: int) -> LambdaReport:
    """Integers q <= qmax with phi(q)/q >= 1 - 1/k, with dyadic densities."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    phi = totient_sieve(qmax)
    q = np.arange(1, qmax + 1)
    mask = phi[1:] * k >= q * (k - 1)
    members = q[mask]
    densities = []
    j = 1
    while 2**j <= qmax:
        cut = 2**j
        densities.append((cut, float(np.count_nonzero(members <= cut)) / cut))
        j += 1
    densities.append((qmax, len(members) / qmax))
    return LambdaReport(
        k=k,
        qmax=qmax,
        count=int(len(members)),
        densities=tuple(densities),
        members_head=tuple(int(v) for v in members[:32]),
    )


# ---------------------------------------------------------------------------
# descriptors and exact measures
# ---------------------------------------------------------------------------

VARIANTS = ("weighted", "weighted_coprime", "mult", "mult_coprime")


@dataclass(frozen=True)
class ResonantDescriptor:
    """One resonant neighbourhood.

    weighted variants:  deltas has length m (one radius per block)
    mult variants:      delta is the product budget, m says how many blocks

    The measure-side invariants (delta_j < 1/2 for coprime factors,
    delta <= 2^-m for the star) are enforced where measures are computed;
    membership is well defined for any positive radii, which the sandwich
    check needs for its inflated outer star.
    """

    variant: str
    q: LatticePoint
    m: int
    deltas: tuple[float, ...] = ()
    delta: float = float("nan")

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.m < 1:
            raise ValueError("m must be positive")
        if self.variant.startswith("weighted"):
            if len(self.deltas) != self.m:
                raise ValueError("weighted variants need one delta per block")
            if any(d < 0 for d in self.deltas):
                raise ValueError("deltas must be non-negative")
        else:
            if not self.delta > 0:
                raise ValueError("mult variants need a positive delta")

    @property
    def n(self) -> int:
        return self.q.n

    @property
    def ambient_dim(self) -> int:
        return self.n * self.m


def weighted_rect(q: LatticePoint, deltas) -> ResonantDescriptor:
    deltas = tuple(float(d) for d in deltas)
    return ResonantDescriptor(variant="weighted", q=q, m=len(deltas), deltas=deltas)


def weighted_rect_coprime(q: LatticePoint, deltas) -> ResonantDescriptor:
    deltas = tuple(float(d) for d in deltas)
    return ResonantDescriptor(
        variant="weighted_coprime", q=q, m=len(deltas), deltas=deltas
    )


def mult_star(q: LatticePoint, m: int, delta: float) -> ResonantDescriptor:
    return ResonantDescriptor(variant="mult", q=q, m=m, delta=float(delta))


def mult_star_coprime(q: LatticePoint, m: int, delta: float) -> ResonantDescriptor:
    return ResonantDescriptor(variant="mult_coprime", q=q, m=m, delta=float(delta))


def v_star(m: int, t: float) -> float:
    """V_m(t) = P(U_1 ... U_m < t) for iid uniforms: t * sum_{k<m} log^k(1/t)/k!."""
    if not 0 < t <= 1:
        raise ValueError(f"t must lie in (0, 1], got {t}")
    L = math.log(1.0 / t)
    term = 1.0
    acc = 1.0
    for k in range(1, m):
        term *= L / k
        acc += term
    return t * acc


def measure_exact(
    desc: ResonantDescriptor, mc_samples: int = 1_000_000, seed: int = 0
) -> float:
    """Lebesgue measure of the descriptor's set.

    Closed form in every case except the coprime star with m >= 2 blocks,
    where the coordinates couple through the product and the measure falls
    back to the deterministic Monte-Carlo path (documented, chunk-keyed).
    """
    d = desc.q.gcd
    if desc.variant == "weighted":
        return float(np.prod([min(2 * dd, 1.0) for dd in desc.deltas]))
    if desc.variant == "weighted_coprime":
        if any(dd >= 0.5 for dd in desc.deltas):
            raise ValueError("coprime factor measures need delta < 1/2")
        phi = _phi(d)
        return float(np.prod([2 * dd * phi / d for dd in desc.deltas]))
    if desc.variant == "mult":
        if desc.delta > 2.0**-desc.m:
            raise ValueError("star measure needs delta <= 2^-m")
        return v_star(desc.m, 2.0**desc.m * desc.delta)
    # mult_coprime
    if desc.m == 1:
        if desc.delta >= 0.5:
            raise ValueError("coprime factor measures need delta < 1/2")
        return 2 * desc.delta * _phi(d) / d
    return measure_monte_carlo(desc, n_samples=mc_samples, seed=seed)


def _phi(d: int) -> int:
    return int(totient_sieve(max(d, 2))[d])


def coprime_star_lower_bound(desc: ResonantDescriptor) -> float:
    """phi(d)^m d^-m delta log^{m-1}(1/delta), the coprime star's floor."""
    d = desc.q.gcd
    return (
        (_phi(d) / d) ** desc.m
        * desc.delta
        * math.log(1.0 / desc.delta) ** (desc.m - 1)
    )


def measure_monte_carlo(
    desc: ResonantDescriptor, n_samples: int = 1_000_000, seed: int = 0
) -> float:
    """Monte-Carlo measure via the gcd reduction (samples live in [0,1]^m)."""
    d = desc.q.gcd
    frac, _ = monte_carlo_fraction(
        lambda pts: _reduced_membership(desc.variant, d, desc.m, pts, desc.deltas, desc.delta),
        dim=desc.m,
        n_samples=n_samples,
        seed=seed,
    )
    return frac


# ---------------------------------------------------------------------------
# membership
# ---------------------------------------------------------------------------


def _dist_to_integers(v: np.ndarray) -> np.ndarray:
    return np.abs(v - np.round(v))


@lru_cache(maxsize=256)
def _coprime_residue_grid(d: int) -> np.ndarray:
    """Sorted integers r in [-d, 2d] with gcd(r mod d, d) = 1 (d >= 1)."""
    rs = [r for r in range(-d, 2 * d + 1) if math.gcd(r % d if d else r, d) == 1]
    return np.asarray(rs, dtype=float)


def coprime_dist(v: np.ndarray, d: int) -> np.ndarray:
    """Distance from v to the nearest integer coprime with d (vectorised)."""
    v = np.asarray(v, dtype=float)
    if d == 1:
        return _dist_to_integers(v)
    base = np.floor(v / d) * d
    rel = v - base  # in [0, d)
    grid = _coprime_residue_grid(d)
    idx = np.searchsorted(grid, rel)
    idx = np.clip(idx, 1, len(grid) - 1)
    left = np.abs(rel - grid[idx - 1])
    right = np.abs(grid[idx] - rel)
    return np.minimum(left, right)


def _block_dots(q: LatticePoint, m: int, points: np.ndarray) -> np.ndarray:
    """q.x_j for each block: (N, nm) points -> (N, m) dot values."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    n = q.n
    if pts.shape[1] != n * m:
        raise ValueError(f"points must have {n * m} coordinates")
    blocks = pts.reshape(pts.shape[0], m, n)
    return blocks @ np.asarray(q.coords, dtype=float)


def membership(desc: ResonantDescriptor, points: np.ndarray) -> np.ndarray:
    """Vectorised membership of points (N, nm) in the descriptor's set."""
    dots = _block_dots(desc.q, desc.m, points)
    d = desc.q.gcd
    if desc.variant == "weighted":
        return np.all(
            _dist_to_integers(dots) < np.asarray(desc.deltas), axis=1
        )
    if desc.variant == "weighted_coprime":
        return np.all(coprime_dist(dots, d) < np.asarray(desc.deltas), axis=1)
    if desc.variant == "mult":
        return np.prod(_dist_to_integers(dots), axis=1) < desc.delta
    return np.prod(coprime_dist(dots, d), axis=1) < desc.delta


def _reduced_membership(variant, d, m, pts, deltas, delta):
    """Membership after the gcd reduction: pts live in [0,1]^m, q -> d."""
    v = pts * d  # y_j = d * u_j with u uniform reproduces q.x_j mod the lattice
    if variant == "weighted":
        return np.all(_dist_to_integers(v) < np.asarray(deltas), axis=1)
    if variant == "weighted_coprime":
        return np.all(coprime_dist(v, d) < np.asarray(deltas), axis=1)
    if variant == "mult":
        return np.prod(_dist_to_integers(v), axis=1) < delta
    return np.prod(coprime_dist(v, d), axis=1) < delta


# ---------------------------------------------------------------------------
# dyadic decomposition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DyadicDecomposition:
    m: int
    delta: float
    N: int
    indices: tuple[tuple[int, ...], ...]

    @property
    def cardinality(self) -> int:
        return len(self.indices)


def dyadic_scale(delta: float) -> int:
    """The unique N with 2^{-N-1} < delta <= 2^{-N}."""
    if not 0 < delta <= 0.5:
        raise ValueError("delta must lie in (0, 1/2]")
    N = -math.floor(math.log2(delta))
    while 2.0 ** (-N) < delta:
        N -= 1
    while 2.0 ** (-N - 1) >= delta:
        N += 1
    return N


def _compositions(total: int, parts: int):
    """Non-negative integer tuples of length `parts` summing to `total`, lex order."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


def dyadic_decompose(m: int, delta: float) -> DyadicDecomposition:
    """All k in Z^m_{>=0} with sum k_i = N - m for the scale N of delta.

    Cardinality is C(N-1, m-1); requires delta <= 2^-m so that N >= m.
    """
    N = dyadic_scale(delta)
    if N < m:
        raise ValueError(f"delta {delta} too large for m={m}: need delta <= 2^-m")
    indices = tuple(_compositions(N - m, m))
    assert len(indices) == math.comb(N - 1, m - 1)
    return DyadicDecomposition(m=m, delta=delta, N=N, indices=indices)


@dataclass(frozen=True)
class SandwichReport:
    points: int
    inner_hits: int
    union_hits: int
    outer_hits: int
    inner_violations: int
    outer_violations: int

    @property
    def ok(self) -> bool:
        return self.inner_violations == 0 and self.outer_violations == 0


def sandwich_check(
    q: LatticePoint,
    m: int,
    delta: float,
    n_points: int = 100_000,
    seed: int = 0,
) -> SandwichReport:
    """Pointwise check of star subset dyadic union subset inflated star.

    Random points in [0,1]^{nm} plus one deterministic point on a resonant
    hyperplane.  Membership chains that fail are counted as violations.
    """
    from ._rng import chunk_plan, chunk_rng

    inner = mult_star_coprime(q, m, delta)
    outer = mult_star_coprime(q, m, 2.0 ** (m + 1) * delta)
    decomposition = dyadic_decompose(m, delta)
    rects = [
        weighted_rect_coprime(q, tuple(2.0 ** -k for k in idx))
        for idx in decomposition.indices
    ]

    nm = q.n * m
    # deterministic witness: x_j has 1/|q_i| at a nonzero coordinate of q
    i0 = max(range(q.n), key=lambda i: abs(q.coords[i]))
    unit = np.zeros(q.n)
    unit[i0] = 1.0 / abs(q.coords[i0])
    witness = np.tile(unit, m)

    inner_hits = union_hits = outer_hits = 0
    inner_violations = outer_violations = 0
    total = 0
    batches = [witness[None, :]]
    for c, size in chunk_plan(n_points):
        batches.append(chunk_rng(seed, c).random((size, nm)))
    for pts in batches:
        in_inner = membership(inner, pts)
        in_union = np.zeros(len(pts), dtype=bool)
        for rect in rects:
            in_union |= membership(rect, pts)
        in_outer = membership(outer, pts)
        inner_hits += int(np.count_nonzero(in_inner))
        union_hits += int(np.count_nonzero(in_union))
        outer_hits += int(np.count_nonzero(in_outer))
        inner_violations += int(np.count_nonzero(in_inner & ~in_union))
        outer_violations += int(np.count_nonzero(in_union & ~in_outer))
        total += len(pts)
    return SandwichReport(
        points=total,
        inner_hits=inner_hits,
        union_hits=union_hits,
        outer_hits=outer_hits,
        inner_violations=inner_violations,
        outer_violations=outer_violations,
    )


# ---------------------------------------------------------------------------
# sign selection
# ---------------------------------------------------------------------------


def sign_select(
    value_of, shell: list[LatticePoint]
) -> list[LatticePoint]:
    """The shell subset where value_of(v) >= value_of(-v), ties lex-resolved.

    value_of is any map LatticePoint -> float (for weighted systems pass
    lambda v: prod(Psi(v))).  On an exact tie only the lexicographically
    larger of v, -v is kept, so univariable systems keep exactly one point
    per opposite pair.
    """
    out = []
    for v in shell:
        a = value_of(v)
        b = value_of(-v)
        if a > b or (a == b and v.coords > (-v).coords):
            out.append(v)
    return out


# ---------------------------------------------------------------------------
# pairwise intersections and quasi-independence
# ---------------------------------------------------------------------------


def _descriptor_boxes(desc: ResonantDescriptor) -> list[Box]:
    """n = 1 only: the set (or its dyadic surrogate) as a union of boxes."""
    if desc.n != 1:
        raise ValueError("exact boxes are available for n = 1 only")
    q = desc.q.coords[0]
    coprime = desc.variant.endswith("coprime")
    if desc.variant.startswith("weighted"):
        return [
            tuple(
                resonant_interval_set(q, dd, coprime=coprime) for dd in desc.deltas
            )
        ]
    decomposition = dyadic_decompose(desc.m, desc.delta)
    boxes = []
    for idx in decomposition.indices:
        boxes.append(
            tuple(
                resonant_interval_set(q, 2.0**-k, coprime=coprime) for k in idx
            )
        )
    return boxes


def pairwise_intersection_1d(
    d1: ResonantDescriptor, d2: ResonantDescriptor
) -> float:
    """Exact measure of the intersection of two n=1 descriptors.

    Weighted variants intersect factor-wise; multiplicative variants are
    replaced by their dyadic-union surrogates (the only exact object at this
    scale), and the two box unions intersect by recursive sweep.
    """
    if d1.m != d2.m:
        raise ValueError("descriptors must share m")
    b1 = _descriptor_boxes(d1)
    b2 = _descriptor_boxes(d2)
    if len(b1) == 1 and len(b2) == 1:
        return float(
            np.prod([s1.intersect(s2).measure() for s1, s2 in zip(b1[0], b2[0])])
        )
    return box_union_intersection_measure(b1, b2)


def set_measure_1d(desc: ResonantDescriptor) -> float:
    """Exact measure of an n=1 descriptor (dyadic surrogate for mult variants)."""
    from .intervals import box_union_measure

    return box_union_measure(_descriptor_boxes(desc))


@dataclass(frozen=True)
class QuasiIndependenceReport:
    C: float
    lamperti_lower: float
    pairs: int
    skipped_null: int
    method: str
    worst_pair: tuple[int, int] | None


def quasi_independence_report(
    descs: list[ResonantDescriptor],
    mc_samples: int = 200_000,
    seed: int = 0,
) -> QuasiIndependenceReport:
    """Worst pairwise ratio mu(Ei & Ej) / (mu(Ei) mu(Ej)) across the family.

    Exact for n = 1 (sweeps); Monte-Carlo with the shared-stream sampler
    otherwise.  Pairs with a null factor are skipped and counted; the
    reported constant is floored at 1 (a disjoint family is as independent
    as it gets), and 1/C is the Lamperti-style lower bound on the measure
    of the limsup carried by the family.
    """
    exact = all(d.n == 1 for d in descs)
    measures = []
    for d in descs:
        measures.append(set_measure_1d(d) if exact else measure_monte_carlo(d, mc_samples, seed))
    C = 1.0
    worst = None
    pairs = 0
    skipped = 0
    for i in range(len(descs)):
        for j in range(i + 1, len(descs)):
            if measures[i] == 0 or measures[j] == 0:
                skipped += 1
                continue
            if exact:
                inter = pairwise_intersection_1d(descs[i], descs[j])
            else:
                inter = _mc_pair_intersection(descs[i], descs[j], mc_samples, seed)
            ratio = inter / (measures[i] * measures[j])
            pairs += 1
            if ratio > C:
                C = ratio
                worst = (i, j)
    return QuasiIndependenceReport(
        C=float(C),
        lamperti_lower=1.0 / float(C),
        pairs=pairs,
        skipped_null=skipped,
        method="exact-sweep" if exact else "monte-carlo",
        worst_pair=worst,
    )


def _mc_pair_intersection(d1, d2, n_samples, seed):
    if d1.ambient_dim != d2.ambient_dim:
        raise ValueError("descriptors must share the ambient dimension")
    frac, _ = monte_carlo_fraction(
        lambda pts: membership(d1, pts) & membership(d2, pts),
        dim=d1.ambient_dim,
        n_samples=n_samples,
        seed=seed,
    )
    return frac

"""Desk-scale empirical verification of limsup-set statements.

Everything here measures a *finite* stage of a limsup set or a concrete
measure against the quantity a theorem predicts:

  - exact coverage of union stages (interval sweep at ambient dimension 1,
    Monte Carlo with Wilson intervals otherwise),
  - first-moment tail bounds (one summand per *distinct* resonant set: q and
    -q define the same set, so a shell of lattice points contributes
    shell_count/2 sets),
  - the natural-cover cost exponent (the s where fitted block growth of the
    weighted Hausdorff series crosses zero),
  - Fourier coefficients of the surface measure on {x : q.x = 0 mod 1}
    (quadrature, with a refinement-based error estimate),
  - measure bounds mu(R(q, delta)) against the frequency-sum right-hand
    side, and the marginal/projection identity for atomic measures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._rng import chunk_plan, chunk_rng, wilson_interval
from .criteria import SeriesDescriptor, series_sum
from .formulas import ProblemInstance
from .funcspace import DimensionFunction
from .intervals import swept_union_measure, union_length_sorted
from .resonant import (
    LatticePoint,
    ResonantDescriptor,
    membership,
    mult_star,
    shell_count,
    v_star,
    weighted_rect,
)

# ---------------------------------------------------------------------------
# stage unions and coverage
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StageUnion:
    """The union of resonant sets over a shell range Qlo <= |q| <= Qhi."""

    instance: ProblemInstance
    Qlo: int
    Qhi: int

    def __post_init__(self):
        if self.Qlo < 1:
            raise ValueError("Qlo must be a positive integer")

    @property
    def representation(self) -> str:
        return "intervals" if self.instance.ambient_dim == 1 else "monte_carlo"


@dataclass(frozen=True)
class CoverageReport:
    value: float
    half_width: float | None  # None for the exact interval sweep
    method: str
    samples: int
    seed: int


def _interval_sweep_measure(psi, Qlo: int, Qhi: int, windows: int = 64) -> float:
    """Exact measure of the union of scalar resonant sets, one window at a time.

    For each norm Q the set is Q+1 intervals of radius psi(Q)/Q centred at
    p/Q; a window [w0, w1) only needs the p-range meeting it, generated as
    one ragged arange over all norms at once.
    """
    if Qhi < Qlo:
        return 0.0
    Qs = np.arange(Qlo, Qhi + 1)
    deltas = psi.eval_norm_array(Qs)
    keep = deltas > 0
    Qs, deltas = Qs[keep], deltas[keep]
    if Qs.size == 0:
        return 0.0
    radii = deltas / Qs

    def gen(w0: float, w1: float):
        plo = np.maximum(np.floor((w0 - radii) * Qs), 0).astype(np.int64)
        phi = np.minimum(np.ceil((w1 + radii) * Qs), Qs).astype(np.int64)
        cnt = np.maximum(phi - plo + 1, 0)
        total = int(cnt.sum())
        if total == 0:
            return np.empty(0), np.empty(0)
        starts_at = np.concatenate(([0], np.cumsum(cnt)[:-1]))
        idx = np.arange(total)
        p = idx - np.repeat(starts_at, cnt) + np.repeat(plo, cnt)
        centres = p / np.repeat(Qs, cnt)
        r = np.repeat(radii, cnt)
        return centres - r, centres + r

    return swept_union_measure(gen, windows=windows)


def _stage_descriptor(inst: ProblemInstance, q: LatticePoint) -> ResonantDescriptor:
    if inst.mode == "multiplicative":
        return mult_star(q, inst.m, inst.psi(q))
    deltas = inst.as_weight_system().evaluate(q)
    return weighted_rect(q, deltas)


def coverage_fraction(
    stage: StageUnion, samples: int = 1_000_000, seed: int = 0
) -> CoverageReport:
    """Measure of the stage union: exact at ambient dimension 1, else MC.

    The Monte-Carlo path walks the shells once per sample block (budget
    guard: (2 Qhi + 1)^n lattice points per shell times the sample count),
    reporting a 99% Wilson half-width.  Exact sweeps report half_width None.
    """
    inst = stage.instance
    if stage.Qhi < stage.Qlo:
        return CoverageReport(0.0, None, "empty", 0, seed)
    if stage.representation == "intervals":
        psi = inst.psi if inst.psi is not None else inst.weights.components[0]
        value = _interval_sweep_measure(psi, stage.Qlo, stage.Qhi)
        return CoverageReport(value, None, "interval_sweep", 0, seed)

    from .resonant import enumerate_shell

    descriptors = []
    for Q in range(stage.Qlo, stage.Qhi + 1):
        for q in enumerate_shell(inst.n, Q):
            descriptors.append(_stage_descriptor(inst, q))
    if len(descriptors) * samples > 5e9:
        raise ValueError("Monte-Carlo budget exceeded; shrink the range or samples")
    d = inst.ambient_dim
    hits = 0
    for chunk_index, size in chunk_plan(samples):
        rng = chunk_rng(seed, chunk_index)
        pts = rng.random((size, d))
        inside = np.zeros(size, dtype=bool)
        for desc in descriptors:
            inside |= membership(desc, pts)
            if inside.all():
                break
        hits += int(inside.sum())
    frac = hits / samples
    lo, hi = wilson_interval(hits, samples)
    return CoverageReport(frac, (hi - lo) / 2, "monte_carlo", samples, seed)


# ---------------------------------------------------------------------------
# first-moment tail bounds
# ---------------------------------------------------------------------------


def _distinct_sets_per_shell(n: int, Q: int) -> float:
    # q and -q carve the same resonant set, and shells are symmetric
    return shell_count(n, Q) / 2.0


def tail_first_moment(inst: ProblemInstance, Qlo: int, Qhi: float) -> float:
    """Sum of the exact measures of all distinct resonant sets in the range.

    An upper bound for the tail union's measure (Borel-Cantelli first
    moment).  Qhi = inf is supported for norm-dependent power-decay budgets
    in the rectangle modes: the finite part is summed exactly up to a cutoff
    and the remainder is bounded by the comparison integral (the result is
    still an upper bound).
    """
    if Qhi != math.inf and Qhi < Qlo:
        return 0.0
    n, m = inst.n, inst.m
    weights = inst.as_weight_system()
    symbolic_tail = 0.0
    if Qhi == math.inf:
        if inst.mode == "multiplicative":
            raise ValueError("infinite ranges need a rectangle mode (weighted/nonweighted)")
        taus = []
        coeff = 1.0
        for c in weights.components:
            if c.kind != "power":
                raise ValueError("infinite ranges need pure power budgets")
            taus.append(c.tau)
            coeff *= 2.0 * c.coeff
        exponent = (n - 1) - sum(taus)
        if exponent >= -1:
            return math.inf
        cutoff = max(100_000, 10 * Qlo)
        # distinct sets per shell <= n (2Q+1)^{n-1} <= n 3^{n-1} Q^{n-1}
        shell_bound = n * 3.0 ** (n - 1)
        symbolic_tail = (
            shell_bound * coeff * (cutoff + 0.5) ** (exponent + 1) / -(exponent + 1)
        )
        Qhi = cutoff
    Qs = np.arange(Qlo, int(Qhi) + 1)
    if Qs.size == 0:
        return symbolic_tail
    counts = ((2 * Qs + 1.0) ** n - (2 * Qs - 1.0) ** n) / 2.0
    if inst.mode == "multiplicative":
        vals = inst.psi.eval_norm_array(Qs)
        per_set = np.array(
            [min(v_star(m, min((2.0**m) * v, 1.0)), 1.0) if v > 0 else 0.0 for v in vals]
        )
    else:
        per_set = np.ones(len(Qs))
        for c in weights.components:
            per_set = per_set * np.minimum(2.0 * c.eval_norm_array(Qs), 1.0)
    return float(np.sum(counts * per_set)) + symbolic_tail


# ---------------------------------------------------------------------------
# natural-cover cost exponent
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CostExponent:
    value: float | None
    window: tuple[int, int] | None
    slope_lo: float
    slope_hi: float
    Kmax: int
    status: str  # "ok" or "no_crossing"


def hausdorff_cost_exponent(
    inst: ProblemInstance, Kmax: int = 16, tol: float = 1e-3
) -> CostExponent:
    """The s where the fitted growth of the natural-cover cost crosses zero.

    For each candidate exponent the weighted Hausdorff series (per-point
    summand t_q(Psi, r^s) |q|^m) is block-summed and its growth exponent
    fitted; the fit is decreasing in s, and the crossing is bisected to
    `tol` inside the unit window (j, j+1) where the sign flips.  No sign
    flip in any window -> status "no_crossing" and value None.
    """
    if inst.mode == "multiplicative":
        raise ValueError("the natural-cover exponent is for rectangle modes")
    weights = inst.as_weight_system()
    eps = 1e-6

    def slope(s: float) -> float:
        f = DimensionFunction.power(s, domain_cap=1.0)
        desc = SeriesDescriptor.weighted_hausdorff(inst.n, weights, f)
        return series_sum(desc, Kmax=Kmax).growth_exponent

    window = None
    slope_lo = slope_hi = math.nan
    for j in range(inst.ambient_dim):
        lo, hi = slope(j + eps), slope(j + 1 - eps)
        if lo > 0 >= hi:
            window = (j, j + 1)
            slope_lo, slope_hi = lo, hi
            break
    if window is None:
        return CostExponent(None, None, math.nan, math.nan, Kmax, "no_crossing")
    a, b = window[0] + eps, window[1] - eps
    while b - a > tol:
        mid = 0.5 * (a + b)
        if slope(mid) > 0:
            a = mid
        else:
            b = mid
    return CostExponent(0.5 * (a + b), window, slope_lo, slope_hi, Kmax, "ok")


# ---------------------------------------------------------------------------
# surface measures and their Fourier coefficients
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FourierSample:
    value: complex
    magnitude: float
    error_estimate: float
    reliable: bool
    mass: float  # total mass of the measure (the k = 0 value)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


def _gl_panels(freq: float, panels: int) -> complex:
    """integral over [0,1] of e^{-2 pi i freq t} by composite Gauss-Legendre."""
    edges = np.linspace(0.0, 1.0, panels + 1)
    mid = (edges[:-1] + edges[1:]) / 2
    half = (edges[1:] - edges[:-1]) / 2
    t = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    vals = np.exp(-2j * math.pi * freq * t)
    return complex(np.sum(vals * _GL_WEIGHTS[None, :] * half[:, None]))


def surface_fourier(q: LatticePoint, kvec, resolution: int = 32) -> FourierSample:
    """Fourier coefficient of the surface measure on {x : q.x = 0 mod 1}.

    n = 1: the measure is unit mass on each of the |q| points p/|q| (total
    mass |q|), and the coefficient is the exact character sum.  n = 2: with
    d = gcd(q) and q = d q', the set is d closed geodesics of length |q'|_2
    parametrized over t in [0,1] with constant direction (-q2', q1'); the
    coefficient is integrated by composite Gauss-Legendre with `resolution`
    panels and re-integrated at double resolution for the error estimate.
    Integer frequencies make the integrand smooth and periodic, so no
    segment splitting at the square's boundary is needed.
    """
    k = np.asarray(kvec, dtype=float)
    if q.n == 1:
        Q = abs(q.coords[0])
        kk = float(k.reshape(-1)[0])
        phases = np.exp(-2j * math.pi * kk * np.arange(Q) / Q)
        val = complex(np.sum(phases))
        return FourierSample(val, abs(val), 0.0, True, float(Q))
    if q.n != 2:
        raise NotImplementedError("surface measures are implemented for n in {1, 2}")
    if len(k) != 2:
        raise ValueError("frequency vector must have length 2")
    q1, q2 = q.coords
    d = q.gcd
    q1p, q2p = q1 // d, q2 // d
    length = math.hypot(q1p, q2p)
    qp_sq = q1p * q1p + q2p * q2p
    freq = -k[0] * q2p + k[1] * q1p  # k . (direction); an integer
    total = 0j
    total_fine = 0j
    panels = max(resolution, 4)
    for c in range(d):
        x0 = (c / d) * np.array([q1p, q2p]) / qp_sq
        phase = np.exp(-2j * math.pi * float(k @ x0))
        total += phase * _gl_panels(float(freq), panels)
        total_fine += phase * _gl_panels(float(freq), 2 * panels)
    val = length * total_fine
    err = abs(length * (total_fine - total))
    mass = d * length
    return FourierSample(complex(val), abs(val), err, err < 1e-8, mass)


# ---------------------------------------------------------------------------
# atomic measures, measure bounds, marginals
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class AtomicMeasure:
    """A probability measure supported on finitely many points of [0,1]^d."""

    points: np.ndarray  # (N, d)
    weights: np.ndarray  # (N,), positive, sums to 1

    def __post_init__(self):
        if self.points.ndim != 2 or len(self.points) != len(self.weights):
            raise ValueError("points must be (N, d) with matching weights")
        if np.any(self.weights <= 0):
            raise ValueError("weights must be positive")
        if abs(float(self.weights.sum()) - 1.0) > 1e-9:
            raise ValueError("weights must sum to 1")

    @staticmethod
    def uniform(points) -> "AtomicMeasure":
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        w = np.full(len(pts), 1.0 / len(pts))
        return AtomicMeasure(pts, w)

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def fourier(self, xi) -> complex:
        """mu-hat(xi) = sum_i w_i e^{-2 pi i xi . x_i} by direct summation."""
        xi = np.asarray(xi, dtype=float)
        phases = np.exp(-2j * math.pi * (self.points @ xi))
        return complex(np.sum(self.weights * phases))

    def mass_of(self, desc: ResonantDescriptor) -> float:
        return float(np.sum(self.weights[membership(desc, self.points)]))


@dataclass(frozen=True)
class BoundCheck:
    lhs: float
    rhs: float
    ratio: float
    frequency_sum: float
    frequencies: int
    flagged: bool  # atom spacing coarser than the smallest delta


def _frequency_grid(bounds) -> np.ndarray:
    """All nonzero integer vectors t with |t_j| <= B_j, as an (N, m) array."""
    axes = [np.arange(-B, B + 1) for B in bounds]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(bounds))
    keep = np.any(grid != 0, axis=1)
    return grid[keep]


def measure_bound_check(
    mu: AtomicMeasure | str, q: LatticePoint, deltas
) -> BoundCheck:
    """mu(R(q, delta)) against the frequency-sum bound (rectangle modes).

    rhs = delta_1...delta_m (1 + sum over 0 < |t_j| <= 2/delta_j of
    |mu-hat(t_1 q, ..., t_m q)|).  Lebesgue measure has no nonzero integer
    frequencies, so its rhs is the plain delta product and the ratio is
    exactly prod min(2 delta_j, 1) / prod delta_j <= 2^m.
    """
    ds = [float(x) for x in deltas]
    m = len(ds)
    if not all(0 < x < 0.5 for x in ds):
        raise ValueError("deltas must lie in (0, 1/2)")
    if isinstance(mu, str):
        if mu != "lebesgue":
            raise ValueError(f"unknown measure tag {mu!r}")
        lhs = math.prod(min(2 * x, 1.0) for x in ds)
        rhs = math.prod(ds)
        return BoundCheck(lhs, rhs, lhs / rhs, 0.0, 0, False)
    if mu.d != q.n * m:
        raise ValueError(f"measure dimension {mu.d} != n*m = {q.n * m}")
    lhs = mu.mass_of(weighted_rect(q, tuple(ds)))
    bounds = [int(math.floor(2.0 / x)) for x in ds]
    if math.prod(2 * B + 1 for B in bounds) > 2e6:
        raise ValueError("frequency budget exceeded; increase the deltas")
    grid = _frequency_grid(bounds)
    qv = np.asarray(q.coords, dtype=float)
    # frequency (t_1 q, ..., t_m q) dotted with atoms: block structure
    blocks = mu.points.reshape(len(mu.points), m, q.n)
    dots = blocks @ qv  # (N, m)
    phases = np.exp(-2j * math.pi * (dots @ grid.T))  # (N, #freq)
    fs = np.abs(phases.T @ mu.weights)
    freq_sum = float(np.sum(fs))
    rhs = math.prod(ds) * (1.0 + freq_sum)
    spacing = len(mu.points) ** (-1.0 / mu.d)
    return BoundCheck(
        lhs, rhs, lhs / rhs, freq_sum, len(grid), flagged=spacing > min(ds)
    )


@dataclass(frozen=True)
class MultBoundCheck:
    lhs: float
    rhs: float
    ratio: float
    decay_sum: float
    flagged: bool


def fourier_decay_product(t, tau: float, m: int) -> float:
    """prod_j min(1, |t_j|^{-tau/m}) - the assumed per-block decay profile."""
    out = 1.0
    for tj in t:
        a = abs(float(tj))
        if a > 1:
            out *= a ** (-tau / m)
    return out


def measure_bound_check_mult(
    mu: AtomicMeasure | str,
    q: LatticePoint,
    m: int,
    delta: float,
    tau: float,
    mc_samples: int = 200_000,
    seed: int = 0,
) -> MultBoundCheck:
    """mu(M(q, delta)) against (delta + |q|^{-tau} delta^{tau/m}) log^{m-1}(1/delta).

    The right-hand side is the closed-form rate for measures whose per-block
    Fourier decay is min(1, |xi|^{-tau/m}); `decay_sum` reports the actual
    windowed sum of that profile over |t_j| <= 2/delta for reference.
    Lebesgue mass is estimated by deterministic Monte Carlo (the star is not
    a box), atomic mass by direct membership counting.
    """
    if not 0 < delta <= 2.0**-m:
        raise ValueError("delta must lie in (0, 2^-m]")
    desc = mult_star(q, m, delta)
    if isinstance(mu, str):
        if mu != "lebesgue":
            raise ValueError(f"unknown measure tag {mu!r}")
        from .resonant import measure_exact

        lhs = measure_exact(desc, mc_samples=mc_samples, seed=seed)
        flagged = False
    else:
        if mu.d != q.n * m:
            raise ValueError(f"measure dimension {mu.d} != n*m = {q.n * m}")
        lhs = mu.mass_of(desc)
        flagged = len(mu.points) ** (-1.0 / mu.d) > delta
    qn = float(q.sup_norm)
    rhs = (delta + qn**-tau * delta ** (tau / m)) * max(math.log(1 / delta), 1.0) ** (m - 1)
    B = int(math.floor(2.0 / delta))
    if (2 * B + 1) ** m > 2e6:
        # decay reference restricted to a tractable window
        B = max(1, int((2e6) ** (1.0 / m)) // 2)
    grid = _frequency_grid([B] * m)
    decay = float(
        np.sum(np.prod(np.minimum(1.0, np.maximum(np.abs(grid), 1.0) ** (-tau / m)), axis=1))
    )
    return MultBoundCheck(lhs, rhs, lhs / rhs, decay, flagged)


def marginal_fourier_identity(
    mu: AtomicMeasure, split: int, x
) -> tuple[complex, complex]:
    """(marginal-hat(x), mu-hat(x, 0)): equal exactly for atomic measures.

    `split` is the dimension of the first factor; x is a frequency on it.
    """
    if not 0 < split < mu.d:
        raise ValueError("split must be strictly inside the dimensions")
    x = np.asarray(x, dtype=float)
    if len(x) != split:
        raise ValueError(f"frequency must have length {split}")
    marginal = AtomicMeasure(mu.points[:, :split], mu.weights)
    lhs = marginal.fourier(x)
    rhs = mu.fourier(np.concatenate([x, np.zeros(mu.d - split)]))
    return lhs, rhs

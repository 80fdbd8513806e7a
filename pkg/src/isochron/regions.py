"""Families of isochronous section states, built analytically.

Each family lives in a low-dimensional space of firing-time distances
(sigma), cut out by strict ordering constraints plus closed bounds on a
handful of affine functionals of sigma.  Every point of a family embeds
into a canonical section state whose orbit is periodic with a fixed
Poincare period (3, 4, or 5 section returns), and within one family all
orbits share the same pulse signature.

Everything here is affine in sigma once the model parameters are fixed,
so the families are convex polytopes: membership, volume (by vertex
enumeration or Monte Carlo), sampling, and the self-map of the period-4
family are all exact, cheap computations.  A simulation-backed oracle
cross-checks the analytic picture against the event engine.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .engine import NetworkState, network_state
from .model import (
    DomainError,
    ModelParams,
    jump,
    jump_coeffs,
    trigger_threshold,
)
from .poincare import (
    NotPeriodic,
    PeriodicityResult,
    detect_periodicity,
    poincare_map,
    pulse_equivalent,
    pulse_signature,
)

KINDS = ("IR3", "IR4", "IR5")

#: Poincare period of a generic orbit in each family.
EXPECTED_POINCARE_PERIOD = {"IR3": 3, "IR4": 4, "IR5": 5}

#: Orbit period of each family's generic member, in units of the delay.
EXPECTED_PERIOD_DELAYS = {"IR3": 2, "IR4": 3, "IR5": 3}

_MC_SHARD = 100_000


@dataclass(frozen=True)
class Functional:
    """Affine functional of sigma with closed bounds: lower <= F <= upper."""

    label: str
    weights: tuple[float, ...]
    offset: float
    lower: float
    upper: float = 1.0

    def value(self, sigma) -> float:
        return math.fsum(w * s for w, s in zip(self.weights, sigma)) + self.offset

    __call__ = value


@dataclass(frozen=True)
class RegionSpec:
    """One family's constraint system in sigma-space.

    orderings are strict halfspaces (weights . sigma + offset > 0);
    functionals carry their own closed bounds.
    """

    kind: str
    dim: int
    labels: tuple[str, ...]
    tau: float
    orderings: tuple[tuple[tuple[float, ...], float], ...]
    functionals: tuple[Functional, ...]

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "dim": self.dim,
            "labels": list(self.labels),
            "tau": self.tau,
            "orderings": [
                {"weights": list(w), "offset": w0} for w, w0 in self.orderings
            ],
            "functionals": [
                {
                    "label": f.label,
                    "weights": list(f.weights),
                    "offset": f.offset,
                    "lower": f.lower,
                    "upper": f.upper,
                }
                for f in self.functionals
            ],
        }


def _chain_orderings(dim: int, tau: float, order: tuple[int, ...]) -> tuple:
    """Strict constraints 0 < sigma[order[0]] < ... < sigma[order[-1]] < tau
    as halfspaces (weights, offset) with weights . sigma + offset > 0."""
    rows = []
    first = [0.0] * dim
    first[order[0]] = 1.0
    rows.append((tuple(first), 0.0))
    for lo, hi in zip(order, order[1:]):
        w = [0.0] * dim
        w[hi] = 1.0
        w[lo] = -1.0
        rows.append((tuple(w), 0.0))
    last = [0.0] * dim
    last[order[-1]] = -1.0
    rows.append((tuple(last), tau))
    return tuple(rows)


def ir4_spec(params: ModelParams) -> RegionSpec:
    """Period-4 family in (sigma_1, sigma_2, sigma_3): ordering
    0 < sigma_2 < sigma_1 < sigma_3 < tau and four bounded functionals."""
    a, c = jump_coeffs(params, 1)
    tau = params.tau
    h = trigger_threshold(params, 1)
    functionals = (
        Functional("F1", (a, 0.0, -1.0), c + tau, h),
        Functional("F2", (-1.0, a, 1.0 - a), a * tau + c, h),
        Functional("F3", (1.0 - a, -1.0, 0.0), a * tau + c, h),
        Functional("F4", (0.0, 1.0 - a, a), c, h),
    )
    return RegionSpec(
        kind="IR4",
        dim=3,
        labels=("sigma1", "sigma2", "sigma3"),
        tau=tau,
        orderings=_chain_orderings(3, tau, (1, 0, 2)),
        functionals=functionals,
    )


def ir3_spec(params: ModelParams) -> RegionSpec:
    """Period-3 family in (sigma_1, sigma_3), oscillators 1 and 2 locked
    together: ordering 0 < sigma_1 < sigma_3 < tau, three functionals
    bounded below by the single-pulse trigger threshold and three by the
    double-pulse one."""
    a, c = jump_coeffs(params, 1)
    tau = params.tau
    h1 = trigger_threshold(params, 1)
    h2 = trigger_threshold(params, 2)
    functionals = (
        Functional("F1", (a, -1.0), c + tau, h1),
        Functional("F2", (-1.0, 1.0 - a), a * tau + c, h1),
        Functional("F3", (1.0 - a, a), c, h1),
        Functional("F4", (0.0, 1.0), 0.0, h2),
        Functional("F5", (-1.0, 0.0), tau, h2),
        Functional("F6", (1.0, -1.0), tau, h2),
    )
    return RegionSpec(
        kind="IR3",
        dim=2,
        labels=("sigma1", "sigma3"),
        tau=tau,
        orderings=_chain_orderings(2, tau, (0, 1)),
        functionals=functionals,
    )


def ir5_spec(params: ModelParams) -> RegionSpec:
    """Period-5 family in (sigma_1, sigma_2a, sigma_2b, sigma_3), where
    oscillator 2 keeps two firing memories: ordering
    0 < sigma_2a < sigma_1 < sigma_3 < sigma_2b < tau, five functionals."""
    a, c = jump_coeffs(params, 1)
    tau = params.tau
    h = trigger_threshold(params, 1)
    functionals = (
        Functional("F1", (0.0, a, 0.0, -1.0), c + tau, h),
        Functional("F2", (-1.0, 0.0, 1.0 - a, 0.0), a * tau + c, h),
        Functional("F3", (0.0, -1.0, a, 1.0 - a), c, h),
        Functional("F4", (1.0 - a, 0.0, 0.0, a), c, h),
        Functional("F5", (a, 1.0 - a, -1.0, 0.0), c + tau, h),
    )
    return RegionSpec(
        kind="IR5",
        dim=4,
        labels=("sigma1", "sigma2a", "sigma2b", "sigma3"),
        tau=tau,
        orderings=_chain_orderings(4, tau, (1, 0, 3, 2)),
        functionals=functionals,
    )


def region_spec(params: ModelParams, kind: str) -> RegionSpec:
    """Dispatch on the family name ("IR3" | "IR4" | "IR5")."""
    try:
        builder = {"IR3": ir3_spec, "IR4": ir4_spec, "IR5": ir5_spec}[kind]
    except KeyError:
        raise DomainError(f"unknown region kind {kind!r}, expected one of {KINDS}")
    return builder(params)


# -- centers and existence ---------------------------------------------------


def ir4_center(tau: float) -> tuple[float, float, float]:
    return (tau / 2, tau / 4, 3 * tau / 4)


def ir3_center(tau: float) -> tuple[float, float]:
    return (tau / 3, 2 * tau / 3)


def ir5_center(tau: float) -> tuple[float, float, float, float]:
    return (2 * tau / 5, tau / 5, 4 * tau / 5, 3 * tau / 5)


def region_center(kind: str, tau: float) -> tuple[float, ...]:
    try:
        builder = {"IR3": ir3_center, "IR4": ir4_center, "IR5": ir5_center}[kind]
    except KeyError:
        raise DomainError(f"unknown region kind {kind!r}, expected one of {KINDS}")
    return builder(tau)


def _exists_value(params: ModelParams, kind: str) -> float:
    """The common value all bounded functionals take at the family center."""
    tau = params.tau
    if kind == "IR4":
        return jump(params, tau / 2, params.eps_hat) + tau / 4
    if kind == "IR3":
        return jump(params, tau / 3, params.eps_hat) + tau / 3
    if kind == "IR5":
        return jump(params, tau / 5, params.eps_hat) + 2 * tau / 5
    raise DomainError(f"unknown region kind {kind!r}, expected one of {KINDS}")


def region_exists(params: ModelParams, kind: str) -> bool:
    """Closed double inequality: trigger threshold <= center value <= 1.

    The center value is what every bounded functional evaluates to at the
    family center, so this is exactly "the center is a member" (for the
    period-3 family the double-pulse bounds follow from the single-pulse
    one; see the membership equivalence test).
    """
    if params.tau <= 0.0:
        return False
    v = _exists_value(params, kind)
    return trigger_threshold(params, 1) <= v <= 1.0


def exists_ir4(params: ModelParams) -> bool:
    return region_exists(params, "IR4")


def exists_ir3(params: ModelParams) -> bool:
    return region_exists(params, "IR3")


def exists_ir5(params: ModelParams) -> bool:
    return region_exists(params, "IR5")


# -- membership ---------------------------------------------------------------


def membership(spec: RegionSpec, sigma, margin: float = 0.0) -> bool:
    """True iff sigma satisfies every ordering strictly (slack > margin)
    and every functional within its closed bounds shrunk by margin."""
    if len(sigma) != spec.dim:
        raise DomainError(f"sigma must have {spec.dim} components, got {len(sigma)}")
    for w, w0 in spec.orderings:
        if sum(wi * si for wi, si in zip(w, sigma)) + w0 <= margin:
            return False
    for f in spec.functionals:
        v = f.value(sigma)
        if v < f.lower + margin or v > f.upper - margin:
            return False
    return True


def membership_margin(spec: RegionSpec, sigma) -> float:
    """Smallest constraint slack at sigma (positive strictly inside,
    negative outside, 0 on the boundary)."""
    slacks = [
        sum(wi * si for wi, si in zip(w, sigma)) + w0 for w, w0 in spec.orderings
    ]
    for f in spec.functionals:
        v = f.value(sigma)
        slacks.append(v - f.lower)
        slacks.append(f.upper - v)
    return min(slacks)


def membership_many(spec: RegionSpec, sigmas: np.ndarray, margin: float = 0.0) -> np.ndarray:
    """Vectorized membership over an (n, dim) array of sigma points."""
    sigmas = np.asarray(sigmas, dtype=float)
    ok = np.ones(len(sigmas), dtype=bool)
    for w, w0 in spec.orderings:
        ok &= sigmas @ np.asarray(w) + w0 > margin
    for f in spec.functionals:
        v = sigmas @ np.asarray(f.weights) + f.offset
        ok &= (v >= f.lower + margin) & (v <= f.upper - margin)
    return ok


# -- the period-4 self-map ----------------------------------------------------


def g_map(sigma, tau: float) -> tuple[float, float, float]:
    """Section-to-section update of the period-4 family's coordinates:
    (sigma_3 - sigma_2, sigma_1 - sigma_2, tau - sigma_2)."""
    s1, s2, s3 = sigma
    return (s3 - s2, s1 - s2, tau - s2)


@dataclass(frozen=True)
class AffineMap:
    """g as integer matrix plus offset: g(sigma) = L sigma + offset.

    L has order 4 (exactly, in integer arithmetic); center is its unique
    fixed point; points of center + t * line_direction are fixed by g^2.
    """

    matrix: tuple[tuple[int, ...], ...]
    offset: tuple[float, ...]
    center: tuple[float, ...]
    line_direction: tuple[int, ...]

    def __call__(self, sigma) -> tuple[float, ...]:
        return tuple(
            sum(m * s for m, s in zip(row, sigma)) + o
            for row, o in zip(self.matrix, self.offset)
        )


def g_algebra(tau: float) -> AffineMap:
    if tau <= 0.0:
        raise DomainError(f"delay tau must be positive, got {tau}")
    return AffineMap(
        matrix=((0, -1, 1), (1, -1, 0), (0, -1, 0)),
        offset=(0.0, 0.0, tau),
        center=ir4_center(tau),
        line_direction=(0, 1, 1),
    )


# -- embeddings into section states -------------------------------------------


def _require_chain(kind: str, values: tuple[float, ...], names: tuple[str, ...]) -> None:
    chain = (0.0,) + values
    for i in range(len(values)):
        if not chain[i] < chain[i + 1]:
            raise DomainError(
                f"{kind} ordering violated: need 0 < "
                + " < ".join(names)
                + f", got {values}"
            )


def s_embed_ir4(params: ModelParams, sigma) -> NetworkState:
    """Canonical section state of a period-4 family point: phases
    (jump(sigma_1), sigma_2, 0), one firing memory per oscillator plus the
    reference oscillator's just-now firing."""
    s1, s2, s3 = sigma
    _require_chain(
        "IR4", (s2, s1, s3, params.tau), ("sigma2", "sigma1", "sigma3", "tau")
    )
    return network_state(
        phases=(jump(params, s1, params.eps_hat), s2, 0.0),
        ftds=((s1,), (s2,), (0.0, s3)),
    )


def s_embed_ir3(params: ModelParams, sigma) -> NetworkState:
    """Canonical section state of a period-3 family point: oscillators 1
    and 2 share the raw phase sigma_1 and firing memory {sigma_1}.

    Unlike the other families' embeddings this state is not on the closed
    orbit — the locked pair still has one reception to absorb — so orbits
    started here carry a transient, and from part of the region's interior
    that transient escapes to the synchronous orbit rather than settling
    on the cycle.  Use cycle_state for the exact on-orbit state.
    """
    s1, s3 = sigma
    _require_chain("IR3", (s1, s3, params.tau), ("sigma1", "sigma3", "tau"))
    return network_state(
        phases=(s1, s1, 0.0),
        ftds=((s1,), (s1,), (0.0, s3)),
    )


def s_embed_ir5(params: ModelParams, sigma) -> NetworkState:
    """Canonical section state of a period-5 family point: oscillator 2
    carries both firing memories sigma_2a and sigma_2b."""
    s1, s2a, s2b, s3 = sigma
    _require_chain(
        "IR5",
        (s2a, s1, s3, s2b, params.tau),
        ("sigma2a", "sigma1", "sigma3", "sigma2b", "tau"),
    )
    eh = params.eps_hat
    return network_state(
        phases=(jump(params, s1 - s2a, eh) + s2a, jump(params, s2a, eh), 0.0),
        ftds=((s1,), (s2a, s2b), (0.0, s3)),
    )


def s_embed(params: ModelParams, kind: str, sigma) -> NetworkState:
    try:
        builder = {"IR3": s_embed_ir3, "IR4": s_embed_ir4, "IR5": s_embed_ir5}[kind]
    except KeyError:
        raise DomainError(f"unknown region kind {kind!r}, expected one of {KINDS}")
    return builder(params, sigma)


def cycle_state(params: ModelParams, kind: str, sigma) -> NetworkState:
    """Section state exactly on the periodic orbit indexed by sigma.

    For the period-4 and period-5 families this is the canonical embedding
    itself.  The period-3 family's canonical map places the locked pair at
    the raw phase sigma_1, which is one pair-reception short of the closed
    orbit: on the orbit the pair has already absorbed that pulse and sits
    at the pulse-adjusted phase.  Orbits from the raw state usually reach
    the cycle after a short transient, but from part of the region's
    interior they collapse onto the synchronous orbit instead, so exact
    verification must start here.
    """
    if kind != "IR3":
        return s_embed(params, kind, sigma)
    s1, s3 = sigma
    _require_chain("IR3", (s1, s3, params.tau), ("sigma1", "sigma3", "tau"))
    theta = jump(params, s1, params.eps_hat)
    return network_state(
        phases=(theta, theta, 0.0),
        ftds=((s1,), (s1,), (0.0, s3)),
    )


# -- sampling ------------------------------------------------------------------


_ORDERING_PERMUTATION = {"IR3": (0, 1), "IR4": (1, 0, 2), "IR5": (1, 0, 3, 2)}


def _ordering_simplex_sample(rng: np.random.Generator, kind: str, tau: float, n: int) -> np.ndarray:
    """Uniform points of the ordering simplex: sort dim uniforms on
    (0, tau), then permute the ascending values into the family's
    variable order."""
    dim = len(_ORDERING_PERMUTATION[kind])
    u = np.sort(rng.uniform(0.0, tau, size=(n, dim)), axis=1)
    return u[:, _ORDERING_PERMUTATION[kind]]


def sample_interior(
    params: ModelParams,
    kind: str,
    n: int,
    seed: int = 0,
    margin: float = 1e-9,
    max_draws: int = 10_000_000,
) -> np.ndarray:
    """n interior points of the family, by rejection from the ordering
    simplex; every returned point clears all constraints by margin."""
    spec = region_spec(params, kind)
    rng = np.random.default_rng(seed)
    out: list[np.ndarray] = []
    got = 0
    drawn = 0
    while got < n:
        if drawn >= max_draws:
            raise RuntimeError(
                f"drew {drawn} candidates but found only {got}/{n} interior "
                f"points of {kind}; the region may be empty at these parameters"
            )
        chunk = min(max(4 * (n - got), 1024), max_draws - drawn)
        drawn += chunk
        cand = _ordering_simplex_sample(rng, kind, params.tau, chunk)
        keep = cand[membership_many(spec, cand, margin=margin)]
        if len(keep):
            out.append(keep)
            got += len(keep)
    return np.concatenate(out)[:n]


# -- volume --------------------------------------------------------------------


@dataclass(frozen=True)
class VolumeReport:
    """Region volume with provenance: method, budget, seed, uncertainty."""

    volume: float
    stderr: float
    method: str
    samples: int | None = None
    seed: int | None = None
    degenerate: bool = False
    vertex_count: int | None = None

    def to_json_dict(self) -> dict:
        return {
            "volume": self.volume,
            "stderr": self.stderr,
            "method": self.method,
            "samples": self.samples,
            "seed": self.seed,
            "degenerate": self.degenerate,
            "vertex_count": self.vertex_count,
        }


def _halfspaces(spec: RegionSpec) -> tuple[np.ndarray, np.ndarray]:
    """Closure of the region as rows A sigma <= b."""
    rows_a: list[tuple[float, ...]] = []
    rows_b: list[float] = []
    for w, w0 in spec.orderings:
        rows_a.append(tuple(-wi for wi in w))
        rows_b.append(w0)
    for f in spec.functionals:
        rows_a.append(f.weights)
        rows_b.append(f.upper - f.offset)
        rows_a.append(tuple(-wi for wi in f.weights))
        rows_b.append(f.offset - f.lower)
    return np.asarray(rows_a), np.asarray(rows_b)


def _enumerate_vertices(spec: RegionSpec, feas_tol: float = 1e-9) -> np.ndarray:
    """All vertices of the closed polytope: solve every dim-subset of the
    halfspace boundaries, keep feasible solutions, dedupe."""
    a, b = _halfspaces(spec)
    dim = spec.dim
    seen: dict[tuple[int, ...], np.ndarray] = {}
    for idx in itertools.combinations(range(len(a)), dim):
        sub_a = a[list(idx)]
        sub_b = b[list(idx)]
        try:
            x = np.linalg.solve(sub_a, sub_b)
        except np.linalg.LinAlgError:
            continue
        if not np.all(np.isfinite(x)):
            continue
        if np.all(a @ x <= b + feas_tol):
            key = tuple(int(round(v * 1e10)) for v in x)
            seen.setdefault(key, x)
    if not seen:
        return np.empty((0, dim))
    return np.vstack(list(seen.values()))


def _fan_volume(vertices: np.ndarray) -> float:
    """Volume of the convex hull of the vertices, summed as a fan of
    simplices from one vertex over the hull's boundary facets."""
    from scipy.spatial import ConvexHull

    hull = ConvexHull(vertices)
    apex = vertices[hull.vertices[0]]
    dim = vertices.shape[1]
    total = 0.0
    for facet in hull.simplices:
        edges = vertices[facet] - apex
        total += abs(np.linalg.det(edges))
    return total / math.factorial(dim)


def _volume_exact(spec: RegionSpec) -> VolumeReport:
    from scipy.spatial import QhullError

    vertices = _enumerate_vertices(spec)
    if len(vertices) < spec.dim + 1:
        return VolumeReport(
            volume=0.0, stderr=0.0, method="exact",
            degenerate=True, vertex_count=len(vertices),
        )
    try:
        vol = float(_fan_volume(vertices))
    except QhullError:
        # Vertices exist but span no full-dimensional body.
        return VolumeReport(
            volume=0.0, stderr=0.0, method="exact",
            degenerate=True, vertex_count=len(vertices),
        )
    return VolumeReport(
        volume=vol, stderr=0.0, method="exact",
        degenerate=vol == 0.0, vertex_count=len(vertices),
    )


def _volume_montecarlo(
    spec: RegionSpec, samples: int, seed: int, threads: int = 1
) -> VolumeReport:
    if samples < 1:
        raise DomainError(f"samples must be >= 1, got {samples}")
    dim = spec.dim
    tau = spec.tau
    simplex_volume = tau**dim / math.factorial(dim)
    if simplex_volume == 0.0:
        return VolumeReport(
            volume=0.0, stderr=0.0, method="montecarlo",
            samples=samples, seed=seed, degenerate=True,
        )

    shard_sizes = [_MC_SHARD] * (samples // _MC_SHARD)
    if samples % _MC_SHARD:
        shard_sizes.append(samples % _MC_SHARD)
    seeds = np.random.SeedSequence(seed).spawn(len(shard_sizes))

    def run_shard(args: tuple[int, np.random.SeedSequence]) -> int:
        size, ss = args
        rng = np.random.default_rng(ss)
        cand = _ordering_simplex_sample(rng, spec.kind, tau, size)
        return int(np.count_nonzero(membership_many(spec, cand)))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            hits = sum(pool.map(run_shard, zip(shard_sizes, seeds)))
    else:
        hits = sum(run_shard(args) for args in zip(shard_sizes, seeds))

    p = hits / samples
    return VolumeReport(
        volume=p * simplex_volume,
        stderr=simplex_volume * math.sqrt(p * (1.0 - p) / samples),
        method="montecarlo",
        samples=samples,
        seed=seed,
        degenerate=False,
    )


def region_volume(
    spec: RegionSpec,
    method: str = "exact",
    samples: int = 1_000_000,
    seed: int = 0,
    threads: int = 1,
) -> VolumeReport:
    """Volume of the family's polytope.

    method="exact": vertex enumeration over the halfspace system, then a
    simplicial fan over the hull facets; degenerate (empty-interior)
    polytopes report volume 0.  method="montecarlo": uniform sampling of
    the ordering simplex, hit fraction times simplex volume, binomial
    standard error; the sample budget splits into shards with derived
    per-shard seeds and an order-independent integer reduction, so results
    are identical for any thread count.
    """
    if method == "exact":
        return _volume_exact(spec)
    if method == "montecarlo":
        return _volume_montecarlo(spec, samples, seed, threads)
    raise DomainError(f"unknown volume method {method!r}")


# -- simulation-backed oracle ---------------------------------------------------


@dataclass(frozen=True)
class OracleReport:
    """Cross-check of the analytic family against the event engine.

    Every sampled interior point is embedded and iterated; failures carry
    the offending sigma and what went wrong.  The center is reported
    separately: it is the family's known degenerate interior point whose
    orbit can collapse to a shorter cycle.
    """

    kind: str
    n_samples: int
    seed: int
    expected_poincare_period: int
    poincare_period_counts: dict[int, int]
    failures: tuple[tuple[tuple[float, ...], str], ...]
    all_pulse_equivalent: bool
    pair_synchronized: bool | None
    center_poincare_period: int | None
    center_orbit_period: float | None

    @property
    def ok(self) -> bool:
        return not self.failures and self.all_pulse_equivalent

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "n_samples": self.n_samples,
            "seed": self.seed,
            "expected_poincare_period": self.expected_poincare_period,
            "poincare_period_counts": {
                str(k): v for k, v in sorted(self.poincare_period_counts.items())
            },
            "failures": [
                {"sigma": list(s), "reason": r} for s, r in self.failures
            ],
            "all_pulse_equivalent": self.all_pulse_equivalent,
            "pair_synchronized": self.pair_synchronized,
            "center_poincare_period": self.center_poincare_period,
            "center_orbit_period": self.center_orbit_period,
            "ok": self.ok,
        }


def region_oracle(
    params: ModelParams,
    kind: str,
    n_samples: int = 100,
    seed: int = 0,
    tol: float = 1e-9,
    max_iter: int = 64,
) -> OracleReport:
    """Sample interior points, simulate each one's on-orbit section state
    (cycle_state), and verify the family's claims exactly: zero transient,
    the expected minimal Poincare period, the expected orbit period,
    pairwise pulse equivalence, and — for the period-3 family — that the
    locked pair stays locked around the whole cycle."""
    if not region_exists(params, kind):
        raise DomainError(
            f"{kind} is empty at (eps={params.eps}, tau={params.tau}); "
            "the oracle needs a nonempty region"
        )
    expected = EXPECTED_POINCARE_PERIOD[kind]
    expected_period = EXPECTED_PERIOD_DELAYS[kind] * params.tau
    sigmas = sample_interior(params, kind, n_samples, seed=seed)

    failures: list[tuple[tuple[float, ...], str]] = []
    counts: dict[int, int] = {}
    signatures = []
    pair_ok: bool | None = True if kind == "IR3" else None

    for row in sigmas:
        sigma = tuple(float(v) for v in row)
        result = detect_periodicity(
            params, cycle_state(params, kind, sigma), max_iter=max_iter, tol=tol
        )
        if isinstance(result, NotPeriodic):
            failures.append((sigma, f"no cycle within {max_iter} iterations"))
            continue
        counts[result.poincare_period] = counts.get(result.poincare_period, 0) + 1
        if result.transient_iters != 0:
            failures.append(
                (sigma, f"cycle state needed a transient of {result.transient_iters}")
            )
            continue
        if result.poincare_period != expected:
            failures.append(
                (sigma, f"poincare period {result.poincare_period} != {expected}")
            )
            continue
        if abs(result.orbit_period - expected_period) > tol:
            failures.append(
                (
                    sigma,
                    f"orbit period {result.orbit_period} != "
                    f"{EXPECTED_PERIOD_DELAYS[kind]}*tau",
                )
            )
            continue
        if kind == "IR3":
            state = result.periodic_state
            for _ in range(result.poincare_period):
                if abs(state.phases[0] - state.phases[1]) > tol:
                    pair_ok = False
                    failures.append((sigma, "locked pair drifted apart"))
                    break
                state, _ = poincare_map(params, state)
        signatures.append(pulse_signature(params, result))

    all_equivalent = all(
        pulse_equivalent(signatures[0], s) for s in signatures[1:]
    ) if signatures else False

    center_tp: int | None = None
    center_t: float | None = None
    center_result = detect_periodicity(
        params,
        cycle_state(params, kind, region_center(kind, params.tau)),
        max_iter=max_iter,
        tol=tol,
    )
    if isinstance(center_result, PeriodicityResult):
        center_tp = center_result.poincare_period
        center_t = center_result.orbit_period

    return OracleReport(
        kind=kind,
        n_samples=n_samples,
        seed=seed,
        expected_poincare_period=expected,
        poincare_period_counts=counts,
        failures=tuple(failures),
        all_pulse_equivalent=all_equivalent,
        pair_synchronized=pair_ok,
        center_poincare_period=center_tp,
        center_orbit_period=center_t,
    )


# -- projection of the period-4 family to the phase plane -----------------------


def ir4_projection_contains(
    params: ModelParams, theta1: float, theta2: float, tol: float = 1e-6
) -> bool:
    """Exact point test for the projection of the embedded period-4 family
    onto the first two phases.

    theta_1 = jump(sigma_1) inverts to sigma_1, theta_2 is sigma_2, and the
    remaining freedom is sigma_3: each constraint is affine in sigma_3, so
    the test intersects intervals and checks the result is nonempty
    (allowing tol of slack at every step)."""
    a, c = jump_coeffs(params, 1)
    tau = params.tau
    h = trigger_threshold(params, 1)
    sigma1 = (theta1 - c) / a
    sigma2 = theta2

    # Ordering constraints not involving sigma_3.
    if not (sigma2 > -tol and sigma1 - sigma2 > -tol and tau - sigma1 > -tol):
        return False

    lo = sigma1  # sigma_1 < sigma_3
    hi = tau     # sigma_3 < tau

    def affine_in_sigma3(coeff: float, const: float, lower: float, upper: float):
        """Constraint lower <= coeff * sigma_3 + const <= upper."""
        nonlocal lo, hi
        if abs(coeff) < 1e-15:
            if const < lower - tol or const > upper + tol:
                lo, hi = 1.0, 0.0
            return
        x1 = (lower - const) / coeff
        x2 = (upper - const) / coeff
        lo = max(lo, min(x1, x2))
        hi = min(hi, max(x1, x2))

    # F1 = a sigma1 + c + tau - sigma3 = theta1 + tau - sigma3
    affine_in_sigma3(-1.0, theta1 + tau, h, 1.0)
    # F2 = (1 - a) sigma3 + (a tau + a sigma2 + c - sigma1)
    affine_in_sigma3(1.0 - a, a * tau + a * sigma2 + c - sigma1, h, 1.0)
    # F4 = a sigma3 + (c + sigma2 - a sigma2)
    affine_in_sigma3(a, c + sigma2 - a * sigma2, h, 1.0)
    # F3 has no sigma3 dependence.
    f3 = a * (tau - sigma1) + c + sigma1 - sigma2
    if f3 < h - tol or f3 > 1.0 + tol:
        return False

    return hi - lo > -tol

"""Stochastic thermodynamics of single cycles.

A trajectory is the record of projective number measurements of the
system across one cycle: outcomes (j_0 .. j_N) along the hot sweep and
(k_1 .. k_M) along the cold sweep, with k_0 identified with j_N.  In
the eps -> 0 limit the outcomes are independent draws from the
pseudo-thermal states, so the full distribution factorizes and can be
enumerated or sampled efficiently.

Enumeration walks the product space in mixed-radix order over
(j_0, .., j_N, k_1, .., k_M), most significant digit first, in slabs of
bounded size; partial tallies merge associatively.  Probabilities are
accumulated from log space to survive large N + M.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from decimal import Decimal
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .cycles import EngineSpec, FrequencySchedule, frequency_schedule
from .states import GibbsSpec, gibbs_populations

DEFAULT_ENUMERATION_CAP = 2**24
EFFICIENCY_GROUP_RTOL = 1e-10
ENERGY_ZERO_RTOL = 1e-10
_SLAB_ELEMENTS = 1 << 20
_INT64_HEADROOM = 1 << 62


class EnumerationCapError(RuntimeError):
    """The trajectory space is too large to enumerate; sample instead."""


@dataclass(frozen=True)
class Trajectory:
    """Measurement record of one cycle.

    hot_outcomes = (j_0, .., j_N); cold_outcomes = (k_1, .., k_M).
    The cold sweep starts from k_0 = j_N.
    """

    hot_outcomes: tuple[int, ...]
    cold_outcomes: tuple[int, ...]

    @property
    def k0(self) -> int:
        return self.hot_outcomes[-1]


@dataclass(frozen=True)
class TrajectoryQuantities:
    """Heats, work and efficiency of a single trajectory.

    scaled_heat_hot and scaled_heat_cold are the linear-schedule
    accumulants: heat_hot = scaled_heat_hot / (n_hot * beta_ratio) and
    heat_cold = scaled_heat_cold / n_cold whenever the linear frequency
    ramp is in force.  efficiency is None when the definedness filter
    rejects the trajectory.
    """

    heat_hot: float
    heat_cold: float
    work: float
    energy_decrease: float
    efficiency: float | None
    outcome_sum_hot: int
    outcome_sum_cold: int
    scaled_heat_hot: float
    scaled_heat_cold: float
    beta_ratio: float


@dataclass(frozen=True)
class EfficiencyDistribution:
    """Aggregated probabilities of the distinct efficiency values.

    bins hold (efficiency, probability) sorted by efficiency, rescaled
    so that only trajectories with a defined efficiency count;
    normalization keeps the pre-rescaling mass.  exact_keys carries the
    reduced integer ratios backing each bin when the rational grouping
    mode produced them.
    """

    bins: tuple[tuple[float, float], ...]
    normalization: float
    most_likely_eta: float
    most_likely_trajectory: Trajectory
    exact_keys: tuple[tuple[int, int], ...] | None = None
    method: str = "enumeration"


class ExpectationReport(NamedTuple):
    heat_hot: float
    heat_cold: float
    work: float
    energy_decrease: float


@dataclass(frozen=True)
class CarnotConditionGrid:
    """Per-(N, M) verdicts on whether the modal efficiency is Carnot.

    matches[i][j] answers it for (n_values[i], m_values[j]); None marks
    cells skipped because enumeration would exceed the cap.
    """

    n_values: tuple[int, ...]
    m_values: tuple[int, ...]
    matches: tuple[tuple[bool | None, ...], ...]


def _log_probs(probs: np.ndarray) -> np.ndarray:
    out = np.full(probs.shape, -np.inf)
    positive = probs > 0.0
    out[positive] = np.log(probs[positive])
    return out


def _marginals(spec: EngineSpec):
    """Pseudo-thermal occupation probabilities at every stop of the cycle."""
    sched = frequency_schedule(spec)
    hot = [
        gibbs_populations(GibbsSpec(spec.beta_hot, float(w), spec.d_system)).probs
        for w in sched.omega
    ]
    cold = [
        gibbs_populations(GibbsSpec(spec.beta_cold, float(w), spec.d_system)).probs
        for w in sched.Omega
    ]
    return sched, cold[-1], hot, cold


def _energy_zero_tol(spec: EngineSpec, sched: FrequencySchedule) -> float:
    h = spec.h_system_diag
    scale = max(sched.max_frequency, max(h) - min(h))
    return ENERGY_ZERO_RTOL * scale


def trajectory_probability(gamma: Trajectory, spec: EngineSpec) -> float:
    """Product of pseudo-thermal occupation probabilities, eps -> 0 limit."""
    _, p0, hot, cold = _marginals(spec)
    if len(gamma.hot_outcomes) != spec.n_hot + 1:
        raise ValueError(
            f"expected {spec.n_hot + 1} hot outcomes, got {len(gamma.hot_outcomes)}"
        )
    if len(gamma.cold_outcomes) != spec.n_cold:
        raise ValueError(
            f"expected {spec.n_cold} cold outcomes, got {len(gamma.cold_outcomes)}"
        )
    outcomes = gamma.hot_outcomes + gamma.cold_outcomes
    if min(outcomes) < 0 or max(outcomes) >= spec.d_system:
        raise ValueError("measurement outcomes must lie in [0, d_system)")
    log_total = _log_probs(p0)[gamma.hot_outcomes[0]]
    for n, j in enumerate(gamma.hot_outcomes[1:]):
        log_total += _log_probs(hot[n])[j]
    for m, k in enumerate(gamma.cold_outcomes):
        log_total += _log_probs(cold[m])[k]
    return float(np.exp(log_total))


def trajectory_quantities(
    gamma: Trajectory, spec: EngineSpec, strict_positive_filter: bool = False
) -> TrajectoryQuantities:
    """Evaluate one trajectory by the defining sums.

    heat_hot = sum_n omega_n (j_n - j_{n-1}); heat_cold =
    sum_m Omega_m (k_{m-1} - k_m); work follows from the first law with
    the system's diagonal energy change.  With the default filter the
    efficiency work / heat_hot is defined iff heat_hot is nonzero; the
    strict filter additionally demands positive work and heat.
    """
    sched = frequency_schedule(spec)
    j = gamma.hot_outcomes
    k = (gamma.k0,) + gamma.cold_outcomes
    if len(j) != spec.n_hot + 1 or len(k) != spec.n_cold + 1:
        raise ValueError("outcome count does not match the ensemble counts")
    if min(j + k) < 0 or max(j + k) >= spec.d_system:
        raise ValueError("measurement outcomes must lie in [0, d_system)")
    heat_hot = float(sum(sched.omega[n] * (j[n + 1] - j[n]) for n in range(spec.n_hot)))
    heat_cold = float(
        sum(sched.Omega[m] * (k[m] - k[m + 1]) for m in range(spec.n_cold))
    )
    h = spec.h_system_diag
    energy_decrease = h[j[0]] - h[k[-1]]
    work = energy_decrease + heat_hot - heat_cold

    beta_ratio = spec.beta_hot / spec.beta_cold
    sum_hot = int(sum(j[:-1]))
    sum_cold = int(sum(k[:-1]))
    Omega_M = spec.omega_cold_last
    omega_N = spec.omega_hot_last
    scaled_hot = Omega_M * (sum_hot - spec.n_hot * j[0]) - omega_N * beta_ratio * (
        sum_hot - spec.n_hot * j[-1]
    )
    scaled_cold = Omega_M * (sum_cold - spec.n_cold * k[-1]) - omega_N * beta_ratio * (
        sum_cold - spec.n_cold * j[-1]
    )

    tol = _energy_zero_tol(spec, sched)
    if strict_positive_filter:
        defined = work > tol and heat_hot > tol
    else:
        defined = abs(heat_hot) > tol
    efficiency = work / heat_hot if defined else None
    return TrajectoryQuantities(
        heat_hot=heat_hot,
        heat_cold=heat_cold,
        work=work,
        energy_decrease=energy_decrease,
        efficiency=efficiency,
        outcome_sum_hot=sum_hot,
        outcome_sum_cold=sum_cold,
        scaled_heat_hot=scaled_hot,
        scaled_heat_cold=scaled_cold,
        beta_ratio=beta_ratio,
    )


def most_likely_trajectory_efficiency(spec: EngineSpec) -> float:
    """Efficiency of the most probable trajectory that has one.

    That trajectory absorbs a single quantum at the last (softest) hot
    ensemble and sheds it at the first cold ensemble, giving the closed
    form carnot - (Omega_M - omega_N beta_ratio) / (M omega_N).  It
    stays strictly below Carnot, approaches it as M grows, and does not
    involve N at all.
    """
    beta_ratio = spec.beta_hot / spec.beta_cold
    correction = (spec.omega_cold_last - spec.omega_hot_last * beta_ratio) / (
        spec.n_cold * spec.omega_hot_last
    )
    return spec.carnot - correction


# ---------------------------------------------------------------------------
# factorized enumeration


def _exact_fraction(x: float) -> Fraction:
    """Read a float as the decimal literal it prints as.

    Engine parameters originate as decimal text, so their shortest
    round-trip representation recovers the intended rational exactly
    (0.01 -> 1/100 rather than its binary expansion).
    """
    return Fraction(Decimal(repr(float(x))))


@dataclass(frozen=True)
class _RationalScale:
    """Frequencies and level energies as integers on a common denominator."""

    omega_last: int
    omega_first: int
    step_hot: int
    Omega_last: int
    Omega_first: int
    step_cold: int
    h: tuple[int, ...]
    carnot_key: tuple[int, int]


def _rational_scale(spec: EngineSpec) -> _RationalScale:
    beta_hot = _exact_fraction(spec.beta_hot)
    beta_cold = _exact_fraction(spec.beta_cold)
    omega_last = _exact_fraction(spec.omega_hot_last)
    Omega_last = _exact_fraction(spec.omega_cold_last)
    omega_virtual = (beta_cold / beta_hot) * Omega_last
    Omega_virtual = (beta_hot / beta_cold) * omega_last
    step_hot = (omega_last - omega_virtual) / spec.n_hot
    step_cold = (Omega_last - Omega_virtual) / spec.n_cold
    omega_first = omega_virtual + step_hot
    Omega_first = Omega_virtual + step_cold
    h = [_exact_fraction(v) for v in spec.h_system_diag]
    values = [omega_last, omega_first, step_hot, Omega_last, Omega_first, step_cold, *h]
    denominator = math.lcm(*(v.denominator for v in values))
    ints = [int(v * denominator) for v in values]
    per_outcome = max(abs(v) for v in ints) * (spec.d_system - 1)
    if per_outcome * (spec.n_hot + spec.n_cold + 2) * 4 >= _INT64_HEADROOM:
        raise ValueError(
            "rational efficiency grouping would overflow 64-bit integers for "
            "these parameters; use the float grouping mode"
        )
    carnot = Fraction(1) - beta_hot / beta_cold
    return _RationalScale(
        omega_last=ints[0],
        omega_first=ints[1],
        step_hot=ints[2],
        Omega_last=ints[3],
        Omega_first=ints[4],
        step_cold=ints[5],
        h=tuple(ints[6:]),
        carnot_key=(carnot.numerator, carnot.denominator),
    )


def _digit(indices: np.ndarray, base: int, power: int) -> np.ndarray:
    return (indices // base**power) % base


def _hot_part(spec: EngineSpec, p0: np.ndarray, hot: list[np.ndarray]):
    """Per-j-path reductions over all (j_0 .. j_N), mixed-radix order."""
    d = spec.d_system
    count = d ** (spec.n_hot + 1)
    idx = np.arange(count, dtype=np.int64)
    logp = np.zeros(count)
    mid_sum = np.zeros(count, dtype=np.int64)
    j_first = _digit(idx, d, spec.n_hot)
    j_last = _digit(idx, d, 0)
    logp += _log_probs(p0)[j_first]
    for t in range(1, spec.n_hot + 1):
        digit = _digit(idx, d, spec.n_hot - t)
        logp += _log_probs(hot[t - 1])[digit]
        if t <= spec.n_hot - 1:
            mid_sum += digit
    return j_first, j_last, mid_sum, logp


def _cold_part(spec: EngineSpec, cold: list[np.ndarray]):
    """Per-k-path reductions over all (k_1 .. k_M), mixed-radix order."""
    d = spec.d_system
    count = d**spec.n_cold
    idx = np.arange(count, dtype=np.int64)
    logp = np.zeros(count)
    mid_sum = np.zeros(count, dtype=np.int64)
    k_last = _digit(idx, d, 0)
    for t in range(1, spec.n_cold + 1):
        digit = _digit(idx, d, spec.n_cold - t)
        logp += _log_probs(cold[t - 1])[digit]
        if t <= spec.n_cold - 1:
            mid_sum += digit
    return k_last, mid_sum, logp


def _decode_trajectory(flat: int, spec: EngineSpec) -> Trajectory:
    d = spec.d_system
    j_index, k_index = divmod(flat, d**spec.n_cold)
    j = tuple(
        int(_digit(np.int64(j_index), d, spec.n_hot - t)) for t in range(spec.n_hot + 1)
    )
    k = tuple(
        int(_digit(np.int64(k_index), d, spec.n_cold - t)) for t in range(1, spec.n_cold + 1)
    )
    return Trajectory(j, k)


class _Accumulator:
    """Associatively mergeable tallies over trajectory slabs."""

    def __init__(self) -> None:
        self.total_prob = 0.0
        self.defined_prob = 0.0
        self.groups: dict = {}
        self.best_logp = -np.inf
        self.best_flat = -1
        self.exp_heat_hot = 0.0
        self.exp_heat_cold = 0.0
        self.exp_energy_decrease = 0.0

    def add_groups(self, keys, sums) -> None:
        groups = self.groups
        for key, value in zip(keys, sums):
            groups[key] = groups.get(key, 0.0) + value

    def offer_argmax(self, logp: float, flat: int) -> None:
        if logp > self.best_logp:
            self.best_logp = logp
            self.best_flat = flat


def _scan(
    spec: EngineSpec,
    strict_positive_filter: bool,
    grouping: str,
    cap: int,
    want_groups: bool,
) -> tuple[_Accumulator, FrequencySchedule]:
    if grouping not in ("float", "rational"):
        raise ValueError(f"unknown grouping mode {grouping!r}")
    d = spec.d_system
    total = d ** (spec.n_hot + spec.n_cold + 1)
    if total > cap:
        raise EnumerationCapError(
            f"{total} trajectories exceed the enumeration cap {cap}; "
            "use sample_distribution instead"
        )
    sched, p0, hot, cold = _marginals(spec)
    j_first, j_last, j_mid, logp_j = _hot_part(spec, p0, hot)
    k_last, k_mid, logp_k = _cold_part(spec, cold)
    k_count = k_last.size

    h = np.array(spec.h_system_diag)
    omega_last = spec.omega_hot_last
    Omega_last = spec.omega_cold_last
    omega_first = float(sched.omega[0])
    Omega_first = float(sched.Omega[0])
    step_hot = (omega_last - sched.omega0) / spec.n_hot
    step_cold = (Omega_last - sched.Omega0) / spec.n_cold
    # Abel-summed hot heat: omega_N j_N - omega_1 j_0 - step * sum_{0<n<N} j_n
    heat_hot_j = omega_last * j_last - omega_first * j_first - step_hot * j_mid
    heat_cold_k = step_cold * k_mid - Omega_last * k_last

    rational = grouping == "rational" and want_groups
    if rational:
        scale = _rational_scale(spec)
        h_int = np.array(scale.h, dtype=np.int64)
        heat_hot_j_int = (
            scale.omega_last * j_last
            - scale.omega_first * j_first
            - scale.step_hot * j_mid
        )
        heat_cold_k_int = scale.step_cold * k_mid - scale.Omega_last * k_last

    zero_tol = _energy_zero_tol(spec, sched)
    acc = _Accumulator()
    rows_per_slab = max(1, _SLAB_ELEMENTS // k_count)
    for row0 in range(0, j_first.size, rows_per_slab):
        rows = slice(row0, min(row0 + rows_per_slab, j_first.size))
        logp = logp_j[rows, np.newaxis] + logp_k[np.newaxis, :]
        prob = np.exp(logp)
        heat_hot = np.broadcast_to(
            heat_hot_j[rows, np.newaxis], prob.shape
        )
        heat_cold = (
            Omega_first * j_last[rows, np.newaxis] + heat_cold_k[np.newaxis, :]
        )
        energy_decrease = h[j_first[rows], np.newaxis] - h[k_last][np.newaxis, :]
        work = energy_decrease + heat_hot - heat_cold

        acc.total_prob += float(prob.sum())
        acc.exp_heat_hot += float((prob * heat_hot).sum())
        acc.exp_heat_cold += float((prob * heat_cold).sum())
        acc.exp_energy_decrease += float((prob * energy_decrease).sum())

        if rational:
            heat_hot_int = np.broadcast_to(
                heat_hot_j_int[rows, np.newaxis], prob.shape
            )
            heat_cold_int = (
                scale.Omega_first * j_last[rows, np.newaxis]
                + heat_cold_k_int[np.newaxis, :]
            )
            energy_int = h_int[j_first[rows], np.newaxis] - h_int[k_last][np.newaxis, :]
            work_int = energy_int + heat_hot_int - heat_cold_int
            if strict_positive_filter:
                defined = (work_int > 0) & (heat_hot_int > 0)
            else:
                defined = heat_hot_int != 0
        elif strict_positive_filter:
            defined = (work > zero_tol) & (heat_hot > zero_tol)
        else:
            defined = np.abs(heat_hot) > zero_tol

        defined_prob = prob[defined]
        acc.defined_prob += float(defined_prob.sum())

        if want_groups and defined.any():
            if rational:
                numerator = work_int[defined]
                denominator = heat_hot_int[defined]
                common = np.gcd(np.abs(numerator), np.abs(denominator))
                sign = np.sign(denominator)
                numerator = (numerator // common) * sign
                denominator = (denominator // common) * sign
                pairs = np.stack([numerator, denominator], axis=1)
                uniq, inverse = np.unique(pairs, axis=0, return_inverse=True)
                sums = np.bincount(inverse, weights=defined_prob)
                acc.add_groups([(int(a), int(b)) for a, b in uniq], sums)
            else:
                eta = work[defined] / heat_hot[defined]
                uniq, inverse = np.unique(eta, return_inverse=True)
                sums = np.bincount(inverse, weights=defined_prob)
                acc.add_groups([float(v) for v in uniq], sums)

            masked = np.where(defined, logp, -np.inf)
            local = int(np.argmax(masked))
            local_logp = float(masked.flat[local])
            if local_logp > -np.inf:
                local_row, local_col = divmod(local, prob.shape[1])
                acc.offer_argmax(local_logp, (row0 + local_row) * k_count + local_col)
    return acc, sched


def _merge_float_groups(
    keys: np.ndarray, probs: np.ndarray
) -> tuple[list[float], list[float]]:
    """Collapse efficiencies that agree within the grouping tolerance."""
    order = np.argsort(keys)
    keys = keys[order]
    probs = probs[order]
    merged_eta: list[float] = []
    merged_prob: list[float] = []
    group_mass = 0.0
    group_weighted = 0.0
    previous = None
    for eta, p in zip(keys, probs):
        if previous is not None and (
            eta - previous > EFFICIENCY_GROUP_RTOL * max(1.0, abs(eta))
        ):
            merged_eta.append(group_weighted / group_mass)
            merged_prob.append(group_mass)
            group_mass = 0.0
            group_weighted = 0.0
        group_mass += p
        group_weighted += eta * p
        previous = eta
    if group_mass > 0.0:
        merged_eta.append(group_weighted / group_mass)
        merged_prob.append(group_mass)
    return merged_eta, merged_prob


def enumerate_distribution(
    spec: EngineSpec,
    strict_positive_filter: bool = False,
    grouping: str = "float",
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> EfficiencyDistribution:
    """Exact efficiency distribution by exhaustive enumeration.

    grouping="float" merges efficiencies within a relative tolerance of
    1e-10; grouping="rational" reads the engine parameters as exact
    decimals and groups by reduced integer ratios, which makes equality
    tests against the Carnot value exact.
    """
    acc, _ = _scan(spec, strict_positive_filter, grouping, cap, want_groups=True)
    if acc.best_flat < 0 or acc.defined_prob <= 0.0:
        raise ValueError("no trajectory has a defined efficiency for this spec")
    if grouping == "rational":
        keys = sorted(acc.groups, key=lambda pair: pair[0] / pair[1])
        etas = [a / b for a, b in keys]
        probs = [acc.groups[key] / acc.defined_prob for key in keys]
        exact_keys = tuple(keys)
    else:
        raw_eta = np.array(sorted(acc.groups))
        raw_prob = np.array([acc.groups[key] for key in sorted(acc.groups)])
        etas, probs = _merge_float_groups(raw_eta, raw_prob)
        probs = [p / acc.defined_prob for p in probs]
        exact_keys = None
    most_likely = etas[int(np.argmax(probs))]
    return EfficiencyDistribution(
        bins=tuple(zip(etas, probs)),
        normalization=acc.defined_prob,
        most_likely_eta=float(most_likely),
        most_likely_trajectory=_decode_trajectory(acc.best_flat, spec),
        exact_keys=exact_keys,
        method="enumeration",
    )


def trajectory_expectations(
    spec: EngineSpec, cap: int = DEFAULT_ENUMERATION_CAP
) -> ExpectationReport:
    """Probability-weighted sums of the trajectory quantities.

    Enumerates everything, with no definedness filter; links the
    trajectory picture to the cycle averages.
    """
    acc, _ = _scan(spec, False, "float", cap, want_groups=False)
    return ExpectationReport(
        heat_hot=acc.exp_heat_hot,
        heat_cold=acc.exp_heat_cold,
        work=acc.exp_energy_decrease + acc.exp_heat_hot - acc.exp_heat_cold,
        energy_decrease=acc.exp_energy_decrease,
    )


def sample_distribution(
    spec: EngineSpec,
    n_samples: int,
    seed: int,
    strict_positive_filter: bool = False,
) -> EfficiencyDistribution:
    """Monte Carlo estimate of the efficiency distribution.

    Draws i.i.d. trajectories from the product measure; identical seeds
    give identical output.  Bins carry empirical probabilities over the
    defined-efficiency samples; the most likely trajectory is the
    sampled one with the largest true probability.
    """
    if not isinstance(n_samples, int) or n_samples < 1:
        raise ValueError(f"n_samples must be an integer >= 1, got {n_samples}")
    sched, p0, hot, cold = _marginals(spec)
    d = spec.d_system
    rng = np.random.default_rng(seed)

    j = np.empty((spec.n_hot + 1, n_samples), dtype=np.int64)
    j[0] = rng.choice(d, size=n_samples, p=p0)
    for n in range(spec.n_hot):
        j[n + 1] = rng.choice(d, size=n_samples, p=hot[n])
    k = np.empty((spec.n_cold, n_samples), dtype=np.int64)
    for m in range(spec.n_cold):
        k[m] = rng.choice(d, size=n_samples, p=cold[m])

    step_hot = (spec.omega_hot_last - sched.omega0) / spec.n_hot
    step_cold = (spec.omega_cold_last - sched.Omega0) / spec.n_cold
    j_mid = j[1:-1].sum(axis=0) if spec.n_hot > 1 else np.zeros(n_samples)
    k_mid = k[:-1].sum(axis=0) if spec.n_cold > 1 else np.zeros(n_samples)
    heat_hot = (
        spec.omega_hot_last * j[-1] - float(sched.omega[0]) * j[0] - step_hot * j_mid
    )
    heat_cold = (
        float(sched.Omega[0]) * j[-1] + step_cold * k_mid - spec.omega_cold_last * k[-1]
    )
    h = np.array(spec.h_system_diag)
    energy_decrease = h[j[0]] - h[k[-1]]
    work = energy_decrease + heat_hot - heat_cold

    zero_tol = _energy_zero_tol(spec, sched)
    if strict_positive_filter:
        defined = (work > zero_tol) & (heat_hot > zero_tol)
    else:
        defined = np.abs(heat_hot) > zero_tol
    n_defined = int(defined.sum())
    if n_defined == 0:
        raise ValueError(
            "no sampled trajectory had a defined efficiency; draw more samples"
        )

    eta = work[defined] / heat_hot[defined]
    uniq, inverse = np.unique(eta, return_inverse=True)
    counts = np.bincount(inverse).astype(float)
    etas, masses = _merge_float_groups(uniq, counts)
    probs = [m / n_defined for m in masses]

    logp = _log_probs(p0)[j[0]]
    for n in range(spec.n_hot):
        logp = logp + _log_probs(hot[n])[j[n + 1]]
    for m in range(spec.n_cold):
        logp = logp + _log_probs(cold[m])[k[m]]
    masked = np.where(defined, logp, -np.inf)
    best = int(np.argmax(masked))
    best_trajectory = Trajectory(
        tuple(int(v) for v in j[:, best]), tuple(int(v) for v in k[:, best])
    )

    most_likely = etas[int(np.argmax(probs))]
    return EfficiencyDistribution(
        bins=tuple(zip(etas, probs)),
        normalization=n_defined / n_samples,
        most_likely_eta=float(most_likely),
        most_likely_trajectory=best_trajectory,
        exact_keys=None,
        method="sampling",
    )


def carnot_condition_grid(
    spec_template: EngineSpec,
    n_values: list[int] | tuple[int, ...] | range,
    m_values: list[int] | tuple[int, ...] | range,
    grouping: str = "rational",
    strict_positive_filter: bool = True,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> CarnotConditionGrid:
    """Map which ensemble counts make the modal efficiency exactly Carnot.

    Each feasible (N, M) cell enumerates the distribution and compares
    the most likely efficiency against Carnot; with the default rational
    grouping the comparison is exact.  The grid defaults to the strict
    positive-work filter: admitting zero- and negative-work trajectories
    floods the Carnot bin (every balanced exchange lands there) and
    washes the structure out.  Cells whose trajectory space exceeds the
    cap are left as None.
    """
    n_values = tuple(int(v) for v in n_values)
    m_values = tuple(int(v) for v in m_values)
    rows = []
    for n in n_values:
        row: list[bool | None] = []
        for m in m_values:
            cell = replace(spec_template, n_hot=n, n_cold=m)
            try:
                dist = enumerate_distribution(
                    cell,
                    strict_positive_filter=strict_positive_filter,
                    grouping=grouping,
                    cap=cap,
                )
            except EnumerationCapError:
                row.append(None)
                continue
            if grouping == "rational":
                scale = _rational_scale(cell)
                best = dist.exact_keys[
                    int(np.argmax([p for _, p in dist.bins]))
                ]
                row.append(best == scale.carnot_key)
            else:
                row.append(
                    abs(dist.most_likely_eta - cell.carnot)
                    <= EFFICIENCY_GROUP_RTOL * max(1.0, abs(cell.carnot))
                )
        rows.append(tuple(row))
    return CarnotConditionGrid(n_values, m_values, tuple(rows))

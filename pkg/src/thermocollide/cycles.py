"""Full engine cycles: schedules, ideal-limit averages, finite-eps runs.

A cycle sweeps the system through N hot ensembles of decreasing level
spacing and M cold ensembles of increasing spacing, pseudo-thermalizing
at each stop.  Two evaluation modes coexist: the analytic mode treats
every stop as exactly pseudo-thermal (the eps -> 0 limit), the simulated
mode iterates real collisions until each stop is reached within eps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from .blocks import BlockUnitary, build_jaynes_cummings, build_swap
from .channels import (
    CollisionAudit,
    CollisionChannel,
    DEFAULT_MAX_COLLISIONS,
    channel_matrix,
    collide_with_audit,
)
from .states import (
    GibbsSpec,
    PopulationState,
    gibbs_populations,
    relative_entropy,
    shannon_entropy,
    trace_distance,
)

INTERACTIONS = ("swap", "jaynes_cummings")

# Finite-eps averages must land within AVG_CHECK_FACTOR * eps * (largest
# frequency) of the analytic ones.  eps bounds each stop's trace
# distance, the frequency converts that to energy, and the factor
# absorbs accumulation across ensembles at desk scale.
AVG_CHECK_FACTOR = 1e3


class BoundInapplicableError(ValueError):
    """The dimension-limited efficiency bound's premise fails.

    The bound divides by delta_S_hot - delta_S_hot^2 / (3 ln^2 dim_hot);
    when that is not positive the positive-heat premise cannot hold and
    the bound says nothing.
    """


@dataclass(frozen=True)
class EngineSpec:
    """Complete configuration of one engine experiment.

    h_system_diag lists the diagonal matrix elements of the system
    Hamiltonian in the number basis; only the diagonal ever enters a
    cycle quantity.  None selects omega_cold_last * k, which makes the
    system resonant with the final cold ensemble at the cycle boundary.
    """

    beta_hot: float
    beta_cold: float
    omega_hot_last: float
    omega_cold_last: float
    n_hot: int
    n_cold: int
    d_system: int
    d_hot: int
    d_cold: int
    interaction: str = "jaynes_cummings"
    theta: float = math.pi / 2
    eps: float = 1e-9
    h_system_diag: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        for name in ("n_hot", "n_cold"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 1:
                raise ValueError(f"{name} must be an integer >= 1, got {v}")
        for name in ("d_system", "d_hot", "d_cold"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 2:
                raise ValueError(f"{name} must be an integer >= 2, got {v}")
        # the frequency ramp anchors at (beta_cold / beta_hot) * Omega_M,
        # so a strictly positive hot inverse temperature is required
        if not (math.isfinite(self.beta_hot) and self.beta_hot > 0.0):
            raise ValueError(f"beta_hot must be finite and > 0, got {self.beta_hot}")
        if not (math.isfinite(self.beta_cold) and self.beta_cold > 0.0):
            raise ValueError(f"beta_cold must be finite and > 0, got {self.beta_cold}")
        if self.beta_hot >= self.beta_cold:
            raise ValueError(
                "hot bath must be hotter: "
                f"beta_hot={self.beta_hot} >= beta_cold={self.beta_cold}"
            )
        for name in ("omega_hot_last", "omega_cold_last"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0.0):
                raise ValueError(f"{name} must be finite and > 0, got {v}")
        if self.beta_hot * self.omega_hot_last >= self.beta_cold * self.omega_cold_last:
            raise ValueError(
                "positive-work condition violated: requires "
                "beta_hot * omega_hot_last < beta_cold * omega_cold_last"
            )
        if self.interaction not in INTERACTIONS:
            raise ValueError(
                f"unknown interaction {self.interaction!r}, expected one of "
                f"{INTERACTIONS}"
            )
        if self.interaction == "swap" and not (
            self.d_system == self.d_hot == self.d_cold
        ):
            raise ValueError(
                "swap interaction requires d_system = d_hot = d_cold, got "
                f"({self.d_system}, {self.d_hot}, {self.d_cold})"
            )
        if not math.isfinite(self.theta):
            raise ValueError(f"theta must be finite, got {self.theta}")
        if not 0.0 < self.eps <= 1.0:
            raise ValueError(f"eps must lie in (0, 1], got {self.eps}")
        if self.h_system_diag is None:
            diag = tuple(self.omega_cold_last * k for k in range(self.d_system))
            object.__setattr__(self, "h_system_diag", diag)
        else:
            diag = tuple(float(v) for v in self.h_system_diag)
            if len(diag) != self.d_system:
                raise ValueError(
                    f"h_system_diag has length {len(diag)}, expected {self.d_system}"
                )
            if not all(math.isfinite(v) for v in diag):
                raise ValueError("h_system_diag entries must be finite")
            object.__setattr__(self, "h_system_diag", diag)

    @property
    def carnot(self) -> float:
        return 1.0 - self.beta_hot / self.beta_cold


@dataclass(frozen=True, eq=False)
class FrequencySchedule:
    """Linear ramps of the bath level spacings across the ensembles.

    omega runs over the hot ensembles 1..N (strictly decreasing), Omega
    over the cold ensembles 1..M (strictly increasing).  The virtual
    endpoints omega0 and Omega0 are pinned so that the first hot
    ensemble continues the cold ramp at equal beta*omega and vice versa,
    which is what lets both relative-entropy sums vanish as N, M grow.
    """

    omega: np.ndarray
    omega0: float
    Omega: np.ndarray
    Omega0: float

    def __post_init__(self) -> None:
        if np.any(np.diff(self.omega) >= 0.0):
            raise ValueError("hot frequencies must be strictly decreasing")
        if np.any(np.diff(self.Omega) <= 0.0):
            raise ValueError("cold frequencies must be strictly increasing")
        self.omega.flags.writeable = False
        self.Omega.flags.writeable = False

    @property
    def max_frequency(self) -> float:
        return max(self.omega0, float(self.Omega[-1]))


def frequency_schedule(spec: EngineSpec) -> FrequencySchedule:
    """omega_n = omega0 + n (omega_N - omega0) / N and the cold analogue."""
    omega0 = (spec.beta_cold / spec.beta_hot) * spec.omega_cold_last
    Omega0 = (spec.beta_hot / spec.beta_cold) * spec.omega_hot_last
    n = np.arange(1, spec.n_hot + 1, dtype=float)
    m = np.arange(1, spec.n_cold + 1, dtype=float)
    omega = omega0 + n * (spec.omega_hot_last - omega0) / spec.n_hot
    Omega = Omega0 + m * (spec.omega_cold_last - Omega0) / spec.n_cold
    # pin the endpoints exactly; the formula reaches them only up to rounding
    omega[-1] = spec.omega_hot_last
    Omega[-1] = spec.omega_cold_last
    return FrequencySchedule(omega=omega, omega0=omega0, Omega=Omega, Omega0=Omega0)


@dataclass(frozen=True)
class CycleReport:
    """Average heats, work and efficiency of one cycle.

    delta_entropy is the system's entropy gain across the hot sweep
    endpoint states; divergence_hot and divergence_cold collect the
    relative-entropy losses along each sweep.  Heats satisfy
    beta_hot * avg_heat_hot = delta_entropy - divergence_hot and
    beta_cold * avg_heat_cold = delta_entropy + divergence_cold in the
    analytic (eps -> 0) mode.
    """

    avg_heat_hot: float
    avg_heat_cold: float
    avg_work: float
    efficiency: float
    delta_entropy: float
    divergence_hot: float
    divergence_cold: float
    carnot: float


@dataclass(frozen=True, eq=False)
class SimulatedCycleReport:
    """Finite-eps cycle: collision counts, effective bath sizes, averages."""

    alpha_hot: tuple[int, ...]
    alpha_cold: tuple[int, ...]
    n_int: int
    log_dim_hot: float
    log_dim_cold: float
    cycle_report: CycleReport
    final_state: PopulationState
    audits: tuple[CollisionAudit, ...]


@dataclass(frozen=True, eq=False)
class MultiCycleReport:
    """Per-cycle degradation record under a frozen collision schedule."""

    cyclicity: np.ndarray
    work: np.ndarray
    integrated_work: np.ndarray
    efficiency: np.ndarray
    first_cycle: SimulatedCycleReport


class SingleEnsembleResult(NamedTuple):
    work: float
    efficiency: float
    work_limit_infinite_d: float


class CarnotBoundAudit(NamedTuple):
    bound: float
    carnot: float
    consistent: bool


@dataclass(frozen=True)
class OptimizationPoint:
    d_bath: int
    n_int: int | None
    log_dim_total: float | None
    work: float | None
    power: float | None
    error: str | None = None


@dataclass(frozen=True)
class OptimizationReport:
    points: tuple[OptimizationPoint, ...]
    best: OptimizationPoint | None


def _pseudo_thermal(beta: float, omega: float, d: int) -> PopulationState:
    return gibbs_populations(GibbsSpec(beta, omega, d))


def _hot_targets(spec: EngineSpec, sched: FrequencySchedule) -> list[PopulationState]:
    return [_pseudo_thermal(spec.beta_hot, w, spec.d_system) for w in sched.omega]


def _cold_targets(spec: EngineSpec, sched: FrequencySchedule) -> list[PopulationState]:
    return [_pseudo_thermal(spec.beta_cold, w, spec.d_system) for w in sched.Omega]


def _sweep_heats(
    sched: FrequencySchedule,
    start: PopulationState,
    hot: list[PopulationState],
    cold: list[PopulationState],
) -> tuple[float, float]:
    """Number-expectation forms of the two average heats."""
    n_hot = [s.mean_number() for s in hot]
    n_cold = [s.mean_number() for s in cold]
    q_hot = sched.omega[0] * (n_hot[0] - start.mean_number())
    for n in range(1, len(hot)):
        q_hot += sched.omega[n] * (n_hot[n] - n_hot[n - 1])
    q_cold = sched.Omega[0] * (n_hot[-1] - n_cold[0])
    for m in range(1, len(cold)):
        q_cold += sched.Omega[m] * (n_cold[m - 1] - n_cold[m])
    return float(q_hot), float(q_cold)


def _sweep_entropics(
    start: PopulationState,
    hot: list[PopulationState],
    cold: list[PopulationState],
) -> tuple[float, float, float]:
    delta_entropy = shannon_entropy(hot[-1]) - shannon_entropy(start)
    divergence_hot = relative_entropy(start, hot[0])
    for n in range(1, len(hot)):
        divergence_hot += relative_entropy(hot[n - 1], hot[n])
    divergence_cold = relative_entropy(hot[-1], cold[0])
    for m in range(1, len(cold)):
        divergence_cold += relative_entropy(cold[m - 1], cold[m])
    return delta_entropy, divergence_hot, divergence_cold


def _report_from_states(
    spec: EngineSpec,
    sched: FrequencySchedule,
    start: PopulationState,
    hot: list[PopulationState],
    cold: list[PopulationState],
) -> CycleReport:
    q_hot, q_cold = _sweep_heats(sched, start, hot, cold)
    delta_entropy, div_hot, div_cold = _sweep_entropics(start, hot, cold)
    work = q_hot - q_cold
    efficiency = work / q_hot if q_hot != 0.0 else 0.0
    return CycleReport(
        avg_heat_hot=q_hot,
        avg_heat_cold=q_cold,
        avg_work=work,
        efficiency=efficiency,
        delta_entropy=delta_entropy,
        divergence_hot=div_hot,
        divergence_cold=div_cold,
        carnot=spec.carnot,
    )


def analytic_cycle(spec: EngineSpec) -> CycleReport:
    """Averages of the ideal eps -> 0 cycle.

    Every stop is the exact pseudo-thermal state, so the heats have both
    a number-expectation form and an entropic closed form; the two are
    cross-checked against each other before returning.
    """
    sched = frequency_schedule(spec)
    hot = _hot_targets(spec, sched)
    cold = _cold_targets(spec, sched)
    start = cold[-1]
    report = _report_from_states(spec, sched, start, hot, cold)
    if spec.beta_hot > 0.0:
        floor = 1e-12 * sched.max_frequency
        for number_form, entropic_form in (
            (report.avg_heat_hot, (report.delta_entropy - report.divergence_hot) / spec.beta_hot),
            (report.avg_heat_cold, (report.delta_entropy + report.divergence_cold) / spec.beta_cold),
        ):
            scale = max(abs(number_form), abs(entropic_form))
            if abs(number_form - entropic_form) > 1e-10 * scale + floor:
                raise ArithmeticError(
                    "number-expectation and entropic heat forms disagree: "
                    f"{number_form!r} vs {entropic_form!r}"
                )
    return report


def single_ensemble_closed_form(spec: EngineSpec) -> SingleEnsembleResult:
    """Closed forms for the one-hot, one-cold ensemble engine.

    work = (omega_1 - Omega_1) * (mean number gap of the two
    pseudo-thermal states); efficiency = 1 - Omega_1 / omega_1.  The
    infinite-d limit replaces the truncated mean numbers by the full
    Bose occupations 1 / (e^(beta * omega) - 1).
    """
    if spec.n_hot != 1 or spec.n_cold != 1:
        raise ValueError("closed form requires exactly one ensemble per bath")
    sched = frequency_schedule(spec)
    omega_1 = float(sched.omega[0])
    Omega_1 = float(sched.Omega[0])
    hot = _pseudo_thermal(spec.beta_hot, omega_1, spec.d_system)
    cold = _pseudo_thermal(spec.beta_cold, Omega_1, spec.d_system)
    work = (omega_1 - Omega_1) * (hot.mean_number() - cold.mean_number())
    efficiency = 1.0 - Omega_1 / omega_1
    if spec.beta_hot == 0.0:
        limit = math.inf if omega_1 > Omega_1 else -math.inf
    else:
        limit = (omega_1 - Omega_1) * (
            1.0 / math.expm1(spec.beta_hot * omega_1)
            - 1.0 / math.expm1(spec.beta_cold * Omega_1)
        )
    return SingleEnsembleResult(work, efficiency, limit)


def interaction_unitary(spec: EngineSpec, d_particle: int) -> BlockUnitary:
    """The collision unitary this spec prescribes for one bath species."""
    if spec.interaction == "swap":
        return build_swap(spec.d_system, d_particle)
    return build_jaynes_cummings(spec.d_system, d_particle, spec.theta)


def _thermalize_with_audits(
    unitary: BlockUnitary,
    state: PopulationState,
    bath: GibbsSpec,
    target: PopulationState,
    eps: float,
    max_collisions: int,
) -> tuple[PopulationState, int, list[CollisionAudit]]:
    """Minimal-count audited collisions into the eps-ball around target."""
    audits: list[CollisionAudit] = []
    for count in range(max_collisions + 1):
        if trace_distance(state, target) < eps:
            return state, count, audits
        state, audit = collide_with_audit(unitary, state, bath)
        audits.append(audit)
    from .channels import ConvergenceError

    raise ConvergenceError(
        f"no eps={eps:g} pseudo-thermalization within {max_collisions} collisions",
        collisions=max_collisions,
        distance=trace_distance(state, target),
    )


def simulate_cycle(
    spec: EngineSpec,
    max_collisions: int = DEFAULT_MAX_COLLISIONS,
    avg_check_factor: float = AVG_CHECK_FACTOR,
) -> SimulatedCycleReport:
    """Run one finite-eps cycle collision by collision.

    Starts from the exact cold-end pseudo-thermal state, sweeps the hot
    ensembles then the cold ones, and records the minimal collision
    count per ensemble plus every collision's audit.  The resulting
    averages are compared against the analytic cycle; a disagreement
    beyond avg_check_factor * eps * (largest frequency) raises, since it
    would mean the simulation drifted beyond what eps permits.
    """
    sched = frequency_schedule(spec)
    u_hot = interaction_unitary(spec, spec.d_hot)
    u_cold = (
        u_hot
        if spec.d_cold == spec.d_hot
        else interaction_unitary(spec, spec.d_cold)
    )
    state = _pseudo_thermal(spec.beta_cold, spec.omega_cold_last, spec.d_system)

    audits: list[CollisionAudit] = []
    alpha_hot: list[int] = []
    hot_states: list[PopulationState] = []
    for w in sched.omega:
        bath = GibbsSpec(spec.beta_hot, float(w), spec.d_hot)
        target = _pseudo_thermal(spec.beta_hot, float(w), spec.d_system)
        state, count, ensemble_audits = _thermalize_with_audits(
            u_hot, state, bath, target, spec.eps, max_collisions
        )
        alpha_hot.append(count)
        audits.extend(ensemble_audits)
        hot_states.append(state)

    alpha_cold: list[int] = []
    cold_states: list[PopulationState] = []
    for w in sched.Omega:
        bath = GibbsSpec(spec.beta_cold, float(w), spec.d_cold)
        target = _pseudo_thermal(spec.beta_cold, float(w), spec.d_system)
        state, count, ensemble_audits = _thermalize_with_audits(
            u_cold, state, bath, target, spec.eps, max_collisions
        )
        alpha_cold.append(count)
        audits.extend(ensemble_audits)
        cold_states.append(state)

    start = _pseudo_thermal(spec.beta_cold, spec.omega_cold_last, spec.d_system)
    report = _report_from_states(spec, sched, start, hot_states, cold_states)

    ideal = analytic_cycle(spec)
    tolerance = avg_check_factor * spec.eps * sched.max_frequency
    for simulated, exact in (
        (report.avg_heat_hot, ideal.avg_heat_hot),
        (report.avg_heat_cold, ideal.avg_heat_cold),
        (report.avg_work, ideal.avg_work),
    ):
        if abs(simulated - exact) > tolerance:
            raise ArithmeticError(
                f"simulated average {simulated!r} deviates from analytic "
                f"{exact!r} beyond {tolerance:g}"
            )

    return SimulatedCycleReport(
        alpha_hot=tuple(alpha_hot),
        alpha_cold=tuple(alpha_cold),
        n_int=sum(alpha_hot) + sum(alpha_cold),
        log_dim_hot=sum(alpha_hot) * math.log(spec.d_hot),
        log_dim_cold=sum(alpha_cold) * math.log(spec.d_cold),
        cycle_report=report,
        final_state=state,
        audits=tuple(audits),
    )


def simulate_many_cycles(spec: EngineSpec, cycles: int) -> MultiCycleReport:
    """Repeat the cycle with the collision counts frozen from cycle one.

    Later cycles reuse the per-ensemble channel matrices, so the state
    is no longer pulled into each eps-ball; the report tracks how far
    the engine drifts from cyclicity and how work and efficiency
    degrade.
    """
    if not isinstance(cycles, int) or cycles < 1:
        raise ValueError(f"cycles must be an integer >= 1, got {cycles}")
    first = simulate_cycle(spec)
    sched = frequency_schedule(spec)
    u_hot = interaction_unitary(spec, spec.d_hot)
    u_cold = (
        u_hot
        if spec.d_cold == spec.d_hot
        else interaction_unitary(spec, spec.d_cold)
    )
    hot_channels = [
        channel_matrix(u_hot, GibbsSpec(spec.beta_hot, float(w), spec.d_hot))
        for w in sched.omega
    ]
    cold_channels = [
        channel_matrix(u_cold, GibbsSpec(spec.beta_cold, float(w), spec.d_cold))
        for w in sched.Omega
    ]

    start0 = _pseudo_thermal(spec.beta_cold, spec.omega_cold_last, spec.d_system)
    cyclicity = [trace_distance(start0, first.final_state)]
    work = [first.cycle_report.avg_work]
    heat_hot = [first.cycle_report.avg_heat_hot]

    state = first.final_state
    for _ in range(1, cycles):
        start = state
        hot_states = []
        for channel, count in zip(hot_channels, first.alpha_hot):
            for _ in range(count):
                state = PopulationState(channel.matrix @ state.probs)
            hot_states.append(state)
        cold_states = []
        for channel, count in zip(cold_channels, first.alpha_cold):
            for _ in range(count):
                state = PopulationState(channel.matrix @ state.probs)
            cold_states.append(state)
        report = _report_from_states(spec, sched, start, hot_states, cold_states)
        cyclicity.append(trace_distance(start, state))
        work.append(report.avg_work)
        heat_hot.append(report.avg_heat_hot)

    work_arr = np.array(work)
    heat_arr = np.array(heat_hot)
    integrated = np.cumsum(work_arr) / np.arange(1, len(work_arr) + 1)
    efficiency = np.where(heat_arr != 0.0, work_arr / heat_arr, 0.0)
    return MultiCycleReport(
        cyclicity=np.array(cyclicity),
        work=work_arr,
        integrated_work=integrated,
        efficiency=efficiency,
        first_cycle=first,
    )


def optimize_particle_dimension(
    spec: EngineSpec,
    d_values: range | list[int] | tuple[int, ...],
    max_collisions: int = DEFAULT_MAX_COLLISIONS,
) -> OptimizationReport:
    """Scan equal bath-particle dimensions for the smallest effective baths.

    The figure of merit is the log of the total consumed bath dimension,
    n_int * ln(d).  The scan is exhaustive; failures (e.g. swap with a
    mismatched dimension, or a non-converging degenerate unitary) are
    recorded per point instead of aborting, and ties go to the smaller,
    cheaper particle.
    """
    points: list[OptimizationPoint] = []
    best: OptimizationPoint | None = None
    for d in sorted(set(int(d) for d in d_values)):
        try:
            trial = replace(spec, d_hot=d, d_cold=d)
            result = simulate_cycle(trial, max_collisions=max_collisions)
        except (ValueError, ArithmeticError, RuntimeError) as exc:
            points.append(
                OptimizationPoint(
                    d_bath=d,
                    n_int=None,
                    log_dim_total=None,
                    work=None,
                    power=None,
                    error=f"{type(exc).__name__}: {exc}",
                )
            )
            continue
        log_dim = result.n_int * math.log(d)
        point = OptimizationPoint(
            d_bath=d,
            n_int=result.n_int,
            log_dim_total=log_dim,
            work=result.cycle_report.avg_work,
            power=result.cycle_report.avg_work / result.n_int,
        )
        points.append(point)
        if best is None or point.log_dim_total < best.log_dim_total:
            best = point
    return OptimizationReport(points=tuple(points), best=best)


def carnot_bound_audit(
    beta_hot: float,
    beta_cold: float,
    delta_S_hot: float,
    delta_S_cold: float,
    s_irr: float,
    dim_hot: int,
    dim_cold: int,
) -> CarnotBoundAudit:
    """Evaluate the dimension-limited efficiency ceiling.

    bound = 1 - (beta_hot / beta_cold) *
            (s_irr + delta_S_hot + delta_S_cold^2 / (3 ln^2 dim_cold))
          / (delta_S_hot - delta_S_hot^2 / (3 ln^2 dim_hot))

    delta_S_hot (delta_S_cold) is the entropy decrease of the hot (cold)
    bath over the cycle; positive average work requires delta_S_hot > 0.
    The bound relaxes to the Carnot efficiency as both dimensions grow
    and s_irr vanishes.
    """
    for name, dim in (("dim_hot", dim_hot), ("dim_cold", dim_cold)):
        if not isinstance(dim, int) or dim < 2:
            raise ValueError(f"{name} must be an integer >= 2, got {dim}")
    if delta_S_hot <= 0.0:
        raise ValueError(
            f"positive-work regime requires delta_S_hot > 0, got {delta_S_hot}"
        )
    denominator = delta_S_hot - delta_S_hot**2 / (3.0 * math.log(dim_hot) ** 2)
    if denominator <= 0.0:
        raise BoundInapplicableError(
            "hot-bath entropy change saturates the dimension bound "
            f"(denominator {denominator:.3e} <= 0); the positive-heat "
            "premise fails at this dimension"
        )
    numerator = s_irr + delta_S_hot + delta_S_cold**2 / (3.0 * math.log(dim_cold) ** 2)
    bound = 1.0 - (beta_hot / beta_cold) * numerator / denominator
    carnot = 1.0 - beta_hot / beta_cold
    return CarnotBoundAudit(bound, carnot, bound <= carnot + 1e-12)

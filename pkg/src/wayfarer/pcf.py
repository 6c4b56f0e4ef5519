"""Per-trip state variables and the preference-weighted cost function.

A partial trip is summarized by per-mode elapsed time, per-mode fares,
aggregates of any active metric overlays along the visited nodes, and the
wall clock. The cost function collapses that summary into dollars:

    cost = beta_t * sum_M(alpha_M * hours_M) + sum_M(fares_M)
           + sum_dataset(beta_a[dataset] * aux_sum[dataset])

alpha weights a mode's time against driving (alpha[car] is pinned to 1),
beta_t prices an hour of travel, and each beta_a prices one unit of an
uploaded metric. All three come from two elicitation questions.

Money is held in integer cents, durations in integer seconds; only the
final cost is a float (dollars).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from wayfarer.errors import WayfarerError
from wayfarer.geodata import MODES, Mode

SECONDS_PER_HOUR = 3600.0

# Walking and biking are free by definition; fares on those modes are
# forced to zero everywhere.
FARE_FREE_MODES = frozenset({Mode.WALK, Mode.BIKE})


class NonpositiveAnswer(WayfarerError):
    pass


class NegativeQuantity(WayfarerError):
    pass


@dataclass(frozen=True)
class AuxTotals:
    """Running aggregates of one overlay's scores over visited nodes."""

    sum: float
    max: float
    min: float
    avg: float

    @classmethod
    def single(cls, score: float) -> "AuxTotals":
        return cls(sum=score, max=score, min=score, avg=score)

    def extend(self, score: float, visited: int) -> "AuxTotals":
        total = self.sum + score
        return AuxTotals(
            sum=total,
            max=max(self.max, score),
            min=min(self.min, score),
            avg=total / visited,
        )


@dataclass(frozen=True)
class StateVars:
    """Accumulated trip summary; treat as immutable."""

    times: dict[Mode, int]             # seconds spent per mode
    fares_cents: dict[Mode, int]       # cents spent per mode
    aux: dict[str, AuxTotals]          # per active dataset
    clock: int                         # seconds since departure
    visited: int                       # nodes entered (origin included)

    @classmethod
    def at_start(cls, origin_scores: dict[str, float] | None = None) -> "StateVars":
        scores = origin_scores or {}
        return cls(
            times={m: 0 for m in MODES},
            fares_cents={m: 0 for m in MODES},
            aux={name: AuxTotals.single(s) for name, s in scores.items()},
            clock=0,
            visited=1,
        )


def accumulate(
    vars: StateVars,
    mode: Mode,
    duration_s: int,
    fare_cents: int,
    entered_scores: dict[str, float] | None = None,
    extra_clock_s: int = 0,
) -> StateVars:
    """Fold one movement step into the summary.

    duration_s is charged to the step's mode; extra_clock_s advances the
    clock without being attributed to any mode (unattributed waiting).
    entered_scores are the overlay scores of the node the step enters.
    """
    if duration_s < 0 or fare_cents < 0 or extra_clock_s < 0:
        raise NegativeQuantity(
            f"negative step quantity: duration={duration_s} fare={fare_cents} "
            f"wait={extra_clock_s}"
        )
    if mode in FARE_FREE_MODES:
        fare_cents = 0
    scores = entered_scores or {}
    visited = vars.visited + 1
    aux = dict(vars.aux)
    for name, score in scores.items():
        prev = aux.get(name)
        aux[name] = prev.extend(score, visited) if prev else AuxTotals.single(score)
    times = dict(vars.times)
    times[mode] = times.get(mode, 0) + duration_s
    fares = dict(vars.fares_cents)
    fares[mode] = fares.get(mode, 0) + fare_cents
    return StateVars(
        times=times,
        fares_cents=fares,
        aux=aux,
        clock=vars.clock + duration_s + extra_clock_s,
        visited=visited,
    )


@dataclass(frozen=True)
class CoefficientProfile:
    alpha: dict[Mode, float]                    # time weight per mode, car = 1
    beta_t_usd_per_hour: float                  # dollars per travel hour
    beta_a_usd_per_aux: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.alpha.get(Mode.CAR) != 1:
            raise NonpositiveAnswer("alpha[car] must be 1")
        if any(a < 0 for a in self.alpha.values()) or self.beta_t_usd_per_hour < 0:
            raise NonpositiveAnswer("coefficients must be nonnegative")
        if any(b < 0 for b in self.beta_a_usd_per_aux.values()):
            raise NonpositiveAnswer("aux coefficients must be nonnegative")


@dataclass(frozen=True)
class ElicitationAnswers:
    """Raw answers to the two preference questions.

    hours_equivalent[M]: hours of driving the user trades for one hour of
    mode M (asked for every mode except car). dollars_per_hour: what the
    user pays to save a travel hour. dollars_per_aux: what the user pays
    to avoid one unit of an uploaded metric, per dataset.
    """

    hours_equivalent: dict[Mode, float]
    dollars_per_hour: float
    dollars_per_aux: dict[str, float] = field(default_factory=dict)


def derive_coefficients(answers: ElicitationAnswers) -> CoefficientProfile:
    """Turn elicitation answers into cost coefficients.

    One hour of mode M equals hours_equivalent[M] hours of driving and
    alpha[car] is pinned at 1, so alpha[M] is the answer itself; the two
    dollar answers become beta_t and beta_a directly.
    """
    alpha: dict[Mode, float] = {Mode.CAR: 1.0}
    for mode in MODES:
        if mode is Mode.CAR:
            continue
        h = answers.hours_equivalent.get(mode)
        if h is None:
            raise NonpositiveAnswer(f"missing hours_equivalent for {mode.value}")
        if not h > 0:
            raise NonpositiveAnswer(f"hours_equivalent[{mode.value}] must be positive")
        alpha[mode] = float(h)
    if not answers.dollars_per_hour > 0:
        raise NonpositiveAnswer("dollars_per_hour must be positive")
    for name, d in answers.dollars_per_aux.items():
        if d < 0:
            raise NonpositiveAnswer(f"dollars_per_aux[{name}] must be nonnegative")
    return CoefficientProfile(
        alpha=alpha,
        beta_t_usd_per_hour=float(answers.dollars_per_hour),
        beta_a_usd_per_aux={k: float(v) for k, v in answers.dollars_per_aux.items()},
    )


def pcf(vars: StateVars, profile: CoefficientProfile) -> float:
    """Preference-weighted cost of the summarized trip, in dollars."""
    time_cost = profile.beta_t_usd_per_hour * sum(
        profile.alpha[m] * vars.times.get(m, 0) for m in MODES
    ) / SECONDS_PER_HOUR
    fare_cost = sum(vars.fares_cents.get(m, 0) for m in MODES) / 100.0
    aux_cost = sum(
        profile.beta_a_usd_per_aux.get(name, 0.0) * totals.sum
        for name, totals in vars.aux.items()
    )
    return time_cost + fare_cost + aux_cost


def answers_from_json(doc: dict) -> ElicitationAnswers:
    """Parse the preferences wire/file format.

    {"hours_equivalent": {"walk": 3, ...}, "dollars_per_hour": 20,
     "dollars_per_aux": {"crime": 1.0}}
    """
    try:
        hours = {Mode(k): float(v) for k, v in doc["hours_equivalent"].items()}
        per_hour = float(doc["dollars_per_hour"])
        per_aux = {str(k): float(v) for k, v in doc.get("dollars_per_aux", {}).items()}
    except (KeyError, TypeError, ValueError) as exc:
        raise NonpositiveAnswer(f"bad preferences document: {exc}") from None
    return ElicitationAnswers(hours, per_hour, per_aux)


@dataclass(frozen=True)
class FareConfig:
    """Distance-based fare model for the self-propelled paid modes.

    Taxi charges a base fare per hire plus a per-km rate; car pays a flat
    per-km operating cost; public fares come from the transit line; walk
    and bike are free.
    """

    taxi_base_cents: int = 200
    taxi_per_km_cents: int = 150
    car_per_km_cents: int = 40

    @classmethod
    def from_json(cls, source: str | Path | dict) -> "FareConfig":
        if isinstance(source, (str, Path)):
            doc = json.loads(Path(source).read_text(encoding="utf-8"))
        else:
            doc = source
        cfg = cls(
            taxi_base_cents=round(float(doc.get("taxi_base_usd", 2.00)) * 100),
            taxi_per_km_cents=round(float(doc.get("taxi_per_km_usd", 1.50)) * 100),
            car_per_km_cents=round(float(doc.get("car_per_km_usd", 0.40)) * 100),
        )
        if min(cfg.taxi_base_cents, cfg.taxi_per_km_cents, cfg.car_per_km_cents) < 0:
            raise NegativeQuantity("fare rates must be nonnegative")
        return cfg

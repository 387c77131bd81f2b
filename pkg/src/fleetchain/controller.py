"""Cluster-head rotation rules and the slotted decision loop.

Decision cascade per cluster and slot:

(a) stopping rule: change the head when the observed score falls strictly
    below the expected score (equality keeps the head);
(b) capacity rule: otherwise compare the head's transaction limit against
    the cluster's required ceiling; an under-provisioned head is replaced
    by a candidate whose limit covers the requirement and whose radio range
    covers the connect range;
(c) split: if no candidate qualifies, load is divided - led by the unique
    largest radio range, or by the best transfer score when ranges tie;
(d) ambiguity: when the score comparison is an exact tie and the capacity
    data is unavailable, the pre-decay test decides.

A change decided at slot t stamps its offload at t - slot so the handover
is prepared one slot ahead. Critical-energy vehicles are never selected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

from .analytics import DecayParams, decay_params_at, energy_decay, invert_rate
from .energy import HestonParams
from .mobility import ConnectivityParams, MobilityModel

RULE_OST = "OST"
RULE_LIMIT = "Lemma2-limit"
RULE_PRE_DECAY = "pre-decay"

ACTION_KEEP = "keep"
ACTION_CHANGE = "change"
ACTION_SPLIT_RANGE = "split_by_range"
ACTION_SPLIT_TRANSFER = "split_by_transfer"


def _erf_scaled(x: float, stddev: float) -> float:
    return math.erf(x / (math.sqrt(2.0) * stddev))


def ost_score(m: MobilityModel, c: ConnectivityParams, lam1: float) -> float:
    """Observable stopping score at negligible drift variance."""
    erf_term = _erf_scaled(m.mean_range - m.radio_range, m.range_stddev) - _erf_scaled(
        m.mean_range, m.range_stddev
    )
    return -c.presence_prob * erf_term / 2.0 + 2.0 * lam1


def ost_threshold(m: MobilityModel, c: ConnectivityParams, lam_expected: float) -> float:
    """Expected-score threshold below which the head must change."""
    return c.presence_prob * _erf_scaled(m.mean_range, m.range_stddev) / 2.0 + lam_expected


def cumulative_decay_integral(p: DecayParams, horizon: float) -> float:
    """Integral over [0, horizon] of the decay value seen up to each time."""
    lam = invert_rate(p.rate1) + invert_rate(p.rate2)
    scale = p.initial_energy / p.app_count
    if lam == 0.0:
        return scale * horizon * horizon / 2.0
    return scale * (horizon + math.expm1(-lam * horizon) / lam) / lam


def pre_decay_check(
    decay: DecayParams,
    heston: HestonParams,
    lam1: float,
    tau: float,
    omega: float,
    expected_request_change: float = 0.0,
) -> bool:
    """Pre-energy-decay rule: True means change the head ahead of shortfall.

    The expected consumption drift accumulated up to one slot before the
    horizon is compared (strictly) against twice the general-rate share of
    the decay closed form plus the deviation allowance.
    """
    if omega >= tau:
        raise ValueError("slot must be smaller than the horizon")
    window = tau - omega
    lhs = heston.request_rate * cumulative_decay_integral(decay, window) + (
        heston.excess_energy_ratio
        * math.sqrt(heston.energy_stddev)
        * expected_request_change
        * window
    )
    rhs = 2.0 * lam1 * energy_decay(decay_params_at(decay, window)) + (
        2.0
        * lam1
        * heston.excess_energy_ratio
        * math.sqrt(decay.rate1.stddev * decay.rate2.stddev)
        * window
    )
    return lhs < rhs


@dataclass(frozen=True)
class Candidate:
    """A vehicle eligible for head duty within its cluster."""

    vehicle_id: int
    energy_rating: float
    radio_range: float
    tx_limit: float | None = None
    critical: bool = False


@dataclass(frozen=True)
class OstObservation:
    observed: float
    expected: float
    upper_tx_limit: float | None
    time: float

    def __post_init__(self):
        if not (math.isfinite(self.observed) and math.isfinite(self.expected)):
            raise ValueError("scores must be finite")
        if self.upper_tx_limit is not None and self.upper_tx_limit < 0:
            raise ValueError("upper_tx_limit must be >= 0")


@dataclass(frozen=True)
class ChDecision:
    action: str
    new_ch: int | None
    offload_slot: float
    rule_used: str

    def __post_init__(self):
        if self.action == ACTION_CHANGE and self.new_ch is None:
            raise ValueError("a change decision must name the new head")
        if self.offload_slot < 0:
            raise ValueError("offload_slot must be >= 0")


@dataclass(frozen=True)
class ControllerConfig:
    slot: float
    horizon: float
    expected_rate: float = 0.0
    heston_variance_negligible: bool = True
    # Constant override for the expected score; defaults to ost_threshold.
    expected_score: float | None = None

    def __post_init__(self):
        if self.slot <= 0 or self.slot > self.horizon:
            raise ValueError("slot must satisfy 0 < slot <= horizon")


def _pick(candidates: list[Candidate]) -> Candidate:
    return min(candidates, key=lambda c: (-c.energy_rating, c.vehicle_id))


def _split(
    eligible: list[Candidate],
    transfer_scores: Mapping[int, float] | None,
    offload: float,
) -> ChDecision:
    best_range = max(c.radio_range for c in eligible)
    leaders = [c for c in eligible if c.radio_range == best_range]
    if len(leaders) == 1:
        return ChDecision(ACTION_SPLIT_RANGE, leaders[0].vehicle_id, offload, RULE_LIMIT)
    if transfer_scores:
        lead = min(
            leaders,
            key=lambda c: (-transfer_scores.get(c.vehicle_id, 0.0), c.vehicle_id),
        )
    else:
        lead = min(leaders, key=lambda c: c.vehicle_id)
    return ChDecision(ACTION_SPLIT_TRANSFER, lead.vehicle_id, offload, RULE_LIMIT)


def decide(
    obs: OstObservation,
    cfg: ControllerConfig,
    candidates: list[Candidate],
    *,
    required_tx_limit: float | None = None,
    connect_range: float | None = None,
    transfer_scores: Mapping[int, float] | None = None,
    pre_decay: bool = False,
) -> ChDecision:
    """Pure decision for one cluster at one slot (see module cascade)."""
    eligible = [c for c in candidates if not c.critical]
    offload = max(obs.time - cfg.slot, 0.0)

    if obs.observed < obs.expected:
        if not eligible:
            raise ValueError("change indicated but no candidate set and no split data")
        return ChDecision(ACTION_CHANGE, _pick(eligible).vehicle_id, offload, RULE_OST)

    limit_known = required_tx_limit is not None and obs.upper_tx_limit is not None
    if not limit_known:
        if obs.observed == obs.expected:
            # Tie with no capacity data: the pre-decay rule settles it.
            if pre_decay:
                if not eligible:
                    raise ValueError(
                        "change indicated but no candidate set and no split data"
                    )
                return ChDecision(
                    ACTION_CHANGE, _pick(eligible).vehicle_id, offload, RULE_PRE_DECAY
                )
            return ChDecision(ACTION_KEEP, None, 0.0, RULE_PRE_DECAY)
        return ChDecision(ACTION_KEEP, None, 0.0, RULE_OST)

    if obs.upper_tx_limit >= required_tx_limit:
        return ChDecision(ACTION_KEEP, None, 0.0, RULE_OST)

    qualified = [
        c
        for c in eligible
        if c.tx_limit is not None
        and c.tx_limit >= required_tx_limit
        and (connect_range is None or connect_range <= c.radio_range)
    ]
    if qualified:
        return ChDecision(ACTION_CHANGE, _pick(qualified).vehicle_id, offload, RULE_LIMIT)
    if not eligible:
        raise ValueError("change indicated but no candidate set and no split data")
    return _split(eligible, transfer_scores, offload)


@dataclass(frozen=True)
class TraceRow:
    slot: int
    cluster: int
    rule_used: str
    action: str
    old_ch: int
    new_ch: int | None
    offload_slot: float


@dataclass
class FleetState:
    """Mutable view of the fleet the controller steps over.

    `vehicles` are objects exposing id/cluster/role/residual_energy/
    radio_range/tx_limit/critical/active attributes (the simulator's
    VehicleState satisfies this). Scores come from `score_schedule` (per
    slot index), then `score_default`, then the stopping score computed
    from the mobility model and `lam1`.
    """

    vehicles: list
    mobility: MobilityModel
    connectivity: ConnectivityParams
    lam1: float = 0.0
    decay: DecayParams | None = None
    heston: HestonParams | None = None
    score_schedule: Mapping[int, float] | None = None
    score_default: float | None = None
    required_tx_limit: float | None = None
    expected_request_change: float = 0.0
    slot_decay_estimate: float = field(init=False, default=0.0)

    def __post_init__(self):
        self._by_cluster: dict[int, list] = {}
        for v in self.vehicles:
            self._by_cluster.setdefault(v.cluster, []).append(v)
        for members in self._by_cluster.values():
            members.sort(key=lambda v: v.id)

    def clusters(self) -> list[int]:
        return sorted(self._by_cluster)

    def members(self, cluster: int) -> list:
        return self._by_cluster[cluster]

    def head(self, cluster: int):
        for v in self._by_cluster[cluster]:
            if v.role == "ch":
                return v
        return None

    def rating(self, vehicle) -> float:
        if self.slot_decay_estimate > 0:
            return vehicle.residual_energy / self.slot_decay_estimate
        return vehicle.residual_energy


def _observed_score(fleet: FleetState, slot_index: int) -> float:
    if fleet.score_schedule and slot_index in fleet.score_schedule:
        return fleet.score_schedule[slot_index]
    if fleet.score_default is not None:
        return fleet.score_default
    return ost_score(fleet.mobility, fleet.connectivity, fleet.lam1)


def evaluate_slot(
    fleet: FleetState, cfg: ControllerConfig, slot_index: int
) -> list[TraceRow]:
    """Run the decision cascade for every cluster at one slot.

    Applies head changes to the fleet in place and returns the trace rows.
    A dead or critical head is replaced ahead of the cascade when any
    non-critical candidate exists (energy-driven handover).
    """
    t = slot_index * cfg.slot
    threshold = (
        cfg.expected_score
        if cfg.expected_score is not None
        else ost_threshold(fleet.mobility, fleet.connectivity, cfg.expected_rate)
    )
    observed = _observed_score(fleet, slot_index)
    pre = False
    if fleet.decay is not None and fleet.heston is not None and cfg.slot < cfg.horizon:
        pre = pre_decay_check(
            fleet.decay,
            fleet.heston,
            fleet.lam1,
            cfg.horizon,
            cfg.slot,
            fleet.expected_request_change,
        )

    rows: list[TraceRow] = []
    for cluster in fleet.clusters():
        head = fleet.head(cluster)
        if head is None:
            continue
        candidates = [
            Candidate(v.id, fleet.rating(v), v.radio_range, v.tx_limit, v.critical)
            for v in fleet.members(cluster)
            if v is not head and v.active
        ]
        if not candidates:
            continue

        if not head.active or head.critical:
            non_critical = [c for c in candidates if not c.critical]
            if non_critical:
                new_id = _pick(non_critical).vehicle_id
                rows.append(
                    TraceRow(
                        slot_index,
                        cluster,
                        RULE_PRE_DECAY,
                        ACTION_CHANGE,
                        head.id,
                        new_id,
                        max(t - cfg.slot, 0.0),
                    )
                )
                _apply_change(fleet, cluster, new_id)
            continue

        obs = OstObservation(
            observed=observed,
            expected=threshold,
            upper_tx_limit=head.tx_limit,
            time=t,
        )
        decision = decide(
            obs,
            cfg,
            candidates,
            required_tx_limit=fleet.required_tx_limit,
            connect_range=fleet.mobility.connect_range,
            pre_decay=pre,
        )
        rows.append(
            TraceRow(
                slot_index,
                cluster,
                decision.rule_used,
                decision.action,
                head.id,
                decision.new_ch,
                decision.offload_slot,
            )
        )
        if decision.action == ACTION_CHANGE:
            _apply_change(fleet, cluster, decision.new_ch)
    return rows


def _apply_change(fleet: FleetState, cluster: int, new_id: int) -> None:
    for v in fleet.members(cluster):
        v.role = "ch" if v.id == new_id else "member"


def run_controller(fleet: FleetState, cfg: ControllerConfig) -> list[TraceRow]:
    """Iterate the decision cascade over every slot up to the horizon."""
    if fleet.decay is not None:
        fleet.slot_decay_estimate = energy_decay(decay_params_at(fleet.decay, cfg.slot))
    rows: list[TraceRow] = []
    n_slots = int(round(cfg.horizon / cfg.slot))
    for slot_index in range(1, n_slots + 1):
        rows.extend(evaluate_slot(fleet, cfg, slot_index))
    return rows

"""Per-vehicle blockchain energy accounting.

The cost model splits a vehicle's expenditure per application into three
parts:

* a fixed security charge (lightweight cryptographic checks),
* transmission energy ``hops * sum_j(per_request_energy * request_rate)_j``
  over the configured message kinds (send / receive / acknowledgement, ...),
* ledger-update energy ``hops * records_per_tx * per_record_energy``.

Between accounting slots the drift of consumption is tracked by a
stochastic-volatility (Heston-style) differential

    dB/dt = lam * (B(t) - B(0)) + eps * sqrt(sigma) * dB'/dt,

integrated with explicit Euler steps; the request-change term ``dB'/dt`` is
realised as a configured rate scaled by a caller-supplied unit-normal draw.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


def _check_nonneg(value: float, name: str) -> None:
    if not math.isfinite(value) or value < 0:
        raise ValueError(f"{name} must be finite and >= 0, got {value!r}")


@dataclass(frozen=True)
class EnergyParams:
    """Energy constants of one vehicle running `app_count` blockchain apps.

    `per_kind_cost` optionally overrides the uniform per-message-kind term
    with explicit ``per_request_energy * request_rate`` products, one per
    message kind.
    """

    per_record_energy: float
    per_request_energy: float
    hop_count: int
    message_kinds: int
    request_rate: float
    records_per_tx: int
    security_cost: float
    app_count: int
    per_kind_cost: tuple[float, ...] | None = None

    def __post_init__(self):
        _check_nonneg(self.per_record_energy, "per_record_energy")
        _check_nonneg(self.per_request_energy, "per_request_energy")
        _check_nonneg(self.request_rate, "request_rate")
        _check_nonneg(self.security_cost, "security_cost")
        for name in ("hop_count", "message_kinds", "records_per_tx", "app_count"):
            value = getattr(self, name)
            if not isinstance(value, int):
                raise ValueError(f"{name} must be an integer, got {value!r}")
        if self.hop_count < 0 or self.records_per_tx < 0:
            raise ValueError("hop_count and records_per_tx must be >= 0")
        if self.message_kinds < 1 or self.app_count < 1:
            raise ValueError("message_kinds and app_count must be >= 1")
        if self.per_kind_cost is not None:
            if len(self.per_kind_cost) != self.message_kinds:
                raise ValueError("per_kind_cost must have one entry per message kind")
            for c in self.per_kind_cost:
                _check_nonneg(c, "per_kind_cost entry")


@dataclass(frozen=True)
class HestonParams:
    """Parameters of the consumption-drift differential."""

    request_rate: float
    excess_energy_ratio: float
    energy_stddev: float
    request_change_rate: float = 0.0

    def __post_init__(self):
        _check_nonneg(self.request_rate, "request_rate")
        _check_nonneg(self.excess_energy_ratio, "excess_energy_ratio")
        _check_nonneg(self.energy_stddev, "energy_stddev")


@dataclass(frozen=True)
class EnergyLedger:
    """Residual-energy track of one vehicle.

    `initial` is the starting budget, `current` the running value, and
    `history` the sampled (time, joules) trajectory. Consumption and budget
    are kept distinct: `consumed` is always `initial - current`.
    """

    initial: float
    current: float
    history: tuple[tuple[float, float], ...]

    @classmethod
    def start(cls, initial: float) -> "EnergyLedger":
        _check_nonneg(initial, "initial")
        return cls(initial=initial, current=initial, history=((0.0, initial),))

    @property
    def consumed(self) -> float:
        return self.initial - self.current


def ledger_update_energy(p: EnergyParams) -> float:
    """Energy of one blockchain-update (ledger write) operation."""
    return p.hop_count * (p.records_per_tx * p.per_record_energy)


def transmission_energy(p: EnergyParams) -> float:
    """Energy of the transmission procedures across all message kinds."""
    if p.per_kind_cost is not None:
        per_kind = sum(p.per_kind_cost)
    else:
        per_kind = p.message_kinds * p.per_request_energy * p.request_rate
    return p.hop_count * per_kind


def total_blockchain_energy(p: EnergyParams) -> float:
    """Total energy consumed across all applications of one vehicle."""
    return p.app_count * (
        p.security_cost + transmission_energy(p) + ledger_update_energy(p)
    )


def heston_step(
    ledger: EnergyLedger, hp: HestonParams, dt: float, noise: float
) -> EnergyLedger:
    """Advance the ledger by one explicit Euler step of the drift model.

    `noise` is a unit-normal sample supplied by the caller (the ledger owns
    no RNG); it scales `request_change_rate` to realise the stochastic
    request-change term. Non-finite noise is rejected.
    """
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt!r}")
    if not math.isfinite(noise):
        raise ValueError(f"noise must be finite, got {noise!r}")
    drift = hp.request_rate * (ledger.current - ledger.initial)
    diffusion = (
        hp.excess_energy_ratio
        * math.sqrt(hp.energy_stddev)
        * hp.request_change_rate
        * noise
    )
    new_current = ledger.current + dt * (drift + diffusion)
    t_next = ledger.history[-1][0] + dt
    return EnergyLedger(
        initial=ledger.initial,
        current=new_current,
        history=ledger.history + ((t_next, new_current),),
    )

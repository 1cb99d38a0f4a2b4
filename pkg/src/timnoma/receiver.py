"""Two-stage decoding: projection onto the group precoder, then SIC.

Stage 1 multiplies the received T-vector by the group's precoding vector
(plain transpose, the basis is real), which cancels every other group's
contribution exactly and leaves white noise of unchanged variance.

Stage 2 runs successive interference cancellation inside the group: the
receiver detects and subtracts the same-group signals that rank after it in
the decoding order, iterating in descending transmit power (the strongest
uncancelled signal is always detected first), then detects its own symbol.
Same-group signals ranked before the receiver are absorbed as noise. All
detections are per-symbol maximum likelihood over the QPSK points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .modem import CONSTELLATION
from .precoding import PrecodingBasis
from .topology import GroupAssignment, PowerAllocation


@dataclass(frozen=True)
class ProjectedSignal:
    """Post-projection scalar signal per block plus the receiver's own
    effective channel g = sqrt(gamma) * h."""

    value: np.ndarray | complex
    effective_channel: np.ndarray | complex


@dataclass(frozen=True)
class SicPlan:
    """Decoding order and the per-receiver cancel/noise split.

    ``cancel_sets[k]`` holds the same-group users ranked after user k in the
    order, already arranged in cancellation sequence (descending transmit
    power, i.e. descending user index). ``noise_sets[k]`` holds the
    same-group users ranked before k; they are never cancelled.
    """

    order: tuple[int, ...]
    cancel_sets: tuple[tuple[int, ...], ...]
    noise_sets: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class SicResult:
    """Outcome of one SIC chain: the receiver's own symbol estimate, the
    final residual it was detected from, and the (user, estimate) pairs
    subtracted along the way."""

    estimate: np.ndarray | complex
    residual: np.ndarray | complex
    cancelled: tuple[tuple[int, np.ndarray | complex], ...]


def project(received: np.ndarray, basis: PrecodingBasis, group: int) -> np.ndarray | complex:
    """Project the received T-vector(s) onto the group's precoding vector.

    ``received`` has shape (T,) or (T, S); the result is a complex scalar or
    an (S,) array. Other groups' signals cancel exactly by orthonormality.
    """
    received = np.asarray(received)
    if received.shape[0] != basis.group_count:
        raise ValidationError(
            f"received vector has {received.shape[0]} slots, basis expects {basis.group_count}"
        )
    out = basis.vectors[group] @ received
    return complex(out) if out.ndim == 0 else out


def decoding_order(gains) -> tuple[int, ...]:
    """Users sorted by decreasing effective gain, ties broken by index."""
    gains = np.asarray(gains, dtype=float)
    return tuple(sorted(range(len(gains)), key=lambda k: (-gains[k], k)))


def build_sic_plan(order, groups: GroupAssignment) -> SicPlan:
    """Derive each receiver's cancel and noise sets from a decoding order."""
    order = tuple(order)
    position = {user: rank for rank, user in enumerate(order)}
    cancel_sets = []
    noise_sets = []
    for user in range(len(order)):
        members = groups.members[groups.group_of[user]]
        after = [j for j in members if position[j] > position[user]]
        before = [j for j in members if position[j] < position[user]]
        # strongest transmit power first; power rises with user index
        cancel_sets.append(tuple(sorted(after, reverse=True)))
        noise_sets.append(tuple(sorted(before)))
    return SicPlan(order, tuple(cancel_sets), tuple(noise_sets))


def ml_detect(residual, effective_channel, amplitude: float):
    """Per-symbol ML detection against the scaled QPSK constellation.

    Minimizes |residual - effective_channel * amplitude * s|^2 over the four
    points; ties resolve to the earliest point in constellation order.
    Vectorized: ``residual`` (and a matching ``effective_channel``) may be
    arrays, in which case an array of decisions is returned.
    """
    if not amplitude > 0:
        raise ValidationError("amplitude must be positive")
    residual = np.asarray(residual)
    scale = np.asarray(effective_channel) * amplitude
    points = CONSTELLATION.reshape((4,) + (1,) * residual.ndim)
    metrics = np.abs(residual[np.newaxis, ...] - scale[np.newaxis, ...] * points) ** 2
    decided = CONSTELLATION[np.argmin(metrics, axis=0)]
    return complex(decided) if decided.ndim == 0 else decided


def sic_decode(
    user: int,
    projected: ProjectedSignal,
    plan: SicPlan,
    power: PowerAllocation,
    genie_symbols=None,
) -> SicResult:
    """Run the receiver's SIC chain and detect its own symbol.

    Every user in the receiver's cancel set is detected from the running
    residual and its reconstructed contribution g * sqrt(P_j) * estimate is
    subtracted; detection errors propagate exactly as they would in a real
    chain. If ``genie_symbols`` (indexable by user) is given, the true
    symbols are subtracted instead of detected ones, which isolates the
    receiver's own detection from propagation effects.
    """
    channel = projected.effective_channel
    residual = np.asarray(projected.value, dtype=np.complex128)
    cancelled = []
    for j in plan.cancel_sets[user]:
        amp = math.sqrt(power.per_user[j])
        if genie_symbols is not None:
            estimate = genie_symbols[j]
        else:
            estimate = ml_detect(residual, channel, amp)
        residual = residual - channel * amp * estimate
        cancelled.append((j, estimate))
    estimate = ml_detect(residual, channel, math.sqrt(power.per_user[user]))
    if residual.ndim == 0:
        residual = complex(residual)
    return SicResult(estimate, residual, tuple(cancelled))


def sic_decode_per_block(
    user: int,
    projected: ProjectedSignal,
    block_gains: np.ndarray,
    groups: GroupAssignment,
    power: PowerAllocation,
):
    """SIC with the decoding order recomputed block by block.

    ``block_gains`` has shape (K, S) (or (K,) for a single block) and holds
    the instantaneous noise-normalized gains that define the order. A
    same-group user j lands in the cancel set of the blocks where it ranks
    after ``user`` (smaller gain, ties to the larger index); reconstruction
    is subtracted only on those blocks. The sweep still runs in descending
    transmit power. Returns the receiver's own symbol estimates.
    """
    channel = projected.effective_channel
    residual = np.asarray(projected.value, dtype=np.complex128)
    gains = np.asarray(block_gains, dtype=float)
    own_gain = gains[user]
    members = groups.members[groups.group_of[user]]
    for j in sorted((m for m in members if m != user), reverse=True):
        ranks_after = (gains[j] < own_gain) | ((gains[j] == own_gain) & (j > user))
        if not np.any(ranks_after):
            continue
        amp = math.sqrt(power.per_user[j])
        estimate = ml_detect(residual, channel, amp)
        residual = np.where(ranks_after, residual - channel * amp * estimate, residual)
    estimate = ml_detect(residual, channel, math.sqrt(power.per_user[user]))
    return estimate

"""Stack-to-notch misalignment and its effect on sense margins.

A lateral offset between the MgO/fixed stack and the free-layer notches only
touches the window ends: the edge structures on the trailing side lose
coverage (conductance falls with covered length, a fully uncovered half-wall
stops conducting), and the stack overhangs the neighbor domain on the other
side, adding one parallel segment whose polarity is an assumption, not
stored data. Interior domains never notice.

Deterministic offsets and seeded Monte Carlo share one evaluation engine
that is vectorized over offsets; per-sample arithmetic is elementwise, so
results are bit-identical no matter how samples are chunked across workers.
"""

from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .characterization import (
    Characterization,
    DeviceGeometry,
    Polarity,
    SegmentKind,
    SegmentResistanceTable,
    domain_kind,
    scaled_resistance,
)
from .errors import DomainCountTooLarge, OffsetOutOfRange
from .margins import enumerate_levels
from .network import BitPattern, BorderCondition, Decomposition, decompose

# characterized misalignment budget: 5.5 nm treated as six standard deviations
SIGMA_DEFAULT = 5.5e-9 / 6.0

VARIATION_LIMIT = 12

_KINDS = tuple(SegmentKind)
_KIND_INDEX = {kind: i for i, kind in enumerate(_KINDS)}


class NeighborAssumption(enum.Enum):
    """Assumed bit of the out-of-window domain an overhang exposes."""

    ZERO = "0"
    ONE = "1"
    WORST = "worst"

    @classmethod
    def parse(cls, text: str) -> "NeighborAssumption":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ValueError(
                f"neighbor assumption must be 0, 1 or worst, got {text!r}"
            ) from None

    @property
    def bits(self) -> tuple[int, ...]:
        if self is NeighborAssumption.ZERO:
            return (0,)
        if self is NeighborAssumption.ONE:
            return (1,)
        return (0, 1)


@dataclass(frozen=True)
class MisalignmentSpec:
    """Signed stack offset (positive = toward +X, the right) plus neighbor
    assumptions for whichever side the overhang exposes."""

    offset: float  # meters
    left_neighbor: NeighborAssumption = NeighborAssumption.WORST
    right_neighbor: NeighborAssumption = NeighborAssumption.WORST


def _check_offset(offset: float, geometry: DeviceGeometry) -> None:
    if abs(offset) > geometry.notch_length:
        raise OffsetOutOfRange(
            f"offset {offset * 1e9:.3f} nm exceeds one notch length"
            f" ({geometry.notch_length * 1e9:.3f} nm); the coverage model"
            " is not valid beyond that"
        )


@dataclass(frozen=True)
class PartialSegment:
    kind: SegmentKind
    covered_length: float  # meters


@dataclass(frozen=True)
class PerturbedDecomposition:
    """A decomposition with edge coverage losses and an optional overhang.

    ``full_segments`` keeps canonical kind order with the affected edge
    structures removed; they reappear in ``partial_segments`` (edge domain,
    then edge half-wall if still covered, then overhang). A fully uncovered
    half-wall is simply gone.
    """

    base: Decomposition
    offset: float
    overhang_bit: int | None
    full_segments: tuple[tuple[SegmentKind, int], ...]
    partial_segments: tuple[PartialSegment, ...]


def _concrete_bit(assumption: NeighborAssumption) -> int:
    if assumption is NeighborAssumption.WORST:
        raise ValueError(
            "worst-case neighbors resolve at the report level; pass 0 or 1 here"
        )
    return 0 if assumption is NeighborAssumption.ZERO else 1


def apply_misalignment(
    pattern: BitPattern | str,
    borders: BorderCondition,
    spec: MisalignmentSpec,
    geometry: DeviceGeometry,
) -> PerturbedDecomposition:
    """Shift the stack by ``spec.offset`` over one pattern.

    A positive offset uncovers the left edge structures and overhangs the
    right neighbor; a negative offset mirrors that. Zero offset returns the
    nominal decomposition unchanged.
    """
    if isinstance(pattern, str):
        pattern = BitPattern.parse(pattern)
    _check_offset(spec.offset, geometry)
    base = decompose(pattern, borders)
    if spec.offset == 0.0:
        return PerturbedDecomposition(base, 0.0, None, base.segments, ())

    magnitude = abs(spec.offset)
    if spec.offset > 0:
        edge_domain = base.domain_kinds[0]
        edge_half = base.left_half_wall
        neighbor = _concrete_bit(spec.right_neighbor)
    else:
        edge_domain = base.domain_kinds[-1]
        edge_half = base.right_half_wall
        neighbor = _concrete_bit(spec.left_neighbor)

    removed = {edge_domain: 1}
    if edge_half is not None:
        removed[edge_half] = removed.get(edge_half, 0) + 1
    full = tuple(
        (kind, count - removed.get(kind, 0))
        for kind, count in base.segments
        if count - removed.get(kind, 0) > 0
    )

    partials = [PartialSegment(edge_domain, geometry.nominal_length(edge_domain) - magnitude)]
    if edge_half is not None:
        covered = geometry.nominal_length(edge_half) - magnitude
        if covered > 0:
            partials.append(PartialSegment(edge_half, covered))
    partials.append(
        PartialSegment(domain_kind(Polarity.from_bit(neighbor), 0), magnitude)
    )
    return PerturbedDecomposition(
        base=base,
        offset=spec.offset,
        overhang_bit=neighbor,
        full_segments=full,
        partial_segments=tuple(partials),
    )


def perturbed_resistance(
    perturbed: PerturbedDecomposition,
    table: SegmentResistanceTable,
    geometry: DeviceGeometry,
) -> float:
    """Parallel resistance of a perturbed bank; full segments first in kind
    order, then partials in their listed order."""
    g = 0.0
    for kind, count in perturbed.full_segments:
        g += count / table.ohms(kind)
    for seg in perturbed.partial_segments:
        g += 1.0 / scaled_resistance(seg.kind, seg.covered_length, table, geometry)
    return 1.0 / g


# --- vectorized margin engine ------------------------------------------------


def _check_variation_domains(domains: int) -> None:
    if domains < 1:
        raise ValueError(f"need at least 1 domain, got {domains}")
    if domains > VARIATION_LIMIT:
        raise DomainCountTooLarge(
            f"variation analysis enumerates raw patterns and stops at"
            f" {VARIATION_LIMIT} domains, got {domains}"
        )


def _side_min_margins(
    domains: int,
    borders: BorderCondition,
    magnitudes: np.ndarray,
    uncover_left: bool,
    neighbor_bits: tuple[int, ...],
    char: Characterization,
) -> np.ndarray:
    """Min margin per offset magnitude, one uncovered side.

    Per-element arithmetic mirrors perturbed_resistance exactly: base
    conductance over the adjusted counts in kind order, then edge domain,
    edge half-wall, overhang. Cluster extremes take min/max over every
    pattern and every assumed neighbor bit.
    """
    table = char.table
    geometry = char.geometry
    ohms = [table.ohms(kind) for kind in _KINDS]
    nominal = [geometry.nominal_length(kind) for kind in _KINDS]
    half_nominal = geometry.notch_length / 2

    n_patterns = 2**domains
    m = magnitudes.shape[0]
    cluster_min = np.full((domains + 1, m), np.inf)
    cluster_max = np.full((domains + 1, m), -np.inf)

    for value in range(n_patterns):
        bits = format(value, f"0{domains}b")
        deco = decompose(BitPattern.parse(bits), borders)
        counts = [0] * len(_KINDS)
        for kind, count in deco.segments:
            counts[_KIND_INDEX[kind]] = count
        if uncover_left:
            edge = _KIND_INDEX[deco.domain_kinds[0]]
            half = _KIND_INDEX[deco.left_half_wall] if deco.left_half_wall else -1
        else:
            edge = _KIND_INDEX[deco.domain_kinds[-1]]
            half = _KIND_INDEX[deco.right_half_wall] if deco.right_half_wall else -1
        adjusted = list(counts)
        adjusted[edge] -= 1
        if half >= 0:
            adjusted[half] -= 1

        weight = bits.count("1")
        for neighbor in neighbor_bits:
            g = np.zeros(m)
            for k, count in enumerate(adjusted):
                if count:
                    g = g + count / ohms[k]
            covered = nominal[edge] - magnitudes
            g = g + 1.0 / (ohms[edge] * (nominal[edge] / covered))
            if half >= 0:
                covered_half = half_nominal - magnitudes
                mask = covered_half > 0.0
                if mask.any():
                    g[mask] += 1.0 / (ohms[half] * (half_nominal / covered_half[mask]))
            over = _KIND_INDEX[domain_kind(Polarity.from_bit(neighbor), 0)]
            g = g + 1.0 / (ohms[over] * (nominal[over] / magnitudes))
            resistance = 1.0 / g
            np.minimum(cluster_min[weight], resistance, out=cluster_min[weight])
            np.maximum(cluster_max[weight], resistance, out=cluster_max[weight])

    current = char.drive.read_current(domains, geometry)
    margins = np.stack(
        [
            current * cluster_min[w + 1] - current * cluster_max[w]
            for w in range(domains)
        ]
    )
    return np.min(margins, axis=0)


def min_margins_for_offsets(
    domains: int,
    borders: BorderCondition,
    offsets: np.ndarray,
    left_neighbor: NeighborAssumption,
    right_neighbor: NeighborAssumption,
    char: Characterization,
) -> np.ndarray:
    """Minimum sense margin (volts) for each signed offset (meters)."""
    _check_variation_domains(domains)
    offsets = np.asarray(offsets, dtype=float)
    if offsets.size and float(np.max(np.abs(offsets))) > char.geometry.notch_length:
        worst = float(offsets[np.argmax(np.abs(offsets))])
        _check_offset(worst, char.geometry)
    out = np.empty(offsets.shape)
    zero = offsets == 0.0
    if zero.any():
        out[zero] = enumerate_levels(domains, borders, char).min_margin
    positive = offsets > 0.0
    if positive.any():
        out[positive] = _side_min_margins(
            domains, borders, offsets[positive], True, right_neighbor.bits, char
        )
    negative = offsets < 0.0
    if negative.any():
        out[negative] = _side_min_margins(
            domains, borders, -offsets[negative], False, left_neighbor.bits, char
        )
    return out


@dataclass(frozen=True)
class OffsetReport:
    """Deterministic-offset margin report; voltages in volts."""

    domains: int
    borders: BorderCondition
    offset: float
    left_neighbor: NeighborAssumption
    right_neighbor: NeighborAssumption
    nominal_min_margin: float
    perturbed_min_margin: float
    margin_deviation: float


def offset_margin_report(
    domains: int,
    borders: BorderCondition,
    spec: MisalignmentSpec,
    char: Characterization,
) -> OffsetReport:
    """Every pattern re-evaluated under one fixed offset."""
    _check_variation_domains(domains)
    _check_offset(spec.offset, char.geometry)
    values = min_margins_for_offsets(
        domains,
        borders,
        np.array([0.0, spec.offset]),
        spec.left_neighbor,
        spec.right_neighbor,
        char,
    )
    nominal = float(values[0])
    perturbed = float(values[1])
    return OffsetReport(
        domains=domains,
        borders=borders,
        offset=spec.offset,
        left_neighbor=spec.left_neighbor,
        right_neighbor=spec.right_neighbor,
        nominal_min_margin=nominal,
        perturbed_min_margin=perturbed,
        margin_deviation=nominal - perturbed,
    )


# --- Monte Carlo --------------------------------------------------------------


@dataclass(frozen=True)
class MonteCarloSpec:
    samples: int
    seed: int
    sigma: float = SIGMA_DEFAULT  # meters
    truncation: float = 6.0  # in sigmas

    def validate(self) -> None:
        if self.samples < 1:
            raise ValueError(f"sample count must be >= 1, got {self.samples}")
        if self.seed < 0:
            raise ValueError(f"seed must be a non-negative integer, got {self.seed}")
        if self.sigma <= 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if self.truncation <= 0:
            raise ValueError(f"truncation must be positive, got {self.truncation}")


def _sample_offset(seed: int, index: int, sigma: float, truncation: float) -> float:
    # one generator per sample, derived from (seed, index), so any chunking
    # across workers sees the same stream
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, index))))
    z = rng.standard_normal()
    while abs(z) > truncation:
        z = rng.standard_normal()
    return float(z * sigma)


def sample_offsets(spec: MonteCarloSpec, start: int = 0, stop: int | None = None) -> np.ndarray:
    """Truncated-normal offsets for sample indices [start, stop)."""
    if stop is None:
        stop = spec.samples
    return np.array(
        [
            _sample_offset(spec.seed, i, spec.sigma, spec.truncation)
            for i in range(start, stop)
        ]
    )


@dataclass(frozen=True)
class MonteCarloReport:
    """Margin distribution under random misalignment; volts and meters."""

    domains: int
    borders: BorderCondition
    spec: MonteCarloSpec
    left_neighbor: NeighborAssumption
    right_neighbor: NeighborAssumption
    nominal_min_margin: float
    mean_margin: float
    stddev_margin: float
    min_margin: float
    p01_margin: float
    offsets: tuple[float, ...] = field(repr=False)
    margins: tuple[float, ...] = field(repr=False)


def monte_carlo_margins(
    domains: int,
    borders: BorderCondition,
    spec: MonteCarloSpec,
    char: Characterization,
    left_neighbor: NeighborAssumption = NeighborAssumption.WORST,
    right_neighbor: NeighborAssumption = NeighborAssumption.WORST,
    workers: int = 1,
) -> MonteCarloReport:
    """Seeded margin distribution; bit-identical for any worker count."""
    _check_variation_domains(domains)
    spec.validate()
    if workers < 1:
        raise ValueError(f"worker count must be >= 1, got {workers}")

    n = spec.samples
    if workers == 1 or n < 2 * workers:
        offsets = sample_offsets(spec)
        margins = min_margins_for_offsets(
            domains, borders, offsets, left_neighbor, right_neighbor, char
        )
    else:
        bounds = [(n * w) // workers for w in range(workers + 1)]
        ranges = [(bounds[w], bounds[w + 1]) for w in range(workers)]

        def chunk(span: tuple[int, int]) -> tuple[np.ndarray, np.ndarray]:
            part = sample_offsets(spec, span[0], span[1])
            return part, min_margins_for_offsets(
                domains, borders, part, left_neighbor, right_neighbor, char
            )

        with ThreadPoolExecutor(max_workers=workers) as pool:
            pieces = list(pool.map(chunk, ranges))
        offsets = np.concatenate([p[0] for p in pieces])
        margins = np.concatenate([p[1] for p in pieces])

    nominal = enumerate_levels(domains, borders, char).min_margin
    stddev = float(np.std(margins, ddof=1)) if n > 1 else 0.0
    return MonteCarloReport(
        domains=domains,
        borders=borders,
        spec=spec,
        left_neighbor=left_neighbor,
        right_neighbor=right_neighbor,
        nominal_min_margin=nominal,
        mean_margin=float(np.mean(margins)),
        stddev_margin=stddev,
        min_margin=float(np.min(margins)),
        p01_margin=float(np.percentile(margins, 1.0)),
        offsets=tuple(float(x) for x in offsets),
        margins=tuple(float(x) for x in margins),
    )

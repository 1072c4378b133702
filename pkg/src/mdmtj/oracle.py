"""Slow, independent reference paths used to check the production model.

Everything here recomputes from scratch: segment counting works directly on
the bit string, parallel sums are redone in exact rational arithmetic, and
reports come from a raw 2^D loop with no equivalence classes. The only
things shared with the production modules are data (the characterization)
and the report dataclass types, never composition code. The float reference
path follows the same documented summation order (segment kinds in enum
order), because that order is part of the report contract.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .characterization import Characterization, SegmentKind, SegmentResistanceTable
from .errors import DomainCountTooLarge, EmptyNetwork
from .margins import AdjacentMargin, ClassEntry, LevelCluster, MarginReport
from .network import ALL_CONDITIONS, Border, BorderCondition

BRUTE_FORCE_LIMIT = 12

# index layout, fixed by the enum: 0..2 minus-polarity domains by adjacent
# wall count, 3..5 plus-polarity, 6 wall 0->1, 7 wall 1->0, 8..9 half-walls
_N_KINDS = len(SegmentKind)


def rational_parallel_sum(resistances: Sequence[Fraction]) -> Fraction:
    """Exact (sum of reciprocals)^-1; no rounding anywhere."""
    if not resistances:
        raise EmptyNetwork("parallel sum of nothing")
    total = Fraction(0)
    for value in resistances:
        if value <= 0:
            raise ValueError(f"resistances must be positive, got {value}")
        total += 1 / Fraction(value)
    return 1 / total


def segment_counts(bits: str, borders: BorderCondition) -> list[int]:
    """Count mini-resistors for a bit string, recomputed from first rules."""
    n = len(bits)
    counts = [0] * _N_KINDS
    for i in range(n - 1):
        if bits[i] != bits[i + 1]:
            counts[6 if bits[i] == "0" else 7] += 1
    left_differ = borders.left is Border.DIFFER
    right_differ = borders.right is Border.DIFFER
    if left_differ:
        counts[8 + (bits[0] == "1")] += 1
    if right_differ:
        counts[8 + (bits[-1] == "1")] += 1
    for i, ch in enumerate(bits):
        walls = 0
        if i > 0 and bits[i - 1] != ch:
            walls += 1
        if i < n - 1 and bits[i + 1] != ch:
            walls += 1
        if i == 0 and left_differ:
            walls += 1
        if i == n - 1 and right_differ:
            walls += 1
        counts[(3 if ch == "1" else 0) + walls] += 1
    return counts


def reference_resistance(
    bits: str, borders: BorderCondition, table: SegmentResistanceTable
) -> float:
    """Float path: same summation order contract, independent counting."""
    counts = segment_counts(bits, borders)
    g = 0.0
    for index, kind in enumerate(SegmentKind):
        if counts[index]:
            g += counts[index] / table.ohms(kind)
    return 1.0 / g


def rational_pattern_resistance(
    bits: str, borders: BorderCondition, table: SegmentResistanceTable
) -> Fraction:
    counts = segment_counts(bits, borders)
    flat: list[Fraction] = []
    for index, kind in enumerate(SegmentKind):
        flat.extend([table.exact(kind)] * counts[index])
    return rational_parallel_sum(flat)


def _canonical_key(counts: Sequence[int]) -> tuple:
    walls = sorted((counts[6], counts[7]))
    return tuple(counts[:6]) + tuple(counts[8:]) + (tuple(walls),)


def brute_force_report(
    domains: int, borders: BorderCondition, char: Characterization
) -> MarginReport:
    """Raw 2^D enumeration assembled into the production report shape."""
    if domains > BRUTE_FORCE_LIMIT:
        raise DomainCountTooLarge(
            f"brute force stops at {BRUTE_FORCE_LIMIT} domains, got {domains}"
        )
    if domains < 1:
        raise ValueError(f"need at least 1 domain, got {domains}")
    geometry = char.geometry
    current = (
        char.drive.current_density
        * domains
        * (geometry.domain_length * geometry.track_width)
    )
    table = char.table

    by_weight_res: list[list[float]] = [[] for _ in range(domains + 1)]
    by_weight_count = [0] * (domains + 1)
    groups: dict[tuple, dict] = {}
    for value in range(2**domains):
        bits = format(value, f"0{domains}b")
        weight = bits.count("1")
        resistance = reference_resistance(bits, borders, table)
        by_weight_res[weight].append(resistance)
        by_weight_count[weight] += 1
        key = (weight,) + _canonical_key(segment_counts(bits, borders))
        group = groups.get(key)
        if group is None:
            groups[key] = {"rep": bits, "res": resistance, "count": 1, "weight": weight}
        else:
            group["count"] += 1
            if bits < group["rep"]:
                group["rep"] = bits
                group["res"] = resistance

    classes_by_weight: list[list[ClassEntry]] = [[] for _ in range(domains + 1)]
    for group in groups.values():
        classes_by_weight[group["weight"]].append(
            ClassEntry(
                representative=group["rep"],
                multiplicity=group["count"],
                resistance=group["res"],
                voltage=current * group["res"],
            )
        )

    clusters = []
    for weight in range(domains + 1):
        values = by_weight_res[weight]
        low, high = min(values), max(values)
        clusters.append(
            LevelCluster(
                weight=weight,
                pattern_count=by_weight_count[weight],
                min_resistance=low,
                max_resistance=high,
                min_voltage=current * low,
                max_voltage=current * high,
                classes=tuple(
                    sorted(
                        classes_by_weight[weight],
                        key=lambda c: (c.resistance, c.representative),
                    )
                ),
            )
        )

    margins = []
    for weight in range(domains):
        margins.append(
            AdjacentMargin(
                weight_low=weight,
                weight_high=weight + 1,
                r_low_max=clusters[weight].max_resistance,
                r_high_min=clusters[weight + 1].min_resistance,
                margin=clusters[weight + 1].min_voltage - clusters[weight].max_voltage,
            )
        )
    best = margins[0]
    for entry in margins[1:]:
        if entry.margin < best.margin:
            best = entry
    return MarginReport(
        domains=domains,
        borders=borders,
        read_current=current,
        clusters=tuple(clusters),
        adjacent_margins=tuple(margins),
        min_margin=best.margin,
        min_margin_pair=(best.weight_low, best.weight_high),
        distinguishable_levels=1 + sum(1 for m in margins if m.margin > 0.0),
    )


def distinct_resistance_classes(
    domains: int, borders: BorderCondition, char: Characterization
) -> int:
    """Number of canonical equivalence classes seen by brute force."""
    report = brute_force_report(domains, borders, char)
    return sum(len(cluster.classes) for cluster in report.clusters)


def worst_case_brute_force(domains: int, char: Characterization) -> MarginReport:
    """Raw-loop counterpart of the worst-over-conventions report.

    Cluster extremes are taken over every pattern under every border
    condition; class listings stay empty, matching the production shape.
    """
    if domains > BRUTE_FORCE_LIMIT:
        raise DomainCountTooLarge(
            f"brute force stops at {BRUTE_FORCE_LIMIT} domains, got {domains}"
        )
    if domains < 1:
        raise ValueError(f"need at least 1 domain, got {domains}")
    geometry = char.geometry
    current = (
        char.drive.current_density
        * domains
        * (geometry.domain_length * geometry.track_width)
    )
    by_weight: list[list[float]] = [[] for _ in range(domains + 1)]
    counts = [0] * (domains + 1)
    for borders in ALL_CONDITIONS:
        for value in range(2**domains):
            bits = format(value, f"0{domains}b")
            weight = bits.count("1")
            by_weight[weight].append(reference_resistance(bits, borders, char.table))
    for value in range(2**domains):
        counts[format(value, f"0{domains}b").count("1")] += 1

    clusters = []
    for weight in range(domains + 1):
        low, high = min(by_weight[weight]), max(by_weight[weight])
        clusters.append(
            LevelCluster(
                weight=weight,
                pattern_count=counts[weight],
                min_resistance=low,
                max_resistance=high,
                min_voltage=current * low,
                max_voltage=current * high,
                classes=(),
            )
        )
    margins = []
    for weight in range(domains):
        margins.append(
            AdjacentMargin(
                weight_low=weight,
                weight_high=weight + 1,
                r_low_max=clusters[weight].max_resistance,
                r_high_min=clusters[weight + 1].min_resistance,
                margin=clusters[weight + 1].min_voltage - clusters[weight].max_voltage,
            )
        )
    best = margins[0]
    for entry in margins[1:]:
        if entry.margin < best.margin:
            best = entry
    return MarginReport(
        domains=domains,
        borders=None,
        read_current=current,
        clusters=tuple(clusters),
        adjacent_margins=tuple(margins),
        min_margin=best.margin,
        min_margin_pair=(best.weight_low, best.weight_high),
        distinguishable_levels=1 + sum(1 for m in margins if m.margin > 0.0),
    )


@dataclass(frozen=True)
class SymmetryResult:
    passed: bool
    counterexample: tuple[str, str, str] | None  # (check, pattern, borders)
    checks_run: int


def _swapped_wall_exact(table: SegmentResistanceTable) -> dict[SegmentKind, Fraction]:
    values = {kind: table.exact(kind) for kind in SegmentKind}
    values[SegmentKind.WALL_01], values[SegmentKind.WALL_10] = (
        values[SegmentKind.WALL_10],
        values[SegmentKind.WALL_01],
    )
    return values


def _complemented_exact(table: SegmentResistanceTable) -> dict[SegmentKind, Fraction]:
    kinds = list(SegmentKind)
    values = {}
    # polarity pairs sit 3 apart in the domain block; walls and half-walls
    # swap within their own pairs
    for i in range(3):
        values[kinds[i]] = table.exact(kinds[i + 3])
        values[kinds[i + 3]] = table.exact(kinds[i])
    values[SegmentKind.WALL_01] = table.exact(SegmentKind.WALL_10)
    values[SegmentKind.WALL_10] = table.exact(SegmentKind.WALL_01)
    values[SegmentKind.HALF_WALL_MINUS] = table.exact(SegmentKind.HALF_WALL_PLUS)
    values[SegmentKind.HALF_WALL_PLUS] = table.exact(SegmentKind.HALF_WALL_MINUS)
    return values


def _rational_from_values(
    bits: str, borders: BorderCondition, values: dict[SegmentKind, Fraction]
) -> Fraction:
    counts = segment_counts(bits, borders)
    total = Fraction(0)
    for index, kind in enumerate(SegmentKind):
        if counts[index]:
            total += Fraction(counts[index]) / values[kind]
    return 1 / total


def symmetry_sweep(
    d_max: int,
    table: SegmentResistanceTable,
    *,
    skip_wall_reversal: bool = False,
) -> SymmetryResult:
    """Exhaustive mirror and complement checks in exact arithmetic.

    Mirror: reading the word right-to-left with swapped border sides matches
    the original, once the wall-direction entries are swapped with it (a
    reversed word crosses each wall the other way). ``skip_wall_reversal``
    deliberately omits that swap; with asymmetric wall values the sweep must
    then fail, which is how tests prove the checker has teeth.

    Complement: flipping every bit matches the original against the table
    with all polarity-paired entries exchanged.
    """
    plain = {kind: table.exact(kind) for kind in SegmentKind}
    mirrored = plain if skip_wall_reversal else _swapped_wall_exact(table)
    complemented = _complemented_exact(table)
    checks = 0
    for domains in range(1, d_max + 1):
        for value in range(2**domains):
            bits = format(value, f"0{domains}b")
            flipped = "".join("1" if c == "0" else "0" for c in bits)
            for borders in ALL_CONDITIONS:
                swapped_borders = BorderCondition(borders.right, borders.left)
                reference = _rational_from_values(bits, borders, plain)
                checks += 1
                if reference != _rational_from_values(
                    bits[::-1], swapped_borders, mirrored
                ):
                    return SymmetryResult(False, ("mirror", bits, str(borders)), checks)
                checks += 1
                if reference != _rational_from_values(flipped, borders, complemented):
                    return SymmetryResult(
                        False, ("complement", bits, str(borders)), checks
                    )
    return SymmetryResult(True, None, checks)

"""Equivalence-class partitions and combination coverage."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Any, Sequence


class Coverage(str, enum.Enum):
    ACOC = "ACoC"
    ECC = "ECC"


@dataclass(frozen=True)
class Partition:
    """Classes of one input variable: ``(label, sampler or literal set)`` pairs."""

    variable: str
    classes: tuple

    def __post_init__(self):
        if not self.classes:
            raise ValueError(f"partition of {self.variable!r} has no classes")
        labels = [c[0] for c in self.classes]
        if len(labels) != len(set(labels)):
            raise ValueError(f"duplicate class labels in partition of {self.variable!r}")

    @classmethod
    def of(cls, variable: str, *labels, values: Sequence[Any] = ()) -> "Partition":
        """Partition from labels; ``values`` optionally gives each class a representative."""
        vals = list(values) + [None] * (len(labels) - len(values))
        return cls(variable, tuple(zip(labels, vals)))

    @property
    def labels(self) -> tuple:
        return tuple(c[0] for c in self.classes)


def combine(partitions: Sequence[Partition], criterion="ACoC") -> list:
    """Class tuples under All Combination or Each Choice coverage.

    Tuples hold ``(variable, label)`` pairs in partition order. ECC pairs the
    i-th class of every partition, reusing the last class of partitions with
    fewer classes.
    """
    if not partitions:
        raise ValueError("combine needs at least one partition")
    criterion = Coverage(criterion)
    if criterion is Coverage.ACOC:
        return [
            tuple((p.variable, lab) for p, lab in zip(partitions, combo))
            for combo in itertools.product(*(p.labels for p in partitions))
        ]
    width = max(len(p.classes) for p in partitions)
    return [
        tuple((p.variable, p.labels[min(i, len(p.labels) - 1)]) for p in partitions)
        for i in range(width)
    ]

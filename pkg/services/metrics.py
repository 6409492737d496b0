"""Partition similarity via normalized mutual information (log base 2)."""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import sparse
from scipy.stats import entropy as _shannon
from sklearn.metrics import mutual_info_score, normalized_mutual_info_score
from sklearn.metrics.cluster import contingency_matrix

from services.graph_core import Partition


@dataclass(frozen=True)
class Confusion:
    """Joint community counts of two partitions of the same ``n`` vertices."""

    n: int
    matrix: sparse.csr_matrix

    @classmethod
    def of(cls, p1: Partition, p2: Partition) -> "Confusion":
        if p1.n != p2.n:
            raise ValueError(
                f"partitions cover different vertex sets ({p1.n} vs {p2.n} vertices)"
            )
        matrix = contingency_matrix(p1.assignment, p2.assignment, sparse=True)
        return cls(n=p1.n, matrix=matrix.tocsr())

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    def is_matching(self) -> bool:
        """True when the partitions coincide up to community relabeling."""
        rows, columns = self.shape
        return self.matrix.nnz == rows == columns


def entropy(p: Partition) -> float:
    if p.n == 0:
        return 0.0
    return float(_shannon(p.sizes(), base=2))


def mutual_information(p1: Partition, p2: Partition) -> float:
    confusion = Confusion.of(p1, p2)
    if confusion.n == 0:
        return 0.0
    nats = mutual_info_score(None, None, contingency=confusion.matrix)
    return float(nats) / math.log(2)


def nmi(p1: Partition, p2: Partition) -> float:
    """``2I / (H₁ + H₂)``; identical partitions (both trivial included) score 1."""
    confusion = Confusion.of(p1, p2)
    if confusion.n == 0 or confusion.is_matching():
        return 1.0
    value = normalized_mutual_info_score(
        p1.assignment, p2.assignment, average_method="arithmetic"
    )
    return min(1.0, max(0.0, float(value)))

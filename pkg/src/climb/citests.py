"""Association and conditional-independence tests for discrete data.

Three tests sit behind one verdict type: the stochastic-complexity test
(``sci``), which needs no tuning parameter and declares independence exactly
when its statistic is <= 0; the classical G^2 likelihood-ratio test with a
significance level; and plug-in conditional mutual information against a
fixed cutoff.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import chi2

from .nml import RegretTable, _cells, _data_bits, conditional_sc
from .table import CategoricalTable, group_labels

__all__ = [
    "CiQuery",
    "CiVerdict",
    "empirical_cmi",
    "i_sc",
    "sci",
    "g2_test",
    "cmi_test",
    "IndependenceTest",
    "make_test",
]


@dataclass(frozen=True)
class CiQuery:
    """One conditional-independence question: x independent of y given z?"""

    x: int
    y: int
    z: tuple[int, ...]
    table: CategoricalTable

    def __post_init__(self) -> None:
        object.__setattr__(self, "z", tuple(self.z))
        m = self.table.m
        for i in (self.x, self.y, *self.z):
            if not 0 <= i < m:
                raise ValueError(f"variable index {i} outside table width {m}")
        if self.x == self.y:
            raise ValueError("x and y must differ")
        if self.x in self.z or self.y in self.z:
            raise ValueError("x and y may not appear in the conditioning set")


@dataclass(frozen=True)
class CiVerdict:
    statistic: float
    independent: bool
    p_value: float | None = None


def empirical_cmi(q: CiQuery) -> float:
    """Plug-in conditional mutual information I(x; y | z) in bits per sample."""
    t = q.table
    n = t.n
    if n == 0:
        return 0.0
    labels_z, _ = group_labels(t, list(q.z))
    labels_zy, _ = group_labels(t, list(q.z) + [q.y])
    x = t.columns[q.x]
    kx = t.cards[q.x]
    h_xz = _data_bits(_cells(x, kx, labels_z, int(labels_z.max()) + 1))
    h_xzy = _data_bits(_cells(x, kx, labels_zy, int(labels_zy.max()) + 1))
    value = (h_xz - h_xzy) / n
    # the entropy subtraction leaves noise of a few ulp on exactly
    # factorized counts; genuine sample dependence sits far above this
    return value if value > 1e-12 else 0.0


def i_sc(q: CiQuery, regrets: RegretTable | None = None) -> float:
    """Directional score: code length of x given z minus given z and y."""
    t = q.table
    labels_z, _ = group_labels(t, list(q.z))
    labels_zy, _ = group_labels(t, list(q.z) + [q.y])
    x = t.columns[q.x]
    kx = t.cards[q.x]
    return conditional_sc(x, kx, labels_z, regrets) - conditional_sc(x, kx, labels_zy, regrets)


def sci(q: CiQuery, regrets: RegretTable | None = None) -> CiVerdict:
    """Symmetric stochastic-complexity independence verdict.

    The statistic is the larger of the two directional scores; independence
    is declared exactly when it is <= 0.
    """
    forward = i_sc(q, regrets)
    backward = i_sc(CiQuery(q.y, q.x, q.z, q.table), regrets)
    statistic = max(forward, backward)
    return CiVerdict(statistic=statistic, independent=statistic <= 0.0)


def g2_test(q: CiQuery, alpha: float = 0.01, min_samples_per_dof: float = 10.0) -> CiVerdict:
    """G^2 likelihood-ratio test within the realized strata of z.

    Degrees of freedom use the declared cardinalities with no zero-cell
    correction. When fewer than ``min_samples_per_dof`` samples per degree of
    freedom are available the test is considered unreliable and independence
    is returned without testing (set the factor to 0 to disable).
    """
    t = q.table
    n = t.n
    kx, ky = t.cards[q.x], t.cards[q.y]
    dof = (kx - 1) * (ky - 1)
    for c in q.z:
        dof *= t.cards[c]
    if dof <= 0:
        return CiVerdict(statistic=0.0, independent=True, p_value=1.0)
    if n < min_samples_per_dof * dof:
        return CiVerdict(statistic=0.0, independent=True, p_value=1.0)
    labels_z, sizes = group_labels(t, list(q.z))
    strata = sizes.shape[0]
    joint = (labels_z * kx + t.columns[q.x]) * ky + t.columns[q.y]
    counts = np.bincount(joint, minlength=strata * kx * ky).reshape(strata, kx, ky)
    totals = counts.sum(axis=(1, 2), keepdims=True).astype(np.float64)
    rows = counts.sum(axis=2, keepdims=True).astype(np.float64)
    cols = counts.sum(axis=1, keepdims=True).astype(np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        expected = rows * cols / totals
        ratio = np.where(counts > 0, counts / expected, 1.0)
        stat = 2.0 * float((counts * np.log(ratio)).sum())
    stat = max(0.0, stat)
    p = float(chi2.sf(stat, dof))
    return CiVerdict(statistic=stat, independent=p > alpha, p_value=p)


def cmi_test(q: CiQuery, cutoff: float = 0.0) -> CiVerdict:
    """Plug-in conditional mutual information against a fixed cutoff."""
    if cutoff < 0:
        raise ValueError("cutoff must be >= 0")
    value = empirical_cmi(q)
    return CiVerdict(statistic=value, independent=value <= cutoff)


@dataclass
class IndependenceTest:
    """A configured test bound to one table, counting every invocation.

    The ``strength`` of a verdict orders dependence for search heuristics:
    larger means more dependent, whatever the underlying test reports.
    """

    table: CategoricalTable
    kind: str = "sci"
    alpha: float = 0.01
    cutoff: float = 0.0
    min_samples_per_dof: float = 10.0
    regrets: RegretTable | None = None
    count: int = field(default=0, init=False)

    def __post_init__(self) -> None:
        if self.kind not in ("sci", "g2", "cmi"):
            raise ValueError(f"unknown test kind {self.kind!r}")

    def __call__(self, x: int, y: int, z: tuple[int, ...] = ()) -> CiVerdict:
        self.count += 1
        q = CiQuery(x, y, tuple(z), self.table)
        if self.kind == "sci":
            return sci(q, self.regrets)
        if self.kind == "g2":
            return g2_test(q, self.alpha, self.min_samples_per_dof)
        return cmi_test(q, self.cutoff)

    def strength(self, verdict: CiVerdict) -> float:
        if self.kind == "g2":
            return 1.0 - (verdict.p_value if verdict.p_value is not None else 1.0)
        return verdict.statistic


def make_test(
    table: CategoricalTable,
    kind: str,
    alpha: float = 0.01,
    cutoff: float = 0.0,
    min_samples_per_dof: float = 10.0,
    regrets: RegretTable | None = None,
) -> IndependenceTest:
    return IndependenceTest(
        table=table,
        kind=kind,
        alpha=alpha,
        cutoff=cutoff,
        min_samples_per_dof=min_samples_per_dof,
        regrets=regrets,
    )

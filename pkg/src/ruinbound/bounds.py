"""Exponential ruin bounds for m-dependent premiums and claims.

With adjustment coefficient R and dependence order m,

    psi(u) <= (m + 1) * exp(-R u / (m + 1))   for u > (m + 1) ln(m + 1) / R,

which reduces to the Lundberg bound exp(-R u) (valid for u > 0) when m = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from . import presets
from .adjustment import DEFAULT_TOL, AdjustmentProblem, solve_adjustment

TABLE_COLUMNS = ("model_1_1", "model_1_2", "model_1_3")
TABLE_TOL = 1e-4


@dataclass(frozen=True)
class BoundReport:
    u: float
    m: int
    R: float
    bound: float
    valid: bool
    threshold: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def min_useful_u(R: float, m: int) -> float:
    """Smallest surplus above which the m-dependent bound applies (and is < 1 for m >= 1)."""
    if not R > 0:
        raise ValueError(f"R must be positive, got {R}")
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    return (m + 1) * math.log(m + 1) / R


def lundberg_bound(R: float, u: float, m: int = 0) -> BoundReport:
    if not R > 0:
        raise ValueError(f"R must be positive, got {R}")
    if not u >= 0:
        raise ValueError(f"u must be >= 0, got {u}")
    if int(m) != m or m < 0:
        raise ValueError(f"m must be a nonnegative integer, got {m}")
    m = int(m)
    threshold = min_useful_u(R, m)
    bound = (m + 1) * math.exp(-R * u / (m + 1))
    return BoundReport(float(u), m, float(R), bound, u > threshold, threshold)


@dataclass(frozen=True)
class TableRow:
    u: float
    values: Tuple[float, float, float]
    valid: Tuple[bool, bool, bool]


@dataclass(frozen=True)
class Discrepancy:
    u: float
    column: str
    published: float
    recomputed: float
    note: str


@dataclass
class BoundTable:
    """Bounds for the classical (m = 0), annuity-due and annuity-immediate models."""

    R_immediate: float
    R_due: float
    m: int
    rows: List[TableRow]
    thresholds: Tuple[float, float, float]
    discrepancies: List[Discrepancy]

    def column(self, name: str) -> List[float]:
        j = TABLE_COLUMNS.index(name)
        return [row.values[j] for row in self.rows]


def compare_with_published(rows: Sequence[TableRow],
                           published: Dict[float, Tuple[float, float, float]],
                           tol: float = TABLE_TOL) -> List[Discrepancy]:
    """Entries that differ from the printed table by more than ``tol``."""
    out = []
    for row in rows:
        printed = published.get(row.u)
        if printed is None:
            continue
        for name, got, want in zip(TABLE_COLUMNS, row.values, printed):
            if abs(got - want) > tol:
                dupes = [u for u, vals in published.items() if u != row.u and want in vals]
                note = f"printed value duplicates the u={dupes[0]:g} row" if dupes else "printed value disagrees"
                out.append(Discrepancy(row.u, name, want, got, note))
    return out


def table1(u_values: Sequence[float] = presets.TABLE_U,
           immediate: Optional[AdjustmentProblem] = None,
           due: Optional[AdjustmentProblem] = None,
           m: int = presets.DEPENDENCE_ORDER,
           tol: float = DEFAULT_TOL) -> BoundTable:
    """Recompute the bound table from solved adjustment coefficients.

    Column 1.1 uses the immediate-condition root with m = 0 (the plain
    Lundberg bound); columns 1.2 and 1.3 use the due and immediate roots with
    dependence order ``m``.
    """
    immediate = immediate or presets.immediate_problem()
    due = due or presets.due_problem()
    r0 = solve_adjustment(immediate, tol).R
    r1 = solve_adjustment(due, tol).R
    rows = []
    for u in u_values:
        reps = (lundberg_bound(r0, u, 0), lundberg_bound(r1, u, m), lundberg_bound(r0, u, m))
        rows.append(TableRow(float(u), tuple(r.bound for r in reps), tuple(r.valid for r in reps)))
    thresholds = (min_useful_u(r0, 0), min_useful_u(r1, m), min_useful_u(r0, m))
    discrepancies = []
    if immediate == presets.immediate_problem() and due == presets.due_problem() and m == presets.DEPENDENCE_ORDER:
        discrepancies = compare_with_published(rows, presets.PUBLISHED_TABLE)
    return BoundTable(r0, r1, m, rows, thresholds, discrepancies)

"""Linear program container, solution record and LP-format text dump."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Hashable

import numpy as np

LE, EQ, GE = "<=", "=", ">="
RELATIONS = (LE, EQ, GE)

OPTIMAL, INFEASIBLE, UNBOUNDED = "optimal", "infeasible", "unbounded"

# Feasibility tolerance for certified points and optimality tolerance (relative).
EPS_FEAS = 1e-7
EPS_OPT = 1e-7


@dataclass(frozen=True)
class LpProblem:
    """maximize ``objective @ x`` subject to ``A[r] (rel) rhs[r]`` and ``lo <= x <= hi``."""

    objective: np.ndarray
    A: np.ndarray
    relations: tuple[str, ...]
    rhs: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    labels: tuple[Hashable, ...]
    row_names: tuple[str, ...] = ()

    def __post_init__(self):
        n = len(self.objective)
        m = len(self.rhs)
        if self.A.shape != (m, n):
            raise ValueError(f"constraint matrix has shape {self.A.shape}, expected {(m, n)}")
        if len(self.relations) != m or any(r not in RELATIONS for r in self.relations):
            raise ValueError("one relation in {<=, =, >=} per row required")
        if len(self.lo) != n or len(self.hi) != n or len(self.labels) != n:
            raise ValueError("bounds and labels must match the number of variables")
        for name, arr in (("objective", self.objective), ("A", self.A), ("rhs", self.rhs), ("lo", self.lo)):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains NaN or infinite entries")
        if np.any(np.isnan(self.hi)) or np.any(self.hi < self.lo) or np.any(self.lo < 0):
            raise ValueError("variable bounds must satisfy 0 <= lo <= hi")

    @property
    def n_vars(self) -> int:
        return len(self.objective)

    @property
    def n_rows(self) -> int:
        return len(self.rhs)

    def violations(self, x: np.ndarray, tol: float = EPS_FEAS) -> list[str]:
        """Constraint and bound violations of ``x`` beyond ``tol`` (scaled by row size)."""
        out = []
        lhs = self.A @ x
        for r, (value, rel, b) in enumerate(zip(lhs, self.relations, self.rhs)):
            slack = tol * (1.0 + abs(b))
            bad = (
                (rel == LE and value > b + slack)
                or (rel == GE and value < b - slack)
                or (rel == EQ and abs(value - b) > slack)
            )
            if bad:
                name = self.row_names[r] if self.row_names else f"r{r}"
                out.append(f"{name}: {value:.12g} {rel} {b:.12g} violated")
        for j in range(self.n_vars):
            if x[j] < self.lo[j] - tol or x[j] > self.hi[j] + tol * (1.0 + abs(self.hi[j])):
                out.append(f"{self.labels[j]}: {x[j]:.12g} outside [{self.lo[j]}, {self.hi[j]}]")
        return out


class LpBuilder:
    """Incremental construction of an :class:`LpProblem` by labelled columns."""

    def __init__(self):
        self._obj: list[float] = []
        self._lo: list[float] = []
        self._hi: list[float] = []
        self._labels: list[Hashable] = []
        self._index: dict[Hashable, int] = {}
        self._rows: list[tuple[dict[int, float], str, float, str]] = []

    def var(self, label: Hashable, obj: float = 0.0, lo: float = 0.0, hi: float = math.inf) -> int:
        if label in self._index:
            raise ValueError(f"duplicate variable {label!r}")
        self._index[label] = len(self._obj)
        self._obj.append(float(obj))
        self._lo.append(float(lo))
        self._hi.append(float(hi))
        self._labels.append(label)
        return self._index[label]

    def index(self, label: Hashable) -> int:
        return self._index[label]

    def row(self, coeffs: dict[int, float], rel: str, rhs: float, name: str = "") -> None:
        coeffs = {j: c for j, c in coeffs.items() if c != 0.0}
        if not coeffs:
            return
        self._rows.append((coeffs, rel, float(rhs), name or f"r{len(self._rows)}"))

    def build(self) -> LpProblem:
        n = len(self._obj)
        A = np.zeros((len(self._rows), n))
        for r, (coeffs, _, _, _) in enumerate(self._rows):
            for j, c in coeffs.items():
                A[r, j] += c
        return LpProblem(
            objective=np.array(self._obj, dtype=float),
            A=A,
            relations=tuple(r[1] for r in self._rows),
            rhs=np.array([r[2] for r in self._rows], dtype=float),
            lo=np.array(self._lo, dtype=float),
            hi=np.array(self._hi, dtype=float),
            labels=tuple(self._labels),
            row_names=tuple(r[3] for r in self._rows),
        )


@dataclass(frozen=True)
class LpSolution:
    status: str
    value: float = math.nan
    point: np.ndarray = field(default_factory=lambda: np.zeros(0))
    labels: tuple[Hashable, ...] = ()
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL

    def by_label(self) -> dict[Hashable, float]:
        return {label: float(v) for label, v in zip(self.labels, self.point)}


def _name(label: Hashable) -> str:
    if isinstance(label, tuple):
        text = "_".join(_name(part) for part in label)
    else:
        text = str(label)
    return re.sub(r"[^A-Za-z0-9_.]", "_", text)


def _fmt(v: float) -> str:
    return f"{v:.12g}"


def _expr(coeffs: list[tuple[float, str]]) -> str:
    parts = []
    for c, name in coeffs:
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        term = name if mag == 1.0 else f"{_fmt(mag)} {name}"
        parts.append(f"{sign} {term}")
    text = " ".join(parts) if parts else "0"
    return text[2:] if text.startswith("+ ") else text


def to_lp_text(prob: LpProblem, title: str = "") -> str:
    """Render ``prob`` in CPLEX LP text format."""
    names = [_name(l) for l in prob.labels]
    lines = []
    if title:
        lines.append(f"\\ {title}")
    lines.append("Maximize")
    obj = [(c, names[j]) for j, c in enumerate(prob.objective) if c != 0.0]
    lines.append(f" obj: {_expr(obj)}")
    lines.append("Subject To")
    for r in range(prob.n_rows):
        coeffs = [(c, names[j]) for j, c in enumerate(prob.A[r]) if c != 0.0]
        rel = {LE: "<=", GE: ">=", EQ: "="}[prob.relations[r]]
        row_name = _name(prob.row_names[r]) if prob.row_names else f"r{r}"
        lines.append(f" {row_name}: {_expr(coeffs)} {rel} {_fmt(prob.rhs[r])}")
    lines.append("Bounds")
    for j, name in enumerate(names):
        lo, hi = prob.lo[j], prob.hi[j]
        if math.isinf(hi):
            if lo != 0.0:
                lines.append(f" {name} >= {_fmt(lo)}")
        elif lo == hi:
            lines.append(f" {name} = {_fmt(lo)}")
        else:
            lines.append(f" {_fmt(lo)} <= {name} <= {_fmt(hi)}")
    lines.append("End")
    return "\n".join(lines) + "\n"

"""Mixed binary/continuous linear minimization programs with string keys.

Hosts every model family in the package: assignment variables, lateness
and waiting trackers, and the repair indicators.  Rows are kept as sparse
dicts until compile time; the solver works on dense arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

LE = "<="
GE = ">="
EQ = "="
_SENSES = (LE, GE, EQ)


class InfeasibleError(RuntimeError):
    """Raised by callers that require a feasible solution."""


class SolverTimeout(RuntimeError):
    """Time limit hit before the gap target was proven."""


@dataclass
class _Row:
    coeffs: dict[str, float]
    sense: str
    rhs: float


class IntegerProgram:
    """Minimization program over binary and non-negative continuous vars."""

    def __init__(self, name: str = ""):
        self.name = name
        self._binary: dict[str, int] = {}
        self._continuous: dict[str, int] = {}
        self._rows: list[_Row] = []
        self._objective: dict[str, float] = {}

    # -- building -----------------------------------------------------------

    def add_binary(self, key: str) -> str:
        if key in self._binary or key in self._continuous:
            raise ValueError(f"duplicate variable key {key!r}")
        self._binary[key] = len(self._binary)
        return key

    def add_continuous(self, key: str) -> str:
        """Continuous variable with bounds [0, +inf)."""
        if key in self._binary or key in self._continuous:
            raise ValueError(f"duplicate variable key {key!r}")
        self._continuous[key] = len(self._continuous)
        return key

    def add_constraint(self, coeffs: dict[str, float], sense: str,
                       rhs: float) -> None:
        if sense not in _SENSES:
            raise ValueError(f"unknown sense {sense!r}")
        if not math.isfinite(rhs):
            raise ValueError("constraint rhs must be finite")
        for key, val in coeffs.items():
            self._check_key(key)
            if not math.isfinite(val):
                raise ValueError(f"non-finite coefficient for {key!r}")
        self._rows.append(_Row(dict(coeffs), sense, float(rhs)))

    def set_objective(self, coeffs: dict[str, float]) -> None:
        for key, val in coeffs.items():
            self._check_key(key)
            if not math.isfinite(val):
                raise ValueError(f"non-finite objective coefficient {key!r}")
        self._objective = dict(coeffs)

    def _check_key(self, key: str) -> None:
        if key not in self._binary and key not in self._continuous:
            raise KeyError(f"undeclared variable {key!r}")

    # -- introspection -------------------------------------------------------

    @property
    def binary_keys(self) -> list[str]:
        return list(self._binary)

    @property
    def continuous_keys(self) -> list[str]:
        return list(self._continuous)

    @property
    def num_binaries(self) -> int:
        return len(self._binary)

    @property
    def num_rows(self) -> int:
        return len(self._rows)

    def rows(self) -> list[tuple[dict[str, float], str, float]]:
        return [(dict(r.coeffs), r.sense, r.rhs) for r in self._rows]

    def objective_coeffs(self) -> dict[str, float]:
        return dict(self._objective)

    # -- compilation ---------------------------------------------------------

    def compile(self) -> "CompiledProgram":
        """Dense arrays with >= rows negated to <=; binaries first."""
        keys = list(self._binary) + list(self._continuous)
        col = {k: i for i, k in enumerate(keys)}
        n = len(keys)
        nb = len(self._binary)
        m = len(self._rows)
        A = np.zeros((m, n), dtype=np.float64)
        b = np.zeros(m, dtype=np.float64)
        is_eq = np.zeros(m, dtype=np.bool_)
        for i, row in enumerate(self._rows):
            sign = -1.0 if row.sense == GE else 1.0
            for key, val in row.coeffs.items():
                A[i, col[key]] += sign * val
            b[i] = sign * row.rhs
            is_eq[i] = row.sense == EQ
        c = np.zeros(n, dtype=np.float64)
        for key, val in self._objective.items():
            c[col[key]] = val
        lb = np.zeros(n, dtype=np.float64)
        ub = np.full(n, np.inf, dtype=np.float64)
        ub[:nb] = 1.0
        return CompiledProgram(keys=keys, num_binaries=nb, A=A, b=b,
                               is_eq=is_eq, c=c, lb=lb, ub=ub)

    # -- LP text export (external cross-check escape hatch) ------------------

    def to_lp_text(self) -> str:
        """Model in the standard LP text format."""
        def term(key, val, first):
            sign = "-" if val < 0 else ("" if first else "+")
            mag = abs(val)
            coef = "" if mag == 1 else f"{mag:g} "
            return f"{sign} {coef}{_lp_name(key)}".strip()

        lines = ["Minimize", " obj:"]
        parts = [term(k, v, i == 0)
                 for i, (k, v) in enumerate(self._objective.items()) if v != 0]
        lines.append("  " + (" ".join(parts) if parts else "0 " +
                             _lp_name(next(iter(self._binary), "x0"))))
        lines.append("Subject To")
        for i, row in enumerate(self._rows):
            parts = [term(k, v, j == 0)
                     for j, (k, v) in enumerate(row.coeffs.items()) if v != 0]
            body = " ".join(parts) if parts else "0 " + _lp_name(
                next(iter(self._binary), next(iter(self._continuous), "x0")))
            lines.append(f" c{i}: {body} {row.sense} {row.rhs:g}")
        if self._binary:
            lines.append("Binary")
            lines.append("  " + " ".join(_lp_name(k) for k in self._binary))
        lines.append("End")
        return "\n".join(lines) + "\n"


def _lp_name(key: str) -> str:
    out = []
    for ch in key:
        out.append(ch if ch.isalnum() or ch in "_" else "_")
    name = "".join(out)
    return name if name and not name[0].isdigit() else "v_" + name


@dataclass
class CompiledProgram:
    keys: list[str]
    num_binaries: int
    A: np.ndarray
    b: np.ndarray
    is_eq: np.ndarray
    c: np.ndarray
    lb: np.ndarray
    ub: np.ndarray


OPTIMAL_WITHIN_GAP = "optimal_within_gap"
INFEASIBLE = "infeasible"


@dataclass
class Solution:
    values: dict[str, float]
    objective: float
    bound: float
    gap: float
    status: str = OPTIMAL_WITHIN_GAP
    nodes: int = 0

    def __getitem__(self, key: str) -> float:
        return self.values[key]

    def binaries_set(self, prefix: str = "") -> list[str]:
        return [k for k, v in self.values.items()
                if k.startswith(prefix) and round(v) == 1]

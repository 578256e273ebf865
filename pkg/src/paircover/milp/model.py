"""Container for binary integer linear programs.

Every variable is binary and every coefficient, objective weight and
right-hand side is an integer.  All formulations this package builds fit
that shape, and it lets the reference solver work in exact int64
arithmetic end to end.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from ..core import StructureError

RELATIONS = ("<=", ">=", "==")
_REL_CODE = {"<=": 0, ">=": 1, "==": 2}


def _as_int(x, what: str) -> int:
    v = int(round(float(x)))
    if abs(float(x) - v) > 1e-9:
        raise StructureError(f"{what} must be integral, got {x!r}")
    return v


@dataclass(frozen=True)
class LinearConstraint:
    """One row: sum(coef * var) REL rhs over binary vars."""

    coefs: tuple[tuple[int, int], ...]
    rel: str
    rhs: int
    name: str


class MilpModel:
    """A binary program assembled row by row.

    Variables are created with :meth:`add_var` and referenced by the integer
    id it returns.  ``sense`` is "max" or "min".
    """

    def __init__(self, sense: str = "max", name: str = "model"):
        if sense not in ("max", "min"):
            raise StructureError(f"sense must be 'max' or 'min', got {sense!r}")
        self.sense = sense
        self.name = name
        self._var_names: list[str] = []
        self._obj: list[int] = []
        self._rows: list[LinearConstraint] = []
        self._arrays: dict | None = None

    # -- construction -------------------------------------------------

    def add_var(self, name: str | None = None, obj: int = 0) -> int:
        vid = len(self._var_names)
        self._var_names.append(name if name is not None else f"x{vid}")
        self._obj.append(_as_int(obj, "objective coefficient"))
        self._arrays = None
        return vid

    def add_constraint(
        self,
        coefs: Mapping[int, int] | Iterable[tuple[int, int]],
        rel: str,
        rhs,
        name: str | None = None,
    ) -> int:
        if rel not in RELATIONS:
            raise StructureError(f"relation must be one of {RELATIONS}, got {rel!r}")
        items = list(coefs.items()) if isinstance(coefs, Mapping) else list(coefs)
        seen: set[int] = set()
        norm: list[tuple[int, int]] = []
        for v, c in items:
            v = int(v)
            if not 0 <= v < self.nvars:
                raise StructureError(f"constraint references unknown var {v}")
            if v in seen:
                raise StructureError(f"constraint names var {v} twice")
            seen.add(v)
            norm.append((v, _as_int(c, "constraint coefficient")))
        if not norm:
            raise StructureError("constraint has no variables")
        cid = len(self._rows)
        self._rows.append(
            LinearConstraint(
                tuple(norm), rel, _as_int(rhs, "rhs"), name if name else f"c{cid}"
            )
        )
        self._arrays = None
        return cid

    # -- inspection ---------------------------------------------------

    @property
    def nvars(self) -> int:
        return len(self._var_names)

    @property
    def ncons(self) -> int:
        return len(self._rows)

    @property
    def nnz(self) -> int:
        return sum(len(r.coefs) for r in self._rows)

    def var_name(self, vid: int) -> str:
        return self._var_names[vid]

    @property
    def objective(self) -> tuple[int, ...]:
        return tuple(self._obj)

    @property
    def rows(self) -> tuple[LinearConstraint, ...]:
        return tuple(self._rows)

    def to_arrays(self) -> dict:
        """CSR view of the rows plus objective, cached until mutation.

        Keys: obj (int64[nv]), indptr (int64[nc+1]), vidx (int32[nnz]),
        coef (int64[nnz]), rel (int8[nc], 0/1/2 for <=,>=,==), rhs
        (int64[nc]).
        """
        if self._arrays is None:
            nv, nc = self.nvars, self.ncons
            indptr = np.zeros(nc + 1, dtype=np.int64)
            vidx = np.empty(self.nnz, dtype=np.int32)
            coef = np.empty(self.nnz, dtype=np.int64)
            rel = np.empty(nc, dtype=np.int8)
            rhs = np.empty(nc, dtype=np.int64)
            k = 0
            for c, row in enumerate(self._rows):
                for v, a in row.coefs:
                    vidx[k] = v
                    coef[k] = a
                    k += 1
                indptr[c + 1] = k
                rel[c] = _REL_CODE[row.rel]
                rhs[c] = row.rhs
            self._arrays = {
                "obj": np.array(self._obj, dtype=np.int64),
                "indptr": indptr,
                "vidx": vidx,
                "coef": coef,
                "rel": rel,
                "rhs": rhs,
            }
        return self._arrays


class SolveStatus(enum.Enum):
    OPTIMAL = "optimal"
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    TIMED_OUT = "timed_out"


@dataclass
class MilpSolution:
    """Outcome of one solve call.

    ``values`` is an int8 0/1 vector when a solution exists, else None.
    ``objective`` is reported in the model's own sense.  ``stats`` carries
    backend-specific counters (nodes, wall time, backend name).
    """

    status: SolveStatus
    objective: int | None
    values: np.ndarray | None
    stats: dict = field(default_factory=dict)

    @property
    def has_solution(self) -> bool:
        return self.values is not None


def objective_value(model: MilpModel, values: np.ndarray) -> int:
    arr = model.to_arrays()
    return int(arr["obj"] @ np.asarray(values, dtype=np.int64))


def verify_solution(model: MilpModel, values: np.ndarray, tol: float = 1e-6) -> bool:
    """Check a value vector: binary entries, every row satisfied.

    Exact integer arithmetic; ``tol`` only forgives float inputs that are
    within rounding distance of 0/1.
    """
    x = np.asarray(values, dtype=np.float64)
    if x.shape != (model.nvars,):
        return False
    xi = np.round(x)
    if np.any(np.abs(x - xi) > tol):
        return False
    if np.any((xi != 0) & (xi != 1)):
        return False
    xi = xi.astype(np.int64)
    arr = model.to_arrays()
    indptr, vidx, coef = arr["indptr"], arr["vidx"], arr["coef"]
    for c in range(model.ncons):
        lo, hi = indptr[c], indptr[c + 1]
        act = int(coef[lo:hi] @ xi[vidx[lo:hi]])
        r = int(arr["rhs"][c])
        code = int(arr["rel"][c])
        if code == 0 and act > r:
            return False
        if code == 1 and act < r:
            return False
        if code == 2 and act != r:
            return False
    return True


def _lp_term(coef: int, name: str, first: bool) -> str:
    sign = "-" if coef < 0 else ("" if first else "+")
    mag = abs(coef)
    body = name if mag == 1 else f"{mag} {name}"
    return f"{sign} {body}" if (sign and not first) else f"{sign}{body}"


def export_lp(model: MilpModel) -> str:
    """Render the model in CPLEX LP text format (all vars binary)."""
    out: list[str] = [f"\\ {model.name}"]
    out.append("Maximize" if model.sense == "max" else "Minimize")
    terms = [
        _lp_term(c, model.var_name(v), k == 0)
        for k, (v, c) in enumerate((v, c) for v, c in enumerate(model._obj) if c != 0)
    ]
    out.append(" obj: " + (" ".join(terms) if terms else "0 " + model.var_name(0)))
    out.append("Subject To")
    rel_txt = {"<=": "<=", ">=": ">=", "==": "="}
    for row in model.rows:
        terms = [
            _lp_term(c, model.var_name(v), k == 0) for k, (v, c) in enumerate(row.coefs)
        ]
        out.append(f" {row.name}: " + " ".join(terms) + f" {rel_txt[row.rel]} {row.rhs}")
    out.append("Binary")
    for v in range(model.nvars):
        out.append(f" {model.var_name(v)}")
    out.append("End")
    return "\n".join(out) + "\n"

"""Solver-agnostic canonical optimization model: variables with bounds and
kinds, sparse linear constraints, and a minimization objective."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

CONTINUOUS = "continuous"
INTEGER = "integer"
BINARY = "binary"
SEMI_CONTINUOUS = "semi-continuous"

LE = "<="
EQ = "=="
GE = ">="


@dataclass
class Variable:
    name: str
    lb: float = 0.0
    ub: float = math.inf
    kind: str = CONTINUOUS
    # [S_min, S_max) interval for semi-continuous variables
    semi_lb: float | None = None
    semi_ub: float | None = None


@dataclass
class Constraint:
    coefs: dict[int, float]  # variable index -> coefficient
    sense: str  # LE | EQ | GE
    rhs: float
    name: str = ""


class LinExpr:
    """Affine expression: constant + sum of coef * variable."""

    __slots__ = ("const", "coefs")

    def __init__(self, const: float = 0.0, coefs: dict[int, float] | None = None):
        self.const = const
        self.coefs = coefs if coefs is not None else {}

    def copy(self) -> "LinExpr":
        return LinExpr(self.const, dict(self.coefs))

    def add_term(self, idx: int, coef: float) -> "LinExpr":
        if coef != 0.0:
            self.coefs[idx] = self.coefs.get(idx, 0.0) + coef
        return self

    def add(self, other: "LinExpr", scale: float = 1.0) -> "LinExpr":
        self.const += scale * other.const
        for idx, c in other.coefs.items():
            self.add_term(idx, scale * c)
        return self

    def value(self, x: dict[int, float] | list[float]) -> float:
        return self.const + sum(c * x[i] for i, c in self.coefs.items())


class LinearModel:
    """Canonical model with structured variable names (e.g. ``s[g,i,j,t]``).

    The objective sense is always minimize. ``meta`` carries builder
    context (instance, variable index maps, census expressions) consumed
    by the operational-option layer and the evaluation module; it is not
    part of the mathematical model.
    """

    def __init__(self, name: str = ""):
        self.name = name
        self.variables: list[Variable] = []
        self.constraints: list[Constraint] = []
        self.objective: dict[int, float] = {}
        self.objective_constant: float = 0.0
        self._index: dict[str, int] = {}
        self.meta: dict = {}

    # -- construction -----------------------------------------------------

    def add_variable(
        self,
        name: str,
        lb: float = 0.0,
        ub: float = math.inf,
        kind: str = CONTINUOUS,
    ) -> int:
        if name in self._index:
            raise ValueError(f"duplicate variable name {name!r}")
        if kind == BINARY:
            lb, ub = max(lb, 0.0), min(ub, 1.0)
        if lb > ub:
            raise ValueError(f"variable {name!r} has lb {lb} > ub {ub}")
        self.variables.append(Variable(name=name, lb=lb, ub=ub, kind=kind))
        self._index[name] = len(self.variables) - 1
        return len(self.variables) - 1

    def add_constraint(self, coefs: dict[int, float], sense: str, rhs: float, name: str = "") -> int:
        if sense not in (LE, EQ, GE):
            raise ValueError(f"bad constraint sense {sense!r}")
        for idx in coefs:
            if not (0 <= idx < len(self.variables)):
                raise ValueError(f"constraint references undeclared variable index {idx}")
        self.constraints.append(Constraint(coefs=dict(coefs), sense=sense, rhs=rhs, name=name))
        return len(self.constraints) - 1

    def add_expr_constraint(self, expr: LinExpr, sense: str, rhs: float, name: str = "") -> int:
        # constant moves to the right-hand side
        return self.add_constraint(expr.coefs, sense, rhs - expr.const, name=name)

    def add_objective_term(self, idx: int, coef: float) -> None:
        if coef != 0.0:
            self.objective[idx] = self.objective.get(idx, 0.0) + coef

    def add_objective_expr(self, expr: LinExpr, scale: float = 1.0) -> None:
        self.objective_constant += scale * expr.const
        for idx, c in expr.coefs.items():
            self.add_objective_term(idx, scale * c)

    def index_of(self, name: str) -> int:
        return self._index[name]

    def mark_semi_continuous(self, idx: int, s_min: float, s_max: float) -> None:
        if s_min > s_max:
            raise ValueError("S_min must not exceed S_max")
        v = self.variables[idx]
        v.kind = SEMI_CONTINUOUS
        v.semi_lb = s_min
        v.semi_ub = s_max
        v.lb = 0.0
        v.ub = s_max

    # -- queries ----------------------------------------------------------

    @property
    def n_variables(self) -> int:
        return len(self.variables)

    @property
    def n_constraints(self) -> int:
        return len(self.constraints)

    def is_mixed_integer(self) -> bool:
        return any(v.kind != CONTINUOUS for v in self.variables)

    def objective_value(self, values: dict[str, float]) -> float:
        return self.objective_constant + sum(
            c * values[self.variables[i].name] for i, c in self.objective.items()
        )

    # -- LP file export ---------------------------------------------------

    def to_lp_string(self) -> str:
        """Render in the industry-standard LP text file format."""

        def term(coef: float, name: str) -> str:
            sign = "+" if coef >= 0 else "-"
            return f" {sign} {abs(coef):.12g} {name}"

        def lhs(coefs: dict[int, float]) -> str:
            if not coefs:
                return " 0 __dummy"
            parts = [term(c, self.variables[i].name) for i, c in sorted(coefs.items())]
            return "".join(parts)

        lines = ["Minimize", " obj:" + lhs(self.objective), "Subject To"]
        rel = {LE: "<=", EQ: "=", GE: ">="}
        for k, con in enumerate(self.constraints):
            cname = con.name or f"c{k}"
            lines.append(f" {cname}:{lhs(con.coefs)} {rel[con.sense]} {con.rhs:.12g}")
        lines.append("Bounds")
        for v in self.variables:
            lb = "-inf" if v.lb == -math.inf else f"{v.lb:.12g}"
            ub = "+inf" if v.ub == math.inf else f"{v.ub:.12g}"
            lines.append(f" {lb} <= {v.name} <= {ub}")
        generals = [v.name for v in self.variables if v.kind == INTEGER]
        binaries = [v.name for v in self.variables if v.kind == BINARY]
        semis = [v for v in self.variables if v.kind == SEMI_CONTINUOUS]
        if generals:
            lines.append("Generals")
            lines.extend(f" {n}" for n in generals)
        if binaries:
            lines.append("Binaries")
            lines.extend(f" {n}" for n in binaries)
        if semis:
            lines.append("Semi-Continuous")
            lines.extend(f" {v.name}" for v in semis)
        lines.append("End")
        return "\n".join(lines) + "\n"

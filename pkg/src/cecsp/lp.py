"""Small linear-program container shared by the evaluator and the MILP.

Models are stored row-wise as sparse triplets and handed to HiGHS through
:func:`scipy.optimize.linprog` (continuous) or :func:`scipy.optimize.milp`
(with integer columns). The text writer/reader speaks the CPLEX LP format
subset that mainstream MILP solvers read.
"""
from dataclasses import dataclass
import enum
import math
import re

import numpy as np
from scipy import sparse
from scipy.optimize import linprog, milp, Bounds, LinearConstraint

LE, GE, EQ = "<=", ">=", "="


class Status(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    ITERATION_LIMIT = "iteration-limit"
    ERROR = "error"


class SolverError(RuntimeError):
    """Raised when the backend fails for reasons other than infeasibility."""


class LinearProgram:
    """Minimization problem with named columns and rows.

    Columns carry bounds, a cost and an integrality flag. Rows are
    ``sum(coef * x) <sense> rhs`` with sense one of ``<=``, ``>=``, ``=``.
    """

    def __init__(self, name="model"):
        self.name = name
        self.col_names = []
        self.col_lb = []
        self.col_ub = []
        self.cost = []
        self.integer = []
        self.objective_offset = 0.0
        self.row_names = []
        self.row_sense = []
        self.rhs = []
        self._rows = []
        self._cols = []
        self._vals = []
        self._index = {}

    @property
    def n_cols(self):
        return len(self.col_names)

    @property
    def n_rows(self):
        return len(self.row_names)

    def add_var(self, name, lb=0.0, ub=math.inf, cost=0.0, integer=False):
        if name in self._index:
            raise ValueError(f"duplicate column {name!r}")
        idx = len(self.col_names)
        self._index[name] = idx
        self.col_names.append(name)
        self.col_lb.append(lb)
        self.col_ub.append(ub)
        self.cost.append(cost)
        self.integer.append(integer)
        return idx

    def add_row(self, name, coeffs, sense, rhs):
        """Add a row; ``coeffs`` is an iterable of ``(column index, value)``."""
        if sense not in (LE, GE, EQ):
            raise ValueError(f"bad row sense {sense!r}")
        r = len(self.row_names)
        for c, v in coeffs:
            if not 0 <= c < len(self.col_names):
                raise IndexError(f"row {name!r} references unknown column {c}")
            if v != 0:
                self._rows.append(r)
                self._cols.append(c)
                self._vals.append(float(v))
        self.row_names.append(name)
        self.row_sense.append(sense)
        self.rhs.append(float(rhs))
        return r

    def col(self, name):
        return self._index[name]

    def has_col(self, name):
        return name in self._index

    def matrix(self):
        return sparse.csr_matrix(
            (self._vals, (self._rows, self._cols)),
            shape=(self.n_rows, self.n_cols))

    def row_terms(self, r):
        """List of ``(column index, coefficient)`` for row ``r``."""
        a = self.matrix().getrow(r)
        return list(zip(a.indices.tolist(), a.data.tolist()))

    def set_bounds(self, name, lb, ub):
        c = self._index[name]
        self.col_lb[c] = lb
        self.col_ub[c] = ub

    def copy(self):
        other = LinearProgram(self.name)
        for attr in ("col_names", "col_lb", "col_ub", "cost", "integer",
                     "row_names", "row_sense", "rhs", "_rows", "_cols",
                     "_vals"):
            setattr(other, attr, list(getattr(self, attr)))
        other._index = dict(self._index)
        other.objective_offset = self.objective_offset
        return other

    def n_integer(self):
        return sum(self.integer)

    def evaluate(self, x):
        """Objective value of the column vector ``x``."""
        return float(np.dot(self.cost, x)) + self.objective_offset

    def max_residual(self, x):
        """Largest row or bound violation of ``x``."""
        x = np.asarray(x, dtype=float)
        ax = self.matrix() @ x
        rhs = np.asarray(self.rhs)
        sense = np.asarray(self.row_sense)
        res = np.zeros(self.n_rows)
        res[sense == LE] = np.maximum(0, ax - rhs)[sense == LE]
        res[sense == GE] = np.maximum(0, rhs - ax)[sense == GE]
        res[sense == EQ] = np.abs(ax - rhs)[sense == EQ]
        lb = np.asarray(self.col_lb, dtype=float)
        ub = np.asarray(self.col_ub, dtype=float)
        bnd = np.maximum(np.maximum(0, lb - x), np.maximum(0, x - ub))
        return float(max(res.max(initial=0.0), bnd.max(initial=0.0)))


@dataclass
class LpSolution:
    status: Status
    x: np.ndarray = None
    objective: float = math.inf
    message: str = ""

    @property
    def optimal(self):
        return self.status is Status.OPTIMAL

    def value(self, lp, name):
        return float(self.x[lp.col(name)])


_LINPROG_STATUS = {0: Status.OPTIMAL, 1: Status.ITERATION_LIMIT,
                   2: Status.INFEASIBLE, 3: Status.UNBOUNDED}

# primal/dual feasibility tolerance handed to HiGHS
SOLVER_TOL = 1e-7


def _split_rows(lp):
    a = lp.matrix()
    sense = np.asarray(lp.row_sense)
    rhs = np.asarray(lp.rhs, dtype=float)
    le, ge, eq = sense == LE, sense == GE, sense == EQ
    a_ub = sparse.vstack([a[le], -a[ge]]).tocsr()
    b_ub = np.concatenate([rhs[le], -rhs[ge]])
    return a_ub, b_ub, a[eq], rhs[eq]


def solve(lp, relax=False, time_limit=None):
    """Solve ``lp`` with HiGHS.

    Parameters
    ----------
    relax : bool
        Ignore integrality flags.
    time_limit : float, optional
        Wall-clock limit in seconds; exceeding it reports
        ``Status.ITERATION_LIMIT``.

    Returns
    -------
    LpSolution
    """
    lb = np.asarray(lp.col_lb, dtype=float)
    ub = np.asarray(lp.col_ub, dtype=float)
    c = np.asarray(lp.cost, dtype=float)
    if lp.n_integer() and not relax:
        return _solve_milp(lp, c, lb, ub, time_limit)
    a_ub, b_ub, a_eq, b_eq = _split_rows(lp)
    options = {"primal_feasibility_tolerance": SOLVER_TOL,
               "dual_feasibility_tolerance": SOLVER_TOL}
    if time_limit is not None:
        options["time_limit"] = float(time_limit)
    res = linprog(c,
                  A_ub=a_ub if a_ub.shape[0] else None,
                  b_ub=b_ub if a_ub.shape[0] else None,
                  A_eq=a_eq if a_eq.shape[0] else None,
                  b_eq=b_eq if a_eq.shape[0] else None,
                  bounds=np.column_stack([lb, ub]),
                  method="highs-ds", options=options)
    status = _LINPROG_STATUS.get(res.status, Status.ERROR)
    if status is Status.ERROR:
        raise SolverError(res.message)
    if status is not Status.OPTIMAL:
        return LpSolution(status, message=res.message)
    return LpSolution(status, np.asarray(res.x),
                      float(res.fun) + lp.objective_offset, res.message)


def _solve_milp(lp, c, lb, ub, time_limit):
    cons = []
    if lp.n_rows:
        a = lp.matrix()
        rhs = np.asarray(lp.rhs, dtype=float)
        sense = np.asarray(lp.row_sense)
        lo = np.where(sense == LE, -np.inf, rhs)
        hi = np.where(sense == GE, np.inf, rhs)
        cons.append(LinearConstraint(a, lo, hi))
    options = {}
    if time_limit is not None:
        options["time_limit"] = float(time_limit)
    res = milp(c, integrality=np.asarray(lp.integer, dtype=int),
               bounds=Bounds(lb, ub), constraints=cons, options=options)
    if res.status == 0:
        return LpSolution(Status.OPTIMAL, np.asarray(res.x),
                          float(res.fun) + lp.objective_offset, res.message)
    if res.status == 1:
        return LpSolution(Status.ITERATION_LIMIT, message=res.message)
    if res.status == 2:
        return LpSolution(Status.INFEASIBLE, message=res.message)
    if res.status == 3:
        return LpSolution(Status.UNBOUNDED, message=res.message)
    raise SolverError(res.message)


# -- CPLEX LP text format ----------------------------------------------------

_MAX_LINE = 200


def _num(v):
    return repr(float(v))


def _terms(names, coefs):
    out = []
    for name, v in zip(names, coefs):
        sign = "-" if v < 0 else "+"
        out.append(f"{sign} {_num(abs(v))} {name}")
    if out and out[0].startswith("+ "):
        out[0] = out[0][2:]
    return out


def _wrap(head, parts, tail=""):
    lines = []
    cur = head
    for p in parts + ([tail] if tail else []):
        if len(cur) + len(p) + 1 > _MAX_LINE:
            lines.append(cur)
            cur = "   " + p
        else:
            cur = f"{cur} {p}"
    lines.append(cur)
    return lines


def _fmt_bound(v):
    if v == math.inf:
        return "+inf"
    if v == -math.inf:
        return "-inf"
    return _num(v)


def write_lp(lp, fh):
    """Write ``lp`` to the open text stream ``fh`` in CPLEX LP format."""
    a = lp.matrix().tocsr()
    names = lp.col_names
    fh.write(f"\\ {lp.name}: {lp.n_cols} columns, {lp.n_rows} rows\n")
    fh.write("Minimize\n")
    nz = [(names[c], v) for c, v in enumerate(lp.cost) if v != 0]
    parts = _terms([n for n, _ in nz], [v for _, v in nz])
    if lp.objective_offset:
        sign = "-" if lp.objective_offset < 0 else "+"
        parts.append(f"{sign} {_num(abs(lp.objective_offset))}")
    if not parts:
        parts = [f"0 {names[0]}"] if names else ["0"]
    for line in _wrap(" obj:", parts):
        fh.write(line + "\n")
    fh.write("Subject To\n")
    for r, rname in enumerate(lp.row_names):
        lo, hi = a.indptr[r], a.indptr[r + 1]
        cols = a.indices[lo:hi]
        parts = _terms([names[c] for c in cols], a.data[lo:hi])
        if not parts:
            parts = [f"0 {names[0]}"]
        for line in _wrap(f" {rname}:", parts,
                          f"{lp.row_sense[r]} {_num(lp.rhs[r])}"):
            fh.write(line + "\n")
    fh.write("Bounds\n")
    for c, name in enumerate(names):
        lb, ub = lp.col_lb[c], lp.col_ub[c]
        if lb == ub:
            fh.write(f" {name} = {_num(lb)}\n")
        elif lb == 0 and ub == math.inf:
            continue
        elif ub == math.inf:
            fh.write(f" {name} >= {_fmt_bound(lb)}\n")
        else:
            fh.write(f" {_fmt_bound(lb)} <= {name} <= {_fmt_bound(ub)}\n")
    bins = [n for c, n in enumerate(names)
            if lp.integer[c] and lp.col_lb[c] >= 0 and lp.col_ub[c] <= 1]
    gens = [n for c, n in enumerate(names)
            if lp.integer[c] and n not in set(bins)]
    if bins:
        fh.write("Binaries\n")
        for line in _wrap("", bins):
            fh.write(line + "\n")
    if gens:
        fh.write("Generals\n")
        for line in _wrap("", gens):
            fh.write(line + "\n")
    fh.write("End\n")


_SECTION = {"minimize": "obj", "minimum": "obj", "min": "obj",
            "subject to": "rows", "such that": "rows", "st": "rows",
            "s.t.": "rows", "bounds": "bounds", "bound": "bounds",
            "binaries": "bin", "binary": "bin", "bin": "bin",
            "generals": "gen", "general": "gen", "gen": "gen", "end": "end"}
_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?|inf(?:inity)?)"
    r"|(?P<name>[A-Za-z_][\w.\[\]]*)|(?P<op>[+-]))")


def _parse_expr(text):
    """Parse ``3 x + 2.5 y - z + 4`` into ``(terms, constant)``."""
    terms = []
    const = 0.0
    sign, coef = 1.0, None
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse expression near {text[pos:]!r}")
        pos = m.end()
        if m.group("op"):
            if coef is not None:
                const += sign * coef
                coef = None
                sign = 1.0
            if m.group("op") == "-":
                sign = -sign
        elif m.group("num"):
            coef = float(m.group("num"))
        else:
            terms.append((m.group("name"), sign * (1.0 if coef is None else coef)))
            sign, coef = 1.0, None
    if coef is not None:
        const += sign * coef
    return terms, const


def _is_number(tok):
    try:
        float(tok)
    except ValueError:
        return False
    return True


def read_lp(fh, name="model"):
    """Parse a CPLEX LP file produced by :func:`write_lp`."""
    lp = LinearProgram(name)
    section = None
    buf = []
    items = []

    def flush():
        if buf:
            items.append((section, " ".join(buf)))
            buf.clear()

    for raw in fh:
        line = raw.split("\\", 1)[0].strip()
        if not line:
            continue
        key = line.lower()
        if key in _SECTION:
            flush()
            section = _SECTION[key]
            if section == "end":
                break
            continue
        if section in ("obj", "rows") and re.match(r"^[\w.\[\]]+\s*:", line) \
                and buf:
            flush()
        if section in ("bounds",):
            flush()
            items.append((section, line))
            continue
        if section in ("bin", "gen"):
            items.append((section, line))
            continue
        buf.append(line)
    flush()

    def col(nm):
        if not lp.has_col(nm):
            lp.add_var(nm)
        return lp.col(nm)

    obj_terms = []
    rows = []
    for sec, text in items:
        if sec == "obj":
            if ":" in text:
                text = text.split(":", 1)[1]
            terms, const = _parse_expr(text)
            obj_terms.extend(terms)
            lp.objective_offset += const
        elif sec == "rows":
            rname, body = text.split(":", 1)
            m = re.search(r"(<=|>=|=<|=>|<|>|=)", body)
            lhs, op, rhs = body[:m.start()], m.group(1), body[m.end():]
            sense = {"<=": LE, "=<": LE, "<": LE, ">=": GE, "=>": GE,
                     ">": GE, "=": EQ}[op]
            terms, const = _parse_expr(lhs)
            rows.append((rname.strip(), terms, sense, float(rhs) - const))
    for nm, v in obj_terms:
        c = col(nm)
        lp.cost[c] += v
    for rname, terms, sense, rhs in rows:
        lp.add_row(rname, [(col(nm), v) for nm, v in terms], sense, rhs)
    for sec, text in items:
        if sec == "bounds":
            _apply_bound(lp, col, text)
        elif sec in ("bin", "gen"):
            for nm in text.split():
                c = col(nm)
                lp.integer[c] = True
                if sec == "bin":
                    lp.col_lb[c] = max(lp.col_lb[c], 0.0)
                    lp.col_ub[c] = min(lp.col_ub[c], 1.0)
    return lp


def _bval(tok):
    tok = tok.strip().lower()
    if tok in ("+inf", "inf", "+infinity", "infinity"):
        return math.inf
    if tok in ("-inf", "-infinity"):
        return -math.inf
    return float(tok)


def _apply_bound(lp, col, text):
    parts = re.split(r"\s*(<=|>=|=)\s*", text.strip())
    if len(parts) == 5:
        lo, _, nm, _, hi = parts
        c = col(nm)
        lp.col_lb[c], lp.col_ub[c] = _bval(lo), _bval(hi)
        return
    if len(parts) == 3:
        a, op, b = parts
        if _is_number(a) or a.lower().lstrip("+-") in ("inf", "infinity"):
            a, b = b, a
            op = {"<=": ">=", ">=": "<=", "=": "="}[op]
        c = col(a)
        if op == "=":
            lp.col_lb[c] = lp.col_ub[c] = _bval(b)
        elif op == ">=":
            lp.col_lb[c] = _bval(b)
        else:
            lp.col_ub[c] = _bval(b)
        return
    if text.strip().endswith("free"):
        c = col(text.split()[0])
        lp.col_lb[c], lp.col_ub[c] = -math.inf, math.inf
        return
    raise ValueError(f"cannot parse bound {text!r}")

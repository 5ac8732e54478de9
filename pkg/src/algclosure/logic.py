"""First-order formulas with counting quantifiers over finite relational
structures.

Two evaluators are provided.  :func:`evaluate` is the direct Tarskian
recursion over assignments.  :func:`solutions` computes solution sets by
evaluating every subformula to a boolean table over its open variables with
numpy; the test suite cross-checks the two.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import count
from typing import Mapping, Sequence, Union

import numpy as np

from .structure import Signature, Structure

MAX_EVAL_SIZE = 64


class FormulaError(ValueError):
    pass


class FormulaSyntaxError(FormulaError):
    def __init__(self, msg, pos=None, text=None):
        if pos is not None and text is not None:
            line = text.count("\n", 0, pos) + 1
            col = pos - (text.rfind("\n", 0, pos) + 1) + 1
            msg = f"{msg} at line {line}, column {col}"
        super().__init__(msg)
        self.pos = pos


# -- AST ------------------------------------------------------------------------

@dataclass(frozen=True)
class Truth:
    pass


@dataclass(frozen=True)
class Falsity:
    pass


@dataclass(frozen=True)
class Equal:
    left: str
    right: str


@dataclass(frozen=True)
class Atom:
    relation: str
    args: tuple[str, ...]


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class CountExists:
    """``exists[cmp k] var. body`` with ``cmp`` one of ``=``, ``<=``, ``>=``."""
    cmp: str
    k: int
    var: str
    body: "Formula"


Formula = Union[Truth, Falsity, Equal, Atom, Not, And, Or, Implies, Exists, Forall, CountExists]

_BINARY = (And, Or, Implies)
_QUANT = (Exists, Forall, CountExists)


@dataclass(frozen=True)
class ParamFormula:
    """A formula ``name(x; y1..yk)`` with one solution variable and parameters."""
    name: str
    solution_var: str
    param_vars: tuple[str, ...]
    body: Formula

    @property
    def arity(self) -> int:
        return len(self.param_vars)

    def __str__(self):
        params = " " + ", ".join(self.param_vars) if self.param_vars else ""
        return f"def {self.name}({self.solution_var};{params}) = {format_formula(self.body)}"


def free_vars(f: Formula) -> frozenset:
    if isinstance(f, (Truth, Falsity)):
        return frozenset()
    if isinstance(f, Equal):
        return frozenset((f.left, f.right))
    if isinstance(f, Atom):
        return frozenset(f.args)
    if isinstance(f, Not):
        return free_vars(f.body)
    if isinstance(f, _BINARY):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, _QUANT):
        return free_vars(f.body) - {f.var}
    raise TypeError(f"not a formula: {f!r}")


def node_count(f: Formula) -> int:
    if isinstance(f, Not):
        return 1 + node_count(f.body)
    if isinstance(f, _BINARY):
        return 1 + node_count(f.left) + node_count(f.right)
    if isinstance(f, _QUANT):
        return 1 + node_count(f.body)
    return 1


# -- printing -----------------------------------------------------------------

_PREC = {Implies: 1, Or: 2, And: 3}
_OPS = {Implies: "->", Or: "|", And: "&"}


def format_formula(f: Formula) -> str:
    """Render ``f`` in the input grammar; ``parse_formula`` inverts it."""
    return _fmt(f, 0)


def _fmt(f, ctx):
    if isinstance(f, Truth):
        return "true"
    if isinstance(f, Falsity):
        return "false"
    if isinstance(f, Equal):
        s = f"{f.left} = {f.right}"
        return s
    if isinstance(f, Atom):
        return f"{f.relation}({','.join(f.args)})"
    if isinstance(f, Not):
        inner = _fmt(f.body, 4)
        return f"!{inner}" if isinstance(f.body, (Atom, Not, Truth, Falsity)) else f"!({_fmt(f.body, 0)})"
    if isinstance(f, _BINARY):
        p = _PREC[type(f)]
        # '->' is right associative, '&' and '|' left associative
        if isinstance(f, Implies):
            s = f"{_fmt(f.left, p + 1)} -> {_fmt(f.right, p)}"
        else:
            s = f"{_fmt(f.left, p)} {_OPS[type(f)]} {_fmt(f.right, p + 1)}"
        return f"({s})" if p < ctx else s
    if isinstance(f, _QUANT):
        if isinstance(f, Exists):
            head = "exists"
        elif isinstance(f, Forall):
            head = "forall"
        else:
            head = f"exists[{f.cmp}{f.k}]"
        s = f"{head} {f.var}. {_fmt(f.body, 0)}"
        return f"({s})" if ctx > 0 else s
    raise TypeError(f"not a formula: {f!r}")


# -- parsing ---------------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<arrow>->)
  | (?P<cmp><=|>=)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<int>\d+)
  | (?P<punct>[!&|().,=\[\];])
""", re.VERBOSE)

_KEYWORDS = {"true", "false", "exists", "forall", "def"}


def _tokenize(text):
    toks, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"syntax error: unexpected character {text[pos]!r}", pos, text)
        if m.lastgroup != "ws":
            toks.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    toks.append(("eof", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text, signature, offset_text=None):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.signature = signature

    def peek(self, k=0):
        return self.toks[self.i + k]

    def take(self, val=None, kind=None):
        tok = self.toks[self.i]
        if (val is not None and tok[1] != val) or (kind is not None and tok[0] != kind):
            want = repr(val) if val is not None else kind
            got = repr(tok[1]) if tok[1] else "end of input"
            raise FormulaSyntaxError(f"syntax error: expected {want}, got {got}", tok[2], self.text)
        self.i += 1
        return tok

    def var(self):
        tok = self.take(kind="ident")
        if tok[1] in _KEYWORDS:
            raise FormulaSyntaxError(f"syntax error: keyword {tok[1]!r} used as variable", tok[2], self.text)
        return tok

    def formula(self, bound):
        left = self.disj(bound)
        if self.peek()[1] == "->":
            self.take("->")
            return Implies(left, self.formula(bound))
        return left

    def disj(self, bound):
        f = self.conj(bound)
        while self.peek()[1] == "|":
            self.take("|")
            f = Or(f, self.conj(bound))
        return f

    def conj(self, bound):
        f = self.unary(bound)
        while self.peek()[1] == "&":
            self.take("&")
            f = And(f, self.unary(bound))
        return f

    def unary(self, bound):
        tok = self.peek()
        if tok[1] == "!":
            self.take("!")
            return Not(self.unary(bound))
        if tok[1] in ("exists", "forall"):
            return self.quantifier(bound)
        return self.atom(bound)

    def quantifier(self, bound):
        head = self.take()
        cmp_, k = None, None
        if head[1] == "exists" and self.peek()[1] == "[":
            self.take("[")
            ctok = self.take()
            if ctok[1] not in ("=", "<=", ">="):
                raise FormulaSyntaxError("syntax error: expected '=', '<=' or '>='", ctok[2], self.text)
            cmp_ = ctok[1]
            k = int(self.take(kind="int")[1])
            self.take("]")
        vtok = self.var()
        v = vtok[1]
        if v in bound:
            raise FormulaSyntaxError(f"variable shadowing: {v!r} is already bound", vtok[2], self.text)
        self.take(".")
        body = self.formula(bound | {v})
        if head[1] == "forall":
            return Forall(v, body)
        if cmp_ is None:
            return Exists(v, body)
        return CountExists(cmp_, k, v, body)

    def atom(self, bound):
        tok = self.peek()
        if tok[1] == "(":
            self.take("(")
            f = self.formula(bound)
            self.take(")")
            return f
        if tok[1] == "true":
            self.take()
            return Truth()
        if tok[1] == "false":
            self.take()
            return Falsity()
        if tok[0] == "ident" and self.peek(1)[1] == "(":
            name = self.take()[1]
            self.take("(")
            args = [self.var()[1]]
            while self.peek()[1] == ",":
                self.take(",")
                args.append(self.var()[1])
            self.take(")")
            if self.signature is not None:
                if not self.signature.has_relation(name):
                    raise FormulaSyntaxError(f"unknown relation {name!r}", tok[2], self.text)
                k = self.signature.arity(name)
                if k != len(args):
                    raise FormulaSyntaxError(
                        f"arity mismatch: {name} has arity {k}, got {len(args)} arguments",
                        tok[2], self.text)
            return Atom(name, tuple(args))
        left = self.var()[1]
        self.take("=")
        right = self.var()[1]
        return Equal(left, right)


def parse_formula(text: str, signature: Signature | None = None,
                  bound: frozenset = frozenset()) -> Formula:
    """Parse formula text.

    Precedence: ``!`` binds tightest, then ``&``, ``|``, ``->`` (right
    associative); quantifier bodies extend as far right as possible.
    ``bound`` lists variables already bound by an enclosing context; binding
    one of them again is rejected as shadowing.

    >>> parse_formula("exists[=2] z. E(x,z)")
    CountExists(cmp='=', k=2, var='z', body=Atom(relation='E', args=('x', 'z')))
    """
    p = _Parser(text, signature)
    f = p.formula(frozenset(bound))
    p.take(kind="eof")
    return f


_DEF = re.compile(r"\s*def\s+([A-Za-z_][A-Za-z0-9_]*)\s*\(\s*([A-Za-z_][A-Za-z0-9_]*)\s*;"
                  r"([^)]*)\)\s*=(.*)\Z", re.DOTALL)
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def parse_param_formula(line: str, signature: Signature | None = None) -> ParamFormula:
    m = _DEF.match(line)
    if m is None:
        raise FormulaSyntaxError(f"syntax error: expected 'def name(x; y1,...,yk) = formula', got {line.strip()!r}")
    name, xvar, params, body_text = m.groups()
    params = [p.strip() for p in params.split(",") if p.strip()]
    for p in params:
        if not _IDENT.match(p) or p in _KEYWORDS:
            raise FormulaSyntaxError(f"syntax error: bad parameter name {p!r}")
    header = [xvar] + params
    if len(set(header)) != len(header):
        raise FormulaSyntaxError(f"duplicate variable in header of {name!r}")
    try:
        body = parse_formula(body_text, signature, frozenset(header))
    except FormulaSyntaxError as exc:
        raise FormulaSyntaxError(f"in definition {name!r}: {exc}") from exc
    extra = free_vars(body) - set(header)
    if extra:
        raise FormulaError(f"definition {name!r}: free variables {sorted(extra)} not in header")
    return ParamFormula(name, xvar, tuple(params), body)


def parse_delta(text: str, signature: Signature | None = None) -> list[ParamFormula]:
    """Parse a Δ file: one ``def name(x; y1,...,yk) = formula`` per line."""
    out, names = [], set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        try:
            pf = parse_param_formula(line, signature)
        except FormulaError as exc:
            raise type(exc)(f"line {lineno}: {exc}") from exc
        if pf.name in names:
            raise FormulaError(f"line {lineno}: duplicate definition {pf.name!r}")
        names.add(pf.name)
        out.append(pf)
    return out


def format_delta(delta: Sequence[ParamFormula]) -> str:
    return "".join(str(pf) + "\n" for pf in delta)


# -- naive evaluation ------------------------------------------------------------

def evaluate(s: Structure, f: Formula, assignment: Mapping[str, int]) -> bool:
    """Truth of ``f`` in ``s`` under ``assignment`` by direct recursion."""
    missing = free_vars(f) - set(assignment)
    if missing:
        raise FormulaError(f"unassigned free variable(s): {sorted(missing)}")
    if s.size > MAX_EVAL_SIZE and _has_quantifier(f):
        raise FormulaError(f"structure size {s.size} exceeds evaluation cap {MAX_EVAL_SIZE}")
    return _eval(s, f, dict(assignment))


def _has_quantifier(f):
    if isinstance(f, _QUANT):
        return True
    if isinstance(f, Not):
        return _has_quantifier(f.body)
    if isinstance(f, _BINARY):
        return _has_quantifier(f.left) or _has_quantifier(f.right)
    return False


def _eval(s, f, env):
    if isinstance(f, Truth):
        return True
    if isinstance(f, Falsity):
        return False
    if isinstance(f, Equal):
        return env[f.left] == env[f.right]
    if isinstance(f, Atom):
        return tuple(env[v] for v in f.args) in s.relations[f.relation]
    if isinstance(f, Not):
        return not _eval(s, f.body, env)
    if isinstance(f, And):
        return _eval(s, f.left, env) and _eval(s, f.right, env)
    if isinstance(f, Or):
        return _eval(s, f.left, env) or _eval(s, f.right, env)
    if isinstance(f, Implies):
        return (not _eval(s, f.left, env)) or _eval(s, f.right, env)
    if isinstance(f, (Exists, Forall, CountExists)):
        saved = env.get(f.var)
        hits = 0
        for e in range(s.size):
            env[f.var] = e
            if _eval(s, f.body, env):
                hits += 1
                if isinstance(f, Exists):
                    break
            elif isinstance(f, Forall):
                break
        if saved is None:
            del env[f.var]
        else:
            env[f.var] = saved
        if isinstance(f, Exists):
            return hits > 0
        if isinstance(f, Forall):
            return hits == s.size
        return _compare(hits, f.cmp, f.k)
    raise TypeError(f"not a formula: {f!r}")


def _compare(n, cmp_, k):
    if cmp_ == "=":
        return n == k
    if cmp_ == "<=":
        return n <= k
    return n >= k


# -- table evaluation --------------------------------------------------------------

def _table(s, f, env):
    """Evaluate ``f`` to ``(vars, array)``: a boolean array with one axis per
    free variable of ``f`` not fixed by ``env``."""
    N = s.size
    if isinstance(f, Truth):
        return (), np.array(True)
    if isinstance(f, Falsity):
        return (), np.array(False)
    if isinstance(f, (Atom, Equal)):
        args = f.args if isinstance(f, Atom) else (f.left, f.right)
        base = s.arrays[f.relation] if isinstance(f, Atom) else np.eye(N, dtype=bool)
        open_ = tuple(dict.fromkeys(v for v in args if v not in env))
        if not open_:
            return (), np.array(base[tuple(env[v] for v in args)])
        grids = np.indices((N,) * len(open_), sparse=True)
        idx = tuple(env[v] if v in env else grids[open_.index(v)] for v in args)
        return open_, base[idx]
    if isinstance(f, Not):
        vs, arr = _table(s, f.body, env)
        return vs, ~arr
    if isinstance(f, _BINARY):
        lv, la = _table(s, f.left, env)
        rv, ra = _table(s, f.right, env)
        target = lv + tuple(v for v in rv if v not in lv)
        la, ra = _align(lv, la, target), _align(rv, ra, target)
        if isinstance(f, And):
            out = la & ra
        elif isinstance(f, Or):
            out = la | ra
        else:
            out = ~la | ra
        return target, np.broadcast_to(out, (N,) * len(target))
    if isinstance(f, _QUANT):
        inner_env = {k: v for k, v in env.items() if k != f.var}
        vs, arr = _table(s, f.body, inner_env)
        if f.var in vs:
            ax = vs.index(f.var)
            rest = vs[:ax] + vs[ax + 1:]
            if isinstance(f, Exists):
                return rest, arr.any(axis=ax)
            if isinstance(f, Forall):
                return rest, arr.all(axis=ax)
            counts = arr.sum(axis=ax)
        else:
            if isinstance(f, (Exists, Forall)):
                return vs, arr
            rest, counts = vs, arr.astype(np.int64) * N
        return rest, _compare(counts, f.cmp, f.k)
    raise TypeError(f"not a formula: {f!r}")


def _align(vs, arr, target):
    if vs == target:
        return arr
    missing = [v for v in target if v not in vs]
    arr = arr.reshape(arr.shape + (1,) * len(missing))
    order = list(vs) + missing
    return arr.transpose([order.index(v) for v in target])


def solutions(s: Structure, pf: ParamFormula, params: Sequence[int]) -> frozenset:
    """``{b : s |= body(b, params)}`` for a parameterized formula."""
    if len(params) != len(pf.param_vars):
        raise FormulaError(f"{pf.name} expects {len(pf.param_vars)} parameter(s), got {len(params)}")
    if s.size > MAX_EVAL_SIZE:
        raise FormulaError(f"structure size {s.size} exceeds evaluation cap {MAX_EVAL_SIZE}")
    env = dict(zip(pf.param_vars, params))
    vs, arr = _table(s, pf.body, env)
    if not vs:
        return frozenset(range(s.size)) if bool(arr) else frozenset()
    (only,) = vs
    assert only == pf.solution_var
    return frozenset(np.flatnonzero(arr).tolist())


def count_solutions(s: Structure, pf: ParamFormula, params: Sequence[int]) -> int:
    return len(solutions(s, pf, params))


# -- renaming --------------------------------------------------------------------

def rename(f: Formula, free_map: Mapping[str, str], fresh) -> Formula:
    """Rename free variables by ``free_map`` and every bound variable to a name
    drawn from the iterator ``fresh``; capture cannot occur if ``fresh``
    yields names unused elsewhere."""
    if isinstance(f, (Truth, Falsity)):
        return f
    if isinstance(f, Equal):
        return Equal(free_map.get(f.left, f.left), free_map.get(f.right, f.right))
    if isinstance(f, Atom):
        return Atom(f.relation, tuple(free_map.get(v, v) for v in f.args))
    if isinstance(f, Not):
        return Not(rename(f.body, free_map, fresh))
    if isinstance(f, _BINARY):
        return type(f)(rename(f.left, free_map, fresh), rename(f.right, free_map, fresh))
    new = next(fresh)
    body = rename(f.body, {**free_map, f.var: new}, fresh)
    if isinstance(f, CountExists):
        return CountExists(f.cmp, f.k, new, body)
    return type(f)(new, body)


def canonical(pf: ParamFormula) -> ParamFormula:
    """Alpha-normal form: solution variable ``x``, parameters ``y1..yk``, bound
    variables ``z1, z2, ...`` in binding order."""
    params = tuple(f"y{i}" for i in range(1, pf.arity + 1))
    free_map = dict(zip(pf.param_vars, params))
    free_map[pf.solution_var] = "x"
    body = rename(pf.body, free_map, (f"z{i}" for i in count(1)))
    return ParamFormula(pf.name, "x", params, body)


def same_formula(a: ParamFormula, b: ParamFormula) -> bool:
    """Syntactic identity up to renaming of variables (names ignored)."""
    ca, cb = canonical(a), canonical(b)
    return ca.param_vars == cb.param_vars and ca.body == cb.body

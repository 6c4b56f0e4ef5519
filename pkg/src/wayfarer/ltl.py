"""Trip constraints: a finite-trace temporal logic over trip state.

Constraints are temporal formulas interpreted over the finite sequence of
states a trip passes through. Atoms test the arriving mode or compare a
state variable (per-mode time or fare, overlay aggregates, the overlay
score at the current node, or the clock) against a bound. On top of the
boolean connectives the language has next (X), always (G), eventually (F)
and a sequencing connective `phi AFTER psi`: whenever the left side holds
at a non-final position, the right side must hold from the next position
on.

Two evaluation styles are provided:

* evaluate(formula, trajectory): direct recursive truth over a complete
  trajectory, clause by clause over suffixes.
* progress(formula, state, is_final): consume one state and return the
  obligation that the remaining suffix must satisfy, plus a three-valued
  verdict. A False verdict means no continuation can satisfy the original
  formula, which is what lets the planner prune mid-search.

Concrete syntax (see parse): `!`, `&`, `|`, `X`, `G`, `F`, infix `AFTER`,
atoms like `mode=bike`, `time(bike) >= 3600`, `fare(public) <= 2.50`,
`aux(crime,sum) < 10`, `aux_here(crime) <= 15`, `clock < 7200`, literals
`true`/`false`, parentheses; precedence `!` > `X,G,F` > `&` > `|` >
`AFTER` (right-associative).
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from wayfarer.errors import WayfarerError
from wayfarer.geodata import Mode
from wayfarer.pcf import StateVars

AUX_SCORE_TOLERANCE = 1e-9

AGGREGATES = ("sum", "max", "min", "avg")

_RESERVED_WORDS = frozenset(
    {"mode", "time", "fare", "aux", "aux_here", "clock", "true", "false", "AFTER", "X", "G", "F"}
)


class ConstraintSyntaxError(WayfarerError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnknownVariable(ConstraintSyntaxError):
    pass


class UnknownMode(ConstraintSyntaxError):
    pass


class UnsupportedProgression(WayfarerError):
    """The left side of AFTER may not contain temporal operators."""


class Verdict(enum.Enum):
    TRUE = "true"
    FALSE = "false"
    PENDING = "pending"


# ---------------------------------------------------------------------------
# State snapshots
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StateSnapshot:
    """One trajectory state: how we got here plus the running summary.

    mode is None for the initial state (nothing led to it), so mode atoms
    are false there. aux_here maps dataset name to the overlay score of
    the node this state sits on.
    """

    mode: Mode | None
    vars: StateVars
    aux_here: dict[str, float]


Trajectory = Sequence[StateSnapshot]


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------


class Formula:
    __slots__ = ()


@dataclass(frozen=True)
class TrueAtom(Formula):
    def __str__(self):
        return "true"


@dataclass(frozen=True)
class FalseAtom(Formula):
    def __str__(self):
        return "false"


TRUE = TrueAtom()
FALSE = FalseAtom()


@dataclass(frozen=True)
class ModeIs(Formula):
    mode: Mode

    def __str__(self):
        return f"mode={self.mode.value}"


@dataclass(frozen=True)
class VarRef:
    """A state-variable reference usable in comparisons.

    kind: one of time | fare | aux | aux_here | clock. time/fare carry the
    mode; aux carries (dataset, agg); aux_here carries the dataset.
    """

    kind: str
    mode: Mode | None = None
    dataset: str | None = None
    agg: str | None = None

    def __str__(self):
        if self.kind in ("time", "fare"):
            return f"{self.kind}({self.mode.value})"
        if self.kind == "aux":
            return f"aux({self.dataset},{self.agg})"
        if self.kind == "aux_here":
            return f"aux_here({self.dataset})"
        return "clock"


@dataclass(frozen=True)
class VarCmp(Formula):
    var: VarRef
    op: str                  # one of < <= = >= >
    bound: int | float       # int seconds/cents, float for aux scores

    def __str__(self):
        if self.var.kind == "fare":
            bound = f"{self.bound / 100:.2f}"
        elif self.var.kind in ("time", "clock"):
            bound = str(self.bound)
        else:
            bound = repr(float(self.bound))
        return f"{self.var} {self.op} {bound}"


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula

    def __str__(self):
        return f"!({self.arg})"


@dataclass(frozen=True)
class And(Formula):
    args: tuple[Formula, ...]

    def __str__(self):
        return "(" + " & ".join(str(a) for a in self.args) + ")"


@dataclass(frozen=True)
class Or(Formula):
    args: tuple[Formula, ...]

    def __str__(self):
        return "(" + " | ".join(str(a) for a in self.args) + ")"


@dataclass(frozen=True)
class Next(Formula):
    arg: Formula

    def __str__(self):
        return f"X({self.arg})"


@dataclass(frozen=True)
class Always(Formula):
    arg: Formula

    def __str__(self):
        return f"G({self.arg})"


@dataclass(frozen=True)
class Eventually(Formula):
    arg: Formula

    def __str__(self):
        return f"F({self.arg})"


@dataclass(frozen=True)
class After(Formula):
    trigger: Formula
    obligation: Formula

    def __str__(self):
        return f"({self.trigger} AFTER {self.obligation})"


_CLASS_RANK = {
    TrueAtom: 0,
    FalseAtom: 1,
    ModeIs: 2,
    VarCmp: 3,
    Not: 4,
    Next: 5,
    Always: 6,
    Eventually: 7,
    And: 8,
    Or: 9,
    After: 10,
}


@lru_cache(maxsize=None)
def _sort_key(f: Formula):
    rank = _CLASS_RANK[type(f)]
    if isinstance(f, (TrueAtom, FalseAtom)):
        return (rank,)
    if isinstance(f, ModeIs):
        return (rank, f.mode.value)
    if isinstance(f, VarCmp):
        v = f.var
        return (rank, v.kind, v.mode.value if v.mode else "", v.dataset or "", v.agg or "",
                f.op, float(f.bound))
    if isinstance(f, (Not, Next, Always, Eventually)):
        return (rank, _sort_key(f.arg))
    if isinstance(f, (And, Or)):
        return (rank, tuple(_sort_key(a) for a in f.args))
    return (rank, _sort_key(f.trigger), _sort_key(f.obligation))


def conj(*formulas: Formula) -> Formula:
    """Canonical conjunction: flattened, deduplicated, sorted, folded."""
    seen: dict[Formula, None] = {}
    for f in formulas:
        if isinstance(f, FalseAtom):
            return FALSE
        if isinstance(f, TrueAtom):
            continue
        if isinstance(f, And):
            for a in f.args:
                if isinstance(a, FalseAtom):
                    return FALSE
                seen.setdefault(a, None)
        else:
            seen.setdefault(f, None)
    args = sorted(seen, key=_sort_key)
    if not args:
        return TRUE
    if len(args) == 1:
        return args[0]
    return And(tuple(args))


def disj(*formulas: Formula) -> Formula:
    """Canonical disjunction, dual of conj."""
    seen: dict[Formula, None] = {}
    for f in formulas:
        if isinstance(f, TrueAtom):
            return TRUE
        if isinstance(f, FalseAtom):
            continue
        if isinstance(f, Or):
            for a in f.args:
                if isinstance(a, TrueAtom):
                    return TRUE
                seen.setdefault(a, None)
        else:
            seen.setdefault(f, None)
    args = sorted(seen, key=_sort_key)
    if not args:
        return FALSE
    if len(args) == 1:
        return args[0]
    return Or(tuple(args))


def neg(f: Formula) -> Formula:
    if isinstance(f, TrueAtom):
        return FALSE
    if isinstance(f, FalseAtom):
        return TRUE
    if isinstance(f, Not):
        return f.arg
    return Not(f)


def is_state_formula(f: Formula) -> bool:
    """True when f contains no temporal operator."""
    if isinstance(f, (TrueAtom, FalseAtom, ModeIs, VarCmp)):
        return True
    if isinstance(f, Not):
        return is_state_formula(f.arg)
    if isinstance(f, (And, Or)):
        return all(is_state_formula(a) for a in f.args)
    return False


def iter_atoms(f: Formula):
    """Yield every ModeIs / VarCmp atom in f (with repeats)."""
    if isinstance(f, (ModeIs, VarCmp)):
        yield f
    elif isinstance(f, (Not, Next, Always, Eventually)):
        yield from iter_atoms(f.arg)
    elif isinstance(f, (And, Or)):
        for a in f.args:
            yield from iter_atoms(a)
    elif isinstance(f, After):
        yield from iter_atoms(f.trigger)
        yield from iter_atoms(f.obligation)


def referenced_datasets(f: Formula) -> set[str]:
    out: set[str] = set()
    for atom in iter_atoms(f):
        if isinstance(atom, VarCmp) and atom.var.dataset:
            out.add(atom.var.dataset)
    return out


# ---------------------------------------------------------------------------
# Atom truth
# ---------------------------------------------------------------------------


def var_value(var: VarRef, snap: StateSnapshot) -> int | float:
    if var.kind == "time":
        return snap.vars.times.get(var.mode, 0)
    if var.kind == "fare":
        return snap.vars.fares_cents.get(var.mode, 0)
    if var.kind == "clock":
        return snap.vars.clock
    if var.kind == "aux_here":
        return snap.aux_here.get(var.dataset, 0.0)
    totals = snap.vars.aux.get(var.dataset)
    if totals is None:
        return 0.0
    return getattr(totals, var.agg)


def _compare(value, op: str, bound, tolerance: float) -> bool:
    if op == "=":
        return abs(value - bound) <= tolerance if tolerance else value == bound
    if op == "<=":
        return value <= bound + tolerance
    if op == "<":
        return value < bound - tolerance
    if op == ">=":
        return value >= bound - tolerance
    return value > bound + tolerance


def atom_truth(atom: Formula, snap: StateSnapshot) -> bool:
    if isinstance(atom, ModeIs):
        return snap.mode == atom.mode
    if isinstance(atom, VarCmp):
        tol = AUX_SCORE_TOLERANCE if atom.var.kind in ("aux", "aux_here") else 0.0
        return _compare(var_value(atom.var, snap), atom.op, atom.bound, tol)
    raise TypeError(f"not an atom: {atom!r}")


def state_truth(f: Formula, snap: StateSnapshot) -> bool:
    """Truth of a state formula at a single state."""
    if isinstance(f, TrueAtom):
        return True
    if isinstance(f, FalseAtom):
        return False
    if isinstance(f, (ModeIs, VarCmp)):
        return atom_truth(f, snap)
    if isinstance(f, Not):
        return not state_truth(f.arg, snap)
    if isinstance(f, And):
        return all(state_truth(a, snap) for a in f.args)
    if isinstance(f, Or):
        return any(state_truth(a, snap) for a in f.args)
    raise UnsupportedProgression(f"not a state formula: {f}")


# ---------------------------------------------------------------------------
# Direct evaluation over a full trajectory
# ---------------------------------------------------------------------------


def evaluate(f: Formula, trajectory: Trajectory) -> bool:
    """Truth of f over the whole trajectory.

    Atoms read the first state; temporal operators quantify over suffixes.
    X at the last state is false (there is no next state). The AFTER
    clause checks every non-final position i: if the suffix from i
    satisfies the trigger, the suffix from i+1 must satisfy the
    obligation.
    """
    if not trajectory:
        raise ValueError("trajectory must contain at least the initial state")
    n = len(trajectory)
    if isinstance(f, TrueAtom):
        return True
    if isinstance(f, FalseAtom):
        return False
    if isinstance(f, (ModeIs, VarCmp)):
        return atom_truth(f, trajectory[0])
    if isinstance(f, Not):
        return not evaluate(f.arg, trajectory)
    if isinstance(f, And):
        return all(evaluate(a, trajectory) for a in f.args)
    if isinstance(f, Or):
        return any(evaluate(a, trajectory) for a in f.args)
    if isinstance(f, Next):
        return n >= 2 and evaluate(f.arg, trajectory[1:])
    if isinstance(f, Always):
        return all(evaluate(f.arg, trajectory[i:]) for i in range(n))
    if isinstance(f, Eventually):
        return any(evaluate(f.arg, trajectory[i:]) for i in range(n))
    if isinstance(f, After):
        return all(
            not evaluate(f.trigger, trajectory[i:]) or evaluate(f.obligation, trajectory[i + 1:])
            for i in range(n - 1)
        )
    raise TypeError(f"unknown formula node {type(f).__name__}")


# ---------------------------------------------------------------------------
# Progression
# ---------------------------------------------------------------------------


def _progress_formula(f: Formula, snap: StateSnapshot, is_final: bool) -> Formula:
    if isinstance(f, (TrueAtom, FalseAtom)):
        return f
    if isinstance(f, (ModeIs, VarCmp)):
        return TRUE if atom_truth(f, snap) else FALSE
    if isinstance(f, Not):
        return neg(_progress_formula(f.arg, snap, is_final))
    if isinstance(f, And):
        return conj(*(_progress_formula(a, snap, is_final) for a in f.args))
    if isinstance(f, Or):
        return disj(*(_progress_formula(a, snap, is_final) for a in f.args))
    if isinstance(f, Next):
        return FALSE if is_final else f.arg
    if isinstance(f, Always):
        now = _progress_formula(f.arg, snap, is_final)
        return now if is_final else conj(now, f)
    if isinstance(f, Eventually):
        now = _progress_formula(f.arg, snap, is_final)
        return now if is_final else disj(now, f)
    if isinstance(f, After):
        if not is_state_formula(f.trigger):
            raise UnsupportedProgression(
                f"AFTER trigger must be a state formula: {f.trigger}"
            )
        if is_final:
            return TRUE
        if state_truth(f.trigger, snap):
            return conj(f.obligation, f)
        return f
    raise TypeError(f"unknown formula node {type(f).__name__}")


def progress(f: Formula, snap: StateSnapshot, is_final: bool) -> tuple[Verdict, Formula]:
    """Consume one state; return (verdict, obligation on the rest).

    The residual is interpreted from the next state on. Verdict TRUE
    means every continuation satisfies the original formula, FALSE means
    none does, PENDING means the prefix has not decided it. With
    is_final=True the verdict is always TRUE or FALSE.
    """
    residual = _progress_formula(f, snap, is_final)
    if isinstance(residual, TrueAtom):
        return Verdict.TRUE, residual
    if isinstance(residual, FalseAtom):
        return Verdict.FALSE, residual
    return Verdict.PENDING, residual


# ---------------------------------------------------------------------------
# Concrete syntax
# ---------------------------------------------------------------------------


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<lparen>\()|(?P<rparen>\))|(?P<amp>&)|(?P<pipe>\|)|(?P<bang>!)"
    r"|(?P<cmp><=|>=|=|<|>)|(?P<comma>,)"
    r"|(?P<number>-?\d+(?:\.\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*))"
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.lastgroup is None:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            bad_at = len(text) - len(stripped)
            raise ConstraintSyntaxError(f"unexpected character {text[bad_at]!r}", bad_at)
        tokens.append(_Token(m.lastgroup, m.group(m.lastgroup), m.start(m.lastgroup)))
        pos = m.end()
    tokens.append(_Token("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        tok = self.tokens[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def expect(self, kind: str, what: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ConstraintSyntaxError(f"expected {what}", tok.pos)
        return self.advance()

    def parse(self) -> Formula:
        f = self.parse_formula()
        tok = self.peek()
        if tok.kind != "eof":
            raise ConstraintSyntaxError(f"unexpected trailing {tok.text!r}", tok.pos)
        return f

    def parse_formula(self) -> Formula:
        left = self.parse_or()
        tok = self.peek()
        if tok.kind == "ident" and tok.text == "AFTER":
            self.advance()
            if not is_state_formula(left):
                raise UnsupportedProgression(
                    f"AFTER trigger must be a state formula: {left}"
                )
            right = self.parse_formula()   # right-associative
            return After(left, right)
        return left

    def parse_or(self) -> Formula:
        args = [self.parse_and()]
        while self.peek().kind == "pipe":
            self.advance()
            args.append(self.parse_and())
        return disj(*args) if len(args) > 1 else args[0]

    def parse_and(self) -> Formula:
        args = [self.parse_unary()]
        while self.peek().kind == "amp":
            self.advance()
            args.append(self.parse_unary())
        return conj(*args) if len(args) > 1 else args[0]

    def parse_unary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "bang":
            self.advance()
            return neg(self.parse_unary())
        if tok.kind == "ident" and tok.text in ("X", "G", "F"):
            self.advance()
            arg = self.parse_unary()
            return {"X": Next, "G": Always, "F": Eventually}[tok.text](arg)
        return self.parse_primary()

    def parse_primary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "lparen":
            self.advance()
            f = self.parse_formula()
            self.expect("rparen", "')'")
            return f
        if tok.kind == "ident":
            return self.parse_atom()
        raise ConstraintSyntaxError("expected a formula", tok.pos)

    def parse_mode(self) -> Mode:
        tok = self.expect("ident", "a mode name")
        try:
            return Mode(tok.text)
        except ValueError:
            raise UnknownMode(f"unknown mode {tok.text!r}", tok.pos) from None

    def parse_dataset_name(self) -> str:
        tok = self.expect("ident", "a dataset name")
        if tok.text in _RESERVED_WORDS:
            raise ConstraintSyntaxError(f"{tok.text!r} is reserved", tok.pos)
        return tok.text

    def parse_cmp_op(self) -> str:
        return self.expect("cmp", "a comparison operator").text

    def parse_number(self, *, integer: bool) -> tuple[float, int]:
        tok = self.expect("number", "a number")
        if integer and "." in tok.text:
            raise ConstraintSyntaxError("expected a whole number", tok.pos)
        return float(tok.text), tok.pos

    def parse_atom(self) -> Formula:
        tok = self.advance()
        name = tok.text
        if name == "true":
            return TRUE
        if name == "false":
            return FALSE
        if name == "mode":
            op = self.expect("cmp", "'='")
            if op.text != "=":
                raise ConstraintSyntaxError("mode only supports '='", op.pos)
            return ModeIs(self.parse_mode())
        if name in ("time", "fare"):
            self.expect("lparen", "'('")
            mode = self.parse_mode()
            self.expect("rparen", "')'")
            op = self.parse_cmp_op()
            if name == "time":
                value, _ = self.parse_number(integer=True)
                return VarCmp(VarRef("time", mode=mode), op, int(value))
            value, _ = self.parse_number(integer=False)
            return VarCmp(VarRef("fare", mode=mode), op, round(value * 100))
        if name == "aux":
            self.expect("lparen", "'('")
            dataset = self.parse_dataset_name()
            self.expect("comma", "','")
            agg = self.expect("ident", "an aggregate name")
            if agg.text not in AGGREGATES:
                raise UnknownVariable(
                    f"unknown aggregate {agg.text!r}, expected one of {AGGREGATES}", agg.pos
                )
            self.expect("rparen", "')'")
            op = self.parse_cmp_op()
            value, _ = self.parse_number(integer=False)
            return VarCmp(VarRef("aux", dataset=dataset, agg=agg.text), op, float(value))
        if name == "aux_here":
            self.expect("lparen", "'('")
            dataset = self.parse_dataset_name()
            self.expect("rparen", "')'")
            op = self.parse_cmp_op()
            value, _ = self.parse_number(integer=False)
            return VarCmp(VarRef("aux_here", dataset=dataset), op, float(value))
        if name == "clock":
            op = self.parse_cmp_op()
            value, _ = self.parse_number(integer=True)
            return VarCmp(VarRef("clock"), op, int(value))
        raise UnknownVariable(f"unknown variable {name!r}", tok.pos)


def parse(text: str) -> Formula:
    """Parse constraint text into a canonical formula.

    Raises ConstraintSyntaxError / UnknownVariable / UnknownMode with the
    character position, and UnsupportedProgression for a temporal AFTER
    trigger.
    """
    return _Parser(text).parse()


def to_text(f: Formula) -> str:
    """Canonical text form; parse(to_text(f)) == f for canonical f."""
    return str(f)


# ---------------------------------------------------------------------------
# JSON AST mirror
# ---------------------------------------------------------------------------


def to_json(f: Formula):
    if isinstance(f, TrueAtom):
        return {"type": "true"}
    if isinstance(f, FalseAtom):
        return {"type": "false"}
    if isinstance(f, ModeIs):
        return {"type": "mode_is", "mode": f.mode.value}
    if isinstance(f, VarCmp):
        doc = {"type": "cmp", "var": f.var.kind, "op": f.op}
        if f.var.mode:
            doc["mode"] = f.var.mode.value
        if f.var.dataset:
            doc["dataset"] = f.var.dataset
        if f.var.agg:
            doc["agg"] = f.var.agg
        doc["value"] = f.bound / 100 if f.var.kind == "fare" else f.bound
        return doc
    if isinstance(f, Not):
        return {"type": "not", "arg": to_json(f.arg)}
    if isinstance(f, And):
        return {"type": "and", "args": [to_json(a) for a in f.args]}
    if isinstance(f, Or):
        return {"type": "or", "args": [to_json(a) for a in f.args]}
    if isinstance(f, Next):
        return {"type": "next", "arg": to_json(f.arg)}
    if isinstance(f, Always):
        return {"type": "always", "arg": to_json(f.arg)}
    if isinstance(f, Eventually):
        return {"type": "eventually", "arg": to_json(f.arg)}
    if isinstance(f, After):
        return {
            "type": "after",
            "trigger": to_json(f.trigger),
            "obligation": to_json(f.obligation),
        }
    raise TypeError(f"unknown formula node {type(f).__name__}")


def from_json(doc) -> Formula:
    """Parse the JSON AST mirror; same canonicalization as parse()."""

    def fail(msg: str):
        raise ConstraintSyntaxError(f"bad constraint AST: {msg}", 0)

    if not isinstance(doc, dict) or "type" not in doc:
        fail("each node needs a 'type'")
    t = doc["type"]
    if t == "true":
        return TRUE
    if t == "false":
        return FALSE
    if t == "mode_is":
        try:
            return ModeIs(Mode(doc["mode"]))
        except (KeyError, ValueError):
            fail(f"bad mode in {doc}")
    if t == "cmp":
        kind = doc.get("var")
        op = doc.get("op")
        if op not in ("<", "<=", "=", ">=", ">"):
            fail(f"bad op {op!r}")
        try:
            value = doc["value"]
        except KeyError:
            fail("cmp needs 'value'")
        if kind in ("time", "fare"):
            try:
                mode = Mode(doc["mode"])
            except (KeyError, ValueError):
                fail(f"bad mode in {doc}")
            if kind == "time":
                return VarCmp(VarRef("time", mode=mode), op, int(value))
            return VarCmp(VarRef("fare", mode=mode), op, round(float(value) * 100))
        if kind == "aux":
            if doc.get("agg") not in AGGREGATES:
                fail(f"bad aggregate in {doc}")
            if not doc.get("dataset"):
                fail("aux needs 'dataset'")
            return VarCmp(
                VarRef("aux", dataset=doc["dataset"], agg=doc["agg"]), op, float(value)
            )
        if kind == "aux_here":
            if not doc.get("dataset"):
                fail("aux_here needs 'dataset'")
            return VarCmp(VarRef("aux_here", dataset=doc["dataset"]), op, float(value))
        if kind == "clock":
            return VarCmp(VarRef("clock"), op, int(value))
        fail(f"unknown variable {kind!r}")
    if t == "not":
        return neg(from_json(doc.get("arg")))
    if t in ("and", "or"):
        args = doc.get("args")
        if not isinstance(args, list) or not args:
            fail(f"{t} needs non-empty 'args'")
        parts = [from_json(a) for a in args]
        return conj(*parts) if t == "and" else disj(*parts)
    if t in ("next", "always", "eventually"):
        arg = from_json(doc.get("arg"))
        return {"next": Next, "always": Always, "eventually": Eventually}[t](arg)
    if t == "after":
        trigger = from_json(doc.get("trigger"))
        if not is_state_formula(trigger):
            raise UnsupportedProgression(
                f"AFTER trigger must be a state formula: {trigger}"
            )
        return After(trigger, from_json(doc.get("obligation")))
    fail(f"unknown node type {t!r}")

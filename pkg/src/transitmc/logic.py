"""Formula ASTs, parser, and printer for run/flow specifications.

One node algebra covers all three formula layers:

* LTL run formulas: Atom/Bool/Not/And/Or/Next/Until/Release.
* CTL* state formulas: the above plus the path quantifiers Exists/Forall.
* Run-level specifications: boolean combinations of LTL formulas and flow
  formulas Flow(Φ), where Φ is a CTL* state formula quantifying over all
  flow chains.

Derived operators are expanded during parsing: `a -> b` becomes
`!a | b`, `a <-> b` its two-sided expansion, `F a` becomes `true U a`,
and `G a` becomes `false R a`. The printer re-sugars F/G, so printing and
reparsing is the identity on ASTs.

A CTL* path formula written directly under the flow quantifier (e.g.
`A (p U q)`) is normalized to the state formula `A(p U q)`: all chains from
a root satisfy a path formula iff the root satisfies its universal closure,
because the chains from a root are exactly the path suffixes at the root.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union


class FormulaError(ValueError):
    """Raised for unparsable or ill-formed formulas."""


@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class Bool:
    value: bool


@dataclass(frozen=True)
class Not:
    sub: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Next:
    sub: "Formula"


@dataclass(frozen=True)
class Until:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Release:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Exists:
    """CTL* existential path quantifier."""
    sub: "Formula"


@dataclass(frozen=True)
class Forall:
    """CTL* universal path quantifier."""
    sub: "Formula"


@dataclass(frozen=True)
class Flow:
    """Run-level quantifier over all flow chains (written `A` at top level)."""
    sub: "Formula"


Formula = Union[Atom, Bool, Not, And, Or, Next, Until, Release,
                Exists, Forall, Flow]
LtlFormula = Formula
CtlStarFormula = Formula
FlowCtlStarFormula = Formula

TRUE = Bool(True)
FALSE = Bool(False)


def conj(parts) -> Formula:
    parts = list(parts)
    if not parts:
        return TRUE
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(parts) -> Formula:
    parts = list(parts)
    if not parts:
        return FALSE
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def implies(a: Formula, b: Formula) -> Formula:
    return Or(Not(a), b)


def finally_(f: Formula) -> Formula:
    return Until(TRUE, f)


def globally(f: Formula) -> Formula:
    return Release(FALSE, f)


# -- tokenizer ---------------------------------------------------------

_KEYWORDS = {"X", "U", "R", "F", "G", "A", "E"}
_IDENT_START = re.compile(r"[A-Za-z_]")
_IDENT_CONT = set("ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz"
                  "0123456789_>[],-")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if _IDENT_START.match(c):
            j = i + 1
            while j < n and text[j] in _IDENT_CONT:
                # '-' only continues an identifier when not starting '->'
                if text[j] == "-" and j + 1 < n and text[j + 1] == ">":
                    break
                j += 1
            word = text[i:j]
            if word in _KEYWORDS:
                tokens.append(("op", word, i))
            elif word in ("true", "false"):
                tokens.append(("bool", word, i))
            else:
                tokens.append(("ident", word, i))
            i = j
        elif text.startswith("<->", i):
            tokens.append(("op", "<->", i))
            i += 3
        elif text.startswith("->", i):
            tokens.append(("op", "->", i))
            i += 2
        elif c in "!&|()":
            tokens.append(("op", c, i))
            i += 1
        else:
            raise FormulaError("unexpected character %r at offset %d" % (c, i))
    return tokens


# -- parser ------------------------------------------------------------
#
# precedence: unary (including quantifiers) > U/R > & > | > -> (right assoc)


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        if self.pos < len(self.tokens):
            return self.tokens[self.pos]
        return ("eof", "", -1)

    def take(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def expect_op(self, op):
        kind, val, at = self.take()
        if kind != "op" or val != op:
            raise FormulaError("expected %r, found %r" % (op, val or "end of input"))

    def at_op(self, *ops):
        kind, val, _ = self.peek()
        return kind == "op" and val in ops

    def parse(self) -> Formula:
        f = self.parse_implies()
        kind, val, at = self.peek()
        if kind != "eof":
            raise FormulaError("trailing input at offset %d: %r" % (at, val))
        return f

    def parse_implies(self) -> Formula:
        left = self.parse_or()
        if self.at_op("->"):
            self.take()
            right = self.parse_implies()
            return _RawImplies(left, right)
        if self.at_op("<->"):
            self.take()
            right = self.parse_implies()
            return _RawIff(left, right)
        return left

    def parse_or(self) -> Formula:
        f = self.parse_and()
        while self.at_op("|"):
            self.take()
            f = Or(f, self.parse_and())
        return f

    def parse_and(self) -> Formula:
        f = self.parse_untils()
        while self.at_op("&"):
            self.take()
            f = And(f, self.parse_untils())
        return f

    def parse_untils(self) -> Formula:
        f = self.parse_unary()
        if self.at_op("U"):
            self.take()
            return Until(f, self.parse_untils())
        if self.at_op("R"):
            self.take()
            return Release(f, self.parse_untils())
        return f

    def parse_unary(self) -> Formula:
        kind, val, at = self.peek()
        if kind == "op":
            if val == "!":
                self.take()
                return Not(self.parse_unary())
            if val == "X":
                self.take()
                return Next(self.parse_unary())
            if val == "F":
                self.take()
                return finally_(self.parse_unary())
            if val == "G":
                self.take()
                return globally(self.parse_unary())
            if val == "A":
                self.take()
                return Forall(self.parse_unary())
            if val == "E":
                self.take()
                return Exists(self.parse_unary())
            if val == "(":
                self.take()
                f = self.parse_implies()
                self.expect_op(")")
                return f
        if kind == "ident":
            self.take()
            return Atom(val)
        if kind == "bool":
            self.take()
            return Bool(val == "true")
        raise FormulaError("unexpected token %r at offset %d" % (val or "end of input", at))


# implication/iff survive raw parsing so the run-level classifier can insist
# on a flow-free premise before they are expanded away


@dataclass(frozen=True)
class _RawImplies:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class _RawIff:
    left: Formula
    right: Formula


def _contains_quantifier(f) -> bool:
    match f:
        case Atom() | Bool():
            return False
        case Not(sub=s) | Next(sub=s):
            return _contains_quantifier(s)
        case And(left=l, right=r) | Or(left=l, right=r) | Until(left=l, right=r) \
                | Release(left=l, right=r) | _RawImplies(left=l, right=r) \
                | _RawIff(left=l, right=r):
            return _contains_quantifier(l) or _contains_quantifier(r)
        case Exists() | Forall():
            return True
    raise FormulaError("unexpected node %r" % (f,))


def _is_state_formula(f) -> bool:
    match f:
        case Atom() | Bool() | Exists() | Forall():
            return True
        case Not(sub=s):
            return _is_state_formula(s)
        case And(left=l, right=r) | Or(left=l, right=r) | _RawImplies(left=l, right=r) \
                | _RawIff(left=l, right=r):
            return _is_state_formula(l) and _is_state_formula(r)
        case Next() | Until() | Release():
            return False
    raise FormulaError("unexpected node %r" % (f,))


def _classify_run(f) -> Formula:
    """Turn top-level universal quantifiers into Flow nodes and validate."""
    match f:
        case And(left=l, right=r):
            return And(_classify_run(l), _classify_run(r))
        case Or(left=l, right=r):
            return Or(_classify_run(l), _classify_run(r))
        case _RawImplies(left=l, right=r):
            if _contains_quantifier(l):
                raise FormulaError("premise of -> must be a run (LTL) formula")
            return _RawImplies(l, _classify_run(r))
        case Forall(sub=body):
            if not _is_state_formula(body):
                body = Forall(body)
            return Flow(body)
        case Exists():
            raise FormulaError("flow formulas are universally quantified; "
                               "E is only a path quantifier inside a flow formula")
        case _:
            if _contains_quantifier(f):
                raise FormulaError(
                    "a flow formula A Φ may only appear under conjunction, "
                    "disjunction, or the conclusion of ->")
            return f


def _expand(f) -> Formula:
    match f:
        case Atom() | Bool():
            return f
        case Not(sub=s):
            return Not(_expand(s))
        case Next(sub=s):
            return Next(_expand(s))
        case And(left=l, right=r):
            return And(_expand(l), _expand(r))
        case Or(left=l, right=r):
            return Or(_expand(l), _expand(r))
        case Until(left=l, right=r):
            return Until(_expand(l), _expand(r))
        case Release(left=l, right=r):
            return Release(_expand(l), _expand(r))
        case Exists(sub=s):
            return Exists(_expand(s))
        case Forall(sub=s):
            return Forall(_expand(s))
        case Flow(sub=s):
            return Flow(_expand(s))
        case _RawImplies(left=l, right=r):
            return Or(Not(_expand(l)), _expand(r))
        case _RawIff(left=l, right=r):
            l, r = _expand(l), _expand(r)
            return And(Or(Not(l), r), Or(Not(r), l))
    raise FormulaError("unexpected node %r" % (f,))


def parse_formula(text: str) -> FlowCtlStarFormula:
    """Parse a run-level specification (LTL parts plus A-quantified flows)."""
    raw = _Parser(_tokenize(text)).parse()
    return _expand(_classify_run(raw))


def parse_ltl(text: str) -> LtlFormula:
    """Parse a pure LTL formula (no quantifiers allowed)."""
    raw = _Parser(_tokenize(text)).parse()
    if _contains_quantifier(raw):
        raise FormulaError("quantifiers are not allowed in an LTL formula")
    return _expand(raw)


def parse_subformula(text: str) -> Formula:
    """Parse a formula fragment without run-level classification.

    Used for template arguments, which may be atoms or small state/path
    formulas that end up nested inside a generated specification.
    """
    return _expand(_Parser(_tokenize(text)).parse())


# -- printer -----------------------------------------------------------

_PREC_OR = 1
_PREC_AND = 2
_PREC_UNTIL = 3
_PREC_UNARY = 4
_PREC_ATOM = 5


def _prec(f: Formula) -> int:
    match f:
        case Atom() | Bool():
            return _PREC_ATOM
        case Or():
            return _PREC_OR
        case And():
            return _PREC_AND
        case Until(left=Bool(value=True)):
            return _PREC_UNARY  # printed as F x
        case Release(left=Bool(value=False)):
            return _PREC_UNARY  # printed as G x
        case Until() | Release():
            return _PREC_UNTIL
        case _:
            return _PREC_UNARY


def _wrap(f: Formula, minimum: int) -> str:
    text = to_text(f)
    if _prec(f) < minimum:
        return "(%s)" % text
    return text


def to_text(f: Formula) -> str:
    """Render a formula; parse_formula(to_text(f)) == f."""
    match f:
        case Atom(name=n):
            return n
        case Bool(value=v):
            return "true" if v else "false"
        case Not(sub=s):
            return "!%s" % _wrap(s, _PREC_UNARY)
        case Next(sub=s):
            return "X %s" % _wrap(s, _PREC_UNARY)
        case Until(left=Bool(value=True), right=r):
            return "F %s" % _wrap(r, _PREC_UNARY)
        case Release(left=Bool(value=False), right=r):
            return "G %s" % _wrap(r, _PREC_UNARY)
        case Until(left=l, right=r):
            # U is parsed right-associatively, so a U-shaped left child needs
            # parentheses while the right child does not
            return "%s U %s" % (_wrap(l, _PREC_UNARY), _wrap(r, _PREC_UNTIL))
        case Release(left=l, right=r):
            return "%s R %s" % (_wrap(l, _PREC_UNARY), _wrap(r, _PREC_UNTIL))
        case And(left=l, right=r):
            return "%s & %s" % (_wrap(l, _PREC_AND), _wrap(r, _PREC_AND + 1))
        case Or(left=l, right=r):
            return "%s | %s" % (_wrap(l, _PREC_OR), _wrap(r, _PREC_OR + 1))
        case Exists(sub=s):
            return "E %s" % _wrap(s, _PREC_UNARY)
        case Forall(sub=s):
            return "A %s" % _wrap(s, _PREC_UNARY)
        case Flow(sub=s):
            return "A %s" % _wrap(s, _PREC_UNARY)
    raise FormulaError("unexpected node %r" % (f,))


# -- inspection helpers ------------------------------------------------


def atoms(f: Formula) -> frozenset:
    match f:
        case Atom(name=n):
            return frozenset({n})
        case Bool():
            return frozenset()
        case Not(sub=s) | Next(sub=s) | Exists(sub=s) | Forall(sub=s) | Flow(sub=s):
            return atoms(s)
        case And(left=l, right=r) | Or(left=l, right=r) | Until(left=l, right=r) \
                | Release(left=l, right=r):
            return atoms(l) | atoms(r)
    raise FormulaError("unexpected node %r" % (f,))


def size(f: Formula) -> int:
    match f:
        case Atom() | Bool():
            return 1
        case Not(sub=s) | Next(sub=s) | Exists(sub=s) | Forall(sub=s) | Flow(sub=s):
            return 1 + size(s)
        case And(left=l, right=r) | Or(left=l, right=r) | Until(left=l, right=r) \
                | Release(left=l, right=r):
            return 1 + size(l) + size(r)
    raise FormulaError("unexpected node %r" % (f,))


def collect_flow_subformulas(psi: FlowCtlStarFormula) -> list[tuple[CtlStarFormula, frozenset]]:
    """Flow subformulas Φ_i with their atom sets, in left-to-right order."""
    out: list[tuple[CtlStarFormula, frozenset]] = []

    def walk(f):
        match f:
            case Flow(sub=s):
                out.append((s, atoms(s)))
            case And(left=l, right=r) | Or(left=l, right=r):
                walk(l)
                walk(r)
            case Not(sub=s):
                walk(s)
            case _:
                pass

    walk(psi)
    return out


def negate(f: Formula) -> Formula:
    """Negation normal form of ¬f (negations pushed to atoms)."""
    match f:
        case Bool(value=v):
            return Bool(not v)
        case Atom():
            return Not(f)
        case Not(sub=s):
            return nnf(s)
        case And(left=l, right=r):
            return Or(negate(l), negate(r))
        case Or(left=l, right=r):
            return And(negate(l), negate(r))
        case Next(sub=s):
            return Next(negate(s))
        case Until(left=l, right=r):
            return Release(negate(l), negate(r))
        case Release(left=l, right=r):
            return Until(negate(l), negate(r))
        case Exists(sub=s):
            return Forall(negate(s))
        case Forall(sub=s):
            return Exists(negate(s))
    raise FormulaError("cannot negate %r" % (f,))


def nnf(f: Formula) -> Formula:
    """Negation normal form (negations pushed down to atoms)."""
    match f:
        case Atom() | Bool():
            return f
        case Not(sub=Atom()):
            return f
        case Not(sub=s):
            return negate(s)
        case And(left=l, right=r):
            return And(nnf(l), nnf(r))
        case Or(left=l, right=r):
            return Or(nnf(l), nnf(r))
        case Next(sub=s):
            return Next(nnf(s))
        case Until(left=l, right=r):
            return Until(nnf(l), nnf(r))
        case Release(left=l, right=r):
            return Release(nnf(l), nnf(r))
        case Exists(sub=s):
            return Exists(nnf(s))
        case Forall(sub=s):
            return Forall(nnf(s))
    raise FormulaError("unexpected node %r" % (f,))


def is_ctl(f: Formula) -> bool:
    """True when f is a CTL state formula (each quantifier over one X/U/R)."""
    def state(g) -> bool:
        match g:
            case Atom() | Bool():
                return True
            case Not(sub=s):
                return state(s)
            case And(left=l, right=r) | Or(left=l, right=r):
                return state(l) and state(r)
            case Exists(sub=p) | Forall(sub=p):
                match p:
                    case Next(sub=s):
                        return state(s)
                    case Until(left=l, right=r) | Release(left=l, right=r):
                        return state(l) and state(r)
                    case _:
                        return False
            case _:
                return False
    return state(f)

"""Built-in theories: value symbols, ground evaluation, calculation rules.

Two theories are provided, integers and reals, both including the booleans.
Theory symbol names follow SMT-LIB spelling ("and", ">=", ...) so the solver
serialization is direct; the file grammar maps surface operators onto them.
Integer arithmetic is arbitrary precision, reals are exact rationals.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Union

from .terms import (
    App,
    NameGen,
    Rule,
    Sort,
    SymbolDecl,
    SymbolKind,
    Term,
    Var,
    is_value,
    sort_of,
)

INT = Sort("Int")
BOOL = Sort("Bool")
REAL = Sort("Real")

Payload = Union[int, Fraction, bool]


class EvaluationError(Exception):
    pass


class LiteralError(Exception):
    pass


def _th(name: str, args: tuple[Sort, ...], res: Sort) -> SymbolDecl:
    return SymbolDecl(name, args, res, SymbolKind.THEORY)


def _bool_ops() -> dict[SymbolDecl, Callable]:
    return {
        _th("not", (BOOL,), BOOL): operator.not_,
        _th("and", (BOOL, BOOL), BOOL): lambda a, b: a and b,
        _th("or", (BOOL, BOOL), BOOL): lambda a, b: a or b,
        _th("=>", (BOOL, BOOL), BOOL): lambda a, b: (not a) or b,
        _th("=", (BOOL, BOOL), BOOL): operator.eq,
    }


def _numeric_ops(num: Sort) -> dict[SymbolDecl, Callable]:
    return {
        _th("-", (num,), num): operator.neg,
        _th("+", (num, num), num): operator.add,
        _th("-", (num, num), num): operator.sub,
        _th("*", (num, num), num): operator.mul,
        _th("<=", (num, num), BOOL): operator.le,
        _th(">=", (num, num), BOOL): operator.ge,
        _th("<", (num, num), BOOL): operator.lt,
        _th(">", (num, num), BOOL): operator.gt,
        _th("=", (num, num), BOOL): operator.eq,
    }


@dataclass(frozen=True)
class Theory:
    """A fixed interpretation of theory symbols over exact carriers."""

    name: str
    logics: tuple[str, ...]
    default_logic: str
    sorts: tuple[Sort, ...]
    numeric_sort: Sort
    symbols: tuple[SymbolDecl, ...]
    _semantics: dict[SymbolDecl, Callable]

    def interpretation(self, symbol: SymbolDecl) -> Callable:
        try:
            return self._semantics[symbol]
        except KeyError:
            raise EvaluationError(f"{symbol.name} is not a theory symbol") from None

    def has_symbol(self, symbol: SymbolDecl) -> bool:
        return symbol in self._semantics

    def lookup(self, name: str, arg_sorts: tuple[Sort, ...]) -> Optional[SymbolDecl]:
        for s in self.symbols:
            if s.name == name and s.arg_sorts == arg_sorts:
                return s
        return None

    def overloads(self, name: str) -> list[SymbolDecl]:
        return [s for s in self.symbols if s.name == name]


def _make_theory(name: str, logics: tuple[str, ...], num: Sort) -> Theory:
    semantics = _bool_ops() | _numeric_ops(num)
    return Theory(
        name=name,
        logics=logics,
        default_logic=logics[0],
        sorts=(num, BOOL),
        numeric_sort=num,
        symbols=tuple(semantics),
        _semantics=semantics,
    )


INTS = _make_theory("Ints", ("QF_LIA", "QF_NIA"), INT)
REALS = _make_theory("Reals", ("QF_LRA",), REAL)

THEORIES = {"Ints": INTS, "Reals": REALS}

TRUE_SYM = SymbolDecl("true", (), BOOL, SymbolKind.VALUE)
FALSE_SYM = SymbolDecl("false", (), BOOL, SymbolKind.VALUE)
TRUE = App(TRUE_SYM)
FALSE = App(FALSE_SYM)


@dataclass(frozen=True)
class Value:
    symbol: SymbolDecl
    payload: Payload

    def __repr__(self) -> str:
        return self.symbol.name


def _canonical_name(payload: Payload, sort: Sort) -> str:
    if sort == BOOL:
        return "true" if payload else "false"
    if sort == INT:
        return str(payload)
    frac = Fraction(payload)
    return str(frac.numerator) if frac.denominator == 1 else f"{frac.numerator}/{frac.denominator}"


def make_value(payload: Payload, sort: Sort) -> Term:
    """The unique value term denoting payload at the given sort."""
    if sort == BOOL:
        return TRUE if payload else FALSE
    if sort == INT and not isinstance(payload, (int, bool)):
        raise LiteralError(f"{payload!r} is not an integer")
    if sort == REAL:
        payload = Fraction(payload)
    return App(SymbolDecl(_canonical_name(payload, sort), (), sort, SymbolKind.VALUE))


def int_value(n: int) -> Term:
    return make_value(n, INT)


def is_value_symbol(symbol: SymbolDecl) -> bool:
    return symbol.kind is SymbolKind.VALUE


def value_payload(t: Term) -> Payload:
    """The carrier element a value term denotes."""
    if not is_value(t):
        raise EvaluationError(f"{t} is not a value")
    assert isinstance(t, App)
    name, sort = t.symbol.name, t.symbol.result_sort
    if sort == BOOL:
        return name == "true"
    if sort == INT:
        return int(name)
    if "/" in name:
        num, den = name.split("/", 1)
        return Fraction(int(num), int(den))
    return Fraction(int(name))


def value_of(literal: str, sort: Sort = INT) -> Value:
    """Parse an integer / boolean / rational literal into a Value."""
    literal = literal.strip()
    if literal in ("true", "false"):
        term = make_value(literal == "true", BOOL)
    else:
        neg = literal.startswith("-")
        body = literal[1:] if neg else literal
        if "/" in body:
            num, _, den = body.partition("/")
            if not (num.isdigit() and den.isdigit() and int(den) != 0):
                raise LiteralError(f"malformed rational literal {literal!r}")
            frac = Fraction(int(num), int(den))
            term = make_value(-frac if neg else frac, REAL)
        elif body.isdigit():
            n = -int(body) if neg else int(body)
            term = make_value(n, sort if sort in (INT, REAL) else INT)
        else:
            raise LiteralError(f"malformed literal {literal!r}")
    assert isinstance(term, App)
    return Value(term.symbol, value_payload(term))


def eval_ground(t: Term, theory: Theory) -> Value:
    """The unique value of a ground theory term."""
    if isinstance(t, Var):
        raise EvaluationError(f"non-ground input: variable {t}")
    if is_value(t):
        return Value(t.symbol, value_payload(t))
    if t.symbol.kind is SymbolKind.TERM:
        raise EvaluationError(f"non-theory symbol {t.symbol.name} present")
    fn = theory.interpretation(t.symbol)
    args = [eval_ground(a, theory).payload for a in t.args]
    payload = fn(*args)
    term = make_value(payload, t.symbol.result_sort)
    assert isinstance(term, App)
    return Value(term.symbol, payload)


def eval_ground_term(t: Term, theory: Theory) -> Term:
    v = eval_ground(t, theory)
    return App(v.symbol)


def calc_rule(symbol: SymbolDecl, namegen: Optional[NameGen] = None) -> Rule:
    """The schematic calculation rule f(x1,..,xn) -> y [y = f(x1,..,xn)]."""
    if symbol.kind is not SymbolKind.THEORY:
        raise ValueError(f"{symbol.name} is not a (non-value) theory symbol")
    gen = namegen or NameGen()
    xs = tuple(gen.fresh_var(s, "x") for s in symbol.arg_sorts)
    y = gen.fresh_var(symbol.result_sort, "y")
    call = App(symbol, xs)
    eq = SymbolDecl("=", (symbol.result_sort, symbol.result_sort), BOOL, SymbolKind.THEORY)
    return Rule(call, y, App(eq, (y, call)), name=f"calc {symbol.name}")


def equality_symbol(sort: Sort) -> SymbolDecl:
    return SymbolDecl("=", (sort, sort), BOOL, SymbolKind.THEORY)


def mk_eq(a: Term, b: Term) -> Term:
    return App(equality_symbol(sort_of(a)), (a, b))


def mk_not(a: Term) -> Term:
    return App(SymbolDecl("not", (BOOL,), BOOL, SymbolKind.THEORY), (a,))


def mk_implies(a: Term, b: Term) -> Term:
    return App(SymbolDecl("=>", (BOOL, BOOL), BOOL, SymbolKind.THEORY), (a, b))


AND_SYM = SymbolDecl("and", (BOOL, BOOL), BOOL, SymbolKind.THEORY)


def mk_and(a: Term, b: Term) -> Term:
    """Conjunction with true absorbed and false dominant on the left."""
    if a == TRUE:
        return b
    if b == TRUE:
        return a
    if a == FALSE or b == FALSE:
        return FALSE
    return App(AND_SYM, (a, b))


def conjoin(parts: list[Term]) -> Term:
    """Left-to-right conjunction of parts; true when empty."""
    out = TRUE
    for p in parts:
        out = mk_and(out, p)
    return out


def conjuncts(phi: Term) -> list[Term]:
    """Flatten nested conjunctions left-to-right."""
    if isinstance(phi, App) and phi.symbol == AND_SYM:
        return conjuncts(phi.args[0]) + conjuncts(phi.args[1])
    if phi == TRUE:
        return []
    return [phi]

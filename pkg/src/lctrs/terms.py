"""Many-sorted first-order terms: signatures, positions, substitutions,
matching, syntactic unification and variant checking.

Terms are immutable and hashable; every operation here is pure.  Positions
are tuples of 1-based argument indices, the empty tuple being the root.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Union


@dataclass(frozen=True)
class Sort:
    name: str

    def __repr__(self) -> str:
        return self.name


class SymbolKind(enum.Enum):
    TERM = "term"
    THEORY = "theory"
    VALUE = "value"


@dataclass(frozen=True)
class SymbolDecl:
    """A declared function symbol.

    Values are constants living in both signature partitions; the kind
    distinguishes plain term symbols from interpreted theory symbols.
    """

    name: str
    arg_sorts: tuple[Sort, ...]
    result_sort: Sort
    kind: SymbolKind

    def __post_init__(self) -> None:
        if self.kind is SymbolKind.VALUE and self.arg_sorts:
            raise ValueError(f"value symbol {self.name} must be a constant")

    @property
    def arity(self) -> int:
        return len(self.arg_sorts)

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Var:
    name: str
    sort: Sort

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True)
class App:
    symbol: SymbolDecl
    args: tuple["Term", ...] = ()

    def __post_init__(self) -> None:
        if len(self.args) != self.symbol.arity:
            raise ValueError(
                f"{self.symbol.name} expects {self.symbol.arity} arguments, "
                f"got {len(self.args)}"
            )
        for a, s in zip(self.args, self.symbol.arg_sorts):
            if sort_of(a) != s:
                raise ValueError(
                    f"ill-sorted argument {a} of {self.symbol.name}: "
                    f"expected {s}, got {sort_of(a)}"
                )

    def __repr__(self) -> str:
        if not self.args:
            return self.symbol.name
        return f"{self.symbol.name}({', '.join(map(repr, self.args))})"


Term = Union[Var, App]
Position = tuple[int, ...]
Subst = dict[Var, Term]

EPSILON: Position = ()


class InvalidPositionError(Exception):
    pass


def sort_of(t: Term) -> Sort:
    return t.sort if isinstance(t, Var) else t.symbol.result_sort


def is_value(t: Term) -> bool:
    return isinstance(t, App) and t.symbol.kind is SymbolKind.VALUE


def is_theory_term(t: Term) -> bool:
    """True iff t is a logical term (theory symbols and variables only)."""
    if isinstance(t, Var):
        return True
    return t.symbol.kind is not SymbolKind.TERM and all(
        is_theory_term(a) for a in t.args
    )


def subterms(t: Term) -> Iterator[tuple[Position, Term]]:
    """All (position, subterm) pairs of t in pre-order."""
    yield EPSILON, t
    if isinstance(t, App):
        for i, a in enumerate(t.args, start=1):
            for p, s in subterms(a):
                yield (i, *p), s


def positions(t: Term) -> set[Position]:
    return {p for p, _ in subterms(t)}


def fun_positions(t: Term) -> set[Position]:
    return {p for p, s in subterms(t) if isinstance(s, App)}


def var_positions(t: Term) -> set[Position]:
    return {p for p, s in subterms(t) if isinstance(s, Var)}


def subterm(t: Term, p: Position) -> Term:
    for i in p:
        if not isinstance(t, App) or not 1 <= i <= len(t.args):
            raise InvalidPositionError(f"position {p} not in {t}")
        t = t.args[i - 1]
    return t


def replace(s: Term, p: Position, t: Term) -> Term:
    """s with the subterm at p replaced by t; sorts must agree."""
    if not p:
        if sort_of(s) != sort_of(t):
            raise ValueError(f"sort mismatch replacing {s} by {t}")
        return t
    if not isinstance(s, App) or not 1 <= p[0] <= len(s.args):
        raise InvalidPositionError(f"position {p} not in {s}")
    i = p[0]
    args = list(s.args)
    args[i - 1] = replace(args[i - 1], p[1:], t)
    return App(s.symbol, tuple(args))


def variables(t: Term) -> list[Var]:
    """Variables of t in order of first occurrence."""
    seen: dict[Var, None] = {}
    def walk(u: Term) -> None:
        if isinstance(u, Var):
            seen.setdefault(u)
        else:
            for a in u.args:
                walk(a)
    walk(t)
    return list(seen)


def var_set(*ts: Term) -> set[Var]:
    out: set[Var] = set()
    for t in ts:
        out.update(variables(t))
    return out


def is_linear(t: Term) -> bool:
    seen: set[Var] = set()
    for _, s in subterms(t):
        if isinstance(s, Var):
            if s in seen:
                return False
            seen.add(s)
    return True


# --- substitutions ---------------------------------------------------------

def normalize_subst(sigma: Subst) -> Subst:
    """Drop identity bindings and check sort preservation."""
    out: Subst = {}
    for x, t in sigma.items():
        if x.sort != sort_of(t):
            raise ValueError(f"binding {x} -> {t} does not preserve the sort")
        if t != x:
            out[x] = t
    return out


def apply_subst(sigma: Subst, t: Term) -> Term:
    if isinstance(t, Var):
        return sigma.get(t, t)
    if not sigma:
        return t
    return App(t.symbol, tuple(apply_subst(sigma, a) for a in t.args))


def compose(sigma: Subst, tau: Subst) -> Subst:
    """The substitution sigma;tau, i.e. x -> tau(sigma(x))."""
    out: Subst = {x: apply_subst(tau, t) for x, t in sigma.items()}
    for x, t in tau.items():
        out.setdefault(x, t)
    return normalize_subst(out)


def restrict(sigma: Subst, dom: Iterable[Var]) -> Subst:
    keep = set(dom)
    return {x: t for x, t in sigma.items() if x in keep}


def occurs_in(x: Var, t: Term) -> bool:
    return any(s == x for _, s in subterms(t))


def match(pattern: Term, subject: Term) -> Optional[Subst]:
    """Most general sigma with pattern*sigma == subject, or None."""
    sigma: Subst = {}
    stack = [(pattern, subject)]
    while stack:
        p, s = stack.pop()
        if isinstance(p, Var):
            if p.sort != sort_of(s):
                return None
            bound = sigma.get(p)
            if bound is None:
                sigma[p] = s
            elif bound != s:
                return None
        else:
            if not isinstance(s, App) or p.symbol != s.symbol:
                return None
            stack.extend(zip(p.args, s.args))
    return normalize_subst(sigma)


def unify(s: Term, t: Term) -> Optional[Subst]:
    """Martelli-Montanari style unification with occurs check.

    Returns an idempotent most general unifier with triangular bindings
    resolved, or None when the terms are not unifiable.
    """
    sigma: Subst = {}
    work = [(s, t)]

    def bind(x: Var, u: Term) -> bool:
        if occurs_in(x, u):
            return False
        one = {x: u}
        for y in list(sigma):
            sigma[y] = apply_subst(one, sigma[y])
        sigma[x] = u
        for i, (a, b) in enumerate(work):
            work[i] = (apply_subst(one, a), apply_subst(one, b))
        return True

    while work:
        a, b = work.pop()
        if a == b:
            continue
        if isinstance(a, Var):
            if a.sort != sort_of(b) or not bind(a, b):
                return None
        elif isinstance(b, Var):
            if b.sort != sort_of(a) or not bind(b, a):
                return None
        else:
            if a.symbol != b.symbol:
                return None
            work.extend(zip(a.args, b.args))
    return normalize_subst(sigma)


# --- rules -----------------------------------------------------------------

@dataclass(frozen=True)
class Rule:
    """A constrained rewrite rule lhs -> rhs [constraint].

    The logical and extra variable sets are derived on demand so they can
    never go stale.
    """

    lhs: Term
    rhs: Term
    constraint: Term
    name: str = ""

    def __post_init__(self) -> None:
        if sort_of(self.lhs) != sort_of(self.rhs):
            raise ValueError(f"rule sides have different sorts: {self}")

    @property
    def variables(self) -> list[Var]:
        seen: dict[Var, None] = {}
        for t in (self.lhs, self.rhs, self.constraint):
            for x in variables(t):
                seen.setdefault(x)
        return list(seen)

    @property
    def lvar(self) -> set[Var]:
        return var_set(self.constraint) | (var_set(self.rhs) - var_set(self.lhs))

    @property
    def evar(self) -> set[Var]:
        return var_set(self.rhs) - var_set(self.lhs) - var_set(self.constraint)

    @property
    def is_left_linear(self) -> bool:
        return is_linear(self.lhs)

    @property
    def is_linear(self) -> bool:
        return is_linear(self.lhs) and is_linear(self.rhs)

    def apply(self, sigma: Subst) -> "Rule":
        return Rule(
            apply_subst(sigma, self.lhs),
            apply_subst(sigma, self.rhs),
            apply_subst(sigma, self.constraint),
            self.name,
        )

    def __repr__(self) -> str:
        return f"{self.lhs} -> {self.rhs} [{self.constraint}]"


def is_left_linear_system(rules: Iterable[Rule]) -> bool:
    return all(r.is_left_linear for r in rules)


def is_linear_system(rules: Iterable[Rule]) -> bool:
    return all(r.is_linear for r in rules)


class NameGen:
    """Fresh variable names for one analysis run.

    Generated names use a '!' suffix, which the file grammar cannot produce,
    so fresh variables never collide with parsed ones; the counter is
    monotone and names are never reused within a run.
    """

    def __init__(self, reserved: Iterable[str] = ()) -> None:
        self._taken = set(reserved)
        self._n = 0

    def reserve(self, names: Iterable[str]) -> None:
        self._taken.update(names)

    def fresh(self, base: str = "z") -> str:
        base = base.split("!", 1)[0] or "z"
        while True:
            self._n += 1
            name = f"{base}!{self._n}"
            if name not in self._taken:
                self._taken.add(name)
                return name

    def fresh_var(self, sort: Sort, base: str = "z") -> Var:
        return Var(self.fresh(base), sort)


def rename_apart(rule: Rule, avoid: Iterable, namegen: Optional[NameGen] = None) -> Rule:
    """A variant of rule sharing no variable name with avoid.

    avoid may contain Vars or plain names.
    """
    avoid_names = {v.name if isinstance(v, Var) else v for v in avoid}
    own = rule.variables
    gen = namegen or NameGen(avoid_names | {v.name for v in own})
    sigma: Subst = {}
    for v in own:
        if v.name in avoid_names or namegen is not None:
            sigma[v] = Var(gen.fresh(v.name), v.sort)
    return rule.apply(sigma)


def _renames_onto(r1: Rule, r2: Rule) -> bool:
    """True iff some variable renaming maps r1's sides and constraint
    simultaneously onto r2's."""
    sigma: Subst = {}
    for a, b in ((r1.lhs, r2.lhs), (r1.rhs, r2.rhs), (r1.constraint, r2.constraint)):
        stack = [(a, b)]
        while stack:
            p, s = stack.pop()
            if isinstance(p, Var):
                if not isinstance(s, Var) or p.sort != s.sort:
                    return False
                bound = sigma.get(p)
                if bound is None:
                    sigma[p] = s
                elif bound != s:
                    return False
            else:
                if not isinstance(s, App) or p.symbol != s.symbol:
                    return False
                stack.extend(zip(p.args, s.args))
    return True


def is_variant(r1: Rule, r2: Rule) -> bool:
    return _renames_onto(r1, r2) and _renames_onto(r2, r1)

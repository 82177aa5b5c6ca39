"""LCTRS container: a signature of term symbols plus a theory and rules."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

from .terms import NameGen, Rule, Sort, SymbolDecl, SymbolKind
from .theory import Theory, calc_rule


class SignatureError(Exception):
    pass


@dataclass
class Signature:
    """User-declared term symbols, keyed by name.

    Theory symbols live in the Theory table; the two partitions may only
    overlap on values, which are constructed on demand and never stored.
    """

    theory: Theory
    _decls: dict[str, SymbolDecl] = field(default_factory=dict)

    def declare(self, decl: SymbolDecl) -> None:
        if decl.kind is not SymbolKind.TERM:
            raise SignatureError(f"only term symbols can be declared: {decl.name}")
        if self.theory.overloads(decl.name):
            raise SignatureError(f"{decl.name} is a theory symbol")
        old = self._decls.get(decl.name)
        if old is not None and old != decl:
            raise SignatureError(f"conflicting declarations for {decl.name}")
        self._decls[decl.name] = decl

    def lookup(self, name: str) -> Optional[SymbolDecl]:
        return self._decls.get(name)

    def __contains__(self, name: str) -> bool:
        return name in self._decls

    def __iter__(self) -> Iterator[SymbolDecl]:
        return iter(self._decls.values())


@dataclass
class Lctrs:
    """A logically constrained rewrite system bound to a theory."""

    signature: Signature
    theory: Theory
    rules: list[Rule]
    logic: str = ""
    solver_hint: str = ""
    default_sort: Optional[Sort] = None
    name: str = ""

    def __post_init__(self) -> None:
        if not self.logic:
            self.logic = self.theory.default_logic

    def calculation_rules(self, namegen: Optional[NameGen] = None) -> list[Rule]:
        """One schematic calculation rule per theory symbol."""
        return [calc_rule(s, namegen) for s in self.theory.symbols]

    @property
    def variable_names(self) -> set[str]:
        names: set[str] = set()
        for r in self.rules:
            names.update(v.name for v in r.variables)
        return names

    def namegen(self) -> NameGen:
        return NameGen(self.variable_names)

"""External SMT solver client.

Queries are one-shot SMT-LIB 2 scripts sent to a solver process over its
standard input; each script is prefixed with (reset) so no incremental state
survives between queries.  One process per handle, answers are the first
token of the reply line.  Unknown is propagated, never silently coerced.
"""

from __future__ import annotations

import enum
import os
import re
import selectors
import shutil
import subprocess
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .terms import App, SymbolKind, Term, Var, sort_of, variables
from .theory import BOOL, Theory, mk_not, value_payload


class SolverError(Exception):
    """Solver process failure: cannot spawn, died, or spoke garbage."""


class SerializationError(Exception):
    pass


class SmtResult(enum.Enum):
    SAT = "sat"
    UNSAT = "unsat"
    UNKNOWN = "unknown"


class Validity(enum.Enum):
    VALID = "valid"
    NOT_VALID = "not-valid"
    UNKNOWN = "unknown"


@dataclass
class SolverConfig:
    executable: str = ""
    logic: str = "QF_LIA"
    per_query_timeout_ms: int = 2000

    def __post_init__(self) -> None:
        if self.per_query_timeout_ms <= 0:
            raise ValueError("per-query timeout must be positive")


_SIMPLE_SYMBOL = re.compile(r"[a-zA-Z~!@$%^&*_+=<>.?/-][0-9a-zA-Z~!@$%^&*_+=<>.?/-]*\Z")


def _smt_name(name: str) -> str:
    return name if _SIMPLE_SYMBOL.match(name) else f"|{name}|"


def _value_sexpr(t: App) -> str:
    payload = value_payload(t)
    sort = t.symbol.result_sort
    if sort == BOOL:
        return "true" if payload else "false"
    if isinstance(payload, Fraction):
        body = f"{payload.numerator}.0" if payload.denominator == 1 \
            else f"(/ {abs(payload.numerator)} {payload.denominator})"
        if payload < 0 and payload.denominator != 1:
            return f"(- {body})"
        if payload < 0:
            return f"(- {abs(payload.numerator)}.0)"
        return body
    return str(payload) if payload >= 0 else f"(- {-payload})"


def term_to_sexpr(t: Term) -> str:
    if isinstance(t, Var):
        return _smt_name(t.name)
    if t.symbol.kind is SymbolKind.VALUE:
        return _value_sexpr(t)
    if t.symbol.kind is SymbolKind.TERM:
        raise SerializationError(f"non-theory symbol {t.symbol.name} in constraint")
    if not t.args:
        return _smt_name(t.symbol.name)
    return f"({_smt_name(t.symbol.name)} {' '.join(term_to_sexpr(a) for a in t.args)})"


def serialize(phi: Term, logic: str) -> str:
    """A deterministic one-shot script: set-logic, declarations, assert,
    check-sat.  Byte-identical for identical input terms."""
    if sort_of(phi).name != "Bool":
        raise SerializationError(f"constraint {phi} is not of sort Bool")
    decls = "".join(
        f"(declare-const {_smt_name(v.name)} {v.sort.name})"
        for v in sorted(set(variables(phi)), key=lambda v: v.name)
    )
    return f"(set-logic {logic}){decls}(assert {term_to_sexpr(phi)})(check-sat)"


# --- solver process handling -------------------------------------------------


def bundled_shim() -> Optional[list[str]]:
    """Command for the repo's WASM solver shim, if it has been set up."""
    root = Path(__file__).resolve().parents[2]
    shim = root / "solver" / "z3wasm.js"
    node = shutil.which("node")
    if node and shim.exists() and (shim.parent / "node_modules" / "z3-solver").exists():
        return [node, str(shim)]
    return None


def resolve_solver_command(executable: str = "") -> list[str]:
    """Turn a solver name/path into an argv reading SMT-LIB 2 from stdin.

    Resolution order: explicit argument, LCTRS_SMT_SOLVER, z3 on PATH, the
    bundled WASM shim.
    """
    choice = executable or os.environ.get("LCTRS_SMT_SOLVER", "")
    if not choice:
        if shutil.which("z3"):
            choice = "z3"
        else:
            shim = bundled_shim()
            if shim:
                return shim
            raise SolverError(
                "no SMT solver found: put z3 on PATH, set LCTRS_SMT_SOLVER, "
                "or run `npm install` inside solver/"
            )
    path = shutil.which(choice) or (choice if os.path.exists(choice) else None)
    if path is None:
        raise SolverError(f"solver executable not found: {choice}")
    base = os.path.basename(path)
    if base.endswith(".js"):
        node = shutil.which("node")
        if node is None:
            raise SolverError("node is required to run a .js solver shim")
        return [node, path]
    if "z3" in base:
        return [path, "-in"]
    if "cvc" in base:
        return [path, "--lang", "smt2"]
    return [path]


class SolverHandle:
    """One solver process plus a per-handle answer cache.

    Not shared between concurrent tasks; every criterion checker owns its
    own handle.
    """

    def __init__(self, config: Optional[SolverConfig] = None) -> None:
        self.config = config or SolverConfig()
        self._argv: Optional[list[str]] = None
        self._proc: Optional[subprocess.Popen] = None
        self._buf = b""
        self._cache: dict[str, str] = {}
        self.queries = 0

    def _spawn(self) -> subprocess.Popen:
        if self._argv is None:
            self._argv = resolve_solver_command(self.config.executable)
        try:
            # raw unbuffered pipes so select() and read() agree on readiness
            return subprocess.Popen(
                self._argv,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL,
                bufsize=0,
            )
        except OSError as exc:
            raise SolverError(f"cannot spawn solver {self._argv}: {exc}") from exc

    def _read_line(self, proc: subprocess.Popen, timeout_s: float) -> Optional[str]:
        sel = selectors.DefaultSelector()
        sel.register(proc.stdout, selectors.EVENT_READ)
        deadline = time.monotonic() + timeout_s
        try:
            while True:
                nl = self._buf.find(b"\n")
                if nl >= 0:
                    line = self._buf[:nl].strip()
                    self._buf = self._buf[nl + 1:]
                    if line:
                        return line.decode()
                    continue
                remaining = deadline - time.monotonic()
                if remaining <= 0:
                    return None
                if not sel.select(remaining):
                    continue
                chunk = proc.stdout.read(4096)
                if not chunk:
                    raise SolverError("solver process closed its output")
                self._buf += chunk
        finally:
            sel.close()

    def ask(self, script: str, max_wait_ms: Optional[int] = None) -> str:
        """Send one one-shot script, return the reply line ("sat", ...)."""
        cached = self._cache.get(script)
        if cached is not None:
            return cached
        wait_ms = self.config.per_query_timeout_ms
        if max_wait_ms is not None:
            wait_ms = min(wait_ms, max_wait_ms)
        if self._proc is None or self._proc.poll() is not None:
            self._proc = self._spawn()
        proc = self._proc
        line = "(reset)(set-option :timeout {})".format(self.config.per_query_timeout_ms)
        line += script.replace("\n", " ")
        try:
            proc.stdin.write((line + "\n").encode())
            proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            self.close()
            raise SolverError(f"solver process died: {exc}") from exc
        self.queries += 1
        answer = self._read_line(proc, wait_ms / 1000.0)
        if answer is None:
            # per-query timeout: the process may be stuck, start over next time
            self.close()
            return "unknown"
        if answer.startswith("(error"):
            self.close()
            raise SolverError(f"solver rejected script: {answer}")
        self._cache[script] = answer
        return answer

    def close(self) -> None:
        proc, self._proc = self._proc, None
        if proc is not None:
            try:
                proc.stdin.close()
            except OSError:
                pass
            try:
                proc.wait(timeout=0.5)
            except subprocess.TimeoutExpired:
                proc.kill()
                proc.wait()

    def __enter__(self) -> "SolverHandle":
        return self

    def __exit__(self, *_exc) -> None:
        self.close()


def check_sat(phi: Term, handle: SolverHandle, logic: str = "",
              max_wait_ms: Optional[int] = None) -> SmtResult:
    """Satisfiability of a constraint; Unknown on solver "unknown"/timeout."""
    script = serialize(phi, logic or handle.config.logic)
    answer = handle.ask(script, max_wait_ms)
    token = answer.split()[0] if answer else ""
    if token == "sat":
        return SmtResult.SAT
    if token == "unsat":
        return SmtResult.UNSAT
    if token == "unknown":
        return SmtResult.UNKNOWN
    raise SolverError(f"unrecognized solver answer: {answer!r}")


def is_valid(phi: Term, handle: SolverHandle, logic: str = "",
             max_wait_ms: Optional[int] = None) -> Validity:
    """Validity via unsatisfiability of the negation."""
    result = check_sat(mk_not(phi), handle, logic, max_wait_ms)
    if result is SmtResult.UNSAT:
        return Validity.VALID
    if result is SmtResult.SAT:
        return Validity.NOT_VALID
    return Validity.UNKNOWN

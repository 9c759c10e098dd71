"""Supervisor synthesis and resilience checking.

Against attacker models A_s (sensor channel) and A_a (actuator channel)
and a desired-language machine M_K, the candidate supervisor is

    S = invert(A_s) . invert(M_K) . invert(A_a)

where . is left-to-right composition. The supervised plant language is
what the plant can actually do inside the loop,

    L(P | S, A_s, A_a) = L(invert(A_s . S . A_a)) n L(P)

and S is resilient exactly when that language equals L(M_K). The
verdict is a value, not an exception: nonexistence of a resilient
supervisor is a legitimate analysis outcome, reported with a shortest
witness word from the symmetric difference.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass

from .errors import FormatError
from .formats import symbol_from_text
from .fst import (
    EPS,
    Fst,
    Letter,
    Word,
    compose,
    counterexample,
    intersect,
    invert,
    is_prefix_closed,
    minimize,
)


@dataclass(frozen=True)
class SynthesisResult:
    supervisor: Fst
    resilient: bool
    witness: Word | None

    def __post_init__(self) -> None:
        if self.resilient != (self.witness is None):
            raise ValueError("resilient verdict must match witness absence")


def synthesize(m_k: Fst, a_s: Fst, a_a: Fst) -> Fst:
    """Candidate supervisor invert(a_s) . invert(m_k) . invert(a_a)."""
    if not is_prefix_closed(m_k):
        warnings.warn(
            "desired language is not prefix-closed; the control loop assumes it is",
            UserWarning,
            stacklevel=2,
        )
    return compose(compose(invert(a_s), invert(m_k)), invert(a_a))


def supervised_language(p: Fst, s: Fst, a_s: Fst, a_a: Fst) -> Fst:
    """Plant words possible in the loop: L(invert(a_s . s . a_a)) n L(p)."""
    return intersect(invert(compose(compose(a_s, s), a_a)), p)


def verify_resilient(p: Fst, s: Fst, a_s: Fst, a_a: Fst, m_k: Fst) -> SynthesisResult:
    lang = supervised_language(p, s, a_s, a_a)
    witness = counterexample(lang, m_k)
    return SynthesisResult(supervisor=s, resilient=witness is None, witness=witness)


# Pattern syntax for desired languages: a sequence of letters `(in:out)`
# and parenthesized groups, either starrable, e.g. `((a1:s2)(a2:s2))*`.
# All states of the built machine are final, so the language is the
# prefix closure of the pattern's words. No alternation.

_TOKEN = re.compile(r"[()*:]|[^()*:\s]+")


def pattern_to_fst(text: str) -> Fst:
    tokens = _TOKEN.findall(text)
    if "".join(tokens) != "".join(text.split()):
        raise FormatError(f"unrecognized characters in pattern {text!r}")

    arcs: list[tuple[int, Letter | None, int]] = []
    counter = [0]

    def fresh() -> int:
        counter[0] += 1
        return counter[0] - 1

    pos = [0]

    def peek(offset: int = 0) -> str | None:
        i = pos[0] + offset
        return tokens[i] if i < len(tokens) else None

    def take(expected: str | None = None) -> str:
        tok = peek()
        if tok is None or (expected is not None and tok != expected):
            raise FormatError(f"bad pattern {text!r}: expected {expected or 'a token'} at token {pos[0]}")
        pos[0] += 1
        return tok

    def parse_seq() -> tuple[int, int]:
        start = fresh()
        end = start
        while peek() == "(":
            s, e = parse_item()
            arcs.append((end, None, s))
            end = e
        return start, end

    def parse_item() -> tuple[int, int]:
        take("(")
        if peek() not in ("(", ")") and peek(1) == ":":
            left = take()
            take(":")
            right = take()
            take(")")
            if left in "()*:" or right in "()*:":
                raise FormatError(f"bad pattern {text!r}: malformed letter")
            letter = (symbol_from_text(left), symbol_from_text(right))
            if letter == (EPS, EPS):
                raise FormatError("the (eps,eps) letter cannot appear in a pattern")
            s, e = fresh(), fresh()
            arcs.append((s, letter, e))
        else:
            s, e = parse_seq()
            take(")")
        if peek() == "*":
            take("*")
            outer_s, outer_e = fresh(), fresh()
            arcs.append((outer_s, None, s))
            arcs.append((e, None, s))
            arcs.append((e, None, outer_e))
            arcs.append((outer_s, None, outer_e))
            return outer_s, outer_e
        return s, e

    start, _ = parse_seq()
    if pos[0] != len(tokens):
        raise FormatError(f"bad pattern {text!r}: trailing tokens")

    # Silent links are construction scaffolding; close over them so the
    # final machine has only letter-labeled transitions.
    nodes = {start}
    silent: dict[int, list[int]] = {}
    labeled: dict[int, list[tuple[Letter, int]]] = {}
    for src, letter, dst in arcs:
        nodes.update((src, dst))
        if letter is None:
            silent.setdefault(src, []).append(dst)
        else:
            labeled.setdefault(src, []).append((letter, dst))

    def closure(q: int) -> set[int]:
        seen = {q}
        stack = [q]
        while stack:
            for nxt in silent.get(stack.pop(), []):
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return seen

    transitions = set()
    for q in nodes:
        for q2 in closure(q):
            for letter, dst in labeled.get(q2, []):
                transitions.add((str(q), letter[0], letter[1], str(dst)))

    raw = Fst(
        states=tuple(str(q) for q in sorted(nodes)),
        initial=str(start),
        transitions=frozenset(transitions),
        finals=frozenset(str(q) for q in sorted(nodes)),
    )
    return minimize(raw)

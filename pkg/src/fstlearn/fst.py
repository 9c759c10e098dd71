"""Finite-state transducers treated as acceptors over the pair alphabet.

A machine reads one (input, output) letter per clock tick. Every state
additionally carries an implicit stay transition (eps, eps) that consumes
and emits the empty message; it is never stored, serialized, or counted
in alphabets. Stored words therefore never contain the (eps, eps) letter,
and language operations (composition, intersection, minimization,
equivalence) are ordinary regular-language operations over pair letters.

A letter may carry eps on one side, e.g. (a, eps): that is a normal
letter recording an empty message on one channel.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .errors import FormatError, ResourceLimitError

EPS = ""

Letter = tuple[str, str]
Word = tuple[Letter, ...]

# Guards against pathological blowup; exceeding a bound raises, never truncates.
MAX_STATES = 10_000
MAX_WORDS = 1_000_000

_RESERVED = ("<eps>", "<empty>")


def _check_symbol(sym: str) -> None:
    if sym == EPS:
        return
    if any(c.isspace() for c in sym) or "#" in sym or ":" in sym or sym in _RESERVED:
        raise FormatError(
            f"bad symbol {sym!r}: no whitespace, ':' or '#', and reserved tokens are not symbols"
        )


def _check_state(name: str) -> None:
    if not name or any(c.isspace() for c in name) or "#" in name or name in _RESERVED:
        raise FormatError(f"bad state name {name!r}")


@dataclass(frozen=True)
class Fst:
    """Immutable transducer (states, initial, transitions, finals, alphabets).

    Transitions are (src, in, out, dst) quadruples. Explicit (eps, eps)
    transitions are rejected: the stay transition is implicit at every
    state. Alphabets are widened to cover the transitions and always
    contain eps.
    """

    states: tuple[str, ...]
    initial: str
    transitions: frozenset[tuple[str, str, str, str]]
    finals: frozenset[str]
    inputs: frozenset[str] = field(default_factory=frozenset)
    outputs: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        states = tuple(dict.fromkeys(self.states))
        trans = frozenset(self.transitions)
        finals = frozenset(self.finals)
        if not states:
            raise FormatError("a machine needs at least one state")
        known = set(states)
        for s in states:
            _check_state(s)
        if self.initial not in known:
            raise FormatError(f"initial state {self.initial!r} not among states")
        if not finals <= known:
            raise FormatError(f"final states {sorted(finals - known)} not among states")
        for (s, i, o, d) in trans:
            if s not in known or d not in known:
                raise FormatError(f"transition ({s},{i},{o},{d}) references unknown state")
            if i == EPS and o == EPS:
                raise FormatError("explicit (eps,eps) transition: the stay transition is implicit")
            _check_symbol(i)
            _check_symbol(o)
        inputs = frozenset(self.inputs) | {i for (_, i, _, _) in trans} | {EPS}
        outputs = frozenset(self.outputs) | {o for (_, _, o, _) in trans} | {EPS}
        for sym in inputs | outputs:
            _check_symbol(sym)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "transitions", trans)
        object.__setattr__(self, "finals", finals)
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "outputs", outputs)

    def letters(self) -> set[Letter]:
        """Distinct pair letters appearing on explicit transitions."""
        return {(i, o) for (_, i, o, _) in self.transitions}


@dataclass(frozen=True)
class SampleSet:
    """Deduplicated positive sample words plus their observed letter alphabet.

    Every word is assumed to be a true member of the target language; the
    toolkit validates shape only, never veracity.
    """

    words: frozenset[Word]
    alphabet: tuple[Letter, ...]

    def __post_init__(self):
        words = frozenset(tuple(tuple(l) for l in w) for w in self.words)
        seen = set()
        for w in words:
            for (i, o) in w:
                if i == EPS and o == EPS:
                    raise FormatError("stored words must not contain the (eps,eps) letter")
                _check_symbol(i)
                _check_symbol(o)
                seen.add((i, o))
        object.__setattr__(self, "words", words)
        object.__setattr__(self, "alphabet", tuple(sorted(seen)))

    @classmethod
    def from_words(cls, words) -> "SampleSet":
        ws = frozenset(tuple(tuple(l) for l in w) for w in words)
        return cls(ws, ())

    def __len__(self) -> int:
        return len(self.words)


def _arcs(fst: Fst) -> dict[str, list[tuple[str, str, str]]]:
    adj: dict[str, list[tuple[str, str, str]]] = {}
    for (s, i, o, d) in fst.transitions:
        adj.setdefault(s, []).append((i, o, d))
    for lst in adj.values():
        lst.sort()
    return adj


def accepts(fst: Fst, w: Word) -> bool:
    """True iff some path labeled by w from the initial state ends final.

    The machine is a nondeterministic acceptor over pair letters. A
    (eps, eps) letter in the input, if one slips in, is a no-op: the
    implicit stay absorbs it at every state.
    """
    arcs = _arcs(fst)
    cur = {fst.initial}
    for letter in w:
        if letter == (EPS, EPS):
            continue
        i, o = letter
        cur = {d for s in cur for (i2, o2, d) in arcs.get(s, []) if i2 == i and o2 == o}
        if not cur:
            return False
    return bool(cur & fst.finals)


def invert(fst: Fst) -> Fst:
    """Swap input and output on every transition; state set unchanged."""
    return Fst(
        states=fst.states,
        initial=fst.initial,
        transitions=frozenset((s, o, i, d) for (s, i, o, d) in fst.transitions),
        finals=fst.finals,
        inputs=fst.outputs,
        outputs=fst.inputs,
    )


def trim(fst: Fst) -> Fst:
    """Drop states not reachable from the initial or not co-reachable to a final.

    State names are preserved. If the language is empty the canonical
    single-state machine with no finals is returned (alphabets kept).
    """
    arcs = _arcs(fst)
    reach = {fst.initial}
    dq = deque([fst.initial])
    while dq:
        s = dq.popleft()
        for (_, _, d) in arcs.get(s, []):
            if d not in reach:
                reach.add(d)
                dq.append(d)
    back: dict[str, set[str]] = {}
    for (s, _, _, d) in fst.transitions:
        back.setdefault(d, set()).add(s)
    co = set(fst.finals)
    dq = deque(fst.finals)
    while dq:
        s = dq.popleft()
        for p in back.get(s, ()):
            if p not in co:
                co.add(p)
                dq.append(p)
    keep = reach & co
    if fst.initial not in keep:
        return Fst(("0",), "0", frozenset(), frozenset(), fst.inputs, fst.outputs)
    return Fst(
        states=tuple(s for s in fst.states if s in keep),
        initial=fst.initial,
        transitions=frozenset(t for t in fst.transitions if t[0] in keep and t[3] in keep),
        finals=frozenset(s for s in fst.finals if s in keep),
        inputs=fst.inputs,
        outputs=fst.outputs,
    )


def _canonical(fst: Fst) -> Fst:
    """Rename states 0..n-1 in BFS discovery order for byte-stable output."""
    arcs = _arcs(fst)
    order = []
    seen = {fst.initial}
    dq = deque([fst.initial])
    while dq:
        s = dq.popleft()
        order.append(s)
        for (_, _, d) in arcs.get(s, []):
            if d not in seen:
                seen.add(d)
                dq.append(d)
    for s in fst.states:
        if s not in seen:
            order.append(s)
            seen.add(s)
    name = {s: str(k) for k, s in enumerate(order)}
    return Fst(
        states=tuple(name[s] for s in order),
        initial=name[fst.initial],
        transitions=frozenset((name[s], i, o, name[d]) for (s, i, o, d) in fst.transitions),
        finals=frozenset(name[s] for s in fst.finals),
        inputs=fst.inputs,
        outputs=fst.outputs,
    )


def compose(a: Fst, b: Fst, max_states: int = MAX_STATES) -> Fst:
    """Pipeline composition: a's output feeds b's input.

    A product step pairs an explicit step of a with an explicit step of b
    sharing the mediating symbol, or an explicit step whose mediating
    symbol is eps with the other machine's implicit stay. When a inserts
    a symbol that b deletes, the product step is silent (eps, eps); such
    steps are removed by closure so the result never stores them.
    """
    arcs_a = _arcs(a)
    arcs_b = _arcs(b)
    start = (a.initial, b.initial)
    index = {start: "0"}
    order = [start]
    dq = deque([start])
    loud: dict[tuple[str, str], list[tuple[Letter, tuple[str, str]]]] = {}
    silent: dict[tuple[str, str], set[tuple[str, str]]] = {}

    def visit(node):
        if node not in index:
            if len(index) >= max_states:
                raise ResourceLimitError(
                    f"composition exceeded the {max_states}-state bound"
                )
            index[node] = str(len(index))
            order.append(node)
            dq.append(node)

    while dq:
        node = dq.popleft()
        p, q = node
        louds = loud.setdefault(node, [])
        sils = silent.setdefault(node, set())
        for (i, m, p2) in arcs_a.get(p, []):
            if m == EPS:
                # b consumes the empty message with its implicit stay
                louds.append(((i, EPS), (p2, q)))
                visit((p2, q))
            for (m2, o, q2) in arcs_b.get(q, []):
                if m2 != m:
                    continue
                tgt = (p2, q2)
                if i == EPS and o == EPS:
                    sils.add(tgt)
                else:
                    louds.append(((i, o), tgt))
                visit(tgt)
        for (m2, o, q2) in arcs_b.get(q, []):
            if m2 == EPS:
                # a emits the empty message with its implicit stay
                louds.append(((EPS, o), (p, q2)))
                visit((p, q2))

    def closure(node):
        out = {node}
        stack = [node]
        while stack:
            n = stack.pop()
            for t in silent.get(n, ()):
                if t not in out:
                    out.add(t)
                    stack.append(t)
        return out

    closures = {node: closure(node) for node in order}
    finals_raw = {
        node for node in order if node[0] in a.finals and node[1] in b.finals
    }
    transitions = set()
    finals = set()
    for node in order:
        if closures[node] & finals_raw:
            finals.add(index[node])
        for member in closures[node]:
            for (letter, tgt) in loud.get(member, ()):
                transitions.add((index[node], letter[0], letter[1], index[tgt]))
    raw = Fst(
        states=tuple(index[n] for n in order),
        initial="0",
        transitions=frozenset(transitions),
        finals=frozenset(finals),
        inputs=a.inputs,
        outputs=b.outputs,
    )
    return _canonical(trim(raw))


def intersect(a: Fst, b: Fst, max_states: int = MAX_STATES) -> Fst:
    """Product acceptor over identical pair letters; L = L(a) and L(b)."""
    arcs_a = _arcs(a)
    arcs_b = _arcs(b)
    start = (a.initial, b.initial)
    index = {start: "0"}
    order = [start]
    dq = deque([start])
    transitions = set()
    while dq:
        p, q = node = dq.popleft()
        moves_b: dict[Letter, list[str]] = {}
        for (i, o, q2) in arcs_b.get(q, []):
            moves_b.setdefault((i, o), []).append(q2)
        for (i, o, p2) in arcs_a.get(p, []):
            for q2 in moves_b.get((i, o), ()):
                tgt = (p2, q2)
                if tgt not in index:
                    if len(index) >= max_states:
                        raise ResourceLimitError(
                            f"intersection exceeded the {max_states}-state bound"
                        )
                    index[tgt] = str(len(index))
                    order.append(tgt)
                    dq.append(tgt)
                transitions.add((index[node], i, o, index[tgt]))
    finals = frozenset(
        index[n] for n in order if n[0] in a.finals and n[1] in b.finals
    )
    raw = Fst(
        states=tuple(index[n] for n in order),
        initial="0",
        transitions=frozenset(transitions),
        finals=finals,
        inputs=a.inputs | b.inputs,
        outputs=a.outputs | b.outputs,
    )
    return _canonical(trim(raw))


def _determinize(fst: Fst, max_states: int = MAX_STATES):
    """Partial subset construction over pair letters.

    Returns (dtrans, finals): dtrans[k] maps letter -> state index, state 0
    is the initial subset, finals is the set of accepting indices. The
    empty subset is never created (missing letters simply have no entry).
    """
    arcs = _arcs(fst)
    start = frozenset([fst.initial])
    index = {start: 0}
    order = [start]
    dtrans: list[dict[Letter, int]] = []
    pos = 0
    while pos < len(order):
        sub = order[pos]
        pos += 1
        moves: dict[Letter, set[str]] = {}
        for s in sub:
            for (i, o, d) in arcs.get(s, []):
                moves.setdefault((i, o), set()).add(d)
        row: dict[Letter, int] = {}
        for letter in sorted(moves):
            tgt = frozenset(moves[letter])
            if tgt not in index:
                if len(index) >= max_states:
                    raise ResourceLimitError(
                        f"determinization exceeded the {max_states}-state bound"
                    )
                index[tgt] = len(order)
                order.append(tgt)
            row[letter] = index[tgt]
        dtrans.append(row)
    finals = {k for k, sub in enumerate(order) if sub & fst.finals}
    return dtrans, finals


def minimize(fst: Fst, max_states: int = MAX_STATES) -> Fst:
    """Minimal deterministic pair-alphabet acceptor for L(fst).

    Subset construction followed by partition refinement; the result is
    trim and canonically named. The empty language minimizes to the
    single-state machine with no finals.
    """
    t = trim(fst)
    if not t.finals:
        return Fst(("0",), "0", frozenset(), frozenset(), t.inputs, t.outputs)
    dtrans, dfinals = _determinize(t, max_states)
    letters = sorted({l for row in dtrans for l in row})
    n = len(dtrans)
    sink = n
    total = [[row.get(l, sink) for l in letters] for row in dtrans]
    total.append([sink] * len(letters))
    cls = [1 if k in dfinals else 0 for k in range(n)] + [0]
    while True:
        sig: dict[tuple, int] = {}
        new = []
        for k in range(n + 1):
            key = (cls[k], tuple(cls[t2] for t2 in total[k]))
            new.append(sig.setdefault(key, len(sig)))
        if new == cls:
            break
        cls = new
    states = tuple(str(c) for c in sorted(set(cls)))
    transitions = set()
    for k in range(n + 1):
        for li, l in enumerate(letters):
            transitions.add((str(cls[k]), l[0], l[1], str(cls[total[k][li]])))
    finals = frozenset(str(cls[k]) for k in dfinals)
    raw = Fst(states, str(cls[0]), frozenset(transitions), finals, t.inputs, t.outputs)
    return _canonical(trim(raw))


def counterexample(a: Fst, b: Fst, max_states: int = MAX_STATES) -> Word | None:
    """Shortest word accepted by exactly one of the two machines, or None.

    BFS over the product of the two determinized partial acceptors, with
    an implicit rejecting sink (None) on missing letters.
    """
    da, fa = _determinize(trim(a), max_states)
    db, fb = _determinize(trim(b), max_states)
    letters = sorted(
        {l for row in da for l in row} | {l for row in db for l in row}
    )
    start = (0, 0)
    seen = {start}
    dq: deque[tuple[tuple[int | None, int | None], Word]] = deque([(start, ())])
    while dq:
        (sa, sb), w = dq.popleft()
        acc_a = sa is not None and sa in fa
        acc_b = sb is not None and sb in fb
        if acc_a != acc_b:
            return w
        for letter in letters:
            ta = da[sa].get(letter) if sa is not None else None
            tb = db[sb].get(letter) if sb is not None else None
            if ta is None and tb is None:
                continue
            node = (ta, tb)
            if node not in seen:
                seen.add(node)
                dq.append((node, w + (letter,)))
    return None


def equivalent(a: Fst, b: Fst, max_states: int = MAX_STATES) -> bool:
    """True iff L(a) = L(b) as pair-letter languages."""
    return counterexample(a, b, max_states) is None


def language_upto(fst: Fst, n: int, max_words: int = MAX_WORDS) -> set[Word]:
    """Exactly the accepted words of length at most n (pair letters)."""
    arcs = _arcs(fst)
    result: set[Word] = set()
    frontier: dict[Word, frozenset[str]] = {(): frozenset([fst.initial])}
    for length in range(n + 1):
        for w, cur in frontier.items():
            if cur & fst.finals:
                result.add(w)
        if len(result) > max_words:
            raise ResourceLimitError(f"language enumeration exceeded {max_words} words")
        if length == n:
            break
        nxt: dict[Word, set[str]] = {}
        for w, cur in frontier.items():
            moves: dict[Letter, set[str]] = {}
            for s in cur:
                for (i, o, d) in arcs.get(s, []):
                    moves.setdefault((i, o), set()).add(d)
            for letter, tgts in moves.items():
                nxt.setdefault(w + (letter,), set()).update(tgts)
        frontier = {w: frozenset(s) for w, s in nxt.items()}
        if len(frontier) > max_words:
            raise ResourceLimitError(f"language enumeration exceeded {max_words} words")
    return result


def is_prefix_closed(fst: Fst, max_states: int = MAX_STATES) -> bool:
    """True iff every prefix of every accepted word is accepted.

    Decided on the trimmed, determinized acceptor: prefix-closed iff every
    reachable subset state is accepting. The empty language is vacuously
    prefix closed.
    """
    t = trim(fst)
    if not t.finals:
        return True
    dtrans, finals = _determinize(t, max_states)
    return all(k in finals for k in range(len(dtrans)))


def identity_fst(symbols) -> Fst:
    """Single-state transducer copying each given symbol to itself."""
    syms = sorted(set(symbols) - {EPS})
    return Fst(
        states=("0",),
        initial="0",
        transitions=frozenset(("0", x, x, "0") for x in syms),
        finals=frozenset(("0",)),
    )

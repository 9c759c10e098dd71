"""Text formats: machine files, sample datasets, words, and matrix grids.

Machine format (one item per line, '#' starts a comment):

    fst v1
    initial 0
    final 0 1
    trans 0 a3 a1 1

'<eps>' stands for the empty symbol. Transitions are sorted on serialize
and finals are listed in shortlex order, so parse -> serialize is
byte-stable. Alphabets are reconstructed from the transitions, so
declared-but-unused symbols do not survive a round trip.

Dataset format: one word per line, letters space-separated as 'in:out'
with '<eps>' allowed on either side. The literal '<empty>' or a pure
whitespace line denotes the empty word; comment-only lines are skipped.
"""

from __future__ import annotations

from .errors import FormatError
from .fst import EPS, Fst, Letter, SampleSet, Word

EPS_TOKEN = "<eps>"
EMPTY_TOKEN = "<empty>"


def symbol_to_text(sym: str) -> str:
    return EPS_TOKEN if sym == EPS else sym


def symbol_from_text(tok: str) -> str:
    return EPS if tok == EPS_TOKEN else tok


def letter_to_text(letter: Letter) -> str:
    i, o = letter
    return f"{symbol_to_text(i)}:{symbol_to_text(o)}"


def letter_from_text(tok: str) -> Letter:
    parts = tok.split(":")
    if len(parts) != 2 or not parts[0] or not parts[1]:
        raise FormatError(f"bad letter {tok!r}: expected in:out")
    letter = (symbol_from_text(parts[0]), symbol_from_text(parts[1]))
    if letter == (EPS, EPS):
        raise FormatError("the (eps,eps) letter cannot appear in a word")
    return letter


def word_to_text(w: Word) -> str:
    if not w:
        return EMPTY_TOKEN
    return " ".join(letter_to_text(l) for l in w)


def word_from_text(text: str) -> Word:
    text = text.strip()
    if not text or text == EMPTY_TOKEN:
        return ()
    return tuple(letter_from_text(tok) for tok in text.split())


def _shortlex(items):
    return sorted(items, key=lambda x: (len(x), x))


def fst_to_text(f: Fst) -> str:
    lines = ["fst v1", f"initial {f.initial}"]
    lines.append(" ".join(["final", *_shortlex(f.finals)]).rstrip())
    for (s, i, o, d) in sorted(f.transitions):
        lines.append(f"trans {s} {symbol_to_text(i)} {symbol_to_text(o)} {d}")
    return "\n".join(lines) + "\n"


def fst_from_text(text: str) -> Fst:
    initial = None
    finals: list[str] = []
    trans: list[tuple[str, str, str, str]] = []
    states: dict[str, None] = {}
    saw_header = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not saw_header:
            if line != "fst v1":
                raise FormatError(f"line {lineno}: expected header 'fst v1'")
            saw_header = True
            continue
        toks = line.split()
        if toks[0] == "initial":
            if len(toks) != 2 or initial is not None:
                raise FormatError(f"line {lineno}: bad or duplicate initial line")
            initial = toks[1]
            states.setdefault(initial)
        elif toks[0] == "final":
            for s in toks[1:]:
                finals.append(s)
                states.setdefault(s)
        elif toks[0] == "trans":
            if len(toks) != 5:
                raise FormatError(f"line {lineno}: expected 'trans src in out dst'")
            _, s, i, o, d = toks
            states.setdefault(s)
            states.setdefault(d)
            trans.append((s, symbol_from_text(i), symbol_from_text(o), d))
        else:
            raise FormatError(f"line {lineno}: unknown directive {toks[0]!r}")
    if not saw_header:
        raise FormatError("empty machine file")
    if initial is None:
        raise FormatError("machine file has no initial line")
    return Fst(
        states=tuple(states),
        initial=initial,
        transitions=frozenset(trans),
        finals=frozenset(finals),
    )


def load_fst(path) -> Fst:
    with open(path, encoding="utf-8") as fh:
        return fst_from_text(fh.read())


def save_fst(f: Fst, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(fst_to_text(f))


def sampleset_to_text(d: SampleSet) -> str:
    lines = [word_to_text(w) for w in _shortlex(d.words)]
    return "\n".join(lines) + ("\n" if lines else "")


def sampleset_from_text(text: str) -> SampleSet:
    words = set()
    for raw in text.splitlines():
        if "#" in raw:
            content = raw.split("#", 1)[0].strip()
            if not content:
                continue  # comment-only line, not an empty word
            words.add(word_from_text(content))
        elif not raw.strip():
            words.add(())  # a blank line denotes the empty word
        else:
            words.add(word_from_text(raw))
    return SampleSet.from_words(words)


def load_dataset(path) -> SampleSet:
    with open(path, encoding="utf-8") as fh:
        return sampleset_from_text(fh.read())


def save_dataset(d: SampleSet, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(sampleset_to_text(d))


def grid(mat, row_labels, col_labels, title: str) -> str:
    """Aligned ASCII dump of a small matrix with word labels."""
    rows, cols = len(row_labels), len(col_labels)
    integral = all(float(mat[r][c]).is_integer() for r in range(rows) for c in range(cols))

    def fmt(v) -> str:
        return str(int(v)) if integral else f"{float(v):.6g}"

    cells = [[fmt(mat[r][c]) for c in range(cols)] for r in range(rows)]
    col_txt = [word_to_text(w) for w in col_labels]
    row_txt = [word_to_text(w) for w in row_labels]
    widths = [
        max(len(col_txt[c]), *(len(cells[r][c]) for r in range(rows)))
        if rows
        else len(col_txt[c])
        for c in range(cols)
    ]
    left = max((len(t) for t in row_txt), default=0)
    lines = [title]
    lines.append(
        " ".join([" " * left, *(col_txt[c].rjust(widths[c]) for c in range(cols))]).rstrip()
    )
    for r in range(rows):
        lines.append(
            " ".join(
                [row_txt[r].ljust(left), *(cells[r][c].rjust(widths[c]) for c in range(cols))]
            ).rstrip()
        )
    return "\n".join(lines) + "\n"

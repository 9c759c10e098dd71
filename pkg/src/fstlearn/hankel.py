"""Binary Hankel matrices over prefix/suffix masks.

A mask Theta = (Psi, Gamma) picks finitely many prefix words and suffix
words, with the empty word first in both. Against a sample set D it
induces the binary matrices

    H_Theta(psi, gamma) = 1  iff  psi gamma in D
    H_chi(psi, gamma)   = 1  iff  psi chi gamma in D   (one per letter chi)

find_basis greedily grows a mask until its H_Theta reaches the rank of
the full candidate Hankel block, which for exhaustively sampled
deterministic ground truth equals the minimal state count. check_closed
tests that every H_chi row lies in the row space of H_Theta; when it
fails, the data or the mask is too small to support learning.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fst import SampleSet, Letter, Word

TOL_RANK = 1e-9
TOL_BINARY = 1e-6

# Residual threshold for the greedy span tests in find_basis. Entries are
# 0/1 and masks stay tiny, so true nonzero residuals are far above this.
_RESIDUAL_TOL = 1e-8


def _shortlex(words) -> list[Word]:
    return sorted(words, key=lambda w: (len(w), w))


@dataclass(frozen=True)
class Mask:
    """Ordered prefix/suffix index sets; the empty word leads both."""

    prefixes: tuple[Word, ...]
    suffixes: tuple[Word, ...]

    def __post_init__(self) -> None:
        for name, side in (("prefixes", self.prefixes), ("suffixes", self.suffixes)):
            if not side or side[0] != ():
                raise ValueError(f"mask {name} must start with the empty word")
            if len(set(side)) != len(side):
                raise ValueError(f"mask {name} contains duplicates")


@dataclass(frozen=True, eq=False)
class HankelSet:
    """H_Theta plus one H_chi per observed letter, all over one mask."""

    mask: Mask
    h_theta: np.ndarray
    h_chi: dict[Letter, np.ndarray]
    alphabet: tuple[Letter, ...]

    def __post_init__(self) -> None:
        shape = (len(self.mask.prefixes), len(self.mask.suffixes))
        if set(self.h_chi) != set(self.alphabet):
            raise ValueError("h_chi keys must match the alphabet")
        for mat in (self.h_theta, *self.h_chi.values()):
            if mat.shape != shape:
                raise ValueError(f"matrix shape {mat.shape} does not match mask {shape}")
            if not np.isin(mat, (0.0, 1.0)).all():
                raise ValueError("Hankel entries must be 0 or 1")


def build_h_theta(d: SampleSet, m: Mask) -> np.ndarray:
    h = np.zeros((len(m.prefixes), len(m.suffixes)))
    for r, psi in enumerate(m.prefixes):
        for c, gamma in enumerate(m.suffixes):
            if psi + gamma in d.words:
                h[r, c] = 1.0
    return h


def build_h_chi(d: SampleSet, m: Mask, chi: Letter) -> np.ndarray:
    h = np.zeros((len(m.prefixes), len(m.suffixes)))
    for r, psi in enumerate(m.prefixes):
        for c, gamma in enumerate(m.suffixes):
            if psi + (chi,) + gamma in d.words:
                h[r, c] = 1.0
    return h


def build_hankel_set(d: SampleSet, m: Mask) -> HankelSet:
    return HankelSet(
        mask=m,
        h_theta=build_h_theta(d, m),
        h_chi={chi: build_h_chi(d, m, chi) for chi in d.alphabet},
        alphabet=d.alphabet,
    )


def numeric_rank(mat: np.ndarray, tol: float = TOL_RANK) -> int:
    if mat.size == 0:
        return 0
    sv = np.linalg.svd(mat, compute_uv=False)
    return int(np.sum(sv > tol * max(sv[0], 1.0)))


def find_basis(d: SampleSet, max_len: int) -> Mask:
    """Greedy rank-maximizing mask over prefixes/suffixes of D.

    Candidates are all prefixes and suffixes of words in D no longer
    than max_len, scanned in shortlex order. Starting from ([eps],[eps])
    the loop admits the first candidate row, column, or row/column pair
    that strictly raises the rank of H_Theta, until the full candidate
    block's rank is reached. Deterministic for a fixed D.
    """
    pset, sset = {()}, {()}
    for w in d.words:
        for k in range(len(w) + 1):
            if k <= max_len:
                pset.add(w[:k])
            if len(w) - k <= max_len:
                sset.add(w[k:])
    pcand, scand = _shortlex(pset), _shortlex(sset)
    pidx = {w: i for i, w in enumerate(pcand)}
    sidx = {w: i for i, w in enumerate(scand)}

    # Fill the full candidate block by splitting each sample word once,
    # instead of testing |Psi|x|Gamma| concatenations for membership.
    h = np.zeros((len(pcand), len(scand)))
    for w in d.words:
        for k in range(len(w) + 1):
            r, c = pidx.get(w[:k]), sidx.get(w[k:])
            if r is not None and c is not None:
                h[r, c] = 1.0

    target = numeric_rank(h)
    rows, cols = [0], [0]
    while True:
        m = h[np.ix_(rows, cols)]
        if numeric_rank(m) >= target:
            break
        m_pinv = np.linalg.pinv(m)

        # Candidate row outside the current row space.
        r_all = h[:, cols]
        gain = np.max(np.abs(r_all - r_all @ m_pinv @ m), axis=1) > _RESIDUAL_TOL
        new_rows = [i for i in np.flatnonzero(gain) if i not in rows]
        if new_rows:
            rows.append(int(new_rows[0]))
            continue

        # Candidate column outside the current column space.
        c_all = h[rows, :]
        gain = np.max(np.abs(c_all - m @ m_pinv @ c_all), axis=0) > _RESIDUAL_TOL
        new_cols = [j for j in np.flatnonzero(gain) if j not in cols]
        if new_cols:
            cols.append(int(new_cols[0]))
            continue

        # Every single row/column is spanned, so a joint addition raises
        # the rank exactly where the Schur-style prediction
        # h[p, cols] m+ h[rows, s] disagrees with the actual entry.
        pred = r_all @ m_pinv @ c_all
        mismatch = np.abs(pred - h) > TOL_BINARY
        mismatch[rows, :] = False
        mismatch[:, cols] = False
        hits = np.argwhere(mismatch)
        if len(hits) == 0:
            break
        rows.append(int(hits[0][0]))
        cols.append(int(hits[0][1]))

    return Mask(
        prefixes=tuple(pcand[i] for i in rows),
        suffixes=tuple(scand[j] for j in cols),
    )


def check_closed(hz: HankelSet, tol: float = TOL_BINARY) -> bool:
    """True iff every H_chi row lies in the row space of H_Theta."""
    ht = hz.h_theta
    row_proj = np.linalg.pinv(ht) @ ht
    for hc in hz.h_chi.values():
        if np.max(np.abs(hc - hc @ row_proj), initial=0.0) > tol:
            return False
    return True

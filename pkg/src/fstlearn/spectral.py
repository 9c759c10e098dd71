"""Spectral recovery of an FST from its binary Hankel matrices.

The pipeline factors H_Theta = P S by truncated SVD, rebases the factors
with a change-of-basis matrix B (stacked from linearly independent rows
of P, empty-word row first) so that P's rows become standard basis
vectors or zero and S becomes binary, then reads the machine off the
per-letter matrices T_chi = P+ H_chi S+. The rebased factors are only
snapped to {0,1} when every entry is within tolerance; anything else is
a hard error, because a non-natural result means the mask was not a
basis or the sample set violates the model assumptions.

All steps are deterministic: no randomness, ties broken by row order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import AnalysisError, ClosednessError, DegenerateRankError, NaturalityError
from .fst import EPS, Fst, Letter, SampleSet, Word, trim
from .hankel import (
    TOL_BINARY,
    TOL_RANK,
    HankelSet,
    Mask,
    build_hankel_set,
    check_closed,
    find_basis,
    numeric_rank,
)


def _snap_binary(arr: np.ndarray, tol: float) -> np.ndarray | None:
    """Round entries to {0,1} when all are within tol, else None."""
    out = np.where(np.abs(arr) <= tol, 0.0, np.where(np.abs(arr - 1.0) <= tol, 1.0, np.nan))
    if np.isnan(out).any():
        return None
    return out


def _rows_unit_or_zero(binary: np.ndarray) -> bool:
    return bool(np.all(binary.sum(axis=-1) <= 1.0))


@dataclass(frozen=True, eq=False)
class Decomposition:
    """Rank factorization H_Theta = p s with matched pseudo-inverses.

    p_pinv is a left inverse of p and s_pinv a right inverse of s,
    carried along so tuple extraction reuses the numerics that produced
    the factors instead of re-decomposing.
    """

    p: np.ndarray
    s: np.ndarray
    p_pinv: np.ndarray
    s_pinv: np.ndarray

    def __post_init__(self) -> None:
        r = self.p.shape[1]
        if self.s.shape[0] != r or self.p_pinv.shape != self.p.T.shape or self.s_pinv.shape != self.s.T.shape:
            raise ValueError("decomposition factor shapes disagree")

    @property
    def r(self) -> int:
        return int(self.p.shape[1])

    @classmethod
    def from_factors(cls, p: np.ndarray, s: np.ndarray) -> "Decomposition":
        return cls(p=p, s=s, p_pinv=np.linalg.pinv(p), s_pinv=np.linalg.pinv(s))


@dataclass(frozen=True, eq=False)
class TransitionTuple:
    """Matrix realization (t0, t_inf, {T_chi}) of a word function.

    eval_tuple multiplies t0 through the letter matrices into t_inf; a
    natural tuple additionally has basis-vector rows and binary t_inf,
    so its nonzero pattern is an FST transition graph.
    """

    t0: np.ndarray
    t_inf: np.ndarray
    trans: dict[Letter, np.ndarray]
    r: int

    def __post_init__(self) -> None:
        if self.t0.shape != (self.r,) or self.t_inf.shape != (self.r,):
            raise ValueError("boundary vectors must have length r")
        for chi, mat in self.trans.items():
            if mat.shape != (self.r, self.r):
                raise ValueError(f"transition matrix for {chi!r} must be r x r")


@dataclass(frozen=True, eq=False)
class LearnResult:
    """Every intermediate of one learn_fst run, for dumps and tests."""

    sample: SampleSet
    mask: Mask
    hankel: HankelSet
    raw: Decomposition
    b: np.ndarray
    natural: Decomposition
    tup: TransitionTuple
    fst: Fst


def full_rank_decompose(h_theta: np.ndarray, tol: float = TOL_RANK) -> Decomposition:
    """Truncated-SVD rank factorization P = U_r Sigma_r, S = V_r^T."""
    u, sv, vt = np.linalg.svd(h_theta)
    top = sv[0] if sv.size else 0.0
    r = int(np.sum(sv > tol * max(top, 1.0)))
    if r == 0:
        raise DegenerateRankError("decompose", "Hankel block has numeric rank 0; nothing to learn")
    return Decomposition(
        p=u[:, :r] * sv[:r],
        s=vt[:r, :],
        p_pinv=(u[:, :r] / sv[:r]).T,
        s_pinv=vt[:r, :].T,
    )


def naturalize(d: Decomposition, tol: float = TOL_BINARY) -> tuple[Decomposition, np.ndarray]:
    """Rebase (P, S) so P has basis-vector rows and S is binary.

    Scans P top-down (empty-word row first, so state 0 is always the
    initial state) collecting rows that raise the rank, stacks them into
    B, and returns (P B^-1, B S) snapped to {0,1}. Raises NaturalityError
    when the rebased factors do not snap or a P row is neither zero nor
    a basis vector.
    """
    p = d.p
    r = d.r
    chosen: list[int] = []
    for i in range(p.shape[0]):
        if numeric_rank(p[chosen + [i], :]) > len(chosen):
            chosen.append(i)
            if len(chosen) == r:
                break
    if len(chosen) < r:
        raise NaturalityError("naturalize", "left factor is rank-deficient; cannot build a change of basis")
    b = p[chosen, :]
    b_inv = np.linalg.inv(b)
    p_new = _snap_binary(p @ b_inv, tol)
    s_new = _snap_binary(b @ d.s, tol)
    if p_new is None or s_new is None or not _rows_unit_or_zero(p_new):
        raise NaturalityError(
            "naturalize",
            "data does not admit a natural decomposition; the mask is not a basis "
            "or the samples violate the deterministic-acceptor assumption",
        )
    rebased = Decomposition(p=p_new, s=s_new, p_pinv=b @ d.p_pinv, s_pinv=d.s_pinv @ b_inv)
    return rebased, b


def extract_tuple(hz: HankelSet, d: Decomposition) -> TransitionTuple:
    """T_chi = P+ H_chi S+ with t0 = P[0, :] and t_inf = S[:, 0]."""
    if numeric_rank(d.p) < d.r or numeric_rank(d.s) < d.r:
        raise AnalysisError("extract", "decomposition factors are rank-deficient")
    return TransitionTuple(
        t0=d.p[0, :].copy(),
        t_inf=d.s[:, 0].copy(),
        trans={chi: d.p_pinv @ hc @ d.s_pinv for chi, hc in hz.h_chi.items()},
        r=d.r,
    )


def is_natural(t: TransitionTuple, tol: float = TOL_BINARY) -> bool:
    t0 = _snap_binary(t.t0, tol)
    t_inf = _snap_binary(t.t_inf, tol)
    if t0 is None or t_inf is None or t0.sum() != 1.0:
        return False
    for mat in t.trans.values():
        snapped = _snap_binary(mat, tol)
        if snapped is None or not _rows_unit_or_zero(snapped):
            return False
    return True


def eval_tuple(t: TransitionTuple, w: Word) -> float:
    vec = t.t0
    for chi in w:
        mat = t.trans.get(chi)
        if mat is None:
            raise ValueError(f"letter {chi!r} is not in the tuple's alphabet")
        vec = vec @ mat
    return float(vec @ t.t_inf)


def tuple_to_fst(t: TransitionTuple, alphabet: Sequence[Letter] | None = None) -> Fst:
    """Read the FST graph off a natural tuple: arcs where T_chi is 1.

    State names are the tuple coordinates, preserved so callers can line
    states up with rows of the natural decomposition. The result is
    trimmed but not renamed.
    """
    if not is_natural(t):
        raise NaturalityError("naturality", "transition tuple is not natural; no FST to read off")
    letters = tuple(alphabet) if alphabet is not None else tuple(sorted(t.trans))
    missing = [chi for chi in letters if chi not in t.trans]
    if missing:
        raise ValueError(f"letters {missing!r} are not in the tuple's alphabet")
    t0 = _snap_binary(t.t0, TOL_BINARY)
    t_inf = _snap_binary(t.t_inf, TOL_BINARY)
    transitions = set()
    for chi in letters:
        mat = _snap_binary(t.trans[chi], TOL_BINARY)
        for src, dst in np.argwhere(mat == 1.0):
            transitions.add((str(int(src)), chi[0], chi[1], str(int(dst))))
    machine = Fst(
        states=tuple(str(k) for k in range(t.r)),
        initial=str(int(np.argmax(t0))),
        transitions=frozenset(transitions),
        finals=frozenset(str(int(k)) for k in np.flatnonzero(t_inf == 1.0)),
    )
    return trim(machine)


def learn_pipeline(
    d: SampleSet,
    max_mask_len: int | None = None,
    tol_rank: float = TOL_RANK,
    tol_binary: float = TOL_BINARY,
) -> LearnResult:
    """find_basis -> Hankel set -> closedness gate -> SVD -> naturalize -> FST.

    max_mask_len defaults to floor((L - 1) / 2) for the longest sampled
    word length L, so every membership query psi chi gamma stays within
    the sampled horizon.
    """
    if not d.words:
        raise ValueError("cannot learn from an empty sample set")
    if max_mask_len is None:
        longest = max(len(w) for w in d.words)
        max_mask_len = max(0, (longest - 1) // 2)
    mask = find_basis(d, max_mask_len)
    hz = build_hankel_set(d, mask)
    if not check_closed(hz, tol_binary):
        raise ClosednessError(
            "closedness",
            "an H_chi row leaves the row space of H_Theta: insufficient data or mask; "
            "increase max_mask_len or collect more samples",
        )
    raw = full_rank_decompose(hz.h_theta, tol_rank)
    natural, b = naturalize(raw, tol_binary)
    tup = extract_tuple(hz, natural)
    fst = tuple_to_fst(tup, d.alphabet)
    return LearnResult(sample=d, mask=mask, hankel=hz, raw=raw, b=b, natural=natural, tup=tup, fst=fst)


def learn_fst(d: SampleSet, max_mask_len: int | None = None) -> Fst:
    return learn_pipeline(d, max_mask_len).fst

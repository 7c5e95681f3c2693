"""Truncated multimode Fock spaces and sparse state vectors.

The basis of an N-mode space keeps every occupation tuple (n_1, ..., n_N)
with total quanta n_1 + ... + n_N <= cutoff, ordered by total degree and
then lexicographically descending.  Truncation is always by total quanta,
never per mode, so parity and charge-like sectors stay intact and a single
Poisson tail bounds every coherent-state construction.

States are stored sparsely (nonzero amplitudes only) and are treated as
immutable after construction.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, Mapping

import numpy as np

MultiIndex = tuple[int, ...]

#: refuse to enumerate bases larger than this unless explicitly overridden
DEFAULT_MAX_STATES = 1_000_000


class MemoryGuardError(RuntimeError):
    """Basis would exceed the configured maximum number of states."""


class BasisMismatchError(ValueError):
    """Two states that must share a basis do not."""


def _compositions(total: int, parts: int) -> Iterator[MultiIndex]:
    """Yield all tuples of `parts` non-negative ints summing to `total`,
    lexicographically descending."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@dataclass(frozen=True)
class FockBasis:
    """Ordered truncated basis of an N-mode Fock space."""

    modes: int
    cutoff: int
    states: tuple[MultiIndex, ...]
    _index: dict[MultiIndex, int] = field(repr=False, compare=False)

    @property
    def size(self) -> int:
        return len(self.states)

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self) -> Iterator[MultiIndex]:
        return iter(self.states)

    def index_of(self, n: MultiIndex) -> int:
        return self._index[tuple(n)]

    def __contains__(self, n) -> bool:
        return tuple(n) in self._index


def basis_size(modes: int, cutoff: int) -> int:
    """Number of occupation tuples with n_tot <= cutoff: C(cutoff+modes, modes)."""
    return math.comb(cutoff + modes, modes)


def build_basis(modes: int, cutoff: int, *, max_states: int | None = DEFAULT_MAX_STATES) -> FockBasis:
    """Enumerate the truncated basis.

    Parameters
    ----------
    modes : int
        Number of boson modes, >= 1.
    cutoff : int
        Maximum total quanta kept, >= 0.
    max_states : int or None
        Memory guard; pass None (or a larger value) to override the
        default limit of 10**6 states.

    Returns
    -------
    FockBasis
        Deterministically ordered basis: total degree first, then
        lexicographically descending within each degree, e.g. for two
        modes and cutoff 2: (0,0),(1,0),(0,1),(2,0),(1,1),(0,2).
    """
    if modes < 1:
        raise ValueError(f"modes must be >= 1, got {modes}")
    if cutoff < 0:
        raise ValueError(f"cutoff must be >= 0, got {cutoff}")
    n_states = basis_size(modes, cutoff)
    if max_states is not None and n_states > max_states:
        raise MemoryGuardError(
            f"basis would hold {n_states} states (> guard {max_states}); "
            "pass max_states=None to override"
        )
    states: list[MultiIndex] = []
    for degree in range(cutoff + 1):
        states.extend(_compositions(degree, modes))
    index = {n: i for i, n in enumerate(states)}
    return FockBasis(modes=modes, cutoff=cutoff, states=tuple(states), _index=index)


@dataclass(frozen=True)
class StateVector:
    """Sparse complex amplitude map over a FockBasis.

    `lost_weight` accumulates the squared amplitude dropped above the
    cutoff by raising operators; constructors that truncate an infinite
    expansion record the analytic tail there as well.
    """

    basis: FockBasis
    amplitudes: dict[MultiIndex, complex]
    lost_weight: float = 0.0

    def __post_init__(self):
        for n in self.amplitudes:
            if n not in self.basis:
                raise ValueError(f"occupation {n} not in basis "
                                 f"(modes={self.basis.modes}, cutoff={self.basis.cutoff})")

    def norm_sq(self) -> float:
        return sum((a.real * a.real + a.imag * a.imag) for a in self.amplitudes.values())

    def norm(self) -> float:
        return math.sqrt(self.norm_sq())

    def scaled(self, c: complex) -> "StateVector":
        return StateVector(self.basis, {n: c * a for n, a in self.amplitudes.items()},
                           self.lost_weight)

    def add(self, other: "StateVector") -> "StateVector":
        if other.basis is not self.basis and other.basis != self.basis:
            raise BasisMismatchError("cannot add states on different bases")
        out = dict(self.amplitudes)
        for n, a in other.amplitudes.items():
            out[n] = out.get(n, 0.0) + a
        return StateVector(self.basis, out, self.lost_weight + other.lost_weight)

    def to_dense(self) -> np.ndarray:
        vec = np.zeros(self.basis.size, dtype=complex)
        for n, a in self.amplitudes.items():
            vec[self.basis.index_of(n)] = a
        return vec

    def with_lost_weight(self, lost: float) -> "StateVector":
        return replace(self, lost_weight=lost)


def zero_state(basis: FockBasis) -> StateVector:
    return StateVector(basis, {})


def basis_state(basis: FockBasis, n: MultiIndex) -> StateVector:
    n = tuple(n)
    if n not in basis:
        raise ValueError(f"occupation {n} not in basis")
    return StateVector(basis, {n: 1.0 + 0.0j})


def inner_product(u: StateVector, v: StateVector) -> complex:
    """Fock-space inner product <u|v> = sum conj(u_n) v_n.

    Conjugate-symmetric and linear in `v`.  The two states must live on
    the same basis.
    """
    if u.basis is not v.basis and u.basis != v.basis:
        raise BasisMismatchError("inner product requires a common basis")
    small, big = (u.amplitudes, v.amplitudes)
    if len(big) < len(small):
        return complex(sum(small[n].conjugate() * big[n] for n in big if n in small))
    return complex(sum(small[n].conjugate() * big[n] for n in small if n in big))


@dataclass(frozen=True)
class SectorLabel:
    """Parity of the total quanta plus the charge-like sector eigenvalue l
    for a recorded (p, q) mode split."""

    parity: str          # "even" | "odd"
    l: int
    p: int
    q: int


def sector_of(n: MultiIndex, p: int, q: int) -> SectorLabel:
    """Classify an occupation tuple: parity of n_tot and
    l = sum of the first p occupations minus the sum of the last q."""
    n = tuple(n)
    if p < 1 or q < 1:
        raise ValueError("p and q must both be >= 1")
    if p + q != len(n):
        raise ValueError(f"p + q = {p + q} does not match {len(n)} modes")
    n_tot = sum(n)
    l = sum(n[:p]) - sum(n[p:])
    return SectorLabel(parity="even" if n_tot % 2 == 0 else "odd", l=l, p=p, q=q)


def coherent_tail_bound(alpha: Iterable[complex], cutoff: int) -> float:
    """Probability weight of an exact multimode Glauber coherent state
    beyond the truncation.

    The multinomial sum over n_tot <= cutoff collapses to a Poisson
    cumulative with rate |alpha|^2, so the tail is the upper Poisson tail
    P[X > cutoff].  It is summed forwards from the first excluded term so
    that values far below machine epsilon remain meaningful.
    """
    if cutoff < 0:
        raise ValueError("cutoff must be >= 0")
    lam = float(sum(abs(a) ** 2 for a in alpha))
    if lam == 0.0:
        return 0.0
    # first excluded term e^-lam lam^(M+1)/(M+1)! in log space
    m0 = cutoff + 1
    log_term = -lam + m0 * math.log(lam) - math.lgamma(m0 + 1)
    if log_term < -745.0:  # below double-precision underflow
        return 0.0
    term = math.exp(log_term)
    total = 0.0
    m = m0
    while True:
        total += term
        m += 1
        term *= lam / m
        if term < total * 1e-18 + 5e-324:
            break
    return min(total, 1.0)


# ---------------------------------------------------------------------------
# JSON serialization
#
# basis:  {"modes": N, "cutoff": M}
# state:  {"basis": {...}, "amplitudes": [{"occupations": [...], "re": x, "im": y}, ...]}
#
# Floats round-trip exactly: json emits repr(float), the shortest string
# that parses back to the identical double.
# ---------------------------------------------------------------------------

def basis_to_dict(basis: FockBasis) -> dict:
    return {"modes": basis.modes, "cutoff": basis.cutoff}


def basis_from_dict(d: Mapping, *, max_states: int | None = DEFAULT_MAX_STATES) -> FockBasis:
    return build_basis(int(d["modes"]), int(d["cutoff"]), max_states=max_states)


def state_to_dict(state: StateVector) -> dict:
    records = []
    for n in state.basis.states:          # basis order keeps output deterministic
        a = state.amplitudes.get(n)
        if a is None:
            continue
        records.append({"occupations": list(n), "re": float(a.real), "im": float(a.imag)})
    return {"basis": basis_to_dict(state.basis), "amplitudes": records}


def state_from_dict(d: Mapping, basis: FockBasis | None = None) -> StateVector:
    if basis is None:
        basis = basis_from_dict(d["basis"])
    amps = {tuple(rec["occupations"]): complex(rec["re"], rec["im"])
            for rec in d["amplitudes"]}
    return StateVector(basis, amps)


def state_to_json(state: StateVector) -> str:
    return json.dumps(state_to_dict(state), sort_keys=True)


def state_from_json(text: str, basis: FockBasis | None = None) -> StateVector:
    return state_from_dict(json.loads(text), basis)

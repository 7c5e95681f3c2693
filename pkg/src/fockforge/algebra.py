"""Boson-quadratic generators and numerical commutation-relation checks.

Generators are symbolic trees applied as compositions of elementary
ladder actions, which keeps every application exact and O(support); a
dense matrix materialization exists for Gram and spectral work.  Raising
actions that would leave the truncated basis drop the amplitude and add
its weight to the result's truncation-loss accumulator, so commutator
checks restricted to interior states see the exact algebra.

Conventions (modes are 1-based):

* pair lowering  E(i,j) = a_i a_j = E(j,i)
* pair raising   Edag(i,j) = adag_i adag_j
* mixing         H(i,j) = (adag_i a_j + a_j adag_i)/2 = adag_i a_j + delta_ij/2
* one-mode su(1,1) triple K1 = (a^2 + adag^2)/4, K2 = i(a^2 - adag^2)/4,
  K3 = (2 adag a + 1)/4
* compact blocks Mp/Mq (symmetric) and Mpt/Mqt (antisymmetric) built
  from H, and the charge operator L(p,q) = sum_{i<=p} adag_i a_i -
  sum_{i>p} adag_i a_i, which acts diagonally with the sector label l.

With H(i,j) as defined above the commutation table closes as

    [E(i,j), Edag(k,l)] = d_jk H(l,i) + d_jl H(k,i) + d_ik H(l,j) + d_il H(k,j)
    [E(i,j), H(k,l)]    = d_jk E(i,l) + d_ik E(j,l)
    [Edag(i,j), H(k,l)] = -d_il Edag(k,j) - d_jl Edag(k,i)
    [H(i,j), H(k,l)]    = d_jk H(i,l) - d_il H(k,j)

(the widely printed form of the first and last lines carries the H
indices in the transposed convention; the suite checks the table in the
form that actually closes, which is verified independently through a
symbolic reduction of the bilinears).
"""

from __future__ import annotations

import math
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .fock import FockBasis, StateVector, basis_state
from .reports import VerificationReport


class GeneratorIndexError(ValueError):
    """A generator references a mode outside the basis."""


PRIMITIVE_KINDS = frozenset({"a", "adag", "E", "Edag", "H", "I", "BG-", "BG+", "BG3"})
COMPOSITE_KINDS = frozenset({"scale", "sum", "product"})


@dataclass(frozen=True)
class GeneratorSpec:
    """Symbolic descriptor of a boson-quadratic operator."""

    kind: str
    indices: tuple[int, ...] = ()
    coeff: complex = 1.0 + 0.0j          # used by "scale"
    children: tuple["GeneratorSpec", ...] = ()
    k: float = 0.0                        # Bargmann index for BG ladder ops

    def __str__(self) -> str:
        if self.kind in ("a", "adag"):
            return f"{self.kind}({self.indices[0]})"
        if self.kind in ("E", "Edag", "H"):
            return f"{self.kind}({self.indices[0]},{self.indices[1]})"
        if self.kind == "I":
            return "I"
        if self.kind in ("BG-", "BG+", "BG3"):
            name = {"BG-": "BGminus", "BG+": "BGplus", "BG3": "BG3"}[self.kind]
            return f"{name}({self.k:g})"
        if self.kind == "scale":
            c = self.coeff
            cs = f"{c.real:g}" if c.imag == 0 else f"({c.real:g}{c.imag:+g}j)"
            return f"{cs}*{self.children[0]}"
        if self.kind == "sum":
            return "Sum(" + ",".join(str(c) for c in self.children) + ")"
        if self.kind == "product":
            return "Product(" + ",".join(str(c) for c in self.children) + ")"
        return self.kind


# -- constructors -----------------------------------------------------------

def annihilate(i: int) -> GeneratorSpec:
    return GeneratorSpec("a", (i,))


def create(i: int) -> GeneratorSpec:
    return GeneratorSpec("adag", (i,))


def e_lower(i: int, j: int) -> GeneratorSpec:
    """Pair annihilation a_i a_j; symmetric in (i, j)."""
    i, j = sorted((i, j))
    return GeneratorSpec("E", (i, j))


def e_raise(i: int, j: int) -> GeneratorSpec:
    i, j = sorted((i, j))
    return GeneratorSpec("Edag", (i, j))


def h_mix(i: int, j: int) -> GeneratorSpec:
    """H(i,j) = adag_i a_j + delta_ij / 2 (NOT symmetric; H(i,j)^dag = H(j,i))."""
    return GeneratorSpec("H", (i, j))


def identity_op() -> GeneratorSpec:
    return GeneratorSpec("I")


def scale(c: complex, spec: GeneratorSpec) -> GeneratorSpec:
    return GeneratorSpec("scale", coeff=complex(c), children=(spec,))


def op_sum(*specs: GeneratorSpec) -> GeneratorSpec:
    if len(specs) == 1:
        return specs[0]
    return GeneratorSpec("sum", children=tuple(specs))


def op_product(*specs: GeneratorSpec) -> GeneratorSpec:
    """Operator composition; Product(A, B) acts as A(B(state))."""
    if len(specs) == 1:
        return specs[0]
    return GeneratorSpec("product", children=tuple(specs))


def k1_op() -> GeneratorSpec:
    return scale(0.25, op_sum(e_lower(1, 1), e_raise(1, 1)))


def k2_op() -> GeneratorSpec:
    return op_sum(scale(0.25j, e_lower(1, 1)), scale(-0.25j, e_raise(1, 1)))


def k3_op() -> GeneratorSpec:
    return scale(0.5, h_mix(1, 1))


def k_minus_op() -> GeneratorSpec:
    """K1 - i K2 = a^2 / 2 on the single mode."""
    return scale(0.5, e_lower(1, 1))


def k_plus_op() -> GeneratorSpec:
    return scale(0.5, e_raise(1, 1))


def mp_sym(a: int, b: int, p: int | None = None) -> GeneratorSpec:
    """Symmetric compact-block generator (H(a,b) + H(b,a) - delta_ab)/2."""
    if p is not None and not (1 <= a <= p and 1 <= b <= p):
        raise GeneratorIndexError(f"Mp indices {(a, b)} outside 1..{p}")
    if a == b:
        return op_sum(h_mix(a, a), scale(-0.5, identity_op()))
    return scale(0.5, op_sum(h_mix(a, b), h_mix(b, a)))


def mp_antisym(a: int, b: int, p: int | None = None) -> GeneratorSpec:
    """Antisymmetric compact-block generator i (H(b,a) - H(a,b))."""
    if p is not None and not (1 <= a <= p and 1 <= b <= p):
        raise GeneratorIndexError(f"Mpt indices {(a, b)} outside 1..{p}")
    return op_sum(scale(1j, h_mix(b, a)), scale(-1j, h_mix(a, b)))


def mq_sym(mu: int, nu: int, p: int | None = None) -> GeneratorSpec:
    if p is not None and (mu <= p or nu <= p):
        raise GeneratorIndexError(f"Mq indices {(mu, nu)} not above p={p}")
    return mp_sym(mu, nu)


def mq_antisym(mu: int, nu: int, p: int | None = None) -> GeneratorSpec:
    if p is not None and (mu <= p or nu <= p):
        raise GeneratorIndexError(f"Mqt indices {(mu, nu)} not above p={p}")
    return mp_antisym(mu, nu)


def l_op(p: int, q: int) -> GeneratorSpec:
    """Charge operator: number in the first p modes minus number in the
    last q.  Diagonal on Fock states with eigenvalue the sector label l."""
    terms = [op_sum(h_mix(a, a), scale(-0.5, identity_op())) for a in range(1, p + 1)]
    terms += [scale(-1.0, op_sum(h_mix(m, m), scale(-0.5, identity_op())))
              for m in range(p + 1, p + q + 1)]
    return op_sum(*terms)


def bg_lower(k: float) -> GeneratorSpec:
    """Abstract discrete-series lowering: |n> -> sqrt(n (2k+n-1)) |n-1>."""
    _check_bargmann(k)
    return GeneratorSpec("BG-", k=k)


def bg_raise(k: float) -> GeneratorSpec:
    _check_bargmann(k)
    return GeneratorSpec("BG+", k=k)


def bg_cartan(k: float) -> GeneratorSpec:
    """Abstract weight operator: |n> -> (k + n) |n>."""
    _check_bargmann(k)
    return GeneratorSpec("BG3", k=k)


def _check_bargmann(k: float) -> None:
    if k <= 0 or abs(2.0 * k - round(2.0 * k)) > 1e-12:
        raise ValueError(f"Bargmann index must be a positive half-integer, got {k}")


# -- application ------------------------------------------------------------

def _validate(spec: GeneratorSpec, basis: FockBasis) -> None:
    if spec.kind in ("a", "adag", "E", "Edag", "H"):
        for i in spec.indices:
            if not 1 <= i <= basis.modes:
                raise GeneratorIndexError(
                    f"mode index {i} in {spec} outside 1..{basis.modes}")
    elif spec.kind in ("BG-", "BG+", "BG3"):
        if basis.modes != 1:
            raise GeneratorIndexError("BG ladder operators act on a one-mode basis")
    for child in spec.children:
        _validate(child, basis)


def _apply(spec: GeneratorSpec, amps: dict, basis: FockBasis) -> tuple[dict, float]:
    """Apply one spec to an amplitude dict; return (new amplitudes, dropped weight)."""
    kind = spec.kind
    cutoff = basis.cutoff

    if kind == "scale":
        out, dropped = _apply(spec.children[0], amps, basis)
        c = spec.coeff
        return {n: c * a for n, a in out.items()}, dropped * abs(c) ** 2

    if kind == "sum":
        total: dict = {}
        dropped = 0.0
        for child in spec.children:
            part, d = _apply(child, amps, basis)
            dropped += d
            for n, a in part.items():
                total[n] = total.get(n, 0.0) + a
        return total, dropped

    if kind == "product":
        cur = amps
        dropped = 0.0
        for child in reversed(spec.children):
            cur, d = _apply(child, cur, basis)
            dropped += d
        return cur, dropped

    if kind == "I":
        return dict(amps), 0.0

    out: dict = {}
    dropped = 0.0

    if kind == "a":
        i = spec.indices[0] - 1
        for n, a in amps.items():
            ni = n[i]
            if ni == 0:
                continue
            m = n[:i] + (ni - 1,) + n[i + 1:]
            out[m] = out.get(m, 0.0) + a * math.sqrt(ni)
        return out, dropped

    if kind == "adag":
        i = spec.indices[0] - 1
        for n, a in amps.items():
            ni = n[i]
            if sum(n) + 1 > cutoff:
                dropped += (ni + 1) * abs(a) ** 2
                continue
            m = n[:i] + (ni + 1,) + n[i + 1:]
            out[m] = out.get(m, 0.0) + a * math.sqrt(ni + 1)
        return out, dropped

    if kind == "E":
        i, j = (x - 1 for x in spec.indices)
        for n, a in amps.items():
            if i == j:
                ni = n[i]
                if ni < 2:
                    continue
                factor = math.sqrt(ni * (ni - 1))
                m = n[:i] + (ni - 2,) + n[i + 1:]
            else:
                ni, nj = n[i], n[j]
                if ni == 0 or nj == 0:
                    continue
                factor = math.sqrt(ni * nj)
                lst = list(n)
                lst[i] -= 1
                lst[j] -= 1
                m = tuple(lst)
            out[m] = out.get(m, 0.0) + a * factor
        return out, dropped

    if kind == "Edag":
        i, j = (x - 1 for x in spec.indices)
        for n, a in amps.items():
            if i == j:
                ni = n[i]
                factor_sq = (ni + 1) * (ni + 2)
            else:
                factor_sq = (n[i] + 1) * (n[j] + 1)
            if sum(n) + 2 > cutoff:
                dropped += factor_sq * abs(a) ** 2
                continue
            lst = list(n)
            lst[i] += 1
            lst[j] += 1
            m = tuple(lst)
            out[m] = out.get(m, 0.0) + a * math.sqrt(factor_sq)
        return out, dropped

    if kind == "H":
        i, j = (x - 1 for x in spec.indices)
        for n, a in amps.items():
            if i == j:
                out[n] = out.get(n, 0.0) + a * (n[i] + 0.5)
                continue
            nj = n[j]
            if nj == 0:
                continue
            lst = list(n)
            lst[j] -= 1
            lst[i] += 1
            m = tuple(lst)
            out[m] = out.get(m, 0.0) + a * math.sqrt(nj * (n[i] + 1))
        return out, dropped

    if kind == "BG-":
        two_k = 2.0 * spec.k
        for n, a in amps.items():
            nn = n[0]
            if nn == 0:
                continue
            out[(nn - 1,)] = out.get((nn - 1,), 0.0) + a * math.sqrt(nn * (two_k + nn - 1.0))
        return out, dropped

    if kind == "BG+":
        two_k = 2.0 * spec.k
        for n, a in amps.items():
            nn = n[0]
            if nn + 1 > cutoff:
                dropped += (nn + 1) * (two_k + nn) * abs(a) ** 2
                continue
            out[(nn + 1,)] = out.get((nn + 1,), 0.0) + a * math.sqrt((nn + 1) * (two_k + nn))
        return out, dropped

    if kind == "BG3":
        for n, a in amps.items():
            out[n] = out.get(n, 0.0) + a * (spec.k + n[0])
        return out, dropped

    raise ValueError(f"unknown generator kind {kind!r}")


def apply_generator(spec: GeneratorSpec, v: StateVector) -> StateVector:
    """Apply a generator to a state.

    Amplitudes raised above the cutoff are dropped; their squared weight
    is added to the input's accumulator and recorded on the result.
    """
    _validate(spec, v.basis)
    out, dropped = _apply(spec, v.amplitudes, v.basis)
    out = {n: a for n, a in out.items() if a != 0.0}
    return StateVector(v.basis, out, v.lost_weight + dropped)


def to_matrix(spec: GeneratorSpec, basis: FockBasis) -> np.ndarray:
    """Dense matrix of the truncated (projected) operator; drops above
    the cutoff are simply absent from the matrix."""
    _validate(spec, basis)
    mat = np.zeros((basis.size, basis.size), dtype=complex)
    for col, n in enumerate(basis.states):
        out, _ = _apply(spec, {n: 1.0 + 0.0j}, basis)
        for m, a in out.items():
            mat[basis.index_of(m), col] = a
    return mat


def raise_degree(spec: GeneratorSpec) -> int:
    """Maximum total quanta the operator can add to a state."""
    kind = spec.kind
    if kind in ("a", "E", "H", "I", "BG-", "BG3"):
        return 0
    if kind in ("adag", "BG+"):
        return 1 if kind == "BG+" else 1
    if kind == "Edag":
        return 2
    if kind == "scale":
        return raise_degree(spec.children[0])
    if kind == "sum":
        return max(raise_degree(c) for c in spec.children)
    if kind == "product":
        return sum(raise_degree(c) for c in spec.children)
    raise ValueError(kind)


# -- commutator checks ------------------------------------------------------

def commutator_residual(a_spec: GeneratorSpec, b_spec: GeneratorSpec,
                        expected: GeneratorSpec | None, basis: FockBasis,
                        interior_margin: int = 4) -> float:
    """max over interior states |n> (n_tot <= cutoff - margin) of
    ||([A, B] - expected)|n>||; exact relations come out at the level of
    floating-point roundoff."""
    if interior_margin > basis.cutoff:
        raise ValueError(f"interior margin {interior_margin} exceeds cutoff {basis.cutoff}")
    needed = raise_degree(a_spec) + raise_degree(b_spec)
    if expected is not None:
        needed = max(needed, raise_degree(expected))
    if interior_margin < needed:
        raise ValueError(f"interior margin {interior_margin} below the "
                         f"{needed} quanta raised by the operators")
    worst = 0.0
    limit = basis.cutoff - interior_margin
    for n in basis.states:
        if sum(n) > limit:
            continue
        psi = basis_state(basis, n)
        ab = apply_generator(a_spec, apply_generator(b_spec, psi))
        ba = apply_generator(b_spec, apply_generator(a_spec, psi))
        resid = ab.add(ba.scaled(-1.0))
        if expected is not None:
            resid = resid.add(apply_generator(expected, psi).scaled(-1.0))
        worst = max(worst, resid.norm())
    return worst


# symbolic reduction of number-conserving bilinears sum c_xy adag_x a_y + const,
# used to generate independent expected values for the compact-block closures
_Bilinear = tuple[dict[tuple[int, int], complex], complex]


def _as_bilinear(spec: GeneratorSpec) -> _Bilinear:
    kind = spec.kind
    if kind == "H":
        i, j = spec.indices
        return {(i, j): 1.0 + 0.0j}, (0.5 if i == j else 0.0)
    if kind == "I":
        return {}, 1.0 + 0.0j
    if kind == "scale":
        terms, const = _as_bilinear(spec.children[0])
        c = spec.coeff
        return {xy: c * v for xy, v in terms.items()}, c * const
    if kind == "sum":
        total: dict = {}
        const = 0.0 + 0.0j
        for child in spec.children:
            t, c = _as_bilinear(child)
            const += c
            for xy, v in t.items():
                total[xy] = total.get(xy, 0.0) + v
        return total, const
    raise ValueError(f"{spec} is not a number-conserving bilinear")


def _bilinear_commutator(a: _Bilinear, b: _Bilinear) -> _Bilinear:
    # [adag_x a_y, adag_u a_v] = d_yu adag_x a_v - d_vx adag_u a_y
    terms: dict = {}
    for (x, y), ca in a[0].items():
        for (u, v), cb in b[0].items():
            c = ca * cb
            if y == u:
                terms[(x, v)] = terms.get((x, v), 0.0) + c
            if v == x:
                terms[(u, y)] = terms.get((u, y), 0.0) - c
    return terms, 0.0 + 0.0j


def _bilinear_to_spec(bil: _Bilinear) -> GeneratorSpec | None:
    terms, const = bil
    parts = []
    shift = complex(const)
    for (x, y), c in sorted(terms.items()):
        if c == 0.0:
            continue
        parts.append(scale(c, h_mix(x, y)))
        if x == y:
            shift -= 0.5 * c           # adag_x a_x = H(x,x) - 1/2
    if shift != 0.0:
        parts.append(scale(shift, identity_op()))
    if not parts:
        return None
    return op_sum(*parts)


# -- relation tables --------------------------------------------------------

def _sp_lines(n_modes: int):
    pairs = [(i, j) for i in range(1, n_modes + 1) for j in range(i, n_modes + 1)]
    hpairs = [(i, j) for i in range(1, n_modes + 1) for j in range(1, n_modes + 1)]
    for idx, (i, j) in enumerate(pairs):
        for (k, l) in pairs[idx:]:
            yield (f"[E({i},{j}),E({k},{l})]", e_lower(i, j), e_lower(k, l), None)
            yield (f"[Edag({i},{j}),Edag({k},{l})]", e_raise(i, j), e_raise(k, l), None)
    for (i, j) in pairs:
        for (k, l) in pairs:
            terms = []
            if j == k:
                terms.append(h_mix(l, i))
            if j == l:
                terms.append(h_mix(k, i))
            if i == k:
                terms.append(h_mix(l, j))
            if i == l:
                terms.append(h_mix(k, j))
            yield (f"[E({i},{j}),Edag({k},{l})]", e_lower(i, j), e_raise(k, l),
                   op_sum(*terms) if terms else None)
    for (i, j) in pairs:
        for (k, l) in hpairs:
            terms = []
            if j == k:
                terms.append(e_lower(i, l))
            if i == k:
                terms.append(e_lower(j, l))
            yield (f"[E({i},{j}),H({k},{l})]", e_lower(i, j), h_mix(k, l),
                   op_sum(*terms) if terms else None)
            terms = []
            if i == l:
                terms.append(scale(-1.0, e_raise(k, j)))
            if j == l:
                terms.append(scale(-1.0, e_raise(k, i)))
            yield (f"[Edag({i},{j}),H({k},{l})]", e_raise(i, j), h_mix(k, l),
                   op_sum(*terms) if terms else None)
    for a_idx, (i, j) in enumerate(hpairs):
        for (k, l) in hpairs[a_idx:]:
            terms = []
            if j == k:
                terms.append(h_mix(i, l))
            if i == l:
                terms.append(scale(-1.0, h_mix(k, j)))
            yield (f"[H({i},{j}),H({k},{l})]", h_mix(i, j), h_mix(k, l),
                   op_sum(*terms) if terms else None)


def _su11_lines():
    k_plus, k_minus, k3 = k_plus_op(), k_minus_op(), k3_op()
    yield ("[K3,K+]=K+", k3, k_plus, k_plus)
    yield ("[K3,K-]=-K-", k3, k_minus, scale(-1.0, k_minus))
    yield ("[K-,K+]=2K3", k_minus, k_plus, scale(2.0, k3))


def _upq_lines(p: int, q: int):
    n_modes = p + q
    lows = [(a, m) for a in range(1, p + 1) for m in range(p + 1, n_modes + 1)]
    p_range = range(1, p + 1)
    q_range = range(p + 1, n_modes + 1)

    for idx, (a, m) in enumerate(lows):
        for (b, n) in lows[idx:]:
            yield (f"[E({a},{m}),E({b},{n})]", e_lower(a, m), e_lower(b, n), None)
            yield (f"[Edag({a},{m}),Edag({b},{n})]", e_raise(a, m), e_raise(b, n), None)
    for (a, m) in lows:
        for (b, n) in lows:
            terms = []
            if m == n:
                terms.append(h_mix(b, a))
            if a == b:
                terms.append(h_mix(n, m))
            yield (f"[E({a},{m}),Edag({b},{n})]", e_lower(a, m), e_raise(b, n),
                   op_sum(*terms) if terms else None)
    for (a, m) in lows:
        for b in p_range:
            for c in p_range:
                exp = e_lower(m, c) if a == b else None
                yield (f"[E({a},{m}),H({b},{c})]", e_lower(a, m), h_mix(b, c), exp)
        for u in q_range:
            for v in q_range:
                exp = e_lower(a, v) if m == u else None
                yield (f"[E({a},{m}),H({u},{v})]", e_lower(a, m), h_mix(u, v), exp)

    # compact u(p) and u(q) closures, expected values from the symbolic
    # reduction of the bilinears (independent of the ladder machinery)
    def block(rng, tag):
        gens = []
        for x in rng:
            for y in rng:
                if x <= y:
                    gens.append((f"{tag}({x},{y})", mp_sym(x, y)))
                if x < y:
                    gens.append((f"{tag}t({x},{y})", mp_antisym(x, y)))
        for gi, (la, ga) in enumerate(gens):
            for (lb, gb) in gens[gi:]:
                expected = _bilinear_to_spec(
                    _bilinear_commutator(_as_bilinear(ga), _as_bilinear(gb)))
                yield (f"[{la},{lb}]", ga, gb, expected)

    yield from block(p_range, "Mp")
    yield from block(q_range, "Mq")

    # cross-block mixing operators commute
    for a in p_range:
        for b in p_range:
            for u in q_range:
                for v in q_range:
                    yield (f"[H({a},{b}),H({u},{v})]", h_mix(a, b), h_mix(u, v), None)

    # L is a Casimir for the realization: it commutes with every generator
    charge = l_op(p, q)
    for (a, m) in lows:
        yield (f"[L,E({a},{m})]", charge, e_lower(a, m), None)
        yield (f"[L,Edag({a},{m})]", charge, e_raise(a, m), None)
    for x in p_range:
        for y in p_range:
            yield (f"[L,H({x},{y})]", charge, h_mix(x, y), None)
    for u in q_range:
        for v in q_range:
            yield (f"[L,H({u},{v})]", charge, h_mix(u, v), None)


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("FOCKFORGE_THREADS", "1")))
    except ValueError:
        return 1


def relations_suite(algebra_name: str, basis: FockBasis, *, p: int | None = None,
                    q: int | None = None, interior_margin: int = 4,
                    tolerance: float = 1e-12,
                    threads: int | None = None) -> VerificationReport:
    """Check every commutation line of the named table over all index
    combinations, returning the per-line worst interior residual.

    ``algebra_name`` is one of ``sp`` (needs only the basis), ``su11``
    (one-mode basis) or ``u_pq`` (needs p and q with p + q = modes).
    Independent lines may be evaluated concurrently (FOCKFORGE_THREADS);
    the reduction is ordered, so reports are identical for any setting.
    """
    if algebra_name == "sp":
        lines = list(_sp_lines(basis.modes))
        params = {"algebra": "sp", "modes": basis.modes}
    elif algebra_name == "su11":
        if basis.modes != 1:
            raise ValueError("su11 relations need a one-mode basis")
        lines = list(_su11_lines())
        params = {"algebra": "su11"}
    elif algebra_name == "u_pq":
        if p is None or q is None or p + q != basis.modes:
            raise ValueError("u_pq relations need p, q with p + q = modes")
        lines = list(_upq_lines(p, q))
        params = {"algebra": "u_pq", "p": p, "q": q}
    else:
        raise ValueError(f"unknown algebra {algebra_name!r}; expected sp, su11 or u_pq")
    params.update({"cutoff": basis.cutoff, "interior_margin": interior_margin})

    def run(line):
        label, a_spec, b_spec, expected = line
        return label, commutator_residual(a_spec, b_spec, expected, basis, interior_margin)

    n_workers = default_threads() if threads is None else max(1, threads)
    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            results = list(pool.map(run, lines))
    else:
        results = [run(line) for line in lines]

    residuals: dict[str, float] = {}
    for label, r in results:
        residuals[label] = max(r, residuals.get(label, 0.0))
    return VerificationReport(name=f"relations[{algebra_name}]", params=params,
                              residuals=residuals, tolerance=tolerance)


def casimir_su11_check(basis: FockBasis, interior_margin: int = 4) -> float:
    """max over interior one-mode states of ||(K3^2 - K1^2 - K2^2 + 3/16)|n>||."""
    if basis.modes != 1:
        raise ValueError("the quadratic su(1,1) Casimir check needs a one-mode basis")
    if interior_margin > basis.cutoff:
        raise ValueError("interior margin exceeds cutoff")
    casimir = op_sum(
        op_product(k3_op(), k3_op()),
        scale(-1.0, op_product(k1_op(), k1_op())),
        scale(-1.0, op_product(k2_op(), k2_op())),
        scale(3.0 / 16.0, identity_op()),
    )
    worst = 0.0
    for n in basis.states:
        if sum(n) > basis.cutoff - interior_margin:
            continue
        psi = basis_state(basis, n)
        worst = max(worst, apply_generator(casimir, psi).norm())
    return worst


# -- canonical text form ----------------------------------------------------

_TOKEN_RE = re.compile(r"""
    \s*(?:
        (?P<number>[0-9]+(?:\.[0-9]*)?(?:[eE][+-]?[0-9]+)?j?)
      | (?P<name>[A-Za-z][A-Za-z0-9]*)
      | (?P<punct>[(),*+-])
    )""", re.VERBOSE)

_ATOM_ARITY = {
    "a": 1, "adag": 1, "E": 2, "Edag": 2, "H": 2,
    "K1": 0, "K2": 0, "K3": 0, "Kminus": 0, "Kplus": 0, "I": 0,
    "L": 2, "Mp": 2, "Mpt": 2, "Mq": 2, "Mqt": 2,
    "BGminus": 1, "BGplus": 1, "BG3": 1,
}


def _tokenize(text: str) -> list[str]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            if text[pos:].strip() == "":
                break
            raise ValueError(f"cannot tokenize generator text at: {text[pos:]!r}")
        tokens.append(m.group().strip())
        pos = m.end()
    return tokens


class _Parser:
    """Recursive-descent parser for the canonical generator grammar.

    expr    := term (('+' | '-') term)*
    term    := [scalar '*'] atom
    scalar  := signed real or imaginary literal, e.g. 0.5, -2, 1j
    atom    := NAME | NAME '(' int-args ')' | Sum(expr, ...) |
               Product(expr, ...) | Scale(scalar, expr)
    """

    def __init__(self, tokens: list[str]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, expect: str | None = None) -> str:
        tok = self.peek()
        if tok is None:
            raise ValueError("unexpected end of generator text")
        if expect is not None and tok != expect:
            raise ValueError(f"expected {expect!r}, got {tok!r}")
        self.pos += 1
        return tok

    def parse_expr(self) -> GeneratorSpec:
        terms = [self.parse_term()]
        while self.peek() in ("+", "-"):
            sign = self.take()
            term = self.parse_term()
            terms.append(term if sign == "+" else scale(-1.0, term))
        return op_sum(*terms)

    def parse_term(self) -> GeneratorSpec:
        tok = self.peek()
        sign = 1.0
        if tok == "-":
            self.take()
            sign = -1.0
            tok = self.peek()
        if tok is not None and _NUMBER_RE.fullmatch(tok):
            c = sign * _parse_scalar(self.take())
            self.take("*")
            return scale(c, self.parse_atom()) if c != 1.0 else self.parse_atom()
        atom = self.parse_atom()
        return atom if sign == 1.0 else scale(-1.0, atom)

    def parse_atom(self) -> GeneratorSpec:
        name = self.take()
        if name == "Sum" or name == "Product":
            self.take("(")
            children = [self.parse_expr()]
            while self.peek() == ",":
                self.take()
                children.append(self.parse_expr())
            self.take(")")
            return op_sum(*children) if name == "Sum" else op_product(*children)
        if name == "Scale":
            self.take("(")
            sign = 1.0
            if self.peek() == "-":
                self.take()
                sign = -1.0
            c = sign * _parse_scalar(self.take())
            self.take(",")
            child = self.parse_expr()
            self.take(")")
            return scale(c, child)
        if name not in _ATOM_ARITY:
            raise ValueError(f"unknown generator name {name!r}")
        arity = _ATOM_ARITY[name]
        args: list[float] = []
        if arity:
            self.take("(")
            for pos in range(arity):
                if pos:
                    self.take(",")
                args.append(float(self.take()))
            self.take(")")
        return _build_atom(name, args)


_NUMBER_RE = re.compile(r"[0-9]+(?:\.[0-9]*)?(?:[eE][+-]?[0-9]+)?j?")


def _parse_scalar(tok: str) -> complex:
    if tok.endswith("j"):
        return complex(0.0, float(tok[:-1] or "1"))
    return complex(float(tok))


def _build_atom(name: str, args: list[float]) -> GeneratorSpec:
    ints = [int(a) for a in args]
    if name == "a":
        return annihilate(*ints)
    if name == "adag":
        return create(*ints)
    if name == "E":
        return e_lower(*ints)
    if name == "Edag":
        return e_raise(*ints)
    if name == "H":
        return h_mix(*ints)
    if name == "K1":
        return k1_op()
    if name == "K2":
        return k2_op()
    if name == "K3":
        return k3_op()
    if name == "Kminus":
        return k_minus_op()
    if name == "Kplus":
        return k_plus_op()
    if name == "I":
        return identity_op()
    if name == "L":
        return l_op(*ints)
    if name == "Mp":
        return mp_sym(*ints)
    if name == "Mpt":
        return mp_antisym(*ints)
    if name == "Mq":
        return mq_sym(*ints)
    if name == "Mqt":
        return mq_antisym(*ints)
    if name == "BGminus":
        return bg_lower(args[0])
    if name == "BGplus":
        return bg_raise(args[0])
    if name == "BG3":
        return bg_cartan(args[0])
    raise ValueError(name)


def parse_generator(text: str) -> GeneratorSpec:
    """Parse the canonical text form, e.g. ``E(1,2)`` or
    ``0.5*K1 + Product(E(1,1),Edag(1,1))``."""
    parser = _Parser(_tokenize(text))
    spec = parser.parse_expr()
    if parser.peek() is not None:
        raise ValueError(f"trailing tokens in generator text: {parser.tokens[parser.pos:]}")
    return spec

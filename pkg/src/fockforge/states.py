"""Construction of the coherent-state families on truncated bases.

Families built here:

* multimode Glauber coherent states,
* discrete-series lowering-operator eigenstates on the abstract ladder
  basis (Bessel-normalized),
* even/odd and general two-branch Schrodinger cats
  C+ |alpha> + C- |-alpha>, which are joint eigenstates of every pair
  annihilation a_i a_j with eigenvalue alpha_i alpha_j,
* the phase-parameterized overcomplete subfamily
  cos(phi) |alpha> +/- i sin(phi) |-alpha>,
* charge-sector components ||alpha; l> (non-normalized, returned with an
  explicit squared norm so callers never guess),
* squared-amplitude cats D+ |psi(alpha)> + D- |psi(i alpha)>, eigenstates
  of every (a_i a_j)^2.

Raw constructors keep the literal coefficient formulas, relative phases
included; nothing is re-phased behind the caller's back.  Every
constructor is a pure function of its parameters.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .fock import (FockBasis, StateVector, coherent_tail_bound, inner_product,
                   sector_of)
from .specfun import bessel_i, bessel_i_scaled_series, ln_gamma


class TailBoundError(ValueError):
    """The truncation cutoff is too small for the requested tolerance."""


class NormalizationError(ValueError):
    """Superposition coefficients violate their normalization condition."""


# ---------------------------------------------------------------------------
# parameter records
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BGParams:
    """Eigenvalue z and Bargmann index k (2k a positive integer)."""
    z: complex
    k: float

    def __post_init__(self):
        if self.k <= 0 or abs(2 * self.k - round(2 * self.k)) > 1e-12:
            raise ValueError(f"Bargmann index must be a positive half-integer, got {self.k}")


@dataclass(frozen=True)
class CatParams:
    alpha: tuple[complex, ...]
    c_plus: complex
    c_minus: complex


@dataclass(frozen=True)
class PhiCatParams:
    alpha: tuple[complex, ...]
    phi: float
    sign: int = +1

    def __post_init__(self):
        if self.sign not in (+1, -1):
            raise ValueError("sign must be +1 or -1")

    def as_cat(self) -> CatParams:
        return CatParams(alpha=self.alpha, c_plus=math.cos(self.phi),
                         c_minus=self.sign * 1j * math.sin(self.phi))


@dataclass(frozen=True)
class UpqParams:
    """Sector-l family parameters; either the full alpha vector of length
    p + q, or the reduced z vector of length p + q - 1 together with the
    absorbed reference amplitude alpha_n (which must be nonzero)."""

    p: int
    q: int
    l: int
    alpha: tuple[complex, ...] | None = None
    z: tuple[complex, ...] | None = None
    alpha_n: complex | None = None

    def full_alpha(self) -> tuple[complex, ...]:
        n_modes = self.p + self.q
        if self.alpha is not None:
            if self.z is not None:
                raise ValueError("give either alpha or (z, alpha_n), not both")
            if len(self.alpha) != n_modes:
                raise ValueError(f"alpha must have length {n_modes}")
            return tuple(complex(a) for a in self.alpha)
        if self.z is None or self.alpha_n is None:
            raise ValueError("reduced form needs both z and alpha_n")
        if len(self.z) != n_modes - 1:
            raise ValueError(f"z must have length {n_modes - 1}")
        a_n = complex(self.alpha_n)
        if a_n == 0:
            raise ValueError("reduced parameterization requires alpha_n != 0")
        alpha = [complex(zb) / a_n for zb in self.z[:self.p]]
        alpha += [complex(zm) * a_n for zm in self.z[self.p:]]
        alpha.append(a_n)
        return tuple(alpha)


@dataclass(frozen=True)
class SquaredCatParams:
    """Two-branch superposition over base states at alpha and i*alpha.

    The base realization is itself a two-branch cat with coefficients
    (base_c_plus, base_c_minus); the default (1, 0) uses the plain
    Glauber representative of each branch.  Since (i a_k)(i a_l) =
    -a_k a_l, the i*alpha branch carries the opposite quadratic
    eigenvalue, and any D-combination is an eigenstate of every
    (a_i a_j)^2 with eigenvalue (alpha_i alpha_j)^2.
    """

    alpha: tuple[complex, ...]
    d_plus: complex
    d_minus: complex
    base_c_plus: complex = 1.0
    base_c_minus: complex = 0.0


# ---------------------------------------------------------------------------
# Glauber and cat constructors
# ---------------------------------------------------------------------------

def required_cutoff(alpha, tol: float, *, start: int = 0, limit: int = 100_000) -> int:
    """Smallest cutoff whose Poisson tail is at or below `tol`."""
    cut = start
    while coherent_tail_bound(alpha, cut) > tol:
        cut += 1
        if cut > limit:
            raise TailBoundError("no reasonable cutoff reaches the requested tail tolerance")
    return cut


def _mode_tables(alpha, cutoff: int) -> list[list[complex]]:
    """tables[i][n] = alpha_i^n / sqrt(n!)."""
    tables = []
    for a in alpha:
        row = [1.0 + 0.0j]
        for n in range(1, cutoff + 1):
            row.append(row[-1] * a / math.sqrt(n))
        tables.append(row)
    return tables


def glauber_cs(alpha, basis: FockBasis, *, tail_tol: float = 1e-10,
               force: bool = False) -> StateVector:
    """Truncated multimode Glauber coherent state
    exp(-|alpha|^2/2) sum prod alpha_i^{n_i}/sqrt(n_i!) |n>.

    The squared norm equals 1 minus the Poisson tail, which is recorded
    as the state's lost weight.  Raises TailBoundError (naming the
    required cutoff) when the tail exceeds `tail_tol`, unless forced.
    """
    alpha = tuple(complex(a) for a in alpha)
    if len(alpha) != basis.modes:
        raise ValueError(f"alpha must have {basis.modes} entries")
    tail = coherent_tail_bound(alpha, basis.cutoff)
    if tail > tail_tol and not force:
        raise TailBoundError(
            f"coherent tail {tail:.3e} exceeds {tail_tol:.1e}; "
            f"cutoff >= {required_cutoff(alpha, tail_tol)} required")
    prefactor = math.exp(-0.5 * sum(abs(a) ** 2 for a in alpha))
    tables = _mode_tables(alpha, basis.cutoff)
    amps: dict = {}
    for n in basis.states:
        val = prefactor + 0.0j
        for i, ni in enumerate(n):
            val *= tables[i][ni]
            if val == 0.0:
                break
        if val != 0.0:
            amps[n] = val
    return StateVector(basis, amps, lost_weight=tail)


def cat_coefficients(alpha, ratio: complex) -> tuple[complex, complex]:
    """Normalized two-branch coefficients with C- = ratio * C+ and C+ > 0."""
    overlap = math.exp(-2.0 * sum(abs(a) ** 2 for a in alpha))
    denom = 1.0 + abs(ratio) ** 2 + 2.0 * (complex(ratio).real) * overlap
    if denom <= 1e-15:
        raise NormalizationError("degenerate superposition: the two branches cancel")
    c_plus = 1.0 / math.sqrt(denom)
    return c_plus, complex(ratio) * c_plus


def cat_norm_residual(params: CatParams) -> float:
    """|C+|^2 + |C-|^2 + 2 Re(C- conj(C+)) e^{-2|alpha|^2} minus 1."""
    overlap = math.exp(-2.0 * sum(abs(a) ** 2 for a in params.alpha))
    value = (abs(params.c_plus) ** 2 + abs(params.c_minus) ** 2
             + 2.0 * (params.c_minus * params.c_plus.conjugate()).real * overlap)
    return value - 1.0


def multimode_cat(params: CatParams, basis: FockBasis, *, norm_tol: float = 1e-9,
                  tail_tol: float = 1e-10, force: bool = False) -> StateVector:
    """C+ |alpha> + C- |-alpha> with the normalization condition checked,
    not silently fixed.  The minus branch costs nothing extra: its
    amplitudes are (-1)^{n_tot} times the plus branch's."""
    residual = cat_norm_residual(params)
    if abs(residual) > norm_tol:
        raise NormalizationError(
            f"cat coefficients violate the norm condition by {residual:.3e} "
            f"(tolerance {norm_tol:.1e})")
    base = glauber_cs(params.alpha, basis, tail_tol=tail_tol, force=force)
    c_p, c_m = complex(params.c_plus), complex(params.c_minus)
    amps = {}
    for n, a in base.amplitudes.items():
        w = c_p + c_m * (1.0 if sum(n) % 2 == 0 else -1.0)
        if w != 0.0:
            amps[n] = a * w
    return StateVector(basis, amps, lost_weight=base.lost_weight)


def phi_cat(params: PhiCatParams, basis: FockBasis, *, tail_tol: float = 1e-10,
            force: bool = False) -> StateVector:
    """cos(phi) |alpha> +/- i sin(phi) |-alpha>, built from the direct
    Fock expansion: each amplitude is the Glauber amplitude times the
    unimodular factor exp(+/- i (-1)^{n_tot} phi).  Unit norm (up to the
    tail) for every phi since the cross term has zero real part."""
    base = glauber_cs(params.alpha, basis, tail_tol=tail_tol, force=force)
    amps = {}
    for n, a in base.amplitudes.items():
        angle = params.sign * ((-1.0) ** (sum(n) % 2)) * params.phi
        amps[n] = a * cmath.exp(1j * angle)
    return StateVector(basis, amps, lost_weight=base.lost_weight)


# ---------------------------------------------------------------------------
# discrete-series (Bessel-normalized) eigenstates on the ladder basis
# ---------------------------------------------------------------------------

def bg_su11_cs(params: BGParams, basis: FockBasis, *, tail_tol: float = 1e-12,
               force: bool = False) -> StateVector:
    """Normalized lowering-operator eigenstate on the abstract ladder.

    Ordinal n of the one-mode basis stands for the weight-(k+n) ladder
    state; the amplitudes are z^{k-1/2} z^n / sqrt(n! Gamma(2k+n)
    I_{2k-1}(2|z|)) with the principal branch of z^{k-1/2}.  At z = 0
    the prefactor limit is resolved analytically: the state is the pure
    lowest ladder state with amplitude exactly 1.
    """
    if basis.modes != 1:
        raise ValueError("bg_su11_cs lives on a one-mode ladder basis")
    z, k = complex(params.z), params.k
    if z == 0:
        return StateVector(basis, {(0,): 1.0 + 0.0j}, lost_weight=0.0)
    r = abs(z)
    norm_i = bessel_i(2.0 * k - 1.0, 2.0 * r)
    pref = z ** (k - 0.5) / math.sqrt(norm_i)
    amps: dict = {}
    term = complex(math.exp(-0.5 * ln_gamma(2.0 * k)))   # z^n/sqrt(n! G(2k+n)) at n=0
    weight_in = 0.0
    for n in range(basis.cutoff + 1):
        amps[(n,)] = pref * term
        weight_in += abs(pref * term) ** 2
        term = term * z / math.sqrt((n + 1.0) * (2.0 * k + n))
    # geometric bound on the remaining weight
    m = basis.cutoff + 1
    head = abs(pref * term) ** 2
    ratio = (r * r) / ((m + 1.0) * (2.0 * k + m))
    tail = head / (1.0 - ratio) if ratio < 1.0 else float("inf")
    if tail > tail_tol and not force:
        raise TailBoundError(
            f"ladder tail {tail:.3e} exceeds {tail_tol:.1e}; increase the cutoff "
            f"(norm captured so far: {weight_in:.15f})")
    return StateVector(basis, amps, lost_weight=min(tail, 1.0))


def bg_overlap_closed_form(z1: complex, z2: complex, k: float) -> complex:
    """Closed-form overlap of two normalized eigenstates with the same
    Bargmann index.

    Evaluates conj(z1^{k-1/2}) z2^{k-1/2} S(conj(z1) z2) /
    sqrt(I_{2k-1}(2|z1|) I_{2k-1}(2|z2|)) where
    S(u) = sum u^n / (n! Gamma(2k+n)) is entire, so no square-root
    branch of conj(z1) z2 ever appears.  On the positive real axis this
    is the familiar ratio I_{2k-1}(2 sqrt(z1 z2)) /
    sqrt(I_{2k-1}(2 z1) I_{2k-1}(2 z2)); for complex arguments the
    principal branch of w^{k-1/2} is used, matching the state
    amplitudes factor by factor.
    """
    BGParams(z=z1, k=k)  # validates k
    z1, z2 = complex(z1), complex(z2)
    if z1 == 0 and z2 == 0:
        return 1.0 + 0.0j
    nu = 2.0 * k - 1.0
    if z1 == 0 or z2 == 0:
        z = z2 if z1 == 0 else z1
        amp0 = z ** (k - 0.5) / math.sqrt(bessel_i(nu, 2.0 * abs(z)) * math.exp(ln_gamma(2.0 * k)))
        return amp0.conjugate() if z2 == 0 else amp0
    series = bessel_i_scaled_series(nu, z1.conjugate() * z2)
    pref = (z1 ** (k - 0.5)).conjugate() * z2 ** (k - 0.5)
    denom = math.sqrt(bessel_i(nu, 2.0 * abs(z1)) * bessel_i(nu, 2.0 * abs(z2)))
    return pref * series / denom


# ---------------------------------------------------------------------------
# charge-sector components
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UpqState:
    """Non-normalized sector component with its squared norm made explicit."""
    state: StateVector
    norm_sq: float
    l: int
    feasible: bool


def upq_bg_cs(params: UpqParams, basis: FockBasis) -> UpqState:
    """Sector-l component of the coherent expansion:
    sum over occupation tuples with charge l of
    prod alpha_i^{n_i}/sqrt(n_i!) |n> (no Gaussian prefactor; the state
    is non-normalized by construction).

    The last-mode occupation is determined by the charge constraint, so
    the support lies exactly in sector l.  If no basis state carries the
    requested charge under the cutoff the result is flagged infeasible
    rather than silently empty.
    """
    alpha = params.full_alpha()
    n_modes = params.p + params.q
    if basis.modes != n_modes:
        raise ValueError(f"basis has {basis.modes} modes, params imply {n_modes}")
    tables = _mode_tables(alpha, basis.cutoff)
    amps: dict = {}
    for n in basis.states:
        if sector_of(n, params.p, params.q).l != params.l:
            continue
        val = 1.0 + 0.0j
        for i, ni in enumerate(n):
            val *= tables[i][ni]
            if val == 0.0:
                break
        if val != 0.0:
            amps[n] = val
    feasible = any(sector_of(n, params.p, params.q).l == params.l for n in basis.states)
    state = StateVector(basis, amps)
    return UpqState(state=state, norm_sq=state.norm_sq(), l=params.l, feasible=feasible)


# ---------------------------------------------------------------------------
# squared-amplitude cats
# ---------------------------------------------------------------------------

def squared_cat_coefficients(alpha, ratio: complex, basis: FockBasis,
                             base_c: tuple[complex, complex] = (1.0, 0.0),
                             **kwargs) -> tuple[complex, complex]:
    """Normalized (D+, D-) with D- = ratio * D+, using the numerically
    computed overlap of the two branch states."""
    plus = multimode_cat(CatParams(tuple(alpha), base_c[0], base_c[1]), basis, **kwargs)
    minus_alpha = tuple(1j * complex(a) for a in alpha)
    minus = multimode_cat(CatParams(minus_alpha, base_c[0], base_c[1]), basis, **kwargs)
    overlap = inner_product(plus, minus)
    denom = 1.0 + abs(ratio) ** 2 + 2.0 * (complex(ratio) * overlap).real
    if denom <= 1e-15:
        raise NormalizationError("degenerate squared-amplitude superposition")
    d_plus = 1.0 / math.sqrt(denom)
    return d_plus, complex(ratio) * d_plus


def state_from_family_record(record: dict, basis: FockBasis, **kwargs) -> StateVector:
    """Build a family state from the JSON parameter record used by the CLI.

    Complex entries are [re, im] pairs (bare numbers are taken as real)
    and signs are "+" or "-"; examples:

        {"family": "glauber",      "alpha": [[0.9, 0.0]]}
        {"family": "phi_cat",      "alpha": [[0.8, 0.0], [0.0, -0.5]],
         "phi": 0.3, "sign": "+"}
        {"family": "multimode_cat", "alpha": [...], "c_plus": [re, im],
         "c_minus": [re, im]}
        {"family": "bg_su11",      "z": [re, im], "k": 1.5}
        {"family": "upq",          "p": 1, "q": 1, "l": 0, "alpha": [...]}
        {"family": "squared_amp_cat", "alpha": [...], "d_plus": [re, im],
         "d_minus": [re, im]}

    The charge-sector family returns the non-normalized component state;
    its squared norm is available via upq_bg_cs directly.
    """
    def as_complex(v) -> complex:
        if isinstance(v, (int, float)):
            return complex(v)
        return complex(v[0], v[1])

    def as_alpha() -> tuple[complex, ...]:
        return tuple(as_complex(v) for v in record["alpha"])

    kind = record["family"]
    if kind == "glauber":
        return glauber_cs(as_alpha(), basis, **kwargs)
    if kind == "phi_cat":
        sign = record.get("sign", "+")
        sign = +1 if sign in ("+", 1) else -1
        return phi_cat(PhiCatParams(as_alpha(), float(record["phi"]), sign),
                       basis, **kwargs)
    if kind == "multimode_cat":
        return multimode_cat(CatParams(as_alpha(), as_complex(record["c_plus"]),
                                       as_complex(record["c_minus"])), basis, **kwargs)
    if kind == "bg_su11":
        return bg_su11_cs(BGParams(as_complex(record["z"]), float(record["k"])),
                          basis, **kwargs)
    if kind == "upq":
        return upq_bg_cs(UpqParams(p=int(record["p"]), q=int(record["q"]),
                                   l=int(record["l"]), alpha=as_alpha()), basis).state
    if kind == "squared_amp_cat":
        return squared_amp_cat(
            SquaredCatParams(as_alpha(), as_complex(record["d_plus"]),
                             as_complex(record["d_minus"]),
                             base_c_plus=as_complex(record.get("base_c_plus", 1.0)),
                             base_c_minus=as_complex(record.get("base_c_minus", 0.0))),
            basis, **kwargs)
    raise ValueError(f"unknown family {kind!r}")


def squared_amp_cat(params: SquaredCatParams, basis: FockBasis, *,
                    norm_tol: float = 1e-9, tail_tol: float = 1e-10,
                    force: bool = False) -> StateVector:
    """D+ |psi(alpha)> + D- |psi(i alpha)>; see SquaredCatParams.

    The D normalization condition is checked against the numerically
    computed branch overlap and must hold to `norm_tol`.
    """
    alpha = tuple(complex(a) for a in params.alpha)
    base = CatParams(alpha, params.base_c_plus, params.base_c_minus)
    plus = multimode_cat(base, basis, tail_tol=tail_tol, force=force)
    minus = multimode_cat(
        CatParams(tuple(1j * a for a in alpha), params.base_c_plus, params.base_c_minus),
        basis, tail_tol=tail_tol, force=force)
    overlap = inner_product(plus, minus)
    d_p, d_m = complex(params.d_plus), complex(params.d_minus)
    residual = abs(abs(d_p) ** 2 + abs(d_m) ** 2 + 2.0 * (d_m * d_p.conjugate() * overlap).real - 1.0)
    if residual > norm_tol:
        raise NormalizationError(
            f"squared-cat coefficients violate the norm condition by {residual:.3e}")
    return plus.scaled(d_p).add(minus.scaled(d_m))

"""Invariant ledgers for simply connected 4-manifolds.

A ledger records (e, sign, b+, b-, chi_h, c1^2) together with optional
lattice-level data: the intersection lattice, the canonical class K, and
distinguished embedded surfaces.  The five identities

    e = 2 + b+ + b-        sign = b+ - b-
    chi_h = (e + sign)/4   c1^2 = 2e + 3 sign
    K.K = c1^2             (when K is present)

are enforced at construction time, so a ledger that exists is consistent.
Ledgers are immutable; surgery operations return new ledgers and append to
the provenance trail.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

from .errors import ConsistencyError, DomainError
from .exact_lattice import (
    HomClass,
    IntLattice,
    express_in_basis,
    orthogonal_complement,
    pair,
    span_lattice,
    square,
)

__all__ = [
    "EmbeddedSurface",
    "ManifoldLedger",
    "NoetherPosition",
    "make_ledger",
    "adjunction_genus",
    "blow_up",
    "blow_down",
    "push_forward",
    "noether_position",
    "noether_flags",
]


@dataclass(frozen=True)
class EmbeddedSurface:
    """A tracked embedded surface: label, genus, self-intersection, flags.

    ``cls`` is optional; when present its square must equal ``self_int``.
    ``complement_simply_connected`` records whether the complement of the
    surface in its ambient manifold is known to be simply connected.
    """

    label: str
    genus: int
    self_int: int
    symplectic: bool
    cls: HomClass | None = None
    complement_simply_connected: bool | None = None

    def __post_init__(self):
        if self.genus < 0:
            raise DomainError(f"surface {self.label!r} has negative genus")
        if self.cls is not None and square(self.cls) != self.self_int:
            raise ConsistencyError(
                f"surface {self.label!r}: declared self-intersection {self.self_int} "
                f"but class squares to {square(self.cls)}"
            )

    @property
    def kind(self) -> str:
        return "sphere" if self.genus == 0 else "higher_genus"


@dataclass(frozen=True)
class ManifoldLedger:
    """Numerical invariants (plus optional lattice data) of a closed simply
    connected 4-manifold."""

    name: str
    e: int
    sign: int
    b_plus: int
    b_minus: int
    chi_h: int
    c1sq: int
    simply_connected: bool | None
    symplectic: bool
    lattice: IntLattice | None = None
    K: HomClass | None = None
    surfaces: tuple[EmbeddedSurface, ...] = ()
    provenance: tuple[str, ...] = ()

    def __post_init__(self):
        if self.e != 2 + self.b_plus + self.b_minus:
            raise ConsistencyError(f"{self.name}: e != 2 + b+ + b-")
        if self.sign != self.b_plus - self.b_minus:
            raise ConsistencyError(f"{self.name}: sign != b+ - b-")
        if 4 * self.chi_h != self.e + self.sign:
            raise ConsistencyError(f"{self.name}: chi_h != (e + sign)/4")
        if self.c1sq != 2 * self.e + 3 * self.sign:
            raise ConsistencyError(f"{self.name}: c1^2 != 2e + 3 sign")
        if self.lattice is not None and self.lattice.rank != self.b_plus + self.b_minus:
            raise ConsistencyError(
                f"{self.name}: lattice rank {self.lattice.rank} != b2 = {self.b_plus + self.b_minus}"
            )
        if self.K is not None:
            if self.lattice is None or (
                self.K.lattice is not self.lattice and self.K.lattice != self.lattice
            ):
                raise ConsistencyError(f"{self.name}: canonical class not in the ledger lattice")
            if square(self.K) != self.c1sq:
                raise ConsistencyError(
                    f"{self.name}: K.K = {square(self.K)} but c1^2 = {self.c1sq}"
                )
        for s in self.surfaces:
            if (
                s.cls is not None
                and self.K is not None
                and s.symplectic
                and (s.cls.lattice is self.lattice or s.cls.lattice == self.lattice)
            ):
                adj = square(s.cls) + pair(self.K, s.cls)
                if adj != 2 * s.genus - 2:
                    raise ConsistencyError(
                        f"{self.name}: surface {s.label!r} violates adjunction "
                        f"(genus {s.genus}, K.S + S.S = {adj})"
                    )

    def surface(self, label: str) -> EmbeddedSurface:
        for s in self.surfaces:
            if s.label == label:
                return s
        raise DomainError(f"{self.name} has no tracked surface {label!r}")

    def with_surfaces(self, extra: Sequence[EmbeddedSurface]) -> "ManifoldLedger":
        return replace(self, surfaces=self.surfaces + tuple(extra))

    def renamed(self, name: str) -> "ManifoldLedger":
        return replace(self, name=name)

    def noted(self, note: str) -> "ManifoldLedger":
        return replace(self, provenance=self.provenance + (note,))


def make_ledger(
    name: str,
    e: int,
    sign: int,
    *,
    simply_connected: bool | None = True,
    symplectic: bool = True,
    lattice: IntLattice | None = None,
    K: HomClass | None = None,
    surfaces: Sequence[EmbeddedSurface] = (),
    provenance: Sequence[str] = (),
) -> ManifoldLedger:
    """Build a ledger from (e, sign), deriving b+, b-, chi_h, c1^2."""
    if (e + sign) % 4:
        raise DomainError(f"{name}: e + sign = {e + sign} is not divisible by 4")
    b_plus = (e + sign) // 2 - 1
    b_minus = e - 2 - b_plus
    if b_plus < 0 or b_minus < 0:
        raise DomainError(f"{name}: negative Betti numbers (b+={b_plus}, b-={b_minus})")
    return ManifoldLedger(
        name=name,
        e=e,
        sign=sign,
        b_plus=b_plus,
        b_minus=b_minus,
        chi_h=(e + sign) // 4,
        c1sq=2 * e + 3 * sign,
        simply_connected=simply_connected,
        symplectic=symplectic,
        lattice=lattice,
        K=K,
        surfaces=tuple(surfaces),
        provenance=tuple(provenance),
    )


def adjunction_genus(cls: HomClass, K: HomClass) -> int:
    """Genus g with 2g - 2 = S.S + K.S for a smooth symplectic surface S."""
    s = square(cls) + pair(K, cls)
    if s % 2:
        raise DomainError(f"adjunction parity failure: S.S + K.S = {s} is odd")
    g = 1 + s // 2
    if g < 0:
        raise DomainError(f"adjunction gives negative genus {g}")
    return g


def _fresh_exceptional_label(lattice: IntLattice) -> str:
    k = 1
    taken = set(lattice.labels)
    while f"E{k}" in taken:
        k += 1
    return f"E{k}"


def _reembed(cls: HomClass, lattice: IntLattice) -> HomClass:
    return HomClass(lattice, cls.coeffs + (0,) * (lattice.rank - len(cls.coeffs)))


def blow_up(M: ManifoldLedger, label: str | None = None) -> ManifoldLedger:
    """Connected sum with CP2-bar: e+1, sign-1, c1^2-1, chi_h fixed.

    In lattice mode the lattice gains a fresh <-1> generator E_new (label
    "E{k}" by default), K becomes K + E_new, and tracked classes re-embed
    unchanged.  Without a lattice only the numbers are updated.
    """
    if (M.lattice is None) != (M.K is None):
        raise DomainError(f"{M.name}: blow_up needs both lattice and K, or neither")
    lattice = M.lattice
    K = M.K
    surfaces = M.surfaces
    note = "blow_up"
    if lattice is not None:
        lbl = label if label is not None else _fresh_exceptional_label(lattice)
        lattice = lattice.extended(lbl, -1)
        K = _reembed(M.K, lattice) + lattice.basis_class(lbl)
        surfaces = tuple(
            replace(s, cls=_reembed(s.cls, lattice))
            if s.cls is not None and (s.cls.lattice is M.lattice or s.cls.lattice == M.lattice)
            else s
            for s in M.surfaces
        )
        note = f"blow_up[{lbl}]"
    elif label is not None:
        raise DomainError("cannot name the exceptional generator without a lattice")
    return make_ledger(
        M.name,
        M.e + 1,
        M.sign - 1,
        simply_connected=M.simply_connected,
        symplectic=M.symplectic,
        lattice=lattice,
        K=K,
        surfaces=surfaces,
        provenance=M.provenance + (note,),
    )


def push_forward(cls: HomClass, exceptionals: Sequence[HomClass]) -> HomClass:
    """Image of a class under blowing down the given exceptional classes.

    Each step sends S to S + (S.exc) exc; the result pairs to zero with
    every blown-down class and its square grows by sum (S.exc)^2 when the
    exceptionals are pairwise orthogonal.
    """
    out = cls
    for exc in exceptionals:
        out = out + pair(out, exc) * exc
    return out


def _auto_quotient_basis(
    lattice: IntLattice, complement: Sequence[HomClass]
) -> list[tuple[str, HomClass]]:
    named = []
    counter = 0
    for v in complement:
        unit = None
        nz = [(i, c) for i, c in enumerate(v.coeffs) if c]
        if len(nz) == 1 and abs(nz[0][1]) == 1:
            i, c = nz[0]
            unit = lattice.labels[i]
            if c < 0:
                v = -v
        if unit is None:
            unit = f"c{counter}"
            counter += 1
        named.append((unit, v))
    return named


def blow_down(
    M: ManifoldLedger,
    exc: HomClass,
    *,
    basis: Sequence[tuple[str, HomClass]] | None = None,
) -> ManifoldLedger:
    """Blow down an exceptional class: exc.exc = -1 and K.exc = -1.

    The new lattice is the orthogonal complement of exc (a unimodular
    summand, since exc.exc = -1).  Tracked classes push forward as
    S + (S.exc) exc and are re-expressed in the complement basis, which may
    be supplied as (label, class) pairs; by default complement generators
    that are +/- an ambient basis vector keep their ambient label.
    """
    if M.lattice is None or M.K is None:
        raise DomainError(f"{M.name}: blow_down needs a lattice and canonical class")
    if square(exc) != -1:
        raise DomainError(f"blow_down: class squares to {square(exc)}, not -1")
    if pair(M.K, exc) != -1:
        raise DomainError(f"blow_down: K pairs to {pair(M.K, exc)}, not -1")
    complement = orthogonal_complement(M.lattice, [exc])
    if basis is None:
        named = _auto_quotient_basis(M.lattice, complement)
    else:
        named = list(basis)
        if len(named) != len(complement):
            raise DomainError(
                f"blow_down basis has {len(named)} classes; complement rank is {len(complement)}"
            )
        for lbl, v in named:
            if pair(v, exc) != 0:
                raise DomainError(f"blow_down basis class {lbl!r} meets the exceptional class")
        # the supplied classes must span the same integer sublattice
        for v in complement:
            if not express_in_basis(v, [c for _, c in named]).is_integral():
                raise DomainError("blow_down basis does not span the full complement lattice")
    labels = [lbl for lbl, _ in named]
    classes = [v for _, v in named]
    new_lat = span_lattice(classes, labels)
    for v in classes:
        if not express_in_basis(v, complement).is_integral():
            raise ConsistencyError("blow_down basis escapes the complement lattice")

    def push(cls: HomClass) -> HomClass:
        moved = cls + pair(cls, exc) * exc
        return express_in_basis(moved, classes, span=new_lat).to_hom()

    K2 = push(M.K)
    new_surfaces = []
    for s in M.surfaces:
        if s.cls is None or not (s.cls.lattice is M.lattice or s.cls.lattice == M.lattice):
            new_surfaces.append(s)
            continue
        cls2 = push(s.cls)
        genus2 = s.genus
        if s.symplectic:
            genus2 = adjunction_genus(cls2, K2)
        new_surfaces.append(replace(s, cls=cls2, genus=genus2, self_int=square(cls2)))
    return make_ledger(
        M.name,
        M.e - 1,
        M.sign + 1,
        simply_connected=M.simply_connected,
        symplectic=M.symplectic,
        lattice=new_lat,
        K=K2,
        surfaces=new_surfaces,
        provenance=M.provenance + (f"blow_down[{exc}]",),
    )


@dataclass(frozen=True)
class NoetherPosition:
    on_half_noether: bool
    on_noether: bool
    in_region_T: bool
    in_region_TT: bool


def noether_flags(x: int, c: int) -> NoetherPosition:
    """Position of (chi_h, c1^2) = (x, c) relative to the Noether lines."""
    positive = x - 3 > 0
    return NoetherPosition(
        on_half_noether=c == x - 3,
        on_noether=c == 2 * x - 6,
        in_region_T=positive and x - 3 <= c <= 2 * x - 6,
        in_region_TT=positive and x - 3 <= c and 2 * c <= 5 * x - 4,
    )


def noether_position(M: ManifoldLedger) -> NoetherPosition:
    return noether_flags(M.chi_h, M.c1sq)

"""Constructors for the rational surfaces built from line arrangements.

Line arrangements are modelled homologically only: a blown-up point of
multiplicity m contributes -m E to the proper transform of a curve through
it, and each blowup point chosen on an embedded surface contributes -1 to
the surface class.  That shadow reproduces every self-intersection and
genus used downstream.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache

from .errors import ConsistencyError, DomainError
from .exact_lattice import HomClass, IntLattice, format_class, solve_class
from .manifold_ledger import (
    EmbeddedSurface,
    ManifoldLedger,
    adjunction_genus,
    blow_up,
    make_ledger,
)
from .sw_bookkeeping import SWLatticeFragment

__all__ = [
    "ArrangementSpec",
    "cp2",
    "build_R",
    "build_S",
    "build_Sprime",
    "smooth_double_points",
    "horizontal_fiber_class",
    "build_E",
]


@dataclass(frozen=True)
class ArrangementSpec:
    """A pencil of lines through one point plus lines in general position.

    ``extra_blowups`` lists blowups beyond the multiple point as
    (point kind, multiplicity) pairs, e.g. ("double_point", 2).
    """

    pencil_size: int
    general_lines: int
    extra_blowups: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        if self.pencil_size < 1:
            raise DomainError("pencil_size must be >= 1")
        if self.general_lines not in (2, 3):
            raise DomainError("general_lines must be 2 or 3")

    def line_classes(self, lattice: IntLattice) -> list[HomClass]:
        """Proper transforms after blowing up the common point: the pencil
        lines become H - E, the general-position lines stay H."""
        pencil = [lattice.combo({"H": 1, "E": -1})] * self.pencil_size
        general = [lattice.combo({"H": 1})] * self.general_lines
        return pencil + general


def cp2() -> ManifoldLedger:
    """The projective plane with its <1> lattice and K = -3H."""
    lat = IntLattice.diagonal((1,), ("H",))
    return make_ledger(
        "CP2",
        3,
        1,
        lattice=lat,
        K=lat.combo({"H": -3}),
        provenance=("CP2",),
    )


def smooth_double_points(classes, K) -> tuple[HomClass, int]:
    """Homological smoothing of a nodal configuration: sum the classes and
    read the genus off the adjunction formula."""
    if not classes:
        raise DomainError("nothing to smooth")
    total = classes[0]
    for c in classes[1:]:
        total = total + c
    return total, adjunction_genus(total, K)


def _blow_up_along_curve(M: ManifoldLedger, cls: HomClass, count: int):
    """Blow up ``count`` points on the curve; its class picks up -1 each."""
    for _ in range(count):
        M = blow_up(M)
        new = M.lattice.labels[-1]
        cls = HomClass(M.lattice, cls.coeffs + (0,)) - M.lattice.basis_class(new)
    return M, cls


@lru_cache(maxsize=None)
def _build_R(q: int):
    M = blow_up(cp2(), label="E")
    arrangement = ArrangementSpec(q - 2, 2)
    cls, genus = smooth_double_points(arrangement.line_classes(M.lattice), M.K)
    M, cls = _blow_up_along_curve(M, cls, 4 * q - 4)
    sigma = EmbeddedSurface(
        f"Sigma_R({q})",
        genus=genus,
        self_int=0,
        symplectic=True,
        cls=cls,
        complement_simply_connected=True,
    )
    a1 = EmbeddedSurface(
        "A1", genus=0, self_int=0, symplectic=True,
        cls=M.lattice.combo({"H": 1, "E": -1}),
    )
    M = replace(
        M,
        name=f"R({q})",
        surfaces=(sigma, a1),
        provenance=M.provenance + (f"R({q}) from {q}-line arrangement",),
    )
    return M, sigma


def build_R(q: int) -> tuple[ManifoldLedger, EmbeddedSurface]:
    """The rational surface R(q) = CP2 # (4q-3) CP2-bar with its genus q-2
    square-zero surface Sigma_R(q) = qH - (q-2)E - E_1 - ... - E_{4q-4}.

    q = 3 (the rational elliptic surface) is allowed because the fiber-sum
    description of E(2) needs it; the line-arrangement picture degenerates
    there but the homological data does not.
    """
    if q < 3:
        raise DomainError(f"build_R requires q >= 3, got {q}")
    return _build_R(q)


@lru_cache(maxsize=None)
def _build_S(p: int):
    M = blow_up(cp2(), label="E")
    arrangement = ArrangementSpec(p - 3, 3)
    cls, genus = smooth_double_points(arrangement.line_classes(M.lattice), M.K)
    M, cls = _blow_up_along_curve(M, cls, 6 * p - 9)
    sigma = EmbeddedSurface(
        f"Sigma_S({p})",
        genus=genus,
        self_int=0,
        symplectic=True,
        cls=cls,
        complement_simply_connected=True,
    )
    extras = []
    for k in range(1, 3 * p - 4):
        extras.append(
            EmbeddedSurface(
                f"B{k}",
                genus=0,
                self_int=-2,
                symplectic=True,
                cls=M.lattice.combo(
                    {"H": 1, "E": -1, f"E{2 * k - 1}": -1, f"E{2 * k}": -1}
                ),
            )
        )
    extras.append(
        EmbeddedSurface(
            "C1", genus=0, self_int=0, symplectic=True,
            cls=M.lattice.combo({"H": 1, "E": -1}),
        )
    )
    M = replace(
        M,
        name=f"S({p})",
        surfaces=(sigma, *extras),
        provenance=M.provenance + (f"S({p}) from {p}-line arrangement",),
    )
    return M, sigma


def build_S(p: int) -> tuple[ManifoldLedger, EmbeddedSurface]:
    """The rational surface S(p) = CP2 # (6p-8) CP2-bar with the genus 2p-5
    surface Sigma_S(p) = pH - (p-3)E - E_1 - ... - E_{6p-9}.

    Also registers the (-2)-sphere family B_k = H - E - E_{2k-1} - E_{2k}
    (k = 1..3p-5, each meeting Sigma once) and a square-zero sphere
    C1 = H - E meeting Sigma three times.
    """
    if p < 4:
        raise DomainError(f"build_S requires p >= 4, got {p}")
    return _build_S(p)


@lru_cache(maxsize=None)
def _build_Sprime(p: int):
    M = blow_up(cp2(), label="E")
    arrangement = ArrangementSpec(p - 3, 3, (("double_point", 2),))
    cls, _ = smooth_double_points(arrangement.line_classes(M.lattice), M.K)
    # blow up one double point of the arrangement with multiplicity 2
    M = blow_up(M, label="E1")
    cls = HomClass(M.lattice, cls.coeffs + (0,)) - 2 * M.lattice.basis_class("E1")
    genus = adjunction_genus(cls, M.K)
    M, cls = _blow_up_along_curve(M, cls, 6 * p - 13)
    sigma = EmbeddedSurface(
        f"Sigma_S'({p})",
        genus=genus,
        self_int=0,
        symplectic=True,
        cls=cls,
        complement_simply_connected=True,
    )
    extras = []
    for k in range(1, 3 * p - 6):
        extras.append(
            EmbeddedSurface(
                f"B{k}",
                genus=0,
                self_int=-2,
                symplectic=True,
                cls=M.lattice.combo(
                    {"H": 1, "E": -1, f"E{2 * k}": -1, f"E{2 * k + 1}": -1}
                ),
            )
        )
    extras.append(
        EmbeddedSurface(
            "C1", genus=0, self_int=0, symplectic=True,
            cls=M.lattice.combo({"H": 1, "E": -1}),
        )
    )
    M = replace(
        M,
        name=f"S'({p})",
        surfaces=(sigma, *extras),
        provenance=M.provenance + (f"S'({p}) from {p}-line arrangement",),
    )
    return M, sigma


def build_Sprime(p: int) -> tuple[ManifoldLedger, EmbeddedSurface]:
    """The rational surface S'(p) = CP2 # (6p-11) CP2-bar with the genus
    2p-6 surface pH - (p-3)E - 2E_1 - E_2 - ... - E_{6p-12}."""
    if p < 5:
        raise DomainError(f"build_Sprime requires p >= 5, got {p}")
    return _build_Sprime(p)


def horizontal_fiber_class(q: int) -> HomClass:
    """Class of the horizontal genus q-1 fiber of R(q+1), found by solving
    the constraint system of the vertical fibration.

    Constraints: pairing 2 with the vertical fiber H - E, pairing 0 with the
    (-2)-spheres E_{2i} - E_{2i-1} and H - E - E_{2i-1} - E_{2i} of the 2q
    singular vertical fibers, and square 0.  The solver must return exactly
    one class, which must agree with Sigma_R(q+1).
    """
    if q < 3:
        raise DomainError(f"horizontal_fiber_class requires q >= 3, got {q}")
    R, sigma = build_R(q + 1)
    lat = R.lattice
    vertical = lat.combo({"H": 1, "E": -1})
    constraints = [(vertical, 2)]
    for i in range(1, 2 * q + 1):
        constraints.append(
            (lat.combo({f"E{2 * i}": 1, f"E{2 * i - 1}": -1}), 0)
        )
        constraints.append(
            (
                lat.combo({"H": 1, "E": -1, f"E{2 * i - 1}": -1, f"E{2 * i}": -1}),
                0,
            )
        )
    sols = solve_class(lat, constraints, 0, coeff_bound=q + 2)
    if len(sols) != 1:
        raise ConsistencyError(
            f"horizontal fiber solver found {len(sols)} classes in the box, expected 1: "
            f"{[format_class(s) for s in sols]}"
        )
    lam = sols[0]
    if lam != sigma.cls:
        raise ConsistencyError(
            f"horizontal fiber {format_class(lam)} differs from Sigma_R({q + 1})"
        )
    return lam


@lru_cache(maxsize=None)
def build_E(x: int) -> ManifoldLedger:
    """The elliptic surface E(x) without multiple fibers: chi_h = x, c1^2 = 0.

    Built two ways - directly from (e, sign) = (12x, -8x), and as the fiber
    sum of two copies of R(x+1) along Sigma_R(x+1) - and the ledgers must
    agree.  The fiber f and a section S of square -x are registered on the
    SW lattice fragment.
    """
    from .surgery_calculus import fiber_sum

    if x < 2:
        raise DomainError(f"build_E requires x >= 2, got {x}")
    direct = make_ledger(
        f"E({x})",
        12 * x,
        -8 * x,
        provenance=(f"E({x}) direct",),
    )
    R, sigma = build_R(x + 1)
    summed = fiber_sum(R, sigma, R, sigma, complements_simply_connected=True)
    fields = ("e", "sign", "b_plus", "b_minus", "chi_h", "c1sq")
    diffs = [f for f in fields if getattr(direct, f) != getattr(summed, f)]
    if diffs or summed.simply_connected is not True or not summed.symplectic:
        raise ConsistencyError(
            f"E({x}) routes disagree on {diffs or 'flags'}: "
            f"direct=({direct.e},{direct.sign}) fiber-sum=({summed.e},{summed.sign})"
        )
    frag = SWLatticeFragment.build(x, 0)
    surfaces = (
        EmbeddedSurface("T", genus=1, self_int=0, symplectic=True, cls=frag.fiber),
        EmbeddedSurface(
            "S", genus=0, self_int=-x, symplectic=True, cls=frag.section
        ),
    )
    return make_ledger(
        f"E({x})",
        12 * x,
        -8 * x,
        surfaces=surfaces,
        provenance=(
            f"E({x}) direct",
            f"E({x}) = R({x + 1})#R({x + 1}) fiber sum (ledgers agree)",
        ),
    )

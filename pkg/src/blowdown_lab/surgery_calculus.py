"""Surgery calculus: C_n configurations, fiber sums, rational blowdowns,
and the lattice-level verifiers for the two blowdown propositions.

The verifiers re-run the blowdown chains entirely inside the ambient
blowup lattice: blowing down a set of pairwise disjoint exceptional
classes is modelled by the pushforward S -> S + (S.exc) exc, and the
intermediate manifold's homology is the orthogonal complement of the
blown-down classes.  Pairings of surviving classes agree with their
pairings downstairs, so no explicit quotient lattice is needed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ConsistencyError, DomainError
from .exact_lattice import (
    HomClass,
    IntLattice,
    RationalClass,
    express_in_basis,
    format_class,
    gram_of,
    orthogonal_complement,
    pair,
    span_lattice,
    square,
)
from .manifold_ledger import (
    EmbeddedSurface,
    ManifoldLedger,
    adjunction_genus,
    make_ledger,
    push_forward,
)

__all__ = [
    "ConfigCn",
    "RecipeStep",
    "SurgeryRecipe",
    "CheckResult",
    "VerifierReport",
    "verify_config",
    "find_configs",
    "fiber_sum",
    "rational_blowdown",
    "verify_prop_P",
    "verify_prop_Pprime",
    "assemble_minus4_sphere",
]


def verify_config(classes) -> int:
    """Check the C_n plumbing invariants and return n (= #spheres + 1).

    Requires square(S_0) = -(n+2), square(S_j) = -2 for j >= 1,
    consecutive pairings +1 and all other pairings 0.
    """
    if not classes:
        raise DomainError("a C_n configuration needs at least one sphere")
    lat = classes[0].lattice
    for c in classes[1:]:
        if c.lattice is not lat and c.lattice != lat:
            raise DomainError("configuration spheres live in different lattices")
    n = len(classes) + 1
    # precompute gram @ sphere once per sphere; each pairing is then a dot
    # product over the other sphere's support
    rows = lat._sparse_rows
    supports = [tuple((i, c) for i, c in enumerate(cls.coeffs) if c) for cls in classes]
    dense = []
    for sup in supports:
        w = [0] * lat.rank
        for i, c in sup:
            for j, g in rows[i]:
                w[j] += g * c
        dense.append(w)

    def pairing(i: int, j: int) -> int:
        wj = dense[j]
        return sum(c * wj[t] for t, c in supports[i])

    sq0 = pairing(0, 0)
    if sq0 != -(n + 2):
        raise DomainError(
            f"lead sphere squares to {sq0}, expected -(n+2) = {-(n + 2)}"
        )
    for j in range(1, n - 1):
        sqj = pairing(j, j)
        if sqj != -2:
            raise DomainError(f"sphere {j} squares to {sqj}, expected -2")
    for i in range(n - 1):
        for j in range(i + 1, n - 1):
            v = pairing(i, j)
            want = 1 if j == i + 1 else 0
            if v != want:
                raise DomainError(
                    f"spheres ({i},{j}) pair to {v}, expected {want}"
                )
    return n


@dataclass(frozen=True)
class ConfigCn:
    """An embedded C_n configuration: ordered sphere classes S_0..S_{n-2}.

    ``symplectic`` is a caller-supplied certificate that every sphere is a
    symplectic submanifold (all the configurations built in this package
    are).
    """

    n: int
    spheres: tuple[HomClass, ...]
    symplectic: bool = True

    def __post_init__(self):
        n = verify_config(self.spheres)
        if n != self.n:
            raise DomainError(f"configuration has n = {n}, declared {self.n}")

    @classmethod
    def from_spheres(cls, spheres, symplectic: bool = True) -> "ConfigCn":
        return cls(len(spheres) + 1, tuple(spheres), symplectic)

    @property
    def lattice(self) -> IntLattice:
        return self.spheres[0].lattice


def find_configs(pool, n: int) -> list[ConfigCn]:
    """All C_n chains whose spheres come from ``pool`` (ordered, deduplicated).

    Chains are emitted in lexicographic order of pool indices; a chain equal
    to the reversal of an earlier one is suppressed.
    """
    if n < 2:
        raise DomainError("C_n needs n >= 2")
    pool = list(pool)
    if not pool:
        return []
    lat = pool[0].lattice
    for c in pool[1:]:
        if c.lattice is not lat and c.lattice != lat:
            raise DomainError("pool classes live in different lattices")
    length = n - 1
    squares = [square(c) for c in pool]
    out: list[ConfigCn] = []
    seen: set[tuple[int, ...]] = set()

    def extend(chain: list[int]) -> None:
        if len(chain) == length:
            key = tuple(chain)
            if key[::-1] not in seen:
                seen.add(key)
                out.append(ConfigCn.from_spheres([pool[i] for i in chain]))
            return
        for i in range(len(pool)):
            if i in chain:
                continue
            want_sq = -(n + 2) if not chain else -2
            if squares[i] != want_sq:
                continue
            ok = True
            for depth, j in enumerate(chain):
                want = 1 if depth == len(chain) - 1 else 0
                if pair(pool[j], pool[i]) != want:
                    ok = False
                    break
            if ok:
                extend(chain + [i])

    extend([])
    return out


def fiber_sum(
    A: ManifoldLedger,
    surface_A: EmbeddedSurface,
    B: ManifoldLedger,
    surface_B: EmbeddedSurface,
    complements_simply_connected: bool | None,
    *,
    register=(),
) -> ManifoldLedger:
    """Fiber sum along genus-g square-zero surfaces (invariant level).

    e adds with a 4g-4 correction and signatures add, which reproduces
    c1^2(A) + c1^2(B) + (8g-8) and chi_h(A) + chi_h(B) + (g-1).  No glued
    lattice is constructed; ``register`` may re-declare formal surfaces that
    survive in the complements.
    """
    if surface_A.genus != surface_B.genus:
        raise DomainError(
            f"fiber sum genus mismatch: {surface_A.genus} vs {surface_B.genus}"
        )
    if surface_A.self_int != 0 or surface_B.self_int != 0:
        raise DomainError("fiber sum surfaces must have trivial normal bundle")
    g = surface_A.genus
    return make_ledger(
        f"{A.name}#{B.name}",
        A.e + B.e + 4 * g - 4,
        A.sign + B.sign,
        simply_connected=complements_simply_connected,
        symplectic=A.symplectic
        and B.symplectic
        and surface_A.symplectic
        and surface_B.symplectic,
        surfaces=tuple(register),
        provenance=A.provenance
        + B.provenance
        + (f"fiber_sum[{A.name},{B.name},genus={g}]",),
    )


def _config_in_ledger(M: ManifoldLedger, config: ConfigCn) -> bool:
    """True if the config lives in M's own lattice, False if it is formal
    (every sphere registered as a tracked surface).  Raises otherwise."""
    lat = config.lattice
    if M.lattice is not None and (lat is M.lattice or lat == M.lattice):
        return True
    tracked = {
        s.cls.coeffs
        for s in M.surfaces
        if s.cls is not None and (s.cls.lattice is lat or s.cls.lattice == lat)
    }
    missing = [c for c in config.spheres if c.coeffs not in tracked]
    if missing:
        raise DomainError(
            f"configuration sphere {format_class(missing[0])} is neither in the "
            f"ledger lattice nor a registered formal surface of {M.name}"
        )
    return False


def rational_blowdown(
    M: ManifoldLedger,
    config: ConfigCn,
    *,
    dual_sphere: HomClass | None = None,
    asserted_simply_connected: str | None = None,
) -> ManifoldLedger:
    """Replace an embedded C_n by a rational ball: c1^2 += n-1, chi_h fixed.

    Simple connectivity survives only with a certificate: either
    ``dual_sphere``, a tracked class pairing +-1 with some configuration
    sphere (checked here), or ``asserted_simply_connected``, a free-form
    reason recorded in the provenance.  With neither, the flag becomes
    unknown (None).
    """
    n = config.n
    in_lattice = _config_in_ledger(M, config)
    sc: bool | None
    sc_note = ""
    if dual_sphere is not None:
        hits = [s for s in config.spheres if abs(pair(dual_sphere, s)) == 1]
        if not hits:
            raise DomainError(
                "dual sphere certificate pairs +-1 with no configuration sphere"
            )
        sc = M.simply_connected
        sc_note = f"pi1: dual sphere {format_class(dual_sphere)}"
    elif asserted_simply_connected is not None:
        sc = M.simply_connected
        sc_note = f"pi1 asserted: {asserted_simply_connected}"
    else:
        sc = None
        sc_note = "pi1: unknown after blowdown (no certificate)"

    new_lattice = None
    new_K = None
    new_surfaces: list[EmbeddedSurface] = []
    if in_lattice:
        comp = orthogonal_complement(M.lattice, list(config.spheres))
        labels = tuple(f"c{i}" for i in range(len(comp)))
        new_lattice = span_lattice(comp, labels)
        for s in M.surfaces:
            if s.cls is None or not (
                s.cls.lattice is M.lattice or s.cls.lattice == M.lattice
            ):
                new_surfaces.append(s)
                continue
            if all(pair(s.cls, c) == 0 for c in config.spheres):
                cls2 = express_in_basis(s.cls, comp, span=new_lattice).to_hom()
                new_surfaces.append(
                    EmbeddedSurface(
                        s.label,
                        s.genus,
                        square(cls2),
                        s.symplectic,
                        cls2,
                        s.complement_simply_connected,
                    )
                )
            # surfaces meeting the configuration are consumed
    else:
        lat = config.lattice
        consumed = {c.coeffs for c in config.spheres}
        for s in M.surfaces:
            if s.cls is not None and (s.cls.lattice is lat or s.cls.lattice == lat):
                if s.cls.coeffs in consumed:
                    continue
                if any(pair(s.cls, c) != 0 for c in config.spheres):
                    continue
            new_surfaces.append(s)

    out = make_ledger(
        M.name,
        M.e - (n - 1),
        M.sign + (n - 1),
        simply_connected=sc,
        symplectic=M.symplectic and config.symplectic,
        lattice=new_lattice,
        K=new_K,
        surfaces=new_surfaces,
        provenance=M.provenance
        + (
            f"rational_blowdown[C_{n}]",
            sc_note,
        )
        + (
            ("complement lattice records rational homology of the blowdown",)
            if in_lattice
            else ()
        ),
    )
    if out.c1sq != M.c1sq + (n - 1) or out.chi_h != M.chi_h:
        raise ConsistencyError("rational blowdown failed the invariant bookkeeping")
    return out


@dataclass(frozen=True)
class RecipeStep:
    op: str
    params: tuple[tuple[str, int], ...] = ()
    note: str = ""


@dataclass(frozen=True)
class SurgeryRecipe:
    start: str
    steps: tuple[RecipeStep, ...]


@dataclass(frozen=True)
class CheckResult:
    name: str
    status: str  # "verified" | "asserted" | "failed"
    detail: str = ""


@dataclass(frozen=True)
class VerifierReport:
    title: str
    checks: tuple[CheckResult, ...]
    data: tuple[tuple[str, object], ...] = ()

    @property
    def passed(self) -> bool:
        return all(c.status != "failed" for c in self.checks)

    def value(self, key: str):
        for k, v in self.data:
            if k == key:
                return v
        raise KeyError(key)


def _check(checks: list[CheckResult], name: str, ok: bool, detail: str = "") -> None:
    checks.append(CheckResult(name, "verified" if ok else "failed", detail))


def verify_prop_P(p: int) -> VerifierReport:
    """Lattice-level verification that blowing down C_{2p-6} in R(2p-3)
    yields S(p), following the exceptional-curve chain proof."""
    from .rational_surfaces import build_R

    if p < 4:
        raise DomainError(f"verify_prop_P requires p >= 4, got {p}")
    R, sigma = build_R(2 * p - 3)
    lat = R.lattice
    H = lat.basis_class("H")
    E = lat.basis_class("E")

    def Ei(i: int) -> HomClass:
        return lat.basis_class(f"E{i}")

    checks: list[CheckResult] = []

    s0 = lat.combo({"H": 1, **{f"E{i}": -1 for i in range(1, 2 * p - 2)}})
    chain = [Ei(2 * p - 4 + j) - Ei(2 * p - 3 + j) for j in range(1, 2 * p - 7)]
    config = ConfigCn.from_spheres([s0] + chain)
    _check(checks, "configuration", config.n == 2 * p - 6, f"C_{config.n} in R({2 * p - 3})")

    excs = [Ei(i) for i in range(4 * p - 10, 8 * p - 15)] + [
        H - E - Ei(i) for i in range(1, 2 * p - 3)
    ]
    exc_ok = all(square(c) == -1 and pair(R.K, c) == -1 for c in excs)
    disjoint = all(
        pair(excs[i], excs[j]) == 0
        for i in range(len(excs))
        for j in range(i + 1, len(excs))
    )
    off_config = all(
        pair(c, s) == 0 for c in excs for s in config.spheres
    ) and all(pair(sigma.cls, s) == 0 for s in config.spheres)
    _check(
        checks,
        "exceptional_curves",
        exc_ok and disjoint,
        f"{len(excs)} disjoint exceptional curves",
    )
    _check(checks, "disjoint_from_configuration", off_config)

    alpha = H - E
    beta = lat.combo({"H": 1, **{f"E{i}": -1 for i in range(1, 2 * p - 3)}})
    eps = lat.combo({f"E{j}": 1 for j in range(2 * p - 3, 4 * p - 10)})
    sigma2 = push_forward(sigma.cls, excs)
    expected = lat.combo(
        {
            "H": 4 * p - 7,
            "E": -(4 * p - 9),
            **{f"E{i}": -2 for i in range(1, 2 * p - 3)},
            **{f"E{j}": -1 for j in range(2 * p - 3, 4 * p - 10)},
        }
    )
    _check(
        checks,
        "sigma_pushforward",
        sigma2 == expected and sigma2 == (4 * p - 9) * alpha + 2 * beta - eps,
        format_class(sigma2),
    )

    gamma1 = (2 * p - 5) * alpha + beta
    gamma2 = alpha - eps
    matrix = gram_of([gamma1, gamma2])
    want = [[2 * p - 5, 1], [1, -(2 * p - 7)]]
    _check(checks, "complement_gram", matrix == want, f"{matrix}")

    comp = orthogonal_complement(lat, excs + list(config.spheres))
    unimodular = (
        len(comp) == 2
        and express_in_basis(gamma1, comp).is_integral()
        and express_in_basis(gamma2, comp).is_integral()
        and all(express_in_basis(v, [gamma1, gamma2]).is_integral() for v in comp)
    )
    _check(checks, "complement_basis", unimodular, "gamma_1, gamma_2 generate H2(Q - C)")

    gspan = span_lattice([gamma1, gamma2], ("g1", "g2"))
    coords = express_in_basis(sigma2, [gamma1, gamma2], span=gspan)
    _check(
        checks,
        "sigma_in_gamma_basis",
        coords.coeffs == (Fraction(2), Fraction(1)),
        "Sigma'' = 2 gamma_1 + gamma_2",
    )

    h = RationalClass(gspan, (Fraction(1, 2), Fraction(1, 2)))
    ee = RationalClass(
        gspan,
        (Fraction(p - 4, 2 * p - 6), Fraction(p - 2, 2 * p - 6)),
    )
    _check(
        checks,
        "ruled_surface_classes",
        square(h) == 1 and square(ee) == -1 and pair(h, ee) == 0,
        "h^2 = 1, e^2 = -1, h.e = 0",
    )
    final = p * h - (p - 3) * ee
    _check(
        checks,
        "final_class",
        final.coeffs == coords.coeffs,
        f"Sigma'' = {p}h - {p - 3}e",
    )

    K2 = push_forward(R.K, excs)
    _check(
        checks,
        "pushforward_genus",
        square(sigma2) == 6 * p - 9 and adjunction_genus(sigma2, K2) == 2 * p - 5,
        f"square {square(sigma2)}, genus {adjunction_genus(sigma2, K2)}",
    )

    return VerifierReport(
        title=f"blowdown of C_{2 * p - 6} in R({2 * p - 3}) yields S({p})",
        checks=tuple(checks),
        data=(("complement_gram", matrix), ("p", p)),
    )


def verify_prop_Pprime(p: int) -> VerifierReport:
    """Lattice-level verification that blowing down C_{2p-7} in R(2p-4)
    yields S'(p)."""
    from .rational_surfaces import build_R

    if p < 5:
        raise DomainError(f"verify_prop_Pprime requires p >= 5, got {p}")
    R, sigma = build_R(2 * p - 4)
    lat = R.lattice
    H = lat.basis_class("H")
    E = lat.basis_class("E")

    def Ei(i: int) -> HomClass:
        return lat.basis_class(f"E{i}")

    checks: list[CheckResult] = []

    s0 = lat.combo({"H": 1, **{f"E{i}": -1 for i in range(1, 2 * p - 3)}})
    chain = [Ei(2 * p - 5 + j) - Ei(2 * p - 4 + j) for j in range(1, 2 * p - 8)]
    config = ConfigCn.from_spheres([s0] + chain)
    _check(checks, "configuration", config.n == 2 * p - 7, f"C_{config.n} in R({2 * p - 4})")

    excs = [Ei(i) for i in range(4 * p - 12, 8 * p - 19)] + [
        H - E - Ei(i) for i in range(2, 2 * p - 4)
    ]
    exc_ok = all(square(c) == -1 and pair(R.K, c) == -1 for c in excs)
    disjoint = all(
        pair(excs[i], excs[j]) == 0
        for i in range(len(excs))
        for j in range(i + 1, len(excs))
    )
    off_config = all(
        pair(c, s) == 0 for c in excs for s in config.spheres
    ) and all(pair(sigma.cls, s) == 0 for s in config.spheres)
    _check(checks, "exceptional_curves", exc_ok and disjoint, f"{len(excs)} curves")
    _check(checks, "disjoint_from_configuration", off_config)

    alpha = H - E
    beta = lat.combo({"H": 1, **{f"E{i}": -1 for i in range(2, 2 * p - 4)}})
    eps = lat.combo({f"E{j}": 1 for j in range(2 * p - 4, 4 * p - 12)})
    zeta = alpha - Ei(1)
    sigma_u = push_forward(sigma.cls, excs)
    _check(
        checks,
        "sigma_pushforward",
        sigma_u == zeta + (alpha - eps) + 2 * ((2 * p - 7) * alpha + beta),
        format_class(sigma_u),
    )

    comp = orthogonal_complement(lat, excs + list(config.spheres))
    gens = [zeta, alpha - eps, (2 * p - 7) * alpha + beta]
    unimodular = (
        len(comp) == 3
        and all(express_in_basis(g, comp).is_integral() for g in gens)
        and all(express_in_basis(v, gens).is_integral() for v in comp)
    )
    _check(checks, "complement_basis", unimodular, "zeta, alpha-eps, (2p-7)alpha+beta")

    K_u = push_forward(R.K, excs)
    _check(
        checks,
        "zeta_exceptional",
        square(zeta) == -1 and pair(K_u, zeta) == -1,
        "zeta is an exceptional sphere in W",
    )

    g1 = (2 * p - 7) * alpha + beta + zeta
    g2 = alpha - eps
    matrix = gram_of([g1, g2])
    want = [[2 * p - 6, 1], [1, -(2 * p - 8)]]
    _check(checks, "complement_gram", matrix == want, f"{matrix}")

    coords = express_in_basis(sigma_u, [g1, g2, zeta])
    _check(
        checks,
        "sigma_in_section_basis",
        coords.coeffs == (Fraction(2), Fraction(1), Fraction(-1)),
        "Sigma' = 2(s_+ + f) + s_- - zeta",
    )

    Y = IntLattice.diagonal((1, -1, -1), ("h", "e", "e1"))
    A = Y.combo({"h": 1, "e1": -1})
    B = Y.combo({"h": 1, "e": -1})
    zy = Y.combo({"h": 1, "e": -1, "e1": -1})
    spf = A + (p - 3) * B
    sm = A - (p - 4) * B
    iso = gram_of([spf, sm, zy]) == gram_of([g1, g2, zeta])
    _check(checks, "identification_isometry", iso, "A <-> h-e1, B <-> h-e, zeta <-> h-e-e1")

    target = 2 * spf + sm - zy
    final = Y.combo({"h": p, "e": -(p - 3), "e1": -2})
    _check(checks, "final_class", target == final, format_class(target))

    return VerifierReport(
        title=f"blowdown of C_{2 * p - 7} in R({2 * p - 4}) yields S'({p})",
        checks=tuple(checks),
        data=(("complement_gram", matrix), ("final_class", format_class(target)), ("p", p)),
    )


def assemble_minus4_sphere(pieces) -> EmbeddedSurface:
    """Glue punctured sphere pieces across a fiber sum into one closed sphere.

    ``pieces`` is a sequence of (surface, punctures, side) with side "A" or
    "B" naming the fiber-sum summand the piece lives in.  Punctures (the
    intersections with the gluing surface) must balance across the two
    sides; the assembled sphere's self-intersection is the sum of the piece
    self-intersections.
    """
    if not pieces:
        raise DomainError("cannot assemble an empty list of pieces")
    for surf, punctures, side in pieces:
        if surf.genus != 0:
            raise DomainError(f"piece {surf.label!r} is not a sphere")
        if punctures < 0:
            raise DomainError(f"piece {surf.label!r} has negative puncture count")
        if side not in ("A", "B"):
            raise DomainError(f"piece {surf.label!r} has unknown side {side!r}")
    if len(pieces) == 1 and pieces[0][1] == 0:
        return pieces[0][0]
    if any(punctures == 0 for _, punctures, _ in pieces):
        raise DomainError("a multi-piece assembly cannot contain a closed piece")
    total_a = sum(p for _, p, side in pieces if side == "A")
    total_b = sum(p for _, p, side in pieces if side == "B")
    if total_a != total_b:
        raise DomainError(
            f"puncture mismatch across the fiber sum: {total_a} vs {total_b}"
        )
    return EmbeddedSurface(
        "+".join(surf.label for surf, _, _ in pieces),
        genus=0,
        self_int=sum(surf.self_int for surf, _, _ in pieces),
        symplectic=all(surf.symplectic for surf, _, _ in pieces),
    )

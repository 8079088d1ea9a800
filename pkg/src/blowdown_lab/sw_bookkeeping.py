"""Seiberg-Witten basic-class bookkeeping for elliptic surfaces and blowups.

Basic classes of E(x) # k CP2-bar have the form

    beta(m; eps_1..eps_k) = m f + eps_1 E_1 + ... + eps_k E_k

with |m| <= x-2, m = x (mod 2), eps_j = +-1.  They are tracked on a small
lattice fragment spanned by the fiber f, a section S of square -x, the
chain of 4x-2 (-2)-spheres hanging off the section in the Brieskorn
resolution, and the exceptional classes E_j.  That fragment carries every
pairing the blowdown filter needs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb

from .errors import ConsistencyError, DomainError
from .exact_lattice import HomClass, IntLattice, square
from .surgery_calculus import CheckResult, ConfigCn, VerifierReport

__all__ = [
    "SWLatticeFragment",
    "BasicClassSet",
    "basic_classes_E",
    "blowup_formula",
    "canonical_class_E_blowup",
    "lead_sphere_class",
    "config_in_E_blowup",
    "taut_filter",
    "taut_filter_counts",
    "adjunction_zero_check",
    "beta_label",
]


@dataclass(frozen=True)
class SWLatticeFragment:
    """Pairing fragment for E(x) # k CP2-bar.

    Generators: f (fiber, f.f = 0, f.S = 1), S (section, S.S = -x,
    S.t1 = 1), the top chain t_1..t_{4x-2} of (-2)-spheres, and E_1..E_k
    (each <-1>, orthogonal to everything else).
    """

    x: int
    k: int
    lattice: IntLattice

    @staticmethod
    @lru_cache(maxsize=None)
    def build(x: int, k: int) -> "SWLatticeFragment":
        if x < 2:
            raise DomainError(f"fragment requires x >= 2, got {x}")
        if k < 0:
            raise DomainError(f"fragment requires k >= 0, got {k}")
        chain = 4 * x - 2
        labels = ("f", "S") + tuple(f"t{i}" for i in range(1, chain + 1)) + tuple(
            f"E{j}" for j in range(1, k + 1)
        )
        rank = len(labels)
        gram = [[0] * rank for _ in range(rank)]
        gram[0][1] = gram[1][0] = 1  # f.S
        gram[1][1] = -x
        gram[1][2] = gram[2][1] = 1  # S.t1
        for i in range(chain):
            row = 2 + i
            gram[row][row] = -2
            if i + 1 < chain:
                gram[row][row + 1] = gram[row + 1][row] = 1
        for j in range(k):
            row = 2 + chain + j
            gram[row][row] = -1
        return SWLatticeFragment(x, k, IntLattice.make(gram, labels))

    @property
    def fiber(self) -> HomClass:
        return self.lattice.basis_class("f")

    @property
    def section(self) -> HomClass:
        return self.lattice.basis_class("S")

    def chain_sphere(self, i: int) -> HomClass:
        return self.lattice.basis_class(f"t{i}")

    def exceptional(self, j: int) -> HomClass:
        return self.lattice.basis_class(f"E{j}")

    def basic_class(self, m: int, eps: tuple[int, ...]) -> HomClass:
        if len(eps) != self.k:
            raise DomainError(f"expected {self.k} signs, got {len(eps)}")
        return self.lattice.combo(
            {"f": m, **{f"E{j + 1}": e for j, e in enumerate(eps)}}
        )

    def split_basic_class(self, cls: HomClass) -> tuple[int, tuple[int, ...]]:
        """Decompose m f + sum eps_j E_j; error if not of that shape."""
        m = cls.coeffs[0]
        chain = 4 * self.x - 2
        if any(cls.coeffs[1 : 2 + chain]):
            raise DomainError(f"{cls} is not a fiber-plus-exceptional class")
        eps = tuple(cls.coeffs[2 + chain :])
        return m, eps


def beta_label(m: int, eps: tuple[int, ...]) -> str:
    if eps:
        return f"beta({m};{','.join(str(e) for e in eps)})"
    return f"{m}f"


@dataclass(frozen=True)
class BasicClassSet:
    """A finite negation-closed set of basic classes on a fragment."""

    fragment: SWLatticeFragment
    classes: tuple[HomClass, ...]

    def __post_init__(self):
        x = self.fragment.x
        seen = set()
        for cls in self.classes:
            m, eps = self.fragment.split_basic_class(cls)
            if abs(m) > x - 2 or (m - x) % 2:
                raise ConsistencyError(
                    f"basic class {cls} violates |m| <= x-2, m = x (mod 2)"
                )
            if any(e not in (-1, 1) for e in eps):
                raise ConsistencyError(f"basic class {cls} has a sign not in {{-1,+1}}")
            seen.add(cls.coeffs)
        for c in seen:
            if tuple(-v for v in c) not in seen:
                raise ConsistencyError("basic class set is not closed under negation")

    def __len__(self) -> int:
        return len(self.classes)

    def labels(self) -> list[str]:
        out = []
        for cls in self.classes:
            m, eps = self.fragment.split_basic_class(cls)
            out.append(beta_label(m, eps))
        return out


def basic_classes_E(x: int) -> BasicClassSet:
    """Basic classes of E(x): {m f : |m| <= x-2, m = x (mod 2)}, x-1 of them."""
    if x < 2:
        raise DomainError(f"basic_classes_E requires x >= 2, got {x}")
    frag = SWLatticeFragment.build(x, 0)
    classes = tuple(frag.basic_class(m, ()) for m in range(-(x - 2), x - 1, 2))
    return BasicClassSet(frag, classes)


def blowup_formula(base: BasicClassSet, k: int) -> BasicClassSet:
    """Basic classes after k blowups: m f + sum eps_j E_j over all sign choices."""
    if k < 0:
        raise DomainError("blowup_formula requires k >= 0")
    if base.fragment.k != 0:
        raise DomainError("blowup_formula expects a fiber-only basic class set")
    if k == 0:
        return base
    frag = SWLatticeFragment.build(base.fragment.x, k)
    ms = [base.fragment.split_basic_class(c)[0] for c in base.classes]
    classes = [
        frag.basic_class(m, eps)
        for m in ms
        for eps in itertools.product((-1, 1), repeat=k)
    ]
    classes.sort(key=lambda c: c.coeffs)
    return BasicClassSet(frag, tuple(classes))


def canonical_class_E_blowup(x: int, k: int) -> HomClass:
    """K of E(x) # k CP2-bar on its fragment: (x-2) f + E_1 + ... + E_k."""
    frag = SWLatticeFragment.build(x, k)
    return frag.lattice.combo(
        {"f": x - 2, **{f"E{j}": 1 for j in range(1, k + 1)}}
    )


def lead_sphere_class(x: int, k: int) -> HomClass:
    """Lead sphere of the blown-up configuration: S + sum_j (f - 2 E_j).

    Resolving the section with k cusp-blowup spheres f - 2 E_j gives square
    -(x + 2k); the class pairs with beta(m; eps) to m + 2 sum(eps).
    """
    if k < 0:
        raise DomainError("lead_sphere_class requires k >= 0")
    frag = SWLatticeFragment.build(x, k)
    out = frag.section
    for j in range(1, k + 1):
        out = out + frag.fiber - 2 * frag.exceptional(j)
    return out


def config_in_E_blowup(x: int, k: int) -> ConfigCn:
    """The symplectic configuration C_{x+2k-2} in E(x) # k CP2-bar.

    Needs x + 2k - 4 <= 4x - 2 (enough (-2)-spheres across the top of the
    plumbing), i.e. 2k <= 3x + 2.
    """
    if x < 2 or k < 0:
        raise DomainError("config_in_E_blowup requires x >= 2 and k >= 0")
    if x + 2 * k - 4 > 4 * x - 2:
        raise DomainError(
            f"availability bound violated: x + 2k - 4 = {x + 2 * k - 4} exceeds "
            f"4x - 2 = {4 * x - 2} (need k <= (3x+2)/2)"
        )
    n = x + 2 * k - 2
    if n < 2:
        raise DomainError(f"C_n needs n >= 2; (x,k) = ({x},{k}) gives n = {n}")
    frag = SWLatticeFragment.build(x, k)
    spheres = [lead_sphere_class(x, k)] + [
        frag.chain_sphere(i) for i in range(1, x + 2 * k - 3)
    ]
    return ConfigCn.from_spheres(spheres)


def taut_filter(basic: BasicClassSet, config: ConfigCn) -> BasicClassSet:
    """Apply the rational-blowdown basic-class criterion, exhaustively.

    First verifies the hypotheses for EVERY class: pairing 0 with each
    middle sphere and |pairing with the lead sphere| <= n; refuses to filter
    if any class violates them.  Survivors are the classes pairing to n in
    absolute value.
    """
    lat = config.lattice
    if lat is not basic.fragment.lattice and lat != basic.fragment.lattice:
        raise DomainError("basic classes and configuration live in different lattices")
    n = config.n
    # Precompute gram @ sphere once per sphere; each pairing is then a short
    # dot product over the (sparse) basic-class support.
    rows = lat._sparse_rows
    dense = []
    for s in config.spheres:
        w = [0] * lat.rank
        for i, c in enumerate(s.coeffs):
            if c:
                for j, g in rows[i]:
                    w[j] += g * c
        dense.append(w)
    survivors = []
    for cls in basic.classes:
        support = [(i, c) for i, c in enumerate(cls.coeffs) if c]
        vals = [sum(c * w[i] for i, c in support) for w in dense]
        for idx, v in enumerate(vals[1:], start=1):
            if v != 0:
                raise DomainError(
                    f"hypothesis violated: {cls} . S_{idx} = {v} != 0"
                )
        lead = vals[0]
        if abs(lead) > n:
            raise DomainError(
                f"hypothesis violated: |{cls} . S_0| = {abs(lead)} > n = {n}"
            )
        if abs(lead) == n:
            survivors.append(cls)
    return BasicClassSet(basic.fragment, tuple(survivors))


def taut_filter_counts(x: int, k: int, n: int) -> tuple[int, int]:
    """(survivor count, max |beta . S_0|) over all (x-1) 2^k basic classes.

    beta(m; eps) . S_0 = m + 2 sum(eps) depends only on m and the number of
    +1 signs, so the filter is aggregated over (m, #plus) with binomial
    multiplicities.  Exact and complete, and usable when 2^k classes cannot
    be materialized.
    """
    survivors = 0
    max_abs = 0
    for m in range(-(x - 2), x - 1, 2):
        for plus in range(k + 1):
            s = 2 * plus - k
            v = abs(m + 2 * s)
            if v > max_abs:
                max_abs = v
            if v == n:
                survivors += comb(k, plus)
    return survivors, max_abs


def adjunction_zero_check(x: int, k: int) -> VerifierReport:
    """Verify that K, f and every E_j pair to zero with the chain spheres
    t_1..t_{x+2k-4}, hence every basic class does."""
    frag = SWLatticeFragment.build(x, k)
    K = canonical_class_E_blowup(x, k)
    lat = frag.lattice
    gram = lat.gram
    f_row = lat.index_of("f")
    exc_rows = [lat.index_of(f"E{j}") for j in range(1, k + 1)]
    k_support = [(i, c) for i, c in enumerate(K.coeffs) if c]
    checks: list[CheckResult] = []
    limit = x + 2 * k - 4
    bad = []
    for i in range(1, max(limit, 0) + 1):
        t_row = lat.index_of(f"t{i}")
        # pairings of basis generators are literal Gram entries
        k_dot = sum(c * gram[r][t_row] for r, c in k_support)
        if k_dot != 0:
            bad.append(f"K.t{i} = {k_dot}")
        if gram[f_row][t_row] != 0:
            bad.append(f"f.t{i} = {gram[f_row][t_row]}")
        for j, e_row in enumerate(exc_rows, start=1):
            if gram[e_row][t_row] != 0:
                bad.append(f"E{j}.t{i} != 0")
    detail = (
        f"all pairings with t_1..t_{limit} vanish" if limit > 0 else "vacuous (no chain spheres)"
    )
    checks.append(
        CheckResult(
            "adjunction_vanishing",
            "verified" if not bad else "failed",
            detail if not bad else "; ".join(bad),
        )
    )
    checks.append(
        CheckResult(
            "canonical_square",
            "verified" if square(K) == -k else "failed",
            f"K.K = {square(K)}",
        )
    )
    return VerifierReport(
        title=f"adjunction vanishing in E({x}) # {k} CP2-bar",
        checks=tuple(checks),
    )

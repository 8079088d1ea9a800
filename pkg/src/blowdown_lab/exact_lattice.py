"""Exact integer and rational linear algebra over intersection lattices.

Everything here is exact: coefficients are Python ints (arbitrary
precision) or ``fractions.Fraction``; no floating point is used anywhere.
Lattices and classes are immutable, so all operations are pure functions
and safe to use concurrently.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Mapping, Sequence

from .errors import DomainError

__all__ = [
    "IntLattice",
    "HomClass",
    "RationalClass",
    "pair",
    "square",
    "gram_of",
    "integer_kernel",
    "orthogonal_complement",
    "span_lattice",
    "express_in_basis",
    "expand_in_basis",
    "solve_class",
]


@dataclass(frozen=True)
class IntLattice:
    """A finite-rank free abelian group with a symmetric integer pairing.

    ``gram`` is the rank x rank Gram matrix of the pairing in the basis
    named by ``labels``.
    """

    gram: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...]

    def __post_init__(self):
        rank = len(self.labels)
        if len(self.gram) != rank:
            raise DomainError(f"gram has {len(self.gram)} rows for rank {rank}")
        for i, row in enumerate(self.gram):
            if len(row) != rank:
                raise DomainError(f"gram row {i} has length {len(row)}, expected {rank}")
        for i in range(rank):
            for j in range(i):
                if self.gram[i][j] != self.gram[j][i]:
                    raise DomainError(f"gram not symmetric at ({i},{j})")
        if len(set(self.labels)) != rank:
            raise DomainError("basis labels must be pairwise distinct")

    @staticmethod
    def make(gram: Sequence[Sequence[int]], labels: Sequence[str]) -> "IntLattice":
        return IntLattice(tuple(tuple(int(v) for v in row) for row in gram), tuple(labels))

    @staticmethod
    def diagonal(entries: Sequence[int], labels: Sequence[str]) -> "IntLattice":
        n = len(entries)
        gram = tuple(
            tuple(entries[i] if i == j else 0 for j in range(n)) for i in range(n)
        )
        return IntLattice(gram, tuple(labels))

    @property
    def rank(self) -> int:
        return len(self.labels)

    @cached_property
    def _label_index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.labels)}

    @cached_property
    def _sparse_rows(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        # (j, gram[i][j]) pairs per row; pairing cost then scales with the
        # support of the arguments, which matters for large plumbing lattices.
        return tuple(
            tuple((j, v) for j, v in enumerate(row) if v) for row in self.gram
        )

    @cached_property
    def _basis_cache(self) -> dict[str, "HomClass"]:
        return {}

    def index_of(self, label: str) -> int:
        try:
            return self._label_index[label]
        except KeyError:
            raise DomainError(f"no basis element named {label!r}") from None

    def basis_class(self, label: str) -> "HomClass":
        cached = self._basis_cache.get(label)
        if cached is None:
            i = self.index_of(label)
            cached = HomClass(self, tuple(1 if j == i else 0 for j in range(self.rank)))
            self._basis_cache[label] = cached
        return cached

    def basis(self) -> list["HomClass"]:
        return [self.basis_class(name) for name in self.labels]

    def zero(self) -> "HomClass":
        return HomClass(self, (0,) * self.rank)

    def combo(self, terms: Mapping[str, int]) -> "HomClass":
        """Build the class sum(c * basis[name]) from a label -> coefficient map."""
        coeffs = [0] * self.rank
        for name, c in terms.items():
            coeffs[self.index_of(name)] = int(c)
        return HomClass(self, tuple(coeffs))

    def from_coeffs(self, coeffs: Sequence[int]) -> "HomClass":
        return HomClass(self, tuple(int(c) for c in coeffs))

    def extended(self, label: str, self_pairing: int) -> "IntLattice":
        """Return the orthogonal extension by one new generator."""
        if label in self._label_index:
            raise DomainError(f"label {label!r} already present")
        n = self.rank
        gram = tuple(row + (0,) for row in self.gram) + (
            tuple(0 for _ in range(n)) + (self_pairing,),
        )
        return IntLattice(gram, self.labels + (label,))


def _same_lattice(a, b) -> None:
    la, lb = a.lattice, b.lattice
    if la is not lb and la != lb:
        raise DomainError("classes live in different lattices")


@dataclass(frozen=True)
class HomClass:
    """An integer second-homology class: a coefficient vector in a lattice."""

    lattice: IntLattice
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.lattice.rank:
            raise DomainError(
                f"coefficient vector of length {len(self.coeffs)} in a rank "
                f"{self.lattice.rank} lattice"
            )

    def __add__(self, other: "HomClass") -> "HomClass":
        _same_lattice(self, other)
        return HomClass(self.lattice, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "HomClass") -> "HomClass":
        _same_lattice(self, other)
        return HomClass(self.lattice, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "HomClass":
        return HomClass(self.lattice, tuple(-a for a in self.coeffs))

    def __mul__(self, k: int) -> "HomClass":
        return HomClass(self.lattice, tuple(k * a for a in self.coeffs))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def to_rational(self) -> "RationalClass":
        return RationalClass(self.lattice, tuple(Fraction(c) for c in self.coeffs))

    def __str__(self) -> str:
        return format_class(self)


@dataclass(frozen=True)
class RationalClass:
    """A class with exact rational coefficients (e.g. h = (g1+g2)/2)."""

    lattice: IntLattice
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.lattice.rank:
            raise DomainError("rational coefficient vector has wrong length")
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))

    def __add__(self, other):
        other = other.to_rational() if isinstance(other, HomClass) else other
        _same_lattice(self, other)
        return RationalClass(self.lattice, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        other = other.to_rational() if isinstance(other, HomClass) else other
        _same_lattice(self, other)
        return RationalClass(self.lattice, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return RationalClass(self.lattice, tuple(-a for a in self.coeffs))

    def __mul__(self, k):
        return RationalClass(self.lattice, tuple(Fraction(k) * a for a in self.coeffs))

    __rmul__ = __mul__

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def to_hom(self) -> HomClass:
        if not self.is_integral():
            raise DomainError(f"class {format_class(self)} is not integral")
        return HomClass(self.lattice, tuple(int(c) for c in self.coeffs))

    def __str__(self) -> str:
        return format_class(self)


def format_class(cls) -> str:
    """Render a class as a signed sum of named generators, e.g. 5H-3E-E1."""
    parts = []
    for name, c in zip(cls.lattice.labels, cls.coeffs):
        if not c:
            continue
        if c == 1:
            term = name
        elif c == -1:
            term = f"-{name}"
        else:
            term = f"{c}{name}" if c < 0 else f"{c}{name}"
        if parts and not term.startswith("-"):
            parts.append("+" + term)
        else:
            parts.append(term)
    return "".join(parts) if parts else "0"


def pair(a, b):
    """Evaluate the intersection pairing a . b (int for integer classes)."""
    _same_lattice(a, b)
    rows = a.lattice._sparse_rows
    bc = b.coeffs
    total = 0
    for i, ai in enumerate(a.coeffs):
        if not ai:
            continue
        s = 0
        for j, g in rows[i]:
            bj = bc[j]
            if bj:
                s += g * bj
        if s:
            total += ai * s
    return total


def square(a):
    """Self-intersection a . a."""
    return pair(a, a)


def gram_of(classes: Sequence) -> list[list[int]]:
    """Pairwise intersection matrix of a list of classes."""
    n = len(classes)
    out = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            v = pair(classes[i], classes[j])
            out[i][j] = v
            out[j][i] = v
    return out


def integer_kernel(rows: Sequence[Sequence[int]], ncols: int) -> list[list[int]]:
    """Basis of the full integer kernel {x in Z^ncols : A x = 0}.

    Row-reduces [A^T | I] with unimodular row operations; the identity block
    rows that annihilate A^T form a basis of the kernel lattice.  The kernel
    of an integer matrix is automatically saturated, so this basis spans the
    whole sublattice, not a finite-index subgroup.
    """
    m = len(rows)
    work = [
        [rows[k][i] for k in range(m)] + [1 if j == i else 0 for j in range(ncols)]
        for i in range(ncols)
    ]
    width = m + ncols
    pivot = 0
    for col in range(m):
        while True:
            nz = [i for i in range(pivot, ncols) if work[i][col] != 0]
            if not nz:
                break
            if len(nz) == 1:
                # rotate (not swap) the pivot row into place so the kernel
                # rows keep the natural coordinate order
                work.insert(pivot, work.pop(nz[0]))
                pivot += 1
                break
            i0 = min(nz, key=lambda i: abs(work[i][col]))
            w0 = work[i0]
            for i in nz:
                if i == i0:
                    continue
                q = work[i][col] // w0[col]
                if q:
                    wi = work[i]
                    for t in range(col, width):
                        wi[t] -= q * w0[t]
    out = []
    for row in work[pivot:]:
        v = row[m:]
        lead = next((c for c in v if c), 0)
        if lead < 0:
            v = [-c for c in v]
        out.append(v)
    return out


def orthogonal_complement(lattice: IntLattice, classes: Sequence[HomClass]) -> list[HomClass]:
    """Integer basis of {x : x . c = 0 for every c in classes}, saturated."""
    rows = []
    for c in classes:
        if c.lattice is not lattice and c.lattice != lattice:
            raise DomainError("complement input not in the given lattice")
        rows.append([sum(g * c.coeffs[j] for j, g in lattice._sparse_rows[i]) for i in range(lattice.rank)])
    return [lattice.from_coeffs(v) for v in integer_kernel(rows, lattice.rank)]


def span_lattice(classes: Sequence[HomClass], labels: Sequence[str] | None = None) -> IntLattice:
    """The abstract lattice spanned by ``classes``, with their induced Gram."""
    if labels is None:
        labels = tuple(f"b{i}" for i in range(len(classes)))
    return IntLattice.make(gram_of(classes), labels)


def _solve_rational(columns: Sequence[Sequence], rhs: Sequence) -> list[Fraction]:
    """Solve sum(c_j * columns[j]) = rhs exactly; error if dependent/unsolvable."""
    n = len(rhs)
    b = len(columns)
    mat = [
        [Fraction(columns[j][i]) for j in range(b)] + [Fraction(rhs[i])]
        for i in range(n)
    ]
    row = 0
    for col in range(b):
        piv = next((r for r in range(row, n) if mat[r][col] != 0), None)
        if piv is None:
            raise DomainError("basis classes are linearly dependent")
        mat[row], mat[piv] = mat[piv], mat[row]
        pv = mat[row][col]
        for r in range(n):
            if r != row and mat[r][col]:
                f = mat[r][col] / pv
                mr, m0 = mat[r], mat[row]
                for c in range(col, b + 1):
                    mr[c] -= f * m0[c]
        row += 1
    for r in range(row, n):
        if mat[r][b] != 0:
            raise DomainError("target is not in the rational span of the basis")
    coords = []
    r = 0
    for col in range(b):
        coords.append(mat[r][b] / mat[r][col])
        r += 1
    return coords


def express_in_basis(
    target,
    basis: Sequence[HomClass],
    span: IntLattice | None = None,
) -> RationalClass:
    """Coordinates of ``target`` in ``basis`` (exact rationals).

    The result lives in ``span`` (default: the abstract span lattice of the
    basis, with its induced Gram), so pairings of expressed classes can be
    evaluated directly against the basis Gram matrix.
    """
    if not basis:
        raise DomainError("empty basis")
    for b in basis:
        _same_lattice(b, basis[0])
    _same_lattice(target, basis[0])
    if span is None:
        span = span_lattice(basis)
    elif span.rank != len(basis):
        raise DomainError("span lattice rank does not match basis size")
    coords = _solve_rational([b.coeffs for b in basis], target.coeffs)
    return RationalClass(span, tuple(coords))


def expand_in_basis(coords: RationalClass, basis: Sequence[HomClass]) -> RationalClass:
    """Inverse of express_in_basis: sum(coords_i * basis_i) in the ambient lattice."""
    if len(basis) != coords.lattice.rank:
        raise DomainError("coordinate length does not match basis size")
    out = basis[0].to_rational() * coords.coeffs[0]
    for c, b in zip(coords.coeffs[1:], basis[1:]):
        out = out + b.to_rational() * c
    return out


def solve_class(
    lattice: IntLattice,
    linear_constraints: Sequence[tuple[HomClass, int]],
    square_target: int,
    coeff_bound: int,
    *,
    up_to_sign: bool = False,
) -> list[HomClass]:
    """All classes x with |x_i| <= coeff_bound, x . v_k = t_k, x . x = square_target.

    The search is exhaustive over the coefficient box; branches are pruned
    with interval bounds from the linear constraints (no lattice-reduction
    heuristics).  Results come back in lexicographic coefficient order.
    """
    if coeff_bound < 0:
        raise DomainError("coeff_bound must be >= 0")
    rank = lattice.rank
    weights = []
    targets = []
    for v, t in linear_constraints:
        if v.lattice is not lattice and v.lattice != lattice:
            raise DomainError("constraint class not in the given lattice")
        w = [sum(g * v.coeffs[j] for j, g in lattice._sparse_rows[i]) for i in range(rank)]
        weights.append(w)
        targets.append(int(t))
    ncons = len(weights)
    # suffix[k][d] bounds |sum over coords >= d of w_k[j] * x_j|
    suffix = []
    for w in weights:
        suf = [0] * (rank + 1)
        for d in range(rank - 1, -1, -1):
            suf[d] = suf[d + 1] + abs(w[d])
        suffix.append(suf)

    values = list(range(-coeff_bound, coeff_bound + 1))
    x = [0] * rank
    partial = [0] * ncons
    results: list[tuple[int, ...]] = []

    def dfs(d: int) -> None:
        if d == rank:
            cand = lattice.from_coeffs(x)
            if square(cand) == square_target:
                results.append(tuple(x))
            return
        for val in values:
            x[d] = val
            ok = True
            for k in range(ncons):
                ps = partial[k] + weights[k][d] * val
                if abs(targets[k] - ps) > coeff_bound * suffix[k][d + 1]:
                    ok = False
                    break
            if ok:
                for k in range(ncons):
                    partial[k] += weights[k][d] * val
                dfs(d + 1)
                for k in range(ncons):
                    partial[k] -= weights[k][d] * val
        x[d] = 0

    dfs(0)
    results.sort()
    if up_to_sign:
        kept = []
        seen = set()
        for r in results:
            neg = tuple(-c for c in r)
            if neg in seen:
                continue
            seen.add(r)
            kept.append(r)
        results = kept
    return [lattice.from_coeffs(r) for r in results]


def brute_force_solve(
    lattice: IntLattice,
    linear_constraints: Sequence[tuple[HomClass, int]],
    square_target: int,
    coeff_bound: int,
) -> list[HomClass]:
    """Unpruned reference enumeration of the same search box (test oracle)."""
    out = []
    for combo in itertools.product(range(-coeff_bound, coeff_bound + 1), repeat=lattice.rank):
        cand = lattice.from_coeffs(combo)
        if any(pair(cand, v) != t for v, t in linear_constraints):
            continue
        if square(cand) == square_target:
            out.append(cand)
    return out

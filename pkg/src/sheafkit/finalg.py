"""Finite commutative unital rings, matrices, submodules, and brute-force
structure searches.

Ring elements are integer codes 0..size-1 with explicit add/mul tables, so
every downstream check is exact table lookup and works for any ring the
constructors can build (prime fields, Z/m, F_p[t]/(poly), products).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import FrozenSet, List, Optional, Sequence, Tuple

from .errors import (
    InvalidPolynomial,
    NonSquare,
    NotAField,
    NotPrime,
    RingError,
    SearchBudgetExceeded,
)

DEFAULT_ISO_SEARCH_BOUND = 64

Vec = Tuple[int, ...]


class FinRing:
    """Finite commutative unital ring given by operation tables."""

    def __init__(self, names: Sequence[str], add: Sequence[Sequence[int]],
                 mul: Sequence[Sequence[int]], zero: int, one: int,
                 label: str = "", check: bool = True):
        self.names = tuple(names)
        self.size = len(self.names)
        self.add_table = tuple(tuple(row) for row in add)
        self.mul_table = tuple(tuple(row) for row in mul)
        self.zero = zero
        self.one = one
        self.label = label or f"ring{self.size}"
        if check:
            problems = self.check_axioms()
            if problems:
                raise RingError("; ".join(problems))
        self._neg = tuple(self._find_neg(a) for a in range(self.size))

    def _find_neg(self, a: int) -> int:
        for b in range(self.size):
            if self.add_table[a][b] == self.zero:
                return b
        raise RingError(f"no additive inverse for {self.names[a]}")

    def add(self, a: int, b: int) -> int:
        return self.add_table[a][b]

    def mul(self, a: int, b: int) -> int:
        return self.mul_table[a][b]

    def neg(self, a: int) -> int:
        return self._neg[a]

    def sub(self, a: int, b: int) -> int:
        return self.add_table[a][self._neg[b]]

    def elements(self) -> range:
        return range(self.size)

    def check_axioms(self) -> List[str]:
        """Full table verification of the commutative unital ring axioms."""
        problems = []
        n = self.size
        rng = range(n)
        add, mul = self.add_table, self.mul_table
        for a in rng:
            if add[a][self.zero] != a:
                problems.append(f"{a}+0 != {a}")
            if mul[a][self.one] != a:
                problems.append(f"{a}*1 != {a}")
            if not any(add[a][b] == self.zero for b in rng):
                problems.append(f"{a} has no additive inverse")
            for b in rng:
                if add[a][b] != add[b][a]:
                    problems.append(f"add not commutative at ({a},{b})")
                if mul[a][b] != mul[b][a]:
                    problems.append(f"mul not commutative at ({a},{b})")
                for c in rng:
                    if add[add[a][b]][c] != add[a][add[b][c]]:
                        problems.append(f"add not associative at ({a},{b},{c})")
                    if mul[mul[a][b]][c] != mul[a][mul[b][c]]:
                        problems.append(f"mul not associative at ({a},{b},{c})")
                    if mul[a][add[b][c]] != add[mul[a][b]][mul[a][c]]:
                        problems.append(f"distributivity fails at ({a},{b},{c})")
        if self.size > 1 and self.zero == self.one:
            problems.append("0 == 1 in a nontrivial ring")
        return problems

    def __repr__(self) -> str:
        return f"FinRing({self.label}, size={self.size})"


def is_unit(r: FinRing, x: int) -> bool:
    return any(r.mul(x, y) == r.one for y in r.elements())


def units(r: FinRing) -> List[int]:
    return [x for x in r.elements() if is_unit(r, x)]


def is_field(r: FinRing) -> bool:
    return r.size > 1 and all(is_unit(r, x) for x in r.elements() if x != r.zero)


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % d for d in range(2, int(p ** 0.5) + 1))


def make_mod_ring(m: int) -> FinRing:
    if m < 2:
        raise RingError(f"modulus {m} < 2")
    names = [str(i) for i in range(m)]
    add = [[(i + j) % m for j in range(m)] for i in range(m)]
    mul = [[(i * j) % m for j in range(m)] for i in range(m)]
    return FinRing(names, add, mul, zero=0, one=1, label=f"Z/{m}")


def make_field(p: int) -> FinRing:
    if not _is_prime(p):
        raise NotPrime(f"{p} is not prime")
    r = make_mod_ring(p)
    r.label = f"F_{p}"
    return r


def _poly_name(coeffs: Sequence[int]) -> str:
    terms = []
    for i, c in enumerate(coeffs):
        if c == 0:
            continue
        if i == 0:
            terms.append(str(c))
        elif i == 1:
            terms.append("t" if c == 1 else f"{c}t")
        else:
            terms.append(f"t^{i}" if c == 1 else f"{c}t^{i}")
    return "+".join(reversed(terms)) if terms else "0"


def make_quotient(p: int, poly: Sequence[int]) -> FinRing:
    """F_p[t]/(poly); poly is monic, coefficients low-to-high, degree >= 1.

    Element code sum(c_i p^i) encodes the residue sum(c_i t^i).
    """
    if not _is_prime(p):
        raise NotPrime(f"{p} is not prime")
    poly = [c % p for c in poly]
    while poly and poly[-1] == 0:
        poly.pop()
    d = len(poly) - 1
    if d < 1 or poly[-1] != 1:
        raise InvalidPolynomial("modulus must be monic of degree >= 1")
    size = p ** d

    def decode(code: int) -> List[int]:
        return [(code // p ** i) % p for i in range(d)]

    def encode(cs: Sequence[int]) -> int:
        return sum((c % p) * p ** i for i, c in enumerate(cs))

    def reduce(cs: List[int]) -> List[int]:
        cs = [c % p for c in cs]
        while len(cs) > d:
            lead = cs.pop()
            for i in range(len(poly) - 1):
                cs[len(cs) - d + i] = (cs[len(cs) - d + i] - lead * poly[i]) % p
        return cs + [0] * (d - len(cs))

    names = [_poly_name(decode(c)) for c in range(size)]
    add = [[encode([(x + y) % p for x, y in zip(decode(a), decode(b))])
            for b in range(size)] for a in range(size)]
    mul = []
    for a in range(size):
        row = []
        ca = decode(a)
        for b in range(size):
            cb = decode(b)
            prod = [0] * (2 * d - 1)
            for i, x in enumerate(ca):
                for j, y in enumerate(cb):
                    prod[i + j] = (prod[i + j] + x * y) % p
            row.append(encode(reduce(prod)))
        mul.append(row)
    return FinRing(names, add, mul, zero=0, one=1,
                   label=f"F_{p}[t]/({_poly_name(poly)})")


def make_product(r: FinRing, s: FinRing) -> FinRing:
    """Direct product with componentwise operations; code = a*|s| + b."""
    size = r.size * s.size

    def pair(code: int) -> Tuple[int, int]:
        return divmod(code, s.size)

    names = [f"({r.names[a]},{s.names[b]})" for a in r.elements() for b in s.elements()]
    add = [[0] * size for _ in range(size)]
    mul = [[0] * size for _ in range(size)]
    for x in range(size):
        a, b = pair(x)
        for y in range(size):
            c, d = pair(y)
            add[x][y] = r.add(a, c) * s.size + s.add(b, d)
            mul[x][y] = r.mul(a, c) * s.size + s.mul(b, d)
    return FinRing(names, add, mul,
                   zero=r.zero * s.size + s.zero,
                   one=r.one * s.size + s.one,
                   label=f"{r.label}x{s.label}")


def ring_from_ops(elements: Sequence, add_fn, mul_fn, zero, one,
                  names: Optional[Sequence[str]] = None,
                  label: str = "") -> FinRing:
    """Build an explicit FinRing from a finite element list and operations.

    Used to give ring structure to carriers produced by sheaf constructions
    (stalks of pullbacks, section sets), whose elements are arbitrary
    hashable values.
    """
    elems = list(elements)
    index = {e: i for i, e in enumerate(elems)}
    if names is None:
        names = [str(e) for e in elems]
    add = [[index[add_fn(a, b)] for b in elems] for a in elems]
    mul = [[index[mul_fn(a, b)] for b in elems] for a in elems]
    return FinRing(names, add, mul, zero=index[zero], one=index[one], label=label)


@dataclass(frozen=True)
class RingMorphism:
    domain: FinRing
    codomain: FinRing
    assignment: Tuple[int, ...]

    def __call__(self, a: int) -> int:
        return self.assignment[a]


def validate_morphism(f: RingMorphism) -> bool:
    """Unital ring morphism check on the full tables."""
    r, s = f.domain, f.codomain
    if len(f.assignment) != r.size:
        return False
    if f.assignment[r.one] != s.one:
        return False
    for a in r.elements():
        for b in r.elements():
            if f.assignment[r.add(a, b)] != s.add(f.assignment[a], f.assignment[b]):
                return False
            if f.assignment[r.mul(a, b)] != s.mul(f.assignment[a], f.assignment[b]):
                return False
    return True


def find_ring_isomorphism(r: FinRing, s: FinRing,
                          bound: int = DEFAULT_ISO_SEARCH_BOUND) -> Optional[RingMorphism]:
    """Exhaustive search for a unital ring isomorphism r -> s.

    Backtracking over element images in increasing code order, pruning on
    the add/mul tables, so the returned witness is lexicographically least.
    Returns None after the search exhausts.
    """
    if r.size != s.size:
        return None
    if r.size > bound:
        raise SearchBudgetExceeded(f"ring size {r.size} exceeds bound {bound}")

    n = r.size
    assignment: List[int] = [-1] * n
    used = [False] * n

    def consistent(a: int) -> bool:
        fa = assignment[a]
        for b in range(n):
            fb = assignment[b]
            if fb < 0:
                continue
            ab = assignment[r.add(a, b)]
            if ab >= 0 and s.add(fa, fb) != ab:
                return False
            mb = assignment[r.mul(a, b)]
            if mb >= 0 and s.mul(fa, fb) != mb:
                return False
        return True

    def extend(a: int) -> bool:
        if a == n:
            return True
        for image in range(n):
            if used[image]:
                continue
            if a == r.zero and image != s.zero:
                continue
            if a == r.one and image != s.one:
                continue
            assignment[a] = image
            used[image] = True
            if consistent(a) and extend(a + 1):
                return True
            assignment[a] = -1
            used[image] = False
        return False

    if not extend(0):
        return None
    f = RingMorphism(r, s, tuple(assignment))
    assert validate_morphism(f)
    return f


# -- matrices ----------------------------------------------------------------

@dataclass(frozen=True)
class Matrix:
    ring: FinRing
    rows: int
    cols: int
    entries: Tuple[int, ...]  # row-major codes

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise RingError("entry count != rows*cols")

    def at(self, i: int, j: int) -> int:
        return self.entries[i * self.cols + j]

    def mul(self, other: "Matrix") -> "Matrix":
        assert self.cols == other.rows
        r = self.ring
        out = []
        for i in range(self.rows):
            for j in range(other.cols):
                acc = r.zero
                for t in range(self.cols):
                    acc = r.add(acc, r.mul(self.at(i, t), other.at(t, j)))
                out.append(acc)
        return Matrix(r, self.rows, other.cols, tuple(out))

    def apply(self, v: Vec) -> Vec:
        assert len(v) == self.cols
        r = self.ring
        out = []
        for i in range(self.rows):
            acc = r.zero
            for j in range(self.cols):
                acc = r.add(acc, r.mul(self.at(i, j), v[j]))
            out.append(acc)
        return tuple(out)

    def minor(self, drop_row: int, drop_col: int) -> "Matrix":
        ent = [self.at(i, j)
               for i in range(self.rows) if i != drop_row
               for j in range(self.cols) if j != drop_col]
        return Matrix(self.ring, self.rows - 1, self.cols - 1, tuple(ent))


def identity_matrix(r: FinRing, n: int) -> Matrix:
    return Matrix(r, n, n, tuple(r.one if i == j else r.zero
                                 for i in range(n) for j in range(n)))


def det(m: Matrix) -> int:
    """Determinant by cofactor expansion along the first row."""
    if m.rows != m.cols:
        raise NonSquare(f"{m.rows}x{m.cols}")
    r = m.ring
    if m.rows == 0:
        return r.one
    if m.rows == 1:
        return m.at(0, 0)
    acc = r.zero
    for j in range(m.cols):
        term = r.mul(m.at(0, j), det(m.minor(0, j)))
        acc = r.add(acc, term if j % 2 == 0 else r.neg(term))
    return acc


def is_invertible(m: Matrix) -> bool:
    """Over a commutative ring a square matrix is invertible iff det is a unit."""
    return is_unit(m.ring, det(m))


# -- vectors and submodules --------------------------------------------------

def vec_add(r: FinRing, u: Vec, v: Vec) -> Vec:
    return tuple(r.add(a, b) for a, b in zip(u, v))


def vec_scale(r: FinRing, c: int, v: Vec) -> Vec:
    return tuple(r.mul(c, a) for a in v)


def zero_vec(r: FinRing, n: int) -> Vec:
    return (r.zero,) * n


def all_vecs(r: FinRing, n: int) -> List[Vec]:
    return list(itertools.product(r.elements(), repeat=n))


def span(r: FinRing, n: int, gens: Sequence[Vec]) -> FrozenSet[Vec]:
    """R-linear span of the generators inside R^n."""
    acc = {zero_vec(r, n)}
    for g in gens:
        acc = {vec_add(r, s, vec_scale(r, c, g)) for s in acc for c in r.elements()}
    return frozenset(acc)


@dataclass(frozen=True)
class Submodule:
    ring: FinRing
    ambient_rank: int
    elements: FrozenSet[Vec]

    def sort_key(self) -> Tuple[Vec, ...]:
        return tuple(sorted(self.elements))

    def validate(self) -> bool:
        r = self.ring
        if zero_vec(r, self.ambient_rank) not in self.elements:
            return False
        for u in self.elements:
            for c in r.elements():
                if vec_scale(r, c, u) not in self.elements:
                    return False
            for v in self.elements:
                if vec_add(r, u, v) not in self.elements:
                    return False
        return True


def zero_submodule(r: FinRing, n: int) -> Submodule:
    return Submodule(r, n, frozenset({zero_vec(r, n)}))


def full_submodule(r: FinRing, n: int) -> Submodule:
    return Submodule(r, n, frozenset(all_vecs(r, n)))


def gaussian_binomial(n: int, k: int, q: int) -> int:
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (k - i) - 1
    return num // den


def enumerate_free_submodules(r: FinRing, n: int, k: int) -> List[Submodule]:
    """All rank-k free submodules of r^n for a field r, in deterministic order.

    Enumerates reduced row echelon forms: one per subspace, grouped by pivot
    columns. Restricted to fields, where free of rank k means dimension k;
    over general finite rings freeness of a submodule is subtler and is not
    needed here.
    """
    if k == 0:
        return [zero_submodule(r, n)]
    if not is_field(r):
        raise NotAField(f"{r.label} is not a field")
    if k > n:
        return []
    out = []
    nonzero = [c for c in r.elements() if c != r.zero]
    assert nonzero  # fields have 1 != 0
    for pivots in itertools.combinations(range(n), k):
        free_pos = [(i, j) for i in range(k) for j in range(n)
                    if j > pivots[i] and j not in pivots]
        for vals in itertools.product(r.elements(), repeat=len(free_pos)):
            rows = [[r.zero] * n for _ in range(k)]
            for i, p in enumerate(pivots):
                rows[i][p] = r.one
            for (pos, v) in zip(free_pos, vals):
                rows[pos[0]][pos[1]] = v
            gens = [tuple(row) for row in rows]
            out.append(Submodule(r, n, span(r, n, gens)))
    out.sort(key=Submodule.sort_key)
    return out


def enumerate_submodules_brute(r: FinRing, n: int, k: int) -> List[Submodule]:
    """Independent oracle: spans of all k-tuples of vectors, deduplicated.

    Keeps only spans of size |r|^k (free of rank k over a field). Slower than
    the echelon enumeration but shares none of its code path.
    """
    target = r.size ** k
    seen = set()
    out = []
    for gens in itertools.product(all_vecs(r, n), repeat=k):
        s = span(r, n, gens)
        if len(s) == target and s not in seen:
            seen.add(s)
            out.append(Submodule(r, n, s))
    out.sort(key=Submodule.sort_key)
    return out

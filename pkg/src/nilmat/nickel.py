"""Matrix representations from coordinate-function modules.

A presented group acts on functions of its normal-form coordinates by
right translation: (f * g)(h) = f(h g^-1).  The span of the coordinate
projections, the constant function, and whatever the action drags in
is finite dimensional.  The action matrices on a basis of that module
give a faithful rational representation; reordering the basis can make
every generator image integral and unitriangular, which is what the
embedding below looks for.

Action polynomials are recovered by exact interpolation on integer
grids rather than by symbolic composition: evaluate the translated
function on a tensor grid, solve per-axis Vandermonde systems over the
rationals, and confirm the result on off-grid points, doubling the
grid degree until it does.
"""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from functools import lru_cache

from .distortion import GuardError, SubgroupGens, distortion_degree
from .jennings import EmbeddingResult
from .matgroup import (
    RationalSquareMatrix as _RatMat,
    UnitriangularMatrix,
    level_weight,
)
from .presentation import relation_failures

__all__ = [
    "CoordinatePolynomial",
    "FunctionModule",
    "act",
    "function_module",
    "declared_ordering",
    "nickel_embedding",
    "ordering_search",
]


def _mono_key(mono):
    """Graded-lex order on exponent tuples."""
    return (sum(mono), mono)


class CoordinatePolynomial:
    """Polynomial in the coordinates of a group element.

    Terms map exponent tuples to rational coefficients; zero
    coefficients are never stored.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars, terms):
        clean = {}
        for mono, c in terms.items():
            c = Fraction(c)
            if c:
                clean[tuple(mono)] = c
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("CoordinatePolynomial is immutable")

    @classmethod
    def coordinate(cls, nvars, k):
        """The projection onto the k-th coordinate (1-based)."""
        mono = tuple(1 if t == k - 1 else 0 for t in range(nvars))
        return cls(nvars, {mono: 1})

    @classmethod
    def constant(cls, nvars, c=1):
        return cls(nvars, {(0,) * nvars: c})

    @property
    def is_zero(self):
        return not self.terms

    def leading(self):
        """Largest monomial in graded-lex order, or None."""
        if not self.terms:
            return None
        return max(self.terms, key=_mono_key)

    def evaluate(self, point):
        total = Fraction(0)
        for mono, c in self.terms.items():
            v = c
            for x, e in zip(point, mono):
                if e:
                    v *= Fraction(x) ** e
            total += v
        return total

    def combine(self, other, factor):
        """self + factor * other, as a new polynomial."""
        terms = dict(self.terms)
        for mono, c in other.terms.items():
            terms[mono] = terms.get(mono, Fraction(0)) + factor * c
        return CoordinatePolynomial(self.nvars, terms)

    def scaled(self, factor):
        return CoordinatePolynomial(
            self.nvars, {m: c * factor for m, c in self.terms.items()}
        )

    def __eq__(self, other):
        return (
            isinstance(other, CoordinatePolynomial)
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.nvars, tuple(sorted(self.terms.items()))))

    def __repr__(self):
        if not self.terms:
            return "CoordinatePolynomial(0)"
        bits = []
        for mono in sorted(self.terms, key=_mono_key, reverse=True):
            c = self.terms[mono]
            factors = [
                f"t{k + 1}" + (f"^{e}" if e > 1 else "")
                for k, e in enumerate(mono)
                if e
            ]
            bits.append(
                "*".join([str(c)] + factors) if factors else str(c)
            )
        return f"CoordinatePolynomial({' + '.join(bits)})"


@lru_cache(maxsize=None)
def _vandermonde_inverse(degree):
    """Inverse of the Vandermonde matrix on nodes 0..degree."""
    size = degree + 1
    a = [
        [Fraction(x**j) for j in range(size)]
        + [Fraction(1 if c == x else 0) for c in range(size)]
        for x in range(size)
    ]
    for col in range(size):
        piv = next(r for r in range(col, size) if a[r][col])
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [e * inv for e in a[col]]
        for r in range(size):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [e - f * g for e, g in zip(a[r], a[col])]
    return tuple(tuple(row[size:]) for row in a)


def _interpolate(values, nvars, degree):
    """Tensor-grid interpolation: values on {0..degree}^nvars to a
    polynomial, one exact Vandermonde solve per axis."""
    vinv = _vandermonde_inverse(degree)
    table = values
    for axis in range(nvars):
        buckets = {}
        for point, val in table.items():
            rest = point[:axis] + point[axis + 1 :]
            buckets.setdefault(rest, {})[point[axis]] = val
        table = {}
        for rest, per_node in buckets.items():
            for e in range(degree + 1):
                c = Fraction(0)
                for node, val in per_node.items():
                    if val:
                        c += vinv[e][node] * val
                if c:
                    table[rest[:axis] + (e,) + rest[axis:]] = c
    return CoordinatePolynomial(nvars, table)


class FunctionModule:
    """Action-closed module of coordinate functions of a presentation.

    basis holds the functions, labels their display names (coordinate
    projections, the constant, then any forced extras q1, q2, ...),
    and matrices the right-translation action of each generator in
    that basis, rows indexed by source basis element so that matrices
    compose in word order.
    """

    __slots__ = ("presentation", "basis", "labels", "matrices")

    def __init__(self, presentation, basis, labels, matrices):
        object.__setattr__(self, "presentation", presentation)
        object.__setattr__(self, "basis", tuple(basis))
        object.__setattr__(self, "labels", tuple(labels))
        object.__setattr__(self, "matrices", dict(matrices))

    def __setattr__(self, name, value):
        raise AttributeError("FunctionModule is immutable")

    @property
    def dimension(self):
        return len(self.basis)

    def __repr__(self):
        return (
            f"FunctionModule(dim={self.dimension}, "
            f"labels={list(self.labels)})"
        )


class _ModuleBuilder:
    _MAX_DEGREE = 16

    def __init__(self, presentation):
        self.p = presentation
        self.nvars = presentation.M
        self._shift_cache = {}

    def _shifted(self, k, e, point):
        """Coordinates of (element at point) * x_k^(-e)."""
        key = (k, e, point)
        got = self._shift_cache.get(key)
        if got is None:
            step = self.p.power(self.p.generator(k), -e)
            got = self.p.multiply(point, step)
            self._shift_cache[key] = got
        return got

    def act(self, f, k, e):
        """Polynomial for h -> f(h * x_k^(-e)), by interpolation."""
        degree = 2
        while True:
            grid = itertools.product(
                range(degree + 1), repeat=self.nvars
            )
            values = {}
            for point in grid:
                values[point] = f.evaluate(self._shifted(k, e, point))
            poly = _interpolate(values, self.nvars, degree)
            ok = True
            for r in range(3):
                probe = tuple(
                    degree + 1 + r + t for t in range(self.nvars)
                )
                truth = f.evaluate(self._shifted(k, e, probe))
                if poly.evaluate(probe) != truth:
                    ok = False
                    break
            if ok:
                return poly
            degree *= 2
            if degree > self._MAX_DEGREE:
                raise RuntimeError(
                    "translated coordinate function is not polynomial "
                    "within the degree cap"
                )


def act(f, word, presentation):
    """Right translate of a coordinate function by a group element.

    ``word`` is the element's exponent tuple; the result g satisfies
    g(h) = f(h * word^-1) for every h, so acting first by one element
    and then another is the same as acting by their product.
    """
    if f.nvars != presentation.M:
        raise ValueError("function and presentation sizes differ")
    if len(word) != presentation.M:
        raise ValueError("exponent tuple has wrong length")
    builder = _ModuleBuilder(presentation)
    out = f
    for k, e in enumerate(word, start=1):
        if e:
            out = builder.act(out, k, e)
    return out


def function_module(presentation):
    """Close the span of coordinate projections under translation.

    Seeds the basis with t_1..t_M and the constant, then repeatedly
    applies every generator and inverse to every basis function,
    reducing against the basis by graded-lex leading monomials.  A
    nonzero residue joins the basis sign-normalized but not rescaled,
    so forced functions keep their natural denominators.  Action rows
    are recorded as they are computed; entries over basis elements
    discovered later are zero by construction.
    """
    builder = _ModuleBuilder(presentation)
    m = presentation.M
    basis = []
    labels = []
    lead_rows = {}

    def insert(poly, label):
        poly = _reduce(poly)
        if poly.is_zero:
            raise ValueError(f"seed function {label} is dependent")
        lead = poly.leading()
        if poly.terms[lead] < 0:
            poly = poly.scaled(-1)
        lead_rows[lead] = len(basis)
        basis.append(poly)
        labels.append(label)

    def _reduce(poly):
        while not poly.is_zero:
            lead = poly.leading()
            row = lead_rows.get(lead)
            if row is None:
                return poly
            b = basis[row]
            poly = poly.combine(b, -poly.terms[lead] / b.terms[lead])
        return poly

    def _express(poly):
        """Coefficients of poly over the current basis; None entries
        are impossible once the module is closed."""
        coeffs = {}
        while not poly.is_zero:
            lead = poly.leading()
            row = lead_rows.get(lead)
            if row is None:
                raise RuntimeError("module closure produced a gap")
            b = basis[row]
            c = poly.terms[lead] / b.terms[lead]
            coeffs[row] = coeffs.get(row, Fraction(0)) + c
            poly = poly.combine(b, -c)
        return coeffs

    for k in range(1, m + 1):
        insert(
            CoordinatePolynomial.coordinate(m, k), _coordinate_label(presentation, k)
        )
    insert(CoordinatePolynomial.constant(m), "1")

    rows = {}  # (source index, generator, sign) -> coefficient dict
    extras = 0
    idx = 0
    while idx < len(basis):
        f = basis[idx]
        for k in range(1, m + 1):
            for e in (1, -1):
                moved = builder.act(f, k, e)
                residue = _reduce(moved)
                if not residue.is_zero:
                    lead = residue.leading()
                    if residue.terms[lead] < 0:
                        residue = residue.scaled(-1)
                    extras += 1
                    lead_rows[lead] = len(basis)
                    basis.append(residue)
                    labels.append(f"q{extras}")
                rows[(idx, k, e)] = _express(moved)
        idx += 1

    dim = len(basis)
    matrices = {}
    for k in range(1, m + 1):
        mat = []
        for i in range(dim):
            coeffs = rows.get((i, k, 1))
            if coeffs is None:
                # basis element appeared after the sweep reached it;
                # cannot happen because the sweep covers every index
                raise RuntimeError("module closure missed a basis row")
            mat.append(
                tuple(coeffs.get(j, Fraction(0)) for j in range(dim))
            )
        matrices[k] = tuple(mat)
    return FunctionModule(presentation, basis, labels, matrices)


def _coordinate_label(presentation, k):
    pos = presentation.positions
    if pos is not None:
        i, j = pos[k - 1]
        if i <= 9 and j <= 9:
            return f"t{i}{j}"
    return f"t{k}"


def declared_ordering(module):
    """Canonical basis order when one exists: coordinate projections
    sorted by their realization position, column before row, then the
    constant.  None when the module has forced extras or the
    presentation carries no positions."""
    p = module.presentation
    if p.positions is None:
        return None
    if module.dimension != p.M + 1:
        return None
    order = sorted(
        range(p.M), key=lambda k: (p.positions[k][1], p.positions[k][0])
    )
    return tuple(module.labels[k] for k in order) + ("1",)


def _permuted(matrix, perm):
    return tuple(
        tuple(matrix[perm[r]][perm[c]] for c in range(len(perm)))
        for r in range(len(perm))
    )


def _try_unitriangular(rows):
    """UnitriangularMatrix when the rows are integral, unit diagonal
    and strictly upper; otherwise None."""
    n = len(rows)
    out = []
    for i, row in enumerate(rows):
        if row[i] != 1:
            return None
        introw = []
        for j, e in enumerate(row):
            if j < i and e:
                return None
            if e.denominator != 1:
                return None
            introw.append(int(e))
        out.append(tuple(introw))
    return UnitriangularMatrix(tuple(out))


def nickel_embedding(presentation, ordering=None):
    """Representation of the presentation on its function module.

    ordering is a permutation of the module's basis labels; when
    omitted the declared ordering is used if the module has one.
    Generator images are integer unitriangular matrices whenever the
    chosen order achieves that, rational matrices otherwise, and the
    defining relations are re-checked on the images either way.
    """
    module = function_module(presentation)
    if ordering is None:
        ordering = declared_ordering(module)
        if ordering is None:
            raise ValueError(
                "module has no declared ordering; pass one explicitly"
            )
    ordering = tuple(ordering)
    if sorted(ordering) != sorted(module.labels):
        raise ValueError("ordering is not a permutation of basis labels")
    index = {lab: i for i, lab in enumerate(module.labels)}
    perm = [index[lab] for lab in ordering]
    p = module.presentation
    permuted = [
        _permuted(module.matrices[k], perm) for k in range(1, p.M + 1)
    ]
    unis = [_try_unitriangular(rows) for rows in permuted]
    unitriangular = all(u is not None for u in unis)
    if unitriangular:
        gens = tuple(unis)
        images = {k: _RatMat(rows) for k, rows in enumerate(permuted, 1)}
    else:
        gens = tuple(_RatMat(rows) for rows in permuted)
        images = {k: g for k, g in enumerate(gens, 1)}

    def matrix_of(coords):
        out = _RatMat.identity(module.dimension)
        for k, e in enumerate(coords, start=1):
            if e:
                out = out * images[k] ** e
        return out

    relators_ok = not relation_failures(p, matrix_of)
    return EmbeddingResult(
        d=module.dimension,
        ordering=ordering,
        generators=gens,
        unitriangular=unitriangular,
        basis=module,
        relators_ok=relators_ok,
    )


def ordering_search(module, mode="exhaustive", compute_degree=True):
    """Scan basis orderings of the module for unitriangular images.

    Returns one record per inspected ordering: its labels, whether all
    generator images came out integral unitriangular, and if so the
    ambient depth of each generator image plus (optionally) the exact
    distortion degree of the image subgroup.  mode "report-first"
    stops at the first unitriangular hit.  The scan is factorial in
    the dimension, hence the hard cap; NILMAT_THREADS splits the
    permutation list across worker threads, results merged back in
    enumeration order.
    """
    if mode not in ("exhaustive", "report-first"):
        raise ValueError(f"unknown search mode {mode!r}")
    dim = module.dimension
    if dim > 8:
        raise GuardError(
            "ordering search is capped at module dimension 8"
        )
    labels = module.labels
    p = module.presentation
    base = [module.matrices[k] for k in range(1, p.M + 1)]

    def evaluate(perm):
        permuted = [_permuted(mat, perm) for mat in base]
        unis = [_try_unitriangular(rows) for rows in permuted]
        record = {
            "ordering": tuple(labels[i] for i in perm),
            "unitriangular": all(u is not None for u in unis),
            "weights": None,
            "degree": None,
        }
        if record["unitriangular"]:
            record["weights"] = tuple(level_weight(u) for u in unis)
            if compute_degree:
                sub = SubgroupGens(dim, unis)
                record["degree"] = distortion_degree(sub).degree
        return record

    perms = list(itertools.permutations(range(dim)))
    if mode == "report-first":
        for perm in perms:
            record = evaluate(perm)
            if record["unitriangular"]:
                return [record]
        return []
    threads = int(os.environ.get("NILMAT_THREADS", "1") or "1")
    if threads > 1:
        chunks = [perms[i::threads] for i in range(threads)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda c: [evaluate(p_) for p_ in c], chunks))
        merged = [None] * len(perms)
        for offset, part in enumerate(parts):
            for t, record in enumerate(part):
                merged[offset + t * threads] = record
        return merged
    return [evaluate(perm) for perm in perms]

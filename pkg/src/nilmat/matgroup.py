"""Exact arithmetic for integer unitriangular matrix groups.

Matrices are immutable (tuples of tuples) so they can serve as dict keys
and set members.  All arithmetic is exact: ints for group elements,
fractions for matrix logarithms.  Positions are 1-based pairs (i, j)
with i < j, matching the usual notation s_ij for an elementary matrix
with a single off-diagonal entry.
"""

from __future__ import annotations

from fractions import Fraction

__all__ = [
    "UnitriangularMatrix",
    "RationalNilpotentMatrix",
    "RationalSquareMatrix",
    "PositionBasis",
    "identity",
    "elementary",
    "commutator",
    "level_weight",
    "in_level_subgroup",
    "malcev_coordinates",
    "from_coordinates",
    "log_unipotent",
    "exp_nilpotent",
    "matrix_to_json",
    "matrix_from_json",
]


class UnitriangularMatrix:
    """Upper triangular integer matrix with unit diagonal.

    Immutable and hashable.  Supports ``*``, ``**`` (any integer
    exponent), ``inverse()`` and 1-based ``entry(i, j)`` access.
    """

    __slots__ = ("n", "rows")

    def __init__(self, rows):
        rows = tuple(tuple(r) for r in rows)
        n = len(rows)
        for i, row in enumerate(rows):
            if len(row) != n:
                raise ValueError("matrix is not square")
            if row[i] != 1:
                raise ValueError("diagonal entry is not 1")
            for j in range(i):
                if row[j] != 0:
                    raise ValueError("nonzero entry below the diagonal")
            for j in range(i + 1, n):
                if not isinstance(row[j], int):
                    raise ValueError("matrix entries must be integers")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "rows", rows)

    def __setattr__(self, name, value):
        raise AttributeError("UnitriangularMatrix is immutable")

    def entry(self, i, j):
        """Entry at 1-based position (i, j)."""
        return self.rows[i - 1][j - 1]

    def __eq__(self, other):
        return (
            isinstance(other, UnitriangularMatrix) and self.rows == other.rows
        )

    def __hash__(self):
        return hash(self.rows)

    def __mul__(self, other):
        if not isinstance(other, UnitriangularMatrix):
            return NotImplemented
        n = self.n
        if other.n != n:
            raise ValueError("size mismatch")
        a = self.rows
        b = other.rows
        out = []
        for i in range(n):
            ai = a[i]
            row = list(b[i])
            for k in range(i + 1, n):
                c = ai[k]
                if c:
                    bk = b[k]
                    for j in range(k, n):
                        row[j] += c * bk[j]
            out.append(tuple(row))
        return _wrap(n, tuple(out))

    def inverse(self):
        """Group inverse, by back substitution (exact, one O(n^3) pass)."""
        n = self.n
        a = self.rows
        # x[i][j] = -sum_{i<k<=j} a[i][k] x[k][j], filled bottom-up
        x = [[0] * n for _ in range(n)]
        for i in range(n - 1, -1, -1):
            x[i][i] = 1
            ai = a[i]
            for j in range(i + 1, n):
                s = 0
                for k in range(i + 1, j + 1):
                    c = ai[k]
                    if c:
                        s += c * x[k][j]
                x[i][j] = -s
        return _wrap(n, tuple(tuple(r) for r in x))

    def __pow__(self, e):
        if not isinstance(e, int):
            return NotImplemented
        base = self if e >= 0 else self.inverse()
        e = abs(e)
        result = identity(self.n)
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    @property
    def is_identity(self):
        return self == identity(self.n)

    def __repr__(self):
        return f"UnitriangularMatrix({list(map(list, self.rows))!r})"


def _wrap(n, rows):
    """Build a matrix from known-good rows, skipping validation."""
    m = object.__new__(UnitriangularMatrix)
    object.__setattr__(m, "n", n)
    object.__setattr__(m, "rows", rows)
    return m


_IDENTITY_CACHE = {}


def identity(n):
    """The n x n identity."""
    m = _IDENTITY_CACHE.get(n)
    if m is None:
        rows = tuple(
            tuple(1 if i == j else 0 for j in range(n)) for i in range(n)
        )
        m = _IDENTITY_CACHE[n] = _wrap(n, rows)
    return m


def elementary(n, i, j, alpha=1):
    """Identity plus alpha at 1-based position (i, j), i < j."""
    if not (1 <= i < j <= n):
        raise ValueError(f"position ({i}, {j}) is not above the diagonal")
    rows = [[1 if r == c else 0 for c in range(n)] for r in range(n)]
    rows[i - 1][j - 1] = alpha
    return UnitriangularMatrix(rows)


def commutator(a, b):
    """a^-1 b^-1 a b."""
    return a.inverse() * b.inverse() * a * b


def level_weight(m):
    """Smallest j - i over nonzero entries; the depth of m in the
    lower central series of the full unitriangular group.

    Raises ValueError for the identity, whose weight is unbounded.
    """
    n = m.n
    for lvl in range(1, n):
        for i in range(n - lvl):
            if m.rows[i][i + lvl]:
                return lvl
    raise ValueError("identity matrix has no finite weight")


def in_level_subgroup(m, l):
    """True when every entry strictly closer to the diagonal than
    level l vanishes, i.e. m sits at depth >= l."""
    n = m.n
    for lvl in range(1, min(l, n)):
        for i in range(n - lvl):
            if m.rows[i][i + lvl]:
                return False
    return True


class PositionBasis:
    """Ordering of the strictly-upper positions of an n x n matrix.

    Two flavors:

    * ``lcs-standard``: by level (j - i ascending), then by row.  Every
      tail of this order spans the subgroup of matrices at that depth.
    * ``scheme``: by column ascending, within a column by row
      descending.  Position weights are not monotone along this order
      once n >= 4.

    Both flavors are peel-compatible: peeling exponents greedily in
    basis order (see malcev_coordinates) terminates at the identity.
    """

    FLAVORS = ("lcs-standard", "scheme")

    __slots__ = ("n", "flavor", "positions", "weights", "index")

    def __init__(self, n, flavor="lcs-standard"):
        if flavor not in self.FLAVORS:
            raise ValueError(f"unknown flavor {flavor!r}")
        all_pos = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
        if flavor == "lcs-standard":
            all_pos.sort(key=lambda p: (p[1] - p[0], p[0]))
        else:
            all_pos.sort(key=lambda p: (p[1], -p[0]))
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "flavor", flavor)
        object.__setattr__(self, "positions", tuple(all_pos))
        object.__setattr__(
            self, "weights", tuple(j - i for i, j in all_pos)
        )
        object.__setattr__(
            self, "index", {p: k for k, p in enumerate(all_pos)}
        )

    def __setattr__(self, name, value):
        raise AttributeError("PositionBasis is immutable")

    def __len__(self):
        return len(self.positions)

    def __repr__(self):
        return f"PositionBasis(n={self.n}, flavor={self.flavor!r})"


def malcev_coordinates(m, basis):
    """Exponent tuple of m along the basis order.

    Greedy peel: the k-th coordinate is the current entry at the k-th
    basis position; multiply by the inverse elementary on the left and
    continue.  Valid for both basis flavors because each suffix of the
    order generates the subgroup containing the peeled remainder.
    """
    if m.n != basis.n:
        raise ValueError("size mismatch")
    n = m.n
    # Left-multiplying by the inverse elementary is the row operation
    # row_i -= a * row_j, touching columns >= j only.
    work = [list(row) for row in m.rows]
    coords = []
    for i, j in basis.positions:
        a = work[i - 1][j - 1]
        coords.append(a)
        if a:
            ri = work[i - 1]
            rj = work[j - 1]
            for c in range(j - 1, n):
                ri[c] -= a * rj[c]
    for i in range(n):
        wi = work[i]
        for j in range(i + 1, n):
            if wi[j]:
                raise ValueError(
                    "peel did not terminate; basis order is invalid"
                )
    return tuple(coords)


def from_coordinates(coords, basis):
    """Product of elementaries along the basis order; inverse of
    malcev_coordinates."""
    if len(coords) != len(basis.positions):
        raise ValueError("coordinate length mismatch")
    n = basis.n
    out = identity(n)
    for (i, j), a in zip(basis.positions, coords):
        if a:
            out = out * elementary(n, i, j, a)
    return out


class RationalNilpotentMatrix:
    """Strictly upper triangular matrix over the rationals.

    The Lie-algebra side of the package: closed under +, -, scalar
    multiplication, matrix product and bracket().
    """

    __slots__ = ("n", "rows")

    def __init__(self, rows):
        rows = tuple(
            tuple(Fraction(e) for e in row) for row in rows
        )
        n = len(rows)
        for i, row in enumerate(rows):
            if len(row) != n:
                raise ValueError("matrix is not square")
            for j in range(i + 1):
                if row[j] != 0:
                    raise ValueError("entry on or below the diagonal")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "rows", rows)

    def __setattr__(self, name, value):
        raise AttributeError("RationalNilpotentMatrix is immutable")

    @classmethod
    def zero(cls, n):
        return cls(tuple(tuple(0 for _ in range(n)) for _ in range(n)))

    def __eq__(self, other):
        return (
            isinstance(other, RationalNilpotentMatrix)
            and self.rows == other.rows
        )

    def __hash__(self):
        return hash(self.rows)

    def __add__(self, other):
        return RationalNilpotentMatrix(
            tuple(
                tuple(a + b for a, b in zip(ra, rb))
                for ra, rb in zip(self.rows, other.rows)
            )
        )

    def __sub__(self, other):
        return RationalNilpotentMatrix(
            tuple(
                tuple(a - b for a, b in zip(ra, rb))
                for ra, rb in zip(self.rows, other.rows)
            )
        )

    def scale(self, c):
        c = Fraction(c)
        return RationalNilpotentMatrix(
            tuple(tuple(c * a for a in row) for row in self.rows)
        )

    def __mul__(self, other):
        if not isinstance(other, RationalNilpotentMatrix):
            return NotImplemented
        n = self.n
        a = self.rows
        b = other.rows
        out = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            ai = a[i]
            for k in range(i + 1, n):
                c = ai[k]
                if c:
                    bk = b[k]
                    oi = out[i]
                    for j in range(k + 1, n):
                        if bk[j]:
                            oi[j] += c * bk[j]
        return RationalNilpotentMatrix(tuple(tuple(r) for r in out))

    def bracket(self, other):
        """Lie bracket self*other - other*self."""
        return self * other - other * self

    @property
    def is_zero(self):
        return all(not e for row in self.rows for e in row)

    def upper_vector(self):
        """Strictly-upper entries flattened row-major, for span work."""
        n = self.n
        return tuple(
            self.rows[i][j] for i in range(n) for j in range(i + 1, n)
        )

    def __repr__(self):
        return f"RationalNilpotentMatrix({list(map(list, self.rows))!r})"


def log_unipotent(m):
    """Matrix logarithm of a unitriangular matrix.

    Finite alternating series in N = m - I; exact over the rationals.
    """
    n = m.n
    nil = [
        [m.rows[i][j] if j > i else 0 for j in range(n)] for i in range(n)
    ]
    # Accumulate powers of N with integer arithmetic; divide once at
    # the end.  num/den hold the running sum of (-1)^(k+1) N^k / k over
    # a common denominator.
    den = 1
    num = [[0] * n for _ in range(n)]
    term = nil
    k = 1
    while any(e for row in term for e in row):
        sign = 1 if k % 2 else -1
        for i in range(n):
            ti = term[i]
            ni = num[i]
            for j in range(i + 1, n):
                ni[j] = ni[j] * k + sign * den * ti[j]
        den *= k
        nxt = [[0] * n for _ in range(n)]
        for i in range(n):
            ti = term[i]
            for p in range(i + 1, n):
                c = ti[p]
                if c:
                    np_ = nil[p]
                    xi = nxt[i]
                    for j in range(p + 1, n):
                        if np_[j]:
                            xi[j] += c * np_[j]
        term = nxt
        k += 1
    return RationalNilpotentMatrix(
        tuple(
            tuple(Fraction(num[i][j], den) for j in range(n))
            for i in range(n)
        )
    )


def exp_nilpotent(x):
    """Matrix exponential of a strictly upper triangular matrix.

    Finite series; raises ValueError if the result is not integral,
    since the group side of this package is over the integers.
    """
    n = x.n
    acc = [
        [Fraction(1) if i == j else Fraction(0) for j in range(n)]
        for i in range(n)
    ]
    term = x
    k = 1
    fact = 1
    while not term.is_zero:
        for i in range(n):
            for j in range(i + 1, n):
                acc[i][j] += term.rows[i][j] / fact
        term = term * x
        k += 1
        fact *= k
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            e = acc[i][j]
            if e.denominator != 1:
                raise ValueError("exponential is not an integer matrix")
            row.append(int(e))
        rows.append(tuple(row))
    return UnitriangularMatrix(tuple(rows))


class RationalSquareMatrix:
    """Square rational matrix with group arithmetic only.

    Representation images that fail the unitriangular shape still need
    multiplication, inversion, and powers for relator checks; this is
    the minimal carrier for that.
    """

    __slots__ = ("n", "rows")

    def __init__(self, rows):
        rows = tuple(tuple(Fraction(e) for e in row) for row in rows)
        object.__setattr__(self, "n", len(rows))
        object.__setattr__(self, "rows", rows)

    def __setattr__(self, name, value):
        raise AttributeError("RationalSquareMatrix is immutable")

    @classmethod
    def identity(cls, n):
        return cls(
            tuple(
                tuple(1 if i == j else 0 for j in range(n))
                for i in range(n)
            )
        )

    def __eq__(self, other):
        return (
            isinstance(other, RationalSquareMatrix)
            and self.rows == other.rows
        )

    def __hash__(self):
        return hash(self.rows)

    def __mul__(self, other):
        if not isinstance(other, RationalSquareMatrix):
            return NotImplemented
        n = self.n
        b = other.rows
        out = []
        for i in range(n):
            ai = self.rows[i]
            row = [Fraction(0)] * n
            for k in range(n):
                c = ai[k]
                if c:
                    bk = b[k]
                    for j in range(n):
                        if bk[j]:
                            row[j] += c * bk[j]
            out.append(tuple(row))
        return RationalSquareMatrix(out)

    def inverse(self):
        n = self.n
        a = [
            list(row) + [Fraction(1 if i == j else 0) for j in range(n)]
            for i, row in enumerate(self.rows)
        ]
        for col in range(n):
            piv = next(
                (r for r in range(col, n) if a[r][col]), None
            )
            if piv is None:
                raise ValueError("matrix is singular")
            a[col], a[piv] = a[piv], a[col]
            inv = 1 / a[col][col]
            a[col] = [e * inv for e in a[col]]
            for r in range(n):
                if r != col and a[r][col]:
                    f = a[r][col]
                    a[r] = [e - f * g for e, g in zip(a[r], a[col])]
        return RationalSquareMatrix(tuple(tuple(row[n:]) for row in a))

    def __pow__(self, e):
        if not isinstance(e, int):
            return NotImplemented
        base = self if e >= 0 else self.inverse()
        e = abs(e)
        out = RationalSquareMatrix.identity(self.n)
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __repr__(self):
        return f"RationalSquareMatrix({list(map(list, self.rows))!r})"


def matrix_to_json(m):
    """Wire form: {"n": ..., "rows": [[decimal strings]]}.

    Entries are strings so arbitrarily large integers survive any JSON
    reader.
    """
    return {
        "n": m.n,
        "rows": [[str(e) for e in row] for row in m.rows],
    }


def matrix_from_json(obj):
    """Inverse of matrix_to_json.  Raises ValueError on malformed input."""
    try:
        n = obj["n"]
        rows = obj["rows"]
    except (TypeError, KeyError) as exc:
        raise ValueError(f"malformed matrix object: {exc}") from exc
    if not isinstance(n, int) or len(rows) != n:
        raise ValueError("matrix row count does not match n")
    parsed = []
    for row in rows:
        if len(row) != n:
            raise ValueError("matrix row length does not match n")
        parsed.append(tuple(int(e) for e in row))
    return UnitriangularMatrix(tuple(parsed))

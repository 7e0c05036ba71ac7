"""Subgroup distortion in integer unitriangular groups.

Distortion compares word length in a finitely generated subgroup with
word length in the ambient group.  For unitriangular groups the
asymptotic comparison is polynomial with a rational exponent, and that
exponent is computed exactly here: ambient depth is level_weight, and
depth inside the subgroup is the position of an element in the
subgroup's isolated lower central series, decided through rational
Lie-algebra spans of logarithms.

Everything is exact.  Searches that could blow up (brute-force word
enumeration, metric balls) take explicit bounds and raise GuardError
rather than start an open-ended computation.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .matgroup import (
    PositionBasis,
    RationalNilpotentMatrix,
    UnitriangularMatrix,
    commutator,
    elementary,
    identity,
    level_weight,
    log_unipotent,
    matrix_from_json,
    matrix_to_json,
)

__all__ = [
    "GuardError",
    "SubgroupGens",
    "StandardizedSequence",
    "standardize",
    "member",
    "member_certificate",
    "intersect_level_subgroup",
    "lower_central_gens",
    "LieAlgebraSpan",
    "lie_span",
    "subgroup_depth",
    "DistortionReport",
    "Stratum",
    "distortion_degree",
    "distorted_subgroup",
    "brute_force_degree",
    "depth_by_powers",
    "ball",
    "empirical_distortion",
    "subgroup_to_json",
    "subgroup_from_json",
    "report_to_json",
]


class GuardError(RuntimeError):
    """A search was asked to exceed its hard instance-size bound."""


def _xgcd(a, b):
    """(g, u, v) with u*a + v*b == g == gcd(a, b), g > 0 for a, b not
    both zero."""
    old_r, r = a, b
    old_u, u = 1, 0
    old_v, v = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_u, u = u, old_u - q * u
        old_v, v = v, old_v - q * v
    if old_r < 0:
        old_r, old_u, old_v = -old_r, -old_u, -old_v
    return old_r, old_u, old_v


class SubgroupGens:
    """A finitely generated subgroup, given by matrix generators.

    Immutable and hashable so computed invariants can be cached on it.
    """

    __slots__ = ("n", "generators")

    def __init__(self, n, generators):
        generators = tuple(generators)
        for g in generators:
            if not isinstance(g, UnitriangularMatrix):
                raise ValueError("generators must be unitriangular matrices")
            if g.n != n:
                raise ValueError("generator size does not match ambient size")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "generators", generators)

    def __setattr__(self, name, value):
        raise AttributeError("SubgroupGens is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, SubgroupGens)
            and self.n == other.n
            and self.generators == other.generators
        )

    def __hash__(self):
        return hash((self.n, self.generators))

    def __repr__(self):
        return f"SubgroupGens(n={self.n}, {len(self.generators)} generators)"


def subgroup_to_json(sub):
    return {
        "N": sub.n,
        "generators": [matrix_to_json(g) for g in sub.generators],
    }


def subgroup_from_json(obj):
    try:
        n = obj["N"]
        gens = obj["generators"]
    except (TypeError, KeyError) as exc:
        raise ValueError(f"malformed subgroup object: {exc}") from exc
    return SubgroupGens(n, [matrix_from_json(g) for g in gens])


class StandardizedSequence:
    """Generators of a subgroup in standard form.

    Slots are ordered by the position (in the level-major basis) of
    their first nonzero entry; lead positions are strictly increasing
    and lead coefficients positive.  After conjugation closure the
    sequence is polycyclic: every element of the subgroup is a product
    of slot powers in slot order, which makes membership decidable by
    a greedy peel with divisibility checks.
    """

    __slots__ = ("n", "basis", "slots", "leads", "coeffs")

    def __init__(self, n, basis, slots, leads, coeffs):
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "slots", tuple(slots))
        object.__setattr__(self, "leads", tuple(leads))
        object.__setattr__(self, "coeffs", tuple(coeffs))

    def __setattr__(self, name, value):
        raise AttributeError("StandardizedSequence is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, StandardizedSequence)
            and self.n == other.n
            and self.slots == other.slots
        )

    def __hash__(self):
        return hash((self.n, self.slots))

    @property
    def levels(self):
        """Ambient depth of each slot's lead position."""
        return tuple(self.basis.weights[k] for k in self.leads)

    def __len__(self):
        return len(self.slots)

    def __repr__(self):
        return (
            f"StandardizedSequence(n={self.n}, leads="
            f"{[self.basis.positions[k] for k in self.leads]})"
        )


def _lead_index(m, basis):
    """Index of the first basis position where m is nonzero, or None
    for the identity."""
    rows = m.rows
    for k, (i, j) in enumerate(basis.positions):
        if rows[i - 1][j - 1]:
            return k
    return None


class _Sifter:
    """Mutable workspace for building a standardized sequence."""

    def __init__(self, n):
        self.n = n
        self.basis = PositionBasis(n)
        self.slots = {}
        self.queue = []

    def sift(self, m):
        basis = self.basis
        while True:
            k = _lead_index(m, basis)
            if k is None:
                return
            i, j = basis.positions[k]
            a = m.rows[i - 1][j - 1]
            g = self.slots.get(k)
            if g is None:
                self.slots[k] = m if a > 0 else m.inverse()
                return
            c = g.rows[i - 1][j - 1]
            if a % c:
                d, u, v = _xgcd(c, a)
                h = g**u * m**v
                if h.rows[i - 1][j - 1] < 0:
                    h = h.inverse()
                self.slots[k] = h
                self.queue.append(g)
                c = d
            g = self.slots[k]
            m = g ** (-(a // c)) * m

    def drain(self):
        while self.queue:
            self.sift(self.queue.pop())


@lru_cache(maxsize=None)
def standardize(sub):
    """Standardized polycyclic sequence for the subgroup.

    Sifts the generators into lead-indexed slots, then closes under
    conjugation between slots until a fixpoint, so that every slot
    conjugate is again a product of later-or-equal slots.  Termination
    is certain (slots only gain positions or shrink lead coefficients)
    but a generous round cap guards against implementation bugs.
    """
    sifter = _Sifter(sub.n)
    for g in sub.generators:
        sifter.sift(g)
    sifter.drain()
    cap = len(sifter.basis) ** 2 + 4
    for _ in range(cap):
        snapshot = dict(sifter.slots)
        for ka in sorted(snapshot):
            a = sifter.slots.get(ka)
            if a is None:
                continue
            for kb in sorted(snapshot):
                if kb == ka:
                    continue
                b = sifter.slots.get(kb)
                if b is None:
                    continue
                ai = a.inverse()
                sifter.sift(ai * b * a)
                sifter.drain()
                b = sifter.slots.get(kb)
                if b is None:
                    continue
                sifter.sift(a * b * ai)
                sifter.drain()
        if sifter.slots == snapshot:
            break
    else:
        raise RuntimeError("conjugation closure did not stabilize")
    leads = sorted(sifter.slots)
    slots = [sifter.slots[k] for k in leads]
    basis = sifter.basis
    coeffs = [
        s.rows[basis.positions[k][0] - 1][basis.positions[k][1] - 1]
        for k, s in zip(leads, slots)
    ]
    return StandardizedSequence(sub.n, basis, slots, leads, coeffs)


def _as_sequence(sub):
    if isinstance(sub, StandardizedSequence):
        return sub
    if isinstance(sub, SubgroupGens):
        return standardize(sub)
    raise TypeError("expected SubgroupGens or StandardizedSequence")


def member_certificate(h, sub):
    """Exponent tuple e with h == prod(slot_i ** e_i), or None.

    The greedy peel is complete thanks to the closure performed by
    standardize: a nonmember fails either a divisibility check or by
    leaving a nonzero residue.
    """
    seq = _as_sequence(sub)
    if h.n != seq.n:
        raise ValueError("size mismatch")
    basis = seq.basis
    exps = []
    cur = h
    for k, slot, c in zip(seq.leads, seq.slots, seq.coeffs):
        lead = _lead_index(cur, basis)
        if lead is None:
            exps.extend([0] * (len(seq) - len(exps)))
            return tuple(exps)
        if lead < k:
            return None
        i, j = basis.positions[k]
        a = cur.rows[i - 1][j - 1]
        if a % c:
            return None
        e = a // c
        exps.append(e)
        if e:
            cur = slot ** (-e) * cur
    if _lead_index(cur, basis) is not None:
        return None
    return tuple(exps)


def member(h, sub):
    """True when h lies in the subgroup."""
    return member_certificate(h, sub) is not None


def intersect_level_subgroup(sub, l):
    """Generators of the intersection with the ambient subgroup of
    matrices at depth >= l.

    In the level-major slot order this intersection is generated by
    the tail of slots whose lead depth is at least l.
    """
    seq = _as_sequence(sub)
    gens = [
        s for s, lvl in zip(seq.slots, seq.levels) if lvl >= l
    ]
    return SubgroupGens(seq.n, gens)


@lru_cache(maxsize=None)
def _bracket_layers(seq):
    """Layers of left-normed commutator values in the generators.

    Layer w holds the values of weight-(w+1) left-normed brackets of
    the slots; layer 0 is the slots themselves.  Ambient depth grows
    with each bracket, so the chain stops before reaching the matrix
    size.
    """
    layers = []
    current = []
    seen = set()
    for s in seq.slots:
        if not s.is_identity and s not in seen:
            seen.add(s)
            current.append(s)
    while current:
        layers.append(tuple(current))
        if len(layers) >= seq.n:
            break
        nxt = []
        seen = set()
        for x in current:
            for g in seq.slots:
                c = commutator(x, g)
                if not c.is_identity and c not in seen:
                    seen.add(c)
                    nxt.append(c)
        current = nxt
    return tuple(layers)


def lower_central_gens(sub, k):
    """Generators of the k-th lower central subgroup.

    The k-th term is generated by all left-normed commutators of
    weight at least k in any generating set.
    """
    if k < 1:
        raise ValueError("lower central series starts at k = 1")
    seq = _as_sequence(sub)
    layers = _bracket_layers(seq)
    gens = []
    for layer in layers[k - 1 :]:
        gens.extend(layer)
    return SubgroupGens(seq.n, gens)


class LieAlgebraSpan:
    """Rational span of nilpotent matrices, closed under the bracket.

    Vectors are kept in echelon form over the strictly-upper entries,
    so containment is a single reduction pass.
    """

    def __init__(self, n):
        self.n = n
        self._rows = []  # (pivot index, coefficient vector) in echelon form
        self._mats = []

    def _reduce(self, vec):
        vec = list(vec)
        for pivot, row in self._rows:
            c = vec[pivot]
            if c:
                f = c / row[pivot]
                for t in range(pivot, len(vec)):
                    if row[t]:
                        vec[t] -= f * row[t]
        return vec

    def _insert(self, mat):
        vec = self._reduce(mat.upper_vector())
        for pivot, e in enumerate(vec):
            if e:
                self._rows.append((pivot, vec))
                self._rows.sort(key=lambda r: r[0])
                self._mats.append(mat)
                return True
        return False

    def contains(self, mat):
        vec = self._reduce(mat.upper_vector())
        return not any(vec)

    def extend(self, mats):
        """Add matrices and re-close under brackets."""
        queue = list(mats)
        while queue:
            mat = queue.pop()
            before = len(self._mats)
            if self._insert(mat):
                new = self._mats[-1]
                for old in self._mats[:before]:
                    br = new.bracket(old)
                    if not br.is_zero:
                        queue.append(br)

    @property
    def dimension(self):
        return len(self._rows)


def lie_span(mats, n=None):
    """Smallest bracket-closed rational span containing the matrices.

    Accepts group elements (their logarithms are taken) or nilpotent
    rational matrices.
    """
    mats = list(mats)
    if n is None:
        if not mats:
            raise ValueError("cannot infer size from an empty list")
        n = mats[0].n
    span = LieAlgebraSpan(n)
    span.extend(
        log_unipotent(m) if isinstance(m, UnitriangularMatrix) else m
        for m in mats
    )
    return span


@lru_cache(maxsize=None)
def _depth_span(seq, k):
    """Lie span of the k-th lower central subgroup of the sequence."""
    gens = lower_central_gens(seq, k)
    span = LieAlgebraSpan(seq.n)
    span.extend(log_unipotent(g) for g in gens.generators)
    return span


def subgroup_depth(h, sub):
    """Depth of h in the subgroup's isolated lower central series.

    The largest k such that some positive power of h lies in the k-th
    lower central subgroup; equivalently log(h) lies in the rational
    Lie algebra spanned by that subgroup.  Raises ValueError for the
    identity (unbounded) and for nonmembers.
    """
    seq = _as_sequence(sub)
    if h.is_identity:
        raise ValueError("identity has unbounded depth")
    if member_certificate(h, seq) is None:
        raise ValueError("element is not a member of the subgroup")
    logh = log_unipotent(h)
    k = 1
    while True:
        nxt = _depth_span(seq, k + 1)
        if nxt.dimension and nxt.contains(logh):
            k += 1
        else:
            return k


class Stratum:
    """One depth stratum of a standardized sequence: ambient depth m,
    subgroup depth t of the shallowest slot at that depth, and the
    slot witnessing t."""

    __slots__ = ("m", "t", "witness")

    def __init__(self, m, t, witness):
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "witness", witness)

    def __setattr__(self, name, value):
        raise AttributeError("Stratum is immutable")

    def __repr__(self):
        return f"Stratum(m={self.m}, t={self.t})"


class DistortionReport:
    """Exact distortion degree with its witness and strata."""

    __slots__ = ("degree", "witness", "strata")

    def __init__(self, degree, witness, strata):
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "witness", witness)
        object.__setattr__(self, "strata", tuple(strata))

    def __setattr__(self, name, value):
        raise AttributeError("DistortionReport is immutable")

    def __repr__(self):
        return f"DistortionReport(degree={self.degree})"


def report_to_json(report):
    return {
        "d_H": str(report.degree),
        "witness": matrix_to_json(report.witness),
        "strata": [
            {
                "m": s.m,
                "t": s.t,
                "witness": matrix_to_json(s.witness),
            }
            for s in report.strata
        ],
    }


def distortion_degree(sub):
    """Exact distortion degree of the subgroup in its ambient group.

    Walks depth levels from the deepest slot lead downward.  Each time
    the set of slots at or below the current depth grows, a stratum is
    recorded: its ambient depth m, and the smallest subgroup depth t
    among those slots.  The degree is the largest m/t; elements beyond
    the witness slot can only tie this ratio, never beat it, because
    both depths are monotone along products within a stratum.
    """
    seq = _as_sequence(sub)
    if not seq.slots:
        raise ValueError("subgroup is trivial; distortion is undefined")
    levels = seq.levels
    depths = [subgroup_depth(s, seq) for s in seq.slots]
    strata = []
    prev_size = 0
    for m in range(max(levels), 0, -1):
        slice_ix = [i for i, lvl in enumerate(levels) if lvl >= m]
        if len(slice_ix) == prev_size:
            continue
        prev_size = len(slice_ix)
        t = min(depths[i] for i in slice_ix)
        wit = next(i for i in slice_ix if depths[i] == t)
        strata.append(Stratum(m, t, seq.slots[wit]))
    best = max(strata, key=lambda s: Fraction(s.m, s.t))
    return DistortionReport(
        Fraction(best.m, best.t), best.witness, strata
    )


def distorted_subgroup(p, q):
    """A subgroup of UT_{p+1}(Z) whose distortion degree is exactly p/q.

    Three generators: the first elementary step, a ladder element
    whose rungs climb from index 2 to the far corner in q - 1 hops of
    near-equal depth, and the far corner itself.  Bracketing the first
    step with the ladder q - 1 times lands exactly on the corner, and
    the rung spacing floor(i*p/q) keeps every intermediate bracket at
    ambient depth at most i times p/q.  When every rung is two or more
    levels deep the ladder is padded with a depth-one factor in the
    last superdiagonal slot so that no generator is deeper than the
    words it must be compared with.  For q == 2 this reduces to a
    single jump; for p == q == 2 the padding and the jump collide in
    the only available slot and the subgroup degenerates to finite
    index, with degree 1.
    """
    if not (isinstance(p, int) and isinstance(q, int)):
        raise ValueError("p and q must be integers")
    if not p >= q >= 2:
        raise ValueError("need p >= q >= 2")
    n = p + 1
    if q == 2:
        bridge = elementary(n, n - 1, n) * elementary(n, 2, n)
        gens = [elementary(n, 1, 2), bridge, elementary(n, 1, n)]
        return SubgroupGens(n, gens)
    rungs = [2] + [1 + (i * p) // q for i in range(2, q + 1)]
    steps = list(zip(rungs, rungs[1:]))
    ladder = identity(n)
    if all(b - a >= 2 for a, b in steps):
        ladder = ladder * elementary(n, n - 1, n)
    for a, b in steps:
        ladder = ladder * elementary(n, a, b)
    gens = [elementary(n, 1, 2), ladder, elementary(n, 1, n)]
    return SubgroupGens(n, gens)


def brute_force_degree(sub, len_bound=3):
    """Largest depth ratio over short words in the standardized slots.

    Independent check of distortion_degree: enumerates every product
    of at most len_bound slot generators or inverses and takes the
    max of ambient depth over subgroup depth.  Exponential in
    len_bound, hence the guard.
    """
    if len_bound > 6:
        raise GuardError("brute-force word length bound is capped at 6")
    seq = _as_sequence(sub)
    if not seq.slots:
        raise ValueError("subgroup is trivial; distortion is undefined")
    letters = []
    for s in seq.slots:
        letters.append(s)
        letters.append(s.inverse())
    frontier = {identity(seq.n)}
    values = set()
    for _ in range(len_bound):
        nxt = set()
        for w in frontier:
            for g in letters:
                nxt.add(w * g)
        values |= nxt
        frontier = nxt
    best = Fraction(0)
    for h in values:
        if h.is_identity:
            continue
        r = Fraction(level_weight(h), subgroup_depth(h, seq))
        if r > best:
            best = r
    return best


def depth_by_powers(h, sub, max_power=64):
    """Empirical lower bound for subgroup_depth via literal membership.

    Checks which lower central subgroups contain h, h^2, ..., up to
    max_power, and returns the deepest hit.  Agrees with
    subgroup_depth whenever some small power of h realizes its depth.
    """
    seq = _as_sequence(sub)
    if h.is_identity:
        raise ValueError("identity has unbounded depth")
    if member_certificate(h, seq) is None:
        raise ValueError("element is not a member of the subgroup")
    chains = []
    k = 1
    while True:
        gens = lower_central_gens(seq, k)
        if not gens.generators:
            break
        chains.append(standardize(gens))
        k += 1
    best = 1
    hp = identity(seq.n)
    for _ in range(max_power):
        hp = hp * h
        for depth in range(len(chains), best, -1):
            if member(hp, chains[depth - 1]):
                best = depth
                break
    return best


def ball(n, radius, generators=None):
    """Word-metric ball in UT_n(Z), as a dict from matrix to distance.

    Default generators are the superdiagonal elementaries and their
    inverses.  Growth is severe, hence the small hard caps.
    """
    if generators is None:
        if n > 4:
            raise GuardError("full-group balls are capped at n = 4")
        gens = [elementary(n, i, i + 1) for i in range(1, n)]
    else:
        gens = list(generators)
    if radius > 10:
        raise GuardError("ball radius is capped at 10")
    letters = []
    for g in gens:
        letters.append(g)
        gi = g.inverse()
        if gi != g:
            letters.append(gi)
    dist = {identity(n): 0}
    frontier = [identity(n)]
    for d in range(1, radius + 1):
        nxt = []
        for w in frontier:
            for g in letters:
                v = w * g
                if v not in dist:
                    dist[v] = d
                    nxt.append(v)
        frontier = nxt
    return dist


def empirical_distortion(sub, radius, h_cap=None):
    """Measured distortion function of the subgroup up to the radius.

    delta[r] is the largest subgroup word length among subgroup
    members inside the ambient ball of radius r, using standardized
    slots as the subgroup's generating set.  Members beyond h_cap
    subgroup-steps are reported at the cap and flagged, so the result
    is still a certified lower bound.
    """
    seq = _as_sequence(sub)
    if not seq.slots:
        raise ValueError("subgroup is trivial; distortion is undefined")
    if h_cap is None:
        h_cap = radius * radius
    ambient = ball(seq.n, radius)
    targets = {
        m: d for m, d in ambient.items() if member(m, seq)
    }
    hdist = {identity(seq.n): 0}
    frontier = [identity(seq.n)]
    letters = []
    for s in seq.slots:
        letters.append(s)
        letters.append(s.inverse())
    missing = set(targets) - set(hdist)
    d = 0
    while missing and d < h_cap:
        d += 1
        nxt = []
        for w in frontier:
            for g in letters:
                v = w * g
                if v not in hdist:
                    hdist[v] = d
                    nxt.append(v)
        frontier = nxt
        missing -= set(hdist)
        if not frontier:
            break
    delta = {}
    capped = {}
    for r in range(1, radius + 1):
        best = 0
        hit_cap = False
        for m, dG in targets.items():
            if dG > r:
                continue
            if m in hdist:
                best = max(best, hdist[m])
            else:
                best = max(best, h_cap)
                hit_cap = True
        delta[r] = best
        capped[r] = hit_cap
    return {"radius": radius, "h_cap": h_cap, "delta": delta, "capped": capped}

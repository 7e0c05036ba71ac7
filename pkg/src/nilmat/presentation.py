"""Graded polycyclic presentations of torsion-free nilpotent groups.

Elements are exponent tuples over an ordered generating set
x_1, ..., x_M: the tuple a stands for the normal word
x_1^a_1 ... x_M^a_M.  Commutator convention is
[x, y] = x^-1 y^-1 x y, and each stored relation
[x_j, x_i] = word (j > i) has its word supported strictly past j, so
the suffix subgroups <x_k, ..., x_M> form a central-style filtration
and collection always pushes material rightward.

Multiplication collects whole powers at once (with binary splitting of
conjugation exponents), so exponents around 10^6 cost log, not linear,
work.
"""

from __future__ import annotations

from .matgroup import PositionBasis, commutator, elementary, malcev_coordinates

__all__ = [
    "NilpotentPresentation",
    "builtin",
    "evaluate_coords",
    "relation_failures",
    "presentation_to_json",
    "presentation_from_json",
]


class NilpotentPresentation:
    """Ordered generating set with graded commutator relations.

    relations maps (j, i) with 1 <= i < j <= M to a length-M exponent
    tuple; absent keys mean the pair commutes.  weights[k] is the
    lower-central depth of x_{k+1}; every relation word must sit at
    depth >= weights[i] + weights[j].

    positions/ambient_n optionally record a faithful realization by
    elementary integer matrices, used for cross-checking.
    """

    def __init__(self, M, weights, relations, label=None, positions=None,
                 ambient_n=None):
        if M < 1:
            raise ValueError("need at least one generator")
        weights = tuple(int(w) for w in weights)
        if len(weights) != M or any(w < 1 for w in weights):
            raise ValueError("weights must be M positive integers")
        rel = {}
        for (j, i), word in relations.items():
            if not (1 <= i < j <= M):
                raise ValueError(f"bad relation key ({j}, {i})")
            word = tuple(int(e) for e in word)
            if len(word) != M:
                raise ValueError(f"relation ({j}, {i}) word has wrong length")
            if not any(word):
                continue
            for k, e in enumerate(word, start=1):
                if e and k <= j:
                    raise ValueError(
                        f"relation ({j}, {i}) touches x_{k}, not past x_{j}"
                    )
                if e and weights[k - 1] < weights[i - 1] + weights[j - 1]:
                    raise ValueError(
                        f"relation ({j}, {i}) word is too shallow at x_{k}"
                    )
            rel[(j, i)] = word
        self.M = M
        self.weights = weights
        self.relations = rel
        self.label = label
        self.positions = tuple(positions) if positions else None
        self.ambient_n = ambient_n
        self._zero = (0,) * M
        # 0-based lookup for the collector
        self._rel0 = {(j - 1, i - 1): w for (j, i), w in rel.items()}
        self._conj_memo = {}

    # -- group operations on exponent tuples --------------------------

    def identity(self):
        return self._zero

    def generator(self, k):
        """Exponent tuple of x_k (1-based)."""
        if not (1 <= k <= self.M):
            raise ValueError(f"no generator x_{k}")
        return tuple(1 if t == k - 1 else 0 for t in range(self.M))

    def multiply(self, a, b):
        M = self.M
        if len(a) != M or len(b) != M:
            raise ValueError("exponent tuple has wrong length")
        cur = list(a)
        out = [0] * M
        for f in range(M):
            out[f] = cur[f] + b[f]
            e = b[f]
            if e and any(cur[f + 1:]):
                cur = self._conj_tail(cur, f, e)
        return tuple(out)

    def inverse(self, a):
        f = -1
        for t, x in enumerate(a):
            if x:
                f = t
                break
        if f < 0:
            return self._zero
        tail = list(a)
        tail[f] = 0
        v = self._conj_tail(self.inverse(tuple(tail)), f, -a[f])
        v[f] = -a[f]
        return tuple(v)

    def power(self, a, e):
        base = tuple(a) if e >= 0 else self.inverse(a)
        e = abs(e)
        result = self._zero
        while e:
            if e & 1:
                result = self.multiply(result, base)
            base = self.multiply(base, base)
            e >>= 1
        return result

    def weight_of(self, a):
        """Lower-central depth of the element: the smallest generator
        weight appearing in its normal form."""
        live = [self.weights[k] for k, e in enumerate(a) if e]
        if not live:
            raise ValueError("identity has no finite weight")
        return min(live)

    # -- collection internals ------------------------------------------

    def _conj_tail(self, vec, g, e):
        """Normal form of x_g^-e (product of vec past floor g) x_g^e,
        as a list supported past g."""
        res = self._zero
        for k in range(g + 1, self.M):
            c = vec[k]
            if c:
                res = self.multiply(res, self.power(self._conj_gen(k, g, e), c))
        return list(res)

    def _conj_gen(self, k, g, e):
        """Normal form of x_g^-e x_k x_g^e (0-based k > g)."""
        key = (k, g, e)
        hit = self._conj_memo.get(key)
        if hit is not None:
            return hit
        r = self._rel0.get((k, g))
        if e == 0 or r is None:
            out = tuple(1 if t == k else 0 for t in range(self.M))
        elif e == 1:
            out = tuple(
                (1 if t == k else 0) + r[t] for t in range(self.M)
            )
        elif e == -1:
            # x_g x_k x_g^-1 = x_k * conj of [x_k, x_g]^-1 by x_g^-1;
            # the relation word sits past k, so this recursion descends
            t = self._conj_tail(self.inverse(r), g, -1)
            t[k] += 1
            out = tuple(t)
        else:
            h = e // 2 if e > 0 else -((-e) // 2)
            out = tuple(self._conj_tail(self._conj_gen(k, g, h), g, e - h))
        self._conj_memo[key] = out
        return out

    # -- checks ---------------------------------------------------------

    def validate(self, deep=False):
        """Re-run structural checks; with deep=True also test
        associativity over all generator/inverse triples and, when a
        matrix realization is attached, verify every commutator
        relation inside the matrix group."""
        NilpotentPresentation(
            self.M, self.weights, self.relations
        )
        if not deep:
            return
        atoms = []
        for k in range(1, self.M + 1):
            g = self.generator(k)
            atoms.append(g)
            atoms.append(self.inverse(g))
        for a in atoms:
            for b in atoms:
                ab = self.multiply(a, b)
                for c in atoms:
                    left = self.multiply(ab, c)
                    right = self.multiply(a, self.multiply(b, c))
                    if left != right:
                        raise ValueError(
                            "inconsistent presentation: associativity "
                            f"fails on {a} {b} {c}"
                        )
        mats = self.realized_generators()
        if mats is None:
            return
        one = mats[0] ** 0
        for j in range(2, self.M + 1):
            for i in range(1, j):
                got = commutator(mats[j - 1], mats[i - 1])
                want = evaluate_coords(
                    self.relations.get((j, i), self._zero), mats, one
                )
                if got != want:
                    raise ValueError(
                        f"realization breaks relation ({j}, {i})"
                    )

    def realized_generators(self):
        """Elementary matrices of the attached realization, or None."""
        if self.positions is None:
            return None
        return [
            elementary(self.ambient_n, i, j) for i, j in self.positions
        ]


def evaluate_coords(coords, images, one):
    """Image of the normal word under a homomorphism sending x_k to
    images[k-1]; works for anything with * and integer **."""
    out = one
    for img, e in zip(images, coords):
        if e:
            out = out * img ** e
    return out


def relation_failures(p, matrix_of):
    """Check that matrix_of (exponent tuple -> matrix) respects the
    presentation.

    Uses only matrix products on generator and generator-inverse
    images: x_j x_i must equal x_i x_j [x_j, x_i], and each inverse
    image must cancel its generator.  Returns the offending relation
    keys, with ("inv", k) marking a broken inverse; empty means clean.
    """
    one = matrix_of(p.identity())
    gen = {}
    inv = {}
    bad = []
    for k in range(1, p.M + 1):
        e = p.generator(k)
        gen[k] = matrix_of(e)
        inv[k] = matrix_of(p.inverse(e))
        if gen[k] * inv[k] != one:
            bad.append(("inv", k))
    for j in range(2, p.M + 1):
        for i in range(1, j):
            word = p.relations.get((j, i), p.identity())
            lhs = gen[j] * gen[i]
            rhs = gen[i] * gen[j]
            for k, e in enumerate(word, start=1):
                b = gen[k] if e > 0 else inv[k]
                for _ in range(abs(e)):
                    rhs = rhs * b
            if lhs != rhs:
                bad.append((j, i))
    return bad


def builtin(name):
    """Stock presentations.

    * ``ut:m`` or ``ut:m:scheme``: all elementary positions of the m x m
      unitriangular group, ordered by the named PositionBasis flavor,
      relations read off the matrices themselves.
    * ``heisenberg:n``: 2n+1 generators, [x_{n+i}, x_i] = x_{2n+1}^-1,
      realized inside the (n+2) x (n+2) unitriangular group.
    * ``freenil23``: rank-2 class-3 free nilpotent group on the Hall
      basis y1, y2, y3 = [y1, y2], y4 = [y1, y3], y5 = [y2, y3].
    """
    parts = name.split(":")
    kind = parts[0]
    if kind == "ut":
        if len(parts) not in (2, 3):
            raise ValueError(f"bad builtin name {name!r}")
        m = _positive_int(parts[1], name)
        if m < 2:
            raise ValueError("ut:m needs m >= 2")
        flavor = parts[2] if len(parts) == 3 else "lcs-standard"
        basis = PositionBasis(m, flavor)
        gens = [elementary(m, i, j) for i, j in basis.positions]
        rels = {}
        for j in range(2, len(gens) + 1):
            for i in range(1, j):
                c = commutator(gens[j - 1], gens[i - 1])
                if not c.is_identity:
                    rels[(j, i)] = malcev_coordinates(c, basis)
        label = f"ut:{m}" if flavor == "lcs-standard" else f"ut:{m}:{flavor}"
        return NilpotentPresentation(
            len(gens), basis.weights, rels, label=label,
            positions=basis.positions, ambient_n=m,
        )
    if kind == "heisenberg":
        if len(parts) != 2:
            raise ValueError(f"bad builtin name {name!r}")
        n = _positive_int(parts[1], name)
        M = 2 * n + 1
        pos = [(1, i + 1) for i in range(1, n + 1)]
        pos += [(i + 1, n + 2) for i in range(1, n + 1)]
        pos.append((1, n + 2))
        top = tuple(-1 if t == M - 1 else 0 for t in range(M))
        rels = {(n + i, i): top for i in range(1, n + 1)}
        return NilpotentPresentation(
            M, (1,) * (2 * n) + (2,), rels, label=f"heisenberg:{n}",
            positions=pos, ambient_n=n + 2,
        )
    if kind == "freenil23":
        if len(parts) != 1:
            raise ValueError(f"bad builtin name {name!r}")
        rels = {
            (2, 1): (0, 0, -1, 0, 0),
            (3, 1): (0, 0, 0, -1, 0),
            (3, 2): (0, 0, 0, 0, -1),
        }
        return NilpotentPresentation(
            5, (1, 1, 2, 3, 3), rels, label="freenil23"
        )
    raise ValueError(f"unknown builtin {name!r}")


def _positive_int(text, name):
    try:
        value = int(text)
    except ValueError as exc:
        raise ValueError(f"bad builtin name {name!r}") from exc
    if value < 1:
        raise ValueError(f"bad builtin name {name!r}")
    return value


def presentation_to_json(p):
    """Wire form with deterministic key order."""
    return {
        "M": p.M,
        "weights": list(p.weights),
        "relations": [
            {"j": j, "i": i, "word": list(word)}
            for (j, i), word in sorted(p.relations.items())
        ],
        "label": p.label,
    }


def presentation_from_json(obj):
    """Inverse of presentation_to_json.  ValueError on malformed input."""
    try:
        M = obj["M"]
        weights = obj["weights"]
        raw = obj["relations"]
        label = obj.get("label")
    except (TypeError, KeyError) as exc:
        raise ValueError(f"malformed presentation object: {exc}") from exc
    rels = {}
    for item in raw:
        try:
            rels[(item["j"], item["i"])] = tuple(item["word"])
        except (TypeError, KeyError) as exc:
            raise ValueError(f"malformed relation entry: {exc}") from exc
    return NilpotentPresentation(M, weights, rels, label=label)

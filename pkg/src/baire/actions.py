"""Permutation actions on countable sets and the combinators that transform them.

Points are tagged tuples so they hash cheaply and serialize to JSON verbatim:

    ("B", g)            a group element under left translation
    ("P", i)            a point of an explicit finite permutation model
    ("T", (y1, ...))    a tuple of pairwise distinct points
    ("I", y, r)         the class [y, r] of an induced action, r a canonical coset rep
    ("C", y, n)         copy n of y
    ("S", side, y)      y on one side of a disjoint union
"""

from __future__ import annotations

import itertools
import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence

from .composed import AmalgamGroup, HNNGroup
from .errors import BudgetExceeded, StructuralError, search_budget
from .groups import BaseGroup


# ---------------------------------------------------------------------------
# enumeration helpers


class LazySeq:
    """Random access into an iterator, caching what has been produced."""

    def __init__(self, source: Iterable):
        self._it = iter(source)
        self._items: list = []
        self.exhausted = False

    def get(self, i: int):
        while len(self._items) <= i and not self.exhausted:
            try:
                self._items.append(next(self._it))
            except StopIteration:
                self.exhausted = True
        return self._items[i] if i < len(self._items) else None

    def __len__(self):
        return len(self._items)


def cantor_pair(k: int) -> tuple[int, int]:
    s = (math.isqrt(8 * k + 1) - 1) // 2
    i = k - s * (s + 1) // 2
    return i, s - i


def dovetail(a: Iterable, b: Iterable) -> Iterator[tuple]:
    """All pairs of two (possibly infinite) streams, by increasing index sum."""
    A, B = LazySeq(a), LazySeq(b)
    for s in itertools.count():
        produced = False
        for i in range(s + 1):
            x = A.get(i)
            if x is None:
                break
            y = B.get(s - i)
            if y is None:
                continue
            produced = True
            yield x, y
        if not produced and A.exhausted and B.exhausted and s > len(A) + len(B):
            return


def falling(n: int, m: int) -> int:
    out = 1
    for i in range(m):
        out *= n - i
    return out


# ---------------------------------------------------------------------------
# interning


class PointTable:
    """Append-only point registry; ids are assigned in order of first sight."""

    def __init__(self):
        self._ids: dict = {}
        self._points: list = []
        self._lock = threading.Lock()

    def intern(self, p) -> int:
        i = self._ids.get(p)
        if i is not None:
            return i
        with self._lock:
            i = self._ids.get(p)
            if i is None:
                i = len(self._points)
                self._ids[p] = i
                self._points.append(p)
        return i

    def point(self, i: int):
        return self._points[i]

    def __contains__(self, p):
        return p in self._ids

    def __len__(self):
        return len(self._points)


# ---------------------------------------------------------------------------
# Følner witnesses


def symdiff(f: Callable, C: Sequence, members: set | None = None) -> int:
    """|f(C) Δ C| for a bijection f."""
    members = set(C) if members is None else members
    inside = sum(1 for x in C if f(x) in members)
    return 2 * (len(C) - inside)


@dataclass(frozen=True)
class FolnerWitness:
    points: tuple
    labels: tuple
    counts: tuple
    bound: Fraction
    strict: bool = True

    @property
    def size(self) -> int:
        return len(self.points)

    def ratio(self, label=None) -> Fraction:
        if label is None:
            return max((Fraction(c, self.size) for c in self.counts), default=Fraction(0))
        return Fraction(self.counts[self.labels.index(label)], self.size)

    def holds(self) -> bool:
        if not self.points:
            return False
        r = self.ratio()
        return r < self.bound if self.strict else r <= self.bound


def measure(points: Sequence, maps: Sequence[tuple], bound, strict: bool = True) -> FolnerWitness:
    """Exact symmetric-difference counts of ``points`` under each ``(label, f)``."""
    members = set(points)
    labels, counts = [], []
    for label, f in maps:
        labels.append(label)
        counts.append(symdiff(f, points, members))
    return FolnerWitness(tuple(points), tuple(labels), tuple(counts), Fraction(bound), strict)


def worst_ratio(action: "Action", elements: Iterable, points: Sequence) -> Fraction:
    members = set(points)
    worst = Fraction(0)
    for g in elements:
        c = symdiff(lambda x, g=g: action.apply(g, x), points, members)
        worst = max(worst, Fraction(c, len(points)))
    return worst


def saturate(action: "Action", elements: Sequence, points: Iterable) -> list:
    """Closure of ``points`` under the finite subgroup listed in ``elements``."""
    out, seen = [], set()
    for x in points:
        for s in elements:
            y = action.apply(s, x)
            if y not in seen:
                seen.add(y)
                out.append(y)
    return out


def orbits(action: "Action", elements: Sequence, points: Iterable) -> list[list]:
    """Partition a saturated set into orbits of a finite subgroup, in order of first sight."""
    seen, out = set(), []
    for x in points:
        if x in seen:
            continue
        orb = []
        for s in elements:
            y = action.apply(s, x)
            if y not in seen:
                seen.add(y)
                orb.append(y)
        out.append(orb)
    return out


# ---------------------------------------------------------------------------
# actions


class Action:
    """A group acting on a countable set, plus the guarantees it was built with.

    ``guarantees`` maps a property name (faithful, amenable, infinite_orbits,
    almost_free, free, transitive) to the reason it holds.
    """

    group = None
    guarantees: dict

    def apply(self, g, x):
        raise NotImplementedError

    def points(self) -> Iterator:
        raise NotImplementedError

    def folner(self, elements: Sequence, eps) -> list:
        """A non-empty finite set with |gC Δ C| < eps |C| for every listed element."""
        raise NotImplementedError

    def moved_point(self, g):
        raise NotImplementedError

    def fixed_points(self, g) -> list | None:
        """All fixed points of ``g`` when that set is known to be finite and listable."""
        return None

    def fix_empty(self, g) -> tuple | None:
        """Chain of reasons why ``g`` has no fixed point, or None if not guaranteed."""
        return None

    def decode_point(self, obj):
        raise NotImplementedError

    def has(self, prop: str) -> bool:
        return prop in self.guarantees


class TranslationAction(Action):
    """An infinite base group acting on itself by left translation."""

    def __init__(self, group: BaseGroup):
        if group.is_finite:
            raise StructuralError(f"{group.name} is finite: translation orbits are finite")
        self.group = group
        reason = "left translation"
        self.guarantees = {
            "faithful": reason,
            "transitive": reason,
            "free": reason,
            "almost_free": reason,
            "amenable": "translation action of an amenable group",
            "infinite_orbits": "infinite group acting on itself",
        }

    def apply(self, g, x):
        return ("B", self.group.mul(g, x[1]))

    def points(self):
        for g in self.group.enumerate():
            yield ("B", g)

    def box_ratio(self, g, n: int) -> Fraction:
        inside = 1
        for v in g.vector:
            inside *= max(n - abs(v), 0)
        return 2 * (1 - Fraction(inside, n**self.group.rank))

    def box(self, n: int) -> list:
        G = self.group
        return [
            ("B", G.element(vec, f))
            for vec in itertools.product(range(n), repeat=G.rank)
            for f in range(G.finite_part.order)
        ]

    def box_side(self, elements: Sequence, eps) -> int:
        """Least side n with box_ratio < eps for every element."""
        eps = Fraction(eps)
        if eps <= 0:
            raise ValueError("eps must be positive")

        def ok(n):
            return all(self.box_ratio(g, n) < eps for g in elements)

        hi = 1
        while not ok(hi):
            hi *= 2
        lo = hi // 2
        while lo + 1 < hi:
            mid = (lo + hi) // 2
            if ok(mid):
                hi = mid
            else:
                lo = mid
        return hi

    def folner(self, elements, eps):
        return self.box(self.box_side(list(elements), eps))

    def moved_point(self, g):
        if g == self.group.identity:
            raise ValueError("the identity moves no point")
        return ("B", self.group.identity)

    def fixed_points(self, g):
        return [] if g != self.group.identity else None

    def fix_empty(self, g):
        if g != self.group.identity:
            return ("free translation action",)
        return None

    def decode_point(self, obj):
        return ("B", self.group.decode(obj[1]))


class FinitePermutationAction(Action):
    """A finite group acting on {0..n-1} by explicit permutations; a test model."""

    def __init__(self, group: BaseGroup, perms: Sequence[Sequence[int]]):
        if not group.is_finite or len(perms) != group.finite_part.order:
            raise StructuralError("need one permutation per element of a finite group")
        self.group = group
        self.perms = [tuple(p) for p in perms]
        self.size = len(self.perms[0])
        F = group.finite_part
        for a in range(F.order):
            for b in range(F.order):
                ab = self.perms[F.mul(a, b)]
                if ab != tuple(self.perms[a][self.perms[b][i]] for i in range(self.size)):
                    raise StructuralError("permutations do not form an action")
        self.guarantees = {"amenable": "finite set", "almost_free": "finite set"}
        if all(
            any(self.perms[a][i] != i for i in range(self.size)) for a in range(1, F.order)
        ):
            self.guarantees["faithful"] = "every nontrivial permutation moves a point"

    def apply(self, g, x):
        return ("P", self.perms[g.fin][x[1]])

    def points(self):
        return (("P", i) for i in range(self.size))

    def folner(self, elements, eps):
        return list(self.points())

    def moved_point(self, g):
        for i in range(self.size):
            if self.perms[g.fin][i] != i:
                return ("P", i)
        raise ValueError("element acts trivially")

    def fixed_points(self, g):
        return [("P", i) for i in range(self.size) if self.perms[g.fin][i] == i]

    def fix_empty(self, g):
        return ("explicit count",) if not self.fixed_points(g) else None

    def decode_point(self, obj):
        return ("P", int(obj[1]))


def folner_grow(action: Action, elements: Sequence, eps, min_size: int, max_rounds: int = 64) -> FolnerWitness:
    """A Følner set of size at least ``min_size``, built as a union of Følner sets.

    Each round asks for an ``eps / 2^j`` set and takes the union with what came
    before; the first union that is large enough and recounts under ``eps`` wins.
    """
    if not action.has("infinite_orbits"):
        raise StructuralError("folner_grow needs an action with infinite orbits")
    eps = Fraction(eps)
    elements = list(elements)
    union: list = []
    seen: set = set()
    for j in range(max_rounds):
        for x in action.folner(elements, eps / 2**j):
            if x not in seen:
                seen.add(x)
                union.append(x)
        if len(union) >= min_size:
            maps = [(str(i), (lambda p, g=g: action.apply(g, p))) for i, g in enumerate(elements)]
            w = measure(union, maps, eps)
            if w.holds():
                return w
    raise BudgetExceeded(
        f"no Følner set of size {min_size} with ratio < {eps} after {max_rounds} rounds"
    )


class OffDiagonalPower(Action):
    """Diagonal action on m-tuples of pairwise distinct points."""

    def __init__(self, base: Action, m: int):
        if m < 1:
            raise ValueError("m must be at least 1")
        self.base = base
        self.m = m
        self.group = base.group
        g = {}
        for prop in ("faithful", "almost_free", "infinite_orbits"):
            if base.has(prop):
                g[prop] = f"{prop} on the base action, preserved by distinct {m}-tuples"
        if base.has("amenable") and base.has("infinite_orbits"):
            g["amenable"] = "off-diagonal power of an amenable action with infinite orbits"
        self.guarantees = g

    def apply(self, g, x):
        return ("T", tuple(self.base.apply(g, y) for y in x[1]))

    def points(self):
        m = self.m
        seq = LazySeq(self.base.points())
        for k in itertools.count():
            top = seq.get(k)
            if top is None:
                return
            # tuples whose largest base index is exactly k
            for idx in itertools.product(range(k + 1), repeat=m):
                if max(idx) != k or len(set(idx)) < m:
                    continue
                yield ("T", tuple(seq.get(i) for i in idx))

    def tuples(self, C: Sequence) -> list:
        return [("T", t) for t in itertools.permutations(C, self.m)]

    def counts(self, C: Sequence, g) -> tuple[int, int, int]:
        """(|C^m ∩ large diagonal|, |C^m ∩ X|, |gD Δ D|) for D = C^m ∩ X, exactly.

        g acts injectively, so g maps a distinct tuple into D iff every entry lands in C.
        """
        n, m = len(C), self.m
        members = set(C)
        stay = sum(1 for y in C if self.base.apply(g, y) in members)
        d = falling(n, m)
        return n**m - d, d, 2 * (d - falling(stay, m))

    def ratio(self, C: Sequence, g) -> Fraction:
        _, d, sd = self.counts(C, g)
        return Fraction(sd, d)

    def folner(self, elements, eps, min_size: int = 0):
        eps = Fraction(eps)
        elements = list(elements)
        for j in range(1, 64):
            w = folner_grow(self.base, elements, eps / 2**j, max(self.m, min_size))
            C = list(w.points)
            if all(self.ratio(C, g) < eps for g in elements):
                return self.tuples(C)
        raise BudgetExceeded(f"off-diagonal Følner search exhausted for eps={eps}")

    def moved_point(self, g):
        y = self.base.moved_point(g)
        rest = []
        for p in self.base.points():
            if p != y and p not in rest:
                rest.append(p)
            if len(rest) == self.m - 1:
                break
        return ("T", (y, *rest))

    def fixed_points(self, g):
        fix = self.base.fixed_points(g)
        if fix is None:
            return None
        return self.tuples(fix)

    def fix_empty(self, g):
        fix = self.base.fixed_points(g)
        if fix is not None and len(fix) < self.m:
            return (f"fewer than {self.m} base fixed points, none on distinct {self.m}-tuples",)
        return self.base.fix_empty(g)

    def decode_point(self, obj):
        return ("T", tuple(self.base.decode_point(y) for y in obj[1]))


def offdiag_power(action: Action, m: int) -> OffDiagonalPower:
    return OffDiagonalPower(action, m)


def upgrade_almost_free(action: Action, elements: Sequence) -> Action:
    """Pass to an off-diagonal power on which every listed element is fixed-point free."""
    if not action.has("almost_free"):
        raise StructuralError("upgrade_almost_free needs an almost free action")
    group = action.group
    counts = []
    for g in elements:
        if g == group.identity:
            raise ValueError("the identity cannot be made fixed-point free")
        fix = action.fixed_points(g)
        if fix is None:
            raise BudgetExceeded(f"cannot count the fixed points of {g!r}")
        counts.append(len(fix))
    m = max(counts, default=0) + 1
    if m == 1:
        return action
    return OffDiagonalPower(action, m)


def folner_sized(action: Action, elements: Sequence, k: int, a: Callable[[int], Fraction], after: int = 0):
    """Stack copies of a (1/k)-Følner set of ``action`` to approach a target size.

    Returns ``(witness, n_k, q)``: the witness lives on copy points of
    ``Stabilized(action)``, ``n_k > after`` is the first index with
    ``floor(a(n_k)) >= k |D|``, and q = floor(a(n_k)) div |D| copies are used.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    D = action.folner(list(elements), Fraction(1, k))
    n = after + 1
    steps = search_budget()
    while math.floor(Fraction(a(n))) < k * len(D):
        n += 1
        steps -= 1
        if steps <= 0:
            raise BudgetExceeded("target sequence does not grow fast enough")
    q = math.floor(Fraction(a(n))) // len(D)
    C = stack(D, range(q))
    stab = Stabilized(action)
    maps = [(str(i), (lambda p, g=g: stab.apply(g, p))) for i, g in enumerate(elements)]
    return measure(C, maps, Fraction(1, k), strict=False), n, q


def stack(points: Sequence, copies: Iterable[int]) -> list:
    return [("C", y, n) for n in copies for y in points]


class Induced(Action):
    """The induced action of an ambient HNN/amalgam group from a subgroup action.

    ``side`` selects the factor for amalgams; it is ignored for HNN groups, where
    the subgroup is always the base.
    """

    def __init__(self, base: Action, ambient, side: int | None = None):
        self.base = base
        self.group = ambient
        self.side = side
        if isinstance(ambient, HNNGroup):
            if base.group is not ambient.base:
                raise StructuralError("base action must act on the HNN base group")
            self._split = ambient.split
            self._embed = ambient.embed
            self._other = None
        elif isinstance(ambient, AmalgamGroup):
            if side not in (1, 2) or base.group is not ambient.factors[side]:
                raise StructuralError("base action must act on the chosen factor")
            self._split = lambda g: ambient.split(g, side)
            self._embed = lambda h: ambient.embed(side, h)
            self._other = 3 - side
        else:
            raise StructuralError("ambient group must be an HNN extension or an amalgam")
        g = {}
        if base.has("faithful"):
            g["faithful"] = "induced from a faithful action"
        if base.has("amenable"):
            g["subgroup_amenable"] = "embedded copy y -> [y,1] is equivariant"
        if base.has("infinite_orbits"):
            g["subgroup_infinite_orbits"] = "almost malnormal subgroup over a finite edge group"
        self.guarantees = g

    def subgroup_element(self, g):
        """The subgroup element equal to ``g``, or None if ``g`` is outside the subgroup."""
        h, r = self._split(g)
        return h if r == self.group.identity else None

    def embed_point(self, y):
        return ("I", y, self.group.identity)

    def canonical(self, y, g):
        """The point [y, g]: write g = h r with r canonical, giving (h^-1 y, r)."""
        h, r = self._split(g)
        return ("I", self.base.apply(self.base.group.inv(h), y), r)

    def apply(self, g, x):
        G = self.group
        _, y, r = x
        return self.canonical(y, G.mul(r, G.inv(g)))

    def coset_reps(self) -> Iterator:
        """Canonical coset representatives by breadth-first search on the Schreier graph."""
        G = self.group
        gens = [g for _, g in G.generators()]
        seen = {G.identity}
        frontier = [G.identity]
        while frontier:
            yield from frontier
            nxt = []
            for r in frontier:
                for s in gens:
                    r2 = self._split(G.mul(r, s))[1]
                    if r2 not in seen:
                        seen.add(r2)
                        nxt.append(r2)
            frontier = nxt

    def points(self):
        for y, r in dovetail(self.base.points(), self.coset_reps()):
            yield ("I", y, r)

    def folner(self, elements, eps):
        hs = []
        for g in elements:
            h = self.subgroup_element(g)
            if h is None:
                raise StructuralError("Følner sets are only provided for the subgroup")
            hs.append(h)
        return [self.embed_point(y) for y in self.base.folner(hs, eps)]

    def moved_point(self, g):
        h = self.subgroup_element(g)
        if h is None:
            return self.embed_point(next(iter(self.base.points())))
        return self.embed_point(self.base.moved_point(h))

    def free_on_edge_group(self) -> bool:
        """Whether the base action is free on the finite edge group of the ambient step."""
        G = self.group
        if isinstance(G, HNNGroup):
            images = list(G.sigma_sub.images[1:]) + list(G.theta_sub.images[1:])
        else:
            images = G.subs[self.side].images[1:]
        return all(self.base.fix_empty(s) for s in images)

    def fix_empty(self, g):
        G = self.group
        if g == G.identity:
            return None
        h = self.subgroup_element(g)
        if h is not None:
            chain = self.base.fix_empty(h)
            if chain is not None and self.free_on_edge_group():
                return chain + ("induction keeps empty fixed sets (edge group acts freely)",)
            return None
        if self._other is not None and G.in_factor(g, self._other) and self.free_on_edge_group():
            return ("other factor acts freely on the induced space",)
        return None

    def decode_point(self, obj):
        return ("I", self.base.decode_point(obj[1]), self.group.decode(obj[2]))


class Stabilized(Action):
    """Countably many disjoint copies of an action: g (y, n) = (g y, n)."""

    def __init__(self, base: Action):
        self.base = base
        self.group = base.group
        self.guarantees = {
            k: v + "; copies preserve it"
            for k, v in base.guarantees.items()
            if k != "transitive"
        }

    def apply(self, g, x):
        return ("C", self.base.apply(g, x[1]), x[2])

    def points(self):
        for y, n in dovetail(self.base.points(), itertools.count()):
            yield ("C", y, n)

    def folner(self, elements, eps):
        return stack(self.base.folner(elements, eps), [0])

    def moved_point(self, g):
        return ("C", self.base.moved_point(g), 0)

    def fixed_points(self, g):
        fix = self.base.fixed_points(g)
        return None if fix else fix

    def fix_empty(self, g):
        chain = self.base.fix_empty(g)
        return None if chain is None else chain + ("copies keep empty fixed sets",)

    def project(self, x, copy: int = 0):
        return x[1] if x[2] == copy else None

    def decode_point(self, obj):
        return ("C", self.base.decode_point(obj[1]), int(obj[2]))


class DisjointUnion(Action):
    def __init__(self, left: Action, right: Action):
        if left.group is not right.group:
            raise StructuralError("both sides of a disjoint union must carry the same group")
        self.sides = {1: left, 2: right}
        self.group = left.group
        g = {}
        if left.has("faithful") or right.has("faithful"):
            g["faithful"] = "one side is faithful"
        for prop in ("infinite_orbits", "almost_free", "free"):
            if left.has(prop) and right.has(prop):
                g[prop] = "both sides"
        self.guarantees = g

    def apply(self, g, x):
        _, side, y = x
        return ("S", side, self.sides[side].apply(g, y))

    def points(self):
        streams = [self.sides[1].points(), self.sides[2].points()]
        alive = [True, True]
        while any(alive):
            for i, s in enumerate(streams):
                if not alive[i]:
                    continue
                try:
                    yield ("S", i + 1, next(s))
                except StopIteration:
                    alive[i] = False

    def folner(self, elements, eps):
        for side in (1, 2):
            try:
                return [("S", side, y) for y in self.sides[side].folner(elements, eps)]
            except StructuralError:
                continue
        raise StructuralError("neither side provides Følner sets for these elements")

    def moved_point(self, g):
        order = (1, 2) if self.sides[1].has("faithful") else (2, 1)
        last = None
        for side in order:
            try:
                return ("S", side, self.sides[side].moved_point(g))
            except (ValueError, StructuralError) as exc:
                last = exc
        raise ValueError(f"no moved point on either side: {last}")

    def fix_empty(self, g):
        left = self.sides[1].fix_empty(g)
        right = self.sides[2].fix_empty(g)
        if left is None or right is None:
            return None
        return left + ("and on the other side: " + "; ".join(right),)

    def decode_point(self, obj):
        side = int(obj[1])
        return ("S", side, self.sides[side].decode_point(obj[2]))


def stabilize(action: Action) -> Stabilized:
    return Stabilized(action)


def disjoint_union(left: Action, right: Action) -> DisjointUnion:
    return DisjointUnion(left, right)


def induce(action: Action, ambient, side: int | None = None) -> Induced:
    return Induced(action, ambient, side)


def translation_action(group: BaseGroup) -> TranslationAction:
    return TranslationAction(group)


def reference_space(group, bases: Sequence[Action]) -> Stabilized:
    """The stabilized induced space an HNN or amalgam step starts from.

    HNN: copies of the action induced from the base. Amalgam: copies of the
    disjoint union of the two induced actions.
    """
    if isinstance(group, HNNGroup):
        (base,) = bases
        return Stabilized(Induced(base, group))
    if isinstance(group, AmalgamGroup):
        left, right = bases
        return Stabilized(DisjointUnion(Induced(left, group, 1), Induced(right, group, 2)))
    raise StructuralError("reference spaces exist for HNN and amalgam groups only")

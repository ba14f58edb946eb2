"""The requirement engine for one HNN or amalgam step.

The engine grows a partial bijection ``w`` of the reference space X, one free
orbit of the finite edge group at a time, and never revises a commitment.

* HNN mode: ``w(s x) = theta(s) w(x)``. The stable letter acts as ``w`` and the
  base acts as in X.
* Amalgam mode: ``w(s x) = s w(x)``. The first factor acts as in X and the
  second acts as ``w^-1 h w``.

Points that nobody has decided yet are completed lazily, to the reference value
(the stable letter, resp. the identity) when that target is still free and to a
point of a fresh copy otherwise.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .actions import (
    Action,
    FolnerWitness,
    LazySeq,
    PointTable,
    cantor_pair,
    measure,
    orbits,
    reference_space,
    saturate,
    worst_ratio,
)
from .composed import AmalgamGroup, HNNGroup
from .errors import BaireError, BudgetExceeded, InvariantViolation, search_budget


@dataclass(frozen=True)
class TransitivityWitness:
    engine: str
    source: object
    target: object
    word: object


@dataclass(frozen=True)
class FolnerCertificate:
    engine: str
    m: int
    elements: tuple  # group elements, aligned with witness.labels
    witness: FolnerWitness


@dataclass(frozen=True)
class FaithfulnessWitness:
    engine: str
    element: object
    point: object
    image: object


class RunAborted(BaireError):
    def __init__(self, cause: BaireError, certificates: list):
        self.cause = cause
        self.certificates = certificates
        super().__init__(f"run aborted after {len(certificates)} certificates: {cause}")


def copy_of(x) -> int:
    return x[2]


class Engine:
    def __init__(self, name: str, group, bases: Sequence[Action]):
        self.name = name
        self.group = group
        self.bases = tuple(bases)
        self.X = reference_space(group, bases)
        self.Y = self.X.base
        if isinstance(group, HNNGroup):
            self.mode = "hnn"
            self.dom_sigma = [group.embed(s) for s in group.sigma_sub.images]
            self.rng_sigma = [group.embed(s) for s in group.theta_sub.images]
            self._t_inv = group.inv(group.t)
        elif isinstance(group, AmalgamGroup):
            self.mode = "amalgam"
            self.dom_sigma = [group.sigma_element(s) for s in range(group.sigma.order)]
            self.rng_sigma = self.dom_sigma
        else:
            raise InvariantViolation("engines run on HNN or amalgam steps only")
        self.fwd: dict = {}
        self.bwd: dict = {}
        self.log: list = []
        self.touched: set = set()
        self.table = PointTable()
        self.certificates: list = []
        self._canon = LazySeq(self.X.points())
        self._pairs = 0
        self._m = 0
        self._words = None
        self._anchor = None

    # -- the partial conjugator ------------------------------------------

    def fresh_copy(self) -> int:
        n = max(self.touched, default=-1) + 1
        self.touched.add(n)
        return n

    def _fresh_point(self):
        if self._anchor is None:
            self._anchor = next(iter(self.Y.points()))
        return ("C", self._anchor, self.fresh_copy())

    def commit_orbit(self, x, z) -> None:
        """Commit ``w(s x) = s' z`` along the edge group, s' the range-side image of s."""
        pairs = []
        for a, b in zip(self.dom_sigma, self.rng_sigma):
            pairs.append((self.X.apply(a, x), self.X.apply(b, z)))
        xs = {p for p, _ in pairs}
        zs = {q for _, q in pairs}
        if len(xs) != len(pairs) or len(zs) != len(pairs):
            raise InvariantViolation("edge group does not act freely on a committed orbit")
        for p, q in pairs:
            if p in self.fwd or q in self.bwd:
                raise InvariantViolation(f"{self.name}: commitment would overwrite the log")
        for p, q in pairs:
            self.fwd[p] = q
            self.bwd[q] = p
            self.log.append((p, q))
            self.table.intern(p)
            self.table.intern(q)
            self.touched.add(copy_of(p))
            self.touched.add(copy_of(q))

    def restore(self, entries) -> None:
        """Replay a commitment log exported by an earlier run."""
        for p, q in entries:
            if p in self.fwd or q in self.bwd:
                raise InvariantViolation(f"{self.name}: log entry repeats a point")
            self.fwd[p] = q
            self.bwd[q] = p
            self.log.append((p, q))
            self.table.intern(p)
            self.table.intern(q)
            self.touched.add(copy_of(p))
            self.touched.add(copy_of(q))

    def apply_w(self, x):
        z = self.fwd.get(x)
        if z is not None:
            return z
        z = self.X.apply(self.group.t, x) if self.mode == "hnn" else x
        if z in self.bwd:
            z = self._fresh_point()
        self.commit_orbit(x, z)
        return z

    def apply_w_inverse(self, z):
        x = self.bwd.get(z)
        if x is not None:
            return x
        x = self.X.apply(self._t_inv, z) if self.mode == "hnn" else z
        if x in self.fwd:
            x = self._fresh_point()
        self.commit_orbit(x, z)
        return x

    def _act(self, g, x):
        return x if g == self.group.identity else self.X.apply(g, x)

    def evaluate(self, g, x):
        """pi_w(g) applied to x, completing w lazily where needed."""
        G = self.group
        if self.mode == "hnn":
            for eps, c in reversed(g.tail):
                x = self._act(G.embed(c), x)
                x = self.apply_w(x) if eps == 1 else self.apply_w_inverse(x)
            return self._act(G.embed(g.head), x)
        for side, c in reversed(g.syllables):
            h = G.embed(side, c)
            if side == 1:
                x = self._act(h, x)
            else:
                x = self.apply_w_inverse(self._act(h, self.apply_w(x)))
        return self._act(G.sigma_element(g.sigma), x)

    # -- requirements ----------------------------------------------------

    def canonical_point(self, i: int):
        x = self._canon.get(i)
        self.table.intern(x)
        return x

    def _search(self, elements, ok):
        budget = search_budget()
        for k, h in enumerate(elements):
            if k >= budget:
                break
            if ok(h):
                return h
        raise BudgetExceeded(
            f"{self.name}: orbit escape search exhausted",
            obstruction=len(self.fwd),
        )

    def extend_transitive(self, x, y) -> TransitivityWitness:
        G, X = self.group, self.X
        if x == y:
            return TransitivityWitness(self.name, x, y, G.identity)
        if self.mode == "hnn":
            H = G.base
            h1 = self._search(H.enumerate(), lambda h: X.apply(G.embed(h), x) not in self.fwd)
            h0 = self._search(H.enumerate(), lambda h: X.apply(G.embed(h), y) not in self.bwd)
            self.commit_orbit(X.apply(G.embed(h1), x), X.apply(G.embed(h0), y))
            word = G.product(G.embed(H.inv(h0)), G.t, G.embed(h1))
        else:
            G1, G2 = G.factors[1], G.factors[2]
            h1 = self._search(G1.enumerate(), lambda h: X.apply(G.embed(1, h), x) not in self.fwd)
            a = X.apply(G.embed(1, h1), x)
            orbit_a = {X.apply(s, a) for s in self.dom_sigma}

            def free_source(h):
                p = X.apply(G.embed(1, G1.inv(h)), y)
                return p not in self.fwd and p not in orbit_a

            h2 = self._search(G1.enumerate(), free_source)
            p = X.apply(G.embed(1, G1.inv(h2)), y)
            z = a if a not in self.bwd else self._fresh_point()
            orbit_z = {X.apply(s, z) for s in self.rng_sigma}

            def free_target(h):
                q = X.apply(G.embed(2, h), z)
                return q not in self.bwd and q not in orbit_z

            h = self._search(G2.enumerate(), free_target)
            self.commit_orbit(a, z)
            self.commit_orbit(p, X.apply(G.embed(2, h), z))
            word = G.product(G.embed(1, h2), G.embed(2, h), G.embed(1, h1))
        if self.evaluate(word, x) != y:
            raise InvariantViolation(f"{self.name}: transitivity witness does not reach its target")
        return TransitivityWitness(self.name, x, y, word)

    def _provider(self, action: Action, elements, sigma, tol) -> list:
        """A Følner set of ``action`` saturated under ``sigma``, recounted below ``tol``."""
        for j in range(24):
            S = saturate(action, sigma, action.folner(elements, tol / 2**j))
            if worst_ratio(action, elements, S) < tol:
                return S
        raise BudgetExceeded(f"{self.name}: no saturated Følner set below {tol}")

    def extend_folner(self, m: int) -> FolnerCertificate:
        if m < 1:
            raise ValueError("m must be positive")
        G, X = self.group, self.X
        bound = Fraction(1, m)
        if self.mode == "hnn":
            H = G.base
            base = self.Y.base
            gens = H.generators()
            thetas = [s for s in G.theta_sub.images if s != H.identity]
            tol = Fraction(1, 2 * m * G.sigma.order)
            D0 = self._provider(base, [h for _, h in gens] + thetas, G.sigma_sub.images, tol)
            n = self.fresh_copy()
            D = [("C", ("I", y, G.identity), n) for y in D0]
            src = orbits(X, self.dom_sigma, D)
            dst = orbits(X, self.rng_sigma, saturate(X, self.rng_sigma, D))
            for a, b in zip(src, dst):
                self.commit_orbit(a[0], b[0])
            labelled = [(name, G.embed(h)) for name, h in gens] + [(G.edge, G.t)]
            C = D
        else:
            G1, G2 = G.factors[1], G.factors[2]
            left, right = self.Y.sides[1].base, self.Y.sides[2].base
            gens1, gens2 = G1.generators(), G2.generators()
            C0 = self._provider(left, [g for _, g in gens1], G.subs[1].images, bound)
            D0 = self._provider(right, [h for _, h in gens2], G.subs[2].images, bound / 4)
            q1, q2 = self._match_sizes(len(C0), len(D0), m)
            C = [("C", ("S", 1, ("I", y, G.identity)), n) for n in [self.fresh_copy() for _ in range(q1)] for y in C0]
            D = [("C", ("S", 2, ("I", y, G.identity)), n) for n in [self.fresh_copy() for _ in range(q2)] for y in D0]
            src = orbits(X, self.dom_sigma, C)
            dst = orbits(X, self.rng_sigma, D)
            for a, b in zip(src, dst):
                self.commit_orbit(a[0], b[0])
            labelled = [(name, G.embed(1, g)) for name, g in gens1]
            labelled += [(f"w^-1 {name} w", G.embed(2, h)) for name, h in gens2]
        maps = [(label, (lambda p, g=g: self.evaluate(g, p))) for label, g in labelled]
        witness = measure(C, maps, bound)
        if not witness.holds():
            raise InvariantViolation(
                f"{self.name}: Følner surgery for m={m} recounts to {witness.ratio()}"
            )
        return FolnerCertificate(self.name, m, tuple(g for _, g in labelled), witness)

    @staticmethod
    def _match_sizes(c: int, d: int, m: int) -> tuple[int, int]:
        """Copy counts with |q2 d - q1 c| < q1 c / (4m)."""
        for q1 in itertools.count(1):
            q2 = max(1, round(Fraction(q1 * c, d)))
            if 4 * m * abs(q2 * d - q1 * c) < q1 * c:
                return q1, q2

    def extend_faithful(self, g) -> FaithfulnessWitness:
        if g == self.group.identity:
            raise ValueError("the identity cannot be a faithfulness requirement")
        y = self.Y.moved_point(g)
        p = ("C", y, self.fresh_copy())
        q = self.evaluate(g, p)
        if q == p or q != self.X.apply(g, p):
            raise InvariantViolation(f"{self.name}: fresh copy evaluation left the reference")
        self.table.intern(p)
        return FaithfulnessWitness(self.name, g, p, q)

    def fix_empty(self, g):
        G = self.group
        if g == G.identity:
            return None
        if self.mode == "hnn":
            if not G.in_base(g):
                return None
            chain = self.X.fix_empty(g)
            return None if chain is None else chain + ("base elements act as in the reference",)
        for side, why in ((1, "first factor acts as in the reference"), (2, "conjugation by w keeps empty fixed sets")):
            if G.in_factor(g, side):
                chain = self.X.fix_empty(g)
                return None if chain is None else chain + (why,)
        return None

    def folner(self, elements, eps) -> list:
        """A Følner set of pi_w for arbitrary elements, via certified surgeries."""
        eps = Fraction(eps)
        elements = list(elements)
        m = max(1, math.ceil(1 / eps))
        for _ in range(12):
            cert = self.extend_folner(m)
            pts = list(cert.witness.points)
            members = set(pts)
            if all(
                sum(1 for x in pts if self.evaluate(g, x) not in members) * 2 < eps * len(pts)
                for g in elements
            ):
                return pts
            m *= 2
        raise BudgetExceeded(f"{self.name}: Følner sets for the requested elements not found")

    # -- scheduling ------------------------------------------------------

    def _next_word(self):
        if self._words is None:
            self._words = (g for g in self.group.enumerate() if g != self.group.identity)
        return next(self._words)

    def step(self, r: int):
        kind = r % 3
        if kind == 0:
            i, j = cantor_pair(self._pairs)
            self._pairs += 1
            return self.extend_transitive(self.canonical_point(i), self.canonical_point(j))
        if kind == 1:
            self._m += 1
            return self.extend_folner(self._m)
        return self.extend_faithful(self._next_word())

    def run_schedule(self, budget: int) -> list:
        """Transitive, Folner, Faithful requirements in turn, ``budget`` in total."""
        done = len(self.certificates)
        for r in range(done, done + budget):
            try:
                cert = self.step(r)
            except BaireError as exc:
                raise RunAborted(exc, list(self.certificates)) from exc
            self.certificates.append(cert)
        return list(self.certificates)


class PiAction(Action):
    """The action pi_w of an engine, usable as the base of an enclosing step."""

    def __init__(self, engine: Engine):
        self.engine = engine
        self.group = engine.group
        reason = "requirement engine"
        self.guarantees = {
            "faithful": reason,
            "transitive": reason,
            "amenable": reason,
            "infinite_orbits": reason,
        }

    def apply(self, g, x):
        return self.engine.evaluate(g, x)

    def points(self):
        return self.engine.X.points()

    def folner(self, elements, eps):
        return self.engine.folner(elements, eps)

    def moved_point(self, g):
        return self.engine.extend_faithful(g).point

    def fix_empty(self, g):
        return self.engine.fix_empty(g)

    def decode_point(self, obj):
        return self.engine.X.decode_point(obj)

"""HNN extensions and amalgamated free products over finite subgroups, with normal forms.

Elements are kept in right-normalized form: every syllable after the head is the
key-least element of its right coset modulo the relevant finite subgroup, so the
representation of an element is unique and the word problem is equality of tuples.
"""

from __future__ import annotations

from typing import Iterator, NamedTuple

from .groups import BaseElement, BaseGroup, FiniteGroup, FiniteSubgroup


class HNNElement(NamedTuple):
    head: object
    tail: tuple  # ((eps, c), ...) with eps in {1, -1}


class AmalgamElement(NamedTuple):
    sigma: int
    syllables: tuple  # ((side, c), ...) with side in {1, 2}, alternating


def vertices_of(group) -> frozenset:
    if isinstance(group, BaseGroup):
        return frozenset([group.name])
    return group.vertices


def include_vertex(group, vertex: str, x):
    if isinstance(group, BaseGroup):
        if vertex != group.name:
            raise KeyError(vertex)
        return x
    return group.include_vertex(vertex, x)


def stable_letter(group, edge: str):
    if isinstance(group, BaseGroup):
        raise KeyError(edge)
    return group.stable_letter(edge)


def edge_length(group, g) -> int:
    """Number of stable letters in the flattened normal form."""
    if isinstance(group, BaseGroup):
        return 0
    return group.edge_length(g)


def letters(group, g) -> list[str]:
    if isinstance(group, BaseGroup):
        return [] if g == group.identity else [f"{group.name}:{group.format(g)}"]
    return group.letters(g)


def format_element(group, g) -> str:
    return " ".join(letters(group, g)) or "1"


class _ComposedBase:
    """Shared enumeration and caching for composed groups."""

    is_finite = False

    def __init__(self):
        self._key_cache: dict = {}
        self._mul_cache: dict = {}

    def key(self, g) -> tuple:
        k = self._key_cache.get(g)
        if k is None:
            k = self._key(g)
            self._key_cache[g] = k
        return k

    def mul(self, g, x):
        pair = (g, x)
        r = self._mul_cache.get(pair)
        if r is None:
            r = self._mul(g, x)
            if len(self._mul_cache) > 200_000:
                self._mul_cache.clear()
            self._mul_cache[pair] = r
        return r

    def product(self, *elements):
        result = self.identity
        for e in elements:
            result = self.mul(result, e)
        return result

    def power(self, g, n: int):
        base = g if n >= 0 else self.inv(g)
        result = self.identity
        for _ in range(abs(n)):
            result = self.mul(result, base)
        return result

    def spheres(self) -> Iterator[list]:
        """Spheres of the word metric for :meth:`generators`, each sorted by (edge length, key)."""
        gens = [g for _, g in self.generators()]
        seen = {self.identity}
        sphere = [self.identity]
        while sphere:
            yield sphere
            nxt = []
            for x in sphere:
                for s in gens:
                    y = self.mul(x, s)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            nxt.sort(key=lambda y: (self.edge_length(y), self.key(y)))
            sphere = nxt

    def enumerate(self) -> Iterator:
        for sphere in self.spheres():
            yield from sphere

    def ball(self, radius: int) -> list:
        out = []
        for r, sphere in enumerate(self.spheres()):
            if r > radius:
                break
            out.extend(sphere)
        return out

    def format(self, g) -> str:
        return format_element(self, g)


class HNNGroup(_ComposedBase):
    """HNN(H, S, theta) = <H, t | t s t^-1 = theta(s)>.

    ``sigma_images`` and ``theta_images`` are the two images of the abstract finite
    group in ``H``; the stable letter is named after ``edge``.
    """

    def __init__(self, base, sigma: FiniteGroup, sigma_images, theta_images, edge: str = "t"):
        super().__init__()
        self.base = base
        self.sigma = sigma
        self.sigma_sub = FiniteSubgroup(base, sigma, sigma_images)
        self.theta_sub = FiniteSubgroup(base, sigma, theta_images)
        self.edge = edge
        self.identity = HNNElement(base.identity, ())
        self.t = HNNElement(base.identity, ((1, base.identity),))
        self.vertices = vertices_of(base)

    def embed(self, h) -> HNNElement:
        return HNNElement(h, ())

    def _push(self, head, tail: list, x):
        H = self.base
        i = len(tail) - 1
        while i >= 0:
            eps, c = tail[i]
            sub = self.sigma_sub if eps == 1 else self.theta_sub
            s, c2 = sub.decompose(H.mul(c, x))
            tail[i] = (eps, c2)
            if s == 0:
                return head
            # t s = theta(s) t  and  t^-1 theta(s) = s t^-1
            x = self.theta_sub.images[s] if eps == 1 else self.sigma_sub.images[s]
            i -= 1
        return H.mul(head, x)

    def _append_t(self, tail: list, eps: int) -> None:
        one = self.base.identity
        if tail and tail[-1] == (-eps, one):
            tail.pop()
        else:
            tail.append((eps, one))

    def _mul(self, g: HNNElement, x: HNNElement) -> HNNElement:
        tail = list(g.tail)
        head = self._push(g.head, tail, x.head)
        for eps, c in x.tail:
            self._append_t(tail, eps)
            head = self._push(head, tail, c)
        return HNNElement(head, tuple(tail))

    def inv(self, g: HNNElement) -> HNNElement:
        H = self.base
        result_head, tail = H.identity, []
        for eps, c in reversed(g.tail):
            result_head = self._push(result_head, tail, H.inv(c))
            self._append_t(tail, -eps)
        result_head = self._push(result_head, tail, H.inv(g.head))
        return HNNElement(result_head, tuple(tail))

    def _key(self, g: HNNElement) -> tuple:
        H = self.base
        return (len(g.tail), H.key(g.head), tuple((eps, H.key(c)) for eps, c in g.tail))

    def generators(self) -> list:
        gens = [(name, self.embed(h)) for name, h in self.base.generators()]
        gens.append((self.edge, self.t))
        gens.append((f"{self.edge}^-1", self.inv(self.t)))
        return gens

    def split(self, g: HNNElement):
        """``g = h * r`` with ``h`` in the base and ``r`` the canonical rep of the coset ``H g``."""
        return g.head, HNNElement(self.base.identity, g.tail)

    def in_base(self, g: HNNElement) -> bool:
        return not g.tail

    def edge_length(self, g: HNNElement) -> int:
        H = self.base
        return len(g.tail) + edge_length(H, g.head) + sum(edge_length(H, c) for _, c in g.tail)

    def letters(self, g: HNNElement) -> list[str]:
        H = self.base
        out = letters(H, g.head)
        for eps, c in g.tail:
            out.append(self.edge if eps == 1 else f"{self.edge}^-1")
            out.extend(letters(H, c))
        return out

    def include_vertex(self, vertex: str, x):
        return self.embed(include_vertex(self.base, vertex, x))

    def stable_letter(self, edge: str):
        if edge == self.edge:
            return self.t
        return self.embed(stable_letter(self.base, edge))

    def decode(self, obj) -> HNNElement:
        head, tail = obj
        H = self.base
        return HNNElement(H.decode(head), tuple((int(e), H.decode(c)) for e, c in tail))

    def __repr__(self):
        return f"HNN({self.base!r}, |S|={self.sigma.order}, {self.edge})"


class AmalgamGroup(_ComposedBase):
    """G1 *_S G2 with S embedded in each factor."""

    def __init__(self, left, right, sigma: FiniteGroup, left_images, right_images, edge: str = "e"):
        super().__init__()
        self.factors = {1: left, 2: right}
        self.sigma = sigma
        self.subs = {
            1: FiniteSubgroup(left, sigma, left_images),
            2: FiniteSubgroup(right, sigma, right_images),
        }
        self.edge = edge
        self.identity = AmalgamElement(0, ())
        self.vertices = vertices_of(left) | vertices_of(right)

    def _carry(self, s0: int, syl: list, i: int, s: int) -> int:
        while s != 0 and i >= 0:
            side, c = syl[i]
            G = self.factors[side]
            s, c2 = self.subs[side].decompose(G.mul(c, self.subs[side].images[s]))
            syl[i] = (side, c2)
            i -= 1
        if s != 0:
            s0 = self.sigma.mul(s0, s)
        return s0

    def _push(self, s0: int, syl: list, side: int, x) -> int:
        G = self.factors[side]
        if syl and syl[-1][0] == side:
            c = G.mul(syl.pop()[1], x)
        else:
            c = x
        s, c2 = self.subs[side].decompose(c)
        if c2 != G.identity:
            syl.append((side, c2))
            i = len(syl) - 2
        else:
            i = len(syl) - 1
        return self._carry(s0, syl, i, s)

    def _mul(self, g: AmalgamElement, x: AmalgamElement) -> AmalgamElement:
        syl = list(g.syllables)
        s0 = self._carry(g.sigma, syl, len(syl) - 1, x.sigma)
        for side, c in x.syllables:
            s0 = self._push(s0, syl, side, c)
        return AmalgamElement(s0, tuple(syl))

    def inv(self, g: AmalgamElement) -> AmalgamElement:
        syl: list = []
        s0 = 0
        for side, c in reversed(g.syllables):
            s0 = self._push(s0, syl, side, self.factors[side].inv(c))
        s0 = self._carry(s0, syl, len(syl) - 1, self.sigma.inv(g.sigma))
        return AmalgamElement(s0, tuple(syl))

    def embed(self, side: int, x) -> AmalgamElement:
        syl: list = []
        s0 = self._push(0, syl, side, x)
        return AmalgamElement(s0, tuple(syl))

    def sigma_element(self, s: int) -> AmalgamElement:
        return AmalgamElement(s, ())

    def _key(self, g: AmalgamElement) -> tuple:
        return (
            len(g.syllables),
            g.sigma,
            tuple((side, self.factors[side].key(c)) for side, c in g.syllables),
        )

    def generators(self) -> list:
        gens, seen = [], set()
        for side in (1, 2):
            for name, x in self.factors[side].generators():
                y = self.embed(side, x)
                if y not in seen:
                    seen.add(y)
                    gens.append((name, y))
        return gens

    def split(self, g: AmalgamElement, side: int):
        """``g = h * r`` with ``h`` in factor ``side`` and ``r`` canonical for the coset."""
        G = self.factors[side]
        h = self.subs[side].images[g.sigma]
        rest = g.syllables
        if rest and rest[0][0] == side:
            h = G.mul(h, rest[0][1])
            rest = rest[1:]
        return h, AmalgamElement(0, rest)

    def in_factor(self, g: AmalgamElement, side: int) -> bool:
        syl = g.syllables
        return not syl or (len(syl) == 1 and syl[0][0] == side)

    def factor_part(self, g: AmalgamElement, side: int):
        """The factor element equal to ``g``; only valid when :meth:`in_factor` holds."""
        return self.split(g, side)[0]

    def edge_length(self, g: AmalgamElement) -> int:
        return sum(edge_length(self.factors[side], c) for side, c in g.syllables)

    def letters(self, g: AmalgamElement) -> list[str]:
        out: list[str] = []
        left = self.factors[1]
        if g.sigma:
            out.extend(letters(left, self.subs[1].images[g.sigma]))
        for side, c in g.syllables:
            out.extend(letters(self.factors[side], c))
        return out

    def side_of_vertex(self, vertex: str) -> int:
        if vertex in vertices_of(self.factors[1]):
            return 1
        if vertex in vertices_of(self.factors[2]):
            return 2
        raise KeyError(vertex)

    def include_vertex(self, vertex: str, x):
        side = self.side_of_vertex(vertex)
        return self.embed(side, include_vertex(self.factors[side], vertex, x))

    def stable_letter(self, edge: str):
        for side in (1, 2):
            try:
                return self.embed(side, stable_letter(self.factors[side], edge))
            except KeyError:
                continue
        raise KeyError(edge)

    def decode(self, obj) -> AmalgamElement:
        s0, syl = obj
        return AmalgamElement(
            int(s0), tuple((int(side), self.factors[int(side)].decode(c)) for side, c in syl)
        )

    def __repr__(self):
        return f"Amalgam({self.factors[1]!r} *_{self.sigma.order} {self.factors[2]!r}, {self.edge})"


def is_composed(group) -> bool:
    return isinstance(group, (HNNGroup, AmalgamGroup))


__all__ = [
    "AmalgamElement",
    "AmalgamGroup",
    "BaseElement",
    "HNNElement",
    "HNNGroup",
    "edge_length",
    "format_element",
    "include_vertex",
    "is_composed",
    "letters",
    "stable_letter",
    "vertices_of",
]

"""Vertex and edge groups: finite groups by table, and Z^d x F."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, NamedTuple, Sequence

from .errors import EmbeddingError, StructuralError, ValidationError


class FiniteGroup:
    """A finite group given by its multiplication table; element 0 is the identity."""

    def __init__(self, mul_table: Sequence[Sequence[int]], names: Sequence[str] | None = None):
        table = tuple(tuple(int(v) for v in row) for row in mul_table)
        n = len(table)
        if n == 0:
            raise ValidationError("multiplication table is empty")
        if names is None:
            names = ["e"] + [f"f{i}" for i in range(1, n)]
        if len(names) != n:
            raise ValidationError(f"expected {n} element names, got {len(names)}")
        self.order = n
        self.mul_table = table
        self.names = tuple(names)
        self._validate()
        self.inv_table = tuple(row.index(0) for row in table)

    def _validate(self) -> None:
        n = self.order
        full = set(range(n))
        for i, row in enumerate(self.mul_table):
            if len(row) != n:
                raise ValidationError(f"row {i} has length {len(row)}, expected {n}")
            if set(row) != full:
                raise ValidationError(f"row {i} is not a permutation of 0..{n - 1}")
        for j in range(n):
            if {self.mul_table[i][j] for i in range(n)} != full:
                raise ValidationError(f"column {j} is not a permutation of 0..{n - 1}")
        for i in range(n):
            if self.mul_table[0][i] != i or self.mul_table[i][0] != i:
                raise ValidationError("element 0 is not the identity")
        m = self.mul_table
        for a, b, c in itertools.product(range(n), repeat=3):
            if m[m[a][b]][c] != m[a][m[b][c]]:
                raise ValidationError(f"associativity fails on ({a}, {b}, {c})")

    def mul(self, a: int, b: int) -> int:
        return self.mul_table[a][b]

    def inv(self, a: int) -> int:
        return self.inv_table[a]

    @property
    def identity(self) -> int:
        return 0

    def elements(self) -> range:
        return range(self.order)

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != 0:
            x = self.mul(x, a)
            k += 1
        return k

    def __eq__(self, other):
        return isinstance(other, FiniteGroup) and self.mul_table == other.mul_table

    def __hash__(self):
        return hash(self.mul_table)

    def __repr__(self):
        return f"FiniteGroup(order={self.order})"

    @classmethod
    def trivial(cls) -> FiniteGroup:
        return cls([[0]])

    @classmethod
    def cyclic(cls, n: int, gen: str = "a") -> FiniteGroup:
        names = ["e"] + [gen if k == 1 else f"{gen}{k}" for k in range(1, n)]
        return cls([[(i + j) % n for j in range(n)] for i in range(n)], names)

    @classmethod
    def from_permutations(cls, perms: Sequence[Sequence[int]]) -> FiniteGroup:
        """Group of the given permutations (composition (p*q)(i) = p[q[i]]), identity first."""
        perms = [tuple(p) for p in perms]
        index = {p: i for i, p in enumerate(perms)}
        if tuple(range(len(perms[0]))) != perms[0]:
            raise ValidationError("first permutation must be the identity")
        table = [[index[tuple(p[q[i]] for i in range(len(p)))] for q in perms] for p in perms]
        return cls(table)


class BaseElement(NamedTuple):
    vector: tuple[int, ...]
    fin: int


@dataclass(frozen=True)
class BaseGroup:
    """Z^rank x finite_part with componentwise multiplication."""

    rank: int
    finite_part: FiniteGroup = field(default_factory=FiniteGroup.trivial)
    name: str = "G"

    @property
    def is_finite(self) -> bool:
        return self.rank == 0

    @cached_property
    def identity(self) -> BaseElement:
        return BaseElement((0,) * self.rank, 0)

    def element(self, vector: Sequence[int] = (), fin: int = 0) -> BaseElement:
        g = BaseElement(tuple(int(v) for v in vector), int(fin))
        self.check(g)
        return g

    def check(self, g) -> None:
        if not isinstance(g, tuple) or len(g) != 2 or len(g[0]) != self.rank:
            raise StructuralError(f"{g!r} is not an element of {self}")
        if not 0 <= g[1] < self.finite_part.order:
            raise StructuralError(f"{g!r} has finite index outside {self}")

    def mul(self, g: BaseElement, h: BaseElement) -> BaseElement:
        self.check(g)
        self.check(h)
        return BaseElement(
            tuple(a + b for a, b in zip(g.vector, h.vector)),
            self.finite_part.mul(g.fin, h.fin),
        )

    def inv(self, g: BaseElement) -> BaseElement:
        return BaseElement(tuple(-a for a in g.vector), self.finite_part.inv(g.fin))

    def power(self, g: BaseElement, n: int) -> BaseElement:
        result = self.identity
        base = g if n >= 0 else self.inv(g)
        for _ in range(abs(n)):
            result = self.mul(result, base)
        return result

    def is_torsion(self, g: BaseElement) -> bool:
        return not any(g.vector)

    def key(self, g: BaseElement) -> tuple:
        norm = max((abs(v) for v in g.vector), default=0)
        return (norm, g.vector, g.fin)

    def generators(self) -> list[tuple[str, BaseElement]]:
        gens = []
        for i in range(self.rank):
            unit = [0] * self.rank
            unit[i] = 1
            gens.append((f"{self.name}.z{i + 1}", BaseElement(tuple(unit), 0)))
            unit[i] = -1
            gens.append((f"{self.name}.z{i + 1}^-1", BaseElement(tuple(unit), 0)))
        for f in range(1, self.finite_part.order):
            gens.append((f"{self.name}.{self.finite_part.names[f]}", BaseElement((0,) * self.rank, f)))
        return gens

    def enumerate(self) -> Iterator[BaseElement]:
        """Max-norm shells, lexicographic inside a shell, then finite index."""
        fins = range(self.finite_part.order)
        if self.rank == 0:
            for f in fins:
                yield BaseElement((), f)
            return
        for r in itertools.count():
            for vec in itertools.product(range(-r, r + 1), repeat=self.rank):
                if max(abs(v) for v in vec) != r:
                    continue
                for f in fins:
                    yield BaseElement(vec, f)

    def position(self, g: BaseElement) -> int:
        """Index of ``g`` in :meth:`enumerate`."""
        self.check(g)
        n, d = self.finite_part.order, self.rank
        if d == 0:
            return g.fin
        r = max(abs(v) for v in g.vector)
        before = (2 * r - 1) ** d if r > 0 else 0
        # vectors of the shell r that precede g.vector lexicographically
        rank_in_shell = 0
        hit = False
        for i, vi in enumerate(g.vector):
            rem = d - i - 1
            for a in range(-r, vi):
                if hit or abs(a) == r:
                    rank_in_shell += (2 * r + 1) ** rem
                else:
                    rank_in_shell += (2 * r + 1) ** rem - (2 * r - 1) ** rem
            hit = hit or abs(vi) == r
        return (before + rank_in_shell) * n + g.fin

    def format(self, g: BaseElement) -> str:
        vec = ",".join(str(v) for v in g.vector)
        return f"({vec};{self.finite_part.names[g.fin]})" if vec else f"({self.finite_part.names[g.fin]})"

    def decode(self, obj) -> BaseElement:
        vec, fin = obj
        return self.element(vec, fin)

    def __repr__(self):
        return f"BaseGroup(Z^{self.rank} x {self.finite_part!r}, name={self.name!r})"


@dataclass(frozen=True)
class Embedding:
    """An injective homomorphism from a finite group, given by images of its elements."""

    domain: FiniteGroup
    codomain: object
    images: tuple

    def __call__(self, a: int):
        return self.images[a]


def _codomain_ops(codomain):
    if isinstance(codomain, FiniteGroup):
        return codomain.mul, (lambda g: True), (lambda g: 0 <= g < codomain.order)
    return codomain.mul, codomain.is_torsion, (lambda g: codomain.check(g) is None)


def check_embedding(emb: Embedding) -> None:
    """Raise :class:`EmbeddingError` unless ``emb`` is an injective homomorphism into torsion."""
    dom = emb.domain
    if len(emb.images) != dom.order:
        raise EmbeddingError(f"expected {dom.order} images, got {len(emb.images)}")
    mul, torsion, member = _codomain_ops(emb.codomain)
    for a, img in enumerate(emb.images):
        try:
            member(img)
        except StructuralError as exc:
            raise EmbeddingError(f"image of {dom.names[a]} is not in the codomain: {exc}", (a,)) from exc
        if not torsion(img):
            raise EmbeddingError(f"image of {dom.names[a]} has infinite order", (a,))
    for a, b in itertools.product(dom.elements(), repeat=2):
        if mul(emb.images[a], emb.images[b]) != emb.images[dom.mul(a, b)]:
            raise EmbeddingError(
                f"not a homomorphism on ({dom.names[a]}, {dom.names[b]})", (a, b)
            )
    seen = {}
    for a, img in enumerate(emb.images):
        if img in seen:
            raise EmbeddingError(
                f"not injective: {dom.names[seen[img]]} and {dom.names[a]} share an image",
                (seen[img], a),
            )
        seen[img] = a


class FiniteSubgroup:
    """Image of a finite group inside an arbitrary group, with right-coset transversals.

    The transversal element of ``S x`` is the key-least element of the coset.
    """

    def __init__(self, ambient, sigma: FiniteGroup, images: Sequence):
        self.ambient = ambient
        self.sigma = sigma
        self.images = tuple(images)
        self._cache: dict = {}

    def __len__(self):
        return self.sigma.order

    def __iter__(self):
        return iter(self.images)

    def decompose(self, x):
        """Return ``(s, c)`` with ``x = images[s] * c`` and ``c`` the transversal of ``S x``."""
        hit = self._cache.get(x)
        if hit is not None:
            return hit
        amb = self.ambient
        best = None
        for s, img in enumerate(self.images):
            y = amb.mul(img, x)
            k = amb.key(y)
            if best is None or k < best[0]:
                best = (k, s, y)
        _, s, c = best
        # x = images[s]^{-1} c
        result = (self.sigma.inv(s), c)
        self._cache[x] = result
        return result

    def rep(self, x):
        return self.decompose(x)[1]

    def contains(self, x) -> bool:
        return x in self.images

    def index_of(self, x) -> int:
        return self.images.index(x)

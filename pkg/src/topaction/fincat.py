"""Finite categories stored as explicit composition tables.

Objects and morphisms are plain integer indices; any naming lives in the
file formats, not here.  ``compose_table[g][f]`` holds the index of ``g∘f``
and is ``None`` exactly when ``cod(f) != dom(g)``.  All constructors keep
the identity of object ``c`` at morphism index ``c``, so the non-identity
morphisms occupy the indices from ``num_objects`` upward.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product


@dataclass(frozen=True)
class FiniteCategory:
    num_objects: int
    dom: tuple[int, ...]
    cod: tuple[int, ...]
    identity: tuple[int, ...]
    compose_table: tuple[tuple[int | None, ...], ...]

    @property
    def num_morphisms(self) -> int:
        return len(self.dom)

    def objects(self) -> range:
        return range(self.num_objects)

    def morphisms(self) -> range:
        return range(len(self.dom))

    def compose(self, g: int, f: int) -> int:
        """Index of g∘f; defined exactly when cod(f) == dom(g)."""
        h = self.compose_table[g][f]
        if h is None:
            raise ValueError(f"morphisms {g} and {f} are not composable")
        return h

    def is_identity(self, f: int) -> bool:
        return self.identity[self.dom[f]] == f

    @cached_property
    def _non_identity(self) -> tuple[int, ...]:
        return tuple(f for f in self.morphisms() if not self.is_identity(f))

    def non_identity_morphisms(self) -> tuple[int, ...]:
        return self._non_identity

    def hom(self, c: int, d: int) -> list[int]:
        return [f for f in self.morphisms() if self.dom[f] == c and self.cod[f] == d]

    def composable_pairs(self) -> list[tuple[int, int]]:
        """All (g, f) with cod(f) == dom(g), identities included."""
        return [
            (g, f)
            for g in self.morphisms()
            for f in self.morphisms()
            if self.cod[f] == self.dom[g]
        ]

    def validate(self) -> None:
        n, m = self.num_objects, self.num_morphisms
        if len(self.cod) != m or len(self.identity) != n:
            raise ValueError("table sizes are inconsistent")
        if len(self.compose_table) != m or any(len(row) != m for row in self.compose_table):
            raise ValueError("composition table has wrong shape")
        for c in self.objects():
            i = self.identity[c]
            if self.dom[i] != c or self.cod[i] != c:
                raise ValueError(f"identity of object {c} has wrong endpoints")
        for g, f in product(self.morphisms(), repeat=2):
            h = self.compose_table[g][f]
            if (h is None) != (self.cod[f] != self.dom[g]):
                raise ValueError(f"composition defined on wrong pairs at ({g}, {f})")
            if h is not None and (self.dom[h] != self.dom[f] or self.cod[h] != self.cod[g]):
                raise ValueError(f"composite {h} of ({g}, {f}) has wrong endpoints")
        for f in self.morphisms():
            if self.compose(self.identity[self.cod[f]], f) != f:
                raise ValueError(f"left identity law fails at morphism {f}")
            if self.compose(f, self.identity[self.dom[f]]) != f:
                raise ValueError(f"right identity law fails at morphism {f}")
        for h in self.morphisms():
            for g in self.morphisms():
                if self.cod[g] != self.dom[h]:
                    continue
                for f in self.morphisms():
                    if self.cod[f] != self.dom[g]:
                        continue
                    if self.compose(h, self.compose(g, f)) != self.compose(self.compose(h, g), f):
                        raise ValueError(f"associativity fails at ({h}, {g}, {f})")


# Object/morphism layout of build_arrow(): one arrow from the lower to the
# upper object, so presheaf restriction along it is the structure map
# upper level -> lower level.
ARROW_LOWER = 0
ARROW_UPPER = 1
ARROW_MAP = 2


def build_terminal() -> FiniteCategory:
    """The one-object category with only its identity."""
    return FiniteCategory(
        num_objects=1,
        dom=(0,),
        cod=(0,),
        identity=(0,),
        compose_table=((0,),),
    )


def build_arrow() -> FiniteCategory:
    """Two objects joined by a single non-identity morphism."""
    return FiniteCategory(
        num_objects=2,
        dom=(0, 1, 0),
        cod=(0, 1, 1),
        identity=(0, 1),
        compose_table=(
            (0, None, None),
            (None, 1, 2),
            (2, None, None),
        ),
    )


@dataclass(frozen=True)
class PosetCategory:
    """A finite poset; ``leq[a][b]`` is the order relation on indices."""

    size: int
    leq: tuple[tuple[bool, ...], ...]

    def elements(self) -> range:
        return range(self.size)

    def validate(self) -> None:
        if len(self.leq) != self.size or any(len(r) != self.size for r in self.leq):
            raise ValueError("relation table has wrong shape")
        for a in self.elements():
            if not self.leq[a][a]:
                raise ValueError(f"order not reflexive at {a}")
        for a, b in product(self.elements(), repeat=2):
            if a != b and self.leq[a][b] and self.leq[b][a]:
                raise ValueError(f"order not antisymmetric at ({a}, {b})")
        for a, b, c in product(self.elements(), repeat=3):
            if self.leq[a][b] and self.leq[b][c] and not self.leq[a][c]:
                raise ValueError(f"order not transitive at ({a}, {b}, {c})")

    def lower_bounds(self, a: int, b: int) -> list[int]:
        return [x for x in self.elements() if self.leq[x][a] and self.leq[x][b]]

    def upper_bounds(self, a: int, b: int) -> list[int]:
        return [x for x in self.elements() if self.leq[a][x] and self.leq[b][x]]

    def meet(self, a: int, b: int) -> int | None:
        lows = self.lower_bounds(a, b)
        best = [x for x in lows if all(self.leq[y][x] for y in lows)]
        return best[0] if best else None

    def join(self, a: int, b: int) -> int | None:
        ups = self.upper_bounds(a, b)
        best = [x for x in ups if all(self.leq[x][y] for y in ups)]
        return best[0] if best else None

    def join_of(self, xs: list[int]) -> int | None:
        """Least upper bound of a nonempty list, when it exists."""
        ups = [y for y in self.elements() if all(self.leq[x][y] for x in xs)]
        best = [y for y in ups if all(self.leq[y][z] for z in ups)]
        return best[0] if best else None

    def to_category(self) -> tuple[FiniteCategory, tuple[tuple[int, int], ...]]:
        """Thin category of the poset plus the (dom, cod) pair of each morphism."""
        pairs = [(c, c) for c in self.elements()]
        pairs += [
            (c, d)
            for c in self.elements()
            for d in self.elements()
            if c != d and self.leq[c][d]
        ]
        index = {p: i for i, p in enumerate(pairs)}
        table = tuple(
            tuple(
                index[(pairs[f][0], pairs[g][1])] if pairs[f][1] == pairs[g][0] else None
                for f in range(len(pairs))
            )
            for g in range(len(pairs))
        )
        cat = FiniteCategory(
            num_objects=self.size,
            dom=tuple(p[0] for p in pairs),
            cod=tuple(p[1] for p in pairs),
            identity=tuple(range(self.size)),
            compose_table=table,
        )
        return cat, tuple(pairs)


def grid_index(i: int, j: int, n: int) -> int:
    return i * (n + 1) + j


def grid_coords(e: int, n: int) -> tuple[int, int]:
    return divmod(e, n + 1)


def build_grid_poset(n: int) -> PosetCategory:
    """The (n+1)x(n+1) coordinate grid with the reversed product order.

    (i, j) <= (i', j') holds when i >= i' and j >= j', so (0, 0) is the top
    element and (n, n) the bottom.
    """
    if n < 1:
        raise ValueError("grid size must be at least 1")
    size = (n + 1) * (n + 1)
    leq = tuple(
        tuple(
            a // (n + 1) >= b // (n + 1) and a % (n + 1) >= b % (n + 1)
            for b in range(size)
        )
        for a in range(size)
    )
    return PosetCategory(size=size, leq=leq)

"""Sheaves of pointed sets on truncated grid lattices.

The index shape is the (n+1)x(n+1) grid with reversed product order, so
(0, 0) sits on top and sections restrict towards larger coordinates.  A
"south-west" step increases the second coordinate, a "south-east" step the
first.  Coverings are the elementary two-element ones: (i, j) is covered by
(i, j') and (i', j) with j' > j and i' > i, both inside the grid, and a
compatible pair must agree at the meet (i', j').

Epimorphism and normality tests use the local semantics: a condition holds
at a level when it holds on the nose or on both members of some elementary
covering, recursively.  On the truncated grid the recursion always bottoms
out because covering members sit strictly lower.

Truncation clips away every covering of the last row and column (no
strictly larger coordinate is available there), so those edge levels carry
no local obligations: the lifting predicates quantify over the levels that
still own at least one covering.  Whenever they answer true on the clipped
grid, the same witnesses certify the statement over the unbounded lattice;
quantifying the edge levels too would instead report failures that are pure
clipping artifacts.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .exactness import is_normal_epi, wide_pullback
from .fincat import FiniteCategory, PosetCategory, build_grid_poset, grid_coords, grid_index
from .presheaf import PointedPresheaf, PointedSet, PresheafMorphism


@dataclass(frozen=True)
class GridSite:
    size: int
    poset: PosetCategory
    category: FiniteCategory
    arrow_table: tuple[tuple[int | None, ...], ...]
    coverings: tuple[tuple[tuple[int, int], ...], ...]

    def arrow(self, lower: int, upper: int) -> int:
        """Index of the unique shape morphism lower -> upper (lower <= upper)."""
        m = self.arrow_table[lower][upper]
        if m is None:
            raise ValueError(f"elements {lower} and {upper} are not comparable that way")
        return m

    def restrict_section(self, f: PointedPresheaf, from_elem: int, to_elem: int, section: int) -> int:
        return f.restrict[self.arrow(to_elem, from_elem)][section]


def build_site(n: int) -> GridSite:
    poset = build_grid_poset(n)
    category, pairs = poset.to_category()
    table: list[list[int | None]] = [
        [None] * poset.size for _ in range(poset.size)
    ]
    for idx, (c, d) in enumerate(pairs):
        table[c][d] = idx
    coverings = []
    for e in poset.elements():
        i, j = grid_coords(e, n)
        covers = tuple(
            (grid_index(i, jj, n), grid_index(ii, j, n))
            for jj in range(j + 1, n + 1)
            for ii in range(i + 1, n + 1)
        )
        coverings.append(covers)
    return GridSite(
        size=n,
        poset=poset,
        category=category,
        arrow_table=tuple(tuple(row) for row in table),
        coverings=tuple(coverings),
    )


@dataclass(frozen=True)
class GridSheaf:
    site: GridSite
    underlying: PointedPresheaf


def is_sheaf(site: GridSite, f: PointedPresheaf) -> bool:
    """Every compatible pair along every elementary covering glues uniquely."""
    n = site.size
    for e in site.poset.elements():
        i, j = grid_coords(e, n)
        for west, east in site.coverings[e]:
            iw, jw = grid_coords(west, n)
            ie, je = grid_coords(east, n)
            meet = grid_index(ie, jw, n)
            for a in f.level(west).elements():
                for b in f.level(east).elements():
                    if site.restrict_section(f, west, meet, a) != site.restrict_section(
                        f, east, meet, b
                    ):
                        continue
                    gluings = [
                        c
                        for c in f.level(e).elements()
                        if site.restrict_section(f, e, west, c) == a
                        and site.restrict_section(f, e, east, c) == b
                    ]
                    if len(gluings) != 1:
                        return False
    return True


def as_sheaf(site: GridSite, f: PointedPresheaf) -> GridSheaf:
    f.validate()
    if not is_sheaf(site, f):
        raise ValueError("presheaf fails the gluing condition")
    return GridSheaf(site=site, underlying=f)


def build_target_sheaf(site: GridSite) -> GridSheaf:
    """Two sections everywhere; south-west restrictions collapse, south-east keep."""
    n = site.size
    levels = tuple(PointedSet(2) for _ in site.poset.elements())
    restrict = []
    for m in site.category.morphisms():
        c, d = site.category.dom[m], site.category.cod[m]
        _, jc = grid_coords(c, n)
        _, jd = grid_coords(d, n)
        restrict.append((0, 1) if jc == jd else (0, 0))
    return as_sheaf(
        site,
        PointedPresheaf(shape=site.category, levels=levels, restrict=tuple(restrict)),
    )


def build_threshold_sheaf(site: GridSite, threshold: int) -> GridSheaf:
    """Trivial west of the threshold column, three sections from it onward.

    At levels (i, j) with i >= threshold the sections are {basepoint, k, a};
    south-west restrictions send a to k, south-east restrictions fix a.
    """
    n = site.size
    if not 0 <= threshold <= n:
        raise ValueError("threshold must lie inside the grid")
    sizes = [3 if grid_coords(e, n)[0] >= threshold else 1 for e in site.poset.elements()]
    levels = tuple(PointedSet(s) for s in sizes)
    restrict = []
    for m in site.category.morphisms():
        c, d = site.category.dom[m], site.category.cod[m]
        if sizes[d] == 1:
            restrict.append((0,))
        else:
            _, jc = grid_coords(c, n)
            _, jd = grid_coords(d, n)
            restrict.append((0, 1, 2) if jc == jd else (0, 1, 1))
    return as_sheaf(
        site,
        PointedPresheaf(shape=site.category, levels=levels, restrict=tuple(restrict)),
    )


def build_threshold_cover(site: GridSite, threshold: int) -> PresheafMorphism:
    """Collapse of the threshold sheaf onto the two-section sheaf: k dies, a hits x."""
    src = build_threshold_sheaf(site, threshold).underlying
    tgt = build_target_sheaf(site).underlying
    comps = tuple(
        (0, 0, 1) if src.size(e) == 3 else (0,) for e in site.poset.elements()
    )
    morphism = PresheafMorphism(source=src, target=tgt, components=comps)
    morphism.validate()
    return morphism


def sheaf_epi(site: GridSite, f: PresheafMorphism) -> bool:
    """Local surjectivity: every target section lifts pointwise somewhere on
    an elementary covering, recursively.

    Only levels that still have coverings inside the grid are required to
    lift; the clipped edge rows are witnesses, never obligations.
    """
    tgt = f.target

    @lru_cache(maxsize=None)
    def liftable(e: int, y: int) -> bool:
        if y in f.components[e]:
            return True
        for west, east in site.coverings[e]:
            yw = site.restrict_section(tgt, e, west, y)
            ye = site.restrict_section(tgt, e, east, y)
            if liftable(west, yw) and liftable(east, ye):
                return True
        return False

    return all(
        liftable(e, y)
        for e in site.poset.elements()
        if site.coverings[e]
        for y in tgt.level(e).elements()
    )


def sheaf_normal_epi(site: GridSite, f: PresheafMorphism) -> bool:
    """sheaf_epi plus the local dichotomy for colliding sections.

    Two sections with the same image must, on each member of some covering
    (possibly the trivial one), either both restrict into the kernel or
    restrict to equal sections.
    """
    if not sheaf_epi(site, f):
        return False
    src = f.source

    @lru_cache(maxsize=None)
    def locally_ok(e: int, u: int, v: int) -> bool:
        if u == v:
            return True
        if f.components[e][u] == 0 and f.components[e][v] == 0:
            return True
        for west, east in site.coverings[e]:
            uw = site.restrict_section(src, e, west, u)
            vw = site.restrict_section(src, e, west, v)
            ue = site.restrict_section(src, e, east, u)
            ve = site.restrict_section(src, e, east, v)
            if locally_ok(west, uw, vw) and locally_ok(east, ue, ve):
                return True
        return False

    for e in site.poset.elements():
        if not site.coverings[e]:
            continue
        comp = f.components[e]
        for u in src.level(e).elements():
            for v in range(u + 1, src.size(e)):
                if comp[u] == comp[v] and not locally_ok(e, u, v):
                    return False
    return True


def escape_index(max_index: int, n: int) -> int | None:
    """Least first coordinate at which the distinguished section lifts through
    the combined pullback of the threshold covers 0..max_index, or None when
    no level of the truncation works.

    The lift level grows with the family: adding one more cover pushes the
    required coordinate one step further, which is the finite content of the
    failure of the infinite pullback to cover.
    """
    if max_index < 0 or max_index > n:
        raise ValueError("family index must lie inside the grid")
    site = build_site(n)
    family = [build_threshold_cover(site, m) for m in range(max_index + 1)]
    _, _, composite = wide_pullback(family)
    for i in range(n + 1):
        e = grid_index(i, 0, n)
        # the distinguished section restricts to itself along the east edge
        y = site.restrict_section(composite.target, grid_index(0, 0, n), e, 1)
        if y in composite.components[e]:
            return i
    return None

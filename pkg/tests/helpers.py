"""Shared builders for the test suite."""

from topaction.fincat import build_arrow, build_grid_poset, build_terminal
from topaction.presheaf import PointedPresheaf, PointedSet

TERMINAL = build_terminal()
ARROW = build_arrow()
GRID2_CAT, GRID2_PAIRS = build_grid_poset(2).to_category()


def terminal_presheaf(n: int) -> PointedPresheaf:
    p = PointedPresheaf(
        shape=TERMINAL, levels=(PointedSet(n),), restrict=(tuple(range(n)),)
    )
    p.validate()
    return p


def arrow_presheaf(lower: int, upper: int, structure: tuple[int, ...]) -> PointedPresheaf:
    """Arrow-shape presheaf with the given level sizes and structure map."""
    p = PointedPresheaf(
        shape=ARROW,
        levels=(PointedSet(lower), PointedSet(upper)),
        restrict=(tuple(range(lower)), tuple(range(upper)), structure),
    )
    p.validate()
    return p


def all_arrow_presheaves(max_size: int):
    """Every arrow-shape presheaf with level sizes up to max_size."""
    from itertools import product

    out = []
    for upper in range(1, max_size + 1):
        for lower in range(1, max_size + 1):
            for tail in product(range(lower), repeat=upper - 1):
                out.append(arrow_presheaf(lower, upper, (0,) + tail))
    return out


def all_terminal_presheaves(max_size: int):
    return [terminal_presheaf(n) for n in range(1, max_size + 1)]

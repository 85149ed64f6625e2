"""Reproducible instance generators.

Three families: a hand-authored 2D fixture with a short pinched route
and a longer open one, random mazes carved by depth-first search with
extra walls knocked out, and random single-storey buildings with rooms,
doorways, windows, and trees.  Everything is a pure function of its
parameters and seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from gcsplan.geometry import ConvexSet
from gcsplan.planner import PlanningProblem, PlanningSpec

# ---------------------------------------------------------------------------
# 2D fixture


def fixture_2d(objective: str = "length") -> PlanningProblem:
    """Four-room 5x5 world with two routes between fixed endpoints.

    The start room and goal room overlap in a narrow pinch, giving a
    short kinked route; a bottom corridor and right corridor give a
    longer, wide route below the central obstacle.  Objectives:
    ``length`` (shortest path, polylines), ``time`` (minimum duration
    under unit box velocity), ``smooth_time`` (minimum duration, twice
    differentiable, regularized).
    """
    regions = (
        ConvexSet.box([0.0, 0.0], [2.0, 3.2]),  # start room
        ConvexSet.box([1.8, 2.9], [5.0, 5.0]),  # goal room; pinch with start room
        ConvexSet.box([0.9, 0.0], [5.0, 1.5]),  # bottom corridor
        ConvexSet.box([3.4, 0.0], [5.0, 4.1]),  # right corridor
    )
    q0, qT = (0.2, 0.2), (4.8, 4.8)
    if objective == "length":
        spec = PlanningSpec(q0=q0, qT=qT, b=1.0, eta=0, degree=1)
    elif objective == "time":
        spec = PlanningSpec(
            q0=q0,
            qT=qT,
            a=1.0,
            eta=0,
            degree=1,
            velocity_set=ConvexSet.box([-1.0, -1.0], [1.0, 1.0]),
        )
    elif objective == "smooth_time":
        spec = PlanningSpec(
            q0=q0,
            qT=qT,
            a=1.0,
            eta=2,
            degree=6,
            velocity_set=ConvexSet.box([-1.0, -1.0], [1.0, 1.0]),
            qdot0=(0.0, 0.0),
            qdotT=(0.0, 0.0),
            hdot_min=1e-1,
            eps=1e-1,
            reg_order=2,
        )
    else:
        raise ValueError(f"unknown objective {objective!r}")
    return PlanningProblem(regions=regions, spec=spec)


def fixture_two_route() -> PlanningProblem:
    """Minimum-time fixture with a diagonal lane and an axis dogleg.

    The diagonal lane supports speed sqrt(2) under the unit velocity
    box, so the time-optimal plan takes it even though the dogleg exists.
    """
    regions = (
        ConvexSet.box([-0.5, -0.5], [0.5, 0.5]),  # start pad
        ConvexSet.h_polytope(
            [[1.0, -1.0], [-1.0, 1.0], [1.0, 1.0], [-1.0, -1.0]],
            [0.4, 0.4, 8.4, 0.6],
            bounding_box=([-0.5, -0.5], [4.4, 4.4]),
        ),  # diagonal lane around y = x
        ConvexSet.box([3.5, 3.5], [4.5, 4.5]),  # goal pad
        ConvexSet.box([-0.5, -0.5], [4.5, 0.5]),  # bottom leg of the dogleg
        ConvexSet.box([3.5, -0.5], [4.5, 4.5]),  # right leg of the dogleg
    )
    spec = PlanningSpec(
        q0=(0.0, 0.0),
        qT=(4.0, 4.0),
        a=1.0,
        eta=0,
        degree=1,
        velocity_set=ConvexSet.box([-1.0, -1.0], [1.0, 1.0]),
    )
    return PlanningProblem(regions=regions, spec=spec)


# ---------------------------------------------------------------------------
# mazes


@dataclass(frozen=True)
class MazeInstance:
    """A W x H grid maze: unit-box cells, walls between some neighbors.

    ``passages`` lists the open (wall-free) neighbor pairs as index
    pairs under ``index = y * width + x``; ``removed`` records which of
    them came from post-carving wall removal.
    """

    width: int
    height: int
    passages: tuple
    removed: tuple
    start: tuple
    goal: tuple

    def index(self, cell) -> int:
        x, y = cell
        return y * self.width + x

    def cell(self, index: int) -> tuple:
        return (index % self.width, index // self.width)

    def has_wall(self, a, b) -> bool:
        """Wall between two adjacent cells?"""
        key = tuple(sorted((self.index(a), self.index(b))))
        ax, ay = a
        bx, by = b
        if abs(ax - bx) + abs(ay - by) != 1:
            raise ValueError(f"cells {a} and {b} are not adjacent")
        return key not in set(self.passages)

    def regions(self) -> tuple:
        out = []
        for idx in range(self.width * self.height):
            x, y = self.cell(idx)
            out.append(ConvexSet.box([x, y], [x + 1.0, y + 1.0]))
        return tuple(out)

    def planning_problem(self, spec: PlanningSpec | None = None) -> PlanningProblem:
        """Problem over the cell boxes; default objective is shortest
        path with straight segments."""
        if spec is None:
            spec = PlanningSpec(
                q0=(self.start[0] + 0.5, self.start[1] + 0.5),
                qT=(self.goal[0] + 0.5, self.goal[1] + 0.5),
                b=1.0,
                eta=0,
                degree=1,
            )
        return PlanningProblem(
            regions=self.regions(), spec=spec, adjacency=self.passages
        )

    def ascii_art(self) -> str:
        passages = set(self.passages)

        def open_between(a, b):
            return tuple(sorted((self.index(a), self.index(b)))) in passages

        lines = []
        for y in range(self.height - 1, -1, -1):
            top = ""
            mid = ""
            for x in range(self.width):
                above = open_between((x, y), (x, y + 1)) if y + 1 < self.height else False
                top += "+  " if above else "+--"
                left = open_between((x - 1, y), (x, y)) if x > 0 else False
                mid += "   " if left else "|  "
            lines.append(top + "+")
            lines.append(mid + "|")
        lines.append("+--" * self.width + "+")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "width": self.width,
            "height": self.height,
            "passages": [list(p) for p in self.passages],
            "removed": [list(p) for p in self.removed],
            "start": list(self.start),
            "goal": list(self.goal),
        }


def generate_maze(width: int, height: int, removed_walls: int, seed: int) -> MazeInstance:
    """Perfect maze by randomized depth-first carving, then uniform
    removal of ``removed_walls`` surviving walls (no duplicates)."""
    if width < 2 or height < 2:
        raise ValueError("maze needs at least 2 cells per side")
    rng = np.random.default_rng(seed)
    W, H = width, height

    def index(cell):
        return cell[1] * W + cell[0]

    def neighbors(cell):
        x, y = cell
        out = []
        for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            nx, ny = x + dx, y + dy
            if 0 <= nx < W and 0 <= ny < H:
                out.append((nx, ny))
        return out

    start = (0, 0)
    visited = {start}
    stack = [start]
    passages = set()
    while stack:
        here = stack[-1]
        options = [c for c in neighbors(here) if c not in visited]
        if not options:
            stack.pop()
            continue
        nxt = options[int(rng.integers(len(options)))]
        passages.add(tuple(sorted((index(here), index(nxt)))))
        visited.add(nxt)
        stack.append(nxt)
    walls = []
    for y in range(H):
        for x in range(W):
            for nb in ((x + 1, y), (x, y + 1)):
                if nb[0] < W and nb[1] < H:
                    key = tuple(sorted((index((x, y)), index(nb))))
                    if key not in passages:
                        walls.append(key)
    walls.sort()
    if removed_walls > len(walls):
        raise ValueError(
            f"asked to remove {removed_walls} walls, only {len(walls)} exist"
        )
    removed_idx = rng.choice(len(walls), size=removed_walls, replace=False)
    removed = tuple(walls[i] for i in sorted(removed_idx))
    passages.update(removed)
    return MazeInstance(
        width=W,
        height=H,
        passages=tuple(sorted(passages)),
        removed=removed,
        start=start,
        goal=(W - 1, H - 1),
    )


# ---------------------------------------------------------------------------
# buildings

CELL = 5.0
GRID = 5
HEIGHT = 5.0
WALL_T = 0.25  # wall strip thickness contributed by each room cell
ROOF_T = 0.25
DOOR_W = 1.2
DOOR_H = 2.2
WIN_W = 1.0
WIN_LO = 1.8
WIN_HI = 2.8
TREE_SLAB = 1.0  # free margin around a tree trunk
TREE_P = 0.4
ROOM_P = 0.6
HOVER = 1.0
ROBOT_RADIUS = 0.2
START_CELL = (0, 0)
GOAL_CELL = (3, 2)

_DIVIDERS = ("doorway", "half_v", "half_h", "none")
_OUTER = ("doorway", "window", "two_windows", "solid")


def _vol(box) -> float:
    lo, hi = box
    return float(np.prod(np.maximum(np.asarray(hi) - np.asarray(lo), 0.0)))


def _overlap_vol(a, b) -> float:
    lo = np.maximum(a[0], b[0])
    hi = np.minimum(a[1], b[1])
    return float(np.prod(np.maximum(hi - lo, 0.0)))


def _segment_minus(lo: float, hi: float, holes) -> list:
    """1D complement of sorted disjoint intervals inside [lo, hi]."""
    out = []
    cur = lo
    for a, b in sorted(holes):
        if a > cur:
            out.append((cur, a))
        cur = max(cur, b)
    if cur < hi:
        out.append((cur, hi))
    return out


def _rect_minus_holes(span, zrange, holes) -> list:
    """2D rectangle minus hole rectangles, as a list of rectangles.

    ``holes`` are ((s0, s1), (z0, z1)) pairs with disjoint span ranges.
    Guillotine cuts at hole span edges keep the pieces boxes.
    """
    cuts = {span[0], span[1]}
    for (s0, s1), _ in holes:
        cuts.add(max(span[0], s0))
        cuts.add(min(span[1], s1))
    cuts = sorted(cuts)
    out = []
    for s0, s1 in zip(cuts, cuts[1:]):
        if s1 - s0 <= 0:
            continue
        mid = 0.5 * (s0 + s1)
        zholes = [
            (max(zrange[0], z0), min(zrange[1], z1))
            for (a, b), (z0, z1) in holes
            if a <= mid <= b
        ]
        for z0, z1 in _segment_minus(zrange[0], zrange[1], zholes):
            out.append(((s0, s1), (z0, z1)))
    return out


@dataclass(frozen=True)
class BuildingInstance:
    """One random building: occupancy, wall choices, box decomposition.

    ``regions`` are the planning boxes (shrunk by the robot radius);
    ``cell_free``/``cell_solid`` hold the exact per-cell decomposition
    used for the volume bookkeeping.
    """

    seed: int
    occupancy: tuple  # ((cell, "room"|"grass"), ...) sorted
    trees: tuple
    sides: tuple  # ((cell_a, cell_b, kind), ...) sorted
    regions: tuple  # planning ConvexSets
    cell_free: tuple  # ((cell, ((lo, hi), ...)), ...)
    cell_solid: tuple
    start_point: tuple
    goal_point: tuple

    def occupancy_map(self) -> dict:
        return dict(self.occupancy)

    def volume_error(self) -> float:
        """Worst per-cell defect of (free + solid) tiling the cell."""
        free = dict(self.cell_free)
        solid = dict(self.cell_solid)
        worst = 0.0
        for cell, _ in self.occupancy:
            boxes = list(free[cell]) + list(solid[cell])
            total = sum(_vol(b) for b in boxes)
            worst = max(worst, abs(total - CELL * CELL * HEIGHT))
            for i in range(len(boxes)):
                for j in range(i + 1, len(boxes)):
                    worst = max(worst, _overlap_vol(boxes[i], boxes[j]))
        return worst

    def planning_problem(self, spec: PlanningSpec | None = None) -> PlanningProblem:
        """Default spec mirrors the flat-output quadrotor setting:
        duration+length objective, C^4 continuity, degree 7, box
        velocity, rest-to-rest with vanishing second and third
        derivatives."""
        if spec is None:
            spec = PlanningSpec(
                q0=self.start_point,
                qT=self.goal_point,
                a=1.0,
                b=1.0,
                eta=4,
                degree=7,
                velocity_set=ConvexSet.box([-10.0] * 3, [10.0] * 3),
                qdot0=(0.0, 0.0, 0.0),
                qdotT=(0.0, 0.0, 0.0),
                zero_orders=(2, 3),
                hdot_min=1e-3,
                T_min=1e-2,
                T_max=1e3,
            )
        regions = tuple(ConvexSet.box(lo, hi) for lo, hi in self.regions)
        return PlanningProblem(regions=regions, spec=spec)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "occupancy": [
                {"cell": list(c), "kind": k} for c, k in self.occupancy
            ],
            "trees": [list(c) for c in self.trees],
            "sides": [
                {"a": list(a), "b": list(b), "kind": k} for a, b, k in self.sides
            ],
            "regions": [
                {"lo": list(lo), "hi": list(hi)} for lo, hi in self.regions
            ],
            "start": list(self.start_point),
            "goal": list(self.goal_point),
        }


def _inner(cell) -> bool:
    return 1 <= cell[0] <= 3 and 1 <= cell[1] <= 3


def _neighbors(cell):
    x, y = cell
    for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        nx, ny = x + dx, y + dy
        if 0 <= nx < GRID and 0 <= ny < GRID:
            yield (nx, ny)


def generate_building(seed: int) -> BuildingInstance:
    rng = np.random.default_rng(seed)
    # Occupancy: boundary cells are grass; rooms grow outward from the
    # goal cell over the inner 3x3 block.
    occupancy = {}
    for y in range(GRID):
        for x in range(GRID):
            occupancy[(x, y)] = "grass"
    occupancy[GOAL_CELL] = "room"
    inner = sorted(c for c in occupancy if _inner(c) and c != GOAL_CELL)
    inner.sort(key=lambda c: (abs(c[0] - GOAL_CELL[0]) + abs(c[1] - GOAL_CELL[1]), c))
    for cell in inner:
        has_room_neighbor = any(
            occupancy.get(nb) == "room"
            and (
                abs(nb[0] - GOAL_CELL[0]) + abs(nb[1] - GOAL_CELL[1])
                < abs(cell[0] - GOAL_CELL[0]) + abs(cell[1] - GOAL_CELL[1])
            )
            for nb in _neighbors(cell)
        )
        if has_room_neighbor and rng.random() < ROOM_P:
            occupancy[cell] = "room"
    # Trees on boundary grass, never on the start cell.
    trees = set()
    for cell in sorted(occupancy):
        if not _inner(cell) and cell != START_CELL and rng.random() < TREE_P:
            trees.add(cell)
    # One decision per wall side touching at least one room.
    sides = {}
    for cell in sorted(occupancy):
        if occupancy[cell] != "room":
            continue
        for nb in _neighbors(cell):
            key = tuple(sorted((cell, nb)))
            if key in sides:
                continue
            if occupancy[nb] == "room":
                sides[key] = _DIVIDERS[int(rng.integers(len(_DIVIDERS)))]
            else:
                sides[key] = _OUTER[int(rng.integers(len(_OUTER)))]
    return _assemble(seed, occupancy, trees, sides)


def _side_holes(kind: str, span, wall_z) -> list:
    """Hole rectangles ((s0,s1),(z0,z1)) cut by one opening choice."""
    s0, s1 = span
    mid = 0.5 * (s0 + s1)
    if kind == "doorway":
        return [((mid - DOOR_W / 2, mid + DOOR_W / 2), (0.0, DOOR_H))]
    if kind == "window":
        return [((mid - WIN_W / 2, mid + WIN_W / 2), (WIN_LO, WIN_HI))]
    if kind == "two_windows":
        c1 = s0 + (s1 - s0) / 3.0
        c2 = s0 + 2.0 * (s1 - s0) / 3.0
        return [
            ((c1 - WIN_W / 2, c1 + WIN_W / 2), (WIN_LO, WIN_HI)),
            ((c2 - WIN_W / 2, c2 + WIN_W / 2), (WIN_LO, WIN_HI)),
        ]
    if kind == "half_v":
        return [((mid, s1), (0.0, wall_z))]
    if kind == "half_h":
        return [((s0, s1), (wall_z / 2.0, wall_z))]
    if kind in ("solid",):
        return []
    raise ValueError(f"unknown opening kind {kind!r}")


def _assemble(seed, occupancy, trees, sides) -> BuildingInstance:
    r = ROBOT_RADIUS
    wall_z = HEIGHT - ROOF_T
    regions = []
    cell_free = {}
    cell_solid = {}

    def cell_box(cell):
        x, y = cell
        return np.array([x * CELL, y * CELL]), np.array([(x + 1) * CELL, (y + 1) * CELL])

    def side_kind(cell, nb):
        return sides.get(tuple(sorted((cell, nb))))

    def walled(cell, nb):
        """Does ``cell`` carry a wall strip toward ``nb``?"""
        if occupancy[cell] != "room":
            return False
        kind = side_kind(cell, nb)
        return kind is not None and kind != "none"

    for cell in sorted(occupancy):
        lo2, hi2 = cell_box(cell)
        frees = []
        solids = []
        if occupancy[cell] == "room":
            solids.append(
                ((lo2[0], lo2[1], wall_z), (hi2[0], hi2[1], HEIGHT))
            )  # roof
            # Strip extents on each side (E, W, N, S); E/W strips take
            # the full y span, N/S strips the leftover x span.
            has = {}
            for axis, direction, name in (
                (0, 1, "E"),
                (0, -1, "W"),
                (1, 1, "N"),
                (1, -1, "S"),
            ):
                nb = (cell[0] + (direction if axis == 0 else 0),
                      cell[1] + (direction if axis == 1 else 0))
                has[name] = (
                    walled(cell, nb) if 0 <= nb[0] < GRID and 0 <= nb[1] < GRID else False
                )
            x0 = lo2[0] + (WALL_T if has["W"] else 0.0)
            x1 = hi2[0] - (WALL_T if has["E"] else 0.0)
            y0 = lo2[1] + (WALL_T if has["S"] else 0.0)
            y1 = hi2[1] - (WALL_T if has["N"] else 0.0)
            frees.append(((x0, y0, 0.0), (x1, y1, wall_z)))  # interior
            for name in ("E", "W", "N", "S"):
                if not has[name]:
                    continue
                if name in ("E", "W"):
                    xs = (hi2[0] - WALL_T, hi2[0]) if name == "E" else (lo2[0], lo2[0] + WALL_T)
                    span = (lo2[1], hi2[1])
                    nb = (cell[0] + (1 if name == "E" else -1), cell[1])
                else:
                    xs = None
                    ys = (hi2[1] - WALL_T, hi2[1]) if name == "N" else (lo2[1], lo2[1] + WALL_T)
                    span = (x0, x1)
                    nb = (cell[0], cell[1] + (1 if name == "N" else -1))
                holes = _side_holes(side_kind(cell, nb), span, wall_z)
                for (s0, s1), (z0, z1) in _rect_minus_holes(span, (0.0, wall_z), holes):
                    if name in ("E", "W"):
                        solids.append(((xs[0], s0, z0), (xs[1], s1, z1)))
                    else:
                        solids.append(((s0, ys[0], z0), (s1, ys[1], z1)))
                for (hs0, hs1), (hz0, hz1) in holes:
                    hs0c, hs1c = max(hs0, span[0]), min(hs1, span[1])
                    if name in ("E", "W"):
                        frees.append(((xs[0], hs0c, hz0), (xs[1], hs1c, hz1)))
                    else:
                        frees.append(((hs0c, ys[0], hz0), (hs1c, ys[1], hz1)))
            # Planning interior: clear of strips, roof, and floor.
            plo = [
                x0 + (r if has["W"] else 0.0),
                y0 + (r if has["S"] else 0.0),
                r,
            ]
            phi = [
                x1 - (r if has["E"] else 0.0),
                y1 - (r if has["N"] else 0.0),
                wall_z - r,
            ]
            regions.append((tuple(plo), tuple(phi)))
        elif cell in trees:
            x0, y0 = lo2
            x1, y1 = hi2
            t0x, t1x = x0 + TREE_SLAB, x1 - TREE_SLAB
            t0y, t1y = y0 + TREE_SLAB, y1 - TREE_SLAB
            solids.append(((t0x, t0y, 0.0), (t1x, t1y, HEIGHT)))  # trunk
            frees.append(((x0, y0, 0.0), (t0x, y1, HEIGHT)))  # W slab
            frees.append(((t1x, y0, 0.0), (x1, y1, HEIGHT)))  # E slab
            frees.append(((t0x, y0, 0.0), (t1x, t0y, HEIGHT)))  # S slab
            frees.append(((t0x, t1y, 0.0), (t1x, y1, HEIGHT)))  # N slab
            ins = _grass_insets(cell, occupancy)
            # Overlap-style planning slabs: each spans the full cell in
            # its long direction and stops short of the trunk.
            for plo, phi in (
                ((x0 + ins["W"], y0 + ins["S"], r), (t0x - r, y1 - ins["N"], HEIGHT)),
                ((t1x + r, y0 + ins["S"], r), (x1 - ins["E"], y1 - ins["N"], HEIGHT)),
                ((x0 + ins["W"], y0 + ins["S"], r), (x1 - ins["E"], t0y - r, HEIGHT)),
                ((x0 + ins["W"], t1y + r, r), (x1 - ins["E"], y1 - ins["N"], HEIGHT)),
            ):
                regions.append((tuple(plo), tuple(phi)))
        else:
            frees.append(((lo2[0], lo2[1], 0.0), (hi2[0], hi2[1], HEIGHT)))
            ins = _grass_insets(cell, occupancy)
            regions.append(
                (
                    (lo2[0] + ins["W"], lo2[1] + ins["S"], r),
                    (hi2[0] - ins["E"], hi2[1] - ins["N"], HEIGHT),
                )
            )
        cell_free[cell] = tuple(frees)
        cell_solid[cell] = tuple(solids)
    # Connector regions through every opening, one per side.
    for (ca, cb), kind in sorted(sides.items()):
        if kind in ("none", "solid"):
            continue
        axis = 0 if ca[0] != cb[0] else 1
        boundary = max(ca[axis], cb[axis]) * CELL
        depth_lo = WALL_T if occupancy[ca] == "room" else 0.0
        depth_hi = WALL_T if occupancy[cb] == "room" else 0.0
        n0, n1 = boundary - depth_lo - 2 * r, boundary + depth_hi + 2 * r
        other = 1 - axis
        span_lo = ca[other] * CELL
        span_hi = span_lo + CELL
        clip = (span_lo + WALL_T + r, span_hi - WALL_T - r)
        for (s0, s1), (z0, z1) in _side_holes(
            kind, (span_lo, span_hi), wall_z
        ):
            s0c, s1c = max(s0 + r, clip[0]), min(s1 - r, clip[1])
            z0c = max(z0 + r, r)
            z1c = min(z1 - r, wall_z - r)
            if s1c <= s0c or z1c <= z0c:
                continue
            lo = [0.0, 0.0, z0c]
            hi = [0.0, 0.0, z1c]
            lo[axis], hi[axis] = n0, n1
            lo[other], hi[other] = s0c, s1c
            regions.append((tuple(lo), tuple(hi)))
    start = (
        (START_CELL[0] + 0.5) * CELL,
        (START_CELL[1] + 0.5) * CELL,
        HOVER,
    )
    goal = ((GOAL_CELL[0] + 0.5) * CELL, (GOAL_CELL[1] + 0.5) * CELL, HOVER)
    return BuildingInstance(
        seed=seed,
        occupancy=tuple(sorted(occupancy.items())),
        trees=tuple(sorted(trees)),
        sides=tuple((a, b, k) for (a, b), k in sorted(sides.items())),
        regions=tuple(regions),
        cell_free=tuple(sorted(cell_free.items())),
        cell_solid=tuple(sorted(cell_solid.items())),
        start_point=start,
        goal_point=goal,
    )


def _grass_insets(cell, occupancy) -> dict:
    """Robot-radius clearance from neighboring rooms' wall strips."""
    out = {}
    for name, nb in (
        ("E", (cell[0] + 1, cell[1])),
        ("W", (cell[0] - 1, cell[1])),
        ("N", (cell[0], cell[1] + 1)),
        ("S", (cell[0], cell[1] - 1)),
    ):
        inside = 0 <= nb[0] < GRID and 0 <= nb[1] < GRID
        out[name] = ROBOT_RADIUS if inside and occupancy[nb] == "room" else 0.0
    return out

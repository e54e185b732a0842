"""Grid world: obstacles, agents, goal objects, fog-of-war rewards.

Cells are (col, row) pairs, zero-based. Visibility uses a square Chebyshev
horizon with straight-line occlusion; each goal feature carries its own
visibility range, so nearer observers see more features. Rewards are
frozensets of feature names, ordered by inclusion.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

from .errors import LatticePlanError
from .games import SET_PAYOFFS, ConwayGame, build_game

Cell = tuple  # (col, row)

SCOUT_PREFIX = "scout:"


class GridError(LatticePlanError):
    """Base class for grid environment errors."""


class OutOfBounds(GridError):
    pass


class OnObstacle(GridError):
    pass


class DuplicateId(GridError):
    pass


class InvalidEnvironment(GridError):
    pass


@dataclass(frozen=True)
class AgentState:
    id: str
    position: Cell
    horizon: int
    movement_goal_id: str


@dataclass(frozen=True)
class GoalObject:
    id: str
    position: Cell
    features: tuple  # ((name, visibility_range), ...)

    def feature_names(self) -> tuple:
        return tuple(name for name, _ in self.features)


@dataclass(eq=False)
class GridEnvironment:
    width: int
    height: int
    obstacles: frozenset
    agents: tuple
    goals: tuple
    _reward_cache: dict = field(default_factory=dict, repr=False)
    _seen_cache: dict = field(default_factory=dict, repr=False)

    def in_bounds(self, cell: Cell) -> bool:
        c, r = cell
        return 0 <= c < self.width and 0 <= r < self.height

    def agent(self, agent_id: str) -> AgentState:
        for a in self.agents:
            if a.id == agent_id:
                return a
        raise InvalidEnvironment(f"no agent {agent_id!r}")

    def goal(self, goal_id: str) -> GoalObject:
        for g in self.goals:
            if g.id == goal_id:
                return g
        raise InvalidEnvironment(f"no goal {goal_id!r}")

    def with_positions(self, positions: Mapping[str, Cell]) -> "GridEnvironment":
        """Copy with agents moved; caches are shared (geometry is unchanged)."""
        moved = []
        for a in self.agents:
            if a.id in positions:
                cell = positions[a.id]
                _check_free(self, cell, f"agent {a.id}")
                a = replace(a, position=cell)
            moved.append(a)
        return GridEnvironment(
            width=self.width, height=self.height, obstacles=self.obstacles,
            agents=tuple(moved), goals=self.goals,
            _reward_cache=self._reward_cache, _seen_cache=self._seen_cache)


def _check_free(env: GridEnvironment, cell: Cell, what: str) -> None:
    if not env.in_bounds(cell):
        raise OutOfBounds(f"{what} at {cell} is outside the "
                          f"{env.width}x{env.height} grid")
    if cell in env.obstacles:
        raise OnObstacle(f"{what} at {cell} sits on an obstacle")


def build_environment(width: int, height: int, obstacles: Iterable[Cell],
                      agents: Iterable[AgentState],
                      goals: Iterable[GoalObject]) -> GridEnvironment:
    if width < 1 or height < 1:
        raise InvalidEnvironment("grid must be at least 1x1")
    env = GridEnvironment(width=width, height=height,
                          obstacles=frozenset(tuple(c) for c in obstacles),
                          agents=tuple(agents), goals=tuple(goals))
    for cell in env.obstacles:
        if not env.in_bounds(cell):
            raise OutOfBounds(f"obstacle at {cell} is outside the grid")
    seen_ids = set()
    for a in env.agents:
        if a.id in seen_ids:
            raise DuplicateId(f"agent id {a.id!r} repeats")
        seen_ids.add(a.id)
        if a.horizon < 0:
            raise InvalidEnvironment(f"agent {a.id} has negative horizon")
        _check_free(env, a.position, f"agent {a.id}")
    seen_ids = set()
    for g in env.goals:
        if g.id in seen_ids:
            raise DuplicateId(f"goal id {g.id!r} repeats")
        seen_ids.add(g.id)
        _check_free(env, g.position, f"goal {g.id}")
        names = set()
        for name, rng in g.features:
            if name in names:
                raise DuplicateId(f"feature {name!r} repeats on goal {g.id}")
            names.add(name)
            if rng < 0:
                raise InvalidEnvironment(
                    f"feature {name!r} of goal {g.id} has negative range")
            if name.startswith(SCOUT_PREFIX):
                raise InvalidEnvironment(
                    f"feature name {name!r} uses the reserved scout prefix")
    return env


def chebyshev(a: Cell, b: Cell) -> int:
    return max(abs(a[0] - b[0]), abs(a[1] - b[1]))


def bresenham_line(a: Cell, b: Cell) -> list:
    """Integer line from a to b, both endpoints included."""
    (c0, r0), (c1, r1) = a, b
    cells = []
    dc, dr = abs(c1 - c0), -abs(r1 - r0)
    sc = 1 if c0 < c1 else -1
    sr = 1 if r0 < r1 else -1
    err = dc + dr
    while True:
        cells.append((c0, r0))
        if (c0, r0) == (c1, r1):
            return cells
        e2 = 2 * err
        if e2 >= dr:
            err += dr
            c0 += sc
        if e2 <= dc:
            err += dc
            r0 += sr


def line_of_sight(env: GridEnvironment, a: Cell, b: Cell) -> bool:
    """True when no obstacle lies strictly between the endpoints."""
    return not any(cell in env.obstacles
                   for cell in bresenham_line(a, b)[1:-1])


def reward(env: GridEnvironment, position: Cell, goal,
           horizon: int | None = None) -> frozenset:
    """Features of the goal visible from the position through the fog.

    A feature shows iff the Chebyshev distance stays within both the feature
    range and the observer horizon, and the sight line is unobstructed.
    """
    if isinstance(goal, str):
        goal = env.goal(goal)
    key = (tuple(position), goal.id, horizon)
    cached = env._reward_cache.get(key)
    if cached is not None:
        return cached
    _check_free(env, position, "observer")
    dist = chebyshev(position, goal.position)
    value: frozenset = frozenset()
    if horizon is None or dist <= horizon:
        if line_of_sight(env, position, goal.position):
            value = frozenset(
                name for name, rng in goal.features
                if dist <= (rng if horizon is None else min(rng, horizon)))
    env._reward_cache[key] = value
    return value


def visible_goals(env: GridEnvironment, agent) -> list:
    """Goals with a nonempty reward from the agent's position, sorted by id."""
    if isinstance(agent, str):
        agent = env.agent(agent)
    out = []
    for g in sorted(env.goals, key=lambda g: g.id):
        value = reward(env, agent.position, g, agent.horizon)
        if value:
            out.append((g.id, value))
    return out


def observed_cells(env: GridEnvironment, position: Cell,
                   horizon: int) -> frozenset:
    """In-bounds cells within the horizon and in line of sight."""
    key = (tuple(position), horizon)
    cached = env._seen_cache.get(key)
    if cached is not None:
        return cached
    c, r = position
    cells = frozenset(
        (cc, rr)
        for cc in range(max(0, c - horizon), min(env.width, c + horizon + 1))
        for rr in range(max(0, r - horizon), min(env.height, r + horizon + 1))
        if line_of_sight(env, position, (cc, rr)))
    env._seen_cache[key] = cells
    return cells


def scout_feature(cell: Cell) -> str:
    return f"{SCOUT_PREFIX}{cell[0]},{cell[1]}"


def agent_moves(env: GridEnvironment, position: Cell) -> list:
    """Legal targets in fixed order: north, east, south, west, stay."""
    _check_free(env, position, "position")
    c, r = position
    steps = [(c, r - 1), (c + 1, r), (c, r + 1), (c - 1, r)]
    out = [cell for cell in steps
           if env.in_bounds(cell) and cell not in env.obstacles]
    out.append((c, r))
    return out


def reachable(env: GridEnvironment, start: Cell, target: Cell) -> bool:
    """Whether a 4-connected obstacle-free path joins the two cells."""
    start, target = tuple(start), tuple(target)
    _check_free(env, start, "start")
    _check_free(env, target, "target")
    if start == target:
        return True
    seen = {start}
    frontier = [start]
    while frontier:
        cell = frontier.pop()
        for nxt in agent_moves(env, cell)[:-1]:
            if nxt == target:
                return True
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return False


def vertex_kind(vertex) -> str:
    return vertex[0]


def vertex_cell(vertex) -> Cell:
    return vertex[1][-1]


def build_agent_game(env: GridEnvironment, agent, depth: int,
                     goal_ids: Iterable[str] | None = None) -> ConwayGame:
    """Unrolled movement game for one agent.

    The system (Opponent, -1) moves between cells; the environment
    (Proponent, +1) answers each move with a single automatic reveal edge.
    Vertices are ("m"|"r", visited-cell-tuple); payoff joins the rewards of
    the queried goals at the vertex cell.
    """
    if isinstance(agent, str):
        agent = env.agent(agent)
    if depth < 0:
        raise InvalidEnvironment("game depth must be nonnegative")
    goals = (env.goals if goal_ids is None
             else tuple(env.goal(g) for g in goal_ids))

    def cell_payoff(cell):
        value = frozenset()
        for g in goals:
            value |= reward(env, cell, g, agent.horizon)
        return value

    root = ("r", (tuple(agent.position),))
    vertices = [root]
    edges = []
    payoff = {root: cell_payoff(agent.position)}
    frontier = [root]
    for _ in range(depth):
        next_frontier = []
        for v in frontier:
            _, cells = v
            for target in agent_moves(env, cells[-1]):
                mid = ("m", cells + (target,))
                landed = ("r", cells + (target,))
                value = cell_payoff(target)
                vertices.extend([mid, landed])
                payoff[mid] = value
                payoff[landed] = value
                edges.append((v, mid, -1))
                edges.append((mid, landed, 1))
                next_frontier.append(landed)
        frontier = next_frontier
    return build_game(vertices, root, edges, payoff=payoff,
                      payoff_lattice=SET_PAYOFFS)

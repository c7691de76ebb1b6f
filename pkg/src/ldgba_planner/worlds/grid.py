"""Build PL-POMDPs from grid specifications.

State ``r * width + c`` is cell ``(r, c)``; every cell is a state, blocked
cells are unreachable self-loops.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..logic import AtomSet
from ..pomdp import PlPomdp, Row, validate
from .envfile import MOVES, Cell, GridSpec

DIRS = ("up", "left", "down", "right")  # same order as wall tokens: N W S E
PASSABLE = ("door", "hallway")
SIDES = {"up": ("left", "right"), "down": ("left", "right"), "left": ("up", "down"), "right": ("up", "down")}


class GridError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class World:
    spec: GridSpec
    pomdp: PlPomdp

    def state(self, cell: Cell) -> int:
        return cell[0] * self.spec.width + cell[1]

    def cell(self, s: int) -> Cell:
        return divmod(s, self.spec.width)

    @property
    def starts(self) -> list[int]:
        """Uniform start pool: cells that are neither blocked nor traps."""
        bad = self.spec.blocked | self.spec.traps
        return [self.state((r, c)) for r in range(self.spec.height) for c in range(self.spec.width) if (r, c) not in bad]

    @property
    def fixed_starts(self) -> list[int]:
        return [] if isinstance(self.spec.start, str) else [self.state(c) for c in self.spec.start]


def _inside(spec: GridSpec, cell: Cell) -> bool:
    return 0 <= cell[0] < spec.height and 0 <= cell[1] < spec.width


def _target(spec: GridSpec, cell: Cell, move: str) -> Cell:
    """Cell reached by a successful move; the agent stays when blocked."""
    dr, dc = MOVES[move]
    if move == "stay":
        return cell
    if spec.walls and cell in spec.walls and spec.walls[cell][DIRS.index(move)] not in PASSABLE:
        return cell
    nxt = (cell[0] + dr, cell[1] + dc)
    if not _inside(spec, nxt) or nxt in spec.blocked:
        return cell
    return nxt


def _transition_row(spec: GridSpec, cell: Cell, action: str) -> dict[Cell, float]:
    if cell in spec.traps or cell in spec.blocked or action == "stay" or spec.noise == "none":
        return {_target(spec, cell, action) if cell not in spec.traps and cell not in spec.blocked else cell: 1.0}
    out: dict[Cell, float] = {}

    def add(c, p):
        out[c] = out.get(c, 0.0) + p

    add(_target(spec, cell, action), 0.9)
    if spec.noise == "side_slip":
        for side in SIDES[action]:
            add(_target(spec, cell, side), 0.05)
    else:  # uniform_other: remaining mass over the other passable directions
        others = [d for d in DIRS if d != action and _target(spec, cell, d) != cell]
        if others:
            for d in others:
                add(_target(spec, cell, d), 0.1 / len(others))
        else:
            add(cell, 0.1)
    return out


def _neighbours(spec: GridSpec, cell: Cell) -> list[Cell]:
    return [
        (cell[0] + dr, cell[1] + dc)
        for dr, dc in (MOVES[d] for d in DIRS)
        if _inside(spec, (cell[0] + dr, cell[1] + dc))
    ]


def observation_alphabet(spec: GridSpec) -> list[str]:
    if spec.observation in ("cell", "exact"):
        return [f"{r},{c}" for r in range(spec.height) for c in range(spec.width)]
    if spec.observation == "walls":
        seen: list[str] = []
        for r in range(spec.height):
            for c in range(spec.width):
                if (r, c) in spec.walls:
                    key = " ".join(spec.walls[(r, c)])
                    if key not in seen:
                        seen.append(key)
        return seen
    tokens: list[str] = []
    for w in spec.walls.values():
        for t in w:
            if t not in tokens:
                tokens.append(t)
    return sorted(tokens)


def _observation_row(spec: GridSpec, cell: Cell, names: list[str]) -> dict[int, float]:
    index = {n: i for i, n in enumerate(names)}
    if spec.observation == "exact":
        return {index[f"{cell[0]},{cell[1]}"]: 1.0}
    if spec.observation == "cell":
        out = {index[f"{cell[0]},{cell[1]}"]: 0.9}
        nb = _neighbours(spec, cell)
        for n in nb:
            out[index[f"{n[0]},{n[1]}"]] = 0.1 / len(nb)
        return out
    walls = spec.walls.get(cell)
    if walls is None:  # blocked cell in a walled world, never reached
        return {0: 1.0}
    if spec.observation == "walls":
        return {index[" ".join(walls)]: 1.0}
    out: dict[int, float] = {}
    for t in walls:
        out[index[t]] = out.get(index[t], 0.0) + 0.25
    return out


def build_grid(spec: GridSpec) -> World:
    problems = spec.problems()
    if problems:
        raise GridError("; ".join(problems))
    atoms = AtomSet(spec.atoms)
    cells = [(r, c) for r in range(spec.height) for c in range(spec.width)]
    sid = {cell: i for i, cell in enumerate(cells)}
    names = observation_alphabet(spec)
    trans, obs, labels = [], [], []
    for cell in cells:
        trans.append(
            tuple(Row.from_mapping({sid[c]: p for c, p in _transition_row(spec, cell, a).items()}) for a in spec.actions)
        )
        orow = Row.from_mapping(_observation_row(spec, cell, names))
        obs.append(tuple(orow for _ in spec.actions))
        dist = spec.labels.get(cell, (((), 1.0),))
        ldist: dict[int, float] = {}
        for lnames, p in dist:
            sym = atoms.symbol(lnames)
            ldist[sym] = ldist.get(sym, 0.0) + p
        labels.append(Row.from_mapping(ldist))
    if isinstance(spec.start, str):
        initial = next(sid[c] for c in cells if c not in spec.blocked and c not in spec.traps)
    else:
        initial = sid[spec.start[0]]
    m = PlPomdp(
        actions=tuple(spec.actions),
        observation_names=tuple(names),
        atoms=atoms,
        transitions=tuple(trans),
        observations=tuple(obs),
        labels=tuple(labels),
        initial=initial,
        state_names=tuple(f"{r},{c}" for r, c in cells),
    )
    problems = validate(m)
    if problems:  # pragma: no cover - builder invariant
        raise GridError("; ".join(problems))
    return World(spec, m)

"""Environment files: an INI document describing a labelled grid world.

Sections and keys (coordinates are ``row,col`` with row 0 at the top)::

    [grid]
    name = grid_phi1
    width = 10
    height = 10
    atoms = a, b, c                 # every atom the labels may use
    actions = up, left, down, right # optionally also: stay
    noise = side_slip               # side_slip | uniform_other | none
    observation = cell              # cell | exact | walls | walls_single
    start = uniform                 # uniform | r,c | r,c; r,c (one per agent)
    exclusive = true                # forbid labels/traps on blocked cells

    [blocked]
    2,3                             # one cell per line

    [traps]
    4,5

    [labels]
    0,0 = a                         # static label
    3,4 = a:0.9 b:0.1               # dynamic: label sets with probabilities
    5,5 = a&b                       # several atoms at once; "-" is the empty label

    [walls]
    0,0 = window window wall door   # north west south east

Cells without a ``[labels]`` entry carry the empty label.
"""
from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field
from pathlib import Path

Cell = tuple[int, int]
LabelDist = tuple[tuple[tuple[str, ...], float], ...]

GRID_KEYS = ("name", "width", "height", "atoms", "actions", "noise", "observation", "start", "exclusive")
SECTIONS = ("grid", "blocked", "traps", "labels", "walls")
NOISE_MODELS = ("side_slip", "uniform_other", "none")
OBS_MODELS = ("cell", "exact", "walls", "walls_single")
MOVES = {"up": (-1, 0), "left": (0, -1), "down": (1, 0), "right": (0, 1), "stay": (0, 0)}


class EnvFileError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


@dataclass(frozen=True)
class GridSpec:
    name: str
    width: int
    height: int
    atoms: tuple[str, ...] = ()
    actions: tuple[str, ...] = ("up", "left", "down", "right")
    noise: str = "side_slip"
    observation: str = "cell"
    start: str | tuple[Cell, ...] = "uniform"
    exclusive: bool = True
    blocked: frozenset[Cell] = frozenset()
    traps: frozenset[Cell] = frozenset()
    labels: dict[Cell, LabelDist] = field(default_factory=dict)
    walls: dict[Cell, tuple[str, str, str, str]] = field(default_factory=dict)

    def problems(self) -> list[str]:
        out = []
        if self.width < 1 or self.height < 1:
            out.append("grid dimensions must be positive")
        for a in self.actions:
            if a not in MOVES:
                out.append(f"unknown action {a!r}")
        if self.noise not in NOISE_MODELS:
            out.append(f"unknown noise model {self.noise!r}")
        if self.observation not in OBS_MODELS:
            out.append(f"unknown observation model {self.observation!r}")
        cells = [*self.blocked, *self.traps, *self.labels, *self.walls]
        if not isinstance(self.start, str):
            cells += list(self.start)
        for c in cells:
            if not (0 <= c[0] < self.height and 0 <= c[1] < self.width):
                out.append(f"cell {c[0]},{c[1]} outside the {self.height}x{self.width} grid")
        for c, dist in self.labels.items():
            total = sum(p for _, p in dist)
            if abs(total - 1.0) > 1e-9:
                out.append(f"labels of cell {c[0]},{c[1]} sum to {total:g}")
            for names, p in dist:
                if not 0.0 <= p <= 1.0:
                    out.append(f"label probability {p} at cell {c[0]},{c[1]} outside [0, 1]")
                for n in names:
                    if n not in self.atoms:
                        out.append(f"cell {c[0]},{c[1]} uses undeclared atom {n!r}")
        if self.exclusive:
            for c in sorted(self.blocked & (set(self.labels) | self.traps)):
                out.append(f"blocked cell {c[0]},{c[1]} is also labelled or a trap")
        if self.observation in ("walls", "walls_single"):
            for r in range(self.height):
                for c in range(self.width):
                    if (r, c) not in self.walls and (r, c) not in self.blocked:
                        out.append(f"cell {r},{c} has no [walls] entry")
        if not isinstance(self.start, str):
            for c in self.start:
                if c in self.blocked:
                    out.append(f"start cell {c[0]},{c[1]} is blocked")
        return out


# ---------------------------------------------------------------- parsing


_CELL = re.compile(r"^\s*(\d+)\s*,\s*(\d+)\s*$")


def _cell(text: str, line: int | None) -> Cell:
    m = _CELL.match(text)
    if not m:
        raise EnvFileError(f"expected a cell 'row,col', got {text!r}", line)
    return int(m.group(1)), int(m.group(2))


def _label_dist(text: str, line: int | None) -> LabelDist:
    items = []
    for tok in text.split():
        name, _, prob = tok.partition(":")
        try:
            p = float(prob) if prob else 1.0
        except ValueError:
            raise EnvFileError(f"bad probability in {tok!r}", line) from None
        atoms = () if name == "-" else tuple(sorted(name.split("&")))
        if any(not a for a in atoms):
            raise EnvFileError(f"bad label {tok!r}", line)
        items.append((atoms, p))
    if not items:
        raise EnvFileError("empty label entry", line)
    return tuple(items)


def _line_index(text: str) -> dict[tuple[str, str], int]:
    """(section, key) -> 1-based line number, for diagnostics."""
    out: dict[tuple[str, str], int] = {}
    section = ""
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            out[(section, "")] = n
            continue
        key = line.split("=", 1)[0].strip()
        out.setdefault((section, key), n)
    return out


def parse_env(text: str) -> GridSpec:
    parser = configparser.ConfigParser(
        allow_no_value=True, delimiters=("=",), comment_prefixes=("#",), inline_comment_prefixes=("#",),
        interpolation=None, default_section="__none__",
    )
    parser.optionxform = str  # keep key case
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise EnvFileError(str(exc).replace("\n", " "), getattr(exc, "lineno", None)) from None
    lines = _line_index(text)
    for sec in parser.sections():
        if sec not in SECTIONS:
            raise EnvFileError(f"unknown section [{sec}]", lines.get((sec, "")))
    if not parser.has_section("grid"):
        raise EnvFileError("missing [grid] section")
    g = parser["grid"]
    for key in g:
        if key not in GRID_KEYS:
            raise EnvFileError(f"unknown key {key!r} in [grid]", lines.get(("grid", key)))
    for key in ("name", "width", "height"):
        if key not in g:
            raise EnvFileError(f"missing key {key!r} in [grid]", lines.get(("grid", "")))

    def grid_int(key):
        try:
            return int(g[key])
        except ValueError:
            raise EnvFileError(f"{key} must be an integer", lines.get(("grid", key))) from None

    def csv(key, default):
        return tuple(x.strip() for x in g[key].split(",") if x.strip()) if key in g else default

    start: str | tuple[Cell, ...] = "uniform"
    if g.get("start", "uniform").strip() != "uniform":
        start = tuple(_cell(c, lines.get(("grid", "start"))) for c in g["start"].split(";"))
    exclusive = g.get("exclusive", "true").strip().lower()
    if exclusive not in ("true", "false"):
        raise EnvFileError("exclusive must be true or false", lines.get(("grid", "exclusive")))

    def cells(sec):
        out = set()
        if parser.has_section(sec):
            for key, val in parser[sec].items():
                if val is not None:
                    raise EnvFileError(f"[{sec}] entries are bare cells", lines.get((sec, key)))
                out.add(_cell(key, lines.get((sec, key))))
        return frozenset(out)

    labels = {}
    if parser.has_section("labels"):
        for key, val in parser["labels"].items():
            ln = lines.get(("labels", key))
            labels[_cell(key, ln)] = _label_dist(val or "", ln)
    walls = {}
    if parser.has_section("walls"):
        for key, val in parser["walls"].items():
            ln = lines.get(("walls", key))
            toks = tuple((val or "").split())
            if len(toks) != 4:
                raise EnvFileError("walls need four tokens (north west south east)", ln)
            walls[_cell(key, ln)] = toks
    spec = GridSpec(
        name=g["name"].strip(),
        width=grid_int("width"),
        height=grid_int("height"),
        atoms=tuple(sorted(csv("atoms", ()))),
        actions=csv("actions", ("up", "left", "down", "right")),
        noise=g.get("noise", "side_slip").strip(),
        observation=g.get("observation", "cell").strip(),
        start=start,
        exclusive=exclusive == "true",
        blocked=cells("blocked"),
        traps=cells("traps"),
        labels=labels,
        walls=walls,
    )
    problems = spec.problems()
    if problems:
        cell = re.search(r"cell (\d+),(\d+)", problems[0])
        ln = None
        if cell:
            key = f"{cell.group(1)},{cell.group(2)}"
            ln = next((n for (sec, k), n in lines.items() if k.replace(" ", "") == key), None)
        raise EnvFileError(problems[0], ln)
    return spec


def load_env(path: str | Path) -> GridSpec:
    return parse_env(Path(path).read_text(encoding="utf-8"))


# ---------------------------------------------------------------- writing


def _fmt_prob(p: float) -> str:
    return repr(float(p))


def format_env(spec: GridSpec) -> str:
    """Canonical text: fixed key order, cells sorted row-major."""
    start = "uniform" if isinstance(spec.start, str) else "; ".join(f"{r},{c}" for r, c in spec.start)
    out = [
        "[grid]",
        f"name = {spec.name}",
        f"width = {spec.width}",
        f"height = {spec.height}",
        f"atoms = {', '.join(spec.atoms)}",
        f"actions = {', '.join(spec.actions)}",
        f"noise = {spec.noise}",
        f"observation = {spec.observation}",
        f"start = {start}",
        f"exclusive = {'true' if spec.exclusive else 'false'}",
    ]
    for sec, cells in (("blocked", spec.blocked), ("traps", spec.traps)):
        if cells:
            out += ["", f"[{sec}]"] + [f"{r},{c}" for r, c in sorted(cells)]
    if spec.labels:
        out += ["", "[labels]"]
        for (r, c), dist in sorted(spec.labels.items()):
            toks = []
            for names, p in dist:
                name = "&".join(names) if names else "-"
                toks.append(name if p == 1.0 and len(dist) == 1 else f"{name}:{_fmt_prob(p)}")
            out.append(f"{r},{c} = {' '.join(toks)}")
    if spec.walls:
        out += ["", "[walls]"] + [f"{r},{c} = {' '.join(w)}" for (r, c), w in sorted(spec.walls.items())]
    return "\n".join(out) + "\n"


def save_env(spec: GridSpec, path: str | Path) -> None:
    Path(path).write_text(format_env(spec), encoding="utf-8")

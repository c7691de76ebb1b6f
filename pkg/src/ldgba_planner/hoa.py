"""Read and write LDGBAs in a subset of the HOA v1 format.

Supported: a single ``Start:`` state, ``AP:``, ``Alias:``, state-based
generalized Buchi acceptance (``Acceptance: f Inf(0)&...&Inf(f-1)``) and
explicit edge labels.  Two documented extensions carry what HOA cannot:

* epsilon edges are labelled with the reserved alias ``@eps``, declared as
  ``Alias: @eps f`` so epsilon-unaware tools read them as dead edges;
* the non-deterministic states are listed after the token
  ``ldgba-partition:`` on a ``properties:`` line; all other states are
  deterministic.

``dump_hoa`` is canonical: states in index order, epsilon edges first, then
one edge per target ordered by the smallest symbol reaching it, each label
a minimal-ish sum of products.
"""
from __future__ import annotations

import re
from collections import defaultdict

from .automata import Ldgba, validate
from .logic import AtomSet

EPS_ALIAS = "@eps"


class HoaError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


class HoaValidationError(HoaError):
    def __init__(self, violations: list[str]):
        super().__init__("automaton is not a valid LDGBA: " + "; ".join(violations))
        self.violations = violations


# ---------------------------------------------------------------- writing


def _cubes_within(symbols: set[int], n: int) -> list[tuple[int, int]]:
    """Prime implicants (mask, value) of the boolean function true on ``symbols``."""
    full = (1 << n) - 1
    inside = []
    for mask in range(1 << n):
        free = full & ~mask
        free_bits = [b for b in range(n) if free >> b & 1]
        for value in range(1 << n):
            if value & ~mask:
                continue
            ok = True
            for choice in range(1 << len(free_bits)):
                sym = value
                for k, b in enumerate(free_bits):
                    if choice >> k & 1:
                        sym |= 1 << b
                if sym not in symbols:
                    ok = False
                    break
            if ok:
                inside.append((mask, value))
    # a cube is prime if dropping any literal leaves the set
    inside_set = set(inside)
    primes = []
    for mask, value in inside:
        if not any(
            (mask & ~(1 << b), value & ~(1 << b)) in inside_set
            for b in range(n)
            if mask >> b & 1
        ):
            primes.append((mask, value))
    return primes


def _cube_members(mask: int, value: int, n: int) -> set[int]:
    return {s for s in range(1 << n) if s & mask == value}


def _cover(symbols: set[int], n: int) -> list[tuple[int, int]]:
    primes = _cubes_within(symbols, n)
    members = {p: _cube_members(*p, n) for p in primes}
    left = set(symbols)
    chosen = []
    while left:
        best = min(
            primes,
            key=lambda p: (-len(members[p] & left), bin(p[0]).count("1"), p[0], p[1]),
        )
        chosen.append(best)
        left -= members[best]
    return sorted(chosen, key=lambda p: min(members[p]))


def _label(symbols: set[int], n: int) -> str:
    if len(symbols) == 1 << n:
        return "t"
    terms = []
    for mask, value in _cover(symbols, n):
        lits = [str(b) if value >> b & 1 else f"!{b}" for b in range(n) if mask >> b & 1]
        terms.append("&".join(lits) if lits else "t")
    return " | ".join(terms)


def dump_hoa(a: Ldgba, name: str | None = None) -> str:
    n_ap = len(a.atoms)
    f = len(a.accepting)
    lines = ["HOA: v1"]
    if name:
        lines.append(f'name: "{name}"')
    lines += [
        f"States: {a.n_states}",
        f"Start: {a.initial}",
        f"AP: {n_ap}" + "".join(f' "{p}"' for p in a.atoms),
        f"acc-name: generalized-Buchi {f}",
        f"Acceptance: {f} " + ("&".join(f"Inf({i})" for i in range(f)) if f else "t"),
        f"Alias: {EPS_ALIAS} f",
        "properties: state-acc ldgba-partition:"
        + "".join(f" {q}" for q in range(a.n_states) if not a.deterministic[q]),
        "--BODY--",
    ]
    for q in range(a.n_states):
        marks = [i for i, fs in enumerate(a.accepting) if q in fs]
        acc = " {" + " ".join(map(str, marks)) + "}" if marks else ""
        lines.append(f'State: {q} "{a.names[q]}"{acc}')
        for t in sorted(a.eps[q]):
            lines.append(f"[{EPS_ALIAS}] {t}")
        by_target: dict[int, set[int]] = defaultdict(set)
        for sym, targets in enumerate(a.delta[q]):
            for t in targets:
                by_target[t].add(sym)
        for t in sorted(by_target, key=lambda t: (min(by_target[t]), t)):
            lines.append(f"[{_label(by_target[t], n_ap)}] {t}")
    lines.append("--END--")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- reading

_LABEL_TOKEN = re.compile(r"\s*(?:(\d+)|(@[A-Za-z0-9_-]+)|([tf!&|()]))")


def _parse_label(text: str, aliases: dict[str, str], lineno: int, depth: int = 0):
    """Compile a label into a predicate over AP valuations (tuple of bools)."""
    if depth > 16:
        raise HoaError("alias recursion too deep", lineno)
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _LABEL_TOKEN.match(text, pos)
        if not m:
            raise HoaError(f"bad label {text!r}", lineno)
        tokens.append(m.group(m.lastindex))
        pos = m.end()
    i = 0

    def peek():
        return tokens[i] if i < len(tokens) else None

    def take():
        nonlocal i
        i += 1
        return tokens[i - 1]

    def disj():
        parts = [conj()]
        while peek() == "|":
            take()
            parts.append(conj())
        return lambda v: any(p(v) for p in parts)

    def conj():
        parts = [atom()]
        while peek() == "&":
            take()
            parts.append(atom())
        return lambda v: all(p(v) for p in parts)

    def atom():
        tok = take() if peek() is not None else None
        if tok is None:
            raise HoaError(f"truncated label {text!r}", lineno)
        if tok == "!":
            inner = atom()
            return lambda v: not inner(v)
        if tok == "(":
            inner = disj()
            if peek() != ")":
                raise HoaError(f"unbalanced label {text!r}", lineno)
            take()
            return inner
        if tok == "t":
            return lambda v: True
        if tok == "f":
            return lambda v: False
        if tok.startswith("@"):
            if tok not in aliases:
                raise HoaError(f"undefined alias {tok}", lineno)
            return _parse_label(aliases[tok], aliases, lineno, depth + 1)
        if tok.isdigit():
            k = int(tok)
            return lambda v: v[k]
        raise HoaError(f"unexpected {tok!r} in label", lineno)

    pred = disj()
    if i != len(tokens):
        raise HoaError(f"trailing tokens in label {text!r}", lineno)
    return pred


def _split_quoted(rest: str, lineno: int) -> list[str]:
    out = []
    for m in re.finditer(r'"((?:[^"\\]|\\.)*)"|(\S+)', rest):
        out.append(m.group(1) if m.group(1) is not None else m.group(2))
    return out


def _int(text: str, lineno: int) -> int:
    try:
        return int(text)
    except ValueError:
        raise HoaError(f"expected an integer, got {text!r}", lineno) from None


def load_hoa(text: str) -> Ldgba:
    lines = text.split("\n")
    n_states = start = None
    ap: list[str] | None = None
    n_acc = None
    aliases: dict[str, str] = {}
    nondet: set[int] = set()
    body_at = None
    for lineno, line in enumerate(lines, 1):
        line = line.strip()
        if not line:
            continue
        if line == "--BODY--":
            body_at = lineno
            break
        m = re.match(r"([A-Za-z_][A-Za-z0-9_-]*):\s*(.*)\Z", line)
        if not m:
            raise HoaError(f"bad header line {line!r}", lineno)
        key, rest = m.groups()
        if key == "HOA":
            if rest != "v1":
                raise HoaError(f"unsupported version {rest!r}", lineno)
        elif key == "States":
            n_states = _int(rest, lineno)
        elif key == "Start":
            parts = rest.split()
            if len(parts) != 1 or not parts[0].isdigit():
                raise HoaError("exactly one initial state is supported", lineno)
            if start is not None:
                raise HoaError("multiple Start: lines are not supported", lineno)
            start = _int(parts[0], lineno)
        elif key == "AP":
            parts = _split_quoted(rest, lineno)
            count = _int(parts[0], lineno)
            ap = parts[1:]
            if len(ap) != count:
                raise HoaError(f"AP count {count} but {len(ap)} names", lineno)
        elif key == "acc-name":
            parts = rest.split()
            if parts[0] not in ("generalized-Buchi", "Buchi"):
                raise HoaError(f"unsupported acceptance name {parts[0]!r}", lineno)
        elif key == "Acceptance":
            m2 = re.match(r"(\d+)\s+(.*)\Z", rest)
            if not m2:
                raise HoaError("malformed Acceptance", lineno)
            n_acc = int(m2.group(1))
            cond = m2.group(2).replace(" ", "")
            expected = "&".join(f"Inf({i})" for i in range(n_acc)) if n_acc else "t"
            if cond != expected:
                raise HoaError(f"only generalized Buchi acceptance {expected!r} is supported", lineno)
        elif key == "Alias":
            m2 = re.match(r"(@[A-Za-z0-9_-]+)\s+(.*)\Z", rest)
            if not m2:
                raise HoaError("malformed Alias", lineno)
            aliases[m2.group(1)] = m2.group(2)
        elif key == "properties":
            toks = rest.split()
            if "ldgba-partition:" in toks:
                k = toks.index("ldgba-partition:")
                for t in toks[k + 1 :]:
                    if not t.isdigit():
                        raise HoaError(f"bad state id {t!r} in ldgba-partition", lineno)
                    nondet.add(int(t))
        # other header items (name, tool, ...) carry no semantics here
    if body_at is None:
        raise HoaError("missing --BODY--")
    for what, val in (("States", n_states), ("Start", start), ("AP", ap), ("Acceptance", n_acc)):
        if val is None:
            raise HoaError(f"missing {what}: header")
    if EPS_ALIAS in aliases and aliases[EPS_ALIAS].strip() != "f":
        raise HoaError(f"{EPS_ALIAS} must be declared as 'f'")

    atoms = AtomSet(ap)
    if len(atoms) != len(ap):
        raise HoaError("duplicate AP names")
    bit_of = [atoms.index(p) for p in ap]
    valuations = [tuple(bool(sym >> b & 1) for b in bit_of) for sym in atoms.symbols()]

    delta = [[set() for _ in atoms.symbols()] for _ in range(n_states)]
    eps: list[set[int]] = [set() for _ in range(n_states)]
    acc: list[set[int]] = [set() for _ in range(n_acc)]
    names = [f"q{i}" for i in range(n_states)]
    seen_states: set[int] = set()
    current = None
    ended = False
    for lineno in range(body_at + 1, len(lines) + 1):
        line = lines[lineno - 1].strip()
        if not line:
            continue
        if line == "--END--":
            ended = True
            break
        if line.startswith("State:"):
            m = re.match(r'State:\s*(\d+)\s*(?:"((?:[^"\\]|\\.)*)")?\s*(?:\{([\d\s]*)\})?\s*\Z', line)
            if not m:
                raise HoaError(f"malformed state line {line!r}", lineno)
            current = int(m.group(1))
            if current >= n_states:
                raise HoaError(f"state {current} out of range", lineno)
            if current in seen_states:
                raise HoaError(f"state {current} declared twice", lineno)
            seen_states.add(current)
            if m.group(2) is not None:
                names[current] = m.group(2)
            for s in (m.group(3) or "").split():
                i = _int(s, lineno)
                if i >= n_acc:
                    raise HoaError(f"acceptance set {i} out of range", lineno)
                acc[i].add(current)
            continue
        if current is None:
            raise HoaError("edge before any State:", lineno)
        m = re.match(r"\[(.*)\]\s*(\d+)\s*(\{.*\})?\s*\Z", line)
        if not m:
            raise HoaError(f"malformed edge {line!r} (implicit labels unsupported)", lineno)
        if m.group(3):
            raise HoaError("transition-based acceptance marks are unsupported", lineno)
        label, target = m.group(1).strip(), int(m.group(2))
        if target >= n_states:
            raise HoaError(f"edge target {target} out of range", lineno)
        if label == EPS_ALIAS:
            eps[current].add(target)
            continue
        pred = _parse_label(label, aliases, lineno)
        for sym, v in enumerate(valuations):
            if pred(v):
                delta[current][sym].add(target)
    if not ended:
        raise HoaError("missing --END--")

    a = Ldgba.build(
        atoms,
        start,
        [q not in nondet for q in range(n_states)],
        delta,
        eps,
        acc,
        names,
    )
    problems = validate(a)
    if problems:
        raise HoaValidationError(problems)
    return a


def dnf_symbols(label: str, atoms: AtomSet) -> set[int]:
    """Symbols of ``atoms`` satisfying a label written over AP indices of ``atoms``."""
    pred = _parse_label(label, {}, 0)
    return {
        sym
        for sym in atoms.symbols()
        if pred(tuple(bool(sym >> b & 1) for b in range(len(atoms))))
    }


__all__ = ["EPS_ALIAS", "HoaError", "HoaValidationError", "dump_hoa", "load_hoa", "dnf_symbols"]

"""Gate-level IR for reversible circuits over indexed lines.

A circuit is an ordered list of NOT/CNOT/Toffoli/SWAP/Fredkin gates over
``width`` lines plus an optional output relabeling (a permutation applied
after the last gate, so terminal bit rotations cost zero gates).  Line 0
is the least significant data bit by convention; simulation is the single
source of truth for correctness, so the simulator here doubles as the
verification oracle for every other module.

Integers encode bit-vectors with bit i = line i.  ``simulate_batch`` is
bit-sliced: one Python int per line holds that line's bit across all
inputs, which makes exhaustive sweeps over all x < M cheap.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from math import gcd

LINE_ROLES = ("d", "a", "c", "s", "g")  # data, ancilla, control, swap, garbage


@dataclass(frozen=True)
class Gate:
    """One reversible gate: polarized controls plus one or two targets.

    One target: an X flipped when every control is satisfied (NOT, CNOT
    and multi-control Toffoli depending on the control count).  Two
    targets: SWAP/Fredkin.  ``zero_swap`` marks a Fredkin one of whose
    swapped lines is known to carry constant zero in context, which makes
    it one CNOT cheaper in the cost model (it never changes simulation).
    """

    controls: tuple[tuple[int, bool], ...]
    targets: tuple[int, ...]
    zero_swap: bool = False

    def __post_init__(self):
        lines = [c for c, _ in self.controls] + list(self.targets)
        if len(set(lines)) != len(lines):
            raise ValueError(f"gate lines collide: {self}")
        if len(self.targets) not in (1, 2):
            raise ValueError("gate needs one or two targets")
        if len(self.targets) == 2 and len(self.controls) > 1:
            raise ValueError("controlled swaps take a single control")

    @property
    def kind(self) -> str:
        if len(self.targets) == 2:
            return "FREDKIN" if self.controls else "SWAP"
        return {0: "NOT", 1: "CNOT"}.get(len(self.controls), "TOFFOLI")

    def lines(self) -> tuple[int, ...]:
        return tuple(c for c, _ in self.controls) + self.targets

    def remap(self, perm: dict[int, int] | list[int]) -> "Gate":
        return Gate(
            tuple((perm[c], p) for c, p in self.controls),
            tuple(perm[t] for t in self.targets),
            self.zero_swap,
        )


def x(t: int) -> Gate:
    return Gate((), (t,))


def cx(c: int, t: int, pol: bool = True) -> Gate:
    return Gate(((c, pol),), (t,))


def toffoli(controls, t: int) -> Gate:
    ctrls = tuple((c, True) if isinstance(c, int) else (c[0], c[1]) for c in controls)
    return Gate(ctrls, (t,))


def swap(a: int, b: int) -> Gate:
    return Gate((), (a, b))


def fredkin(c: int, a: int, b: int, pol: bool = True, zero_swap: bool = False) -> Gate:
    return Gate(((c, pol),), (a, b), zero_swap)


@dataclass
class GateCounts:
    toffoli: int = 0
    cnot: int = 0
    nots: int = 0
    ancillae: int = 0

    def triplet(self) -> tuple[int, int, int]:
        return (self.toffoli, self.cnot, self.ancillae)

    def __add__(self, other: "GateCounts") -> "GateCounts":
        return GateCounts(
            self.toffoli + other.toffoli,
            self.cnot + other.cnot,
            self.nots + other.nots,
            max(self.ancillae, other.ancillae),
        )


@dataclass
class Circuit:
    width: int
    roles: tuple[str, ...]
    gates: list[Gate] = field(default_factory=list)
    relabel: tuple[int, ...] | None = None  # output i reads wire relabel[i]

    def __post_init__(self):
        if len(self.roles) != self.width:
            raise ValueError("one role per line required")
        for r in self.roles:
            if r not in LINE_ROLES:
                raise ValueError(f"unknown line role {r!r}")
        if self.relabel is not None and sorted(self.relabel) != list(range(self.width)):
            raise ValueError("relabeling must be a permutation of the lines")
        for g in self.gates:
            if any(l >= self.width or l < 0 for l in g.lines()):
                raise ValueError("gate references a line outside the circuit")

    def data_lines(self) -> list[int]:
        return [i for i, r in enumerate(self.roles) if r == "d"]

    def lines_with_role(self, role: str) -> list[int]:
        return [i for i, r in enumerate(self.roles) if r == role]

    def copy(self) -> "Circuit":
        return Circuit(self.width, self.roles, list(self.gates), self.relabel)


def simulate_batch(c: Circuit, inputs: list[int]) -> list[int]:
    """Simulate all inputs at once, one bit-sliced column per line."""
    n_in = len(inputs)
    full = (1 << n_in) - 1
    cols = []
    for line in range(c.width):
        col = 0
        for j, v in enumerate(inputs):
            col |= ((v >> line) & 1) << j
        cols.append(col)
    for g in c.gates:
        m = full
        for ctl, pol in g.controls:
            m &= cols[ctl] if pol else ~cols[ctl] & full
            if not m:
                break
        if not m:
            continue
        if len(g.targets) == 1:
            cols[g.targets[0]] ^= m
        else:
            a, b = g.targets
            diff = (cols[a] ^ cols[b]) & m
            cols[a] ^= diff
            cols[b] ^= diff
    if c.relabel is not None:
        cols = [cols[c.relabel[i]] for i in range(c.width)]
    outs = [0] * n_in
    for line in range(c.width):
        col = cols[line]
        while col:
            j = (col & -col).bit_length() - 1
            outs[j] |= 1 << line
            col &= col - 1
    return outs


def simulate(c: Circuit, value: int) -> int:
    if value >> c.width:
        raise ValueError("input wider than the circuit")
    return simulate_batch(c, [value])[0]


def _invert_perm(p: tuple[int, ...]) -> tuple[int, ...]:
    inv = [0] * len(p)
    for i, v in enumerate(p):
        inv[v] = i
    return tuple(inv)


def inverse(c: Circuit) -> Circuit:
    """Reverse the gate order (all gate kinds are self-inverse).

    The output relabeling inverts as well; gates are conjugated through it
    so that simulate(inverse(c), simulate(c, v)) == v on every input.
    """
    if c.relabel is None:
        return Circuit(c.width, c.roles, list(reversed(c.gates)), None)
    ipi = _invert_perm(c.relabel)
    gates = [g.remap(list(ipi)) for g in reversed(c.gates)]
    return Circuit(c.width, c.roles, gates, ipi)


def compose(a: Circuit, b: Circuit) -> Circuit:
    """Concatenate b after a, folding a's output relabeling into b's lines."""
    if a.width != b.width:
        raise ValueError("width mismatch in composition")
    if a.roles != b.roles:
        raise ValueError("role mismatch in composition")
    if a.relabel is None:
        gates = a.gates + b.gates
        rel = b.relabel
    else:
        gates = a.gates + [g.remap(list(a.relabel)) for g in b.gates]
        if b.relabel is None:
            rel = a.relabel
        else:
            rel = tuple(a.relabel[b.relabel[i]] for i in range(a.width))
    if rel is not None and rel == tuple(range(a.width)):
        rel = None
    return Circuit(a.width, a.roles, gates, rel)


def counts(c: Circuit) -> GateCounts:
    """Gate tallies in the paper's cost model.

    k-control Toffolis count 2(k+1)-5 plain Toffolis for k >= 3, SWAP
    counts 3 CNOTs, Fredkin 1 Toffoli + 2 CNOTs (1 CNOT when flagged as a
    zero-input swap).  Negative controls cost the same as positive ones.
    The terminal relabeling is free.
    """
    out = GateCounts(ancillae=sum(1 for r in c.roles if r in ("a", "s")))
    for g in c.gates:
        k = len(g.controls)
        if len(g.targets) == 1:
            if k == 0:
                out.nots += 1
            elif k == 1:
                out.cnot += 1
            elif k == 2:
                out.toffoli += 1
            else:
                out.toffoli += 2 * (k + 1) - 5
        elif k == 0:
            out.cnot += 3
        else:
            out.toffoli += 1
            out.cnot += 1 if g.zero_swap else 2
    return out


def t_cost(c: Circuit) -> int:
    return counts(c).toffoli


def add_control(c: Circuit, line: int) -> Circuit:
    """Positive control on every gate; the baseline way to enable a block."""
    if any(line in g.lines() for g in c.gates):
        raise ValueError("control line is already used by the circuit")
    if line >= c.width:
        raise ValueError("control line outside the circuit")
    if c.relabel is not None and any(c.relabel[i] != i for i in range(c.width)):
        raise ValueError("materialize the relabeling before adding a control")
    gates = [Gate(((line, True),) + g.controls, g.targets, g.zero_swap) for g in c.gates]
    roles = list(c.roles)
    roles[line] = "c"
    return Circuit(c.width, tuple(roles), gates, None)


def embed(block: Circuit, width: int, mapping: list[int], roles: tuple[str, ...]) -> Circuit:
    """Map a block onto lines of a wider circuit; relabels extend to the
    identity outside the mapped lines."""
    gates = [g.remap(mapping) for g in block.gates]
    rel = None
    if block.relabel is not None:
        perm = list(range(width))
        for i in range(block.width):
            perm[mapping[i]] = mapping[block.relabel[i]]
        rel = tuple(perm)
    return Circuit(width, roles, gates, rel)


def materialize_relabel(c: Circuit) -> Circuit:
    """Replace the output relabeling by explicit SWAP gates."""
    if c.relabel is None:
        return c.copy()
    perm = list(c.relabel)
    gates = list(c.gates)
    # output i must read wire perm[i]: apply cycles of SWAPs
    for start in range(c.width):
        while perm[start] != start:
            j = perm[start]
            gates.append(swap(start, j))
            perm[start], perm[j] = perm[j], perm[start]
    return Circuit(c.width, c.roles, gates, None)


def verify_modmult(c: Circuit, m: int, mult: int, data_lines: list[int] | None = None) -> bool:
    """True iff the circuit maps x -> mult*x % M on the data lines for every
    x < M, with every non-data, non-garbage line restored to its input."""
    if gcd(mult, m) != 1 or not 0 < mult < m:
        raise ValueError("multiplier must be coprime with M and below it")
    lines = data_lines if data_lines is not None else c.data_lines()
    if (1 << len(lines)) < m:
        raise ValueError("layout has too few data lines for the modulus")
    inputs = [sum(((v >> k) & 1) << l for k, l in enumerate(lines)) for v in range(m)]
    outputs = simulate_batch(c, inputs)
    checked = set(lines)
    rest = [i for i in range(c.width) if i not in checked and c.roles[i] != "g"]
    for v, out in zip(range(m), outputs):
        got = sum(((out >> l) & 1) << k for k, l in enumerate(lines))
        if got != mult * v % m:
            return False
        for l in rest:
            if (out >> l) & 1 != (inputs[v] >> l) & 1:
                return False
    return True


def is_permutation(c: Circuit) -> bool:
    """Exhaustive bijectivity check; meant for widths up to ~12."""
    outs = simulate_batch(c, list(range(1 << c.width)))
    return len(set(outs)) == 1 << c.width


# --- rewrite passes -------------------------------------------------------


def propagate_constants(gates: list[Gate], width: int, known: dict[int, int]) -> list[Gate]:
    """Constant propagation over a gate list.

    ``known`` gives lines whose value is a known constant that is *not*
    physically present (their set/reset inverters are elided): gates with
    a failing known control are dropped, satisfied known controls are
    removed, and unconditional inverters on unknown lines are absorbed
    into the polarity of later controls.  Pending inversions that survive
    to the end are emitted as NOT gates.
    """
    value: dict[int, int] = dict(known)
    pend = [0] * width
    out: list[Gate] = []

    def materialize(line: int):
        if line in value:
            if value[line]:
                pend[line] ^= 1
            del value[line]
        if pend[line]:
            out.append(x(line))
            pend[line] = 0

    for g in gates:
        if len(g.targets) == 2:
            for l in g.lines():
                materialize(l)
            out.append(g)
            continue
        ctrls: list[tuple[int, bool]] = []
        dead = False
        for ctl, pol in g.controls:
            if ctl in value:
                if bool(value[ctl]) != pol:
                    dead = True
                    break
                continue  # satisfied constant control: drop it
            ctrls.append((ctl, pol != bool(pend[ctl])))
        if dead:
            continue
        t = g.targets[0]
        if not ctrls:
            if t in value:
                value[t] ^= 1
            else:
                pend[t] ^= 1
            continue
        if t in value:
            pend[t] ^= value.pop(t)
        out.append(Gate(tuple(ctrls), (t,)))
    for line in range(width):
        if pend[line]:
            out.append(x(line))
        if value.get(line):
            out.append(x(line))
    return out


def _commutes(a: Gate, b: Gate) -> bool:
    if len(a.targets) == 2 or len(b.targets) == 2:
        return not set(a.lines()) & set(b.lines())
    a_ctl = {c for c, _ in a.controls}
    b_ctl = {c for c, _ in b.controls}
    return not (set(a.targets) & b_ctl or set(b.targets) & a_ctl)


def cancel_pairs(gates: list[Gate]) -> list[Gate]:
    """Drop pairs of identical self-inverse gates separated by commuting gates."""
    changed = True
    gates = list(gates)
    while changed:
        changed = False
        i = 0
        while i < len(gates):
            g = gates[i]
            j = i + 1
            while j < len(gates):
                h = gates[j]
                if h == g:
                    del gates[j]
                    del gates[i]
                    changed = True
                    i -= 1
                    break
                if not _commutes(g, h):
                    break
                j += 1
            i += 1
    return gates


def drop_idle_lines(c: Circuit, keep: set[int] | None = None) -> Circuit:
    """Remove helper lines that no gate touches and no relabel moves."""
    used = set(keep or ())
    for g in c.gates:
        used.update(g.lines())
    if c.relabel is not None:
        used.update(i for i in range(c.width) if c.relabel[i] != i)
    drop = [
        i
        for i in range(c.width)
        if i not in used and c.roles[i] in ("a", "g")
    ]
    if not drop:
        return c
    keep_lines = [i for i in range(c.width) if i not in drop]
    remap = {old: new for new, old in enumerate(keep_lines)}
    gates = [g.remap(remap) for g in c.gates]
    rel = None
    if c.relabel is not None:
        rel = tuple(remap[c.relabel[old]] for old in keep_lines)
    roles = tuple(c.roles[i] for i in keep_lines)
    return Circuit(len(keep_lines), roles, gates, rel)


# --- text format ----------------------------------------------------------


class CircuitParseError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def _fmt_ctrl(ctl: tuple[int, bool]) -> str:
    line, pol = ctl
    return f"{'+' if pol else '-'}{line}"


def render(c: Circuit) -> str:
    out = [f"lines {c.width}", "roles " + " ".join(c.roles)]
    for g in c.gates:
        if len(g.targets) == 2:
            if g.controls:
                tag = "f0" if g.zero_swap else "f"
                out.append(f"{tag} {_fmt_ctrl(g.controls[0])} {g.targets[0]} {g.targets[1]}")
            else:
                out.append(f"s {g.targets[0]} {g.targets[1]}")
        elif not g.controls:
            out.append(f"n {g.targets[0]}")
        elif len(g.controls) == 1:
            out.append(f"c {_fmt_ctrl(g.controls[0])} {g.targets[0]}")
        else:
            ctl = " ".join(_fmt_ctrl(cc) for cc in g.controls)
            out.append(f"t {ctl} {g.targets[0]}")
    if c.relabel is not None:
        out.append("relabel " + " ".join(str(v) for v in c.relabel))
    return "\n".join(out) + "\n"


def _parse_ctrl(tok: str, lineno: int) -> tuple[int, bool]:
    if not tok or tok[0] not in "+-":
        raise CircuitParseError(lineno, f"control token {tok!r} needs a +/- sign")
    try:
        return int(tok[1:]), tok[0] == "+"
    except ValueError:
        raise CircuitParseError(lineno, f"bad control token {tok!r}") from None


def parse(text: str) -> Circuit:
    width = None
    roles: tuple[str, ...] | None = None
    gates: list[Gate] = []
    relabel = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        op, args = toks[0], toks[1:]
        try:
            if op == "lines":
                width = int(args[0])
            elif op == "roles":
                roles = tuple(args)
            elif op == "n":
                gates.append(x(int(args[0])))
            elif op == "c":
                ctl = _parse_ctrl(args[0], lineno)
                gates.append(Gate((ctl,), (int(args[1]),)))
            elif op == "t":
                ctls = tuple(_parse_ctrl(a, lineno) for a in args[:-1])
                gates.append(Gate(ctls, (int(args[-1]),)))
            elif op == "s":
                gates.append(swap(int(args[0]), int(args[1])))
            elif op in ("f", "f0"):
                ctl = _parse_ctrl(args[0], lineno)
                gates.append(Gate((ctl,), (int(args[1]), int(args[2])), op == "f0"))
            elif op == "relabel":
                relabel = tuple(int(a) for a in args)
            else:
                raise CircuitParseError(lineno, f"unknown directive {op!r}")
        except CircuitParseError:
            raise
        except (ValueError, IndexError) as exc:
            raise CircuitParseError(lineno, f"malformed {op!r} line: {exc}") from None
    if width is None or roles is None:
        raise CircuitParseError(0, "missing 'lines' or 'roles' header")
    try:
        return Circuit(width, roles, gates, relabel)
    except ValueError as exc:
        raise CircuitParseError(0, str(exc)) from None


# --- construction helper --------------------------------------------------


class Builder:
    """Incremental circuit builder with line allocation by role."""

    def __init__(self):
        self.roles: list[str] = []
        self.gates: list[Gate] = []
        self.relabel: tuple[int, ...] | None = None

    def line(self, role: str) -> int:
        self.roles.append(role)
        return len(self.roles) - 1

    def register(self, n: int, role: str) -> list[int]:
        return [self.line(role) for _ in range(n)]

    def emit(self, *gates: Gate):
        self.gates.extend(gates)

    def extend(self, gates: list[Gate]):
        self.gates.extend(gates)

    def build(self) -> Circuit:
        return Circuit(len(self.roles), tuple(self.roles), self.gates, self.relabel)

"""Two-register operator machine and shortest-path synthesis of Cx%M.

States (a, b) stand for register contents (a*x % M, b*x % M); the source
is (1, 0).  Operators act on one register: bitwise copy/clear (free),
negation and modular add/subtract (2n Toffolis), doubling/halving
(5n-7), times/divided-by three (33n-35) and five (38n-42).  Dijkstra over
the implicit M x M state graph yields minimum-cost programs for every
multiplier at once; the binary/CSD expansions of Theorem-2 style and the
Bennett composition provide constructive fallbacks.

Programs expand to gate level by composing the arithmetic blocks; the
expansion keeps every register value strictly below M (negation gets a
0<->M codeword fix-up), so expanded circuits verify exactly.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from functools import lru_cache
from math import gcd

from .circuit import Builder, Circuit, compose, cx, embed, inverse, t_cost
from .arith import Pool, adder_gates, compare_reg_gates, reduce_gates
from .multblocks import divrem_mult, double_mod, strict_neg_gates
from .numeric import coprimes, csd, modinv

ACTIONS = "c~+-dhrtvf"
_INVERSE = {"c": "c", "~": "~", "+": "-", "-": "+", "d": "h", "h": "d",
            "r": "t", "t": "r", "v": "f", "f": "v"}


class InvalidEdge(ValueError):
    """An operator was applied outside its precondition."""


@dataclass(frozen=True)
class OpCode:
    action: str
    reg: int

    def __post_init__(self):
        if self.action not in ACTIONS or self.reg not in (1, 2):
            raise ValueError(f"bad opcode {self.action}{self.reg}")

    def __str__(self) -> str:
        return f"{self.action}{self.reg}"

    def inverse(self) -> "OpCode":
        return OpCode(_INVERSE[self.action], self.reg)

    def swap_registers(self) -> "OpCode":
        return OpCode(self.action, 3 - self.reg)


Program = list[OpCode]


def parse_program(text: str) -> Program:
    if len(text) % 2:
        raise ValueError("operator strings have two characters per step")
    ops = []
    for i in range(0, len(text), 2):
        act, reg = text[i], text[i + 1]
        if act not in ACTIONS or reg not in "12":
            raise ValueError(f"bad operator {text[i:i+2]!r} at position {i}")
        ops.append(OpCode(act, int(reg)))
    return ops


def render_program(ops: Program) -> str:
    return "".join(str(op) for op in ops)


def op_cost(op: OpCode, n: int) -> int:
    return {
        "c": 0,
        "~": 2 * n,
        "+": 2 * n,
        "-": 2 * n,
        "d": 5 * n - 7,
        "h": 5 * n - 7,
        "r": 33 * n - 35,
        "t": 33 * n - 35,
        "v": 38 * n - 42,
        "f": 38 * n - 42,
    }[op.action]


def program_cost(ops: Program, n: int) -> int:
    return sum(op_cost(op, n) for op in ops)


def _available(action: str, m: int) -> bool:
    if action in "h":
        return m % 2 == 1
    if action in "rt":
        return m % 3 != 0
    if action in "vf":
        return m % 5 != 0
    return True


def apply_op(state: tuple[int, int], op: OpCode, m: int) -> tuple[int, int]:
    a, b = state
    act = op.action
    if not _available(act, m):
        raise InvalidEdge(f"{op} unavailable for M={m}")
    if act == "c":
        # bitwise CNOT fan: valid as copy, clear, or no-op on a zero source
        if op.reg == 1:
            if a == 0:
                return (b, b)
            if a == b:
                return (0, b)
            if b == 0:
                return (a, b)
        else:
            if b == 0:
                return (a, a)
            if b == a:
                return (a, 0)
            if a == 0:
                return (a, b)
        raise InvalidEdge(f"{op} from state {state}")
    if act == "~":
        f = lambda v: (m - v) % m
    elif act == "+":
        f = None
    elif act == "-":
        f = None
    elif act == "d":
        f = lambda v: 2 * v % m
    elif act == "h":
        inv2 = modinv(2, m)
        f = lambda v: v * inv2 % m
    elif act == "r":
        f = lambda v: 3 * v % m
    elif act == "t":
        inv3 = modinv(3, m)
        f = lambda v: v * inv3 % m
    elif act == "v":
        f = lambda v: 5 * v % m
    else:
        inv5 = modinv(5, m)
        f = lambda v: v * inv5 % m
    if act == "+":
        return ((a + b) % m, b) if op.reg == 1 else (a, (a + b) % m)
    if act == "-":
        return ((a - b) % m, b) if op.reg == 1 else (a, (b - a) % m)
    return (f(a), b) if op.reg == 1 else (a, f(b))


def eval_program(ops: Program, m: int, start: tuple[int, int] = (1, 0)) -> tuple[int, int]:
    state = start
    for op in ops:
        state = apply_op(state, op, m)
    return state


# --- Dijkstra over the implicit state graph -----------------------------------


@dataclass
class SynthEntry:
    c: int
    cost: int
    program: str


@dataclass
class SynthResult:
    m: int
    n: int
    entries: dict[int, SynthEntry]

    def cost(self, c: int) -> int:
        return self.entries[c].cost

    def program(self, c: int) -> Program:
        return parse_program(self.entries[c].program)


MEMORY_LIMIT_BITS = 15


def dijkstra_all(m: int) -> SynthResult:
    """Single-source shortest paths from (1, 0) to every (C, 0).

    Dense M*M cost array with one predecessor opcode per vertex; programs
    are rebuilt by walking inverse operators back to the source.  Refuses
    moduli beyond 15 bits, where the vertex array stops fitting.
    """
    if m.bit_length() > MEMORY_LIMIT_BITS:
        raise ResourceWarning(f"modulus beyond {MEMORY_LIMIT_BITS}-bit search limit")
    if m % 2 == 0:
        raise ValueError("modulus must be odd")
    n = m.bit_length()
    inv2 = modinv(2, m)
    inv3 = modinv(3, m) if m % 3 else None
    inv5 = modinv(5, m) if m % 5 else None

    # opcode table in lexicographic order of the two-character strings,
    # so equal-cost ties resolve deterministically
    ops: list[tuple[str, int, int]] = []
    for act in sorted(ACTIONS, key=lambda a: a):
        if not _available(act, m):
            continue
        for reg in (1, 2):
            ops.append((act, reg, op_cost(OpCode(act, reg), n)))
    ops.sort(key=lambda t: f"{t[0]}{t[1]}")

    size = m * m
    inf = 1 << 30
    dist = [inf] * size
    length = [0] * size
    pred = [-1] * size
    src = 1 * m + 0
    dist[src] = 0
    heap: list[tuple[int, int, int]] = [(0, 0, src)]
    push = heapq.heappush
    pop = heapq.heappop

    while heap:
        cost, plen, idx = pop(heap)
        if cost > dist[idx] or (cost == dist[idx] and plen > length[idx]):
            continue
        a, b = divmod(idx, m)
        for opi, (act, reg, ocost) in enumerate(ops):
            if act == "c":
                if reg == 1:
                    if a == 0 and b != 0:
                        na, nb = b, b
                    elif a == b and a != 0:
                        na, nb = 0, b
                    else:
                        continue
                else:
                    if b == 0 and a != 0:
                        na, nb = a, a
                    elif b == a and b != 0:
                        na, nb = a, 0
                    else:
                        continue
            else:
                v = a if reg == 1 else b
                if act == "+":
                    o = b if reg == 1 else a
                    if o == 0:
                        continue
                    nv = (v + o) % m
                elif act == "-":
                    o = b if reg == 1 else a
                    if o == 0:
                        continue
                    nv = (v - o) % m
                else:
                    if v == 0:
                        continue
                    if act == "~":
                        nv = m - v
                    elif act == "d":
                        nv = 2 * v % m
                    elif act == "h":
                        nv = v * inv2 % m
                    elif act == "r":
                        nv = 3 * v % m
                    elif act == "t":
                        nv = v * inv3 % m
                    elif act == "v":
                        nv = 5 * v % m
                    else:
                        nv = v * inv5 % m
                na, nb = (nv, b) if reg == 1 else (a, nv)
            nidx = na * m + nb
            ncost = cost + ocost
            nlen = plen + 1
            if ncost < dist[nidx] or (ncost == dist[nidx] and nlen < length[nidx]):
                dist[nidx] = ncost
                length[nidx] = nlen
                pred[nidx] = opi
                push(heap, (ncost, nlen, nidx))

    entries = {1: SynthEntry(1, 0, "")}
    for c in range(2, m):
        if gcd(c, m) != 1:
            continue
        idx = c * m
        if dist[idx] >= inf:
            continue
        steps: list[str] = []
        cur = idx
        while cur != src:
            act, reg, _ = ops[pred[cur]]
            steps.append(f"{act}{reg}")
            a, b = divmod(cur, m)
            pa, pb = apply_op((a, b), OpCode(act, reg).inverse(), m)
            cur = pa * m + pb
        entries[c] = SynthEntry(c, dist[idx], "".join(reversed(steps)))
    return SynthResult(m=m, n=n, entries=entries)


# --- constructive programs -----------------------------------------------------


def binary_expansion_program(c: int, m: int) -> Program:
    """(x, 0) -> (x, Cx%M) from the binary expansion of C, MSB first."""
    if not 0 < c < m:
        raise ValueError("need 0 < C < M")
    ops: Program = []
    started = False
    for i in reversed(range(c.bit_length())):
        if started:
            ops.append(OpCode("d", 2))
        if (c >> i) & 1:
            ops.append(OpCode("+", 2))
            started = True
    return ops


def csd_expansion_program(c: int, m: int) -> Program:
    """Like the binary expansion but over signed digits, so at most every
    other position costs an addition or subtraction."""
    if not 0 < c < m:
        raise ValueError("need 0 < C < M")
    digits = list(reversed(csd(c).digits))  # MSB first
    ops: Program = []
    prev_pos = digits[0][0]
    ops.append(OpCode("+", 2))  # leading CSD digit is always +1
    for pos, sign in digits[1:]:
        ops.extend(OpCode("d", 2) for _ in range(prev_pos - pos))
        ops.append(OpCode("+" if sign > 0 else "-", 2))
        prev_pos = pos
    ops.extend(OpCode("d", 2) for _ in range(prev_pos))
    return ops


def bennett_compose(c: int, m: int, builder=binary_expansion_program) -> Program:
    """(x, 0) -> (Cx%M, 0): run a (x, Cx) builder, then the inverted,
    register-swapped builder for the modular inverse of C to clear the
    copy, and finish with the free c1c2 swap into Register 1."""
    if gcd(c, m) != 1:
        raise ValueError("C must be coprime with M")
    if c % m == 1:
        return []
    first = builder(c, m)
    second = builder(modinv(c, m), m)
    unwind = [op.inverse().swap_registers() for op in reversed(second)]
    return first + unwind + [OpCode("c", 1), OpCode("c", 2)]


# --- gate-level expansion --------------------------------------------------------


def _mod_add_block(m: int) -> Circuit:
    """(u, v) -> (u, (u+v)%M) for u, v < M, all helper lines cleared."""
    n = m.bit_length()
    bld = Builder()
    u = bld.register(n, "d")
    v = bld.register(n, "d")
    h = bld.line("a")
    gamma = bld.line("a")
    cin = bld.line("a")
    pool = Pool(bld)
    bld.extend(adder_gates(u, v, cin, zout=h))
    # subtract M whenever the sum reached it, so results stay below M
    bld.extend(reduce_gates(v + [h], m - 1, m, gamma, pool))
    bld.extend(compare_reg_gates(u, v, cin, gamma))  # clears gamma: wrap <=> result < u
    return bld.build()


def _strict_neg_block(m: int) -> Circuit:
    n = m.bit_length()
    bld = Builder()
    data = bld.register(n, "d")
    const = bld.register(n, "a")
    cin = bld.line("a")
    t = bld.line("a")
    bld.extend(strict_neg_gates(data, m, const, cin, t))
    return bld.build()


class _Expander:
    """Lazily built per-modulus block library for program expansion."""

    def __init__(self, m: int):
        self.m = m
        self.n = m.bit_length()
        self.blocks: dict[str, Circuit] = {}

    def block(self, action: str) -> Circuit:
        if action in self.blocks:
            return self.blocks[action]
        m = self.m
        if action == "d":
            blk = double_mod(m)
        elif action == "h":
            blk = inverse(self.block("d"))
        elif action == "~":
            blk = _strict_neg_block(m)
        elif action == "+":
            blk = _mod_add_block(m)
        elif action == "r":
            blk = divrem_mult(m, 3)
        elif action == "t":
            blk = inverse(self.block("r"))
        elif action == "v":
            blk = divrem_mult(m, 5)
        elif action == "f":
            blk = inverse(self.block("v"))
        else:
            raise ValueError(action)
        self.blocks[action] = blk
        return blk


def program_to_circuit(ops: Program, m: int) -> Circuit:
    """Expand an operator program over two n-bit registers to gates.

    Register 1 occupies lines 0..n-1, Register 2 the next n lines; block
    helper lines share one scratch bank.  Every register value stays
    strictly below M throughout (strict negation), so the result
    implements the program's modular semantics exactly on x < M.
    """
    n = m.bit_length()
    lib = _Expander(m)
    # pre-instantiate needed blocks to size the scratch bank
    needed = set()
    for op in ops:
        if op.action == "-":
            needed.update("~+")
        elif op.action != "c":
            needed.add(op.action)
    extra = 0
    for act in needed:
        blk = lib.block(act)
        extra = max(extra, blk.width - (2 * n if act == "+" else n))
    width = 2 * n + extra
    roles = tuple(["d"] * n + ["a"] * (width - n))
    reg = {1: list(range(n)), 2: list(range(n, 2 * n))}
    bank = list(range(2 * n, width))

    out = Circuit(width, roles, [], None)
    for op in ops:
        if op.action == "c":
            src, dst = (reg[2], reg[1]) if op.reg == 1 else (reg[1], reg[2])
            step = Circuit(width, roles, [cx(src[i], dst[i]) for i in range(n)], None)
            out = compose(out, step)
            continue
        actions = [op.action] if op.action != "-" else ["~", "+", "~"]
        for act in actions:
            blk = lib.block(act)
            if act == "+":
                other = reg[2] if op.reg == 1 else reg[1]
                mapping = other + reg[op.reg] + bank[: blk.width - 2 * n]
            else:
                mapping = reg[op.reg] + bank[: blk.width - n]
            out = compose(out, embed(blk, width, mapping, roles))
    return out


# --- synthesis facade -------------------------------------------------------------


@lru_cache(maxsize=8)
def dijkstra_cached(m: int) -> SynthResult:
    return dijkstra_all(m)


def mult_cost_table(m: int) -> dict[int, int]:
    """Minimum known T-cost per coprime multiplier, in operator units."""
    n = m.bit_length()
    if n <= 12:
        return {c: e.cost for c, e in dijkstra_cached(m).entries.items()}
    table = {1: 0}
    for c in coprimes(m):
        table[c] = program_cost(bennett_compose(c, m, csd_expansion_program), n)
    return table


def synth_mult_circuit(m: int, c: int, method: str = "auto") -> tuple[Circuit, str, int]:
    """Verified circuit for Cx%M plus the method used and its T-cost.

    Program methods report the operator-level cost; divrem reports the
    expanded gate count.  "auto" uses the shortest-path search wherever
    the modulus fits its memory limit.
    """
    c %= m
    if gcd(c, m) != 1:
        raise ValueError("multiplier must be coprime with the modulus")
    n = m.bit_length()
    if method == "auto":
        method = "dijkstra" if m.bit_length() <= MEMORY_LIMIT_BITS else "csd"
    if method == "dijkstra":
        res = dijkstra_cached(m)
        prog, cost = res.program(c), res.cost(c)
    elif method in ("binary", "csd", "bennett"):
        builder = binary_expansion_program if method == "binary" else csd_expansion_program
        prog = bennett_compose(c, m, builder)
        cost = program_cost(prog, n)
    elif method == "divrem":
        circ = divrem_mult(m, c)
        return circ, "divrem", t_cost(circ)
    else:
        raise ValueError(f"unknown synthesis method {method!r}")
    return program_to_circuit(prog, m), method, cost

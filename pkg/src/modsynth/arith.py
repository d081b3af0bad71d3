"""Additive circuit blocks: adders, comparators, modular reduction.

All blocks are built from the MAJ/UMA ripple structure.  Blocks that
involve a known constant are emitted by a carry-chain state machine that
tracks which carries are still known at construction time, so the emitted
circuits meet the published gate bounds (controlled constant addition in
3n-5 Toffolis and n1+2 CNOTs, comparison against a constant in 2n-2
Toffolis and 3 CNOTs) without a separate optimization pass.
"""
from __future__ import annotations

from .circuit import (
    Builder,
    Circuit,
    Gate,
    cx,
    drop_idle_lines,
    toffoli,
    x,
)

Ctl = tuple[int, bool]


def _ctl(c) -> Ctl | None:
    if c is None:
        return None
    return c if isinstance(c, tuple) else (c, True)


# --- register-register ripple adders ---------------------------------------


def maj_gates(c: int, s: int, k: int) -> list[Gate]:
    return [cx(k, s), cx(k, c), toffoli([c, s], k)]


def uma_gates(c: int, s: int, k: int) -> list[Gate]:
    return [toffoli([c, s], k), cx(k, c), cx(c, s)]


def cmaj_gates(ctl: Ctl, c: int, s: int, k: int) -> list[Gate]:
    return [Gate((ctl, (k, True)), (s,)), cx(k, c), toffoli([c, s], k)]


def cuma_gates(ctl: Ctl, c: int, s: int, k: int) -> list[Gate]:
    return [toffoli([c, s], k), cx(k, c), Gate((ctl, (c, True)), (s,))]


def adder_gates(
    xs: list[int],
    ys: list[int],
    cin: int,
    zout: int | None = None,
    ctl=None,
) -> list[Gate]:
    """Cuccaro ripple add of register xs into ys, carries riding xs.

    With zout the (n+1)-bit sum lands on ys+zout; without it the addition
    is mod 2**n.  With ctl the whole addition is enabled by that control
    via the CMAJ/CUMA blocks.
    """
    n = len(xs)
    assert len(ys) == n and n >= 1
    chain = [cin] + xs[:-1]
    ctl = _ctl(ctl)
    gates: list[Gate] = []
    for i in range(n):
        if ctl is None:
            gates += maj_gates(chain[i], ys[i], xs[i])
        else:
            gates += cmaj_gates(ctl, chain[i], ys[i], xs[i])
    if zout is not None:
        if ctl is None:
            gates.append(cx(xs[-1], zout))
        else:
            gates.append(Gate((ctl, (xs[-1], True)), (zout,)))
    for i in reversed(range(n)):
        if ctl is None:
            gates += uma_gates(chain[i], ys[i], xs[i])
        else:
            gates += cuma_gates(ctl, chain[i], ys[i], xs[i])
    return gates


def compare_reg_gates(a: list[int], b: list[int], cin: int, gamma: int) -> list[Gate]:
    """gamma ^= [a > b] for two registers; both registers are restored."""
    n = len(a)
    assert len(b) == n
    pre = [x(l) for l in b]
    chain = [cin] + b[:-1]
    rising: list[Gate] = []
    for i in range(n):
        rising += maj_gates(chain[i], a[i], b[i])
    falling: list[Gate] = []
    for i in reversed(range(n)):
        falling += list(reversed(maj_gates(chain[i], a[i], b[i])))
    return pre + rising + [cx(b[-1], gamma)] + falling + pre


# --- constant carry chain ---------------------------------------------------


class _ConstChain:
    """Carry chain for x + a with constant a.

    Carries that are still known constants cost nothing; data-dependent
    carries ride allocated host lines with a tracked polarity offset
    (OR-form carries are stored complemented and compensated through the
    polarity of later controls).
    """

    def __init__(self, data: list[int], a: int, alloc):
        self.data = data
        self.bits = [(a >> i) & 1 for i in range(len(data))]
        self.alloc = alloc
        self.states: list[tuple] = [("k", 0)]  # carry c_0 = 0
        self.gates: list[list[Gate]] = []  # gates[i] computes c_{i+1}

    def extend(self, limit: int):
        while len(self.gates) < limit:
            i = len(self.gates)
            st = self.states[-1]
            ai = self.bits[i]
            s = self.data[i]
            if st[0] == "k":
                if st[1] == ai:  # MAJ(v, s, v) = v
                    self.states.append(st)
                    self.gates.append([])
                else:  # MAJ(v, s, not v) = s
                    h = self.alloc()
                    self.gates.append([cx(s, h)])
                    self.states.append(("u", h, 0))
            else:
                _, h, psi = st
                h2 = self.alloc()
                if ai == 0:  # c & s, stored plain
                    g = Gate(((h, psi == 0), (s, True)), (h2,))
                    self.states.append(("u", h2, 0))
                else:  # c | s, stored complemented
                    g = Gate(((h, psi == 1), (s, False)), (h2,))
                    self.states.append(("u", h2, 1))
                self.gates.append([g])

    def carry_control(self, i: int) -> Ctl | None:
        """Control that fires exactly when carry c_i is 1, or None if known."""
        st = self.states[i]
        if st[0] == "k":
            return None
        _, h, psi = st
        return (h, psi == 0)

    def emit_carry_into(self, i: int, target: int, ctl: Ctl | None) -> list[Gate]:
        """target ^= c_i (with an optional extra control)."""
        st = self.states[i]
        if st[0] == "k":
            if st[1] == 0:
                return []
            return [x(target) if ctl is None else Gate((ctl,), (target,))]
        ctrl = self.carry_control(i)
        ctrls = (ctrl,) if ctl is None else (ctl, ctrl)
        return [Gate(ctrls, (target,))]


def const_add_gates(
    data: list[int],
    a: int,
    alloc,
    ctl=None,
    zout: int | None = None,
) -> list[Gate]:
    """data := data + a (mod 2**n, or with the carry onto zout), a constant.

    With ctl the sum writes are conditioned on that control; the carry
    chain itself runs unconditionally and is fully uncomputed, so the
    disabled block is the identity.
    """
    n = len(data)
    a &= (1 << n) - 1
    if a == 0 and zout is None:
        return []
    getattr(alloc, "reset", lambda: None)()
    ctl = _ctl(ctl)
    chain = _ConstChain(data, a, alloc)
    limit = n if zout is not None else n - 1
    chain.extend(limit)
    gates: list[Gate] = []
    for gs in chain.gates:
        gates += gs
    if zout is not None:
        gates += chain.emit_carry_into(n, zout, ctl)
    pend = [0] * n
    for i in reversed(range(n)):
        if i < limit:
            gates += chain.gates[i]  # uncompute c_{i+1}; reads s_i pre-sum
        # sum write: s_i ^= (ctl &) (a_i ^ c_i)
        st = chain.states[i]
        if st[0] == "k":
            bit = chain.bits[i] ^ st[1]
            if bit:
                if ctl is None:
                    pend[i] ^= 1
                else:
                    gates.append(Gate((ctl,), (data[i],)))
        else:
            ctrl = chain.carry_control(i)
            if ctl is None:
                gates.append(Gate((ctrl,), (data[i],)))
                if chain.bits[i]:
                    pend[i] ^= 1
            else:
                gates.append(Gate((ctl, ctrl), (data[i],)))
                if chain.bits[i]:
                    gates.append(Gate((ctl,), (data[i],)))
    for i in range(n):
        if pend[i]:
            gates.append(x(data[i]))
    return gates


def const_compare_gates(data: list[int], k: int, gamma: int, alloc, ctl=None) -> list[Gate]:
    """gamma ^= [data > k] for a constant k; the data register is restored."""
    n = len(data)
    if k >= (1 << n) - 1:
        return []  # nothing exceeds the all-ones value
    getattr(alloc, "reset", lambda: None)()
    kbar = ((1 << n) - 1) & ~k
    chain = _ConstChain(data, kbar, alloc)
    chain.extend(n)
    gates: list[Gate] = []
    for gs in chain.gates:
        gates += gs
    gates += chain.emit_carry_into(n, gamma, _ctl(ctl))
    for gs in reversed(chain.gates):
        gates += gs
    return gates


class Pool:
    """Reusable zero scratch lines; every emitted chunk restores its hosts."""

    def __init__(self, bld: Builder, role: str = "a"):
        self.bld = bld
        self.role = role
        self.lines: list[int] = []
        self.next = 0

    def reset(self):
        self.next = 0

    def __call__(self) -> int:
        if self.next == len(self.lines):
            self.lines.append(self.bld.line(self.role))
        line = self.lines[self.next]
        self.next += 1
        return line


# --- public block constructors ----------------------------------------------


def cuccaro_adder(n: int) -> Circuit:
    """(x, y) -> (x, x+y) with the n+1-bit sum on the y lines plus carry.

    Layout: x on 0..n-1, y on n..2n-1, carry-out on 2n, the carry-in
    ancilla on 2n+1.  Exactly 2n Toffoli and 4n+1 CNOT gates.
    """
    if n < 2:
        raise ValueError("adder needs at least 2 bits")
    bld = Builder()
    xs = bld.register(n, "d")
    ys = bld.register(n, "d")
    z = bld.line("d")
    cin = bld.line("a")
    bld.extend(adder_gates(xs, ys, cin, z))
    return bld.build()


def controlled_adder(n: int) -> Circuit:
    """Adder enabled by a control line; 4n+1 Toffoli and 2n CNOT gates.

    Layout: control on 0, x on 1..n, y on n+1..2n, carry-out 2n+1,
    carry-in ancilla 2n+2.
    """
    if n < 2:
        raise ValueError("adder needs at least 2 bits")
    bld = Builder()
    ctl = bld.line("c")
    xs = bld.register(n, "d")
    ys = bld.register(n, "d")
    z = bld.line("d")
    cin = bld.line("a")
    bld.extend(adder_gates(xs, ys, cin, z, ctl=ctl))
    return bld.build()


def add_constant(n: int, a: int, controlled: bool = False, carry: bool = False) -> Circuit:
    """x -> x + a; mod 2**n unless a carry line is requested."""
    if not 0 <= a < (1 << n):
        raise ValueError("constant out of range")
    bld = Builder()
    ctl = bld.line("c") if controlled else None
    data = bld.register(n, "d")
    z = bld.line("d") if carry else None
    bld.extend(const_add_gates(data, a, Pool(bld), ctl=ctl, zout=z))
    return drop_idle_lines(bld.build())


def comparator(n: int, k: int) -> Circuit:
    """Computes [x > k] onto a result line, restoring x.

    Layout: x on 0..n-1, result on line n, carry hosts after it.
    """
    if not 0 <= k < (1 << n):
        raise ValueError("threshold out of range")
    bld = Builder()
    data = bld.register(n, "d")
    gamma = bld.line("g")
    bld.extend(const_compare_gates(data, k, gamma, Pool(bld)))
    return drop_idle_lines(bld.build(), keep={gamma})


def reduce_gates(
    data: list[int],
    threshold: int,
    subtrahend: int,
    gamma: int,
    alloc,
) -> list[Gate]:
    """gamma ^= [data > threshold]; where set, data -= subtrahend.

    The generic subtractive reduction: a comparator feeding a conditional
    constant subtraction (addition of the two's complement).
    """
    n = len(data)
    gates = const_compare_gates(data, threshold, gamma, alloc)
    comp = ((1 << n) - subtrahend) & ((1 << n) - 1)
    gates += const_add_gates(data, comp, alloc, ctl=(gamma, True))
    return gates


def mod_reduce(m: int, width: int | None = None) -> Circuit:
    """x -> x % M for x <= 2M within the given width (default ceil(log2 M)).

    Subtracts M when x > M, leaving the comparison outcome on a garbage
    line.  x == M is left in place (the canonical alias of 0 in the
    modular blocks downstream).
    """
    if m < 3 or m % 2 == 0:
        raise ValueError("modulus must be odd and at least 3")
    n = width or m.bit_length()
    bld = Builder()
    data = bld.register(n, "d")
    gamma = bld.line("g")
    bld.extend(reduce_gates(data, m, m, gamma, Pool(bld)))
    return drop_idle_lines(bld.build(), keep={gamma})


def controlled_mod_reduce(m: int, width: int | None = None) -> Circuit:
    """Modular reduction enabled by a control line.

    The comparator runs unconditionally onto the garbage line; the
    subtraction is enabled through one extra ancilla and two Toffoli
    gates, the second of which clears that ancilla again.
    """
    if m < 3 or m % 2 == 0:
        raise ValueError("modulus must be odd and at least 3")
    n = width or m.bit_length()
    bld = Builder()
    ctl = bld.line("c")
    data = bld.register(n, "d")
    gamma = bld.line("g")
    eff = bld.line("a")
    pool = Pool(bld)
    bld.extend(const_compare_gates(data, m, gamma, pool))
    bld.emit(toffoli([ctl, gamma], eff))
    comp = ((1 << n) - m) & ((1 << n) - 1)
    bld.extend(const_add_gates(data, comp, pool, ctl=(eff, True)))
    bld.emit(toffoli([ctl, gamma], eff))
    return drop_idle_lines(bld.build(), keep={gamma})


def cond_mod_add_gates(data: list[int], m: int, a: int, sel: int, alloc) -> list[Gate]:
    """Garbage-free (x + a) % M on the given lines for x < M.

    sel must be a zero line and is returned to zero: it selects between
    adding a and subtracting M-a, and is cleared by comparing the result
    against a.
    """
    n = len(data)
    if not 0 < a < m:
        raise ValueError("addend must lie strictly between 0 and M")
    alpha = m - a
    gates: list[Gate] = []
    gates += const_compare_gates(data, alpha - 1, sel, alloc)  # sel = [x >= alpha]
    comp_alpha = ((1 << n) - alpha) & ((1 << n) - 1)
    gates += const_add_gates(data, comp_alpha, alloc, ctl=(sel, True))
    gates += const_add_gates(data, a, alloc, ctl=(sel, False))
    # result >= a exactly when no wrap happened, which clears sel
    gates.append(x(sel))
    gates += const_compare_gates(data, a - 1, sel, alloc)
    return gates


def cond_mod_add_const(m: int, a: int, width: int | None = None) -> Circuit:
    """x -> (x + a) % M for x < M with every helper line cleared."""
    n = width or m.bit_length()
    bld = Builder()
    data = bld.register(n, "d")
    sel = bld.line("a")
    bld.extend(cond_mod_add_gates(data, m, a, sel, Pool(bld)))
    return drop_idle_lines(bld.build())


def rotate_relabel(width: int, lines: list[int]) -> tuple[int, ...]:
    """Output permutation rotating the listed lines up by one position.

    The output at lines[i+1] reads lines[i]; the output at lines[0] reads
    the last listed line.  All other outputs read their own wire.
    """
    perm = list(range(width))
    for i in range(len(lines)):
        perm[lines[(i + 1) % len(lines)]] = lines[i]
    return tuple(perm)

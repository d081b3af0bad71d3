"""Modular exponentiation circuits: base and control-count selection,
look-up-table synthesis for the leading conditional multiplications,
factored negations, and 2-to-2 multiplexed unconditional multipliers.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from math import gcd

from .circuit import (
    Builder,
    Circuit,
    Gate,
    compose,
    cx,
    drop_idle_lines,
    embed,
    fredkin,
    simulate_batch,
    x,
)
from .numeric import multiplicative_order, primes_up_to, semiprimes
from .multblocks import has_zero_fixed_point, neg_mod_gates
from .pathsynth import mult_cost_table, synth_mult_circuit


# --- base and controls selection ---------------------------------------------


def select_base(m: int) -> int:
    """Smallest base from 2, 3, 5, then odd primes up to 61, whose period
    modulo m is useful for factoring."""
    candidates = [2, 3, 5] + [p for p in primes_up_to(61) if p > 5]
    for b in candidates:
        if b >= m or gcd(b, m) != 1:
            continue
        if multiplicative_order(b, m).useful:
            return b
    raise ValueError(f"no admissible base below 61 for M={m}")


def select_controls(period: int) -> int:
    """Number of control qubits: ceil(log2 period)."""
    if period < 2:
        raise ValueError("period must be at least 2")
    return (period - 1).bit_length()


# --- planning -------------------------------------------------------------------


@dataclass
class PlanEntry:
    index: int  # control bit driving this multiplication
    c: int  # multiplier actually used (negation already folded in)
    negated: bool
    placement: str  # "lut" or "mux"


@dataclass
class ModExpPlan:
    m: int
    b: int
    l: int
    entries: list[PlanEntry]
    shares_ancillae: bool = True

    def lut_entries(self) -> list[PlanEntry]:
        return [e for e in self.entries if e.placement == "lut"]

    def mux_entries(self) -> list[PlanEntry]:
        return [e for e in self.entries if e.placement == "mux"]

    def lut_values(self) -> list[int]:
        lut = self.lut_entries()
        vals = []
        for mask in range(1 << len(lut)):
            v = 1
            for i, e in enumerate(lut):
                if (mask >> i) & 1:
                    v = v * e.c % self.m
            vals.append(v)
        return vals

    def to_json(self) -> str:
        lut = self.lut_entries()
        return json.dumps(
            {
                "schema": 1,
                "modulus": self.m,
                "base": self.b,
                "controls": self.l,
                "multipliers": [
                    {"i": e.index, "c": e.c, "negated": e.negated, "placement": e.placement}
                    for e in self.entries
                ],
                "lut": {"inputs": [e.index for e in lut], "values": self.lut_values()},
                "shares_ancillae": self.shares_ancillae,
            },
            indent=2,
        )


def plan(m: int, b: int | None = None, l: int | None = None, mult_cost=None) -> ModExpPlan:
    """Choose multipliers, negation folding, and LUT/multiplexer placement.

    Up to the four costliest multiplications move into the initial LUT
    (ties to the lowest control index); the remaining multipliers fold to
    M-C with a factored negation whenever that is cheaper.
    """
    if b is None:
        b = select_base(m)
    if l is None:
        l = select_controls(multiplicative_order(b, m).period)
    if mult_cost is None:
        costs = mult_cost_table(m)
        mult_cost = lambda c: costs.get(c, 1 << 30)
    mults = [pow(b, 1 << i, m) for i in range(l)]
    order = sorted(range(l), key=lambda i: (-mult_cost(mults[i]), i))
    lut_set = set(order[: min(4, l)])
    entries = []
    for i, c in enumerate(mults):
        if i in lut_set:
            entries.append(PlanEntry(index=i, c=c, negated=False, placement="lut"))
        else:
            folded = (m - c) % m
            if gcd(folded, m) == 1 and mult_cost(folded) < mult_cost(c):
                entries.append(PlanEntry(index=i, c=folded, negated=True, placement="mux"))
            else:
                entries.append(PlanEntry(index=i, c=c, negated=False, placement="mux"))
    return ModExpPlan(m=m, b=b, l=l, entries=entries)


# --- two-input function synthesis (the 16-entry table) ---------------------------


def _table5_gates(minterms: frozenset[int], a: int, b: int, z: int) -> list[Gate]:
    """Reversible circuit for a two-input function onto a zero line z.

    Minterm labels read the (a, b) assignment with a as the high bit.
    """
    T = lambda pa, pb: Gate(((a, pa), (b, pb)), (z,))
    C = lambda line, pol=True: Gate(((line, pol),), (z,))
    table = {
        frozenset(): [],
        frozenset({0}): [T(False, False)],
        frozenset({1}): [T(False, True)],
        frozenset({2}): [T(True, False)],
        frozenset({3}): [T(True, True)],
        frozenset({0, 1}): [C(a, False)],
        frozenset({0, 2}): [C(b, False)],
        frozenset({1, 2}): [C(a), C(b)],
        frozenset({0, 3}): [C(a), C(b), x(z)],
        frozenset({1, 3}): [C(b)],
        frozenset({2, 3}): [C(a)],
        frozenset({0, 1, 2}): [T(True, True), x(z)],
        frozenset({0, 1, 3}): [T(True, False), x(z)],
        frozenset({0, 2, 3}): [T(False, True), x(z)],
        frozenset({1, 2, 3}): [T(False, False), x(z)],
        frozenset({0, 1, 2, 3}): [x(z)],
    }
    return table[minterms]


def synth_2input(minterms) -> Circuit:
    """Table circuit for one two-input function; lines are (a, b, output)."""
    gates = _table5_gates(frozenset(minterms), 0, 1, 2)
    return Circuit(3, ("c", "c", "d"), gates, None)


def _tt2_minterms(tt: int) -> frozenset[int]:
    """Two-variable truth table (bit index = 2*hi + lo) to minterm labels."""
    return frozenset(m for m in range(4) if (tt >> m) & 1)


def _t5_cost(minterms: frozenset[int], extra_controls: int) -> tuple[int, int]:
    """(expanded Toffoli count, gate count) after adding read-only controls."""
    gates = _table5_gates(minterms, 0, 1, 2)
    t = 0
    for g in gates:
        k = len(g.controls) + extra_controls
        if k >= 3:
            t += 2 * (k + 1) - 5
        elif k == 2:
            t += 1
    return (t, len(gates))


def _add_controls(gates: list[Gate], ctls: tuple) -> list[Gate]:
    return [Gate(tuple(ctls) + g.controls, g.targets, g.zero_swap) for g in gates]


class LutSpec:
    """k read-only inputs mapping to predetermined m-bit output values."""

    def __init__(self, k: int, m: int, values: list[int]):
        if k > 4:
            raise ValueError("LUT synthesis supports up to 4 inputs")
        if len(values) != 1 << k:
            raise ValueError("need one value per input combination")
        if any(v >> m for v in values):
            raise ValueError("value wider than the output register")
        self.k = k
        self.m = m
        self.values = values

    def output_tt(self, j: int) -> int:
        tt = 0
        for mask, v in enumerate(self.values):
            tt |= ((v >> j) & 1) << mask
        return tt


def _cofactor(tt: int, k: int, var: int, val: int) -> int:
    """Cofactor as a truth table over the remaining k-1 variables."""
    out = 0
    pos = 0
    for mask in range(1 << k):
        if (mask >> var) & 1 == val:
            out |= ((tt >> mask) & 1) << pos
            pos += 1
    return out


def _synth_output_k3(tt: int, inputs: list[int], z: int) -> list[Gate]:
    """One Davio step: an uncontrolled cofactor plus a controlled XOR of
    the two cofactors, with the pivot and polarity minimizing cost."""
    best = None
    for p in range(3):
        rest = [v for v in range(3) if v != p]
        f0 = _cofactor(tt, 3, p, 0)
        f1 = _cofactor(tt, 3, p, 1)
        for pol, base in ((True, f0), (False, f1)):
            xor = f0 ^ f1
            bmin = _tt2_minterms(base)
            xmin = _tt2_minterms(xor)
            bt, bg = _t5_cost(bmin, 0)
            xt, xg = _t5_cost(xmin, 1)
            key = (bt + xt, bg + xg)
            if best is None or key < best[0]:
                best = (key, p, pol, bmin, xmin, rest)
    _, p, pol, bmin, xmin, rest = best
    a, b = inputs[rest[1]], inputs[rest[0]]
    gates = _table5_gates(bmin, a, b, z)
    gates += _add_controls(_table5_gates(xmin, a, b, z), ((inputs[p], pol),))
    return gates


def _synth_output_k4(tt: int, inputs: list[int], z: int, anc: int) -> list[Gate]:
    """Double-cofactor Davio form over the best pivot pair and polarity.

    Of the four double-cofactors one is uncontrolled, two take a single
    control, and the fourth is enabled through the shared ancilla, which
    a Toffoli sets and clears around it.
    """
    best = None
    for i in range(4):
        for j in range(i + 1, 4):
            rest = [v for v in range(4) if v not in (i, j)]
            cof = {}
            for vi in (0, 1):
                for vj in (0, 1):
                    t = _cofactor(tt, 4, j, vj)
                    cof[(vi, vj)] = _cofactor(t, 3, i if i < j else i - 1, vi)
            gij = cof[(0, 0)] ^ cof[(0, 1)] ^ cof[(1, 0)] ^ cof[(1, 1)]
            for si in (0, 1):
                for sj in (0, 1):
                    base = cof[(1 - si, 1 - sj)]
                    gi = cof[(si, 1 - sj)] ^ base
                    gj = cof[(1 - si, sj)] ^ base
                    parts = [
                        _t5_cost(_tt2_minterms(base), 0),
                        _t5_cost(_tt2_minterms(gi), 1),
                        _t5_cost(_tt2_minterms(gj), 1),
                    ]
                    tcost = sum(p[0] for p in parts)
                    gcount = sum(p[1] for p in parts)
                    if gij:
                        pt, pg = _t5_cost(_tt2_minterms(gij), 1)
                        tcost += pt + 2
                        gcount += pg + 2
                    key = (tcost, gcount)
                    if best is None or key < best[0]:
                        best = (key, i, j, si, sj, base, gi, gj, gij, rest)
    _, i, j, si, sj, base, gi, gj, gij, rest = best
    a, b = inputs[rest[1]], inputs[rest[0]]
    gates = _table5_gates(_tt2_minterms(base), a, b, z)
    gates += _add_controls(_table5_gates(_tt2_minterms(gi), a, b, z), ((inputs[i], bool(si)),))
    gates += _add_controls(_table5_gates(_tt2_minterms(gj), a, b, z), ((inputs[j], bool(sj)),))
    if gij:
        sel = Gate(((inputs[i], bool(si)), (inputs[j], bool(sj))), (anc,))
        gates.append(sel)
        gates += _add_controls(_table5_gates(_tt2_minterms(gij), a, b, z), ((anc, True),))
        gates.append(sel)
    return gates


def synth_lut(spec: LutSpec) -> Circuit:
    """Reversible (k, m)-LUT: read-only inputs, outputs on zero lines.

    Outputs with identical truth tables are computed once and copied.
    """
    bld = Builder()
    inputs = bld.register(spec.k, "c")
    outs = bld.register(spec.m, "d")
    anc = bld.line("a") if spec.k == 4 else None
    seen: dict[int, int] = {}
    for j in range(spec.m):
        tt = spec.output_tt(j)
        if tt == 0:
            continue
        if tt in seen:
            bld.emit(cx(seen[tt], outs[j]))
            continue
        if spec.k == 0:
            gates = [x(outs[j])]
        elif spec.k == 1:
            if tt == 0b11:
                gates = [x(outs[j])]
            elif tt == 0b10:
                gates = [cx(inputs[0], outs[j])]
            else:
                gates = [Gate(((inputs[0], False),), (outs[j],))]
        elif spec.k == 2:
            gates = _table5_gates(_tt2_minterms(tt), inputs[1], inputs[0], outs[j])
        elif spec.k == 3:
            gates = _synth_output_k3(tt, inputs, outs[j])
        else:
            gates = _synth_output_k4(tt, inputs, outs[j], anc)
        seen[tt] = outs[j]
        bld.extend(gates)
    return drop_idle_lines(bld.build())


# --- negation consolidation and multiplexers ---------------------------------------


def consolidate_negations(controls_count: int, m: int) -> Circuit:
    """One conditional -x%M enabled by the XOR of the control bits.

    The XOR is collected onto the last control by a CNOT chain, consumed
    by the controlled negation, and uncollected afterwards.
    """
    if controls_count < 1:
        raise ValueError("need at least one control")
    n = m.bit_length()
    bld = Builder()
    ctls = bld.register(controls_count, "c")
    data = bld.register(n, "d")
    const = bld.register(n, "a")
    cin = bld.line("a")
    chain = [cx(ctls[i], ctls[-1]) for i in range(len(ctls) - 1)]
    bld.extend(chain)
    bld.extend(neg_mod_gates(data, m, const, cin, ctl=ctls[-1]))
    bld.extend(chain)
    return bld.build()


def mux_gates(reg: list[int], swp: list[int], ctrl_b: int, ctrl_a: int | None = None) -> list[Gate]:
    """One 2-to-2 multiplexer layer conditionally exchanging reg and swap.

    A merged boundary between two conditional blocks passes the earlier
    control as ctrl_a: the exchange then happens exactly when the two
    control bits differ, via CNOTs around the Fredkin layer.  Fredkins
    carry the zero-input flag (one of the swapped lines is all-zero at
    every boundary of the construction).
    """
    gates: list[Gate] = []
    if ctrl_a is not None:
        gates.append(cx(ctrl_a, ctrl_b))
    gates += [fredkin(ctrl_b, reg[i], swp[i], zero_swap=True) for i in range(len(reg))]
    if ctrl_a is not None:
        gates.append(cx(ctrl_a, ctrl_b))
    return gates


def multiplexer_pair(n: int, merged: bool = True) -> Circuit:
    """Standalone multiplexer stage over an n-bit register pair.

    Merged (intermediate) stages take two controls on lines 0 and 1;
    first/last stages take a single control on line 0.
    """
    bld = Builder()
    ctrl_a = bld.line("c") if merged else None
    ctrl_b = bld.line("c")
    reg = bld.register(n, "d")
    swp = bld.register(n, "s")
    bld.extend(mux_gates(reg, swp, ctrl_b, ctrl_a))
    return bld.build()


# --- assembly ------------------------------------------------------------------------


def assemble(p: ModExpPlan) -> Circuit:
    """Full b^y % M circuit: LUT, consolidated negation, multiplexed
    unconditional multipliers.

    Control lines come first, then the results register; multiplexed
    plans add a swap register and a scratch bank shared by the multiplier
    blocks (each block holds the zero fixed point, so the bank stays
    clean between stages).
    """
    m, l = p.m, p.l
    n = m.bit_length()
    lut_entries = p.lut_entries()
    mux_entries = p.mux_entries()
    negated = [e.index for e in p.entries if e.negated]

    mux_blocks = [synth_mult_circuit(m, e.c, method="auto")[0] for e in mux_entries]
    p.shares_ancillae = all(has_zero_fixed_point(b) for b in mux_blocks)

    bld = Builder()
    ctls = bld.register(l, "c")
    res = bld.register(n, "d")
    swp = bld.register(n, "s") if mux_entries else []
    bank_need = max((b.width - n for b in mux_blocks), default=0)
    if negated:
        bank_need = max(bank_need, n + 1)
    bank = bld.register(bank_need, "a")
    lut = synth_lut(LutSpec(len(lut_entries), n, p.lut_values()))
    lut_anc = [bld.line("a")] if lut.width > len(lut_entries) + n else []
    width = len(bld.roles)
    roles = tuple(bld.roles)

    mapping = [ctls[e.index] for e in lut_entries] + res + lut_anc
    out = embed(lut, width, mapping[: lut.width], roles)

    if negated:
        gates = [cx(ctls[i], ctls[negated[-1]]) for i in negated[:-1]]
        gates += neg_mod_gates(res, m, bank[:n], bank[n], ctl=ctls[negated[-1]])
        gates += [cx(ctls[i], ctls[negated[-1]]) for i in negated[:-1]]
        out = compose(out, Circuit(width, roles, gates, None))

    prev_ctl = None
    for e, blk in zip(mux_entries, mux_blocks):
        out = compose(out, Circuit(width, roles, mux_gates(res, swp, ctls[e.index], prev_ctl), None))
        out = compose(out, embed(blk, width, swp + bank[: blk.width - n], roles))
        prev_ctl = ctls[e.index]
    if mux_entries:
        out = compose(out, Circuit(width, roles, mux_gates(res, swp, prev_ctl), None))
    return out


def verify_modexp(c: Circuit, m: int, b: int, l: int) -> bool:
    """Exhaustively check outputs b^y % M for y < 2**l, with the control
    register restored and every helper line cleared."""
    ctl_lines = c.lines_with_role("c")[:l]
    data = c.data_lines()
    inputs = [sum(((y >> i) & 1) << ctl_lines[i] for i in range(l)) for y in range(1 << l)]
    outs = simulate_batch(c, inputs)
    rest = [i for i in range(c.width) if i not in data and c.roles[i] != "g"]
    for y, (vin, vout) in enumerate(zip(inputs, outs)):
        got = sum(((vout >> ln) & 1) << i for i, ln in enumerate(data))
        if got != pow(b, y, m):
            return False
        for ln in rest:
            if (vout >> ln) & 1 != (vin >> ln) & 1:
                return False
    return True


# --- batch success rates -----------------------------------------------------------


def success_rate(n: int, bases, factor_bound: int = 5) -> tuple[float, int, int]:
    """Percentage of balanced n-bit semiprimes with a useful period.

    For a single base, moduli sharing a factor with it leave the
    denominator; for a base set, the rate runs over all moduli and a
    modulus succeeds when any admissible base in the set has a useful
    period.  Returns (percentage, successes, denominator).
    """
    ms = semiprimes(n, factor_bound=factor_bound, balance=True)
    if isinstance(bases, int):
        elig = [m for m in ms if gcd(bases, m) == 1]
        good = sum(1 for m in elig if multiplicative_order(bases, m).useful)
        denom = len(elig)
    else:
        good = sum(
            1
            for m in ms
            if any(gcd(b, m) == 1 and multiplicative_order(b, m).useful for b in bases)
        )
        denom = len(ms)
    pct = 100.0 * good / denom if denom else 0.0
    return pct, good, denom

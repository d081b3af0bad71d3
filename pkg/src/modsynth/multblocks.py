"""Multiplicative constructions: (2^k+1)x, -x%M, 2^k x%M, division with
remainder, and the Cx%M pipeline built on the quotient decomposition
Cx%M = Cx - mM with m = floor(Cx/M).

Every constructor returns a circuit whose helper lines are cleared,
except where a garbage line is explicitly documented (the comparison bit
of the bare reduction in the special power-of-two case).
"""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .circuit import (
    Builder,
    Circuit,
    Gate,
    compose,
    cx,
    drop_idle_lines,
    simulate,
    toffoli,
    x,
)
from .arith import (
    Pool,
    adder_gates,
    const_add_gates,
    const_compare_gates,
    reduce_gates,
    rotate_relabel,
)
from .numeric import modinv


def has_zero_fixed_point(c: Circuit) -> bool:
    """True when the all-zero input is a fixed point; such blocks may share
    their ancillae with the multiplexer swap register."""
    return simulate(c, 0) == 0


# --- (2^k + 1) x, not modular ------------------------------------------------


def mul_2k_plus_1_gates(data: list[int], k: int, alloc) -> list[Gate]:
    """In-place (2^k+1)*x over the data lines (n low bits of x plus k+1
    zero high lines); incoming carries are precomputed on ancillae and
    uncomputed right after their last use, in descending output order, so
    their inputs are still intact when they are cleared."""
    n = len(data) - k - 1
    assert 1 <= k < n

    def maj_onto(t: int, a: int, b: int, c: int | None) -> list[Gate]:
        gates = [toffoli([a, b], t)]
        if c is not None:
            gates += [toffoli([a, c], t), toffoli([b, c], t)]
        return gates

    getattr(alloc, "reset", lambda: None)()
    carry: dict[int, int] = {}
    compute: dict[int, list[Gate]] = {}
    for i in range(k + 1, n + k):
        h = alloc()
        carry[i] = h
        prev = carry.get(i - 1)
        if i <= n:
            compute[i] = maj_onto(h, data[i - 1], data[i - k - 1], prev)
        else:
            compute[i] = [toffoli([data[i - k - 1], prev], h)]
    gates: list[Gate] = []
    for i in range(k + 1, n + k):
        gates += compute[i]
    gates.append(toffoli([data[n - 1], carry[n + k - 1]], data[n + k]))
    for i in reversed(range(k, n + k)):
        gates.append(cx(data[i - k], data[i]))
        if i in carry:
            gates.append(cx(carry[i], data[i]))
            gates += compute[i]
    return gates


def mul_2k_plus_1(n: int, k: int) -> Circuit:
    """(2^k+1)*x on an n-bit input, output on n+k+1 lines, carries cleared."""
    if not 1 <= k < n:
        raise ValueError("need 1 <= k < n")
    bld = Builder()
    data = bld.register(n + k + 1, "d")
    bld.extend(mul_2k_plus_1_gates(data, k, Pool(bld)))
    return drop_idle_lines(bld.build())


# --- negation ------------------------------------------------------------------


def neg_mod_gates(data: list[int], m: int, const: list[int], cin: int, ctl=None) -> list[Gate]:
    """-x % M as (x + M')' with one full Cuccaro adder; maps 0 <-> M.

    The carry CNOT targets the carry-in ancilla: for x <= M it never
    fires, so no extra carry line is spent.
    """
    n = len(data)
    mprime = (1 << n) - 1 - m
    load = []
    for i in range(n):
        if (mprime >> i) & 1:
            load.append(x(const[i]) if ctl is None else cx(ctl, const[i]))
    flip = [x(l) if ctl is None else cx(ctl, l) for l in data]
    return load + adder_gates(const, data, cin, zout=cin) + load + flip


def neg_mod(m: int, controlled: bool = False) -> Circuit:
    """Circuit for -x % M; x=0 maps to M and x=M to 0 (documented alias).

    The controlled variant turns every inverter into a CNOT from the
    control line, so the disabled circuit is the identity.
    """
    if m % 2 == 0:
        raise ValueError("modulus must be odd")
    n = m.bit_length()
    bld = Builder()
    ctl = bld.line("c") if controlled else None
    data = bld.register(n, "d")
    const = bld.register(n, "a")
    cin = bld.line("a")
    bld.extend(neg_mod_gates(data, m, const, cin, ctl=ctl))
    return bld.build()


def codeword_swap_gates(data: list[int], m: int, t: int, ctl=None) -> list[Gate]:
    """Exchange the bit patterns 0 and M on the data register.

    t must be a zero line; it is set on either pattern, used to flip the
    set bits of M, and cleared again (the predicate "value in {0, M}" is
    invariant under the exchange).
    """
    zero_ctrls = tuple((l, False) for l in data)
    m_ctrls = tuple((l, bool((m >> i) & 1)) for i, l in enumerate(data))
    if ctl is not None:
        cc = ctl if isinstance(ctl, tuple) else (ctl, True)
        detect = [Gate((cc,) + zero_ctrls, (t,)), Gate((cc,) + m_ctrls, (t,))]
    else:
        detect = [Gate(zero_ctrls, (t,)), Gate(m_ctrls, (t,))]
    flips = [cx(t, data[i]) for i in range(len(data)) if (m >> i) & 1]
    return detect + flips + detect


def strict_neg_gates(data: list[int], m: int, const: list[int], cin: int, t: int, ctl=None) -> list[Gate]:
    """Negation without the 0 <-> M alias: 0 -> 0 and x -> M-x for x < M."""
    return neg_mod_gates(data, m, const, cin, ctl=ctl) + codeword_swap_gates(data, m, t, ctl=ctl)


# --- doubling and powers of two --------------------------------------------------


def double_mod(m: int) -> Circuit:
    """2x % M for x <= M with ancillae cleared.

    Reduces x modulo ceil(M/2), then realizes the doubling as a rotation
    of the data lines together with the comparison bit, applied as a free
    output relabeling; the zero vacated by the reduction rotates onto the
    comparison line, clearing it.
    """
    if m < 3 or m % 2 == 0:
        raise ValueError("modulus must be odd and at least 3")
    n = m.bit_length()
    half = (m + 1) // 2
    bld = Builder()
    data = bld.register(n, "d")
    gamma = bld.line("a")
    bld.extend(reduce_gates(data, half - 1, half, gamma, Pool(bld)))
    bld.relabel = rotate_relabel(len(bld.roles), data + [gamma])
    return drop_idle_lines(bld.build(), keep={gamma})


def pow2_mod(m: int, k: int) -> Circuit:
    """2^k x % M via k chained doublings; the rotations merge into one
    output relabeling at the end."""
    if k < 1:
        raise ValueError("k must be positive")
    block = double_mod(m)
    out = block
    for _ in range(k - 1):
        out = compose(out, block)
    return out


# --- small-modulus counters --------------------------------------------------------


def permutation_gates(reg: list[int], perm: list[int], ctl=None) -> list[Gate]:
    """Multiply-controlled realization of a basis-state permutation.

    Cycles decompose into transpositions; each transposition is one
    multi-controlled X conjugated by CNOTs that align the two patterns.
    """
    ctl = None if ctl is None else (ctl if isinstance(ctl, tuple) else (ctl, True))
    gates: list[Gate] = []
    seen = set()
    for start in range(len(perm)):
        if start in seen or perm[start] == start:
            seen.add(start)
            continue
        cycle = [start]
        v = perm[start]
        while v != start:
            cycle.append(v)
            v = perm[v]
        seen.update(cycle)
        for w in cycle[1:]:
            gates += _transposition_gates(reg, cycle[0], w, ctl)
    return gates


def _transposition_gates(reg: list[int], u: int, w: int, ctl) -> list[Gate]:
    diff = [b for b in range(len(reg)) if ((u ^ w) >> b) & 1]
    p = diff[0]
    conj = [cx(reg[p], reg[q]) for q in diff[1:]]
    u_img = u
    for q in diff[1:]:
        u_img ^= ((u >> p) & 1) << q
    ctrls = tuple((reg[b], bool((u_img >> b) & 1)) for b in range(len(reg)) if b != p)
    if ctl is not None:
        ctrls = (ctl,) + ctrls
    return conj + [Gate(ctrls, (reg[p],))] + conj


def counter_mod_gates(sources: list[tuple[int, int]], reg: list[int], c: int) -> list[Gate]:
    """reg += sum(weight * bit(line)) mod c over the weighted source lines.

    reg must start at zero and stays within [0, c); states >= c are fixed
    points of every step, keeping the construction a global permutation.
    """
    size = 1 << len(reg)
    gates: list[Gate] = []
    for line, w in sources:
        w %= c
        if w == 0:
            continue
        perm = [(s + w) % c if s < c else s for s in range(size)]
        gates += permutation_gates(reg, perm, ctl=line)
    return gates


def reduce_mod_2k_pm1(n: int, k: int, sign: str) -> Circuit:
    """x % (2^k -+ 1) onto a fresh result register, x read-only.

    sign "-" computes modulo 2^k - 1, sign "+" modulo 2^k + 1.  Uses the
    counter form of digit folding: each input bit drives a +2^i (mod C)
    counter step, so no in-place adders or garbage bits are needed.  When
    k > n no gates are emitted.
    """
    if sign not in ("-", "+"):
        raise ValueError("sign must be '-' or '+'")
    if k < 2:
        raise ValueError("k must be at least 2")
    c = (1 << k) - 1 if sign == "-" else (1 << k) + 1
    bld = Builder()
    data = bld.register(n, "d")
    reg = bld.register((c - 1).bit_length(), "d")
    if k <= n:
        bld.extend(counter_mod_gates([(data[i], pow(2, i, c)) for i in range(n)], reg, c))
    return bld.build()


# --- division with remainder ----------------------------------------------------------


@dataclass(frozen=True)
class DivRemParams:
    """rho = ceil(M/C) and delta = C - M%C from the decomposition
    Cx%M = (delta*floor(x/rho) + C*(x%rho)) % M."""

    c: int
    m: int
    rho: int
    delta: int


def divrem_params(c: int, m: int) -> DivRemParams:
    if not 1 < c < m:
        raise ValueError("need 1 < C < M")
    if gcd(c, m) != 1:
        raise ValueError("C and M must be coprime")
    rho = -(-m // c)
    return DivRemParams(c=c, m=m, rho=rho, delta=c - m % c)


def divrem(m: int, c: int) -> Circuit:
    """x -> (floor(x/rho), x % rho) with the quotient in binary on
    ceil(log2 C) extra lines (kept outputs, not cleared)."""
    rho = divrem_params(c, m).rho
    nq = (c - 1).bit_length()
    n = m.bit_length()
    bld = Builder()
    data = bld.register(n, "d")
    qbits = bld.register(nq, "g")
    pool = Pool(bld)
    for i in reversed(range(nq)):
        step = rho << i
        if step > m - 1:
            continue
        bld.extend(reduce_gates(data, step - 1, step, qbits[i], pool))
    return drop_idle_lines(bld.build(), keep=set(qbits))


def divrem_mult(m: int, c: int) -> Circuit:
    """Cx % M with all ancillae cleared, for C = 2^k + 1 with C < M.

    Pipeline: read-only comparators produce the quotient m = floor(Cx/M)
    in thermometer code, converted in place to binary; the register is
    multiplied by C in place, mM is subtracted under the quotient bits,
    and the quotient is cleared by recomputing it modulo C from the
    result (z % C = m*delta % C, so m = delta^-1 z % C).
    """
    k = (c - 1).bit_length() - 1
    if k < 1 or c != (1 << k) + 1:
        raise ValueError(f"unsupported multiplier family: {c}")
    if not 1 < c < m or gcd(c, m) != 1:
        raise ValueError("C must be coprime with M and below it")
    n = m.bit_length()
    nq = (c - 1).bit_length()
    bld = Builder()
    data = bld.register(n, "d")
    hi = bld.register(k + 1, "a")
    therm = bld.register(c - 1, "a")  # therm[t-1] = [x >= ceil(tM/C)]
    wreg = bld.register(nq, "a")
    pool = Pool(bld)

    for t in range(1, c):
        thr = -(-t * m // c)
        bld.extend(const_compare_gates(data, thr - 1, therm[t - 1], pool))

    # thermometer -> binary in place on the power-of-two lines
    mbits = [therm[(1 << j) - 1] for j in range(nq)]
    for j in range(nq):
        for t in range(1 << j, c, 1 << j):
            if t != 1 << j:
                bld.emit(cx(therm[t - 1], mbits[j]))
    for t in range(2, c):
        if t & (t - 1) == 0:
            continue  # power-of-two lines now hold the binary quotient
        for s in range(t, c):
            ctrls = tuple((mbits[j], bool((s >> j) & 1)) for j in range(nq))
            bld.emit(Gate(ctrls, (therm[t - 1],)))

    wide = data + hi
    bld.extend(mul_2k_plus_1_gates(wide, k, pool))
    for j in reversed(range(nq)):
        sub = ((1 << len(wide)) - (m << j)) & ((1 << len(wide)) - 1)
        bld.extend(const_add_gates(wide, sub, pool, ctl=(mbits[j], True)))

    winv = modinv(c - m % c, c)
    counter = counter_mod_gates(
        [(data[i], winv * pow(2, i, c) % c) for i in range(n)], wreg, c
    )
    bld.extend(counter)
    for j in range(nq):
        bld.emit(cx(wreg[j], mbits[j]))
    bld.extend(list(reversed(counter)))
    return drop_idle_lines(bld.build())


# --- special case 2^k x % M for M = 2^n - 1 - d ------------------------------------


def special_pow2_mod(m: int, k: int, d: int) -> Circuit:
    """2^k x % M for M = 2^n - 1 - d with small even d and small k.

    Realizes rot_k(x) + d*x_hi for x < M: the rotation is a free output
    relabeling, after which the top k input bits occupy the low value
    positions and control constant additions of d*2^i aligned strictly
    above them (d is even, so the controlling bits are never touched).
    One subtractive reduction leaves its comparison bit as a documented
    garbage output.
    """
    n = m.bit_length()
    if d == 0:
        if m != (1 << n) - 1:
            raise ValueError("d=0 requires M = 2^n - 1")
        if not 1 <= k < n:
            raise ValueError("need 1 <= k < n")
        bld = Builder()
        data = bld.register(n, "d")
        perm = list(range(n))
        for i in range(n):
            perm[(i + k) % n] = data[i]
        bld.relabel = tuple(perm)
        return bld.build()
    if m + 1 + d != (1 << n):
        raise ValueError("modulus must have the form 2^n - 1 - d")
    if d % 2 != 0:
        raise ValueError("d must be even for an odd modulus")
    if not 1 <= k < n or d * ((1 << k) + 2) + 2 > (1 << n):
        raise ValueError("parameter regime violated: need small d and k")
    bld = Builder()
    data = bld.register(n, "d")
    hi = bld.line("a")
    gamma = bld.line("g")
    pool = Pool(bld)
    # value bit j of rot_k(x) lives on wire data[(j - k) % n]
    post = [data[(j - k) % n] for j in range(n)]
    for i in reversed(range(k)):
        bld.extend(const_add_gates(post[i + 1 :] + [hi], d >> 1, pool, ctl=(post[i], True)))
    bld.extend(reduce_gates(post + [hi], m, m, gamma, pool))
    perm = list(range(len(bld.roles)))
    for j in range(n):
        perm[data[j]] = post[j]
    bld.relabel = tuple(perm)
    return drop_idle_lines(bld.build(), keep={gamma})

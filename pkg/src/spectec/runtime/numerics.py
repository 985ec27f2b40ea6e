"""Numeric primitives over bit patterns.

Every number is a non-negative Python int holding the raw bits of its type.
Integer operations wrap; float operations round to nearest-even and return
the canonical quiet NaN whenever the result is a NaN (sign bit clear).
Partial operations return ``None``.
"""

from __future__ import annotations

import math
import struct
from fractions import Fraction
from typing import Optional

WIDTH = {"I32": 32, "I64": 64, "F32": 32, "F64": 64}
MASK = {k: (1 << w) - 1 for k, w in WIDTH.items()}
CANONICAL_NAN = {"F32": 0x7FC00000, "F64": 0x7FF8000000000000}


def is_float(nt: str) -> bool:
    return nt[0] == "F"


def signed(nt: str, bits: int) -> int:
    w = WIDTH[nt]
    return bits - (1 << w) if bits >> (w - 1) else bits


def wrap(nt: str, v: int) -> int:
    return v & MASK[nt]


# -- float conversion -----------------------------------------------------

def to_float(nt: str, bits: int) -> float:
    if nt == "F32":
        return struct.unpack("<f", struct.pack("<I", bits))[0]
    return struct.unpack("<d", struct.pack("<Q", bits))[0]


def from_float(nt: str, x: float) -> int:
    """Round a double to ``nt`` (nearest-even) and return its bits."""
    if math.isnan(x):
        return CANONICAL_NAN[nt]
    if nt == "F32":
        try:
            return struct.unpack("<I", struct.pack("<f", x))[0]
        except OverflowError:
            return 0xFF800000 if x < 0 else 0x7F800000
    return struct.unpack("<Q", struct.pack("<d", x))[0]


def is_nan(nt: str, bits: int) -> bool:
    if nt == "F32":
        return (bits & 0x7F800000) == 0x7F800000 and (bits & 0x007FFFFF) != 0
    return (bits & 0x7FF0000000000000) == 0x7FF0000000000000 and (bits & 0x000FFFFFFFFFFFFF) != 0


def _sign_bit(nt: str) -> int:
    return 1 << (WIDTH[nt] - 1)


def round_fraction(nt: str, q: Fraction, negative: bool = False) -> int:
    """Bits of the float nearest to ``q`` (ties to even); ``q`` must be >= 0."""
    mant, exp_bits = (23, 8) if nt == "F32" else (52, 11)
    bias = (1 << (exp_bits - 1)) - 1
    sign = _sign_bit(nt) if negative else 0
    if q == 0:
        return sign
    e = q.numerator.bit_length() - q.denominator.bit_length()
    if Fraction(2) ** e > q:
        e -= 1
    e = max(e, 1 - bias)
    # scale so that the significand has ``mant`` fractional bits
    scaled = q / Fraction(2) ** (e - mant)
    n, rem = divmod(scaled.numerator, scaled.denominator)
    twice = 2 * rem
    if twice > scaled.denominator or (twice == scaled.denominator and n & 1):
        n += 1
    if n >= 1 << (mant + 1):
        n >>= 1
        e += 1
    if e > bias:
        return sign | (((1 << exp_bits) - 1) << mant)
    if n < 1 << mant:  # subnormal
        return sign | n
    return sign | ((e + bias) << mant) | (n - (1 << mant))


# -- integer operations ---------------------------------------------------

def _ints(nt, a, b):
    return signed(nt, a), signed(nt, b)


def add(nt, a, b):
    if is_float(nt):
        return from_float(nt, to_float(nt, a) + to_float(nt, b))
    return wrap(nt, a + b)


def sub(nt, a, b):
    if is_float(nt):
        return from_float(nt, to_float(nt, a) - to_float(nt, b))
    return wrap(nt, a - b)


def mul(nt, a, b):
    if is_float(nt):
        return from_float(nt, to_float(nt, a) * to_float(nt, b))
    return wrap(nt, a * b)


def div_u(nt, a, b) -> Optional[int]:
    if b == 0:
        return None
    return a // b


def div_s(nt, a, b) -> Optional[int]:
    x, y = _ints(nt, a, b)
    if y == 0:
        return None
    q = abs(x) // abs(y)
    if (x < 0) != (y < 0):
        q = -q
    if q >= 1 << (WIDTH[nt] - 1):
        return None
    return wrap(nt, q)


def rem_u(nt, a, b) -> Optional[int]:
    if b == 0:
        return None
    return a % b


def rem_s(nt, a, b) -> Optional[int]:
    x, y = _ints(nt, a, b)
    if y == 0:
        return None
    r = abs(x) % abs(y)
    return wrap(nt, -r if x < 0 else r)


def and_(nt, a, b):
    return a & b


def or_(nt, a, b):
    return a | b


def xor(nt, a, b):
    return a ^ b


def shl(nt, a, b):
    return wrap(nt, a << (b % WIDTH[nt]))


def shr_u(nt, a, b):
    return a >> (b % WIDTH[nt])


def shr_s(nt, a, b):
    return wrap(nt, signed(nt, a) >> (b % WIDTH[nt]))


def rotl(nt, a, b):
    w = WIDTH[nt]
    k = b % w
    return wrap(nt, (a << k) | (a >> (w - k)))


def rotr(nt, a, b):
    w = WIDTH[nt]
    k = b % w
    return wrap(nt, (a >> k) | (a << (w - k)))


def clz(nt, a):
    return WIDTH[nt] - a.bit_length()


def ctz(nt, a):
    if a == 0:
        return WIDTH[nt]
    return (a & -a).bit_length() - 1


def popcnt(nt, a):
    return bin(a).count("1")


def eqz(nt, a):
    return int(a == 0)


# -- float-only operations ----------------------------------------------------

def fdiv(nt, a, b):
    x, y = to_float(nt, a), to_float(nt, b)
    if y == 0.0:
        if x == 0.0 or math.isnan(x):
            return CANONICAL_NAN[nt]
        negative = (math.copysign(1.0, x) < 0) != (math.copysign(1.0, y) < 0)
        return from_float(nt, -math.inf if negative else math.inf)
    return from_float(nt, x / y)


def fmin(nt, a, b):
    if is_nan(nt, a) or is_nan(nt, b):
        return CANONICAL_NAN[nt]
    x, y = to_float(nt, a), to_float(nt, b)
    if x == y:
        return a | b  # picks -0 over +0
    return a if x < y else b


def fmax(nt, a, b):
    if is_nan(nt, a) or is_nan(nt, b):
        return CANONICAL_NAN[nt]
    x, y = to_float(nt, a), to_float(nt, b)
    if x == y:
        return a & b  # picks +0 over -0
    return a if x > y else b


def fneg(nt, a):
    return a ^ _sign_bit(nt)


def fabs(nt, a):
    return a & ~_sign_bit(nt) & MASK[nt]


def fsqrt(nt, a):
    x = to_float(nt, a)
    if math.isnan(x) or x < 0:
        return CANONICAL_NAN[nt]
    if x == 0.0:
        return a
    return from_float(nt, math.sqrt(x))


# -- comparisons ---------------------------------------------------------

def eq(nt, a, b):
    if is_float(nt):
        return int(to_float(nt, a) == to_float(nt, b))
    return int(a == b)


def ne(nt, a, b):
    if is_float(nt):
        return int(to_float(nt, a) != to_float(nt, b))
    return int(a != b)


def lt_u(nt, a, b):
    return int(a < b)


def gt_u(nt, a, b):
    return int(a > b)


def le_u(nt, a, b):
    return int(a <= b)


def ge_u(nt, a, b):
    return int(a >= b)


def lt_s(nt, a, b):
    return int(signed(nt, a) < signed(nt, b))


def gt_s(nt, a, b):
    return int(signed(nt, a) > signed(nt, b))


def le_s(nt, a, b):
    return int(signed(nt, a) <= signed(nt, b))


def ge_s(nt, a, b):
    return int(signed(nt, a) >= signed(nt, b))


def flt(nt, a, b):
    return int(to_float(nt, a) < to_float(nt, b))


def fgt(nt, a, b):
    return int(to_float(nt, a) > to_float(nt, b))


def fle(nt, a, b):
    return int(to_float(nt, a) <= to_float(nt, b))


def fge(nt, a, b):
    return int(to_float(nt, a) >= to_float(nt, b))


# Primitive table keyed by DSL function name; partial ones return None.
PRIMITIVES = {
    "add": add, "sub": sub, "mul": mul,
    "div_s": div_s, "div_u": div_u, "rem_s": rem_s, "rem_u": rem_u,
    "and": and_, "or": or_, "xor": xor,
    "shl": shl, "shr_s": shr_s, "shr_u": shr_u, "rotl": rotl, "rotr": rotr,
    "fdiv": fdiv, "fmin": fmin, "fmax": fmax,
    "clz": clz, "ctz": ctz, "popcnt": popcnt,
    "fneg": fneg, "fabs": fabs, "fsqrt": fsqrt,
    "eqz": eqz,
    "eq": eq, "ne": ne,
    "lt_s": lt_s, "lt_u": lt_u, "gt_s": gt_s, "gt_u": gt_u,
    "le_s": le_s, "le_u": le_u, "ge_s": ge_s, "ge_u": ge_u,
    "flt": flt, "fgt": fgt, "fle": fle, "fge": fge,
}
PARTIAL = frozenset({"div_s", "div_u", "rem_s", "rem_u"})

_BINOP = {
    "ADD": "add", "SUB": "sub", "MUL": "mul", "DIV_S": "div_s", "DIV_U": "div_u",
    "REM_S": "rem_s", "REM_U": "rem_u", "AND": "and", "OR": "or", "XOR": "xor",
    "SHL": "shl", "SHR_S": "shr_s", "SHR_U": "shr_u", "ROTL": "rotl", "ROTR": "rotr",
    "DIV": "fdiv", "MIN": "fmin", "MAX": "fmax",
}


def numeric_binop(op: str, numtype: str, lhs: int, rhs: int) -> Optional[int]:
    """Direct entry point: ``op`` is a binop constructor such as ``"ADD"``."""
    f = PRIMITIVES[_BINOP[op]]
    return f(numtype, lhs, rhs)

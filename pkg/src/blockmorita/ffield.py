"""Exact dense linear algebra over GF(2^e), 1 <= e <= 16.

Field elements are integers below 2^e encoding polynomials over GF(2) by
their bit patterns.  Matrices store one byte per entry for e <= 8 and two
bytes for e <= 16; over GF(2) the mutating kernels (multiply, elimination)
run on rows packed into little-endian 64-bit words.

The FFMX on-disk format lives here as well (see `write_ffmx`/`read_ffmx`).
"""

from __future__ import annotations

import struct
from functools import lru_cache

import numpy as np

from . import _kernels as K

# Primitive moduli, one per extension degree, fixed for reproducibility.
MODULI = {
    1: 0b11,
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10000011,
    8: 0b100011101,
    9: 0b1000010001,
    10: 0b10000001001,
    11: 0b100000000101,
    12: 0b1000001010011,
    13: 0b10000000011011,
    14: 0b100010001000011,
    15: 0b1000000000000011,
    16: 0b10001000000001011,
}


def _pmul(a: int, b: int) -> int:
    """Carry-less polynomial product over GF(2)."""
    r = 0
    while b:
        if b & 1:
            r ^= a
        a <<= 1
        b >>= 1
    return r


def _pmod(a: int, m: int) -> int:
    dm = m.bit_length()
    while a.bit_length() >= dm:
        a ^= m << (a.bit_length() - dm)
    return a


def poly_irreducible(m: int) -> bool:
    """Trial division by every lower-degree polynomial."""
    d = m.bit_length() - 1
    if d < 1:
        return False
    for f in range(2, 1 << ((d // 2) + 1)):
        if f.bit_length() - 1 < 1:
            continue
        if _pmod(m, f) == 0 and f != m:
            return False
    return True


class FieldSpec:
    """GF(2^e) with a fixed modulus polynomial and lookup tables."""

    def __init__(self, e: int, modulus: int | None = None):
        if not 1 <= e <= 16:
            raise ValueError(f"extension degree {e} outside 1..16")
        self.e = e
        self.q = 1 << e
        self.modulus = MODULI[e] if modulus is None else modulus
        if self.modulus.bit_length() - 1 != e:
            raise ValueError("modulus degree does not match e")
        if not poly_irreducible(self.modulus):
            raise ValueError(f"modulus {self.modulus:#x} is reducible")
        self.dtype = np.uint8 if e <= 8 else np.uint16
        self._build_tables()
        self._spot_check()

    def _build_tables(self):
        q = self.q
        # discrete log tables relative to x (=2), which generates for our moduli
        exp = np.zeros(2 * q, dtype=np.int64)
        log = np.zeros(q, dtype=np.int64)
        acc = 1
        for i in range(q - 1):
            exp[i] = acc
            log[acc] = i
            acc = _pmod(_pmul(acc, 2), self.modulus)
        if acc != 1:
            raise ValueError("modulus is not primitive; x does not generate")
        exp[q - 1 : 2 * (q - 1)] = exp[: q - 1]
        self.EXP = exp
        self.LOG = log
        inv = np.zeros(q, dtype=self.dtype)
        for a in range(1, q):
            inv[a] = exp[(q - 1 - log[a]) % (q - 1)]
        self.INV = inv
        if self.e <= 8:
            a = np.arange(q, dtype=np.int64)
            mul = np.zeros((q, q), dtype=np.uint8)
            nz = a[1:]
            mul[1:, 1:] = exp[(log[nz][:, None] + log[nz][None, :])].astype(np.uint8)
            self.MUL = mul
        else:
            self.MUL = None

    def _spot_check(self):
        # x^(2^e) = x for a handful of elements
        for a in (1, 2, 3, self.q - 1, self.q // 2 + 1):
            v = a % self.q
            r = v
            for _ in range(self.e):
                r = self.mul(r, r)
            if r != v:
                raise AssertionError("field arithmetic failed Frobenius check")

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.EXP[self.LOG[a] + self.LOG[b]])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return int(self.INV[a])

    def pow(self, a: int, n: int) -> int:
        if n == 0:
            return 1
        if a == 0:
            return 0
        return int(self.EXP[(self.LOG[a] * n) % (self.q - 1)])

    def embed_table(self, big: "FieldSpec") -> np.ndarray:
        """Entrywise embedding GF(2^e) -> GF(2^E) for e | E."""
        if big.e % self.e != 0:
            raise ValueError("no subfield embedding: degree does not divide")
        if big == self:
            return np.arange(self.q, dtype=big.dtype)
        if self.e == 1:
            return np.arange(2, dtype=big.dtype)
        # image of our generator x: a root of our modulus in the big field
        root = None
        for c in range(2, big.q):
            acc = 0
            v = self.modulus
            p = 1
            while v:
                if v & 1:
                    acc ^= p
                p = big.mul(p, c)
                v >>= 1
            if acc == 0:
                root = c
                break
        if root is None:
            raise AssertionError("modulus has no root in the extension field")
        table = np.zeros(self.q, dtype=big.dtype)
        for a in range(self.q):
            acc = 0
            p = 1
            v = a
            while v:
                if v & 1:
                    acc ^= p
                p = big.mul(p, root)
                v >>= 1
            table[a] = acc
        # additive by construction; check multiplicativity on a sample
        for a in (2, 3, self.q - 1):
            for b in (2, self.q - 1):
                assert table[self.mul(a, b)] == big.mul(int(table[a]), int(table[b]))
        return table

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and self.e == other.e and self.modulus == other.modulus

    def __hash__(self):
        return hash((self.e, self.modulus))

    def __repr__(self):
        return f"GF(2^{self.e})"


@lru_cache(maxsize=None)
def GF(e: int) -> FieldSpec:
    return FieldSpec(e)


class FieldMatrix:
    """Dense matrix over a FieldSpec.  Values are immutable by convention."""

    __slots__ = ("field", "rows", "cols", "data")

    def __init__(self, field: FieldSpec, data: np.ndarray):
        data = np.ascontiguousarray(data, dtype=field.dtype)
        if data.ndim != 2:
            raise ValueError("matrix data must be 2-dimensional")
        if data.size and int(data.max()) >= field.q:
            raise ValueError("entry exceeds field size")
        self.field = field
        self.rows, self.cols = data.shape
        self.data = data

    # -- constructors --------------------------------------------------

    @staticmethod
    def zeros(field, rows, cols):
        return FieldMatrix(field, np.zeros((rows, cols), dtype=field.dtype))

    @staticmethod
    def identity(field, n):
        return FieldMatrix(field, np.eye(n, dtype=field.dtype))

    @staticmethod
    def from_rows(field, rows):
        return FieldMatrix(field, np.array(rows, dtype=field.dtype).reshape(len(rows), -1))

    @staticmethod
    def random(field, rows, cols, rng):
        data = np.empty((rows, cols), dtype=field.dtype)
        for i in range(rows):
            for j in range(cols):
                data[i, j] = rng.randint(field.q)
        return FieldMatrix(field, data)

    # -- basics ---------------------------------------------------------

    def copy(self):
        return FieldMatrix(self.field, self.data.copy())

    def __eq__(self, other):
        return (
            isinstance(other, FieldMatrix)
            and self.field == other.field
            and self.data.shape == other.data.shape
            and bool(np.array_equal(self.data, other.data))
        )

    def __add__(self, other):
        self._check_field(other)
        return FieldMatrix(self.field, self.data ^ other.data)

    def transpose(self):
        return FieldMatrix(self.field, self.data.T.copy())

    def is_zero(self):
        return not self.data.any()

    def _check_field(self, other):
        if self.field != other.field:
            raise ValueError("field mismatch")

    def __repr__(self):
        return f"FieldMatrix({self.field}, {self.rows}x{self.cols})"

    # -- arithmetic -----------------------------------------------------

    def multiply(self, other: "FieldMatrix") -> "FieldMatrix":
        self._check_field(other)
        if self.cols != other.rows:
            raise ValueError(f"dimension mismatch {self.rows}x{self.cols} * {other.rows}x{other.cols}")
        f = self.field
        if f.e == 1:
            a = K.pack_bits(self.data)
            b = K.pack_bits(other.data)
            out = K.mm_p64(a, self.cols, b)
            return FieldMatrix(f, K.unpack_bits(out, other.cols))
        if f.e <= 8:
            return FieldMatrix(f, K.mm_u8(self.data, other.data, f.MUL))
        return FieldMatrix(f, K.mm_u16(self.data, other.data, f.LOG, f.EXP))

    def scale(self, c: int) -> "FieldMatrix":
        f = self.field
        if c == 0:
            return FieldMatrix.zeros(f, self.rows, self.cols)
        if c == 1:
            return self
        if f.e <= 8:
            return FieldMatrix(f, f.MUL[c][self.data])
        out = self.data.copy()
        nz = out != 0
        out[nz] = f.EXP[f.LOG[c] + f.LOG[out[nz].astype(np.int64)]].astype(f.dtype)
        return FieldMatrix(f, out)

    def kronecker(self, other: "FieldMatrix") -> "FieldMatrix":
        self._check_field(other)
        f = self.field
        if f.e <= 8:
            blocks = f.MUL[self.data[:, :, None, None], other.data[None, None, :, :]]
        else:
            a = self.data.astype(np.int64)
            b = other.data.astype(np.int64)
            blocks = np.zeros((self.rows, self.cols, other.rows, other.cols), dtype=np.int64)
            anz = a != 0
            prod = f.EXP[(f.LOG[a[:, :, None, None]] + f.LOG[b[None, None, :, :]])]
            blocks = np.where(anz[:, :, None, None] & (b != 0)[None, None, :, :], prod, 0)
        out = blocks.transpose(0, 2, 1, 3).reshape(self.rows * other.rows, self.cols * other.cols)
        return FieldMatrix(f, out.astype(f.dtype))

    # -- elimination ----------------------------------------------------

    def rref(self):
        """(reduced matrix, rank, pivot columns); input left untouched."""
        f = self.field
        if self.rows == 0 or self.cols == 0:
            return self.copy(), 0, np.array([], dtype=np.int64)
        if f.e == 1:
            r, rank, piv = K.rref_p64(K.pack_bits(self.data), self.cols)
            return FieldMatrix(f, K.unpack_bits(r, self.cols)), rank, piv
        if f.e <= 8:
            r, rank, piv = K.rref_u8(self.data, f.MUL, f.INV)
        else:
            r, rank, piv = K.rref_u16(self.data, f.LOG, f.EXP, f.INV)
        return FieldMatrix(f, r), rank, piv

    def rank(self) -> int:
        return self.rref()[1]

    def nullspace_basis(self) -> "FieldMatrix":
        """Rows span {x : self . x^T = 0}, in reduced echelon form."""
        r, rank, piv = self.rref()
        f = self.field
        free = [c for c in range(self.cols) if c not in set(int(p) for p in piv)]
        out = np.zeros((len(free), self.cols), dtype=f.dtype)
        for k, c in enumerate(free):
            out[k, c] = 1
            for i, p in enumerate(piv):
                out[k, int(p)] = r.data[i, c]
        if len(free) == 0:
            return FieldMatrix(f, out)
        # canonicalize: the kernel basis itself in reduced echelon form
        return FieldMatrix(f, out).rref()[0]

    def solve(self, b: "FieldMatrix"):
        """Some x with self . x = b, free variables zero; None if inconsistent."""
        self._check_field(b)
        if self.rows != b.rows:
            raise ValueError("dimension mismatch in solve")
        f = self.field
        aug = FieldMatrix(f, np.concatenate([self.data, b.data], axis=1))
        r, rank, piv = aug.rref()
        piv = [int(p) for p in piv]
        for p in piv:
            if p >= self.cols:
                return None
        x = np.zeros((self.cols, b.cols), dtype=f.dtype)
        for i, p in enumerate(piv):
            x[p] = r.data[i, self.cols:]
        return FieldMatrix(f, x)

    def inverse(self):
        if self.rows != self.cols:
            raise ValueError("inverse of non-square matrix")
        x = self.solve(FieldMatrix.identity(self.field, self.rows))
        if x is None:
            raise ValueError("matrix is singular")
        return x

    # -- FFMX serialization ----------------------------------------------

    def to_ffmx(self) -> bytes:
        f = self.field
        head = b"FFMX" + struct.pack("<HHQQ", 1, f.e, self.rows, self.cols)
        if f.e == 1:
            payload = K.pack_bits(self.data).astype("<u8").tobytes()
        elif f.e <= 8:
            payload = self.data.astype(np.uint8).tobytes()
        else:
            payload = self.data.astype("<u2").tobytes()
        return head + payload


def read_ffmx(blob: bytes) -> FieldMatrix:
    if blob[:4] != b"FFMX":
        raise ValueError("bad FFMX magic")
    version, e, rows, cols = struct.unpack("<HHQQ", blob[4:24])
    if version != 1:
        raise ValueError(f"unsupported FFMX version {version}")
    f = GF(e)
    body = blob[24:]
    if e == 1:
        nw = (cols + 63) >> 6
        words = np.frombuffer(body, dtype="<u8").reshape(rows, nw) if rows else np.zeros((0, nw), dtype=np.uint64)
        data = K.unpack_bits(words.astype(np.uint64), cols) if rows else np.zeros((0, cols), dtype=np.uint8)
    elif e <= 8:
        data = np.frombuffer(body, dtype=np.uint8).reshape(rows, cols)
    else:
        data = np.frombuffer(body, dtype="<u2").astype(np.uint16).reshape(rows, cols)
    return FieldMatrix(f, data.copy() if rows else data)

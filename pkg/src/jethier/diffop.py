"""Matrix differential operators sum_k A_k d^k and Miura-type coordinate changes.

An operator is an s-by-s matrix whose (row, col) entry is a finite sum of
terms  coeff * d^k  with HbarSeries coefficients and k >= 0.  Composition
expands d^k o f by the Leibniz rule; the adjoint sends f d^k to (-d)^k o f
and transposes the matrix.  Conjugation under a coordinate change

    w_a = m_a(v, v_1, ...)        (identity at hbar^0)

follows the standard transformation law  L o P o adjoint(L)  with
L[a,mu] = sum_e (dm_a/dv[mu,e]) d^e, after which coefficients are
re-expressed in the target jets through the inverse change.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .jetcalc import HbarSeries, JetPoly, rat, substitute

Entry = dict  # {order k: HbarSeries}


class DiffOperator:
    """Immutable s-by-s differential operator with HbarSeries coefficients."""

    __slots__ = ("dim", "trunc", "_entries")

    def __init__(self, dim: int, trunc: int, entries: dict | None = None):
        if dim < 1:
            raise ValueError("dimension must be >= 1")
        clean: dict[tuple[int, int], Entry] = {}
        if entries:
            for (row, col), orders in entries.items():
                if not (1 <= row <= dim and 1 <= col <= dim):
                    raise ValueError(f"entry ({row},{col}) outside 1..{dim}")
                cell: Entry = {}
                for k, coeff in orders.items():
                    if k < 0:
                        raise ValueError("negative operator order")
                    c = coeff.truncate(min(trunc, coeff.trunc))
                    if c:
                        cell[k] = HbarSeries(trunc, c.coeffs)
                if cell:
                    clean[(row, col)] = cell
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "trunc", trunc)
        object.__setattr__(self, "_entries", clean)

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero(dim: int, trunc: int) -> "DiffOperator":
        return DiffOperator(dim, trunc, {})

    @staticmethod
    def identity(dim: int, trunc: int) -> "DiffOperator":
        one = HbarSeries.const(1, trunc)
        return DiffOperator(dim, trunc, {(a, a): {0: one} for a in range(1, dim + 1)})

    @staticmethod
    def dx_op(dim: int, trunc: int, k: int = 1, scale=1) -> "DiffOperator":
        """scale * d^k times the identity matrix."""
        c = HbarSeries.const(rat(scale), trunc)
        return DiffOperator(dim, trunc, {(a, a): {k: c} for a in range(1, dim + 1)})

    @staticmethod
    def mult_op(dim: int, trunc: int, f, row: int = 1, col: int = 1) -> "DiffOperator":
        """Multiplication by f placed in a single (row, col) slot."""
        s = f if isinstance(f, HbarSeries) else HbarSeries.of(f, trunc)
        return DiffOperator(dim, trunc, {(row, col): {0: s}})

    # -- queries ------------------------------------------------------

    def entry(self, row: int, col: int) -> Entry:
        return dict(self._entries.get((row, col), {}))

    def coeff(self, row: int, col: int, k: int) -> HbarSeries:
        got = self._entries.get((row, col), {}).get(k)
        return got if got is not None else HbarSeries.zero(self.trunc)

    def max_order(self) -> int:
        return max((k for cell in self._entries.values() for k in cell), default=-1)

    def is_zero(self) -> bool:
        return not self._entries

    def entries(self):
        """Iterate ((row, col), order, coeff) deterministically."""
        for (row, col) in sorted(self._entries):
            for k in sorted(self._entries[(row, col)]):
                yield (row, col), k, self._entries[(row, col)][k]

    # -- ring operations ----------------------------------------------

    def _require_same_shape(self, other: "DiffOperator"):
        if self.dim != other.dim:
            raise ValueError("operator dimensions do not match")

    def __add__(self, other: "DiffOperator") -> "DiffOperator":
        self._require_same_shape(other)
        trunc = min(self.trunc, other.trunc)
        out: dict[tuple[int, int], Entry] = {}
        for src in (self._entries, other._entries):
            for key, cell in src.items():
                dst = out.setdefault(key, {})
                for k, c in cell.items():
                    dst[k] = dst.get(k, HbarSeries.zero(trunc)) + c
        return DiffOperator(self.dim, trunc, out)

    def __neg__(self) -> "DiffOperator":
        return DiffOperator(
            self.dim, self.trunc,
            {key: {k: -c for k, c in cell.items()} for key, cell in self._entries.items()},
        )

    def __sub__(self, other: "DiffOperator") -> "DiffOperator":
        return self + (-other)

    def __mul__(self, scalar) -> "DiffOperator":
        c = rat(scalar)
        return DiffOperator(
            self.dim, self.trunc,
            {key: {k: v * c for k, v in cell.items()} for key, cell in self._entries.items()},
        )

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiffOperator):
            return NotImplemented
        if self.dim != other.dim:
            return False
        keys = set(self._entries) | set(other._entries)
        trunc = min(self.trunc, other.trunc)
        for key in keys:
            a = self._entries.get(key, {})
            b = other._entries.get(key, {})
            for k in set(a) | set(b):
                ca = a.get(k, HbarSeries.zero(trunc))
                cb = b.get(k, HbarSeries.zero(trunc))
                if not (ca.truncate(trunc) == cb.truncate(trunc)):
                    return False
        return True

    def __repr__(self):
        return f"DiffOperator(dim={self.dim}, entries={len(self._entries)}, order<={self.max_order()})"


def compose(p: DiffOperator, q: DiffOperator) -> DiffOperator:
    """Operator composition p o q with matrix contraction over the inner color."""
    p._require_same_shape(q)
    trunc = min(p.trunc, q.trunc)
    out: dict[tuple[int, int], Entry] = {}
    for (row, mid), cell_p in p._entries.items():
        for col in range(1, q.dim + 1):
            cell_q = q._entries.get((mid, col))
            if not cell_q:
                continue
            dst = out.setdefault((row, col), {})
            for k1, a in cell_p.items():
                for k2, b in cell_q.items():
                    # d^k1 o (b d^k2) = sum_i C(k1,i) dx^i(b) d^(k1-i+k2)
                    for i in range(k1 + 1):
                        coeff = a * b.dx_pow(i) * math.comb(k1, i)
                        k = k1 - i + k2
                        dst[k] = dst.get(k, HbarSeries.zero(trunc)) + coeff
    return DiffOperator(p.dim, trunc, out)


def compose_chain(*ops: DiffOperator) -> DiffOperator:
    acc = ops[0]
    for op in ops[1:]:
        acc = compose(acc, op)
    return acc


def adjoint(p: DiffOperator) -> DiffOperator:
    """Formal adjoint: f d^k -> (-d)^k o f, colors transposed."""
    out: dict[tuple[int, int], Entry] = {}
    for (row, col), cell in p._entries.items():
        dst = out.setdefault((col, row), {})
        for k, a in cell.items():
            sign = -1 if k % 2 else 1
            for i in range(k + 1):
                coeff = a.dx_pow(i) * (math.comb(k, i) * sign)
                kk = k - i
                dst[kk] = dst.get(kk, HbarSeries.zero(p.trunc)) + coeff
    return DiffOperator(p.dim, p.trunc, out)


def apply_op(p: DiffOperator, vec) -> list:
    """Apply to a vector of HbarSeries (index 0 is color 1)."""
    if len(vec) != p.dim:
        raise ValueError("vector length does not match operator dimension")
    out = [HbarSeries.zero(p.trunc) for _ in range(p.dim)]
    for (row, col), cell in p._entries.items():
        target = vec[col - 1]
        for k, a in cell.items():
            out[row - 1] = out[row - 1] + a * target.dx_pow(k)
    return out


def is_skew(p: DiffOperator) -> bool:
    """True iff adjoint(p) == -p exactly within the truncation."""
    return adjoint(p) == -p


# ---------------------------------------------------------------------------
# Miura-type coordinate changes
# ---------------------------------------------------------------------------

def _mat_inverse(mat):
    """Exact inverse of a square Fraction matrix by Gaussian elimination."""
    n = len(mat)
    a = [list(row) + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise ValueError("leading coefficient matrix is not invertible")
        a[col], a[piv] = a[piv], a[col]
        inv = Fraction(1) / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return tuple(tuple(row[n:]) for row in a)


def _linear_part(alpha: int, f: HbarSeries, dim: int):
    """Row of the leading-coefficient matrix, or None if not linear."""
    row = [Fraction(0)] * dim
    for mono, c in f.coeffs[0].terms():
        if len(mono) != 1:
            return None
        mu, n, exp = mono[0]
        if n != 0 or exp != 1:
            return None
        row[mu - 1] = c
    return tuple(row)


class MiuraChange:
    """Coordinate change w_a = m_a(v, v_1, ...), linear and invertible at hbar^0.

    `forward` holds one HbarSeries per color, written in the source jets.
    The hbar^0 part must be an invertible constant-coefficient linear map of
    the order-0 coordinates (the identity for the weak quasi-Miura class).
    The inverse is computed on demand by fixed-point substitution, which is
    triangular in the hbar grading.
    """

    __slots__ = ("dim", "trunc", "forward", "_linear", "_inverse")

    def __init__(self, forward, trunc: int | None = None):
        fwd = tuple(forward)
        if not fwd:
            raise ValueError("empty coordinate change")
        h = trunc if trunc is not None else min(f.trunc for f in fwd)
        fwd = tuple(f.truncate(h) for f in fwd)
        rows = []
        for alpha, f in enumerate(fwd, start=1):
            row = _linear_part(alpha, f, len(fwd))
            if row is None:
                raise ValueError(
                    f"hbar^0 part of component {alpha} must be linear in the "
                    "order-0 coordinates"
                )
            rows.append(row)
        linear = tuple(rows)
        _mat_inverse(linear)  # invertibility check
        object.__setattr__(self, "dim", len(fwd))
        object.__setattr__(self, "trunc", h)
        object.__setattr__(self, "forward", fwd)
        object.__setattr__(self, "_linear", linear)
        object.__setattr__(self, "_inverse", None)

    @staticmethod
    def identity(dim: int, trunc: int) -> "MiuraChange":
        return MiuraChange([HbarSeries.var(a, 0, trunc) for a in range(1, dim + 1)])

    def inverse_images(self) -> tuple:
        """Components of the inverse change, expressed in the target jets."""
        if self._inverse is not None:
            return self._inverse
        h = self.trunc
        cinv = _mat_inverse(self._linear)
        tails = [HbarSeries(h, (JetPoly.zero(),) + f.coeffs[1:]) for f in self.forward]

        def solve(rhs):
            # v = C^-1 rhs, component-wise over HbarSeries entries
            return [
                sum((HbarSeries.of(JetPoly.const(cinv[a][m]), h) * rhs[m]
                     for m in range(self.dim) if cinv[a][m] != 0),
                    HbarSeries.zero(h))
                for a in range(self.dim)
            ]

        wvars = [HbarSeries.var(a, 0, h) for a in range(1, self.dim + 1)]
        cur = solve(wvars)
        for _ in range(h):
            images = {a: cur[a - 1] for a in range(1, self.dim + 1)}
            cur = solve([wvars[a] - substitute(tails[a], images, h)
                         for a in range(self.dim)])
        object.__setattr__(self, "_inverse", tuple(cur))
        return self._inverse

    def inverse(self) -> "MiuraChange":
        return MiuraChange(self.inverse_images())

    def express_in_target(self, x):
        """Rewrite a source-jet JetPoly or HbarSeries in the target jets."""
        images = {a: img for a, img in enumerate(self.inverse_images(), start=1)}
        return substitute(x, images, self.trunc)

    def express_in_source(self, x):
        images = {a: f for a, f in enumerate(self.forward, start=1)}
        return substitute(x, images, self.trunc)

    def jacobian(self) -> DiffOperator:
        """L[a,mu] = sum_e (dm_a/dv[mu,e]) d^e, in source jets."""
        out: dict[tuple[int, int], Entry] = {}
        for alpha, f in enumerate(self.forward, start=1):
            for (mu, e) in sorted(f.variables()):
                c = f.partial(mu, e)
                if c:
                    out.setdefault((alpha, mu), {})[e] = c
        return DiffOperator(self.dim, self.trunc, out)

    def push_flow(self, rhs) -> list:
        """Transport a flow v_t = rhs (source jets) to the target coordinates."""
        if len(rhs) != self.dim:
            raise ValueError("flow length does not match dimension")
        out = []
        for alpha, f in enumerate(self.forward, start=1):
            acc = HbarSeries.zero(self.trunc)
            for (mu, e) in sorted(f.variables()):
                acc = acc + f.partial(mu, e) * rhs[mu - 1].dx_pow(e)
            out.append(self.express_in_target(acc))
        return out


def conjugate_by_miura(p: DiffOperator, m: MiuraChange) -> DiffOperator:
    """Transform a Poisson-type operator under the change of coordinates m.

    Computes L o P o adjoint(L) in the source jets and then re-expresses all
    coefficients in the target jets through the inverse change.
    """
    if p.dim != m.dim:
        raise ValueError("operator and coordinate change dimensions differ")
    jac = m.jacobian()
    raw = compose_chain(jac, p, adjoint(jac))
    trunc = min(p.trunc, m.trunc)
    out: dict[tuple[int, int], Entry] = {}
    for (key, k, coeff) in raw.entries():
        c = m.express_in_target(coeff.truncate(trunc))
        if c:
            out.setdefault(key, {})[k] = c
    return DiffOperator(p.dim, trunc, out)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def operator_to_obj(p: DiffOperator) -> dict:
    from .jetcalc import series_to_obj

    return {
        "rows": p.dim,
        "cols": p.dim,
        "trunc": p.trunc,
        "entries": [
            {"row": row, "col": col, "order": k, "coeff": series_to_obj(c)}
            for (row, col), k, c in p.entries()
        ],
    }


def operator_from_obj(obj: dict) -> DiffOperator:
    from .jetcalc import series_from_obj

    dim = int(obj["rows"])
    trunc = int(obj["trunc"])
    entries: dict[tuple[int, int], Entry] = {}
    for item in obj["entries"]:
        key = (int(item["row"]), int(item["col"]))
        entries.setdefault(key, {})[int(item["order"])] = series_from_obj(item["coeff"])
    return DiffOperator(dim, trunc, entries)

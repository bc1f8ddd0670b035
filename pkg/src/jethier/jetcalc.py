"""Exact calculus on differential Laurent polynomials in jet variables.

A jet variable w[alpha, n] stands for the n-th x-derivative of the alpha-th
dependent variable of a formal loop, alpha = 1..s, n >= 0.  A differential
polynomial is a finite rational-coefficient combination of monomials in the
jet variables.  Negative exponents (the Laurent sector) are permitted only
on variables of order n >= 1; dependence on the order-0 variables is always
polynomial.

Representation is sparse and exact:

  Mono    = tuple[(alpha, n, exp), ...]   sorted by (alpha, n), exp != 0
  JetPoly = { Mono: Fraction }            no zero coefficients stored

The module provides the four derivations of the variational calculus:

  dx           total x-derivative (each w[a,n] -> w[a,n+1] by the chain rule)
  partial      formal partial derivative with respect to one jet variable
  var_deriv    variational (Euler) derivative  sum_n (-dx)^n d/dw[xi,n]
  t_op         higher Euler operators  T[xi,k] = sum_n C(n,k) (-dx)^(n-k) d/dw[xi,n]

together with a formal left inverse of dx, weighted-degree bookkeeping
(deg w[a,n] = n), truncated power series in hbar with JetPoly coefficients,
substitution of series into jet variables, and a canonical JSON form.

All arithmetic is exact; there is no floating point anywhere in this module.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

Mono = tuple  # tuple[tuple[int, int, int], ...]


class NotExact(ValueError):
    """No total-derivative preimage exists inside the Laurent ring."""


def rat(x) -> Fraction:
    """Coerce an int, string like '3/4', or Fraction to an exact rational."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str)):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def _validate_mono(mono: Mono) -> None:
    prev = None
    for alpha, n, exp in mono:
        if alpha < 1 or n < 0 or exp == 0:
            raise ValueError(f"bad factor {(alpha, n, exp)} in monomial")
        if exp < 0 and n == 0:
            raise ValueError(
                f"negative exponent on order-0 variable w[{alpha},0]: "
                "the Laurent sector is restricted to jets of order >= 1"
            )
        key = (alpha, n)
        if prev is not None and key <= prev:
            raise ValueError("monomial factors not strictly sorted")
        prev = key


def _mono_mul(a: Mono, b: Mono) -> Mono:
    """Merge two sorted factor tuples, adding exponents."""
    if not a:
        return b
    if not b:
        return a
    out = []
    i = j = 0
    while i < len(a) and j < len(b):
        fa, fb = a[i], b[j]
        ka, kb = (fa[0], fa[1]), (fb[0], fb[1])
        if ka == kb:
            e = fa[2] + fb[2]
            if e != 0:
                out.append((fa[0], fa[1], e))
            i += 1
            j += 1
        elif ka < kb:
            out.append(fa)
            i += 1
        else:
            out.append(fb)
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out)


def _mono_degree(mono: Mono) -> int:
    return sum(n * exp for _, n, exp in mono)


class JetPoly:
    """Immutable exact-rational Laurent differential polynomial."""

    __slots__ = ("_terms",)

    def __init__(self, terms: dict | None = None):
        clean: dict[Mono, Fraction] = {}
        if terms:
            for mono, coeff in terms.items():
                c = rat(coeff)
                if c == 0:
                    continue
                _validate_mono(mono)
                clean[mono] = c
        object.__setattr__(self, "_terms", clean)

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero() -> "JetPoly":
        return _ZERO

    @staticmethod
    def const(c) -> "JetPoly":
        c = rat(c)
        if c == 0:
            return _ZERO
        p = JetPoly.__new__(JetPoly)
        object.__setattr__(p, "_terms", {(): c})
        return p

    @staticmethod
    def var(alpha: int, n: int, exp: int = 1) -> "JetPoly":
        if exp == 0:
            return JetPoly.const(1)
        return JetPoly({((alpha, n, exp),): Fraction(1)})

    @staticmethod
    def _raw(terms: dict) -> "JetPoly":
        """Internal: wrap an already-normalized term dict without checks."""
        p = JetPoly.__new__(JetPoly)
        object.__setattr__(p, "_terms", terms)
        return p

    # -- queries ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def terms(self) -> Iterator[tuple[Mono, Fraction]]:
        """Iterate (monomial, coefficient) in the canonical order."""
        return iter(sorted(self._terms.items()))

    def constant_term(self) -> Fraction:
        return self._terms.get((), Fraction(0))

    def variables(self) -> set[tuple[int, int]]:
        """All (alpha, n) pairs occurring in some monomial."""
        out = set()
        for mono in self._terms:
            for alpha, n, _ in mono:
                out.add((alpha, n))
        return out

    def max_order(self) -> int:
        """Largest jet order present; -1 for a constant or zero polynomial."""
        best = -1
        for mono in self._terms:
            for _, n, _ in mono:
                if n > best:
                    best = n
        return best

    def colors(self) -> set[int]:
        return {alpha for alpha, _ in self.variables()}

    def is_polynomial(self) -> bool:
        """True iff no negative exponent occurs (no Laurent sector)."""
        return all(exp > 0 for mono in self._terms for _, _, exp in mono)

    def num_terms(self) -> int:
        return len(self._terms)

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = JetPoly.const(other)
        if not isinstance(other, JetPoly):
            return NotImplemented
        if not self._terms:
            return other
        if not other._terms:
            return self
        out = dict(self._terms)
        for mono, c in other._terms.items():
            acc = out.get(mono)
            if acc is None:
                out[mono] = c
            else:
                acc = acc + c
                if acc == 0:
                    del out[mono]
                else:
                    out[mono] = acc
        return JetPoly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return JetPoly._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = JetPoly.const(other)
        if not isinstance(other, JetPoly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = rat(other)
            if c == 0:
                return _ZERO
            return JetPoly._raw({m: cc * c for m, cc in self._terms.items()})
        if not isinstance(other, JetPoly):
            return NotImplemented
        if not self._terms or not other._terms:
            return _ZERO
        out: dict[Mono, Fraction] = {}
        for ma, ca in self._terms.items():
            for mb, cb in other._terms.items():
                mono = _mono_mul(ma, mb)
                c = ca * cb
                acc = out.get(mono)
                if acc is None:
                    out[mono] = c
                else:
                    acc = acc + c
                    if acc == 0:
                        del out[mono]
                    else:
                        out[mono] = acc
        return JetPoly._raw(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * (Fraction(1) / rat(other))

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k == 0:
            return JetPoly.const(1)
        if k < 0:
            if len(self._terms) != 1:
                raise ValueError("negative power of a non-monomial polynomial")
            (mono, coeff), = self._terms.items()
            inv = JetPoly({tuple((a, n, -e) for a, n, e in mono): Fraction(1) / coeff})
            return inv ** (-k)
        acc = self
        for _ in range(k - 1):
            acc = acc * self
        return acc

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = JetPoly.const(other)
        if not isinstance(other, JetPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __repr__(self):
        return f"JetPoly({render(self)})"

    # -- derivations --------------------------------------------------

    def dx(self) -> "JetPoly":
        """Total x-derivative: chain rule, each w[a,n] -> w[a,n+1]."""
        out: dict[Mono, Fraction] = {}
        for mono, coeff in self._terms.items():
            for idx, (alpha, n, exp) in enumerate(mono):
                if exp == 1:
                    rest = mono[:idx] + mono[idx + 1:]
                else:
                    rest = mono[:idx] + ((alpha, n, exp - 1),) + mono[idx + 1:]
                new = _mono_mul(rest, ((alpha, n + 1, 1),))
                c = coeff * exp
                acc = out.get(new)
                if acc is None:
                    out[new] = c
                else:
                    acc = acc + c
                    if acc == 0:
                        del out[new]
                    else:
                        out[new] = acc
        return JetPoly._raw(out)

    def dx_pow(self, k: int, sign: int = 1) -> "JetPoly":
        """Apply dx k times; sign=-1 gives (-dx)^k."""
        p = self
        for _ in range(k):
            p = p.dx()
        if sign == -1 and k % 2 == 1:
            p = -p
        return p

    def partial(self, alpha: int, n: int) -> "JetPoly":
        """Formal partial derivative with respect to w[alpha, n]."""
        out: dict[Mono, Fraction] = {}
        for mono, coeff in self._terms.items():
            for idx, (a, m, exp) in enumerate(mono):
                if a == alpha and m == n:
                    if exp == 1:
                        rest = mono[:idx] + mono[idx + 1:]
                    else:
                        rest = mono[:idx] + ((a, m, exp - 1),) + mono[idx + 1:]
                    c = coeff * exp
                    acc = out.get(rest)
                    if acc is None:
                        out[rest] = c
                    else:
                        acc = acc + c
                        if acc == 0:
                            del out[rest]
                        else:
                            out[rest] = acc
                    break
        return JetPoly._raw(out)

    def var_deriv(self, alpha: int) -> "JetPoly":
        """Variational derivative  sum_n (-dx)^n  d/dw[alpha,n]."""
        out = _ZERO
        for n in sorted({m for a, m in self.variables() if a == alpha}):
            out = out + self.partial(alpha, n).dx_pow(n, sign=-1)
        return out

    def t_op(self, alpha: int, k: int) -> "JetPoly":
        """Higher Euler operator T[alpha,k]; zero for k < 0, T[.,0] = var_deriv."""
        if k < 0:
            return _ZERO
        out = _ZERO
        for n in sorted({m for a, m in self.variables() if a == alpha}):
            if n < k:
                continue
            out = out + math.comb(n, k) * self.partial(alpha, n).dx_pow(n - k, sign=-1)
        return out

    # -- grading ------------------------------------------------------

    def degrees(self) -> set[int]:
        return {_mono_degree(m) for m in self._terms}

    def weighted_degree(self):
        """Common weighted degree, or None if zero or non-homogeneous."""
        degs = self.degrees()
        if len(degs) == 1:
            return degs.pop()
        return None

    def is_homogeneous(self, d: int) -> bool:
        """True iff every monomial has weighted degree d (vacuous for zero)."""
        return all(_mono_degree(m) == d for m in self._terms)


_ZERO = JetPoly.__new__(JetPoly)
object.__setattr__(_ZERO, "_terms", {})


# ---------------------------------------------------------------------------
# module-level operation names (work on JetPoly and HbarSeries alike)
# ---------------------------------------------------------------------------

def dx(p):
    return p.dx()


def partial(p, alpha: int, n: int):
    return p.partial(alpha, n)


def var_deriv(p, alpha: int):
    return p.var_deriv(alpha)


def t_op(p, alpha: int, k: int):
    return p.t_op(alpha, k)


def weighted_degree(p: JetPoly):
    return p.weighted_degree()


def is_homogeneous(p: JetPoly, d: int) -> bool:
    return p.is_homogeneous(d)


def formal_integrate(p: JetPoly) -> JetPoly:
    """Formal left inverse of dx, normalized with no pure constant term.

    Works slice by slice: the top-order jets of an exact polynomial occur
    linearly, and their coefficients form a gradient in the next-lower
    slice, which an Euler homotopy reconstructs.  The result q is verified
    to satisfy dx(q) == p; failure of any step raises NotExact.  Inputs
    whose preimage would need a logarithm (d log sectors such as
    w[1,2]/w[1,1]) are rejected the same way.
    """
    if isinstance(p, HbarSeries):
        return HbarSeries(p.trunc, [formal_integrate(c) for c in p.coeffs])
    if p.constant_term() != 0:
        raise NotExact("nonzero constant term has no dx-preimage")
    for alpha in sorted(p.colors()):
        if p.var_deriv(alpha):
            raise NotExact(f"variational derivative in color {alpha} does not vanish")
    result = _ZERO
    rem = p
    while rem:
        top = rem.max_order()
        if top < 1:
            raise NotExact("residue depends on order-0 variables only")
        # linear coefficients of the top slice, one per color present
        euler = _ZERO
        for alpha in sorted({a for a, n in rem.variables() if n == top}):
            coeff = rem.partial(alpha, top)
            if coeff.max_order() >= top:
                raise NotExact("top jet slice occurs nonlinearly")
            euler = euler + JetPoly.var(alpha, top - 1) * coeff
        psi_terms: dict[Mono, Fraction] = {}
        for mono, c in euler._terms.items():
            ydeg = sum(e for a, n, e in mono if n == top - 1)
            if ydeg == 0:
                raise NotExact("slice potential needs a logarithm or is not closed")
            psi_terms[mono] = c / ydeg
        psi = JetPoly(psi_terms)
        new_rem = rem - psi.dx()
        if any(n >= top for _, n in new_rem.variables()):
            raise NotExact("top slice is not a gradient")
        result = result + psi
        rem = new_rem
    if result.dx() != p:
        raise NotExact("reconstruction failed verification")
    return result


# ---------------------------------------------------------------------------
# truncated series in hbar
# ---------------------------------------------------------------------------

class HbarSeries:
    """Truncated formal series in hbar with JetPoly coefficients.

    coeffs[g] is the coefficient of hbar^g, g = 0..trunc.  Arithmetic never
    silently exceeds the truncation order: sums and products truncate at the
    minimum of the operand truncations.
    """

    __slots__ = ("trunc", "coeffs")

    def __init__(self, trunc: int, coeffs: Sequence[JetPoly] = ()):
        if trunc < 0:
            raise ValueError("truncation order must be >= 0")
        cs = list(coeffs)
        if len(cs) > trunc + 1:
            cs = cs[: trunc + 1]
        while len(cs) < trunc + 1:
            cs.append(_ZERO)
        object.__setattr__(self, "trunc", trunc)
        object.__setattr__(self, "coeffs", tuple(cs))

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero(trunc: int) -> "HbarSeries":
        return HbarSeries(trunc)

    @staticmethod
    def const(c, trunc: int) -> "HbarSeries":
        return HbarSeries(trunc, [JetPoly.const(c)])

    @staticmethod
    def of(p: JetPoly, trunc: int) -> "HbarSeries":
        return HbarSeries(trunc, [p])

    @staticmethod
    def var(alpha: int, n: int, trunc: int) -> "HbarSeries":
        return HbarSeries(trunc, [JetPoly.var(alpha, n)])

    # -- queries ------------------------------------------------------

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def num_terms(self) -> int:
        return sum(c.num_terms() for c in self.coeffs)

    def variables(self) -> set[tuple[int, int]]:
        out = set()
        for c in self.coeffs:
            out |= c.variables()
        return out

    def is_polynomial(self) -> bool:
        return all(c.is_polynomial() for c in self.coeffs)

    def constant_series(self) -> bool:
        return all(not c.variables() for c in self.coeffs)

    # -- arithmetic ---------------------------------------------------

    @staticmethod
    def _lift(x, trunc: int) -> "HbarSeries":
        if isinstance(x, HbarSeries):
            return x
        if isinstance(x, JetPoly):
            return HbarSeries.of(x, trunc)
        return HbarSeries.const(rat(x), trunc)

    def __add__(self, other):
        o = HbarSeries._lift(other, self.trunc)
        h = min(self.trunc, o.trunc)
        return HbarSeries(h, [self.coeffs[g] + o.coeffs[g] for g in range(h + 1)])

    __radd__ = __add__

    def __neg__(self):
        return HbarSeries(self.trunc, [-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-HbarSeries._lift(other, self.trunc))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = rat(other)
            return HbarSeries(self.trunc, [p * c for p in self.coeffs])
        if isinstance(other, JetPoly):
            return HbarSeries(self.trunc, [p * other for p in self.coeffs])
        if not isinstance(other, HbarSeries):
            return NotImplemented
        h = min(self.trunc, other.trunc)
        out = [_ZERO] * (h + 1)
        for g1 in range(min(self.trunc, h) + 1):
            a = self.coeffs[g1]
            if not a:
                continue
            for g2 in range(min(other.trunc, h - g1) + 1):
                b = other.coeffs[g2]
                if b:
                    out[g1 + g2] = out[g1 + g2] + a * b
        return HbarSeries(h, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * (Fraction(1) / rat(other))

    def hbar_shift(self, k: int = 1) -> "HbarSeries":
        """Multiply by hbar^k (coefficients beyond the truncation are dropped)."""
        return HbarSeries(self.trunc, [_ZERO] * k + list(self.coeffs[: self.trunc + 1 - k]))

    def truncate(self, trunc: int) -> "HbarSeries":
        return HbarSeries(trunc, self.coeffs[: trunc + 1])

    def inverse(self) -> "HbarSeries":
        """Multiplicative inverse; the hbar^0 part must be a single monomial."""
        lead = self.coeffs[0]
        if len(lead._terms) != 1:
            raise ValueError("inverse needs a single-monomial leading coefficient")
        lead_inv = lead ** (-1)
        # (m + r)^-1 = m^-1 sum_k (-r m^-1)^k   with r the hbar-positive tail
        tail = HbarSeries(self.trunc, [_ZERO] + [-(c * lead_inv) for c in self.coeffs[1:]])
        out = HbarSeries.const(1, self.trunc)
        power = HbarSeries.const(1, self.trunc)
        for _ in range(self.trunc):
            power = power * tail
            if power.is_zero():
                break
            out = out + power
        return out * lead_inv

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, JetPoly)):
            other = HbarSeries._lift(other, self.trunc)
        if not isinstance(other, HbarSeries):
            return NotImplemented
        h = min(self.trunc, other.trunc)
        return all(self.coeffs[g] == other.coeffs[g] for g in range(h + 1))

    def __repr__(self):
        return f"HbarSeries({render_series(self)})"

    # -- derivations (coefficient-wise) --------------------------------

    def dx(self) -> "HbarSeries":
        return HbarSeries(self.trunc, [c.dx() for c in self.coeffs])

    def dx_pow(self, k: int, sign: int = 1) -> "HbarSeries":
        return HbarSeries(self.trunc, [c.dx_pow(k, sign) for c in self.coeffs])

    def partial(self, alpha: int, n: int) -> "HbarSeries":
        return HbarSeries(self.trunc, [c.partial(alpha, n) for c in self.coeffs])

    def var_deriv(self, alpha: int) -> "HbarSeries":
        return HbarSeries(self.trunc, [c.var_deriv(alpha) for c in self.coeffs])

    def t_op(self, alpha: int, k: int) -> "HbarSeries":
        return HbarSeries(self.trunc, [c.t_op(alpha, k) for c in self.coeffs])


# ---------------------------------------------------------------------------
# substitution of series into jet variables
# ---------------------------------------------------------------------------

class _Prolongation:
    """Caches x-derivatives and inverse powers of substitution images."""

    def __init__(self, images: dict[int, HbarSeries], trunc: int):
        self.images = images
        self.trunc = trunc
        self._jets: dict[tuple[int, int], HbarSeries] = {}
        self._inv: dict[tuple[int, int], HbarSeries] = {}

    def jet(self, alpha: int, n: int) -> HbarSeries:
        key = (alpha, n)
        got = self._jets.get(key)
        if got is None:
            if n == 0:
                got = self.images[alpha].truncate(self.trunc)
            else:
                got = self.jet(alpha, n - 1).dx()
            self._jets[key] = got
        return got

    def power(self, alpha: int, n: int, exp: int) -> HbarSeries:
        if exp >= 0:
            base = self.jet(alpha, n)
            out = HbarSeries.const(1, self.trunc)
            for _ in range(exp):
                out = out * base
            return out
        key = (alpha, n)
        inv = self._inv.get(key)
        if inv is None:
            inv = self.jet(alpha, n).inverse()
            self._inv[key] = inv
        out = HbarSeries.const(1, self.trunc)
        for _ in range(-exp):
            out = out * inv
        return out


def substitute(p, images: dict[int, HbarSeries], trunc: int) -> HbarSeries:
    """Substitute images[alpha] for w[alpha,0], prolonging derivatives by dx.

    Every jet variable w[alpha,n] is replaced by dx^n(images[alpha]).
    Negative exponents require the prolonged image to be invertible (its
    hbar^0 part a single monomial).
    """
    pro = _Prolongation(images, trunc)
    if isinstance(p, HbarSeries):
        out = HbarSeries.zero(trunc)
        for g, c in enumerate(p.coeffs):
            if g > trunc:
                break
            if c:
                out = out + _subs_poly(c, pro).hbar_shift(g)
        return out
    return _subs_poly(p, pro)


def _subs_poly(p: JetPoly, pro: _Prolongation) -> HbarSeries:
    out = HbarSeries.zero(pro.trunc)
    for mono, coeff in p._terms.items():
        term = HbarSeries.const(coeff, pro.trunc)
        for alpha, n, exp in mono:
            term = term * pro.power(alpha, n, exp)
        out = out + term
    return out


# ---------------------------------------------------------------------------
# canonical serialization and rendering
# ---------------------------------------------------------------------------

def jetpoly_to_obj(p: JetPoly) -> list:
    """Canonical JSON form: sorted list of {"coeff": "num/den", "mono": [[a,n,e],..]}."""
    return [
        {"coeff": str(c), "mono": [list(f) for f in mono]}
        for mono, c in p.terms()
    ]


def jetpoly_from_obj(obj: Iterable) -> JetPoly:
    terms: dict[Mono, Fraction] = {}
    for item in obj:
        mono = tuple(tuple(int(x) for x in f) for f in item["mono"])
        terms[mono] = terms.get(mono, Fraction(0)) + rat(item["coeff"])
    return JetPoly(terms)


def series_to_obj(s: HbarSeries) -> dict:
    return {"trunc": s.trunc, "coeffs": [jetpoly_to_obj(c) for c in s.coeffs]}


def series_from_obj(obj: dict) -> HbarSeries:
    return HbarSeries(int(obj["trunc"]), [jetpoly_from_obj(c) for c in obj["coeffs"]])


def render(p: JetPoly, letter: str = "w") -> str:
    """Deterministic plain-text form in the canonical monomial order."""
    if p.is_zero():
        return "0"
    parts = []
    for mono, coeff in p.terms():
        factors = []
        for alpha, n, exp in mono:
            v = f"{letter}[{alpha},{n}]"
            factors.append(v if exp == 1 else f"{v}^{exp}")
        body = "*".join(factors)
        if not factors:
            piece = str(abs(coeff))
        elif abs(coeff) == 1:
            piece = body
        else:
            piece = f"{abs(coeff)}*{body}"
        sign = "-" if coeff < 0 else "+"
        parts.append((sign, piece))
    first_sign, first = parts[0]
    out = (first_sign if first_sign == "-" else "") + first
    for sign, piece in parts[1:]:
        out += f" {sign} {piece}"
    return out


def render_series(s: HbarSeries, letter: str = "w") -> str:
    parts = []
    for g, c in enumerate(s.coeffs):
        if c.is_zero():
            continue
        body = render(c, letter)
        if g == 0:
            parts.append(body)
        else:
            h = "hbar" if g == 1 else f"hbar^{g}"
            parts.append(f"{h}*({body})")
    return " + ".join(parts) if parts else "0"


# ---------------------------------------------------------------------------
# seeded random polynomials for property tests
# ---------------------------------------------------------------------------

def random_jetpoly(rng, colors: int = 3, max_order: int = 3, max_exp: int = 2,
                   coeff_bound: int = 3, n_terms: int = 3) -> JetPoly:
    """Small random differential polynomial with bounded data.

    Colors <= `colors`, jet orders <= `max_order`, exponents in 1..max_exp,
    integer coefficients in -coeff_bound..coeff_bound (zero coefficients
    dropped).  Deterministic given the rng state.
    """
    out = _ZERO
    for _ in range(n_terms):
        n_factors = rng.randint(1, 3)
        factors: dict[tuple[int, int], int] = {}
        for _ in range(n_factors):
            a = rng.randint(1, colors)
            n = rng.randint(0, max_order)
            factors[(a, n)] = factors.get((a, n), 0) + rng.randint(1, max_exp)
        mono = tuple((a, n, e) for (a, n), e in sorted(factors.items()))
        c = rng.randint(-coeff_bound, coeff_bound)
        out = out + JetPoly({mono: c}) if c else out
    return out

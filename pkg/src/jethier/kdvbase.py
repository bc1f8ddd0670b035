"""The KdV base point: explicit tables, the quasi-Miura transform, tensor powers.

The one-color hierarchy with cubic prepotential is the anchor where every
structure is explicitly polynomial.  Its data enters in three layers:

  * dispersionless closed form   v^(p+q+1) / (p! q! (p+q+1));
  * the first three dispersive flows, integrated to first-row table entries
    exact to hbar^2;
  * the genus-1 correction, carried by derivatives of the density
    (1/24) log v_x, which completes every entry to first order in hbar;
    mixed entries to hbar^2 are produced by transporting first-row data
    along the flows and integrating.

The quasi-Miura transform (rational in v_x) maps the dispersionless
hierarchy to the dispersive one; only derivatives of log v_x are ever
materialized, so all values stay inside the Laurent polynomial ring.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .diffop import MiuraChange
from .givental import OmegaTable
from .jetcalc import HbarSeries, JetPoly, NotExact, dx, formal_integrate

V1 = 1  # the single color of the base point


class OutOfDerivableRange(ValueError):
    """Entry not derivable from the base-point data at the requested order."""


def _v(n: int, exp: int = 1) -> JetPoly:
    return JetPoly.var(V1, n, exp)


def kdv_flow(q: int, trunc: int = 2) -> HbarSeries:
    """Right-hand side of the q-th flow, exact through hbar^2 for q <= 2."""
    if trunc > 2:
        raise OutOfDerivableRange("flows are tabulated through hbar^2 only")
    if q == 0:
        rhs = HbarSeries(2, [_v(1)])
    elif q == 1:
        rhs = HbarSeries(2, [_v(0) * _v(1), _v(3) / 12])
    elif q == 2:
        rhs = HbarSeries(2, [
            _v(0) ** 2 * _v(1) / 2,
            (2 * _v(1) * _v(2) + _v(0) * _v(3)) / 12,
            _v(5) / 240,
        ])
    else:
        raise OutOfDerivableRange(f"flow {q} is not tabulated")
    return rhs.truncate(trunc)


def kdv_dispersionless_omega(p: int, q: int) -> JetPoly:
    """Closed-form dispersionless entry v^(p+q+1)/(p! q! (p+q+1))."""
    if p < 0 or q < 0:
        raise ValueError("descendant indices must be >= 0")
    denom = math.factorial(p) * math.factorial(q) * (p + q + 1)
    return _v(0, p + q + 1) * Fraction(1, denom)


# ---------------------------------------------------------------------------
# genus-1 completion
# ---------------------------------------------------------------------------

def _flow_vector(p: int) -> JetPoly:
    """Dispersionless flow  v^p/p! * v_1."""
    return _v(0, p) * _v(1) / math.factorial(p) if p else _v(1)


def flow_derivation(f: JetPoly, p: int) -> JetPoly:
    """Derivative of a jet function along the dispersionless p-th flow."""
    x = _flow_vector(p)
    out = JetPoly.zero()
    for (_, n) in sorted(f.variables()):
        out = out + f.partial(V1, n) * x.dx_pow(n)
    return out


def genus1_flow_derivative(p: int) -> JetPoly:
    """Derivative of the genus-1 density along the p-th flow (Laurent).

    The density itself is (1/24) log v_x and never appears; its flow
    derivative (1/24) dx(flow)/v_x stays in the Laurent ring.
    """
    return dx(_flow_vector(p)) * _v(1, -1) / 24


def genus1_second_derivative(p: int, q: int) -> JetPoly:
    """Second flow derivative of the genus-1 density."""
    return flow_derivation(genus1_flow_derivative(p), q)


def quasi_miura_h1() -> JetPoly:
    """hbar coefficient of the coordinate change: (1/24) (log v_x)_xx."""
    return dx(_v(2) * _v(1, -1)) / 24


def quasi_miura_h2() -> JetPoly:
    """hbar^2 coefficient: the printed rational density, twice differentiated."""
    density = (_v(4) * _v(1, -2) / 1152
               - 7 * _v(2) * _v(3) * _v(1, -3) / 1920
               + _v(2, 3) * _v(1, -4) / 360)
    return dx(dx(density))


def quasi_miura(direction: str = "forward", trunc: int = 2) -> MiuraChange:
    """The rational coordinate change between the two hierarchies."""
    if trunc > 2:
        raise OutOfDerivableRange("transform is tabulated through hbar^2 only")
    coeffs = [_v(0), quasi_miura_h1(), quasi_miura_h2()][: trunc + 1]
    fwd = MiuraChange([HbarSeries(trunc, coeffs)])
    if direction == "forward":
        return fwd
    if direction == "inverse":
        return fwd.inverse()
    raise ValueError("direction must be 'forward' or 'inverse'")


def genus1_entry_correction(p: int, q: int) -> JetPoly:
    """hbar coefficient of the (p;q) entry, from the genus-1 completion.

    Combines the second flow derivative of the genus-1 density with the
    coordinate-change correction; the rational parts cancel and the result
    must be a polynomial of weighted degree 2, which is asserted.
    """
    lead = kdv_dispersionless_omega(p, q).partial(V1, 0)
    out = genus1_second_derivative(p, q) - lead * quasi_miura_h1()
    if not out.is_polynomial():
        raise NotExact(
            f"genus-1 completion of entry ({p};{q}) left rational terms"
        )
    return out


# ---------------------------------------------------------------------------
# table entries
# ---------------------------------------------------------------------------

def _first_row(q: int, trunc: int) -> HbarSeries:
    return formal_integrate(kdv_flow(q, trunc))


def _transport(p: int, q: int, trunc: int) -> HbarSeries:
    """Mixed entry from first-row data: integrate the p-flow image of (0;q)."""
    src = _first_row(q, trunc)
    left = _first_row(p, trunc)
    integrand = HbarSeries.zero(trunc)
    for (_, n) in sorted(src.variables()):
        integrand = integrand + left.dx_pow(n + 1) * src.partial(V1, n)
    try:
        return formal_integrate(integrand)
    except NotExact as exc:  # theory guarantees exactness; failure is a bug
        raise NotExact(f"transport of entry ({p};{q}) failed: {exc}") from exc


def kdv_full_omega(p: int, q: int, trunc: int = 2):
    """Dispersive entry (p;q) with a provenance tag.

    Returns (HbarSeries, tag).  Derivable set: first-row entries with
    max(p,q) <= 2 at any truncation <= 2; everything at truncation <= 1 via
    the genus-1 completion; mixed entries with p,q <= 2 at truncation 2 via
    flow transport.  Anything else raises OutOfDerivableRange.
    """
    if p < 0 or q < 0:
        raise ValueError("descendant indices must be >= 0")
    if trunc > 2:
        raise OutOfDerivableRange("base-point data stops at hbar^2")
    if min(p, q) == 0 and max(p, q) <= 2:
        lo, hi = sorted((p, q))
        return _first_row(hi, trunc), "flow-integration"
    if trunc <= 1:
        coeffs = [kdv_dispersionless_omega(p, q)]
        if trunc == 1:
            coeffs.append(genus1_entry_correction(p, q))
        return HbarSeries(trunc, coeffs), "genus1-completion"
    if max(p, q) <= 2:
        return _transport(p, q, trunc), "flow-transport"
    raise OutOfDerivableRange(
        f"entry ({p};{q}) at truncation {trunc} is outside the derivable set"
    )


def kdv_omega_table(pmax: int, qmax: int, trunc: int = 2) -> OmegaTable:
    """Full table on 0..pmax x 0..qmax; symmetric pairs computed once."""
    entries = {}
    prov = {}
    for p in range(pmax + 1):
        for q in range(qmax + 1):
            if q < p and q <= pmax and p <= qmax:
                entries[(V1, p, V1, q)] = entries[(V1, q, V1, p)]
                prov[(V1, p, V1, q)] = prov[(V1, q, V1, p)]
                continue
            series, tag = kdv_full_omega(p, q, trunc)
            entries[(V1, p, V1, q)] = series
            prov[(V1, p, V1, q)] = tag
    return OmegaTable(1, pmax, qmax, trunc, entries, prov)


class KdVPoint:
    """Bundle of base-point data: table, transform, genus-1 derivatives."""

    __slots__ = ("trunc", "table", "miura")

    def __init__(self, pmax: int = 2, qmax: int = 2, trunc: int = 2):
        object.__setattr__(self, "trunc", trunc)
        object.__setattr__(self, "table", kdv_omega_table(pmax, qmax, trunc))
        object.__setattr__(self, "miura", quasi_miura("forward", min(trunc, 2)))

    def genus1_flow_derivative(self, p: int) -> JetPoly:
        return genus1_flow_derivative(p)


def _recolor(p: JetPoly, color: int) -> JetPoly:
    return JetPoly({
        tuple((color, n, e) for _, n, e in mono): c
        for mono, c in p._terms.items()
    })


def tensor_power(source, dim: int) -> OmegaTable:
    """Block-diagonal table of `dim` decoupled copies of the base point.

    Diagonal color blocks repeat the one-color entries in that color's jet
    variables; mixed-color entries vanish (product partition functions have
    no mixed second derivatives).
    """
    table = source.table if isinstance(source, KdVPoint) else source
    if table.dim != 1:
        raise ValueError("tensor_power expects a one-color source table")
    if dim < 1:
        raise ValueError("tensor power must be >= 1")
    entries = {}
    prov = {}
    zero = HbarSeries.zero(table.trunc)
    for (_, p, _, q), series in table.items():
        for a in range(1, dim + 1):
            entries[(a, p, a, q)] = HbarSeries(
                table.trunc, [_recolor(c, a) for c in series.coeffs])
            tag = table.provenance.get((V1, p, V1, q))
            if tag:
                prov[(a, p, a, q)] = tag
        for a in range(1, dim + 1):
            for b in range(1, dim + 1):
                if a != b:
                    entries[(a, p, b, q)] = zero
    return OmegaTable(dim, table.pmax, table.qmax, table.trunc, entries, prov)

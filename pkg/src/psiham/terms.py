"""Closed term algebra for homotopy-analysis iterates.

A series term is ``spatial(point) * X**beta / Gamma(beta + 1)`` where
``X = psi(t) - psi(a)`` and ``beta = k*alpha + j``.  With this normalisation
the psi-fractional integral of order ``alpha`` is the exponent shift
``k -> k + 1``; no Gamma ratios are ever multiplied into coefficients.

Spatial parts come in two variants that are never mixed:

* :class:`Cylindrical` -- Laurent polynomials ``sum c_n r^n`` (``n`` may be negative);
* :class:`Planar` -- trigonometric polynomials in ``theta = x + y``.

Coefficients are plain numbers; floats are the norm but :class:`fractions.Fraction`
inputs stay exact through every linear operation.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import DomainError, LengthError, SingularPointError, VariantError
from .special import gamma_eval

__all__ = [
    "TemporalPower",
    "SpatialExpr",
    "Cylindrical",
    "Planar",
    "SeriesTerm",
    "TermSum",
    "HamSeries",
    "cylindrical_operator",
    "planar_laplacian",
    "planar_derivative",
    "planar_convection",
    "temporal_fractional_integral",
    "temporal_value",
    "series_eval",
    "evaluate_spatial",
    "SERIES_FORMAT",
]

SERIES_FORMAT = "psiham.series/1"


# ---------------------------------------------------------------------------
# temporal factors


@dataclass(frozen=True, order=True)
class TemporalPower:
    """Exponent ``beta = k*alpha + j`` of a normalised psi-power."""

    k: int = 0
    j: int = 0

    def __post_init__(self) -> None:
        if self.k < 0 or self.j < 0:
            raise DomainError(f"temporal exponent must be non-negative, got k={self.k}, j={self.j}")

    def beta(self, alpha: float) -> float:
        return self.k * alpha + self.j

    def shifted(self) -> "TemporalPower":
        return TemporalPower(self.k + 1, self.j)

    def __add__(self, other: "TemporalPower") -> "TemporalPower":
        return TemporalPower(self.k + other.k, self.j + other.j)

    @property
    def is_constant(self) -> bool:
        return self.k == 0 and self.j == 0


def temporal_value(tp: TemporalPower, alpha: float, x: float) -> float:
    """``x**beta / Gamma(beta + 1)`` for an increment ``x = psi(t) - psi(a) >= 0``."""
    if tp.is_constant:
        return 1.0
    beta = tp.beta(alpha)
    if x == 0.0:
        return 0.0
    if x < 0.0:
        raise DomainError("psi increment must be non-negative")
    return x**beta / gamma_eval(beta + 1.0)


def _product_factor(p: TemporalPower, q: TemporalPower, alpha: float) -> float:
    # normalised powers multiply with a Beta-type factor
    bp, bq = p.beta(alpha), q.beta(alpha)
    return gamma_eval(bp + bq + 1.0) / (gamma_eval(bp + 1.0) * gamma_eval(bq + 1.0))


# ---------------------------------------------------------------------------
# spatial expressions


def _pruned(items: Iterable[tuple]) -> dict:
    return {key: c for key, c in items if c != 0}


class SpatialExpr:
    """Immutable finite linear combination of basis functions."""

    __slots__ = ("_c",)
    variant: str = ""

    def __init__(self, coeffs: Mapping | None = None):
        self._c = _pruned((coeffs or {}).items())

    # linear structure
    def _new(self, coeffs: Mapping) -> "SpatialExpr":
        return type(self)(coeffs)

    def _same(self, other: "SpatialExpr") -> None:
        if type(other) is not type(self):
            raise VariantError(f"cannot combine {self.variant} and {getattr(other, 'variant', other)!r}")

    def __add__(self, other: "SpatialExpr") -> "SpatialExpr":
        self._same(other)
        acc = dict(self._c)
        for key, c in other._c.items():
            acc[key] = acc.get(key, 0) + c
        return self._new(acc)

    def __neg__(self) -> "SpatialExpr":
        return self._new({key: -c for key, c in self._c.items()})

    def __sub__(self, other: "SpatialExpr") -> "SpatialExpr":
        return self + (-other)

    def __mul__(self, scalar) -> "SpatialExpr":
        if isinstance(scalar, SpatialExpr):
            return NotImplemented
        return self._new({key: scalar * c for key, c in self._c.items()})

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not self._c

    def coefficients(self) -> dict:
        return dict(self._c)

    def max_abs_diff(self, other: "SpatialExpr") -> float:
        self._same(other)
        keys = set(self._c) | set(other._c)
        return max((abs(float(self._c.get(k, 0)) - float(other._c.get(k, 0))) for k in keys), default=0.0)

    def __eq__(self, other: object) -> bool:
        return type(other) is type(self) and self._c == other._c  # type: ignore[attr-defined]

    def __hash__(self) -> int:
        return hash((self.variant, frozenset(self._c.items())))

    def __len__(self) -> int:
        return len(self._c)


class Cylindrical(SpatialExpr):
    """Laurent polynomial ``sum_n c_n r^n``."""

    __slots__ = ()
    variant = "cylindrical"

    @classmethod
    def monomial(cls, n: int, c=1.0) -> "Cylindrical":
        return cls({int(n): c})

    @classmethod
    def constant(cls, c) -> "Cylindrical":
        return cls({0: c})

    def evaluate(self, r: float) -> float:
        if r == 0.0 and any(n < 0 for n in self._c):
            raise SingularPointError("negative power of r evaluated on the axis r = 0")
        return math.fsum(float(c) * r**n for n, c in self._c.items())

    def derivative(self) -> "Cylindrical":
        return Cylindrical({n - 1: n * c for n, c in self._c.items() if n != 0})

    def __repr__(self) -> str:
        body = " + ".join(f"{c!r}*r^{n}" for n, c in sorted(self._c.items())) or "0"
        return f"Cylindrical({body})"


class Planar(SpatialExpr):
    """Trigonometric polynomial in ``theta = x + y``.

    Keys are ``("cos", k)`` and ``("sin", k)`` with ``k >= 1``; the constant is
    stored under ``("cos", 0)``.
    """

    __slots__ = ()
    variant = "planar"

    def __init__(self, coeffs: Mapping | None = None):
        acc: dict = {}
        for (kind, k), c in (coeffs or {}).items():
            _accumulate(acc, kind, int(k), c)
        super().__init__(acc)

    @classmethod
    def constant(cls, c) -> "Planar":
        return cls({("cos", 0): c})

    @classmethod
    def sin(cls, k: int = 1, c=1.0) -> "Planar":
        return cls({("sin", k): c})

    @classmethod
    def cos(cls, k: int = 1, c=1.0) -> "Planar":
        return cls({("cos", k): c})

    @classmethod
    def from_modes(cls, const=0.0, modes: Mapping[int, tuple] | None = None) -> "Planar":
        coeffs: dict = {("cos", 0): const}
        for k, (s, c) in (modes or {}).items():
            if k < 1:
                raise DomainError(f"trigonometric modes start at 1, got {k}")
            coeffs[("sin", k)] = s
            coeffs[("cos", k)] = c
        return cls(coeffs)

    @property
    def const(self):
        return self._c.get(("cos", 0), 0)

    @property
    def modes(self) -> dict[int, tuple]:
        out: dict[int, tuple] = {}
        for (kind, k), c in self._c.items():
            if k == 0:
                continue
            s0, c0 = out.get(k, (0, 0))
            out[k] = (s0 + c, c0) if kind == "sin" else (s0, c0 + c)
        return out

    def evaluate_theta(self, theta: float) -> float:
        return math.fsum(
            float(c) * (math.sin(k * theta) if kind == "sin" else math.cos(k * theta))
            for (kind, k), c in self._c.items()
        )

    def evaluate(self, x: float, y: float) -> float:
        return self.evaluate_theta(x + y)

    def product(self, other: "Planar") -> "Planar":
        self._same(other)
        acc: dict = {}
        for (k1, n1), c1 in self._c.items():
            for (k2, n2), c2 in other._c.items():
                c = c1 * c2 / 2
                if k1 == "sin" and k2 == "sin":
                    _accumulate(acc, "cos", n1 - n2, c)
                    _accumulate(acc, "cos", n1 + n2, -c)
                elif k1 == "cos" and k2 == "cos":
                    _accumulate(acc, "cos", n1 - n2, c)
                    _accumulate(acc, "cos", n1 + n2, c)
                elif k1 == "sin":
                    _accumulate(acc, "sin", n1 + n2, c)
                    _accumulate(acc, "sin", n1 - n2, c)
                else:
                    _accumulate(acc, "sin", n1 + n2, c)
                    _accumulate(acc, "sin", n2 - n1, c)
        return Planar(acc)

    def derivative(self) -> "Planar":
        """d/dtheta, which equals both d/dx and d/dy."""
        acc: dict = {}
        for (kind, k), c in self._c.items():
            if k == 0:
                continue
            if kind == "sin":
                _accumulate(acc, "cos", k, k * c)
            else:
                _accumulate(acc, "sin", k, -k * c)
        return Planar(acc)

    def __repr__(self) -> str:
        parts = []
        for (kind, k), c in sorted(self._c.items(), key=lambda kv: (kv[0][1], kv[0][0])):
            parts.append(f"{c!r}" if k == 0 else f"{c!r}*{kind}({k}θ)")
        return f"Planar({' + '.join(parts) or '0'})"


def _accumulate(acc: dict, kind: str, k: int, c) -> None:
    if c == 0:
        return
    if kind not in ("sin", "cos"):
        raise DomainError(f"unknown trigonometric kind {kind!r}")
    if k < 0:
        k = -k
        if kind == "sin":
            c = -c
    if k == 0 and kind == "sin":
        return
    key = (kind, k)
    new = acc.get(key, 0) + c
    if new == 0:
        acc.pop(key, None)
    else:
        acc[key] = new


def cylindrical_operator(e: SpatialExpr) -> Cylindrical:
    """``d^2/dr^2 + (1/r) d/dr``: ``c r^n -> c n^2 r^(n-2)``."""
    if not isinstance(e, Cylindrical):
        raise VariantError("cylindrical operator needs a Cylindrical expression")
    return Cylindrical({n - 2: n * n * c for n, c in e.coefficients().items() if n != 0})


def planar_laplacian(e: SpatialExpr) -> Planar:
    """``d^2/dx^2 + d^2/dy^2`` on functions of ``x + y``: modes scale by ``-2k^2``."""
    if not isinstance(e, Planar):
        raise VariantError("planar Laplacian needs a Planar expression")
    return Planar({(kind, k): -2 * k * k * c for (kind, k), c in e.coefficients().items() if k != 0})


def planar_derivative(e: SpatialExpr) -> Planar:
    if not isinstance(e, Planar):
        raise VariantError("planar derivative needs a Planar expression")
    return e.derivative()


def planar_convection(
    us: Sequence[Planar], vs: Sequence[Planar], ws: Sequence[Planar], m: int
) -> Planar:
    """``sum_{i<m} (u_i + v_i) * d/dtheta w_{m-1-i}``.

    Because every field depends on ``x + y`` only, ``u w_x + v w_y`` collapses to
    ``(u + v) w_theta``.
    """
    if m < 0:
        raise LengthError(f"order must be non-negative, got {m}")
    if not (len(us) == len(vs) == len(ws)):
        raise LengthError(f"list lengths differ: {len(us)}, {len(vs)}, {len(ws)}")
    if len(us) < m:
        raise LengthError(f"need {m} orders, got {len(us)}")
    total = Planar()
    for e in (*us[:m], *vs[:m], *ws[:m]):
        if not isinstance(e, Planar):
            raise VariantError("planar convection needs Planar expressions")
    for i in range(m):
        total = total + (us[i] + vs[i]).product(ws[m - 1 - i].derivative())
    return total


# ---------------------------------------------------------------------------
# terms and per-order sums


@dataclass(frozen=True)
class SeriesTerm:
    spatial: SpatialExpr
    temporal: TemporalPower = field(default_factory=TemporalPower)

    def is_zero(self) -> bool:
        return self.spatial.is_zero()


def temporal_fractional_integral(term: SeriesTerm, alpha) -> SeriesTerm:
    """Apply ``I^{alpha,psi}``: the normalised exponent advances by one ``alpha``."""
    if not float(alpha) > 0.0:
        raise DomainError(f"order must be positive, got {alpha}")
    if term.is_zero():
        return SeriesTerm(term.spatial, TemporalPower())
    return SeriesTerm(term.spatial, term.temporal.shifted())


class TermSum:
    """Sum of series terms sharing one spatial variant, keyed by temporal exponent."""

    __slots__ = ("variant", "_parts")

    def __init__(self, variant: str, parts: Mapping[TemporalPower, SpatialExpr] | None = None):
        if variant not in ("cylindrical", "planar"):
            raise VariantError(f"unknown variant {variant!r}")
        self.variant = variant
        self._parts: dict[TemporalPower, SpatialExpr] = {}
        for tp, sp in (parts or {}).items():
            if sp.variant != variant:
                raise VariantError(f"{sp.variant} part in a {variant} sum")
            if not sp.is_zero():
                self._parts[tp] = sp

    @classmethod
    def of(cls, spatial: SpatialExpr, temporal: TemporalPower | None = None) -> "TermSum":
        return cls(spatial.variant, {temporal or TemporalPower(): spatial})

    @classmethod
    def zero(cls, variant: str) -> "TermSum":
        return cls(variant)

    @classmethod
    def from_terms(cls, variant: str, terms: Iterable[SeriesTerm]) -> "TermSum":
        out = cls(variant)
        for t in terms:
            out = out + cls(variant, {t.temporal: t.spatial})
        return out

    def _empty_spatial(self) -> SpatialExpr:
        return Cylindrical() if self.variant == "cylindrical" else Planar()

    def _same(self, other: "TermSum") -> None:
        if other.variant != self.variant:
            raise VariantError(f"cannot combine {self.variant} and {other.variant} sums")

    def __add__(self, other: "TermSum") -> "TermSum":
        self._same(other)
        acc = dict(self._parts)
        for tp, sp in other._parts.items():
            acc[tp] = acc[tp] + sp if tp in acc else sp
        return TermSum(self.variant, acc)

    def __neg__(self) -> "TermSum":
        return TermSum(self.variant, {tp: -sp for tp, sp in self._parts.items()})

    def __sub__(self, other: "TermSum") -> "TermSum":
        return self + (-other)

    def __mul__(self, scalar) -> "TermSum":
        if isinstance(scalar, TermSum):
            return NotImplemented
        return TermSum(self.variant, {tp: sp * scalar for tp, sp in self._parts.items()})

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        return isinstance(other, TermSum) and other.variant == self.variant and other._parts == self._parts

    def __hash__(self) -> int:
        return hash((self.variant, frozenset(self._parts.items())))

    def __repr__(self) -> str:
        inner = ", ".join(f"(k={tp.k}, j={tp.j}): {sp!r}" for tp, sp in sorted(self._parts.items()))
        return f"TermSum({self.variant}; {inner})"

    def __iter__(self) -> Iterator[SeriesTerm]:
        return iter(self.terms())

    def terms(self) -> list[SeriesTerm]:
        return [SeriesTerm(sp, tp) for tp, sp in sorted(self._parts.items())]

    def parts(self) -> dict[TemporalPower, SpatialExpr]:
        return dict(self._parts)

    def spatial_at(self, tp: TemporalPower) -> SpatialExpr:
        return self._parts.get(tp, self._empty_spatial())

    def is_zero(self) -> bool:
        return not self._parts

    def map_spatial(self, fn) -> "TermSum":
        return TermSum(self.variant, {tp: fn(sp) for tp, sp in self._parts.items()})

    def integrate(self, alpha) -> "TermSum":
        """Exact ``I^{alpha,psi}`` of the whole sum."""
        out = [temporal_fractional_integral(t, alpha) for t in self.terms()]
        return TermSum.from_terms(self.variant, out)

    def at_terminal(self) -> "TermSum":
        """Value at ``t = a``: only exponent-zero terms survive."""
        return TermSum(self.variant, {tp: sp for tp, sp in self._parts.items() if tp.is_constant})

    def product(self, other: "TermSum", alpha: float) -> "TermSum":
        """Pointwise product of planar sums, re-normalising the temporal powers."""
        self._same(other)
        if self.variant != "planar":
            raise VariantError("products are only defined for planar sums")
        acc: dict[TemporalPower, SpatialExpr] = defaultdict(Planar)
        for tp, sp in self._parts.items():
            for tq, sq in other._parts.items():
                key = tp + tq
                acc[key] = acc[key] + sp.product(sq) * _product_factor(tp, tq, alpha)
        return TermSum(self.variant, acc)

    def max_abs_diff(self, other: "TermSum") -> float:
        self._same(other)
        keys = set(self._parts) | set(other._parts)
        return max((self.spatial_at(k).max_abs_diff(other.spatial_at(k)) for k in keys), default=0.0)

    def max_power(self) -> int:
        return max((tp.k for tp in self._parts), default=0)

    def truncated(self, max_k: int) -> "TermSum":
        return TermSum(self.variant, {tp: sp for tp, sp in self._parts.items() if tp.k <= max_k})

    def evaluate(self, alpha: float, x: float, point) -> float:
        return math.fsum(
            temporal_value(tp, alpha, x) * evaluate_spatial(sp, point) for tp, sp in self._parts.items()
        )

    # -- JSON ---------------------------------------------------------------

    def to_records(self) -> list[dict]:
        rows = []
        for tp, sp in sorted(self._parts.items()):
            if isinstance(sp, Cylindrical):
                for n, c in sorted(sp.coefficients().items()):
                    rows.append({"k": tp.k, "j": tp.j, "basis": "r^n", "n": n, "coefficient": float(c)})
            else:
                for (kind, k), c in sorted(sp.coefficients().items(), key=lambda kv: (kv[0][1], kv[0][0])):
                    basis = "1" if k == 0 else kind
                    rows.append({"k": tp.k, "j": tp.j, "basis": basis, "mode": k, "coefficient": float(c)})
        return rows

    @classmethod
    def from_records(cls, variant: str, rows: Sequence[Mapping]) -> "TermSum":
        acc: dict[TemporalPower, dict] = defaultdict(dict)
        for row in rows:
            tp = TemporalPower(int(row["k"]), int(row.get("j", 0)))
            c = float(row["coefficient"])
            if variant == "cylindrical":
                if row["basis"] != "r^n":
                    raise VariantError(f"basis {row['basis']!r} in a cylindrical series")
                key = int(row["n"])
            else:
                basis = row["basis"]
                if basis == "1":
                    key = ("cos", 0)
                elif basis in ("sin", "cos"):
                    key = (basis, int(row["mode"]))
                else:
                    raise VariantError(f"basis {basis!r} in a planar series")
            acc[tp][key] = acc[tp].get(key, 0.0) + c
        maker = Cylindrical if variant == "cylindrical" else Planar
        return cls(variant, {tp: maker(coeffs) for tp, coeffs in acc.items()})


def evaluate_spatial(sp: SpatialExpr, point) -> float:
    if isinstance(sp, Cylindrical):
        r = point[0] if isinstance(point, (tuple, list)) else point
        return sp.evaluate(float(r))
    x, y = point
    return sp.evaluate(float(x), float(y))


# ---------------------------------------------------------------------------
# whole series


@dataclass
class HamSeries:
    """Per-order sums ``u_0 .. u_M`` (and ``v_0 .. v_M`` for the coupled system)."""

    alpha: float
    variant: str
    u: list[TermSum]
    v: list[TermSum] | None = None

    def __post_init__(self) -> None:
        for s in (*self.u, *(self.v or [])):
            if s.variant != self.variant:
                raise VariantError(f"{s.variant} order in a {self.variant} series")
        if self.v is not None and len(self.v) != len(self.u):
            raise LengthError("u and v order lists differ in length")

    @property
    def coupled(self) -> bool:
        return self.v is not None

    @property
    def M(self) -> int:
        return len(self.u) - 1

    @property
    def orders(self) -> list:
        if self.v is None:
            return list(self.u)
        return list(zip(self.u, self.v))

    def partial_sum(self, orders_used: int | None = None) -> TermSum | tuple[TermSum, TermSum]:
        m = self.M if orders_used is None else orders_used
        if not 0 <= m <= self.M:
            raise LengthError(f"orders_used={m} outside 0..{self.M}")
        u = TermSum.zero(self.variant)
        for s in self.u[: m + 1]:
            u = u + s
        if self.v is None:
            return u
        v = TermSum.zero(self.variant)
        for s in self.v[: m + 1]:
            v = v + s
        return u, v

    def to_json(self) -> dict:
        fields = {"u": [s.to_records() for s in self.u]}
        if self.v is not None:
            fields["v"] = [s.to_records() for s in self.v]
        return {"format": SERIES_FORMAT, "variant": self.variant, "alpha": float(self.alpha), "fields": fields}

    @classmethod
    def from_json(cls, doc: Mapping) -> "HamSeries":
        if doc.get("format") != SERIES_FORMAT:
            raise DomainError(f"unsupported series format {doc.get('format')!r}")
        variant = doc["variant"]
        fields = doc["fields"]
        u = [TermSum.from_records(variant, rows) for rows in fields["u"]]
        v = [TermSum.from_records(variant, rows) for rows in fields["v"]] if "v" in fields else None
        return cls(float(doc["alpha"]), variant, u, v)


def series_eval(s: HamSeries, psi, a: float, point, t: float, orders_used: int | None = None):
    """Numeric value of ``sum_{m <= orders_used} u_m`` (a ``(u, v)`` pair when coupled)."""
    if t < a:
        raise DomainError(f"t={t} precedes a={a}")
    m = s.M if orders_used is None else orders_used
    if not 0 <= m <= s.M:
        raise LengthError(f"orders_used={m} outside 0..{s.M}")
    x = psi.increment(a, t)
    # summing order values avoids rebuilding the merged term sum on every call
    u = math.fsum(part.evaluate(s.alpha, x, point) for part in s.u[: m + 1])
    if s.v is None:
        return u
    return u, math.fsum(part.evaluate(s.alpha, x, point) for part in s.v[: m + 1])

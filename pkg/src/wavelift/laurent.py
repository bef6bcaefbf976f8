"""Sparse Laurent polynomials in one or two variables.

Polynomials model FIR filters with acausal taps. A term ``c * z^k`` stands for
the filter tap at position ``k``: applied to a sequence ``x`` the monomial
``z^k`` produces ``x[n - k]``, so a polynomial acts as an ordinary convolution
whose taps sit at the exponents.

Two coefficient modes exist. *Exact* polynomials hold
:class:`fractions.Fraction` coefficients and are used to prove matrix
identities; *float* polynomials hold Python floats and drive image execution.
A polynomial's mode is fixed at construction and arithmetic between the two
modes is refused.

In two variables the first exponent belongs to the horizontal variable
``z_m`` and the second to the vertical variable ``z_n``.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Integral, Rational, Real
from typing import Iterable, Mapping

__all__ = [
    "CoefficientModeError",
    "ZeroPolynomialError",
    "LaurentPoly",
    "LaurentPoly1",
    "LaurentPoly2",
    "orient",
    "split_scalar",
    "HORIZONTAL",
    "VERTICAL",
]

HORIZONTAL = "horizontal"
VERTICAL = "vertical"


class CoefficientModeError(TypeError):
    """Exact and float coefficients were combined in one expression."""


class ZeroPolynomialError(ValueError):
    """An operation undefined for the zero polynomial was requested."""


def _coerce(value, exact: bool):
    if isinstance(value, bool):
        raise TypeError("bool is not a valid coefficient")
    if exact:
        if isinstance(value, (Integral, Rational)):
            return Fraction(value)
        raise CoefficientModeError(
            f"float coefficient {value!r} in an exact polynomial"
        )
    if isinstance(value, Integral):
        return float(value)
    if isinstance(value, Rational):
        raise CoefficientModeError(
            f"rational coefficient {value!r} in a float polynomial"
        )
    if isinstance(value, Real):
        return float(value)
    raise TypeError(f"unsupported coefficient type {type(value).__name__}")


def _infer_exact(values: Iterable) -> bool:
    for v in values:
        if isinstance(v, float) or (
            isinstance(v, Real) and not isinstance(v, (Integral, Rational))
        ):
            return False
    return True


class LaurentPoly:
    """Immutable sparse Laurent polynomial (shared machinery).

    Subclasses fix the exponent type: :class:`LaurentPoly1` uses ``int``
    exponents, :class:`LaurentPoly2` uses ``(k_m, k_n)`` pairs.
    """

    __slots__ = ("_terms", "_exact", "_hash")

    nvars = 0

    def __init__(self, terms: Mapping | None = None, *, exact: bool | None = None):
        raw = dict(terms or {})
        if exact is None:
            exact = _infer_exact(raw.values())
        clean = {}
        for key, value in raw.items():
            key = self._check_key(key)
            c = _coerce(value, exact)
            if c != 0:
                clean[key] = c
        self._terms = clean
        self._exact = bool(exact)
        self._hash = None

    # -- construction helpers ------------------------------------------------

    @classmethod
    def _from_clean(cls, terms: dict, exact: bool):
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._exact = exact
        obj._hash = None
        return obj

    @classmethod
    def zero(cls, exact: bool = True):
        return cls._from_clean({}, exact)

    @classmethod
    def constant(cls, value, exact: bool | None = None):
        if exact is None:
            exact = _infer_exact([value])
        return cls({cls._zero_key(): value}, exact=exact)

    @classmethod
    def one(cls, exact: bool = True):
        return cls.constant(1, exact=exact)

    @classmethod
    def monomial(cls, exponent, coeff=1, exact: bool | None = None):
        if exact is None:
            exact = _infer_exact([coeff])
        return cls({exponent: coeff}, exact=exact)

    # -- subclass hooks ------------------------------------------------------

    @staticmethod
    def _check_key(key):
        raise NotImplementedError

    @staticmethod
    def _zero_key():
        raise NotImplementedError

    @staticmethod
    def _add_keys(a, b):
        raise NotImplementedError

    # -- basic properties ----------------------------------------------------

    @property
    def exact(self) -> bool:
        return self._exact

    @property
    def terms(self) -> dict:
        """A copy of the exponent -> coefficient map."""
        return dict(self._terms)

    def items(self):
        """Terms in canonical (descending lexicographic) exponent order."""
        return sorted(self._terms.items(), key=lambda kv: kv[0], reverse=True)

    def exponents(self) -> list:
        return [k for k, _ in self.items()]

    def coefficient(self, exponent):
        return self._terms.get(self._check_key(exponent), Fraction(0) if self._exact else 0.0)

    def tap_count(self) -> int:
        """Number of stored nonzero terms."""
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(k == self._zero_key() for k in self._terms)

    def is_one(self) -> bool:
        return self._terms == {self._zero_key(): 1}

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    # -- mode handling -------------------------------------------------------

    def _check_mode(self, other: "LaurentPoly"):
        if type(other) is not type(self):
            raise TypeError(
                f"cannot combine {type(self).__name__} with {type(other).__name__}"
            )
        if other._exact != self._exact:
            raise CoefficientModeError("exact and float polynomials cannot be mixed")

    def to_float(self):
        """The float-mode twin of this polynomial."""
        if not self._exact:
            return self
        return self._from_clean({k: float(v) for k, v in self._terms.items()}, False)

    def to_exact(self):
        """Exact twin; float coefficients are converted without rounding."""
        if self._exact:
            return self
        return self._from_clean({k: Fraction(v) for k, v in self._terms.items()}, True)

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, LaurentPoly):
            if isinstance(other, (Real, Rational)):
                other = self.constant(_coerce(other, self._exact), exact=self._exact)
            else:
                return NotImplemented
        self._check_mode(other)
        out = dict(self._terms)
        for k, v in other._terms.items():
            s = out.get(k, 0) + v
            if s == 0:
                out.pop(k, None)
            else:
                out[k] = s
        return self._from_clean(out, self._exact)

    __radd__ = __add__

    def __neg__(self):
        return self._from_clean({k: -v for k, v in self._terms.items()}, self._exact)

    def __sub__(self, other):
        if isinstance(other, LaurentPoly):
            return self + (-other)
        if isinstance(other, (Real, Rational)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, LaurentPoly):
            self._check_mode(other)
            out: dict = {}
            for ka, va in self._terms.items():
                for kb, vb in other._terms.items():
                    k = self._add_keys(ka, kb)
                    out[k] = out.get(k, 0) + va * vb
            return self._from_clean({k: v for k, v in out.items() if v != 0}, self._exact)
        if isinstance(other, (Real, Rational)) and not isinstance(other, bool):
            c = _coerce(other, self._exact)
            if c == 0:
                return self.zero(self._exact)
            return self._from_clean({k: v * c for k, v in self._terms.items()}, self._exact)
        return NotImplemented

    __rmul__ = __mul__

    # -- comparison ----------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, LaurentPoly):
            return (
                type(other) is type(self)
                and other._exact == self._exact
                and other._terms == self._terms
            )
        if isinstance(other, (Real, Rational)):
            if other == 0:
                return not self._terms
            return self._terms == {self._zero_key(): other}
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((type(self).__name__, self._exact, frozenset(self._terms.items())))
        return self._hash

    def max_abs_difference(self, other) -> float:
        """Largest coefficient-wise absolute difference (mode-agnostic)."""
        keys = set(self._terms) | set(other._terms)
        if not keys:
            return 0.0
        return max(
            abs(float(self._terms.get(k, 0)) - float(other._terms.get(k, 0)))
            for k in keys
        )

    # -- rendering -----------------------------------------------------------

    @staticmethod
    def _fmt_coeff(c) -> str:
        if isinstance(c, Fraction):
            return str(c)
        return repr(c)

    def __str__(self):
        if not self._terms:
            return "0"
        return " + ".join(self._fmt_term(k, v) for k, v in self.items())

    def __repr__(self):
        mode = "exact" if self._exact else "float"
        return f"{type(self).__name__}({self}, {mode})"


class LaurentPoly1(LaurentPoly):
    """Univariate Laurent polynomial ``sum_k c_k z^k``."""

    __slots__ = ()
    nvars = 1

    @staticmethod
    def _check_key(key):
        if isinstance(key, bool) or not isinstance(key, Integral):
            raise TypeError(f"exponent must be an int, got {key!r}")
        return int(key)

    @staticmethod
    def _zero_key():
        return 0

    @staticmethod
    def _add_keys(a, b):
        return a + b

    def _fmt_term(self, k, v):
        return f"{self._fmt_coeff(v)}*z^{k}"

    def degree(self) -> int:
        """Exponent spread ``max - min``; undefined for the zero polynomial."""
        if not self._terms:
            raise ZeroPolynomialError("degree of the zero polynomial is undefined")
        return max(self._terms) - min(self._terms)

    def min_exponent(self) -> int:
        if not self._terms:
            raise ZeroPolynomialError("zero polynomial has no exponents")
        return min(self._terms)

    def max_exponent(self) -> int:
        if not self._terms:
            raise ZeroPolynomialError("zero polynomial has no exponents")
        return max(self._terms)

    def __call__(self, z):
        return sum(v * z ** k for k, v in self._terms.items())

    def substitute_power(self, factor: int) -> "LaurentPoly1":
        """Return ``p(z^factor)``."""
        return self._from_clean({k * factor: v for k, v in self._terms.items()}, self._exact)

    def reflect(self) -> "LaurentPoly1":
        """Return ``p(1/z)``."""
        return self.substitute_power(-1)


class LaurentPoly2(LaurentPoly):
    """Bivariate Laurent polynomial ``sum c_(a,b) z_m^a z_n^b``."""

    __slots__ = ()
    nvars = 2

    @staticmethod
    def _check_key(key):
        try:
            a, b = key
        except (TypeError, ValueError):
            raise TypeError(f"exponent must be an (int, int) pair, got {key!r}") from None
        if any(isinstance(x, bool) or not isinstance(x, Integral) for x in (a, b)):
            raise TypeError(f"exponent must be an (int, int) pair, got {key!r}")
        return (int(a), int(b))

    @staticmethod
    def _zero_key():
        return (0, 0)

    @staticmethod
    def _add_keys(a, b):
        return (a[0] + b[0], a[1] + b[1])

    def _fmt_term(self, k, v):
        return f"{self._fmt_coeff(v)}*z_m^{k[0]}*z_n^{k[1]}"

    def transpose(self) -> "LaurentPoly2":
        """Swap the horizontal and vertical variables."""
        return self._from_clean({(b, a): v for (a, b), v in self._terms.items()}, self._exact)

    def max_shift(self) -> int:
        """Largest absolute exponent over both axes (0 for the zero polynomial)."""
        return max((max(abs(a), abs(b)) for a, b in self._terms), default=0)

    def nonlocal_exponents(self) -> set:
        return {k for k in self._terms if k != (0, 0)}

    def __call__(self, zm, zn):
        return sum(v * zm ** a * zn ** b for (a, b), v in self._terms.items())


def orient(poly: LaurentPoly1, axis: str) -> LaurentPoly2:
    """Embed a 1-D filter along the horizontal (``z_m``) or vertical (``z_n``) axis."""
    if axis == HORIZONTAL:
        terms = {(k, 0): v for k, v in poly._terms.items()}
    elif axis == VERTICAL:
        terms = {(0, k): v for k, v in poly._terms.items()}
    else:
        raise ValueError(f"axis must be {HORIZONTAL!r} or {VERTICAL!r}, got {axis!r}")
    return LaurentPoly2._from_clean(terms, poly.exact)


def split_scalar(poly: LaurentPoly1) -> tuple[LaurentPoly1, LaurentPoly1]:
    """Split ``poly`` into its exponent-0 term and the remainder.

    The first part touches only a thread's own coefficients; the remainder is
    what reaches into neighbouring positions.
    """
    terms = poly.terms
    scalar = {0: terms.pop(0)} if 0 in terms else {}
    return (
        LaurentPoly1._from_clean(scalar, poly.exact),
        LaurentPoly1._from_clean(terms, poly.exact),
    )

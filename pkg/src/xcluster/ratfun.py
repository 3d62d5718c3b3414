"""Exact multivariate polynomial and rational-function arithmetic.

Every identity checked by this package is an equality of rational functions
with integer (or at worst rational) coefficients, so the whole substrate is
exact -- no floating point anywhere.

Representation choices:

* ``Polynomial`` is a sparse integer-coefficient polynomial: a dict from
  exponent tuples to nonzero ``int`` coefficients plus the tuple of variable
  names the exponent positions refer to.  The variable tuple is sorted and
  contains only variables that actually occur, so equal polynomials have a
  unique representation; instances are immutable by convention and hashable.
* ``RationalFunction`` is a reduced fraction ``num/den`` of polynomials with
  ``den != 0``, ``gcd(num, den) == 1`` (including integer content) and the
  leading coefficient of ``den`` positive in graded-lex order.  Equality is
  therefore structural.
* ``FactorProduct`` is an internal factored form ``c * prod p_i^(e_i)`` used
  to push long chains of birational substitutions through without any gcd
  computation; the single nontrivial operation it needs is ``1 + f``.

The polynomial gcd is a primitive polynomial-remainder-sequence gcd recursing
on one variable at a time; every result is verified by exact trial division
before being returned, so a bug there can only crash loudly, never produce a
wrong canonical form.
"""

from __future__ import annotations

import math
import random
import re
from fractions import Fraction

__all__ = [
    "Polynomial",
    "RationalFunction",
    "FactorProduct",
    "poly_gcd",
    "equals",
    "substitute",
    "partial_log_derivative",
    "parse",
]


def _grlex(e):
    return (sum(e), e)


class Polynomial:
    """Sparse multivariate polynomial with integer coefficients."""

    __slots__ = ("vars", "terms", "_hash")

    def __init__(self, vars, terms):
        # Normalise: drop zero coefficients and unused variables so that the
        # representation (and hence __eq__/__hash__) is canonical.
        vars = tuple(vars)
        if list(vars) != sorted(vars):
            order = sorted(range(len(vars)), key=lambda i: vars[i])
            terms = {tuple(e[i] for i in order): c for e, c in terms.items()}
            vars = tuple(sorted(vars))
        if len(set(vars)) != len(vars):
            raise ValueError(f"duplicate variable in {vars}")
        terms = {e: c for e, c in terms.items() if c}
        if terms and any(not any(e[i] for e in terms) for i in range(len(vars))):
            used = [i for i in range(len(vars)) if any(e[i] for e in terms)]
            vars = tuple(vars[i] for i in used)
            terms = {tuple(e[i] for i in used): c for e, c in terms.items()}
        if not terms:
            vars = ()
        object.__setattr__(self, "vars", tuple(vars))
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):  # pragma: no cover - guard rail
        raise AttributeError("Polynomial is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def const(cls, c):
        c = int(c)
        return cls((), {(): c} if c else {})

    @classmethod
    def variable(cls, name):
        if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", name):
            raise ValueError(f"not a valid variable name: {name!r}")
        return cls((name,), {(1,): 1})

    # -- basic queries -----------------------------------------------------

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return not self.vars

    def constant_value(self):
        if self.vars:
            raise ValueError(f"not a constant: {self}")
        return self.terms.get((), 0)

    def degree(self):
        """Total degree (-1 for the zero polynomial)."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree_in(self, v):
        if v not in self.vars:
            return 0
        i = self.vars.index(v)
        return max(e[i] for e in self.terms)

    def leading(self):
        """(exponent, coefficient) of the graded-lex leading term."""
        e = max(self.terms, key=_grlex)
        return e, self.terms[e]

    def content(self):
        """Positive gcd of the coefficients (0 for the zero polynomial)."""
        g = 0
        for c in self.terms.values():
            g = math.gcd(g, c)
            if g == 1:
                break
        return g

    def sign_normalized(self):
        """self negated if its graded-lex leading coefficient is negative."""
        if self.terms and self.leading()[1] < 0:
            return -self
        return self

    # -- arithmetic --------------------------------------------------------

    @staticmethod
    def _align(a, b):
        if a.vars == b.vars:
            return a.vars, a.terms, b.terms
        vars = tuple(sorted(set(a.vars) | set(b.vars)))
        return vars, a._remap(vars), b._remap(vars)

    def _remap(self, vars):
        pos = {v: i for i, v in enumerate(vars)}
        n = len(vars)
        out = {}
        for e, c in self.terms.items():
            ne = [0] * n
            for i, v in enumerate(self.vars):
                ne[pos[v]] = e[i]
            out[tuple(ne)] = c
        return out

    def __add__(self, other):
        if isinstance(other, int):
            other = Polynomial.const(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        vars, ta, tb = Polynomial._align(self, other)
        out = dict(ta)
        for e, c in tb.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Polynomial(vars, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, int):
            other = Polynomial.const(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            if other == 0:
                return Polynomial.const(0)
            return Polynomial(self.vars, {e: c * other for e, c in self.terms.items()})
        if not isinstance(other, Polynomial):
            return NotImplemented
        vars, ta, tb = Polynomial._align(self, other)
        out = {}
        for ea, ca in ta.items():
            for eb, cb in tb.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                s = out.get(e, 0) + ca * cb
                if s:
                    out[e] = s
                else:
                    del out[e]
        return Polynomial(vars, out)

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("Polynomial power wants a nonnegative int")
        result = Polynomial.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def divide_exact(self, other):
        """Exact quotient self/other over the integers, or None.

        Graded-lex leading-term division: if the division fails at any step
        (exponent or integer-coefficient non-divisibility), self is not an
        integer-polynomial multiple of other.
        """
        if not isinstance(other, Polynomial):
            raise TypeError("divide_exact wants a Polynomial")
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        if self.is_zero():
            return Polynomial.const(0)
        vars, ta, tb = Polynomial._align(self, other)
        ble = max(tb, key=_grlex)
        blc = tb[ble]
        rem = dict(ta)
        quot = {}
        while rem:
            rle = max(rem, key=_grlex)
            rlc = rem[rle]
            qe = tuple(x - y for x, y in zip(rle, ble))
            if any(k < 0 for k in qe) or rlc % blc:
                return None
            qc = rlc // blc
            quot[qe] = qc
            for eb, cb in tb.items():
                e = tuple(x + y for x, y in zip(qe, eb))
                s = rem.get(e, 0) - qc * cb
                if s:
                    rem[e] = s
                else:
                    rem.pop(e, None)
        return Polynomial(vars, quot)

    # -- evaluation --------------------------------------------------------

    def evaluate(self, point):
        """Exact value at a dict var -> Fraction/int."""
        total = Fraction(0)
        vals = {}
        for v in self.vars:
            if v not in point:
                raise KeyError(f"no value for variable {v!r}")
            vals[v] = Fraction(point[v])
        for e, c in self.terms.items():
            term = Fraction(c)
            for v, k in zip(self.vars, e):
                if k:
                    term *= vals[v] ** k
            total += term
        return total

    # -- comparisons / hashing / formatting --------------------------------

    def __eq__(self, other):
        if isinstance(other, int):
            return self.is_constant() and self.constant_value() == other
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.vars == other.vars and self.terms == other.terms

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((self.vars, tuple(sorted(self.terms.items()))))
            object.__setattr__(self, "_hash", h)
        return h

    def __str__(self):
        if not self.terms:
            return "0"
        items = sorted(self.terms.items(), key=lambda kv: _grlex(kv[0]), reverse=True)
        chunks = []
        for e, c in items:
            mono = "*".join(
                f"{v}^{k}" if k > 1 else v for v, k in zip(self.vars, e) if k
            )
            if not mono:
                body = str(abs(c))
            elif abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}*{mono}"
            chunks.append(("-" if c < 0 else "+", body))
        sign, body = chunks[0]
        out = ("-" + body) if sign == "-" else body
        for sign, body in chunks[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"Polynomial({self})"


_P_ZERO = Polynomial.const(0)
_P_ONE = Polynomial.const(1)


# -- gcd -------------------------------------------------------------------


def poly_gcd(a, b):
    """Greatest common divisor over Z, sign-normalised (positive leading
    coefficient).  Verified by trial division before being returned.

    >>> x, y = Polynomial.variable("x"), Polynomial.variable("y")
    >>> print(poly_gcd((x + y) * (x - y), (x + y) * x * 2))
    x + y
    """
    if a.is_zero():
        return b.sign_normalized()
    if b.is_zero():
        return a.sign_normalized()
    ca, cb = a.content(), b.content()
    c = math.gcd(ca, cb)
    pa = a.divide_exact(Polynomial.const(ca))
    pb = b.divide_exact(Polynomial.const(cb))
    g = _gcd_primitive(pa.sign_normalized(), pb.sign_normalized())
    g = (g * c).sign_normalized()
    if a.divide_exact(g) is None or b.divide_exact(g) is None:  # pragma: no cover
        raise AssertionError(f"gcd self-check failed on {a} , {b}")
    return g


_WITNESS_PRIME = (1 << 61) - 1  # Mersenne prime; coefficients survive mod p


def _eval_univar_mod(p, v, point, prime):
    """Image of p in F_prime[v]: substitute point[] for the other variables.

    Returned as a dict exponent-of-v -> residue with zeros dropped, so an
    empty dict means the whole polynomial vanished at the point.
    """
    iv = p.vars.index(v) if v in p.vars else -1
    pows = []
    for i, name in enumerate(p.vars):
        if i == iv:
            pows.append(None)
            continue
        x = point[name] % prime
        tab = [1] * (max(e[i] for e in p.terms) + 1)
        for k in range(1, len(tab)):
            tab[k] = tab[k - 1] * x % prime
        pows.append(tab)
    out = {}
    for e, c in p.terms.items():
        val = c % prime
        k = 0
        for i, ei in enumerate(e):
            if i == iv:
                k = ei
            elif ei:
                val = val * pows[i][ei] % prime
        out[k] = (out.get(k, 0) + val) % prime
    return {k: c for k, c in out.items() if c}


def _gcd_degree_mod(fa, fb, prime):
    """Degree of gcd(fa, fb) over F_prime (inputs nonzero exponent dicts)."""

    def tolist(f):
        out = [0] * (max(f) + 1)
        for k, c in f.items():
            out[k] = c
        return out

    x, y = tolist(fa), tolist(fb)
    while y:
        dy = len(y) - 1
        inv = pow(y[-1], prime - 2, prime)
        r = x
        while len(r) - 1 >= dy:
            q = r[-1] * inv % prime
            off = len(r) - 1 - dy
            for i, c in enumerate(y):
                if c:
                    r[off + i] = (r[off + i] - q * c) % prime
            r.pop()  # leading coefficient is now exactly zero
            while r and r[-1] == 0:
                r.pop()
        x, y = y, r
    return len(x) - 1


def _modular_coprime_witness(a, b, common):
    """True only when gcd(a, b) is provably 1; False means inconclusive.

    For each variable v the two polynomials share, specialise every other
    variable at a random point modulo a large prime.  If the image of `a`
    keeps its v-degree, the image of gcd(a, b) keeps its v-degree too (the
    factor degrees of a's image add up), so a constant gcd of the images
    forces the true gcd to have v-degree zero.  Variables of the gcd are
    shared by both inputs, so degree zero in all of them leaves an integer,
    and an integer gcd of content-free inputs is 1.  Any failed certificate
    falls back to the exact remainder-sequence computation.
    """
    names = sorted(set(a.vars) | set(b.vars))
    rng = random.Random(0x1CEB00DA)
    for v in common:
        deg_a = a.degree_in(v)
        ok = False
        for _ in range(3):
            point = {n: rng.randrange(1, _WITNESS_PRIME) for n in names if n != v}
            fa = _eval_univar_mod(a, v, point, _WITNESS_PRIME)
            if not fa or max(fa) != deg_a:
                continue  # unlucky point: a's leading coefficient vanished
            fb = _eval_univar_mod(b, v, point, _WITNESS_PRIME)
            if not fb:
                continue
            if _gcd_degree_mod(fa, fb, _WITNESS_PRIME) == 0:
                ok = True
                break
            # A positive-degree modular gcd at a degree-preserving point is
            # what a genuine common factor looks like: stop guessing here.
            return False
        if not ok:
            return False
    return True


def _gcd_primitive(a, b):
    """gcd of two nonzero integer-content-free polynomials."""
    if a.is_constant() or b.is_constant():
        return _P_ONE
    if a == b:
        return a
    common = sorted(set(a.vars) & set(b.vars))
    if not common:
        return _P_ONE
    if _modular_coprime_witness(a, b, common):
        return _P_ONE
    if b.divide_exact(a) is not None:
        return a
    if a.divide_exact(b) is not None:
        return b
    v = min(common, key=lambda u: max(a.degree_in(u), b.degree_in(u)))
    ca, ua = _univar_primitive(a, v)
    cb, ub = _univar_primitive(b, v)
    gcont = poly_gcd(ca, cb)
    x, y = ua, ub
    if max(x) < max(y):
        x, y = y, x
    res = _subresultant_prs(x, y)
    g = _from_univar(_univar_primitive_coeffs(res), v)
    cg = g.content()
    if cg > 1:
        g = g.divide_exact(Polynomial.const(cg))
    return (gcont * g).sign_normalized()


def _subresultant_prs(x, y):
    """Last nonzero member of a polynomial remainder sequence, up to content.

    Remainders are deflated by the subresultant divisors g*h^delta when that
    division is exact, and by their own coefficient content otherwise; either
    way each member stays an associate-up-to-content of the true remainder,
    which is all the final content extraction needs.
    """
    g = h = _P_ONE
    while True:
        delta = max(x) - max(y)
        r = _pseudo_rem(x, y)
        if not r:
            return y
        divisor = g * h**delta
        if not divisor.is_constant() or abs(divisor.constant_value()) != 1:
            dr = {k: c.divide_exact(divisor) for k, c in r.items()}
            if all(c is not None for c in dr.values()):
                r = {k: c for k, c in dr.items() if not c.is_zero()}
            else:
                r = _univar_primitive_coeffs(r)
        if max(r) == 0:
            # A nonzero constant (in the main variable) remainder: coprime.
            return {0: _P_ONE}
        x, y = y, r
        g = x[max(x)]
        if delta == 1:
            h = g
        elif delta > 1:
            hd = (g**delta).divide_exact(h ** (delta - 1))
            # On the rare failure the next deflation simply falls back to
            # content stripping, so any choice of h stays sound.
            h = hd if hd is not None else g



def _to_univar(p, v):
    """p as dict exponent-of-v -> Polynomial in the remaining variables."""
    i = p.vars.index(v)
    rest = p.vars[:i] + p.vars[i + 1 :]
    buckets = {}
    for e, c in p.terms.items():
        k = e[i]
        re_ = e[:i] + e[i + 1 :]
        buckets.setdefault(k, {})[re_] = c
    return {k: Polynomial(rest, t) for k, t in buckets.items()}


def _from_univar(u, v):
    out = _P_ZERO
    xv = Polynomial.variable(v)
    for k, coeff in u.items():
        out = out + coeff * xv**k
    return out


def _univar_primitive(p, v):
    """(content, primitive coefficients) of p viewed as univariate in v."""
    u = _to_univar(p, v)
    cont = _P_ZERO
    for coeff in u.values():
        cont = poly_gcd(cont, coeff)
        if cont == _P_ONE:
            break
    if cont == _P_ONE:
        return cont, u
    return cont, {k: coeff.divide_exact(cont) for k, coeff in u.items()}


def _univar_primitive_coeffs(u):
    cont = _P_ZERO
    for coeff in u.values():
        cont = poly_gcd(cont, coeff)
        if cont == _P_ONE:
            return u
    return {k: coeff.divide_exact(cont) for k, coeff in u.items()}


def _pseudo_rem(a, b):
    """Pseudo-remainder of univariate-with-polynomial-coefficients dicts."""
    db = max(b)
    lb = b[db]
    r = dict(a)
    while r and (dr := max(r)) >= db:
        lr = r[dr]
        nr = {k: c * lb for k, c in r.items()}
        for k, c in b.items():
            kk = k + dr - db
            s = nr.get(kk, _P_ZERO) - c * lr
            if s.is_zero():
                nr.pop(kk, None)
            else:
                nr[kk] = s
        r = nr
    return r


# -- rational functions ------------------------------------------------------


def _coerce_poly(x):
    if isinstance(x, Polynomial):
        return x
    if isinstance(x, int):
        return Polynomial.const(x)
    raise TypeError(f"cannot use {type(x).__name__} as a polynomial")


class RationalFunction:
    """Reduced fraction of integer polynomials.

    >>> f = parse("(1 + x*y) / x")
    >>> print(f + 1)
    (x*y + x + 1)/(x)
    >>> print(f.substitute({"x": parse("1/y")}))
    2*y
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=1, *, _reduced=False):
        num = _coerce_poly(num)
        den = _coerce_poly(den)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if not _reduced:
            if num.is_zero():
                num, den = _P_ZERO, _P_ONE
            else:
                g = poly_gcd(num, den)
                num = num.divide_exact(g)
                den = den.divide_exact(g)
                if den.leading()[1] < 0:
                    num, den = -num, -den
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):  # pragma: no cover - guard rail
        raise AttributeError("RationalFunction is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def var(cls, name):
        return cls(Polynomial.variable(name), _P_ONE, _reduced=True)

    @classmethod
    def from_fraction(cls, q):
        q = Fraction(q)
        return cls(
            Polynomial.const(q.numerator), Polynomial.const(q.denominator), _reduced=True
        )

    @classmethod
    def zero(cls):
        return cls(_P_ZERO, _P_ONE, _reduced=True)

    @classmethod
    def one(cls):
        return cls(_P_ONE, _P_ONE, _reduced=True)

    # -- queries -----------------------------------------------------------

    def is_zero(self):
        return self.num.is_zero()

    def is_one(self):
        return self.num == _P_ONE and self.den == _P_ONE

    def variables(self):
        return tuple(sorted(set(self.num.vars) | set(self.den.vars)))

    def is_positive_form(self):
        """True if both num and den have only positive coefficients (a
        sufficient certificate for positivity on the positive orthant)."""
        return all(c > 0 for c in self.num.terms.values()) and all(
            c > 0 for c in self.den.terms.values()
        )

    # -- arithmetic --------------------------------------------------------

    @staticmethod
    def _coerce(x):
        if isinstance(x, RationalFunction):
            return x
        if isinstance(x, Polynomial):
            return RationalFunction(x, _P_ONE, _reduced=True)
        if isinstance(x, int):
            return RationalFunction(Polynomial.const(x), _P_ONE, _reduced=True)
        if isinstance(x, Fraction):
            return RationalFunction.from_fraction(x)
        return None

    def __add__(self, other):
        other = RationalFunction._coerce(other)
        if other is None:
            return NotImplemented
        return RationalFunction(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, _reduced=True)

    def __sub__(self, other):
        other = RationalFunction._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = RationalFunction._coerce(other)
        if other is None:
            return NotImplemented
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = RationalFunction._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inv()

    def __rtruediv__(self, other):
        return RationalFunction._coerce(other) * self.inv()

    def inv(self):
        if self.is_zero():
            raise ZeroDivisionError("inverting the zero rational function")
        num, den = self.den, self.num
        if den.leading()[1] < 0:
            num, den = -num, -den
        return RationalFunction(num, den, _reduced=True)

    def __pow__(self, n):
        if not isinstance(n, int):
            raise ValueError("RationalFunction power wants an int")
        if n < 0:
            return self.inv() ** (-n)
        return RationalFunction(self.num**n, self.den**n, _reduced=True)

    # -- substitution / derivation / evaluation -----------------------------

    def substitute(self, assignment):
        """Substitute rational functions for variables (missing variables are
        left alone).  Raises ZeroDivisionError if the substituted denominator
        vanishes identically."""
        assignment = {
            v: RationalFunction._coerce(g) for v, g in assignment.items()
        }
        n = _poly_substitute(self.num, assignment)
        d = _poly_substitute(self.den, assignment)
        if d.is_zero():
            raise ZeroDivisionError("substitution makes the denominator vanish")
        return n / d

    def partial_log_derivative(self, v):
        """x_v * d(self)/dx_v, exactly."""
        ln = _log_diff(self.num, v)
        ld = _log_diff(self.den, v)
        return RationalFunction(
            ln * self.den - self.num * ld, self.den * self.den
        )

    def evaluate(self, point):
        d = self.den.evaluate(point)
        if d == 0:
            raise ZeroDivisionError(f"denominator vanishes at {point}")
        return self.num.evaluate(point) / d

    # -- comparisons / formatting -------------------------------------------

    def __eq__(self, other):
        other = RationalFunction._coerce(other)
        if other is None:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __str__(self):
        if self.den == _P_ONE:
            return str(self.num)
        return f"({self.num})/({self.den})"

    def __repr__(self):
        return f"RationalFunction({self})"


def _poly_substitute(p, assignment):
    """Polynomial -> RationalFunction under var -> RationalFunction."""
    values = {}
    for v in p.vars:
        values[v] = assignment.get(v)
        if values[v] is None:
            values[v] = RationalFunction.var(v)
    # Per-variable power cache keeps repeated exponents cheap.
    cache = {v: {0: RationalFunction.one()} for v in p.vars}

    def power(v, k):
        c = cache[v]
        if k not in c:
            c[k] = values[v] ** k
        return c[k]

    total = RationalFunction.zero()
    for e, c in p.terms.items():
        term = RationalFunction._coerce(c)
        for v, k in zip(p.vars, e):
            if k:
                term = term * power(v, k)
        total = total + term
    return total


def _log_diff(p, v):
    """x_v * dp/dx_v -- monomial-preserving, so no alignment work."""
    if v not in p.vars:
        return _P_ZERO
    i = p.vars.index(v)
    return Polynomial(p.vars, {e: c * e[i] for e, c in p.terms.items() if e[i]})


# -- spec-facing helper functions -------------------------------------------


def equals(f, g):
    """Semantic equality by cross-multiplication (independent of reduction)."""
    f = RationalFunction._coerce(f)
    g = RationalFunction._coerce(g)
    return f.num * g.den == g.num * f.den


def substitute(f, assignment):
    return RationalFunction._coerce(f).substitute(assignment)


def partial_log_derivative(f, v):
    return RationalFunction._coerce(f).partial_log_derivative(v)


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>\*\*|[-+*/^()]))"
)


class _Parser:
    def __init__(self, text):
        self.tokens = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if m is None or m.end() == pos:
                if text[pos:].strip():
                    raise ValueError(f"cannot tokenise {text[pos:]!r}")
                break
            pos = m.end()
            if m.lastgroup == "op" and m.group("op") == "**":
                self.tokens.append("^")
            else:
                self.tokens.append(m.group(m.lastgroup))
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self):
        t = self.peek()
        self.i += 1
        return t

    def expect(self, t):
        got = self.next()
        if got != t:
            raise ValueError(f"expected {t!r}, got {got!r}")

    def parse_expr(self):
        out = self.parse_term()
        while self.peek() in ("+", "-"):
            op = self.next()
            rhs = self.parse_term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def parse_term(self):
        out = self.parse_factor()
        while self.peek() in ("*", "/"):
            op = self.next()
            rhs = self.parse_factor()
            out = out * rhs if op == "*" else out / rhs
        return out

    def parse_factor(self):
        if self.peek() == "-":
            self.next()
            return -self.parse_factor()
        atom = self.parse_atom()
        if self.peek() == "^":
            self.next()
            neg = False
            if self.peek() == "-":
                self.next()
                neg = True
            t = self.next()
            if t is None or not t.isdigit():
                raise ValueError(f"expected integer exponent, got {t!r}")
            n = int(t)
            atom = atom ** (-n if neg else n)
        return atom

    def parse_atom(self):
        t = self.next()
        if t is None:
            raise ValueError("unexpected end of expression")
        if t == "(":
            out = self.parse_expr()
            self.expect(")")
            return out
        if t.isdigit():
            return RationalFunction._coerce(int(t))
        if re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", t):
            return RationalFunction.var(t)
        raise ValueError(f"unexpected token {t!r}")


def parse(text):
    """Parse an expression in +, -, *, /, ^ (or **), integers, variables.

    Round-trips with str():  parse(str(f)) == f.

    >>> print(parse("x^2 - (1 + y)/x"))
    (x^3 - y - 1)/(x)
    """
    p = _Parser(text)
    out = p.parse_expr()
    if p.peek() is not None:
        raise ValueError(f"trailing input starting at {p.peek()!r}")
    return out


# -- factored products --------------------------------------------------------


class FactorProduct:
    """Internal factored form c * prod p_i^(e_i) for fast composition.

    The factors are sign-normalised primitive nonconstant polynomials; c is a
    Fraction.  Multiplication, inversion and powers are dictionary arithmetic.
    ``one_plus`` -- the only operation a coordinate mutation needs beyond
    those -- expands just the affected numerator/denominator pair and tracks
    the new factor unexpanded, so no gcd runs during composition.
    """

    __slots__ = ("coeff", "factors")

    def __init__(self, coeff, factors):
        object.__setattr__(self, "coeff", Fraction(coeff))
        object.__setattr__(self, "factors", dict(factors) if coeff else {})

    def __setattr__(self, name, value):  # pragma: no cover - guard rail
        raise AttributeError("FactorProduct is immutable")

    @classmethod
    def one(cls):
        return cls(Fraction(1), {})

    @classmethod
    def from_var(cls, name):
        return cls(Fraction(1), {Polynomial.variable(name): 1})

    @classmethod
    def from_rf(cls, f):
        f = RationalFunction._coerce(f)
        if f.is_zero():
            return cls(Fraction(0), {})
        cn = f.num.content()
        n = f.num.divide_exact(Polynomial.const(cn))
        if n.leading()[1] < 0:
            n, cn = -n, -cn
        cd = f.den.content()
        d = f.den.divide_exact(Polynomial.const(cd))
        factors = {}
        if not n.is_constant():
            factors[n] = 1
        if not d.is_constant():
            factors[d] = factors.get(d, 0) - 1
            if not factors[d]:
                del factors[d]
        return cls(Fraction(cn, cd), factors)

    def is_zero(self):
        return not self.coeff

    def __mul__(self, other):
        if not isinstance(other, FactorProduct):
            return NotImplemented
        if not self.coeff or not other.coeff:
            return FactorProduct(Fraction(0), {})
        factors = dict(self.factors)
        for p, e in other.factors.items():
            ne = factors.get(p, 0) + e
            if ne:
                factors[p] = ne
            else:
                del factors[p]
        return FactorProduct(self.coeff * other.coeff, factors)

    def inv(self):
        if not self.coeff:
            raise ZeroDivisionError("inverting a zero FactorProduct")
        return FactorProduct(1 / self.coeff, {p: -e for p, e in self.factors.items()})

    def __pow__(self, n):
        if not isinstance(n, int):
            raise ValueError("FactorProduct power wants an int")
        if n == 0:
            return FactorProduct.one()
        if not self.coeff:
            if n < 0:
                raise ZeroDivisionError("negative power of zero")
            return self
        return FactorProduct(self.coeff**n, {p: e * n for p, e in self.factors.items()})

    def one_plus(self):
        """1 + self, still in factored form: expand c*N/D once into
        S = c_den*D + c_num*N and keep S as a single new factor over D."""
        num = Polynomial.const(self.coeff.numerator)
        den = Polynomial.const(self.coeff.denominator)
        neg = {}
        for p, e in self.factors.items():
            if e > 0:
                num = num * p**e
            else:
                den = den * p**-e
                neg[p] = e
        s = num + den
        if s.is_zero():
            return FactorProduct(Fraction(0), {})
        cs = s.content()
        s = s.divide_exact(Polynomial.const(cs))
        if s.leading()[1] < 0:
            s, cs = -s, -cs
        factors = dict(neg)
        if not s.is_constant():
            factors[s] = factors.get(s, 0) + 1
            if not factors[s]:
                del factors[s]
        else:
            cs *= s.constant_value()
        return FactorProduct(Fraction(cs, self.coeff.denominator), factors)

    def to_rf(self):
        """Expand to a canonical RationalFunction.

        Cancels factors pairwise first (cheap gcds of the small tracked
        factors), so once every numerator factor is coprime to every
        denominator factor the expanded fraction is in lowest terms by
        construction and no gcd of the big products ever runs.
        """
        if not self.coeff:
            return RationalFunction.zero()
        state = [Fraction(self.coeff)]
        num, den = {}, {}
        for p, e in self.factors.items():
            (num if e > 0 else den)[p] = abs(e)
        again = True
        while again:
            again = False
            for p in list(num):
                if p not in num:
                    continue
                for q in list(den):
                    if q not in den or p not in num:
                        continue
                    g = poly_gcd(p, q)
                    if g.is_constant():
                        continue
                    ep, eq = num.pop(p), den.pop(q)
                    _fp_acc(num, p.divide_exact(g), ep, state)
                    _fp_acc(den, q.divide_exact(g), eq, state)
                    if ep > eq:
                        _fp_acc(num, g, ep - eq, state)
                    elif eq > ep:
                        _fp_acc(den, g, eq - ep, state)
                    again = True
        n = Polynomial.const(state[0].numerator)
        d = Polynomial.const(state[0].denominator)
        for p, e in num.items():
            n = n * p**e
        for q, e in den.items():
            d = d * q**e
        return RationalFunction(n, d, _reduced=True)

    def __repr__(self):
        bits = [str(self.coeff)]
        for p, e in self.factors.items():
            bits.append(f"({p})^{e}")
        return "FactorProduct(" + " * ".join(bits) + ")"


def _fp_acc(table, poly, count, state):
    """Fold a primitive factor into a factor table, normalising sign into
    the running Fraction (state[0] *= (-1)^count for a negative leader)."""
    if count == 0:
        return
    if poly.leading()[1] < 0:
        poly = -poly
        if count % 2:
            state[0] = -state[0]
    if poly.is_constant():
        # A primitive constant is 1 after sign normalisation.
        return
    total = table.get(poly, 0) + count
    if total:
        table[poly] = total
    else:
        del table[poly]


if __name__ == "__main__":  # pragma: no cover
    import doctest

    doctest.testmod()

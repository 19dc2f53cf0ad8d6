"""
Exact operator algebra over the canonical pairs (x1, p1), (x2, p2).

Elements are finite sums of normal ordered monomials

    coeff * pinv2^s * x1^a * x2^c * p1^b * p2^d

where pinv2 is the inverse of p^2 = p1^2 + p2^2, s, a, b, d are naturals and c may be any
integer. Coefficients are polynomials in the formal symbol k over the Gaussian rationals,
so every identity verified here holds for all k at once.

Normal ordering uses the rewrite

    p^b x^a = sum_j C(b, j) (-i)^j a(a-1)...(a-j+1) x^(a-j) p^(b-j)

valid for every integer a, since the sum stops at j = b. pinv2 only ever sits on the left of a
monomial, so it may be multiplied from the left only by momentum-only factors which commute
with it. Everything else raises OrderingViolation.

All values are immutable after construction.

Useful Documentation
--------------------
Poly and domains:
    https://docs.sympy.org/latest/modules/polys/reference.html
Gaussian domains:
    https://docs.sympy.org/latest/modules/polys/domainsref.html#qq-i
"""
import fractions
import functools
import logging
import math

import sympy

import hdl.exc

K = sympy.Symbol('k', real=True)
DOMAIN = sympy.QQ_I
ATOM_NAMES = ('pinv2', 'x1', 'x2', 'p1', 'p2')


@functools.lru_cache(maxsize=1024)
def coeff_poly(value):
    """
    Coefficient ring element for a sympy number or expression in k.
    """
    return sympy.Poly(value, K, domain=DOMAIN)


def to_coeff(value):
    """
    Convert int, Fraction, str, sympy number/expr or Poly into a coefficient Poly.
    """
    if isinstance(value, sympy.Poly):
        return value
    if isinstance(value, (str, float)):
        value = sympy.Rational(str(value))

    return coeff_poly(sympy.sympify(value))


@functools.lru_cache(maxsize=4096)
def commute_factor(b, a, j):
    """
    Coefficient of x^(a-j) p^(b-j) when p^b is moved right of x^a.
    """
    falling = 1
    for ind in range(j):
        falling *= a - ind

    return coeff_poly(math.comb(b, j) * falling * (-sympy.I) ** j)


def conjugate_coeff(poly):
    """
    Complex conjugate of a coefficient, k is real.
    """
    return coeff_poly(sympy.conjugate(poly.as_expr()))


def coeff_value(poly, kval):
    """
    Evaluate a coefficient numerically at k = kval.
    """
    total = 0j
    for (deg,), val in poly.terms():
        total += complex(val) * kval ** deg

    return total


class WeylMonomial():
    """
    A single normal ordered term coeff * pinv2^s x1^a x2^c p1^b p2^d.

    Never stored with a zero coefficient.
    """
    __slots__ = ('coeff', 's', 'a', 'c', 'b', 'd')

    def __init__(self, coeff, s=0, a=0, c=0, b=0, d=0):
        if min(s, a, b, d) < 0:
            raise hdl.exc.AlgebraError("Only x2 may carry a negative power.")
        self.coeff = to_coeff(coeff)
        self.s = s
        self.a = a
        self.c = c
        self.b = b
        self.d = d

    @property
    def key(self):
        """ The exponent tuple that orders monomials. """
        return (self.s, self.a, self.c, self.b, self.d)

    @property
    def is_momentum_only(self):
        """ True when no position factor is present. """
        return self.a == 0 and self.c == 0

    @property
    def is_position_only(self):
        """ True when no momentum or pinv2 factor is present. """
        return self.s == 0 and self.b == 0 and self.d == 0

    def __repr__(self):
        return "{}(coeff={!r}, s={}, a={}, c={}, b={}, d={})".format(
            self.__class__.__name__, str(self.coeff.as_expr()), *self.key)

    def __eq__(self, other):
        return isinstance(other, WeylMonomial) and self.key == other.key \
            and self.coeff == other.coeff

    def __hash__(self):
        return hash((self.key, self.coeff))


def mul_monomials(left, right, out):
    """
    Accumulate the normal ordered product left * right into the dict out (key -> coeff).

    Raises:
        OrderingViolation: right carries pinv2 but left has position factors.
    """
    if right.s and not left.is_momentum_only:
        raise hdl.exc.OrderingViolation()

    coeff = left.coeff * right.coeff
    for j1 in range(min(left.b, right.a) + 1 if right.a >= 0 else left.b + 1):
        fac1 = commute_factor(left.b, right.a, j1)
        for j2 in range(min(left.d, right.c) + 1 if right.c >= 0 else left.d + 1):
            fac2 = commute_factor(left.d, right.c, j2)
            key = (left.s + right.s,
                   left.a + right.a - j1,
                   left.c + right.c - j2,
                   left.b - j1 + right.b,
                   left.d - j2 + right.d)
            term = coeff * fac1 * fac2
            out[key] = out[key] + term if key in out else term


class OperatorExpr():
    """
    Canonical sum of WeylMonomials: sorted by exponent tuple, merged, zero pruned.

    Supports +, -, unary -, * (operator product or scaling) and exact equality.
    """
    __slots__ = ('_terms',)

    def __init__(self, monomials=()):
        acc = {}
        for mono in monomials:
            acc[mono.key] = acc[mono.key] + mono.coeff if mono.key in acc else mono.coeff
        self._terms = OperatorExpr._canonical(acc)

    @staticmethod
    def _canonical(acc):
        return tuple(WeylMonomial(acc[key], *key) for key in sorted(acc)
                     if not acc[key].is_zero)

    @classmethod
    def from_dict(cls, acc):
        """ Build from a dict of exponent tuple -> coefficient. """
        expr = cls.__new__(cls)
        expr._terms = cls._canonical({key: to_coeff(val) for key, val in acc.items()})
        return expr

    @classmethod
    def scalar(cls, value):
        """ value * 1 """
        return cls([WeylMonomial(value)])

    @classmethod
    def atom(cls, name, power=1):
        """
        One of x1, x2, p1, p2, pinv2 raised to power. Only x2 takes negative powers.
        """
        try:
            pos = ATOM_NAMES.index(name)
        except ValueError:
            raise hdl.exc.AlgebraError("Unknown atom: " + name)
        exps = [0, 0, 0, 0, 0]
        exps[pos] = power
        # Internal order is (s, a, c, b, d) which matches ATOM_NAMES.
        return cls([WeylMonomial(1, *exps)])

    @property
    def monomials(self):
        """ Tuple of WeylMonomial in canonical order. """
        return self._terms

    def as_dict(self):
        """ Exponent tuple -> coefficient. """
        return {mono.key: mono.coeff for mono in self._terms}

    @property
    def is_momentum_only(self):
        """ True when every monomial is free of position factors. """
        return all(mono.is_momentum_only for mono in self._terms)

    @property
    def is_position_only(self):
        """ True when every monomial is a function of position alone. """
        return all(mono.is_position_only for mono in self._terms)

    @property
    def has_pinv(self):
        """ True when some monomial carries pinv2. """
        return any(mono.s for mono in self._terms)

    def regular_part(self):
        """ The s = 0 monomials. """
        return OperatorExpr.from_dict({key: val for key, val in self.as_dict().items()
                                       if key[0] == 0})

    def pinv_parts(self):
        """
        Group the s > 0 monomials by s with pinv2 stripped.

        Returns:
            dict s -> OperatorExpr R_s such that the s > 0 part is sum_s pinv2^s R_s.
        """
        parts = {}
        for mono in self._terms:
            if mono.s:
                parts.setdefault(mono.s, {})[(0,) + mono.key[1:]] = mono.coeff

        return {s: OperatorExpr.from_dict(acc) for s, acc in sorted(parts.items())}

    def with_pinv(self, power):
        """ pinv2^power * self, valid for any self since pinv2 stays leftmost. """
        return OperatorExpr.from_dict({(key[0] + power,) + key[1:]: val
                                       for key, val in self.as_dict().items()})

    def subs_k(self, value):
        """
        Specialize the formal k to a number. Floats are read through their decimal text,
        so 1.5 becomes exactly 3/2.
        """
        if isinstance(value, float):
            value = sympy.Rational(str(value))
        value = sympy.sympify(value)

        return OperatorExpr.from_dict({
            mono.key: coeff_poly(sympy.expand(mono.coeff.as_expr().subs(K, value)))
            for mono in self._terms})

    def numeric_terms(self, kval):
        """
        Yield (key, complex coefficient) with k = kval substituted.
        """
        for mono in self._terms:
            yield mono.key, coeff_value(mono.coeff, kval)

    def scale(self, value):
        """ value * self for a scalar value. """
        factor = to_coeff(value)
        return OperatorExpr.from_dict({mono.key: mono.coeff * factor for mono in self._terms})

    def __add__(self, other):
        if not isinstance(other, OperatorExpr):
            other = OperatorExpr.scalar(other)
        return OperatorExpr(self._terms + other._terms)

    __radd__ = __add__

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        if not isinstance(other, OperatorExpr):
            other = OperatorExpr.scalar(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, OperatorExpr):
            return mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, power):
        if power < 0:
            raise hdl.exc.AlgebraError("Only atoms of x2 take negative powers.")
        result = ONE
        for _ in range(power):
            result = mul(result, self)
        return result

    def __eq__(self, other):
        if isinstance(other, (int, fractions.Fraction, sympy.Basic)):
            other = OperatorExpr.scalar(other)
        if not isinstance(other, OperatorExpr):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def __str__(self):
        return format_expr(self)

    def __repr__(self):
        return "{}({!r})".format(self.__class__.__name__, format_expr(self))


def mul(left, right):
    """
    Normal ordered product left * right.

    Raises:
        OrderingViolation: right carries pinv2 while left has position factors.
    """
    out = {}
    for lmono in left.monomials:
        for rmono in right.monomials:
            mul_monomials(lmono, rmono, out)

    return OperatorExpr.from_dict(out)


def commutator(left, right):
    """ [left, right] = left right - right left """
    return mul(left, right) - mul(right, left)


def adjoint(expr):
    """
    Reverse factor order, conjugate coefficients and normal order again.

    A pinv2 factor can only be carried through when the rest of its monomial is momentum only.

    Raises:
        OrderingViolation: A monomial with pinv2 also holds position factors.
    """
    out = {}
    for mono in expr.monomials:
        conj = conjugate_coeff(mono.coeff)
        if mono.s:
            if not mono.is_momentum_only:
                raise hdl.exc.OrderingViolation(
                    'p-inverse ordering violation: adjoint moves pinv2 right of position')
            key = mono.key
            out[key] = out[key] + conj if key in out else conj
            continue

        momenta = WeylMonomial(conj, 0, 0, 0, mono.b, mono.d)
        positions = WeylMonomial(1, 0, mono.a, mono.c, 0, 0)
        mul_monomials(momenta, positions, out)

    return OperatorExpr.from_dict(out)


def is_zero(expr):
    """ Canonical emptiness. """
    return not expr.monomials


def absorb_p2_right(expr):
    """
    Compute expr * p^2 with every pinv2 factor cancelled exactly.

    For each s > 0 group pinv2^s R: (pinv2^s R) p^2 = pinv2^(s-1) R once [R, p^2] = 0,
    which is checked rather than assumed. The s = 0 part is multiplied normally.

    Raises:
        NonCommutingResidue: Some residue R fails to commute with p^2.
    """
    result = mul(expr.regular_part(), P_SQ)
    for power, residue in expr.pinv_parts().items():
        defect = commutator(residue, P_SQ)
        if not is_zero(defect):
            raise hdl.exc.NonCommutingResidue(
                'non-commuting residue under p^2: [R, p^2] = {}'.format(format_expr(defect)))
        result = result + residue.with_pinv(power - 1)

    logging.getLogger(__name__).debug("Absorbed p^2: %d monomials", len(result))
    return result


def sw_potential(kval=None):
    """
    V_sw = (x1^2 + x2^2 + k x2^-2) / 2, formal in k unless kval is given.
    """
    kpart = OperatorExpr.scalar(K) if kval is None else OperatorExpr.scalar(kval)
    half = sympy.Rational(1, 2)
    return (X1 * X1 + X2 * X2 + kpart * OperatorExpr.atom('x2', -2)).scale(half)


def format_rational(value):
    """ Rational as text of the operator grammar, e.g. 3/2. """
    return str(sympy.Rational(value))


def coeff_pieces(poly):
    """
    Split a coefficient into signed printable pieces.

    Returns:
        List of (negative, text) in ascending k degree, real part before imaginary part.
    """
    pieces = []
    for (deg,), val in reversed(poly.terms()):
        kfac = '' if deg == 0 else ('k' if deg == 1 else 'k^{}'.format(deg))
        for part, unit in ((sympy.re(val), ''), (sympy.im(val), 'i')):
            if part == 0:
                continue
            facs = [] if abs(part) == 1 else [format_rational(abs(part))]
            facs += [fac for fac in (unit, kfac) if fac]
            pieces += [(bool(part < 0), '*'.join(facs) or '1')]

    return pieces


def format_monomial_factors(mono):
    """ Factor text of a monomial in canonical written order. """
    facs = []
    for name, power in zip(ATOM_NAMES, mono.key):
        if power == 1:
            facs += [name]
        elif power:
            facs += ['{}^{}'.format(name, power)]

    return facs


def format_expr(expr):
    """
    Deterministic text of expr in the grammar read by hdl.opparse.parse_operator.
    """
    if is_zero(expr):
        return '0'

    text = ''
    for mono in expr.monomials:
        pieces = coeff_pieces(mono.coeff)
        facs = format_monomial_factors(mono)
        if len(pieces) == 1:
            negative, body = pieces[0]
            parts = facs if body == '1' and facs else [body] + facs
        else:
            negative = False
            inner = ''
            for ind, (neg, piece) in enumerate(pieces):
                if ind == 0:
                    inner += '-' + piece if neg else piece
                else:
                    inner += (' - ' if neg else ' + ') + piece
            parts = ['(' + inner + ')'] + facs

        body = '*'.join(parts)
        if not text:
            text = '-' + body if negative else body
        else:
            text += (' - ' if negative else ' + ') + body

    return text


ONE = OperatorExpr.scalar(1)
IMAG = OperatorExpr.scalar(sympy.I)
KSYM = OperatorExpr.scalar(K)
X1 = OperatorExpr.atom('x1')
X2 = OperatorExpr.atom('x2')
P1 = OperatorExpr.atom('p1')
P2 = OperatorExpr.atom('p2')
PINV2 = OperatorExpr.atom('pinv2')
P_SQ = P1 * P1 + P2 * P2
L_ORB = X1 * P2 - X2 * P1

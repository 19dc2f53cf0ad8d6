"""
Read operator expressions written in the text grammar

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := atom ('^' signed-int)?
    atom   := 'x1' | 'x2' | 'p1' | 'p2' | 'pinv2' | 'k' | 'i' | rational | '(' expr ')'

rational is an integer or integer/integer. Negative exponents are only accepted on x2.
pinv2 may be preceded inside a term only by scalars or momentum-only factors, those commute
with it. The result is always the canonical OperatorExpr, so printing with
hdl.symalg.format_expr and parsing again is the identity.
"""
import collections
import fractions
import re

import hdl.exc
import hdl.symalg
from hdl.symalg import OperatorExpr

Token = collections.namedtuple('Token', ['kind', 'text', 'pos'])
TOKEN_PAT = re.compile(r"""
    (?P<space>\s+)
  | (?P<name>pinv2|x1|x2|p1|p2|k|i)
  | (?P<number>\d+(?:/\d+)?)
  | (?P<op>[-+*^()])
""", re.VERBOSE)
ATOMS = {
    'x1': hdl.symalg.X1,
    'x2': hdl.symalg.X2,
    'p1': hdl.symalg.P1,
    'p2': hdl.symalg.P2,
    'pinv2': hdl.symalg.PINV2,
    'k': hdl.symalg.KSYM,
    'i': hdl.symalg.IMAG,
}


def tokenize(text):
    """
    Split text into tokens, whitespace dropped, terminated by an 'end' token.

    Raises:
        ExprParseError: An unknown character is met.
    """
    pos = 0
    tokens = []
    while pos < len(text):
        match = TOKEN_PAT.match(text, pos)
        if not match:
            raise hdl.exc.ExprParseError('syntax error: unexpected character {!r}'.format(
                text[pos]), position=pos, text=text)
        if match.lastgroup != 'space':
            tokens += [Token(match.lastgroup, match.group(), pos)]
        pos = match.end()

    tokens += [Token('end', '', len(text))]
    return tokens


class ExprParser():
    """
    Recursive descent parser, one method per grammar rule.
    """
    def __init__(self, text):
        self.text = text
        self.tokens = tokenize(text)
        self.ind = 0

    @property
    def token(self):
        """ The current token. """
        return self.tokens[self.ind]

    def advance(self):
        """ Consume and return the current token. """
        tok = self.tokens[self.ind]
        self.ind += 1
        return tok

    def error(self, msg, tok=None):
        """ Build a parse error pointing at tok, current token by default. """
        tok = tok or self.token
        return hdl.exc.ExprParseError(msg, position=tok.pos, text=self.text)

    def expect(self, text):
        """ Consume a token with the given text or fail. """
        if self.token.text != text:
            found = self.token.text or 'end of input'
            raise self.error('syntax error: expected {!r}, found {!r}'.format(text, found))
        return self.advance()

    def parse(self):
        """ Parse the whole text. """
        if self.token.kind == 'end':
            raise self.error('syntax error: empty expression')
        result = self.expr()
        if self.token.kind != 'end':
            raise self.error('syntax error: unexpected {!r}'.format(self.token.text))

        return result

    def expr(self):
        """ expr := ['+'|'-'] term (('+'|'-') term)* """
        sign = 1
        if self.token.text in ('+', '-'):
            sign = -1 if self.advance().text == '-' else 1

        result = self.term()
        if sign < 0:
            result = -result

        while self.token.text in ('+', '-'):
            negative = self.advance().text == '-'
            right = self.term()
            result = result - right if negative else result + right

        return result

    def term(self):
        """ term := factor ('*' factor)* """
        result = self.factor()
        while self.token.text == '*':
            self.advance()
            tok = self.token
            right = self.factor()
            try:
                result = hdl.symalg.mul(result, right)
            except hdl.exc.OrderingViolation:
                raise self.error('pinv2 not in leading position', tok)

        return result

    def factor(self):
        """ factor := atom ('^' signed-int)? """
        tok = self.token
        base = self.atom()
        if self.token.text != '^':
            return base

        self.advance()
        negative = False
        if self.token.text in ('+', '-'):
            negative = self.advance().text == '-'
        exp_tok = self.token
        if exp_tok.kind != 'number' or '/' in exp_tok.text:
            raise self.error('syntax error: exponent must be an integer', exp_tok)
        self.advance()
        power = -int(exp_tok.text) if negative else int(exp_tok.text)

        if tok.kind == 'name' and tok.text in ('x1', 'x2', 'p1', 'p2', 'pinv2'):
            if power < 0 and tok.text != 'x2':
                raise self.error('negative power on non-x2 atom', tok)
            return OperatorExpr.atom(tok.text, power)
        if power < 0:
            raise self.error('negative power on non-x2 atom', tok)

        return base ** power

    def atom(self):
        """ atom := name | rational | '(' expr ')' """
        tok = self.token
        if tok.kind == 'name':
            self.advance()
            return ATOMS[tok.text]

        if tok.kind == 'number':
            self.advance()
            try:
                return OperatorExpr.scalar(fractions.Fraction(tok.text))
            except ZeroDivisionError:
                raise self.error('syntax error: division by zero', tok)

        if tok.text == '(':
            self.advance()
            inner = self.expr()
            self.expect(')')
            return inner

        found = tok.text or 'end of input'
        raise self.error('syntax error: unexpected {!r}'.format(found), tok)


def parse_operator(text):
    """
    Parse text into a canonical OperatorExpr.

    Raises:
        ExprParseError: Syntax errors, negative powers off x2, misplaced pinv2.
    """
    return ExprParser(text).parse()

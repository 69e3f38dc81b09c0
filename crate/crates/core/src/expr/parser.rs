use super::{BinOp, FunctionExpr, Func, Node, ParseError, Var};

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
}

#[derive(Debug, Clone)]
struct Spanned {
    token: Token,
    pos: usize,
}

/// Parse an expression in `x` and `y`.
///
/// Error offsets count characters, not bytes, and are clamped to the last
/// character of the source when the input ends unexpectedly.
pub fn parse(source: &str) -> Result<FunctionExpr, ParseError> {
    let len = source.chars().count();
    let clamp = |mut err: ParseError| {
        err.position = err.position.min(len.saturating_sub(1));
        err
    };
    let tokens = tokenize(source).map_err(clamp)?;
    let mut parser = Parser {
        tokens,
        index: 0,
        end: len,
    };
    let root = parser.expr().map_err(clamp)?;
    if let Some(extra) = parser.peek() {
        return Err(clamp(ParseError {
            position: extra.pos,
            message: "unexpected trailing input".into(),
        }));
    }
    Ok(FunctionExpr::from_node(root))
}

fn tokenize(source: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = source.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = i;
        let token = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if i < chars.len() && chars[i] == '.' {
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        while j < chars.len() && chars[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let value: f64 = text.parse().map_err(|_| ParseError {
                    position: start,
                    message: format!("malformed number '{text}'"),
                })?;
                tokens.push(Spanned {
                    token: Token::Num(value),
                    pos,
                });
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                tokens.push(Spanned {
                    token: Token::Ident(chars[start..i].iter().collect()),
                    pos,
                });
                continue;
            }
            '+' | '-' | '*' | '/' | '^' => Token::Op(c),
            '(' => Token::LParen,
            ')' => Token::RParen,
            ',' => Token::Comma,
            other => {
                return Err(ParseError {
                    position: pos,
                    message: format!("unexpected character '{other}'"),
                })
            }
        };
        tokens.push(Spanned { token, pos });
        i += 1;
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Spanned>,
    index: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Spanned> {
        self.tokens.get(self.index)
    }

    fn next(&mut self) -> Option<Spanned> {
        let t = self.tokens.get(self.index).cloned();
        self.index += 1;
        t
    }

    fn peek_op(&self) -> Option<char> {
        match self.peek() {
            Some(Spanned {
                token: Token::Op(c),
                ..
            }) => Some(*c),
            _ => None,
        }
    }

    fn here(&self) -> usize {
        self.peek().map_or(self.end, |t| t.pos)
    }

    fn error<T>(&self, position: usize, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            position,
            message: message.into(),
        })
    }

    fn expect(&mut self, token: Token, what: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if t.token == token => {
                self.index += 1;
                Ok(())
            }
            _ => self.error(self.here(), format!("expected {what}")),
        }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        while let Some(c @ ('+' | '-')) = self.peek_op() {
            self.index += 1;
            let rhs = self.term()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Node::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(c @ ('*' | '/')) = self.peek_op() {
            self.index += 1;
            let rhs = self.unary()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Node::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        if self.peek_op() == Some('-') {
            self.index += 1;
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let base = self.primary()?;
        if self.peek_op() == Some('^') {
            self.index += 1;
            let exponent = self.unary()?;
            return Ok(Node::binary(BinOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Node, ParseError> {
        let Some(Spanned { token, pos }) = self.next() else {
            return self.error(self.end, "unexpected end of input");
        };
        match token {
            Token::Num(v) => Ok(Node::Num(v)),
            Token::LParen => {
                let inner = self.expr()?;
                self.expect(Token::RParen, "')'")?;
                Ok(inner)
            }
            Token::Ident(name) => {
                if matches!(self.peek(), Some(t) if t.token == Token::LParen) {
                    let Some(func) = Func::from_name(&name) else {
                        return self.error(pos, format!("unknown function '{name}'"));
                    };
                    self.index += 1;
                    let mut args = vec![self.expr()?];
                    while matches!(self.peek(), Some(t) if t.token == Token::Comma) {
                        self.index += 1;
                        args.push(self.expr()?);
                    }
                    self.expect(Token::RParen, "')' or ','")?;
                    let arity_ok = if func.is_variadic() {
                        args.len() >= 2
                    } else {
                        args.len() == 1
                    };
                    if !arity_ok {
                        return self.error(
                            pos,
                            format!("wrong number of arguments ({}) for '{name}'", args.len()),
                        );
                    }
                    Ok(Node::Call { func, args })
                } else {
                    match name.as_str() {
                        "x" => Ok(Node::Var(Var::X)),
                        "y" => Ok(Node::Var(Var::Y)),
                        _ => self.error(pos, format!("unknown variable '{name}'")),
                    }
                }
            }
            Token::Op(c) => self.error(pos, format!("unexpected operator '{c}'")),
            Token::RParen => self.error(pos, "unexpected ')'"),
            Token::Comma => self.error(pos, "unexpected ','"),
        }
    }
}

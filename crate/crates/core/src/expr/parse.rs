use super::{AggFn, BinOp, Expr, ExprError, Literal, UnOp};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Str(String),
    Ident(String),
    Op(&'static str),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Dot,
    Comma,
    Eof,
}

fn syntax(pos: usize, message: impl Into<String>) -> ExprError {
    ExprError::Syntax { pos, message: message.into() }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let next = chars.get(i + 1).map(|p| p.1);
        if c.is_ascii_digit() || (c == '.' && next.is_some_and(|n| n.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && chars[i].1 == '.' {
                i += 1;
                if !chars.get(i).is_some_and(|p| p.1.is_ascii_digit()) {
                    return Err(syntax(chars[i - 1].0, "expected digits after decimal point"));
                }
                while i < chars.len() && chars[i].1.is_ascii_digit() {
                    i += 1;
                }
            }
            if i < chars.len() && matches!(chars[i].1, 'e' | 'E') {
                let mut j = i + 1;
                if j < chars.len() && matches!(chars[j].1, '+' | '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].1.is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].1.is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let end = chars.get(i).map_or(src.len(), |p| p.0);
            let text = &src[chars[start].0..end];
            let n: f64 = text.parse().map_err(|_| syntax(pos, format!("bad number `{text}`")))?;
            if !n.is_finite() {
                return Err(syntax(pos, format!("number `{text}` is out of range")));
            }
            out.push((Tok::Num(n), pos));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            let end = chars.get(i).map_or(src.len(), |p| p.0);
            out.push((Tok::Ident(src[chars[start].0..end].to_string()), pos));
            continue;
        }
        if c == '"' || c == '\'' {
            let quote = c;
            i += 1;
            let mut s = String::new();
            loop {
                let Some(&(_, ch)) = chars.get(i) else {
                    return Err(syntax(pos, "unterminated string"));
                };
                i += 1;
                match ch {
                    '\\' => {
                        let Some(&(_, esc)) = chars.get(i) else {
                            return Err(syntax(pos, "unterminated string"));
                        };
                        i += 1;
                        s.push(match esc {
                            'n' => '\n',
                            't' => '\t',
                            other => other,
                        });
                    }
                    ch if ch == quote => break,
                    ch => s.push(ch),
                }
            }
            out.push((Tok::Str(s), pos));
            continue;
        }
        let two: String = chars[i..chars.len().min(i + 2)].iter().map(|p| p.1).collect();
        let op2 = ["<=", ">=", "==", "!=", "&&", "||"].into_iter().find(|o| *o == two);
        if let Some(op) = op2 {
            out.push((Tok::Op(op), pos));
            i += 2;
            continue;
        }
        let tok = match c {
            '+' => Tok::Op("+"),
            '-' => Tok::Op("-"),
            '*' => Tok::Op("*"),
            '/' => Tok::Op("/"),
            '<' => Tok::Op("<"),
            '>' => Tok::Op(">"),
            '!' => Tok::Op("!"),
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            '.' => Tok::Dot,
            ',' => Tok::Comma,
            other => return Err(syntax(pos, format!("unexpected character `{other}`"))),
        };
        out.push((tok, pos));
        i += 1;
    }
    out.push((Tok::Eof, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<(), ExprError> {
        if self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(syntax(self.pos(), format!("expected {what}")))
        }
    }

    fn eat_op(&mut self, ops: &[&'static str]) -> Option<&'static str> {
        match self.peek() {
            Tok::Op(o) if ops.contains(o) => {
                let o = *o;
                self.bump();
                Some(o)
            }
            _ => None,
        }
    }

    fn or(&mut self) -> Result<Expr, ExprError> {
        let mut l = self.and()?;
        while self.eat_op(&["||"]).is_some() {
            l = Expr::binary(BinOp::Or, l, self.and()?);
        }
        Ok(l)
    }

    fn and(&mut self) -> Result<Expr, ExprError> {
        let mut l = self.cmp()?;
        while self.eat_op(&["&&"]).is_some() {
            l = Expr::binary(BinOp::And, l, self.cmp()?);
        }
        Ok(l)
    }

    fn cmp(&mut self) -> Result<Expr, ExprError> {
        let l = self.add()?;
        let ops = ["<", "<=", ">", ">=", "==", "!="];
        let Some(op) = self.eat_op(&ops) else { return Ok(l) };
        let r = self.add()?;
        if let Tok::Op(o) = self.peek() {
            if ops.contains(o) {
                return Err(syntax(self.pos(), "comparisons cannot be chained; add parentheses"));
            }
        }
        let op = match op {
            "<" => BinOp::Lt,
            "<=" => BinOp::Le,
            ">" => BinOp::Gt,
            ">=" => BinOp::Ge,
            "==" => BinOp::Eq,
            _ => BinOp::Ne,
        };
        Ok(Expr::binary(op, l, r))
    }

    fn add(&mut self) -> Result<Expr, ExprError> {
        let mut l = self.mul()?;
        while let Some(op) = self.eat_op(&["+", "-"]) {
            let op = if op == "+" { BinOp::Add } else { BinOp::Sub };
            l = Expr::binary(op, l, self.mul()?);
        }
        Ok(l)
    }

    fn mul(&mut self) -> Result<Expr, ExprError> {
        let mut l = self.unary()?;
        while let Some(op) = self.eat_op(&["*", "/"]) {
            let op = if op == "*" { BinOp::Mul } else { BinOp::Div };
            l = Expr::binary(op, l, self.unary()?);
        }
        Ok(l)
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        match self.eat_op(&["!", "-"]) {
            Some("!") => Ok(Expr::Unary(UnOp::Not, Box::new(self.unary()?))),
            Some(_) => Ok(match self.unary()? {
                // Negative literals fold so printing and reparsing agree.
                Expr::Lit(Literal::Number(n)) => Expr::Lit(Literal::Number(-n)),
                e => Expr::Unary(UnOp::Neg, Box::new(e)),
            }),
            None => self.primary(),
        }
    }

    fn field_name(&mut self) -> Result<String, ExprError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Ident(s) => Ok(s),
            Tok::Str(s) if !s.is_empty() => Ok(s),
            _ => Err(syntax(pos, "expected a field name")),
        }
    }

    fn primary(&mut self) -> Result<Expr, ExprError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Num(n) => Ok(Expr::Lit(Literal::Number(n))),
            Tok::Str(s) => Ok(Expr::Lit(Literal::String(s))),
            Tok::LParen => {
                let e = self.or()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(id) => match id.as_str() {
                "true" => Ok(Expr::Lit(Literal::Bool(true))),
                "false" => Ok(Expr::Lit(Literal::Bool(false))),
                "datum" => match self.bump() {
                    Tok::Dot => match self.bump() {
                        Tok::Ident(name) => Ok(Expr::Field(name)),
                        _ => Err(syntax(pos, "expected a field name after `datum.`")),
                    },
                    Tok::LBracket => {
                        let name = match self.bump() {
                            Tok::Str(s) if !s.is_empty() => s,
                            _ => return Err(syntax(pos, "expected a quoted field name in `datum[...]`")),
                        };
                        self.expect(&Tok::RBracket, "`]`")?;
                        Ok(Expr::Field(name))
                    }
                    _ => Err(syntax(pos, "expected `.` or `[` after `datum`")),
                },
                name => match AggFn::from_name(name) {
                    Some(agg) => {
                        self.expect(&Tok::LParen, "`(` after aggregate name")?;
                        let field = self.field_name()?;
                        self.expect(&Tok::RParen, "`)`")?;
                        Ok(Expr::Agg(agg, field))
                    }
                    None => Err(syntax(pos, format!("unknown identifier `{name}`; fields are written `datum.{name}`"))),
                },
            },
            Tok::Eof => Err(syntax(pos, "unexpected end of expression")),
            other => Err(syntax(pos, format!("unexpected token {other:?}"))),
        }
    }
}

/// Parses expression source without type information.
pub fn parse(src: &str) -> Result<Expr, ExprError> {
    if src.trim().is_empty() {
        return Err(syntax(0, "empty expression"));
    }
    let mut p = Parser { toks: lex(src)?, at: 0 };
    let e = p.or()?;
    if *p.peek() != Tok::Eof {
        return Err(syntax(p.pos(), "unexpected trailing input"));
    }
    Ok(e)
}

//! Recursive-descent parser for the expression grammar:
//! identifiers `[A-Za-z_][A-Za-z0-9_]*`, constants `0`/`1`, and the
//! operators `!` > `&` > `^` > `|`, all binaries left-associative.

use super::expr::BoolExpr;

/// A variable reference in a parsed expression.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Symbol {
    Name(String),
    /// Integer vertex alias, only produced in numbered mode.
    Alias(usize),
}

/// Parsed expression whose `Var(i)` refers to `symbols[i]`; symbols are
/// listed in order of first appearance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedExpr {
    pub expr: BoolExpr,
    pub symbols: Vec<Symbol>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Ident(String),
    Number(String),
    Not,
    And,
    Xor,
    Or,
    Open,
    Close,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, String> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '!' => tokens.push((start, Token::Not)),
            '&' => tokens.push((start, Token::And)),
            '^' => tokens.push((start, Token::Xor)),
            '|' => tokens.push((start, Token::Or)),
            '(' => tokens.push((start, Token::Open)),
            ')' => tokens.push((start, Token::Close)),
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i + 1 < chars.len() && (chars[i + 1].is_ascii_alphanumeric() || chars[i + 1] == '_') {
                    i += 1;
                }
                tokens.push((start, Token::Ident(chars[start..=i].iter().collect())));
            }
            c if c.is_ascii_digit() => {
                while i + 1 < chars.len() && chars[i + 1].is_ascii_digit() {
                    i += 1;
                }
                if i + 1 < chars.len() && (chars[i + 1].is_ascii_alphabetic() || chars[i + 1] == '_') {
                    return Err(format!("column {}: identifiers cannot start with a digit", start + 1));
                }
                tokens.push((start, Token::Number(chars[start..=i].iter().collect())));
            }
            other => return Err(format!("column {}: unexpected character '{other}'", start + 1)),
        }
        i += 1;
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    numbered: bool,
    symbols: Vec<Symbol>,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn column(&self) -> usize {
        self.tokens.get(self.pos).map_or_else(
            || self.tokens.last().map_or(1, |(c, _)| c + 2),
            |(c, _)| c + 1,
        )
    }

    fn symbol(&mut self, s: Symbol) -> BoolExpr {
        let index = match self.symbols.iter().position(|t| *t == s) {
            Some(i) => i,
            None => {
                self.symbols.push(s);
                self.symbols.len() - 1
            }
        };
        BoolExpr::var(index)
    }

    fn or(&mut self) -> Result<BoolExpr, String> {
        let mut terms = vec![self.xor()?];
        while self.peek() == Some(&Token::Or) {
            self.pos += 1;
            terms.push(self.xor()?);
        }
        Ok(BoolExpr::or(terms))
    }

    fn xor(&mut self) -> Result<BoolExpr, String> {
        let mut acc = self.and()?;
        while self.peek() == Some(&Token::Xor) {
            self.pos += 1;
            let rhs = self.and()?;
            acc = BoolExpr::xor(acc, rhs);
        }
        Ok(acc)
    }

    fn and(&mut self) -> Result<BoolExpr, String> {
        let mut terms = vec![self.unary()?];
        while self.peek() == Some(&Token::And) {
            self.pos += 1;
            terms.push(self.unary()?);
        }
        Ok(BoolExpr::and(terms))
    }

    fn unary(&mut self) -> Result<BoolExpr, String> {
        let column = self.column();
        let Some((_, token)) = self.tokens.get(self.pos).cloned() else {
            return Err(format!("column {column}: unexpected end of expression"));
        };
        self.pos += 1;
        match token {
            Token::Not => Ok(BoolExpr::not(self.unary()?)),
            Token::Open => {
                let inner = self.or()?;
                if self.peek() != Some(&Token::Close) {
                    return Err(format!("column {}: expected ')'", self.column()));
                }
                self.pos += 1;
                Ok(inner)
            }
            Token::Ident(name) => Ok(self.symbol(Symbol::Name(name))),
            Token::Number(digits) if self.numbered => {
                let alias = digits
                    .parse::<usize>()
                    .map_err(|_| format!("column {column}: vertex alias '{digits}' is out of range"))?;
                Ok(self.symbol(Symbol::Alias(alias)))
            }
            Token::Number(digits) => match digits.as_str() {
                "0" => Ok(BoolExpr::Const(false)),
                "1" => Ok(BoolExpr::Const(true)),
                _ => Err(format!("column {column}: '{digits}' is not a constant (0 or 1)")),
            },
            other => Err(format!("column {column}: unexpected {other:?}")),
        }
    }
}

/// Parses an expression. With `numbered` set, integer literals are vertex
/// aliases instead of constants.
pub(crate) fn parse(text: &str, numbered: bool) -> Result<ParsedExpr, String> {
    let tokens = tokenize(text)?;
    if tokens.is_empty() {
        return Err("empty expression".to_string());
    }
    let mut parser = Parser {
        tokens,
        pos: 0,
        numbered,
        symbols: Vec::new(),
    };
    let expr = parser.or()?;
    if parser.pos != parser.tokens.len() {
        return Err(format!("column {}: trailing input", parser.column()));
    }
    Ok(ParsedExpr {
        expr,
        symbols: parser.symbols,
    })
}

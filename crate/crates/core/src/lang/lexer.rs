//! Lexer shared by the program grammar and the handler mini-DSL.

use std::fmt;

/// Source location, 1-indexed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Token {
    Ident(String),
    Number(u64),
    True,
    False,
    Assign,    // :=
    Semicolon, // ;
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Not,    // !
    Plus,   // +
    Minus,  // -
    EqEq,   // ==
    Lt,     // <
    AndAnd, // &&
    OrOr,   // ||
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Ident(s) => write!(f, "`{s}`"),
            Token::Number(n) => write!(f, "`{n}`"),
            Token::True => write!(f, "`T`"),
            Token::False => write!(f, "`F`"),
            Token::Assign => write!(f, "`:=`"),
            Token::Semicolon => write!(f, "`;`"),
            Token::LBrace => write!(f, "`{{`"),
            Token::RBrace => write!(f, "`}}`"),
            Token::LParen => write!(f, "`(`"),
            Token::RParen => write!(f, "`)`"),
            Token::LBracket => write!(f, "`[`"),
            Token::RBracket => write!(f, "`]`"),
            Token::Comma => write!(f, "`,`"),
            Token::Not => write!(f, "`!`"),
            Token::Plus => write!(f, "`+`"),
            Token::Minus => write!(f, "`-`"),
            Token::EqEq => write!(f, "`==`"),
            Token::Lt => write!(f, "`<`"),
            Token::AndAnd => write!(f, "`&&`"),
            Token::OrOr => write!(f, "`||`"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpannedToken {
    pub token: Token,
    pub pos: Pos,
}

/// Syntax error with location.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at {pos}: {message}")]
pub struct SyntaxError {
    pub pos: Pos,
    pub message: String,
}

impl SyntaxError {
    pub fn new(pos: Pos, message: impl Into<String>) -> Self {
        SyntaxError {
            pos,
            message: message.into(),
        }
    }
}

/// Tokenize `src`. `#` starts a line comment.
pub fn lex(src: &str) -> Result<Vec<SpannedToken>, SyntaxError> {
    let mut tokens = Vec::new();
    let mut chars = src.chars().peekable();
    let mut line = 1usize;
    let mut column = 1usize;

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                column = 1;
            } else if c.is_some() {
                column += 1;
            }
            c
        }};
    }

    while let Some(&c) = chars.peek() {
        let pos = Pos { line, column };
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                bump!();
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    bump!();
                }
            }
            ';' => {
                bump!();
                tokens.push(SpannedToken {
                    token: Token::Semicolon,
                    pos,
                });
            }
            '{' => {
                bump!();
                tokens.push(SpannedToken {
                    token: Token::LBrace,
                    pos,
                });
            }
            '}' => {
                bump!();
                tokens.push(SpannedToken {
                    token: Token::RBrace,
                    pos,
                });
            }
            '(' => {
                bump!();
                tokens.push(SpannedToken {
                    token: Token::LParen,
                    pos,
                });
            }
            ')' => {
                bump!();
                tokens.push(SpannedToken {
                    token: Token::RParen,
                    pos,
                });
            }
            '[' => {
                bump!();
                tokens.push(SpannedToken {
                    token: Token::LBracket,
                    pos,
                });
            }
            ']' => {
                bump!();
                tokens.push(SpannedToken {
                    token: Token::RBracket,
                    pos,
                });
            }
            ',' => {
                bump!();
                tokens.push(SpannedToken {
                    token: Token::Comma,
                    pos,
                });
            }
            '!' => {
                bump!();
                tokens.push(SpannedToken {
                    token: Token::Not,
                    pos,
                });
            }
            '+' => {
                bump!();
                tokens.push(SpannedToken {
                    token: Token::Plus,
                    pos,
                });
            }
            '-' => {
                bump!();
                tokens.push(SpannedToken {
                    token: Token::Minus,
                    pos,
                });
            }
            '<' => {
                bump!();
                tokens.push(SpannedToken {
                    token: Token::Lt,
                    pos,
                });
            }
            ':' => {
                bump!();
                match chars.peek() {
                    Some('=') => {
                        bump!();
                        tokens.push(SpannedToken {
                            token: Token::Assign,
                            pos,
                        });
                    }
                    _ => return Err(SyntaxError::new(pos, "expected `:=`")),
                }
            }
            '=' => {
                bump!();
                match chars.peek() {
                    Some('=') => {
                        bump!();
                        tokens.push(SpannedToken {
                            token: Token::EqEq,
                            pos,
                        });
                    }
                    _ => return Err(SyntaxError::new(pos, "expected `==` (assignment is `:=`)")),
                }
            }
            '&' => {
                bump!();
                match chars.peek() {
                    Some('&') => {
                        bump!();
                        tokens.push(SpannedToken {
                            token: Token::AndAnd,
                            pos,
                        });
                    }
                    _ => return Err(SyntaxError::new(pos, "expected `&&`")),
                }
            }
            '|' => {
                bump!();
                match chars.peek() {
                    Some('|') => {
                        bump!();
                        tokens.push(SpannedToken {
                            token: Token::OrOr,
                            pos,
                        });
                    }
                    _ => return Err(SyntaxError::new(pos, "expected `||`")),
                }
            }
            c if c.is_ascii_digit() => {
                let mut text = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_digit() {
                        text.push(c);
                        bump!();
                    } else {
                        break;
                    }
                }
                let n: u64 = text.parse().map_err(|_| {
                    SyntaxError::new(pos, format!("integer literal `{text}` out of range"))
                })?;
                tokens.push(SpannedToken {
                    token: Token::Number(n),
                    pos,
                });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut text = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        text.push(c);
                        bump!();
                    } else {
                        break;
                    }
                }
                let token = match text.as_str() {
                    "T" => Token::True,
                    "F" => Token::False,
                    _ => Token::Ident(text),
                };
                tokens.push(SpannedToken { token, pos });
            }
            other => {
                return Err(SyntaxError::new(
                    pos,
                    format!("unexpected character `{other}`"),
                ));
            }
        }
    }
    Ok(tokens)
}

/// Cursor over a token stream with one-token lookahead.
pub struct TokenCursor {
    tokens: Vec<SpannedToken>,
    index: usize,
    end: Pos,
}

impl TokenCursor {
    pub fn new(tokens: Vec<SpannedToken>) -> Self {
        let end = tokens
            .last()
            .map(|t| Pos {
                line: t.pos.line,
                column: t.pos.column + 1,
            })
            .unwrap_or(Pos { line: 1, column: 1 });
        TokenCursor {
            tokens,
            index: 0,
            end,
        }
    }

    pub fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.index).map(|t| &t.token)
    }

    pub fn pos(&self) -> Pos {
        self.tokens
            .get(self.index)
            .map(|t| t.pos)
            .unwrap_or(self.end)
    }

    pub fn advance(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.index).map(|t| t.token.clone());
        if t.is_some() {
            self.index += 1;
        }
        t
    }

    pub fn at_end(&self) -> bool {
        self.index >= self.tokens.len()
    }

    pub fn error(&self, message: impl Into<String>) -> SyntaxError {
        SyntaxError::new(self.pos(), message)
    }

    pub fn expect(&mut self, expected: Token) -> Result<(), SyntaxError> {
        match self.peek() {
            Some(t) if *t == expected => {
                self.advance();
                Ok(())
            }
            Some(t) => Err(self.error(format!("expected {expected}, found {t}"))),
            None => Err(self.error(format!("expected {expected}, found end of input"))),
        }
    }

    /// Consume an identifier token and return its text.
    pub fn expect_ident(&mut self, what: &str) -> Result<String, SyntaxError> {
        match self.peek() {
            Some(Token::Ident(_)) => match self.advance() {
                Some(Token::Ident(s)) => Ok(s),
                _ => unreachable!(),
            },
            Some(t) => Err(self.error(format!("expected {what}, found {t}"))),
            None => Err(self.error(format!("expected {what}, found end of input"))),
        }
    }

    /// Consume a specific keyword (lexed as an identifier).
    pub fn expect_keyword(&mut self, kw: &str) -> Result<(), SyntaxError> {
        match self.peek() {
            Some(Token::Ident(s)) if s == kw => {
                self.advance();
                Ok(())
            }
            Some(t) => Err(self.error(format!("expected `{kw}`, found {t}"))),
            None => Err(self.error(format!("expected `{kw}`, found end of input"))),
        }
    }

    pub fn peek_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Token::Ident(s)) if s == kw)
    }
}

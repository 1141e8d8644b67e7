//! Parser for the controlled-program grammar.
//!
//! ```text
//! stmt  := skip
//!        | x := expr
//!        | if expr then { stmts } [else { stmts }]
//!        | while expr do { stmts }
//!        | input x from c
//!        | output expr to c
//! stmts := stmt (; stmt)*
//! expr  := || over && over (== | <) over (+ | -) over ! over atoms
//! ```
//!
//! A missing `else` is the empty branch. `#` starts a line comment.

use crate::lang::ast::{BinOp, Expr, Program, Stmt};
use crate::lang::lexer::{lex, SyntaxError, Token, TokenCursor};
use crate::lang::value::Value;

const KEYWORDS: &[&str] = &[
    "skip", "if", "then", "else", "while", "do", "input", "from", "output", "to",
];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

/// Parse a complete program. Fails on trailing input.
pub fn parse_program(src: &str) -> Result<Program, SyntaxError> {
    let mut cur = TokenCursor::new(lex(src)?);
    let program = parse_stmt_seq(&mut cur)?;
    if !cur.at_end() {
        return Err(cur.error("expected `;` or end of input"));
    }
    Ok(program)
}

/// Parse a single expression (used by tests and tooling).
pub fn parse_expr_str(src: &str) -> Result<Expr, SyntaxError> {
    let mut cur = TokenCursor::new(lex(src)?);
    let e = parse_expr(&mut cur)?;
    if !cur.at_end() {
        return Err(cur.error("expected end of input"));
    }
    Ok(e)
}

pub(crate) fn parse_stmt_seq(cur: &mut TokenCursor) -> Result<Stmt, SyntaxError> {
    let mut stmts = vec![parse_stmt(cur)?];
    while matches!(cur.peek(), Some(Token::Semicolon)) {
        cur.advance();
        stmts.push(parse_stmt(cur)?);
    }
    Ok(Stmt::seq_all(stmts))
}

fn parse_block(cur: &mut TokenCursor) -> Result<Stmt, SyntaxError> {
    cur.expect(Token::LBrace)?;
    let body = parse_stmt_seq(cur)?;
    cur.expect(Token::RBrace)?;
    Ok(body)
}

fn parse_stmt(cur: &mut TokenCursor) -> Result<Stmt, SyntaxError> {
    match cur.peek() {
        Some(Token::Ident(kw)) if kw == "skip" => {
            cur.advance();
            Ok(Stmt::Skip)
        }
        Some(Token::Ident(kw)) if kw == "if" => {
            cur.advance();
            let guard = parse_expr(cur)?;
            cur.expect_keyword("then")?;
            let then_branch = parse_block(cur)?;
            let else_branch = if cur.peek_keyword("else") {
                cur.advance();
                parse_block(cur)?
            } else {
                Stmt::Skip
            };
            Ok(Stmt::If(
                guard,
                Box::new(then_branch),
                Box::new(else_branch),
            ))
        }
        Some(Token::Ident(kw)) if kw == "while" => {
            cur.advance();
            let guard = parse_expr(cur)?;
            cur.expect_keyword("do")?;
            let body = parse_block(cur)?;
            Ok(Stmt::While(guard, Box::new(body)))
        }
        Some(Token::Ident(kw)) if kw == "input" => {
            cur.advance();
            let var = parse_name(cur, "variable name")?;
            cur.expect_keyword("from")?;
            let channel = parse_name(cur, "channel name")?;
            Ok(Stmt::Input { var, channel })
        }
        Some(Token::Ident(kw)) if kw == "output" => {
            cur.advance();
            let expr = parse_expr(cur)?;
            cur.expect_keyword("to")?;
            let channel = parse_name(cur, "channel name")?;
            Ok(Stmt::Output { expr, channel })
        }
        Some(Token::Ident(kw)) if is_keyword(kw) => {
            Err(cur.error(format!("unexpected keyword `{kw}`")))
        }
        Some(Token::Ident(_)) => {
            let var = cur.expect_ident("variable name")?;
            cur.expect(Token::Assign)?;
            let expr = parse_expr(cur)?;
            Ok(Stmt::Assign(var, expr))
        }
        Some(t) => Err(cur.error(format!("expected a statement, found {t}"))),
        None => Err(cur.error("expected a statement, found end of input")),
    }
}

fn parse_name(cur: &mut TokenCursor, what: &str) -> Result<String, SyntaxError> {
    let name = cur.expect_ident(what)?;
    if is_keyword(&name) {
        return Err(cur.error(format!("keyword `{name}` cannot be used as a {what}")));
    }
    Ok(name)
}

pub(crate) fn parse_expr(cur: &mut TokenCursor) -> Result<Expr, SyntaxError> {
    parse_or(cur)
}

fn parse_or(cur: &mut TokenCursor) -> Result<Expr, SyntaxError> {
    let mut lhs = parse_and(cur)?;
    while matches!(cur.peek(), Some(Token::OrOr)) {
        cur.advance();
        let rhs = parse_and(cur)?;
        lhs = Expr::bin(BinOp::Or, lhs, rhs);
    }
    Ok(lhs)
}

fn parse_and(cur: &mut TokenCursor) -> Result<Expr, SyntaxError> {
    let mut lhs = parse_cmp(cur)?;
    while matches!(cur.peek(), Some(Token::AndAnd)) {
        cur.advance();
        let rhs = parse_cmp(cur)?;
        lhs = Expr::bin(BinOp::And, lhs, rhs);
    }
    Ok(lhs)
}

fn parse_cmp(cur: &mut TokenCursor) -> Result<Expr, SyntaxError> {
    let lhs = parse_add(cur)?;
    let op = match cur.peek() {
        Some(Token::EqEq) => BinOp::Eq,
        Some(Token::Lt) => BinOp::Lt,
        _ => return Ok(lhs),
    };
    cur.advance();
    let rhs = parse_add(cur)?;
    Ok(Expr::bin(op, lhs, rhs))
}

fn parse_add(cur: &mut TokenCursor) -> Result<Expr, SyntaxError> {
    let mut lhs = parse_unary(cur)?;
    loop {
        let op = match cur.peek() {
            Some(Token::Plus) => BinOp::Add,
            Some(Token::Minus) => BinOp::Monus,
            _ => break,
        };
        cur.advance();
        let rhs = parse_unary(cur)?;
        lhs = Expr::bin(op, lhs, rhs);
    }
    Ok(lhs)
}

fn parse_unary(cur: &mut TokenCursor) -> Result<Expr, SyntaxError> {
    if matches!(cur.peek(), Some(Token::Not)) {
        cur.advance();
        let inner = parse_unary(cur)?;
        return Ok(Expr::negate(inner));
    }
    parse_atom(cur)
}

fn parse_atom(cur: &mut TokenCursor) -> Result<Expr, SyntaxError> {
    match cur.peek() {
        Some(Token::True) => {
            cur.advance();
            Ok(Expr::Lit(Value::Bool(true)))
        }
        Some(Token::False) => {
            cur.advance();
            Ok(Expr::Lit(Value::Bool(false)))
        }
        Some(Token::Number(n)) => {
            let n = *n;
            cur.advance();
            Ok(Expr::Lit(Value::Int(n)))
        }
        Some(Token::Ident(s)) if !is_keyword(s) => {
            let name = cur.expect_ident("variable name")?;
            Ok(Expr::Var(name))
        }
        Some(Token::LParen) => {
            cur.advance();
            let e = parse_expr(cur)?;
            cur.expect(Token::RParen)?;
            Ok(e)
        }
        Some(t) => Err(cur.error(format!("expected an expression, found {t}"))),
        None => Err(cur.error("expected an expression, found end of input")),
    }
}

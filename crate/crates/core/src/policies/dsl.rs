//! Textual form of the handler mini-DSL.
//!
//! ```text
//! x := default(c);
//! if ask in TR[i][c] then { retrieve x from i on c };
//! if tell in TR[i][c] then { output x to c };
//! clean(c, identical(i));
//! wake(identical(i))
//! ```
//!
//! `i` and `c` name the requesting execution and channel; a concrete
//! channel name or execution index may appear in their place.

use crate::em::handler::{Privilege, TableSide};
use crate::lang::ast::{BinOp, UnOp};
use crate::lang::channel::Level;
use crate::lang::lexer::{lex, SyntaxError, Token, TokenCursor};
use crate::lang::parser::is_keyword;
use crate::lang::value::Value;
use crate::policies::template::{
    ChanRef, ExecRef, TemplateCond, TemplateExpr, TemplatePred, TemplateStmt,
};

const DSL_RESERVED: &[&str] = &[
    "i",
    "c",
    "TM",
    "TR",
    "PRIV_TM",
    "PRIV_TR",
    "default",
    "level",
    "ask",
    "tell",
    "in",
    "on",
    "map",
    "wake",
    "clone",
    "retrieve",
    "clean",
    "canTell",
    "isReady",
    "identical",
    "isWaitingInput",
    "isWaitingOutput",
    "H",
    "L",
];

fn is_reserved(s: &str) -> bool {
    is_keyword(s) || DSL_RESERVED.contains(&s)
}

pub fn parse_handler(src: &str) -> Result<TemplateStmt, SyntaxError> {
    let mut cur = TokenCursor::new(lex(src)?);
    let stmt = parse_seq(&mut cur)?;
    if !cur.at_end() {
        return Err(cur.error("expected `;` or end of handler"));
    }
    Ok(stmt)
}

fn parse_seq(cur: &mut TokenCursor) -> Result<TemplateStmt, SyntaxError> {
    let mut stmts = vec![parse_stmt(cur)?];
    while matches!(cur.peek(), Some(Token::Semicolon)) {
        cur.advance();
        stmts.push(parse_stmt(cur)?);
    }
    Ok(TemplateStmt::seq_all(stmts))
}

fn parse_block(cur: &mut TokenCursor) -> Result<TemplateStmt, SyntaxError> {
    cur.expect(Token::LBrace)?;
    let body = parse_seq(cur)?;
    cur.expect(Token::RBrace)?;
    Ok(body)
}

fn parse_stmt(cur: &mut TokenCursor) -> Result<TemplateStmt, SyntaxError> {
    match cur.peek() {
        Some(Token::Ident(kw)) if kw == "skip" => {
            cur.advance();
            Ok(TemplateStmt::Skip)
        }
        Some(Token::Ident(kw)) if kw == "if" => {
            cur.advance();
            let cond = parse_cond(cur)?;
            cur.expect_keyword("then")?;
            let then_branch = parse_block(cur)?;
            let else_branch = if cur.peek_keyword("else") {
                cur.advance();
                parse_block(cur)?
            } else {
                TemplateStmt::Skip
            };
            Ok(TemplateStmt::If(
                cond,
                Box::new(then_branch),
                Box::new(else_branch),
            ))
        }
        Some(Token::Ident(kw)) if kw == "while" => {
            cur.advance();
            let cond = parse_cond(cur)?;
            cur.expect_keyword("do")?;
            let body = parse_block(cur)?;
            Ok(TemplateStmt::While(cond, Box::new(body)))
        }
        Some(Token::Ident(kw)) if kw == "input" => {
            cur.advance();
            let var = parse_var(cur)?;
            cur.expect_keyword("from")?;
            let channel = parse_chanref(cur)?;
            Ok(TemplateStmt::Input { var, channel })
        }
        Some(Token::Ident(kw)) if kw == "map" => {
            cur.advance();
            cur.expect(Token::LParen)?;
            let expr = parse_expr(cur)?;
            cur.expect(Token::Comma)?;
            let channel = parse_chanref(cur)?;
            cur.expect(Token::Comma)?;
            let pred = parse_pred(cur)?;
            cur.expect(Token::RParen)?;
            Ok(TemplateStmt::MapSend {
                expr,
                channel,
                pred,
            })
        }
        Some(Token::Ident(kw)) if kw == "wake" => {
            cur.advance();
            cur.expect(Token::LParen)?;
            let pred = parse_pred(cur)?;
            cur.expect(Token::RParen)?;
            Ok(TemplateStmt::Wake(pred))
        }
        Some(Token::Ident(kw)) if kw == "clone" => {
            cur.advance();
            cur.expect(Token::LParen)?;
            let pred = parse_pred(cur)?;
            cur.expect(Token::Comma)?;
            cur.expect_keyword("PRIV_TM")?;
            cur.expect(Token::Comma)?;
            cur.expect_keyword("PRIV_TR")?;
            cur.expect(Token::RParen)?;
            Ok(TemplateStmt::CloneExec { pred })
        }
        Some(Token::Ident(kw)) if kw == "retrieve" => {
            cur.advance();
            let var = parse_var(cur)?;
            cur.expect_keyword("from")?;
            let exec = parse_execref(cur)?;
            cur.expect_keyword("on")?;
            let channel = parse_chanref(cur)?;
            Ok(TemplateStmt::Retrieve { var, exec, channel })
        }
        Some(Token::Ident(kw)) if kw == "output" => {
            cur.advance();
            let expr = parse_expr(cur)?;
            cur.expect_keyword("to")?;
            let channel = parse_chanref(cur)?;
            Ok(TemplateStmt::Output { expr, channel })
        }
        Some(Token::Ident(kw)) if kw == "clean" => {
            cur.advance();
            cur.expect(Token::LParen)?;
            let channel = parse_chanref(cur)?;
            cur.expect(Token::Comma)?;
            let pred = parse_pred(cur)?;
            cur.expect(Token::RParen)?;
            Ok(TemplateStmt::Clean { channel, pred })
        }
        Some(Token::Ident(name)) if !is_reserved(name) => {
            let var = cur.expect_ident("variable name")?;
            cur.expect(Token::Assign)?;
            let expr = parse_expr(cur)?;
            Ok(TemplateStmt::Assign(var, expr))
        }
        Some(t) => Err(cur.error(format!("expected a handler instruction, found {t}"))),
        None => Err(cur.error("expected a handler instruction, found end of input")),
    }
}

fn parse_var(cur: &mut TokenCursor) -> Result<String, SyntaxError> {
    let name = cur.expect_ident("variable name")?;
    if is_reserved(&name) {
        return Err(cur.error(format!("`{name}` is reserved and cannot be a variable")));
    }
    Ok(name)
}

fn parse_chanref(cur: &mut TokenCursor) -> Result<ChanRef, SyntaxError> {
    let name = cur.expect_ident("channel reference")?;
    if name == "c" {
        Ok(ChanRef::Requested)
    } else if is_reserved(&name) {
        Err(cur.error(format!("`{name}` is not a channel reference")))
    } else {
        Ok(ChanRef::Named(name))
    }
}

fn parse_execref(cur: &mut TokenCursor) -> Result<ExecRef, SyntaxError> {
    match cur.peek() {
        Some(Token::Ident(s)) if s == "i" => {
            cur.advance();
            Ok(ExecRef::Requester)
        }
        Some(Token::Number(n)) => {
            let n = *n as usize;
            cur.advance();
            Ok(ExecRef::Index(n))
        }
        Some(t) => Err(cur.error(format!("expected `i` or an execution index, found {t}"))),
        None => Err(cur.error("expected `i` or an execution index, found end of input")),
    }
}

fn parse_pred(cur: &mut TokenCursor) -> Result<TemplatePred, SyntaxError> {
    match cur.peek() {
        Some(Token::Not) => {
            cur.advance();
            Ok(TemplatePred::Not(Box::new(parse_pred(cur)?)))
        }
        Some(Token::Ident(kw)) if kw == "canTell" => {
            cur.advance();
            cur.expect(Token::LParen)?;
            let r = parse_chanref(cur)?;
            cur.expect(Token::RParen)?;
            Ok(TemplatePred::CanTell(r))
        }
        Some(Token::Ident(kw)) if kw == "isReady" => {
            cur.advance();
            cur.expect(Token::LParen)?;
            let r = parse_chanref(cur)?;
            cur.expect(Token::RParen)?;
            Ok(TemplatePred::IsReady(r))
        }
        Some(Token::Ident(kw)) if kw == "identical" => {
            cur.advance();
            cur.expect(Token::LParen)?;
            let r = parse_execref(cur)?;
            cur.expect(Token::RParen)?;
            Ok(TemplatePred::Identical(r))
        }
        Some(Token::Ident(kw)) if kw == "isWaitingInput" => {
            cur.advance();
            Ok(TemplatePred::IsWaitingInput)
        }
        Some(Token::Ident(kw)) if kw == "isWaitingOutput" => {
            cur.advance();
            Ok(TemplatePred::IsWaitingOutput)
        }
        Some(t) => Err(cur.error(format!("expected a predicate, found {t}"))),
        None => Err(cur.error("expected a predicate, found end of input")),
    }
}

fn parse_cond(cur: &mut TokenCursor) -> Result<TemplateCond, SyntaxError> {
    let mut lhs = parse_cond_atom(cur)?;
    while matches!(cur.peek(), Some(Token::AndAnd)) {
        cur.advance();
        let rhs = parse_cond_atom(cur)?;
        lhs = TemplateCond::And(Box::new(lhs), Box::new(rhs));
    }
    Ok(lhs)
}

fn parse_cond_atom(cur: &mut TokenCursor) -> Result<TemplateCond, SyntaxError> {
    match cur.peek() {
        Some(Token::Not) => {
            cur.advance();
            Ok(TemplateCond::Not(Box::new(parse_cond_atom(cur)?)))
        }
        Some(Token::LParen) => {
            cur.advance();
            let c = parse_cond(cur)?;
            cur.expect(Token::RParen)?;
            Ok(c)
        }
        Some(Token::Ident(kw)) if kw == "ask" || kw == "tell" => {
            let privilege = if kw == "ask" {
                Privilege::Ask
            } else {
                Privilege::Tell
            };
            cur.advance();
            cur.expect_keyword("in")?;
            let table = cur.expect_ident("`TM` or `TR`")?;
            let side = match table.as_str() {
                "TM" => TableSide::Map,
                "TR" => TableSide::Reduce,
                other => return Err(cur.error(format!("expected `TM` or `TR`, found `{other}`"))),
            };
            cur.expect(Token::LBracket)?;
            let exec = parse_execref(cur)?;
            cur.expect(Token::RBracket)?;
            cur.expect(Token::LBracket)?;
            let channel = parse_chanref(cur)?;
            cur.expect(Token::RBracket)?;
            Ok(TemplateCond::Priv {
                side,
                privilege,
                exec,
                channel,
            })
        }
        Some(Token::Ident(kw)) if kw == "level" => {
            cur.advance();
            cur.expect(Token::LParen)?;
            let r = parse_chanref(cur)?;
            cur.expect(Token::RParen)?;
            cur.expect(Token::EqEq)?;
            let level = match cur.advance() {
                Some(Token::Ident(s)) if s == "H" => Level::H,
                Some(Token::Ident(s)) if s == "L" => Level::L,
                _ => return Err(cur.error("expected `H` or `L`")),
            };
            Ok(TemplateCond::LevelIs(r, level))
        }
        Some(Token::Ident(kw)) if kw == "i" => {
            cur.advance();
            cur.expect(Token::EqEq)?;
            match cur.advance() {
                Some(Token::Number(n)) => Ok(TemplateCond::RequesterIs(n as usize)),
                _ => Err(cur.error("expected an execution index after `i ==`")),
            }
        }
        _ => Ok(TemplateCond::Expr(parse_expr(cur)?)),
    }
}

// Template expressions reuse the program operator grammar, restricted to
// comparison level and below so `&&` stays a condition connective.
fn parse_expr(cur: &mut TokenCursor) -> Result<TemplateExpr, SyntaxError> {
    let lhs = parse_add(cur)?;
    let op = match cur.peek() {
        Some(Token::EqEq) => BinOp::Eq,
        Some(Token::Lt) => BinOp::Lt,
        _ => return Ok(lhs),
    };
    cur.advance();
    let rhs = parse_add(cur)?;
    Ok(TemplateExpr::Binary(op, Box::new(lhs), Box::new(rhs)))
}

fn parse_add(cur: &mut TokenCursor) -> Result<TemplateExpr, SyntaxError> {
    let mut lhs = parse_unary(cur)?;
    loop {
        let op = match cur.peek() {
            Some(Token::Plus) => BinOp::Add,
            Some(Token::Minus) => BinOp::Monus,
            _ => break,
        };
        cur.advance();
        let rhs = parse_unary(cur)?;
        lhs = TemplateExpr::Binary(op, Box::new(lhs), Box::new(rhs));
    }
    Ok(lhs)
}

fn parse_unary(cur: &mut TokenCursor) -> Result<TemplateExpr, SyntaxError> {
    if matches!(cur.peek(), Some(Token::Not)) {
        cur.advance();
        return Ok(TemplateExpr::Unary(UnOp::Not, Box::new(parse_unary(cur)?)));
    }
    match cur.peek() {
        Some(Token::True) => {
            cur.advance();
            Ok(TemplateExpr::Lit(Value::Bool(true)))
        }
        Some(Token::False) => {
            cur.advance();
            Ok(TemplateExpr::Lit(Value::Bool(false)))
        }
        Some(Token::Number(n)) => {
            let n = *n;
            cur.advance();
            Ok(TemplateExpr::Lit(Value::Int(n)))
        }
        Some(Token::Ident(kw)) if kw == "default" => {
            cur.advance();
            cur.expect(Token::LParen)?;
            let r = parse_chanref(cur)?;
            cur.expect(Token::RParen)?;
            Ok(TemplateExpr::Default(r))
        }
        Some(Token::Ident(name)) if !is_reserved(name) => {
            let name = cur.expect_ident("variable name")?;
            Ok(TemplateExpr::Var(name))
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

/// Render a template back to its textual form. `parse_handler` of the
/// output reproduces the template.
pub fn print_handler(stmt: &TemplateStmt) -> String {
    let mut out = String::new();
    write_seq(&mut out, stmt, 0);
    out
}

fn write_seq(out: &mut String, stmt: &TemplateStmt, level: usize) {
    let mut items = Vec::new();
    let mut cur = stmt;
    while let TemplateStmt::Seq(a, b) = cur {
        items.push(a.as_ref());
        cur = b.as_ref();
    }
    items.push(cur);
    for (idx, s) in items.iter().enumerate() {
        if idx > 0 {
            out.push_str(";\n");
        }
        for _ in 0..level {
            out.push_str("    ");
        }
        write_stmt(out, s, level);
    }
}

fn write_stmt(out: &mut String, stmt: &TemplateStmt, level: usize) {
    use std::fmt::Write;
    match stmt {
        TemplateStmt::Skip => out.push_str("skip"),
        TemplateStmt::Assign(x, e) => {
            let _ = write!(out, "{x} := {}", expr_text(e));
        }
        TemplateStmt::Seq(_, _) => write_seq(out, stmt, level),
        TemplateStmt::If(c, t, e) => {
            let _ = writeln!(out, "if {} then {{", cond_text(c));
            write_seq(out, t, level + 1);
            out.push('\n');
            for _ in 0..level {
                out.push_str("    ");
            }
            out.push('}');
            if !matches!(e.as_ref(), TemplateStmt::Skip) {
                out.push_str(" else {\n");
                write_seq(out, e, level + 1);
                out.push('\n');
                for _ in 0..level {
                    out.push_str("    ");
                }
                out.push('}');
            }
        }
        TemplateStmt::While(c, body) => {
            let _ = writeln!(out, "while {} do {{", cond_text(c));
            write_seq(out, body, level + 1);
            out.push('\n');
            for _ in 0..level {
                out.push_str("    ");
            }
            out.push('}');
        }
        TemplateStmt::Input { var, channel } => {
            let _ = write!(out, "input {var} from {}", chan_text(channel));
        }
        TemplateStmt::MapSend {
            expr,
            channel,
            pred,
        } => {
            let _ = write!(
                out,
                "map({}, {}, {})",
                expr_text(expr),
                chan_text(channel),
                pred_text(pred)
            );
        }
        TemplateStmt::Wake(p) => {
            let _ = write!(out, "wake({})", pred_text(p));
        }
        TemplateStmt::CloneExec { pred } => {
            let _ = write!(out, "clone({}, PRIV_TM, PRIV_TR)", pred_text(pred));
        }
        TemplateStmt::Retrieve { var, exec, channel } => {
            let _ = write!(
                out,
                "retrieve {var} from {} on {}",
                exec_text(exec),
                chan_text(channel)
            );
        }
        TemplateStmt::Output { expr, channel } => {
            let _ = write!(out, "output {} to {}", expr_text(expr), chan_text(channel));
        }
        TemplateStmt::Clean { channel, pred } => {
            let _ = write!(out, "clean({}, {})", chan_text(channel), pred_text(pred));
        }
    }
}

fn chan_text(r: &ChanRef) -> String {
    match r {
        ChanRef::Requested => "c".to_string(),
        ChanRef::Named(n) => n.clone(),
    }
}

fn exec_text(r: &ExecRef) -> String {
    match r {
        ExecRef::Requester => "i".to_string(),
        ExecRef::Index(n) => n.to_string(),
    }
}

fn pred_text(p: &TemplatePred) -> String {
    match p {
        TemplatePred::CanTell(r) => format!("canTell({})", chan_text(r)),
        TemplatePred::IsReady(r) => format!("isReady({})", chan_text(r)),
        TemplatePred::Identical(r) => format!("identical({})", exec_text(r)),
        TemplatePred::IsWaitingInput => "isWaitingInput".to_string(),
        TemplatePred::IsWaitingOutput => "isWaitingOutput".to_string(),
        TemplatePred::Not(inner) => format!("!{}", pred_text(inner)),
    }
}

fn cond_text(c: &TemplateCond) -> String {
    match c {
        TemplateCond::Priv {
            side,
            privilege,
            exec,
            channel,
        } => {
            let p = match privilege {
                Privilege::Ask => "ask",
                Privilege::Tell => "tell",
            };
            let t = match side {
                TableSide::Map => "TM",
                TableSide::Reduce => "TR",
            };
            format!("{p} in {t}[{}][{}]", exec_text(exec), chan_text(channel))
        }
        TemplateCond::LevelIs(r, level) => format!("level({}) == {level}", chan_text(r)),
        TemplateCond::RequesterIs(n) => format!("i == {n}"),
        TemplateCond::Expr(e) => expr_text(e),
        TemplateCond::Not(inner) => format!("!({})", cond_text(inner)),
        TemplateCond::And(a, b) => format!("{} && {}", cond_text(a), cond_text(b)),
    }
}

fn expr_text(e: &TemplateExpr) -> String {
    expr_text_prec(e, 0)
}

fn expr_strength(e: &TemplateExpr) -> u8 {
    match e {
        TemplateExpr::Lit(_) | TemplateExpr::Var(_) | TemplateExpr::Default(_) => 6,
        TemplateExpr::Unary(_, _) => 5,
        TemplateExpr::Binary(BinOp::Add | BinOp::Monus, _, _) => 4,
        TemplateExpr::Binary(_, _, _) => 3,
    }
}

fn expr_text_prec(e: &TemplateExpr, min: u8) -> String {
    let s = expr_strength(e);
    let body = match e {
        TemplateExpr::Lit(v) => v.to_string(),
        TemplateExpr::Var(x) => x.clone(),
        TemplateExpr::Default(r) => format!("default({})", chan_text(r)),
        TemplateExpr::Unary(UnOp::Not, inner) => format!("!{}", expr_text_prec(inner, 5)),
        TemplateExpr::Binary(op, lhs, rhs) => {
            let text = match op {
                BinOp::Add => "+",
                BinOp::Monus => "-",
                BinOp::Eq => "==",
                BinOp::Lt => "<",
                BinOp::And => "&&",
                BinOp::Or => "||",
            };
            let (lmin, rmin) = match op {
                BinOp::Eq | BinOp::Lt => (s + 1, s + 1),
                _ => (s, s + 1),
            };
            format!(
                "{} {text} {}",
                expr_text_prec(lhs, lmin),
                expr_text_prec(rhs, rmin)
            )
        }
    };
    if s < min {
        format!("({body})")
    } else {
        body
    }
}

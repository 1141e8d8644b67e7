//! Seeded random program generation, used by the grammar round-trip
//! properties. Generated statements are in canonical form (right-nested
//! sequences), which is exactly what the parser produces.

use crate::lang::ast::{BinOp, Expr, Stmt, UnOp};
use crate::lang::value::Value;
use crate::rng::SplitMix64;

const VARS: &[&str] = &["x", "y", "z", "h1", "h2", "l1", "l2", "acc", "flag"];
const IN_CHANNELS: &[&str] = &["cH1", "cH2", "cL1", "cL2"];
const OUT_CHANNELS: &[&str] = &["cH3", "cL3"];

pub fn gen_expr(rng: &mut SplitMix64, depth: usize) -> Expr {
    if depth == 0 || rng.next_below(3) == 0 {
        return match rng.next_below(3) {
            0 => Expr::Lit(Value::Bool(rng.next_bool())),
            1 => Expr::Lit(Value::Int(rng.next_below(10) as u64)),
            _ => Expr::var(*rng.choose(VARS)),
        };
    }
    match rng.next_below(7) {
        0 => Expr::Unary(UnOp::Not, Box::new(gen_expr(rng, depth - 1))),
        1 => bin(rng, BinOp::Add, depth),
        2 => bin(rng, BinOp::Monus, depth),
        3 => bin(rng, BinOp::Eq, depth),
        4 => bin(rng, BinOp::Lt, depth),
        5 => bin(rng, BinOp::And, depth),
        _ => bin(rng, BinOp::Or, depth),
    }
}

fn bin(rng: &mut SplitMix64, op: BinOp, depth: usize) -> Expr {
    Expr::bin(op, gen_expr(rng, depth - 1), gen_expr(rng, depth - 1))
}

/// Generate a statement in canonical form: sequences are right-nested and
/// never appear as the first element of another sequence, matching the shape
/// the parser builds.
pub fn gen_stmt(rng: &mut SplitMix64, depth: usize) -> Stmt {
    if depth == 0 {
        return gen_leaf(rng);
    }
    if rng.next_below(3) == 0 {
        let len = 2 + rng.next_below(3);
        let stmts = (0..len).map(|_| gen_item(rng, depth - 1)).collect();
        Stmt::seq_all(stmts)
    } else {
        gen_item(rng, depth)
    }
}

/// A statement that is not itself a sequence (but may contain sequences
/// inside `if`/`while` blocks).
fn gen_item(rng: &mut SplitMix64, depth: usize) -> Stmt {
    if depth == 0 {
        return gen_leaf(rng);
    }
    match rng.next_below(6) {
        0 | 1 => Stmt::If(
            gen_expr(rng, 2),
            Box::new(gen_stmt(rng, depth - 1)),
            Box::new(if rng.next_bool() {
                gen_stmt(rng, depth - 1)
            } else {
                Stmt::Skip
            }),
        ),
        2 => Stmt::While(gen_expr(rng, 2), Box::new(gen_stmt(rng, depth - 1))),
        _ => gen_leaf(rng),
    }
}

fn gen_leaf(rng: &mut SplitMix64) -> Stmt {
    match rng.next_below(4) {
        0 => Stmt::Skip,
        1 => Stmt::Assign((*rng.choose(VARS)).to_string(), gen_expr(rng, 2)),
        2 => Stmt::Input {
            var: (*rng.choose(VARS)).to_string(),
            channel: (*rng.choose(IN_CHANNELS)).to_string(),
        },
        _ => Stmt::Output {
            expr: gen_expr(rng, 2),
            channel: (*rng.choose(OUT_CHANNELS)).to_string(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parser::parse_program;
    use crate::lang::pretty::pretty_program;

    #[test]
    fn generated_programs_round_trip() {
        let mut rng = SplitMix64::new(0xABCD);
        for _ in 0..200 {
            let p = gen_stmt(&mut rng, 3);
            let printed = pretty_program(&p);
            let reparsed = parse_program(&printed)
                .unwrap_or_else(|e| panic!("failed to reparse:\n{printed}\n{e}"));
            assert_eq!(reparsed, p, "round trip mismatch for:\n{printed}");
        }
    }
}

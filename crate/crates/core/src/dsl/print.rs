//! Pretty-printer for machines and expressions. Output re-parses to an equal AST.

use std::fmt::Write;

use super::ast::*;

const L_IFF: u8 = 0;
const L_IMPLIES: u8 = 1;
const L_OR: u8 = 2;
const L_AND: u8 = 3;
const L_NOT: u8 = 4;
const L_CMP: u8 = 5;
const L_ADD: u8 = 6;
const L_MUL: u8 = 7;
const L_NEG: u8 = 8;
const L_ATOM: u8 = 9;

fn level(e: &Expr) -> u8 {
    use BinOp::*;
    match &e.kind {
        ExprKind::Binary(op, ..) => match op {
            Iff => L_IFF,
            Implies => L_IMPLIES,
            Or => L_OR,
            And => L_AND,
            Eq | Ne | Lt | Le | Gt | Ge | In | NotIn | Subset => L_CMP,
            Add | Sub | Union => L_ADD,
            Mul | Div | Mod | Inter => L_MUL,
        },
        ExprKind::Unary(UnOp::Not, _) => L_NOT,
        ExprKind::Unary(UnOp::Neg, _) => L_NEG,
        ExprKind::Int(n) if *n < 0 => L_NEG,
        // The else-branch extends as far as possible, so nested conditionals need parentheses.
        ExprKind::If(..) => L_IFF,
        _ => L_ATOM,
    }
}

pub fn expr_to_string(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e, 0);
    s
}

fn write_expr(out: &mut String, e: &Expr, min: u8) {
    let lvl = level(e);
    if lvl < min || (matches!(e.kind, ExprKind::If(..)) && min > 0) {
        out.push('(');
        write_expr(out, e, 0);
        out.push(')');
        return;
    }
    match &e.kind {
        ExprKind::Int(n) => {
            let _ = write!(out, "{n}");
        }
        ExprKind::Bool(b) => out.push_str(if *b { "TRUE" } else { "FALSE" }),
        ExprKind::Ident(n) => out.push_str(n),
        ExprKind::SetLit(items) => {
            out.push('{');
            for (i, it) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_expr(out, it, L_ADD);
            }
            out.push('}');
        }
        ExprKind::Unary(UnOp::Not, a) => {
            out.push_str("not ");
            write_expr(out, a, L_NOT);
        }
        ExprKind::Unary(UnOp::Neg, a) => {
            out.push('-');
            // `- -x` must not lex as a single token sequence that folds differently.
            let inner = if matches!(a.kind, ExprKind::Int(_)) { L_ATOM + 1 } else { L_NEG };
            write_expr(out, a, inner);
        }
        ExprKind::Binary(op, a, b) => {
            let (lmin, rmin) = match lvl {
                L_IFF => (L_IMPLIES, L_IMPLIES),
                L_IMPLIES => (L_OR, L_IMPLIES),
                L_CMP => (L_ADD, L_ADD),
                l => (l, l + 1),
            };
            write_expr(out, a, lmin);
            let _ = write!(out, " {} ", op.symbol());
            write_expr(out, b, rmin);
        }
        ExprKind::Call(f, args) => {
            out.push_str(f.name());
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_expr(out, a, 0);
            }
            out.push(')');
        }
        ExprKind::If(c, t, f) => {
            out.push_str("if ");
            write_expr(out, c, 0);
            out.push_str(" then ");
            write_expr(out, t, 0);
            out.push_str(" else ");
            write_expr(out, f, 0);
        }
    }
}

fn type_to_string(t: &TypeExpr) -> String {
    match t {
        TypeExpr::Range(lo, hi) => {
            let mut s = String::new();
            write_expr(&mut s, lo, L_ADD);
            s.push_str("..");
            write_expr(&mut s, hi, L_ADD);
            s
        }
        TypeExpr::Bool => "BOOL".into(),
        TypeExpr::Carrier(c) => c.clone(),
        TypeExpr::Pow(c) => format!("POW({c})"),
        TypeExpr::Unbounded(kw) => kw.clone(),
    }
}

fn params_to_string(ps: &[Param]) -> String {
    ps.iter().map(|p| format!("{} : {}", p.name, type_to_string(&p.ty))).collect::<Vec<_>>().join(", ")
}

fn write_actions(out: &mut String, actions: &[Action], indent: usize) {
    let pad = " ".repeat(indent);
    for a in actions {
        match a {
            Action::Assign { target, value } => {
                let _ = writeln!(out, "{pad}{target} := {}", expr_to_string(value));
            }
            Action::Choice { params, guard, body } => {
                let _ = write!(out, "{pad}any {}", params_to_string(params));
                if let Some(g) = guard {
                    let _ = write!(out, " where {}", expr_to_string(g));
                }
                out.push_str(" then\n");
                write_actions(out, body, indent + 2);
                let _ = writeln!(out, "{pad}end");
            }
        }
    }
}

fn write_event(out: &mut String, ev: &EventAst) {
    let _ = writeln!(out, "  {}", ev.name);
    if let Some(s) = ev.status {
        let _ = writeln!(out, "    status {s}");
    }
    if let Some(r) = &ev.refines {
        let _ = writeln!(out, "    refines {r}");
    }
    if !ev.params.is_empty() {
        let _ = writeln!(out, "    any {}", params_to_string(&ev.params));
    }
    if let Some(g) = &ev.guard {
        let _ = writeln!(out, "    when {}", expr_to_string(g));
    }
    if !ev.actions.is_empty() {
        out.push_str("    then\n");
        write_actions(out, &ev.actions, 6);
    }
    out.push_str("  end\n");
}

pub fn machine_to_string(m: &MachineAst) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "machine {}", m.name);
    if let Some(r) = &m.refines {
        let _ = writeln!(out, "refines {r}");
    }
    for c in &m.carriers {
        let _ = writeln!(out, "sets {} = {{{}}}", c.name, c.elements.join(", "));
    }
    if !m.constants.is_empty() {
        out.push_str("constants\n");
        for c in &m.constants {
            let _ = writeln!(out, "  {} = {}", c.name, expr_to_string(&c.value));
        }
    }
    if !m.variables.is_empty() {
        out.push_str("variables\n");
        for v in &m.variables {
            let _ = writeln!(out, "  {} : {}", v.name, type_to_string(&v.ty));
        }
    }
    if let Some(i) = &m.invariant {
        let _ = writeln!(out, "invariant\n  {}", expr_to_string(i));
    }
    if let Some(v) = &m.variant {
        let _ = writeln!(out, "variant\n  {}", expr_to_string(v));
    }
    if let Some(l) = &m.linking {
        let _ = writeln!(out, "linking\n  {}", expr_to_string(l));
    }
    out.push_str("events\n");
    write_event(&mut out, &m.init);
    for ev in &m.events {
        write_event(&mut out, ev);
    }
    out.push_str("end\n");
    out
}

#[cfg(test)]
mod tests {
    use super::super::parser::{parse_expr, parse_machine_syntax};
    use super::*;

    #[test]
    fn expr_round_trip() {
        for src in [
            "a & b or c => d",
            "a => b => c",
            "(a => b) => c",
            "a <=> b & c",
            "x - (y - z) = 1",
            "card(s - {c}) + 1 <= max(x, 2) * 3",
            "not a = b",
            "(if b = TRUE then 1 else 0) + 1",
            "if b = TRUE then 1 else 0 + 1",
            "x = -3",
            "-(x + 1) = 2",
            "e : s \\/ {c} /\\ t",
        ] {
            let e = parse_expr(src).unwrap();
            let printed = expr_to_string(&e);
            assert_eq!(parse_expr(&printed).unwrap(), e, "{src} printed as {printed}");
        }
    }

    #[test]
    fn machine_round_trip() {
        let src = "machine M refines A sets S = {p, q} constants k = 2 variables x : 0..k s : POW(S) \
                   invariant x <= k variant k - x linking s = t \
                   events init then x := 0 s := {} end \
                   e status convergent refines f any y : 1..2 when x + y <= k then x := x + y || any z : S where z /: s then s := s \\/ {z} end end end";
        let m = parse_machine_syntax(src).unwrap();
        let printed = machine_to_string(&m);
        assert_eq!(parse_machine_syntax(&printed).unwrap(), m, "{printed}");
    }
}

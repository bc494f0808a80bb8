//! Recursive-descent parser for `.eb` machine files.
//!
//! ```text
//! machine VM2
//! refines VM1
//! sets ITEM = {choc, biscuit}
//! constants maxCredit = 3
//! variables
//!   credit : 0..maxCredit
//!   chosen : POW(ITEM)
//!   refundEnabled : BOOL
//! invariant chosen <: ITEM
//! variant if refundEnabled = FALSE then 0 else 1
//! events
//!   init then credit := 0  chosen := {}  refundEnabled := FALSE end
//!   pay
//!     status anticipated
//!     any x : 1..3
//!     then credit := min(credit + x, maxCredit) || refundEnabled := FALSE
//!   end
//! end
//! ```
//!
//! Predicates written one after another inside a clause are conjoined.

use super::ast::*;
use super::lexer::{tokenize, Cursor, Tok};
use super::{ParseError, Span};

pub const RESERVED: &[&str] = &[
    "machine", "refines", "sets", "constants", "variables", "invariant", "invariants", "variant",
    "linking", "events", "event", "status", "any", "when", "where", "with", "then", "begin", "end",
    "init", "if", "else", "or", "and", "not", "mod", "TRUE", "FALSE", "BOOL", "POW", "card", "min",
    "max", "INT", "NAT", "NAT1", "INTEGER", "NATURAL", "NATURAL1",
];

fn is_reserved(w: &str) -> bool {
    RESERVED.contains(&w)
}

pub fn parse_machine_syntax(src: &str) -> Result<MachineAst, ParseError> {
    let mut p = MachineParser { c: Cursor::new(tokenize(src)?) };
    let m = p.machine()?;
    if !matches!(p.c.peek(), Tok::Eof) {
        return Err(p.c.unexpected("end of input after the closing `end`"));
    }
    Ok(m)
}

/// Parse a standalone predicate or expression (used for linking strings in chain manifests).
pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let mut p = MachineParser { c: Cursor::new(tokenize(src)?) };
    let preds = p.predicates()?;
    if !matches!(p.c.peek(), Tok::Eof) {
        return Err(p.c.unexpected("end of expression"));
    }
    Expr::conjoin(preds).ok_or_else(|| ParseError::new(Span::default(), "empty expression"))
}

struct MachineParser {
    c: Cursor,
}

impl MachineParser {
    fn ident(&mut self, what: &str) -> Result<(String, Span), ParseError> {
        match self.c.peek().clone() {
            Tok::Ident(w) if !is_reserved(&w) => {
                let span = self.c.bump().span;
                Ok((w, span))
            }
            _ => Err(self.c.unexpected(what)),
        }
    }

    fn at_expr_start(&self) -> bool {
        match self.c.peek() {
            Tok::Int(_) => true,
            Tok::Ident(w) => {
                !is_reserved(w) || matches!(w.as_str(), "TRUE" | "FALSE" | "card" | "min" | "max" | "if" | "not")
            }
            Tok::Sym(s) => matches!(*s, "(" | "{" | "-" | "!"),
            Tok::Eof => false,
        }
    }

    fn machine(&mut self) -> Result<MachineAst, ParseError> {
        self.c.expect_word("machine")?;
        let (name, _) = self.ident("machine name")?;
        let mut m = MachineAst {
            name,
            refines: None,
            carriers: vec![],
            constants: vec![],
            variables: vec![],
            invariant: None,
            variant: None,
            linking: None,
            init: EventAst {
                name: "init".into(),
                status: None,
                refines: None,
                params: vec![],
                guard: None,
                actions: vec![],
            },
            events: vec![],
        };
        let mut saw_init = false;
        loop {
            match self.c.peek().clone() {
                Tok::Ident(w) => match w.as_str() {
                    "refines" => {
                        self.c.bump();
                        m.refines = Some(self.ident("abstract machine name")?.0);
                    }
                    "sets" => {
                        self.c.bump();
                        while matches!(self.c.peek(), Tok::Ident(w) if !is_reserved(w)) {
                            let (name, _) = self.ident("carrier set name")?;
                            self.c.expect_sym("=")?;
                            self.c.expect_sym("{")?;
                            let mut elements = vec![];
                            if !self.c.at_sym("}") {
                                loop {
                                    elements.push(self.ident("set element")?.0);
                                    if !self.c.eat_sym(",") {
                                        break;
                                    }
                                }
                            }
                            self.c.expect_sym("}")?;
                            m.carriers.push(Carrier { name, elements });
                        }
                    }
                    "constants" => {
                        self.c.bump();
                        while matches!(self.c.peek(), Tok::Ident(w) if !is_reserved(w)) {
                            let (name, _) = self.ident("constant name")?;
                            self.c.expect_sym("=")?;
                            let value = self.expr()?;
                            m.constants.push(Constant { name, value });
                        }
                    }
                    "variables" => {
                        self.c.bump();
                        while matches!(self.c.peek(), Tok::Ident(w) if !is_reserved(w)) {
                            let (name, _) = self.ident("variable name")?;
                            self.c.expect_sym(":")?;
                            let ty = self.type_expr()?;
                            m.variables.push(VarDecl { name, ty });
                        }
                    }
                    "invariant" | "invariants" => {
                        self.c.bump();
                        let preds = self.predicates()?;
                        m.invariant = and_opt(m.invariant.take(), Expr::conjoin(preds));
                    }
                    "variant" => {
                        self.c.bump();
                        m.variant = Some(self.expr()?);
                    }
                    "linking" => {
                        self.c.bump();
                        let preds = self.predicates()?;
                        m.linking = and_opt(m.linking.take(), Expr::conjoin(preds));
                    }
                    "events" => {
                        self.c.bump();
                        break;
                    }
                    _ => return Err(self.c.unexpected("a machine clause or `events`")),
                },
                _ => return Err(self.c.unexpected("a machine clause or `events`")),
            }
        }
        loop {
            self.c.eat_word("event");
            match self.c.peek().clone() {
                Tok::Ident(w) if w == "end" => {
                    self.c.bump();
                    break;
                }
                Tok::Ident(w) if w == "init" => {
                    let span = self.c.bump().span;
                    if saw_init {
                        return Err(ParseError::new(span, "duplicate `init` event"));
                    }
                    saw_init = true;
                    m.init = self.event_body("init".into())?;
                }
                Tok::Ident(w) if !is_reserved(&w) => {
                    self.c.bump();
                    let ev = self.event_body(w)?;
                    m.events.push(ev);
                }
                _ => return Err(self.c.unexpected("an event name or `end`")),
            }
        }
        if !saw_init && !m.variables.is_empty() {
            return Err(ParseError::new(self.c.span(), "machine has variables but no `init` event"));
        }
        Ok(m)
    }

    fn event_body(&mut self, name: String) -> Result<EventAst, ParseError> {
        let mut ev = EventAst { name, status: None, refines: None, params: vec![], guard: None, actions: vec![] };
        loop {
            if self.c.eat_word("status") {
                let span = self.c.span();
                let (w, _) = match self.c.peek().clone() {
                    Tok::Ident(w) => {
                        self.c.bump();
                        (w, span)
                    }
                    _ => return Err(self.c.unexpected("an event status")),
                };
                ev.status = Some(match w.as_str() {
                    "ordinary" => Status::Ordinary,
                    "anticipated" => Status::Anticipated,
                    "convergent" => Status::Convergent,
                    other => {
                        return Err(ParseError::new(
                            span,
                            format!("unknown status `{other}` (expected ordinary, anticipated or convergent)"),
                        ))
                    }
                });
            } else if self.c.eat_word("refines") {
                ev.refines = Some(self.ident("abstract event name")?.0);
            } else if self.c.eat_word("any") {
                ev.params.extend(self.params()?);
            } else if self.c.at_word("when") || self.c.at_word("where") {
                self.c.bump();
                let preds = self.predicates()?;
                ev.guard = and_opt(ev.guard.take(), Expr::conjoin(preds));
            } else if self.c.at_word("then") || self.c.at_word("begin") {
                self.c.bump();
                ev.actions.extend(self.actions()?);
            } else if self.c.eat_word("end") {
                return Ok(ev);
            } else if matches!(self.c.peek(), Tok::Ident(w) if !is_reserved(w)) && matches!(self.c.peek_at(1), Tok::Sym(":=")) {
                // `init x := 0 ... end` without `then`
                ev.actions.extend(self.actions()?);
            } else {
                return Err(self.c.unexpected(&format!("an event clause or `end` in event `{}`", ev.name)));
            }
        }
    }

    fn params(&mut self) -> Result<Vec<Param>, ParseError> {
        let mut out = vec![];
        loop {
            let (name, span) = self.ident("parameter name")?;
            if !self.c.eat_sym(":") {
                return Err(ParseError::new(
                    span,
                    format!("parameter `{name}` needs a finite type, e.g. `{name} : 1..3`"),
                ));
            }
            let ty = self.type_expr()?;
            out.push(Param { name, ty });
            if !self.c.eat_sym(",") {
                return Ok(out);
            }
        }
    }

    fn actions(&mut self) -> Result<Vec<Action>, ParseError> {
        let mut out = vec![];
        loop {
            self.c.eat_sym("||");
            if self.c.eat_word("any") {
                let params = self.params()?;
                let guard = if self.c.at_word("where") || self.c.at_word("when") {
                    self.c.bump();
                    Expr::conjoin(self.predicates()?)
                } else {
                    None
                };
                self.c.expect_word("then")?;
                let body = self.actions()?;
                self.c.expect_word("end")?;
                out.push(Action::Choice { params, guard, body });
                continue;
            }
            match (self.c.peek().clone(), self.c.peek_at(1).clone()) {
                (Tok::Ident(w), Tok::Sym(":=")) if !is_reserved(&w) => {
                    self.c.bump();
                    self.c.bump();
                    let value = self.expr()?;
                    out.push(Action::Assign { target: w, value });
                }
                _ => return Ok(out),
            }
        }
    }

    fn type_expr(&mut self) -> Result<TypeExpr, ParseError> {
        if self.c.eat_word("BOOL") {
            return Ok(TypeExpr::Bool);
        }
        if self.c.eat_word("POW") {
            self.c.expect_sym("(")?;
            let (name, _) = self.ident("carrier set name")?;
            self.c.expect_sym(")")?;
            return Ok(TypeExpr::Pow(name));
        }
        for kw in ["INT", "NAT", "NAT1", "INTEGER", "NATURAL", "NATURAL1"] {
            if self.c.eat_word(kw) {
                return Ok(TypeExpr::Unbounded(kw.into()));
            }
        }
        if let Tok::Ident(w) = self.c.peek().clone() {
            if !is_reserved(&w) && !matches!(self.c.peek_at(1), Tok::Sym("..")) {
                self.c.bump();
                return Ok(TypeExpr::Carrier(w));
            }
        }
        let lo = self.additive()?;
        self.c.expect_sym("..")?;
        let hi = self.additive()?;
        Ok(TypeExpr::Range(lo, hi))
    }

    fn predicates(&mut self) -> Result<Vec<Expr>, ParseError> {
        let mut out = vec![];
        while self.at_expr_start() {
            out.push(self.expr()?);
            self.c.eat_sym(",");
        }
        if out.is_empty() {
            return Err(self.c.unexpected("a predicate"));
        }
        Ok(out)
    }

    pub fn expr(&mut self) -> Result<Expr, ParseError> {
        let lhs = self.implication()?;
        if self.c.at_sym("<=>") {
            self.c.bump();
            let rhs = self.implication()?;
            return Ok(Expr::binary(BinOp::Iff, lhs, rhs));
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Expr, ParseError> {
        let lhs = self.disjunction()?;
        if self.c.eat_sym("=>") {
            let rhs = self.implication()?;
            return Ok(Expr::binary(BinOp::Implies, lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.conjunction()?;
        while self.c.eat_word("or") || self.c.eat_sym("|") {
            let rhs = self.conjunction()?;
            lhs = Expr::binary(BinOp::Or, lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.negation()?;
        while self.c.eat_sym("&") || self.c.eat_word("and") {
            let rhs = self.negation()?;
            lhs = Expr::binary(BinOp::And, lhs, rhs);
        }
        Ok(lhs)
    }

    fn negation(&mut self) -> Result<Expr, ParseError> {
        let span = self.c.span();
        if self.c.eat_word("not") || self.c.eat_sym("!") {
            let e = self.negation()?;
            return Ok(Expr::new(ExprKind::Unary(UnOp::Not, Box::new(e)), span));
        }
        self.comparison()
    }

    fn comparison(&mut self) -> Result<Expr, ParseError> {
        let lhs = self.additive()?;
        let op = match self.c.peek() {
            Tok::Sym("=") => BinOp::Eq,
            Tok::Sym("/=") => BinOp::Ne,
            Tok::Sym("<") => BinOp::Lt,
            Tok::Sym("<=") => BinOp::Le,
            Tok::Sym(">") => BinOp::Gt,
            Tok::Sym(">=") => BinOp::Ge,
            Tok::Sym(":") => BinOp::In,
            Tok::Sym("/:") => BinOp::NotIn,
            Tok::Sym("<:") => BinOp::Subset,
            _ => return Ok(lhs),
        };
        self.c.bump();
        let rhs = self.additive()?;
        Ok(Expr::binary(op, lhs, rhs))
    }

    fn additive(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.multiplicative()?;
        loop {
            let op = match self.c.peek() {
                Tok::Sym("+") => BinOp::Add,
                Tok::Sym("-") => BinOp::Sub,
                Tok::Sym("\\/") => BinOp::Union,
                _ => return Ok(lhs),
            };
            self.c.bump();
            let rhs = self.multiplicative()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn multiplicative(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.c.peek() {
                Tok::Sym("*") => BinOp::Mul,
                Tok::Sym("/") => BinOp::Div,
                Tok::Sym("/\\") => BinOp::Inter,
                Tok::Ident(w) if w == "mod" => BinOp::Mod,
                _ => return Ok(lhs),
            };
            self.c.bump();
            let rhs = self.unary()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        let span = self.c.span();
        if self.c.eat_sym("-") {
            let e = self.unary()?;
            if let ExprKind::Int(n) = e.kind {
                return Ok(Expr::new(ExprKind::Int(-n), span));
            }
            return Ok(Expr::new(ExprKind::Unary(UnOp::Neg, Box::new(e)), span));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let span = self.c.span();
        match self.c.peek().clone() {
            Tok::Int(n) => {
                self.c.bump();
                Ok(Expr::new(ExprKind::Int(n), span))
            }
            Tok::Sym("(") => {
                self.c.bump();
                let e = self.expr()?;
                self.c.expect_sym(")")?;
                Ok(e)
            }
            Tok::Sym("{") => {
                self.c.bump();
                let mut items = vec![];
                if !self.c.at_sym("}") {
                    loop {
                        items.push(self.additive()?);
                        if !self.c.eat_sym(",") {
                            break;
                        }
                    }
                }
                self.c.expect_sym("}")?;
                Ok(Expr::new(ExprKind::SetLit(items), span))
            }
            Tok::Ident(w) => match w.as_str() {
                "TRUE" => {
                    self.c.bump();
                    Ok(Expr::new(ExprKind::Bool(true), span))
                }
                "FALSE" => {
                    self.c.bump();
                    Ok(Expr::new(ExprKind::Bool(false), span))
                }
                "card" | "min" | "max" => {
                    self.c.bump();
                    let f = match w.as_str() {
                        "card" => Builtin::Card,
                        "min" => Builtin::Min,
                        _ => Builtin::Max,
                    };
                    self.c.expect_sym("(")?;
                    let mut args = vec![self.expr()?];
                    while self.c.eat_sym(",") {
                        args.push(self.expr()?);
                    }
                    self.c.expect_sym(")")?;
                    if args.len() != f.arity() {
                        return Err(ParseError::new(
                            span,
                            format!("`{}` takes {} argument(s), got {}", f.name(), f.arity(), args.len()),
                        ));
                    }
                    Ok(Expr::new(ExprKind::Call(f, args), span))
                }
                "if" => {
                    self.c.bump();
                    let c = self.expr()?;
                    self.c.expect_word("then")?;
                    let t = self.expr()?;
                    self.c.expect_word("else")?;
                    let e = self.expr()?;
                    Ok(Expr::new(ExprKind::If(Box::new(c), Box::new(t), Box::new(e)), span))
                }
                _ if !is_reserved(&w) => {
                    self.c.bump();
                    Ok(Expr::new(ExprKind::Ident(w), span))
                }
                _ => Err(self.c.unexpected("an expression")),
            },
            _ => Err(self.c.unexpected("an expression")),
        }
    }
}

fn and_opt(a: Option<Expr>, b: Option<Expr>) -> Option<Expr> {
    match (a, b) {
        (Some(a), Some(b)) => Some(Expr::binary(BinOp::And, a, b)),
        (a, None) => a,
        (None, b) => b,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn juxtaposed_predicates_conjoin() {
        let e = parse_expr("x = 1 y = 2").unwrap();
        assert!(matches!(e.kind, ExprKind::Binary(BinOp::And, _, _)));
    }

    #[test]
    fn precedence() {
        let e = parse_expr("a & b or c => d").unwrap();
        // ((a & b) or c) => d
        let ExprKind::Binary(BinOp::Implies, lhs, _) = e.kind else { panic!() };
        let ExprKind::Binary(BinOp::Or, l2, _) = lhs.kind else { panic!() };
        assert!(matches!(l2.kind, ExprKind::Binary(BinOp::And, _, _)));
    }

    #[test]
    fn set_difference_and_membership() {
        let e = parse_expr("biscuit /: chosen - {biscuit}").unwrap();
        let ExprKind::Binary(BinOp::NotIn, _, rhs) = e.kind else { panic!() };
        assert!(matches!(rhs.kind, ExprKind::Binary(BinOp::Sub, _, _)));
    }

    #[test]
    fn missing_end_reports_eof() {
        let err = parse_machine_syntax("machine M variables b : BOOL events init then b := TRUE end").unwrap_err();
        assert!(err.message.contains("end of input"), "{err}");
    }
}

//! Name resolution and typing for machines.

use std::collections::{BTreeMap, BTreeSet};

use super::ast::*;
use super::{ErrorKind, ParseError, Span};

/// Finite value domain of a variable or parameter.
#[derive(Debug, Clone, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Domain {
    Int { min: i64, max: i64 },
    Bool,
    Elem { carrier: String },
    Set { carrier: String },
}

/// Static type of an expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ty {
    Int,
    Bool,
    Elem(String),
    Set(String),
    /// `{}`: compatible with every set type.
    EmptySet,
}

impl Ty {
    fn describe(&self) -> String {
        match self {
            Ty::Int => "integer".into(),
            Ty::Bool => "boolean".into(),
            Ty::Elem(c) => format!("element of {c}"),
            Ty::Set(c) => format!("subset of {c}"),
            Ty::EmptySet => "empty set".into(),
        }
    }

    fn compatible(&self, other: &Ty) -> bool {
        match (self, other) {
            (Ty::EmptySet, Ty::Set(_) | Ty::EmptySet) | (Ty::Set(_), Ty::EmptySet) => true,
            (a, b) => a == b,
        }
    }

    fn is_set(&self) -> bool {
        matches!(self, Ty::Set(_) | Ty::EmptySet)
    }
}

impl Domain {
    pub fn ty(&self) -> Ty {
        match self {
            Domain::Int { .. } => Ty::Int,
            Domain::Bool => Ty::Bool,
            Domain::Elem { carrier } => Ty::Elem(carrier.clone()),
            Domain::Set { carrier } => Ty::Set(carrier.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstValue {
    Int(i64),
    Bool(bool),
}

/// Resolved symbol table of a machine.
#[derive(Debug, Clone, Default)]
pub struct Symbols {
    pub carriers: BTreeMap<String, Vec<String>>,
    pub elem_carrier: BTreeMap<String, String>,
    pub constants: BTreeMap<String, ConstValue>,
    pub variables: BTreeMap<String, Domain>,
}

impl Symbols {
    pub fn resolve_type(&self, ty: &TypeExpr, span: Span) -> Result<Domain, ParseError> {
        match ty {
            TypeExpr::Bool => Ok(Domain::Bool),
            TypeExpr::Carrier(c) => {
                self.require_carrier(c, span)?;
                Ok(Domain::Elem { carrier: c.clone() })
            }
            TypeExpr::Pow(c) => {
                self.require_carrier(c, span)?;
                Ok(Domain::Set { carrier: c.clone() })
            }
            TypeExpr::Unbounded(kw) => Err(ParseError::with_kind(
                ErrorKind::Unbounded,
                span,
                format!("`{kw}` is unbounded; declare an explicit range such as `0..3`"),
            )),
            TypeExpr::Range(lo, hi) => {
                let (min, max) = (self.const_int(lo)?, self.const_int(hi)?);
                if min > max {
                    return Err(ParseError::with_kind(
                        ErrorKind::Type,
                        lo.span,
                        format!("empty range {min}..{max}"),
                    ));
                }
                Ok(Domain::Int { min, max })
            }
        }
    }

    fn require_carrier(&self, c: &str, span: Span) -> Result<(), ParseError> {
        if self.carriers.contains_key(c) {
            Ok(())
        } else {
            Err(ParseError::with_kind(ErrorKind::UnknownIdent, span, format!("unknown carrier set `{c}`")))
        }
    }

    /// Evaluate a constant integer expression (literals, constants, arithmetic).
    pub fn const_int(&self, e: &Expr) -> Result<i64, ParseError> {
        let err = |msg: String| ParseError::with_kind(ErrorKind::Type, e.span, msg);
        match &e.kind {
            ExprKind::Int(n) => Ok(*n),
            ExprKind::Ident(n) => match self.constants.get(n) {
                Some(ConstValue::Int(v)) => Ok(*v),
                Some(ConstValue::Bool(_)) => Err(err(format!("constant `{n}` is boolean, expected integer"))),
                None => Err(ParseError::with_kind(
                    ErrorKind::UnknownIdent,
                    e.span,
                    format!("`{n}` is not a constant"),
                )),
            },
            ExprKind::Unary(UnOp::Neg, a) => Ok(-self.const_int(a)?),
            ExprKind::Binary(op, a, b) => {
                let (a, b) = (self.const_int(a)?, self.const_int(b)?);
                match op {
                    BinOp::Add => Ok(a + b),
                    BinOp::Sub => Ok(a - b),
                    BinOp::Mul => Ok(a * b),
                    BinOp::Div if b != 0 => Ok(a.div_euclid(b)),
                    BinOp::Mod if b != 0 => Ok(a.rem_euclid(b)),
                    _ => Err(err(format!("`{}` is not allowed in a constant expression", op.symbol()))),
                }
            }
            ExprKind::Call(Builtin::Min, args) => Ok(self.const_int(&args[0])?.min(self.const_int(&args[1])?)),
            ExprKind::Call(Builtin::Max, args) => Ok(self.const_int(&args[0])?.max(self.const_int(&args[1])?)),
            _ => Err(err("expected a constant integer expression".into())),
        }
    }
}

fn dup(span: Span, what: &str, name: &str) -> ParseError {
    ParseError::with_kind(ErrorKind::Duplicate, span, format!("duplicate {what} `{name}`"))
}

/// Build the symbol table (carriers, constants, variable domains).
pub fn symbols(m: &MachineAst) -> Result<Symbols, ParseError> {
    let mut s = Symbols::default();
    let at = Span::default();
    let mut names: BTreeSet<&str> = BTreeSet::new();
    for c in &m.carriers {
        if !names.insert(&c.name) {
            return Err(dup(at, "name", &c.name));
        }
        let mut seen = BTreeSet::new();
        for e in &c.elements {
            if !seen.insert(e) || s.elem_carrier.contains_key(e) {
                return Err(dup(at, "set element", e));
            }
            if !names.insert(e) {
                return Err(dup(at, "name", e));
            }
            s.elem_carrier.insert(e.clone(), c.name.clone());
        }
        s.carriers.insert(c.name.clone(), c.elements.clone());
    }
    for c in &m.constants {
        if !names.insert(&c.name) {
            return Err(dup(c.value.span, "name", &c.name));
        }
        let v = match c.value.kind {
            ExprKind::Bool(b) => ConstValue::Bool(b),
            _ => ConstValue::Int(s.const_int(&c.value)?),
        };
        s.constants.insert(c.name.clone(), v);
    }
    for v in &m.variables {
        if !names.insert(&v.name) {
            return Err(dup(at, "name", &v.name));
        }
        let span = match &v.ty {
            TypeExpr::Range(lo, _) => lo.span,
            _ => at,
        };
        let d = s.resolve_type(&v.ty, span)?;
        s.variables.insert(v.name.clone(), d);
    }
    Ok(s)
}

struct Scope<'a> {
    syms: &'a Symbols,
    /// Variables of the abstract machine, visible only while checking `linking`.
    abstract_vars: Option<&'a BTreeMap<String, Domain>>,
    /// Abstract variables known but not in scope, for a better error message.
    hidden_abstract: Option<&'a BTreeMap<String, Domain>>,
    locals: Vec<(String, Domain)>,
}

impl Scope<'_> {
    fn lookup(&self, name: &str, span: Span) -> Result<Ty, ParseError> {
        if let Some((_, d)) = self.locals.iter().rev().find(|(n, _)| n == name) {
            return Ok(d.ty());
        }
        if let Some(d) = self.syms.variables.get(name) {
            return Ok(d.ty());
        }
        if let Some(d) = self.abstract_vars.and_then(|a| a.get(name)) {
            return Ok(d.ty());
        }
        if let Some(c) = self.syms.constants.get(name) {
            return Ok(match c {
                ConstValue::Int(_) => Ty::Int,
                ConstValue::Bool(_) => Ty::Bool,
            });
        }
        if let Some(c) = self.syms.elem_carrier.get(name) {
            return Ok(Ty::Elem(c.clone()));
        }
        if self.syms.carriers.contains_key(name) {
            return Ok(Ty::Set(name.to_string()));
        }
        if self.hidden_abstract.is_some_and(|a| a.contains_key(name)) {
            return Err(ParseError::with_kind(
                ErrorKind::UnknownIdent,
                span,
                format!("abstract variable `{name}` may only be referenced in the `linking` clause"),
            ));
        }
        Err(ParseError::with_kind(ErrorKind::UnknownIdent, span, format!("unknown identifier `{name}`")))
    }

    fn mismatch(span: Span, want: &str, got: &Ty) -> ParseError {
        ParseError::with_kind(
            ErrorKind::Type,
            span,
            format!("type mismatch: expected {want}, found {}", got.describe()),
        )
    }

    fn expect(&self, e: &Expr, want: &Ty) -> Result<(), ParseError> {
        let got = self.infer(e)?;
        if got.compatible(want) {
            Ok(())
        } else {
            Err(Self::mismatch(e.span, &want.describe(), &got))
        }
    }

    fn expect_set(&self, e: &Expr) -> Result<Ty, ParseError> {
        let t = self.infer(e)?;
        if t.is_set() {
            Ok(t)
        } else {
            Err(Self::mismatch(e.span, "a set", &t))
        }
    }

    fn infer(&self, e: &Expr) -> Result<Ty, ParseError> {
        match &e.kind {
            ExprKind::Int(_) => Ok(Ty::Int),
            ExprKind::Bool(_) => Ok(Ty::Bool),
            ExprKind::Ident(n) => self.lookup(n, e.span),
            ExprKind::SetLit(items) => {
                let mut carrier: Option<String> = None;
                for it in items {
                    match self.infer(it)? {
                        Ty::Elem(c) => {
                            if carrier.as_ref().is_some_and(|x| *x != c) {
                                return Err(Self::mismatch(
                                    it.span,
                                    &format!("element of {}", carrier.unwrap()),
                                    &Ty::Elem(c),
                                ));
                            }
                            carrier = Some(c);
                        }
                        t => return Err(Self::mismatch(it.span, "a carrier element", &t)),
                    }
                }
                Ok(carrier.map(Ty::Set).unwrap_or(Ty::EmptySet))
            }
            ExprKind::Unary(UnOp::Neg, a) => {
                self.expect(a, &Ty::Int)?;
                Ok(Ty::Int)
            }
            ExprKind::Unary(UnOp::Not, a) => {
                self.expect(a, &Ty::Bool)?;
                Ok(Ty::Bool)
            }
            ExprKind::Binary(op, a, b) => {
                use BinOp::*;
                match op {
                    Add | Mul | Div | Mod => {
                        self.expect(a, &Ty::Int)?;
                        self.expect(b, &Ty::Int)?;
                        Ok(Ty::Int)
                    }
                    Sub => {
                        let ta = self.infer(a)?;
                        if ta.is_set() {
                            let tb = self.expect_set(b)?;
                            merge_set(ta, tb, b.span)
                        } else {
                            self.expect(a, &Ty::Int)?;
                            self.expect(b, &Ty::Int)?;
                            Ok(Ty::Int)
                        }
                    }
                    Union | Inter => {
                        let ta = self.expect_set(a)?;
                        let tb = self.expect_set(b)?;
                        merge_set(ta, tb, b.span)
                    }
                    Lt | Le | Gt | Ge => {
                        self.expect(a, &Ty::Int)?;
                        self.expect(b, &Ty::Int)?;
                        Ok(Ty::Bool)
                    }
                    Eq | Ne => {
                        let ta = self.infer(a)?;
                        let tb = self.infer(b)?;
                        if !ta.compatible(&tb) {
                            return Err(Self::mismatch(b.span, &ta.describe(), &tb));
                        }
                        Ok(Ty::Bool)
                    }
                    And | Or | Implies | Iff => {
                        self.expect(a, &Ty::Bool)?;
                        self.expect(b, &Ty::Bool)?;
                        Ok(Ty::Bool)
                    }
                    In | NotIn => {
                        let tb = self.expect_set(b)?;
                        let ta = self.infer(a)?;
                        match (&ta, &tb) {
                            (Ty::Elem(_), Ty::EmptySet) => Ok(Ty::Bool),
                            (Ty::Elem(c), Ty::Set(d)) if c == d => Ok(Ty::Bool),
                            (_, Ty::Set(d)) => Err(Self::mismatch(a.span, &format!("element of {d}"), &ta)),
                            _ => Err(Self::mismatch(a.span, "a carrier element", &ta)),
                        }
                    }
                    Subset => {
                        let ta = self.expect_set(a)?;
                        let tb = self.expect_set(b)?;
                        merge_set(ta, tb, b.span)?;
                        Ok(Ty::Bool)
                    }
                }
            }
            ExprKind::Call(f, args) => match f {
                Builtin::Card => {
                    self.expect_set(&args[0])?;
                    Ok(Ty::Int)
                }
                Builtin::Min | Builtin::Max => {
                    for a in args {
                        self.expect(a, &Ty::Int)?;
                    }
                    Ok(Ty::Int)
                }
            },
            ExprKind::If(c, t, f) => {
                self.expect(c, &Ty::Bool)?;
                let tt = self.infer(t)?;
                let tf = self.infer(f)?;
                if !tt.compatible(&tf) {
                    return Err(Self::mismatch(f.span, &tt.describe(), &tf));
                }
                Ok(if tt == Ty::EmptySet { tf } else { tt })
            }
        }
    }
}

fn merge_set(a: Ty, b: Ty, span: Span) -> Result<Ty, ParseError> {
    match (a, b) {
        (Ty::EmptySet, t) | (t, Ty::EmptySet) => Ok(t),
        (Ty::Set(x), Ty::Set(y)) if x == y => Ok(Ty::Set(x)),
        (Ty::Set(x), t) => Err(Scope::mismatch(span, &format!("subset of {x}"), &t)),
        (t, _) => Err(Scope::mismatch(span, "a set", &t)),
    }
}

fn expr_span(e: &Option<Expr>) -> Span {
    e.as_ref().map(|e| e.span).unwrap_or_default()
}

/// Typecheck everything except the `linking` clause, whose scope needs the abstract machine.
pub fn typecheck(m: &MachineAst) -> Result<Symbols, ParseError> {
    typecheck_with_abstract(m, None)
}

pub fn typecheck_with_abstract(m: &MachineAst, abs: Option<&Symbols>) -> Result<Symbols, ParseError> {
    let syms = symbols(m)?;
    let scope = Scope { syms: &syms, abstract_vars: None, hidden_abstract: abs.map(|a| &a.variables), locals: vec![] };

    if let Some(inv) = &m.invariant {
        scope.expect(inv, &Ty::Bool)?;
    }
    let needs_variant = m.events.iter().any(|e| e.effective_status() != Status::Ordinary);
    match (&m.variant, needs_variant) {
        (Some(v), true) => scope.expect(v, &Ty::Int)?,
        (Some(v), false) => {
            return Err(ParseError::with_kind(
                ErrorKind::Type,
                v.span,
                "`variant` given but the machine has no anticipated or convergent events",
            ))
        }
        (None, true) => {
            return Err(ParseError::with_kind(
                ErrorKind::Type,
                Span::default(),
                format!("machine `{}` has anticipated or convergent events but no `variant`", m.name),
            ))
        }
        (None, false) => {}
    }

    if m.init.guard.is_some() {
        return Err(ParseError::with_kind(ErrorKind::Type, expr_span(&m.init.guard), "`init` cannot have a guard"));
    }
    if !m.init.params.is_empty() {
        return Err(ParseError::with_kind(ErrorKind::Type, Span::default(), "`init` cannot have parameters"));
    }
    let assigned = check_event(&scope, &m.init)?;
    for v in &m.variables {
        if !assigned.contains(&v.name) {
            return Err(ParseError::with_kind(
                ErrorKind::Type,
                Span::default(),
                format!("variable `{}` is not initialised by `init`", v.name),
            ));
        }
    }

    let mut seen = BTreeSet::new();
    for ev in &m.events {
        if !seen.insert(ev.name.as_str()) {
            return Err(dup(expr_span(&ev.guard), "event name", &ev.name));
        }
        check_event(&scope, ev)?;
    }
    Ok(syms)
}

fn check_event(scope: &Scope<'_>, ev: &EventAst) -> Result<BTreeSet<String>, ParseError> {
    let mut scope = Scope {
        syms: scope.syms,
        abstract_vars: None,
        hidden_abstract: scope.hidden_abstract,
        locals: vec![],
    };
    push_params(&mut scope, &ev.params, &ev.name)?;
    if let Some(g) = &ev.guard {
        scope.expect(g, &Ty::Bool)?;
    }
    let mut targets = BTreeSet::new();
    check_actions(&mut scope, &ev.actions, &ev.name, &mut targets)?;
    Ok(targets)
}

fn push_params(scope: &mut Scope<'_>, params: &[Param], event: &str) -> Result<(), ParseError> {
    for p in params {
        let span = match &p.ty {
            TypeExpr::Range(lo, _) => lo.span,
            _ => Span::default(),
        };
        if scope.locals.iter().any(|(n, _)| *n == p.name)
            || scope.syms.variables.contains_key(&p.name)
            || scope.syms.constants.contains_key(&p.name)
            || scope.syms.elem_carrier.contains_key(&p.name)
        {
            return Err(dup(span, &format!("name in event `{event}`"), &p.name));
        }
        let d = scope.syms.resolve_type(&p.ty, span)?;
        scope.locals.push((p.name.clone(), d));
    }
    Ok(())
}

fn check_actions(
    scope: &mut Scope<'_>,
    actions: &[Action],
    event: &str,
    targets: &mut BTreeSet<String>,
) -> Result<(), ParseError> {
    for a in actions {
        match a {
            Action::Assign { target, value } => {
                let Some(d) = scope.syms.variables.get(target) else {
                    return Err(ParseError::with_kind(
                        ErrorKind::UnknownIdent,
                        value.span,
                        format!("assignment to undeclared variable `{target}` in event `{event}`"),
                    ));
                };
                if !targets.insert(target.clone()) {
                    return Err(ParseError::with_kind(
                        ErrorKind::Duplicate,
                        value.span,
                        format!("variable `{target}` assigned twice in event `{event}`"),
                    ));
                }
                scope.expect(value, &d.ty())?;
            }
            Action::Choice { params, guard, body } => {
                let depth = scope.locals.len();
                push_params(scope, params, event)?;
                if let Some(g) = guard {
                    scope.expect(g, &Ty::Bool)?;
                }
                check_actions(scope, body, event, targets)?;
                scope.locals.truncate(depth);
            }
        }
    }
    Ok(())
}

/// Typecheck a gluing predicate over a concrete and an abstract machine.
pub fn check_linking(concrete: &Symbols, abs: &Symbols, linking: &Expr) -> Result<(), ParseError> {
    let merged = merge_symbols(concrete, abs, linking.span)?;
    let scope = Scope { syms: &merged, abstract_vars: Some(&abs.variables), hidden_abstract: None, locals: vec![] };
    scope.expect(linking, &Ty::Bool)
}

/// Carriers and constants of both machines; the concrete machine's variables.
pub fn merge_symbols(concrete: &Symbols, abs: &Symbols, span: Span) -> Result<Symbols, ParseError> {
    let mut merged = concrete.clone();
    for (name, elems) in &abs.carriers {
        match merged.carriers.get(name) {
            Some(mine) if mine != elems => {
                return Err(ParseError::with_kind(
                    ErrorKind::Type,
                    span,
                    format!("carrier `{name}` differs between the abstract and concrete machine"),
                ))
            }
            Some(_) => {}
            None => {
                merged.carriers.insert(name.clone(), elems.clone());
                for e in elems {
                    merged.elem_carrier.insert(e.clone(), name.clone());
                }
            }
        }
    }
    for (name, v) in &abs.constants {
        merged.constants.entry(name.clone()).or_insert(*v);
    }
    Ok(merged)
}

/// Variables declared in both machines whose domains have the same value type.
pub fn shared_variables(concrete: &Symbols, abs: &Symbols) -> Result<Vec<String>, ParseError> {
    let mut out = vec![];
    for (name, d) in &concrete.variables {
        if let Some(ad) = abs.variables.get(name) {
            if d.ty() != ad.ty() {
                return Err(ParseError::with_kind(
                    ErrorKind::Type,
                    Span::default(),
                    format!("variable `{name}` has different types in the abstract and concrete machine"),
                ));
            }
            out.push(name.clone());
        }
    }
    Ok(out)
}

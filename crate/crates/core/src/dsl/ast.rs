use std::fmt;

use serde::Serialize;

use super::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ordinary,
    Anticipated,
    Convergent,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Ordinary => "ordinary",
            Status::Anticipated => "anticipated",
            Status::Convergent => "convergent",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnOp {
    Neg,
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
    Implies,
    Iff,
    In,
    NotIn,
    Subset,
    Union,
    Inter,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        use BinOp::*;
        match self {
            Add => "+",
            Sub => "-",
            Mul => "*",
            Div => "/",
            Mod => "mod",
            Eq => "=",
            Ne => "/=",
            Lt => "<",
            Le => "<=",
            Gt => ">",
            Ge => ">=",
            And => "&",
            Or => "or",
            Implies => "=>",
            Iff => "<=>",
            In => ":",
            NotIn => "/:",
            Subset => "<:",
            Union => "\\/",
            Inter => "/\\",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    Card,
    Min,
    Max,
}

impl Builtin {
    pub fn name(self) -> &'static str {
        match self {
            Builtin::Card => "card",
            Builtin::Min => "min",
            Builtin::Max => "max",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Builtin::Card => 1,
            Builtin::Min | Builtin::Max => 2,
        }
    }
}

#[derive(Debug, Clone)]
pub enum ExprKind {
    Int(i64),
    Bool(bool),
    Ident(String),
    SetLit(Vec<Expr>),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Builtin, Vec<Expr>),
    If(Box<Expr>, Box<Expr>, Box<Expr>),
}

/// Expression node. Equality ignores source positions.
#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        use ExprKind::*;
        match (&self.kind, &other.kind) {
            (Int(a), Int(b)) => a == b,
            (Bool(a), Bool(b)) => a == b,
            (Ident(a), Ident(b)) => a == b,
            (SetLit(a), SetLit(b)) => a == b,
            (Unary(o1, a), Unary(o2, b)) => o1 == o2 && a == b,
            (Binary(o1, a1, b1), Binary(o2, a2, b2)) => o1 == o2 && a1 == a2 && b1 == b2,
            (Call(f1, a), Call(f2, b)) => f1 == f2 && a == b,
            (If(c1, t1, e1), If(c2, t2, e2)) => c1 == c2 && t1 == t2 && e1 == e2,
            _ => false,
        }
    }
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }

    pub fn binary(op: BinOp, a: Expr, b: Expr) -> Self {
        let span = a.span;
        Expr::new(ExprKind::Binary(op, Box::new(a), Box::new(b)), span)
    }

    /// Conjunction of a list of predicates; `None` when the list is empty.
    pub fn conjoin(preds: Vec<Expr>) -> Option<Expr> {
        preds.into_iter().reduce(|a, b| Expr::binary(BinOp::And, a, b))
    }

    /// Free identifiers in first-occurrence order.
    pub fn idents(&self, out: &mut Vec<String>) {
        match &self.kind {
            ExprKind::Ident(n) => {
                if !out.contains(n) {
                    out.push(n.clone());
                }
            }
            ExprKind::Int(_) | ExprKind::Bool(_) => {}
            ExprKind::SetLit(es) | ExprKind::Call(_, es) => es.iter().for_each(|e| e.idents(out)),
            ExprKind::Unary(_, e) => e.idents(out),
            ExprKind::Binary(_, a, b) => {
                a.idents(out);
                b.idents(out);
            }
            ExprKind::If(c, t, e) => {
                c.idents(out);
                t.idents(out);
                e.idents(out);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TypeExpr {
    Range(Expr, Expr),
    Bool,
    Carrier(String),
    Pow(String),
    /// `INT`, `NAT`, `NAT1`: rejected by the typechecker.
    Unbounded(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub name: String,
    pub ty: TypeExpr,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    Assign { target: String, value: Expr },
    Choice { params: Vec<Param>, guard: Option<Expr>, body: Vec<Action> },
}

impl Action {
    /// Variables written by this action (including nested choices).
    pub fn targets(&self, out: &mut Vec<String>) {
        match self {
            Action::Assign { target, .. } => out.push(target.clone()),
            Action::Choice { body, .. } => body.iter().for_each(|a| a.targets(out)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventAst {
    pub name: String,
    /// `None` when the source carries no `status` clause.
    pub status: Option<Status>,
    pub refines: Option<String>,
    pub params: Vec<Param>,
    pub guard: Option<Expr>,
    pub actions: Vec<Action>,
}

impl EventAst {
    pub fn effective_status(&self) -> Status {
        self.status.unwrap_or(Status::Ordinary)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Carrier {
    pub name: String,
    pub elements: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constant {
    pub name: String,
    pub value: Expr,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarDecl {
    pub name: String,
    pub ty: TypeExpr,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MachineAst {
    pub name: String,
    pub refines: Option<String>,
    pub carriers: Vec<Carrier>,
    pub constants: Vec<Constant>,
    pub variables: Vec<VarDecl>,
    pub invariant: Option<Expr>,
    pub variant: Option<Expr>,
    /// Gluing predicate over this machine's and the abstract machine's variables.
    pub linking: Option<Expr>,
    pub init: EventAst,
    pub events: Vec<EventAst>,
}

impl MachineAst {
    pub fn event(&self, name: &str) -> Option<&EventAst> {
        self.events.iter().find(|e| e.name == name)
    }

    /// Event names, excluding `init`.
    pub fn alphabet(&self) -> std::collections::BTreeSet<String> {
        self.events.iter().map(|e| e.name.clone()).collect()
    }

    pub fn events_with_status(&self, status: Status) -> std::collections::BTreeSet<String> {
        self.events
            .iter()
            .filter(|e| e.effective_status() == status)
            .map(|e| e.name.clone())
            .collect()
    }

    pub fn variable(&self, name: &str) -> Option<&VarDecl> {
        self.variables.iter().find(|v| v.name == name)
    }

    /// Replace the value of a declared constant with an integer literal.
    pub fn override_constant(&mut self, name: &str, value: i64) -> bool {
        match self.constants.iter_mut().find(|c| c.name == name) {
            Some(c) => {
                c.value = Expr::new(ExprKind::Int(value), c.value.span);
                true
            }
            None => false,
        }
    }
}

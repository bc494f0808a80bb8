use std::collections::BTreeSet;

use crate::dsl::ast::*;
use crate::dsl::typecheck::{ConstValue, Symbols};

use super::value::{State, Value};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{message}")]
pub struct EvalError {
    pub message: String,
}

fn err<T>(message: impl Into<String>) -> Result<T, EvalError> {
    Err(EvalError { message: message.into() })
}

/// Evaluation environment: local bindings first, then state frames in order, then constants.
#[derive(Clone)]
pub struct Env<'a> {
    pub syms: &'a Symbols,
    pub frames: Vec<(&'a [String], &'a State)>,
    pub locals: Vec<(String, Value)>,
}

impl<'a> Env<'a> {
    pub fn new(syms: &'a Symbols) -> Self {
        Env { syms, frames: vec![], locals: vec![] }
    }

    pub fn with_state(syms: &'a Symbols, vars: &'a [String], state: &'a State) -> Self {
        Env { syms, frames: vec![(vars, state)], locals: vec![] }
    }

    pub fn bind(&mut self, name: &str, v: Value) {
        self.locals.push((name.to_string(), v));
    }

    fn lookup(&self, name: &str) -> Result<Value, EvalError> {
        if let Some((_, v)) = self.locals.iter().rev().find(|(n, _)| n == name) {
            return Ok(v.clone());
        }
        for (vars, st) in &self.frames {
            if let Ok(i) = vars.binary_search_by(|v| v.as_str().cmp(name)) {
                return Ok(st.0[i].clone());
            }
        }
        if let Some(c) = self.syms.constants.get(name) {
            return Ok(match c {
                ConstValue::Int(n) => Value::Int(*n),
                ConstValue::Bool(b) => Value::Bool(*b),
            });
        }
        if self.syms.elem_carrier.contains_key(name) {
            return Ok(Value::Elem(name.to_string()));
        }
        if let Some(elems) = self.syms.carriers.get(name) {
            return Ok(Value::Set(elems.iter().cloned().collect()));
        }
        err(format!("`{name}` has no value here"))
    }

    pub fn eval(&self, e: &Expr) -> Result<Value, EvalError> {
        match &e.kind {
            ExprKind::Int(n) => Ok(Value::Int(*n)),
            ExprKind::Bool(b) => Ok(Value::Bool(*b)),
            ExprKind::Ident(n) => self.lookup(n),
            ExprKind::SetLit(items) => {
                let mut s = BTreeSet::new();
                for it in items {
                    match self.eval(it)? {
                        Value::Elem(x) => {
                            s.insert(x);
                        }
                        v => return err(format!("set literal element `{v}` is not a carrier element")),
                    }
                }
                Ok(Value::Set(s))
            }
            ExprKind::Unary(UnOp::Neg, a) => {
                let n = self.int(a)?;
                n.checked_neg().map(Value::Int).ok_or_else(overflow)
            }
            ExprKind::Unary(UnOp::Not, a) => Ok(Value::Bool(!self.truth(a)?)),
            ExprKind::Binary(op, a, b) => self.binary(*op, a, b),
            ExprKind::Call(f, args) => match f {
                Builtin::Card => Ok(Value::Int(self.set(&args[0])?.len() as i64)),
                Builtin::Min => Ok(Value::Int(self.int(&args[0])?.min(self.int(&args[1])?))),
                Builtin::Max => Ok(Value::Int(self.int(&args[0])?.max(self.int(&args[1])?))),
            },
            ExprKind::If(c, t, f) => {
                if self.truth(c)? {
                    self.eval(t)
                } else {
                    self.eval(f)
                }
            }
        }
    }

    pub fn truth(&self, e: &Expr) -> Result<bool, EvalError> {
        match self.eval(e)? {
            Value::Bool(b) => Ok(b),
            v => err(format!("expected a boolean, got `{v}`")),
        }
    }

    pub fn int(&self, e: &Expr) -> Result<i64, EvalError> {
        match self.eval(e)? {
            Value::Int(n) => Ok(n),
            v => err(format!("expected an integer, got `{v}`")),
        }
    }

    fn set(&self, e: &Expr) -> Result<BTreeSet<String>, EvalError> {
        match self.eval(e)? {
            Value::Set(s) => Ok(s),
            v => err(format!("expected a set, got `{v}`")),
        }
    }

    fn binary(&self, op: BinOp, a: &Expr, b: &Expr) -> Result<Value, EvalError> {
        use BinOp::*;
        let arith = |f: fn(i64, i64) -> Option<i64>| -> Result<Value, EvalError> {
            f(self.int(a)?, self.int(b)?).map(Value::Int).ok_or_else(overflow)
        };
        match op {
            Add => arith(i64::checked_add),
            Mul => arith(i64::checked_mul),
            Div => {
                let d = self.int(b)?;
                if d == 0 {
                    return err("division by zero");
                }
                self.int(a)?.checked_div_euclid(d).map(Value::Int).ok_or_else(overflow)
            }
            Mod => {
                let d = self.int(b)?;
                if d == 0 {
                    return err("modulo by zero");
                }
                self.int(a)?.checked_rem_euclid(d).map(Value::Int).ok_or_else(overflow)
            }
            Sub => match self.eval(a)? {
                Value::Set(x) => {
                    let y = self.set(b)?;
                    Ok(Value::Set(x.difference(&y).cloned().collect()))
                }
                Value::Int(x) => x.checked_sub(self.int(b)?).map(Value::Int).ok_or_else(overflow),
                v => err(format!("cannot subtract from `{v}`")),
            },
            Union => Ok(Value::Set(self.set(a)?.union(&self.set(b)?).cloned().collect())),
            Inter => Ok(Value::Set(self.set(a)?.intersection(&self.set(b)?).cloned().collect())),
            Lt => Ok(Value::Bool(self.int(a)? < self.int(b)?)),
            Le => Ok(Value::Bool(self.int(a)? <= self.int(b)?)),
            Gt => Ok(Value::Bool(self.int(a)? > self.int(b)?)),
            Ge => Ok(Value::Bool(self.int(a)? >= self.int(b)?)),
            Eq => Ok(Value::Bool(self.eval(a)? == self.eval(b)?)),
            Ne => Ok(Value::Bool(self.eval(a)? != self.eval(b)?)),
            And => Ok(Value::Bool(self.truth(a)? && self.truth(b)?)),
            Or => Ok(Value::Bool(self.truth(a)? || self.truth(b)?)),
            Implies => Ok(Value::Bool(!self.truth(a)? || self.truth(b)?)),
            Iff => Ok(Value::Bool(self.truth(a)? == self.truth(b)?)),
            In | NotIn => {
                let x = match self.eval(a)? {
                    Value::Elem(x) => x,
                    v => return err(format!("`{v}` is not a carrier element")),
                };
                let member = self.set(b)?.contains(&x);
                Ok(Value::Bool(if op == In { member } else { !member }))
            }
            Subset => Ok(Value::Bool(self.set(a)?.is_subset(&self.set(b)?))),
        }
    }
}

fn overflow() -> EvalError {
    EvalError { message: "integer overflow".into() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_expr;
    use crate::dsl::typecheck::symbols;

    #[test]
    fn evaluates_mixed_expressions() {
        let m = crate::dsl::parse_machine(
            "machine T sets ITEM = {choc, biscuit} constants k = 3 variables c : 0..k s : POW(ITEM) \
             events init then c := 0 s := {} end end",
        )
        .unwrap();
        let syms = symbols(&m).unwrap();
        let vars: Vec<String> = syms.variables.keys().cloned().collect();
        let st = State(vec![Value::Int(2), Value::Set(["choc".to_string()].into())]);
        let env = Env::with_state(&syms, &vars, &st);
        let t = |src: &str| env.eval(&parse_expr(src).unwrap()).unwrap();
        assert_eq!(t("min(c + 3, k)"), Value::Int(3));
        assert_eq!(t("card(ITEM - s)"), Value::Int(1));
        assert_eq!(t("choc : s & biscuit /: s"), Value::Bool(true));
        assert_eq!(t("if c > 1 then 0 else 1"), Value::Int(0));
        assert_eq!(t("s \\/ {biscuit} = ITEM"), Value::Bool(true));
        assert!(env.eval(&parse_expr("c / 0").unwrap()).is_err());
    }
}

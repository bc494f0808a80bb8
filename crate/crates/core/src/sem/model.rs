use crate::dsl::ast::{Action, EventAst, MachineAst, Param};
use crate::dsl::typecheck::{self, Domain, Symbols};
use crate::dsl::ParseError;

use super::eval::Env;
use super::value::{domain_values, in_domain, State, Value};
use super::{params_text, SemError};

/// A typechecked machine ready for execution.
#[derive(Debug, Clone)]
pub struct Model {
    pub ast: MachineAst,
    pub syms: Symbols,
    /// Variable names, sorted; the index order of every `State`.
    pub vars: Vec<String>,
    pub domains: Vec<Domain>,
}

/// One way an enabled event can fire.
#[derive(Debug, Clone, PartialEq)]
pub struct Firing {
    pub params: Vec<(String, Value)>,
    pub target: State,
}

#[derive(Debug, Clone, Default)]
pub struct Firings {
    pub enabled: Vec<Firing>,
    /// Parameter bindings whose guard holds but whose actions admit no outcome.
    pub infeasible: Vec<Vec<(String, Value)>>,
}

/// Pending result of a set of parallel actions: bound choice parameters and variable updates.
type Outcome = (Vec<(String, Value)>, Vec<(usize, Value)>);

impl Model {
    pub fn new(ast: MachineAst) -> Result<Model, ParseError> {
        let syms = typecheck::typecheck(&ast)?;
        let vars: Vec<String> = syms.variables.keys().cloned().collect();
        let domains = vars.iter().map(|v| syms.variables[v].clone()).collect();
        Ok(Model { ast, syms, vars, domains })
    }

    pub fn parse(src: &str) -> Result<Model, ParseError> {
        Model::new(crate::dsl::parse_machine(src)?)
    }

    pub fn name(&self) -> &str {
        &self.ast.name
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.binary_search_by(|v| v.as_str().cmp(name)).ok()
    }

    pub fn env<'a>(&'a self, state: &'a State) -> Env<'a> {
        Env::with_state(&self.syms, &self.vars, state)
    }

    /// Cartesian product of parameter domains, in declaration and domain order.
    pub fn bindings(&self, params: &[Param]) -> Result<Vec<Vec<(String, Value)>>, SemError> {
        let mut out: Vec<Vec<(String, Value)>> = vec![vec![]];
        for p in params {
            let d = self.syms.resolve_type(&p.ty, Default::default())?;
            let vals = domain_values(&d, &self.syms);
            let mut next = Vec::with_capacity(out.len() * vals.len());
            for b in &out {
                for v in &vals {
                    let mut nb = b.clone();
                    nb.push((p.name.clone(), v.clone()));
                    next.push(nb);
                }
            }
            out = next;
        }
        Ok(out)
    }

    fn eval_ctx(&self, ev: &str, state: Option<&State>) -> impl Fn(super::eval::EvalError) -> SemError + '_ {
        let context = match state {
            Some(s) => format!("event `{ev}` in state {}", s.display(&self.vars)),
            None => format!("event `{ev}`"),
        };
        move |e| SemError::Eval { context: context.clone(), message: e.message }
    }

    pub fn guard_holds(&self, ev: &EventAst, state: &State, params: &[(String, Value)]) -> Result<bool, SemError> {
        let Some(g) = &ev.guard else { return Ok(true) };
        let mut env = self.env(state);
        for (n, v) in params {
            env.bind(n, v.clone());
        }
        env.truth(g).map_err(self.eval_ctx(&ev.name, Some(state)))
    }

    /// All firings of `ev` from `state` (`None` for `init`). Targets are not domain-checked.
    pub fn fire(&self, ev: &EventAst, state: Option<&State>) -> Result<Firings, SemError> {
        let mut out = Firings::default();
        let empty = State(vec![]);
        let no_vars: [String; 0] = [];
        for b in self.bindings(&ev.params)? {
            let mut env = match state {
                Some(s) => self.env(s),
                None => Env::with_state(&self.syms, &no_vars, &empty),
            };
            for (n, v) in &b {
                env.bind(n, v.clone());
            }
            if let Some(g) = &ev.guard {
                if !env.truth(g).map_err(self.eval_ctx(&ev.name, state))? {
                    continue;
                }
            }
            let outcomes = self.exec(&ev.actions, &env).map_err(|e| match e {
                SemError::Eval { message, .. } => self.eval_ctx(&ev.name, state)(super::eval::EvalError { message }),
                e => e,
            })?;
            if outcomes.is_empty() {
                out.infeasible.push(b);
                continue;
            }
            for (choices, updates) in outcomes {
                let mut target = match state {
                    Some(s) => s.clone(),
                    None => State(vec![Value::Bool(false); self.vars.len()]),
                };
                for (i, v) in updates {
                    target.0[i] = v;
                }
                let mut params = b.clone();
                params.extend(choices);
                out.enabled.push(Firing { params, target });
            }
        }
        Ok(out)
    }

    fn exec(&self, actions: &[Action], env: &Env<'_>) -> Result<Vec<Outcome>, SemError> {
        let mut acc: Vec<Outcome> = vec![(vec![], vec![])];
        for a in actions {
            let options: Vec<Outcome> = match a {
                Action::Assign { target, value } => {
                    let v = env.eval(value).map_err(|e| SemError::Eval { context: String::new(), message: e.message })?;
                    let i = self.var_index(target).expect("typechecked target");
                    vec![(vec![], vec![(i, v)])]
                }
                Action::Choice { params, guard, body } => {
                    let mut opts = vec![];
                    for b in self.bindings(params)? {
                        let mut inner = env.clone();
                        for (n, v) in &b {
                            inner.bind(n, v.clone());
                        }
                        if let Some(g) = guard {
                            let ok = inner
                                .truth(g)
                                .map_err(|e| SemError::Eval { context: String::new(), message: e.message })?;
                            if !ok {
                                continue;
                            }
                        }
                        for (mut cs, ups) in self.exec(body, &inner)? {
                            let mut all = b.clone();
                            all.append(&mut cs);
                            opts.push((all, ups));
                        }
                    }
                    opts
                }
            };
            let mut next = Vec::with_capacity(acc.len() * options.len());
            for (c0, u0) in &acc {
                for (c1, u1) in &options {
                    let mut c = c0.clone();
                    c.extend(c1.iter().cloned());
                    let mut u = u0.clone();
                    u.extend(u1.iter().cloned());
                    next.push((c, u));
                }
            }
            acc = next;
        }
        Ok(acc)
    }

    /// First variable whose value lies outside its declared domain.
    pub fn domain_violation(&self, state: &State) -> Option<(String, Value)> {
        self.vars
            .iter()
            .zip(&self.domains)
            .zip(&state.0)
            .find(|((_, d), v)| !in_domain(v, d, &self.syms))
            .map(|((n, _), v)| (n.clone(), v.clone()))
    }

    pub fn invariant_holds(&self, state: &State) -> Result<bool, SemError> {
        if self.domain_violation(state).is_some() {
            return Ok(false);
        }
        match &self.ast.invariant {
            None => Ok(true),
            Some(inv) => self.env(state).truth(inv).map_err(|e| SemError::Eval {
                context: format!("invariant in state {}", state.display(&self.vars)),
                message: e.message,
            }),
        }
    }

    pub fn variant_at(&self, state: &State) -> Result<Option<i64>, SemError> {
        match &self.ast.variant {
            None => Ok(None),
            Some(v) => self.env(state).int(v).map(Some).map_err(|e| SemError::Eval {
                context: format!("variant in state {}", state.display(&self.vars)),
                message: e.message,
            }),
        }
    }

    /// Events sorted by name (the exploration order).
    pub fn sorted_events(&self) -> Vec<&EventAst> {
        let mut evs: Vec<&EventAst> = self.ast.events.iter().collect();
        evs.sort_by(|a, b| a.name.cmp(&b.name));
        evs
    }

    pub(crate) fn describe_params(params: &[(String, Value)]) -> String {
        params_text(params)
    }
}

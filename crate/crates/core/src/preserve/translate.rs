//! Moving formulas and traces across a renaming.

use std::collections::BTreeMap;

use crate::dsl::Formula;
use crate::ltl::Trace;
use crate::refine::RenamingMap;

/// Replace each atom by the disjunction of its preimages, sorted; no preimage gives `!true`.
pub fn translate_formula(phi: &Formula, h: &RenamingMap) -> Formula {
    let mut pre: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (c, a) in &h.forward {
        pre.entry(a.as_str()).or_default().push(c.as_str());
    }
    phi.map_atoms(&mut |x| Formula::any_of(pre.get(x).cloned().unwrap_or_default()))
}

/// `h` extended with the identity on the concrete events it leaves undefined.
pub fn complete_renaming(h: &RenamingMap) -> RenamingMap {
    let mut out = h.clone();
    for e in h.new_events() {
        out.forward.insert(e.clone(), e.clone());
        out.abstract_alphabet.insert(e);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("event `{0}` is outside the domain of the renaming")]
pub struct OutsideDomain(pub String);

/// Pointwise image of a trace; the shape (finite or lasso) is kept.
pub fn map_trace(h: &RenamingMap, u: &Trace) -> Result<Trace, OutsideDomain> {
    let map = |v: &[String]| -> Result<Vec<String>, OutsideDomain> {
        v.iter().map(|e| h.apply(e).map(str::to_string).ok_or_else(|| OutsideDomain(e.clone()))).collect()
    };
    Ok(Trace { prefix: map(&u.prefix)?, cycle: map(&u.cycle)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_formula;
    use std::collections::BTreeSet;

    fn h() -> RenamingMap {
        let pairs = [
            ("selectBiscuit", "selectItem"),
            ("selectChoc", "selectItem"),
            ("dispenseBiscuit", "dispenseItem"),
            ("dispenseChoc", "dispenseItem"),
        ];
        let conc: BTreeSet<String> =
            pairs.iter().map(|p| p.0.to_string()).chain(["pay".to_string(), "refund".to_string()]).collect();
        RenamingMap::new(
            pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
            conc,
            ["selectItem", "dispenseItem"].iter().map(|s| s.to_string()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn translation() {
        let phi = parse_formula("G([selectItem] => F [dispenseItem])").unwrap();
        let want = parse_formula("G(([selectBiscuit] | [selectChoc]) => F([dispenseBiscuit] | [dispenseChoc]))").unwrap();
        assert_eq!(translate_formula(&phi, &h()), want);
        assert_eq!(translate_formula(&parse_formula("[z]").unwrap(), &h()), Formula::ff());
        let id = RenamingMap::identity(&["a".to_string(), "b".to_string()].into());
        let f = parse_formula("[a] U G[b]").unwrap();
        assert_eq!(translate_formula(&f, &id), f);
    }

    #[test]
    fn completion_and_mapping() {
        let t = complete_renaming(&h());
        assert_eq!(t.apply("pay"), Some("pay"));
        assert_eq!(t.apply("refund"), Some("refund"));
        assert_eq!(complete_renaming(&t), t);
        let empty = RenamingMap::new(Default::default(), ["a".to_string()].into(), Default::default()).unwrap();
        assert_eq!(complete_renaming(&empty).forward, RenamingMap::identity(&["a".to_string()].into()).forward);

        let u = Trace::lasso(["selectBiscuit"], ["dispenseBiscuit", "selectBiscuit"]);
        assert_eq!(map_trace(&t, &u).unwrap(), Trace::lasso(["selectItem"], ["dispenseItem", "selectItem"]));
        assert_eq!(map_trace(&h(), &Trace::finite(["pay"])), Err(OutsideDomain("pay".into())));
        let id = RenamingMap::identity(&["pay".to_string()].into());
        assert_eq!(map_trace(&id, &Trace::finite(["pay"])).unwrap(), Trace::finite(["pay"]));
    }
}

use std::collections::HashMap;
use std::path::Path;

use super::{parse_set_expr, SetExpr, KEYWORDS};
use crate::error::{Error, Result};

const SHIPPED: &str = include_str!("../../data/catalog.cat");

/// Named set expressions, in file order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Catalog {
    entries: Vec<(String, SetExpr)>,
    index: HashMap<String, usize>,
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    chars
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !KEYWORDS.contains(&name)
}

impl Catalog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: &str, expr: SetExpr) -> Result<()> {
        if !valid_name(name) {
            return Err(Error::InvalidParam(format!(
                "`{name}` is not a valid set name"
            )));
        }
        if self.index.contains_key(name) {
            return Err(Error::InvalidParam(format!("set `{name}` defined twice")));
        }
        self.index.insert(name.to_string(), self.entries.len());
        self.entries.push((name.to_string(), expr));
        Ok(())
    }

    /// One `name = expr` per line; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cat = Catalog::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (name, body) = line.split_once('=').ok_or_else(|| {
                Error::InvalidParam(format!(
                    "catalog line {}: expected `name = expr`",
                    lineno + 1
                ))
            })?;
            let expr = parse_set_expr(body).map_err(|e| match e {
                Error::Syntax { pos, expected } => Error::Syntax {
                    pos,
                    expected: format!("{expected} (catalog line {})", lineno + 1),
                },
                other => other,
            })?;
            cat.insert(name.trim(), expr)?;
        }
        cat.resolve_all()?;
        Ok(cat)
    }

    /// The catalog shipped with the crate (`data/catalog.cat`).
    pub fn shipped() -> Self {
        Self::parse(SHIPPED).expect("shipped catalog parses")
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(n, _)| n.as_str())
    }

    pub fn entries(&self) -> &[(String, SetExpr)] {
        &self.entries
    }

    pub fn get(&self, name: &str) -> Option<&SetExpr> {
        self.index.get(name).map(|&i| &self.entries[i].1)
    }

    fn resolve_all(&self) -> Result<()> {
        for (_, e) in &self.entries {
            self.resolve(e)?;
        }
        Ok(())
    }

    /// Substitutes catalog names; unknown names and cycles are errors.
    pub fn resolve(&self, expr: &SetExpr) -> Result<SetExpr> {
        self.resolve_inner(expr, &mut Vec::new())
    }

    fn resolve_inner(&self, expr: &SetExpr, stack: &mut Vec<String>) -> Result<SetExpr> {
        let rec = |e: &SetExpr, stack: &mut Vec<String>| self.resolve_inner(e, stack).map(Box::new);
        Ok(match expr {
            SetExpr::Name(n) => {
                if stack.contains(n) {
                    return Err(Error::InvalidParam(format!(
                        "catalog definition of `{n}` is cyclic"
                    )));
                }
                let body = self
                    .get(n)
                    .ok_or_else(|| Error::UnknownPrimitive(n.clone()))?;
                stack.push(n.clone());
                let r = self.resolve_inner(body, stack)?;
                stack.pop();
                r
            }
            SetExpr::Union(a, b) => SetExpr::Union(rec(a, stack)?, rec(b, stack)?),
            SetExpr::Inter(a, b) => SetExpr::Inter(rec(a, stack)?, rec(b, stack)?),
            SetExpr::Diff(a, b) => SetExpr::Diff(rec(a, stack)?, rec(b, stack)?),
            SetExpr::Compl(a) => SetExpr::Compl(rec(a, stack)?),
            SetExpr::Shift(a, by) => SetExpr::Shift(rec(a, stack)?, by.clone()),
            leaf => leaf.clone(),
        })
    }

    /// Looks up a name or parses an expression, then resolves names.
    pub fn expr(&self, text: &str) -> Result<SetExpr> {
        let e = match self.get(text.trim()) {
            Some(e) => e.clone(),
            None => parse_set_expr(text)?,
        };
        self.resolve(&e)
    }

    pub fn to_text(&self) -> String {
        self.entries
            .iter()
            .map(|(n, e)| format!("{n} = {e}\n"))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_resolve() {
        let cat =
            Catalog::parse("# parity\nodds = shift(evens, 1)\nboth = union(odds, evens) # all\n")
                .unwrap();
        assert_eq!(cat.len(), 2);
        assert_eq!(
            cat.expr("both").unwrap().to_string(),
            "union(shift(evens, 1), evens)"
        );
        assert_eq!(
            cat.expr("compl(odds)").unwrap().to_string(),
            "compl(shift(evens, 1))"
        );
        let again = Catalog::parse(&cat.to_text()).unwrap();
        assert_eq!(again, cat);
    }

    #[test]
    fn shipped_catalog_loads() {
        let cat = Catalog::shipped();
        assert_eq!(cat.len(), 11);
        assert_eq!(
            cat.expr("tri7").unwrap().to_string(),
            "shift(triangular, 7)"
        );
    }

    #[test]
    fn bad_catalogs() {
        assert!(Catalog::parse("x = evens\nx = all\n").is_err());
        assert!(Catalog::parse("evens = all\n").is_err());
        assert!(Catalog::parse("x = y\n").is_err());
        assert!(Catalog::parse("x = y\ny = x\n").is_err());
        assert!(Catalog::parse("just words\n").is_err());
    }
}

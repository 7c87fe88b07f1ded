use std::fmt::{self, Write};

/// Expression tree over positional inputs.
///
/// `And` and `Or` always carry at least two children; the smart constructors
/// [`BoolExpr::and`] and [`BoolExpr::or`] flatten nested gates of the same
/// kind, so `a & (b & c)` and `(a & b) & c` produce the same tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BoolExpr {
    Const(bool),
    Var(usize),
    Not(Box<BoolExpr>),
    And(Vec<BoolExpr>),
    Or(Vec<BoolExpr>),
    Xor(Box<BoolExpr>, Box<BoolExpr>),
}

impl BoolExpr {
    pub fn var(index: usize) -> Self {
        BoolExpr::Var(index)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(child: BoolExpr) -> Self {
        BoolExpr::Not(Box::new(child))
    }

    pub fn xor(left: BoolExpr, right: BoolExpr) -> Self {
        BoolExpr::Xor(Box::new(left), Box::new(right))
    }

    /// Conjunction of `children`; a single child is returned unchanged and
    /// an empty list is the constant `true`.
    pub fn and(children: impl IntoIterator<Item = BoolExpr>) -> Self {
        let mut flat = Vec::new();
        for child in children {
            match child {
                BoolExpr::And(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => BoolExpr::Const(true),
            1 => flat.pop().unwrap(),
            _ => BoolExpr::And(flat),
        }
    }

    /// Disjunction of `children`; a single child is returned unchanged and
    /// an empty list is the constant `false`.
    pub fn or(children: impl IntoIterator<Item = BoolExpr>) -> Self {
        let mut flat = Vec::new();
        for child in children {
            match child {
                BoolExpr::Or(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => BoolExpr::Const(false),
            1 => flat.pop().unwrap(),
            _ => BoolExpr::Or(flat),
        }
    }

    /// Evaluates the tree. Every `Var` index must be in bounds for `x`.
    pub fn eval(&self, x: &[bool]) -> bool {
        match self {
            BoolExpr::Const(b) => *b,
            BoolExpr::Var(i) => x[*i],
            BoolExpr::Not(e) => !e.eval(x),
            BoolExpr::And(es) => es.iter().all(|e| e.eval(x)),
            BoolExpr::Or(es) => es.iter().any(|e| e.eval(x)),
            BoolExpr::Xor(l, r) => l.eval(x) ^ r.eval(x),
        }
    }

    /// Node count of the tree.
    pub fn size(&self) -> usize {
        match self {
            BoolExpr::Const(_) | BoolExpr::Var(_) => 1,
            BoolExpr::Not(e) => 1 + e.size(),
            BoolExpr::And(es) | BoolExpr::Or(es) => 1 + es.iter().map(BoolExpr::size).sum::<usize>(),
            BoolExpr::Xor(l, r) => 1 + l.size() + r.size(),
        }
    }

    /// Largest variable index mentioned, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            BoolExpr::Const(_) => None,
            BoolExpr::Var(i) => Some(*i),
            BoolExpr::Not(e) => e.max_var(),
            BoolExpr::And(es) | BoolExpr::Or(es) => es.iter().filter_map(BoolExpr::max_var).max(),
            BoolExpr::Xor(l, r) => l.max_var().max(r.max_var()),
        }
    }

    pub(crate) fn is_well_formed(&self) -> bool {
        match self {
            BoolExpr::Const(_) | BoolExpr::Var(_) => true,
            BoolExpr::Not(e) => e.is_well_formed(),
            BoolExpr::And(es) | BoolExpr::Or(es) => es.len() >= 2 && es.iter().all(BoolExpr::is_well_formed),
            BoolExpr::Xor(l, r) => l.is_well_formed() && r.is_well_formed(),
        }
    }

    /// Collects the distinct variable indices in ascending order.
    pub fn variables(&self) -> Vec<usize> {
        fn walk(e: &BoolExpr, out: &mut Vec<usize>) {
            match e {
                BoolExpr::Const(_) => {}
                BoolExpr::Var(i) => out.push(*i),
                BoolExpr::Not(e) => walk(e, out),
                BoolExpr::And(es) | BoolExpr::Or(es) => es.iter().for_each(|e| walk(e, out)),
                BoolExpr::Xor(l, r) => {
                    walk(l, out);
                    walk(r, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Renames every variable through `map`.
    pub fn remap(&self, map: &impl Fn(usize) -> usize) -> BoolExpr {
        match self {
            BoolExpr::Const(b) => BoolExpr::Const(*b),
            BoolExpr::Var(i) => BoolExpr::Var(map(*i)),
            BoolExpr::Not(e) => BoolExpr::not(e.remap(map)),
            BoolExpr::And(es) => BoolExpr::and(es.iter().map(|e| e.remap(map))),
            BoolExpr::Or(es) => BoolExpr::or(es.iter().map(|e| e.remap(map))),
            BoolExpr::Xor(l, r) => BoolExpr::xor(l.remap(map), r.remap(map)),
        }
    }

    /// Replaces variables by constants where `fixed[i]` is set and renumbers
    /// the rest through `renumber`, folding constants on the way up.
    pub(crate) fn substitute(&self, fixed: &[Option<bool>], renumber: &[usize]) -> BoolExpr {
        match self {
            BoolExpr::Const(b) => BoolExpr::Const(*b),
            BoolExpr::Var(i) => match fixed[*i] {
                Some(b) => BoolExpr::Const(b),
                None => BoolExpr::Var(renumber[*i]),
            },
            BoolExpr::Not(e) => match e.substitute(fixed, renumber) {
                BoolExpr::Const(b) => BoolExpr::Const(!b),
                other => BoolExpr::not(other),
            },
            BoolExpr::And(es) => {
                let mut kept = Vec::with_capacity(es.len());
                for e in es {
                    match e.substitute(fixed, renumber) {
                        BoolExpr::Const(false) => return BoolExpr::Const(false),
                        BoolExpr::Const(true) => {}
                        other => kept.push(other),
                    }
                }
                BoolExpr::and(kept)
            }
            BoolExpr::Or(es) => {
                let mut kept = Vec::with_capacity(es.len());
                for e in es {
                    match e.substitute(fixed, renumber) {
                        BoolExpr::Const(true) => return BoolExpr::Const(true),
                        BoolExpr::Const(false) => {}
                        other => kept.push(other),
                    }
                }
                BoolExpr::or(kept)
            }
            BoolExpr::Xor(l, r) => {
                let l = l.substitute(fixed, renumber);
                let r = r.substitute(fixed, renumber);
                match (l, r) {
                    (BoolExpr::Const(a), BoolExpr::Const(b)) => BoolExpr::Const(a ^ b),
                    (BoolExpr::Const(false), e) | (e, BoolExpr::Const(false)) => e,
                    (BoolExpr::Const(true), e) | (e, BoolExpr::Const(true)) => BoolExpr::not(e),
                    (l, r) => BoolExpr::xor(l, r),
                }
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            BoolExpr::Or(_) => 1,
            BoolExpr::Xor(..) => 2,
            BoolExpr::And(_) => 3,
            BoolExpr::Not(_) => 4,
            BoolExpr::Const(_) | BoolExpr::Var(_) => 5,
        }
    }

    /// Writes the expression in the model-file grammar, naming variable `i`
    /// with `name(i)` and inserting only the parentheses the precedence
    /// rules (`!` > `&` > `^` > `|`, left-associative) require.
    pub fn write_with<W: Write>(&self, out: &mut W, name: &impl Fn(usize) -> String) -> fmt::Result {
        match self {
            BoolExpr::Const(b) => out.write_str(if *b { "1" } else { "0" }),
            BoolExpr::Var(i) => out.write_str(&name(*i)),
            BoolExpr::Not(e) => {
                out.write_char('!')?;
                e.write_child(out, name, self.precedence(), false)
            }
            BoolExpr::And(es) | BoolExpr::Or(es) => {
                let op = if matches!(self, BoolExpr::And(_)) { " & " } else { " | " };
                for (k, e) in es.iter().enumerate() {
                    if k > 0 {
                        out.write_str(op)?;
                    }
                    e.write_child(out, name, self.precedence(), false)?;
                }
                Ok(())
            }
            BoolExpr::Xor(l, r) => {
                l.write_child(out, name, self.precedence(), false)?;
                out.write_str(" ^ ")?;
                r.write_child(out, name, self.precedence(), true)
            }
        }
    }

    fn write_child<W: Write>(&self, out: &mut W, name: &impl Fn(usize) -> String, parent: u8, right: bool) -> fmt::Result {
        let own = self.precedence();
        if own < parent || (right && own == parent) {
            out.write_char('(')?;
            self.write_with(out, name)?;
            out.write_char(')')
        } else {
            self.write_with(out, name)
        }
    }

    /// Renders with placeholder names `x0, x1, ...`.
    pub fn render(&self) -> String {
        let mut s = String::new();
        self.write_with(&mut s, &|i| format!("x{i}")).expect("writing to a String");
        s
    }
}

impl fmt::Display for BoolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_with(f, &|i| format!("x{i}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_counts_nodes() {
        assert_eq!(BoolExpr::var(0).size(), 1);
        assert_eq!(BoolExpr::and([BoolExpr::var(0), BoolExpr::var(1)]).size(), 3);
        assert_eq!(BoolExpr::not(BoolExpr::xor(BoolExpr::var(0), BoolExpr::Const(true))).size(), 4);
    }

    #[test]
    fn constructors_flatten() {
        let e = BoolExpr::and([
            BoolExpr::var(0),
            BoolExpr::and([BoolExpr::var(1), BoolExpr::var(2)]),
        ]);
        assert_eq!(e, BoolExpr::And(vec![BoolExpr::var(0), BoolExpr::var(1), BoolExpr::var(2)]));
        assert_eq!(BoolExpr::or([]), BoolExpr::Const(false));
        assert_eq!(BoolExpr::and([BoolExpr::var(3)]), BoolExpr::var(3));
    }

    #[test]
    fn printer_parenthesizes_by_precedence() {
        let e = BoolExpr::and([
            BoolExpr::or([BoolExpr::var(0), BoolExpr::var(1)]),
            BoolExpr::not(BoolExpr::var(2)),
        ]);
        assert_eq!(e.render(), "(x0 | x1) & !x2");
        let x = BoolExpr::xor(BoolExpr::var(0), BoolExpr::xor(BoolExpr::var(1), BoolExpr::var(2)));
        assert_eq!(x.render(), "x0 ^ (x1 ^ x2)");
        let y = BoolExpr::xor(BoolExpr::xor(BoolExpr::var(0), BoolExpr::var(1)), BoolExpr::var(2));
        assert_eq!(y.render(), "x0 ^ x1 ^ x2");
        assert_eq!(BoolExpr::not(BoolExpr::and([BoolExpr::var(0), BoolExpr::var(1)])).render(), "!(x0 & x1)");
    }

    #[test]
    fn substitute_folds_constants() {
        let e = BoolExpr::and([BoolExpr::var(0), BoolExpr::var(1)]);
        assert_eq!(e.substitute(&[Some(false), None], &[0, 0]), BoolExpr::Const(false));
        assert_eq!(e.substitute(&[Some(true), None], &[0, 0]), BoolExpr::var(0));
        let x = BoolExpr::xor(BoolExpr::var(0), BoolExpr::var(1));
        assert_eq!(x.substitute(&[Some(true), None], &[0, 0]), BoolExpr::not(BoolExpr::var(0)));
    }
}

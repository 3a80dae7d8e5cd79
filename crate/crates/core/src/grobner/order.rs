use std::cmp::Ordering;

/// A term `x^exp * e_pos` of a free module over `Z[x1, ..., xn]`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Term {
    pub pos: usize,
    pub exp: Vec<u32>,
}

impl Term {
    pub fn degree(&self) -> u64 {
        self.exp.iter().map(|&e| e as u64).sum()
    }

    /// True if `self` divides `other` (same position, componentwise `<=`).
    pub fn divides(&self, other: &Term) -> bool {
        self.pos == other.pos && self.exp.iter().zip(&other.exp).all(|(a, b)| a <= b)
    }

    /// `other / self` as an exponent vector; caller guarantees divisibility.
    pub fn quotient(&self, other: &Term) -> Vec<u32> {
        other.exp.iter().zip(&self.exp).map(|(a, b)| a - b).collect()
    }

    pub fn lcm_exp(&self, other: &Term) -> Vec<u32> {
        self.exp.iter().zip(&other.exp).map(|(a, b)| *a.max(b)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrderKind {
    GRevLex,
    Lex,
    /// Block order: blocks compared left to right, graded reverse
    /// lexicographic inside each block. Block sizes must sum to the number
    /// of variables.
    Elimination(Vec<usize>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModuleOrder {
    PositionOverTerm,
    TermOverPosition,
}

/// Monomial order on module terms. Positions with a smaller index are larger,
/// so under position-over-term the leading components are eliminated first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialOrder {
    pub kind: OrderKind,
    pub module: ModuleOrder,
}

impl Default for MonomialOrder {
    fn default() -> Self {
        MonomialOrder {
            kind: OrderKind::GRevLex,
            module: ModuleOrder::TermOverPosition,
        }
    }
}

impl MonomialOrder {
    pub fn grevlex() -> Self {
        Self::default()
    }

    pub fn lex() -> Self {
        MonomialOrder {
            kind: OrderKind::Lex,
            module: ModuleOrder::TermOverPosition,
        }
    }

    pub fn with_module(mut self, module: ModuleOrder) -> Self {
        self.module = module;
        self
    }

    pub fn cmp_exp(&self, a: &[u32], b: &[u32]) -> Ordering {
        match &self.kind {
            OrderKind::GRevLex => grevlex(a, b),
            OrderKind::Lex => a.cmp(b),
            OrderKind::Elimination(blocks) => {
                let mut start = 0;
                for &len in blocks {
                    let end = (start + len).min(a.len());
                    let o = grevlex(&a[start..end], &b[start..end]);
                    if o != Ordering::Equal {
                        return o;
                    }
                    start = end;
                }
                grevlex(&a[start..], &b[start..])
            }
        }
    }

    pub fn cmp(&self, a: &Term, b: &Term) -> Ordering {
        let pos = b.pos.cmp(&a.pos);
        match self.module {
            ModuleOrder::PositionOverTerm => pos.then_with(|| self.cmp_exp(&a.exp, &b.exp)),
            ModuleOrder::TermOverPosition => self.cmp_exp(&a.exp, &b.exp).then(pos),
        }
    }
}

fn grevlex(a: &[u32], b: &[u32]) -> Ordering {
    let da: u64 = a.iter().map(|&e| e as u64).sum();
    let db: u64 = b.iter().map(|&e| e as u64).sum();
    da.cmp(&db).then_with(|| {
        for (x, y) in a.iter().zip(b).rev() {
            if x != y {
                return y.cmp(x);
            }
        }
        Ordering::Equal
    })
}

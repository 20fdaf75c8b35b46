//! Majority-formula representation of aggregators.
//!
//! Any aggregator can be written as a two-level formula of majority gates
//! over literals and constants: each DNF term becomes a wide majority padded
//! with constant-0 children, and the disjunction of terms becomes a wide
//! majority padded with constant-1 children.

use super::Aggregator;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Gate {
    Const0,
    Const1,
    Literal { index: usize, negated: bool },
    Maj(Vec<Gate>),
}

impl Gate {
    fn eval(&self, input: &[u8]) -> u8 {
        match self {
            Gate::Const0 => 0,
            Gate::Const1 => 1,
            Gate::Literal { index, negated } => input[*index] ^ *negated as u8,
            Gate::Maj(children) => {
                let ones: usize = children.iter().map(|c| c.eval(input) as usize).sum();
                (2 * ones > children.len()) as u8
            }
        }
    }

    fn well_formed(&self, arity: usize) -> bool {
        match self {
            Gate::Const0 | Gate::Const1 => true,
            Gate::Literal { index, .. } => *index < arity,
            Gate::Maj(children) => {
                children.len() % 2 == 1 && children.iter().all(|c| c.well_formed(arity))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MajorityFormula {
    arity: usize,
    root: Gate,
}

impl MajorityFormula {
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn root(&self) -> &Gate {
        &self.root
    }

    /// Recursive evaluation; a majority gate fires when strictly more than
    /// half of its children do.
    pub fn eval(&self, input: &[u8]) -> u8 {
        debug_assert_eq!(input.len(), self.arity);
        self.root.eval(input)
    }

    /// Every majority gate has odd fan-in and every literal is in range.
    pub fn well_formed(&self) -> bool {
        self.root.well_formed(self.arity)
    }

    /// Total gate count, literals and constants included.
    pub fn size(&self) -> usize {
        fn count(g: &Gate) -> usize {
            match g {
                Gate::Maj(children) => 1 + children.iter().map(count).sum::<usize>(),
                _ => 1,
            }
        }
        count(&self.root)
    }
}

/// Decompose an aggregator into a majority formula through its full DNF:
/// one term per satisfying assignment, each term a `MAJ_{2k-1}` over the k
/// literals plus k-1 constant-0 children, and the terms joined by a
/// `MAJ_{2m-1}` padded with m-1 constant-1 children. Constant aggregators
/// collapse to a constant leaf.
pub fn dnf_majority_decompose(g: &Aggregator) -> MajorityFormula {
    let k = g.arity();
    let minterms: Vec<usize> = (0..1usize << k)
        .filter(|&idx| g.eval_index(idx) == 1)
        .collect();
    let m = minterms.len();
    if m == 0 {
        return MajorityFormula {
            arity: k,
            root: Gate::Const0,
        };
    }
    if m == 1 << k {
        return MajorityFormula {
            arity: k,
            root: Gate::Const1,
        };
    }

    let terms: Vec<Gate> = minterms
        .iter()
        .map(|&assignment| {
            let mut children = Vec::with_capacity(2 * k - 1);
            for j in 0..k {
                // input j is the (k-1-j)-th bit of the assignment index
                let bit = assignment >> (k - 1 - j) & 1;
                children.push(Gate::Literal {
                    index: j,
                    negated: bit == 0,
                });
            }
            children.extend(std::iter::repeat_n(Gate::Const0, k - 1));
            if children.len() == 1 {
                children.pop().expect("single literal")
            } else {
                Gate::Maj(children)
            }
        })
        .collect();

    let root = if m == 1 {
        terms.into_iter().next().expect("one term")
    } else {
        let mut children = terms;
        children.extend(std::iter::repeat_n(Gate::Const1, m - 1));
        Gate::Maj(children)
    };

    MajorityFormula { arity: k, root }
}

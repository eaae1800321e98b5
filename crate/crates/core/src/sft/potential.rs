use std::collections::BTreeMap;

use rustc_hash::FxHashMap;

use super::{Component, Sft};
use crate::error::{Error, Result};

/// A locally constant potential on the shift.
#[derive(Debug, Clone, PartialEq)]
pub enum Potential {
    Constant(f64),
    /// One value per symbol.
    Edge(Vec<f64>),
    /// Values on allowed blocks of `length` consecutive symbols. Every allowed
    /// block inside a component the potential is used on must have a value.
    Block {
        length: usize,
        values: BTreeMap<Vec<usize>, f64>,
    },
}

impl Potential {
    /// Number of symbols the potential reads.
    pub fn block_length(&self) -> usize {
        match self {
            Potential::Constant(_) | Potential::Edge(_) => 1,
            Potential::Block { length, .. } => *length,
        }
    }

    /// The value on a block of exactly [`Potential::block_length`] symbols.
    pub fn value(&self, block: &[usize]) -> Result<f64> {
        if block.len() != self.block_length() {
            return Err(Error::InvalidPotential(format!(
                "block of length {} for a potential of block length {}",
                block.len(),
                self.block_length()
            )));
        }
        let v = match self {
            Potential::Constant(c) => *c,
            Potential::Edge(values) => *values.get(block[0]).ok_or_else(|| {
                Error::InvalidPotential(format!("no value for symbol {}", block[0]))
            })?,
            Potential::Block { values, .. } => *values
                .get(block)
                .ok_or_else(|| Error::InvalidPotential(format!("no value for block {block:?}")))?,
        };
        if !v.is_finite() {
            return Err(Error::InvalidPotential(format!(
                "non-finite value on {block:?}"
            )));
        }
        Ok(v)
    }

    fn check(&self, sft: &Sft) -> Result<()> {
        match self {
            Potential::Edge(values) if values.len() != sft.len() => Err(Error::InvalidPotential(
                format!("{} values for {} symbols", values.len(), sft.len()),
            )),
            Potential::Block { length: 0, .. } => Err(Error::InvalidPotential(
                "block length must be at least 1".into(),
            )),
            _ => Ok(()),
        }
    }
}

/// A component recoded so that the potential depends on one symbol: the new
/// symbols are the allowed blocks of the potential's length inside the
/// component, and consecutive blocks overlap in all but one position.
#[derive(Debug, Clone, PartialEq)]
pub struct RecodedComponent {
    pub block_length: usize,
    /// Blocks of original symbols, in lexicographic order.
    pub symbols: Vec<Vec<usize>>,
    pub successors: Vec<Vec<usize>>,
    /// Potential value on each block.
    pub weights: Vec<f64>,
    pub period: usize,
    /// Cyclic class of the first symbol of each block.
    pub cyclic_class: Vec<usize>,
    index: FxHashMap<Vec<usize>, usize>,
}

impl RecodedComponent {
    pub fn new(sft: &Sft, component: &Component, psi: &Potential) -> Result<Self> {
        psi.check(sft)?;
        let k = psi.block_length();
        let mut symbols: Vec<Vec<usize>> = component.edges.iter().map(|&e| vec![e]).collect();
        for _ in 1..k {
            symbols = symbols
                .into_iter()
                .flat_map(|block| {
                    let last = *block.last().unwrap();
                    sft.successors(last)
                        .iter()
                        .filter(|&&f| component.contains(f))
                        .map(|&f| {
                            let mut b = block.clone();
                            b.push(f);
                            b
                        })
                        .collect::<Vec<_>>()
                })
                .collect();
        }
        symbols.sort();
        let index: FxHashMap<Vec<usize>, usize> = symbols
            .iter()
            .enumerate()
            .map(|(i, b)| (b.clone(), i))
            .collect();
        let successors = symbols
            .iter()
            .map(|b| {
                let last = *b.last().unwrap();
                sft.successors(last)
                    .iter()
                    .filter(|&&f| component.contains(f))
                    .filter_map(|&f| {
                        let mut next = b[1..].to_vec();
                        next.push(f);
                        index.get(&next).copied()
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
        let weights = symbols
            .iter()
            .map(|b| psi.value(b))
            .collect::<Result<Vec<_>>>()?;
        let cyclic_class = symbols
            .iter()
            .map(|b| component.cyclic_class[component.local_index(b[0]).unwrap()])
            .collect();
        Ok(RecodedComponent {
            block_length: k,
            symbols,
            successors,
            weights,
            period: component.period,
            cyclic_class,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn index_of(&self, block: &[usize]) -> Option<usize> {
        self.index.get(block).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sft::components;

    #[test]
    fn block_recoding_of_the_full_two_shift() {
        let sft = Sft::from_graph(1, &[(0, 0), (0, 0)]);
        let dec = components(&sft);
        let values: BTreeMap<Vec<usize>, f64> = [
            (vec![0, 0], 0.0),
            (vec![0, 1], 1.0),
            (vec![1, 0], 2.0),
            (vec![1, 1], 3.0),
        ]
        .into_iter()
        .collect();
        let psi = Potential::Block { length: 2, values };
        let rc = RecodedComponent::new(&sft, &dec.components[0], &psi).unwrap();
        assert_eq!(rc.len(), 4);
        assert_eq!(rc.weights, vec![0.0, 1.0, 2.0, 3.0]);
        // [0,1] is followed by [1,0] and [1,1]
        assert_eq!(rc.successors[1], vec![2, 3]);
    }

    #[test]
    fn missing_or_bad_values_are_rejected() {
        let sft = Sft::from_graph(1, &[(0, 0), (0, 0)]);
        let dec = components(&sft);
        let c = &dec.components[0];
        let short = Potential::Edge(vec![1.0]);
        assert!(matches!(
            RecodedComponent::new(&sft, c, &short),
            Err(Error::InvalidPotential(_))
        ));
        let nan = Potential::Edge(vec![1.0, f64::NAN]);
        assert!(matches!(
            RecodedComponent::new(&sft, c, &nan),
            Err(Error::InvalidPotential(_))
        ));
        let partial = Potential::Block {
            length: 2,
            values: [(vec![0, 0], 1.0)].into_iter().collect(),
        };
        assert!(matches!(
            RecodedComponent::new(&sft, c, &partial),
            Err(Error::InvalidPotential(_))
        ));
    }
}

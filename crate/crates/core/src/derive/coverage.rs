use crate::grammar::Grammar;

/// Set of (production, alternative) pairs fired during derivation, as a
/// bitset over the grammar's flat alternative numbering.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RuleCoverage {
    bits: Vec<u64>,
}

impl RuleCoverage {
    pub fn new(grammar: &Grammar) -> Self {
        RuleCoverage {
            bits: vec![0; grammar.alternative_count().div_ceil(64)],
        }
    }

    pub fn insert(&mut self, flat: usize) {
        let word = flat / 64;
        if word >= self.bits.len() {
            self.bits.resize(word + 1, 0);
        }
        self.bits[word] |= 1 << (flat % 64);
    }

    pub fn contains(&self, flat: usize) -> bool {
        self.bits
            .get(flat / 64)
            .is_some_and(|w| w & (1 << (flat % 64)) != 0)
    }

    pub fn union_with(&mut self, other: &RuleCoverage) {
        if other.bits.len() > self.bits.len() {
            self.bits.resize(other.bits.len(), 0);
        }
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a |= b;
        }
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().flat_map(|(i, w)| {
            (0..64)
                .filter(move |b| w & (1 << b) != 0)
                .map(move |b| i * 64 + b)
        })
    }

    /// Fired pairs as (production name, alternative index).
    pub fn pairs<'g>(&self, grammar: &'g Grammar) -> Vec<(&'g str, usize)> {
        self.iter()
            .filter(|&f| f < grammar.alternative_count())
            .map(|f| grammar.unflatten_alternative(f))
            .collect()
    }
}

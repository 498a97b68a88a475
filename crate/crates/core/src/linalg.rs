//! Sparse linear algebra: exact incremental row echelon form over the
//! rationals with optional provenance tracking, and a tracked prime-field
//! variant for fast span membership.

use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;

use num_traits::{One, Zero};

use crate::lincomb::{LinComb, Q};

pub type SparseVec = BTreeMap<usize, Q>;

/// Assigns dense column indices to basis objects.
#[derive(Debug, Clone)]
pub struct Indexer<T: Hash + Eq + Clone> {
    index: HashMap<T, usize>,
    items: Vec<T>,
}

impl<T: Hash + Eq + Clone> Default for Indexer<T> {
    fn default() -> Self {
        Indexer { index: HashMap::new(), items: Vec::new() }
    }
}

impl<T: Hash + Eq + Clone> Indexer<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn id(&mut self, t: &T) -> usize {
        if let Some(&i) = self.index.get(t) {
            return i;
        }
        let i = self.items.len();
        self.index.insert(t.clone(), i);
        self.items.push(t.clone());
        i
    }

    pub fn get(&self, t: &T) -> Option<usize> {
        self.index.get(t).copied()
    }

    pub fn item(&self, i: usize) -> &T {
        &self.items[i]
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Sparse coordinates of a linear combination, registering new basis items.
    pub fn vector(&mut self, x: &LinComb<T>) -> SparseVec
    where
        T: Ord,
    {
        x.iter().map(|(t, c)| (self.id(t), c.clone())).collect()
    }

    /// Coordinates without registering; `None` if some basis item is unknown.
    pub fn try_vector(&self, x: &LinComb<T>) -> Option<SparseVec>
    where
        T: Ord,
    {
        x.iter().map(|(t, c)| self.get(t).map(|i| (i, c.clone()))).collect()
    }
}

fn axpy(v: &mut SparseVec, c: &Q, row: &SparseVec) {
    for (&j, r) in row {
        let e = v.entry(j).or_insert_with(Q::zero);
        *e -= c * r;
        if e.is_zero() {
            v.remove(&j);
        }
    }
}

/// Rows in echelon form keyed by their pivot (smallest column), pivot
/// coefficient one. With tracking on, each row carries its expression in
/// terms of the inserted vectors' tags.
#[derive(Debug, Clone, Default)]
pub struct Echelon {
    rows: Vec<SparseVec>,
    provenance: Vec<SparseVec>,
    pivot_of: HashMap<usize, usize>,
    track: bool,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn tracked() -> Self {
        Echelon { track: true, ..Self::default() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Residual of `v` modulo the span, and (when tracking) the combination
    /// of tags subtracted along the way: `v = residual + Σ combo_t · tag_t`.
    pub fn reduce(&self, mut v: SparseVec) -> (SparseVec, SparseVec) {
        let mut combo = SparseVec::new();
        let mut cursor = 0usize;
        loop {
            let next = v.range(cursor..).find(|(i, _)| self.pivot_of.contains_key(i)).map(|(i, c)| (*i, c.clone()));
            let Some((i, c)) = next else { break };
            let r = self.pivot_of[&i];
            axpy(&mut v, &c, &self.rows[r]);
            if self.track {
                axpy(&mut combo, &-c, &self.provenance[r]);
            }
            cursor = i + 1;
        }
        (v, combo)
    }

    pub fn contains(&self, v: SparseVec) -> bool {
        self.reduce(v).0.is_empty()
    }

    /// Inserts `v`; returns whether it was independent.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        self.insert_tagged(v, usize::MAX)
    }

    /// Inserts `v` under `tag` (tracked mode records the tag).
    pub fn insert_tagged(&mut self, v: SparseVec, tag: usize) -> bool {
        let (mut v, combo) = self.reduce(v);
        let Some((&p, lead)) = v.iter().next() else { return false };
        let inv = Q::one() / lead;
        for c in v.values_mut() {
            *c *= &inv;
        }
        let mut prov = SparseVec::new();
        if self.track {
            prov = combo.into_iter().map(|(t, c)| (t, -c)).collect();
            let e = prov.entry(tag).or_insert_with(Q::zero);
            *e += Q::one();
            for c in prov.values_mut() {
                *c *= &inv;
            }
            prov.retain(|_, c| !c.is_zero());
        }
        self.pivot_of.insert(p, self.rows.len());
        self.rows.push(v);
        self.provenance.push(prov);
        true
    }

    /// For `v` in the span, coefficients `c_t` with `v = Σ c_t · vector(t)`.
    pub fn solve(&self, v: SparseVec) -> Option<SparseVec> {
        assert!(self.track, "solve needs a tracked echelon");
        let (res, combo) = self.reduce(v);
        if !res.is_empty() {
            return None;
        }
        Some(combo)
    }
}

/// Prime used by [`ModEchelon`].
pub const MOD_P: u64 = (1 << 61) - 1;

pub type ModVec = BTreeMap<usize, u64>;

fn mod_mul(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % MOD_P as u128) as u64
}

fn mod_pow(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mod_mul(r, a);
        }
        a = mod_mul(a, a);
        e >>= 1;
    }
    r
}

fn mod_inv(a: u64) -> u64 {
    mod_pow(a, MOD_P - 2)
}

/// Image of a rational modulo [`MOD_P`]; `None` if the denominator is divisible by it.
pub fn to_mod(c: &Q) -> Option<u64> {
    let p = num_bigint::BigInt::from(MOD_P);
    let red = |x: &num_bigint::BigInt| {
        let r = ((x % &p) + &p) % &p;
        u64::try_from(r).expect("reduced below the prime")
    };
    let d = red(c.denom());
    if d == 0 {
        return None;
    }
    Some(mod_mul(red(c.numer()), mod_inv(d)))
}

pub fn mod_vector(v: &SparseVec) -> Option<ModVec> {
    let mut out = ModVec::new();
    for (&i, c) in v {
        let m = to_mod(c)?;
        if m != 0 {
            out.insert(i, m);
        }
    }
    Some(out)
}

fn mod_axpy(v: &mut ModVec, c: u64, row: &ModVec) {
    let neg = MOD_P - c;
    for (&j, &r) in row {
        let e = v.entry(j).or_insert(0);
        *e = (*e + mod_mul(neg, r)) % MOD_P;
        if *e == 0 {
            v.remove(&j);
        }
    }
}

/// Tracked row echelon form over the prime field of [`MOD_P`]; a fast
/// stand-in for [`Echelon`] whose answers are confirmed exactly by callers.
#[derive(Debug, Clone, Default)]
pub struct ModEchelon {
    rows: Vec<ModVec>,
    provenance: Vec<ModVec>,
    pivot_of: HashMap<usize, usize>,
}

impl ModEchelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, mut v: ModVec) -> (ModVec, ModVec) {
        let mut combo = ModVec::new();
        let mut cursor = 0usize;
        loop {
            let next = v.range(cursor..).find(|(i, _)| self.pivot_of.contains_key(i)).map(|(i, c)| (*i, *c));
            let Some((i, c)) = next else { break };
            let r = self.pivot_of[&i];
            mod_axpy(&mut v, c, &self.rows[r]);
            mod_axpy(&mut combo, MOD_P - c, &self.provenance[r]);
            cursor = i + 1;
        }
        (v, combo)
    }

    pub fn insert_tagged(&mut self, v: ModVec, tag: usize) -> bool {
        let (mut v, combo) = self.reduce(v);
        let Some((&p, &lead)) = v.iter().next() else { return false };
        let inv = mod_inv(lead);
        for c in v.values_mut() {
            *c = mod_mul(*c, inv);
        }
        let mut prov: ModVec = combo.into_iter().map(|(t, c)| (t, MOD_P - c)).collect();
        let e = prov.entry(tag).or_insert(0);
        *e = (*e + 1) % MOD_P;
        for c in prov.values_mut() {
            *c = mod_mul(*c, inv);
        }
        prov.retain(|_, c| *c != 0);
        self.pivot_of.insert(p, self.rows.len());
        self.rows.push(v);
        self.provenance.push(prov);
        true
    }

    /// Tags whose vectors combine to `v`, if `v` lies in the span.
    pub fn support(&self, v: ModVec) -> Option<Vec<usize>> {
        let (res, combo) = self.reduce(v);
        res.is_empty().then(|| combo.into_keys().collect())
    }
}

/// Rank of a list of vectors.
pub fn rank(vectors: impl IntoIterator<Item = SparseVec>) -> usize {
    let mut e = Echelon::new();
    for v in vectors {
        e.insert(v);
    }
    e.rank()
}

pub fn dense_to_sparse(row: &[Q]) -> SparseVec {
    row.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (i, c.clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lincomb::q;
    use proptest::prelude::*;

    fn sv(entries: &[(usize, i64)]) -> SparseVec {
        entries.iter().filter(|(_, c)| *c != 0).map(|&(i, c)| (i, q(c))).collect()
    }

    #[test]
    fn rank_of_dependent_rows() {
        let rows = vec![sv(&[(0, 1), (1, 2)]), sv(&[(0, 2), (1, 4)]), sv(&[(1, 1), (2, 1)])];
        assert_eq!(rank(rows), 2);
    }

    #[test]
    fn solve_recovers_combination() {
        let mut e = Echelon::tracked();
        e.insert_tagged(sv(&[(0, 1), (1, 1)]), 10);
        e.insert_tagged(sv(&[(1, 1), (2, 1)]), 11);
        let target = sv(&[(0, 2), (1, 5), (2, 3)]);
        let combo = e.solve(target).unwrap();
        assert_eq!(combo, sv(&[(10, 2), (11, 3)]));
        assert!(e.solve(sv(&[(2, 1)])).is_none());
    }

    #[test]
    fn indexer_round_trip() {
        let mut ix: Indexer<u32> = Indexer::new();
        assert_eq!(ix.id(&7), 0);
        assert_eq!(ix.id(&3), 1);
        assert_eq!(ix.id(&7), 0);
        assert_eq!(*ix.item(1), 3);
    }

    #[test]
    fn modular_images() {
        assert_eq!(to_mod(&q(3)), Some(3));
        assert_eq!(to_mod(&q(-1)), Some(MOD_P - 1));
        let half = to_mod(&(q(1) / q(2))).unwrap();
        assert_eq!(mod_mul(half, 2), 1);
    }

    #[test]
    fn modular_support() {
        let mut e = ModEchelon::new();
        e.insert_tagged(mod_vector(&sv(&[(0, 1), (1, 1)])).unwrap(), 0);
        e.insert_tagged(mod_vector(&sv(&[(2, 1)])).unwrap(), 1);
        e.insert_tagged(mod_vector(&sv(&[(1, 1), (2, 1)])).unwrap(), 2);
        assert_eq!(e.support(mod_vector(&sv(&[(0, 1), (1, 2), (2, 1)])).unwrap()), Some(vec![0, 2]));
        assert_eq!(e.support(mod_vector(&sv(&[(3, 1)])).unwrap()), None);
    }

    proptest! {
        #[test]
        fn modular_agrees_with_exact(rows in prop::collection::vec(prop::collection::vec(-3i64..4, 5), 1..7),
                                     target in prop::collection::vec(-3i64..4, 5)) {
            let vecs: Vec<SparseVec> = rows.iter().map(|r| dense_to_sparse(&r.iter().map(|&c| q(c)).collect::<Vec<_>>())).collect();
            let mut exact = Echelon::new();
            let mut modular = ModEchelon::new();
            for (t, v) in vecs.iter().enumerate() {
                exact.insert(v.clone());
                modular.insert_tagged(mod_vector(v).unwrap(), t);
            }
            let t = dense_to_sparse(&target.iter().map(|&c| q(c)).collect::<Vec<_>>());
            prop_assert_eq!(exact.rank(), modular.rank());
            prop_assert_eq!(exact.contains(t.clone()), modular.support(mod_vector(&t).unwrap()).is_some());
        }

        #[test]
        fn solve_is_exact(rows in prop::collection::vec(prop::collection::vec(-3i64..4, 5), 1..6),
                          coefs in prop::collection::vec(-3i64..4, 6)) {
            let mut e = Echelon::tracked();
            let vecs: Vec<SparseVec> = rows.iter().map(|r| dense_to_sparse(&r.iter().map(|&c| q(c)).collect::<Vec<_>>())).collect();
            for (t, v) in vecs.iter().enumerate() {
                e.insert_tagged(v.clone(), t);
            }
            let mut target = SparseVec::new();
            for (v, &c) in vecs.iter().zip(&coefs) {
                axpy(&mut target, &q(-c), v);
            }
            let combo = e.solve(target.clone()).expect("in span");
            let mut back = SparseVec::new();
            for (t, c) in combo {
                axpy(&mut back, &-c, &vecs[t]);
            }
            prop_assert_eq!(back, target);
        }

        #[test]
        fn rank_bounded_by_rows_and_cols(rows in prop::collection::vec(prop::collection::vec(-2i64..3, 4), 0..7)) {
            let r = rank(rows.iter().map(|r| dense_to_sparse(&r.iter().map(|&c| q(c)).collect::<Vec<_>>())));
            prop_assert!(r <= rows.len().min(4));
        }
    }
}

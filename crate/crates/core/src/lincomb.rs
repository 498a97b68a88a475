//! Finite rational linear combinations over an ordered basis.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational scalars.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Basis elements that know whether they are the multiplicative unit, so
/// that rendering can print `3` instead of `3*1`.
pub trait Basis: Ord + Clone + fmt::Display {
    fn is_unit(&self) -> bool;
}

/// A map from basis elements to nonzero rationals, kept in basis order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LinComb<T: Ord> {
    terms: BTreeMap<T, Q>,
}

impl<T: Ord> Default for LinComb<T> {
    fn default() -> Self {
        LinComb { terms: BTreeMap::new() }
    }
}

impl<T: Ord + Clone> LinComb<T> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_term(t: T, c: Q) -> Self {
        let mut out = Self::zero();
        out.add_term(t, c);
        out
    }

    pub fn basis(t: T) -> Self {
        Self::from_term(t, Q::one())
    }

    pub fn add_term(&mut self, t: T, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(t) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &LinComb<T>, c: &Q) {
        if c.is_zero() {
            return;
        }
        for (t, d) in other.iter() {
            self.add_term(t.clone(), d * c);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&T, &Q)> + Clone {
        self.terms.iter()
    }

    pub fn into_iter_terms(self) -> impl Iterator<Item = (T, Q)> {
        self.terms.into_iter()
    }

    pub fn coefficient(&self, t: &T) -> Q {
        self.terms.get(t).cloned().unwrap_or_else(Q::zero)
    }

    pub fn contains(&self, t: &T) -> bool {
        self.terms.contains_key(t)
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LinComb { terms: self.terms.iter().map(|(t, d)| (t.clone(), d * c)).collect() }
    }

    pub fn neg(&self) -> Self {
        LinComb { terms: self.terms.iter().map(|(t, d)| (t.clone(), -d)).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &Q::one());
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &-Q::one());
        out
    }

    /// Linear extension of a basis map.
    pub fn flat_map<U: Ord + Clone>(&self, mut f: impl FnMut(&T) -> LinComb<U>) -> LinComb<U> {
        let mut out = LinComb::zero();
        for (t, c) in self.iter() {
            out.add_scaled(&f(t), c);
        }
        out
    }

    /// Linear extension of a basis map into an arbitrary vector space.
    pub fn fold_linear<V>(&self, zero: V, mut f: impl FnMut(&T) -> V, mut axpy: impl FnMut(&mut V, &Q, V)) -> V {
        let mut acc = zero;
        for (t, c) in self.iter() {
            let v = f(t);
            axpy(&mut acc, c, v);
        }
        acc
    }

    /// Bilinear extension of a basis product.
    pub fn bilinear<U: Ord + Clone, V: Ord + Clone>(
        &self,
        other: &LinComb<U>,
        mut f: impl FnMut(&T, &U) -> LinComb<V>,
    ) -> LinComb<V> {
        let mut out = LinComb::zero();
        for (s, c) in self.iter() {
            for (t, d) in other.iter() {
                out.add_scaled(&f(s, t), &(c * d));
            }
        }
        out
    }
}

impl<T: Ord + Clone> FromIterator<(T, Q)> for LinComb<T> {
    fn from_iter<I: IntoIterator<Item = (T, Q)>>(iter: I) -> Self {
        let mut out = Self::zero();
        for (t, c) in iter {
            out.add_term(t, c);
        }
        out
    }
}

pub fn fmt_rational(c: &Q) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// Renders `c·t` with the sign stripped, as it appears after `+` or `-`.
fn fmt_unsigned_term<T: Basis>(t: &T, c: &Q) -> String {
    let a = c.abs();
    if t.is_unit() {
        fmt_rational(&a)
    } else if a.is_one() {
        t.to_string()
    } else {
        format!("{}*{}", fmt_rational(&a), t)
    }
}

impl<T: Basis> fmt::Display for LinComb<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (t, c)) in self.iter().enumerate() {
            let body = fmt_unsigned_term(t, c);
            match (i, c.is_negative()) {
                (0, false) => f.write_str(&body)?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

impl<T: Basis> fmt::Debug for LinComb<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

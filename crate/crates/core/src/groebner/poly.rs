use std::cmp::Ordering;
use std::fmt;
use std::ops::Neg;
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Num, Signed, Zero};

use super::GroebnerError;

/// Exact coefficient field.
pub trait Field: Clone + PartialEq + fmt::Debug + Num + Neg<Output = Self> {
    fn from_rational(r: &BigRational) -> Self;
    fn write_coeff(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result;
}

impl Field for BigRational {
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn write_coeff(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Gaussian rationals.
impl Field for Complex<BigRational> {
    fn from_rational(r: &BigRational) -> Self {
        Complex::new(r.clone(), BigRational::zero())
    }

    fn write_coeff(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        if self.re.is_zero() {
            return write!(f, "{}*i", self.im);
        }
        let sign = if self.im.is_negative() { '-' } else { '+' };
        write!(f, "({} {} {}*i)", self.re, sign, self.im.abs())
    }
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn integer(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MonomialOrder {
    /// Pure lexicographic, first variable largest.
    Lex,
    /// Graded reverse lexicographic.
    GrevLex,
}

pub type Monomial = Box<[u16]>;

impl MonomialOrder {
    pub fn cmp(self, a: &[u16], b: &[u16]) -> Ordering {
        match self {
            MonomialOrder::Lex => a.cmp(b),
            MonomialOrder::GrevLex => {
                let da: u32 = a.iter().map(|&e| u32::from(e)).sum();
                let db: u32 = b.iter().map(|&e| u32::from(e)).sum();
                da.cmp(&db).then_with(|| {
                    for (x, y) in a.iter().zip(b).rev() {
                        if x != y {
                            return y.cmp(x);
                        }
                    }
                    Ordering::Equal
                })
            }
        }
    }
}

pub fn degree(m: &[u16]) -> u32 {
    m.iter().map(|&e| u32::from(e)).sum()
}

pub fn divides(a: &[u16], b: &[u16]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

pub fn lcm(a: &[u16], b: &[u16]) -> Monomial {
    a.iter().zip(b).map(|(&x, &y)| x.max(y)).collect()
}

fn mono_mul(a: &[u16], b: &[u16]) -> Monomial {
    a.iter().zip(b).map(|(&x, &y)| x + y).collect()
}

fn mono_div(a: &[u16], b: &[u16]) -> Monomial {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

/// Named variables and a monomial order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ring {
    names: Vec<String>,
    order: MonomialOrder,
}

impl Ring {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>, order: MonomialOrder) -> Arc<Self> {
        Arc::new(Self {
            names: names.into_iter().map(Into::into).collect(),
            order,
        })
    }

    pub fn arity(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// Sparse polynomial; terms are kept in ascending monomial order so the
/// leading term is the last one. Zero coefficients are never stored.
#[derive(Clone, PartialEq)]
pub struct MultiPoly<F> {
    ring: Arc<Ring>,
    terms: Vec<(Monomial, F)>,
}

impl<F: Field> fmt::Debug for MultiPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly({self})")
    }
}

impl<F: Field> MultiPoly<F> {
    pub fn zero(ring: &Arc<Ring>) -> Self {
        Self {
            ring: Arc::clone(ring),
            terms: Vec::new(),
        }
    }

    pub fn constant(ring: &Arc<Ring>, c: F) -> Self {
        Self::term(ring, vec![0; ring.arity()].into(), c)
    }

    pub fn one(ring: &Arc<Ring>) -> Self {
        Self::constant(ring, F::one())
    }

    pub fn term(ring: &Arc<Ring>, mono: Monomial, c: F) -> Self {
        let terms = if c.is_zero() { Vec::new() } else { vec![(mono, c)] };
        Self {
            ring: Arc::clone(ring),
            terms,
        }
    }

    /// The variable with index `i`.
    pub fn var(ring: &Arc<Ring>, i: usize) -> Self {
        let mut m = vec![0; ring.arity()];
        m[i] = 1;
        Self::term(ring, m.into(), F::one())
    }

    /// The variable called `name`; panics on an unknown name.
    pub fn named(ring: &Arc<Ring>, name: &str) -> Self {
        let i = ring.index_of(name).unwrap_or_else(|| panic!("unknown variable {name}"));
        Self::var(ring, i)
    }

    /// Builds from unsorted terms, combining duplicates.
    pub fn from_terms(ring: &Arc<Ring>, mut raw: Vec<(Monomial, F)>) -> Self {
        let order = ring.order();
        raw.sort_by(|a, b| order.cmp(&a.0, &b.0));
        let mut terms: Vec<(Monomial, F)> = Vec::with_capacity(raw.len());
        for (m, c) in raw {
            match terms.last_mut() {
                Some((lm, lc)) if *lm == m => *lc = lc.clone() + c,
                _ => {
                    if let Some((_, lc)) = terms.last() {
                        if lc.is_zero() {
                            terms.pop();
                        }
                    }
                    terms.push((m, c));
                }
            }
        }
        terms.retain(|(_, c)| !c.is_zero());
        Self {
            ring: Arc::clone(ring),
            terms,
        }
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
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

    /// Terms in descending order.
    pub fn terms(&self) -> impl Iterator<Item = (&[u16], &F)> {
        self.terms.iter().rev().map(|(m, c)| (&m[..], c))
    }

    pub fn leading_term(&self) -> Option<(&[u16], &F)> {
        self.terms.last().map(|(m, c)| (&m[..], c))
    }

    pub fn leading_monomial(&self) -> Option<&[u16]> {
        self.terms.last().map(|(m, _)| &m[..])
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|(m, _)| degree(m)).max().unwrap_or(0)
    }

    /// Coefficient of the given monomial.
    pub fn coefficient(&self, mono: &[u16]) -> F {
        self.terms
            .iter()
            .find(|(m, _)| &m[..] == mono)
            .map_or_else(F::zero, |(_, c)| c.clone())
    }

    fn same_ring(&self, other: &Self) -> Result<(), GroebnerError> {
        if Arc::ptr_eq(&self.ring, &other.ring) || self.ring == other.ring {
            Ok(())
        } else {
            Err(GroebnerError::RingMismatch)
        }
    }

    fn merge(&self, other: &Self, sign: bool) -> Self {
        let order = self.ring.order();
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() || j < b.len() {
            let pick = if i == a.len() {
                Ordering::Greater
            } else if j == b.len() {
                Ordering::Less
            } else {
                order.cmp(&a[i].0, &b[j].0)
            };
            match pick {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    let c = if sign { b[j].1.clone() } else { -b[j].1.clone() };
                    out.push((b[j].0.clone(), c));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if sign {
                        a[i].1.clone() + b[j].1.clone()
                    } else {
                        a[i].1.clone() - b[j].1.clone()
                    };
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        Self {
            ring: Arc::clone(&self.ring),
            terms: out,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, GroebnerError> {
        self.same_ring(other)?;
        Ok(self.merge(other, true))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, GroebnerError> {
        self.same_ring(other)?;
        Ok(self.merge(other, false))
    }

    pub fn mul(&self, other: &Self) -> Result<Self, GroebnerError> {
        self.same_ring(other)?;
        let mut raw = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                raw.push((mono_mul(ma, mb), ca.clone() * cb.clone()));
            }
        }
        Ok(Self::from_terms(&self.ring, raw))
    }

    pub fn scale(&self, c: &F) -> Self {
        if c.is_zero() {
            return Self::zero(&self.ring);
        }
        Self {
            ring: Arc::clone(&self.ring),
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a.clone() * c.clone())).collect(),
        }
    }

    /// `c·m·self`; the order is preserved because monomial orders are
    /// compatible with multiplication.
    pub fn mul_term(&self, mono: &[u16], c: &F) -> Self {
        if c.is_zero() {
            return Self::zero(&self.ring);
        }
        Self {
            ring: Arc::clone(&self.ring),
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (mono_mul(m, mono), a.clone() * c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::one(&self.ring);
        for _ in 0..e {
            out = out.mul(self).expect("same ring");
        }
        out
    }

    /// Leading coefficient scaled to one.
    pub fn monic(&self) -> Self {
        match self.leading_term() {
            Some((_, c)) => {
                let inv = F::one() / c.clone();
                self.scale(&inv)
            }
            None => self.clone(),
        }
    }

    /// Replaces variable `var` by `value` everywhere.
    pub fn substitute(&self, var: usize, value: &Self) -> Result<Self, GroebnerError> {
        self.same_ring(value)?;
        let mut out = Self::zero(&self.ring);
        let max_e = self.terms.iter().map(|(m, _)| m[var]).max().unwrap_or(0);
        let mut powers = vec![Self::one(&self.ring)];
        for k in 1..=max_e as usize {
            powers.push(powers[k - 1].mul(value)?);
        }
        for (m, c) in &self.terms {
            let mut rest = m.to_vec();
            let e = rest[var];
            rest[var] = 0;
            let t = powers[e as usize].mul_term(&rest, c);
            out = out.add(&t)?;
        }
        Ok(out)
    }

    /// Substitutes a constant for variable `var`.
    pub fn substitute_value(&self, var: usize, value: &F) -> Self {
        let raw = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut rest = m.to_vec();
                let e = rest[var];
                rest[var] = 0;
                let mut f = c.clone();
                for _ in 0..e {
                    f = f * value.clone();
                }
                (rest.into_boxed_slice(), f)
            })
            .collect();
        Self::from_terms(&self.ring, raw)
    }

    /// Value at a point given for every variable.
    pub fn eval(&self, point: &[F]) -> F {
        let mut acc = F::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, &e) in point.iter().zip(m.iter()) {
                for _ in 0..e {
                    t = t * v.clone();
                }
            }
            acc = acc + t;
        }
        acc
    }

    /// The same polynomial in another ring with the same variables, e.g.
    /// to change the monomial order.
    pub fn with_ring(&self, ring: &Arc<Ring>) -> Result<Self, GroebnerError> {
        if ring.arity() != self.ring.arity() {
            return Err(GroebnerError::RingMismatch);
        }
        Ok(Self::from_terms(ring, self.terms.clone()))
    }

    /// Maps coefficients into another field.
    pub fn map_coeffs<G: Field>(&self, f: impl Fn(&F) -> G) -> MultiPoly<G> {
        MultiPoly::from_terms(&self.ring, self.terms.iter().map(|(m, c)| (m.clone(), f(c))).collect())
    }

    /// Sparse text form, one `coeff * var^e ...` line per term, descending.
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

struct Coeff<'a, F>(&'a F);

impl<F: Field> fmt::Display for Coeff<'_, F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.write_coeff(f)
    }
}

impl<F: Field> fmt::Display for MultiPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms().enumerate() {
            if k > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{}", Coeff(c))?;
            let vars: Vec<String> = m
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    let name = &self.ring.names[i];
                    if e == 1 {
                        name.clone()
                    } else {
                        format!("{name}^{e}")
                    }
                })
                .collect();
            if !vars.is_empty() {
                write!(f, " * {}", vars.join(" "))?;
            }
        }
        Ok(())
    }
}

/// Work counter shared by reduction and Buchberger.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_pairs: u64,
    pub max_term_ops: u64,
    pub pairs: u64,
    pub term_ops: u64,
}

impl Budget {
    pub fn new(max_pairs: u64, max_term_ops: u64) -> Self {
        Self {
            max_pairs,
            max_term_ops,
            pairs: 0,
            term_ops: 0,
        }
    }

    pub fn unlimited() -> Self {
        Self::new(u64::MAX, u64::MAX)
    }

    pub(crate) fn spend_ops(&mut self, n: usize) -> Result<(), GroebnerError> {
        self.term_ops += n as u64;
        if self.term_ops > self.max_term_ops {
            return Err(GroebnerError::ResourceExceeded {
                pairs: self.pairs,
                term_ops: self.term_ops,
            });
        }
        Ok(())
    }

    pub(crate) fn spend_pair(&mut self) -> Result<(), GroebnerError> {
        self.pairs += 1;
        if self.pairs > self.max_pairs {
            return Err(GroebnerError::ResourceExceeded {
                pairs: self.pairs,
                term_ops: self.term_ops,
            });
        }
        Ok(())
    }
}

/// `lcm/lt(f)·f − lcm/lt(g)·g`.
pub fn s_polynomial<F: Field>(f: &MultiPoly<F>, g: &MultiPoly<F>) -> Result<MultiPoly<F>, GroebnerError> {
    f.same_ring(g)?;
    let (Some((mf, cf)), Some((mg, cg))) = (f.leading_term(), g.leading_term()) else {
        return Ok(MultiPoly::zero(f.ring()));
    };
    let l = lcm(mf, mg);
    let a = f.mul_term(&mono_div(&l, mf), &(F::one() / cf.clone()));
    let b = g.mul_term(&mono_div(&l, mg), &(F::one() / cg.clone()));
    a.sub(&b)
}

/// Normal form of `f` with respect to `basis` (full reduction).
pub fn reduce<F: Field>(f: &MultiPoly<F>, basis: &[MultiPoly<F>]) -> Result<MultiPoly<F>, GroebnerError> {
    reduce_with_budget(f, basis, &mut Budget::unlimited())
}

pub fn reduce_with_budget<F: Field>(
    f: &MultiPoly<F>,
    basis: &[MultiPoly<F>],
    budget: &mut Budget,
) -> Result<MultiPoly<F>, GroebnerError> {
    for g in basis {
        f.same_ring(g)?;
    }
    let mut p = f.clone();
    let mut rem: Vec<(Monomial, F)> = Vec::new();
    while let Some((m, c)) = p.terms.last().cloned() {
        let divisor = basis
            .iter()
            .find(|g| g.leading_monomial().is_some_and(|lm| divides(lm, &m)));
        match divisor {
            Some(g) => {
                let (lm, lc) = g.leading_term().expect("nonzero");
                let factor = c / lc.clone();
                let shifted = g.mul_term(&mono_div(&m, lm), &factor);
                budget.spend_ops(g.len())?;
                p = p.merge(&shifted, false);
            }
            None => {
                p.terms.pop();
                rem.push((m, c));
            }
        }
    }
    rem.reverse();
    Ok(MultiPoly {
        ring: Arc::clone(&f.ring),
        terms: rem,
    })
}

//! Small helpers on vectors stored as slices.

use num_traits::{Float, Zero};

use crate::scalar::Entry;

/// Bilinear product `xᵀy` (no conjugation).
pub fn dot<E: Entry>(x: &[E], y: &[E]) -> E {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).fold(E::zero(), |acc, (&a, &b)| acc + a * b)
}

/// Sesquilinear product `xᴴy`.
pub fn dot_h<E: Entry>(x: &[E], y: &[E]) -> E {
    debug_assert_eq!(x.len(), y.len());
    x.iter()
        .zip(y)
        .fold(E::zero(), |acc, (&a, &b)| acc + a.conj() * b)
}

pub fn norm2<E: Entry>(x: &[E]) -> E::Real {
    x.iter()
        .fold(E::Real::zero(), |acc, e| {
            let m = e.modulus();
            acc + m * m
        })
        .sqrt()
}

pub fn norm_max<E: Entry>(x: &[E]) -> E::Real {
    x.iter()
        .map(|e| e.modulus())
        .fold(E::Real::zero(), Float::max)
}

pub fn scale<E: Entry>(x: &[E], s: E) -> Vec<E> {
    x.iter().map(|&a| a * s).collect()
}

pub fn add<E: Entry>(x: &[E], y: &[E]) -> Vec<E> {
    x.iter().zip(y).map(|(&a, &b)| a + b).collect()
}

pub fn sub<E: Entry>(x: &[E], y: &[E]) -> Vec<E> {
    x.iter().zip(y).map(|(&a, &b)| a - b).collect()
}

pub fn conj<E: Entry>(x: &[E]) -> Vec<E> {
    x.iter().map(|&a| a.conj()).collect()
}

/// Scales `x` to unit 2-norm; leaves the zero vector unchanged.
pub fn normalized<E: Entry>(x: &[E]) -> Vec<E> {
    let n = norm2(x);
    if n == E::Real::zero() {
        return x.to_vec();
    }
    scale(x, E::from_real(n.recip()))
}

//! Exact half-integer quantum numbers.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A half-integer stored as twice its value, so `j = 3/2` is `HalfInteger(3)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HalfInteger(i32);

impl HalfInteger {
    pub const ZERO: HalfInteger = HalfInteger(0);
    pub const HALF: HalfInteger = HalfInteger(1);
    pub const ONE: HalfInteger = HalfInteger(2);

    pub const fn from_twice(twice: i32) -> Self {
        HalfInteger(twice)
    }

    pub const fn from_int(value: i32) -> Self {
        HalfInteger(2 * value)
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub const fn abs(self) -> Self {
        HalfInteger(self.0.abs())
    }

    /// Dimension `2j+1` of the irreducible space labelled by `self`.
    pub fn dim(self) -> usize {
        debug_assert!(self.0 >= 0);
        self.0 as usize + 1
    }

    /// Checks that `self` is a valid representation label (`j ≥ 0`).
    pub fn check_label(self) -> Result<Self> {
        if self.0 < 0 {
            return Err(Error::domain(format!("representation label j = {self} is negative")));
        }
        Ok(self)
    }

    /// Checks `|mu| ≤ j` and `j - mu ∈ ℤ`.
    pub fn check_projection(self, mu: HalfInteger) -> Result<()> {
        self.check_label()?;
        if mu.0.abs() > self.0 {
            return Err(Error::domain(format!("|mu| = {} exceeds j = {self}", mu.abs())));
        }
        if (self.0 - mu.0) % 2 != 0 {
            return Err(Error::domain(format!("parity mismatch between j = {self} and mu = {mu}")));
        }
        Ok(())
    }

    /// Projections `μ = j, j-1, …, -j` in basis order.
    pub fn projections(self) -> impl DoubleEndedIterator<Item = HalfInteger> + ExactSizeIterator {
        let j = self.0;
        (0..(j + 1).max(0)).map(move |k| HalfInteger(j - 2 * k))
    }

    /// Row index of `|j,μ⟩` in the basis ordering (row 0 is `μ = j`).
    pub fn index_of(self, mu: HalfInteger) -> usize {
        debug_assert!(mu.0.abs() <= self.0 && (self.0 - mu.0) % 2 == 0);
        ((self.0 - mu.0) / 2) as usize
    }

    /// Inverse of [`index_of`](Self::index_of).
    pub fn projection_at(self, index: usize) -> HalfInteger {
        HalfInteger(self.0 - 2 * index as i32)
    }
}

impl fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl Add for HalfInteger {
    type Output = HalfInteger;
    fn add(self, rhs: Self) -> Self {
        HalfInteger(self.0 + rhs.0)
    }
}

impl Sub for HalfInteger {
    type Output = HalfInteger;
    fn sub(self, rhs: Self) -> Self {
        HalfInteger(self.0 - rhs.0)
    }
}

impl Neg for HalfInteger {
    type Output = HalfInteger;
    fn neg(self) -> Self {
        HalfInteger(-self.0)
    }
}

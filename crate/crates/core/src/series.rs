//! Truncated formal power series with exact integer coefficients.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Coefficients of `x^0 .. x^order`.
pub type Series = Vec<BigInt>;

pub fn mul(a: &[BigInt], b: &[BigInt], order: usize) -> Series {
    let mut out = vec![BigInt::zero(); order + 1];
    for (i, x) in a.iter().enumerate().take(order + 1) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(order + 1 - i) {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn add(a: &[BigInt], b: &[BigInt], order: usize) -> Series {
    (0..=order)
        .map(|i| a.get(i).cloned().unwrap_or_default() + b.get(i).cloned().unwrap_or_default())
        .collect()
}

pub fn sub(a: &[BigInt], b: &[BigInt], order: usize) -> Series {
    (0..=order)
        .map(|i| a.get(i).cloned().unwrap_or_default() - b.get(i).cloned().unwrap_or_default())
        .collect()
}

/// `f(g(x))` for `g(0) = 0`, by Horner's rule.
pub fn compose(f: &[BigInt], g: &[BigInt], order: usize) -> Series {
    assert!(g.first().is_none_or(Zero::is_zero), "inner series must vanish at 0");
    let mut out = vec![BigInt::zero(); order + 1];
    for c in f.iter().take(order + 1).rev() {
        out = mul(&out, g, order);
        out[0] += c;
    }
    out
}

/// `x^s · f(x)`.
pub fn shift(f: &[BigInt], s: usize, order: usize) -> Series {
    (0..=order)
        .map(|i| if i >= s { f.get(i - s).cloned().unwrap_or_default() } else { BigInt::zero() })
        .collect()
}

/// `f(x^2)`.
pub fn square_argument(f: &[BigInt], order: usize) -> Series {
    (0..=order)
        .map(|i| if i % 2 == 0 { f.get(i / 2).cloned().unwrap_or_default() } else { BigInt::zero() })
        .collect()
}

/// `C(x)` from `C_{n+1} = Σ C_i C_{n-i}`.
pub fn catalan(order: usize) -> Series {
    let mut c: Series = vec![BigInt::one()];
    for n in 0..order {
        let next = (0..=n).map(|i| &c[i] * &c[n - i]).sum();
        c.push(next);
    }
    c
}

/// `C(x C(x))`.
pub fn catalan_of_x_catalan(order: usize) -> Series {
    let c = catalan(order);
    compose(&c, &shift(&c, 1, order), order)
}

/// `x + x C(x^2) B(x)^2 - B(x)` where `B(x) = x · C(x^2 C(x^2))`.
pub fn nice_split_residual(order: usize) -> Series {
    let c = catalan(order);
    let b = shift(&square_argument(&catalan_of_x_catalan(order), order), 1, order);
    let rhs = add(
        &shift(&[BigInt::one()], 1, order),
        &shift(&mul(&square_argument(&c, order), &mul(&b, &b, order), order), 1, order),
        order,
    );
    sub(&rhs, &b, order)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeriesKind {
    Catalan,
    CatalanOfXCatalan,
}

impl SeriesKind {
    pub const ALL: [SeriesKind; 2] = [Self::Catalan, Self::CatalanOfXCatalan];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Catalan => "C",
            Self::CatalanOfXCatalan => "C_of_xC",
        }
    }
}

impl FromStr for SeriesKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Unknown {
                what: "series",
                name: s.into(),
            })
    }
}

impl fmt::Display for SeriesKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn series_coefficients(which: SeriesKind, order: usize) -> Vec<BigUint> {
    let s = match which {
        SeriesKind::Catalan => catalan(order),
        SeriesKind::CatalanOfXCatalan => catalan_of_x_catalan(order),
    };
    s.into_iter()
        .map(|c| c.to_biguint().expect("coefficients are nonnegative"))
        .collect()
}

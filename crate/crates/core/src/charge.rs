use crate::error::{Error, Result};

/// Local dimension `D` of every qudit. Charges live in `Z_D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuditDim(u32);

impl QuditDim {
    pub const QUBIT: QuditDim = QuditDim(2);

    pub fn new(d: u32) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        Ok(QuditDim(d))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn reduce(self, v: i64) -> u32 {
        v.rem_euclid(self.0 as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.0 as u64) as u32
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    /// `sign * a` for an orientation sign in `{+1, -1}`.
    #[inline]
    pub fn signed(self, sign: i8, a: u32) -> u32 {
        if sign >= 0 {
            a
        } else {
            self.neg(a)
        }
    }

    /// Distance of a charge from zero around the `Z_D` circle.
    #[inline]
    pub fn magnitude(self, a: u32) -> u32 {
        a.min(self.0 - a)
    }
}

impl std::fmt::Display for QuditDim {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

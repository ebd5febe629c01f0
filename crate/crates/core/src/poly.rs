//! Exact Laurent polynomials with integer coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A Laurent polynomial in `a` and `z`, keyed by `(a-exponent, z-exponent)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Laurent2 {
    terms: BTreeMap<(i32, i32), i64>,
}

impl Laurent2 {
    pub fn zero() -> Laurent2 {
        Laurent2::default()
    }

    pub fn one() -> Laurent2 {
        Laurent2::monomial(1, 0, 0)
    }

    pub fn monomial(c: i64, a: i32, z: i32) -> Laurent2 {
        let mut p = Laurent2::zero();
        p.add_term(c, a, z);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i32, i32, i64)>) -> Laurent2 {
        let mut p = Laurent2::zero();
        for (a, z, c) in terms {
            p.add_term(c, a, z);
        }
        p
    }

    pub fn add_term(&mut self, c: i64, a: i32, z: i32) {
        if c == 0 {
            return;
        }
        let e = self.terms.entry((a, z)).or_insert(0);
        *e += c;
        if *e == 0 {
            self.terms.remove(&(a, z));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, a: i32, z: i32) -> i64 {
        self.terms.get(&(a, z)).copied().unwrap_or(0)
    }

    /// Terms as `(a-exponent, z-exponent, coefficient)` in ascending order.
    pub fn terms(&self) -> impl Iterator<Item = (i32, i32, i64)> + '_ {
        self.terms.iter().map(|(&(a, z), &c)| (a, z, c))
    }

    pub fn pow(&self, k: u32) -> Laurent2 {
        (0..k).fold(Laurent2::one(), |acc, _| &acc * self)
    }

    /// Lowest `a`-degree.
    pub fn e(&self) -> Option<i32> {
        self.terms.keys().map(|k| k.0).min()
    }

    /// Highest `a`-degree.
    #[allow(non_snake_case)]
    pub fn E(&self) -> Option<i32> {
        self.terms.keys().map(|k| k.0).max()
    }

    /// Lowest `z`-degree.
    pub fn m(&self) -> Option<i32> {
        self.terms.keys().map(|k| k.1).min()
    }

    /// Highest `z`-degree.
    #[allow(non_snake_case)]
    pub fn M(&self) -> Option<i32> {
        self.terms.keys().map(|k| k.1).max()
    }

    /// Coefficient of `a^i` as `(z-exponent, coefficient)` pairs.
    pub fn a_slice(&self, i: i32) -> Vec<(i32, i64)> {
        self.terms().filter(|t| t.0 == i).map(|t| (t.1, t.2)).collect()
    }

    /// Coefficient of `z^j` as `(a-exponent, coefficient)` pairs.
    pub fn z_slice(&self, j: i32) -> Vec<(i32, i64)> {
        self.terms().filter(|t| t.1 == j).map(|t| (t.0, t.2)).collect()
    }

    /// `a ↦ −a⁻¹`.
    pub fn mirror(&self) -> Laurent2 {
        Laurent2::from_terms(self.terms().map(|(a, z, c)| (-a, z, if a % 2 == 0 { c } else { -c })))
    }

    /// `a = q⁻², z = q − q⁻¹`, i.e. `a = t⁻¹` and `z = t^{1/2} − t^{-1/2}` with `q² = t`.
    pub fn jones_substitution(&self) -> Laurent1 {
        let z = Laurent1::from_terms([(1, 1), (-1, -1)]);
        let z_inv_free = |j: i32| -> Laurent1 {
            assert!(j >= 0, "negative z power does not specialise to a Laurent polynomial");
            z.pow(j as u32)
        };
        let min_z = self.m().unwrap_or(0).min(0);
        // multiply through by z^{-min_z} and divide afterwards
        let mut num = Laurent1::zero();
        for (a, j, c) in self.terms() {
            num = &num + &(&Laurent1::monomial(c, -2 * a) * &z_inv_free(j - min_z));
        }
        let den = z_inv_free(-min_z);
        if den == Laurent1::one() {
            return num;
        }
        let mut q = Laurent1::zero();
        // exact division by (q - q⁻¹)^k
        while !num.is_zero() {
            let (nd, nc) = num.leading();
            let (dd, dc) = den.leading();
            assert!(nc % dc == 0, "inexact division in jones substitution");
            let t = Laurent1::monomial(nc / dc, nd - dd);
            num = &num - &(&t * &den);
            q = &q + &t;
            if q.terms.len() > 10_000 {
                panic!("jones substitution did not terminate");
            }
        }
        q
    }

    pub fn to_json_triples(&self) -> Vec<[i64; 3]> {
        self.terms().map(|(a, z, c)| [a as i64, z as i64, c]).collect()
    }
}

impl fmt::Display for Laurent2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        if self.terms.len() == 1 {
            if let Some(c) = self.terms.get(&(0, 0)) {
                return write!(f, "{c}");
            }
        }
        for (k, (a, z, c)) in self.terms().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{c} a^{a} z^{z}")?;
        }
        Ok(())
    }
}

impl Serialize for Laurent2 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json_triples().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Laurent2 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Laurent2, D::Error> {
        let triples: Vec<[i64; 3]> = Vec::deserialize(d)?;
        Ok(Laurent2::from_terms(triples.into_iter().map(|[a, z, c]| (a as i32, z as i32, c))))
    }
}

impl Add for &Laurent2 {
    type Output = Laurent2;
    fn add(self, rhs: &Laurent2) -> Laurent2 {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl AddAssign<&Laurent2> for Laurent2 {
    fn add_assign(&mut self, rhs: &Laurent2) {
        for (a, z, c) in rhs.terms() {
            self.add_term(c, a, z);
        }
    }
}

impl Sub for &Laurent2 {
    type Output = Laurent2;
    fn sub(self, rhs: &Laurent2) -> Laurent2 {
        let mut out = self.clone();
        for (a, z, c) in rhs.terms() {
            out.add_term(-c, a, z);
        }
        out
    }
}

impl Neg for &Laurent2 {
    type Output = Laurent2;
    fn neg(self) -> Laurent2 {
        Laurent2::from_terms(self.terms().map(|(a, z, c)| (a, z, -c)))
    }
}

impl Mul for &Laurent2 {
    type Output = Laurent2;
    fn mul(self, rhs: &Laurent2) -> Laurent2 {
        let mut out = Laurent2::zero();
        for (a1, z1, c1) in self.terms() {
            for (a2, z2, c2) in rhs.terms() {
                out.add_term(c1 * c2, a1 + a2, z1 + z2);
            }
        }
        out
    }
}

impl std::iter::Sum for Laurent2 {
    fn sum<I: Iterator<Item = Laurent2>>(iter: I) -> Laurent2 {
        iter.fold(Laurent2::zero(), |mut acc, p| {
            acc += &p;
            acc
        })
    }
}

/// A Laurent polynomial in one variable `q`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Laurent1 {
    terms: BTreeMap<i32, i64>,
}

impl Laurent1 {
    pub fn zero() -> Laurent1 {
        Laurent1::default()
    }

    pub fn one() -> Laurent1 {
        Laurent1::monomial(1, 0)
    }

    pub fn monomial(c: i64, d: i32) -> Laurent1 {
        let mut p = Laurent1::zero();
        p.add_term(c, d);
        p
    }

    /// From `(degree, coefficient)` pairs.
    pub fn from_terms(terms: impl IntoIterator<Item = (i32, i64)>) -> Laurent1 {
        let mut p = Laurent1::zero();
        for (d, c) in terms {
            p.add_term(c, d);
        }
        p
    }

    pub fn add_term(&mut self, c: i64, d: i32) {
        if c == 0 {
            return;
        }
        let e = self.terms.entry(d).or_insert(0);
        *e += c;
        if *e == 0 {
            self.terms.remove(&d);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, d: i32) -> i64 {
        self.terms.get(&d).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, i64)> + '_ {
        self.terms.iter().map(|(&d, &c)| (d, c))
    }

    fn leading(&self) -> (i32, i64) {
        let (&d, &c) = self.terms.iter().next_back().expect("nonzero polynomial");
        (d, c)
    }

    pub fn pow(&self, k: u32) -> Laurent1 {
        (0..k).fold(Laurent1::one(), |acc, _| &acc * self)
    }

    /// Substitutes `q ↦ q^k` for a nonzero integer `k`.
    pub fn rescale(&self, k: i32) -> Laurent1 {
        Laurent1::from_terms(self.terms().map(|(d, c)| (d * k, c)))
    }

    /// Divides every exponent by `k`, failing when one is not a multiple.
    pub fn compress(&self, k: i32) -> Option<Laurent1> {
        self.terms()
            .map(|(d, c)| (d % k == 0).then_some((d / k, c)))
            .collect::<Option<Vec<_>>>()
            .map(Laurent1::from_terms)
    }
}

impl fmt::Display for Laurent1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (d, c)) in self.terms().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{c} q^{d}")?;
        }
        Ok(())
    }
}

impl Add for &Laurent1 {
    type Output = Laurent1;
    fn add(self, rhs: &Laurent1) -> Laurent1 {
        let mut out = self.clone();
        for (d, c) in rhs.terms() {
            out.add_term(c, d);
        }
        out
    }
}

impl Sub for &Laurent1 {
    type Output = Laurent1;
    fn sub(self, rhs: &Laurent1) -> Laurent1 {
        let mut out = self.clone();
        for (d, c) in rhs.terms() {
            out.add_term(-c, d);
        }
        out
    }
}

impl Mul for &Laurent1 {
    type Output = Laurent1;
    fn mul(self, rhs: &Laurent1) -> Laurent1 {
        let mut out = Laurent1::zero();
        for (d1, c1) in self.terms() {
            for (d2, c2) in rhs.terms() {
                out.add_term(c1 * c2, d1 + d2);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> Laurent2 {
        Laurent2::monomial(1, 1, 0)
    }
    fn a_inv() -> Laurent2 {
        Laurent2::monomial(1, -1, 0)
    }
    fn z_inv() -> Laurent2 {
        Laurent2::monomial(1, 0, -1)
    }

    #[test]
    fn text_form() {
        let p = Laurent2::from_terms([(-4, 0, -1), (-2, 0, 2), (-2, 2, 1)]);
        assert_eq!(p.to_string(), "-1 a^-4 z^0 + 2 a^-2 z^0 + 1 a^-2 z^2");
        assert_eq!(Laurent2::one().to_string(), "1");
        assert_eq!(Laurent2::zero().to_string(), "0");
        assert_eq!((p.e(), p.E(), p.m(), p.M()), (Some(-4), Some(-2), Some(0), Some(2)));
    }

    #[test]
    fn arithmetic() {
        let delta = &(&a() - &a_inv()) * &z_inv();
        let sq = delta.pow(2);
        assert_eq!(sq.coeff(2, -2), 1);
        assert_eq!(sq.coeff(0, -2), -2);
        assert_eq!(sq.coeff(-2, -2), 1);
        assert!((&delta - &delta).is_zero());
        let json = serde_json::to_string(&delta).unwrap();
        assert_eq!(json, "[[-1,-1,-1],[1,-1,1]]");
        assert_eq!(serde_json::from_str::<Laurent2>(&json).unwrap(), delta);
    }

    #[test]
    fn mirror_substitution() {
        let trefoil = Laurent2::from_terms([(-4, 0, -1), (-2, 0, 2), (-2, 2, 1)]);
        let left = Laurent2::from_terms([(4, 0, -1), (2, 0, 2), (2, 2, 1)]);
        assert_eq!(trefoil.mirror(), left);
        assert_eq!(trefoil.mirror().mirror(), trefoil);
    }

    #[test]
    fn jones_substitution_of_unlink() {
        // (a - a⁻¹) z⁻¹ ↦ (q⁻² - q²)/(q - q⁻¹) = -(q + q⁻¹)
        let delta = &(&a() - &a_inv()) * &z_inv();
        assert_eq!(delta.jones_substitution(), Laurent1::from_terms([(1, -1), (-1, -1)]));
        assert_eq!(Laurent2::one().jones_substitution(), Laurent1::one());
    }
}

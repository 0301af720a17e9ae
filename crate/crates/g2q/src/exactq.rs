//! Exact arithmetic in Z[q, q^{-1}] and its fraction field Q(q).
//!
//! - [`LaurentPoly`]: integer-coefficient Laurent polynomials in q
//! - [`RatFunc`]: canonically reduced ratios of Laurent polynomials — every
//!   scalar in the system is one of these
//! - [`qint`]: quantum integers `[n]_q`
//! - [`RatFunc::eval_at_one`]: the q -> 1 specialisation, cancelling shared
//!   powers of (q - 1) before substituting
//!
//! All arithmetic is exact: coefficients are arbitrary-precision integers and
//! no rounding happens anywhere in the system.  Values are immutable after
//! construction and safe to share across threads.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// A Laurent polynomial in q with arbitrary-precision integer coefficients.
///
/// Stored as a sparse map from exponent to coefficient; zero coefficients are
/// never stored, so equality of values is equality of representations.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i64, BigInt>,
}

impl LaurentPoly {
    /// The zero polynomial.
    pub fn zero() -> Self {
        LaurentPoly {
            coeffs: BTreeMap::new(),
        }
    }

    /// The constant polynomial 1.
    pub fn one() -> Self {
        Self::monomial(0, BigInt::one())
    }

    /// The single monomial `c * q^e`.
    pub fn monomial(e: i64, c: BigInt) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(e, c);
        }
        LaurentPoly { coeffs }
    }

    /// The monomial `q^e`.
    pub fn q_pow(e: i64) -> Self {
        Self::monomial(e, BigInt::one())
    }

    /// The constant polynomial with integer value `n`.
    pub fn from_int(n: i64) -> Self {
        Self::monomial(0, BigInt::from(n))
    }

    /// Build from an explicit list of `(exponent, coefficient)` pairs,
    /// summing duplicates and dropping zeros.
    pub fn from_terms(terms: &[(i64, i64)]) -> Self {
        let mut coeffs: BTreeMap<i64, BigInt> = BTreeMap::new();
        for &(e, c) in terms {
            let entry = coeffs.entry(e).or_insert_with(BigInt::zero);
            *entry += BigInt::from(c);
        }
        coeffs.retain(|_, c| !c.is_zero());
        LaurentPoly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeff(0).is_one()
    }

    /// The coefficient of `q^e` (zero if absent).
    pub fn coeff(&self, e: i64) -> BigInt {
        self.coeffs.get(&e).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Iterate over `(exponent, coefficient)` pairs in increasing exponent.
    pub fn iter(&self) -> impl Iterator<Item = (&i64, &BigInt)> {
        self.coeffs.iter()
    }

    /// Lowest exponent with nonzero coefficient; `None` for zero.
    pub fn min_exp(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    /// Highest exponent with nonzero coefficient; `None` for zero.
    pub fn max_exp(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    /// Coefficient of the highest-degree term (zero polynomial gives 0).
    pub fn leading_coeff(&self) -> BigInt {
        self.max_exp().map(|e| self.coeff(e)).unwrap_or_else(BigInt::zero)
    }

    /// Multiply by `q^k`.
    pub fn mul_q_pow(&self, k: i64) -> Self {
        LaurentPoly {
            coeffs: self.coeffs.iter().map(|(&e, c)| (e + k, c.clone())).collect(),
        }
    }

    fn add_assign_scaled(&mut self, other: &Self, scale: &BigInt, shift: i64) {
        if scale.is_zero() {
            return;
        }
        for (&e, c) in &other.coeffs {
            let entry = self.coeffs.entry(e + shift).or_insert_with(BigInt::zero);
            *entry += c * scale;
        }
        self.coeffs.retain(|_, c| !c.is_zero());
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign_scaled(other, &BigInt::one(), 0);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign_scaled(other, &BigInt::from(-1), 0);
        out
    }

    pub fn neg(&self) -> Self {
        LaurentPoly {
            coeffs: self.coeffs.iter().map(|(&e, c)| (e, -c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = LaurentPoly::zero();
        // Multiply the smaller operand into the larger one.
        let (a, b) = if self.coeffs.len() <= other.coeffs.len() {
            (self, other)
        } else {
            (other, self)
        };
        for (&e, c) in &a.coeffs {
            out.add_assign_scaled(b, c, e);
        }
        out
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        LaurentPoly {
            coeffs: self.coeffs.iter().map(|(&e, c)| (e, c * k)).collect(),
        }
    }

    /// Sum of all coefficients, i.e. the value at q = 1.
    pub fn eval_one(&self) -> BigInt {
        self.coeffs.values().sum()
    }

    /// Positive gcd of all coefficients (0 for the zero polynomial).
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in self.coeffs.values() {
            g = gcd_int(&g, c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Divide every coefficient by `d` (must divide exactly).
    fn div_int_exact(&self, d: &BigInt) -> Self {
        assert!(!d.is_zero(), "division by zero content");
        LaurentPoly {
            coeffs: self
                .coeffs
                .iter()
                .map(|(&e, c)| {
                    let (quo, rem) = num::Integer::div_rem(c, d);
                    assert!(rem.is_zero(), "inexact integer division in content removal");
                    (e, quo)
                })
                .collect(),
        }
    }

    /// Exact division by another Laurent polynomial; panics if inexact.
    pub fn div_exact(&self, other: &Self) -> Self {
        assert!(!other.is_zero(), "division by the zero polynomial");
        if self.is_zero() {
            return Self::zero();
        }
        let mut rem = self.clone();
        let mut quo = LaurentPoly::zero();
        let dlead = other.leading_coeff();
        let dexp = other.max_exp().unwrap();
        while !rem.is_zero() {
            let rexp = rem.max_exp().unwrap();
            let rlead = rem.leading_coeff();
            let (c, r) = num::Integer::div_rem(&rlead, &dlead);
            assert!(r.is_zero(), "inexact polynomial division");
            let shift = rexp - dexp;
            quo.coeffs.insert(shift, c.clone());
            rem.add_assign_scaled(other, &(-c), shift);
            if let Some(new_top) = rem.max_exp() {
                assert!(new_top < rexp, "inexact polynomial division");
            }
        }
        quo
    }

    /// Primitive part with positive leading coefficient (zero stays zero).
    fn primitive_positive(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut c = self.content();
        if self.leading_coeff().is_negative() {
            c = -c;
        }
        self.div_int_exact(&c)
    }

    /// Multiplicity of the root q = 1, together with the deflated polynomial
    /// `self / (q - 1)^mult` (as a Laurent polynomial).
    fn remove_q_minus_one(&self) -> (u32, Self) {
        if self.is_zero() {
            return (0, Self::zero());
        }
        let mut mult = 0;
        let mut p = self.clone();
        while p.eval_one().is_zero() {
            // Synthetic division of the ordinary-polynomial part by (q - 1);
            // the q-power prefactor is untouched by deflation.
            let low = p.min_exp().unwrap();
            let poly = p.mul_q_pow(-low);
            let top = poly.max_exp().unwrap();
            let mut quot = BTreeMap::new();
            let mut carry = BigInt::zero();
            for e in (0..=top).rev() {
                carry += poly.coeff(e);
                if e > 0 && !carry.is_zero() {
                    quot.insert(e - 1, carry.clone());
                }
            }
            p = LaurentPoly { coeffs: quot }.mul_q_pow(low);
            mult += 1;
        }
        (mult, p)
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", render_poly(self))
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", render_poly(self))
    }
}

/// Greatest common divisor of two integers, always nonnegative.
fn gcd_int(a: &BigInt, b: &BigInt) -> BigInt {
    num::Integer::gcd(a, b)
}

/// Gcd over Z[q] of two genuine polynomials (nonnegative exponents), returned
/// with positive leading coefficient.  Uses the primitive pseudo-remainder
/// sequence.
fn gcd_poly(a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
    if a.is_zero() {
        return b.primitive_positive().mul_int(&b.content().max(BigInt::one()));
    }
    if b.is_zero() {
        return a.primitive_positive().mul_int(&a.content().max(BigInt::one()));
    }
    let c = gcd_int(&a.content(), &b.content());
    let mut p = a.primitive_positive();
    let mut r = b.primitive_positive();
    if p.max_exp() < r.max_exp() {
        std::mem::swap(&mut p, &mut r);
    }
    while !r.is_zero() {
        let rem = pseudo_rem(&p, &r);
        p = r;
        r = rem.primitive_positive();
    }
    p.primitive_positive().mul_int(&c)
}

/// Pseudo-remainder `lc(b)^(deg a - deg b + 1) * a mod b` for genuine
/// polynomials with `deg a >= deg b`.
fn pseudo_rem(a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
    let db = b.max_exp().expect("pseudo_rem by zero");
    let lb = b.leading_coeff();
    let mut rem = a.clone();
    loop {
        let da = match rem.max_exp() {
            Some(d) if d >= db => d,
            _ => return rem,
        };
        let la = rem.leading_coeff();
        // rem := lc(b) * rem - la * q^{da-db} * b; the leading terms cancel
        // exactly and all arithmetic stays in Z[q].
        rem = rem.mul_int(&lb);
        rem.add_assign_scaled(b, &(-la), da - db);
        debug_assert!(rem.max_exp().map_or(true, |d| d < da));
    }
}

/// Quantum integer `[n]_q = (q^n - q^{-n}) / (q - q^{-1})` in closed form,
/// i.e. the sum of `q^{n-1-2k}` for `0 <= k < n`.
///
/// # Panics
///
/// Panics if `n <= 0`.
pub fn qint(n: i64) -> LaurentPoly {
    assert!(n >= 1, "qint requires a positive integer, got {}", n);
    let mut coeffs = BTreeMap::new();
    for k in 0..n {
        coeffs.insert(n - 1 - 2 * k, BigInt::one());
    }
    LaurentPoly { coeffs }
}

/// Error raised by [`RatFunc::div`] on a zero divisor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisionByZero;

impl fmt::Display for DivisionByZero {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "division by zero in Q(q)")
    }
}

impl std::error::Error for DivisionByZero {}

/// Error raised by [`RatFunc::eval_at_one`] when the value has a genuine pole
/// at q = 1 after cancelling all shared powers of (q - 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoleAtOne;

impl fmt::Display for PoleAtOne {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pole at q = 1 after cancellation")
    }
}

impl std::error::Error for PoleAtOne {}

/// The four field operations accepted by [`arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// A rational function in q over the integers, in canonical form.
///
/// Canonical form: the denominator is a genuine polynomial in q (lowest
/// exponent 0, so its constant term is nonzero), its leading coefficient is
/// positive, the numerator and denominator share no polynomial factor, and
/// their integer contents are jointly primitive.  Two equal values therefore
/// have identical stored forms, and equality is plain structural equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl RatFunc {
    /// Build `num / den` in canonical form.
    ///
    /// # Panics
    ///
    /// Panics if `den` is zero.
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Self {
        assert!(!den.is_zero(), "RatFunc with zero denominator");
        if num.is_zero() {
            return RatFunc {
                num: LaurentPoly::zero(),
                den: LaurentPoly::one(),
            };
        }
        // Make the denominator a genuine polynomial with nonzero constant
        // term, pushing the compensating power of q onto the numerator.
        let s = den.min_exp().unwrap();
        let den = den.mul_q_pow(-s);
        let num = num.mul_q_pow(-s);
        // Split the numerator as q^e * n0 with n0 a genuine polynomial.
        let e = num.min_exp().unwrap();
        let n0 = num.mul_q_pow(-e);
        let g = gcd_poly(&n0, &den);
        let mut n0 = n0.div_exact(&g);
        let mut den = den.div_exact(&g);
        if den.leading_coeff().is_negative() {
            n0 = n0.neg();
            den = den.neg();
        }
        RatFunc {
            num: n0.mul_q_pow(e),
            den,
        }
    }

    pub fn zero() -> Self {
        RatFunc {
            num: LaurentPoly::zero(),
            den: LaurentPoly::one(),
        }
    }

    pub fn one() -> Self {
        RatFunc {
            num: LaurentPoly::one(),
            den: LaurentPoly::one(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        RatFunc {
            num: LaurentPoly::from_int(n),
            den: LaurentPoly::one(),
        }
    }

    pub fn from_poly(p: LaurentPoly) -> Self {
        RatFunc {
            num: p,
            den: LaurentPoly::one(),
        }
    }

    /// The monomial `q^e` as a rational function.
    pub fn q_pow(e: i64) -> Self {
        Self::from_poly(LaurentPoly::q_pow(e))
    }

    pub fn num(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn den(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            return RatFunc::new(self.num.add(&other.num), self.den.clone());
        }
        // a/b + c/d = (a*(d/g) + c*(b/g)) / (b * (d/g)) with g = gcd(b, d).
        let g = gcd_poly(&self.den, &other.den);
        let db = other.den.div_exact(&g);
        let dd = self.den.div_exact(&g);
        let num = self.num.mul(&db).add(&other.num.mul(&dd));
        let den = self.den.mul(&db);
        RatFunc::new(num, den)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        RatFunc {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if self.is_one() {
            return other.clone();
        }
        if other.is_one() {
            return self.clone();
        }
        // Cross-cancel before multiplying to keep intermediates small.
        if self.den.is_one() && other.den.is_one() {
            return RatFunc {
                num: self.num.mul(&other.num),
                den: LaurentPoly::one(),
            };
        }
        RatFunc::new(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    /// Multiplicative inverse.
    ///
    /// # Errors
    ///
    /// Returns [`DivisionByZero`] for the zero value.
    pub fn inv(&self) -> Result<Self, DivisionByZero> {
        if self.is_zero() {
            return Err(DivisionByZero);
        }
        Ok(RatFunc::new(self.den.clone(), self.num.clone()))
    }

    /// Exact division.
    ///
    /// # Errors
    ///
    /// Returns [`DivisionByZero`] if `other` is zero.
    pub fn div(&self, other: &Self) -> Result<Self, DivisionByZero> {
        Ok(self.mul(&other.inv()?))
    }

    /// Multiply by the integer `k`.
    pub fn mul_int(&self, k: i64) -> Self {
        self.mul(&RatFunc::from_int(k))
    }

    /// Multiply by `q^e`.
    pub fn mul_q_pow(&self, e: i64) -> Self {
        RatFunc::new(self.num.mul_q_pow(e), self.den.clone())
    }

    /// Parse the canonical text rendering produced by `Display`: either a
    /// bare Laurent polynomial or `(<num>)/(<den>)`.
    ///
    /// Returns `None` on malformed input.
    pub fn parse(s: &str) -> Option<RatFunc> {
        let s = s.trim();
        if let Some(body) = s.strip_prefix('(') {
            let (num_str, rest) = body.split_once(")/(")?;
            let den_str = rest.strip_suffix(')')?;
            let num = parse_poly(num_str)?;
            let den = parse_poly(den_str)?;
            if den.is_zero() {
                return None;
            }
            Some(RatFunc::new(num, den))
        } else {
            Some(RatFunc::from_poly(parse_poly(s)?))
        }
    }

    /// Evaluate at q = 1, cancelling all shared powers of (q - 1) first.
    ///
    /// # Errors
    ///
    /// Returns [`PoleAtOne`] if the denominator still vanishes at q = 1 after
    /// full cancellation.
    pub fn eval_at_one(&self) -> Result<BigRational, PoleAtOne> {
        if self.is_zero() {
            return Ok(BigRational::zero());
        }
        let (mn, num) = self.num.remove_q_minus_one();
        let (md, den) = self.den.remove_q_minus_one();
        let m = mn.min(md);
        // Restore the uncancelled surplus on whichever side kept it.
        let (nv, dv) = (num.eval_one(), den.eval_one());
        if md > m {
            // Denominator retains a positive power of (q - 1): genuine pole.
            return Err(PoleAtOne);
        }
        if mn > m {
            // Numerator retains a positive power of (q - 1): the value is 0.
            return Ok(BigRational::zero());
        }
        if dv.is_zero() {
            return Err(PoleAtOne);
        }
        Ok(BigRational::new(nv, dv))
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for RatFunc {
    /// Canonical text rendering: the bare numerator when the denominator is
    /// 1, otherwise `(<num>)/(<den>)`, with terms in decreasing q-exponent.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", render_poly(&self.num))
        } else {
            write!(f, "({})/({})", render_poly(&self.num), render_poly(&self.den))
        }
    }
}

/// Spec'd operation dispatcher over the four field operations.
///
/// # Errors
///
/// Returns [`DivisionByZero`] for `Div` with a zero divisor.
pub fn arith(a: &RatFunc, b: &RatFunc, op: ArithOp) -> Result<RatFunc, DivisionByZero> {
    Ok(match op {
        ArithOp::Add => a.add(b),
        ArithOp::Sub => a.sub(b),
        ArithOp::Mul => a.mul(b),
        ArithOp::Div => a.div(b)?,
    })
}

fn parse_poly(s: &str) -> Option<LaurentPoly> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if s == "0" {
        return Some(LaurentPoly::zero());
    }
    // Term separators are exactly " + " and " - "; exponent signs like q^-2
    // are glued to the caret and survive the rewrite below.
    let rewritten = s.replace(" - ", " + -");
    let mut poly = LaurentPoly::zero();
    for term in rewritten.split(" + ") {
        let term = term.trim();
        let (sign, term) = match term.strip_prefix('-') {
            Some(rest) => (-1i64, rest.trim()),
            None => (1, term),
        };
        let (coeff, exp) = match term.find('q') {
            None => (term.parse::<BigInt>().ok()?, 0i64),
            Some(pos) => {
                let coeff_str = &term[..pos];
                let coeff = if coeff_str.is_empty() {
                    BigInt::one()
                } else {
                    coeff_str.parse::<BigInt>().ok()?
                };
                let exp_str = &term[pos + 1..];
                let exp = if exp_str.is_empty() {
                    1
                } else {
                    exp_str.strip_prefix('^')?.parse::<i64>().ok()?
                };
                (coeff, exp)
            }
        };
        poly = poly.add(&LaurentPoly::monomial(exp, coeff * sign));
    }
    Some(poly)
}

fn render_poly(p: &LaurentPoly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (&e, c)) in p.coeffs.iter().rev().enumerate() {
        let neg = c.is_negative();
        let abs = c.abs();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else if neg {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        let coeff_part = if abs.is_one() && e != 0 {
            String::new()
        } else {
            abs.to_string()
        };
        let var_part = match e {
            0 => String::new(),
            1 => "q".to_string(),
            _ => format!("q^{}", e),
        };
        if coeff_part.is_empty() {
            out.push_str(&var_part);
        } else if var_part.is_empty() {
            out.push_str(&coeff_part);
        } else {
            out.push_str(&coeff_part);
            out.push_str(&var_part);
        }
    }
    out
}

// Operator sugar on references only: owned-receiver trait impls would shadow
// the inherent `&self` methods during method resolution.
impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        RatFunc::add(self, rhs)
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        RatFunc::sub(self, rhs)
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        RatFunc::mul(self, rhs)
    }
}

impl Div for &RatFunc {
    type Output = RatFunc;
    fn div(self, rhs: &RatFunc) -> RatFunc {
        RatFunc::div(self, rhs).expect("division by zero in Q(q)")
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q() -> RatFunc {
        RatFunc::q_pow(1)
    }

    fn qi(e: i64) -> RatFunc {
        RatFunc::q_pow(e)
    }

    #[test]
    fn qint_small_values() {
        assert_eq!(qint(1), LaurentPoly::one());
        assert_eq!(qint(2), LaurentPoly::from_terms(&[(1, 1), (-1, 1)]));
        let seven_minus_one = qint(7).sub(&LaurentPoly::one());
        assert_eq!(
            seven_minus_one,
            LaurentPoly::from_terms(&[(6, 1), (4, 1), (2, 1), (-2, 1), (-4, 1), (-6, 1)])
        );
    }

    #[test]
    #[should_panic]
    fn qint_rejects_nonpositive() {
        qint(0);
    }

    #[test]
    fn qint_defining_fraction() {
        // [n]_q * (q - q^{-1}) = q^n - q^{-n} for 1 <= n <= 20.
        let denom = LaurentPoly::from_terms(&[(1, 1), (-1, -1)]);
        for n in 1..=20 {
            let lhs = qint(n).mul(&denom);
            let rhs = LaurentPoly::from_terms(&[(n, 1), (-n, -1)]);
            assert_eq!(lhs, rhs, "failed at n = {}", n);
        }
    }

    #[test]
    fn canonical_examples() {
        // (q - q^{-1}) / (q - q^{-1}) = 1
        let a = RatFunc::from_poly(LaurentPoly::from_terms(&[(1, 1), (-1, -1)]));
        assert!(a.div(&a).unwrap().is_one());
        // (q^2 - 1) / (q - 1) = q + 1
        let n = RatFunc::from_poly(LaurentPoly::from_terms(&[(2, 1), (0, -1)]));
        let d = RatFunc::from_poly(LaurentPoly::from_terms(&[(1, 1), (0, -1)]));
        assert_eq!(
            n.div(&d).unwrap(),
            RatFunc::from_poly(LaurentPoly::from_terms(&[(1, 1), (0, 1)]))
        );
        // [7]_q * (q - q^{-1}) = q^7 - q^{-7}
        let lhs = RatFunc::from_poly(qint(7)).mul(&q().sub(&qi(-1)));
        assert_eq!(lhs, qi(7).sub(&qi(-7)));
    }

    #[test]
    fn canonical_form_denominator_invariants() {
        // 1 / (q^{-3} - q^{-5}) must store a genuine-polynomial denominator
        // with nonzero constant term and positive leading coefficient.
        let d = LaurentPoly::from_terms(&[(-3, 1), (-5, -1)]);
        let x = RatFunc::new(LaurentPoly::one(), d);
        assert_eq!(x.den().min_exp(), Some(0));
        assert!(!x.den().coeff(0).is_zero());
        assert!(x.den().leading_coeff() > BigInt::zero());
        // Same value built with scaled num/den normalizes identically.
        let y = RatFunc::new(
            LaurentPoly::from_terms(&[(2, -6)]),
            LaurentPoly::from_terms(&[(-1, -6), (-3, 6)]),
        );
        assert_eq!(x, y);
    }

    #[test]
    fn eval_at_one_examples() {
        for n in 1..=12 {
            let v = RatFunc::from_poly(qint(n)).eval_at_one().unwrap();
            assert_eq!(v, BigRational::from(BigInt::from(n)));
        }
        // (q^14 - 1) / (q^2 - 1) -> 7
        let x = RatFunc::from_poly(LaurentPoly::from_terms(&[(14, 1), (0, -1)]));
        let y = RatFunc::from_poly(LaurentPoly::from_terms(&[(2, 1), (0, -1)]));
        let v = x.div(&y).unwrap().eval_at_one().unwrap();
        assert_eq!(v, BigRational::from(BigInt::from(7)));
        assert_eq!(
            qi(-12).eval_at_one().unwrap(),
            BigRational::from(BigInt::from(1))
        );
        // 1 / (q - 1) is a genuine pole.
        let pole = RatFunc::new(LaurentPoly::one(), LaurentPoly::from_terms(&[(1, 1), (0, -1)]));
        assert_eq!(pole.eval_at_one(), Err(PoleAtOne));
    }

    #[test]
    fn division_by_zero_is_reported() {
        assert_eq!(RatFunc::one().div(&RatFunc::zero()), Err(DivisionByZero));
        assert_eq!(RatFunc::zero().inv(), Err(DivisionByZero));
    }

    #[test]
    fn rendering_matches_canonical_format() {
        let dimq = LaurentPoly::from_terms(&[
            (10, 1),
            (8, 1),
            (2, 1),
            (0, 1),
            (-2, 1),
            (-8, 1),
            (-10, 1),
        ]);
        assert_eq!(
            RatFunc::from_poly(dimq).to_string(),
            "q^10 + q^8 + q^2 + 1 + q^-2 + q^-8 + q^-10"
        );
        let x = RatFunc::new(
            LaurentPoly::from_terms(&[(1, 1), (0, -2)]),
            LaurentPoly::from_terms(&[(2, 3), (0, 1)]),
        );
        assert_eq!(x.to_string(), "(q - 2)/(3q^2 + 1)");
        assert_eq!(RatFunc::zero().to_string(), "0");
    }

    #[test]
    fn parse_roundtrip() {
        let samples = [
            RatFunc::zero(),
            RatFunc::one(),
            RatFunc::from_int(-42),
            RatFunc::from_poly(qint(7)),
            qi(-12),
            RatFunc::new(
                LaurentPoly::from_terms(&[(3, -2), (0, 5)]),
                LaurentPoly::from_terms(&[(4, 7), (1, 1), (0, -1)]),
            ),
        ];
        for x in samples {
            let text = x.to_string();
            assert_eq!(RatFunc::parse(&text), Some(x), "roundtrip of {}", text);
        }
        assert_eq!(RatFunc::parse(""), None);
        assert_eq!(RatFunc::parse("(1)/(0)"), None);
    }

    fn arb_ratfunc() -> impl Strategy<Value = RatFunc> {
        let poly = prop::collection::vec((-6i64..=6, -4i64..=4), 0..5)
            .prop_map(|terms| LaurentPoly::from_terms(&terms));
        (poly.clone(), poly).prop_filter_map("nonzero denominator", |(n, d)| {
            if d.is_zero() {
                None
            } else {
                Some(RatFunc::new(n, d))
            }
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn normalization_is_idempotent(x in arb_ratfunc()) {
            let renorm = RatFunc::new(x.num().clone(), x.den().clone());
            prop_assert_eq!(renorm, x);
        }

        #[test]
        fn field_axioms(a in arb_ratfunc(), b in arb_ratfunc(), c in arb_ratfunc()) {
            prop_assert_eq!(a.add(&b), b.add(&a));
            prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert!(a.sub(&a).is_zero());
            if !a.is_zero() {
                prop_assert!(a.div(&a).unwrap().is_one());
            }
        }

        #[test]
        fn eval_at_one_is_multiplicative(a in arb_ratfunc(), b in arb_ratfunc()) {
            let prod = a.mul(&b);
            if let (Ok(va), Ok(vb), Ok(vp)) =
                (a.eval_at_one(), b.eval_at_one(), prod.eval_at_one())
            {
                prop_assert_eq!(vp, va * vb);
            }
        }
    }
}

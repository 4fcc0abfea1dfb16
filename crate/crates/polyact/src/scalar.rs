//! Exact scalars: arbitrary-precision rationals and cyclotomic numbers.
//!
//! `Rational` is re-exported from num-rational (always reduced, positive
//! denominator). `Cyclotomic` models Q(zeta_m) as Q[x]/Phi_m(x) with a
//! coefficient vector of length phi(m). Values that turn out to be rational
//! are normalized down to conductor 1, so equal values compare equal across
//! the code paths that produced them. No floating point anywhere.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use once_cell::sync::Lazy;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("conductor must be >= 1")]
    ZeroConductor,
    #[error("conductor {m} needs {want} coefficients, got {got}")]
    BadCoeffLen { m: u32, want: usize, got: usize },
    #[error("cannot parse rational from {0:?}")]
    BadRational(String),
}

/// Rational from integer parts. Panics on zero denominator; use
/// [`parse_rational`] for untrusted input.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses "p/q" or "p". Rejects zero denominators.
pub fn parse_rational(s: &str) -> Result<Rational, ScalarError> {
    let bad = || ScalarError::BadRational(s.to_string());
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

/// Renders in the same "p/q" / "p" form that [`parse_rational`] accepts.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn euler_phi(m: u32) -> usize {
    assert!(m >= 1);
    let mut n = m;
    let mut result = m;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result as usize
}

fn divisors(m: u32) -> Vec<u32> {
    let mut ds = Vec::new();
    for d in 1..=m {
        if m % d == 0 {
            ds.push(d);
        }
    }
    ds
}

// Dense polynomials over Q, lowest degree first, no trailing zeros.

fn poly_trim(mut p: Vec<Rational>) -> Vec<Rational> {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    poly_trim(out)
}

/// Remainder of `a` modulo monic `m`.
fn poly_rem(a: &[Rational], m: &[Rational]) -> Vec<Rational> {
    debug_assert!(m.last().is_some_and(|c| c.is_one()), "modulus must be monic");
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = r.pop().unwrap();
        if lead.is_zero() {
            continue;
        }
        let shift = r.len() - dm;
        for (i, mi) in m[..dm].iter().enumerate() {
            let delta = &lead * mi;
            r[shift + i] -= delta;
        }
    }
    poly_trim(r)
}

/// Exact quotient a / b, for b monic dividing a exactly.
fn poly_divexact(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    debug_assert!(b.last().is_some_and(|c| c.is_one()));
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let mut q = vec![Rational::zero(); a.len().saturating_sub(db)];
    while r.len() > db {
        let lead = r.pop().unwrap();
        if lead.is_zero() {
            continue;
        }
        let shift = r.len() - db;
        q[shift] = lead.clone();
        for (i, bi) in b[..db].iter().enumerate() {
            let delta = &lead * bi;
            r[shift + i] -= delta;
        }
    }
    debug_assert!(poly_trim(r).is_empty(), "division was not exact");
    poly_trim(q)
}

static CYCLO_CACHE: Lazy<Mutex<BTreeMap<u32, Vec<Rational>>>> =
    Lazy::new(|| Mutex::new(BTreeMap::new()));

/// The m-th cyclotomic polynomial, monic with integer coefficients.
pub fn cyclotomic_polynomial(m: u32) -> Vec<Rational> {
    assert!(m >= 1);
    if let Some(p) = CYCLO_CACHE.lock().unwrap().get(&m) {
        return p.clone();
    }
    // x^m - 1 divided by the product of Phi_d over proper divisors d of m.
    let mut num = vec![Rational::zero(); (m + 1) as usize];
    num[0] = -Rational::one();
    num[m as usize] = Rational::one();
    let mut phi = poly_trim(num);
    for d in divisors(m) {
        if d < m {
            phi = poly_divexact(&phi, &cyclotomic_polynomial(d));
        }
    }
    CYCLO_CACHE.lock().unwrap().insert(m, phi.clone());
    phi
}

/// Element of Q(zeta_m), stored as the residue of a polynomial in zeta_m
/// modulo Phi_m. Invariants: `coeffs.len() == phi(m)`, and a value that is
/// rational (all coefficients beyond the constant vanish) has `m == 1`.
#[derive(Debug, Clone)]
pub struct Cyclotomic {
    m: u32,
    coeffs: Vec<Rational>,
}

impl Cyclotomic {
    fn make(m: u32, mut coeffs: Vec<Rational>) -> Self {
        let want = euler_phi(m);
        debug_assert!(coeffs.len() <= want);
        coeffs.resize(want, Rational::zero());
        let c = Cyclotomic { m, coeffs };
        c.descend()
    }

    // Conductor-1 normal form for values that are rational.
    fn descend(self) -> Self {
        if self.m != 1 && self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Cyclotomic {
                m: 1,
                coeffs: vec![self.coeffs[0].clone()],
            }
        } else {
            self
        }
    }

    pub fn from_rational(r: Rational) -> Self {
        Cyclotomic {
            m: 1,
            coeffs: vec![r],
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(rat_int(n))
    }

    /// zeta_m^k.
    pub fn root_of_unity(m: u32, k: i64) -> Result<Self, ScalarError> {
        if m == 0 {
            return Err(ScalarError::ZeroConductor);
        }
        let k = k.rem_euclid(m as i64) as usize;
        let mut poly = vec![Rational::zero(); k + 1];
        poly[k] = Rational::one();
        Ok(Self::from_poly(m, poly))
    }

    pub fn zeta(m: u32) -> Self {
        Self::root_of_unity(m, 1).expect("conductor >= 1")
    }

    /// Builds the residue of an arbitrary polynomial in zeta_m.
    pub fn from_poly(m: u32, poly: Vec<Rational>) -> Self {
        assert!(m >= 1);
        let phi = cyclotomic_polynomial(m);
        Self::make(m, poly_rem(&poly, &phi))
    }

    /// Accepts an already-reduced coefficient vector of length phi(m).
    pub fn from_coeffs(m: u32, coeffs: Vec<Rational>) -> Result<Self, ScalarError> {
        if m == 0 {
            return Err(ScalarError::ZeroConductor);
        }
        let want = euler_phi(m);
        if coeffs.len() != want {
            return Err(ScalarError::BadCoeffLen {
                m,
                want,
                got: coeffs.len(),
            });
        }
        Ok(Self::make(m, coeffs))
    }

    pub fn conductor(&self) -> u32 {
        self.m
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.m == 1 && self.coeffs[0].is_one()
    }

    pub fn to_rational(&self) -> Option<Rational> {
        if self.m == 1 {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// Reinterprets the value inside Q(zeta_n) for m | n (zeta_m maps to
    /// zeta_n^(n/m)). The result is renormalized, so a rational value keeps
    /// conductor 1.
    pub fn promoted(&self, n: u32) -> Self {
        let coeffs = self.coeffs_at(n);
        Self::make(n, coeffs)
    }

    // Length-phi(n) coefficient vector of this value inside Q(zeta_n),
    // without the conductor-descent normalization (so vectors from two
    // values at the same n line up index by index).
    fn coeffs_at(&self, n: u32) -> Vec<Rational> {
        assert!(n % self.m == 0, "target conductor must be a multiple");
        if n == self.m {
            return self.coeffs.clone();
        }
        let step = (n / self.m) as usize;
        let mut poly = vec![Rational::zero(); (self.coeffs.len() - 1) * step + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            poly[i * step] = c.clone();
        }
        let mut reduced = poly_rem(&poly, &cyclotomic_polynomial(n));
        reduced.resize(euler_phi(n), Rational::zero());
        reduced
    }

    fn common(a: &Self, b: &Self) -> (Vec<Rational>, Vec<Rational>, u32) {
        let n = num_integer::lcm(a.m, b.m);
        (a.coeffs_at(n), b.coeffs_at(n), n)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let (a, b, n) = Self::common(self, rhs);
        let coeffs = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        Self::make(n, coeffs)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        Cyclotomic {
            m: self.m,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let (a, b, n) = Self::common(self, rhs);
        let poly = poly_mul(&a, &b);
        Self::from_poly(n, poly)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Cyclotomic {
            m: self.m,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
        .descend()
    }

    /// Multiplicative inverse via the extended Euclidean algorithm in Q[x];
    /// Phi_m is irreducible, so every nonzero residue is invertible.
    pub fn inv(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        let phi = cyclotomic_polynomial(self.m);
        // Invariants: r0 = s0*f + t0*Phi, r1 = s1*f + t1*Phi (t never needed).
        let mut r0 = poly_trim(self.coeffs.clone());
        let mut r1 = phi.clone();
        let mut s0 = vec![Rational::one()];
        let mut s1: Vec<Rational> = Vec::new();
        while !r1.is_empty() {
            let (q, r) = poly_divmod(&r0, &r1);
            let qs1 = poly_mul(&q, &s1);
            let s2 = poly_sub(&s0, &qs1);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
        }
        // r0 is a nonzero constant gcd.
        debug_assert_eq!(r0.len(), 1);
        let scale = r0[0].recip();
        let inv_poly: Vec<Rational> = s0.iter().map(|c| c * &scale).collect();
        Ok(Self::from_poly(self.m, inv_poly))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, ScalarError> {
        Ok(self.mul(&rhs.inv()?))
    }

    /// The automorphism zeta_m -> zeta_m^(-1) (complex conjugation on
    /// root-of-unity coordinates).
    pub fn conjugate(&self) -> Self {
        if self.m <= 2 {
            return self.clone();
        }
        let step = (self.m - 1) as usize;
        let mut poly = vec![Rational::zero(); (self.coeffs.len() - 1) * step + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            poly[i * step] = c.clone();
        }
        Self::from_poly(self.m, poly)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Cyclotomic::from_int(1);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }
}

fn poly_sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] -= c;
    }
    poly_trim(out)
}

/// Quotient and remainder over Q[x] (general divisor).
fn poly_divmod(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    assert!(!b.is_empty());
    let lead = b.last().unwrap();
    let db = b.len() - 1;
    let mut r = a.to_vec();
    let mut q = vec![Rational::zero(); a.len().saturating_sub(db)];
    while r.len() > db {
        let top = r.pop().unwrap();
        if top.is_zero() {
            continue;
        }
        let coeff = &top / lead;
        let shift = r.len() - db;
        q[shift] = coeff.clone();
        for (i, bi) in b[..db].iter().enumerate() {
            let delta = &coeff * bi;
            r[shift + i] -= delta;
        }
    }
    (poly_trim(q), poly_trim(r))
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        if self.m == other.m {
            self.coeffs == other.coeffs
        } else {
            let (a, b, _) = Self::common(self, other);
            a == b
        }
    }
}

impl Eq for Cyclotomic {}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{}", format_rational(c))?,
                1 => write!(f, "{}*z{}", format_rational(c), self.m)?,
                _ => write!(f, "{}*z{}^{}", format_rational(c), self.m, i)?,
            }
        }
        Ok(())
    }
}

impl Serialize for Cyclotomic {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            m: u32,
            coeffs: Vec<&'a str>,
        }
        let strings: Vec<String> = self.coeffs.iter().map(format_rational).collect();
        let repr = Repr {
            m: self.m,
            coeffs: strings.iter().map(|s| s.as_str()).collect(),
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Cyclotomic {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            m: u32,
            coeffs: Vec<String>,
        }
        let repr = Repr::deserialize(deserializer)?;
        let coeffs = repr
            .coeffs
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>, _>>()
            .map_err(D::Error::custom)?;
        Cyclotomic::from_coeffs(repr.m, coeffs).map_err(D::Error::custom)
    }
}

impl From<Rational> for Cyclotomic {
    fn from(r: Rational) -> Self {
        Cyclotomic::from_rational(r)
    }
}

/// Signum of a rational (cyclotomics carry no ordering).
pub fn rational_sign(r: &Rational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

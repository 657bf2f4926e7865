//! Truncated l-adic numbers and the upper-triangular 2x2 group over Q_l.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn pow_u(base: u64, e: u32) -> u64 {
    base.checked_pow(e).expect("l-adic modulus overflows u64")
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Inverse of a unit modulo `m` by the extended Euclidean algorithm.
fn invmod(a: u64, m: u64) -> u64 {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    debug_assert_eq!(r0, 1, "not a unit");
    s0.rem_euclid(m as i128) as u64
}

/// l-adic valuation of a nonzero integer.
pub fn valuation_i128(mut x: i128, l: u64) -> u32 {
    assert!(x != 0);
    let l = l as i128;
    let mut v = 0;
    while x % l == 0 {
        x /= l;
        v += 1;
    }
    v
}

/// Largest precision whose modulus `l^N` keeps products inside u128.
pub fn max_precision(l: u64) -> u32 {
    let mut n = 0;
    let mut m: u64 = 1;
    while let Some(next) = m.checked_mul(l) {
        if next > (1u64 << 62) {
            break;
        }
        m = next;
        n += 1;
    }
    n
}

/// A unit of `ℤ/l^N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TruncUnit {
    pub l: u64,
    pub prec: u32,
    pub residue: u64,
}

impl TruncUnit {
    pub fn new(l: u64, prec: u32, residue: u64) -> Result<Self> {
        if prec == 0 || prec > max_precision(l) {
            return input(format!("precision {prec} unsupported for l = {l}"));
        }
        let m = pow_u(l, prec);
        if residue.is_multiple_of(l) {
            return input(format!("{residue} is not a unit mod {l}"));
        }
        Ok(TruncUnit { l, prec, residue: residue % m })
    }

    pub fn modulus(&self) -> u64 {
        pow_u(self.l, self.prec)
    }

    pub fn pow(&self, k: i64) -> TruncUnit {
        let m = self.modulus();
        let r = powmod(self.residue, k.unsigned_abs(), m);
        let residue = if k < 0 { invmod(r, m) } else { r };
        TruncUnit { residue, ..*self }
    }

    /// Multiplicative order modulo `l^k`.
    pub fn order_mod(&self, k: u32) -> u64 {
        let m = pow_u(self.l, k);
        let mut x = self.residue % m;
        let mut n = 1;
        while x != 1 {
            x = mulmod(x, self.residue, m);
            n += 1;
        }
        n
    }

    pub fn to_scalar(&self) -> PadicScalar {
        PadicScalar::Unit { l: self.l, val: 0, unit: self.residue, prec: self.prec }
    }
}

/// Smallest positive integer generating `(ℤ/l²)^×`, as a unit of precision `prec`.
pub fn unit_generator(l: u64, prec: u32) -> Result<TruncUnit> {
    if l == 2 {
        return Err(Error::Unsupported("l = 2: the unit group is not procyclic".into()));
    }
    if !is_prime(l) {
        return input(format!("{l} is not prime"));
    }
    let m2 = l * l;
    let phi = l * (l - 1);
    for g in 2..m2 {
        if g % l == 0 {
            continue;
        }
        let u = TruncUnit { l, prec: 2, residue: g };
        if u.order_mod(2) == phi {
            return TruncUnit::new(l, prec, g);
        }
    }
    unreachable!("(Z/l^2)^x is cyclic for odd l")
}

/// An element of `Q_l` known to finite precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PadicScalar {
    /// `l^val · unit` with the unit known modulo `l^prec`.
    Unit { l: u64, val: i64, unit: u64, prec: u32 },
    /// Zero, exactly (`known_to = None`) or only modulo `l^known_to`.
    Zero { l: u64, known_to: Option<i64> },
}

impl PadicScalar {
    pub fn zero(l: u64) -> Self {
        PadicScalar::Zero { l, known_to: None }
    }

    pub fn one(l: u64, prec: u32) -> Self {
        PadicScalar::Unit { l, val: 0, unit: 1, prec }
    }

    /// `l^k`
    pub fn ell_power(l: u64, k: i64, prec: u32) -> Self {
        PadicScalar::Unit { l, val: k, unit: 1, prec }
    }

    pub fn from_int(l: u64, x: i128, prec: u32) -> Self {
        if x == 0 {
            return Self::zero(l);
        }
        let v = valuation_i128(x, l);
        let m = pow_u(l, prec) as i128;
        let u = x / (l as i128).pow(v);
        PadicScalar::Unit { l, val: v as i64, unit: u.rem_euclid(m) as u64, prec }
    }

    pub fn ell(&self) -> u64 {
        match *self {
            PadicScalar::Unit { l, .. } | PadicScalar::Zero { l, .. } => l,
        }
    }

    /// Valuation, or `None` for (possibly inexact) zero.
    pub fn valuation(&self) -> Option<i64> {
        match *self {
            PadicScalar::Unit { val, .. } => Some(val),
            PadicScalar::Zero { .. } => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, PadicScalar::Zero { .. })
    }

    /// Relative precision of a nonzero value.
    pub fn rel_prec(&self) -> Option<u32> {
        match *self {
            PadicScalar::Unit { prec, .. } => Some(prec),
            PadicScalar::Zero { .. } => None,
        }
    }

    /// Absolute precision: the value is known modulo `l^abs_prec` (`None` = exact).
    pub fn abs_prec(&self) -> Option<i64> {
        match *self {
            PadicScalar::Unit { val, prec, .. } => Some(val + prec as i64),
            PadicScalar::Zero { known_to, .. } => known_to,
        }
    }

    pub fn neg(&self) -> Self {
        match *self {
            PadicScalar::Unit { l, val, unit, prec } => {
                let m = pow_u(l, prec);
                PadicScalar::Unit { l, val, unit: (m - unit) % m, prec }
            }
            z => z,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let l = self.ell();
        match (*self, *other) {
            (PadicScalar::Unit { val: a, unit: u, prec: p, .. }, PadicScalar::Unit { val: b, unit: w, prec: q, .. }) => {
                let prec = p.min(q);
                let m = pow_u(l, prec);
                PadicScalar::Unit { l, val: a + b, unit: mulmod(u, w, m), prec }
            }
            (PadicScalar::Zero { known_to: None, .. }, _) | (_, PadicScalar::Zero { known_to: None, .. }) => {
                Self::zero(l)
            }
            (PadicScalar::Zero { known_to: Some(k), .. }, x) | (x, PadicScalar::Zero { known_to: Some(k), .. }) => {
                let shift = match x {
                    PadicScalar::Unit { val, .. } => val,
                    PadicScalar::Zero { known_to, .. } => known_to.unwrap_or(0),
                };
                PadicScalar::Zero { l, known_to: Some(k + shift) }
            }
        }
    }

    pub fn inv(&self) -> Result<Self> {
        match *self {
            PadicScalar::Unit { l, val, unit, prec } => {
                Ok(PadicScalar::Unit { l, val: -val, unit: invmod(unit, pow_u(l, prec)), prec })
            }
            PadicScalar::Zero { .. } => Err(Error::Precision("inverse of a value indistinguishable from zero".into())),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let l = self.ell();
        match (*self, *other) {
            (PadicScalar::Zero { known_to: None, .. }, x) | (x, PadicScalar::Zero { known_to: None, .. }) => x,
            (PadicScalar::Zero { known_to: Some(j), .. }, PadicScalar::Zero { known_to: Some(k), .. }) => {
                PadicScalar::Zero { l, known_to: Some(j.min(k)) }
            }
            (PadicScalar::Zero { known_to: Some(k), .. }, PadicScalar::Unit { val, unit, prec, .. })
            | (PadicScalar::Unit { val, unit, prec, .. }, PadicScalar::Zero { known_to: Some(k), .. }) => {
                let abs = k.min(val + prec as i64);
                if val < abs {
                    let p = (abs - val) as u32;
                    PadicScalar::Unit { l, val, unit: unit % pow_u(l, p), prec: p }
                } else {
                    PadicScalar::Zero { l, known_to: Some(abs) }
                }
            }
            (PadicScalar::Unit { val: a, unit: u, prec: p, .. }, PadicScalar::Unit { val: b, unit: w, prec: q, .. }) => {
                let ((a, u, p), (b, w, q)) = if a <= b { ((a, u, p), (b, w, q)) } else { ((b, w, q), (a, u, p)) };
                let abs = (a + p as i64).min(b + q as i64);
                let digits = (abs - a) as u32;
                let m = pow_u(l, digits);
                let gap = (b - a) as u32;
                let s = if gap >= digits {
                    u % m
                } else {
                    (u % m + mulmod(pow_u(l, gap), w % m, m)) % m
                };
                if s == 0 {
                    return PadicScalar::Zero { l, known_to: Some(abs) };
                }
                let v = valuation_i128(s as i128, l);
                let unit = s / pow_u(l, v);
                PadicScalar::Unit { l, val: a + v as i64, unit, prec: digits - v }
            }
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Truncates the relative precision to `prec`.
    pub fn with_prec(&self, prec: u32) -> Self {
        match *self {
            PadicScalar::Unit { l, val, unit, prec: p } => {
                let p = p.min(prec);
                PadicScalar::Unit { l, val, unit: unit % pow_u(l, p), prec: p }
            }
            z => z,
        }
    }

    /// Exact comparison where both values are determined to the compared digits.
    pub fn agrees_with(&self, other: &Self) -> bool {
        match self.sub(other) {
            PadicScalar::Zero { .. } => true,
            PadicScalar::Unit { .. } => false,
        }
    }

    pub fn to_record(&self) -> ScalarRecord {
        match *self {
            PadicScalar::Unit { l, val, unit, prec } => ScalarRecord { l, val: Some(val), unit, prec, known_to: None },
            PadicScalar::Zero { l, known_to } => ScalarRecord { l, val: None, unit: 0, prec: 0, known_to },
        }
    }

    pub fn from_record(r: &ScalarRecord) -> Result<Self> {
        if !is_prime(r.l) || r.l == 2 {
            return input(format!("l = {} must be an odd prime", r.l));
        }
        match r.val {
            None => Ok(PadicScalar::Zero { l: r.l, known_to: r.known_to }),
            Some(val) => {
                if r.prec == 0 || r.prec > max_precision(r.l) {
                    return input("unsupported precision");
                }
                if r.unit.is_multiple_of(r.l) {
                    return input("unit part divisible by l");
                }
                Ok(PadicScalar::Unit { l: r.l, val, unit: r.unit % pow_u(r.l, r.prec), prec: r.prec })
            }
        }
    }
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            PadicScalar::Unit { l, val, unit, prec } => write!(f, "{l}^{val}*{unit} (+O({l}^{prec}))"),
            PadicScalar::Zero { known_to: None, .. } => write!(f, "0"),
            PadicScalar::Zero { l, known_to: Some(k) } => write!(f, "O({l}^{k})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarRecord {
    pub l: u64,
    pub val: Option<i64>,
    pub unit: u64,
    pub prec: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub known_to: Option<i64>,
}

/// `(a, b; 0, d)` with `a`, `d` invertible.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BorelElement {
    pub a: PadicScalar,
    pub b: PadicScalar,
    pub d: PadicScalar,
}

fn check_floor(x: &PadicScalar, floor: u32, what: &str) -> Result<()> {
    if let Some(p) = x.rel_prec() {
        if p < floor {
            return Err(Error::Precision(format!("{what} keeps {p} digits, below the floor {floor}")));
        }
    }
    Ok(())
}

impl BorelElement {
    pub fn new(a: PadicScalar, b: PadicScalar, d: PadicScalar) -> Result<Self> {
        if a.is_zero() || d.is_zero() {
            return input("diagonal entries must be invertible");
        }
        Ok(BorelElement { a, b, d })
    }

    pub fn identity(l: u64, prec: u32) -> Self {
        let one = PadicScalar::one(l, prec);
        BorelElement { a: one, b: PadicScalar::zero(l), d: one }
    }

    pub fn diag(a: PadicScalar, d: PadicScalar) -> Self {
        BorelElement { a, b: PadicScalar::zero(a.ell()), d }
    }

    pub fn upper(l: u64, b: PadicScalar, prec: u32) -> Self {
        let one = PadicScalar::one(l, prec);
        BorelElement { a: one, b, d: one }
    }

    fn checked(self, floor: u32) -> Result<Self> {
        check_floor(&self.a, floor, "diagonal entry a")?;
        check_floor(&self.d, floor, "diagonal entry d")?;
        check_floor(&self.b, floor, "entry b")?;
        Ok(self)
    }

    pub fn is_identity(&self) -> bool {
        let l = self.a.ell();
        let one = PadicScalar::one(l, 1);
        self.a.agrees_with(&one) && self.d.agrees_with(&one) && self.b.is_zero()
    }
}

pub fn borel_mul(x: &BorelElement, y: &BorelElement, floor: u32) -> Result<BorelElement> {
    if x.a.ell() != y.a.ell() {
        return input("mixed primes");
    }
    BorelElement {
        a: x.a.mul(&y.a),
        b: x.a.mul(&y.b).add(&x.b.mul(&y.d)),
        d: x.d.mul(&y.d),
    }
    .checked(floor)
}

pub fn borel_inv(x: &BorelElement, floor: u32) -> Result<BorelElement> {
    let ai = x.a.inv()?;
    let di = x.d.inv()?;
    BorelElement { a: ai, b: x.b.mul(&ai).mul(&di).neg(), d: di }.checked(floor)
}

/// Membership in the integral Borel subgroup.
pub fn in_integral_borel(x: &BorelElement) -> Result<bool> {
    let (Some(va), Some(vd)) = (x.a.valuation(), x.d.valuation()) else {
        return Err(Error::Precision("diagonal entry indistinguishable from zero".into()));
    };
    let b_ok = match x.b {
        PadicScalar::Unit { val, .. } => val >= 0,
        PadicScalar::Zero { known_to: None, .. } => true,
        PadicScalar::Zero { known_to: Some(k), .. } => {
            if k < 0 {
                return Err(Error::Precision(format!("upper entry only known modulo l^{k}")));
            }
            true
        }
    };
    Ok(va == 0 && vd == 0 && b_ok)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Int(i64),
    /// An l-adic exponent; allowed on `t3` only.
    Adic(PadicScalar),
}

/// Generator `t_index` (1..=5) raised to an exponent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PsiLetter {
    pub generator: u8,
    pub exp: Exponent,
}

impl PsiLetter {
    pub fn int(generator: u8, k: i64) -> Self {
        PsiLetter { generator, exp: Exponent::Int(k) }
    }

    pub fn adic(generator: u8, x: PadicScalar) -> Self {
        PsiLetter { generator, exp: Exponent::Adic(x) }
    }
}

/// Image of a single letter under the representation sending
/// t1 ↦ diag(u,1), t2 ↦ diag(1,u), t3 ↦ (1,1;0,1), t4 ↦ diag(l,1), t5 ↦ diag(1,l).
pub fn psi_letter(letter: &PsiLetter, u1: &TruncUnit) -> Result<BorelElement> {
    let (l, prec) = (u1.l, u1.prec);
    let one = PadicScalar::one(l, prec);
    let int_exp = |what: &str| match letter.exp {
        Exponent::Int(k) => Ok(k),
        Exponent::Adic(_) => input(format!("l-adic exponent not supported on {what}")),
    };
    Ok(match letter.generator {
        1 => BorelElement::diag(u1.pow(int_exp("t1")?).to_scalar(), one),
        2 => BorelElement::diag(one, u1.pow(int_exp("t2")?).to_scalar()),
        3 => {
            let x = match letter.exp {
                Exponent::Int(k) => PadicScalar::from_int(l, k as i128, prec),
                Exponent::Adic(x) => x,
            };
            BorelElement::upper(l, x, prec)
        }
        4 => BorelElement::diag(PadicScalar::ell_power(l, int_exp("t4")?, prec), one),
        5 => BorelElement::diag(one, PadicScalar::ell_power(l, int_exp("t5")?, prec)),
        g => return input(format!("unknown generator t{g}")),
    })
}

pub fn psi_word(word: &[PsiLetter], u1: &TruncUnit, floor: u32) -> Result<BorelElement> {
    let mut acc = BorelElement::identity(u1.l, u1.prec);
    for letter in word {
        acc = borel_mul(&acc, &psi_letter(letter, u1)?, floor)?;
    }
    Ok(acc)
}

/// `t4⁻ⁿ t1ᵖ t3ᵖ t1⁻ᵖ t3^{−p·u1} t4ⁿ`; with `p = 1` this is the untwisted word.
pub fn twisted_word(p: i64, n: i64, u1: &TruncUnit) -> Vec<PsiLetter> {
    let minus_pu = PadicScalar::from_int(u1.l, -(p as i128), u1.prec).mul(&u1.to_scalar());
    vec![
        PsiLetter::int(4, -n),
        PsiLetter::int(1, p),
        PsiLetter::int(3, p),
        PsiLetter::int(1, -p),
        PsiLetter::adic(3, minus_pu),
        PsiLetter::int(4, n),
    ]
}

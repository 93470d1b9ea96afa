//! Exact arithmetic in SL(2,Z) and Kodaira classification of monodromy.
//!
//! Everything here is integer arithmetic. Products go through `i128` and are
//! narrowed back to `i64`; a value that does not fit is reported as
//! [`Sl2zError::Overflow`] instead of wrapping.

use core::fmt;
use core::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum Sl2zError {
    #[error("determinant is {0}, not 1")]
    NotUnimodular(i128),
    #[error("integer overflow in SL(2,Z) arithmetic")]
    Overflow,
    #[error("trace {0} is hyperbolic; the matrix is not a Kodaira monodromy")]
    NotKodaira(i128),
    #[error("Euler number of {0} is not defined here (only I_b and I_b* are)")]
    EulerUnspecified(KodairaType),
}

/// A 2x2 integer matrix `(a b; c d)` with `ad - bc = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IntMatrix2 {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
}

fn narrow(x: i128) -> Result<i64, Sl2zError> {
    i64::try_from(x).map_err(|_| Sl2zError::Overflow)
}

impl IntMatrix2 {
    pub const IDENTITY: IntMatrix2 = IntMatrix2 { a: 1, b: 0, c: 0, d: 1 };
    pub const NEG_IDENTITY: IntMatrix2 = IntMatrix2 { a: -1, b: 0, c: 0, d: -1 };

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self, Sl2zError> {
        let det = a as i128 * d as i128 - b as i128 * c as i128;
        if det != 1 {
            return Err(Sl2zError::NotUnimodular(det));
        }
        Ok(IntMatrix2 { a, b, c, d })
    }

    /// Row-major entries `[a, b, c, d]`.
    pub fn entries(&self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn trace(&self) -> i128 {
        self.a as i128 + self.d as i128
    }

    pub fn checked_mul(&self, o: &IntMatrix2) -> Result<IntMatrix2, Sl2zError> {
        let (a, b, c, d) = (self.a as i128, self.b as i128, self.c as i128, self.d as i128);
        let (e, f, g, h) = (o.a as i128, o.b as i128, o.c as i128, o.d as i128);
        Ok(IntMatrix2 {
            a: narrow(a * e + b * g)?,
            b: narrow(a * f + b * h)?,
            c: narrow(c * e + d * g)?,
            d: narrow(c * f + d * h)?,
        })
    }

    pub fn inverse(&self) -> Result<IntMatrix2, Sl2zError> {
        Ok(IntMatrix2 {
            a: self.d,
            b: self.b.checked_neg().ok_or(Sl2zError::Overflow)?,
            c: self.c.checked_neg().ok_or(Sl2zError::Overflow)?,
            d: self.a,
        })
    }

    pub fn negate(&self) -> Result<IntMatrix2, Sl2zError> {
        let n = |x: i64| x.checked_neg().ok_or(Sl2zError::Overflow);
        Ok(IntMatrix2 { a: n(self.a)?, b: n(self.b)?, c: n(self.c)?, d: n(self.d)? })
    }

    pub fn checked_pow(&self, mut k: u32) -> Result<IntMatrix2, Sl2zError> {
        let mut acc = IntMatrix2::IDENTITY;
        let mut base = *self;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.checked_mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.checked_mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// `p · self · p⁻¹`.
    pub fn conjugate_by(&self, p: &IntMatrix2) -> Result<IntMatrix2, Sl2zError> {
        p.checked_mul(self)?.checked_mul(&p.inverse()?)
    }

    /// Row vector times matrix: `(x, y) · self`.
    fn left_apply(&self, v: [i128; 2]) -> [i128; 2] {
        [
            v[0] * self.a as i128 + v[1] * self.c as i128,
            v[0] * self.b as i128 + v[1] * self.d as i128,
        ]
    }
}

impl fmt::Display for IntMatrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {}; {} {})", self.a, self.b, self.c, self.d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Order {
    Finite(u32),
    Infinite,
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(n) => write!(f, "{n}"),
            Order::Infinite => f.write_str("inf"),
        }
    }
}

/// Kodaira fiber type. `I(b)` and `IStar(b)` carry `b ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KodairaType {
    I(u32),
    IStar(u32),
    II,
    III,
    IV,
    IIStar,
    IIIStar,
    IVStar,
}

impl KodairaType {
    /// Euler number of the singular fiber; defined only for the `I_b` and `I_b*` families.
    pub fn euler_number(&self) -> Result<u32, Sl2zError> {
        match *self {
            KodairaType::I(b) => Ok(b),
            KodairaType::IStar(b) => Ok(6 + b),
            t => Err(Sl2zError::EulerUnspecified(t)),
        }
    }

    pub fn is_finite_monodromy(&self) -> bool {
        !matches!(self, KodairaType::I(b) | KodairaType::IStar(b) if *b > 0)
    }

    /// The six types of finite nontrivial monodromy plus `I_b`, `I_b*` for `b` in `bs`.
    pub fn sample(bs: &[u32]) -> alloc::vec::Vec<KodairaType> {
        let mut v = alloc::vec![
            KodairaType::II,
            KodairaType::III,
            KodairaType::IV,
            KodairaType::IIStar,
            KodairaType::IIIStar,
            KodairaType::IVStar,
        ];
        for &b in bs {
            v.push(KodairaType::I(b));
            v.push(KodairaType::IStar(b));
        }
        v
    }
}

impl fmt::Display for KodairaType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KodairaType::I(b) => write!(f, "I_{b}"),
            KodairaType::IStar(b) => write!(f, "I_{b}*"),
            KodairaType::II => f.write_str("II"),
            KodairaType::III => f.write_str("III"),
            KodairaType::IV => f.write_str("IV"),
            KodairaType::IIStar => f.write_str("II*"),
            KodairaType::IIIStar => f.write_str("III*"),
            KodairaType::IVStar => f.write_str("IV*"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("unrecognized Kodaira type")]
pub struct ParseKodairaError;

impl FromStr for KodairaType {
    type Err = ParseKodairaError;

    /// Accepts `II`, `IV*`, `I_3`, `I3`, `I_0*`, `I2*` and similar.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (body, star) = match s.strip_suffix('*') {
            Some(b) => (b, true),
            None => (s, false),
        };
        let fixed = match body {
            "II" => Some((KodairaType::II, KodairaType::IIStar)),
            "III" => Some((KodairaType::III, KodairaType::IIIStar)),
            "IV" => Some((KodairaType::IV, KodairaType::IVStar)),
            _ => None,
        };
        if let Some((plain, starred)) = fixed {
            return Ok(if star { starred } else { plain });
        }
        let digits = body.strip_prefix('I').ok_or(ParseKodairaError)?;
        let digits = digits.strip_prefix('_').unwrap_or(digits);
        if digits.is_empty() || !digits.bytes().all(|c| c.is_ascii_digit()) {
            return Err(ParseKodairaError);
        }
        let b: u32 = digits.parse().map_err(|_| ParseKodairaError)?;
        Ok(if star { KodairaType::IStar(b) } else { KodairaType::I(b) })
    }
}

/// Result of [`classify`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub kodaira_type: KodairaType,
    /// `P` with `P · representative · P⁻¹ = A`, when one exists in SL(2,Z).
    pub conjugator: Option<IntMatrix2>,
    /// Signed `b` read off `P⁻¹AP = ±(1 b; 0 1)` for parabolic input.
    pub parabolic_b: Option<i64>,
}

fn order_by_trace(a: &IntMatrix2) -> Order {
    match a.trace() {
        0 => Order::Finite(4),
        1 => Order::Finite(6),
        -1 => Order::Finite(3),
        2 if *a == IntMatrix2::IDENTITY => Order::Finite(1),
        -2 if *a == IntMatrix2::NEG_IDENTITY => Order::Finite(2),
        _ => Order::Infinite,
    }
}

/// Smallest `n ≥ 1` with `Aⁿ = I`, or [`Order::Infinite`].
pub fn order(a: &IntMatrix2) -> Order {
    let by_trace = order_by_trace(a);
    debug_assert_eq!(by_trace, order_by_powers(a, 12));
    by_trace
}

/// Order found by repeated multiplication, giving up after `max_exp`.
pub fn order_by_powers(a: &IntMatrix2, max_exp: u32) -> Order {
    let mut p = *a;
    for n in 1..=max_exp {
        if p == IntMatrix2::IDENTITY {
            return Order::Finite(n);
        }
        p = match p.checked_mul(a) {
            Ok(q) => q,
            Err(_) => return Order::Infinite,
        };
    }
    Order::Infinite
}

pub fn representative(t: KodairaType) -> Result<IntMatrix2, Sl2zError> {
    let m = |a, b, c, d| IntMatrix2 { a, b, c, d };
    Ok(match t {
        KodairaType::I(b) => m(1, b as i64, 0, 1),
        KodairaType::IStar(b) => m(-1, -(b as i64), 0, -1),
        KodairaType::II => m(0, 1, -1, 1),
        KodairaType::IVStar => m(0, -1, 1, -1),
        KodairaType::IIStar => m(1, -1, 1, 0),
        KodairaType::IV => m(-1, 1, -1, 0),
        KodairaType::III => m(0, 1, -1, 0),
        KodairaType::IIIStar => m(0, -1, 1, 0),
    })
}

fn gcd_ext(a: i128, b: i128) -> (i128, i128, i128) {
    // returns (g, x, y) with a x + b y = g ≥ 0
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// Primitive generator of `{v : Av = v}` for a parabolic `A` with trace 2.
fn fixed_vector(a: &IntMatrix2) -> Option<[i128; 2]> {
    let (p, q, r, s) = (a.a as i128 - 1, a.b as i128, a.c as i128, a.d as i128 - 1);
    // (A - I) v = 0; A - I has rank one.
    let (x, y) = if p != 0 || q != 0 { (q, -p) } else { (s, -r) };
    if x == 0 && y == 0 {
        return None;
    }
    let g = gcd_ext(x, y).0;
    Some([x / g, y / g])
}

/// Normal form of a trace-2 matrix with respect to the fixed vector `v`:
/// completes `v` to `P = (v | u)` with `det P = 1` and returns
/// `(b, P)` with `P⁻¹AP = (1 b; 0 1)`.
///
/// `u` is normalized modulo `v` so the choice is canonical.
pub fn parabolic_normal_form(a: &IntMatrix2, v: [i64; 2]) -> Result<(i64, IntMatrix2), Sl2zError> {
    let (v1, v2) = (v[0] as i128, v[1] as i128);
    // det(v|u) = v1 u2 - v2 u1 = 1
    let (g, x, y) = gcd_ext(v1, -v2);
    if g != 1 {
        return Err(Sl2zError::NotUnimodular(g));
    }
    let (mut u1, mut u2) = (y, x);
    if v1 != 0 {
        let k = u1.div_euclid(v1.abs()) * v1.signum();
        u1 -= k * v1;
        u2 -= k * v2;
    } else {
        let k = u2.div_euclid(v2.abs()) * v2.signum();
        u1 -= k * v1;
        u2 -= k * v2;
    }
    let p = IntMatrix2 { a: narrow(v1)?, b: narrow(u1)?, c: narrow(v2)?, d: narrow(u2)? };
    let n = p.inverse()?.checked_mul(a)?.checked_mul(&p)?;
    if n.a != 1 || n.c != 0 || n.d != 1 {
        return Err(Sl2zError::NotKodaira(a.trace()));
    }
    Ok((n.b, p))
}

fn classify_parabolic(a: &IntMatrix2) -> Result<(u32, Option<IntMatrix2>, i64), Sl2zError> {
    let v = fixed_vector(a).ok_or(Sl2zError::NotKodaira(a.trace()))?;
    let (b, p) = parabolic_normal_form(a, [narrow(v[0])?, narrow(v[1])?])?;
    let abs_b = u32::try_from(b.unsigned_abs()).map_err(|_| Sl2zError::Overflow)?;
    // (1 -b; 0 1) is not SL(2,Z)-conjugate to (1 b; 0 1) for b ≠ 0.
    let conj = if b > 0 { Some(p) } else { None };
    Ok((abs_b, conj, b))
}

/// Positive definite binary quadratic form `a x² + b xy + c y²`,
/// reduced with the substitution matrix tracked.
struct Form {
    a: i128,
    b: i128,
    c: i128,
    // columns of the substitution (x, y) = M (x', y')
    m: [[i128; 2]; 2],
}

impl Form {
    fn reduce(mut self) -> Self {
        loop {
            if self.c < self.a {
                // (x, y) = (-y', x')
                self = Form {
                    a: self.c,
                    b: -self.b,
                    c: self.a,
                    m: [[self.m[0][1], -self.m[0][0]], [self.m[1][1], -self.m[1][0]]],
                };
                continue;
            }
            if self.b.abs() > self.a {
                // (x, y) = (x' + k y', y') with k = round(-b / 2a)
                let two_a = 2 * self.a;
                let k = (-self.b).div_euclid(two_a) + i128::from(2 * (-self.b).rem_euclid(two_a) >= two_a);
                self = Form {
                    a: self.a,
                    b: 2 * self.a * k + self.b,
                    c: self.a * k * k + self.b * k + self.c,
                    m: [
                        [self.m[0][0], self.m[0][0] * k + self.m[0][1]],
                        [self.m[1][0], self.m[1][0] * k + self.m[1][1]],
                    ],
                };
                continue;
            }
            return self;
        }
    }
}

/// Elliptic case: find `P` with `P·R·P⁻¹ = A` for the candidate `R`, if any.
fn elliptic_conjugator(a: &IntMatrix2, r: &IntMatrix2) -> Result<Option<IntMatrix2>, Sl2zError> {
    // Rows p1, p2 of Q with QA = RQ; then P = Q⁻¹.
    // First row equation: p1 A = R11 p1 + R12 p2, with R12 = ±1.
    let r12 = r.b as i128;
    debug_assert!(r12 == 1 || r12 == -1);
    let r11 = r.a as i128;
    // det Q = r12 (b x² + (d - a) xy - c y²)
    let (ea, eb, ec, ed) = (a.a as i128, a.b as i128, a.c as i128, a.d as i128);
    let (fa, fb, fc) = (r12 * eb, r12 * (ed - ea), -r12 * ec);
    if fa <= 0 {
        return Ok(None);
    }
    let red = Form { a: fa, b: fb, c: fc, m: [[1, 0], [0, 1]] }.reduce();
    if red.a != 1 {
        return Ok(None);
    }
    let p1 = [red.m[0][0], red.m[1][0]];
    let p1a = a.left_apply(p1);
    let p2 = [r12 * (p1a[0] - r11 * p1[0]), r12 * (p1a[1] - r11 * p1[1])];
    let q = IntMatrix2::new(narrow(p1[0])?, narrow(p1[1])?, narrow(p2[0])?, narrow(p2[1])?)?;
    let p = q.inverse()?;
    if r.conjugate_by(&p)? != *a {
        return Ok(None);
    }
    Ok(Some(p))
}

/// Kodaira type of the conjugacy class of `a`.
pub fn classify(a: &IntMatrix2) -> Result<Classification, Sl2zError> {
    let tr = a.trace();
    let plain = |t| Classification { kodaira_type: t, conjugator: Some(IntMatrix2::IDENTITY), parabolic_b: None };
    match tr {
        2 if *a == IntMatrix2::IDENTITY => Ok(plain(KodairaType::I(0))),
        -2 if *a == IntMatrix2::NEG_IDENTITY => Ok(plain(KodairaType::IStar(0))),
        2 => {
            let (b, conj, raw) = classify_parabolic(a)?;
            Ok(Classification { kodaira_type: KodairaType::I(b), conjugator: conj, parabolic_b: Some(raw) })
        }
        -2 => {
            let (b, conj, raw) = classify_parabolic(&a.negate()?)?;
            Ok(Classification { kodaira_type: KodairaType::IStar(b), conjugator: conj, parabolic_b: Some(raw) })
        }
        -1..=1 => {
            let candidates: [KodairaType; 2] = match tr {
                0 => [KodairaType::III, KodairaType::IIIStar],
                1 => [KodairaType::II, KodairaType::IIStar],
                _ => [KodairaType::IVStar, KodairaType::IV],
            };
            for t in candidates {
                if let Some(p) = elliptic_conjugator(a, &representative(t)?)? {
                    return Ok(Classification { kodaira_type: t, conjugator: Some(p), parabolic_b: None });
                }
            }
            // Each elliptic trace has exactly two SL(2,Z) classes, so this is unreachable
            // unless the reduction above is wrong.
            Err(Sl2zError::NotKodaira(tr))
        }
        _ => Err(Sl2zError::NotKodaira(tr)),
    }
}

/// Rank of the fixed lattice `{v ∈ Z² : Av = v}` and its primitive generator when the rank is 1.
pub fn invariant_vector_rank(a: &IntMatrix2) -> (u8, Option<[i64; 2]>) {
    if *a == IntMatrix2::IDENTITY {
        return (2, None);
    }
    if a.trace() != 2 {
        return (0, None);
    }
    match fixed_vector(a).and_then(|v| Some([i64::try_from(v[0]).ok()?, i64::try_from(v[1]).ok()?])) {
        Some(v) => (1, Some(v)),
        None => (0, None),
    }
}

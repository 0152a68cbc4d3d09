//! The rank-2 grading lattice: weights, determinants, ratio weights and the
//! variable order, plus normal forms of dP2 weight data.

use core::cmp::Ordering;
use core::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

/// A bidegree `(l, m)`: `l` is the L-grading, `m` the M-grading.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Weight {
    pub l: i64,
    pub m: i64,
}

/// Divisor classes live in the same lattice as variable weights.
pub type DivClass = Weight;

impl Weight {
    pub const fn new(l: i64, m: i64) -> Self {
        Weight { l, m }
    }

    pub const ZERO: Weight = Weight::new(0, 0);
    /// Weight of every base variable.
    pub const BASE: Weight = Weight::new(1, 0);

    pub fn is_zero(self) -> bool {
        self.l == 0 && self.m == 0
    }

    pub fn checked_add(self, o: Weight) -> Option<Weight> {
        Some(Weight::new(self.l.checked_add(o.l)?, self.m.checked_add(o.m)?))
    }

    pub fn checked_sub(self, o: Weight) -> Option<Weight> {
        Some(Weight::new(self.l.checked_sub(o.l)?, self.m.checked_sub(o.m)?))
    }

    pub fn checked_scale(self, k: i64) -> Option<Weight> {
        Some(Weight::new(self.l.checked_mul(k)?, self.m.checked_mul(k)?))
    }

    /// gcd of the two entries; the multiplicity of `self` over its primitive ray.
    pub fn content(self) -> i64 {
        self.l.gcd(&self.m)
    }

    /// Primitive generator of the ray through `self`, normalised so that
    /// `m >= 0`, and `l > 0` when `m == 0`.
    pub fn primitive(self) -> Weight {
        assert!(!self.is_zero(), "zero weight has no ray");
        let g = self.content();
        let (mut l, mut m) = (self.l / g, self.m / g);
        if m < 0 || (m == 0 && l < 0) {
            l = -l;
            m = -m;
        }
        Weight::new(l, m)
    }
}

impl core::ops::Add for Weight {
    type Output = Weight;
    fn add(self, o: Weight) -> Weight {
        self.checked_add(o).expect("weight overflow")
    }
}

impl core::ops::Sub for Weight {
    type Output = Weight;
    fn sub(self, o: Weight) -> Weight {
        self.checked_sub(o).expect("weight overflow")
    }
}

impl core::ops::Neg for Weight {
    type Output = Weight;
    fn neg(self) -> Weight {
        Weight::new(-self.l, -self.m)
    }
}

impl core::iter::Sum for Weight {
    fn sum<I: Iterator<Item = Weight>>(iter: I) -> Weight {
        iter.fold(Weight::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.l, self.m)
    }
}

/// `w1.l * w2.m - w1.m * w2.l`. Panics on overflow rather than wrapping.
pub fn det2(w1: Weight, w2: Weight) -> i64 {
    w1.l.checked_mul(w2.m).and_then(|a| w1.m.checked_mul(w2.l).and_then(|b| a.checked_sub(b))).expect("det2 overflow")
}

/// A rational extended by the two infinities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExtRational {
    NegInf,
    Finite(Ratio<i64>),
    PosInf,
}

impl PartialOrd for ExtRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtRational {
    fn cmp(&self, other: &Self) -> Ordering {
        use ExtRational::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (_, NegInf) | (PosInf, _) => Ordering::Greater,
            (Finite(a), Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRational::NegInf => f.write_str("-inf"),
            ExtRational::PosInf => f.write_str("+inf"),
            ExtRational::Finite(r) => write!(f, "{}", r),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LatticeError {
    ZeroWeight,
    /// Normal-form input outside `0 <= α <= β <= γ`, `δ >= 0`.
    NotNormalised,
}

impl fmt::Display for LatticeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeError::ZeroWeight => f.write_str("zero weight"),
            LatticeError::NotNormalised => f.write_str("weights must satisfy 0 <= alpha <= beta <= gamma and delta >= 0"),
        }
    }
}

/// `l / m`, with `(±|a|, 0)` mapped to `±∞`.
pub fn ratio_weight(w: Weight) -> Result<ExtRational, LatticeError> {
    if w.is_zero() {
        return Err(LatticeError::ZeroWeight);
    }
    Ok(match w.m {
        0 if w.l > 0 => ExtRational::PosInf,
        0 => ExtRational::NegInf,
        m => ExtRational::Finite(Ratio::new(w.l, m)),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Order {
    Precedes,
    EqualRay,
    Succeeds,
}

/// The variable order: larger ratio weight comes first.
pub fn cmp_order(w1: Weight, w2: Weight) -> Result<Order, LatticeError> {
    let (r1, r2) = (ratio_weight(w1)?, ratio_weight(w2)?);
    Ok(match r1.cmp(&r2) {
        Ordering::Greater => Order::Precedes,
        Ordering::Equal => Order::EqualRay,
        Ordering::Less => Order::Succeeds,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NfKind {
    I,
    II,
    III,
}

/// Normal form of dP2 weight data `(α,β,γ,δ;e)` under the shift
/// `(α,β,γ,δ;e) -> (α-k,β-k,γ-k,δ-2k;e-4k)`.
///
/// Fiber weights in each form (first row, second row `(1,1,1,2)`):
/// I: `(0,-a,-b,-c)`, II: `(-a,-b,-c,0)`, III: `(-a,-b,-c,-1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NormalForm {
    pub kind: NfKind,
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub e: i64,
    /// The shift that was removed.
    pub shift: i64,
}

impl NormalForm {
    /// The `(α,β,γ,δ;e)` tuple with zero shift that has this normal form.
    pub fn canonical_input(&self) -> ([i64; 4], i64) {
        let (a, b, c) = (self.a, self.b, self.c);
        let w = match self.kind {
            NfKind::I => [0, a, b, c],
            NfKind::II => [a, b, c, 0],
            NfKind::III => [a, b, c, 1],
        };
        (w, self.e)
    }

    fn satisfies_invariants(&self) -> bool {
        let (a, b, c) = (self.a, self.b, self.c);
        match self.kind {
            NfKind::I => c > 0 && 0 <= a && a <= b,
            NfKind::II => 0 <= a && a <= b && b <= c,
            NfKind::III => 0 < a && a <= b && b <= c,
        }
    }
}

pub fn normal_form_dp2(w: [i64; 4], e: i64) -> Result<NormalForm, LatticeError> {
    let [al, be, ga, de] = w;
    if !(0 <= al && al <= be && be <= ga && de >= 0) {
        return Err(LatticeError::NotNormalised);
    }
    let nf = if de % 2 == 0 && al >= de / 2 {
        let k = de / 2;
        NormalForm { kind: NfKind::II, a: al - k, b: be - k, c: ga - k, e: e - 4 * k, shift: k }
    } else if de % 2 == 1 && al > (de - 1) / 2 {
        let k = (de - 1) / 2;
        NormalForm { kind: NfKind::III, a: al - k, b: be - k, c: ga - k, e: e - 4 * k, shift: k }
    } else {
        let k = al;
        NormalForm { kind: NfKind::I, a: be - al, b: ga - al, c: de - 2 * al, e: e - 4 * k, shift: k }
    };
    debug_assert!(nf.satisfies_invariants());
    Ok(nf)
}

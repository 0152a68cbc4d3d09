//! Newton polygons: the monomial support of a general hypersurface of a
//! given bidegree, and the support-level screens built on it.
//!
//! Base variables all carry `(1,0)`, so a monomial is stored as its base
//! degree plus fiber exponents; every base monomial of that degree is in the
//! support. `Monomial::base_monomials` expands a class when needed.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::bundle::{partition, VarSet, WeightedBundle};
use crate::lattice::{DivClass, Weight};

/// A class of monomials: all base monomials of degree `base_degree`
/// times the fiber monomial `fiber_exps` (in bundle fiber order).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Monomial {
    pub base_degree: u32,
    pub fiber_exps: Vec<u32>,
}

impl Monomial {
    pub fn fiber_support(&self, b: &WeightedBundle) -> VarSet {
        VarSet::of(self.fiber_exps.iter().enumerate().filter(|(_, &e)| e > 0).map(|(k, _)| b.fiber_index(k)))
    }

    /// Some monomial of the class uses only variables in `vars`.
    pub fn supported_in(&self, b: &WeightedBundle, vars: VarSet) -> bool {
        self.fiber_support(b).is_subset(vars) && (self.base_degree == 0 || b.base_set().0 & vars.0 != 0)
    }

    /// Exponent of the variable with bundle index `i` (fiber variables only).
    pub fn fiber_exp(&self, b: &WeightedBundle, i: usize) -> u32 {
        self.fiber_exps[i - b.base_count()]
    }

    pub fn class(&self, b: &WeightedBundle) -> DivClass {
        let mut c = Weight::BASE.checked_scale(self.base_degree as i64).unwrap();
        for (k, &e) in self.fiber_exps.iter().enumerate() {
            c = c + b.fibers()[k].weight.checked_scale(e as i64).unwrap();
        }
        c
    }

    /// Number of base monomials in the class.
    pub fn base_monomial_count(&self, base_count: usize) -> u64 {
        binomial(self.base_degree as u64 + base_count as u64 - 1, base_count as u64 - 1)
    }

    /// Every full exponent vector `(base exps, fiber exps)` of the class.
    pub fn base_monomials(&self, base_count: usize) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        let mut cur = alloc::vec![0u32; base_count];
        fill(&mut out, &mut cur, 0, self.base_degree);
        out.iter_mut().for_each(|v| v.extend_from_slice(&self.fiber_exps));
        out
    }

    pub fn describe(&self, b: &WeightedBundle) -> String {
        let mut s = String::new();
        if self.base_degree > 0 {
            let _ = write!(s, "S{}", self.base_degree);
        }
        for (k, &e) in self.fiber_exps.iter().enumerate() {
            match e {
                0 => {}
                1 => s.push_str(&b.fibers()[k].name),
                _ => {
                    let _ = write!(s, "{}^{}", b.fibers()[k].name, e);
                }
            }
        }
        if s.is_empty() {
            s.push('1');
        }
        s
    }
}

fn fill(out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>, i: usize, rem: u32) {
    if i + 1 == cur.len() {
        cur[i] = rem;
        out.push(cur.clone());
        return;
    }
    for e in (0..=rem).rev() {
        cur[i] = e;
        fill(out, cur, i + 1, rem - e);
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewtonPolygon {
    pub bidegree: DivClass,
    pub monomials: Vec<Monomial>,
}

impl NewtonPolygon {
    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    /// Count of full exponent vectors, not classes.
    pub fn full_size(&self, base_count: usize) -> u64 {
        self.monomials.iter().map(|m| m.base_monomial_count(base_count)).sum()
    }

    /// Fiber parts of the classes with the given base degree.
    pub fn row(&self, base_degree: u32) -> impl Iterator<Item = &Monomial> {
        self.monomials.iter().filter(move |m| m.base_degree == base_degree)
    }
}

/// All exponent vectors of bidegree `class`, sorted.
pub fn enumerate_polygon(b: &WeightedBundle, class: DivClass) -> NewtonPolygon {
    let mut monomials = Vec::new();
    if class.m >= 0 {
        let mut exps = alloc::vec![0u32; b.fibers().len()];
        rec(b, class, 0, class.m, 0, &mut exps, &mut monomials);
    }
    monomials.sort();
    NewtonPolygon { bidegree: class, monomials }
}

fn rec(b: &WeightedBundle, class: DivClass, k: usize, rem_m: i64, l: i64, exps: &mut Vec<u32>, out: &mut Vec<Monomial>) {
    let f = b.fibers();
    if k == f.len() {
        let base = class.l - l;
        if rem_m == 0 && base >= 0 {
            out.push(Monomial { base_degree: base as u32, fiber_exps: exps.clone() });
        }
        return;
    }
    let w = f[k].weight;
    for e in 0..=rem_m / w.m {
        exps[k] = e as u32;
        rec(b, class, k + 1, rem_m - e * w.m, l + e * w.l, exps, out);
    }
    exps[k] = 0;
}

pub fn has_support_in(b: &WeightedBundle, p: &NewtonPolygon, vars: VarSet) -> bool {
    p.monomials.iter().any(|m| m.supported_in(b, vars))
}

/// A fiber variable dividing every monomial. Base variables never do: each
/// class carries every base monomial of its degree.
pub fn is_reducible_general(b: &WeightedBundle, p: &NewtonPolygon) -> Option<usize> {
    if p.is_empty() {
        return None;
    }
    (0..b.fibers().len()).map(|k| b.fiber_index(k)).find(|&i| p.monomials.iter().all(|m| m.fiber_exp(b, i) > 0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PreconditionViolation(pub &'static str);

/// Base degree of the coefficient of `t²`, `t` being the weight-2 variable.
pub fn t2_coefficient_degree(b: &WeightedBundle, p: &NewtonPolygon) -> Result<Option<u32>, PreconditionViolation> {
    if !b.is_dp2_shaped() {
        return Err(PreconditionViolation("t2 coefficient needs a dP2-shaped bundle"));
    }
    let t = (0..b.fibers().len()).find(|&k| b.fibers()[k].weight.m == 2).unwrap();
    Ok(p.monomials.iter().find(|m| m.fiber_exps.iter().enumerate().all(|(k, &e)| if k == t { e == 2 } else { e == 0 })).map(|m| m.base_degree))
}

/// A monomial whose fiber part is `x^k` or `x^k·v` for one other fiber
/// variable `v`, `x` being the first fiber variable.
pub fn has_lin_monomial(b: &WeightedBundle, p: &NewtonPolygon) -> bool {
    let n = b.fibers().len();
    p.monomials.iter().any(|m| (1..n).map(|k| m.fiber_exps[k]).sum::<u32>() <= 1)
}

pub fn restricted_polygon(b: &WeightedBundle, p: &NewtonPolygon, keep: VarSet) -> NewtonPolygon {
    NewtonPolygon { bidegree: p.bidegree, monomials: p.monomials.iter().filter(|m| m.supported_in(b, keep)).cloned().collect() }
}

/// The monomials avoiding the last fiber variable are forms in exactly the
/// two variables of one ray class, so the general restriction splits.
pub fn exceptional_split_check(b: &WeightedBundle, p: &NewtonPolygon) -> bool {
    let last = b.fiber_index(b.fibers().len() - 1);
    let mut supp = VarSet::EMPTY;
    let mut any = false;
    for m in p.monomials.iter().filter(|m| m.fiber_exp(b, last) == 0) {
        any = true;
        supp = supp.union(m.fiber_support(b));
        if m.base_degree > 0 {
            return false;
        }
    }
    any && partition(b).classes.iter().any(|g| g.members.len() == 2 && g.set() == supp)
}

/// Zeros of a general form of degree `d` on `P(w1, w2)`: `d / (w1·w2)` when
/// integral.
pub fn root_count(d: i64, w1: i64, w2: i64) -> Option<i64> {
    let q = w1 * w2;
    if q <= 0 || d < 0 || d % q != 0 {
        None
    } else {
        Some(d / q)
    }
}

//! The ambient rank-2 toric variety: variables, ray partition, cones and
//! anticanonical classes.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::lattice::{det2, ratio_weight, DivClass, Weight};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Var {
    pub name: String,
    pub weight: Weight,
}

/// A set of variable indices (into `WeightedBundle::vars`).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct VarSet(pub u32);

impl VarSet {
    pub const EMPTY: VarSet = VarSet(0);

    pub fn of(idx: impl IntoIterator<Item = usize>) -> VarSet {
        let mut s = VarSet::EMPTY;
        for i in idx {
            s.insert(i);
        }
        s
    }
    pub fn insert(&mut self, i: usize) {
        self.0 |= 1 << i;
    }
    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }
    pub fn is_subset(self, o: VarSet) -> bool {
        self.0 & !o.0 == 0
    }
    pub fn union(self, o: VarSet) -> VarSet {
        VarSet(self.0 | o.0)
    }
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }
    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |&i| self.contains(i))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BundleError {
    TooFewBaseVars,
    TooManyVars,
    EmptyFiber,
    ZeroWeight(String),
    NonPositiveM(String),
    NotDp2Shaped,
}

impl fmt::Display for BundleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BundleError::TooFewBaseVars => f.write_str("need at least 2 base variables"),
            BundleError::TooManyVars => f.write_str("at most 32 variables are supported"),
            BundleError::EmptyFiber => f.write_str("empty fiber variable set"),
            BundleError::ZeroWeight(n) => write!(f, "variable {} has zero weight", n),
            BundleError::NonPositiveM(n) => write!(f, "fiber variable {} needs m >= 1", n),
            BundleError::NotDp2Shaped => f.write_str("fiber m-weights are not (1,1,1,2) over P^1"),
        }
    }
}

/// Base variables of weight `(1,0)` followed by fiber variables sorted by
/// the variable order (ties keep declaration order).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedBundle {
    base_count: usize,
    vars: Vec<Var>,
}

const BASE_NAMES: [&str; 3] = ["u", "v", "w"];

pub fn build_bundle(base_count: usize, fibers: &[(&str, Weight)]) -> Result<WeightedBundle, BundleError> {
    if base_count < 2 {
        return Err(BundleError::TooFewBaseVars);
    }
    if fibers.is_empty() {
        return Err(BundleError::EmptyFiber);
    }
    if base_count + fibers.len() > 32 {
        return Err(BundleError::TooManyVars);
    }
    for (n, w) in fibers {
        if w.is_zero() {
            return Err(BundleError::ZeroWeight(n.to_string()));
        }
        if w.m < 1 {
            return Err(BundleError::NonPositiveM(n.to_string()));
        }
    }
    let mut vars: Vec<Var> = (0..base_count)
        .map(|i| Var {
            name: match BASE_NAMES.get(i) {
                Some(n) if base_count <= 3 => n.to_string(),
                _ => alloc::format!("u{}", i),
            },
            weight: Weight::BASE,
        })
        .collect();
    let mut fib: Vec<Var> = fibers.iter().map(|(n, w)| Var { name: n.to_string(), weight: *w }).collect();
    // m >= 1 everywhere, so the ratio is finite and the sort key total
    fib.sort_by_key(|v| core::cmp::Reverse(ratio_weight(v.weight).unwrap()));
    vars.extend(fib);
    Ok(WeightedBundle { base_count, vars })
}

impl WeightedBundle {
    pub fn base_count(&self) -> usize {
        self.base_count
    }
    pub fn vars(&self) -> &[Var] {
        &self.vars
    }
    pub fn fibers(&self) -> &[Var] {
        &self.vars[self.base_count..]
    }
    pub fn weight(&self, i: usize) -> Weight {
        self.vars[i].weight
    }
    pub fn name(&self, i: usize) -> &str {
        &self.vars[i].name
    }
    pub fn is_base(&self, i: usize) -> bool {
        i < self.base_count
    }
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }
    /// Var index of the `k`-th fiber variable in order.
    pub fn fiber_index(&self, k: usize) -> usize {
        self.base_count + k
    }
    pub fn base_set(&self) -> VarSet {
        VarSet::of(0..self.base_count)
    }
    pub fn all_set(&self) -> VarSet {
        VarSet::of(0..self.vars.len())
    }
    pub fn names(&self, s: VarSet) -> Vec<String> {
        s.iter().map(|i| self.vars[i].name.clone()).collect()
    }

    pub fn is_dp2_shaped(&self) -> bool {
        let mut ms: Vec<i64> = self.fibers().iter().map(|v| v.weight.m).collect();
        ms.sort_unstable();
        self.base_count == 2 && ms == [1, 1, 1, 2]
    }

    pub fn is_dp3_shaped(&self) -> bool {
        self.base_count == 3 && self.fibers().len() == 4 && self.fibers().iter().all(|v| v.weight.m == 1)
    }
}

/// One class `Y_j` of the partition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RayGroup {
    pub ray: Weight,
    pub members: Vec<usize>,
}

impl RayGroup {
    pub fn set(&self) -> VarSet {
        VarSet::of(self.members.iter().copied())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RayPartition {
    pub classes: Vec<RayGroup>,
}

impl RayPartition {
    pub fn last(&self) -> &RayGroup {
        self.classes.last().expect("partition is never empty")
    }
    /// `r` in `Y_0, ..., Y_r`.
    pub fn r(&self) -> usize {
        self.classes.len() - 1
    }
    pub fn is_type_iv(&self) -> bool {
        self.last().members.len() > 1
    }
}

pub fn partition(b: &WeightedBundle) -> RayPartition {
    let mut classes: Vec<RayGroup> = Vec::new();
    for k in 0..b.fibers().len() {
        let i = b.fiber_index(k);
        let ray = b.weight(i).primitive();
        match classes.last_mut() {
            Some(g) if g.ray == ray => g.members.push(i),
            _ => classes.push(RayGroup { ray, members: alloc::vec![i] }),
        }
    }
    RayPartition { classes }
}

/// A 2-dimensional cone `⟨ray_lo, ray_hi⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cone2 {
    pub ray_lo: Weight,
    pub ray_hi: Weight,
}

pub fn eff_cone(b: &WeightedBundle) -> Cone2 {
    Cone2 { ray_lo: Weight::BASE, ray_hi: partition(b).last().ray }
}

/// Generated by the base ray and the second-to-last fiber variable.
pub fn mob_cone(b: &WeightedBundle) -> Cone2 {
    let f = b.fibers();
    let v = if f.len() >= 2 { &f[f.len() - 2] } else { &f[0] };
    Cone2 { ray_lo: Weight::BASE, ray_hi: v.weight.primitive() }
}

/// Strict interior membership: `d = s·lo + t·hi` with `s, t > 0`.
pub fn interior_contains(c: Cone2, d: DivClass) -> bool {
    let den = det2(c.ray_lo, c.ray_hi);
    if den == 0 {
        return false;
    }
    let t = det2(c.ray_lo, d);
    let s = det2(d, c.ray_hi);
    t.signum() == den.signum() && s.signum() == den.signum()
}

/// Whether the rational cone `c2` is contained in `c1`.
pub fn cone_contains(c1: Cone2, c2: Cone2) -> bool {
    let inside = |w: Weight| {
        let den = det2(c1.ray_lo, c1.ray_hi);
        let t = det2(c1.ray_lo, w);
        let s = det2(w, c1.ray_hi);
        den != 0 && t.signum() * den.signum() >= 0 && s.signum() * den.signum() >= 0
    };
    inside(c2.ray_lo) && inside(c2.ray_hi)
}

/// `-K_F`: the sum of all variable weights.
pub fn anticanonical(b: &WeightedBundle) -> DivClass {
    b.vars().iter().map(|v| v.weight).sum()
}

pub fn anticanonical_x(b: &WeightedBundle, class: DivClass) -> DivClass {
    anticanonical(b) - class
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingularLocus {
    /// The weight-2 fiber variable whose complement cuts out the curve.
    pub curve_var: String,
    pub transverse_type: String,
}

/// The curve `Γ_t` where every variable except `t` and the base vanish,
/// with transverse type ½(1,1,1).
pub fn singular_locus_dp2(b: &WeightedBundle) -> Result<SingularLocus, BundleError> {
    if !b.is_dp2_shaped() {
        return Err(BundleError::NotDp2Shaped);
    }
    let t = b.fibers().iter().find(|v| v.weight.m == 2).expect("dp2 shape has an m=2 variable");
    Ok(SingularLocus { curve_var: t.name.clone(), transverse_type: "1/2(1,1,1)".to_string() })
}

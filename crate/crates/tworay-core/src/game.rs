//! The ambient 2-ray game: wall crossings with their δ-tuples, and the final
//! divisorial contraction (Type III) or fibration (Type IV).

use alloc::vec::Vec;
use core::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::bundle::{partition, WeightedBundle};
use crate::lattice::{det2, DivClass, Weight};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepKind {
    Flip,
    Flop,
    Antiflip,
}

impl StepKind {
    pub fn from_sign(s: i64) -> StepKind {
        match s.signum() {
            1 => StepKind::Flip,
            0 => StepKind::Flop,
            _ => StepKind::Antiflip,
        }
    }
    pub fn as_str(self) -> &'static str {
        match self {
            StepKind::Flip => "flip",
            StepKind::Flop => "flop",
            StepKind::Antiflip => "antiflip",
        }
    }
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One wall crossing of the ambient game.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WallStep {
    pub wall_ray: Weight,
    pub crossing_vars: Vec<usize>,
    /// `det2(w_i, wall_ray)` for every variable off the wall, in variable order.
    pub delta: Vec<(usize, i64)>,
    pub kind: StepKind,
    pub contracted_wps: Vec<i64>,
    pub extracted_wps: Vec<i64>,
}

impl WallStep {
    pub fn at(b: &WeightedBundle, ray: Weight) -> WallStep {
        let mut crossing_vars = Vec::new();
        let mut delta = Vec::new();
        for i in 0..b.vars().len() {
            match det2(b.weight(i), ray) {
                0 => crossing_vars.push(i),
                d => delta.push((i, d)),
            }
        }
        let sum: i64 = delta.iter().map(|&(_, d)| d).sum();
        let contracted_wps = delta.iter().filter(|d| d.1 > 0).map(|d| d.1).collect();
        let extracted_wps = delta.iter().filter(|d| d.1 < 0).map(|d| -d.1).collect();
        WallStep { wall_ray: ray, crossing_vars, delta, kind: StepKind::from_sign(sum), contracted_wps, extracted_wps }
    }

    /// The δ-tuple written positives first, then negatives.
    pub fn tuple(&self) -> Vec<i64> {
        let mut t: Vec<i64> = self.delta.iter().filter(|d| d.1 > 0).map(|d| d.1).collect();
        t.extend(self.delta.iter().filter(|d| d.1 < 0).map(|d| d.1));
        t
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EndMap {
    /// Divisorial contraction of the divisor of `contracted_var`.
    TypeIII {
        contracted_var: usize,
        ray: Weight,
        target_weights: Vec<i64>,
        /// Multiplicity of the contracted variable's weight over its ray;
        /// above 1 the image is a further cyclic quotient.
        quotient_order: i64,
        penultimate_ray: Option<Weight>,
        /// Variables with zero center multiplicity; they span the ambient center.
        ambient_center_vars: Vec<usize>,
    },
    /// Fibration over `P(base_weights)`.
    TypeIV { ray: Weight, base_vars: Vec<usize>, base_weights: Vec<i64>, fiber_vars: Vec<usize>, fiber_weights: Vec<i64> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Game {
    pub steps: Vec<WallStep>,
    pub end: EndMap,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GameError {
    NonPositiveWeight(i64),
    NotConic,
    NoDiscriminant,
}

impl fmt::Display for GameError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GameError::NonPositiveWeight(w) => write!(f, "projected weight {} is not positive", w),
            GameError::NotConic => f.write_str("end is not a conic fibration"),
            GameError::NoDiscriminant => f.write_str("conic matrix has no nonzero determinant term"),
        }
    }
}

pub fn two_ray_game(b: &WeightedBundle) -> Game {
    let p = partition(b);
    let r = p.r();
    let last = p.last();
    if last.members.len() == 1 {
        let steps = p.classes[..r.saturating_sub(1)].iter().map(|g| WallStep::at(b, g.ray)).collect();
        let v = last.members[0];
        let d = last.ray;
        let penultimate_ray = if r >= 1 { Some(p.classes[r - 1].ray) } else { None };
        let others = (0..b.vars().len()).filter(|&i| i != v);
        let mut target_weights: Vec<i64> = others.clone().map(|i| det2(b.weight(i), d)).collect();
        target_weights.sort_unstable();
        let ambient_center_vars = match penultimate_ray {
            Some(pr) => others.filter(|&i| det2(b.weight(i), pr) == 0).collect(),
            None => Vec::new(),
        };
        Game {
            steps,
            end: EndMap::TypeIII { contracted_var: v, ray: d, target_weights, quotient_order: b.weight(v).content(), penultimate_ray, ambient_center_vars },
        }
    } else {
        let steps = p.classes[..r].iter().map(|g| WallStep::at(b, g.ray)).collect();
        let d = last.ray;
        let mut base_weights: Vec<i64> = last.members.iter().map(|&i| b.weight(i).content()).collect();
        base_weights.sort_unstable();
        let fiber_vars: Vec<usize> = (0..b.vars().len()).filter(|i| !last.members.contains(i)).collect();
        let mut fiber_weights: Vec<i64> = fiber_vars.iter().map(|&i| det2(b.weight(i), d)).collect();
        fiber_weights.sort_unstable();
        Game { steps, end: EndMap::TypeIV { ray: d, base_vars: last.members.clone(), base_weights, fiber_vars, fiber_weights } }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WpsCheck {
    Wellformed,
    Quotient { order: i64 },
}

/// The end map together with the hypersurface's image degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndTarget {
    pub map: EndMap,
    /// `det2(B, ray)`: image degree (Type III) or fiber degree (Type IV).
    pub degree: i64,
    pub wellformed: WpsCheck,
}

pub fn end_target(b: &WeightedBundle, class: DivClass) -> Result<EndTarget, GameError> {
    let map = two_ray_game(b).end;
    let (ray, ws) = match &map {
        EndMap::TypeIII { ray, target_weights, .. } => (*ray, target_weights),
        EndMap::TypeIV { ray, fiber_weights, .. } => (*ray, fiber_weights),
    };
    if let Some(&w) = ws.iter().find(|&&w| w <= 0) {
        return Err(GameError::NonPositiveWeight(w));
    }
    let wellformed = wellformed_wps(ws);
    Ok(EndTarget { degree: det2(class, ray), wellformed, map })
}

/// After removing the global gcd, any `len - 2` weights sharing a factor give
/// a quotient stratum of codimension at most 2 (`(1,1,2,2,4)` has one of
/// order 2). Returns the largest such factor.
pub fn wellformed_wps(weights: &[i64]) -> WpsCheck {
    let g = weights.iter().fold(0i64, |a, &w| a.gcd(&w));
    if g == 0 {
        return WpsCheck::Wellformed;
    }
    let ws: Vec<i64> = weights.iter().map(|w| w / g).collect();
    let n = ws.len();
    if n < 3 {
        return WpsCheck::Wellformed;
    }
    let mut worst = 1;
    // drop two indices i < j
    for i in 0..n {
        for j in i + 1..n {
            let h = (0..n).filter(|&k| k != i && k != j).fold(0i64, |a, k| a.gcd(&ws[k]));
            worst = worst.max(h);
        }
    }
    if worst > 1 {
        WpsCheck::Quotient { order: worst }
    } else {
        WpsCheck::Wellformed
    }
}

/// Degree of the discriminant of the conic fibration: the generic
/// determinant of the symmetric 3×3 matrix whose `(i, j)` entry has class
/// `B - w_i - w_j`, measured in multiples of the base ray.
pub fn conic_discriminant_degree(b: &WeightedBundle, class: DivClass) -> Result<i64, GameError> {
    let t = end_target(b, class)?;
    let (ray, base_vars, fiber_vars) = match &t.map {
        EndMap::TypeIV { ray, base_vars, fiber_vars, .. } if fiber_vars.len() == 3 && t.degree == 2 => (*ray, base_vars.clone(), fiber_vars.clone()),
        _ => return Err(GameError::NotConic),
    };
    let mults: Vec<i64> = base_vars.iter().map(|&i| b.weight(i).content()).collect();
    let entry = |i: usize, j: usize| -> Option<i64> {
        let c = class - b.weight(fiber_vars[i]) - b.weight(fiber_vars[j]);
        if det2(c, ray) != 0 {
            return None;
        }
        let n = if ray.m != 0 { c.m / ray.m } else { c.l / ray.l };
        (n >= 0 && representable(n, &mults)).then_some(n)
    };
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    PERMS.iter().filter_map(|p| (0..3).map(|i| entry(i, p[i])).sum::<Option<i64>>()).max().ok_or(GameError::NoDiscriminant)
}

/// `n` is a non-negative combination of `gens`.
fn representable(n: i64, gens: &[i64]) -> bool {
    let mut ok = alloc::vec![false; n as usize + 1];
    ok[0] = true;
    for k in 1..=n as usize {
        ok[k] = gens.iter().any(|&g| g as usize <= k && ok[k - g as usize]);
    }
    ok[n as usize]
}

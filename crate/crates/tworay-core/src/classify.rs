//! Restricting the ambient game to the hypersurface, the dP2 screens, and
//! the dP2 classification search.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::bundle::{anticanonical_x, build_bundle, interior_contains, mob_cone, partition, VarSet, WeightedBundle};
use crate::game::{conic_discriminant_degree, end_target, two_ray_game, EndMap, Game, StepKind, WallStep, WpsCheck};
use crate::lattice::{det2, normal_form_dp2, DivClass, LatticeError, NfKind, NormalForm, Weight};
use crate::newton::{
    enumerate_polygon, exceptional_split_check, has_lin_monomial, is_reducible_general, root_count, t2_coefficient_degree, Monomial, NewtonPolygon,
};

/// A wall crossing of the ambient game seen on the hypersurface.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum RestrictedStep {
    /// The hypersurface misses the flipping locus.
    Iso {
        witness: String,
    },
    DisjointFlops {
        count: i64,
        local_type: Vec<i64>,
        kind: StepKind,
        dims: (i64, i64),
    },
    /// One variable is solved for near the locus, leaving a smaller toric step.
    EliminatedFlip {
        eliminated_var: String,
        witness: String,
        local_type: Vec<i64>,
        kind: StepKind,
        dims: (i64, i64),
    },
    /// An ambient locus lies inside the hypersurface; `locus_degree` is
    /// `det2(B, wall)`.
    ContainsLocus {
        delta: Vec<i64>,
        locus_degree: i64,
        kind: StepKind,
        dims: (i64, i64),
    },
    Undetermined {
        reason: String,
    },
}

impl RestrictedStep {
    pub fn kind(&self) -> Option<StepKind> {
        match self {
            RestrictedStep::Iso { .. } | RestrictedStep::Undetermined { .. } => None,
            RestrictedStep::DisjointFlops { kind, .. } | RestrictedStep::EliminatedFlip { kind, .. } | RestrictedStep::ContainsLocus { kind, .. } => {
                Some(*kind)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum EndModel {
    /// Divisorial contraction onto `Y_degree ⊂ P(weights)`, or onto
    /// `P(weights)` itself when `degree` is absent.
    FanoImage { weights: Vec<i64>, degree: Option<i64>, index: Option<i64>, center: Vec<String> },
    /// Fibration with hypersurface fibers `Y_fiber_degree ⊂ P(fiber_weights)`.
    DpFibration { base_weights: Vec<i64>, fiber_weights: Vec<i64>, fiber_degree: i64, dp_degree: Option<i64> },
    /// Fibers are conics (or lines, when `fiber_degree` is 1).
    ConicBundle { base_weights: Vec<i64>, fiber_weights: Vec<i64>, fiber_degree: i64, discriminant: Option<i64> },
}

impl EndModel {
    pub fn is_fibration(&self) -> bool {
        !matches!(self, EndModel::FanoImage { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Link {
    pub steps: Vec<RestrictedStep>,
    pub end: EndModel,
    /// Number of ½(1,1,1) points (dP2 only).
    pub sing: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    NoSections,
    Reducible { witness: String },
    NotTerminal { lemma: String },
    PicardTooBig { trigger: String },
    NoFLink { reason: String },
    NotExtremalEnd,
    QuotientImage { reason: String },
    Undetermined { reason: String },
    Link(Link),
}

impl Verdict {
    pub fn is_link(&self) -> bool {
        matches!(self, Verdict::Link(_))
    }
    pub fn as_link(&self) -> Option<&Link> {
        match self {
            Verdict::Link(l) => Some(l),
            _ => None,
        }
    }
    /// Short tag naming the verdict and its trigger.
    pub fn tag(&self) -> String {
        match self {
            Verdict::NoSections => "no_sections".into(),
            Verdict::Reducible { .. } => "reducible".into(),
            Verdict::NotTerminal { lemma } => format!("not_terminal:{}", lemma),
            Verdict::PicardTooBig { trigger } => format!("picard_too_big:{}", trigger),
            Verdict::NoFLink { reason } => format!("no_f_link:{}", reason),
            Verdict::NotExtremalEnd => "not_extremal_end".into(),
            Verdict::QuotientImage { .. } => "quotient_image".into(),
            Verdict::Undetermined { .. } => "undetermined".into(),
            Verdict::Link(_) => "link".into(),
        }
    }
}

/// Variable index with its pairing against a wall.
type Paired = Vec<(usize, i64)>;

fn sign_split(b: &WeightedBundle, d: Weight) -> (Paired, VarSet, Paired) {
    let (mut pos, mut wall, mut neg) = (Vec::new(), VarSet::EMPTY, Vec::new());
    for i in 0..b.vars().len() {
        match det2(b.weight(i), d) {
            0 => wall.insert(i),
            x if x > 0 => pos.push((i, x)),
            x => neg.push((i, x)),
        }
    }
    (pos, wall, neg)
}

fn tuple(pos: &[(usize, i64)], neg: &[(usize, i64)], skip: Option<usize>) -> Vec<i64> {
    pos.iter().chain(neg).filter(|v| Some(v.0) != skip).map(|v| v.1).collect()
}

/// The restriction calculus at one wall.
pub fn restrict_step(b: &WeightedBundle, p: &NewtonPolygon, step: &WallStep) -> RestrictedStep {
    let d = step.wall_ray;
    let class = p.bidegree;
    let (pos, wall, neg) = sign_split(b, d);
    let big_d = det2(class, d);
    let kx = det2(anticanonical_x(b, class), d);
    let full = tuple(&pos, &neg, None);
    let (np, nn, nw) = (pos.len() as i64, neg.len() as i64, wall.len() as i64);
    let contains = |dims| RestrictedStep::ContainsLocus { delta: full.clone(), locus_degree: big_d, kind: StepKind::from_sign(kx), dims };

    if big_d == 0 {
        let Some(pure) = p.monomials.iter().find(|m| m.supported_in(b, wall)) else {
            return contains((np + nw - 2, nn + nw - 2));
        };
        return match wall.len() {
            1 => RestrictedStep::Iso { witness: pure.describe(b) },
            2 => {
                let q: Vec<i64> = wall.iter().map(|i| b.weight(i).content()).collect();
                let dw = class.m / d.m;
                match root_count(dw, q[0], q[1]) {
                    Some(count) => {
                        RestrictedStep::DisjointFlops { count, kind: StepKind::from_sign(full.iter().sum()), local_type: full, dims: (np - 1, nn - 1) }
                    }
                    None => RestrictedStep::Undetermined { reason: format!("non-integral root count {}/{}", dw, q[0] * q[1]) },
                }
            }
            n => RestrictedStep::Undetermined { reason: format!("flopping locus over a {}-variable wall", n) },
        };
    }

    let side = if big_d < 0 { &neg } else { &pos };
    if wall.len() == 1 {
        let linear_in = |v: usize| -> Option<&Monomial> {
            p.monomials.iter().find(|m| {
                if b.is_base(v) {
                    m.base_degree == 1 && m.fiber_support(b).is_subset(wall)
                } else {
                    m.base_degree == 0 && m.fiber_support(b).is_subset(wall.union(VarSet::of([v]))) && m.fiber_exp(b, v) == 1
                }
            })
        };
        let cands = side.iter().filter(|v| v.1 == big_d).filter_map(|v| linear_in(v.0).map(|m| (v.0, m)));
        // fiber variables first, then variable order
        if let Some((v, m)) = cands.min_by_key(|(v, _)| (b.is_base(*v), *v)) {
            let local_type = tuple(&pos, &neg, Some(v));
            let (lp, ln) = (local_type.iter().filter(|&&x| x > 0).count(), local_type.iter().filter(|&&x| x < 0).count());
            return RestrictedStep::EliminatedFlip {
                eliminated_var: b.name(v).to_string(),
                witness: m.describe(b),
                kind: StepKind::from_sign(local_type.iter().sum()),
                local_type,
                dims: (lp as i64 - 1, ln as i64 - 1),
            };
        }
    }
    // the side opposite the sign of D lies in X, the other is cut down by one
    let (lp, ln) = (np + nw - 2, nn + nw - 2);
    contains(if big_d < 0 { (lp, ln - 1) } else { (lp - 1, ln) })
}

/// `D (Σw - D)² / Πw` for a surface `Y_D ⊂ P(w0..w3)`.
pub fn dp_degree(weights: &[i64], d: i64) -> Option<i64> {
    if weights.len() != 4 {
        return None;
    }
    let s: i64 = weights.iter().sum();
    let num = d * (s - d) * (s - d);
    let den: i64 = weights.iter().product();
    (num % den == 0).then_some(num / den)
}

/// The last step of the game on the hypersurface, or the reason it fails.
pub fn end_model(b: &WeightedBundle, class: DivClass) -> Result<EndModel, Verdict> {
    let t = end_target(b, class).map_err(|e| Verdict::NoFLink { reason: e.to_string() })?;
    let kx = anticanonical_x(b, class);
    match t.map {
        EndMap::TypeIII { ray, target_weights, quotient_order, penultimate_ray, ambient_center_vars, contracted_var } => {
            let Some(pr) = penultimate_ray else {
                return Err(Verdict::NoFLink { reason: "no penultimate wall".into() });
            };
            let big_d = det2(class, pr);
            let on_wall = (0..b.vars().len()).filter(|&i| i != contracted_var && det2(b.weight(i), pr) == 0).count();
            let positive = (0..b.vars().len()).filter(|&i| i != contracted_var && det2(b.weight(i), pr) != 0).count();
            if big_d < 0 {
                return Err(Verdict::NoFLink { reason: "end:exceptional divisor reducible".into() });
            }
            if big_d == 0 && on_wall == 1 {
                return Err(Verdict::NoFLink { reason: "end:misses exceptional divisor".into() });
            }
            if big_d > 0 && positive < 3 {
                return Err(Verdict::NoFLink { reason: "end:finite on exceptional divisor".into() });
            }
            if let WpsCheck::Quotient { order } = t.wellformed {
                return Err(Verdict::QuotientImage { reason: format!("target not well-formed (order {})", order) });
            }
            if quotient_order > 1 {
                return Err(Verdict::QuotientImage { reason: format!("further 1/{} quotient", quotient_order) });
            }
            Ok(EndModel::FanoImage {
                weights: target_weights,
                degree: Some(t.degree),
                index: Some(det2(kx, ray)),
                center: b.names(VarSet::of(ambient_center_vars)),
            })
        }
        EndMap::TypeIV { base_weights, fiber_weights, .. } => match fiber_weights.len() {
            2 if t.degree == 1 => Ok(EndModel::FanoImage { weights: base_weights, degree: None, index: None, center: Vec::new() }),
            2 => Err(Verdict::NoFLink { reason: format!("end:P1 fibres cut in degree {}", t.degree) }),
            3 if t.degree <= 2 => {
                let discriminant = if t.degree == 2 { conic_discriminant_degree(b, class).ok() } else { None };
                Ok(EndModel::ConicBundle { base_weights, fiber_weights, fiber_degree: t.degree, discriminant })
            }
            3 => Err(Verdict::NoFLink { reason: format!("end:plane curve fibres of degree {}", t.degree) }),
            _ => Ok(EndModel::DpFibration { dp_degree: dp_degree(&fiber_weights, t.degree), base_weights, fiber_weights, fiber_degree: t.degree }),
        },
    }
}

/// Everything computed for one dP2 input.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dp2Analysis {
    pub weights: [i64; 4],
    pub e: i64,
    pub nf: NormalForm,
    pub bundle: WeightedBundle,
    pub class: DivClass,
    pub polygon: NewtonPolygon,
    pub game: Game,
    pub verdict: Verdict,
}

/// The bundle and hypersurface class of a dP2 normal form.
pub fn dp2_bundle(nf: &NormalForm) -> (WeightedBundle, DivClass) {
    let (a, b, c) = (nf.a, nf.b, nf.c);
    let w = Weight::new;
    let fibers = match nf.kind {
        NfKind::I => [("x", w(0, 1)), ("y", w(-a, 1)), ("z", w(-b, 1)), ("t", w(-c, 2))],
        NfKind::II => [("x", w(-a, 1)), ("y", w(-b, 1)), ("z", w(-c, 1)), ("t", w(0, 2))],
        NfKind::III => [("x", w(-a, 1)), ("y", w(-b, 1)), ("z", w(-c, 1)), ("t", w(-1, 2))],
    };
    (build_bundle(2, &fibers).expect("normal forms give valid bundles"), Weight::new(-nf.e, 4))
}

/// Terminality fails from the sign of `e` alone.
pub fn screen_esign(nf: &NormalForm) -> Result<(), Verdict> {
    let bad = match nf.kind {
        NfKind::I => nf.e > 2 * nf.c,
        NfKind::II => nf.e > 0,
        NfKind::III => nf.e > 2,
    };
    if bad {
        Err(Verdict::NotTerminal { lemma: "esign".into() })
    } else {
        Ok(())
    }
}

/// Whether the first step of the ambient game can restrict to X.
pub fn screen_first_step(b: &WeightedBundle, p: &NewtonPolygon) -> Result<(), Verdict> {
    let part = partition(b);
    let y0 = &part.classes[0];
    let omega = det2(p.bidegree, y0.ray);
    let no_link = |r: &str| Err(Verdict::NoFLink { reason: format!("first-step:{}", r) });
    match y0.members.len() {
        4 if omega == 0 => no_link("product"),
        4 if omega > 1 => no_link("cover"),
        3 => {
            let x4 = b.weight(part.classes[1].members[0]);
            let shifted = -(x4.l - y0.ray.l * x4.m);
            if omega < 0 {
                Err(Verdict::Reducible { witness: "first-step".into() })
            } else if omega > 0 {
                no_link("surface image")
            } else if shifted > 1 {
                Err(Verdict::QuotientImage { reason: format!("first-step: 1/{} quotient", shifted) })
            } else {
                Ok(())
            }
        }
        2 if omega < 0 => Err(Verdict::PicardTooBig { trigger: "first-step".into() }),
        2 if omega > 0 => no_link("positive omega"),
        1 if !p.monomials.iter().any(|m| m.base_degree == 0) => no_link("no pure fiber monomial"),
        _ => Ok(()),
    }
}

pub fn screen_interior(b: &WeightedBundle, class: DivClass) -> Result<(), Verdict> {
    if interior_contains(mob_cone(b), anticanonical_x(b, class)) {
        Ok(())
    } else {
        Err(Verdict::NotExtremalEnd)
    }
}

pub fn screen_picard(b: &WeightedBundle, p: &NewtonPolygon) -> Result<(), Verdict> {
    let n = b.fibers().len();
    let (x3, x4) = (b.fiber_index(n - 2), b.fiber_index(n - 1));
    if p.monomials.iter().all(|m| m.fiber_exp(b, x3) > 0 || m.fiber_exp(b, x4) > 0) {
        return Err(Verdict::PicardTooBig { trigger: "x3x4".into() });
    }
    if !partition(b).is_type_iv() && exceptional_split_check(b, p) {
        return Err(Verdict::PicardTooBig { trigger: "split".into() });
    }
    Ok(())
}

/// Emptiness and the common-factor test, shared by both families.
pub fn screen_polygon(b: &WeightedBundle, p: &NewtonPolygon) -> Result<(), Verdict> {
    if p.is_empty() {
        return Err(Verdict::NoSections);
    }
    if let Some(v) = is_reducible_general(b, p) {
        return Err(Verdict::Reducible { witness: b.name(v).to_string() });
    }
    Ok(())
}

/// Restricts every ambient step. A step whose locus lies inside X is kept
/// only when `allow_contained` is set.
pub fn restrict_game(b: &WeightedBundle, p: &NewtonPolygon, game: &Game, allow_contained: bool) -> Result<Vec<RestrictedStep>, Verdict> {
    let mut out = Vec::new();
    for (i, s) in game.steps.iter().enumerate() {
        let r = restrict_step(b, p, s);
        match &r {
            RestrictedStep::Undetermined { reason } => return Err(Verdict::Undetermined { reason: format!("step {}: {}", i + 1, reason) }),
            RestrictedStep::ContainsLocus { .. } if !allow_contained => return Err(Verdict::NoFLink { reason: format!("step {}: locus inside X", i + 1) }),
            _ => out.push(r),
        }
    }
    Ok(out)
}

fn run_dp2(nf: &NormalForm, b: &WeightedBundle, class: DivClass, p: &NewtonPolygon, game: &Game) -> Result<Link, Verdict> {
    screen_polygon(b, p)?;
    screen_esign(nf)?;
    if nf.kind == NfKind::I && nf.a > 0 && nf.b > 0 && nf.c > 0 && !has_lin_monomial(b, p) {
        return Err(Verdict::NotTerminal { lemma: "lin".into() });
    }
    screen_first_step(b, p)?;
    screen_picard(b, p)?;
    screen_interior(b, class)?;
    let steps = restrict_game(b, p, game, false)?;
    let end = end_model(b, class)?;
    let sing = t2_coefficient_degree(b, p).ok().flatten();
    Ok(Link { steps, end, sing })
}

pub fn analyze_dp2(weights: [i64; 4], e: i64) -> Result<Dp2Analysis, LatticeError> {
    let nf = normal_form_dp2(weights, e)?;
    let (bundle, class) = dp2_bundle(&nf);
    let polygon = enumerate_polygon(&bundle, class);
    let game = two_ray_game(&bundle);
    let verdict = match run_dp2(&nf, &bundle, class, &polygon, &game) {
        Ok(l) => Verdict::Link(l),
        Err(v) => v,
    };
    Ok(Dp2Analysis { weights, e, nf, bundle, class, polygon, game, verdict })
}

pub fn classify_dp2(weights: [i64; 4], e: i64) -> Result<Verdict, LatticeError> {
    analyze_dp2(weights, e).map(|a| a.verdict)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dp2Bounds {
    /// Upper bound for each of α, β, γ, δ.
    pub w_max: i64,
    pub e_min: i64,
    pub e_max: i64,
}

impl Default for Dp2Bounds {
    fn default() -> Self {
        Dp2Bounds { w_max: 7, e_min: -2, e_max: 14 }
    }
}

/// Inputs of the search grid in lexicographic order, one per normal form
/// (zero shift).
pub fn dp2_grid(bounds: &Dp2Bounds) -> Vec<([i64; 4], i64)> {
    let mut out = Vec::new();
    let n = bounds.w_max;
    for al in 0..=n {
        for be in al..=n {
            for ga in be..=n {
                for de in 0..=n {
                    for e in bounds.e_min..=bounds.e_max {
                        if normal_form_dp2([al, be, ga, de], e).map(|nf| nf.shift == 0).unwrap_or(false) {
                            out.push(([al, be, ga, de], e));
                        }
                    }
                }
            }
        }
    }
    out
}

pub fn search_dp2(bounds: &Dp2Bounds) -> Vec<(([i64; 4], i64), Verdict)> {
    dp2_grid(bounds).into_iter().map(|(w, e)| ((w, e), classify_dp2(w, e).expect("grid inputs are normalised"))).collect()
}

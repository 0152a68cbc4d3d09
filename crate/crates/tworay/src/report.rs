//! The per-input report and its canonical JSON form.

use std::fmt;

use serde::{Deserialize, Serialize};
use tworay_core::bundle::{anticanonical_x, eff_cone, mob_cone, Cone2, WeightedBundle};
use tworay_core::classify::Dp2Analysis;
use tworay_core::dp3::Dp3Analysis;
use tworay_core::game::{EndMap, Game};
use tworay_core::newton::{has_lin_monomial, is_reducible_general, t2_coefficient_degree, NewtonPolygon};
use tworay_core::{DivClass, EndModel, NormalForm, RestrictedStep, StepKind, Verdict, Weight};

pub const SCHEMA: &str = "linkreport-1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Dp2,
    Dp3,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Dp2 => "dp2",
            Family::Dp3 => "dp3",
        })
    }
}

/// `weights` is `(α,β,γ,δ)` with `e` for dP2, `(a,b,c)` with `d` for dP3.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Params {
    pub weights: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<i64>,
}

impl Params {
    pub fn dp2(w: [i64; 4], e: i64) -> Params {
        Params { weights: w.to_vec(), e: Some(e), d: None }
    }
    pub fn dp3(a: i64, b: i64, c: i64, d: i64) -> Params {
        Params { weights: vec![a, b, c], e: None, d: Some(d) }
    }
    /// Weights followed by `e` or `d`; the canonical sort key.
    pub fn flat(&self) -> Vec<i64> {
        let mut v = self.weights.clone();
        v.extend(self.e.or(self.d));
        v
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w: Vec<String> = self.weights.iter().map(|x| x.to_string()).collect();
        write!(f, "({};{})", w.join(","), self.e.or(self.d).unwrap_or(0))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarReport {
    pub name: String,
    pub weight: Weight,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleSummary {
    pub variables: Vec<VarReport>,
    pub class: DivClass,
    /// `-K_X`
    pub anticanonical: DivClass,
    pub mobile_cone: Cone2,
    pub effective_cone: Cone2,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolygonSummary {
    /// Monomial classes, base variables collapsed to their total degree.
    pub size: usize,
    /// Monomials with the base variables expanded.
    pub full_size: u64,
    /// `[base degree, fiber exponents...]`, sorted.
    pub support: Vec<Vec<u32>>,
    pub monomials: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t2_coefficient_degree: Option<u32>,
    pub lin_monomial: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reducible_by: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmbientStep {
    pub wall: Weight,
    pub crossing: Vec<String>,
    pub delta: Vec<i64>,
    pub kind: StepKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "map", rename_all = "snake_case")]
pub enum AmbientEnd {
    Contraction { ray: Weight, contracted: String, target_weights: Vec<i64>, quotient_order: i64 },
    Fibration { ray: Weight, base_weights: Vec<i64>, fiber_weights: Vec<i64> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictSummary {
    /// Variant name in snake case.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkReport {
    pub schema: String,
    pub family: Family,
    pub params: Params,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normal_form: Option<NormalForm>,
    pub bundle: BundleSummary,
    pub polygon: PolygonSummary,
    pub ambient_steps: Vec<AmbientStep>,
    pub ambient_end: AmbientEnd,
    pub restricted_steps: Vec<RestrictedStep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end_model: Option<EndModel>,
    /// Number of ½(1,1,1) points on a dP2 link.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sing: Option<u32>,
    pub verdict: VerdictSummary,
    pub tags: Vec<String>,
    pub anomalies: Vec<String>,
}

pub fn summarize_verdict(v: &Verdict) -> VerdictSummary {
    let (kind, detail) = match v {
        Verdict::NoSections => ("no_sections", None),
        Verdict::Reducible { witness } => ("reducible", Some(witness)),
        Verdict::NotTerminal { lemma } => ("not_terminal", Some(lemma)),
        Verdict::PicardTooBig { trigger } => ("picard_too_big", Some(trigger)),
        Verdict::NoFLink { reason } => ("no_f_link", Some(reason)),
        Verdict::NotExtremalEnd => ("not_extremal_end", None),
        Verdict::QuotientImage { reason } => ("quotient_image", Some(reason)),
        Verdict::Undetermined { reason } => ("undetermined", Some(reason)),
        Verdict::Link(_) => ("link", None),
    };
    VerdictSummary { kind: kind.into(), detail: detail.cloned() }
}

fn polygon_summary(b: &WeightedBundle, p: &NewtonPolygon) -> PolygonSummary {
    let mut rows: Vec<(Vec<u32>, String)> = p
        .monomials
        .iter()
        .map(|m| {
            let mut v = vec![m.base_degree];
            v.extend(&m.fiber_exps);
            (v, m.describe(b))
        })
        .collect();
    rows.sort();
    let (support, monomials) = rows.into_iter().unzip();
    PolygonSummary {
        size: p.monomials.len(),
        full_size: p.full_size(b.base_count()),
        support,
        monomials,
        t2_coefficient_degree: t2_coefficient_degree(b, p).ok().flatten(),
        lin_monomial: has_lin_monomial(b, p),
        reducible_by: is_reducible_general(b, p).map(|i| b.name(i).to_string()),
    }
}

fn bundle_summary(b: &WeightedBundle, class: DivClass) -> BundleSummary {
    BundleSummary {
        variables: b.vars().iter().map(|v| VarReport { name: v.name.clone(), weight: v.weight }).collect(),
        class,
        anticanonical: anticanonical_x(b, class),
        mobile_cone: mob_cone(b),
        effective_cone: eff_cone(b),
    }
}

fn ambient(b: &WeightedBundle, g: &Game) -> (Vec<AmbientStep>, AmbientEnd) {
    let steps = g
        .steps
        .iter()
        .map(|s| AmbientStep { wall: s.wall_ray, crossing: s.crossing_vars.iter().map(|&i| b.name(i).to_string()).collect(), delta: s.tuple(), kind: s.kind })
        .collect();
    let end = match &g.end {
        EndMap::TypeIII { contracted_var, ray, target_weights, quotient_order, .. } => AmbientEnd::Contraction {
            ray: *ray,
            contracted: b.name(*contracted_var).to_string(),
            target_weights: target_weights.clone(),
            quotient_order: *quotient_order,
        },
        EndMap::TypeIV { ray, base_weights, fiber_weights, .. } => {
            AmbientEnd::Fibration { ray: *ray, base_weights: base_weights.clone(), fiber_weights: fiber_weights.clone() }
        }
    };
    (steps, end)
}

#[allow(clippy::too_many_arguments)]
fn build(
    family: Family,
    params: Params,
    normal_form: Option<NormalForm>,
    b: &WeightedBundle,
    class: DivClass,
    p: &NewtonPolygon,
    g: &Game,
    v: &Verdict,
) -> LinkReport {
    let (ambient_steps, ambient_end) = ambient(b, g);
    let mut tags = vec![v.tag()];
    let (restricted_steps, end_model, sing) = match v {
        Verdict::Link(l) => {
            tags.push(if l.end.is_fibration() { "type_iv".into() } else { "type_iii".into() });
            (l.steps.clone(), Some(l.end.clone()), l.sing)
        }
        _ => (Vec::new(), None, None),
    };
    LinkReport {
        schema: SCHEMA.into(),
        family,
        params,
        normal_form,
        bundle: bundle_summary(b, class),
        polygon: polygon_summary(b, p),
        ambient_steps,
        ambient_end,
        restricted_steps,
        end_model,
        sing,
        verdict: summarize_verdict(v),
        tags,
        anomalies: Vec::new(),
    }
}

impl LinkReport {
    pub fn from_dp2(a: &Dp2Analysis) -> LinkReport {
        build(Family::Dp2, Params::dp2(a.weights, a.e), Some(a.nf), &a.bundle, a.class, &a.polygon, &a.game, &a.verdict)
    }

    pub fn from_dp3(a: &Dp3Analysis) -> LinkReport {
        let p = a.params;
        build(Family::Dp3, Params::dp3(p.a, p.b, p.c, p.d), None, &a.bundle, a.class, &a.polygon, &a.game, &a.verdict)
    }

    pub fn is_link(&self) -> bool {
        self.verdict.kind == "link"
    }

    pub fn to_canonical_json(&self) -> String {
        canonical_json(self)
    }
}

/// Pretty JSON with object keys sorted, so equal values give equal bytes.
pub fn canonical_json<T: Serialize>(v: &T) -> String {
    // serde_json's default map is ordered by key
    let value = serde_json::to_value(v).expect("reports serialize");
    let mut s = serde_json::to_string_pretty(&value).expect("values serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use tworay_core::{analyze_dp2, analyze_dp3, DP3Params};

    #[test]
    fn round_trip() {
        let reports = [
            LinkReport::from_dp2(&analyze_dp2([0, 1, 2, 4], 4).unwrap()),
            LinkReport::from_dp2(&analyze_dp2([0, 1, 1, 4], 4).unwrap()),
            LinkReport::from_dp3(&analyze_dp3(DP3Params::new(1, 1, 3, -2))),
            LinkReport::from_dp3(&analyze_dp3(DP3Params::new(0, 0, 0, 1))),
        ];
        for r in reports {
            let s = r.to_canonical_json();
            let back: LinkReport = serde_json::from_str(&s).unwrap();
            assert_eq!(back, r);
            assert_eq!(back.to_canonical_json(), s);
        }
    }

    #[test]
    fn keys_sorted() {
        let r = LinkReport::from_dp2(&analyze_dp2([1, 1, 1, 1], 2).unwrap());
        let s = r.to_canonical_json();
        let top: Vec<&str> = s.lines().filter(|l| l.starts_with("  \"")).map(|l| l.trim()).collect();
        let mut sorted = top.clone();
        sorted.sort();
        assert_eq!(top, sorted);
    }

    #[test]
    fn row13_report() {
        let r = LinkReport::from_dp2(&analyze_dp2([0, 1, 2, 4], 4).unwrap());
        assert!(r.is_link());
        assert!(matches!(&r.end_model, Some(EndModel::DpFibration { base_weights, dp_degree: Some(2), .. }) if base_weights == &vec![1, 2]));
        assert_eq!(r.polygon.t2_coefficient_degree, Some(4));
        assert_eq!(r.params.to_string(), "(0,1,2,4;4)");
    }
}

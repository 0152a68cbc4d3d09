//! Cubic surface fibrations over P²: hypersurfaces of class `(d, 3)` in the
//! bundle with fiber weights `x(0,1), y(-a,1), z(-b,1), t(-c,1)`.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::bundle::{build_bundle, WeightedBundle};
use crate::classify::{end_model, restrict_game, screen_interior, screen_polygon, Link, Verdict};
use crate::game::{two_ray_game, Game};
use crate::lattice::{DivClass, Weight};
use crate::newton::{enumerate_polygon, NewtonPolygon};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DP3Params {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl DP3Params {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        DP3Params { a, b, c, d }
    }
    pub fn is_normalised(&self) -> bool {
        0 <= self.a && self.a <= self.b && self.b <= self.c
    }
    pub fn as_array(&self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }
}

pub fn dp3_bundle(p: &DP3Params) -> (WeightedBundle, DivClass) {
    let w = Weight::new;
    let fibers = [("x", w(0, 1)), ("y", w(-p.a, 1)), ("z", w(-p.b, 1)), ("t", w(-p.c, 1))];
    (build_bundle(3, &fibers).expect("dP3 fibers are valid"), w(p.d, 3))
}

/// The case split on the sign of `d`.
pub fn screen_dp3(p: &DP3Params, b: &WeightedBundle, poly: &NewtonPolygon) -> Result<(), Verdict> {
    screen_polygon(b, poly)?;
    if p.d == 0 && p.a == 0 && p.b == 0 && p.c == 0 {
        return Err(Verdict::PicardTooBig { trigger: "product".into() });
    }
    if p.d < 0 {
        if 3 * p.a < -p.d && -p.d <= 3 * p.b {
            return Err(Verdict::PicardTooBig { trigger: "3a<-d<=3b".into() });
        }
        // x²·L for a single linear L in y, z, t, with a coefficient of degree d + a|b|c >= 0
        let x = b.fiber_index(0);
        let has = poly.monomials.iter().any(|m| m.fiber_exp(b, x) == 2 && m.fiber_exps.iter().sum::<u32>() == 3);
        if !has {
            return Err(Verdict::NotTerminal { lemma: "x2L".into() });
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dp3Analysis {
    pub params: DP3Params,
    pub bundle: WeightedBundle,
    pub class: DivClass,
    pub polygon: NewtonPolygon,
    pub game: Game,
    pub verdict: Verdict,
}

fn run(p: &DP3Params, b: &WeightedBundle, class: DivClass, poly: &NewtonPolygon, game: &Game) -> Result<Link, Verdict> {
    screen_dp3(p, b, poly)?;
    screen_interior(b, class)?;
    let steps = restrict_game(b, poly, game, true)?;
    let end = end_model(b, class)?;
    Ok(Link { steps, end, sing: None })
}

pub fn analyze_dp3(params: DP3Params) -> Dp3Analysis {
    let (bundle, class) = dp3_bundle(&params);
    let polygon = enumerate_polygon(&bundle, class);
    let game = two_ray_game(&bundle);
    let verdict = match run(&params, &bundle, class, &polygon, &game) {
        Ok(l) => Verdict::Link(l),
        Err(v) => v,
    };
    Dp3Analysis { params, bundle, class, polygon, game, verdict }
}

pub fn classify_dp3(params: DP3Params) -> Verdict {
    analyze_dp3(params).verdict
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dp3Bounds {
    pub c_max: i64,
    pub d_min: i64,
    pub d_max: i64,
}

impl Default for Dp3Bounds {
    fn default() -> Self {
        Dp3Bounds { c_max: 6, d_min: -6, d_max: 2 }
    }
}

pub fn dp3_grid(bounds: &Dp3Bounds) -> Vec<DP3Params> {
    let mut out = Vec::new();
    for a in 0..=bounds.c_max {
        for b in a..=bounds.c_max {
            for c in b..=bounds.c_max {
                for d in bounds.d_min..=bounds.d_max {
                    out.push(DP3Params::new(a, b, c, d));
                }
            }
        }
    }
    out
}

pub fn search_dp3(bounds: &Dp3Bounds) -> Vec<(DP3Params, Verdict)> {
    dp3_grid(bounds).into_iter().map(|p| (p, classify_dp3(p))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{EndModel, RestrictedStep};
    use crate::game::StepKind;
    use alloc::vec;

    fn p(a: i64, b: i64, c: i64, d: i64) -> DP3Params {
        DP3Params::new(a, b, c, d)
    }

    #[test]
    fn screens() {
        assert_eq!(classify_dp3(p(0, 0, 0, 0)), Verdict::PicardTooBig { trigger: "product".into() });
        assert_eq!(classify_dp3(p(1, 1, 1, -2)), Verdict::NotTerminal { lemma: "x2L".into() });
        let (b, class) = dp3_bundle(&p(2, 2, 5, -5));
        assert!(screen_dp3(&p(2, 2, 5, -5), &b, &enumerate_polygon(&b, class)).is_ok());
        assert_eq!(classify_dp3(p(0, 0, 2, -4)), Verdict::Reducible { witness: "t".into() });
        assert_eq!(classify_dp3(p(0, 0, 1, -4)), Verdict::NoSections);
    }

    #[test]
    fn links() {
        let Verdict::Link(l) = classify_dp3(p(2, 2, 3, -3)) else { panic!() };
        assert!(matches!(&l.end, EndModel::FanoImage { weights, degree: Some(6), .. } if weights == &vec![1, 1, 1, 1, 1, 3]));

        let Verdict::Link(l) = classify_dp3(p(1, 2, 3, -3)) else { panic!() };
        assert!(matches!(&l.steps[0], RestrictedStep::EliminatedFlip { eliminated_var, local_type, kind: StepKind::Flop, .. }
            if eliminated_var == "t" && local_type == &vec![1, 1, 1, -1, -2]));
        assert!(matches!(&l.steps[1], RestrictedStep::Iso { .. }));
        assert!(matches!(&l.end, EndModel::FanoImage { weights, degree: Some(6), .. } if weights == &vec![1, 1, 1, 1, 2, 3]));

        let Verdict::Link(l) = classify_dp3(p(1, 2, 3, -2)) else { panic!() };
        assert!(matches!(&l.steps[0], RestrictedStep::EliminatedFlip { eliminated_var, local_type, kind: StepKind::Antiflip, .. }
            if eliminated_var == "z" && local_type == &vec![1, 1, 1, -1, -3]));
        assert_eq!(l.steps[1].kind(), Some(StepKind::Flop));
        assert!(matches!(&l.end, EndModel::FanoImage { degree: Some(7), .. }));

        let Verdict::Link(l) = classify_dp3(p(0, 0, 0, 1)) else { panic!() };
        assert!(matches!(&l.end, EndModel::ConicBundle { base_weights, fiber_degree: 1, discriminant: None, .. } if base_weights == &vec![1, 1, 1, 1]));
    }

    #[test]
    fn suffix_notation() {
        let Verdict::Link(l) = classify_dp3(p(1, 1, 3, -2)) else { panic!() };
        assert_eq!(l.steps[0], RestrictedStep::ContainsLocus { delta: vec![1, 1, 1, -1, -1, -3], locus_degree: -2, kind: StepKind::Flop, dims: (2, 1) });
    }

    #[test]
    fn default_search_has_40_links() {
        let links: Vec<_> = search_dp3(&Dp3Bounds::default()).into_iter().filter(|(_, v)| v.is_link()).map(|(q, _)| q).collect();
        assert_eq!(links.len(), 40);
        assert!(links.contains(&p(1, 2, 3, -2)));
    }

    #[test]
    fn interior_equivalence() {
        for q in dp3_grid(&Dp3Bounds::default()) {
            let (b, class) = dp3_bundle(&q);
            assert_eq!(screen_interior(&b, class).is_ok(), q.a + q.c < 3 - q.d, "{:?}", q);
        }
    }
}

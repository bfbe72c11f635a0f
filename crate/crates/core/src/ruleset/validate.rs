//! Exact dissection certificates. A rule is valid when, for every
//! prototile T_i, the placed children (a) move by genuine isometries,
//! (b) stay inside zeta*T_i, (c) have pairwise disjoint interiors and
//! (d) have areas summing to c * area(T_i). Together these certify an
//! exact tiling of the inflated tile.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::geometry::{ConvexPolygon, Location};
use crate::numberfield::{ExtScalar, GScalar};

use super::{CountMatrix, RuleSet};

#[derive(Clone, Debug)]
pub struct TileReport {
    pub label: String,
    pub congruent_ok: bool,
    pub containment_ok: bool,
    pub disjoint_ok: bool,
    pub area_ok: bool,
    pub counts: Vec<u64>,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub tiles: Vec<TileReport>,
    pub matrix: CountMatrix,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.tiles
            .iter()
            .all(|t| t.congruent_ok && t.containment_ok && t.disjoint_ok && t.area_ok)
    }

    pub fn failure_lines(&self) -> Vec<String> {
        self.tiles.iter().flat_map(|t| t.failures.clone()).collect()
    }
}

pub fn validate_rule(rule: &RuleSet) -> ValidationReport {
    let one = ExtScalar::from_cyc(rule.field.one());
    let c = ExtScalar::from_cyc(rule.field.c());
    let m = rule.prototiles.len();
    let tiles: Vec<TileReport> = (0..m)
        .map(|i| {
            let p = &rule.prototiles[i];
            let target = rule.inflated(i);
            let kids = &rule.children[i];
            let polys: Vec<ConvexPolygon> = kids
                .iter()
                .map(|ch| rule.prototiles[ch.child].poly.transformed(&ch.motion))
                .collect();
            let mut failures = Vec::new();

            let mut congruent_ok = true;
            for (k, ch) in kids.iter().enumerate() {
                if &ch.motion.a * &ch.motion.a.conj() != one {
                    congruent_ok = false;
                    failures.push(format!("{}: child {} motion is not an isometry", p.label, k));
                }
            }

            let mut containment_ok = true;
            for (k, cp) in polys.iter().enumerate() {
                if cp
                    .vertices()
                    .iter()
                    .any(|v| target.locate(v) == Location::Outside)
                {
                    containment_ok = false;
                    failures.push(format!("{}: child {} leaves the inflated tile", p.label, k));
                }
            }

            let pairs: Vec<(usize, usize)> = (0..polys.len())
                .flat_map(|a| ((a + 1)..polys.len()).map(move |b| (a, b)))
                .collect();
            let mut bad: Vec<(usize, usize)> = pairs
                .par_iter()
                .filter(|(a, b)| !polys[*a].disjoint_interiors(&polys[*b]))
                .cloned()
                .collect();
            bad.sort();
            let disjoint_ok = bad.is_empty();
            for (a, b) in bad {
                failures.push(format!("{}: children {} and {} overlap", p.label, a, b));
            }

            let mut total = ExtScalar::zero(&rule.field);
            for cp in &polys {
                total = &total + &cp.area2();
            }
            let area_ok = total == &c * &p.poly.area2();
            if !area_ok {
                failures.push(format!("{}: child areas do not sum to c * area", p.label));
            }

            let mut counts = vec![0u64; m];
            for ch in kids {
                counts[ch.child] += 1;
            }

            TileReport {
                label: p.label.clone(),
                congruent_ok,
                containment_ok,
                disjoint_ok,
                area_ok,
                counts,
                failures,
            }
        })
        .collect();
    ValidationReport {
        tiles,
        matrix: rule.count_matrix(),
    }
}

#[derive(Clone, Debug)]
pub enum EdgeOrientationReport {
    /// the rule carries no orientation marks
    NotApplicable,
    Checked { violations: Vec<String> },
}

impl EdgeOrientationReport {
    pub fn is_consistent(&self) -> bool {
        matches!(self, EdgeOrientationReport::Checked { violations } if violations.is_empty())
    }
}

struct Arrow {
    child: usize,
    p: ExtScalar,
    q: ExtScalar,
}

fn dot_re(u_conj: &ExtScalar, w: &ExtScalar) -> GScalar {
    GScalar::re_of(&(u_conj * w))
}

fn cross_im(u_conj: &ExtScalar, w: &ExtScalar) -> GScalar {
    GScalar::im_of(&(u_conj * w))
}

/// Checks the two decoration laws a marked rule needs for consistent
/// tilings: coincident subsegments inside each dissection carry arrows
/// in the same direction, and inflated edges of equal length are
/// subdivided identically (lengths and arrow senses) wherever they
/// occur.
///
/// Edges of length 2 are treated as two unit edges glued at a pseudo
/// vertex: subdivision cells of squared length 4 count as two unit
/// cells, and a parent edge of squared length 4 must break at its
/// midpoint, each half then being compared against the unit-edge
/// class. Without this refinement no consistent decoration can exist
/// once a length-2 edge and unit edges meet the same inflated edge
/// class, because the length-2 cell cannot recur inside dissections
/// that contain no length-2 prototile edges.
pub fn check_edge_orientations(rule: &RuleSet) -> EdgeOrientationReport {
    if rule.prototiles.iter().all(|p| p.edges.is_none()) {
        return EdgeOrientationReport::NotApplicable;
    }
    let mut violations = Vec::new();
    let zeta = rule.zeta();
    let one = ExtScalar::from_cyc(rule.field.one());
    let four = ExtScalar::from_cyc(rule.field.from_int(4));
    let half = crate::numberfield::Rat::new(
        num_bigint::BigInt::from(1),
        num_bigint::BigInt::from(2),
    );
    let quarter = crate::numberfield::Rat::new(
        num_bigint::BigInt::from(1),
        num_bigint::BigInt::from(4),
    );
    let halve = |g: &GScalar| GScalar {
        s: g.s.scale(&half),
        t: g.t.scale(&half),
    };
    // subdivision signature per squared edge length
    let mut classes: HashMap<ExtScalar, (String, Vec<(ExtScalar, i8)>)> = HashMap::new();
    for (i, kids) in rule.children.iter().enumerate() {
        let parent = &rule.prototiles[i];
        let mut arrows: Vec<Arrow> = Vec::new();
        for (kc, ch) in kids.iter().enumerate() {
            let cp = &rule.prototiles[ch.child];
            if let Some(marks) = &cp.edges {
                let vs = cp.poly.vertices();
                let mc = vs.len();
                for e in 0..mc {
                    let p0 = ch.motion.apply(&vs[e]);
                    let p1 = ch.motion.apply(&vs[(e + 1) % mc]);
                    let (p, q) = if marks[e] { (p0, p1) } else { (p1, p0) };
                    arrows.push(Arrow { child: kc, p, q });
                }
            }
        }

        // coincident subsegments must agree in direction
        for a in 0..arrows.len() {
            for b in (a + 1)..arrows.len() {
                if arrows[a].child == arrows[b].child {
                    continue;
                }
                let u = &arrows[a].q - &arrows[a].p;
                let uc = u.conj();
                let d1 = &arrows[b].p - &arrows[a].p;
                let d2 = &arrows[b].q - &arrows[a].p;
                if !cross_im(&uc, &d1).is_zero() || !cross_im(&uc, &d2).is_zero() {
                    continue;
                }
                let uu = dot_re(&uc, &u);
                let ta = dot_re(&uc, &d1);
                let tb = dot_re(&uc, &d2);
                let (lo, hi) = if ta.sub(&tb).sign() <= 0 {
                    (ta, tb)
                } else {
                    (tb, ta)
                };
                if lo.sub(&uu).sign() < 0 && hi.sign() > 0 {
                    let dir = dot_re(&uc, &(&arrows[b].q - &arrows[b].p)).sign();
                    if dir < 0 {
                        violations.push(format!(
                            "{}: children {} and {} carry opposite arrows on a coincident segment",
                            parent.label, arrows[a].child, arrows[b].child
                        ));
                    }
                }
            }
        }

        // boundary subdivision signatures, aligned along the parent arrow
        let Some(pmarks) = &parent.edges else { continue };
        let mp = parent.poly.len();
        for k in 0..mp {
            let (va, vb) = parent.poly.edge(k);
            let ev = vb - va;
            let elen2 = &ev * &ev.conj();
            let (mut a0, mut b0) = (&zeta * va, &zeta * vb);
            if !pmarks[k] {
                std::mem::swap(&mut a0, &mut b0);
            }
            let u = &b0 - &a0;
            let uc = u.conj();
            let uu = dot_re(&uc, &u);
            let len2 = &u * &uc;
            let mut segs: Vec<(GScalar, GScalar, ExtScalar, i8)> = Vec::new();
            for ar in &arrows {
                let d1 = &ar.p - &a0;
                let d2 = &ar.q - &a0;
                if !cross_im(&uc, &d1).is_zero() || !cross_im(&uc, &d2).is_zero() {
                    continue;
                }
                let tp = dot_re(&uc, &d1);
                let tq = dot_re(&uc, &d2);
                let dir = tq.sub(&tp).sign();
                let (t0, t1) = if dir > 0 { (tp, tq) } else { (tq, tp) };
                let seg = &ar.q - &ar.p;
                let cl2 = &seg * &seg.conj();
                if cl2 == four {
                    let tm = halve(&t0.add(&t1));
                    segs.push((t0, tm.clone(), one.clone(), dir));
                    segs.push((tm, t1, one.clone(), dir));
                } else {
                    segs.push((t0, t1, cl2, dir));
                }
            }
            segs.sort_by(|x, y| match x.0.sub(&y.0).sign() {
                s if s < 0 => std::cmp::Ordering::Less,
                0 => std::cmp::Ordering::Equal,
                _ => std::cmp::Ordering::Greater,
            });
            let mut covered = true;
            let mut cursor = GScalar::zero(&rule.field);
            for (t0, t1, ..) in &segs {
                if t0.sub(&cursor).sign() != 0 {
                    covered = false;
                    break;
                }
                cursor = t1.clone();
            }
            if !(covered && cursor.sub(&uu).sign() == 0) {
                violations.push(format!(
                    "{}: edge {} of the inflated tile is not exactly covered by marked child edges",
                    parent.label, k
                ));
                continue;
            }
            let desc = format!("{} edge {}", parent.label, k);
            let sig: Vec<(ExtScalar, i8)> = segs.iter().map(|(_, _, l, d)| (l.clone(), *d)).collect();
            let mut entries: Vec<(ExtScalar, String, Vec<(ExtScalar, i8)>)> = Vec::new();
            if elen2 == four {
                let hu = halve(&uu);
                match segs.iter().position(|(_, t1, ..)| t1.sub(&hu).sign() == 0) {
                    None => {
                        violations.push(format!(
                            "{desc} has no subdivision point at its midpoint pseudo-vertex"
                        ));
                        continue;
                    }
                    Some(j) => {
                        let key = len2.scale(&quarter);
                        entries.push((
                            key.clone(),
                            format!("{desc} (lower half)"),
                            sig[..=j].to_vec(),
                        ));
                        entries.push((key, format!("{desc} (upper half)"), sig[j + 1..].to_vec()));
                    }
                }
            } else {
                entries.push((len2, desc, sig));
            }
            for (key, desc, sig) in entries {
                match classes.get(&key) {
                    None => {
                        classes.insert(key, (desc, sig));
                    }
                    Some((first, stored)) => {
                        if *stored != sig {
                            violations.push(format!(
                                "{desc} subdivides differently from {first} despite equal length"
                            ));
                        }
                    }
                }
            }
        }
    }
    EdgeOrientationReport::Checked { violations }
}

#[cfg(test)]
mod tests {
    use super::super::builtin_rule;
    use super::*;
    use crate::numberfield::Rat;
    use num_bigint::BigInt;

    #[test]
    fn sigma3_certificates_and_matrix() {
        let rule = builtin_rule("sigma3").unwrap();
        let rep = validate_rule(&rule);
        assert!(rep.is_valid(), "{:?}", rep.failure_lines());
        assert_eq!(rep.matrix.0, vec![vec![1, 4], vec![3, 5]]);
    }

    #[test]
    fn sigma4_certificates_and_matrix() {
        let rule = builtin_rule("sigma4").unwrap();
        let rep = validate_rule(&rule);
        assert!(rep.is_valid(), "{:?}", rep.failure_lines());
        assert_eq!(rep.matrix.0, vec![vec![1, 2], vec![4, 3]]);
    }

    #[test]
    fn shifted_child_fails_validation() {
        let mut rule = builtin_rule("sigma3").unwrap();
        let old = rule.children[0][0].motion.clone();
        rule.children[0][0].motion = crate::geometry::Isometry::new(
            old.a.clone(),
            old.r,
            &old.t + &ExtScalar::from_cyc(rule.field.from_rat(&Rat::new(BigInt::from(1), BigInt::from(2)))),
        );
        let rep = validate_rule(&rule);
        assert!(!rep.is_valid());
        let rep0 = &rep.tiles[0];
        assert!(!rep0.disjoint_ok || !rep0.containment_ok);
    }

    #[test]
    fn unmarked_rule_is_not_applicable() {
        let rule = builtin_rule("sigma3").unwrap();
        assert!(matches!(
            check_edge_orientations(&rule),
            EdgeOrientationReport::NotApplicable
        ));
    }
}

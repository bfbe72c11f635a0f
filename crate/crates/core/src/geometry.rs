//! Exact planar geometry over the field scalars: isometries (rotation
//! or reflection plus translation), strictly convex polygons, signed
//! areas, and closed point/disk/polygon predicates. Every predicate
//! reduces to certified `GScalar` signs.

use thiserror::Error;

use crate::numberfield::dyadic::{sin_cos_pi, RInt};
use crate::numberfield::{ExtScalar, Field, GScalar, Rat};

use num_bigint::BigInt;
use num_traits::One;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("polygon needs at least 3 vertices")]
    TooFewVertices,
    #[error("vertices are not in strictly convex counterclockwise position (corner {0})")]
    NotStrictlyConvex(usize),
}

/// z -> a z + t, or z -> a conj(z) + t when r is set; a is a unit.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Isometry {
    pub a: ExtScalar,
    pub r: bool,
    pub t: ExtScalar,
}

impl std::fmt::Debug for Isometry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Isometry(a={:?}, r={}, t={:?})",
            self.a, self.r as u8, self.t
        )
    }
}

impl Isometry {
    pub fn new(a: ExtScalar, r: bool, t: ExtScalar) -> Isometry {
        debug_assert!(
            {
                let n = &a * &a.conj();
                n.is_cyc() && n.u.is_one()
            },
            "rotation part must be a unit"
        );
        Isometry { a, r, t }
    }

    pub fn identity(f: &Field) -> Isometry {
        Isometry {
            a: ExtScalar::from_cyc(f.one()),
            r: false,
            t: ExtScalar::zero(f),
        }
    }

    pub fn field(&self) -> &Field {
        self.a.field()
    }

    pub fn is_identity(&self) -> bool {
        !self.r && self.t.is_zero() && self.a.is_cyc() && self.a.u.is_one()
    }

    pub fn apply(&self, z: &ExtScalar) -> ExtScalar {
        let zz = if self.r { z.conj() } else { z.clone() };
        &(&self.a * &zz) + &self.t
    }

    /// self after o: (self.compose(o))(z) = self(o(z)).
    pub fn compose(&self, o: &Isometry) -> Isometry {
        let (oa, ot) = if self.r {
            (o.a.conj(), o.t.conj())
        } else {
            (o.a.clone(), o.t.clone())
        };
        Isometry {
            a: &self.a * &oa,
            r: self.r != o.r,
            t: &(&self.a * &ot) + &self.t,
        }
    }

    pub fn inverse(&self) -> Isometry {
        // unit a: a^-1 = conj(a)
        let ai = self.a.conj();
        if self.r {
            // z -> a conj(z) + t inverts to w -> a conj(w) - a conj(t)
            Isometry {
                a: self.a.clone(),
                r: true,
                t: -&(&self.a * &self.t.conj()),
            }
        } else {
            Isometry {
                a: ai.clone(),
                r: false,
                t: -&(&ai * &self.t),
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Location {
    Inside,
    Boundary,
    Outside,
}

/// Sign of the cross product Im(conj(u) w) of two vectors.
pub fn cross_sign(u: &ExtScalar, w: &ExtScalar) -> i8 {
    GScalar::im_of(&(&u.conj() * w)).sign()
}

/// Strictly convex polygon with counterclockwise vertices.
#[derive(Clone, PartialEq, Eq)]
pub struct ConvexPolygon {
    vs: Vec<ExtScalar>,
}

impl std::fmt::Debug for ConvexPolygon {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ConvexPolygon({} vertices)", self.vs.len())
    }
}

impl ConvexPolygon {
    pub fn new(vs: Vec<ExtScalar>) -> Result<ConvexPolygon, GeometryError> {
        if vs.len() < 3 {
            return Err(GeometryError::TooFewVertices);
        }
        let m = vs.len();
        for k in 0..m {
            let u = &vs[(k + 1) % m] - &vs[k];
            let w = &vs[(k + 2) % m] - &vs[(k + 1) % m];
            if cross_sign(&u, &w) <= 0 {
                return Err(GeometryError::NotStrictlyConvex((k + 1) % m));
            }
        }
        Ok(ConvexPolygon { vs })
    }

    pub fn vertices(&self) -> &[ExtScalar] {
        &self.vs
    }

    pub fn len(&self) -> usize {
        self.vs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn field(&self) -> &Field {
        self.vs[0].field()
    }

    pub fn edge(&self, k: usize) -> (&ExtScalar, &ExtScalar) {
        (&self.vs[k], &self.vs[(k + 1) % self.vs.len()])
    }

    /// Twice the signed area, normalized into the field: the exact area
    /// divided by sin(pi/n) for odd n (where the honest value leaves the
    /// field), the honest twice-area for even n.
    pub fn area2(&self) -> ExtScalar {
        let f = self.field().clone();
        let m = self.vs.len();
        let mut s = ExtScalar::zero(&f);
        for k in 0..m {
            s = &s + &(&self.vs[k].conj() * &self.vs[(k + 1) % m]);
        }
        let num = &s - &s.conj(); // 2i * (2A)
        let den = if f.nn() % 4 == 0 {
            // 2i in the field
            f.i_unit().unwrap().scale(&Rat::from_integer(BigInt::from(2)))
        } else {
            // xi - xi^-1 = 2i sin(pi/n)  (w = xi_2n, arg w = pi/n)
            &f.xi(1) - &f.xi(-1)
        };
        &num * &ExtScalar::from_cyc(den.inv().expect("nonzero divisor"))
    }

    /// Certified enclosure of the honest twice-area.
    pub fn area2_interval(&self, p: u64) -> RInt {
        let f = self.field();
        let a = f.embed_ext(&self.area2(), p).re;
        if f.nn() % 4 == 0 {
            a
        } else {
            let (sinv, _) = sin_cos_pi(&Rat::new(BigInt::one(), BigInt::from(f.n())), p);
            a.mul(&sinv, p)
        }
    }

    pub fn vertex_centroid(&self) -> ExtScalar {
        let f = self.field().clone();
        let mut s = ExtScalar::zero(&f);
        for v in &self.vs {
            s = &s + v;
        }
        s.scale(&Rat::new(BigInt::one(), BigInt::from(self.vs.len())))
    }

    /// max |v - from|^2 over the vertices, exact.
    pub fn max_dist_sqr(&self, from: &ExtScalar) -> ExtScalar {
        let mut best: Option<ExtScalar> = None;
        for v in &self.vs {
            let d = v - from;
            let dd = &d * &d.conj();
            match &best {
                None => best = Some(dd),
                Some(b) => {
                    if real_cmp(&dd, b) > 0 {
                        best = Some(dd);
                    }
                }
            }
        }
        best.unwrap()
    }

    pub fn locate(&self, p: &ExtScalar) -> Location {
        let m = self.vs.len();
        let mut on_boundary = false;
        for k in 0..m {
            let u = &self.vs[(k + 1) % m] - &self.vs[k];
            let d = p - &self.vs[k];
            match cross_sign(&u, &d) {
                s if s < 0 => return Location::Outside,
                0 => on_boundary = true,
                _ => {}
            }
        }
        if on_boundary {
            Location::Boundary
        } else {
            Location::Inside
        }
    }

    pub fn transformed(&self, g: &Isometry) -> ConvexPolygon {
        let mut vs: Vec<ExtScalar> = self.vs.iter().map(|v| g.apply(v)).collect();
        if g.r {
            // reflections reverse orientation; keep vertices ccw
            vs.reverse();
        }
        ConvexPolygon { vs }
    }

    /// True when the open interiors do not meet. Complete for convex
    /// polygons: disjoint interiors always admit a separating edge line.
    pub fn disjoint_interiors(&self, o: &ConvexPolygon) -> bool {
        separating_edge(self, o) || separating_edge(o, self)
    }

    /// All isometries g with g(self) = o as a vertex cycle.
    pub fn congruences(&self, o: &ConvexPolygon) -> Vec<Isometry> {
        let m = self.vs.len();
        let mut out = Vec::new();
        if o.vs.len() != m {
            return out;
        }
        let f = self.field().clone();
        let one = ExtScalar::from_cyc(f.one());
        for refl in [false, true] {
            for s in 0..m {
                let w = |k: usize| -> &ExtScalar {
                    if refl {
                        &o.vs[(s + m - k) % m]
                    } else {
                        &o.vs[(s + k) % m]
                    }
                };
                let src = |k: usize| -> ExtScalar {
                    if refl {
                        self.vs[k].conj()
                    } else {
                        self.vs[k].clone()
                    }
                };
                let d = &src(1) - &src(0);
                let a = match d.inv() {
                    Some(di) => &(w(1) - w(0)) * &di,
                    None => continue,
                };
                if (&a * &a.conj()) != one {
                    continue;
                }
                let t = w(0) - &(&a * &src(0));
                let g = Isometry { a, r: refl, t };
                if (0..m).all(|k| &g.apply(&self.vs[k]) == w(k)) {
                    out.push(g);
                }
            }
        }
        out
    }

    pub fn congruent_to(&self, o: &ConvexPolygon) -> bool {
        !self.congruences(o).is_empty()
    }
}

/// Sign of x - y for real-valued scalars.
pub fn real_cmp(x: &ExtScalar, y: &ExtScalar) -> i8 {
    crate::numberfield::real_sign(&(x - y))
}

fn separating_edge(a: &ConvexPolygon, b: &ConvexPolygon) -> bool {
    let m = a.vs.len();
    'edges: for k in 0..m {
        let u = &a.vs[(k + 1) % m] - &a.vs[k];
        let uc = u.conj();
        for w in &b.vs {
            let d = w - &a.vs[k];
            if GScalar::im_of(&(&uc * &d)).sign() > 0 {
                continue 'edges;
            }
        }
        return true;
    }
    false
}

/// Point with exact real coordinates; bridges field points and the
/// rational disk data (whose center is not a field element for odd n).
#[derive(Clone)]
pub struct GPoint {
    pub x: GScalar,
    pub y: GScalar,
}

impl GPoint {
    pub fn from_complex(z: &ExtScalar) -> GPoint {
        GPoint {
            x: GScalar::re_of(z),
            y: GScalar::im_of(z),
        }
    }

    pub fn from_rats(f: &Field, x: &Rat, y: &Rat) -> GPoint {
        GPoint {
            x: GScalar::from_rat(f, x),
            y: GScalar::from_rat(f, y),
        }
    }

    pub fn sub(&self, o: &GPoint) -> GPoint {
        GPoint {
            x: self.x.sub(&o.x),
            y: self.y.sub(&o.y),
        }
    }

    pub fn dot(&self, o: &GPoint) -> GScalar {
        self.x.mul(&o.x).add(&self.y.mul(&o.y))
    }

    pub fn norm_sqr(&self) -> GScalar {
        self.dot(self)
    }
}

/// Closed disk with rational center and radius.
#[derive(Clone, Debug, PartialEq)]
pub struct Disk {
    pub cx: Rat,
    pub cy: Rat,
    pub r: Rat,
}

impl Disk {
    pub fn center(&self, f: &Field) -> GPoint {
        GPoint::from_rats(f, &self.cx, &self.cy)
    }

    fn r_sqr(&self, f: &Field) -> GScalar {
        GScalar::from_rat(f, &(&self.r * &self.r))
    }

    pub fn contains_point(&self, z: &ExtScalar) -> bool {
        let f = z.field();
        let d = GPoint::from_complex(z).sub(&self.center(f));
        d.norm_sqr().sub(&self.r_sqr(f)).sign() <= 0
    }

    /// Closed intersection test: touching counts.
    pub fn intersects_polygon(&self, poly: &ConvexPolygon) -> bool {
        let f = poly.field();
        let c = self.center(f);
        // center inside (or on) the polygon
        // reuse exact polygon orientation: center inside iff no edge
        // sees it strictly outside
        let m = poly.len();
        let mut center_inside = true;
        let rr = self.r_sqr(f);
        for k in 0..m {
            let (va, vb) = poly.edge(k);
            let a = GPoint::from_complex(va);
            let b = GPoint::from_complex(vb);
            let u = b.sub(&a);
            let d = c.sub(&a);
            if center_inside {
                // cross(u, d) < 0 puts the center strictly outside this edge
                let cr = u.x.mul(&d.y).sub(&u.y.mul(&d.x));
                if cr.sign() < 0 {
                    center_inside = false;
                }
            }
            // distance from center to the closed segment
            let du = d.dot(&u);
            let uu = u.norm_sqr();
            let dist_ok = if du.sign() <= 0 {
                d.norm_sqr().sub(&rr).sign() <= 0
            } else if du.sub(&uu).sign() >= 0 {
                c.sub(&b).norm_sqr().sub(&rr).sign() <= 0
            } else {
                // (|d|^2 |u|^2 - <d,u>^2) <= r^2 |u|^2
                let lhs = d.norm_sqr().mul(&uu).sub(&du.mul(&du));
                lhs.sub(&rr.mul(&uu)).sign() <= 0
            };
            if dist_ok {
                return true;
            }
        }
        center_inside
    }

    /// All of poly within the closed disk.
    pub fn contains_polygon(&self, poly: &ConvexPolygon) -> bool {
        poly.vertices().iter().all(|v| self.contains_point(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numberfield::{real_sign, CycNum};

    fn rat(p: i64, q: i64) -> Rat {
        Rat::new(BigInt::from(p), BigInt::from(q))
    }

    fn ext(x: CycNum) -> ExtScalar {
        ExtScalar::from_cyc(x)
    }

    fn tri_t2(f: &Field) -> ConvexPolygon {
        // {0, 2, 2 + w}
        ConvexPolygon::new(vec![
            ext(f.zero()),
            ext(f.from_int(2)),
            ext(&f.from_int(2) + &f.w()),
        ])
        .unwrap()
    }

    #[test]
    fn convexity_is_validated() {
        let f = Field::new(4).unwrap();
        let i = f.i_unit().unwrap();
        // clockwise square rejected
        let cw = ConvexPolygon::new(vec![
            ext(f.zero()),
            ext(i.clone()),
            ext(&f.one() + &i),
            ext(f.one()),
        ]);
        assert!(cw.is_err());
        // collinear point rejected
        let col = ConvexPolygon::new(vec![
            ext(f.zero()),
            ext(f.one()),
            ext(f.from_int(2)),
            ext(&f.from_int(2) + &i),
        ]);
        assert!(col.is_err());
        // ccw square accepted
        let ccw = ConvexPolygon::new(vec![
            ext(f.zero()),
            ext(f.one()),
            ext(&f.one() + &i),
            ext(i),
        ]);
        assert!(ccw.is_ok());
    }

    #[test]
    fn unit_triangle_area_n3() {
        let f = Field::new(3).unwrap();
        // unit triangle {0, 1, xi_6} has honest twice-area sqrt(3)/2,
        // normalized area 1
        let t1 = ConvexPolygon::new(vec![ext(f.zero()), ext(f.one()), ext(f.xi(1))]).unwrap();
        assert_eq!(t1.area2(), ext(f.one()));
        let iv = t1.area2_interval(128);
        // sqrt(3)/2 = 0.86602540...
        assert!(iv.lo.to_rational() < rat(86602541, 100000000));
        assert!(iv.hi.to_rational() > rat(86602540, 100000000));
        // the big right triangle has normalized area 2
        assert_eq!(tri_t2(&f).area2(), ext(f.from_int(2)));
    }

    #[test]
    fn square_and_triangle_area_n4() {
        let f = Field::new(4).unwrap();
        let i = f.i_unit().unwrap();
        let sq = ConvexPolygon::new(vec![
            ext(f.zero()),
            ext(f.one()),
            ext(&f.one() + &i),
            ext(i),
        ])
        .unwrap();
        assert_eq!(sq.area2(), ext(f.from_int(2)));
        assert_eq!(tri_t2(&f).area2(), ext(f.from_int(2)));
    }

    #[test]
    fn isometry_algebra() {
        let f = Field::new(8).unwrap();
        let g1 = Isometry::new(ext(f.xi(3)), true, ext(&f.xi(1) + &f.from_int(2)));
        let g2 = Isometry::new(ext(f.xi(5)), false, ext(f.xi(2)));
        let z = ext(&f.xi(1) + &f.from_int(7));
        assert_eq!(g1.compose(&g2).apply(&z), g1.apply(&g2.apply(&z)));
        assert_eq!(g2.compose(&g1).apply(&z), g2.apply(&g1.apply(&z)));
        for g in [&g1, &g2] {
            let gi = g.inverse();
            assert!(g.compose(&gi).is_identity());
            assert!(gi.compose(g).is_identity());
        }
    }

    #[test]
    fn reflection_conjugates() {
        let f = Field::new(3).unwrap();
        let m = Isometry::new(ext(f.one()), true, ExtScalar::zero(&f));
        assert_eq!(m.apply(&ext(f.xi(1))), ext(f.xi(1).conj()));
    }

    #[test]
    fn transformed_keeps_ccw() {
        let f = Field::new(3).unwrap();
        let t = tri_t2(&f);
        let g = Isometry::new(ext(f.xi(2)), true, ext(f.from_int(5)));
        let img = t.transformed(&g);
        // constructor invariant re-checked
        assert!(ConvexPolygon::new(img.vertices().to_vec()).is_ok());
        assert_eq!(real_sign(&(&img.area2() - &t.area2())), 0);
    }

    #[test]
    fn locate_cases() {
        let f = Field::new(4).unwrap();
        let i = f.i_unit().unwrap();
        let sq = ConvexPolygon::new(vec![
            ext(f.zero()),
            ext(f.from_int(2)),
            ext(&f.from_int(2) + &i.scale(&rat(2, 1))),
            ext(i.scale(&rat(2, 1))),
        ])
        .unwrap();
        assert_eq!(sq.locate(&ext(&f.one() + &i)), Location::Inside);
        assert_eq!(sq.locate(&ext(f.one())), Location::Boundary);
        assert_eq!(sq.locate(&ext(f.zero())), Location::Boundary);
        assert_eq!(sq.locate(&ext(&f.one() - &i)), Location::Outside);
    }

    #[test]
    fn disjointness() {
        let f = Field::new(4).unwrap();
        let i = f.i_unit().unwrap();
        let unit_sq = |dx: Rat, dy: Rat| {
            let off = &f.from_rat(&dx) + &i.scale(&dy);
            ConvexPolygon::new(vec![
                ext(off.clone()),
                ext(&off + &f.one()),
                ext(&(&off + &f.one()) + &i),
                ext(&off + &i),
            ])
            .unwrap()
        };
        let a = unit_sq(rat(0, 1), rat(0, 1));
        // shared edge: disjoint interiors
        assert!(a.disjoint_interiors(&unit_sq(rat(1, 1), rat(0, 1))));
        // corner touch: disjoint interiors
        assert!(a.disjoint_interiors(&unit_sq(rat(1, 1), rat(1, 1))));
        // overlap
        assert!(!a.disjoint_interiors(&unit_sq(rat(1, 2), rat(0, 1))));
        // containment
        let big = ConvexPolygon::new(vec![
            ext(f.from_int(-1)),
            ext(f.from_int(2)),
            ext(&f.from_int(2) + &i.scale(&rat(2, 1))),
            ext(&f.from_int(-1) + &i.scale(&rat(2, 1))),
        ])
        .unwrap();
        assert!(!a.disjoint_interiors(&big));
        // far away
        assert!(a.disjoint_interiors(&unit_sq(rat(5, 1), rat(7, 1))));
    }

    #[test]
    fn symmetry_counts() {
        let f4 = Field::new(4).unwrap();
        let i = f4.i_unit().unwrap();
        let sq = ConvexPolygon::new(vec![
            ext(f4.zero()),
            ext(f4.one()),
            ext(&f4.one() + &i),
            ext(i),
        ])
        .unwrap();
        assert_eq!(sq.congruences(&sq).len(), 8);
        // scalene right triangle: trivial stabilizer
        let t2 = tri_t2(&f4);
        assert_eq!(t2.congruences(&t2).len(), 1);
        // equilateral: dihedral of order 6
        let f3 = Field::new(3).unwrap();
        let t1 = ConvexPolygon::new(vec![ext(f3.zero()), ext(f3.one()), ext(f3.xi(1))]).unwrap();
        assert_eq!(t1.congruences(&t1).len(), 6);
    }

    #[test]
    fn congruence_between_copies() {
        let f = Field::new(5).unwrap();
        let t = ConvexPolygon::new(vec![
            ext(f.zero()),
            ext(f.from_int(2)),
            ext(&f.from_int(2) + &f.w()),
        ])
        .unwrap();
        let g = Isometry::new(ext(f.xi(3)), true, ext(&f.xi(1) + &f.from_int(4)));
        let img = t.transformed(&g);
        let maps = t.congruences(&img);
        assert!(!maps.is_empty());
        assert!(maps.contains(&g));
        // chirality: a scalene triangle is not congruent to its mirror
        // by any direct motion
        for m in &maps {
            assert!(m.r);
        }
    }

    #[test]
    fn disk_predicates() {
        let f = Field::new(3).unwrap();
        let tri = tri_t2(&f);
        let d = |cx: i64, cy: i64, r: i64| Disk {
            cx: rat(cx, 1),
            cy: rat(cy, 1),
            r: rat(r, 1),
        };
        assert!(d(0, 0, 1).intersects_polygon(&tri)); // corner at origin
        assert!(d(1, 0, 1).intersects_polygon(&tri)); // center on edge
        assert!(d(8, 0, 6).intersects_polygon(&tri)); // touches from outside
        assert!(!d(8, 0, 5).intersects_polygon(&tri));
        assert!(d(2, 0, 4).contains_polygon(&tri));
        assert!(d(2, 0, 2).contains_polygon(&tri)); // vertex on circle: closed
        assert!(!d(2, 0, 1).contains_polygon(&tri));
        // tangent circle below the base: touching counts as intersecting
        assert!(d(1, -1, 1).intersects_polygon(&tri));
        assert!(!Disk {
            cx: rat(1, 1),
            cy: rat(-11, 10),
            r: rat(1, 1),
        }
        .intersects_polygon(&tri));
        // tiny disk strictly inside
        assert!(Disk {
            cx: rat(3, 2),
            cy: rat(1, 4),
            r: rat(1, 10),
        }
        .intersects_polygon(&tri));
    }
}

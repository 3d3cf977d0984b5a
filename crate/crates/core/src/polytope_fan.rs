//! Newton polytopes, their exterior facets, the regular refinement of the
//! normal fan and the toric intersection numbers read off from it.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_integer::Integer;
use thiserror::Error;

use crate::bivariate::SparseBivariate;
use crate::exact_arith::Rat;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolytopeError {
    #[error("the zero polynomial has no Newton polytope")]
    ZeroPolynomial,
    #[error("Newton polytope has dimension {dimension}, expected 2")]
    DegeneratePolytope { dimension: usize },
    #[error("Newton polytope does not contain (0,0), (1,0) and (0,1)")]
    HypothesisH1Violated,
}

/// Integer point of the plane. Used both for exponent vectors and for
/// primitive normal vectors of the fan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticePoint {
    pub m1: i64,
    pub m2: i64,
}

impl LatticePoint {
    pub const fn new(m1: i64, m2: i64) -> Self {
        LatticePoint { m1, m2 }
    }

    pub fn dot(self, other: LatticePoint) -> i64 {
        self.m1 * other.m1 + self.m2 * other.m2
    }

    pub fn scaled(self, k: i64) -> Self {
        LatticePoint::new(self.m1 * k, self.m2 * k)
    }

    pub fn is_primitive(self) -> bool {
        self.m1.gcd(&self.m2) == 1
    }
}

impl Add for LatticePoint {
    type Output = LatticePoint;
    fn add(self, o: LatticePoint) -> LatticePoint {
        LatticePoint::new(self.m1 + o.m1, self.m2 + o.m2)
    }
}

impl Sub for LatticePoint {
    type Output = LatticePoint;
    fn sub(self, o: LatticePoint) -> LatticePoint {
        LatticePoint::new(self.m1 - o.m1, self.m2 - o.m2)
    }
}

impl Neg for LatticePoint {
    type Output = LatticePoint;
    fn neg(self) -> LatticePoint {
        LatticePoint::new(-self.m1, -self.m2)
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.m1, self.m2)
    }
}

pub fn det(a: LatticePoint, b: LatticePoint) -> i64 {
    a.m1 * b.m2 - a.m2 * b.m1
}

/// Compares directions by counterclockwise angle measured from `(0,1)`.
pub fn ccw_angle_cmp(a: LatticePoint, b: LatticePoint) -> Ordering {
    // rotate clockwise by a quarter turn so that (0,1) lands on the positive x axis
    let rot = |p: LatticePoint| LatticePoint::new(p.m2, -p.m1);
    let half = |p: LatticePoint| u8::from(!(p.m2 > 0 || (p.m2 == 0 && p.m1 > 0)));
    let (ra, rb) = (rot(a), rot(b));
    half(ra)
        .cmp(&half(rb))
        .then_with(|| 0.cmp(&det(ra, rb)))
}

/// A convex lattice polygon (or a degenerate segment / point), with vertices
/// in counterclockwise order and no three consecutive vertices collinear.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticePolytope {
    vertices: Vec<LatticePoint>,
}

/// One-dimensional face of a polygon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Facet {
    /// Primitive inward normal.
    pub normal: LatticePoint,
    /// `-min <m, normal>` over the polygon.
    pub support: i64,
    /// Number of lattice points on the face minus one.
    pub lattice_length: i64,
    pub face_points: Vec<LatticePoint>,
}

impl LatticePolytope {
    /// Convex hull of a finite point set.
    pub fn hull(points: &[LatticePoint]) -> Self {
        let mut pts = points.to_vec();
        pts.sort();
        pts.dedup();
        if pts.len() <= 2 {
            return LatticePolytope { vertices: pts };
        }
        let cross = |o: LatticePoint, a: LatticePoint, b: LatticePoint| det(a - o, b - o);
        let mut lower: Vec<LatticePoint> = Vec::new();
        for &p in &pts {
            while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
                lower.pop();
            }
            lower.push(p);
        }
        let mut upper: Vec<LatticePoint> = Vec::new();
        for &p in pts.iter().rev() {
            while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
                upper.pop();
            }
            upper.push(p);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        if lower.len() == 2 && lower[0] == lower[1] {
            lower.pop();
        }
        LatticePolytope { vertices: lower }
    }

    pub fn vertices(&self) -> &[LatticePoint] {
        &self.vertices
    }

    pub fn dimension(&self) -> usize {
        match self.vertices.len() {
            0 | 1 => 0,
            2 => 1,
            _ => 2,
        }
    }

    /// `-min <m, eta>` over the vertices.
    pub fn support_value(&self, eta: LatticePoint) -> i64 {
        -self.vertices.iter().map(|v| v.dot(eta)).min().unwrap_or(0)
    }

    /// All edges in counterclockwise order, starting at the first vertex.
    pub fn facets(&self) -> Result<Vec<Facet>, PolytopeError> {
        if self.dimension() < 2 {
            return Err(PolytopeError::DegeneratePolytope {
                dimension: self.dimension(),
            });
        }
        let n = self.vertices.len();
        Ok((0..n)
            .map(|k| {
                let a = self.vertices[k];
                let b = self.vertices[(k + 1) % n];
                let e = b - a;
                let g = e.m1.gcd(&e.m2);
                let step = LatticePoint::new(e.m1 / g, e.m2 / g);
                let normal = LatticePoint::new(-step.m2, step.m1);
                Facet {
                    normal,
                    support: -a.dot(normal),
                    lattice_length: g,
                    face_points: (0..=g).map(|t| a + step.scaled(t)).collect(),
                }
            })
            .collect())
    }

    pub fn contains(&self, m: LatticePoint) -> bool {
        match self.facets() {
            Ok(facets) => facets.iter().all(|f| m.dot(f.normal) >= -f.support),
            Err(_) => {
                // segment or point
                match self.vertices.as_slice() {
                    [] => false,
                    [p] => *p == m,
                    [a, b] => {
                        det(*b - *a, m - *a) == 0
                            && (m - *a).dot(*b - *a) >= 0
                            && (m - *b).dot(*a - *b) >= 0
                    }
                    _ => unreachable!(),
                }
            }
        }
    }

    /// Bounding box `(min, max)` of the vertices.
    pub fn bounding_box(&self) -> (LatticePoint, LatticePoint) {
        let min1 = self.vertices.iter().map(|v| v.m1).min().unwrap_or(0);
        let max1 = self.vertices.iter().map(|v| v.m1).max().unwrap_or(0);
        let min2 = self.vertices.iter().map(|v| v.m2).min().unwrap_or(0);
        let max2 = self.vertices.iter().map(|v| v.m2).max().unwrap_or(0);
        (LatticePoint::new(min1, min2), LatticePoint::new(max1, max2))
    }
}

pub fn newton_polytope(f: &SparseBivariate) -> Result<LatticePolytope, PolytopeError> {
    if f.is_zero() {
        return Err(PolytopeError::ZeroPolynomial);
    }
    Ok(LatticePolytope::hull(&f.support()))
}

/// Whether the polytope contains the elementary simplex.
pub fn check_h1(n: &LatticePolytope) -> bool {
    n.dimension() == 2
        && [(0, 0), (1, 0), (0, 1)]
            .iter()
            .all(|&(a, b)| n.contains(LatticePoint::new(a, b)))
}

/// Facets whose primitive inward normal has a negative coordinate, in
/// counterclockwise normal order starting after `(0,1)`.
pub fn exterior_facets(n: &LatticePolytope) -> Result<Vec<Facet>, PolytopeError> {
    let mut facets: Vec<Facet> = n
        .facets()?
        .into_iter()
        .filter(|f| f.normal.m1 < 0 || f.normal.m2 < 0)
        .collect();
    facets.sort_by(|a, b| ccw_angle_cmp(a.normal, b.normal));
    Ok(facets)
}

/// Negative-regular (Hirzebruch-Jung) continued fraction of `d/k`,
/// `d/k = a_1 - 1/(a_2 - 1/(...))` with every `a_j >= 2`.
pub fn hirzebruch_jung_fraction(d: i64, k: i64) -> Vec<i64> {
    assert!(0 < k && k < d, "expected 0 < k < d, got k={k}, d={d}");
    let (mut n, mut k) = (d, k);
    let mut out = Vec::new();
    while k != 0 {
        let a = Integer::div_ceil(&n, &k);
        out.push(a);
        (n, k) = (k, a * k - n);
    }
    out
}

/// A cone `cone(u, v)` with `det(u, v) = d > 1`, rewritten as
/// `v = d * w - k * u` with `det(u, w) = 1` and `0 < k < d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConeNormalForm {
    pub u: LatticePoint,
    pub w: LatticePoint,
    pub d: i64,
    pub k: i64,
}

impl ConeNormalForm {
    pub fn new(u: LatticePoint, v: LatticePoint) -> Self {
        let d = det(u, v);
        assert!(d > 1 && u.is_primitive() && v.is_primitive());
        // w0 with det(u, w0) = 1 from the Bezout relation of u's coordinates
        let e = u.m1.extended_gcd(&u.m2);
        debug_assert_eq!(e.gcd.abs(), 1);
        let (x, y) = if e.gcd == 1 { (e.x, e.y) } else { (-e.x, -e.y) };
        // det(u, (-y, x)) = u1*x + u2*y = 1
        let w0 = LatticePoint::new(-y, x);
        debug_assert_eq!(det(u, w0), 1);
        // v = a*u + d*w0 with a = det(v, w0)
        let a = det(v, w0);
        let k = (-a).rem_euclid(d);
        let t = (a + k) / d;
        let w = w0 + u.scaled(t);
        debug_assert_eq!(w.scaled(d) - u.scaled(k), v);
        ConeNormalForm { u, w, d, k }
    }

    /// Coordinates of `p` in the unimodular basis `(u, w)`.
    pub fn to_normal(&self, p: LatticePoint) -> LatticePoint {
        // p = s*u + t*w with det(u, w) = 1
        LatticePoint::new(det(p, self.w), det(self.u, p))
    }

    pub fn from_normal(&self, q: LatticePoint) -> LatticePoint {
        self.u.scaled(q.m1) + self.w.scaled(q.m2)
    }

    /// Rays strictly inside the cone that resolve it, in counterclockwise order.
    pub fn resolution_rays(&self) -> Vec<LatticePoint> {
        let fractions = hirzebruch_jung_fraction(self.d, self.k);
        let mut rays = vec![self.w];
        let (mut prev, mut cur) = (self.u, self.w);
        for &a in &fractions[..fractions.len() - 1] {
            let next = cur.scaled(a) - prev;
            rays.push(next);
            (prev, cur) = (cur, next);
        }
        rays
    }
}

/// Regular fan refining the normal fan of a polygon satisfying H1.
///
/// `rays[0] = (0,1)` and `rays[r+1] = (1,0)`; consecutive rays, including the
/// wrap-around pair, span unimodular cones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefinedFan {
    rays: Vec<LatticePoint>,
    in_normal_fan: Vec<bool>,
}

impl RefinedFan {
    pub fn rays(&self) -> &[LatticePoint] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> LatticePoint {
        self.rays[i]
    }

    /// Whether ray `i` is the normal of a facet of the polytope.
    pub fn in_normal_fan(&self, i: usize) -> bool {
        self.in_normal_fan[i]
    }

    /// Number `r` of boundary rays strictly between `(0,1)` and `(1,0)`.
    pub fn boundary_count(&self) -> usize {
        self.rays.len() - 2
    }

    /// Support values `d_i` of `n` on every ray.
    pub fn support_values(&self, n: &LatticePolytope) -> Vec<i64> {
        self.rays.iter().map(|&eta| n.support_value(eta)).collect()
    }

    pub fn is_regular(&self) -> bool {
        let k = self.rays.len();
        (0..k).all(|i| det(self.rays[i], self.rays[(i + 1) % k]) == 1)
    }
}

/// Normal fan rays plus Hirzebruch-Jung insertions making every cone regular.
pub fn refine_fan(n: &LatticePolytope) -> Result<RefinedFan, PolytopeError> {
    if n.dimension() < 2 {
        return Err(PolytopeError::DegeneratePolytope {
            dimension: n.dimension(),
        });
    }
    if !check_h1(n) {
        return Err(PolytopeError::HypothesisH1Violated);
    }
    let mut base = vec![LatticePoint::new(0, 1)];
    base.extend(exterior_facets(n)?.iter().map(|f| f.normal));
    base.push(LatticePoint::new(1, 0));

    let mut rays = vec![base[0]];
    let mut in_normal_fan = vec![true];
    for pair in base.windows(2) {
        let (u, v) = (pair[0], pair[1]);
        if det(u, v) > 1 {
            for ray in ConeNormalForm::new(u, v).resolution_rays() {
                rays.push(ray);
                in_normal_fan.push(false);
            }
        }
        rays.push(v);
        in_normal_fan.push(true);
    }
    let fan = RefinedFan {
        rays,
        in_normal_fan,
    };
    debug_assert!(fan.is_regular());
    Ok(fan)
}

/// Self-intersections `D_i^2 = -det(eta_{i-1}, eta_{i+1})` for `i = 1..=r`.
pub fn self_intersections(fan: &RefinedFan) -> Vec<i64> {
    let rays = fan.rays();
    (1..rays.len() - 1)
        .map(|i| -det(rays[i - 1], rays[i + 1]))
        .collect()
}

/// Lattice points of `scale * N`, optionally only the interior ones, in
/// lexicographic order.
pub fn lattice_points(n: &LatticePolytope, scale: i64, interior_only: bool) -> Vec<LatticePoint> {
    let Ok(facets) = n.facets() else {
        if interior_only {
            return Vec::new();
        }
        let scaled = LatticePolytope::hull(
            &n.vertices().iter().map(|v| v.scaled(scale)).collect::<Vec<_>>(),
        );
        let (lo, hi) = scaled.bounding_box();
        return box_points(lo, hi)
            .filter(|m| scaled.contains(*m))
            .collect();
    };
    let constraints: Vec<(LatticePoint, i64)> = facets
        .iter()
        .map(|f| (f.normal, scale * f.support))
        .collect();
    let (lo, hi) = n.bounding_box();
    points_in_halfplanes(&constraints, lo.scaled(scale), hi.scaled(scale), interior_only)
}

/// Lattice points `m` of the box `[lo, hi]` with `<m, eta> >= -s` for every
/// constraint `(eta, s)` (strictly when `strict`).
pub fn points_in_halfplanes(
    constraints: &[(LatticePoint, i64)],
    lo: LatticePoint,
    hi: LatticePoint,
    strict: bool,
) -> Vec<LatticePoint> {
    box_points(lo, hi)
        .filter(|m| {
            constraints.iter().all(|&(eta, s)| {
                let v = m.dot(eta);
                if strict {
                    v > -s
                } else {
                    v >= -s
                }
            })
        })
        .collect()
}

fn box_points(lo: LatticePoint, hi: LatticePoint) -> impl Iterator<Item = LatticePoint> {
    (lo.m1..=hi.m1).flat_map(move |a| (lo.m2..=hi.m2).map(move |b| LatticePoint::new(a, b)))
}

/// Twice the shoelace area, as an integer.
pub fn doubled_area(n: &LatticePolytope) -> i64 {
    let v = n.vertices();
    if v.len() < 3 {
        return 0;
    }
    (0..v.len())
        .map(|k| det(v[k], v[(k + 1) % v.len()]))
        .sum::<i64>()
}

pub fn euclidean_area(n: &LatticePolytope) -> Rat {
    Rat::new(doubled_area(n).into(), 2.into())
}

/// Number of lattice points on the boundary.
pub fn boundary_point_count(n: &LatticePolytope) -> i64 {
    match n.facets() {
        Ok(f) => f.iter().map(|f| f.lattice_length).sum(),
        Err(_) => lattice_points(n, 1, false).len() as i64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::rat;

    fn lp(a: i64, b: i64) -> LatticePoint {
        LatticePoint::new(a, b)
    }

    fn poly(pts: &[(i64, i64)]) -> LatticePolytope {
        LatticePolytope::hull(&pts.iter().map(|&(a, b)| lp(a, b)).collect::<Vec<_>>())
    }

    #[test]
    fn newton_polytopes_of_fixtures() {
        let f1 = SparseBivariate::from_i64(&[(1, 0, 0), (1, 1, 0), (1, 0, 1)]);
        assert_eq!(newton_polytope(&f1).unwrap().vertices(), &[lp(0, 0), lp(1, 0), lp(0, 1)]);
        let f2 = SparseBivariate::from_i64(&[(1, 0, 0), (1, 1, 0), (1, 0, 1), (1, 1, 1)]);
        assert_eq!(
            newton_polytope(&f2).unwrap().vertices(),
            &[lp(0, 0), lp(1, 0), lp(1, 1), lp(0, 1)]
        );
        let f4 = SparseBivariate::from_i64(&[
            (1, 0, 0),
            (1, 1, 0),
            (1, 0, 1),
            (1, 1, 1),
            (1, 2, 1),
            (1, 1, 2),
        ]);
        assert_eq!(
            newton_polytope(&f4).unwrap().vertices(),
            &[lp(0, 0), lp(1, 0), lp(2, 1), lp(1, 2), lp(0, 1)]
        );
        assert_eq!(
            newton_polytope(&SparseBivariate::zero()),
            Err(PolytopeError::ZeroPolynomial)
        );
    }

    #[test]
    fn degenerate_hulls() {
        let seg = poly(&[(0, 0), (1, 1), (2, 2)]);
        assert_eq!(seg.dimension(), 1);
        assert_eq!(seg.vertices(), &[lp(0, 0), lp(2, 2)]);
        assert_eq!(poly(&[(3, 3)]).dimension(), 0);
        assert_eq!(
            exterior_facets(&seg),
            Err(PolytopeError::DegeneratePolytope { dimension: 1 })
        );
        assert!(!check_h1(&seg));
    }

    #[test]
    fn h1_examples() {
        assert!(check_h1(&poly(&[(0, 0), (1, 0), (0, 1)])));
        assert!(!check_h1(&poly(&[(1, 0), (2, 0), (1, 1)])));
        assert!(check_h1(&poly(&[(0, 0), (1, 0), (2, 1), (1, 2), (0, 1)])));
    }

    #[test]
    fn exterior_facet_examples() {
        let f = exterior_facets(&poly(&[(0, 0), (1, 0), (0, 1)])).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!((f[0].normal, f[0].support, f[0].lattice_length), (lp(-1, -1), 1, 1));

        let f = exterior_facets(&poly(&[(0, 0), (1, 0), (1, 1), (0, 1)])).unwrap();
        let got: Vec<_> = f.iter().map(|f| (f.normal, f.support, f.lattice_length)).collect();
        assert_eq!(got, vec![(lp(-1, 0), 1, 1), (lp(0, -1), 1, 1)]);

        let f = exterior_facets(&poly(&[(0, 0), (2, 0), (0, 1)])).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!((f[0].normal, f[0].support, f[0].lattice_length), (lp(-1, -2), 2, 1));
        assert_eq!(f[0].face_points, vec![lp(2, 0), lp(0, 1)]);
    }

    #[test]
    fn refine_examples() {
        let fan = refine_fan(&poly(&[(0, 0), (1, 0), (0, 1)])).unwrap();
        assert_eq!(fan.rays(), &[lp(0, 1), lp(-1, -1), lp(1, 0)]);
        assert_eq!(fan.boundary_count(), 1);

        let fan = refine_fan(&poly(&[(0, 0), (1, 0), (1, 1), (0, 1)])).unwrap();
        assert_eq!(fan.rays(), &[lp(0, 1), lp(-1, 0), lp(0, -1), lp(1, 0)]);

        let fan = refine_fan(&poly(&[(0, 0), (2, 0), (0, 1)])).unwrap();
        assert_eq!(fan.rays(), &[lp(0, 1), lp(-1, -2), lp(0, -1), lp(1, 0)]);
        assert!(!fan.in_normal_fan(2));
        assert!(fan.is_regular());

        assert_eq!(
            refine_fan(&poly(&[(1, 0), (2, 0), (1, 1)])),
            Err(PolytopeError::HypothesisH1Violated)
        );
    }

    #[test]
    fn hj_fractions() {
        assert_eq!(hirzebruch_jung_fraction(2, 1), vec![2]);
        assert_eq!(hirzebruch_jung_fraction(5, 2), vec![3, 2]);
        assert_eq!(hirzebruch_jung_fraction(7, 3), vec![3, 2, 2]);
        assert_eq!(hirzebruch_jung_fraction(4, 3), vec![2, 2, 2]);
    }

    #[test]
    fn resolution_of_wide_cone() {
        let (u, v) = (lp(-1, -5), lp(1, 0));
        let nf = ConeNormalForm::new(u, v);
        let mut rays = vec![u];
        rays.extend(nf.resolution_rays());
        rays.push(v);
        for w in rays.windows(2) {
            assert_eq!(det(w[0], w[1]), 1, "{rays:?}");
        }
    }

    #[test]
    fn self_intersection_examples() {
        let fan = refine_fan(&poly(&[(0, 0), (1, 0), (1, 1), (0, 1)])).unwrap();
        assert_eq!(self_intersections(&fan), vec![0, 0]);
        let fan = refine_fan(&poly(&[(0, 0), (1, 0), (0, 1)])).unwrap();
        assert_eq!(self_intersections(&fan), vec![1]);
        let fan = refine_fan(&poly(&[(0, 0), (2, 0), (0, 1)])).unwrap();
        assert_eq!(self_intersections(&fan)[1], -2);
    }

    #[test]
    fn lattice_point_examples() {
        let sq = poly(&[(0, 0), (1, 0), (1, 1), (0, 1)]);
        assert_eq!(lattice_points(&sq, 2, true), vec![lp(1, 1)]);
        let tri = poly(&[(0, 0), (1, 0), (0, 1)]);
        assert!(lattice_points(&tri, 2, true).is_empty());
        assert_eq!(lattice_points(&tri, 1, false), vec![lp(0, 0), lp(0, 1), lp(1, 0)]);
    }

    #[test]
    fn area_examples() {
        assert_eq!(euclidean_area(&poly(&[(0, 0), (1, 0), (0, 1)])), Rat::new(1.into(), 2.into()));
        assert_eq!(euclidean_area(&poly(&[(0, 0), (1, 0), (1, 1), (0, 1)])), rat(1));
        assert_eq!(
            euclidean_area(&poly(&[(0, 0), (1, 0), (2, 1), (1, 2), (0, 1)])),
            Rat::new(5.into(), 2.into())
        );
    }

    #[test]
    fn angle_order() {
        let mut v = vec![lp(1, 0), lp(0, -1), lp(-1, -1), lp(0, 1), lp(-1, 0), lp(1, -3)];
        v.sort_by(|a, b| ccw_angle_cmp(*a, *b));
        assert_eq!(v, vec![lp(0, 1), lp(-1, 0), lp(-1, -1), lp(0, -1), lp(1, -3), lp(1, 0)]);
    }
}

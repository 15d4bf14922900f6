//! Dihedral groups `D_n` acting orthogonally on the plane.
//!
//! In the complex model, `r_k z = ζ^k z` and `s_k z = ζ^k conj(z)` with
//! `ζ = exp(2πi/n)`. `s_0` is reflection across the x-axis and
//! `s_k = r_k ∘ s_0`. `n = 1` is the two-element group `{e, s_0}`.

use std::f64::consts::PI;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cloud::{Point, PointCloud};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementKind {
    Rotation,
    Reflection,
}

/// A rotation `r_k` or reflection `s_k` of `D_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupElement {
    kind: ElementKind,
    k: usize,
    n: usize,
}

impl GroupElement {
    pub fn new(kind: ElementKind, k: usize, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidOrder(n));
        }
        if k >= n {
            return Err(Error::InvalidElement { k, n });
        }
        Ok(GroupElement { kind, k, n })
    }

    pub fn rotation(k: usize, n: usize) -> Result<Self> {
        GroupElement::new(ElementKind::Rotation, k, n)
    }

    pub fn reflection(k: usize, n: usize) -> Result<Self> {
        GroupElement::new(ElementKind::Reflection, k, n)
    }

    pub fn identity(n: usize) -> Result<Self> {
        GroupElement::rotation(0, n)
    }

    /// Reduces `k` modulo `n`.
    fn wrapped(kind: ElementKind, k: i64, n: usize) -> Self {
        let k = k.rem_euclid(n as i64) as usize;
        GroupElement { kind, k, n }
    }

    pub fn kind(&self) -> ElementKind {
        self.kind
    }

    pub fn index(&self) -> usize {
        self.k
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn is_identity(&self) -> bool {
        self.kind == ElementKind::Rotation && self.k == 0
    }

    pub fn is_reflection(&self) -> bool {
        self.kind == ElementKind::Reflection
    }

    /// Rotation angle `2πk/n` applied after the optional conjugation.
    pub fn angle(&self) -> f64 {
        2.0 * PI * self.k as f64 / self.n as f64
    }

    pub fn apply_point(&self, p: Point) -> Point {
        if self.is_identity() {
            return p;
        }
        let Point { x, y } = p;
        let y = match self.kind {
            ElementKind::Rotation => y,
            ElementKind::Reflection => -y,
        };
        if self.k == 0 {
            return Point::new(x, y);
        }
        let (s, c) = self.angle().sin_cos();
        Point::new(c * x - s * y, s * x + c * y)
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &GroupElement) -> Result<GroupElement> {
        self.check_same_order(other)?;
        let (a, b) = (self.k as i64, other.k as i64);
        use ElementKind::*;
        Ok(match (self.kind, other.kind) {
            (Rotation, Rotation) => GroupElement::wrapped(Rotation, a + b, self.n),
            (Rotation, Reflection) => GroupElement::wrapped(Reflection, a + b, self.n),
            (Reflection, Rotation) => GroupElement::wrapped(Reflection, a - b, self.n),
            (Reflection, Reflection) => GroupElement::wrapped(Rotation, a - b, self.n),
        })
    }

    pub fn inverse(&self) -> GroupElement {
        match self.kind {
            ElementKind::Rotation => GroupElement::wrapped(ElementKind::Rotation, -(self.k as i64), self.n),
            ElementKind::Reflection => *self,
        }
    }

    /// The same planar map viewed as an element of `D_m`, `n | m`.
    pub fn embed(&self, m: usize) -> Result<GroupElement> {
        if m == 0 || m % self.n != 0 {
            return Err(Error::NotASubgroup { small: self.n, large: m });
        }
        Ok(GroupElement {
            kind: self.kind,
            k: self.k * (m / self.n),
            n: m,
        })
    }

    fn check_same_order(&self, other: &GroupElement) -> Result<()> {
        if self.n != other.n {
            return Err(Error::OrderMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.kind {
            ElementKind::Rotation => 'r',
            ElementKind::Reflection => 's',
        };
        write!(f, "{tag}{}", self.k)
    }
}

/// The dihedral group `D_n` of order `2n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DihedralGroup {
    n: usize,
}

impl DihedralGroup {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidOrder(n));
        }
        Ok(DihedralGroup { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        2 * self.n
    }

    /// Rotations by ascending `k`, then reflections by ascending `k`.
    pub fn elements(&self) -> Vec<GroupElement> {
        let n = self.n;
        let rotations = (0..n).map(|k| GroupElement { kind: ElementKind::Rotation, k, n });
        let reflections = (0..n).map(|k| GroupElement { kind: ElementKind::Reflection, k, n });
        rotations.chain(reflections).collect()
    }

    /// Canonical embedding `D_self ⊆ D_other`; requires `self.n | other.n`.
    pub fn is_subgroup_of(&self, other: &DihedralGroup) -> bool {
        other.n % self.n == 0
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        g.n == self.n
    }
}

/// `σX`, preserving input order.
pub fn apply_element(g: &GroupElement, cloud: &PointCloud) -> PointCloud {
    PointCloud::from_valid(cloud.iter().map(|&p| g.apply_point(p)).collect())
}

/// `g⁻¹ h g`, reduced to canonical form.
pub fn conjugate_element(g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
    g.inverse().compose(&h.compose(g)?)
}

/// Points drawn uniformly (by area) from the sector
/// `{ρ e^{iθ} : ρ ∈ [r_min, r_max], θ ∈ [0, π/n)}`.
pub fn sample_fundamental_domain<R: Rng + ?Sized>(
    n: usize,
    count: usize,
    radius_range: (f64, f64),
    rng: &mut R,
) -> Result<PointCloud> {
    let (r_min, r_max) = radius_range;
    if n == 0 {
        return Err(Error::InvalidOrder(n));
    }
    if count == 0 {
        return Err(Error::InvalidRange("count must be at least 1".into()));
    }
    if !(r_min > 0.0 && r_min <= r_max && r_max.is_finite()) {
        return Err(Error::InvalidRange(format!(
            "radius range ({r_min}, {r_max}) must satisfy 0 < r_min <= r_max"
        )));
    }
    let wedge = PI / n as f64;
    let (lo, hi) = (r_min * r_min, r_max * r_max);
    let points = (0..count)
        .map(|_| {
            let u: f64 = rng.random();
            let v: f64 = rng.random();
            let radius = (lo + (hi - lo) * u).sqrt();
            // v < 1 keeps the angle strictly below π/n
            Point::from_polar(radius, wedge * v)
        })
        .collect();
    PointCloud::new(points)
}

/// Union of `g · motif` over every element of `D_n`, in enumeration order.
pub fn replicate_motif(motif: &PointCloud, n: usize) -> Result<PointCloud> {
    let group = DihedralGroup::new(n)?;
    let points = group
        .elements()
        .iter()
        .flat_map(|g| motif.iter().map(move |&p| g.apply_point(p)))
        .collect();
    Ok(PointCloud::from_valid(points))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: Point, b: Point, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn quarter_turn() {
        let g = GroupElement::rotation(1, 4).unwrap();
        let out = apply_element(&g, &PointCloud::from_pairs([(1.0, 0.0)]).unwrap());
        assert!(close(out.points()[0], Point::new(0.0, 1.0), 1e-15));
    }

    #[test]
    fn identity_is_exact() {
        let cloud = PointCloud::from_pairs([(0.3, -1.7), (1e-5, 4.0)]).unwrap();
        for n in 1..6 {
            let e = GroupElement::identity(n).unwrap();
            assert_eq!(apply_element(&e, &cloud), cloud);
        }
    }

    #[test]
    fn s0_reflects_across_x_axis() {
        for n in 1..7 {
            let s0 = GroupElement::reflection(0, n).unwrap();
            assert_eq!(s0.apply_point(Point::new(2.5, 0.75)), Point::new(2.5, -0.75));
        }
    }

    #[test]
    fn element_counts() {
        let d1 = DihedralGroup::new(1).unwrap().elements();
        assert_eq!(d1.len(), 2);
        assert!(d1[0].is_identity());
        assert_eq!(d1[1], GroupElement::reflection(0, 1).unwrap());
        assert_eq!(DihedralGroup::new(3).unwrap().elements().len(), 6);
        assert_eq!(DihedralGroup::new(12).unwrap().elements().len(), 24);
        assert!(DihedralGroup::new(0).is_err());
    }

    #[test]
    fn elements_are_distinct_planar_maps() {
        let probe = Point::new(0.9, 0.2);
        for n in 1..=8 {
            let images: Vec<Point> = DihedralGroup::new(n)
                .unwrap()
                .elements()
                .iter()
                .map(|g| g.apply_point(probe))
                .collect();
            for i in 0..images.len() {
                for j in (i + 1)..images.len() {
                    assert!(!close(images[i], images[j], 1e-9), "n={n}: {i} vs {j}");
                }
            }
        }
    }

    #[test]
    fn invalid_elements_rejected() {
        assert!(matches!(GroupElement::rotation(4, 4), Err(Error::InvalidElement { k: 4, n: 4 })));
        assert!(GroupElement::reflection(0, 0).is_err());
    }

    #[test]
    fn conjugation_examples() {
        let r1 = GroupElement::rotation(1, 4).unwrap();
        let s0 = GroupElement::reflection(0, 4).unwrap();
        let e = GroupElement::identity(4).unwrap();
        assert_eq!(conjugate_element(&e, &r1).unwrap(), r1);
        assert_eq!(conjugate_element(&s0, &r1).unwrap(), GroupElement::rotation(3, 4).unwrap());
        let other = GroupElement::rotation(1, 3).unwrap();
        assert!(matches!(conjugate_element(&other, &r1), Err(Error::OrderMismatch { .. })));
    }

    #[test]
    fn conjugacy_preserves_kind_exhaustively() {
        for n in 1..=8 {
            let els = DihedralGroup::new(n).unwrap().elements();
            for g in &els {
                for h in &els {
                    let c = conjugate_element(g, h).unwrap();
                    assert_eq!(c.kind(), h.kind());
                }
            }
        }
    }

    #[test]
    fn composition_matches_action_and_closes() {
        // Group law checked pointwise against the planar action.
        let probe = Point::new(0.37, -1.21);
        for n in 1..=8 {
            let group = DihedralGroup::new(n).unwrap();
            let els = group.elements();
            for g in &els {
                for h in &els {
                    let hg = h.compose(g).unwrap();
                    assert!(group.contains(&hg));
                    assert!(els.contains(&hg));
                    let two_step = h.apply_point(g.apply_point(probe));
                    assert!(close(two_step, hg.apply_point(probe), 1e-12), "n={n} g={g} h={h}");
                }
                let round = g.apply_point(g.inverse().apply_point(probe));
                assert!(close(round, probe, 1e-12));
            }
        }
    }

    #[test]
    fn embedding_preserves_the_map() {
        let probe = Point::new(0.5, 0.8);
        for g in DihedralGroup::new(3).unwrap().elements() {
            let big = g.embed(12).unwrap();
            assert!(close(g.apply_point(probe), big.apply_point(probe), 1e-12));
        }
        assert!(GroupElement::rotation(1, 3).unwrap().embed(4).is_err());
    }

    #[test]
    fn fundamental_domain_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let motif = sample_fundamental_domain(12, 8, (0.5, 1.5), &mut rng).unwrap();
        assert_eq!(motif.len(), 8);
        for p in &motif {
            let a = p.arg();
            assert!((0.0..PI / 12.0).contains(&a), "angle {a}");
            assert!(p.norm() >= 0.5 - 1e-12 && p.norm() <= 1.5 + 1e-12);
        }
        let again = sample_fundamental_domain(12, 8, (0.5, 1.5), &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(motif, again);
        assert!(sample_fundamental_domain(3, 4, (0.0, 1.0), &mut rng).is_err());
        assert!(sample_fundamental_domain(3, 4, (2.0, 1.0), &mut rng).is_err());
        assert!(sample_fundamental_domain(3, 0, (1.0, 1.0), &mut rng).is_err());
    }

    #[test]
    fn replication_sizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let motif = sample_fundamental_domain(12, 8, (0.5, 1.5), &mut rng).unwrap();
        assert_eq!(replicate_motif(&motif, 12).unwrap().len(), 192);
        let origin = PointCloud::from_pairs([(0.0, 0.0)]).unwrap();
        let rep = replicate_motif(&origin, 5).unwrap();
        assert_eq!(rep.len(), 10);
        assert!(rep.iter().all(|p| p.norm() == 0.0));
    }

    #[test]
    fn replicated_motif_is_invariant_as_multiset() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let motif = sample_fundamental_domain(6, 3, (0.2, 1.0), &mut rng).unwrap();
        let cloud = replicate_motif(&motif, 6).unwrap();
        for g in DihedralGroup::new(6).unwrap().elements() {
            assert!(apply_element(&g, &cloud).approx_eq_unordered(&cloud, 1e-12));
        }
    }
}

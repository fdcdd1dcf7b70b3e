//! Rate regions as unions of rectangles `[0, r1] × [0, r2]`, represented by
//! their Pareto staircase.

use serde::Serialize;

use crate::schemes::SchemePoint;

/// Two points closer than this in both coordinates are ties.
pub const TIE_TOL: f64 = 1e-12;

/// Frontiers are reported equal when each contains the other at this
/// tolerance.
pub const REGION_EQ_TOL: f64 = 1e-6;

/// An achievable pair `(R1, R2)` in bits per channel use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatePoint {
    pub r1: f64,
    pub r2: f64,
}

impl RatePoint {
    pub fn new(r1: f64, r2: f64) -> Self {
        debug_assert!(r1 >= 0.0 && r2 >= 0.0, "negative rate ({r1}, {r2})");
        RatePoint { r1, r2 }
    }

    pub fn sum(&self) -> f64 {
        self.r1 + self.r2
    }
}

/// A staircase corner and the compression noise that achieves it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Corner {
    pub point: RatePoint,
    pub sigma2: Option<f64>,
}

/// Non-dominated corners, `r1` strictly increasing and `r2` strictly
/// decreasing.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Frontier {
    corners: Vec<Corner>,
}

impl Frontier {
    /// Pareto staircase of a set of candidate corners.
    ///
    /// Candidates tied within [`TIE_TOL`] in both coordinates collapse to
    /// the one with the smaller σ².
    pub fn from_candidates(mut cands: Vec<Corner>) -> Self {
        cands.sort_by(|a, b| {
            b.point
                .r1
                .total_cmp(&a.point.r1)
                .then(b.point.r2.total_cmp(&a.point.r2))
                .then(sigma_key(a).total_cmp(&sigma_key(b)))
        });
        let mut kept: Vec<Corner> = Vec::new();
        for c in cands {
            match kept.last_mut() {
                Some(last) if c.point.r2 <= last.point.r2 + TIE_TOL => {
                    let tie = last.point.r1 - c.point.r1 <= TIE_TOL
                        && (last.point.r2 - c.point.r2).abs() <= TIE_TOL;
                    if tie && sigma_key(&c) < sigma_key(last) {
                        *last = c;
                    }
                }
                _ => kept.push(c),
            }
        }
        kept.reverse();
        Frontier { corners: kept }
    }

    pub fn corners(&self) -> &[Corner] {
        &self.corners
    }

    pub fn is_empty(&self) -> bool {
        self.corners.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = RatePoint> + '_ {
        self.corners.iter().map(|c| c.point)
    }

    /// Upper convex hull of the region (time sharing between corners).
    ///
    /// Returns the hull's vertices, including the axis intercepts
    /// `(0, max r2)` and `(max r1, 0)`.
    pub fn convex_hull(&self) -> Vec<RatePoint> {
        let Some(first) = self.corners.first() else {
            return Vec::new();
        };
        let last = self.corners.last().unwrap();
        let mut pts = vec![RatePoint::new(0.0, first.point.r2)];
        pts.extend(self.points());
        pts.push(RatePoint::new(last.point.r1, 0.0));
        let mut hull: Vec<RatePoint> = Vec::new();
        for p in pts {
            while hull.len() >= 2 {
                let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
                let cross = (b.r1 - a.r1) * (p.r2 - a.r2) - (b.r2 - a.r2) * (p.r1 - a.r1);
                if cross >= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        hull
    }
}

fn sigma_key(c: &Corner) -> f64 {
    c.sigma2.unwrap_or(f64::INFINITY)
}

/// Pareto frontier of the union of the feasible points' rectangles.
pub fn region_from_sweep(points: &[SchemePoint]) -> Frontier {
    Frontier::from_candidates(
        points
            .iter()
            .filter_map(|p| {
                p.rates.map(|point| Corner {
                    point,
                    sigma2: p.sigma2,
                })
            })
            .collect(),
    )
}

/// How far `outer` sticks out of `inner`: the largest, over corners of
/// `outer`, of the smallest amount any `inner` corner falls short of
/// dominating it. Non-positive iff `inner` contains `outer`; `+∞` when
/// `inner` is empty and `outer` is not.
pub fn excess(outer: &Frontier, inner: &Frontier) -> f64 {
    outer
        .points()
        .map(|p| {
            inner
                .points()
                .map(|q| (p.r1 - q.r1).max(p.r2 - q.r2))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// True iff every corner of `inner` lies inside `outer`'s staircase, up to
/// `tol` bits in each coordinate.
pub fn contains(outer: &Frontier, inner: &Frontier, tol: f64) -> bool {
    excess(inner, outer) <= tol
}

/// Mutual containment at [`REGION_EQ_TOL`].
pub fn regions_equal(a: &Frontier, b: &Frontier) -> bool {
    contains(a, b, REGION_EQ_TOL) && contains(b, a, REGION_EQ_TOL)
}

/// Best sum rate over a set of points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SumRateMax {
    pub sum_rate: f64,
    pub sigma2: Option<f64>,
}

/// Largest `r1 + r2` over feasible points, ties to the smaller σ²; `None`
/// when nothing is feasible.
pub fn max_sum_rate(points: &[SchemePoint]) -> Option<SumRateMax> {
    points
        .iter()
        .filter_map(|p| {
            p.sum_rate().map(|sum_rate| SumRateMax {
                sum_rate,
                sigma2: p.sigma2,
            })
        })
        .fold(None, |best: Option<SumRateMax>, cand| match best {
            Some(b) if b.sum_rate > cand.sum_rate => Some(b),
            Some(b)
                if b.sum_rate == cand.sum_rate
                    && b.sigma2.unwrap_or(f64::INFINITY)
                        <= cand.sigma2.unwrap_or(f64::INFINITY) =>
            {
                Some(b)
            }
            _ => Some(cand),
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::{Binding, Bound, Scheme};
    use proptest::prelude::*;

    fn pt(r1: f64, r2: f64, sigma2: f64) -> SchemePoint {
        SchemePoint {
            scheme: Scheme::Nnc,
            sigma2: Some(sigma2),
            rates: Some(RatePoint::new(r1, r2)),
            binding: Binding::Rates {
                r1: Bound::Decoding,
                r2: Bound::Decoding,
            },
        }
    }

    fn infeasible() -> SchemePoint {
        SchemePoint {
            scheme: Scheme::CfNobin,
            sigma2: Some(1.0),
            rates: None,
            binding: Binding::Infeasible {
                at_user1: true,
                at_user2: false,
            },
        }
    }

    fn coords(f: &Frontier) -> Vec<(f64, f64)> {
        f.points().map(|p| (p.r1, p.r2)).collect()
    }

    fn frontier(pts: &[(f64, f64)]) -> Frontier {
        let sweep: Vec<_> = pts
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| pt(a, b, i as f64))
            .collect();
        region_from_sweep(&sweep)
    }

    #[test]
    fn incomparable_pair() {
        assert_eq!(
            coords(&frontier(&[(1.0, 2.0), (2.0, 1.0)])),
            vec![(1.0, 2.0), (2.0, 1.0)]
        );
    }

    #[test]
    fn dominated_point_dropped() {
        assert_eq!(
            coords(&frontier(&[(1.0, 1.0), (2.0, 2.0)])),
            vec![(2.0, 2.0)]
        );
    }

    #[test]
    fn all_infeasible() {
        assert!(region_from_sweep(&[infeasible(), infeasible()]).is_empty());
        assert_eq!(max_sum_rate(&[infeasible()]), None);
    }

    #[test]
    fn ties_keep_smaller_sigma() {
        let f = region_from_sweep(&[
            pt(1.0, 1.0, 5.0),
            pt(1.0, 1.0 + 1e-13, 2.0),
            pt(1.0, 1.0, 3.0),
        ]);
        assert_eq!(f.corners().len(), 1);
        assert_eq!(f.corners()[0].sigma2, Some(2.0));
    }

    #[test]
    fn containment_examples() {
        let a = frontier(&[(1.0, 2.0), (2.0, 1.0)]);
        let b = frontier(&[(2.0, 2.0)]);
        assert!(contains(&a, &a, 0.0));
        assert!(contains(&b, &a, 0.0));
        assert!(!contains(&a, &b, 0.5));
        assert!(contains(&a, &b, 1.0));
        assert_eq!(excess(&b, &a), 1.0);
        let empty = Frontier::default();
        assert!(contains(&a, &empty, 0.0));
        assert!(!contains(&empty, &a, 1e9));
        assert!(regions_equal(&empty, &empty));
    }

    #[test]
    fn sum_rate() {
        let best = max_sum_rate(&[pt(1.0, 2.0, 1.0), pt(2.0, 1.0, 0.5), infeasible()]).unwrap();
        assert_eq!(best.sum_rate, 3.0);
        assert_eq!(best.sigma2, Some(0.5));
    }

    #[test]
    fn hull_adds_time_sharing() {
        let f = frontier(&[(0.0, 3.0), (1.0, 1.0), (3.0, 0.0)]);
        let hull = f.convex_hull();
        let c: Vec<_> = hull.iter().map(|p| (p.r1, p.r2)).collect();
        assert_eq!(c, vec![(0.0, 3.0), (3.0, 0.0)]);
        let f = frontier(&[(1.0, 3.0), (2.5, 2.5), (3.0, 1.0)]);
        let c: Vec<_> = f.convex_hull().iter().map(|p| (p.r1, p.r2)).collect();
        assert_eq!(
            c,
            vec![(0.0, 3.0), (1.0, 3.0), (2.5, 2.5), (3.0, 1.0), (3.0, 0.0)]
        );
    }

    fn brute_force(pts: &[(f64, f64)]) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = pts
            .iter()
            .copied()
            .filter(|&(a, b)| {
                !pts.iter()
                    .any(|&(c, d)| c >= a && d >= b && (c > a || d > b))
            })
            .collect();
        out.sort_by(|x, y| x.0.total_cmp(&y.0));
        out.dedup();
        out
    }

    fn cloud() -> impl Strategy<Value = Vec<(f64, f64)>> {
        prop::collection::vec((0.0f64..10.0, 0.0f64..10.0), 1..60)
    }

    proptest! {
        #[test]
        fn matches_brute_force(pts in cloud()) {
            prop_assert_eq!(coords(&frontier(&pts)), brute_force(&pts));
        }

        #[test]
        fn staircase_is_monotone(pts in cloud()) {
            let c = coords(&frontier(&pts));
            for w in c.windows(2) {
                prop_assert!(w[0].0 < w[1].0 && w[0].1 > w[1].1);
            }
        }

        #[test]
        fn containment_reflexive_and_transitive(a in cloud(), b in cloud(), c in cloud()) {
            let (fa, fb, fc) = (frontier(&a), frontier(&b), frontier(&c));
            prop_assert!(contains(&fa, &fa, 0.0));
            if contains(&fa, &fb, 0.0) && contains(&fb, &fc, 0.0) {
                prop_assert!(contains(&fa, &fc, 0.0));
            }
            // Union always contains its parts.
            let ab: Vec<_> = a.iter().chain(&b).copied().collect();
            let fab = frontier(&ab);
            prop_assert!(contains(&fab, &fa, 0.0) && contains(&fab, &fb, 0.0));
        }

        #[test]
        fn refinement_never_shrinks(pts in cloud(), keep in prop::collection::vec(any::<bool>(), 60)) {
            let coarse: Vec<_> = pts.iter().zip(&keep).filter(|(_, k)| **k).map(|(p, _)| *p).collect();
            prop_assert!(contains(&frontier(&pts), &frontier(&coarse), 1e-12));
        }
    }
}

//! Crow-fly distance computations and the pairwise matrix the solver
//! consumes.
//!
//! All distances are great-circle meters on the mean Earth radius. The
//! great-circle metric keeps symmetry, zero diagonal and the triangle
//! inequality exactly, which the improvement steps of the solver rely on.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geo::GeoPoint;
use crate::sampling::StopSet;

/// Mean Earth radius in meters.
pub const EARTH_RADIUS_M: f64 = 6_371_008.8;

/// Off-diagonal nodes closer than this are considered duplicates.
pub const DUPLICATE_NODE_M: f64 = 0.1;

#[derive(Debug, Error)]
pub enum DistanceError {
    #[error("nodes {a} and {b} are within {DUPLICATE_NODE_M} m of each other")]
    DuplicateNodes { a: usize, b: usize },
}

/// Great-circle distance in meters.
pub fn haversine_m(a: GeoPoint, b: GeoPoint) -> f64 {
    let lat1 = a.lat.to_radians();
    let lat2 = b.lat.to_radians();
    let dlat = (b.lat - a.lat).to_radians();
    let dlon = (b.lon - a.lon).to_radians();
    let h = (dlat / 2.0).sin().powi(2) + lat1.cos() * lat2.cos() * (dlon / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_M * h.sqrt().min(1.0).asin()
}

/// Symmetric pairwise distance matrix with the depot at index 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<f64>,
}

impl DistanceMatrix {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> DistanceMatrix {
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = f(i, j);
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
        DistanceMatrix { n, d }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    /// Scale every entry by a positive factor (used by the solver's scale
    /// invariance tests).
    pub fn scaled(&self, factor: f64) -> DistanceMatrix {
        DistanceMatrix {
            n: self.n,
            d: self.d.iter().map(|v| v * factor).collect(),
        }
    }

    /// Dump as CSV for debugging.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| format!("{}", self.get(i, j))).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Build the crow-fly matrix for a stop set: index 0 is the depot,
/// indices 1..=k are the stops in order.
pub fn build_matrix(s: &StopSet) -> Result<DistanceMatrix, DistanceError> {
    let nodes: Vec<GeoPoint> = std::iter::once(s.depot).chain(s.stops.iter().copied()).collect();
    let n = nodes.len();
    let m = DistanceMatrix::from_fn(n, |i, j| haversine_m(nodes[i], nodes[j]));
    for i in 0..n {
        for j in (i + 1)..n {
            if m.get(i, j) < DUPLICATE_NODE_M {
                return Err(DistanceError::DuplicateNodes { a: i, b: j });
            }
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::StopSet;
    use proptest::prelude::*;

    #[test]
    fn haversine_identity() {
        let p = GeoPoint::new(12.9716, 77.5946);
        assert_eq!(haversine_m(p, p), 0.0);
    }

    #[test]
    fn haversine_antipodal() {
        let a = GeoPoint::new(0.0, 0.0);
        let b = GeoPoint::new(0.0, 180.0);
        let expected = std::f64::consts::PI * EARTH_RADIUS_M;
        assert!((haversine_m(a, b) - expected).abs() < 1.0);
    }

    #[test]
    fn haversine_hundredth_degree_latitude() {
        // 0.01 deg of latitude near Bengaluru, checked against an
        // independent great-circle calculation.
        let a = GeoPoint::new(12.9716, 77.5946);
        let b = GeoPoint::new(12.9816, 77.5946);
        assert!((haversine_m(a, b) - 1111.95).abs() < 0.05);
    }

    fn stop_set(depot: GeoPoint, stops: Vec<GeoPoint>) -> StopSet {
        let n = stops.len();
        StopSet {
            depot,
            stops,
            demands: vec![1; n],
            capacity: 10 * n.max(1) as u64,
            seed: 0,
        }
    }

    #[test]
    fn single_stop_matrix() {
        let s = stop_set(
            GeoPoint::new(12.97, 77.59),
            vec![GeoPoint::new(12.98, 77.60)],
        );
        let m = build_matrix(&s).unwrap();
        assert_eq!(m.n(), 2);
        assert_eq!(m.get(0, 0), 0.0);
        assert_eq!(m.get(1, 1), 0.0);
        assert_eq!(m.get(0, 1), m.get(1, 0));
        assert!(m.get(0, 1) > 0.0);
    }

    #[test]
    fn collinear_stops_double_distance() {
        let s = stop_set(
            GeoPoint::new(12.9600, 77.59),
            vec![GeoPoint::new(12.9650, 77.59), GeoPoint::new(12.9700, 77.59)],
        );
        let m = build_matrix(&s).unwrap();
        let ratio = m.get(0, 2) / m.get(0, 1);
        assert!((ratio - 2.0).abs() < 1e-6);
    }

    #[test]
    fn duplicate_nodes_rejected() {
        let p = GeoPoint::new(12.97, 77.59);
        let s = stop_set(p, vec![GeoPoint::new(12.98, 77.60), GeoPoint::new(12.98, 77.60)]);
        assert!(matches!(
            build_matrix(&s),
            Err(DistanceError::DuplicateNodes { a: 1, b: 2 })
        ));
    }

    #[test]
    fn matrix_matches_bruteforce_recomputation() {
        let depot = GeoPoint::new(12.9716, 77.5946);
        let stops: Vec<GeoPoint> = (0..12)
            .map(|i| {
                GeoPoint::new(
                    12.9600 + 0.0017 * (i as f64) + 0.0003 * ((i * i) as f64 % 7.0),
                    77.5800 + 0.0023 * (i as f64),
                )
            })
            .collect();
        let s = stop_set(depot, stops.clone());
        let m = build_matrix(&s).unwrap();
        let nodes: Vec<GeoPoint> = std::iter::once(depot).chain(stops).collect();
        for i in 0..nodes.len() {
            for j in 0..nodes.len() {
                assert_eq!(m.get(i, j), haversine_m(nodes[i], nodes[j]).max(0.0) * if i == j { 0.0 } else { 1.0 });
            }
        }
    }

    fn arb_point() -> impl Strategy<Value = GeoPoint> {
        // city-scale box so random matrices stay well conditioned
        (12.0f64..13.5, 77.0f64..78.5).prop_map(|(lat, lon)| GeoPoint::new(lat, lon))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn matrix_symmetric_zero_diagonal(points in prop::collection::vec(arb_point(), 2..10)) {
            let m = DistanceMatrix::from_fn(points.len(), |i, j| haversine_m(points[i], points[j]));
            for i in 0..m.n() {
                prop_assert_eq!(m.get(i, i), 0.0);
                for j in 0..m.n() {
                    prop_assert!(m.get(i, j) >= 0.0);
                    prop_assert_eq!(m.get(i, j), m.get(j, i));
                }
            }
        }

        #[test]
        fn triangle_inequality(a in arb_point(), b in arb_point(), c in arb_point()) {
            let ab = haversine_m(a, b);
            let ac = haversine_m(a, c);
            let cb = haversine_m(c, b);
            let scale = ab.max(ac).max(cb).max(1.0);
            prop_assert!(ab <= ac + cb + 1e-6 * scale);
        }
    }
}

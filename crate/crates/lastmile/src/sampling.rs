//! Candidate-point generation and two-stage stop sampling.
//!
//! Road polylines are densified into candidate delivery points, grouped
//! with seeded k-means in a local planar frame, and stops are drawn in two
//! stages: first a uniform choice of clusters, then uniform draws inside
//! each selected cluster under per-cluster caps and total-size bounds.
//! Everything is bit-reproducible given the seeds.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distance::{haversine_m, DUPLICATE_NODE_M};
use crate::geo::{FeatureSet, GeoPoint};
use crate::proj::LocalFrame;

const KMEANS_MAX_ITERS: usize = 100;
const KMEANS_TOL_M: f64 = 1.0;

#[derive(Debug, Error)]
pub enum SamplingError {
    #[error("feature set contains no road polylines")]
    NoRoads,
    #[error("need at least {needed} points for {needed} clusters, have {have}")]
    TooFewPoints { needed: usize, have: usize },
    #[error("invalid sample config: {0}")]
    InvalidConfig(String),
    #[error("sample bounds cannot be met: {0}")]
    Infeasible(String),
}

/// Resample every road polyline at most `spacing_m` apart, keeping both
/// endpoints of every segment. Output order is deterministic: feature
/// order, then arc length.
pub fn densify(fs: &FeatureSet, spacing_m: f64) -> Result<Vec<GeoPoint>, SamplingError> {
    assert!(spacing_m > 0.0, "spacing must be positive");
    let mut out = Vec::new();
    let mut saw_road = false;
    for feature in fs.road_polylines() {
        saw_road = true;
        let pts = feature.geometry.points();
        out.push(pts[0]);
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let len = haversine_m(a, b);
            let pieces = (len / spacing_m).ceil().max(1.0) as usize;
            for i in 1..=pieces {
                let t = i as f64 / pieces as f64;
                out.push(GeoPoint::new(
                    a.lat + (b.lat - a.lat) * t,
                    a.lon + (b.lon - a.lon) * t,
                ));
            }
        }
    }
    if !saw_road {
        return Err(SamplingError::NoRoads);
    }
    Ok(out)
}

/// A k-means partition of candidate points.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Clustering {
    pub points: Vec<GeoPoint>,
    /// point index -> cluster index
    pub assignment: Vec<usize>,
    pub k: usize,
    pub seed: u64,
}

impl Clustering {
    /// Member point indices per cluster, ascending within each cluster.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut members = vec![Vec::new(); self.k];
        for (point, &cluster) in self.assignment.iter().enumerate() {
            members[cluster].push(point);
        }
        members
    }
}

/// Seeded k-means (k-means++ initialization) in local planar meters.
///
/// Runs at most 100 iterations with a 1 m convergence tolerance. Empty
/// clusters are repaired by stealing the farthest point from the largest
/// cluster, so the output is always an exhaustive, disjoint partition
/// with every cluster non-empty.
pub fn cluster_points(points: &[GeoPoint], k: usize, seed: u64) -> Result<Clustering, SamplingError> {
    assert!(k >= 1, "k must be >= 1");
    if points.len() < k {
        return Err(SamplingError::TooFewPoints {
            needed: k,
            have: points.len(),
        });
    }
    let frame = LocalFrame::around(points);
    let xy: Vec<(f64, f64)> = points.iter().map(|&p| frame.to_xy(p)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // k-means++ seeding
    let mut centers: Vec<(f64, f64)> = Vec::with_capacity(k);
    centers.push(xy[rng.gen_range(0..xy.len())]);
    let mut best_d2: Vec<f64> = xy.iter().map(|&p| sq_dist(p, centers[0])).collect();
    while centers.len() < k {
        let total: f64 = best_d2.iter().sum();
        let next = if total <= 0.0 {
            // all remaining mass on duplicates of existing centers
            rng.gen_range(0..xy.len())
        } else {
            let mut target = rng.gen_range(0.0..total);
            let mut chosen = xy.len() - 1;
            for (i, &d2) in best_d2.iter().enumerate() {
                target -= d2;
                if target <= 0.0 {
                    chosen = i;
                    break;
                }
            }
            chosen
        };
        centers.push(xy[next]);
        for (i, &p) in xy.iter().enumerate() {
            best_d2[i] = best_d2[i].min(sq_dist(p, *centers.last().unwrap()));
        }
    }

    let mut assignment = vec![0usize; xy.len()];
    for _ in 0..KMEANS_MAX_ITERS {
        // assignment step, ties to the lowest cluster index
        for (i, &p) in xy.iter().enumerate() {
            let mut best = 0usize;
            let mut best_d = sq_dist(p, centers[0]);
            for (c, &center) in centers.iter().enumerate().skip(1) {
                let d = sq_dist(p, center);
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            assignment[i] = best;
        }
        repair_empty_clusters(&xy, &mut assignment, &centers, k);

        // update step
        let mut sums = vec![(0.0f64, 0.0f64, 0usize); k];
        for (i, &c) in assignment.iter().enumerate() {
            sums[c].0 += xy[i].0;
            sums[c].1 += xy[i].1;
            sums[c].2 += 1;
        }
        let mut max_shift = 0.0f64;
        for (c, &(sx, sy, count)) in sums.iter().enumerate() {
            let new_center = (sx / count as f64, sy / count as f64);
            max_shift = max_shift.max(sq_dist(new_center, centers[c]).sqrt());
            centers[c] = new_center;
        }
        if max_shift < KMEANS_TOL_M {
            break;
        }
    }

    Ok(Clustering {
        points: points.to_vec(),
        assignment,
        k,
        seed,
    })
}

fn sq_dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)
}

fn repair_empty_clusters(
    xy: &[(f64, f64)],
    assignment: &mut [usize],
    centers: &[(f64, f64)],
    k: usize,
) {
    loop {
        let mut counts = vec![0usize; k];
        for &c in assignment.iter() {
            counts[c] += 1;
        }
        let Some(empty) = counts.iter().position(|&c| c == 0) else {
            return;
        };
        let largest = counts
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .map(|(i, _)| i)
            .unwrap();
        // donate the largest cluster's farthest-from-center point
        let donor = assignment
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == largest)
            .max_by(|(i, _), (j, _)| {
                sq_dist(xy[*i], centers[largest])
                    .partial_cmp(&sq_dist(xy[*j], centers[largest]))
                    .unwrap()
                    .then(j.cmp(i))
            })
            .map(|(i, _)| i)
            .unwrap();
        assignment[donor] = empty;
    }
}

/// Two-stage sampling parameters.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SampleConfig {
    /// number of clusters to select in stage I
    pub m: usize,
    /// total sample size bounds (inclusive)
    pub n_min: usize,
    pub n_max: usize,
    /// per-cluster draw cap
    pub per_cluster_cap: usize,
    pub seed: u64,
}

/// A sampled delivery scenario: depot, stops, unit demands and a vehicle
/// capacity with a 10x slack so total demand stays far below capacity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StopSet {
    pub depot: GeoPoint,
    pub stops: Vec<GeoPoint>,
    pub demands: Vec<u64>,
    pub capacity: u64,
    pub seed: u64,
}

impl StopSet {
    pub fn total_demand(&self) -> u64 {
        self.demands.iter().sum()
    }
}

/// Draw a stop set from a clustering.
///
/// Stage I selects `m` clusters uniformly without replacement; the depot
/// is drawn first from a uniformly chosen selected cluster. Stage II
/// draws up to `min(per_cluster_cap, |C_k|)` points uniformly from each
/// selected cluster, targeting a total in `[n_min, n_max]`. The depot
/// point is excluded from the stop pool unless `n_min` forces an
/// exhaustive draw; stop candidates nearly coincident with an already
/// drawn point (< 0.1 m) are skipped so the distance matrix downstream
/// never sees duplicate nodes.
pub fn two_stage_sample(c: &Clustering, cfg: &SampleConfig) -> Result<StopSet, SamplingError> {
    if cfg.m < 1 || cfg.m > c.k {
        return Err(SamplingError::InvalidConfig(format!(
            "m={} must be in 1..={}",
            cfg.m, c.k
        )));
    }
    if cfg.n_min > cfg.n_max {
        return Err(SamplingError::InvalidConfig(format!(
            "n_min={} > n_max={}",
            cfg.n_min, cfg.n_max
        )));
    }
    if cfg.n_min == 0 {
        return Err(SamplingError::InvalidConfig("n_min must be >= 1".into()));
    }
    if cfg.per_cluster_cap == 0 {
        return Err(SamplingError::InvalidConfig("per_cluster_cap must be >= 1".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let members = c.members();

    // stage I: uniform choice of m clusters, kept in ascending order
    let mut cluster_ids: Vec<usize> = (0..c.k).collect();
    cluster_ids.shuffle(&mut rng);
    let mut selected: Vec<usize> = cluster_ids[..cfg.m].to_vec();
    selected.sort_unstable();

    // depot from a uniformly chosen selected cluster
    let depot_cluster = selected[rng.gen_range(0..selected.len())];
    let depot_member = members[depot_cluster][rng.gen_range(0..members[depot_cluster].len())];
    let depot = c.points[depot_member];

    // Can the bounds be met without handing the depot point back to the
    // pool? If not, this is the exhaustive-draw regime and the depot may
    // double as a stop.
    let capacity_without_depot: usize = selected
        .iter()
        .map(|&k| {
            let size = members[k].len() - usize::from(k == depot_cluster);
            size.min(cfg.per_cluster_cap)
        })
        .sum();
    let include_depot_in_pool = capacity_without_depot < cfg.n_min;
    let max_available: usize = selected
        .iter()
        .map(|&k| {
            let mut size = members[k].len();
            if !include_depot_in_pool && k == depot_cluster {
                size -= 1;
            }
            size.min(cfg.per_cluster_cap)
        })
        .sum();
    if max_available < cfg.n_min {
        return Err(SamplingError::Infeasible(format!(
            "selected clusters provide at most {max_available} stops, n_min={}",
            cfg.n_min
        )));
    }

    // target size, then a round-robin allocation over selected clusters
    let target = if cfg.n_max.min(max_available) > cfg.n_min {
        rng.gen_range(cfg.n_min..=cfg.n_max.min(max_available))
    } else {
        cfg.n_min
    };
    let limits: Vec<usize> = selected
        .iter()
        .map(|&k| {
            let mut size = members[k].len();
            if !include_depot_in_pool && k == depot_cluster {
                size -= 1;
            }
            size.min(cfg.per_cluster_cap)
        })
        .collect();
    let mut quota = vec![0usize; selected.len()];
    let mut remaining = target;
    while remaining > 0 {
        let mut progressed = false;
        for (slot, &limit) in limits.iter().enumerate() {
            if remaining == 0 {
                break;
            }
            if quota[slot] < limit {
                quota[slot] += 1;
                remaining -= 1;
                progressed = true;
            }
        }
        if !progressed {
            break;
        }
    }

    // stage II: uniform draws without replacement inside each cluster
    let mut stops: Vec<GeoPoint> = Vec::with_capacity(target);
    let mut shortfall = 0usize;
    for (slot, &k) in selected.iter().enumerate() {
        let mut pool: Vec<usize> = members[k]
            .iter()
            .copied()
            .filter(|&p| include_depot_in_pool || p != depot_member)
            .collect();
        pool.shuffle(&mut rng);
        let mut taken = 0usize;
        for &p in &pool {
            if taken == quota[slot] {
                break;
            }
            let candidate = c.points[p];
            let clashes = stops
                .iter()
                .chain(std::iter::once(&depot).filter(|_| !include_depot_in_pool))
                .any(|q| haversine_m(*q, candidate) < DUPLICATE_NODE_M);
            if clashes {
                continue;
            }
            stops.push(candidate);
            taken += 1;
        }
        shortfall += quota[slot] - taken;
    }
    if shortfall > 0 && stops.len() < cfg.n_min {
        return Err(SamplingError::Infeasible(format!(
            "could only draw {} distinct stops, n_min={}",
            stops.len(),
            cfg.n_min
        )));
    }

    let n = stops.len();
    Ok(StopSet {
        depot,
        stops,
        demands: vec![1; n],
        capacity: 10 * n as u64,
        seed: cfg.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::load_geojson;
    use proptest::prelude::*;
    use std::path::Path;

    fn fixture_set() -> FeatureSet {
        let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/blr_extract.geojson");
        load_geojson(path).unwrap().set
    }

    fn road_set(coords: &[(f64, f64)]) -> FeatureSet {
        let doc = serde_json::json!({
            "type": "FeatureCollection",
            "features": [{
                "type": "Feature",
                "properties": {"highway": "residential"},
                "geometry": {
                    "type": "LineString",
                    "coordinates": coords.iter().map(|(lat, lon)| vec![*lon, *lat]).collect::<Vec<_>>(),
                }
            }]
        });
        crate::geo::load_geojson_str(&doc.to_string()).unwrap().set
    }

    #[test]
    fn densify_hundred_meter_segment() {
        // ~100 m of latitude
        let fs = road_set(&[(12.9700, 77.59), (12.9708993, 77.59)]);
        let pts = densify(&fs, 50.0).unwrap();
        assert_eq!(pts.len(), 3);
        assert_eq!(pts[0], fs.features[0].geometry.points()[0]);
        assert_eq!(pts[2], fs.features[0].geometry.points()[1]);
    }

    #[test]
    fn densify_wide_spacing_keeps_endpoints() {
        let fs = road_set(&[(12.9700, 77.59), (12.9708993, 77.59)]);
        let pts = densify(&fs, 1000.0).unwrap();
        assert_eq!(pts.len(), 2);
    }

    #[test]
    fn densify_no_roads() {
        let doc = r#"{"type":"FeatureCollection","features":[
            {"type":"Feature","properties":{"natural":"water"},
             "geometry":{"type":"Polygon","coordinates":[[[77.5,12.9],[77.6,12.9],[77.6,13.0],[77.5,12.9]]]}}]}"#;
        let fs = crate::geo::load_geojson_str(doc).unwrap().set;
        assert!(matches!(densify(&fs, 25.0), Err(SamplingError::NoRoads)));
    }

    #[test]
    fn densify_fixture_matches_manifest() {
        let manifest: serde_json::Value = serde_json::from_str(
            &std::fs::read_to_string(
                Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/manifest.json"),
            )
            .unwrap(),
        )
        .unwrap();
        let expected = manifest["densify"]["points"].as_u64().unwrap() as usize;
        let spacing = manifest["densify"]["spacing_m"].as_f64().unwrap();
        let pts = densify(&fixture_set(), spacing).unwrap();
        assert_eq!(pts.len(), expected);
    }

    #[test]
    fn single_cluster_holds_everything() {
        let pts: Vec<GeoPoint> = (0..20)
            .map(|i| GeoPoint::new(12.96 + 0.001 * i as f64, 77.59))
            .collect();
        let c = cluster_points(&pts, 1, 3).unwrap();
        assert!(c.assignment.iter().all(|&a| a == 0));
    }

    #[test]
    fn two_blobs_separate_cleanly() {
        let mut pts = Vec::new();
        for i in 0..10 {
            pts.push(GeoPoint::new(12.9600 + 0.00001 * i as f64, 77.5900));
        }
        for i in 0..10 {
            pts.push(GeoPoint::new(13.2000 + 0.00001 * i as f64, 77.9900));
        }
        let c = cluster_points(&pts, 2, 11).unwrap();
        let first = c.assignment[0];
        assert!(c.assignment[..10].iter().all(|&a| a == first));
        assert!(c.assignment[10..].iter().all(|&a| a != first));
    }

    #[test]
    fn clustering_is_deterministic_on_fixture() {
        let pts = densify(&fixture_set(), 25.0).unwrap();
        let a = cluster_points(&pts, 50, 7).unwrap();
        let b = cluster_points(&pts, 50, 7).unwrap();
        assert_eq!(a.assignment, b.assignment);
    }

    #[test]
    fn too_few_points_rejected() {
        let pts = vec![GeoPoint::new(12.96, 77.59)];
        assert!(matches!(
            cluster_points(&pts, 2, 0),
            Err(SamplingError::TooFewPoints { .. })
        ));
    }

    #[test]
    fn exhaustive_draw_takes_every_point() {
        let pts: Vec<GeoPoint> = (0..8)
            .map(|i| GeoPoint::new(12.96 + 0.001 * i as f64, 77.59))
            .collect();
        let c = cluster_points(&pts, 1, 5).unwrap();
        let cfg = SampleConfig {
            m: 1,
            n_min: 8,
            n_max: 8,
            per_cluster_cap: 8,
            seed: 5,
        };
        let s = two_stage_sample(&c, &cfg).unwrap();
        assert_eq!(s.stops.len(), 8);
    }

    #[test]
    fn unit_cap_gives_one_stop_per_cluster() {
        let mut pts = Vec::new();
        for blob in 0..4 {
            for i in 0..6 {
                pts.push(GeoPoint::new(
                    12.90 + 0.05 * blob as f64 + 0.00001 * i as f64,
                    77.50 + 0.05 * blob as f64,
                ));
            }
        }
        let c = cluster_points(&pts, 4, 9).unwrap();
        let cfg = SampleConfig {
            m: 4,
            n_min: 4,
            n_max: 4,
            per_cluster_cap: 1,
            seed: 21,
        };
        let s = two_stage_sample(&c, &cfg).unwrap();
        assert_eq!(s.stops.len(), 4);
        // one stop per cluster: all stops pairwise far apart
        for i in 0..4 {
            for j in (i + 1)..4 {
                assert!(haversine_m(s.stops[i], s.stops[j]) > 1000.0);
            }
        }
    }

    #[test]
    fn order_volume_regime_over_seed_sweep() {
        let pts = densify(&fixture_set(), 25.0).unwrap();
        let c = cluster_points(&pts, 50, 7).unwrap();
        for seed in 0..100u64 {
            let cfg = SampleConfig {
                m: 6,
                n_min: 10,
                n_max: 20,
                per_cluster_cap: 4,
                seed,
            };
            let s = two_stage_sample(&c, &cfg).unwrap();
            assert!(
                (10..=20).contains(&s.stops.len()),
                "seed {seed} drew {} stops",
                s.stops.len()
            );
            assert!(s.total_demand() < s.capacity);
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        let pts = densify(&fixture_set(), 25.0).unwrap();
        let c = cluster_points(&pts, 50, 7).unwrap();
        let cfg = SampleConfig {
            m: 5,
            n_min: 10,
            n_max: 20,
            per_cluster_cap: 5,
            seed: 99,
        };
        let a = two_stage_sample(&c, &cfg).unwrap();
        let b = two_stage_sample(&c, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn infeasible_bounds_detected() {
        let pts: Vec<GeoPoint> = (0..5)
            .map(|i| GeoPoint::new(12.96 + 0.001 * i as f64, 77.59))
            .collect();
        let c = cluster_points(&pts, 1, 5).unwrap();
        let cfg = SampleConfig {
            m: 1,
            n_min: 10,
            n_max: 12,
            per_cluster_cap: 10,
            seed: 5,
        };
        assert!(matches!(
            two_stage_sample(&c, &cfg),
            Err(SamplingError::Infeasible(_))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn clustering_partitions_points(
            n in 5usize..60,
            k in 1usize..5,
            seed in 0u64..1000,
        ) {
            prop_assume!(n >= k);
            let pts: Vec<GeoPoint> = (0..n)
                .map(|i| {
                    GeoPoint::new(
                        12.9 + 0.002 * ((i * 7919 + 13) % 97) as f64 / 97.0 * 10.0,
                        77.5 + 0.002 * ((i * 104729 + 5) % 89) as f64 / 89.0 * 10.0,
                    )
                })
                .collect();
            let c = cluster_points(&pts, k, seed).unwrap();
            // exhaustive: every point assigned to a valid cluster
            prop_assert_eq!(c.assignment.len(), n);
            prop_assert!(c.assignment.iter().all(|&a| a < k));
            // every cluster non-empty
            let members = c.members();
            prop_assert!(members.iter().all(|m| !m.is_empty()));
            prop_assert_eq!(members.iter().map(Vec::len).sum::<usize>(), n);
        }

        #[test]
        fn sampled_demand_stays_below_capacity(
            seed in 0u64..500,
            m in 1usize..6,
        ) {
            let pts: Vec<GeoPoint> = (0..80)
                .map(|i| {
                    GeoPoint::new(
                        12.9 + 0.0005 * (i % 16) as f64,
                        77.5 + 0.0005 * (i / 16) as f64,
                    )
                })
                .collect();
            let c = cluster_points(&pts, 8, 17).unwrap();
            let cfg = SampleConfig { m, n_min: 1, n_max: 12, per_cluster_cap: 3, seed };
            let s = two_stage_sample(&c, &cfg).unwrap();
            prop_assert!(s.total_demand() < s.capacity);
            // stops pairwise distinct
            for i in 0..s.stops.len() {
                for j in (i + 1)..s.stops.len() {
                    prop_assert!(haversine_m(s.stops[i], s.stops[j]) >= DUPLICATE_NODE_M);
                }
            }
        }
    }
}

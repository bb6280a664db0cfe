//! Map ingestion: GeoJSON loading, feature classification and road-graph
//! construction.
//!
//! The interchange format is a GeoJSON `FeatureCollection` (RFC 7946) in
//! WGS84 with OSM-style tags in `properties`. Features are classified into
//! the five policy-relevant classes; everything else is dropped (and
//! counted). The extent is the union bounding box of the classified
//! features, so every kept feature lies within it by construction.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distance::haversine_m;

/// Vertices closer than this (in degrees, ~1 cm) merge into one graph node.
const NODE_MERGE_DEG: f64 = 1e-7;

#[derive(Debug, Error)]
pub enum GeoError {
    #[error("malformed file: {0}")]
    MalformedFile(String),
    #[error("no usable features in file")]
    EmptyExtent,
    #[error("feature set contains no road polylines")]
    NoRoads,
}

/// A WGS84 coordinate pair in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub lat: f64,
    pub lon: f64,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64) -> Self {
        GeoPoint { lat, lon }
    }

    pub fn is_valid(&self) -> bool {
        self.lat.is_finite()
            && self.lon.is_finite()
            && (-90.0..=90.0).contains(&self.lat)
            && (-180.0..=180.0).contains(&self.lon)
    }
}

/// The five policy-relevant feature classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureClass {
    Road,
    Water,
    Railway,
    Pedestrian,
    ParkForest,
}

impl FeatureClass {
    pub const ALL: [FeatureClass; 5] = [
        FeatureClass::Road,
        FeatureClass::Water,
        FeatureClass::Railway,
        FeatureClass::Pedestrian,
        FeatureClass::ParkForest,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FeatureClass::Road => "road",
            FeatureClass::Water => "water",
            FeatureClass::Railway => "railway",
            FeatureClass::Pedestrian => "pedestrian",
            FeatureClass::ParkForest => "park_forest",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeometryKind {
    Polyline,
    Polygon,
}

/// Feature geometry: an open polyline or a closed ring (first == last).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Geometry {
    Polyline(Vec<GeoPoint>),
    Polygon(Vec<GeoPoint>),
}

impl Geometry {
    pub fn points(&self) -> &[GeoPoint] {
        match self {
            Geometry::Polyline(p) | Geometry::Polygon(p) => p,
        }
    }

    pub fn kind(&self) -> GeometryKind {
        match self {
            Geometry::Polyline(_) => GeometryKind::Polyline,
            Geometry::Polygon(_) => GeometryKind::Polygon,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Feature {
    pub id: String,
    pub class: FeatureClass,
    pub geometry: Geometry,
    pub tags: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub min_lat: f64,
    pub min_lon: f64,
    pub max_lat: f64,
    pub max_lon: f64,
}

impl BoundingBox {
    fn around(points: impl Iterator<Item = GeoPoint>) -> Option<BoundingBox> {
        let mut bbox: Option<BoundingBox> = None;
        for p in points {
            let b = bbox.get_or_insert(BoundingBox {
                min_lat: p.lat,
                min_lon: p.lon,
                max_lat: p.lat,
                max_lon: p.lon,
            });
            b.min_lat = b.min_lat.min(p.lat);
            b.min_lon = b.min_lon.min(p.lon);
            b.max_lat = b.max_lat.max(p.lat);
            b.max_lon = b.max_lon.max(p.lon);
        }
        bbox
    }

    pub fn contains(&self, p: GeoPoint) -> bool {
        p.lat >= self.min_lat && p.lat <= self.max_lat && p.lon >= self.min_lon && p.lon <= self.max_lon
    }

    pub fn center(&self) -> GeoPoint {
        GeoPoint::new(
            0.5 * (self.min_lat + self.max_lat),
            0.5 * (self.min_lon + self.max_lon),
        )
    }
}

/// Classified map geometry over a bounding extent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSet {
    pub features: Vec<Feature>,
    pub extent: BoundingBox,
}

impl FeatureSet {
    pub fn by_class(&self, class: FeatureClass) -> impl Iterator<Item = &Feature> {
        self.features.iter().filter(move |f| f.class == class)
    }

    pub fn class_counts(&self) -> BTreeMap<&'static str, usize> {
        let mut counts = BTreeMap::new();
        for f in &self.features {
            *counts.entry(f.class.name()).or_insert(0) += 1;
        }
        counts
    }

    /// Road polylines in file order; the routable subset of the map.
    pub fn road_polylines(&self) -> impl Iterator<Item = &Feature> {
        self.by_class(FeatureClass::Road)
            .filter(|f| f.geometry.kind() == GeometryKind::Polyline)
    }
}

/// Result of loading a file: the classified features plus how many
/// unclassifiable features were dropped on the way.
#[derive(Debug, Clone)]
pub struct MapLoad {
    pub set: FeatureSet,
    pub dropped: usize,
}

/// Map OSM-style tags onto a feature class, or `None` for everything the
/// audit does not care about.
///
/// Precedence on multi-tagged features is Water > Railway > Pedestrian >
/// ParkForest > Road. "Pedestrian" means `highway=pedestrian`,
/// `highway=footway` or `area=pedestrian`; this list is a documented
/// choice, not an OSM standard.
pub fn classify_feature(
    tags: &BTreeMap<String, String>,
    _kind: GeometryKind,
) -> Option<FeatureClass> {
    if tags.get("natural").map(String::as_str) == Some("water") || tags.contains_key("waterway") {
        return Some(FeatureClass::Water);
    }
    if tags.contains_key("railway") {
        return Some(FeatureClass::Railway);
    }
    let highway = tags.get("highway").map(String::as_str);
    if matches!(highway, Some("pedestrian") | Some("footway"))
        || tags.get("area").map(String::as_str) == Some("pedestrian")
    {
        return Some(FeatureClass::Pedestrian);
    }
    if tags.get("leisure").map(String::as_str) == Some("park")
        || tags.get("landuse").map(String::as_str) == Some("forest")
        || tags.get("natural").map(String::as_str) == Some("wood")
    {
        return Some(FeatureClass::ParkForest);
    }
    if highway.is_some() {
        return Some(FeatureClass::Road);
    }
    None
}

/// Load and classify a GeoJSON `FeatureCollection`.
///
/// LineString, Polygon (outer ring) and MultiPolygon (one feature per
/// outer ring) geometries are accepted. Unclassifiable features are
/// dropped and counted in [`MapLoad::dropped`].
pub fn load_geojson(path: impl AsRef<Path>) -> Result<MapLoad, GeoError> {
    let raw = fs::read_to_string(path.as_ref())
        .map_err(|e| GeoError::MalformedFile(format!("read {}: {e}", path.as_ref().display())))?;
    load_geojson_str(&raw)
}

pub fn load_geojson_str(raw: &str) -> Result<MapLoad, GeoError> {
    let doc: serde_json::Value =
        serde_json::from_str(raw).map_err(|e| GeoError::MalformedFile(e.to_string()))?;
    if doc.get("type").and_then(|t| t.as_str()) != Some("FeatureCollection") {
        return Err(GeoError::MalformedFile("not a FeatureCollection".into()));
    }
    let raw_features = doc
        .get("features")
        .and_then(|f| f.as_array())
        .ok_or_else(|| GeoError::MalformedFile("missing features array".into()))?;

    let mut features = Vec::new();
    let mut dropped = 0usize;
    for (index, rf) in raw_features.iter().enumerate() {
        let tags = read_tags(rf);
        let id = feature_id(rf, index);
        let geoms = read_geometries(rf, &id)?;
        if geoms.is_empty() {
            dropped += 1;
            continue;
        }
        let mut classified_any = false;
        for (gid, geometry) in geoms {
            match classify_feature(&tags, geometry.kind()) {
                Some(class) => {
                    classified_any = true;
                    features.push(Feature {
                        id: gid,
                        class,
                        geometry,
                        tags: tags.clone(),
                    });
                }
                None => {}
            }
        }
        if !classified_any {
            dropped += 1;
        }
    }

    let extent = BoundingBox::around(
        features
            .iter()
            .flat_map(|f| f.geometry.points().iter().copied()),
    )
    .ok_or(GeoError::EmptyExtent)?;

    Ok(MapLoad {
        set: FeatureSet { features, extent },
        dropped,
    })
}

fn read_tags(feature: &serde_json::Value) -> BTreeMap<String, String> {
    let mut tags = BTreeMap::new();
    if let Some(props) = feature.get("properties").and_then(|p| p.as_object()) {
        for (k, v) in props {
            let value = match v {
                serde_json::Value::String(s) => s.clone(),
                serde_json::Value::Number(n) => n.to_string(),
                serde_json::Value::Bool(b) => b.to_string(),
                _ => continue,
            };
            tags.insert(k.clone(), value);
        }
    }
    tags
}

fn feature_id(feature: &serde_json::Value, index: usize) -> String {
    match feature.get("id") {
        Some(serde_json::Value::String(s)) => s.clone(),
        Some(serde_json::Value::Number(n)) => n.to_string(),
        _ => feature
            .get("properties")
            .and_then(|p| p.get("id").or_else(|| p.get("osm_id")))
            .and_then(|v| v.as_str())
            .map(str::to_owned)
            .unwrap_or_else(|| format!("f{index}")),
    }
}

fn read_geometries(
    feature: &serde_json::Value,
    id: &str,
) -> Result<Vec<(String, Geometry)>, GeoError> {
    let Some(geom) = feature.get("geometry").filter(|g| !g.is_null()) else {
        return Ok(Vec::new());
    };
    let gtype = geom.get("type").and_then(|t| t.as_str()).unwrap_or("");
    let coords = geom.get("coordinates");
    match gtype {
        "LineString" => {
            let pts = read_positions(coords, id)?;
            if pts.len() < 2 {
                return Err(GeoError::MalformedFile(format!(
                    "{id}: LineString needs >= 2 points"
                )));
            }
            Ok(vec![(id.to_string(), Geometry::Polyline(pts))])
        }
        "Polygon" => {
            let ring = outer_ring(coords, id)?;
            Ok(vec![(id.to_string(), Geometry::Polygon(ring))])
        }
        "MultiPolygon" => {
            let polys = coords
                .and_then(|c| c.as_array())
                .ok_or_else(|| GeoError::MalformedFile(format!("{id}: bad MultiPolygon")))?;
            let mut out = Vec::new();
            for (i, poly) in polys.iter().enumerate() {
                let ring = outer_ring(Some(poly), id)?;
                out.push((format!("{id}#{i}"), Geometry::Polygon(ring)));
            }
            Ok(out)
        }
        // Point and other geometries carry no crossable extent.
        _ => Ok(Vec::new()),
    }
}

fn outer_ring(coords: Option<&serde_json::Value>, id: &str) -> Result<Vec<GeoPoint>, GeoError> {
    let rings = coords
        .and_then(|c| c.as_array())
        .ok_or_else(|| GeoError::MalformedFile(format!("{id}: bad Polygon")))?;
    let first = rings
        .first()
        .ok_or_else(|| GeoError::MalformedFile(format!("{id}: empty Polygon")))?;
    let mut ring = read_positions(Some(first), id)?;
    if ring.first() != ring.last() {
        // tolerate unclosed OSM rings
        let head = ring[0];
        ring.push(head);
    }
    if ring.len() < 4 {
        return Err(GeoError::MalformedFile(format!(
            "{id}: Polygon ring needs >= 4 points"
        )));
    }
    Ok(ring)
}

fn read_positions(coords: Option<&serde_json::Value>, id: &str) -> Result<Vec<GeoPoint>, GeoError> {
    let arr = coords
        .and_then(|c| c.as_array())
        .ok_or_else(|| GeoError::MalformedFile(format!("{id}: bad coordinates")))?;
    let mut pts = Vec::with_capacity(arr.len());
    for pos in arr {
        let xy = pos
            .as_array()
            .ok_or_else(|| GeoError::MalformedFile(format!("{id}: bad position")))?;
        let (lon, lat) = match (xy.first().and_then(|v| v.as_f64()), xy.get(1).and_then(|v| v.as_f64())) {
            (Some(lon), Some(lat)) => (lon, lat),
            _ => return Err(GeoError::MalformedFile(format!("{id}: non-numeric position"))),
        };
        let p = GeoPoint::new(lat, lon);
        if !p.is_valid() {
            return Err(GeoError::MalformedFile(format!(
                "{id}: coordinate out of range ({lat}, {lon})"
            )));
        }
        pts.push(p);
    }
    Ok(pts)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphEdge {
    pub a: usize,
    pub b: usize,
    pub length_m: f64,
    pub bidirectional: bool,
}

/// Routable road graph: merged vertices of the Road-class polylines,
/// restricted to the largest connected component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoadGraph {
    pub nodes: Vec<GeoPoint>,
    pub edges: Vec<GraphEdge>,
}

impl RoadGraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Adjacency list as (neighbor node, edge length) pairs, neighbors in
    /// edge-insertion order.
    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            adj[e.a].push((e.b, e.length_m));
            if e.bidirectional {
                adj[e.b].push((e.a, e.length_m));
            }
        }
        adj
    }
}

fn quantize(p: GeoPoint) -> (i64, i64) {
    (
        (p.lat / NODE_MERGE_DEG + 0.5).floor() as i64,
        (p.lon / NODE_MERGE_DEG + 0.5).floor() as i64,
    )
}

/// Build the road graph from a feature set.
///
/// Consecutive polyline vertices become edges; vertices within ~1 cm merge
/// into a single node; only the largest connected component is kept so
/// shortest paths always exist downstream.
pub fn extract_road_graph(fs: &FeatureSet) -> Result<RoadGraph, GeoError> {
    let mut key_to_node: HashMap<(i64, i64), usize> = HashMap::new();
    let mut nodes: Vec<GeoPoint> = Vec::new();
    let mut edge_set: HashSet<(usize, usize)> = HashSet::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();

    for feature in fs.road_polylines() {
        let mut prev: Option<usize> = None;
        for &p in feature.geometry.points() {
            let key = quantize(p);
            let node = *key_to_node.entry(key).or_insert_with(|| {
                nodes.push(p);
                nodes.len() - 1
            });
            if let Some(prev) = prev {
                if prev != node {
                    let pair = (prev.min(node), prev.max(node));
                    if edge_set.insert(pair) {
                        edges.push(pair);
                    }
                }
            }
            prev = Some(node);
        }
    }
    if nodes.is_empty() || edges.is_empty() {
        return Err(GeoError::NoRoads);
    }

    // flood fill for the largest component (ties: lowest seed node wins)
    let mut adj = vec![Vec::new(); nodes.len()];
    for &(a, b) in &edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut component = vec![usize::MAX; nodes.len()];
    let mut sizes = Vec::new();
    for start in 0..nodes.len() {
        if component[start] != usize::MAX {
            continue;
        }
        let comp_id = sizes.len();
        let mut stack = vec![start];
        let mut size = 0usize;
        while let Some(n) = stack.pop() {
            if component[n] != usize::MAX {
                continue;
            }
            component[n] = comp_id;
            size += 1;
            stack.extend(adj[n].iter().copied().filter(|&m| component[m] == usize::MAX));
        }
        sizes.push(size);
    }
    let largest = sizes
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i)
        .unwrap();

    // renumber kept nodes in original order
    let mut remap = vec![usize::MAX; nodes.len()];
    let mut kept_nodes = Vec::new();
    for (i, &p) in nodes.iter().enumerate() {
        if component[i] == largest {
            remap[i] = kept_nodes.len();
            kept_nodes.push(p);
        }
    }
    let kept_edges: Vec<GraphEdge> = edges
        .iter()
        .filter(|(a, _)| component[*a] == largest)
        .map(|&(a, b)| GraphEdge {
            a: remap[a],
            b: remap[b],
            length_m: haversine_m(kept_nodes[remap[a]], kept_nodes[remap[b]]),
            bidirectional: true,
        })
        .collect();

    Ok(RoadGraph {
        nodes: kept_nodes,
        edges: kept_edges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tags(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }

    #[test]
    fn classify_direct_matches() {
        assert_eq!(
            classify_feature(&tags(&[("natural", "water")]), GeometryKind::Polygon),
            Some(FeatureClass::Water)
        );
        assert_eq!(
            classify_feature(&tags(&[("railway", "rail")]), GeometryKind::Polyline),
            Some(FeatureClass::Railway)
        );
        assert_eq!(
            classify_feature(&tags(&[("highway", "footway")]), GeometryKind::Polyline),
            Some(FeatureClass::Pedestrian)
        );
        assert_eq!(
            classify_feature(&tags(&[("leisure", "park")]), GeometryKind::Polygon),
            Some(FeatureClass::ParkForest)
        );
        assert_eq!(
            classify_feature(&tags(&[("highway", "residential")]), GeometryKind::Polyline),
            Some(FeatureClass::Road)
        );
        assert_eq!(
            classify_feature(&tags(&[("building", "yes")]), GeometryKind::Polygon),
            None
        );
        assert_eq!(classify_feature(&BTreeMap::new(), GeometryKind::Polyline), None);
    }

    #[test]
    fn classify_precedence_on_multi_tagged() {
        // a waterway that is also bridged by a highway stays Water
        let t = tags(&[("waterway", "canal"), ("highway", "residential")]);
        assert_eq!(classify_feature(&t, GeometryKind::Polyline), Some(FeatureClass::Water));
        let t = tags(&[("railway", "rail"), ("highway", "pedestrian")]);
        assert_eq!(classify_feature(&t, GeometryKind::Polyline), Some(FeatureClass::Railway));
        let t = tags(&[("leisure", "park"), ("highway", "service")]);
        assert_eq!(classify_feature(&t, GeometryKind::Polygon), Some(FeatureClass::ParkForest));
    }

    #[test]
    fn load_single_linestring() {
        let doc = r#"{"type":"FeatureCollection","features":[
            {"type":"Feature","properties":{"highway":"residential"},
             "geometry":{"type":"LineString","coordinates":[[77.59,12.97],[77.60,12.97],[77.60,12.98]]}}]}"#;
        let load = load_geojson_str(doc).unwrap();
        assert_eq!(load.set.features.len(), 1);
        assert_eq!(load.set.features[0].class, FeatureClass::Road);
        assert_eq!(load.dropped, 0);
        assert!(load.set.extent.contains(GeoPoint::new(12.975, 77.595)));
    }

    #[test]
    fn load_empty_collection_is_empty_extent() {
        let doc = r#"{"type":"FeatureCollection","features":[]}"#;
        assert!(matches!(load_geojson_str(doc), Err(GeoError::EmptyExtent)));
        // only unclassifiable content is the same as no content
        let doc = r#"{"type":"FeatureCollection","features":[
            {"type":"Feature","properties":{"building":"yes"},
             "geometry":{"type":"Polygon","coordinates":[[[0,0],[0,1],[1,1],[0,0]]]}}]}"#;
        assert!(matches!(load_geojson_str(doc), Err(GeoError::EmptyExtent)));
    }

    #[test]
    fn load_rejects_garbage() {
        assert!(matches!(
            load_geojson_str("not json at all"),
            Err(GeoError::MalformedFile(_))
        ));
        assert!(matches!(
            load_geojson_str(r#"{"type":"Feature"}"#),
            Err(GeoError::MalformedFile(_))
        ));
        let bad_coord = r#"{"type":"FeatureCollection","features":[
            {"type":"Feature","properties":{"highway":"residential"},
             "geometry":{"type":"LineString","coordinates":[[77.59,12.97],[200.0,95.0]]}}]}"#;
        assert!(matches!(load_geojson_str(bad_coord), Err(GeoError::MalformedFile(_))));
    }

    #[test]
    fn two_point_road_graph() {
        let doc = r#"{"type":"FeatureCollection","features":[
            {"type":"Feature","properties":{"highway":"residential"},
             "geometry":{"type":"LineString","coordinates":[[77.59,12.97],[77.60,12.97]]}}]}"#;
        let load = load_geojson_str(doc).unwrap();
        let g = extract_road_graph(&load.set).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert!(g.edges[0].length_m > 0.0);
    }

    #[test]
    fn shared_endpoint_merges_nodes() {
        let doc = r#"{"type":"FeatureCollection","features":[
            {"type":"Feature","properties":{"highway":"residential"},
             "geometry":{"type":"LineString","coordinates":[[77.59,12.97],[77.60,12.97]]}},
            {"type":"Feature","properties":{"highway":"residential"},
             "geometry":{"type":"LineString","coordinates":[[77.60,12.97],[77.60,12.98]]}}]}"#;
        let load = load_geojson_str(doc).unwrap();
        let g = extract_road_graph(&load.set).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn no_roads_is_an_error() {
        let doc = r#"{"type":"FeatureCollection","features":[
            {"type":"Feature","properties":{"natural":"water"},
             "geometry":{"type":"Polygon","coordinates":[[[77.5,12.9],[77.6,12.9],[77.6,13.0],[77.5,12.9]]]}}]}"#;
        let load = load_geojson_str(doc).unwrap();
        assert!(matches!(extract_road_graph(&load.set), Err(GeoError::NoRoads)));
    }
}

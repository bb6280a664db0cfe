//! Local equirectangular projection for geometry math.
//!
//! City-scale extents are tiny compared to the Earth, so an
//! equirectangular frame anchored at a reference point is accurate to
//! well under 0.1% and keeps intersection math in plain planar meters.

use crate::distance::EARTH_RADIUS_M;
use crate::geo::GeoPoint;

const M_PER_DEG: f64 = std::f64::consts::PI * EARTH_RADIUS_M / 180.0;

/// Planar frame anchored at a reference point; x is east, y is north.
#[derive(Debug, Clone, Copy)]
pub struct LocalFrame {
    origin: GeoPoint,
    m_per_deg_lon: f64,
}

impl LocalFrame {
    pub fn new(origin: GeoPoint) -> LocalFrame {
        LocalFrame {
            origin,
            m_per_deg_lon: M_PER_DEG * origin.lat.to_radians().cos(),
        }
    }

    /// Frame anchored at the bounding-box center of some points.
    pub fn around(points: &[GeoPoint]) -> LocalFrame {
        let mut min_lat = f64::INFINITY;
        let mut max_lat = f64::NEG_INFINITY;
        let mut min_lon = f64::INFINITY;
        let mut max_lon = f64::NEG_INFINITY;
        for p in points {
            min_lat = min_lat.min(p.lat);
            max_lat = max_lat.max(p.lat);
            min_lon = min_lon.min(p.lon);
            max_lon = max_lon.max(p.lon);
        }
        LocalFrame::new(GeoPoint::new(
            0.5 * (min_lat + max_lat),
            0.5 * (min_lon + max_lon),
        ))
    }

    pub fn to_xy(&self, p: GeoPoint) -> (f64, f64) {
        (
            (p.lon - self.origin.lon) * self.m_per_deg_lon,
            (p.lat - self.origin.lat) * M_PER_DEG,
        )
    }

    pub fn to_geo(&self, x: f64, y: f64) -> GeoPoint {
        GeoPoint::new(
            self.origin.lat + y / M_PER_DEG,
            self.origin.lon + x / self.m_per_deg_lon,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::haversine_m;

    #[test]
    fn projection_approximates_haversine() {
        let frame = LocalFrame::new(GeoPoint::new(12.97, 77.59));
        let a = GeoPoint::new(12.9650, 77.5850);
        let b = GeoPoint::new(12.9780, 77.6010);
        let (ax, ay) = frame.to_xy(a);
        let (bx, by) = frame.to_xy(b);
        let planar = ((ax - bx).powi(2) + (ay - by).powi(2)).sqrt();
        let sphere = haversine_m(a, b);
        assert!((planar - sphere).abs() / sphere < 1e-3);
    }

    #[test]
    fn round_trip() {
        let frame = LocalFrame::new(GeoPoint::new(12.97, 77.59));
        let p = GeoPoint::new(12.9612, 77.6043);
        let (x, y) = frame.to_xy(p);
        let q = frame.to_geo(x, y);
        assert!((p.lat - q.lat).abs() < 1e-12);
        assert!((p.lon - q.lon).abs() < 1e-12);
    }
}

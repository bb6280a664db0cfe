//! Last-mile route generation and qualitative route auditing.
//!
//! The crate covers a complete batch experiment over real map data:
//!
//! 1. [`geo`] — load a GeoJSON extract, classify features (roads, water,
//!    railways, pedestrian areas, parks) and build a routable road graph.
//! 2. [`sampling`] — turn road geometry into candidate delivery points,
//!    cluster them and draw depot + stops via two-stage sampling.
//! 3. [`distance`] / [`solver`] — build the crow-fly distance matrix and
//!    solve the capacitated vehicle routing problem (exact solver for tiny
//!    instances, savings + local search for the rest).
//! 4. [`router`] — expand the visit order into actual driving legs over
//!    the road graph.
//! 5. [`render`] — rasterize a styled basemap with one leg overlaid in red.
//! 6. [`oracle`] — deterministic geometric ground truth for the four audit
//!    questions (water / railway / pedestrian / park crossings).
//! 7. [`client`] / [`extract`] — ask a chat-completions vision endpoint the
//!    four questions about each leg image and parse the answers, with a
//!    second-model fallback for free-form text.
//! 8. [`report`] — score verdicts against ground truth and emit CSV/SVG
//!    reports.
//! 9. [`pipeline`] — orchestrate everything from one TOML config with
//!    content-digest caching; the `lastmile` binary exposes each stage as
//!    a subcommand.
//!
//! Every step is deterministic given the configured seeds; the bundled
//! mock endpoint (see [`client::mock`]) makes the whole pipeline runnable
//! offline. The `examples/` directory has one runnable program per
//! capability.

pub mod client;
pub mod distance;
pub mod extract;
pub mod geo;
pub mod oracle;
pub mod pipeline;
pub mod proj;
pub mod render;
pub mod report;
pub mod router;
pub mod sampling;
pub mod solver;

pub use geo::{Feature, FeatureClass, FeatureSet, GeoPoint, RoadGraph};
pub use sampling::StopSet;
pub use solver::{Instance, RoutePlan};

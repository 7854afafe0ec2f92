//! Plan-view scene model and the closed-form relay localization equations.
//!
//! Angles are radians. `phi` is the world bearing of the IRS seen from the
//! radar; the reflection angle `alpha` is the clockwise rotation, at the IRS,
//! from the direction back towards the radar to the direction of the target.
//! With that convention the target sits at
//! `(x_S - D_ST cos(alpha - phi), y_S + D_ST sin(alpha - phi))` and the IRS
//! orientation never enters the solution.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const COINCIDENT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_polar(r: f64, bearing: f64) -> Self {
        Self::new(r * bearing.cos(), r * bearing.sin())
    }

    pub fn distance(&self, other: &Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// World bearing of `other` seen from `self`.
    pub fn bearing_to(&self, other: &Point2) -> f64 {
        (other.y - self.y).atan2(other.x - self.x)
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn scale(&self, k: f64) -> Point2 {
        Point2::new(self.x * k, self.y * k)
    }
}

impl std::ops::Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

/// Wraps an angle into (-pi, pi].
pub fn wrap_angle(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(TAU) - PI;
    if w <= -PI {
        w + TAU
    } else {
        w
    }
}

/// IRS position from the radar position, radar-IRS range and AoA.
pub fn irs_position(radar: Point2, d_rs: f64, phi: f64) -> Point2 {
    Point2::new(radar.x + d_rs * phi.cos(), radar.y + d_rs * phi.sin())
}

/// Target position from the IRS position, IRS-target range, reflection angle and AoA.
pub fn target_position(irs: Point2, d_st: f64, alpha: f64, phi: f64) -> Point2 {
    Point2::new(irs.x - d_st * (alpha - phi).cos(), irs.y + d_st * (alpha - phi).sin())
}

/// Chord displacement `2 D sin(delta / 2)` when the true bearing is `delta_deg`
/// away from the beam actually used.
pub fn angular_mismatch_error(d_st: f64, delta_deg: f64) -> f64 {
    2.0 * d_st * (delta_deg.to_radians() / 2.0).sin()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polygon {
    pub vertices: Vec<Point2>,
}

impl Polygon {
    pub fn new(vertices: Vec<Point2>) -> Self {
        Self { vertices }
    }

    /// Axis-aligned rectangle from two opposite corners.
    pub fn rect(a: Point2, b: Point2) -> Self {
        Self::new(vec![
            Point2::new(a.x.min(b.x), a.y.min(b.y)),
            Point2::new(a.x.max(b.x), a.y.min(b.y)),
            Point2::new(a.x.max(b.x), a.y.max(b.y)),
            Point2::new(a.x.min(b.x), a.y.max(b.y)),
        ])
    }

    pub fn contains(&self, p: Point2) -> bool {
        let v = &self.vertices;
        let mut inside = false;
        let mut j = v.len().wrapping_sub(1);
        for i in 0..v.len() {
            let (a, b) = (v[i], v[j]);
            if (a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x {
                inside = !inside;
            }
            j = i;
        }
        inside
    }

    /// True when the closed segment `p`-`q` touches the polygon.
    pub fn intersects_segment(&self, p: Point2, q: Point2) -> bool {
        if self.vertices.len() < 3 {
            return false;
        }
        if self.contains(p) || self.contains(q) {
            return true;
        }
        let n = self.vertices.len();
        (0..n).any(|i| segments_intersect(p, q, self.vertices[i], self.vertices[(i + 1) % n]))
    }
}

fn cross(o: Point2, a: Point2, b: Point2) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

fn on_segment(p: Point2, q: Point2, r: Point2) -> bool {
    r.x >= p.x.min(q.x) && r.x <= p.x.max(q.x) && r.y >= p.y.min(q.y) && r.y <= p.y.max(q.y)
}

fn segments_intersect(p1: Point2, p2: Point2, q1: Point2, q2: Point2) -> bool {
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadarSite {
    pub id: u8,
    pub position: Point2,
    /// World bearing of the receive-array boresight, rad.
    pub boresight: f64,
    /// TX1 and TX2 phase centres.
    pub tx: [Point2; 2],
}

impl RadarSite {
    /// Radar with TX1/TX2 placed half a wavelength apart across the boresight.
    pub fn new(id: u8, position: Point2, boresight: f64, wavelength: f64) -> Self {
        let across = boresight + PI / 2.0;
        let half = Point2::from_polar(wavelength / 4.0, across);
        Self { id, position, boresight, tx: [position - half, position + half] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IrsSite {
    pub position: Point2,
    /// World bearing of the surface normal, rad.
    pub normal: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetState {
    pub id: u8,
    pub position: Point2,
    /// Velocity vector, m/s.
    pub velocity: Point2,
    pub reflectivity: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Scene {
    pub radars: Vec<RadarSite>,
    pub irs: Option<IrsSite>,
    pub targets: Vec<TargetState>,
    pub obstacles: Vec<Polygon>,
}

impl Scene {
    pub fn radar(&self, id: u8) -> Option<&RadarSite> {
        self.radars.iter().find(|r| r.id == id)
    }

    pub fn target(&self, id: u8) -> Option<&TargetState> {
        self.targets.iter().find(|t| t.id == id)
    }

    /// Whether the direct segment between two points is blocked.
    pub fn blocked(&self, a: Point2, b: Point2) -> bool {
        self.obstacles.iter().any(|o| o.intersects_segment(a, b))
    }

    pub fn is_nlos(&self, radar_id: u8, target_id: u8) -> bool {
        match (self.radar(radar_id), self.target(target_id)) {
            (Some(r), Some(t)) => self.blocked(r.position, t.position),
            _ => false,
        }
    }

    pub fn validate(&self, wavelength: f64) -> Result<()> {
        for r in &self.radars {
            if !r.position.is_finite() || !r.tx.iter().all(Point2::is_finite) {
                return Err(Error::NonFinite("radar position"));
            }
            let sep = r.tx[0].distance(&r.tx[1]);
            if (sep - wavelength / 2.0).abs() > 1e-9 * wavelength.max(1.0) {
                return Err(Error::InvalidParameter(format!("radar {} TX spacing {sep} m is not lambda/2", r.id)));
            }
        }
        for t in &self.targets {
            if !t.position.is_finite() || !t.velocity.is_finite() {
                return Err(Error::NonFinite("target state"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathSolution {
    pub d_rs: f64,
    pub d_st: f64,
    pub phi: f64,
    pub alpha_required: f64,
    /// False when the target sits on the IRS and `alpha_required` is a placeholder 0.
    pub alpha_defined: bool,
}

/// Forward relay geometry radar -> IRS -> target for ground-truth targets.
pub fn solve_forward_path(scene: &Scene, radar_id: u8, target_id: u8) -> Result<PathSolution> {
    let radar = scene.radar(radar_id).ok_or_else(|| Error::InvalidParameter(format!("unknown radar {radar_id}")))?;
    let target = scene.target(target_id).ok_or_else(|| Error::InvalidParameter(format!("unknown target {target_id}")))?;
    let irs = scene.irs.ok_or_else(|| Error::DegenerateGeometry("scene has no IRS".into()))?;
    path_between(radar.position, irs.position, target.position)
}

/// Relay geometry for explicit positions.
pub fn path_between(radar: Point2, irs: Point2, target: Point2) -> Result<PathSolution> {
    let d_rs = radar.distance(&irs);
    if d_rs <= COINCIDENT_EPS {
        return Err(Error::DegenerateGeometry("IRS coincides with radar".into()));
    }
    if target.distance(&radar) <= COINCIDENT_EPS {
        return Err(Error::DegenerateGeometry("target coincides with radar".into()));
    }
    let phi = radar.bearing_to(&irs);
    let d_st = irs.distance(&target);
    if d_st <= COINCIDENT_EPS {
        return Ok(PathSolution { d_rs, d_st: 0.0, phi, alpha_required: 0.0, alpha_defined: false });
    }
    let alpha = wrap_angle(phi + PI - irs.bearing_to(&target));
    Ok(PathSolution { d_rs, d_st, phi, alpha_required: alpha, alpha_defined: true })
}

use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::Point2;

use super::config::{point, MotionConfig};

/// A target trajectory with every random draw made up front, so the same
/// motion stream gives the same path regardless of what else the run does.
#[derive(Debug, Clone, PartialEq)]
pub enum Motion {
    Static(Point2),
    Polar { centre: Point2, distance: f64, bearings: Vec<f64> },
    Waypoints { legs: Vec<Leg>, cycle: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Leg {
    pub from: Point2,
    pub to: Point2,
    pub start: f64,
    pub duration: f64,
}

impl Motion {
    pub fn new<R: Rng + ?Sized>(cfg: &MotionConfig, irs: Option<Point2>, epochs: usize, rng: &mut R) -> Result<Self> {
        Ok(match cfg {
            MotionConfig::Static { position } => Motion::Static(point(*position)),
            MotionConfig::Polar { bearing_deg, distance, jitter_deg } => {
                let centre = irs.ok_or_else(|| Error::InvalidParameter("polar motion needs an IRS".into()))?;
                let bearings = (0..epochs)
                    .map(|_| {
                        let j = if *jitter_deg > 0.0 { rng.random_range(-*jitter_deg..=*jitter_deg) } else { 0.0 };
                        (bearing_deg + j).to_radians()
                    })
                    .collect();
                Motion::Polar { centre, distance: *distance, bearings }
            }
            MotionConfig::Waypoints { points, speed_min, speed_max } => {
                let pts: Vec<Point2> = points.iter().map(|&p| point(p)).collect();
                let mut forward = Vec::new();
                for w in pts.windows(2) {
                    let v = if speed_max > speed_min { rng.random_range(*speed_min..=*speed_max) } else { *speed_min };
                    forward.push((w[0], w[1], w[0].distance(&w[1]) / v));
                }
                let back: Vec<_> = forward.iter().rev().map(|&(a, b, d)| (b, a, d)).collect();
                let mut legs = Vec::new();
                let mut t = 0.0;
                for (from, to, duration) in forward.into_iter().chain(back) {
                    legs.push(Leg { from, to, start: t, duration });
                    t += duration;
                }
                if !(t > 0.0) {
                    return Err(Error::InvalidParameter("waypoints do not move".into()));
                }
                Motion::Waypoints { legs, cycle: t }
            }
        })
    }

    /// Position and velocity at time `t` within `epoch`.
    pub fn state(&self, epoch: usize, t: f64) -> (Point2, Point2) {
        match self {
            Motion::Static(p) => (*p, Point2::default()),
            Motion::Polar { centre, distance, bearings } => {
                let b = bearings[epoch.min(bearings.len() - 1)];
                (*centre + Point2::from_polar(*distance, b), Point2::default())
            }
            Motion::Waypoints { legs, cycle } => {
                let tau = t.rem_euclid(*cycle);
                let leg = legs.iter().rev().find(|l| l.start <= tau).unwrap_or(&legs[0]);
                if leg.duration <= 0.0 {
                    return (leg.to, Point2::default());
                }
                let f = ((tau - leg.start) / leg.duration).clamp(0.0, 1.0);
                let d = leg.to - leg.from;
                (leg.from + d.scale(f), d.scale(1.0 / leg.duration))
            }
        }
    }
}

/// Radial closing speed of `p` moving at `v` as seen from `origin`.
pub fn closing_speed(origin: Point2, p: Point2, v: Point2) -> f64 {
    let d = p - origin;
    let n = d.norm();
    if n == 0.0 {
        return 0.0;
    }
    -(d.x * v.x + d.y * v.y) / n
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn waypoints_go_and_return() {
        let cfg = MotionConfig::Waypoints { points: vec![[0.0, 0.0], [1.0, 0.0]], speed_min: 0.5, speed_max: 0.5 };
        let m = Motion::new(&cfg, None, 1, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        let (p, v) = m.state(0, 1.0);
        assert!((p.x - 0.5).abs() < 1e-12 && (v.x - 0.5).abs() < 1e-12);
        let (p, v) = m.state(0, 3.0);
        assert!((p.x - 0.5).abs() < 1e-12 && (v.x + 0.5).abs() < 1e-12);
        assert!((m.state(0, 4.0).0.x).abs() < 1e-12);
    }

    #[test]
    fn polar_stays_on_circle() {
        let cfg = MotionConfig::Polar { bearing_deg: 135.0, distance: 2.0, jitter_deg: 3.0 };
        let c = Point2::new(1.0, 0.0);
        let m = Motion::new(&cfg, Some(c), 50, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        for e in 0..50 {
            let (p, _) = m.state(e, 0.0);
            assert!((p.distance(&c) - 2.0).abs() < 1e-12);
            assert!((c.bearing_to(&p).to_degrees() - 135.0).abs() <= 3.0 + 1e-9);
        }
    }

    #[test]
    fn closing_sign() {
        let o = Point2::new(0.0, 0.0);
        assert_eq!(closing_speed(o, Point2::new(2.0, 0.0), Point2::new(-1.0, 0.0)), 1.0);
        assert_eq!(closing_speed(o, Point2::new(2.0, 0.0), Point2::new(0.0, 1.0)), 0.0);
    }
}

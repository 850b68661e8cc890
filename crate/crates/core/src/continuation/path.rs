use std::f64::consts::PI;

use crate::bigcomplex::BigComplex;

/// Polygonal path through explicit waypoints.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSpec {
    /// Waypoints after the base point, in order.
    pub waypoints: Vec<BigComplex>,
    pub base: BigComplex,
    /// A closed path returns to `base` after the last waypoint.
    pub closed: bool,
    /// Minimal admissible distance from any segment to a singular point.
    pub clearance: f64,
}

impl PathSpec {
    pub fn open(base: BigComplex, waypoints: Vec<BigComplex>) -> Self {
        PathSpec { waypoints, base, closed: false, clearance: 0.0 }
    }

    pub fn closed(base: BigComplex, waypoints: Vec<BigComplex>) -> Self {
        PathSpec { waypoints, base, closed: true, clearance: 0.0 }
    }

    pub fn with_clearance(mut self, clearance: f64) -> Self {
        self.clearance = clearance;
        self
    }

    /// All vertices including the base point (and the return for closed
    /// paths).
    pub fn vertices(&self) -> Vec<BigComplex> {
        let mut v = Vec::with_capacity(self.waypoints.len() + 2);
        v.push(self.base.clone());
        v.extend(self.waypoints.iter().cloned());
        if self.closed {
            v.push(self.base.clone());
        }
        v
    }

    pub fn end(&self) -> &BigComplex {
        if self.closed {
            &self.base
        } else {
            self.waypoints.last().unwrap_or(&self.base)
        }
    }

    /// Reversed path; closed paths keep their base.
    pub fn reversed(&self) -> PathSpec {
        if self.closed {
            let mut w = self.waypoints.clone();
            w.reverse();
            return PathSpec { waypoints: w, ..self.clone() };
        }
        let mut all = self.vertices();
        all.reverse();
        let base = all.remove(0);
        PathSpec { waypoints: all, base, closed: false, clearance: self.clearance }
    }

    /// Based loop: straight spoke from `base` to the circle of radius
    /// `radius` about `center`, `sides`-gon counterclockwise (or clockwise),
    /// and back along the spoke.
    pub fn spoke_loop(base: &BigComplex, center: (f64, f64), radius: f64, sides: usize, counterclockwise: bool) -> PathSpec {
        let prec = base.prec();
        let (bx, by) = (base.re().to_f64(), base.im().to_f64());
        let start_angle = (by - center.1).atan2(bx - center.0);
        let sign = if counterclockwise { 1.0 } else { -1.0 };
        let mut w = Vec::with_capacity(sides + 1);
        for k in 0..=sides {
            let theta = start_angle + sign * 2.0 * PI * k as f64 / sides as f64;
            let (x, y) = if k == sides {
                // close exactly on the entry point
                (center.0 + radius * start_angle.cos(), center.1 + radius * start_angle.sin())
            } else {
                (center.0 + radius * theta.cos(), center.1 + radius * theta.sin())
            };
            w.push(BigComplex::from_f64(prec, x, y));
        }
        PathSpec::closed(base.clone(), w)
    }

    /// Loop around infinity: out along the ray at angle `angle` to radius
    /// `radius` about the origin, once clockwise, and back.
    pub fn infinity_loop(base: &BigComplex, angle: f64, radius: f64, sides: usize) -> PathSpec {
        let prec = base.prec();
        let mut w = Vec::with_capacity(sides + 1);
        let exit = (radius * angle.cos(), radius * angle.sin());
        for k in 0..=sides {
            let theta = angle - 2.0 * PI * k as f64 / sides as f64;
            let (x, y) = if k == 0 || k == sides { exit } else { (radius * theta.cos(), radius * theta.sin()) };
            w.push(BigComplex::from_f64(prec, x, y));
        }
        PathSpec::closed(base.clone(), w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spoke_loop_shape() {
        let base = BigComplex::from_f64(64, 1.0, 0.0);
        let p = PathSpec::spoke_loop(&base, (0.0, 0.0), 0.5, 8, true);
        let v = p.vertices();
        assert_eq!(v.len(), 11);
        assert_eq!(v[1], v[9]);
        assert_eq!(v[1], BigComplex::from_f64(64, 0.5, 0.0));
        assert_eq!(v.last(), Some(&base));
        // second vertex is above the axis for a counterclockwise circle
        assert!(v[2].im().to_f64() > 0.0);
    }

    #[test]
    fn reversal() {
        let a = BigComplex::from_f64(64, 0.0, 0.0);
        let b = BigComplex::from_f64(64, 1.0, 0.0);
        let c = BigComplex::from_f64(64, 1.0, 1.0);
        let p = PathSpec::open(a.clone(), vec![b.clone(), c.clone()]);
        let r = p.reversed();
        assert_eq!(r.vertices(), vec![c, b, a]);
    }
}

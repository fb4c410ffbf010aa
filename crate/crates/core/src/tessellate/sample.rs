use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::{Line, Point};

use super::SeedStream;

/// Axis-aligned rectangle `[lo.x, hi.x] x [lo.y, hi.y]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub lo: Point,
    pub hi: Point,
}

impl Rect {
    pub fn new(lo: Point, hi: Point) -> Result<Self> {
        if !(hi.x > lo.x && hi.y > lo.y) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::invalid("rectangle must have positive finite extent"));
        }
        Ok(Rect { lo, hi })
    }

    pub fn area(&self) -> f64 {
        (self.hi.x - self.lo.x) * (self.hi.y - self.lo.y)
    }

    pub fn expand(&self, by: f64) -> Rect {
        Rect { lo: self.lo - Point::new(by, by), hi: self.hi + Point::new(by, by) }
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.lo.x && p.x <= self.hi.x && p.y >= self.lo.y && p.y <= self.hi.y
    }

    /// Distance from an interior point to the complement (0 outside).
    pub fn inner_dist(&self, p: Point) -> f64 {
        let d = (p.x - self.lo.x).min(self.hi.x - p.x).min(p.y - self.lo.y).min(self.hi.y - p.y);
        d.max(0.0)
    }

    /// Disjoint rectangles covering `self` minus `inner`; `inner` must lie inside.
    pub fn frame_around(&self, inner: &Rect) -> Vec<Rect> {
        let mut out = Vec::with_capacity(4);
        let mut push = |lo: Point, hi: Point| {
            if hi.x > lo.x && hi.y > lo.y {
                out.push(Rect { lo, hi });
            }
        };
        push(self.lo, Point::new(self.hi.x, inner.lo.y));
        push(Point::new(self.lo.x, inner.hi.y), self.hi);
        push(Point::new(self.lo.x, inner.lo.y), Point::new(inner.lo.x, inner.hi.y));
        push(Point::new(inner.hi.x, inner.lo.y), Point::new(self.hi.x, inner.hi.y));
        out
    }
}

fn check_intensity(v: f64) -> Result<()> {
    if !(v >= 0.0) || !v.is_finite() {
        return Err(Error::invalid(format!("intensity must be finite and non-negative, got {v}")));
    }
    Ok(())
}

/// Poisson variate with the given mean (0 for mean 0).
pub fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> Result<u64> {
    check_intensity(mean)?;
    if mean == 0.0 {
        return Ok(0);
    }
    let d = Poisson::new(mean).map_err(|e| Error::invalid(e.to_string()))?;
    Ok(d.sample(rng) as u64)
}

/// Isotropic Poisson lines with length intensity `lambda` that hit the disc
/// of radius `r` around `center`.
pub fn sample_lines_with<R: Rng + ?Sized>(lambda: f64, center: Point, r: f64, rng: &mut R) -> Result<Vec<Line>> {
    if !(r > 0.0) {
        return Err(Error::invalid("disc radius must be positive"));
    }
    let n = poisson_count(2.0 * lambda * r, rng)?;
    let mut out = Vec::with_capacity(n as usize);
    for _ in 0..n {
        let p = rng.random_range(-r..r);
        let theta = rng.random_range(0.0..std::f64::consts::PI);
        let line = Line::new(p, theta);
        out.push(Line::new(p + line.normal().dot(center), theta));
    }
    Ok(out)
}

/// Isotropic Poisson lines hitting the disc `B_r` centred at the origin.
pub fn sample_isotropic_lines(lambda: f64, r: f64, seeds: &SeedStream) -> Result<Vec<Line>> {
    sample_lines_with(lambda, Point::origin(), r, &mut seeds.rng())
}

pub fn sample_points_with<R: Rng + ?Sized>(gamma: f64, rect: &Rect, rng: &mut R) -> Result<Vec<Point>> {
    let n = poisson_count(gamma * rect.area(), rng)?;
    let mut out = Vec::with_capacity(n as usize);
    for _ in 0..n {
        let x = rng.random_range(rect.lo.x..rect.hi.x);
        let y = rng.random_range(rect.lo.y..rect.hi.y);
        out.push(Point::new(x, y));
    }
    Ok(out)
}

/// Homogeneous Poisson process with intensity `gamma` on `rect`.
pub fn sample_poisson_points(gamma: f64, rect: &Rect, seeds: &SeedStream) -> Result<Vec<Point>> {
    sample_points_with(gamma, rect, &mut seeds.rng())
}

/// Adds an independent Poisson sample on `outer` minus `inner` to `points`.
pub fn extend_points<R: Rng + ?Sized>(
    points: &mut Vec<Point>,
    gamma: f64,
    inner: &Rect,
    outer: &Rect,
    rng: &mut R,
) -> Result<()> {
    for part in outer.frame_around(inner) {
        points.extend(sample_points_with(gamma, &part, rng)?);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_intensity_is_empty() {
        let s = SeedStream::new(1);
        assert!(sample_isotropic_lines(0.0, 5.0, &s).unwrap().is_empty());
        let r = Rect::new(Point::new(0.0, 0.0), Point::new(3.0, 2.0)).unwrap();
        assert!(sample_poisson_points(0.0, &r, &s).unwrap().is_empty());
        assert!(sample_isotropic_lines(-1.0, 5.0, &s).is_err());
        assert!(sample_poisson_points(-1.0, &r, &s).is_err());
    }

    #[test]
    fn lines_hit_the_disc() {
        let s = SeedStream::new(2);
        let lines = sample_isotropic_lines(3.0, 4.0, &s).unwrap();
        assert!(!lines.is_empty());
        for l in &lines {
            assert!(l.p().abs() <= 4.0);
            assert!(l.theta() >= 0.0 && l.theta() < std::f64::consts::PI);
        }
        let c = Point::new(10.0, -3.0);
        for l in sample_lines_with(3.0, c, 2.0, &mut s.rng()).unwrap() {
            assert!(l.signed_distance(c).abs() <= 2.0 + 1e-12);
        }
    }

    #[test]
    fn frame_tiles_the_difference() {
        let inner = Rect::new(Point::new(0.0, 0.0), Point::new(2.0, 1.0)).unwrap();
        let outer = inner.expand(1.5);
        let parts = outer.frame_around(&inner);
        let a: f64 = parts.iter().map(Rect::area).sum();
        assert!((a + inner.area() - outer.area()).abs() < 1e-12);
        let mut pts = Vec::new();
        extend_points(&mut pts, 5.0, &inner, &outer, &mut SeedStream::new(3).rng()).unwrap();
        assert!(pts.iter().all(|p| outer.contains(*p) && !(inner.inner_dist(*p) > 0.0)));
    }
}

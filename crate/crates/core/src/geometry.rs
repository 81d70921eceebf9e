//! Coordinate conventions and small geometric helpers shared by the
//! sampler, the room simulator and the FOA encoder.
//!
//! Convention (right-handed): +x is the listener's front, +y is left,
//! +z is up. Azimuth is measured counterclockwise from +x in degrees and
//! wrapped to `[0, 360)`, so 90 deg is hard left. Elevation is degrees up
//! from the horizontal plane, in `[-90, 90]`.

use serde::{Deserialize, Serialize};

/// A point or direction in 3-D space, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(&self, other: &Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn sub(&self, other: &Vec3) -> Vec3 {
        Vec3::new(self.x - other.x, self.y - other.y, self.z - other.z)
    }

    pub fn add(&self, other: &Vec3) -> Vec3 {
        Vec3::new(self.x + other.x, self.y + other.y, self.z + other.z)
    }

    pub fn scale(&self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }

    /// Normalized copy, or `None` if the vector is (numerically) zero.
    pub fn normalized(&self) -> Option<Vec3> {
        let n = self.norm();
        if n < 1e-12 {
            None
        } else {
            Some(self.scale(1.0 / n))
        }
    }

    /// Rotates the vector around the z axis by `yaw_rad` (counterclockwise).
    pub fn rotate_z(&self, yaw_rad: f64) -> Vec3 {
        let (s, c) = yaw_rad.sin_cos();
        Vec3::new(c * self.x - s * self.y, s * self.x + c * self.y, self.z)
    }
}

/// Wraps an angle in degrees into `[0, 360)`.
pub fn wrap_deg(deg: f64) -> f64 {
    let r = deg.rem_euclid(360.0);
    if r >= 360.0 {
        0.0
    } else {
        r
    }
}

/// Unit direction vector for (azimuth, elevation) in degrees.
pub fn unit_from_angles(azimuth_deg: f64, elevation_deg: f64) -> Vec3 {
    let az = azimuth_deg.to_radians();
    let el = elevation_deg.to_radians();
    Vec3::new(az.cos() * el.cos(), az.sin() * el.cos(), el.sin())
}

/// Inverse of [`unit_from_angles`]: (azimuth in `[0, 360)`, elevation in
/// `[-90, 90]`), both degrees. The input need not be normalized.
pub fn angles_from_vec(v: &Vec3) -> (f64, f64) {
    let n = v.norm();
    if n < 1e-12 {
        return (0.0, 0.0);
    }
    let az = wrap_deg(v.y.atan2(v.x).to_degrees());
    let el = (v.z / n).clamp(-1.0, 1.0).asin().to_degrees();
    (az, el)
}

/// Great-circle angle in degrees between two unit-ish directions, in
/// `[0, 180]`.
pub fn angular_separation_deg(a: &Vec3, b: &Vec3) -> f64 {
    let (na, nb) = (a.norm(), b.norm());
    if na < 1e-12 || nb < 1e-12 {
        return 0.0;
    }
    (a.dot(b) / (na * nb)).clamp(-1.0, 1.0).acos().to_degrees()
}

/// Distance from `origin` (inside the box `[0,dims]`) along direction `dir`
/// to the first box face. Returns `f64::INFINITY` for a zero direction.
pub fn ray_box_exit(origin: &Vec3, dir: &Vec3, dims: &Vec3) -> f64 {
    let mut t = f64::INFINITY;
    for (o, d, l) in [
        (origin.x, dir.x, dims.x),
        (origin.y, dir.y, dims.y),
        (origin.z, dir.z, dims.z),
    ] {
        if d > 1e-12 {
            t = t.min((l - o) / d);
        } else if d < -1e-12 {
            t = t.min(-o / d);
        }
    }
    t
}

/// Largest possible listener-to-point distance inside the box: the distance
/// to the farthest corner.
pub fn max_ray_in_box(origin: &Vec3, dims: &Vec3) -> f64 {
    let mut best: f64 = 0.0;
    for cx in [0.0, dims.x] {
        for cy in [0.0, dims.y] {
            for cz in [0.0, dims.z] {
                best = best.max(Vec3::new(cx, cy, cz).sub(origin).norm());
            }
        }
    }
    best
}

/// True when `p` keeps at least `clearance` meters to every face of the box
/// `[0, dims]`.
pub fn inside_with_clearance(p: &Vec3, dims: &Vec3, clearance: f64) -> bool {
    p.x >= clearance
        && p.x <= dims.x - clearance
        && p.y >= clearance
        && p.y <= dims.y - clearance
        && p.z >= clearance
        && p.z <= dims.z - clearance
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_covers_negatives_and_overflow() {
        assert_eq!(wrap_deg(-90.0), 270.0);
        assert_eq!(wrap_deg(360.0), 0.0);
        assert_eq!(wrap_deg(725.0), 5.0);
        assert!(wrap_deg(-1e-12) < 360.0);
    }

    #[test]
    fn angles_round_trip() {
        for &(az, el) in &[(0.0, 0.0), (90.0, 0.0), (317.0, -13.0), (200.5, 45.25)] {
            let v = unit_from_angles(az, el);
            let (az2, el2) = angles_from_vec(&v);
            assert!((az - az2).abs() < 1e-9, "az {az} -> {az2}");
            assert!((el - el2).abs() < 1e-9, "el {el} -> {el2}");
        }
    }

    #[test]
    fn separation_matches_known_angles() {
        let a = unit_from_angles(0.0, 0.0);
        let b = unit_from_angles(90.0, 0.0);
        let c = unit_from_angles(180.0, 0.0);
        assert!((angular_separation_deg(&a, &b) - 90.0).abs() < 1e-9);
        assert!((angular_separation_deg(&a, &c) - 180.0).abs() < 1e-9);
        assert!(angular_separation_deg(&a, &a).abs() < 1e-9);
    }

    #[test]
    fn ray_exit_axis_aligned() {
        let dims = Vec3::new(4.0, 5.0, 3.0);
        let o = Vec3::new(1.0, 2.0, 1.5);
        let d = ray_box_exit(&o, &Vec3::new(1.0, 0.0, 0.0), &dims);
        assert!((d - 3.0).abs() < 1e-12);
        let d = ray_box_exit(&o, &Vec3::new(0.0, -1.0, 0.0), &dims);
        assert!((d - 2.0).abs() < 1e-12);
    }

    #[test]
    fn max_ray_is_far_corner() {
        let dims = Vec3::new(4.0, 4.0, 4.0);
        let o = Vec3::new(1.0, 1.0, 1.0);
        let expect = (9.0f64 + 9.0 + 9.0).sqrt();
        assert!((max_ray_in_box(&o, &dims) - expect).abs() < 1e-12);
    }
}

use chrono::{DateTime, Timelike, Utc};
use serde::{Deserialize, Serialize};

use crate::geometry::Vec3;

/// Solar position seen from the ground.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolarPosition {
    /// Degrees clockwise from true north.
    pub azimuth: f64,
    /// Geometric elevation above the horizon in degrees, without refraction.
    pub elevation: f64,
}

impl SolarPosition {
    /// Elevation including standard atmospheric refraction.
    pub fn apparent_elevation(&self) -> f64 {
        self.elevation + refraction(self.elevation)
    }

    pub fn is_above_horizon(&self) -> bool {
        self.elevation > 0.0
    }

    /// Unit vector towards the sun in the scene frame (+X east, +Y north, +Z up).
    pub fn direction(&self) -> Vec3<f64> {
        let (az, el) = (self.azimuth.to_radians(), self.elevation.to_radians());
        Vec3::new(el.cos() * az.sin(), el.cos() * az.cos(), el.sin())
    }
}

fn julian_day(t: &DateTime<Utc>) -> f64 {
    let secs = t.timestamp() as f64 + t.nanosecond() as f64 * 1e-9;
    secs / 86_400.0 + 2_440_587.5
}

/// Sun azimuth and elevation for a location and UTC instant, using the
/// low-precision solar coordinates of Meeus' Astronomical Algorithms
/// (ch. 25) with the equation of time for the hour angle.
pub fn sun_direction(latitude: f64, longitude: f64, time: &DateTime<Utc>) -> SolarPosition {
    let jd = julian_day(time);
    let t = (jd - 2_451_545.0) / 36_525.0;

    let l0 = (280.46646 + t * (36000.76983 + t * 0.0003032)).rem_euclid(360.0);
    let m = 357.52911 + t * (35999.05029 - t * 0.0001537);
    let e = 0.016_708_634 - t * (0.000_042_037 + t * 0.000_000_126_7);
    let mr = m.to_radians();
    let center = mr.sin() * (1.914_602 - t * (0.004_817 + t * 0.000_014))
        + (2.0 * mr).sin() * (0.019_993 - t * 0.000_101)
        + (3.0 * mr).sin() * 0.000_289;
    let true_long = l0 + center;
    let omega = (125.04 - 1_934.136 * t).to_radians();
    let lambda = (true_long - 0.00569 - 0.00478 * omega.sin()).to_radians();

    let eps0 = 23.0 + (26.0 + (21.448 - t * (46.815 + t * (0.00059 - t * 0.001_813))) / 60.0) / 60.0;
    let eps = (eps0 + 0.00256 * omega.cos()).to_radians();
    let decl = (eps.sin() * lambda.sin()).asin();

    let y = (eps / 2.0).tan().powi(2);
    let l0r = l0.to_radians();
    let eot_minutes = 4.0
        * (y * (2.0 * l0r).sin() - 2.0 * e * mr.sin() + 4.0 * e * y * mr.sin() * (2.0 * l0r).cos()
            - 0.5 * y * y * (4.0 * l0r).sin()
            - 1.25 * e * e * (2.0 * mr).sin())
        .to_degrees();

    let minutes = time.num_seconds_from_midnight() as f64 / 60.0 + time.nanosecond() as f64 * 1e-9 / 60.0;
    let solar_time = (minutes + eot_minutes + 4.0 * longitude).rem_euclid(1440.0);
    let hour_angle = (solar_time / 4.0 - 180.0).to_radians();

    let lat = latitude.to_radians();
    let cos_zenith = (lat.sin() * decl.sin() + lat.cos() * decl.cos() * hour_angle.cos()).clamp(-1.0, 1.0);
    let elevation = 90.0 - cos_zenith.acos().to_degrees();
    let azimuth = (hour_angle.sin().atan2(hour_angle.cos() * lat.sin() - decl.tan() * lat.cos()).to_degrees()
        + 180.0)
        .rem_euclid(360.0);
    SolarPosition { azimuth, elevation }
}

/// Refraction correction in degrees for a geometric elevation.
fn refraction(elevation: f64) -> f64 {
    let arcsec = if elevation > 85.0 {
        0.0
    } else {
        let te = elevation.to_radians().tan();
        if elevation > 5.0 {
            58.1 / te - 0.07 / te.powi(3) + 0.000086 / te.powi(5)
        } else if elevation > -0.575 {
            1735.0 + elevation * (-518.2 + elevation * (103.4 + elevation * (-12.79 + elevation * 0.711)))
        } else {
            -20.772 / te
        }
    };
    arcsec / 3600.0
}

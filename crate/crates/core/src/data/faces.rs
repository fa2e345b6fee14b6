//! Parameterized toy faces with known identities.
//!
//! Identity parameters are fractions of the image side:
//!
//! | parameter     | range          | meaning                                   |
//! |---------------|----------------|-------------------------------------------|
//! | face_width    | [0.50, 0.80]   | head ellipse width                        |
//! | face_height   | [0.60, 0.90]   | head ellipse height                       |
//! | eye_spacing   | [0.20, 0.40]   | distance between eye centres              |
//! | eye_height    | [0.08, 0.20]   | eyes above the head centre                |
//! | mouth_width   | [0.15, 0.35]   | mouth arc width                           |
//! | mouth_curve   | [-0.08, 0.08]  | mouth sag at the centre (positive smiles) |
//!
//! Nuisance parameters: centre jitter within ±2 px on each axis, brightness
//! offset within ±0.05 and additive Gaussian pixel noise with std ≤ 0.02.

use crate::codec::Image;
use crate::error::{Error, Result};
use crate::numerics::RngStream;

pub const FACE_WIDTH: (f64, f64) = (0.50, 0.80);
pub const FACE_HEIGHT: (f64, f64) = (0.60, 0.90);
pub const EYE_SPACING: (f64, f64) = (0.20, 0.40);
pub const EYE_HEIGHT: (f64, f64) = (0.08, 0.20);
pub const MOUTH_WIDTH: (f64, f64) = (0.15, 0.35);
pub const MOUTH_CURVE: (f64, f64) = (-0.08, 0.08);
pub const MAX_JITTER: f64 = 2.0;
pub const MAX_BRIGHTNESS: f64 = 0.05;
pub const MAX_NOISE_STD: f64 = 0.02;

const BACKGROUND: f64 = 0.15;
const SKIN: f64 = 0.75;
const EYE: f64 = 0.10;
const MOUTH: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityParams {
    pub face_width: f64,
    pub face_height: f64,
    pub eye_spacing: f64,
    pub eye_height: f64,
    pub mouth_width: f64,
    pub mouth_curve: f64,
}

impl IdentityParams {
    fn fields(&self) -> [(f64, (f64, f64), &'static str); 6] {
        [
            (self.face_width, FACE_WIDTH, "face_width"),
            (self.face_height, FACE_HEIGHT, "face_height"),
            (self.eye_spacing, EYE_SPACING, "eye_spacing"),
            (self.eye_height, EYE_HEIGHT, "eye_height"),
            (self.mouth_width, MOUTH_WIDTH, "mouth_width"),
            (self.mouth_curve, MOUTH_CURVE, "mouth_curve"),
        ]
    }

    pub fn sample(rng: &mut RngStream) -> Self {
        let mut draw = |(lo, hi): (f64, f64)| lo + (hi - lo) * rng.uniform01();
        IdentityParams {
            face_width: draw(FACE_WIDTH),
            face_height: draw(FACE_HEIGHT),
            eye_spacing: draw(EYE_SPACING),
            eye_height: draw(EYE_HEIGHT),
            mouth_width: draw(MOUTH_WIDTH),
            mouth_curve: draw(MOUTH_CURVE),
        }
    }

    /// Euclidean distance between parameter vectors, each axis normalized by
    /// its range.
    pub fn distance(&self, other: &IdentityParams) -> f64 {
        self.fields()
            .iter()
            .zip(other.fields())
            .map(|((a, (lo, hi), _), (b, _, _))| ((a - b) / (hi - lo)).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NuisanceParams {
    pub jitter_x: f64,
    pub jitter_y: f64,
    pub brightness: f64,
    pub noise_std: f64,
}

impl NuisanceParams {
    pub const NONE: NuisanceParams = NuisanceParams {
        jitter_x: 0.0,
        jitter_y: 0.0,
        brightness: 0.0,
        noise_std: 0.0,
    };

    pub fn sample(rng: &mut RngStream) -> Self {
        NuisanceParams {
            jitter_x: 2.0 * MAX_JITTER * rng.uniform_open(),
            jitter_y: 2.0 * MAX_JITTER * rng.uniform_open(),
            brightness: 2.0 * MAX_BRIGHTNESS * rng.uniform_open(),
            noise_std: MAX_NOISE_STD * rng.uniform01(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceParams {
    pub identity: IdentityParams,
    pub nuisance: NuisanceParams,
}

impl FaceParams {
    pub fn validate(&self) -> Result<()> {
        for (value, (lo, hi), name) in self.identity.fields() {
            if !(lo..=hi).contains(&value) {
                return Err(Error::invalid(format!(
                    "{name} = {value} outside [{lo}, {hi}]"
                )));
            }
        }
        let n = &self.nuisance;
        let checks = [
            (n.jitter_x.abs() <= MAX_JITTER, "jitter_x"),
            (n.jitter_y.abs() <= MAX_JITTER, "jitter_y"),
            (n.brightness.abs() <= MAX_BRIGHTNESS, "brightness"),
            ((0.0..=MAX_NOISE_STD).contains(&n.noise_std), "noise_std"),
        ];
        match checks.iter().find(|(ok, _)| !ok) {
            Some((_, name)) => Err(Error::invalid(format!(
                "nuisance parameter {name} out of range"
            ))),
            None => Ok(()),
        }
    }
}

fn inside_ellipse(u: f64, v: f64, cx: f64, cy: f64, rx: f64, ry: f64) -> bool {
    let dx = (u - cx) / rx;
    let dy = (v - cy) / ry;
    dx * dx + dy * dy <= 1.0
}

fn shade(p: &IdentityParams, side: f64, cx: f64, cy: f64, u: f64, v: f64) -> f64 {
    if !inside_ellipse(
        u,
        v,
        cx,
        cy,
        0.5 * p.face_width * side,
        0.5 * p.face_height * side,
    ) {
        return BACKGROUND;
    }
    let eye_y = cy - p.eye_height * side;
    let (eye_rx, eye_ry) = (0.06 * side, 0.04 * side);
    let half_spacing = 0.5 * p.eye_spacing * side;
    let du = (u - cx).abs();
    if inside_ellipse(du, v, half_spacing, eye_y, eye_rx, eye_ry) {
        return EYE;
    }
    let half_mouth = 0.5 * p.mouth_width * side;
    if du <= half_mouth {
        let t = du / half_mouth;
        let mouth_y = cy + 0.2 * side + p.mouth_curve * side * (1.0 - t * t);
        if (v - mouth_y).abs() <= 0.6 {
            return MOUTH;
        }
    }
    SKIN
}

/// Renders a face with 2×2 supersampling. Pixel noise is drawn from `rng`
/// in raster order.
pub fn render_face(params: &FaceParams, side: usize, rng: &mut RngStream) -> Result<Image> {
    if side < 16 {
        return Err(Error::invalid(format!(
            "face side must be >= 16, got {side}"
        )));
    }
    params.validate()?;
    let s = side as f64;
    let cx = 0.5 * s + params.nuisance.jitter_x;
    let cy = 0.5 * s + params.nuisance.jitter_y;
    let mut pixels = Vec::with_capacity(side * side);
    for y in 0..side {
        for x in 0..side {
            let mut acc = 0.0;
            for (ox, oy) in [(0.25, 0.25), (0.75, 0.25), (0.25, 0.75), (0.75, 0.75)] {
                acc += shade(&params.identity, s, cx, cy, x as f64 + ox, y as f64 + oy);
            }
            let noise = rng.gaussian(0.0, params.nuisance.noise_std)?;
            pixels.push(0.25 * acc + params.nuisance.brightness + noise);
        }
    }
    Image::from_clamped(side, side, pixels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn symmetric_face() -> FaceParams {
        FaceParams {
            identity: IdentityParams {
                face_width: 0.7,
                face_height: 0.8,
                eye_spacing: 0.3,
                eye_height: 0.12,
                mouth_width: 0.25,
                mouth_curve: 0.05,
            },
            nuisance: NuisanceParams::NONE,
        }
    }

    #[test]
    fn deterministic_given_stream() {
        let mut p = symmetric_face();
        p.nuisance.noise_std = 0.02;
        let a = render_face(&p, 32, &mut RngStream::new(4)).unwrap();
        let b = render_face(&p, 32, &mut RngStream::new(4)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn left_right_symmetric_without_nuisance() {
        let img = render_face(&symmetric_face(), 32, &mut RngStream::new(0)).unwrap();
        for y in 0..32 {
            for x in 0..16 {
                assert!((img.get(x, y) - img.get(31 - x, y)).abs() < 1e-12);
            }
        }
        // Not trivially constant.
        assert!(img.pixels().iter().any(|&p| p < 0.2) && img.pixels().iter().any(|&p| p > 0.7));
    }

    #[test]
    fn range_checks() {
        let mut p = symmetric_face();
        p.identity.face_width = 0.95;
        assert!(render_face(&p, 32, &mut RngStream::new(0)).is_err());
        let mut p = symmetric_face();
        p.nuisance.jitter_x = 2.5;
        assert!(render_face(&p, 32, &mut RngStream::new(0)).is_err());
        assert!(render_face(&symmetric_face(), 8, &mut RngStream::new(0)).is_err());
    }

    #[test]
    fn pixels_always_in_unit_range() {
        let mut rng = RngStream::new(12);
        for _ in 0..50 {
            let p = FaceParams {
                identity: IdentityParams::sample(&mut rng),
                nuisance: NuisanceParams::sample(&mut rng),
            };
            let img = render_face(&p, 24, &mut rng).unwrap();
            assert!(img.pixels().iter().all(|v| (0.0..=1.0).contains(v)));
        }
    }
}

use crate::codec::Image;
use crate::error::{Error, Result};

/// Which l_p norm [`ald`] uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    P(u32),
    Inf,
}

fn norm(values: impl Iterator<Item = f64>, p: Norm) -> f64 {
    match p {
        Norm::Inf => values.fold(0.0, |m, v| m.max(v.abs())),
        Norm::P(p) => values
            .map(|v| v.abs().powi(p as i32))
            .sum::<f64>()
            .powf(1.0 / p as f64),
    }
}

/// Euclidean distance between the flattened pixel vectors.
pub fn l2_distance(x: &Image, y: &Image) -> Result<f64> {
    x.same_shape(y)?;
    Ok(x.pixels()
        .iter()
        .zip(y.pixels())
        .map(|(a, b)| (b - a) * (b - a))
        .sum::<f64>()
        .sqrt())
}

/// Average l_p distortion `‖Y − X‖_p / ‖X‖_p`.
pub fn ald(x: &Image, y: &Image, p: Norm) -> Result<f64> {
    x.same_shape(y)?;
    if p == Norm::P(0) {
        return Err(Error::invalid("ALD needs p >= 1"));
    }
    let base = norm(x.pixels().iter().copied(), p);
    if base == 0.0 {
        return Err(Error::invalid(
            "ALD of an all-zero reference image is undefined",
        ));
    }
    let diff = norm(x.pixels().iter().zip(y.pixels()).map(|(a, b)| b - a), p);
    Ok(diff / base)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RngStream;
    use proptest::prelude::*;

    fn random_image(rng: &mut RngStream, side: usize) -> Image {
        Image::new(
            side,
            side,
            (0..side * side).map(|_| rng.uniform01()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn l2_examples() {
        let zero = Image::filled(32, 32, 0.0).unwrap();
        let one = Image::filled(32, 32, 1.0).unwrap();
        assert_eq!(l2_distance(&zero, &zero).unwrap(), 0.0);
        assert_eq!(l2_distance(&zero, &one).unwrap(), 32.0);
        assert!(l2_distance(&zero, &Image::filled(4, 4, 0.0).unwrap()).is_err());
    }

    #[test]
    fn ald_examples() {
        let mut rng = RngStream::new(1);
        let x = Image::new(2, 2, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let y = Image::new(2, 2, vec![0.2, 0.4, 0.6, 0.8]).unwrap();
        for p in [Norm::P(1), Norm::P(2), Norm::P(3), Norm::Inf] {
            assert!((ald(&x, &y, p).unwrap() - 1.0).abs() < 1e-12);
            let r = random_image(&mut rng, 4);
            assert_eq!(ald(&r, &r, p).unwrap(), 0.0);
        }
        let half = Image::filled(4, 4, 0.5).unwrap();
        let three_q = Image::filled(4, 4, 0.75).unwrap();
        assert_eq!(ald(&half, &three_q, Norm::Inf).unwrap(), 0.5);
        assert!(ald(&Image::filled(4, 4, 0.0).unwrap(), &half, Norm::Inf).is_err());
    }

    proptest! {
        #[test]
        fn l2_symmetric_and_triangle(seed in any::<u64>()) {
            let mut rng = RngStream::new(seed);
            let (a, b, c) = (random_image(&mut rng, 5), random_image(&mut rng, 5), random_image(&mut rng, 5));
            prop_assert_eq!(l2_distance(&a, &b).unwrap(), l2_distance(&b, &a).unwrap());
            prop_assert!(l2_distance(&a, &c).unwrap() <= l2_distance(&a, &b).unwrap() + l2_distance(&b, &c).unwrap() + 1e-12);
        }
    }
}

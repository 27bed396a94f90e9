//! Seeded random p-adic values for the sampled checks.

use rand::Rng;

use crate::error::Result;
use crate::padic::{PadicInt, PadicPoint, Prime};

pub fn random_padic<R: Rng + ?Sized>(rng: &mut R, prime: Prime, precision: usize) -> Result<PadicInt> {
    let digits = (0..precision).map(|_| rng.gen_range(0..prime.get())).collect();
    PadicInt::new(prime, digits)
}

pub fn random_point<R: Rng + ?Sized>(rng: &mut R, prime: Prime, arity: usize, precision: usize) -> Result<PadicPoint> {
    let coords = (0..arity)
        .map(|_| random_padic(rng, prime, precision))
        .collect::<Result<Vec<_>>>()?;
    PadicPoint::new(coords)
}

/// A random `y` with `y ≡ x (mod p^k)` for a random `k` in `[0, precision)`,
/// so that pairs at every distance get exercised.
pub fn random_neighbour<R: Rng + ?Sized>(rng: &mut R, x: &PadicInt) -> Result<PadicInt> {
    let n = x.precision();
    let k = rng.gen_range(0..n);
    let mut digits = x.digits().to_vec();
    for d in digits.iter_mut().skip(k) {
        *d = rng.gen_range(0..x.prime().get());
    }
    PadicInt::new(x.prime(), digits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn digits_in_range_and_seeded() {
        let p = Prime::new(5).unwrap();
        let mut a = ChaCha8Rng::seed_from_u64(9);
        let mut b = ChaCha8Rng::seed_from_u64(9);
        let x = random_point(&mut a, p, 3, 10).unwrap();
        let y = random_point(&mut b, p, 3, 10).unwrap();
        assert_eq!(x, y);
        assert!(x.coords().iter().all(|c| c.digits().iter().all(|&d| d < 5)));
        let z = random_neighbour(&mut a, &x.coords()[0]).unwrap();
        assert_eq!(z.precision(), 10);
    }
}

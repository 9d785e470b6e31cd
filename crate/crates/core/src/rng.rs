//! Seed derivation: all randomness in experiments flows from one base seed
//! through stable tags, so records replay bit-for-bit.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn tag_hash(tag: &str) -> u64 {
    // FNV-1a, stable across platforms.
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for b in tag.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Derive a deterministic generator for `(seed, tag, index)`.
pub fn derive_rng(seed: u64, tag: &str, index: u64) -> ChaCha8Rng {
    let s = splitmix(seed ^ tag_hash(tag)).wrapping_add(splitmix(index));
    ChaCha8Rng::seed_from_u64(splitmix(s))
}

/// Random expansion with i.i.d. uniform(-1,1) coefficients.
pub fn random_expansion(
    shape: &crate::geometry::Shape,
    rng: &mut ChaCha8Rng,
    pure_only: bool,
) -> crate::expansion::HaarExpansion {
    use rand::Rng;
    let mut exp = crate::expansion::HaarExpansion::zeros(shape.clone());
    for flat in 0..shape.cells() {
        exp.coeffs_mut()[flat] = rng.gen_range(-1.0..1.0);
    }
    if pure_only {
        exp.pure_part()
    } else {
        exp
    }
}

/// Random signal with i.i.d. uniform(-1,1) cell values.
pub fn random_signal(shape: &crate::geometry::Shape, rng: &mut ChaCha8Rng) -> crate::signal::GridSignal {
    use rand::Rng;
    let values = (0..shape.cells()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    crate::signal::GridSignal::from_values(shape.clone(), values).expect("length matches")
}

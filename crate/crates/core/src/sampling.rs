//! Seeded random instances: points, point pairs and PD matrices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::homfun::{HomogeneousFunction, SEGMENT_SAMPLES};

pub const DEFAULT_SEED: u64 = 42;

/// Diagonal shift added to MᵀM.
pub const PD_SHIFT: f64 = 1e-3;

const MAX_REJECTIONS: usize = 10_000;

/// Independent stream for trial `index` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(index))
}

/// MᵀM + εI with M uniform in [-1, 1]ⁿˣⁿ; strictly PD and exactly symmetric.
pub fn random_pd_matrix<R: Rng>(n: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let m: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect()).collect();
    let mut r = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let v: f64 = (0..n).map(|k| m[k][i] * m[k][j]).sum();
            r[i][j] = v;
            r[j][i] = v;
        }
        r[i][i] += PD_SHIFT;
    }
    r
}

/// Sampling box for a function: [0.5, 2]ⁿ on positive-orthant domains and
/// for monomials, [-2, 2]ⁿ otherwise.
pub fn sampling_box(f: &HomogeneousFunction) -> (f64, f64) {
    use crate::homfun::Family;
    if f.positive_orthant_domain() || f.base_family() == Family::Monomial {
        (0.5, 2.0)
    } else {
        (-2.0, 2.0)
    }
}

pub fn random_vector<R: Rng>(n: usize, lo: f64, hi: f64, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(lo..=hi)).collect()
}

/// A point of f's domain drawn from its sampling box.
pub fn sample_point<R: Rng>(f: &HomogeneousFunction, n: usize, rng: &mut R) -> Vec<f64> {
    let (lo, hi) = sampling_box(f);
    for _ in 0..MAX_REJECTIONS {
        let x = random_vector(n, lo, hi, rng);
        if f.in_domain(&x) {
            return x;
        }
    }
    panic!("no domain point found for {}", f.name());
}

/// A point of the domain with Euclidean norm at least `min_norm`.
pub fn sample_point_away_from_origin<R: Rng>(
    f: &HomogeneousFunction,
    n: usize,
    min_norm: f64,
    rng: &mut R,
) -> Vec<f64> {
    loop {
        let x = sample_point(f, n, rng);
        if x.iter().map(|v| v * v).sum::<f64>().sqrt() >= min_norm {
            return x;
        }
    }
}

/// A pair (a, b) whose connecting segment passes the sampled domain check.
pub fn sample_pair<R: Rng>(f: &HomogeneousFunction, n: usize, rng: &mut R) -> (Vec<f64>, Vec<f64>) {
    for _ in 0..MAX_REJECTIONS {
        let a = sample_point(f, n, rng);
        let b = sample_point(f, n, rng);
        if f.segment_in_domain(&a, &b, SEGMENT_SAMPLES) {
            return (a, b);
        }
    }
    panic!("no admissible segment found for {}", f.name());
}

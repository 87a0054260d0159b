//! Pseudo-random and quasi-random point sets on the unit hypercube.
//!
//! All samplers return a `count x dims` [`Dense`] table, one point per row.

mod sobol_table;

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Open01, Uniform};

use crate::linalg::Dense;
use crate::seed;
use crate::{Error, Result};

/// Highest dimension the bundled Sobol table supports.
pub const SOBOL_MAX_DIMS: usize = sobol_table::TABLE.len() + 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Scheme {
    LatinHypercube,
    Halton,
    Sobol,
    PlainUniform,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SamplerConfig {
    pub scheme: Scheme,
    pub count: usize,
    pub dims: usize,
    /// Only used by the randomized schemes.
    pub seed: u64,
}

impl SamplerConfig {
    pub fn new(scheme: Scheme, count: usize, dims: usize, seed: u64) -> Result<Self> {
        let cfg = SamplerConfig {
            scheme,
            count,
            dims,
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if self.count < 1 || self.dims < 1 {
            return Err(Error::invalid(alloc::format!(
                "sampler needs count >= 1 and dims >= 1, got {} x {}",
                self.count,
                self.dims
            )));
        }
        if self.scheme == Scheme::Sobol && self.dims > SOBOL_MAX_DIMS {
            return Err(Error::invalid(alloc::format!(
                "Sobol table covers {SOBOL_MAX_DIMS} dimensions, requested {}",
                self.dims
            )));
        }
        Ok(())
    }

    fn expect(&self, scheme: Scheme) -> Result<()> {
        if self.scheme != scheme {
            return Err(Error::invalid(alloc::format!(
                "config scheme {:?} passed to the {:?} sampler",
                self.scheme,
                scheme
            )));
        }
        self.validate()
    }
}

/// Dispatches on `config.scheme`.
pub fn sample(config: &SamplerConfig) -> Result<Dense> {
    match config.scheme {
        Scheme::LatinHypercube => lhs_sample(config),
        Scheme::Halton => halton_sample(config),
        Scheme::Sobol => sobol_sample(config),
        Scheme::PlainUniform => uniform_sample(config),
    }
}

/// Latin hypercube sample: in every dimension each interval
/// `[i/count, (i+1)/count)` holds exactly one point. Interval order is a
/// seeded permutation per dimension and the offset inside the interval is
/// drawn from the open unit interval, so every coordinate is strictly inside
/// `(0, 1)`.
pub fn lhs_sample(config: &SamplerConfig) -> Result<Dense> {
    config.expect(Scheme::LatinHypercube)?;
    let (n, d) = (config.count, config.dims);
    let mut rng = seed::rng(config.seed);
    let mut out = Dense::zeros(n, d);
    let mut perm: Vec<usize> = (0..n).collect();
    for j in 0..d {
        perm.shuffle(&mut rng);
        for (i, &bin) in perm.iter().enumerate() {
            let offset: f64 = rng.sample(Open01);
            out[(i, j)] = in_bin(bin, offset, n);
        }
    }
    Ok(out)
}

/// `(bin + offset) / n`, nudged down if rounding pushed it into the next bin.
fn in_bin(bin: usize, offset: f64, n: usize) -> f64 {
    let nf = n as f64;
    let mut x = (bin as f64 + offset) / nf;
    while x >= 1.0 || libm::floor(x * nf) as usize > bin {
        x = x.next_down();
    }
    x
}

fn uniform_sample(config: &SamplerConfig) -> Result<Dense> {
    config.expect(Scheme::PlainUniform)?;
    let mut rng = seed::rng(config.seed);
    let dist = Uniform::new(0.0, 1.0).expect("valid range");
    Ok(Dense::from_fn(config.count, config.dims, |_, _| rng.sample(dist)))
}

/// Reverses the base-`base` digits of `index` about the radix point.
pub fn radical_inverse(mut index: u64, base: u32) -> f64 {
    debug_assert!(base >= 2);
    let b = base as u64;
    let inv_base = 1.0 / base as f64;
    let mut factor = inv_base;
    let mut acc = 0.0;
    while index > 0 {
        acc += (index % b) as f64 * factor;
        index /= b;
        factor *= inv_base;
    }
    acc
}

/// The first `count` primes, in increasing order.
pub fn first_primes(count: usize) -> Vec<u32> {
    let mut primes: Vec<u32> = Vec::with_capacity(count);
    let mut candidate = 2u32;
    while primes.len() < count {
        if primes
            .iter()
            .take_while(|&&p| p * p <= candidate)
            .all(|&p| !candidate.is_multiple_of(p))
        {
            primes.push(candidate);
        }
        candidate += 1;
    }
    primes
}

/// Halton points: row `i` (1-based), dimension `d` is the radical inverse of
/// `i` in the `d`-th prime base. Not scrambled.
pub fn halton_sample(config: &SamplerConfig) -> Result<Dense> {
    config.expect(Scheme::Halton)?;
    let primes = first_primes(config.dims);
    Ok(Dense::from_fn(config.count, config.dims, |i, j| {
        radical_inverse(i as u64 + 1, primes[j])
    }))
}

const SOBOL_BITS: u32 = 32;

/// Direction integers `v_1..v_32` (left-aligned in 32 bits) for one dimension.
fn sobol_directions(dim: usize) -> [u32; SOBOL_BITS as usize] {
    let mut v = [0u32; SOBOL_BITS as usize];
    if dim == 0 {
        for (k, vk) in v.iter_mut().enumerate() {
            *vk = 1u32 << (SOBOL_BITS - 1 - k as u32);
        }
        return v;
    }
    let entry = &sobol_table::TABLE[dim - 1];
    let s = entry.degree as usize;
    for k in 0..s.min(SOBOL_BITS as usize) {
        v[k] = entry.initial[k] << (SOBOL_BITS - 1 - k as u32);
    }
    for k in s..SOBOL_BITS as usize {
        let mut x = v[k - s] ^ (v[k - s] >> s);
        for t in 1..s {
            if (entry.coeffs >> (s - 1 - t)) & 1 == 1 {
                x ^= v[k - t];
            }
        }
        v[k] = x;
    }
    v
}

/// Raw 32-bit Sobol integers in Gray-code order; row `i` is point `i + 1`
/// (the all-zero point is skipped).
pub fn sobol_integers(count: usize, dims: usize) -> Result<Vec<Vec<u32>>> {
    if dims > SOBOL_MAX_DIMS {
        return Err(Error::invalid(alloc::format!(
            "Sobol table covers {SOBOL_MAX_DIMS} dimensions, requested {dims}"
        )));
    }
    if count as u64 >= (1u64 << SOBOL_BITS) {
        return Err(Error::invalid("Sobol count exceeds 2^32 - 1"));
    }
    let dirs: Vec<_> = (0..dims).map(sobol_directions).collect();
    let mut x = alloc::vec![0u32; dims];
    let mut out = Vec::with_capacity(count);
    for i in 0..count as u64 {
        // Index of the lowest zero bit of i selects the direction to flip.
        let c = (!i).trailing_zeros() as usize;
        for (xj, dj) in x.iter_mut().zip(&dirs) {
            *xj ^= dj[c];
        }
        out.push(x.clone());
    }
    Ok(out)
}

/// Sobol points with direction numbers from the bundled Joe–Kuo table.
pub fn sobol_sample(config: &SamplerConfig) -> Result<Dense> {
    config.expect(Scheme::Sobol)?;
    let ints = sobol_integers(config.count, config.dims)?;
    let scale = 1.0 / (1u64 << SOBOL_BITS) as f64;
    Ok(Dense::from_fn(config.count, config.dims, |i, j| ints[i][j] as f64 * scale))
}

/// Inverse of the standard normal CDF.
///
/// Acklam's rational approximation (relative error about 1.15e-9) followed by
/// one Halley step against `erfc`, which brings the result to near machine
/// precision. The upper half is evaluated by symmetry so the tail keeps full
/// relative accuracy.
pub fn inverse_normal_cdf(p: f64) -> f64 {
    debug_assert!(p > 0.0 && p < 1.0);
    if p > 0.5 {
        return -inverse_normal_cdf(1.0 - p);
    }
    const A: [f64; 6] = [
        -3.969683028665376e1,
        2.209460984245205e2,
        -2.759285104469687e2,
        1.383577518672690e2,
        -3.066479806614716e1,
        2.506628277459239e0,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e1,
        1.615858368580409e2,
        -1.556989798598866e2,
        6.680131188771972e1,
        -1.328068155288572e1,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-3,
        -3.223964580411365e-1,
        -2.400758277161838e0,
        -2.549732539343734e0,
        4.374664141464968e0,
        2.938163982698783e0,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-3,
        3.224671290700398e-1,
        2.445134137142996e0,
        3.754408661907416e0,
    ];
    const P_LOW: f64 = 0.02425;

    let x = if p < P_LOW {
        let q = libm::sqrt(-2.0 * libm::log(p));
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };
    let e = 0.5 * libm::erfc(-x / core::f64::consts::SQRT_2) - p;
    let u = e * libm::sqrt(2.0 * core::f64::consts::PI) * libm::exp(0.5 * x * x);
    x - u / (1.0 + 0.5 * x * u)
}

/// Maps unit-interval points to Gaussian marginals, per column
/// `means[j] + stds[j] * inverse_normal_cdf(u)`.
pub fn gaussian_transform(u: &Dense, means: &[f64], stds: &[f64]) -> Result<Dense> {
    let d = u.cols();
    if means.len() != d || stds.len() != d {
        return Err(Error::dims(
            alloc::format!("{d} means and stds"),
            alloc::format!("{} and {}", means.len(), stds.len()),
        ));
    }
    if let Some(j) = stds.iter().position(|s| !(*s >= 0.0) || !s.is_finite()) {
        return Err(Error::invalid(alloc::format!("std {} in dimension {j} is not >= 0", stds[j])));
    }
    let mut out = Dense::zeros(u.rows(), d);
    for i in 0..u.rows() {
        for j in 0..d {
            let p = u[(i, j)];
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::invalid(alloc::format!(
                    "probability {p} at ({i}, {j}) outside the open unit interval"
                )));
            }
            out[(i, j)] = means[j] + stds[j] * inverse_normal_cdf(p);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn cfg(scheme: Scheme, count: usize, dims: usize, seed: u64) -> SamplerConfig {
        SamplerConfig::new(scheme, count, dims, seed).unwrap()
    }

    fn assert_bin_occupancy(t: &Dense) {
        let n = t.rows();
        for j in 0..t.cols() {
            let mut seen = vec![false; n];
            for i in 0..n {
                let x = t[(i, j)];
                assert!((0.0..1.0).contains(&x));
                let b = libm::floor(x * n as f64) as usize;
                assert!(!seen[b], "bin {b} hit twice in dim {j}");
                seen[b] = true;
            }
        }
    }

    #[test]
    fn lhs_single_point() {
        let t = lhs_sample(&cfg(Scheme::LatinHypercube, 1, 5, 3)).unwrap();
        assert_eq!(t.shape(), (1, 5));
        assert!(t.as_slice().iter().all(|x| (0.0..1.0).contains(x)));
    }

    #[test]
    fn lhs_four_bins_permutation() {
        let t = lhs_sample(&cfg(Scheme::LatinHypercube, 4, 1, 11)).unwrap();
        let mut bins: Vec<usize> = (0..4).map(|i| libm::floor(4.0 * t[(i, 0)]) as usize).collect();
        bins.sort();
        assert_eq!(bins, vec![0, 1, 2, 3]);
    }

    #[test]
    fn lhs_seeds_differ_and_both_stratify() {
        let a = lhs_sample(&cfg(Scheme::LatinHypercube, 100, 18, 1)).unwrap();
        let b = lhs_sample(&cfg(Scheme::LatinHypercube, 100, 18, 2)).unwrap();
        assert_ne!(a, b);
        assert_bin_occupancy(&a);
        assert_bin_occupancy(&b);
    }

    #[test]
    fn in_bin_never_spills() {
        let x = in_bin(3, 1.0 - f64::EPSILON / 4.0, 4);
        assert!(x < 1.0);
        assert_eq!(libm::floor(x * 4.0) as usize, 3);
    }

    #[test]
    fn radical_inverse_hand_values() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(3, 2), 0.75);
        assert!((radical_inverse(1, 3) - 1.0 / 3.0).abs() < 1e-16);
        // 5 = 12_3 -> 0.21_3 = 2/3 + 1/9
        assert!((radical_inverse(5, 3) - 7.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn halton_first_rows() {
        let t = halton_sample(&cfg(Scheme::Halton, 2, 2, 0)).unwrap();
        assert_eq!(t[(0, 0)], 0.5);
        assert!((t[(0, 1)] - 1.0 / 3.0).abs() < 1e-16);
        assert_eq!(t[(1, 0)], 0.25);
        assert!((t[(1, 1)] - 2.0 / 3.0).abs() < 1e-15);
        let one = halton_sample(&cfg(Scheme::Halton, 8, 1, 0)).unwrap();
        for i in 0..8 {
            assert_eq!(one[(i, 0)], radical_inverse(i as u64 + 1, 2));
        }
    }

    #[test]
    fn primes_in_order() {
        assert_eq!(first_primes(8), vec![2, 3, 5, 7, 11, 13, 17, 19]);
    }

    #[test]
    fn sobol_first_dimension() {
        let t = sobol_sample(&cfg(Scheme::Sobol, 3, 1, 0)).unwrap();
        assert_eq!(t.column(0), vec![0.5, 0.75, 0.25]);
    }

    #[test]
    fn sobol_dyadic_bins_brute_force() {
        // 2^j - 1 points after the zero-skip: every dyadic interval of width
        // 2^-j holds one point except [0, 2^-j), which held the skipped zero.
        for j in 1..=8u32 {
            let n = (1usize << j) - 1;
            let t = sobol_sample(&cfg(Scheme::Sobol, n, 1, 0)).unwrap();
            let mut counts = vec![0usize; 1 << j];
            for i in 0..n {
                counts[libm::floor(t[(i, 0)] * (1u64 << j) as f64) as usize] += 1;
            }
            assert_eq!(counts[0], 0);
            assert!(counts[1..].iter().all(|&c| c == 1), "j={j}: {counts:?}");
        }
    }

    #[test]
    fn sobol_table_is_well_formed() {
        // Each polynomial has the stated degree and is primitive over GF(2);
        // each initial direction number m_k is odd and below 2^k.
        for (d, e) in sobol_table::TABLE.iter().enumerate() {
            let s = e.degree;
            assert_eq!(e.initial.len(), s as usize, "dim {}", d + 2);
            for (k, &m) in e.initial.iter().enumerate() {
                assert!(m % 2 == 1 && m < (1 << (k + 1)), "dim {} m_{}={m}", d + 2, k + 1);
            }
            let poly = (1u64 << s) | ((e.coeffs as u64) << 1) | 1;
            assert_eq!(multiplicative_order_of_x(poly, s), (1u64 << s) - 1, "dim {}", d + 2);
        }
    }

    /// Order of x modulo `poly` over GF(2); equals 2^s - 1 iff primitive.
    fn multiplicative_order_of_x(poly: u64, s: u32) -> u64 {
        let mut r = 1u64;
        for k in 1..=(1u64 << s) {
            r <<= 1;
            if r >> s & 1 == 1 {
                r ^= poly;
            }
            if r == 1 {
                return k;
            }
        }
        0
    }

    #[test]
    fn sobol_rejects_excess_dims() {
        assert!(SamplerConfig::new(Scheme::Sobol, 4, SOBOL_MAX_DIMS + 1, 0).is_err());
        const { assert!(SOBOL_MAX_DIMS >= 21) };
    }

    #[test]
    fn wrong_scheme_rejected() {
        assert!(halton_sample(&cfg(Scheme::Sobol, 2, 2, 0)).is_err());
    }

    #[test]
    fn gaussian_median_and_degenerate() {
        let u = Dense::filled(3, 2, 0.5);
        let g = gaussian_transform(&u, &[3.0, -1.0], &[2.0, 0.0]).unwrap();
        assert_eq!(g.column(0), vec![3.0; 3]);
        let u2 = Dense::from_rows(&[vec![0.1, 0.9], vec![0.3, 0.999]]).unwrap();
        let g2 = gaussian_transform(&u2, &[5.0, 5.0], &[0.0, 0.0]).unwrap();
        assert!(g2.as_slice().iter().all(|&x| x == 5.0));
    }

    #[test]
    fn gaussian_rejects_closed_endpoints() {
        assert!(gaussian_transform(&Dense::filled(1, 1, 0.0), &[0.0], &[1.0]).is_err());
        assert!(gaussian_transform(&Dense::filled(1, 1, 1.0), &[0.0], &[1.0]).is_err());
        assert!(gaussian_transform(&Dense::filled(1, 1, 0.5), &[0.0], &[-1.0]).is_err());
    }

    #[test]
    fn inverse_cdf_against_independent_erf() {
        use statrs::function::erf::erfc;
        // Oracle: bisection on statrs' erfc-based CDF.
        let cdf = |x: f64| 0.5 * erfc(-x / core::f64::consts::SQRT_2);
        let oracle = |p: f64| {
            let (mut lo, mut hi) = (-40.0f64, 40.0f64);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if cdf(mid) < p {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        let mut probes = vec![1e-12, 1e-9, 1e-6, 1e-3, 0.02425, 0.1, 0.3, 0.5, 0.7, 0.9, 0.97575, 0.999];
        probes.extend([1.0 - 1e-6, 1.0 - 1e-9, 1.0 - 1e-12]);
        for p in probes {
            let got = inverse_normal_cdf(p);
            let want = if p > 0.5 { -oracle(1.0 - p) } else { oracle(p) };
            assert!((got - want).abs() <= 1e-9, "p={p}: {got} vs {want}");
        }
        let phi1 = cdf(1.0);
        assert!((inverse_normal_cdf(phi1) - 1.0).abs() < 1e-3);
    }

    proptest! {
        #[test]
        fn lhs_occupancy_any_seed(seed in any::<u64>(), n in 1usize..40, d in 1usize..6) {
            assert_bin_occupancy(&lhs_sample(&cfg(Scheme::LatinHypercube, n, d, seed)).unwrap());
        }

        #[test]
        fn quasi_random_is_deterministic_and_in_range(n in 1usize..200, d in 1usize..=32) {
            let h1 = halton_sample(&cfg(Scheme::Halton, n, d, 1)).unwrap();
            prop_assert_eq!(&h1, &halton_sample(&cfg(Scheme::Halton, n, d, 99)).unwrap());
            prop_assert!(h1.as_slice().iter().all(|x| (0.0..1.0).contains(x)));
            let s1 = sobol_sample(&cfg(Scheme::Sobol, n, d, 1)).unwrap();
            prop_assert_eq!(&s1, &sobol_sample(&cfg(Scheme::Sobol, n, d, 2)).unwrap());
            prop_assert!(s1.as_slice().iter().all(|&x| x > 0.0 && x < 1.0));
        }

        #[test]
        fn gaussian_transform_is_monotone(a in 1e-12f64..0.999_999, b in 1e-12f64..0.999_999) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let u = Dense::from_rows(&[vec![lo], vec![hi]]).unwrap();
            let g = gaussian_transform(&u, &[1.0], &[2.0]).unwrap();
            prop_assert!(g[(0, 0)] <= g[(1, 0)]);
        }
    }
}

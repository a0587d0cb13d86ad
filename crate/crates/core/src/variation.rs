//! Mutation and crossover operators. All randomness comes from the caller's RNG.

use rand::seq::index;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::bitpop::BitString;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MutationSpec {
    /// Flip each bit independently with probability `chi / n`.
    StandardBit { chi: f64 },
    /// Flip `ell` uniformly chosen ones and `ell` uniformly chosen zeros.
    PairedFlip { ell: usize },
    /// Flip a uniformly chosen set of exactly `radius` positions.
    FixedRadius { radius: usize },
}

impl MutationSpec {
    pub fn validate(&self, n: usize) -> Result<()> {
        match *self {
            MutationSpec::StandardBit { chi } => {
                if !(chi > 0.0 && chi <= n as f64) {
                    return Err(Error::invalid(format!(
                        "chi must lie in (0, n]; got {chi} with n={n}"
                    )));
                }
            }
            MutationSpec::PairedFlip { ell } => {
                if 2 * ell > n {
                    return Err(Error::invalid(format!(
                        "paired flip of {ell} needs n >= {}",
                        2 * ell
                    )));
                }
            }
            MutationSpec::FixedRadius { radius } => {
                if radius > n {
                    return Err(Error::invalid(format!("radius {radius} exceeds n={n}")));
                }
            }
        }
        Ok(())
    }

    /// Validates against `n` and caches per-length sampling state.
    pub fn prepare(&self, n: usize) -> Result<Mutator> {
        self.validate(n)?;
        let flips = match *self {
            MutationSpec::StandardBit { chi } => Some(
                Binomial::new(n as u64, chi / n as f64)
                    .map_err(|e| Error::invalid(format!("flip-count distribution: {e}")))?,
            ),
            _ => None,
        };
        Ok(Mutator {
            spec: *self,
            n,
            flips,
        })
    }
}

/// A [`MutationSpec`] bound to a genotype length.
#[derive(Clone, Debug)]
pub struct Mutator {
    spec: MutationSpec,
    n: usize,
    flips: Option<Binomial>,
}

impl Mutator {
    pub fn spec(&self) -> MutationSpec {
        self.spec
    }

    /// Mutates `x` in place.
    pub fn apply<R: Rng + ?Sized>(&self, x: &mut BitString, rng: &mut R) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::LengthMismatch {
                left: self.n,
                right: x.len(),
            });
        }
        match self.spec {
            MutationSpec::StandardBit { .. } => {
                let m = self.flips.as_ref().expect("prepared").sample(rng) as usize;
                flip_random_subset(x, m, rng);
            }
            MutationSpec::FixedRadius { radius } => flip_random_subset(x, radius, rng),
            MutationSpec::PairedFlip { ell } => {
                if ell > x.count_ones().min(x.count_zeros()) {
                    return Err(Error::invalid(format!(
                        "paired flip of {ell} on a string with {} ones and {} zeros",
                        x.count_ones(),
                        x.count_zeros()
                    )));
                }
                if ell == 0 {
                    return Ok(());
                }
                let ones = x.one_positions();
                let zeros = x.zero_positions();
                for i in index::sample(rng, ones.len(), ell) {
                    x.flip(ones[i]);
                }
                for i in index::sample(rng, zeros.len(), ell) {
                    x.flip(zeros[i]);
                }
            }
        }
        Ok(())
    }
}

fn flip_random_subset<R: Rng + ?Sized>(x: &mut BitString, m: usize, rng: &mut R) {
    match m {
        0 => {}
        1 => x.flip(rng.random_range(0..x.len())),
        _ => {
            for i in index::sample(rng, x.len(), m) {
                x.flip(i);
            }
        }
    }
}

/// Returns a mutated copy of `x`.
pub fn mutate<R: Rng + ?Sized>(
    spec: &MutationSpec,
    x: &BitString,
    rng: &mut R,
) -> Result<BitString> {
    let mutator = spec.prepare(x.len())?;
    let mut y = x.clone();
    mutator.apply(&mut y, rng)?;
    Ok(y)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossoverKind {
    /// Each position copied from a uniformly chosen parent.
    #[default]
    Uniform,
    /// Agreeing positions copied; half of the differing positions set to one.
    Balanced,
    /// Returns one parent unchanged, chosen uniformly.
    Boring,
}

impl CrossoverKind {
    /// Writes the offspring of `x1` and `x2` into `out` (all the same length).
    pub fn apply_into<R: Rng + ?Sized>(
        &self,
        x1: &BitString,
        x2: &BitString,
        out: &mut BitString,
        rng: &mut R,
    ) -> Result<()> {
        if x1.len() != x2.len() || out.len() != x1.len() {
            return Err(Error::LengthMismatch {
                left: x1.len(),
                right: if x1.len() != x2.len() {
                    x2.len()
                } else {
                    out.len()
                },
            });
        }
        match self {
            CrossoverKind::Uniform => {
                let words = out.words_mut();
                for (w, (a, b)) in words.iter_mut().zip(x1.words().iter().zip(x2.words())) {
                    let diff = a ^ b;
                    *w = if diff == 0 {
                        *a
                    } else {
                        a ^ (diff & rng.random::<u64>())
                    };
                }
                out.recount();
            }
            CrossoverKind::Balanced => {
                let differing: Vec<usize> = x1.diff_positions(x2).collect();
                let words = out.words_mut();
                for (w, (a, b)) in words.iter_mut().zip(x1.words().iter().zip(x2.words())) {
                    *w = a & b;
                }
                out.recount();
                let d = differing.len();
                // Odd d rounds down or up with equal probability so the
                // per-position marginal stays 1/2.
                let ones = if d % 2 == 1 && rng.random::<bool>() {
                    d / 2 + 1
                } else {
                    d / 2
                };
                for i in index::sample(rng, d, ones) {
                    out.flip(differing[i]);
                }
            }
            CrossoverKind::Boring => {
                out.copy_from(if rng.random::<bool>() { x1 } else { x2 });
            }
        }
        Ok(())
    }

    pub fn apply<R: Rng + ?Sized>(
        &self,
        x1: &BitString,
        x2: &BitString,
        rng: &mut R,
    ) -> Result<BitString> {
        let mut out = BitString::all_zeros(x1.len());
        self.apply_into(x1, x2, &mut out, rng)?;
        Ok(out)
    }
}

pub fn uniform_crossover<R: Rng + ?Sized>(
    x1: &BitString,
    x2: &BitString,
    rng: &mut R,
) -> Result<BitString> {
    CrossoverKind::Uniform.apply(x1, x2, rng)
}

pub fn balanced_uniform_crossover<R: Rng + ?Sized>(
    x1: &BitString,
    x2: &BitString,
    rng: &mut R,
) -> Result<BitString> {
    CrossoverKind::Balanced.apply(x1, x2, rng)
}

pub fn boring_crossover<R: Rng + ?Sized>(
    x1: &BitString,
    x2: &BitString,
    rng: &mut R,
) -> Result<BitString> {
    CrossoverKind::Boring.apply(x1, x2, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Purpose};
    use std::collections::HashMap;

    fn bs(s: &str) -> BitString {
        BitString::parse(s).unwrap()
    }

    fn rng(seed: u64) -> crate::rng::StreamRng {
        stream(seed, 0, Purpose::Fixture)
    }

    // Pearson statistic against a uniform distribution over `cells` outcomes.
    fn chi_square_uniform(counts: &HashMap<String, u64>, cells: usize, total: u64) -> f64 {
        assert_eq!(counts.len(), cells, "unexpected support: {counts:?}");
        let expected = total as f64 / cells as f64;
        counts
            .values()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum()
    }

    #[test]
    fn paired_flip_zero_is_identity() {
        let x = bs("0011010");
        let y = mutate(&MutationSpec::PairedFlip { ell: 0 }, &x, &mut rng(1)).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn paired_flip_keeps_ones_count_and_checks_range() {
        let x = bs("0011010");
        let mut r = rng(2);
        for _ in 0..100 {
            let y = mutate(&MutationSpec::PairedFlip { ell: 2 }, &x, &mut r).unwrap();
            assert_eq!(y.count_ones(), x.count_ones());
            assert_eq!(crate::bitpop::hamming(&x, &y).unwrap(), 4);
        }
        assert!(mutate(&MutationSpec::PairedFlip { ell: 4 }, &x, &mut r).is_err());
    }

    #[test]
    fn standard_bit_with_chi_n_complements() {
        let x = bs("0011010110");
        let y = mutate(&MutationSpec::StandardBit { chi: 10.0 }, &x, &mut rng(3)).unwrap();
        assert_eq!(y, x.complement());
        assert!(MutationSpec::StandardBit { chi: 0.0 }.validate(10).is_err());
        assert!(MutationSpec::StandardBit { chi: 11.0 }
            .validate(10)
            .is_err());
        assert!(MutationSpec::FixedRadius { radius: 11 }
            .validate(10)
            .is_err());
    }

    #[test]
    fn standard_bit_per_bit_frequency() {
        let n = 100;
        let m = MutationSpec::StandardBit { chi: 1.0 }.prepare(n).unwrap();
        let mut r = rng(4);
        let base = BitString::all_zeros(n);
        let mut flipped_bit7 = 0u64;
        let trials = 1_000_000u64;
        let mut x = base.clone();
        for _ in 0..trials {
            x.copy_from(&base);
            m.apply(&mut x, &mut r).unwrap();
            flipped_bit7 += x.get(7) as u64;
        }
        let p = 0.01;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        let freq = flipped_bit7 as f64 / trials as f64;
        assert!((freq - p).abs() < 3.0 * sigma, "freq {freq}");
    }

    // Binomial count then uniform subset must match independent coin flips.
    #[test]
    fn standard_bit_matches_naive_flip_count_distribution() {
        let n = 12;
        let chi = 2.5;
        let p = chi / n as f64;
        let trials = 200_000;
        let m = MutationSpec::StandardBit { chi }.prepare(n).unwrap();
        let mut r = rng(5);
        let mut fast = vec![0u64; n + 1];
        let mut naive = vec![0u64; n + 1];
        let mut pattern_fast = HashMap::<String, u64>::new();
        let base = BitString::all_zeros(n);
        for _ in 0..trials {
            let mut x = base.clone();
            m.apply(&mut x, &mut r).unwrap();
            fast[x.count_ones()] += 1;
            if x.count_ones() == 1 {
                *pattern_fast.entry(x.to_string()).or_default() += 1;
            }
            let flips = (0..n).filter(|_| r.random::<f64>() < p).count();
            naive[flips] += 1;
        }
        // Two-sample chi-square over flip counts with at least 20 expected hits.
        let mut stat = 0.0;
        let mut dof = 0;
        for c in 0..=n {
            let (a, b) = (fast[c] as f64, naive[c] as f64);
            if a + b >= 40.0 {
                stat += (a - b).powi(2) / (a + b);
                dof += 1;
            }
        }
        assert!(
            stat < dof as f64 + 4.0 * (2.0 * dof as f64).sqrt(),
            "stat {stat} dof {dof}"
        );
        let ones = pattern_fast.values().sum();
        let chi2 = chi_square_uniform(&pattern_fast, n, ones);
        assert!(chi2 < 11.0 + 4.0 * 22f64.sqrt(), "chi2 {chi2}");
    }

    #[test]
    fn class_conditional_flip_rates() {
        // Plateau input 1^6 0^4: ell=1 flips each one w.p. 1/6, each zero w.p. 1/4.
        let x = bs("1111110000");
        let m = MutationSpec::PairedFlip { ell: 1 }.prepare(10).unwrap();
        let f = MutationSpec::FixedRadius { radius: 3 }.prepare(10).unwrap();
        let mut r = rng(6);
        let trials = 200_000u64;
        let (mut one_hit, mut zero_hit, mut radius_hit) = (0u64, 0u64, 0u64);
        for _ in 0..trials {
            let mut y = x.clone();
            m.apply(&mut y, &mut r).unwrap();
            one_hit += !y.get(0) as u64;
            zero_hit += y.get(9) as u64;
            let mut z = x.clone();
            f.apply(&mut z, &mut r).unwrap();
            radius_hit += (z.get(4) != x.get(4)) as u64;
        }
        for (hits, p) in [(one_hit, 1.0 / 6.0), (zero_hit, 0.25), (radius_hit, 0.3)] {
            let sigma = (p * (1.0 - p) / trials as f64).sqrt();
            assert!((hits as f64 / trials as f64 - p).abs() < 3.5 * sigma);
        }
    }

    #[test]
    fn crossover_identical_parents() {
        let x = bs("0110100101110");
        let mut r = rng(7);
        for kind in [
            CrossoverKind::Uniform,
            CrossoverKind::Balanced,
            CrossoverKind::Boring,
        ] {
            assert_eq!(kind.apply(&x, &x, &mut r).unwrap(), x);
        }
        assert!(uniform_crossover(&x, &bs("01"), &mut r).is_err());
    }

    #[test]
    fn uniform_crossover_distribution() {
        let (x1, x2) = (bs("0011"), bs("0101"));
        let mut r = rng(8);
        let mut counts = HashMap::<String, u64>::new();
        let trials = 100_000;
        for _ in 0..trials {
            let c = uniform_crossover(&x1, &x2, &mut r).unwrap();
            *counts.entry(c.to_string()).or_default() += 1;
        }
        for s in ["0011", "0001", "0111", "0101"] {
            assert!(counts.contains_key(s));
        }
        // 3 degrees of freedom; 16.27 is the 0.999 quantile.
        assert!(chi_square_uniform(&counts, 4, trials) < 16.27);
    }

    #[test]
    fn balanced_crossover_distribution() {
        let (x1, x2) = (bs("0011"), bs("1100"));
        let mut r = rng(9);
        let mut counts = HashMap::<String, u64>::new();
        let trials = 100_000;
        for _ in 0..trials {
            let c = balanced_uniform_crossover(&x1, &x2, &mut r).unwrap();
            assert_eq!(c.count_ones(), 2);
            *counts.entry(c.to_string()).or_default() += 1;
        }
        // 5 degrees of freedom; 20.52 is the 0.999 quantile.
        assert!(chi_square_uniform(&counts, 6, trials) < 20.52);
    }

    #[test]
    fn boring_crossover_frequency() {
        let (x1, x2) = (bs("0011"), bs("1100"));
        let mut r = rng(10);
        let trials = 100_000u64;
        let mut first = 0u64;
        for _ in 0..trials {
            let c = boring_crossover(&x1, &x2, &mut r).unwrap();
            assert!(c == x1 || c == x2);
            first += (c == x1) as u64;
        }
        let sigma = (0.25 / trials as f64).sqrt();
        assert!((first as f64 / trials as f64 - 0.5).abs() < 3.0 * sigma);
    }

    proptest::proptest! {
        #[test]
        fn balanced_keeps_plateau(n in 2usize..90, k_frac in 0.0f64..1.0, s1 in proptest::prelude::any::<u64>(), s2 in proptest::prelude::any::<u64>()) {
            let k = ((n as f64 * k_frac) as usize).min(n);
            let mut r = rng(s1 ^ s2);
            let pick = |r: &mut crate::rng::StreamRng| {
                let zeros: Vec<usize> = index::sample(r, n, k).into_vec();
                BitString::with_zeros_at(n, &zeros).unwrap()
            };
            let (a, b) = (pick(&mut r), pick(&mut r));
            let c = balanced_uniform_crossover(&a, &b, &mut r).unwrap();
            proptest::prop_assert_eq!(c.count_zeros(), k);
            for i in 0..n {
                if a.get(i) == b.get(i) {
                    proptest::prop_assert_eq!(c.get(i), a.get(i));
                }
            }
            let u = uniform_crossover(&a, &b, &mut r).unwrap();
            for i in 0..n {
                if a.get(i) == b.get(i) {
                    proptest::prop_assert_eq!(u.get(i), a.get(i));
                }
            }
        }
    }
}

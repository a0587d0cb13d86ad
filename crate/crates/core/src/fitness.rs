//! Unitation benchmarks: OneMax, Jump, Jump with a zero-valued optimum,
//! Jump with an offset valley, and Hurdle.
//!
//! Values are exact: each family has a fixed denominator (1, or `w` for
//! Hurdle) and [`Fitness`] stores the numerator, so comparisons never tie by
//! rounding.

use serde::{Deserialize, Serialize};

use crate::bitpop::BitString;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FitnessSpec {
    OneMax {
        n: usize,
    },
    Jump {
        n: usize,
        k: usize,
    },
    /// Jump whose optimum `1^n` is worth 0, trapping the search on the plateau.
    JumpPrime {
        n: usize,
        k: usize,
    },
    JumpOffset {
        n: usize,
        k: usize,
        delta: usize,
    },
    Hurdle {
        n: usize,
        w: usize,
    },
}

/// Fitness numerator; divide by [`FitnessSpec::denominator`] for the real value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Fitness(pub i64);

impl FitnessSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            FitnessSpec::OneMax { n } => n >= 1,
            FitnessSpec::Jump { n, k } | FitnessSpec::JumpPrime { n, k } => k >= 1 && k <= n,
            FitnessSpec::JumpOffset { n, k, delta } => k >= 1 && k <= n && delta >= 1 && delta <= k,
            FitnessSpec::Hurdle { n, w } => w >= 1 && w <= n,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "invalid fitness parameters: {self:?}"
            )))
        }
    }

    pub fn n(&self) -> usize {
        match *self {
            FitnessSpec::OneMax { n }
            | FitnessSpec::Jump { n, .. }
            | FitnessSpec::JumpPrime { n, .. }
            | FitnessSpec::JumpOffset { n, .. }
            | FitnessSpec::Hurdle { n, .. } => n,
        }
    }

    /// Gap size for the Jump families, hurdle width for Hurdle, 0 for OneMax.
    pub fn gap(&self) -> usize {
        match *self {
            FitnessSpec::OneMax { .. } => 0,
            FitnessSpec::Jump { k, .. }
            | FitnessSpec::JumpPrime { k, .. }
            | FitnessSpec::JumpOffset { k, .. } => k,
            FitnessSpec::Hurdle { w, .. } => w,
        }
    }

    pub fn denominator(&self) -> i64 {
        match *self {
            FitnessSpec::Hurdle { w, .. } => w as i64,
            _ => 1,
        }
    }

    pub fn is_jump_family(&self) -> bool {
        matches!(
            self,
            FitnessSpec::Jump { .. }
                | FitnessSpec::JumpPrime { .. }
                | FitnessSpec::JumpOffset { .. }
        )
    }

    /// Fitness of a string with `ones` one-bits (all families are unitation functions).
    pub fn value_for_ones(&self, ones: usize) -> Fitness {
        let ones_i = ones as i64;
        let v = match *self {
            FitnessSpec::OneMax { .. } => ones_i,
            FitnessSpec::Jump { n, k } => jump(n, k, ones),
            FitnessSpec::JumpPrime { n, k } => {
                if ones == n {
                    0
                } else {
                    jump(n, k, ones)
                }
            }
            FitnessSpec::JumpOffset { n, k, delta } => {
                if ones <= n - k || ones >= n - k + delta {
                    ones_i
                } else {
                    -ones_i
                }
            }
            FitnessSpec::Hurdle { n, w } => {
                // -(ceil(z/w) + rem(z, w)/w), scaled by w.
                let z = (n - ones) as i64;
                let w = w as i64;
                -((z + w - 1) / w * w + z % w)
            }
        };
        Fitness(v)
    }

    pub fn evaluate(&self, x: &BitString) -> Result<Fitness> {
        if x.len() != self.n() {
            return Err(Error::LengthMismatch {
                left: self.n(),
                right: x.len(),
            });
        }
        Ok(self.value_for_ones(x.count_ones()))
    }

    pub fn to_real(&self, f: Fitness) -> f64 {
        f.0 as f64 / self.denominator() as f64
    }

    /// Whether `x` is the target whose sampling ends a run. Jump' has none.
    pub fn is_global_optimum(&self, x: &BitString) -> bool {
        !matches!(self, FitnessSpec::JumpPrime { .. }) && x.count_ones() == self.n()
    }

    /// Ones count of the plateau level: `n - k` for Jump families, `n` for
    /// OneMax, none for Hurdle.
    pub fn plateau_ones(&self) -> Option<usize> {
        match *self {
            FitnessSpec::OneMax { n } => Some(n),
            FitnessSpec::Jump { n, k }
            | FitnessSpec::JumpPrime { n, k }
            | FitnessSpec::JumpOffset { n, k, .. } => Some(n - k),
            FitnessSpec::Hurdle { .. } => None,
        }
    }

    pub fn is_on_plateau(&self, x: &BitString) -> Result<bool> {
        if !self.is_jump_family() {
            return Err(Error::invalid(format!("{self:?} has no plateau")));
        }
        if x.len() != self.n() {
            return Err(Error::LengthMismatch {
                left: self.n(),
                right: x.len(),
            });
        }
        Ok(Some(x.count_ones()) == self.plateau_ones())
    }

    /// Level `i` when `x` has exactly `i * w` zeros, `None` otherwise.
    pub fn hurdle_local_optimum_level(&self, x: &BitString) -> Result<Option<usize>> {
        let FitnessSpec::Hurdle { n, w } = *self else {
            return Err(Error::invalid(format!("{self:?} is not a Hurdle function")));
        };
        if x.len() != n {
            return Err(Error::LengthMismatch {
                left: n,
                right: x.len(),
            });
        }
        let z = x.count_zeros();
        Ok(z.is_multiple_of(w).then_some(z / w))
    }
}

fn jump(n: usize, k: usize, ones: usize) -> i64 {
    if ones == n || ones + k <= n {
        (ones + k) as i64
    } else {
        (n - ones) as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn with_ones(n: usize, ones: usize) -> BitString {
        BitString::with_zeros_at(n, &(0..n - ones).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn jump_examples() {
        let f = FitnessSpec::Jump { n: 10, k: 3 };
        assert_eq!(f.evaluate(&with_ones(10, 7)).unwrap(), Fitness(10));
        assert_eq!(f.evaluate(&with_ones(10, 8)).unwrap(), Fitness(2));
        assert_eq!(f.evaluate(&with_ones(10, 10)).unwrap(), Fitness(13));
    }

    #[test]
    fn jump_offset_examples() {
        let f = FitnessSpec::JumpOffset {
            n: 10,
            k: 4,
            delta: 2,
        };
        assert_eq!(f.evaluate(&with_ones(10, 7)).unwrap(), Fitness(-7));
        assert_eq!(f.evaluate(&with_ones(10, 8)).unwrap(), Fitness(8));
    }

    #[test]
    fn hurdle_example() {
        let f = FitnessSpec::Hurdle { n: 20, w: 5 };
        let x = with_ones(20, 13);
        assert_eq!(f.to_real(f.evaluate(&x).unwrap()), -2.4);
        assert_eq!(f.hurdle_local_optimum_level(&x).unwrap(), None);
        assert_eq!(
            f.hurdle_local_optimum_level(&with_ones(20, 10)).unwrap(),
            Some(2)
        );
        assert_eq!(
            f.hurdle_local_optimum_level(&with_ones(20, 20)).unwrap(),
            Some(0)
        );
        assert!(FitnessSpec::OneMax { n: 20 }
            .hurdle_local_optimum_level(&x)
            .is_err());
    }

    #[test]
    fn plateau_membership() {
        let f = FitnessSpec::Jump { n: 6, k: 2 };
        assert!(!f
            .is_on_plateau(&BitString::parse("110111").unwrap())
            .unwrap());
        assert!(f
            .is_on_plateau(&BitString::parse("110110").unwrap())
            .unwrap());
        assert!(!f.is_on_plateau(&BitString::all_ones(6)).unwrap());
        assert!(FitnessSpec::OneMax { n: 6 }
            .is_on_plateau(&BitString::all_ones(6))
            .is_err());
        assert!(f.is_on_plateau(&BitString::all_ones(5)).is_err());
    }

    #[test]
    fn jump_prime_agrees_except_at_optimum() {
        for n in 1..12 {
            for k in 1..=n {
                let j = FitnessSpec::Jump { n, k };
                let jp = FitnessSpec::JumpPrime { n, k };
                for ones in 0..n {
                    assert_eq!(j.value_for_ones(ones), jp.value_for_ones(ones));
                }
                assert_eq!(jp.value_for_ones(n), Fitness(0));
                assert!(!jp.is_global_optimum(&BitString::all_ones(n)));
                assert!(j.is_global_optimum(&BitString::all_ones(n)));
            }
        }
    }

    #[test]
    fn hurdle_levels_dominate() {
        for n in [20usize, 30, 41] {
            for w in 1..=6 {
                let f = FitnessSpec::Hurdle { n, w };
                for i in 1..=n / w {
                    let at_level = f.value_for_ones(n - i * w);
                    for z in 0..=(i * w - w) {
                        assert!(
                            f.value_for_ones(n - z) > at_level,
                            "n={n} w={w} i={i} z={z}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn jump_offset_orders_like_jump_below_valley_end() {
        for n in 4..14 {
            for k in 1..=n {
                for delta in 1..=k {
                    let off = FitnessSpec::JumpOffset { n, k, delta };
                    let j = FitnessSpec::Jump { n, k };
                    let top = n - k + delta;
                    for a in 0..top {
                        for b in 0..top {
                            assert_eq!(
                                off.value_for_ones(a).cmp(&off.value_for_ones(b)),
                                j.value_for_ones(a).cmp(&j.value_for_ones(b)),
                                "n={n} k={k} delta={delta} a={a} b={b}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn unitation_under_permutation() {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let specs = [
            FitnessSpec::OneMax { n: 30 },
            FitnessSpec::Jump { n: 30, k: 4 },
            FitnessSpec::JumpPrime { n: 30, k: 4 },
            FitnessSpec::JumpOffset {
                n: 30,
                k: 4,
                delta: 2,
            },
            FitnessSpec::Hurdle { n: 30, w: 4 },
        ];
        for _ in 0..200 {
            let mut bits: Vec<bool> = (0..30).map(|_| rand::Rng::random(&mut rng)).collect();
            let x = BitString::from_bits(&bits);
            bits.shuffle(&mut rng);
            let y = BitString::from_bits(&bits);
            for s in &specs {
                assert_eq!(s.evaluate(&x).unwrap(), s.evaluate(&y).unwrap());
            }
        }
    }

    #[test]
    fn validation() {
        assert!(FitnessSpec::Jump { n: 5, k: 0 }.validate().is_err());
        assert!(FitnessSpec::JumpOffset {
            n: 5,
            k: 2,
            delta: 3
        }
        .validate()
        .is_err());
        assert!(FitnessSpec::Hurdle { n: 5, w: 6 }.validate().is_err());
        assert!(FitnessSpec::Jump { n: 5, k: 5 }.validate().is_ok());
        assert!(FitnessSpec::OneMax { n: 5 }
            .evaluate(&BitString::all_ones(4))
            .is_err());
    }
}

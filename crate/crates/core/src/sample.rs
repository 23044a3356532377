//! Seeded generation of group elements and series.
//!
//! All property checks draw from a [`Sampler`] built from a
//! [`SampleSpec`], so a report is reproducible from its seed.

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::group::{GroupDescriptor, GroupElement};
use crate::series::{Precision, Series};
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleSpec {
    pub seed: u64,
    pub count: usize,
}

impl SampleSpec {
    pub fn new(seed: u64, count: usize) -> Self {
        SampleSpec { seed, count }
    }
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec { seed: 0, count: 50 }
    }
}

/// How exponents of surreal groups are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Profile {
    /// Surreal elements of the form `a + b*w`: every positive difference
    /// is either infinite or at least a fixed rational, so geometric
    /// expansions to a finite bound terminate.
    Tame,
    /// Arbitrary nested series with few terms.
    Rich,
}

pub struct Sampler {
    desc: GroupDescriptor,
    rng: ChaCha8Rng,
    pool: Option<Vec<GroupElement>>,
    profile: Profile,
}

impl Sampler {
    pub fn new(desc: GroupDescriptor, seed: u64) -> Self {
        Sampler {
            desc,
            rng: ChaCha8Rng::seed_from_u64(seed),
            pool: None,
            profile: Profile::Tame,
        }
    }

    /// Exponents are drawn from `pool` instead of the whole group.
    pub fn with_pool(desc: GroupDescriptor, seed: u64, pool: Vec<GroupElement>) -> Self {
        assert!(!pool.is_empty(), "exponent pool must be nonempty");
        Sampler {
            pool: Some(pool),
            ..Sampler::new(desc, seed)
        }
    }

    pub fn profile(mut self, profile: Profile) -> Self {
        self.profile = profile;
        self
    }

    pub fn descriptor(&self) -> GroupDescriptor {
        self.desc
    }

    /// Small fixed exponents used before random draws:
    /// `1, -1, 0, 2` in the least-dominant class.
    pub fn basic_exponents(desc: GroupDescriptor) -> Vec<GroupElement> {
        [1, -1, 0, 2]
            .into_iter()
            .map(|n| desc.scalar(Rational::from_integer(n.into())).expect("integers fit every kind"))
            .collect()
    }

    fn small_int(&mut self, bound: i64) -> Rational {
        Rational::from_integer(self.rng.gen_range(-bound..=bound).into())
    }

    fn small_rational(&mut self) -> Rational {
        let num: i64 = self.rng.gen_range(-6..=6);
        let den: i64 = *[1, 1, 1, 2, 3].choose(&mut self.rng).expect("nonempty");
        Rational::new(num.into(), den.into())
    }

    pub fn coefficient(&mut self) -> Rational {
        loop {
            let num: i64 = self.rng.gen_range(-5..=5);
            if num != 0 {
                let den: i64 = *[1, 1, 2, 3].choose(&mut self.rng).expect("nonempty");
                return Rational::new(num.into(), den.into());
            }
        }
    }

    pub fn element(&mut self) -> GroupElement {
        let desc = self.desc;
        self.element_of(desc)
    }

    fn element_of(&mut self, desc: GroupDescriptor) -> GroupElement {
        match desc {
            GroupDescriptor::Integers => GroupElement::integer(self.rng.gen_range(-3i64..=3)),
            GroupDescriptor::Rationals | GroupDescriptor::SurrealDepth(0) => {
                let q = self.small_rational();
                desc.scalar(q).expect("rational kinds")
            }
            GroupDescriptor::LexPower(n) => {
                let coords = (0..n)
                    .map(|_| match self.profile {
                        Profile::Tame => self.small_int(3),
                        Profile::Rich => self.small_rational(),
                    })
                    .collect();
                GroupElement::from_tuple(desc, coords).expect("length n")
            }
            GroupDescriptor::SurrealDepth(d) => {
                let lower = GroupDescriptor::SurrealDepth(d - 1);
                let terms = match self.profile {
                    Profile::Tame => {
                        let finite = self.small_int(3);
                        let infinite = if self.rng.gen_bool(0.3) { self.small_int(2) } else { Rational::zero() };
                        vec![
                            (lower.scalar(Rational::from_integer((-1).into())).expect("scalar"), infinite),
                            (lower.zero(), finite),
                        ]
                    }
                    Profile::Rich => {
                        let n = self.rng.gen_range(0..=3);
                        (0..n).map(|_| (self.element_of(lower), self.coefficient())).collect()
                    }
                };
                let s = Series::from_terms(lower, terms, Precision::Infinite).expect("same group");
                GroupElement::from_series(desc, s).expect("exact series")
            }
        }
    }

    pub fn exponent(&mut self) -> GroupElement {
        match &self.pool {
            Some(pool) => pool.choose(&mut self.rng).expect("nonempty pool").clone(),
            None => self.element(),
        }
    }

    /// Exact series with up to `max_terms` terms (possibly zero).
    pub fn series(&mut self, max_terms: usize) -> Series {
        let n = self.rng.gen_range(0..=max_terms);
        self.series_with(n)
    }

    /// Exact nonzero series with between 1 and `max_terms` terms.
    pub fn nonzero_series(&mut self, max_terms: usize) -> Series {
        loop {
            let n = self.rng.gen_range(1..=max_terms.max(1));
            let s = self.series_with(n);
            if !s.terms().is_empty() {
                return s;
            }
        }
    }

    fn series_with(&mut self, n: usize) -> Series {
        let terms = (0..n).map(|_| (self.exponent(), self.coefficient())).collect();
        Series::from_terms(self.desc, terms, Precision::Infinite).expect("sampled exponents belong to the group")
    }

    /// Truncates an exact series at a random bound, sometimes leaving it
    /// exact. The bound lies above the valuation, so a leading term stays
    /// known when there was one.
    pub fn maybe_truncate(&mut self, s: Series) -> Series {
        if self.rng.gen_bool(0.4) {
            return s;
        }
        let extra = self.element();
        let lift = self.desc.scalar(Rational::from_integer(self.rng.gen_range(1..=4).into())).expect("scalar");
        let bound = match s.valuation() {
            Some(v) => {
                let candidate = v.plus(&extra);
                if candidate > *v {
                    candidate
                } else {
                    v.plus(&lift)
                }
            }
            None => extra,
        };
        s.truncate_to(&bound)
    }

    pub fn coin(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }
}

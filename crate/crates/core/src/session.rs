use crate::aut::{ApplyContext, Automorphism};
use crate::error::Result;
use crate::group::GroupDescriptor;
use crate::sample::SampleSpec;
use crate::series::{Precision, Series};
use crate::syntax::{self, Notation};

/// Settings shared by parsing, formatting and property checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SessionConfig {
    pub group: GroupDescriptor,
    pub precision: Precision,
    pub notation: Notation,
    pub seed: u64,
    pub sample_count: usize,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig {
            group: GroupDescriptor::Rationals,
            precision: Precision::Infinite,
            notation: Notation::T,
            seed: 0,
            sample_count: 50,
        }
    }
}

impl SessionConfig {
    pub fn new(group: GroupDescriptor) -> Self {
        SessionConfig {
            group,
            ..SessionConfig::default()
        }
    }

    pub fn sample_spec(&self) -> SampleSpec {
        SampleSpec::new(self.seed, self.sample_count.max(1))
    }

    pub fn apply_context(&self) -> ApplyContext {
        ApplyContext::with_precision(self.precision.clone())
    }

    pub fn parse_series(&self, text: &str) -> Result<Series> {
        syntax::parse_series(text, self.group, self.notation)
    }

    pub fn format_series(&self, s: &Series) -> String {
        syntax::format_series(s, self.notation)
    }

    pub fn load_aut(&self, text: &str) -> Result<Automorphism> {
        syntax::parse_aut(text, self)
    }

    pub fn format_aut(&self, a: &Automorphism) -> String {
        syntax::format_aut(a, self.notation)
    }
}

use crate::error::{Error, Result};

/// Environment variable that overrides [`Limits::max_states`].
pub const MAX_STATES_ENV: &str = "GENBOUND_MAX_STATES";

/// Size guards for exact enumeration. Exact mode fails loudly instead of
/// degrading when a guard is hit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Cap on the number of outcome tuples an exact joint may span.
    pub max_states: u128,
    /// Cap on the number of partitions materialised by enumeration.
    pub max_partitions: u128,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_states: 100_000_000, max_partitions: 1_000_000 }
    }
}

impl Limits {
    /// Defaults, with `max_states` taken from `GENBOUND_MAX_STATES` if set.
    pub fn from_env() -> Result<Self> {
        let mut l = Limits::default();
        if let Ok(v) = std::env::var(MAX_STATES_ENV) {
            l.max_states = v.trim().parse().map_err(|_| {
                Error::InvalidArgument(format!("{MAX_STATES_ENV}=`{v}` is not a non-negative integer"))
            })?;
        }
        Ok(l)
    }

    pub fn check_states(&self, what: &str, needed: Option<u128>) -> Result<()> {
        check(what, needed, self.max_states)
    }

    pub fn check_partitions(&self, what: &str, needed: Option<u128>) -> Result<()> {
        check(what, needed, self.max_partitions)
    }
}

fn check(what: &str, needed: Option<u128>, cap: u128) -> Result<()> {
    match needed {
        Some(n) if n <= cap => Ok(()),
        Some(n) => Err(Error::GuardExceeded { what: what.to_string(), needed: n, cap }),
        None => Err(Error::GuardExceeded { what: what.to_string(), needed: u128::MAX, cap }),
    }
}

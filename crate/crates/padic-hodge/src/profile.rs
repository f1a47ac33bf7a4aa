//! Shared precision profile validated up front.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// One bundle of precision parameters shared by the period-ring and
/// (phi,Gamma) layers.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Profile {
    /// Odd prime.
    pub p: u64,
    /// Coefficient precision exponent M (work mod p^M).
    pub m_exp: u32,
    /// Tilt level m: sequences carry components 0..=level.
    pub level: u32,
    /// Maximal filtration depth N for fil_order / t / log[p-tilde].
    pub fil_depth: u32,
    /// Witt length for period-ring digit expansions.
    pub witt_len: u32,
    /// Numerical rank threshold tau.
    pub tau: u32,
}

impl Profile {
    pub fn new(p: u64, m_exp: u32, level: u32, fil_depth: u32, witt_len: u32, tau: u32) -> Result<Self> {
        let prof = Profile { p, m_exp, level, fil_depth, witt_len, tau };
        prof.validate()?;
        Ok(prof)
    }

    /// Defaults from the design notes: level 4, M 8, N 4, tau = ceil(M/2).
    pub fn default_for(p: u64) -> Result<Self> {
        Profile::new(p, 8, 4, 4, 8, 4)
    }

    pub fn validate(&self) -> Result<()> {
        if self.p < 3 || self.p % 2 == 0 {
            return Err(Error::Config(format!("p must be an odd prime, got {}", self.p)));
        }
        if !is_prime(self.p) {
            return Err(Error::Config(format!("p must be prime, got {}", self.p)));
        }
        if self.m_exp == 0 {
            return Err(Error::Config("precision M must be positive".into()));
        }
        if self.tau >= self.m_exp {
            return Err(Error::Config(format!(
                "threshold tau = {} must be below precision M = {}",
                self.tau, self.m_exp
            )));
        }
        if self.level + 1 < self.fil_depth {
            return Err(Error::Config(format!(
                "tilt level m = {} too small for fil depth N = {} (need m >= N - 1)",
                self.level, self.fil_depth
            )));
        }
        if self.witt_len < self.m_exp {
            return Err(Error::Config(format!(
                "witt length {} below precision M = {} (theta needs p^i digits, i < M)",
                self.witt_len, self.m_exp
            )));
        }
        Ok(())
    }

    /// tau default rule.
    pub fn default_tau(m_exp: u32) -> u32 {
        m_exp.div_ceil(2)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_even_prime() {
        assert!(Profile::new(2, 8, 4, 4, 8, 4).is_err());
    }

    #[test]
    fn rejects_low_level() {
        assert!(Profile::new(3, 8, 2, 4, 8, 4).is_err());
    }

    #[test]
    fn defaults_validate() {
        for p in [3, 5, 7] {
            Profile::default_for(p).unwrap();
        }
    }
}

use serde::{Deserialize, Serialize};

/// Numerical slack used by every equality and positivity decision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Entrywise (or probewise) equality slack.
    pub eps_eq: f64,
    /// Slack allowed below zero when deciding positivity.
    pub eps_psd: f64,
    /// Number of reserved tail points inspected for symbolic functions.
    pub probe_count: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            eps_eq: 1e-9,
            eps_psd: 1e-8,
            probe_count: 64,
        }
    }
}

impl Tolerance {
    pub fn new(eps_eq: f64, eps_psd: f64, probe_count: usize) -> Option<Self> {
        let t = Self {
            eps_eq,
            eps_psd,
            probe_count,
        };
        t.is_valid().then_some(t)
    }

    pub fn is_valid(&self) -> bool {
        self.eps_eq > 0.0 && self.eps_psd > 0.0 && self.probe_count > 0 && self.eps_eq <= self.eps_psd
    }

    /// Tolerance used inside order bisection: the positivity slack is
    /// shrunk so the bisection limit sits on the true bound rather than
    /// `eps_psd` below it.
    pub fn sharp(&self) -> Self {
        Self {
            eps_eq: self.eps_eq * 1e-3,
            eps_psd: self.eps_eq * 1e-3,
            probe_count: self.probe_count,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let t = Tolerance::default();
        assert!(t.is_valid());
        assert!(t.sharp().is_valid());
        assert!(Tolerance::new(1e-6, 1e-9, 4).is_none());
        assert!(Tolerance::new(0.0, 1e-9, 4).is_none());
    }
}

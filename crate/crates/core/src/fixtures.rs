//! Synthesis problems shipped with the crate, with goldens recorded from
//! verified solver runs.

use serde::Deserialize;

use crate::synthesis::{GateTarget, PulseIntegers, SynthesisProblem};

const SOURCES: [(&str, &str); 12] = [
    ("a11_mixed", include_str!("../fixtures/synthesis/a11_mixed.json")),
    ("a12_uniform", include_str!("../fixtures/synthesis/a12_uniform.json")),
    ("a12_mixed", include_str!("../fixtures/synthesis/a12_mixed.json")),
    ("a21_uniform", include_str!("../fixtures/synthesis/a21_uniform.json")),
    ("a22_uniform", include_str!("../fixtures/synthesis/a22_uniform.json")),
    ("a22_mixed", include_str!("../fixtures/synthesis/a22_mixed.json")),
    ("a31_uniform", include_str!("../fixtures/synthesis/a31_uniform.json")),
    ("a32_mixed", include_str!("../fixtures/synthesis/a32_mixed.json")),
    ("a32_uniform", include_str!("../fixtures/synthesis/a32_uniform.json")),
    ("a11_no_real_xi", include_str!("../fixtures/synthesis/a11_no_real_xi.json")),
    ("a12_isotropic", include_str!("../fixtures/synthesis/a12_isotropic.json")),
    ("a21_isotropic", include_str!("../fixtures/synthesis/a21_isotropic.json")),
];

#[derive(Debug, Clone, Deserialize)]
pub struct Golden {
    pub total_time: f64,
    pub t: f64,
    pub t_prime: f64,
    pub xi: f64,
    pub chi: f64,
    pub integers: PulseIntegers,
}

#[derive(Debug, Clone, Deserialize)]
pub struct Expectation {
    pub feasible: bool,
    #[serde(flatten)]
    pub golden: Option<Golden>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct SynthesisFixture {
    pub name: String,
    pub target: GateTarget,
    pub problem: SynthesisProblem<f64>,
    pub expected: Expectation,
}

/// Raw JSON of a fixture by name.
pub fn synthesis_fixture_source(name: &str) -> Option<&'static str> {
    SOURCES.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn synthesis_fixtures() -> Vec<SynthesisFixture> {
    SOURCES
        .iter()
        .map(|(name, src)| serde_json::from_str(src).unwrap_or_else(|e| panic!("fixture {name}: {e}")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_parse_and_cover_every_direction() {
        let all = synthesis_fixtures();
        for h in crate::ising::Direction::ALL {
            let feasible = all.iter().filter(|f| f.target.h() == h && f.expected.feasible).count();
            assert!(feasible >= 3, "direction {h}: {feasible}");
        }
        assert!(all.iter().any(|f| !f.expected.feasible));
        for f in &all {
            assert_eq!(f.expected.feasible, f.expected.golden.is_some(), "{}", f.name);
            assert_eq!(f.problem.alpha_diag, f.target.alpha_diag(), "{}", f.name);
        }
    }
}

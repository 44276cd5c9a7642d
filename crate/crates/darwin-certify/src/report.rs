//! Report documents: machine-readable JSON plus a tabular CSV rendering.
//!
//! Every float is rounded to 12 significant digits before serialization and
//! every collection has a fixed order, so identical scenario+seed inputs
//! produce byte-identical files. Certified values always travel with their
//! certificate gaps.

use serde::{Deserialize, Serialize};

use crate::bounds::Verdict;
use crate::ontology::round_sig12;

/// Formats a float with 12 significant digits for tabular output.
pub fn fmt_sig12(x: f64) -> String {
    format!("{:.11e}", x)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IndependenceBlock {
    pub independent: bool,
    pub rank: usize,
    pub marginal: bool,
    pub singular_values: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelBlock {
    pub export_path: Option<String>,
    pub reproduction_checked: usize,
    pub reproduction_max_residual: f64,
    pub reproduction_passed: bool,
    pub context_pairs_checked: usize,
    pub context_failures: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BobBlock {
    pub index: usize,
    pub dim: usize,
    pub eta: f64,
    pub eta_lower: f64,
    pub eta_upper: f64,
    pub eta_gap: f64,
    pub eta_converged: bool,
    pub worst_state_digest: String,
    pub worst_pointer_distribution: Vec<f64>,
    pub independence: IndependenceBlock,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelBlock>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CutoffBlock {
    pub p_hat: f64,
    pub maximin: f64,
    pub gap: f64,
    pub converged: bool,
    pub boundary: bool,
    pub optimal_weights: Vec<f64>,
    pub witness_state_digest: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AgreementBlock {
    /// λ_min of the weighted pointer operator with each observer measuring
    /// its optimal discriminating POVM.
    pub probability: f64,
    /// 1 − 6t(1−η)^{1/4} at the certified η lower bound.
    pub lower_bound: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeviationBlock {
    /// Observer the block refers to (worst across observers).
    pub bob: usize,
    pub effect_constant: f64,
    pub diamond_upper: f64,
    pub diamond_lower: f64,
    pub diamond_gap: f64,
    pub l1_bound: f64,
    pub observed_l1: f64,
    /// Environment-size deviation bound at the scenario's delta.
    pub env_size_bound: f64,
    pub env_size_delta: f64,
    pub env_qubits: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificationReport {
    pub scenario: String,
    pub seed: u64,
    pub system_dim: usize,
    pub bob_dims: Vec<usize>,
    pub pointer_outcomes: usize,
    pub process_eta: f64,
    pub process_eta_lower: f64,
    pub process_eta_upper: f64,
    pub process_eta_gap: f64,
    pub cutoff: CutoffBlock,
    pub verdict: Verdict,
    pub combined_tolerance: f64,
    pub bobs: Vec<BobBlock>,
    pub agreement: AgreementBlock,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deviation: Option<DeviationBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub channel_export_path: Option<String>,
}

impl CertificationReport {
    /// Rounds every float field to export precision, in place.
    pub fn round_for_export(&mut self) {
        let r = round_sig12;
        self.process_eta = r(self.process_eta);
        self.process_eta_lower = r(self.process_eta_lower);
        self.process_eta_upper = r(self.process_eta_upper);
        self.process_eta_gap = r(self.process_eta_gap);
        self.combined_tolerance = r(self.combined_tolerance);
        self.cutoff.p_hat = r(self.cutoff.p_hat);
        self.cutoff.maximin = r(self.cutoff.maximin);
        self.cutoff.gap = r(self.cutoff.gap);
        for w in self.cutoff.optimal_weights.iter_mut() {
            *w = r(*w);
        }
        self.agreement.probability = r(self.agreement.probability);
        self.agreement.lower_bound = r(self.agreement.lower_bound);
        for bob in self.bobs.iter_mut() {
            bob.eta = r(bob.eta);
            bob.eta_lower = r(bob.eta_lower);
            bob.eta_upper = r(bob.eta_upper);
            bob.eta_gap = r(bob.eta_gap);
            for p in bob.worst_pointer_distribution.iter_mut() {
                *p = r(*p);
            }
            for s in bob.independence.singular_values.iter_mut() {
                *s = r(*s);
            }
            if let Some(model) = bob.model.as_mut() {
                model.reproduction_max_residual = r(model.reproduction_max_residual);
            }
        }
        if let Some(dev) = self.deviation.as_mut() {
            dev.effect_constant = r(dev.effect_constant);
            dev.diamond_upper = r(dev.diamond_upper);
            dev.diamond_lower = r(dev.diamond_lower);
            dev.diamond_gap = r(dev.diamond_gap);
            dev.l1_bound = r(dev.l1_bound);
            dev.observed_l1 = r(dev.observed_l1);
            dev.env_size_bound = r(dev.env_size_bound);
            dev.env_size_delta = r(dev.env_size_delta);
        }
    }

    pub fn to_json(&self) -> String {
        let mut doc = self.clone();
        doc.round_for_export();
        let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
        text.push('\n');
        text
    }

    /// One header row plus one row per observer.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "bob,eta,eta_gap,p_hat,p_hat_gap,verdict,independent,marginal,agreement,agreement_bound,reproduction_residual\n",
        );
        for bob in &self.bobs {
            let residual = bob
                .model
                .as_ref()
                .map(|m| fmt_sig12(m.reproduction_max_residual))
                .unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{}\n",
                bob.index,
                fmt_sig12(bob.eta),
                fmt_sig12(bob.eta_gap),
                fmt_sig12(self.cutoff.p_hat),
                fmt_sig12(self.cutoff.gap),
                self.verdict,
                bob.independence.independent,
                bob.independence.marginal,
                fmt_sig12(self.agreement.probability),
                fmt_sig12(self.agreement.lower_bound),
                residual,
            ));
        }
        out
    }
}

/// One grid point of a parameter sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub index: usize,
    pub value: f64,
    pub eta: f64,
    pub eta_gap: f64,
    pub p_hat: f64,
    pub verdict: Verdict,
    pub independent: bool,
    pub marginal: bool,
    pub agreement: f64,
    pub agreement_bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diamond_upper: Option<f64>,
}

/// Sweep output: rows in grid order and the first bracket where η crosses P̂.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepTable {
    pub parameter: String,
    pub rows: Vec<SweepRow>,
    /// Consecutive grid values between which η − P̂ changes sign.
    pub crossing: Option<(f64, f64)>,
}

impl SweepTable {
    pub fn compute_crossing(rows: &[SweepRow]) -> Option<(f64, f64)> {
        let sign = |x: f64| -> i8 {
            if x > 0.0 {
                1
            } else if x < 0.0 {
                -1
            } else {
                0
            }
        };
        for pair in rows.windows(2) {
            let a = sign(pair[0].eta - pair[0].p_hat);
            let b = sign(pair[1].eta - pair[1].p_hat);
            if a != b {
                return Some((pair[0].value, pair[1].value));
            }
        }
        None
    }

    /// Comma-separated rendering: one header row, `\n` line endings, floats
    /// at 12 significant digits.
    pub fn to_csv(&self) -> String {
        let has_diamond = self.rows.iter().any(|r| r.diamond_upper.is_some());
        let mut out = String::from(
            "index,value,eta,eta_gap,p_hat,verdict,independent,marginal,agreement,agreement_bound",
        );
        if has_diamond {
            out.push_str(",diamond_upper");
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}",
                row.index,
                fmt_sig12(row.value),
                fmt_sig12(row.eta),
                fmt_sig12(row.eta_gap),
                fmt_sig12(row.p_hat),
                row.verdict,
                row.independent,
                row.marginal,
                fmt_sig12(row.agreement),
                fmt_sig12(row.agreement_bound),
            ));
            if has_diamond {
                out.push(',');
                if let Some(d) = row.diamond_upper {
                    out.push_str(&fmt_sig12(d));
                }
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig12_formatting() {
        assert_eq!(fmt_sig12(0.75), "7.50000000000e-1");
        assert_eq!(fmt_sig12(1.0), "1.00000000000e0");
    }

    #[test]
    fn crossing_detection() {
        let row = |i: usize, value: f64, eta: f64| SweepRow {
            index: i,
            value,
            eta,
            eta_gap: 0.0,
            p_hat: 0.75,
            verdict: Verdict::Marginal,
            independent: true,
            marginal: false,
            agreement: 1.0,
            agreement_bound: 0.0,
            diamond_upper: None,
        };
        let rows = vec![row(0, 0.0, 1.0), row(1, 0.5, 0.8), row(2, 1.0, 0.5)];
        let crossing = SweepTable::compute_crossing(&rows).unwrap();
        assert_eq!(crossing, (0.5, 1.0));
        let rows = vec![row(0, 0.0, 1.0)];
        assert!(SweepTable::compute_crossing(&rows).is_none());
    }
}

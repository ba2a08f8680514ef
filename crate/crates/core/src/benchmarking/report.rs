//! Summary of gate quality estimates.

use serde::{Deserialize, Serialize};

use crate::benchmarking::channel::average_from_process;
use crate::benchmarking::rb::RbFidelity;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    pub process_fidelity: Option<f64>,
    pub average_gate_fidelity: Option<f64>,
    pub rb_fidelity: Option<f64>,
    /// 90% interval.
    pub rb_confidence_interval: Option<(f64, f64)>,
    pub coherence_limit: Option<f64>,
}

impl FidelityReport {
    pub fn with_process(mut self, process_fidelity: f64) -> Self {
        self.process_fidelity = Some(process_fidelity);
        self.average_gate_fidelity = Some(average_from_process(process_fidelity));
        self
    }

    pub fn with_rb(mut self, rb: RbFidelity) -> Self {
        self.rb_fidelity = Some(rb.fidelity);
        self.rb_confidence_interval = Some(rb.interval);
        self
    }

    pub fn with_coherence_limit(mut self, f: f64) -> Self {
        self.coherence_limit = Some(f);
        self
    }

    /// `F = 97.0% ± 0.7%`, with the larger side of the interval as the margin.
    pub fn rb_summary(&self) -> Option<String> {
        let f = self.rb_fidelity?;
        let (lo, hi) = self.rb_confidence_interval?;
        let margin = (f - lo).max(hi - f);
        Some(format!("F = {:.1}% ± {:.1}%", 100.0 * f, 100.0 * margin))
    }

    /// Line-oriented `key: value` text.
    pub fn to_text(&self) -> String {
        let pct = |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{:.3}%", 100.0 * x));
        let mut s = String::new();
        s += &format!("process_fidelity: {}\n", pct(self.process_fidelity));
        s += &format!("average_gate_fidelity: {}\n", pct(self.average_gate_fidelity));
        s += &format!("rb_fidelity: {}\n", pct(self.rb_fidelity));
        let ci = self
            .rb_confidence_interval
            .map_or("n/a".to_string(), |(lo, hi)| format!("[{:.3}%, {:.3}%]", 100.0 * lo, 100.0 * hi));
        s += &format!("rb_confidence_interval_90: {ci}\n");
        s += &format!("coherence_limit: {}\n", pct(self.coherence_limit));
        if let Some(line) = self.rb_summary() {
            s += &format!("summary: {line}\n");
        }
        s
    }
}

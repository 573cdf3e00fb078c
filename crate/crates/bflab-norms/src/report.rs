//! Norm reports: named nonnegative terms, their sum, and enough metadata to
//! reproduce the estimate.

use std::collections::BTreeMap;

use bflab_spectral::{pair_policy, Grid};

#[derive(Debug, Clone)]
pub struct NormReport {
    total: f64,
    terms: BTreeMap<String, f64>,
    alpha: f64,
    t_cap: f64,
    times: Vec<f64>,
    grid: Grid,
}

impl NormReport {
    pub(crate) fn new(
        terms: BTreeMap<String, f64>,
        alpha: f64,
        t_cap: f64,
        times: Vec<f64>,
        grid: Grid,
    ) -> Self {
        debug_assert!(terms.values().all(|v| *v >= 0.0));
        let total = terms.values().sum();
        NormReport { total, terms, alpha, t_cap, times, grid }
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn terms(&self) -> &BTreeMap<String, f64> {
        &self.terms
    }

    pub fn term(&self, name: &str) -> Option<f64> {
        self.terms.get(name).copied()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn t_cap(&self) -> f64 {
        self.t_cap
    }

    pub fn to_json(&self) -> String {
        let value = serde_json::json!({
            "total": self.total,
            "terms": self.terms,
            "alpha": self.alpha,
            "T": self.t_cap,
            "grid": {
                "dim": self.grid.dim(),
                "points_per_axis": self.grid.points_per_axis(),
                "period": self.grid.period(),
            },
            "time_grid": self.times,
            "pair_policy": pair_policy(&self.grid),
        });
        serde_json::to_string_pretty(&value).expect("report serialization cannot fail")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn total_is_the_sum_of_terms_and_json_carries_metadata() {
        let mut terms = BTreeMap::new();
        terms.insert("a".to_string(), 1.5);
        terms.insert("b".to_string(), 0.25);
        let grid = Grid::standard(1, 16).unwrap();
        let report = NormReport::new(terms, 0.5, 1.0, vec![0.25, 0.5, 1.0], grid);
        assert_eq!(report.total(), 1.75);
        let json: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(json["terms"]["a"], 1.5);
        assert_eq!(json["alpha"], 0.5);
        assert_eq!(json["grid"]["points_per_axis"], 16);
        assert!(json["pair_policy"].as_str().unwrap().contains("quarter-period"));
    }
}

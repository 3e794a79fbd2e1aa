use serde::Serialize;

use crate::scalars::Valuation;

/// Evidence attached to a computed dimension table.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Certificate {
    /// Smallest pivot valuation met over all eliminations (`None` if no pivots).
    pub min_pivot_valuation: Option<Valuation>,
    pub max_pivot_valuation: Option<Valuation>,
    /// Working precision, absent for exact arithmetic.
    pub precision: Option<u32>,
    pub slack: i64,
}

impl Certificate {
    pub fn exact() -> Certificate {
        Certificate::default()
    }

    pub fn record_pivot(&mut self, v: Valuation) {
        self.min_pivot_valuation = Some(self.min_pivot_valuation.map_or(v, |m| m.min(v)));
        self.max_pivot_valuation = Some(self.max_pivot_valuation.map_or(v, |m| m.max(v)));
    }

    pub fn merge(&mut self, o: &Certificate) {
        if let Some(v) = o.min_pivot_valuation {
            self.record_pivot(v);
        }
        if let Some(v) = o.max_pivot_valuation {
            self.record_pivot(v);
        }
        self.precision = match (self.precision, o.precision) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self.slack = self.slack.max(o.slack);
    }
}

/// Dimensions computed at one pair of caps; `dims` is `None` when the cell
/// could not be computed within budget.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BettiCell {
    pub degree_cap: u32,
    pub level_cap: u32,
    pub dims: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StableValue {
    pub degree: usize,
    /// Value at the largest caps.
    pub value: Option<usize>,
    pub stabilized: bool,
}

/// Dimension tables over a grid of caps with a stabilisation verdict per degree.
#[derive(Clone, Debug, Serialize)]
pub struct BettiReport {
    pub degree_caps: Vec<u32>,
    pub level_caps: Vec<u32>,
    pub window: usize,
    pub cells: Vec<BettiCell>,
    pub stable: Vec<StableValue>,
    pub certificate: Certificate,
}

impl BettiReport {
    /// Build a report from cells in any order. With a single level cap the
    /// window applies to degree caps only.
    pub fn assemble(degree_caps: Vec<u32>, level_caps: Vec<u32>, window: usize, mut cells: Vec<BettiCell>, certificate: Certificate) -> BettiReport {
        cells.sort_by_key(|c| (c.degree_cap, c.level_cap));
        let ndeg = cells.iter().filter_map(|c| c.dims.as_ref().map(|d| d.len())).max().unwrap_or(0);
        let get = |d: u32, m: u32, k: usize| -> Option<usize> {
            cells.iter().find(|c| c.degree_cap == d && c.level_cap == m).and_then(|c| c.dims.as_ref()).map(|v| v.get(k).copied().unwrap_or(0))
        };
        let ds = tail(&degree_caps, window);
        let ms = if level_caps.len() == 1 { level_caps.clone() } else { tail(&level_caps, window) };
        let (dtop, mtop) = (degree_caps.last().copied(), level_caps.last().copied());
        let stable = (0..ndeg)
            .map(|k| {
                let value = match (dtop, mtop) {
                    (Some(d), Some(m)) => get(d, m, k),
                    _ => None,
                };
                let enough = ds.len() >= window && (level_caps.len() == 1 || ms.len() >= window);
                let stabilized = enough && value.is_some() && ds.iter().all(|&d| ms.iter().all(|&m| get(d, m, k) == value));
                StableValue { degree: k, value, stabilized }
            })
            .collect();
        BettiReport { degree_caps, level_caps, window, cells, stable, certificate }
    }

    /// Stabilized values with trailing zeros removed; `None` if any degree is unresolved.
    pub fn stabilized_betti(&self) -> Option<Vec<usize>> {
        let mut out = Vec::new();
        for s in &self.stable {
            if !s.stabilized {
                return None;
            }
            out.push(s.value?);
        }
        while out.last() == Some(&0) {
            out.pop();
        }
        Some(out)
    }

    pub fn unresolved(&self) -> Vec<usize> {
        self.stable.iter().filter(|s| !s.stabilized).map(|s| s.degree).collect()
    }
}

fn tail(v: &[u32], w: usize) -> Vec<u32> {
    v[v.len().saturating_sub(w)..].to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell(d: u32, m: u32, dims: &[usize]) -> BettiCell {
        BettiCell { degree_cap: d, level_cap: m, dims: Some(dims.to_vec()), error: None }
    }

    #[test]
    fn needs_full_window() {
        let cells: Vec<_> = [8, 12, 16].iter().flat_map(|&d| (1..=3).map(move |m| cell(d, m, &[1, 1]))).collect();
        let r = BettiReport::assemble(vec![8, 12, 16], vec![1, 2, 3], 3, cells.clone(), Certificate::exact());
        assert_eq!(r.stabilized_betti(), Some(vec![1, 1]));
        let mut bad = cells;
        bad[0].dims = Some(vec![1, 2]);
        let r = BettiReport::assemble(vec![8, 12, 16], vec![1, 2, 3], 3, bad, Certificate::exact());
        assert_eq!(r.unresolved(), vec![1]);
        assert!(r.stable[0].stabilized);
    }

    #[test]
    fn too_few_caps_is_unresolved() {
        let cells = vec![cell(8, 1, &[1]), cell(12, 1, &[1])];
        let r = BettiReport::assemble(vec![8, 12], vec![1], 3, cells, Certificate::exact());
        assert_eq!(r.stabilized_betti(), None);
    }
}

//! Packing report for a single instance: every procedure's result plus
//! the analytic gap bounds, rendered as text or JSON.

use fifogap::{
    compute_gap_bounds, exact_pack, fifo_pack, greedy_pack, solve_relaxation, ApproxCertificate,
    GapBounds, Packing, ProblemInstance, RelaxationSolution,
};
use serde_json::{json, Value};

pub struct PackReport {
    pub instance: ProblemInstance,
    pub relaxation: RelaxationSolution,
    pub greedy: Packing,
    pub certificate: ApproxCertificate,
    pub fifo: Packing,
    /// Populated only when the instance is within the exact solver
    /// limit.
    pub exact: Option<Packing>,
    pub exact_limit: usize,
    /// Absent for empty instances.
    pub bounds: Option<GapBounds>,
}

pub fn build_report(instance: ProblemInstance, exact_limit: usize) -> PackReport {
    let relaxation = solve_relaxation(&instance);
    let (greedy, certificate) = greedy_pack(&instance);
    let fifo = fifo_pack(&instance);
    let exact = exact_pack(&instance, exact_limit).ok();
    let bounds = compute_gap_bounds(&instance, &greedy).ok();
    PackReport {
        instance,
        relaxation,
        greedy,
        certificate,
        fifo,
        exact,
        exact_limit,
        bounds,
    }
}

fn included_indices(p: &Packing) -> Vec<usize> {
    p.included
        .iter()
        .enumerate()
        .filter(|(_, &inc)| inc)
        .map(|(i, _)| i)
        .collect()
}

fn fmt_indices(indices: &[usize]) -> String {
    let inner: Vec<String> = indices.iter().map(|i| i.to_string()).collect();
    format!("[{}]", inner.join(","))
}

impl PackReport {
    pub fn human(&self) -> String {
        let mut out = String::new();
        let params = self.instance.params();
        out.push_str(&format!(
            "instance: n={} gas_limit={} gas_price={} tx_gas_bounds=[{},{}]\n",
            self.instance.len(),
            params.gas_limit,
            params.gas_price,
            params.min_tx_gas,
            params.max_tx_gas
        ));
        match self.relaxation.fractional_entry() {
            Some((i, v)) => out.push_str(&format!(
                "relaxation: objective={} fractional_index={i} fractional_value={v}\n",
                self.relaxation.objective
            )),
            None => out.push_str(&format!(
                "relaxation: objective={} (integral)\n",
                self.relaxation.objective
            )),
        }
        out.push_str(&format!(
            "greedy: objective={} gas_used={} included={}\n",
            self.greedy.objective,
            self.greedy.gas_used,
            fmt_indices(&included_indices(&self.greedy))
        ));
        match self.certificate.m {
            Some(m) if m >= 2 => out.push_str(&format!(
                "certificate: m={m} optimum_at_most={}\n",
                self.certificate.upper_bound
            )),
            Some(m) => out.push_str(&format!(
                "certificate: m={m} (inapplicable; optimum bounded by the relaxation)\n"
            )),
            None => out.push_str("certificate: empty instance\n"),
        }
        out.push_str(&format!(
            "fifo: objective={} gas_used={} included={}\n",
            self.fifo.objective,
            self.fifo.gas_used,
            fmt_indices(&included_indices(&self.fifo))
        ));
        match &self.exact {
            Some(exact) => out.push_str(&format!(
                "exact: objective={} gas_used={} included={}\n",
                exact.objective,
                exact.gas_used,
                fmt_indices(&included_indices(exact))
            )),
            None => out.push_str(&format!(
                "exact: skipped (n={} exceeds limit {}; optimum within [{}, {}])\n",
                self.instance.len(),
                self.exact_limit,
                self.greedy.objective,
                self.relaxation.objective
            )),
        }
        match &self.bounds {
            Some(b) => {
                out.push_str(&format!(
                    "gap_bounds: k_bar={} q_plus={} q_minus={} eta={}\n",
                    b.k_bar, b.q_plus, b.q_minus, b.eta
                ));
                out.push_str(&format!(
                    "gap_bounds: optimal_lower={} fifo_upper={} gap_lower={} condition_holds={} ratio_bound={}\n",
                    b.optimal_lower_bound,
                    b.fifo_upper_bound,
                    b.gap_lower,
                    b.condition_holds,
                    b.ratio_bound
                        .map(|r| r.to_string())
                        .unwrap_or_else(|| "undefined".into())
                ));
            }
            None => out.push_str("gap_bounds: (empty instance)\n"),
        }
        out
    }

    pub fn json(&self) -> Value {
        let packing_json = |p: &Packing| {
            json!({
                "objective": p.objective,
                "gas_used": p.gas_used,
                "included": included_indices(p),
            })
        };
        let params = self.instance.params();
        json!({
            "instance": {
                "n": self.instance.len(),
                "gas_limit": params.gas_limit,
                "gas_price": params.gas_price,
                "min_tx_gas": params.min_tx_gas,
                "max_tx_gas": params.max_tx_gas,
                "net_utilities": self.instance.net_utilities(),
                "gas": self.instance.gas(),
            },
            "relaxation": {
                "objective": self.relaxation.objective,
                "x": self.relaxation.x,
                "fractional_index": self.relaxation.fractional_entry().map(|(i, _)| i),
                "fractional_value": self.relaxation.fractional_entry().map(|(_, v)| v),
            },
            "greedy": packing_json(&self.greedy),
            "certificate": {
                "m": self.certificate.m,
                "p0": self.certificate.p0,
                "upper_bound": if self.certificate.upper_bound.is_finite() {
                    Value::from(self.certificate.upper_bound)
                } else {
                    Value::Null
                },
            },
            "fifo": packing_json(&self.fifo),
            "exact": self.exact.as_ref().map(packing_json),
            "gap_bounds": self.bounds.as_ref().map(|b| json!({
                "k_bar": b.k_bar,
                "q_plus": b.q_plus,
                "q_minus": b.q_minus,
                "eta": b.eta,
                "optimal_lower_bound": b.optimal_lower_bound,
                "fifo_upper_bound": b.fifo_upper_bound,
                "gap_lower": b.gap_lower,
                "condition_holds": b.condition_holds,
                "ratio_bound": b.ratio_bound,
                "realized_min_gas": b.realized_min_gas,
                "realized_max_gas": b.realized_max_gas,
            })),
        })
    }
}

//! Scenario reports, the summary JSON document and the trajectory CSV.

use serde::Serialize;
use shadowflow_core::integrator::Trajectory;
use std::fmt::Write as _;
use std::io;
use std::path::Path;

/// One named verdict. `claim` states what is being verified in plain terms;
/// informational checks never affect the exit status.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub claim: String,
    pub passed: bool,
    pub measured: f64,
    pub bound: f64,
    pub informational: bool,
}

impl Check {
    pub fn new(name: &str, claim: &str, passed: bool, measured: f64, bound: f64) -> Self {
        Check {
            name: name.to_string(),
            claim: claim.to_string(),
            passed,
            measured,
            bound,
            informational: false,
        }
    }

    pub fn info(mut self) -> Self {
        self.informational = true;
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub config_echo: String,
    pub checks: Vec<Check>,
    pub trajectory_files: Vec<String>,
    /// Closed-form perturbation budget over the run horizon.
    pub pert_budget: f64,
}

impl ScenarioReport {
    pub fn new(scenario: &str, config_echo: String) -> Self {
        ScenarioReport {
            scenario: scenario.to_string(),
            config_echo,
            checks: Vec::new(),
            trajectory_files: Vec::new(),
            pert_budget: 0.0,
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    /// All non-informational checks pass.
    pub fn all_pass(&self) -> bool {
        self.checks
            .iter()
            .filter(|c| !c.informational)
            .all(|c| c.passed)
    }

    /// Every check carries a name and a claim statement.
    pub fn self_validate(&self) -> bool {
        !self.checks.is_empty()
            && self
                .checks
                .iter()
                .all(|c| !c.name.is_empty() && !c.claim.is_empty())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One line per check for the terminal.
    pub fn render_lines(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let status = if c.informational {
                "INFO"
            } else if c.passed {
                "PASS"
            } else {
                "FAIL"
            };
            let _ = writeln!(
                s,
                "[{status}] {}::{} measured={:.6e} bound={:.6e} -- {}",
                self.scenario, c.name, c.measured, c.bound, c.claim
            );
        }
        s
    }
}

/// Writes the trajectory as CSV: `t`, then per bubble `ln_lambda_i`, the `n`
/// center coordinates, `alpha_i`, then the diagnostic channels (per bubble
/// `lambda_a2_i`, `lambda_a5_i`, `neg_lambda_lapk_i`, then `theta`, `psi`,
/// `energy`, then the pairwise `eps_i_j`). Floats are printed in Rust's
/// shortest round-trip form, so identical trajectories give identical bytes.
pub fn trajectory_csv(traj: &Trajectory, dim: usize) -> String {
    let p = traj.samples.first().map(|s| s.state.p()).unwrap_or(0);
    let mut s = String::new();
    let mut header = vec!["t".to_string()];
    for i in 1..=p {
        header.push(format!("ln_lambda_{i}"));
        for c in 1..=dim {
            header.push(format!("a_{i}_{c}"));
        }
        header.push(format!("alpha_{i}"));
    }
    for i in 1..=p {
        header.push(format!("lambda_a2_{i}"));
        header.push(format!("lambda_a5_{i}"));
        header.push(format!("neg_lambda_lapk_{i}"));
    }
    header.push("theta".to_string());
    header.push("psi".to_string());
    header.push("energy".to_string());
    for i in 1..=p {
        for j in i + 1..=p {
            header.push(format!("eps_{i}_{j}"));
        }
    }
    let _ = writeln!(s, "{}", header.join(","));
    for sample in &traj.samples {
        let mut row: Vec<String> = vec![format!("{}", sample.t)];
        for i in 0..p {
            row.push(format!("{}", sample.state.bubbles[i].log_lambda));
            for c in 0..dim {
                row.push(format!("{}", sample.state.bubbles[i].center[c]));
            }
            row.push(format!("{}", sample.state.alpha(i)));
        }
        for b in &sample.diag.per_bubble {
            row.push(format!("{}", b.lambda_a2));
            row.push(format!("{}", b.lambda_a5));
            row.push(format!("{}", b.neg_lambda_lapk));
        }
        row.push(format!("{}", sample.diag.theta));
        row.push(format!("{}", sample.diag.psi));
        row.push(format!("{}", sample.diag.energy));
        for e in &sample.diag.eps_pairs {
            row.push(format!("{e}"));
        }
        let _ = writeln!(s, "{}", row.join(","));
    }
    s
}

pub fn write_trajectory_csv(traj: &Trajectory, dim: usize, path: &Path) -> io::Result<()> {
    std::fs::write(path, trajectory_csv(traj, dim))
}

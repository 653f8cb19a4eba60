//! Machine-readable verification reports. Field order is fixed so two runs
//! of the same instance differ only in `wall_time`.

use serde::{Deserialize, Serialize};
use unifact::LawCheck;

use crate::instance::Instance;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Suite {
    pub name: String,
    pub checks: Vec<LawCheck>,
}

impl Suite {
    pub fn new(name: &str) -> Self {
        Suite { name: name.to_string(), checks: Vec::new() }
    }

    pub fn push(&mut self, law: &str, max_deviation: f64, threshold: f64) {
        self.checks.push(LawCheck {
            law: law.to_string(),
            max_deviation,
            pass: max_deviation <= threshold,
        });
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub suites: Vec<Suite>,
    pub instance: Instance,
    pub versions: Versions,
    pub wall_time: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Versions {
    pub unifact: String,
}

impl Report {
    pub fn new(instance: Instance) -> Self {
        Report {
            suites: Vec::new(),
            instance,
            versions: Versions { unifact: env!("CARGO_PKG_VERSION").to_string() },
            wall_time: 0.0,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.suites.iter().all(|s| s.all_pass())
    }

    pub fn first_failing_law(&self) -> Option<&str> {
        self.suites
            .iter()
            .flat_map(|s| s.checks.iter())
            .find(|c| !c.pass)
            .map(|c| c.law.as_str())
    }
}

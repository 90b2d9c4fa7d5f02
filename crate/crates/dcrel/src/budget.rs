use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Enumeration caps. All paper-scale presets fit well inside the defaults;
/// exceeding a cap is a loud error, never a silent truncation.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Budget {
    /// Maximum size of any enumerated hom-set.
    pub hom_cap: usize,
    /// Maximum number of candidate steps in filler/limit/adjoint searches.
    pub search_cap: u64,
    /// Maximum apex size when enumerating relation representatives for a
    /// right class that is not subobject-like (e.g. the class of all arrows).
    pub apex_cap: usize,
    /// Run the brute-force universal-property oracles alongside the
    /// structural criteria.
    pub oracle: bool,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            hom_cap: 4096,
            search_cap: 1_000_000,
            apex_cap: 0, // 0 = derive from the relevant product size
            oracle: true,
        }
    }
}

impl Budget {
    pub fn check_hom(&self, context: &str, needed: u128) -> Result<()> {
        if needed > self.hom_cap as u128 {
            return Err(Error::BudgetExceeded {
                context: context.to_string(),
                needed,
                cap: self.hom_cap as u128,
            });
        }
        Ok(())
    }

    pub fn check_search(&self, context: &str, needed: u128) -> Result<()> {
        if needed > self.search_cap as u128 {
            return Err(Error::BudgetExceeded {
                context: context.to_string(),
                needed,
                cap: self.search_cap as u128,
            });
        }
        Ok(())
    }

    /// Apply `DCREL_BUDGET` overrides of the form
    /// `hom=8192,search=2000000,apex=6,oracle=off`.
    pub fn with_env(mut self) -> Self {
        if let Ok(spec) = std::env::var("DCREL_BUDGET") {
            for part in spec.split(',') {
                let mut kv = part.splitn(2, '=');
                let (Some(k), Some(v)) = (kv.next(), kv.next()) else {
                    continue;
                };
                match k.trim() {
                    "hom" => {
                        if let Ok(n) = v.trim().parse() {
                            self.hom_cap = n;
                        }
                    }
                    "search" => {
                        if let Ok(n) = v.trim().parse() {
                            self.search_cap = n;
                        }
                    }
                    "apex" => {
                        if let Ok(n) = v.trim().parse() {
                            self.apex_cap = n;
                        }
                    }
                    "oracle" => self.oracle = matches!(v.trim(), "on" | "true" | "1"),
                    _ => {}
                }
            }
        }
        self
    }
}

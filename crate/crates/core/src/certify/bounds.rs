use serde::Serialize;

use super::{builtin, check, CertifyError};

/// A certified lower bound on `FixDim` for one builtin family member.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FixDimBound {
    pub family: String,
    pub parameter: i64,
    pub certificate: String,
    pub verified: bool,
    /// `D` in "fixed point whenever dim ≤ D"; `FixDim ≥ D`.
    pub dim: Option<i64>,
    pub statement: String,
    /// Assumption flags the certificate needs that were not granted.
    pub conditional_on: Vec<String>,
    pub notes: Vec<String>,
}

impl FixDimBound {
    /// Verified and unconditional under the granted assumptions.
    pub fn holds(&self) -> bool {
        self.verified && self.conditional_on.is_empty()
    }

    pub fn fixdim_lower_bound(&self) -> Option<i64> {
        if self.verified {
            self.dim
        } else {
            None
        }
    }
}

/// Checks the builtin certificate and turns its conclusion into a `FixDim` bound.
pub fn bounds(family: &str, parameter: i64, assume: &[String]) -> Result<FixDimBound, CertifyError> {
    let cert = builtin(family, parameter)?;
    let verdict = check(&cert);
    let conditional_on: Vec<String> = verdict.flags.iter().filter(|f| !assume.contains(f)).cloned().collect();
    let statement = match (verdict.verified, verdict.dim) {
        (false, _) => format!("certificate rejected: {}", verdict.conclusion()),
        (true, None) => "fixed point in every dimension".to_string(),
        (true, Some(d)) => format!("fixed point whenever dim ≤ {d}, so FixDim ≥ {d}"),
    };
    let mut notes = Vec::new();
    match family {
        "aut" => {
            let headline = 2 * parameter / 3;
            if let Some(d) = verdict.dim {
                if d != headline {
                    notes.push(format!(
                        "headline figure floor(2n/3) = {headline} differs from the dimension count {d} obtained from the n ≥ 3m, d < 2m criterion"
                    ));
                }
            }
        }
        "saut" => notes.push("needs every Nielsen transformation to be elliptic (holds for semisimple actions when n ≥ 4)".into()),
        "braid" => notes.push("needs every braid generator to be elliptic".into()),
        "sl" if parameter % 2 == 0 => notes.push("even n: involutions τ_1 τ_i, one factor fewer than for odd n".into()),
        "wreath" | "bieberbach" => notes.push("finite index declared, not machine-checked".into()),
        _ => {}
    }
    if !conditional_on.is_empty() {
        notes.push(format!("conditional on: {}", conditional_on.join(", ")));
    }
    Ok(FixDimBound {
        family: family.to_string(),
        parameter,
        certificate: cert.name,
        verified: verdict.verified,
        dim: verdict.dim,
        statement,
        conditional_on,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_bounds() {
        let gl5 = bounds("gl", 5, &[]).unwrap();
        assert!(gl5.holds());
        assert_eq!(gl5.fixdim_lower_bound(), Some(3));
        assert_eq!(bounds("sl", 7, &[]).unwrap().fixdim_lower_bound(), Some(5));
        assert_eq!(bounds("bieberbach", 4, &[]).unwrap().fixdim_lower_bound(), Some(3));
    }

    #[test]
    fn conditional_until_assumed() {
        let b = bounds("braid", 6, &[]).unwrap();
        assert!(b.verified && !b.holds());
        let b = bounds("braid", 6, &["braid-generators-elliptic".to_string()]).unwrap();
        assert!(b.holds());
        assert_eq!(b.dim, Some(1));
    }

    #[test]
    fn aut_headline_is_flagged() {
        let b = bounds("aut", 6, &[]).unwrap();
        assert_eq!(b.dim, Some(3));
        assert!(b.notes.iter().any(|n| n.contains("floor(2n/3) = 4")));
    }
}

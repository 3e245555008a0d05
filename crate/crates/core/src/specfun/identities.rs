//! Meijer G cases with elementary closed forms, used as a self-test.

use std::f64::consts::PI;

use super::erf::erfc;
use super::meijer::{meijer_g, meijer_g_with, EvalMethod, MeijerGSpec};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub argument: f64,
    pub method: EvalMethod,
    pub expected: f64,
    pub got: f64,
    pub rel_error: f64,
}

impl IdentityCheck {
    pub fn passed(&self, rel_tol: f64) -> bool {
        self.rel_error <= rel_tol
    }
}

/// ln(1+z) = G^{1,2}_{2,2}[z | 1, 1; 1, 0].
pub fn log_identity(z: f64) -> Result<MeijerGSpec> {
    MeijerGSpec::new(vec![1.0, 1.0], vec![], vec![1.0], vec![0.0], z)
}

/// √π erfc(√z) = G^{2,0}_{1,2}[z | −; 1; 0, ½].
pub fn erfc_identity(z: f64) -> Result<MeijerGSpec> {
    MeijerGSpec::new(vec![], vec![1.0], vec![0.0, 0.5], vec![], z)
}

/// G^{1,1}_{1,1}[z | −1; 1] = 2z/(1+z)³.
pub fn elementary_identity(z: f64) -> Result<MeijerGSpec> {
    MeijerGSpec::new(vec![-1.0], vec![], vec![1.0], vec![], z)
}

fn run(
    name: &'static str,
    spec: MeijerGSpec,
    expected: f64,
    out: &mut Vec<IdentityCheck>,
) -> Result<()> {
    let auto = meijer_g(&spec)?;
    let contour = meijer_g_with(&spec, EvalMethod::ContourQuadrature, 0.0)?;
    for r in [auto, contour] {
        out.push(IdentityCheck {
            name,
            argument: spec.argument(),
            method: r.method,
            expected,
            got: r.value,
            rel_error: ((r.value - expected) / expected).abs(),
        });
    }
    Ok(())
}

/// Every identity at its test arguments, through the automatic route and
/// through contour quadrature.
pub fn identity_suite() -> Result<Vec<IdentityCheck>> {
    let mut out = Vec::new();
    for z in [0.1, 1.0, 10.0, 100.0] {
        run("log", log_identity(z)?, z.ln_1p(), &mut out)?;
    }
    for z in [0.01, 1.0, 4.0] {
        run(
            "erfc",
            erfc_identity(z)?,
            PI.sqrt() * erfc(z.sqrt()),
            &mut out,
        )?;
    }
    for z in [0.25, 1.0, 7.5] {
        run(
            "elementary",
            elementary_identity(z)?,
            2.0 * z / (1.0 + z).powi(3),
            &mut out,
        )?;
    }
    Ok(out)
}

//! Audits pressure laws against the structural hypotheses and prints each
//! check with its witness.

use bifluid_lab::bifluid::{audit_bifluid, BiFluidSystem, PowerPhase};
use bifluid_lab::constitutive::{
    audit_hypotheses, AdmissibleRegion, HomogeneousLaw, HypothesisReport, SamplingSpec, Term,
};
use std::sync::Arc;

fn show(report: &HypothesisReport) {
    println!("{}: {:?}", report.subject, report.verdict);
    for c in &report.checks {
        println!(
            "  {:<28} {:<14} {}",
            c.id,
            format!("{:?}", c.verdict),
            c.description
        );
    }
    for c in report.failures() {
        println!("  witness for {}: {:?} = {:?}", c.id, c.witness.coordinates, c.witness.point);
    }
    println!();
}

fn main() -> bifluid_lab::Result<()> {
    let spec = SamplingSpec::default();
    let band = AdmissibleRegion::bi(0.0, 1.0)?;

    let separable = HomogeneousLaw::separable(
        2.0,
        vec![2.0],
        vec![Term::Monomial {
            coeff: 0.5,
            rho_exp: 1.0,
            z_exps: vec![0.5],
        }],
        band.clone(),
    )?;
    show(&audit_hypotheses(&separable, &spec));

    let total = HomogeneousLaw::total_density(2.0, vec![], band.clone())?;
    show(&audit_hypotheses(&total, &spec));

    // a stiff minus phase breaks the exponent condition of the transform
    let stiff = BiFluidSystem::new(
        Arc::new(PowerPhase::pure(2.0)?),
        Arc::new(PowerPhase::pure(10.0)?),
        band,
    )?;
    let report = audit_bifluid(&stiff, &spec);
    let gamma_bar = report.check("bifluid.gamma_bar").expect("exponent check present");
    println!(
        "stiff pair: {:?} on bifluid.gamma_bar ({})",
        gamma_bar.verdict, gamma_bar.description
    );
    Ok(())
}

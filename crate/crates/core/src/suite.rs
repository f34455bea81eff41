//! The full identity suite for one `(G, irreps, U_S)` triple.

use rand::Rng;

use crate::error::{Error, Result};
use crate::invariant::{
    charge_projectors, common_subalgebra_check, g_twirl, invariant_algebra,
    twirl_block_structure_residual, TwirlSpec, DEFAULT_DIM_BUDGET,
};
use crate::linalg::{random_matrix, seeded_rng, C64};
use crate::relative::{
    build_perspective, classical_frame_report, invariant_dimension_oracle, perspective_report,
    IDENTITY_TOL, SPAN_TOL,
};
use crate::report::VerificationReport;
use crate::repr::{IrrepTable, UnitaryRep};
use crate::tensor::{commutant, subspace_equal, LabeledOperator};
use crate::transform::{build_two_frame, frame_rotation_demo, transform_report, zero_charge_check};

/// Above this total dimension the dense commutant is not formed.
pub const COMMUTANT_MAX_DIM: usize = 32;
/// Above this total dimension of `E ⊗ F ⊗ Q` the common-subalgebra
/// intersection (which vectorises operators) is not attempted.
pub const COMMON_SUBALGEBRA_MAX_DIM: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub trials: usize,
    pub dim_budget: usize,
    pub tolerance_scale: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            trials: 50,
            dim_budget: DEFAULT_DIM_BUDGET,
            tolerance_scale: 1.0,
        }
    }
}

/// Twirl properties on the frame-plus-system action `L_A ⊗ U_S`.
pub fn twirl_report<R: Rng + ?Sized>(
    table: &IrrepTable,
    system: &UnitaryRep,
    trials: usize,
    rng: &mut R,
    tolerance_scale: f64,
) -> Result<VerificationReport> {
    let s = tolerance_scale;
    let group = table.group().clone();
    let spec = TwirlSpec::frame_and_system(group.clone(), system)?;
    let space = spec.space().clone();
    let n = space.dim();
    let mut report = VerificationReport::new("twirl");
    let random = |rng: &mut R| LabeledOperator::new(space.clone(), random_matrix(rng, n));

    let start = std::time::Instant::now();
    let (mut idem, mut comm, mut lin, mut tr, mut herm): (f64, f64, f64, f64, f64) =
        (0.0, 0.0, 0.0, 0.0, 0.0);
    let actions = spec.action_operators();
    for _ in 0..trials {
        let t = random(rng)?;
        let u = random(rng)?;
        let tw = g_twirl(&t, &spec)?;
        idem = idem.max(g_twirl(&tw, &spec)?.distance(&tw)?);
        for a in &actions {
            comm = comm.max(a.commutator(&tw)?.norm());
        }
        let (x, y) = (C64::new(0.3, -1.1), C64::new(-0.7, 0.2));
        let combo = t.scale(x).sum(&u.scale(y))?;
        let lhs = g_twirl(&combo, &spec)?;
        let rhs = tw.scale(x).sum(&g_twirl(&u, &spec)?.scale(y))?;
        lin = lin.max(lhs.distance(&rhs)?);
        tr = tr.max((tw.trace() - t.trace()).norm());
        herm = herm.max(g_twirl(&t.adjoint(), &spec)?.distance(&tw.adjoint())?);
    }
    let ms = start.elapsed().as_secs_f64() * 1e3 / 5.0;
    let anchor = "G-twirl (1/|G|) Σ_g V(g) T V(g)†";
    report
        .check("twirl is idempotent", anchor, idem, IDENTITY_TOL * s)
        .wall_time_ms = ms;
    report
        .check("twirl output is invariant", anchor, comm, IDENTITY_TOL * s)
        .wall_time_ms = ms;
    report
        .check("twirl is linear", anchor, lin, IDENTITY_TOL * s)
        .wall_time_ms = ms;
    report
        .check("twirl preserves trace", anchor, tr, IDENTITY_TOL * s)
        .wall_time_ms = ms;
    report
        .check(
            "twirl preserves hermiticity",
            anchor,
            herm,
            IDENTITY_TOL * s,
        )
        .wall_time_ms = ms;

    let start = std::time::Instant::now();
    let image = invariant_algebra(&spec);
    let image_ms = start.elapsed().as_secs_f64() * 1e3;
    if n <= COMMUTANT_MAX_DIM {
        let start = std::time::Instant::now();
        let c = commutant(&actions)?;
        let (_, r) = subspace_equal(&image, &c)?;
        report
            .check(
                "twirl image equals commutant",
                "invariant subsystem",
                r,
                SPAN_TOL * s,
            )
            .wall_time_ms = start.elapsed().as_secs_f64() * 1e3 + image_ms;
    } else {
        report.skip(
            "twirl image equals commutant",
            "invariant subsystem",
            format!("dimension {n} exceeds the dense commutant limit {COMMUTANT_MAX_DIM}"),
        );
    }
    let oracle = invariant_dimension_oracle(table, system)?;
    report.check(
        "twirl image dimension matches characters",
        "invariant subsystem: Σ_q m_q²",
        (image.dim() as f64 - oracle as f64).abs(),
        0.0,
    );

    report.timed(
        "twirl is block projection then depolarisation",
        "block-diagonal projection followed by fully depolarising left factors",
        IDENTITY_TOL * s,
        || {
            let order = group.order();
            let mut worst: f64 = 0.0;
            for _ in 0..trials.min(10) {
                let op = random_matrix(&mut *rng, order);
                worst =
                    worst.max(twirl_block_structure_residual(table, &op).unwrap_or(f64::INFINITY));
            }
            worst
        },
    );

    let start = std::time::Instant::now();
    let projs = charge_projectors(system, table, "S")?;
    let mut herm: f64 = 0.0;
    let mut orth: f64 = 0.0;
    let mut sum = LabeledOperator::zeros(projs[0].space());
    for (i, p) in projs.iter().enumerate() {
        herm = herm.max(p.distance(&p.adjoint())?);
        for (j, q) in projs.iter().enumerate() {
            let pq = p.product(q)?;
            let want = if i == j {
                p.clone()
            } else {
                LabeledOperator::zeros(p.space())
            };
            orth = orth.max(pq.distance(&want)?);
        }
        sum = sum.sum(p)?;
    }
    let complete = sum.distance(&LabeledOperator::identity(sum.space()))?;
    let ms = start.elapsed().as_secs_f64() * 1e3 / 2.0;
    let anchor = "charge-sector projectors P_q";
    report
        .check(
            "charge projectors are orthogonal idempotents",
            anchor,
            herm.max(orth),
            IDENTITY_TOL * s,
        )
        .wall_time_ms = ms;
    report
        .check(
            "charge projectors resolve the identity",
            anchor,
            complete,
            IDENTITY_TOL * s,
        )
        .wall_time_ms = ms;
    Ok(report)
}

/// Runs every check in a fixed order with one RNG stream seeded from
/// `config.seed`. Two-frame entries whose dimension `|G|²·d_S` exceeds the
/// budget are recorded as skipped.
///
/// Errors only when not even the single-frame pieces fit the budget.
pub fn run_suite(
    table: &IrrepTable,
    system: &UnitaryRep,
    config: &SuiteConfig,
) -> Result<VerificationReport> {
    let group = table.group().clone();
    let n = group.order();
    let d = system.dim();
    if n * d > config.dim_budget {
        return Err(Error::DimBudgetExceeded {
            dim: n * d,
            budget: config.dim_budget,
        });
    }
    let s = config.tolerance_scale;
    let mut rng = seeded_rng(config.seed);
    let mut report = VerificationReport::new(format!("{} with {}", group.name(), system.label()));

    report.extend(twirl_report(table, system, config.trials, &mut rng, s)?);

    let persp = build_perspective(table, system)?;
    report.extend(perspective_report(&persp, config.trials, &mut rng, s)?);
    report.extend(classical_frame_report(&persp, &mut rng, s)?);

    let two_dim = n * n * d;
    let skip_reason = format!(
        "two-frame dimension {two_dim} exceeds budget {}",
        config.dim_budget
    );
    match build_two_frame(table, system, config.dim_budget) {
        Ok(setup) => {
            report.extend(transform_report(&setup, config.trials, &mut rng, s)?);
            report.extend(zero_charge_check(&setup, config.trials, &mut rng, s)?);
        }
        Err(Error::DimBudgetExceeded { .. }) => {
            for name in [
                "two-frame maps are unitary",
                "class 1 closed form",
                "class 2 closed form",
                "class 3 closed form",
                "frame change round trip",
                "frame change preserves invariance",
                "factored form",
                "group-averaged states are invariant",
                "zero-charge map agrees with the frame change",
            ] {
                report.skip(name, "change of frame A → B", skip_reason.clone());
            }
        }
        Err(e) => return Err(e),
    }

    if two_dim > config.dim_budget || two_dim > COMMON_SUBALGEBRA_MAX_DIM {
        let limit = config.dim_budget.min(COMMON_SUBALGEBRA_MAX_DIM);
        report.skip(
            "common subalgebra equals embedded invariant algebra",
            "largest subalgebra common to both frames",
            format!("dimension {two_dim} exceeds limit {limit}"),
        );
    } else {
        report.extend(common_subalgebra_check(system, config.dim_budget)?);
    }

    match build_two_frame(table, system, config.dim_budget) {
        Ok(setup) => {
            let amp = C64::new(1.0 / (n as f64).sqrt(), 0.0);
            let phi = vec![amp; n];
            let mut psi = crate::linalg::CVector::zeros(d);
            psi[0] = C64::new(1.0, 0.0);
            report.extend(frame_rotation_demo(&setup, &phi, &psi)?.report);
        }
        Err(Error::DimBudgetExceeded { .. }) => {
            for name in [
                "reduced state matches closed form",
                "orbit states are orthogonal",
                "reduced purity formula",
                "global state is pure",
            ] {
                report.skip(name, "frame rotation", skip_reason.clone());
            }
        }
        Err(e) => return Err(e),
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::build_cyclic;
    use crate::repr::cyclic_irreps;
    use std::sync::Arc;

    #[test]
    fn z3_suite_passes_and_is_reproducible() {
        let g = Arc::new(build_cyclic(3));
        let table = cyclic_irreps(g.clone()).unwrap();
        let rep = UnitaryRep::regular(g);
        let cfg = SuiteConfig {
            trials: 5,
            seed: 9,
            ..Default::default()
        };
        let a = run_suite(&table, &rep, &cfg).unwrap();
        assert!(a.passed(), "{}", a.to_json());
        assert_eq!(a.skipped().count(), 0);
        let b = run_suite(&table, &rep, &cfg).unwrap();
        assert_eq!(a.without_timing().to_json(), b.without_timing().to_json());
    }

    #[test]
    fn budget_skips_two_frame_entries() {
        let g = Arc::new(build_cyclic(3));
        let table = cyclic_irreps(g.clone()).unwrap();
        let rep = UnitaryRep::trivial(g, 2);
        let cfg = SuiteConfig {
            trials: 3,
            dim_budget: 10,
            ..Default::default()
        };
        let r = run_suite(&table, &rep, &cfg).unwrap();
        assert!(r.passed());
        assert!(r
            .entry("factored form")
            .is_some_and(|e| e.residual.is_none()));
        let tight = SuiteConfig {
            dim_budget: 5,
            ..cfg
        };
        assert!(matches!(
            run_suite(&table, &rep, &tight),
            Err(Error::DimBudgetExceeded { .. })
        ));
    }
}

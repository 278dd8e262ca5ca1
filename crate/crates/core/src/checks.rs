//! Consistency checks shared by the command-line `verify` run and the test
//! suites, plus the seeded random parameter draws they use.

use rand::Rng;

use crate::device::{
    relation_deviation, scattering_solved, scattering_transcribed, verify_bogoliubov, DeviceParams,
    ReactanceSpec, Resistances,
};
use crate::error::Result;
use crate::field::{AngularFrequency, PhysicalConstants, PortId, ThermalEnvironment};
use crate::noise::{added_noise, added_noise_oracle, Spacing, SweepSpec};

/// Seed used by the command-line verification run.
pub const VERIFY_SEED: u64 = 0;
/// Number of random parameter sets in a verification run.
pub const VERIFY_DRAWS: usize = 1000;

/// The 13-point logarithmic grid from 1e2 to 1e8 rad/s.
pub fn verification_grid() -> Vec<AngularFrequency> {
    SweepSpec::new(1e2, 1e8, 13, Spacing::Logarithmic)
        .expect("static grid is valid")
        .grid()
}

fn log_uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo.ln()..=hi.ln()).exp()
}

/// A random valid device: resistances log-uniform in 1 ohm to 1 Mohm, a random
/// reactance kind, temperatures uniform in 0 to 300 K.
pub fn random_device<R: Rng + ?Sized>(rng: &mut R, constants: PhysicalConstants) -> DeviceParams {
    let resistances = Resistances {
        r_l: log_uniform(rng, 1.0, 1e6),
        r_r: log_uniform(rng, 1.0, 1e6),
        r_f: log_uniform(rng, 1.0, 1e6),
        r_0: log_uniform(rng, 1.0, 1e6),
    };
    let reactance = match rng.gen_range(0..4) {
        0 => ReactanceSpec::None,
        1 => {
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            ReactanceSpec::Constant(sign * log_uniform(rng, 1.0, 1e6))
        }
        2 => ReactanceSpec::Inductive(log_uniform(rng, 1e-9, 1e-2)),
        _ => ReactanceSpec::Capacitive(log_uniform(rng, 1e-12, 1e-3)),
    };
    let env = PortId::ALL
        .into_iter()
        .try_fold(ThermalEnvironment::vacuum(), |env, p| {
            env.with(p, rng.gen_range(0.0..=300.0))
        })
        .expect("temperatures in range");
    DeviceParams::new(resistances, reactance, env, constants).expect("draws are valid")
}

/// Largest deviations found by [`check`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CheckSummary {
    /// Worst commutator defect of the output fields.
    pub bogoliubov: f64,
    /// Worst closed-form vs circuit-solver coefficient deviation.
    pub solver: f64,
    /// Worst relative difference between the four-term `Sigma` and the
    /// estimator spectrum.
    pub sigma: f64,
    pub evaluations: usize,
}

impl CheckSummary {
    pub fn merge(self, other: CheckSummary) -> CheckSummary {
        CheckSummary {
            bogoliubov: self.bogoliubov.max(other.bogoliubov),
            solver: self.solver.max(other.solver),
            sigma: self.sigma.max(other.sigma),
            evaluations: self.evaluations + other.evaluations,
        }
    }

    pub fn worst(&self) -> f64 {
        self.bogoliubov.max(self.solver).max(self.sigma)
    }
}

/// Relative gap between the two `Sigma` evaluation paths.
pub fn sigma_deviation(params: &DeviceParams, omega: AngularFrequency) -> f64 {
    let formula = added_noise(params, omega).sigma_total;
    let oracle = added_noise_oracle(params, omega);
    (formula - oracle).abs() / formula.abs().max(oracle.abs())
}

/// Runs every check for one device at one frequency.
pub fn check_point(params: &DeviceParams, omega: AngularFrequency) -> Result<CheckSummary> {
    let transcribed = scattering_transcribed(params, omega);
    let solved = scattering_solved(params, omega)?;
    Ok(CheckSummary {
        bogoliubov: verify_bogoliubov(&transcribed).max(verify_bogoliubov(&solved)),
        solver: relation_deviation(&transcribed, &solved),
        sigma: sigma_deviation(params, omega),
        evaluations: 1,
    })
}

/// Runs every check for every device on every grid frequency.
pub fn check<'a, I>(devices: I, grid: &[AngularFrequency]) -> Result<CheckSummary>
where
    I: IntoIterator<Item = &'a DeviceParams>,
{
    let mut summary = CheckSummary::default();
    for params in devices {
        for &omega in grid {
            summary = summary.merge(check_point(params, omega)?);
        }
    }
    Ok(summary)
}

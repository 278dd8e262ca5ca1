//! Added noise, back-action and the optimal matching point.
//!
//! The readout `r_out` is turned into an unbiased estimate of the signal
//! input `l_in`; whatever the estimate carries besides `l_in` is the noise
//! added by the measurement. Its spectrum `Sigma` is evaluated two ways: from
//! the closed-form four-term sum ([`added_noise`]) and from the mode algebra
//! applied to the estimator itself ([`added_noise_oracle`]).

use num_complex::Complex64;

use crate::device::{feedback_impedance, scattering_transcribed, DeviceParams};
use crate::error::{Error, Result};
use crate::field::{sym_spectrum, AngularFrequency, FieldExpr, PortId};
use crate::golden;

/// Search interval for the matching parameter.
pub const XI_BRACKET: (f64, f64) = (-10.0, 10.0);
/// Final golden-section bracket width.
pub const XI_TOLERANCE: f64 = 1e-8;

/// Added noise and related figures of merit at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseReport {
    pub omega: f64,
    pub sigma_total: f64,
    /// Readout-line contribution.
    pub term_r: f64,
    /// Feedback-line contribution.
    pub term_f: f64,
    /// Contribution of amplifier line `a`.
    pub term_a: f64,
    /// Contribution of the conjugated amplifier line `b`.
    pub term_b: f64,
    pub xi: f64,
    pub noise_figure_db: f64,
    /// Full symmetrized spectrum of `l_out`.
    pub back_action: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Spacing {
    Linear,
    #[default]
    Logarithmic,
}

/// Frequency grid for [`sweep`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    omega_min: f64,
    omega_max: f64,
    points: usize,
    spacing: Spacing,
}

impl SweepSpec {
    pub fn new(omega_min: f64, omega_max: f64, points: usize, spacing: Spacing) -> Result<Self> {
        AngularFrequency::new(omega_min)?;
        AngularFrequency::new(omega_max)?;
        if omega_min > omega_max {
            return Err(Error::InvalidSweep(format!(
                "omega_min {omega_min} exceeds omega_max {omega_max}"
            )));
        }
        if points == 0 {
            return Err(Error::InvalidSweep("points must be at least 1".into()));
        }
        Ok(Self {
            omega_min,
            omega_max,
            points,
            spacing,
        })
    }

    pub fn omega_min(&self) -> f64 {
        self.omega_min
    }

    pub fn omega_max(&self) -> f64 {
        self.omega_max
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    /// Grid frequencies in ascending order. The end points are `omega_min`
    /// and `omega_max` exactly.
    pub fn grid(&self) -> Vec<AngularFrequency> {
        let n = self.points;
        let (lo, hi) = (self.omega_min, self.omega_max);
        let mut out: Vec<f64> = (0..n)
            .map(|k| {
                if n == 1 {
                    return lo;
                }
                let t = k as f64 / (n - 1) as f64;
                match self.spacing {
                    Spacing::Linear => lo + t * (hi - lo),
                    Spacing::Logarithmic => (lo.ln() + t * (hi.ln() - lo.ln())).exp(),
                }
            })
            .collect();
        if n > 1 {
            out[0] = lo;
            out[n - 1] = hi;
        }
        out.into_iter()
            .map(|w| AngularFrequency::new(w.clamp(lo, hi)).expect("grid inside validated range"))
            .collect()
    }
}

/// Signal estimate `-sqrt(R_r R_l) / (2 Z_f) * r_out`.
///
/// The coefficient on `l_in` is analytically one; it is stored as exactly
/// `1 + 0i` so that removing it leaves only the added noise.
pub fn estimator(params: &DeviceParams, omega: AngularFrequency) -> FieldExpr {
    let z_f = feedback_impedance(params, omega);
    let factor = -(params.r_r() * params.r_l()).sqrt() / (2.0 * z_f);
    let mut est = scattering_transcribed(params, omega).out_r.scale(factor);
    est.set_u(PortId::SignalL, Complex64::new(1.0, 0.0));
    est
}

/// The estimator with its `l_in` term removed.
pub fn estimator_noise(params: &DeviceParams, omega: AngularFrequency) -> FieldExpr {
    let mut noise = estimator(params, omega);
    noise.set_u(PortId::SignalL, Complex64::new(0.0, 0.0));
    noise
}

/// `Sigma` as the symmetrized spectrum of [`estimator_noise`].
pub fn added_noise_oracle(params: &DeviceParams, omega: AngularFrequency) -> f64 {
    sym_spectrum(&estimator_noise(params, omega), params.env(), params.constants())
}

/// `xi = ln(R_l / R_0) / 2`.
pub fn xi_parameter(params: &DeviceParams) -> f64 {
    0.5 * (params.r_l() / params.r_0()).ln()
}

/// Large-feedback form `sinh^2(xi) sigma_aa + cosh^2(xi) sigma_bb`.
pub fn sigma_asymptotic(xi: f64, sigma_aa: f64, sigma_bb: f64) -> f64 {
    let s = xi.sinh();
    let c = xi.cosh();
    s * s * sigma_aa + c * c * sigma_bb
}

fn sigma(params: &DeviceParams, port: PortId, omega: AngularFrequency) -> f64 {
    params.env().sigma(port, omega, params.constants())
}

/// `10 log10((sigma_ll + Sigma) / sigma_ll)`.
pub fn noise_figure_from(sigma_ll: f64, sigma_added: f64) -> f64 {
    10.0 * ((sigma_ll + sigma_added) / sigma_ll).log10()
}

/// Evaluates the four-term added-noise sum and fills a [`NoiseReport`].
pub fn added_noise(params: &DeviceParams, omega: AngularFrequency) -> NoiseReport {
    let (r_l, r_r, r_f, r_0) = (params.r_l(), params.r_r(), params.r_f(), params.r_0());
    let z_f = feedback_impedance(params, omega);
    let inv_z = z_f.inv();
    let z2 = z_f.norm_sqr();

    let term_r = r_l * r_r / (4.0 * z2) * sigma(params, PortId::ReadoutR, omega);
    let term_f = r_l * r_f / z2 * sigma(params, PortId::FeedbackF, omega);
    let term_a = r_l * r_0 / 4.0
        * (inv_z + 1.0 / r_l - 1.0 / r_0).norm_sqr()
        * sigma(params, PortId::NoiseA, omega);
    let term_b = r_l * r_0 / 4.0
        * (inv_z + 1.0 / r_l + 1.0 / r_0).norm_sqr()
        * sigma(params, PortId::NoiseB, omega);
    let sigma_total = term_r + term_f + term_a + term_b;

    NoiseReport {
        omega: omega.get(),
        sigma_total,
        term_r,
        term_f,
        term_a,
        term_b,
        xi: xi_parameter(params),
        noise_figure_db: noise_figure_from(sigma(params, PortId::SignalL, omega), sigma_total),
        back_action: back_action(params, omega),
    }
}

/// Noise figure of the device in dB, referred to the signal-line spectrum.
pub fn noise_figure_db(params: &DeviceParams, omega: AngularFrequency) -> f64 {
    added_noise(params, omega).noise_figure_db
}

/// Symmetrized spectrum of the back-action field `l_out`.
pub fn back_action(params: &DeviceParams, omega: AngularFrequency) -> f64 {
    let out_l = scattering_transcribed(params, omega).out_l;
    sym_spectrum(&out_l, params.env(), params.constants())
}

/// Result of [`optimize_matching`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchingOptimum {
    pub xi_star: f64,
    pub sigma_star: f64,
    pub sigma_aa: f64,
    pub sigma_bb: f64,
}

impl MatchingOptimum {
    /// Noise impedance that realizes `xi_star` for the given signal line.
    pub fn matched_r_0(&self, r_l: f64) -> f64 {
        r_l * (-2.0 * self.xi_star).exp()
    }
}

/// Minimizes the large-feedback added noise over `xi` for fixed amplifier
/// line spectra.
pub fn optimize_spectra(sigma_aa: f64, sigma_bb: f64) -> MatchingOptimum {
    let best = golden::minimize(
        |xi| sigma_asymptotic(xi, sigma_aa, sigma_bb),
        XI_BRACKET.0,
        XI_BRACKET.1,
        XI_TOLERANCE,
    );
    MatchingOptimum {
        xi_star: best.x,
        sigma_star: best.f_min,
        sigma_aa,
        sigma_bb,
    }
}

/// Optimal matching at the temperatures of lines `a` and `b`.
pub fn optimize_matching(params: &DeviceParams, omega: AngularFrequency) -> MatchingOptimum {
    optimize_spectra(
        sigma(params, PortId::NoiseA, omega),
        sigma(params, PortId::NoiseB, omega),
    )
}

/// One report per grid frequency, in ascending order.
pub fn sweep(params: &DeviceParams, spec: &SweepSpec) -> Vec<NoiseReport> {
    spec.grid()
        .into_iter()
        .map(|omega| added_noise(params, omega))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::{ReactanceSpec, Resistances};
    use crate::field::{PhysicalConstants, ThermalEnvironment};
    use approx::assert_relative_eq;

    fn w(x: f64) -> AngularFrequency {
        AngularFrequency::new(x).unwrap()
    }

    fn n() -> PhysicalConstants {
        PhysicalConstants::normalized()
    }

    fn worked() -> DeviceParams {
        DeviceParams::resistive(50.0, 50.0, 1000.0, 50.0, n()).unwrap()
    }

    #[test]
    fn estimator_coefficients() {
        let est = estimator(&worked(), w(1.0));
        assert_eq!(est.u(PortId::SignalL), Complex64::new(1.0, 0.0));
        assert_relative_eq!(est.u(PortId::ReadoutR).norm(), 0.025, max_relative = 1e-14);
        assert_relative_eq!(
            est.u(PortId::FeedbackF).norm(),
            50f64.sqrt() * 1000f64.sqrt() / 1000.0,
            max_relative = 1e-14
        );
        assert_relative_eq!(est.u(PortId::FeedbackF).norm(), 0.2236, epsilon = 1e-4);
    }

    #[test]
    fn worked_point_breakdown() {
        let r = added_noise(&worked(), w(1.0));
        assert_relative_eq!(r.term_r, 3.125e-4, max_relative = 1e-12);
        assert_relative_eq!(r.term_f, 0.025, max_relative = 1e-12);
        assert_relative_eq!(r.term_a, 3.125e-4, max_relative = 1e-12);
        assert_relative_eq!(r.term_b, 0.5253125, max_relative = 1e-12);
        assert_relative_eq!(r.sigma_total, 0.5509375, max_relative = 1e-12);
        assert_relative_eq!(added_noise_oracle(&worked(), w(1.0)), 0.5509375, max_relative = 1e-12);
        assert_eq!(r.xi, 0.0);
    }

    #[test]
    fn large_feedback_reaches_vacuum_floor() {
        let p = DeviceParams::resistive(50.0, 50.0, 1e9, 50.0, n()).unwrap();
        let r = added_noise(&p, w(1.0));
        assert!((r.sigma_total - 0.5).abs() < 1e-7);
        assert!((r.noise_figure_db - 3.0103).abs() < 1e-3);
    }

    #[test]
    fn classical_regime_scales_every_term() {
        // k_B T / hbar omega = 100
        let hot = worked().with_env(ThermalEnvironment::uniform(100.0).unwrap());
        let cold = added_noise(&worked(), w(1.0));
        let warm = added_noise(&hot, w(1.0));
        let ratio = 1.0 / (0.005f64).tanh();
        assert_relative_eq!(ratio, 200.0, max_relative = 1e-4);
        for (h, c) in [
            (warm.term_r, cold.term_r),
            (warm.term_f, cold.term_f),
            (warm.term_a, cold.term_a),
            (warm.term_b, cold.term_b),
        ] {
            assert_relative_eq!(h / c, ratio, max_relative = 1e-12);
            assert!((h / c - 200.0).abs() / 200.0 < 1e-4);
        }
    }

    #[test]
    fn xi_values() {
        let p = |r_l: f64, r_0: f64| DeviceParams::resistive(r_l, 50.0, 1e3, r_0, n()).unwrap();
        assert_eq!(xi_parameter(&p(50.0, 50.0)), 0.0);
        assert_relative_eq!(xi_parameter(&p(200.0, 50.0)), 2f64.ln(), max_relative = 1e-15);
        assert_relative_eq!(xi_parameter(&p(50.0, 200.0)), -(2f64.ln()), max_relative = 1e-15);
    }

    #[test]
    fn asymptotic_form() {
        assert_eq!(sigma_asymptotic(0.0, 7.0, 0.5), 0.5);
        // sinh(ln 2) = 0.75, cosh(ln 2) = 1.25
        assert_relative_eq!(sigma_asymptotic(2f64.ln(), 0.5, 0.5), 1.0625, max_relative = 1e-14);
    }

    #[test]
    fn asymptotic_form_matches_large_feedback_limit() {
        let env = ThermalEnvironment::vacuum()
            .with(PortId::NoiseA, 3.0)
            .unwrap()
            .with(PortId::NoiseB, 0.7)
            .unwrap();
        for (r_l, r_r, r_0) in [(50.0, 50.0, 50.0), (200.0, 3.0, 50.0), (10.0, 1e4, 900.0)] {
            let p = DeviceParams::resistive(r_l, r_r, 1e12, r_0, n()).unwrap().with_env(env);
            let omega = w(1.0);
            let sa = env.sigma(PortId::NoiseA, omega, &n());
            let sb = env.sigma(PortId::NoiseB, omega, &n());
            let full = added_noise(&p, omega).sigma_total;
            let limit = sigma_asymptotic(xi_parameter(&p), sa, sb);
            assert_relative_eq!(full, limit, max_relative = 1e-6);
        }
    }

    #[test]
    fn matching_optimum() {
        let opt = optimize_matching(&worked(), w(1.0));
        assert!(opt.xi_star.abs() < 1e-6);
        assert_relative_eq!(opt.sigma_star, 0.5, max_relative = 1e-9);
        assert_relative_eq!(opt.matched_r_0(50.0), 50.0, max_relative = 1e-5);

        let opt = optimize_spectra(5.0, 5.0);
        assert!(opt.xi_star.abs() < 1e-6);
        assert_relative_eq!(opt.sigma_star, 5.0, max_relative = 1e-9);
    }

    #[test]
    fn hot_a_line_does_not_move_optimum() {
        let opt = optimize_spectra(100.0, 0.5);
        // dense grid scan oracle
        let (best_xi, _) = (-2000..=2000)
            .map(|k| k as f64 * 5e-3)
            .map(|xi| (xi, sigma_asymptotic(xi, 100.0, 0.5)))
            .fold((f64::NAN, f64::INFINITY), |b, c| if c.1 < b.1 { c } else { b });
        assert_eq!(best_xi, 0.0);
        assert!(opt.xi_star.abs() < 1e-6);
        assert_relative_eq!(opt.sigma_star, 0.5, max_relative = 1e-9);

        // exchanging the hot line keeps xi* = 0 and the minimum follows sigma_bb
        let swapped = optimize_spectra(0.5, 100.0);
        assert!(swapped.xi_star.abs() < 1e-6);
        assert_relative_eq!(swapped.sigma_star, 100.0, max_relative = 1e-9);
    }

    #[test]
    fn noise_figure_values() {
        assert_eq!(noise_figure_from(0.5, 0.0), 0.0);
        assert_relative_eq!(noise_figure_from(0.5, 1.5), 10.0 * 4f64.log10(), max_relative = 1e-14);
        assert_relative_eq!(noise_figure_from(0.5, 1.5), 6.0206, epsilon = 1e-4);
    }

    #[test]
    fn back_action_values() {
        assert_relative_eq!(back_action(&worked(), w(1.0)), 1.5, max_relative = 1e-14);

        let small = DeviceParams::resistive(50.0, 50.0, 1e3, 50e-9, n()).unwrap();
        assert!((back_action(&small, w(1.0)) - 0.5).abs() < 1e-8);

        // sigma = 5 on both amplifier lines: coth(1 / 2T) = 10
        let t = 0.5 / (0.1f64).atanh();
        let env = ThermalEnvironment::vacuum()
            .with(PortId::NoiseA, t)
            .unwrap()
            .with(PortId::NoiseB, t)
            .unwrap();
        let hot = worked().with_env(env);
        assert_relative_eq!(back_action(&hot, w(1.0)), 10.5, max_relative = 1e-12);
        assert!(added_noise(&hot, w(1.0)).back_action >= 0.5);
    }

    #[test]
    fn sweep_grid_contract() {
        let spec = SweepSpec::new(1e2, 1e8, 13, Spacing::Logarithmic).unwrap();
        let g = spec.grid();
        assert_eq!(g.len(), 13);
        assert_eq!(g[0].get(), 1e2);
        assert_eq!(g[12].get(), 1e8);
        assert!(g.windows(2).all(|p| p[0].get() < p[1].get()));

        let lin = SweepSpec::new(1.0, 2.0, 5, Spacing::Linear).unwrap().grid();
        assert_eq!(lin.iter().map(|w| w.get()).collect::<Vec<_>>(), vec![1.0, 1.25, 1.5, 1.75, 2.0]);

        assert!(SweepSpec::new(2.0, 1.0, 3, Spacing::Linear).is_err());
        assert!(SweepSpec::new(0.0, 1.0, 3, Spacing::Linear).is_err());
        assert!(SweepSpec::new(1.0, 1.0, 0, Spacing::Linear).is_err());
    }

    #[test]
    fn single_point_sweep() {
        let spec = SweepSpec::new(3.0, 30.0, 1, Spacing::Logarithmic).unwrap();
        let reports = sweep(&worked(), &spec);
        assert_eq!(reports, vec![added_noise(&worked(), w(3.0))]);
    }

    #[test]
    fn resistive_sweep_is_flat_at_zero_temperature() {
        let spec = SweepSpec::new(1e-2, 1e4, 9, Spacing::Logarithmic).unwrap();
        let reports = sweep(&worked(), &spec);
        for r in &reports {
            assert_eq!(r.sigma_total, reports[0].sigma_total);
        }
    }

    #[test]
    fn capacitive_feedback_noise_grows_with_frequency() {
        let p = worked().with_reactance(ReactanceSpec::Capacitive(1e-6)).unwrap();
        let spec = SweepSpec::new(1e1, 1e7, 25, Spacing::Logarithmic).unwrap();
        let reports = sweep(&p, &spec);
        for pair in reports.windows(2) {
            assert!(pair[1].term_a >= pair[0].term_a);
            assert!(pair[1].term_b >= pair[0].term_b);
        }
        assert!(reports.last().unwrap().term_a > reports[0].term_a);
    }

    #[test]
    fn readout_and_feedback_terms_fall_with_reactance() {
        let mut prev: Option<NoiseReport> = None;
        for x in [0.0, 10.0, 100.0, 1e3, 1e4, 1e5] {
            let p = worked().with_reactance(ReactanceSpec::Constant(x)).unwrap();
            let r = added_noise(&p, w(1.0));
            if let Some(q) = prev {
                assert!(r.term_r <= q.term_r);
                assert!(r.term_f <= q.term_f);
            }
            prev = Some(r);
        }
        // terms a and b settle at their 1/Z_f -> 0 limits
        let last = prev.unwrap();
        assert!(last.term_a < 1e-7);
        assert_relative_eq!(last.term_b, 0.5, max_relative = 1e-4);
    }

    #[test]
    fn report_terms_sum_to_total() {
        let p = worked()
            .with_resistances(Resistances { r_l: 20.0, r_r: 75.0, r_f: 400.0, r_0: 120.0 })
            .unwrap()
            .with_reactance(ReactanceSpec::Inductive(1e-3))
            .unwrap()
            .with_env(ThermalEnvironment::uniform(2.5).unwrap());
        let r = added_noise(&p, w(3e5));
        let sum = r.term_r + r.term_f + r.term_a + r.term_b;
        assert_relative_eq!(r.sigma_total, sum, max_relative = 1e-12);
        assert_relative_eq!(r.sigma_total, added_noise_oracle(&p, w(3e5)), max_relative = 1e-12);
    }
}

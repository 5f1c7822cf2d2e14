//! Physical inputs, the band-gap reservoir profile, and the dressed-frame
//! quantities derived from them.
//!
//! All frequencies and rates are dimensionless, measured in units of the
//! free-space spontaneous rate `gamma` (which defaults to 1).

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Raw physical inputs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SystemParams {
    /// Free-space spontaneous emission rate.
    pub gamma: f64,
    /// Pure dephasing rate.
    pub gamma_p: f64,
    /// Cavity field damping rate.
    pub kappa: f64,
    /// Emitter-cavity coupling.
    pub g: f64,
    /// Resonant Rabi frequency of the drive.
    pub epsilon: f64,
    /// Emitter-laser detuning.
    pub delta_a: f64,
    /// Cavity-laser detuning.
    pub delta_c: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self { gamma: 1.0, gamma_p: 0.0, kappa: 1.0, g: 0.0, epsilon: 0.0, delta_a: 0.0, delta_c: 0.0 }
    }
}

fn require(name: &'static str, value: f64, ok: bool, what: &str) -> Result<()> {
    if !value.is_finite() || !ok {
        return Err(Error::InvalidParameter { name, reason: format!("{what}, got {value}") });
    }
    Ok(())
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        require("gamma", self.gamma, self.gamma >= 0.0, "must be >= 0")?;
        require("gamma_p", self.gamma_p, self.gamma_p >= 0.0, "must be >= 0")?;
        require("kappa", self.kappa, self.kappa > 0.0, "must be > 0")?;
        require("g", self.g, self.g >= 0.0, "must be >= 0")?;
        require("epsilon", self.epsilon, true, "must be finite")?;
        require("delta_a", self.delta_a, true, "must be finite")?;
        require("delta_c", self.delta_c, true, "must be finite")?;
        Ok(())
    }

    /// Generalized Rabi frequency `sqrt(4 epsilon^2 + delta_a^2)`.
    pub fn rabi_frequency(&self) -> f64 {
        (4.0 * self.epsilon * self.epsilon + self.delta_a * self.delta_a).sqrt()
    }

    /// Drive parameters `(epsilon, delta_a)` giving Rabi frequency `omega`
    /// with `epsilon / delta_a = ratio` (`delta_a > 0`).
    pub fn drive_for_ratio(omega: f64, ratio: f64) -> (f64, f64) {
        let delta_a = omega / (4.0 * ratio * ratio + 1.0).sqrt();
        (ratio * delta_a, delta_a)
    }
}

/// Transmission `|D|^2` of the reservoir at the three dressed transition
/// frequencies `omega_L` and `omega_L +/- 2 Omega`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReservoirProfile {
    pub d2_central: f64,
    pub d2_upper: f64,
    pub d2_lower: f64,
}

impl ReservoirProfile {
    pub fn new(d2_central: f64, d2_upper: f64, d2_lower: f64) -> Result<Self> {
        for (name, v) in [("d2_central", d2_central), ("d2_upper", d2_upper), ("d2_lower", d2_lower)] {
            require(name, v, (0.0..=1.0).contains(&v), "transmission must lie in [0, 1]")?;
        }
        Ok(Self { d2_central, d2_upper, d2_lower })
    }

    /// Free space: every transition fully transmitted.
    pub fn transparent() -> Self {
        Self { d2_central: 1.0, d2_upper: 1.0, d2_lower: 1.0 }
    }
}

/// Unit-step band edge at `omega_b_offset` (relative to the laser frequency):
/// frequencies below the edge are forbidden.
pub fn band_edge_profile(omega_b_offset: f64, omega: f64) -> ReservoirProfile {
    let step = |freq: f64| if freq < omega_b_offset { 0.0 } else { 1.0 };
    ReservoirProfile {
        d2_central: step(0.0),
        d2_upper: step(2.0 * omega),
        d2_lower: step(-2.0 * omega),
    }
}

/// Whether the `1/Omega` (non-secular) cavity couplings are kept.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CouplingMode {
    NonSecular,
    Secular,
}

impl CouplingMode {
    pub fn name(self) -> &'static str {
        match self {
            CouplingMode::NonSecular => "nonsecular",
            CouplingMode::Secular => "secular",
        }
    }
}

/// Dressed-frame parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DressedParams {
    pub omega: f64,
    pub phi: f64,
    pub s: f64,
    pub c: f64,
    pub g: f64,
    pub kappa: f64,
    /// Resonant coupling `g s c`.
    pub g1: f64,
    /// Sideband coupling `g sqrt(s^4 + c^4)`.
    pub g2: f64,
    pub gamma0: f64,
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    /// Inversion relaxation rate `gamma_plus + gamma_minus`.
    pub gamma1: f64,
    /// Inversion pump asymmetry `gamma_plus - gamma_minus`.
    pub gamma2: f64,
    /// `i g^2 / (2 Omega)`, zero in secular mode.
    pub alpha: Complex64,
    /// `i g^2 (s^2 - c^2)^2 / (2 Omega)`, zero in secular mode.
    pub alpha_prime: Complex64,
    pub mode: CouplingMode,
}

/// Derives the dressed-frame quantities.
///
/// The central-line rate follows the printed dephasing term `(c^2 - s^2) gamma_p`
/// and may come out negative when `s > c`; that is kept here and rejected by
/// the Lindblad oracle.
pub fn derive_dressed(params: &SystemParams, reservoir: &ReservoirProfile, mode: CouplingMode) -> Result<DressedParams> {
    params.validate()?;
    ReservoirProfile::new(reservoir.d2_central, reservoir.d2_upper, reservoir.d2_lower)?;
    let omega = params.rabi_frequency();
    if omega <= 0.0 {
        return Err(Error::UndrivenEmitter);
    }
    let ratio = (params.delta_a / omega).clamp(-1.0, 1.0);
    let c = ((1.0 + ratio) / 2.0).sqrt();
    let s = ((1.0 - ratio) / 2.0).sqrt();
    let (s2, c2) = (s * s, c * c);
    let g = params.g;

    let dephasing_sideband = 4.0 * s2 * c2 * params.gamma_p;
    let gamma0 = s2 * c2 * params.gamma * reservoir.d2_central + (c2 - s2) * params.gamma_p;
    let gamma_minus = s2 * s2 * params.gamma * reservoir.d2_lower + dephasing_sideband;
    let gamma_plus = c2 * c2 * params.gamma * reservoir.d2_upper + dephasing_sideband;

    let (alpha, alpha_prime) = match mode {
        CouplingMode::NonSecular => (
            Complex64::new(0.0, g * g / (2.0 * omega)),
            Complex64::new(0.0, g * g * (s2 - c2).powi(2) / (2.0 * omega)),
        ),
        CouplingMode::Secular => (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)),
    };

    Ok(DressedParams {
        omega,
        phi: s.atan2(c),
        s,
        c,
        g,
        kappa: params.kappa,
        g1: g * s * c,
        g2: g * (s2 * s2 + c2 * c2).sqrt(),
        gamma0,
        gamma_plus,
        gamma_minus,
        gamma1: gamma_plus + gamma_minus,
        gamma2: gamma_plus - gamma_minus,
        alpha,
        alpha_prime,
        mode,
    })
}

impl DressedParams {
    /// Replaces the sideband rates with directly specified dressed rates
    /// (published parameter sets often quote these rather than the bare inputs).
    pub fn with_sideband_rates(mut self, gamma_plus: f64, gamma_minus: f64) -> Result<Self> {
        require("gamma_plus", gamma_plus, gamma_plus >= 0.0, "must be >= 0")?;
        require("gamma_minus", gamma_minus, gamma_minus >= 0.0, "must be >= 0")?;
        self.gamma_plus = gamma_plus;
        self.gamma_minus = gamma_minus;
        self.gamma1 = gamma_plus + gamma_minus;
        self.gamma2 = gamma_plus - gamma_minus;
        Ok(self)
    }

    pub fn with_mode(self, mode: CouplingMode) -> Self {
        let mut out = self;
        out.mode = mode;
        match mode {
            CouplingMode::Secular => {
                out.alpha = Complex64::new(0.0, 0.0);
                out.alpha_prime = Complex64::new(0.0, 0.0);
            }
            CouplingMode::NonSecular => {
                let (s2, c2) = (self.s * self.s, self.c * self.c);
                out.alpha = Complex64::new(0.0, self.g * self.g / (2.0 * self.omega));
                out.alpha_prime = Complex64::new(0.0, self.g * self.g * (s2 - c2).powi(2) / (2.0 * self.omega));
            }
        }
        out
    }

    /// Inversion-dependent cavity shift `g2^2 / (2 Omega)`; zero in secular mode.
    pub fn cavity_shift(&self) -> f64 {
        ((self.alpha + self.alpha_prime) / 2.0).im
    }

    /// Two-photon coupling `g1^2 / Omega`; zero in secular mode.
    pub fn two_photon(&self) -> f64 {
        ((self.alpha - self.alpha_prime) / 2.0).im
    }

    /// `1/Omega` in non-secular mode and 0 in secular mode: the weight of
    /// every non-secular correction in the reduced resonant expressions.
    pub fn non_secular_weight(&self) -> f64 {
        match self.mode {
            CouplingMode::NonSecular => 1.0 / self.omega,
            CouplingMode::Secular => 0.0,
        }
    }

    /// Steady dressed inversion `-gamma2 / gamma1`.
    pub fn inversion(&self) -> f64 {
        -self.gamma2 / self.gamma1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn resonant(g: f64, omega: f64) -> SystemParams {
        SystemParams { g, epsilon: omega / 2.0, ..SystemParams::default() }
    }

    #[test]
    fn resonant_drive_is_symmetric() {
        let d = derive_dressed(&resonant(3.0, 40.0), &ReservoirProfile::transparent(), CouplingMode::NonSecular).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((d.phi - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        assert!((d.s - h).abs() < 1e-15 && (d.c - h).abs() < 1e-15);
        assert!((d.g1 - 1.5).abs() < 1e-15);
        assert!((d.g2 - 3.0 * h).abs() < 1e-15);
        assert!(d.alpha_prime.norm() < 1e-15);
    }

    #[test]
    fn sideband_override_gives_equal_gamma1_gamma2() {
        let p = SystemParams { gamma: 1.0, gamma_p: 0.0, epsilon: 50.0, ..SystemParams::default() };
        let res = ReservoirProfile::new(1.0, 1.0, 0.0).unwrap();
        let d = derive_dressed(&p, &res, CouplingMode::NonSecular).unwrap().with_sideband_rates(10.0, 0.0).unwrap();
        assert_eq!(d.gamma1, 10.0);
        assert_eq!(d.gamma2, 10.0);
    }

    #[test]
    fn hand_evaluated_couplings() {
        let d = derive_dressed(&resonant(10.0, 100.0), &ReservoirProfile::transparent(), CouplingMode::NonSecular).unwrap();
        assert!((d.g1 - 5.0).abs() < 1e-14);
        assert!((d.alpha - Complex64::new(0.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn undriven_emitter_rejected() {
        let p = SystemParams { g: 1.0, ..SystemParams::default() };
        assert_eq!(
            derive_dressed(&p, &ReservoirProfile::transparent(), CouplingMode::NonSecular),
            Err(Error::UndrivenEmitter)
        );
    }

    #[test]
    fn invalid_inputs_rejected() {
        let mut p = resonant(1.0, 10.0);
        p.kappa = 0.0;
        assert!(matches!(p.validate(), Err(Error::InvalidParameter { name: "kappa", .. })));
        assert!(ReservoirProfile::new(1.2, 0.0, 0.0).is_err());
    }

    #[test]
    fn band_edge_cases() {
        let omega = 50.0;
        assert_eq!(band_edge_profile(-150.0, omega), ReservoirProfile::new(1.0, 1.0, 1.0).unwrap());
        assert_eq!(band_edge_profile(-20.0, omega), ReservoirProfile::new(1.0, 1.0, 0.0).unwrap());
        assert_eq!(band_edge_profile(150.0, omega), ReservoirProfile::new(0.0, 0.0, 0.0).unwrap());
    }

    #[test]
    fn gap_at_lower_sideband_removes_gamma_minus() {
        let p = SystemParams { epsilon: 20.0, delta_a: 5.0, ..SystemParams::default() };
        let omega = p.rabi_frequency();
        let d = derive_dressed(&p, &band_edge_profile(-omega, omega), CouplingMode::NonSecular).unwrap();
        assert_eq!(d.gamma_minus, 0.0);
        assert!(d.gamma_plus > 0.0 && d.gamma1 == d.gamma2);
    }

    #[test]
    fn negative_central_rate_is_reported_not_clamped() {
        let p = SystemParams { gamma: 0.0, gamma_p: 1.0, epsilon: 1.0, delta_a: -10.0, ..SystemParams::default() };
        let d = derive_dressed(&p, &ReservoirProfile::transparent(), CouplingMode::NonSecular).unwrap();
        assert!(d.s > d.c && d.gamma0 < 0.0);
    }

    #[test]
    fn drive_for_ratio_keeps_omega() {
        let (eps, da) = SystemParams::drive_for_ratio(100.0, 2.5);
        let p = SystemParams { epsilon: eps, delta_a: da, ..SystemParams::default() };
        assert!((p.rabi_frequency() - 100.0).abs() < 1e-12);
        assert!((eps / da - 2.5).abs() < 1e-14);
    }

    fn arb_params() -> impl Strategy<Value = (SystemParams, ReservoirProfile)> {
        (
            (0.0..5.0f64, 0.0..2.0f64, 0.01..5.0f64, 0.0..20.0f64),
            (-60.0..60.0f64, -80.0..80.0f64),
            (0.0..=1.0f64, 0.0..=1.0f64, 0.0..=1.0f64),
        )
            .prop_filter("driven", |(_, (e, d), _)| e.abs() + d.abs() > 1e-3)
            .prop_map(|((gamma, gamma_p, kappa, g), (epsilon, delta_a), (c, u, l))| {
                (
                    SystemParams { gamma, gamma_p, kappa, g, epsilon, delta_a, delta_c: 0.0 },
                    ReservoirProfile::new(c, u, l).unwrap(),
                )
            })
    }

    proptest! {
        #[test]
        fn relaxation_dominates_asymmetry((p, r) in arb_params()) {
            let d = derive_dressed(&p, &r, CouplingMode::NonSecular).unwrap();
            prop_assert!(d.gamma1 >= d.gamma2.abs());
            prop_assert!(d.gamma_plus >= 0.0 && d.gamma_minus >= 0.0);
            if d.gamma1 > 0.0 {
                let inv = d.inversion();
                prop_assert!((-1.0..=1.0).contains(&inv));
            }
            prop_assert!((d.s * d.s + d.c * d.c - 1.0).abs() < 1e-14);
            prop_assert!((0.0..=std::f64::consts::FRAC_PI_2).contains(&d.phi));
        }

        #[test]
        fn alpha_identities(phi in 0.05..(std::f64::consts::FRAC_PI_2 - 0.05), omega in 1.0..500.0f64, g in 0.01..30.0f64) {
            let p = SystemParams { g, epsilon: omega * phi.sin() * phi.cos(), delta_a: omega * (2.0 * phi).cos(), ..SystemParams::default() };
            let d = derive_dressed(&p, &ReservoirProfile::transparent(), CouplingMode::NonSecular).unwrap();
            prop_assert!((d.phi - phi).abs() < 1e-12);
            let sum = (d.alpha + d.alpha_prime) / 2.0;
            let diff = (d.alpha - d.alpha_prime) / 2.0;
            let want_sum = Complex64::new(0.0, d.g2 * d.g2 / (2.0 * d.omega));
            let want_diff = Complex64::new(0.0, d.g1 * d.g1 / d.omega);
            prop_assert!((sum - want_sum).norm() <= 1e-12 * want_sum.norm());
            prop_assert!((diff - want_diff).norm() <= 1e-12 * want_diff.norm());
        }

        #[test]
        fn secular_differs_only_in_alphas((p, r) in arb_params()) {
            let ns = derive_dressed(&p, &r, CouplingMode::NonSecular).unwrap();
            let sec = derive_dressed(&p, &r, CouplingMode::Secular).unwrap();
            prop_assert_eq!(sec.alpha, Complex64::new(0.0, 0.0));
            prop_assert_eq!(sec.alpha_prime, Complex64::new(0.0, 0.0));
            let mut patched = sec;
            patched.alpha = ns.alpha;
            patched.alpha_prime = ns.alpha_prime;
            patched.mode = ns.mode;
            prop_assert_eq!(patched, ns);
            prop_assert_eq!(sec.with_mode(CouplingMode::NonSecular), ns);
        }
    }
}

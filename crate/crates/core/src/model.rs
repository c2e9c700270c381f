//! Cavity–mechanics model: parameters, Hamiltonians, the polaron picture and
//! the resonance conditions it predicts.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{self, expm, tensor, HilbertSpec, Operator};
use crate::C64;

/// CODATA 2018 exact values.
pub mod constants {
    /// Reduced Planck constant, J·s.
    pub const HBAR: f64 = 1.054571817e-34;
    /// Boltzmann constant, J/K.
    pub const K_B: f64 = 1.380649e-23;
    /// Angular frequencies are stored in rad/μs.
    pub const RAD_PER_US_TO_RAD_PER_S: f64 = 1e6;
}

/// Angular frequency (rad/μs) from an ordinary frequency in MHz.
pub fn mhz(nu: f64) -> f64 {
    2.0 * PI * nu
}

/// Ordinary frequency in MHz from an angular frequency in rad/μs.
pub fn to_mhz(omega: f64) -> f64 {
    omega / (2.0 * PI)
}

/// Physical parameters; every frequency is angular (rad/μs).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Mechanical frequency ω_m.
    pub omega_m: f64,
    /// Single-photon optomechanical coupling G.
    pub g: f64,
    /// Probe drive strength ε_c.
    pub eps_c: f64,
    /// Cavity energy decay rate γ.
    pub gamma: f64,
    /// Mechanical energy decay rate γ_m.
    pub gamma_m: f64,
    /// Cavity–probe detuning Δ = ω₀ − ω_c.
    pub delta: f64,
    /// Temperature of the mechanical bath in kelvin.
    pub temperature: f64,
    /// Bare cavity frequency, only needed for lab-frame checks.
    pub omega_0: Option<f64>,
}

impl ModelParams {
    /// Strong-coupling device used by the recipes: ν_m = 10 MHz,
    /// G/2π = 2.5 MHz, γ/2π = 0.1 MHz, γ_m/2π = 0.01 MHz, ε_c/2π = 0.01 MHz,
    /// T = 1 μK, driven at Δ = Δ₀.
    pub fn reference() -> Self {
        let mut p = ModelParams {
            omega_m: mhz(10.0),
            g: mhz(2.5),
            eps_c: mhz(0.01),
            gamma: mhz(0.1),
            gamma_m: mhz(0.01),
            delta: 0.0,
            temperature: 1e-6,
            omega_0: None,
        };
        p.delta = p.delta0();
        p
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.omega_m,
            self.g,
            self.eps_c,
            self.gamma,
            self.gamma_m,
            self.delta,
            self.temperature,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("non-finite parameter".into()));
        }
        let checks = [
            (self.omega_m > 0.0, "omega_m must be > 0"),
            (self.gamma > 0.0, "gamma must be > 0"),
            (self.gamma_m >= 0.0, "gamma_m must be >= 0"),
            (self.eps_c >= 0.0, "eps_c must be >= 0"),
            (self.temperature >= 0.0, "temperature must be >= 0"),
        ];
        match checks.iter().find(|(ok, _)| !ok) {
            Some((_, msg)) => Err(Error::InvalidParameter((*msg).into())),
            None => Ok(()),
        }
    }

    /// Single-photon Kerr shift Δ₀ = G²/ω_m.
    pub fn delta0(&self) -> f64 {
        delta0(self)
    }

    pub fn thermal_phonons(&self) -> f64 {
        thermal_phonon_number(self)
    }
}

/// Fock-space cutoffs and the convergence policy used to grow them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationSpec {
    pub n_cav: usize,
    pub n_mech: usize,
    pub auto_converge: bool,
    pub rel_tol: f64,
    /// Cap on the joint dimension `n_cav * n_mech`.
    pub max_dim: usize,
}

impl TruncationSpec {
    pub fn new(n_cav: usize, n_mech: usize) -> Self {
        TruncationSpec {
            n_cav,
            n_mech,
            auto_converge: false,
            rel_tol: 1e-3,
            max_dim: 400,
        }
    }

    pub fn converging(mut self, rel_tol: f64, max_dim: usize) -> Self {
        self.auto_converge = true;
        self.rel_tol = rel_tol;
        self.max_dim = max_dim;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_cav < 2 || self.n_mech < 2 {
            return Err(Error::InvalidDimension(format!(
                "cutoffs must be >= 2 (n_cav = {}, n_mech = {})",
                self.n_cav, self.n_mech
            )));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::InvalidParameter("rel_tol must be > 0".into()));
        }
        Ok(())
    }

    pub fn joint_dim(&self) -> usize {
        self.n_cav * self.n_mech
    }

    pub fn space(&self) -> HilbertSpec {
        HilbertSpec::new(vec![self.n_cav, self.n_mech]).expect("validated cutoffs")
    }

    /// Next level of the convergence ladder: one more photon level and 50%
    /// more phonon levels.
    pub fn refined(&self) -> TruncationSpec {
        TruncationSpec {
            n_cav: self.n_cav + 1,
            n_mech: (self.n_mech * 3).div_ceil(2),
            ..self.clone()
        }
    }
}

/// Ladder operators of the cavity (`a`) and mechanics (`b`) embedded in the
/// joint space `[n_cav, n_mech]`, cavity first.
#[derive(Clone, Debug)]
pub struct ModeOperators {
    pub space: HilbertSpec,
    pub a: Operator,
    pub b: Operator,
    pub n_cav_op: Operator,
    pub n_mech_op: Operator,
}

impl ModeOperators {
    pub fn new(trunc: &TruncationSpec) -> Result<Self> {
        trunc.validate()?;
        let id_c = fock::identity(trunc.n_cav)?;
        let id_m = fock::identity(trunc.n_mech)?;
        let a = tensor(&fock::destroy(trunc.n_cav)?, &id_m);
        let b = tensor(&id_c, &fock::destroy(trunc.n_mech)?);
        let n_cav_op = tensor(&fock::number(trunc.n_cav)?, &id_m);
        let n_mech_op = tensor(&id_c, &fock::number(trunc.n_mech)?);
        Ok(ModeOperators {
            space: trunc.space(),
            a,
            b,
            n_cav_op,
            n_mech_op,
        })
    }
}

pub fn delta0(params: &ModelParams) -> f64 {
    params.g * params.g / params.omega_m
}

/// Bose–Einstein occupation of the mechanical bath, `1/(exp(ħω_m/k_B T) − 1)`.
pub fn thermal_phonon_number(params: &ModelParams) -> f64 {
    if params.temperature <= 0.0 {
        return 0.0;
    }
    let energy = constants::HBAR * params.omega_m * constants::RAD_PER_US_TO_RAD_PER_S;
    let x = energy / (constants::K_B * params.temperature);
    1.0 / x.exp_m1()
}

/// `ω₀ a†a + ω_m b†b + G a†a (b† + b)`
pub fn hamiltonian_lab(params: &ModelParams, trunc: &TruncationSpec) -> Result<Operator> {
    let omega_0 = params.omega_0.ok_or(Error::MissingOmega0)?;
    let ops = ModeOperators::new(trunc)?;
    Ok(coupled_hamiltonian(&ops, omega_0, params))
}

/// Probe-frame Hamiltonian
/// `Δ a†a + ω_m b†b + G a†a (b† + b) + i ε_c (a† − a)`.
pub fn hamiltonian_rotating(params: &ModelParams, trunc: &TruncationSpec) -> Result<Operator> {
    let ops = ModeOperators::new(trunc)?;
    Ok(hamiltonian_rotating_with(&ops, params))
}

pub fn hamiltonian_rotating_with(ops: &ModeOperators, params: &ModelParams) -> Operator {
    let h0 = coupled_hamiltonian(ops, params.delta, params);
    let drive = (&ops.a.dagger() - &ops.a).scale(C64::new(0.0, params.eps_c));
    &h0 + &drive
}

fn coupled_hamiltonian(ops: &ModeOperators, cavity_freq: f64, params: &ModelParams) -> Operator {
    let x = &ops.b + &ops.b.dagger();
    let coupling = &ops.n_cav_op * &x;
    let mut h = ops.n_cav_op.scale(C64::new(cavity_freq, 0.0));
    h = &h + &ops.n_mech_op.scale(C64::new(params.omega_m, 0.0));
    &h + &coupling.scale(C64::new(params.g, 0.0))
}

/// Lab-frame eigenvalue `n ω₀ − n² G²/ω_m + m ω_m` of the dressed state with
/// `n` photons and `m` displaced phonons.
pub fn spectrum_analytic(n: usize, m: usize, params: &ModelParams) -> Result<f64> {
    let omega_0 = params.omega_0.ok_or(Error::MissingOmega0)?;
    Ok(dressed_energy(n, m, omega_0, params))
}

/// Same ladder in the probe frame (`Δ` in place of `ω₀`, drive off).
pub fn spectrum_rotating(n: usize, m: usize, params: &ModelParams) -> f64 {
    dressed_energy(n, m, params.delta, params)
}

fn dressed_energy(n: usize, m: usize, cavity_freq: f64, params: &ModelParams) -> f64 {
    let (n, m) = (n as f64, m as f64);
    n * cavity_freq - n * n * delta0(params) + m * params.omega_m
}

/// `U = exp[−(G/ω_m) a†a (b† − b)]`.
///
/// With this sign `U† H U` is diagonal in the bare product basis and the
/// dressed eigenstates are `U|n, m>`.
pub fn polaron_transform(params: &ModelParams, trunc: &TruncationSpec) -> Result<Operator> {
    let ops = ModeOperators::new(trunc)?;
    let gen = &ops.n_cav_op * &(&ops.b.dagger() - &ops.b);
    Ok(expm(&gen.scale(C64::new(-params.g / params.omega_m, 0.0))))
}

/// Detuning regime for phonon-sideband predictions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResonanceCondition {
    /// Δ = Δ₀, the single-photon resonance.
    SinglePhoton,
    /// Δ = 0, probe on the bare cavity.
    BareCavity,
}

impl FromStr for ResonanceCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
        match key.as_str() {
            "delta=delta0" | "delta0" | "single-photon" => Ok(ResonanceCondition::SinglePhoton),
            "delta=0" | "zero" | "bare" => Ok(ResonanceCondition::BareCavity),
            _ => Err(Error::UnknownCondition(s.to_string())),
        }
    }
}

impl fmt::Display for ResonanceCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResonanceCondition::SinglePhoton => write!(f, "delta=delta0"),
            ResonanceCondition::BareCavity => write!(f, "delta=0"),
        }
    }
}

/// A coupling `G/ω_m` at which a phonon-assisted two-photon transition
/// becomes resonant.
#[derive(Clone, Debug, PartialEq)]
pub struct SidebandPeak {
    pub g_over_omega_m: f64,
    /// Photon number of the initial dressed state (`|n, 0~>`).
    pub from_photons: usize,
    /// Phonons `m` in the final state `|2, m~>`.
    pub phonons: usize,
    pub label: String,
}

impl SidebandPeak {
    fn new(from_photons: usize, phonons: usize, ratio: f64) -> Self {
        SidebandPeak {
            g_over_omega_m: ratio,
            from_photons,
            phonons,
            label: format!("|{from_photons},0~> -> |2,{phonons}~>"),
        }
    }
}

/// Couplings `G/ω_m` inside `[lo, hi]` where `g2` is expected to peak.
///
/// At Δ = Δ₀ the transition `|0,0~> -> |2,m~>` resonates at `√(m/2)` for
/// every `m ≥ 1`. At Δ = 0, inside `0 < G < ω_m`, `|0,0~> -> |2,m~>` gives
/// `√(m/4)` (m = 1, 2, 3) and `|1,0~> -> |2,m~>` gives `√(m/3)` (m = 1, 2).
/// Coincident values from the two families are kept as separate entries.
pub fn predicted_g2_peaks(condition: ResonanceCondition, lo: f64, hi: f64) -> Vec<SidebandPeak> {
    let in_range = |p: &SidebandPeak| p.g_over_omega_m >= lo && p.g_over_omega_m <= hi;
    let mut peaks: Vec<SidebandPeak> = match condition {
        ResonanceCondition::SinglePhoton => (1..)
            .map(|m| SidebandPeak::new(0, m, (m as f64 / 2.0).sqrt()))
            .take_while(|p| p.g_over_omega_m <= hi)
            .filter(in_range)
            .collect(),
        ResonanceCondition::BareCavity => (1..=3)
            .map(|m| SidebandPeak::new(0, m, (m as f64 / 4.0).sqrt()))
            .chain((1..=2).map(|m| SidebandPeak::new(1, m, (m as f64 / 3.0).sqrt())))
            .filter(in_range)
            .collect(),
    };
    peaks.sort_by(|a, b| a.g_over_omega_m.total_cmp(&b.g_over_omega_m));
    peaks
}

#[cfg(test)]
mod tests {
    use super::*;

    fn with_omega0(nu0: f64) -> ModelParams {
        ModelParams {
            omega_0: Some(mhz(nu0)),
            ..ModelParams::reference()
        }
    }

    #[test]
    fn delta0_examples() {
        let p = ModelParams::reference();
        assert!((to_mhz(delta0(&p)) - 0.625).abs() < 1e-12);
        let p0 = ModelParams { g: 0.0, ..p.clone() };
        assert_eq!(delta0(&p0), 0.0);
        let p1 = ModelParams { g: p.omega_m, ..p };
        assert!((delta0(&p1) - p1.omega_m).abs() < 1e-12);
    }

    #[test]
    fn thermal_occupation() {
        let mut p = ModelParams::reference();
        p.temperature = 0.0;
        assert_eq!(thermal_phonon_number(&p), 0.0);
        p.temperature = 1e-6;
        assert!(thermal_phonon_number(&p) < 1e-100);
        p.temperature = 2e-3;
        // ħω_m/k_B T = 0.239960...
        let x = constants::HBAR * mhz(10.0) * 1e6 / (constants::K_B * 2e-3);
        assert!((x - 0.23996).abs() < 1e-5);
        assert!((thermal_phonon_number(&p) - 3.687).abs() < 1e-3);
    }

    #[test]
    fn thermal_occupation_is_monotone() {
        let base = ModelParams::reference();
        let mut last = 0.0;
        for t in [1e-5, 1e-4, 2e-4, 1e-3, 2e-3, 1e-2] {
            let n = thermal_phonon_number(&ModelParams { temperature: t, ..base.clone() });
            assert!(n > last);
            last = n;
        }
        let mut last = 0.0;
        for nu_m in [40.0, 20.0, 10.0, 5.0] {
            let p = ModelParams { omega_m: mhz(nu_m), temperature: 1e-3, ..base.clone() };
            let n = thermal_phonon_number(&p);
            assert!(n > last);
            last = n;
        }
    }

    #[test]
    fn lab_hamiltonian_requires_omega0() {
        let p = ModelParams::reference();
        assert!(matches!(
            hamiltonian_lab(&p, &TruncationSpec::new(3, 3)),
            Err(Error::MissingOmega0)
        ));
        assert!(matches!(spectrum_analytic(0, 0, &p), Err(Error::MissingOmega0)));
    }

    #[test]
    fn uncoupled_lab_hamiltonian_is_diagonal() {
        let p = ModelParams { g: 0.0, ..with_omega0(1000.0) };
        let trunc = TruncationSpec::new(3, 4);
        let h = hamiltonian_lab(&p, &trunc).unwrap().to_dense();
        for n in 0..3 {
            for m in 0..4 {
                let i = n * 4 + m;
                let want = n as f64 * p.omega_0.unwrap() + m as f64 * p.omega_m;
                assert!((h[[i, i]].re - want).abs() < 1e-9);
            }
        }
        let off: f64 = h.indexed_iter().filter(|((i, j), _)| i != j).map(|(_, v)| v.norm()).sum();
        assert_eq!(off, 0.0);
        assert_eq!(h[[0, 0]], C64::new(0.0, 0.0));
    }

    #[test]
    fn hamiltonians_are_hermitian() {
        let p = with_omega0(1000.0);
        let trunc = TruncationSpec::new(4, 8);
        let lab = hamiltonian_lab(&p, &trunc).unwrap();
        let rot = hamiltonian_rotating(&p, &trunc).unwrap();
        assert!(lab.hermiticity_deviation() < 1e-12);
        assert!(rot.hermiticity_deviation() < 1e-12);
    }

    #[test]
    fn photon_number_is_conserved_by_lab_hamiltonian() {
        let p = with_omega0(1000.0);
        let trunc = TruncationSpec::new(4, 8);
        let h = hamiltonian_lab(&p, &trunc).unwrap();
        let ops = ModeOperators::new(&trunc).unwrap();
        assert_eq!(h.commutator(&ops.n_cav_op).max_abs(), 0.0);
    }

    #[test]
    fn undriven_rotating_frame_matches_lab_frame() {
        let mut p = with_omega0(1000.0);
        p.eps_c = 0.0;
        p.delta = p.omega_0.unwrap();
        let trunc = TruncationSpec::new(3, 6);
        let lab = hamiltonian_lab(&p, &trunc).unwrap();
        let rot = hamiltonian_rotating(&p, &trunc).unwrap();
        assert_eq!(lab.max_abs_diff(&rot), 0.0);
    }

    #[test]
    fn drive_term_has_real_spectrum() {
        let a = fock::destroy(5).unwrap();
        let drive = (&a.dagger() - &a).scale(C64::new(0.0, 1.0));
        let eig = fock::eig_hermitian(&drive).unwrap();
        // spectrum symmetric about zero
        for (lo, hi) in eig.values.iter().zip(eig.values.iter().rev()) {
            assert!((lo + hi).abs() < 1e-12);
        }
    }

    #[test]
    fn spectrum_examples() {
        let p = with_omega0(1000.0);
        assert_eq!(spectrum_analytic(0, 0, &p).unwrap(), 0.0);
        let e10 = spectrum_analytic(1, 0, &p).unwrap();
        assert!((e10 - (p.omega_0.unwrap() - delta0(&p))).abs() < 1e-9);
        let e21 = spectrum_analytic(2, 1, &p).unwrap();
        assert!((to_mhz(e21) - 2007.5).abs() < 1e-9);
    }

    #[test]
    fn polaron_transform_trivial_cases() {
        let trunc = TruncationSpec::new(3, 10);
        let p = ModelParams { g: 0.0, ..ModelParams::reference() };
        let u = polaron_transform(&p, &trunc).unwrap();
        let id = fock::identity_on(trunc.space());
        assert!(u.max_abs_diff(&id) < 1e-15);

        let p = ModelParams::reference();
        let u = polaron_transform(&p, &trunc).unwrap().to_dense();
        for i in 0..10 {
            for j in 0..10 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((u[[i, j]] - C64::new(want, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn polaron_transform_diagonalizes_low_block() {
        let trunc = TruncationSpec::new(3, 40);
        for ratio in [0.25, 0.5] {
            let p = ModelParams {
                g: ratio * mhz(10.0),
                ..with_omega0(1000.0)
            };
            let u = polaron_transform(&p, &trunc).unwrap();
            let unitarity = (&u.dagger() * &u).to_dense();
            let h = hamiltonian_lab(&p, &trunc).unwrap();
            let hd = (&(&u.dagger() * &h) * &u).to_dense();
            let idx = |n: usize, m: usize| n * 40 + m;
            let mut off = 0.0f64;
            let mut diag = 0.0f64;
            for n in 0..=2 {
                for m in 0..=5 {
                    let i = idx(n, m);
                    assert!((unitarity[[i, i]].re - 1.0).abs() < 1e-8);
                    diag = diag.max(hd[[i, i]].norm());
                    let want = spectrum_analytic(n, m, &p).unwrap();
                    assert!((hd[[i, i]].re - want).abs() < 1e-6 * want.abs().max(p.omega_m));
                    for j in 0..hd.ncols() {
                        if j != i {
                            off = off.max(hd[[i, j]].norm());
                        }
                    }
                }
            }
            assert!(off < 1e-6 * diag, "G/ω_m = {ratio}: off-diagonal {off}");
        }
    }

    #[test]
    fn sideband_peaks_single_photon() {
        let peaks = predicted_g2_peaks(ResonanceCondition::SinglePhoton, 0.0, 1.5);
        let values: Vec<f64> = peaks.iter().map(|p| p.g_over_omega_m).collect();
        let want = [0.7071, 1.0, 1.2247, 1.4142];
        assert_eq!(values.len(), 4);
        for (v, w) in values.iter().zip(want) {
            assert!((v - w).abs() < 1e-4);
        }
        assert_eq!(peaks[1].label, "|0,0~> -> |2,2~>");
    }

    #[test]
    fn sideband_peaks_bare_cavity() {
        let peaks = predicted_g2_peaks(ResonanceCondition::BareCavity, 0.0, 1.0);
        let mut values: Vec<(f64, usize)> = peaks.iter().map(|p| (p.g_over_omega_m, p.from_photons)).collect();
        values.sort_by(|a, b| a.0.total_cmp(&b.0));
        let want = [(0.5, 0), (0.5774, 1), (0.7071, 0), (0.8165, 1), (0.8660, 0)];
        assert_eq!(values.len(), 5);
        for ((v, from), (w, wf)) in values.iter().zip(want) {
            assert!((v - w).abs() < 1e-4);
            assert_eq!(*from, wf);
        }
        assert!(predicted_g2_peaks(ResonanceCondition::BareCavity, 1.0, 2.0).is_empty());
    }

    #[test]
    fn condition_tags() {
        assert_eq!("delta=delta0".parse::<ResonanceCondition>().unwrap(), ResonanceCondition::SinglePhoton);
        assert_eq!("Delta = 0".parse::<ResonanceCondition>().unwrap(), ResonanceCondition::BareCavity);
        assert!(matches!("delta=2delta0".parse::<ResonanceCondition>(), Err(Error::UnknownCondition(_))));
    }

    #[test]
    fn truncation_ladder() {
        let t = TruncationSpec::new(4, 20);
        let r = t.refined();
        assert_eq!((r.n_cav, r.n_mech), (5, 30));
        assert_eq!(TruncationSpec::new(3, 2).refined().n_mech, 3);
        assert!(TruncationSpec::new(1, 5).validate().is_err());
        let mut bad = TruncationSpec::new(3, 3);
        bad.rel_tol = 0.0;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn params_validation() {
        let mut p = ModelParams::reference();
        assert!(p.validate().is_ok());
        p.gamma = 0.0;
        assert!(p.validate().is_err());
        let p = ModelParams { temperature: -1.0, ..ModelParams::reference() };
        assert!(p.validate().is_err());
    }
}

//! Density-matrix simulation of the five-qubit swap-test experiment.
//!
//! Register layout: qubit 0 is the probe, qubits 1–4 are A, B, A′, B′.
//! Qubit 0 is the most significant bit of the 32-dimensional index.
//!
//! Only the deviation part of the NMR ensemble state is evolved, starting
//! from the labeled pseudo-pure state `σ_z ⊗ |0000><0000|` (thermal
//! polarization ~1e-5 and the identity background are dropped). A protocol
//! run is:
//!
//! 1. prepare `σ_z ⊗ ρ(α,x) ⊗ ρ(α,x)` as the weighted sum of four branches
//!    (pure/mixed for each pair), mirroring temporal averaging. On hardware
//!    the branch weights come from rotations by
//!    `δ = arccos[(1−x)²], arccos[x(1−x)], arccos[x(1−x)], arccos(x²)`;
//! 2. optionally measure A (and A′) in the x, y or z eigenbasis: rotate,
//!    dephase, rotate back;
//! 3. read `Tr(ρ ρ′)` through controlled swaps on AA′ and BB′ (or BB′ only),
//!    with the probe tipped into the transverse plane around them.
//!
//! Noise is a per-qubit depolarizing channel applied to the qubits of each
//! controlled swap right after it.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{partial_trace, ComplexMatrix, C64};
use crate::states::{lpps_deviation, psi_alpha, WernerFamilyParams};

pub const N_QUBITS: usize = 5;
pub const DIM: usize = 1 << N_QUBITS;
pub const PROBE: usize = 0;
pub const QUBIT_A: usize = 1;
pub const QUBIT_B: usize = 2;
pub const QUBIT_A2: usize = 3;
pub const QUBIT_B2: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Gate {
    Ry { theta: f64, qubit: usize },
    Rx { theta: f64, qubit: usize },
    Cnot { control: usize, target: usize },
    Cswap { control: usize, a: usize, b: usize },
    /// Removes coherences between the qubit's |0> and |1> sectors.
    Dephase { qubit: usize },
    Depolarize { qubit: usize, p: f64 },
}

impl Gate {
    fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Ry { qubit, .. }
            | Gate::Rx { qubit, .. }
            | Gate::Dephase { qubit }
            | Gate::Depolarize { qubit, .. } => vec![qubit],
            Gate::Cnot { control, target } => vec![control, target],
            Gate::Cswap { control, a, b } => vec![control, a, b],
        }
    }

    pub fn is_unitary(&self) -> bool {
        !matches!(self, Gate::Dephase { .. } | Gate::Depolarize { .. })
    }

    fn validate(&self) -> Result<()> {
        let qs = self.qubits();
        if let Some(q) = qs.iter().find(|&&q| q >= N_QUBITS) {
            return Err(Error::BadQubit(format!("{self}: qubit {q} >= {N_QUBITS}")));
        }
        for (i, q) in qs.iter().enumerate() {
            if qs[i + 1..].contains(q) {
                return Err(Error::BadQubit(format!("{self}: qubit {q} repeated")));
            }
        }
        if let Gate::Depolarize { p, .. } = self {
            if !(0.0..=1.0).contains(p) {
                return Err(Error::ParameterRange(format!("depolarizing p = {p}")));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::Ry { theta, qubit } => write!(f, "RY({theta}) q{qubit}"),
            Gate::Rx { theta, qubit } => write!(f, "RX({theta}) q{qubit}"),
            Gate::Cnot { control, target } => write!(f, "CNOT q{control} q{target}"),
            Gate::Cswap { control, a, b } => write!(f, "CSWAP q{control} q{a} q{b}"),
            Gate::Dephase { qubit } => write!(f, "DEPHASE q{qubit}"),
            Gate::Depolarize { qubit, p } => write!(f, "DEPOL({p}) q{qubit}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum LogEntry {
    Gate(Gate),
    /// Start of one temporal-averaging branch.
    Branch { index: usize, weight: f64 },
    /// Branches summed into the current deviation.
    Merge,
}

impl fmt::Display for LogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LogEntry::Gate(g) => write!(f, "{g}"),
            LogEntry::Branch { index, weight } => write!(f, "BRANCH {index} weight={weight}"),
            LogEntry::Merge => write!(f, "MERGE"),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    p_depol: f64,
    enabled: bool,
}

impl NoiseModel {
    pub fn none() -> Self {
        Self::default()
    }

    /// Enabled iff `p_depol > 0`.
    pub fn depolarizing(p_depol: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_depol) {
            return Err(Error::ParameterRange(format!("p_depol = {p_depol} outside [0, 1]")));
        }
        Ok(Self {
            p_depol,
            enabled: p_depol > 0.0,
        })
    }

    pub fn p_depol(&self) -> f64 {
        self.p_depol
    }

    pub fn enabled(&self) -> bool {
        self.enabled
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeasureTarget {
    /// A and A′, one per copy.
    BothCopies,
    AOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Readout {
    /// Swaps AA′ and BB′: `Tr(ρ_AB ρ_A′B′)`.
    Pair,
    /// Swaps BB′ only: `Tr(ρ_B ρ_B′)`.
    BOnly,
}

#[derive(Clone, Debug)]
pub struct CircuitState {
    deviation: ComplexMatrix,
    gate_log: Vec<LogEntry>,
    noise: NoiseModel,
    /// `Tr(deviation · σ_z^probe)` right after preparation.
    reference: f64,
}

fn mask(qubit: usize) -> usize {
    1 << (N_QUBITS - 1 - qubit)
}

/// `ρ ← U ρ U†` with `U` acting on one qubit.
fn conjugate_1q(m: &mut ComplexMatrix, u: [[C64; 2]; 2], qubit: usize) {
    let bit = mask(qubit);
    let n = m.rows();
    for c in 0..n {
        for r0 in (0..n).filter(|r| r & bit == 0) {
            let r1 = r0 | bit;
            let (a, b) = (m[(r0, c)], m[(r1, c)]);
            m[(r0, c)] = u[0][0] * a + u[0][1] * b;
            m[(r1, c)] = u[1][0] * a + u[1][1] * b;
        }
    }
    for r in 0..n {
        for c0 in (0..n).filter(|c| c & bit == 0) {
            let c1 = c0 | bit;
            let (a, b) = (m[(r, c0)], m[(r, c1)]);
            m[(r, c0)] = a * u[0][0].conj() + b * u[0][1].conj();
            m[(r, c1)] = a * u[1][0].conj() + b * u[1][1].conj();
        }
    }
}

/// `ρ ← P ρ P†` for a basis permutation `P|i> = |perm(i)>`.
fn permute(m: &ComplexMatrix, perm: impl Fn(usize) -> usize) -> ComplexMatrix {
    let n = m.rows();
    let mut out = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        let pr = perm(r);
        for c in 0..n {
            out[(pr, perm(c))] = m[(r, c)];
        }
    }
    out
}

fn ry(theta: f64) -> [[C64; 2]; 2] {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [C64::new(c, 0.0), C64::new(-s, 0.0)],
        [C64::new(s, 0.0), C64::new(c, 0.0)],
    ]
}

fn rx(theta: f64) -> [[C64; 2]; 2] {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [C64::new(c, 0.0), C64::new(0.0, -s)],
        [C64::new(0.0, -s), C64::new(c, 0.0)],
    ]
}

impl CircuitState {
    /// Starts from the labeled pseudo-pure deviation `σ_z ⊗ |0000><0000|`.
    pub fn lpps(noise: NoiseModel) -> Self {
        let deviation = lpps_deviation(N_QUBITS).expect("five qubits");
        let mut s = Self {
            deviation,
            gate_log: Vec::new(),
            noise,
            reference: 0.0,
        };
        s.reference = s.probe_signal();
        s
    }

    pub fn deviation(&self) -> &ComplexMatrix {
        &self.deviation
    }

    pub fn gate_log(&self) -> &[LogEntry] {
        &self.gate_log
    }

    /// One descriptor per line.
    pub fn gate_log_text(&self) -> String {
        self.gate_log.iter().map(|e| format!("{e}\n")).collect()
    }

    pub fn noise(&self) -> NoiseModel {
        self.noise
    }

    /// Applies a gate, then depolarizes the qubits of a controlled swap when
    /// noise is enabled.
    pub fn apply_gate(&mut self, gate: Gate) -> Result<()> {
        gate.validate()?;
        self.apply_exact(gate);
        if let Gate::Cswap { .. } = gate {
            if self.noise.enabled {
                for qubit in gate.qubits() {
                    self.apply_exact(Gate::Depolarize {
                        qubit,
                        p: self.noise.p_depol,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn apply_all(&mut self, gates: impl IntoIterator<Item = Gate>) -> Result<()> {
        gates.into_iter().try_for_each(|g| self.apply_gate(g))
    }

    fn apply_exact(&mut self, gate: Gate) {
        let m = &mut self.deviation;
        match gate {
            Gate::Ry { theta, qubit } => conjugate_1q(m, ry(theta), qubit),
            Gate::Rx { theta, qubit } => conjugate_1q(m, rx(theta), qubit),
            Gate::Cnot { control, target } => {
                let (cb, tb) = (mask(control), mask(target));
                *m = permute(m, |i| if i & cb != 0 { i ^ tb } else { i });
            }
            Gate::Cswap { control, a, b } => {
                let (cb, ab, bb) = (mask(control), mask(a), mask(b));
                *m = permute(m, |i| {
                    if i & cb != 0 && ((i & ab == 0) != (i & bb == 0)) {
                        i ^ ab ^ bb
                    } else {
                        i
                    }
                });
            }
            Gate::Dephase { qubit } => {
                let bit = mask(qubit);
                for r in 0..DIM {
                    for c in 0..DIM {
                        if (r ^ c) & bit != 0 {
                            m[(r, c)] = C64::new(0.0, 0.0);
                        }
                    }
                }
            }
            Gate::Depolarize { qubit, p } => {
                // (1−p) ρ + p · I/2 ⊗ Tr_q ρ
                let bit = mask(qubit);
                let old = m.clone();
                for r in 0..DIM {
                    for c in 0..DIM {
                        let mut v = old[(r, c)] * (1.0 - p);
                        if (r ^ c) & bit == 0 {
                            v += (old[(r, c)] + old[(r ^ bit, c ^ bit)]) * (p / 2.0);
                        }
                        m[(r, c)] = v;
                    }
                }
            }
        }
        self.gate_log.push(LogEntry::Gate(gate));
    }

    /// `Tr(deviation · σ_z^probe ⊗ I₁₆)`
    fn probe_signal(&self) -> f64 {
        let half = DIM / 2;
        (0..DIM)
            .map(|i| {
                let sign = if i < half { 1.0 } else { -1.0 };
                sign * self.deviation[(i, i)].re
            })
            .sum()
    }

    /// Probe σ_z expectation normalized by the preparation's reference
    /// amplitude.
    pub fn probe_z_expectation(&self) -> f64 {
        self.probe_signal() / self.reference
    }

    /// Register state labeled by the probe, reduced to `qubits` (a subset of
    /// 1..=4): `Tr_rest[(σ_z^probe ⊗ I) · deviation] / reference`.
    pub fn labeled_marginal(&self, qubits: &[usize]) -> Result<ComplexMatrix> {
        if qubits.is_empty() || qubits.iter().any(|&q| q == PROBE || q >= N_QUBITS) {
            return Err(Error::BadQubit(format!("marginal over {qubits:?}")));
        }
        let half = DIM / 2;
        let mut labeled = self.deviation.clone();
        for r in half..DIM {
            for c in 0..DIM {
                labeled[(r, c)] = -labeled[(r, c)];
            }
        }
        let reduced = partial_trace(&labeled, &[2; N_QUBITS], qubits)?;
        Ok(reduced.scale_real(1.0 / self.reference))
    }

    /// Measures A (and A′) non-selectively in the eigenbasis of `axis`.
    pub fn mub_measure_block(&mut self, axis: Axis, target: MeasureTarget) -> Result<()> {
        let qubits: &[usize] = match target {
            MeasureTarget::BothCopies => &[QUBIT_A, QUBIT_A2],
            MeasureTarget::AOnly => &[QUBIT_A],
        };
        let rotate = |theta: f64, qubit| match axis {
            Axis::X => Some(Gate::Ry { theta: -theta, qubit }),
            Axis::Y => Some(Gate::Rx { theta, qubit }),
            Axis::Z => None,
        };
        let mut gates = Vec::new();
        gates.extend(qubits.iter().filter_map(|&q| rotate(FRAC_PI_2, q)));
        gates.extend(qubits.iter().map(|&qubit| Gate::Dephase { qubit }));
        gates.extend(qubits.iter().filter_map(|&q| rotate(-FRAC_PI_2, q)));
        self.apply_all(gates)
    }

    /// Controlled swaps from the probe onto the copies, bracketed by probe
    /// rotations so that the probe's σ_z signal reads `Tr(ρ ρ′)`.
    pub fn swap_test_readout(&mut self, which: Readout) -> Result<f64> {
        if self.reference.abs() < 1e-12 {
            return Err(Error::InvalidDensity("register holds no probe-labeled state".into()));
        }
        self.apply_gate(Gate::Ry {
            theta: FRAC_PI_2,
            qubit: PROBE,
        })?;
        if which == Readout::Pair {
            self.apply_gate(Gate::Cswap {
                control: PROBE,
                a: QUBIT_A,
                b: QUBIT_A2,
            })?;
        }
        self.apply_gate(Gate::Cswap {
            control: PROBE,
            a: QUBIT_B,
            b: QUBIT_B2,
        })?;
        self.apply_gate(Gate::Ry {
            theta: -FRAC_PI_2,
            qubit: PROBE,
        })?;
        Ok(self.probe_z_expectation())
    }
}

fn pure_pair_gates(alpha: f64, a: usize, b: usize) -> [Gate; 3] {
    [
        Gate::Ry { theta: -alpha, qubit: a },
        Gate::Ry {
            theta: std::f64::consts::PI,
            qubit: b,
        },
        Gate::Cnot { control: a, target: b },
    ]
}

fn mixed_pair_gates(a: usize, b: usize) -> [Gate; 4] {
    [
        Gate::Ry { theta: FRAC_PI_2, qubit: a },
        Gate::Ry { theta: FRAC_PI_2, qubit: b },
        Gate::Dephase { qubit: a },
        Gate::Dephase { qubit: b },
    ]
}

/// `σ_z ⊗ ρ(α,x) ⊗ ρ(α,x)` as the weighted sum of the four branches
/// `(1−x)²·mixed⊗mixed`, `x(1−x)·mixed⊗pure`, `x(1−x)·pure⊗mixed`,
/// `x²·pure⊗pure`, each prepared from the pseudo-pure state.
pub fn prepare_pair_state(alpha: f64, x: f64, noise: NoiseModel) -> Result<CircuitState> {
    let params = WernerFamilyParams::new(alpha, x)?;
    let (alpha, x) = (params.alpha(), params.x());
    psi_alpha(alpha)?;

    let branches = [
        ((1.0 - x) * (1.0 - x), false, false),
        ((1.0 - x) * x, false, true),
        (x * (1.0 - x), true, false),
        (x * x, true, true),
    ];

    let mut out = CircuitState::lpps(noise);
    let mut sum = ComplexMatrix::zeros(DIM, DIM);
    let mut log = Vec::new();
    for (index, &(weight, pure_ab, pure_ab2)) in branches.iter().enumerate() {
        if weight == 0.0 {
            continue;
        }
        let mut run = CircuitState::lpps(noise);
        for (pure, a, b) in [(pure_ab, QUBIT_A, QUBIT_B), (pure_ab2, QUBIT_A2, QUBIT_B2)] {
            if pure {
                run.apply_all(pure_pair_gates(alpha, a, b))?;
            } else {
                run.apply_all(mixed_pair_gates(a, b))?;
            }
        }
        sum = &sum + &run.deviation.scale_real(weight);
        log.push(LogEntry::Branch { index: index + 1, weight });
        log.extend(run.gate_log);
    }
    log.push(LogEntry::Merge);
    out.deviation = sum;
    out.gate_log = log;
    out.reference = out.probe_signal();
    Ok(out)
}

/// The eight purities: `Tr ρ_AB²`, `Tr ρ_θB²` (θ = x, y, z), `Tr ρ_B²`,
/// `Tr ρ_{B|θ}²` (θ = x, y, z).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct Purities {
    pub purity_AB: f64,
    pub purity_xB: f64,
    pub purity_yB: f64,
    pub purity_zB: f64,
    pub purity_B: f64,
    pub purity_B_given_x: f64,
    pub purity_B_given_y: f64,
    pub purity_B_given_z: f64,
}

/// One readout configuration of the protocol.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Setting {
    pub name: &'static str,
    pub measure: Option<Axis>,
    pub readout: Readout,
}

pub const SETTINGS: [Setting; 8] = [
    Setting { name: "purity_AB", measure: None, readout: Readout::Pair },
    Setting { name: "purity_xB", measure: Some(Axis::X), readout: Readout::Pair },
    Setting { name: "purity_yB", measure: Some(Axis::Y), readout: Readout::Pair },
    Setting { name: "purity_zB", measure: Some(Axis::Z), readout: Readout::Pair },
    Setting { name: "purity_B", measure: None, readout: Readout::BOnly },
    Setting { name: "purity_B_given_x", measure: Some(Axis::X), readout: Readout::BOnly },
    Setting { name: "purity_B_given_y", measure: Some(Axis::Y), readout: Readout::BOnly },
    Setting { name: "purity_B_given_z", measure: Some(Axis::Z), readout: Readout::BOnly },
];

impl Purities {
    pub fn to_array(&self) -> [f64; 8] {
        [
            self.purity_AB,
            self.purity_xB,
            self.purity_yB,
            self.purity_zB,
            self.purity_B,
            self.purity_B_given_x,
            self.purity_B_given_y,
            self.purity_B_given_z,
        ]
    }

    pub fn from_array(v: [f64; 8]) -> Self {
        Self {
            purity_AB: v[0],
            purity_xB: v[1],
            purity_yB: v[2],
            purity_zB: v[3],
            purity_B: v[4],
            purity_B_given_x: v[5],
            purity_B_given_y: v[6],
            purity_B_given_z: v[7],
        }
    }

    /// `Σ_θ (Tr ρ_B² − Tr ρ_θB²)` over the three qubit axes.
    pub fn lhs(&self) -> f64 {
        3.0 * self.purity_B - self.purity_xB - self.purity_yB - self.purity_zB
    }

    /// `(M−1)(Tr ρ_B² − Tr ρ_AB² / d)` with `M = 3`, `d = 2`.
    pub fn rhs(&self) -> f64 {
        2.0 * (self.purity_B - self.purity_AB / 2.0)
    }

    pub fn gap(&self) -> f64 {
        self.lhs() - self.rhs()
    }
}

/// Per-setting ratio of noisy to noiseless readout.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration(pub Purities);

impl Calibration {
    pub fn identity() -> Self {
        Calibration(Purities::from_array([1.0; 8]))
    }
}

/// Raw and rescaled purities for one `(α, x)` point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PurityPanel {
    pub alpha: f64,
    pub x: f64,
    pub noise_p: f64,
    pub raw: Purities,
    pub rescaled: Purities,
}

/// One setting with a fresh preparation.
pub fn run_setting(alpha: f64, x: f64, noise: NoiseModel, setting: Setting) -> Result<f64> {
    let mut state = prepare_pair_state(alpha, x, noise)?;
    if let Some(axis) = setting.measure {
        state.mub_measure_block(axis, MeasureTarget::BothCopies)?;
    }
    state.swap_test_readout(setting.readout)
}

pub fn measure_purities(alpha: f64, x: f64, noise: NoiseModel) -> Result<Purities> {
    let mut out = [0.0; 8];
    for (slot, setting) in out.iter_mut().zip(SETTINGS) {
        *slot = run_setting(alpha, x, noise, setting)?;
    }
    Ok(Purities::from_array(out))
}

/// Reference state for calibration: `ρ(0, 1) = |01><01|`.
pub const CALIBRATION_REFERENCE: (f64, f64) = (0.0, 1.0);

/// Attenuation per setting from a noisy versus noiseless run of the
/// reference state.
pub fn calibrate(noise: NoiseModel) -> Result<Calibration> {
    let (alpha, x) = CALIBRATION_REFERENCE;
    let noisy = measure_purities(alpha, x, noise)?.to_array();
    let ideal = measure_purities(alpha, x, NoiseModel::none())?.to_array();
    let mut ratio = [0.0; 8];
    for i in 0..8 {
        ratio[i] = noisy[i] / ideal[i];
    }
    Ok(Calibration(Purities::from_array(ratio)))
}

pub fn rescale(raw: &Purities, calibration: &Calibration) -> Result<Purities> {
    let factors = calibration.0.to_array();
    let mut out = raw.to_array();
    for ((v, f), setting) in out.iter_mut().zip(factors).zip(SETTINGS) {
        if !(f > 0.0) {
            return Err(Error::Attenuation {
                setting: setting.name,
                value: f,
            });
        }
        *v /= f;
    }
    Ok(Purities::from_array(out))
}

/// All eight settings, each with its own preparation; rescaled with a
/// reference calibration when noise is enabled.
pub fn run_protocol(alpha: f64, x: f64, noise: NoiseModel) -> Result<PurityPanel> {
    let raw = measure_purities(alpha, x, noise)?;
    let calibration = if noise.enabled() {
        calibrate(noise)?
    } else {
        Calibration::identity()
    };
    Ok(PurityPanel {
        alpha,
        x,
        noise_p: noise.p_depol(),
        raw,
        rescaled: rescale(&raw, &calibration)?,
    })
}

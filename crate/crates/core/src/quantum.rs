//! Exact finite-dimensional quantum mechanics for one and two qubits.
//!
//! Everything the protocol needs lives in a 2- or 4-dimensional Hilbert space,
//! so all operations here are closed-form and double precision is ample.
//! Protocol states are confined to the Z–X plane of the Bloch sphere: an
//! observable is `cosθ·Z + sinθ·X` parameterized by one angle, and its +1
//! eigenstate is the real vector `(cos(θ/2), sin(θ/2))`.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

/// Tolerance for algebraic identities (norms, Hermiticity, trace).
pub const NORM_TOL: f64 = 1e-12;
/// Tolerance for probability sums handed to the sampler.
pub const PROB_SUM_TOL: f64 = 1e-9;
/// Smallest admissible eigenvalue of a density matrix.
pub const EIGENVALUE_TOL: f64 = 1e-10;

fn check_finite(amps: &[Complex64]) -> Result<()> {
    for a in amps {
        if !a.re.is_finite() || !a.im.is_finite() {
            return Err(Error::invalid("non-finite amplitude"));
        }
    }
    Ok(())
}

/// A normalized pure state; implemented by [`QubitState`] and [`TwoQubitState`].
pub trait PureState {
    fn amplitudes(&self) -> &[Complex64];
}

/// A single-qubit pure state with unit norm.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitState {
    amps: [Complex64; 2],
}

impl QubitState {
    pub fn new(amps: [Complex64; 2]) -> Result<Self> {
        check_finite(&amps)?;
        let n2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (n2 - 1.0).abs() > NORM_TOL {
            return Err(Error::invalid(format!(
                "qubit state norm² = {n2}, expected 1 within {NORM_TOL}"
            )));
        }
        Ok(Self { amps })
    }

    /// Real state `(cos(φ/2), sin(φ/2))`: the +1 eigenstate of the observable
    /// at Bloch angle φ. The −1 eigenstate of angle φ equals the +1 eigenstate
    /// of angle φ + π, so this constructor covers every protocol preparation.
    pub fn from_bloch_angle(phi: f64) -> Self {
        Self {
            amps: [
                Complex64::new((phi / 2.0).cos(), 0.0),
                Complex64::new((phi / 2.0).sin(), 0.0),
            ],
        }
    }

    pub fn basis0() -> Self {
        Self::from_bloch_angle(0.0)
    }

    pub fn basis1() -> Self {
        Self {
            amps: [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        }
    }

    pub fn amps(&self) -> &[Complex64; 2] {
        &self.amps
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(&self.amps)
    }
}

impl PureState for QubitState {
    fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }
}

/// A two-qubit pure state in the basis order |00⟩, |01⟩, |10⟩, |11⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitState {
    amps: [Complex64; 4],
}

impl TwoQubitState {
    pub fn new(amps: [Complex64; 4]) -> Result<Self> {
        check_finite(&amps)?;
        let n2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (n2 - 1.0).abs() > NORM_TOL {
            return Err(Error::invalid(format!(
                "two-qubit state norm² = {n2}, expected 1 within {NORM_TOL}"
            )));
        }
        Ok(Self { amps })
    }

    pub fn amps(&self) -> &[Complex64; 4] {
        &self.amps
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(&self.amps)
    }
}

impl PureState for TwoQubitState {
    fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }
}

/// Product state: `amps[2i+j] = a[i]·b[j]`.
pub fn tensor(a: &QubitState, b: &QubitState) -> TwoQubitState {
    let mut amps = [Complex64::new(0.0, 0.0); 4];
    for i in 0..2 {
        for j in 0..2 {
            amps[2 * i + j] = a.amps[i] * b.amps[j];
        }
    }
    TwoQubitState { amps }
}

/// The four Bell states. Only ψ± are announced by the relay; φ± map to `fail`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellKind {
    PsiPlus,
    PsiMinus,
    PhiPlus,
    PhiMinus,
}

impl BellKind {
    pub const ALL: [BellKind; 4] = [
        BellKind::PsiPlus,
        BellKind::PsiMinus,
        BellKind::PhiPlus,
        BellKind::PhiMinus,
    ];
}

/// ψ± = (|01⟩ ± |10⟩)/√2, φ± = (|00⟩ ± |11⟩)/√2.
pub fn bell_state(kind: BellKind) -> TwoQubitState {
    let r = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let z = Complex64::new(0.0, 0.0);
    let amps = match kind {
        BellKind::PsiPlus => [z, r, r, z],
        BellKind::PsiMinus => [z, r, -r, z],
        BellKind::PhiPlus => [r, z, z, r],
        BellKind::PhiMinus => [r, z, z, -r],
    };
    TwoQubitState { amps }
}

/// A real Bloch-plane observable `cosθ·Z + sinθ·X` with eigenvalues ±1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observable {
    angle: f64,
}

impl Observable {
    pub fn from_angle(theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::invalid("observable angle must be finite"));
        }
        Ok(Self { angle: theta })
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    /// 2×2 Hermitian matrix `cosθ·Z + sinθ·X`, row major.
    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        let c = Complex64::new(self.angle.cos(), 0.0);
        let s = Complex64::new(self.angle.sin(), 0.0);
        [[c, s], [s, -c]]
    }

    /// Closed-form eigenbasis: `plus = (cos(θ/2), sin(θ/2))` with eigenvalue +1
    /// and `minus = (−sin(θ/2), cos(θ/2))` with eigenvalue −1.
    pub fn eigenstates(&self) -> (QubitState, QubitState) {
        let half = self.angle / 2.0;
        let plus = QubitState {
            amps: [
                Complex64::new(half.cos(), 0.0),
                Complex64::new(half.sin(), 0.0),
            ],
        };
        let minus = QubitState {
            amps: [
                Complex64::new(-half.sin(), 0.0),
                Complex64::new(half.cos(), 0.0),
            ],
        };
        (plus, minus)
    }
}

pub fn observable_from_angle(theta: f64) -> Result<Observable> {
    Observable::from_angle(theta)
}

/// A d×d density matrix (d ∈ {2, 4}), validated as Hermitian, unit trace, and
/// positive semidefinite within tolerances.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    entries: Vec<Complex64>, // row major
}

impl DensityMatrix {
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim != 2 && dim != 4 {
            return Err(Error::invalid(format!("unsupported dimension {dim}")));
        }
        if entries.len() != dim * dim {
            return Err(Error::invalid("entry count does not match dimension"));
        }
        check_finite(&entries)?;
        let dm = Self { dim, entries };
        for i in 0..dim {
            for j in 0..dim {
                let d = dm.get(i, j) - dm.get(j, i).conj();
                if d.norm() > NORM_TOL {
                    return Err(Error::invalid("density matrix is not Hermitian"));
                }
            }
        }
        let tr = dm.trace();
        if (tr.re - 1.0).abs() > NORM_TOL || tr.im.abs() > NORM_TOL {
            return Err(Error::invalid(format!(
                "density matrix trace {} ≠ 1",
                tr.re
            )));
        }
        if !dm.is_positive_semidefinite(EIGENVALUE_TOL) {
            return Err(Error::invalid(
                "density matrix has an eigenvalue below tolerance",
            ));
        }
        Ok(dm)
    }

    pub fn from_pure(amps: &[Complex64]) -> Self {
        let dim = amps.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(amps[i] * amps[j].conj());
            }
        }
        Self { dim, entries }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Complex64::new(1.0 / dim as f64, 0.0);
        }
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Kronecker product; only 2⊗2 is meaningful for this protocol.
    pub fn kron(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        if self.dim != 2 || other.dim != 2 {
            return Err(Error::invalid("kron expects two single-qubit matrices"));
        }
        let dim = 4;
        let mut entries = vec![Complex64::new(0.0, 0.0); 16];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        entries[(2 * i + k) * dim + (2 * j + l)] =
                            self.get(i, j) * other.get(k, l);
                    }
                }
            }
        }
        Ok(DensityMatrix { dim, entries })
    }

    /// λ_min ≥ −tol, decided by attempting a Cholesky factorization of ρ + tol·I.
    pub fn is_positive_semidefinite(&self, tol: f64) -> bool {
        let d = self.dim;
        let mut m: Vec<Complex64> = self.entries.clone();
        for i in 0..d {
            m[i * d + i] += Complex64::new(tol, 0.0);
        }
        // In-place complex Cholesky; fails iff a pivot is non-positive.
        for k in 0..d {
            let mut pivot = m[k * d + k].re;
            for j in 0..k {
                pivot -= m[k * d + j].norm_sqr();
            }
            if pivot <= 0.0 {
                return false;
            }
            let pivot = pivot.sqrt();
            m[k * d + k] = Complex64::new(pivot, 0.0);
            for i in (k + 1)..d {
                let mut v = m[i * d + k];
                for j in 0..k {
                    v -= m[i * d + j] * m[k * d + j].conj();
                }
                m[i * d + k] = v / pivot;
            }
        }
        true
    }
}

/// Born rule for a pure input: |⟨proj|input⟩|².
pub fn born_probability<S: PureState>(projector: &S, input: &S) -> f64 {
    let overlap: Complex64 = projector
        .amplitudes()
        .iter()
        .zip(input.amplitudes())
        .map(|(p, a)| p.conj() * a)
        .sum();
    overlap.norm_sqr().clamp(0.0, 1.0)
}

/// Born rule for a mixed input: ⟨proj|ρ|proj⟩.
pub fn born_probability_density<S: PureState>(projector: &S, rho: &DensityMatrix) -> Result<f64> {
    let amps = projector.amplitudes();
    if amps.len() != rho.dim() {
        return Err(Error::invalid(format!(
            "projector dimension {} does not match state dimension {}",
            amps.len(),
            rho.dim()
        )));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..rho.dim() {
        for j in 0..rho.dim() {
            acc += amps[i].conj() * rho.get(i, j) * amps[j];
        }
    }
    Ok(acc.re.clamp(0.0, 1.0))
}

/// Single-qubit channels. Loss is classical: with probability 1−η the photon
/// never arrives, so the round carries a no-photon flag instead of a state and
/// the two-dimensional Hilbert-space assumption stays intact.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Channel {
    Identity,
    Depolarizing { p: f64 },
    Misalignment { delta: f64 },
    Loss { eta: f64 },
}

impl Channel {
    /// The deterministic map on density matrices. Loss leaves the conditional
    /// (on-arrival) state unchanged; arrival itself is handled by the sampled
    /// path. Misalignment rotates by δ in state space, i.e. by 2δ on the Bloch
    /// circle.
    pub fn apply_density(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != 2 {
            return Err(Error::invalid("channels act on single qubits"));
        }
        match *self {
            Channel::Identity | Channel::Loss { .. } => Ok(rho.clone()),
            Channel::Depolarizing { p } => {
                let mixed = DensityMatrix::maximally_mixed(2);
                let entries = rho
                    .entries
                    .iter()
                    .zip(&mixed.entries)
                    .map(|(r, m)| r * (1.0 - p) + m * p)
                    .collect();
                Ok(DensityMatrix { dim: 2, entries })
            }
            Channel::Misalignment { delta } => {
                let (c, s) = (delta.cos(), delta.sin());
                let u = [
                    [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
                    [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
                ];
                let mut entries = vec![Complex64::new(0.0, 0.0); 4];
                for i in 0..2 {
                    for j in 0..2 {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for k in 0..2 {
                            for l in 0..2 {
                                acc += u[i][k] * rho.get(k, l) * u[j][l].conj();
                            }
                        }
                        entries[i * 2 + j] = acc;
                    }
                }
                Ok(DensityMatrix { dim: 2, entries })
            }
        }
    }

    /// One Monte-Carlo sample of the channel acting on a pure input. The
    /// per-round ensemble average reproduces [`Channel::apply_density`]:
    /// depolarizing re-draws a uniform Bloch-plane angle with probability p
    /// (the uniform great-circle average is I/2), loss returns `None` with
    /// probability 1−η.
    pub fn apply_sampled<R: Rng>(&self, state: &QubitState, rng: &mut R) -> Option<QubitState> {
        match *self {
            Channel::Identity => Some(state.clone()),
            Channel::Loss { eta } => {
                if rng.random::<f64>() < eta {
                    Some(state.clone())
                } else {
                    None
                }
            }
            Channel::Depolarizing { p } => {
                if rng.random::<f64>() < p {
                    Some(QubitState::from_bloch_angle(
                        rng.random::<f64>() * std::f64::consts::TAU,
                    ))
                } else {
                    Some(state.clone())
                }
            }
            Channel::Misalignment { delta } => {
                let (c, s) = (delta.cos(), delta.sin());
                let a = state.amps();
                let amps = [a[0] * c - a[1] * s, a[0] * s + a[1] * c];
                Some(QubitState { amps })
            }
        }
    }

    pub fn validate(&self, field: &str) -> Result<()> {
        match *self {
            Channel::Identity => Ok(()),
            Channel::Depolarizing { p } => {
                if !(0.0..=1.0).contains(&p) || !p.is_finite() {
                    Err(Error::config(format!("{field}.p"), "must lie in [0, 1]"))
                } else {
                    Ok(())
                }
            }
            Channel::Misalignment { delta } => {
                if !delta.is_finite() {
                    Err(Error::config(format!("{field}.delta"), "must be finite"))
                } else {
                    Ok(())
                }
            }
            Channel::Loss { eta } => {
                if !(0.0..=1.0).contains(&eta) || !eta.is_finite() {
                    Err(Error::config(format!("{field}.eta"), "must lie in [0, 1]"))
                } else {
                    Ok(())
                }
            }
        }
    }
}

/// Draw an index with probability proportional to `probabilities[i]`.
///
/// Weights are renormalized internally; entries more negative than the
/// tolerance, non-finite entries, or an all-zero vector are rejected.
pub fn sample_outcome<R: Rng>(probabilities: &[f64], rng: &mut R) -> Result<usize> {
    if probabilities.is_empty() {
        return Err(Error::invalid("empty probability vector"));
    }
    let mut total = 0.0;
    for &p in probabilities {
        if !p.is_finite() || p < -PROB_SUM_TOL {
            return Err(Error::invalid(format!("invalid probability {p}")));
        }
        total += p.max(0.0);
    }
    if total <= PROB_SUM_TOL {
        return Err(Error::invalid("probabilities sum to zero"));
    }
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last_nonzero = 0;
    for (i, &p) in probabilities.iter().enumerate() {
        let p = p.max(0.0);
        if p > 0.0 {
            last_nonzero = i;
            acc += p;
            if target < acc {
                return Ok(i);
            }
        }
    }
    // Rounding pushed the target past the last bin.
    Ok(last_nonzero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    /// Independent eigendecomposition oracle built on nalgebra; the production
    /// path never touches it.
    fn eigen_oracle(theta: f64) -> (Vec<Complex64>, Vec<Complex64>) {
        use nalgebra::{Complex, Matrix2};
        let m = Matrix2::new(
            Complex::new(theta.cos(), 0.0),
            Complex::new(theta.sin(), 0.0),
            Complex::new(theta.sin(), 0.0),
            Complex::new(-theta.cos(), 0.0),
        );
        let eig = m.symmetric_eigen();
        let mut plus = Vec::new();
        let mut minus = Vec::new();
        for k in 0..2 {
            let col: Vec<Complex64> = eig
                .eigenvectors
                .column(k)
                .iter()
                .map(|z| Complex64::new(z.re, z.im))
                .collect();
            if eig.eigenvalues[k] > 0.0 {
                plus = col;
            } else {
                minus = col;
            }
        }
        (plus, minus)
    }

    fn assert_same_ray(a: &[Complex64], b: &[Complex64], tol: f64) {
        let overlap: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
        assert!(
            (overlap.norm() - 1.0).abs() < tol,
            "states differ beyond global phase: |overlap| = {}",
            overlap.norm()
        );
    }

    #[test]
    fn observable_matrix_matches_definition() {
        let z = observable_from_angle(0.0).unwrap().matrix();
        assert_eq!(z[0][0], c(1.0));
        assert_eq!(z[1][1], c(-1.0));
        assert_eq!(z[0][1], c(0.0));

        let x = observable_from_angle(FRAC_PI_2).unwrap().matrix();
        assert!((x[0][1].re - 1.0).abs() < NORM_TOL);
        assert!(x[0][0].norm() < NORM_TOL);

        // θ=−π/4 → (Z−X)/√2
        let m = observable_from_angle(-FRAC_PI_4).unwrap().matrix();
        assert!((m[0][0].re - FRAC_1_SQRT_2).abs() < NORM_TOL);
        assert!((m[0][1].re + FRAC_1_SQRT_2).abs() < NORM_TOL);
    }

    #[test]
    fn observable_rejects_non_finite_angle() {
        assert!(observable_from_angle(f64::NAN).is_err());
        assert!(observable_from_angle(f64::INFINITY).is_err());
    }

    #[test]
    fn eigenstates_of_z_and_x() {
        let (p, m) = observable_from_angle(0.0).unwrap().eigenstates();
        assert_eq!(p, QubitState::basis0());
        assert!((m.amps()[1].re - 1.0).abs() < NORM_TOL && m.amps()[0].norm() < NORM_TOL);

        let (p, _) = observable_from_angle(FRAC_PI_2).unwrap().eigenstates();
        assert!((p.amps()[0].re - FRAC_1_SQRT_2).abs() < NORM_TOL);
        assert!((p.amps()[1].re - FRAC_1_SQRT_2).abs() < NORM_TOL);
    }

    #[test]
    fn eigenstates_match_numeric_oracle_at_minus_quarter_pi() {
        let (plus, _) = observable_from_angle(-FRAC_PI_4).unwrap().eigenstates();
        // frozen from the closed form (cos(−π/8), sin(−π/8))
        assert!((plus.amps()[0].re - 0.9238795325112867).abs() < 1e-12);
        assert!((plus.amps()[1].re - (-0.3826834323650898)).abs() < 1e-12);
        let (op, om) = eigen_oracle(-FRAC_PI_4);
        assert_same_ray(plus.amplitudes(), &op, 1e-10);
        let (_, minus) = observable_from_angle(-FRAC_PI_4).unwrap().eigenstates();
        assert_same_ray(minus.amplitudes(), &om, 1e-10);
    }

    #[test]
    fn eigenstates_satisfy_eigen_equations_for_random_angles() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let theta = (rng.random::<f64>() - 0.5) * 4.0 * PI;
            let obs = observable_from_angle(theta).unwrap();
            let m = obs.matrix();
            let (plus, minus) = obs.eigenstates();
            for (state, sign) in [(&plus, 1.0), (&minus, -1.0)] {
                for i in 0..2 {
                    let applied = m[i][0] * state.amps()[0] + m[i][1] * state.amps()[1];
                    let expect = state.amps()[i] * sign;
                    assert!((applied - expect).norm() < NORM_TOL);
                }
            }
            let overlap: Complex64 = plus
                .amps()
                .iter()
                .zip(minus.amps())
                .map(|(a, b)| a.conj() * b)
                .sum();
            assert!(overlap.norm() < NORM_TOL);
        }
    }

    #[test]
    fn tensor_of_basis_states() {
        let t = tensor(&QubitState::basis0(), &QubitState::basis1());
        assert_eq!(t.amps()[1], c(1.0));
        assert!(t.amps()[0].norm() + t.amps()[2].norm() + t.amps()[3].norm() < NORM_TOL);

        let t = tensor(&QubitState::basis1(), &QubitState::basis0());
        assert_eq!(t.amps()[2], c(1.0));

        let plus_x = QubitState::from_bloch_angle(FRAC_PI_2);
        let t = tensor(&plus_x, &QubitState::basis0());
        assert!((t.amps()[0].re - FRAC_1_SQRT_2).abs() < NORM_TOL);
        assert!((t.amps()[2].re - FRAC_1_SQRT_2).abs() < NORM_TOL);
        assert!(t.amps()[1].norm() < NORM_TOL);
    }

    #[test]
    fn bell_states_are_orthonormal() {
        let psi_p = bell_state(BellKind::PsiPlus);
        assert!((psi_p.amps()[1].re - FRAC_1_SQRT_2).abs() < NORM_TOL);
        assert!((psi_p.amps()[2].re - FRAC_1_SQRT_2).abs() < NORM_TOL);
        let psi_m = bell_state(BellKind::PsiMinus);
        assert!((psi_m.amps()[2].re + FRAC_1_SQRT_2).abs() < NORM_TOL);

        for (i, a) in BellKind::ALL.iter().enumerate() {
            for (j, b) in BellKind::ALL.iter().enumerate() {
                let ov: Complex64 = bell_state(*a)
                    .amps()
                    .iter()
                    .zip(bell_state(*b).amps())
                    .map(|(x, y)| x.conj() * y)
                    .sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((ov.norm() - expect).abs() < NORM_TOL);
            }
        }
    }

    #[test]
    fn born_probability_examples() {
        let psi_p = bell_state(BellKind::PsiPlus);
        let s01 = tensor(&QubitState::basis0(), &QubitState::basis1());
        assert!((born_probability(&psi_p, &s01) - 0.5).abs() < NORM_TOL);

        let s00 = tensor(&QubitState::basis0(), &QubitState::basis0());
        assert!(born_probability(&psi_p, &s00) < NORM_TOL);

        let psi_m = bell_state(BellKind::PsiMinus);
        let mixed = DensityMatrix::maximally_mixed(4);
        assert!((born_probability_density(&psi_m, &mixed).unwrap() - 0.25).abs() < NORM_TOL);
    }

    #[test]
    fn born_probability_dimension_mismatch_is_rejected() {
        let rho = DensityMatrix::maximally_mixed(4);
        let q = QubitState::basis0();
        assert!(matches!(
            born_probability_density(&q, &rho),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn bell_projectors_are_complete() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let mut amps = [Complex64::new(0.0, 0.0); 4];
            for a in amps.iter_mut() {
                *a = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            }
            let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            for a in amps.iter_mut() {
                *a /= norm;
            }
            let state = TwoQubitState::new(amps).unwrap();
            let total: f64 = BellKind::ALL
                .iter()
                .map(|k| born_probability(&bell_state(*k), &state))
                .sum();
            assert!((total - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn born_probability_ignores_global_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let s = QubitState::from_bloch_angle(0.71);
        let phase = Complex64::from_polar(1.0, rng.random::<f64>() * PI);
        let rotated = QubitState::new([s.amps()[0] * phase, s.amps()[1] * phase]).unwrap();
        let probe = QubitState::from_bloch_angle(1.9);
        assert!(
            (born_probability(&probe, &s) - born_probability(&probe, &rotated)).abs() < NORM_TOL
        );
        assert!(
            (born_probability(&s, &probe) - born_probability(&rotated, &probe)).abs() < NORM_TOL
        );
    }

    #[test]
    fn depolarizing_channel_limits() {
        let rho = QubitState::from_bloch_angle(0.3).density();
        let full = Channel::Depolarizing { p: 1.0 }.apply_density(&rho).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { 0.5 } else { 0.0 };
                assert!((full.get(i, j) - c(expect)).norm() < NORM_TOL);
            }
        }
        let none = Channel::Depolarizing { p: 0.0 }.apply_density(&rho).unwrap();
        assert_eq!(none, rho);
    }

    #[test]
    fn misalignment_rotates_bloch_angle_by_two_delta() {
        // verify by matrix conjugation: U(δ) ρ_θ U(δ)† == ρ_{θ+2δ}
        let theta = 0.37;
        let delta = 0.21;
        let rotated = Channel::Misalignment { delta }
            .apply_density(&QubitState::from_bloch_angle(theta / 2.0).density())
            .unwrap();
        let expect = QubitState::from_bloch_angle(theta / 2.0 + delta).density();
        for i in 0..2 {
            for j in 0..2 {
                assert!((rotated.get(i, j) - expect.get(i, j)).norm() < NORM_TOL);
            }
        }
        // and on the sampled path: +1 eigenstate of angle θ → angle θ+2δ
        let obs = observable_from_angle(theta).unwrap();
        let (plus, _) = obs.eigenstates();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let out = Channel::Misalignment { delta }
            .apply_sampled(&plus, &mut rng)
            .unwrap();
        let (expect_plus, _) = observable_from_angle(theta + 2.0 * delta)
            .unwrap()
            .eigenstates();
        assert_same_ray(out.amplitudes(), expect_plus.amplitudes(), NORM_TOL);
    }

    #[test]
    fn channels_preserve_trace_hermiticity_and_positivity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for ch in [
            Channel::Identity,
            Channel::Depolarizing { p: 0.3 },
            Channel::Misalignment { delta: 0.8 },
            Channel::Loss { eta: 0.5 },
        ] {
            for _ in 0..20 {
                let rho = QubitState::from_bloch_angle(rng.random::<f64>() * PI).density();
                let out = ch.apply_density(&rho).unwrap();
                let tr = out.trace();
                assert!((tr.re - 1.0).abs() < NORM_TOL && tr.im.abs() < NORM_TOL);
                for i in 0..2 {
                    for j in 0..2 {
                        assert!((out.get(i, j) - out.get(j, i).conj()).norm() < NORM_TOL);
                    }
                }
                assert!(out.is_positive_semidefinite(EIGENVALUE_TOL));
            }
        }
    }

    #[test]
    fn loss_channel_drops_state_at_expected_rate() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ch = Channel::Loss { eta: 0.25 };
        let s = QubitState::basis0();
        let kept = (0..100_000)
            .filter(|_| ch.apply_sampled(&s, &mut rng).is_some())
            .count();
        let frac = kept as f64 / 100_000.0;
        assert!((frac - 0.25).abs() < 0.006, "kept fraction {frac}");
    }

    #[test]
    fn density_matrix_validation() {
        // non-Hermitian rejected
        let bad = DensityMatrix::new(
            2,
            vec![c(0.5), c(0.3), c(-0.3), c(0.5)],
        );
        assert!(bad.is_err());
        // wrong trace rejected
        let bad = DensityMatrix::new(2, vec![c(0.9), c(0.0), c(0.0), c(0.3)]);
        assert!(bad.is_err());
        // negative eigenvalue rejected: diag(1.5, -0.5)
        let bad = DensityMatrix::new(2, vec![c(1.5), c(0.0), c(0.0), c(-0.5)]);
        assert!(bad.is_err());
        // a legitimate state passes
        let ok = DensityMatrix::new(2, vec![c(0.5), c(0.5), c(0.5), c(0.5)]);
        assert!(ok.is_ok());
    }

    #[test]
    fn sample_outcome_degenerate_and_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100 {
            assert_eq!(sample_outcome(&[1.0, 0.0, 0.0, 0.0], &mut rng).unwrap(), 0);
        }
        let mut r1 = ChaCha8Rng::seed_from_u64(9);
        let mut r2 = ChaCha8Rng::seed_from_u64(9);
        let seq1: Vec<usize> = (0..64)
            .map(|_| sample_outcome(&[0.5, 0.5], &mut r1).unwrap())
            .collect();
        let seq2: Vec<usize> = (0..64)
            .map(|_| sample_outcome(&[0.5, 0.5], &mut r2).unwrap())
            .collect();
        assert_eq!(seq1, seq2);
    }

    #[test]
    fn sample_outcome_law_of_large_numbers() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let probs = [0.25, 0.25, 0.25, 0.25];
        let mut counts = [0u64; 4];
        let n = 1_000_000;
        for _ in 0..n {
            counts[sample_outcome(&probs, &mut rng).unwrap()] += 1;
        }
        for &c in &counts {
            let f = c as f64 / n as f64;
            assert!((f - 0.25).abs() < 0.005, "frequency {f}");
        }
    }

    #[test]
    fn sample_outcome_rejects_bad_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(sample_outcome(&[0.0, 0.0], &mut rng).is_err());
        assert!(sample_outcome(&[0.5, -0.5], &mut rng).is_err());
        assert!(sample_outcome(&[], &mut rng).is_err());
        assert!(sample_outcome(&[f64::NAN, 1.0], &mut rng).is_err());
    }

    #[test]
    fn state_constructors_enforce_unit_norm() {
        assert!(QubitState::new([c(1.0), c(1.0)]).is_err());
        assert!(QubitState::new([c(f64::NAN), c(0.0)]).is_err());
        assert!(TwoQubitState::new([c(0.6), c(0.5), c(0.5), c(0.5)]).is_err());
        let ok = TwoQubitState::new([c(0.5), c(0.5), c(0.5), c(-0.5)]);
        assert!(ok.is_ok());
    }
}

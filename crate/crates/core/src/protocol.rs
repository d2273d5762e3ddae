//! The three-party protocol round machine.
//!
//! Per round: Alice and Bob draw settings and hidden-variable indices, prepare
//! Bloch-plane eigenstates, the states traverse independent channels, and the
//! relay (Eve) announces a Bell outcome. Rounds are then sifted:
//!
//! - `S1`: both parties in CHSH bases (x1 ∈ {0,1}, y1 ∈ {0,1}) and a ψ⁺
//!   announcement — feeds the CHSH estimate.
//! - `S2`: Alice basis 0 and Bob basis 2 (both Z) with a ψ± announcement —
//!   feeds the key and the QBER estimate; Bob flips his bit.
//!
//! Every source of randomness is a ChaCha sub-stream keyed by
//! `(master_seed, round_index, role)`, so a transcript is a pure function of
//! the config no matter how rounds are scheduled, and Eve's stream is
//! structurally independent of the hidden-variable streams.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::quantum::{
    bell_state, born_probability, sample_outcome, tensor, BellKind, Channel, Observable,
    QubitState, PROB_SUM_TOL,
};

/// Alice's base angles: basis 0 is Z, basis 1 is X.
pub const ALICE_BASE_ANGLES: [f64; 2] = [0.0, FRAC_PI_2];
/// Bob's base angles: basis 0 is −(Z+X)/√2, basis 1 is (Z−X)/√2, basis 2 is Z.
pub const BOB_BASE_ANGLES: [f64; 3] = [5.0 * FRAC_PI_4, -FRAC_PI_4, 0.0];

/// One party's choice for a round: a basis index and the bit to encode.
/// Bit 0 encodes the +1 eigenstate, bit 1 the −1 eigenstate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreparationSetting {
    pub basis: u8,
    pub bit: u8,
}

/// One component of a discrete hidden-variable mixture: with probability
/// `weight` the preparation angle is shifted by `angle_offset`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureComponent {
    pub weight: f64,
    pub angle_offset: f64,
}

/// A discrete mixture over angle offsets, realizing mixed-state preparation
/// while staying inside the two-dimensional Hilbert space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HiddenVariableMixture {
    pub components: Vec<MixtureComponent>,
}

impl HiddenVariableMixture {
    /// The single-component mixture with zero offset (a pure-state source).
    pub fn trivial() -> Self {
        Self {
            components: vec![MixtureComponent {
                weight: 1.0,
                angle_offset: 0.0,
            }],
        }
    }

    pub fn new(components: Vec<MixtureComponent>) -> Result<Self> {
        let m = Self { components };
        m.validate("mixture")?;
        Ok(m)
    }

    pub fn validate(&self, field: &str) -> Result<()> {
        if self.components.is_empty() {
            return Err(Error::config(
                format!("{field}.components"),
                "must not be empty",
            ));
        }
        let mut sum = 0.0;
        for c in &self.components {
            if !c.weight.is_finite() || c.weight < 0.0 {
                return Err(Error::config(
                    format!("{field}.weights"),
                    "weights must be finite and non-negative",
                ));
            }
            if !c.angle_offset.is_finite() {
                return Err(Error::config(
                    format!("{field}.angle_offset"),
                    "must be finite",
                ));
            }
            sum += c.weight;
        }
        if (sum - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::config(
                format!("{field}.weights"),
                format!("must sum to 1 (got {sum})"),
            ));
        }
        Ok(())
    }

    pub fn offset(&self, index: usize) -> f64 {
        self.components[index].angle_offset
    }

    fn sample_index<R: Rng>(&self, rng: &mut R) -> usize {
        let target = rng.random::<f64>();
        let mut acc = 0.0;
        for (i, c) in self.components.iter().enumerate() {
            acc += c.weight;
            if target < acc {
                return i;
            }
        }
        self.components.len() - 1
    }
}

impl Default for HiddenVariableMixture {
    fn default() -> Self {
        Self::trivial()
    }
}

/// The relay's public announcement. φ± outcomes and lost photons map to fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Announcement {
    PsiPlus,
    PsiMinus,
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SiftTag {
    S1,
    S2,
    #[serde(rename = "discard")]
    Discard,
}

/// One fully resolved protocol round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundRecord {
    pub round: u64,
    pub x: PreparationSetting,
    pub y: PreparationSetting,
    pub lambda_a: u32,
    pub lambda_b: u32,
    pub announcement: Announcement,
    pub sift_tag: SiftTag,
    pub alice_bit: u8,
    pub bob_bit_raw: u8,
    /// Bob's bit after sifting: flipped in S2, relabeled in S1 (see
    /// [`s1_relabel`]), otherwise the raw bit.
    pub bob_bit_sifted: u8,
}

/// The relay strategy. Quantum strategies announce ψ± with the Born weights of
/// the received pair; classical strategies may only combine *local*
/// single-qubit measurement outcomes with private randomness, which is what
/// makes the device-independence assumption checkable in code: the rule table
/// never sees settings, hidden-variable indices, or preparation angles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EveStrategy {
    /// Sample one of the four Bell projectors by the Born rule; φ± → fail.
    IdealBsm,
    /// A linear-optics relay resolves exactly ψ⁺ and ψ⁻ and fails otherwise,
    /// which coincides with [`EveStrategy::IdealBsm`] after the φ± → fail map.
    LinearOpticsBsm,
    /// Measure each arm at a fixed angle and announce via a rule table indexed
    /// by `2·outcome_a + outcome_b`.
    ClassicalLhv {
        angle_a: f64,
        angle_b: f64,
        rule: [Announcement; 4],
    },
    /// Announce from a fixed distribution without measuring anything.
    DishonestAnnounce { p_psi_plus: f64, p_psi_minus: f64 },
}

impl EveStrategy {
    pub fn is_quantum(&self) -> bool {
        matches!(self, EveStrategy::IdealBsm | EveStrategy::LinearOpticsBsm)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            EveStrategy::IdealBsm | EveStrategy::LinearOpticsBsm => Ok(()),
            EveStrategy::ClassicalLhv {
                angle_a, angle_b, ..
            } => {
                if !angle_a.is_finite() {
                    return Err(Error::config("eve.angle_a", "must be finite"));
                }
                if !angle_b.is_finite() {
                    return Err(Error::config("eve.angle_b", "must be finite"));
                }
                Ok(())
            }
            EveStrategy::DishonestAnnounce {
                p_psi_plus,
                p_psi_minus,
            } => {
                for (name, p) in [("eve.p_psi_plus", p_psi_plus), ("eve.p_psi_minus", p_psi_minus)]
                {
                    if !p.is_finite() || *p < 0.0 || *p > 1.0 {
                        return Err(Error::config(name, "must lie in [0, 1]"));
                    }
                }
                if p_psi_plus + p_psi_minus > 1.0 + PROB_SUM_TOL {
                    return Err(Error::config(
                        "eve.p_psi_plus",
                        "p_psi_plus + p_psi_minus must not exceed 1",
                    ));
                }
                Ok(())
            }
        }
    }

    /// The classical baselines shipped with the simulator. All of them are
    /// local strategies, so the sifted CHSH value stays at or below 2.
    pub fn bundled_classical() -> Vec<(&'static str, EveStrategy)> {
        vec![
            (
                "z_intercept_resend",
                EveStrategy::ClassicalLhv {
                    angle_a: 0.0,
                    angle_b: 0.0,
                    rule: [
                        Announcement::Fail,
                        Announcement::PsiPlus,
                        Announcement::PsiPlus,
                        Announcement::Fail,
                    ],
                },
            ),
            (
                "breidbart_intercept_resend",
                EveStrategy::ClassicalLhv {
                    angle_a: FRAC_PI_4,
                    angle_b: FRAC_PI_4,
                    rule: [
                        Announcement::PsiMinus,
                        Announcement::PsiPlus,
                        Announcement::PsiPlus,
                        Announcement::PsiMinus,
                    ],
                },
            ),
            (
                "blind_announcer",
                EveStrategy::DishonestAnnounce {
                    p_psi_plus: 0.5,
                    p_psi_minus: 0.5,
                },
            ),
        ]
    }
}

/// Distribution over the basis pair (x1, y1); bits are always uniform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SettingDistribution {
    /// `probs[x1][y1]`
    pub probs: [[f64; 3]; 2],
}

impl SettingDistribution {
    pub fn uniform() -> Self {
        Self {
            probs: [[1.0 / 6.0; 3]; 2],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut sum = 0.0;
        for row in &self.probs {
            for &p in row {
                if !p.is_finite() || p < 0.0 {
                    return Err(Error::config(
                        "setting_probabilities",
                        "entries must be finite and non-negative",
                    ));
                }
                sum += p;
            }
        }
        if (sum - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::config(
                "setting_probabilities",
                format!("must sum to 1 (got {sum})"),
            ));
        }
        Ok(())
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> (u8, u8) {
        let target = rng.random::<f64>();
        let mut acc = 0.0;
        for x1 in 0..2 {
            for y1 in 0..3 {
                acc += self.probs[x1][y1];
                if target < acc {
                    return (x1 as u8, y1 as u8);
                }
            }
        }
        (1, 2)
    }
}

impl Default for SettingDistribution {
    fn default() -> Self {
        Self::uniform()
    }
}

fn default_schema() -> u32 {
    1
}

fn default_min_cell_count() -> u64 {
    100
}

/// Full description of a session. Deserializable from the JSON config format;
/// call [`SessionConfig::validate`] before running.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionConfig {
    #[serde(default = "default_schema")]
    pub schema: u32,
    pub rounds: u64,
    #[serde(rename = "seed")]
    pub master_seed: u64,
    pub eve: EveStrategy,
    #[serde(default)]
    pub alice_mixture: HiddenVariableMixture,
    #[serde(default)]
    pub bob_mixture: HiddenVariableMixture,
    #[serde(default = "Channel::identity")]
    pub channel_a: Channel,
    #[serde(default = "Channel::identity")]
    pub channel_b: Channel,
    #[serde(default)]
    pub setting_probabilities: SettingDistribution,
    #[serde(default = "default_min_cell_count")]
    pub min_cell_count: u64,
    /// Exploratory, off by default: additionally keep ψ⁻ announcements in S1
    /// (with the matching relabeling). The standard sifting rule keeps ψ⁺ only.
    #[serde(default)]
    pub s1_include_psi_minus: bool,
}

impl SessionConfig {
    /// An ideal session: noiseless channels, pure sources, Born-rule relay.
    pub fn ideal(rounds: u64, master_seed: u64) -> Self {
        Self::with_eve(rounds, master_seed, EveStrategy::IdealBsm)
    }

    pub fn with_eve(rounds: u64, master_seed: u64, eve: EveStrategy) -> Self {
        Self {
            schema: 1,
            rounds,
            master_seed,
            eve,
            alice_mixture: HiddenVariableMixture::trivial(),
            bob_mixture: HiddenVariableMixture::trivial(),
            channel_a: Channel::Identity,
            channel_b: Channel::Identity,
            setting_probabilities: SettingDistribution::uniform(),
            min_cell_count: default_min_cell_count(),
            s1_include_psi_minus: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != 1 {
            return Err(Error::config(
                "schema",
                format!("unsupported schema version {}", self.schema),
            ));
        }
        if self.rounds == 0 {
            return Err(Error::config("rounds", "must be at least 1"));
        }
        self.alice_mixture.validate("alice_mixture")?;
        self.bob_mixture.validate("bob_mixture")?;
        self.channel_a.validate("channel_a")?;
        self.channel_b.validate("channel_b")?;
        self.setting_probabilities.validate()?;
        self.eve.validate()?;
        if self.min_cell_count == 0 {
            return Err(Error::config("min_cell_count", "must be at least 1"));
        }
        Ok(())
    }
}

impl Channel {
    fn identity() -> Self {
        Channel::Identity
    }
}

// Per-round randomness roles. Streams are `round·8 + role`; role 7 with round 0
// is reserved for post-processing so no protocol stream can collide with it.
#[derive(Clone, Copy)]
enum Role {
    Settings = 0,
    AliceHidden = 1,
    BobHidden = 2,
    ChannelA = 3,
    ChannelB = 4,
    Eve = 5,
}

pub(crate) const POSTPROCESS_STREAM: u64 = 7;

pub(crate) fn derived_stream(master_seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

struct RoundStreams {
    template: ChaCha8Rng,
}

impl RoundStreams {
    fn new(master_seed: u64) -> Self {
        Self {
            template: ChaCha8Rng::seed_from_u64(master_seed),
        }
    }

    fn stream(&self, round: u64, role: Role) -> ChaCha8Rng {
        let mut rng = self.template.clone();
        rng.set_stream(round.wrapping_mul(8) + role as u64);
        rng
    }
}

/// Alice's preparation: the eigenstate (bit 0 → +1, bit 1 → −1) of the
/// observable at angle `ALICE_BASE_ANGLES[x1] + λ offset`.
pub fn alice_prepare(setting: PreparationSetting, lambda_offset: f64) -> Result<QubitState> {
    if setting.basis > 1 {
        return Err(Error::invalid(format!(
            "Alice basis index {} not in {{0, 1}}",
            setting.basis
        )));
    }
    prepare(ALICE_BASE_ANGLES[setting.basis as usize], setting, lambda_offset)
}

/// Bob's preparation over his three bases; same eigenstate/bit convention.
pub fn bob_prepare(setting: PreparationSetting, lambda_offset: f64) -> Result<QubitState> {
    if setting.basis > 2 {
        return Err(Error::invalid(format!(
            "Bob basis index {} not in {{0, 1, 2}}",
            setting.basis
        )));
    }
    prepare(BOB_BASE_ANGLES[setting.basis as usize], setting, lambda_offset)
}

fn prepare(base_angle: f64, setting: PreparationSetting, lambda_offset: f64) -> Result<QubitState> {
    if setting.bit > 1 {
        return Err(Error::invalid(format!("bit {} not in {{0, 1}}", setting.bit)));
    }
    if !lambda_offset.is_finite() {
        return Err(Error::invalid("hidden-variable offset must be finite"));
    }
    let obs = Observable::from_angle(base_angle + lambda_offset)?;
    let (plus, minus) = obs.eigenstates();
    Ok(if setting.bit == 0 { plus } else { minus })
}

fn measure_bit<R: Rng>(state: &QubitState, angle: f64, rng: &mut R) -> u8 {
    let (plus, _) = Observable::from_angle(angle)
        .expect("validated angle")
        .eigenstates();
    let p0 = born_probability(&plus, state);
    u8::from(rng.random::<f64>() >= p0)
}

/// The relay's measurement. A missing photon on either arm always fails; the
/// strategy only ever sees arrived qubits (never settings or λ indices).
pub fn eve_measure<R: Rng>(
    strategy: &EveStrategy,
    alice: Option<&QubitState>,
    bob: Option<&QubitState>,
    rng: &mut R,
) -> Announcement {
    let (Some(a), Some(b)) = (alice, bob) else {
        return Announcement::Fail;
    };
    match strategy {
        EveStrategy::IdealBsm | EveStrategy::LinearOpticsBsm => {
            let pair = tensor(a, b);
            let probs: Vec<f64> = BellKind::ALL
                .iter()
                .map(|k| born_probability(&bell_state(*k), &pair))
                .collect();
            match sample_outcome(&probs, rng).expect("Bell weights are a distribution") {
                0 => Announcement::PsiPlus,
                1 => Announcement::PsiMinus,
                _ => Announcement::Fail,
            }
        }
        EveStrategy::ClassicalLhv {
            angle_a,
            angle_b,
            rule,
        } => {
            let oa = measure_bit(a, *angle_a, rng);
            let ob = measure_bit(b, *angle_b, rng);
            rule[(2 * oa + ob) as usize]
        }
        EveStrategy::DishonestAnnounce {
            p_psi_plus,
            p_psi_minus,
        } => {
            let u = rng.random::<f64>();
            if u < *p_psi_plus {
                Announcement::PsiPlus
            } else if u < p_psi_plus + p_psi_minus {
                Announcement::PsiMinus
            } else {
                Announcement::Fail
            }
        }
    }
}

/// Fixed S1 outcome relabeling: `b ⊕ x1 ⊕ y1`.
///
/// The bit/eigenvalue convention leaves the sign of each correlator free, and
/// with the protocol's base angles the raw ψ⁺-conditioned statistic of
/// Eq.-style signs lands on 0 instead of the quantum maximum. Flipping Bob's
/// bit in the two off-diagonal basis cells flips an even number of correlator
/// signs, which keeps the statistic a genuine CHSH functional (local bound 2,
/// quantum bound 2√2) while moving the ideal table to +2√2. The map is a
/// compile-time constant determined once from the ideal closed-form table —
/// never fitted to data.
pub fn s1_relabel(bob_bit_raw: u8, x1: u8, y1: u8) -> u8 {
    bob_bit_raw ^ x1 ^ y1
}

/// ψ⁻ variant of the S1 relabeling (used only with `s1_include_psi_minus`):
/// the ψ⁻-conditioned table needs Bob's bit flipped in the y1 = 1 cells.
pub fn s1_relabel_psi_minus(bob_bit_raw: u8, _x1: u8, y1: u8) -> u8 {
    bob_bit_raw ^ u8::from(y1 == 1)
}

fn classify(
    x1: u8,
    y1: u8,
    announcement: Announcement,
    bob_bit_raw: u8,
    include_psi_minus: bool,
) -> (SiftTag, u8) {
    match announcement {
        Announcement::Fail => (SiftTag::Discard, bob_bit_raw),
        Announcement::PsiPlus => {
            if x1 <= 1 && y1 <= 1 {
                (SiftTag::S1, s1_relabel(bob_bit_raw, x1, y1))
            } else if x1 == 0 && y1 == 2 {
                (SiftTag::S2, 1 - bob_bit_raw)
            } else {
                (SiftTag::Discard, bob_bit_raw)
            }
        }
        Announcement::PsiMinus => {
            if x1 == 0 && y1 == 2 {
                (SiftTag::S2, 1 - bob_bit_raw)
            } else if include_psi_minus && x1 <= 1 && y1 <= 1 {
                (SiftTag::S1, s1_relabel_psi_minus(bob_bit_raw, x1, y1))
            } else {
                (SiftTag::Discard, bob_bit_raw)
            }
        }
    }
}

/// Run a single round. Identical `(config, round_index)` always produces an
/// identical record; the config must have been validated.
pub fn run_round(config: &SessionConfig, round_index: u64) -> Result<RoundRecord> {
    let streams = RoundStreams::new(config.master_seed);
    run_round_with(config, round_index, &streams)
}

fn run_round_with(
    config: &SessionConfig,
    round_index: u64,
    streams: &RoundStreams,
) -> Result<RoundRecord> {
    let mut settings_rng = streams.stream(round_index, Role::Settings);
    let (x1, y1) = config.setting_probabilities.sample(&mut settings_rng);
    let x2 = u8::from(settings_rng.random::<bool>());
    let y2 = u8::from(settings_rng.random::<bool>());
    let x = PreparationSetting { basis: x1, bit: x2 };
    let y = PreparationSetting { basis: y1, bit: y2 };

    let lambda_a = config
        .alice_mixture
        .sample_index(&mut streams.stream(round_index, Role::AliceHidden));
    let lambda_b = config
        .bob_mixture
        .sample_index(&mut streams.stream(round_index, Role::BobHidden));

    let alice_state = alice_prepare(x, config.alice_mixture.offset(lambda_a))?;
    let bob_state = bob_prepare(y, config.bob_mixture.offset(lambda_b))?;

    let alice_out = config
        .channel_a
        .apply_sampled(&alice_state, &mut streams.stream(round_index, Role::ChannelA));
    let bob_out = config
        .channel_b
        .apply_sampled(&bob_state, &mut streams.stream(round_index, Role::ChannelB));

    let announcement = eve_measure(
        &config.eve,
        alice_out.as_ref(),
        bob_out.as_ref(),
        &mut streams.stream(round_index, Role::Eve),
    );

    let (sift_tag, bob_bit_sifted) =
        classify(x1, y1, announcement, y2, config.s1_include_psi_minus);

    Ok(RoundRecord {
        round: round_index,
        x,
        y,
        lambda_a: lambda_a as u32,
        lambda_b: lambda_b as u32,
        announcement,
        sift_tag,
        alice_bit: x2,
        bob_bit_raw: y2,
        bob_bit_sifted,
    })
}

/// An ordered list of round records.
#[derive(Debug, Clone, PartialEq)]
pub struct Transcript {
    pub records: Vec<RoundRecord>,
}

impl Transcript {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        for rec in &self.records {
            serde_json::to_writer(&mut w, &TranscriptLine::from(rec))?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn read_jsonl<R: BufRead>(r: R) -> Result<Self> {
        let mut records = Vec::new();
        for line in r.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parsed: TranscriptLine = serde_json::from_str(&line)?;
            records.push(parsed.into());
        }
        Ok(Self { records })
    }
}

/// Wire form of one transcript line. Field names are part of the format.
#[derive(Debug, Serialize, Deserialize)]
struct TranscriptLine {
    round: u64,
    x1: u8,
    x2: u8,
    y1: u8,
    y2: u8,
    la: u32,
    lb: u32,
    announce: Announcement,
    set: SiftTag,
    a: u8,
    b_raw: u8,
    b_sifted: u8,
}

impl From<&RoundRecord> for TranscriptLine {
    fn from(r: &RoundRecord) -> Self {
        Self {
            round: r.round,
            x1: r.x.basis,
            x2: r.x.bit,
            y1: r.y.basis,
            y2: r.y.bit,
            la: r.lambda_a,
            lb: r.lambda_b,
            announce: r.announcement,
            set: r.sift_tag,
            a: r.alice_bit,
            b_raw: r.bob_bit_raw,
            b_sifted: r.bob_bit_sifted,
        }
    }
}

impl From<TranscriptLine> for RoundRecord {
    fn from(l: TranscriptLine) -> Self {
        RoundRecord {
            round: l.round,
            x: PreparationSetting {
                basis: l.x1,
                bit: l.x2,
            },
            y: PreparationSetting {
                basis: l.y1,
                bit: l.y2,
            },
            lambda_a: l.la,
            lambda_b: l.lb,
            announcement: l.announce,
            sift_tag: l.set,
            alice_bit: l.a,
            bob_bit_raw: l.b_raw,
            bob_bit_sifted: l.b_sifted,
        }
    }
}

/// Run a full session. Rounds are evaluated in parallel; because every round's
/// randomness is derived from `(master_seed, round_index, role)` alone the
/// transcript is independent of scheduling.
pub fn run_session(config: &SessionConfig) -> Result<Transcript> {
    config.validate()?;
    let streams = RoundStreams::new(config.master_seed);
    let records: Vec<RoundRecord> = (0..config.rounds)
        .into_par_iter()
        .map(|i| run_round_with(config, i, &streams))
        .collect::<Result<_>>()?;
    Ok(Transcript { records })
}

/// Partition a transcript into S1 and S2 using the standard sifting rule
/// (ψ⁻ rounds never enter S1). Tags and sifted bits are recomputed from the
/// raw fields, so the result is authoritative even for externally loaded
/// transcripts.
pub fn sift(transcript: &Transcript) -> (Vec<RoundRecord>, Vec<RoundRecord>) {
    sift_with_options(transcript, false)
}

/// Sifting with the exploratory ψ⁻-in-S1 variant switchable.
pub fn sift_with_options(
    transcript: &Transcript,
    include_psi_minus: bool,
) -> (Vec<RoundRecord>, Vec<RoundRecord>) {
    let mut s1 = Vec::new();
    let mut s2 = Vec::new();
    for rec in &transcript.records {
        let (tag, b_sifted) = classify(
            rec.x.basis,
            rec.y.basis,
            rec.announcement,
            rec.bob_bit_raw,
            include_psi_minus,
        );
        let rec = RoundRecord {
            sift_tag: tag,
            bob_bit_sifted: b_sifted,
            ..*rec
        };
        match tag {
            SiftTag::S1 => s1.push(rec),
            SiftTag::S2 => s2.push(rec),
            SiftTag::Discard => {}
        }
    }
    (s1, s2)
}

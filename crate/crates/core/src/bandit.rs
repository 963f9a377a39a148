//! Per-context epsilon-greedy multi-armed bandit.
//!
//! One bandit instance learns the danger weight of one context. Its arm
//! space is a uniform grid over [0, 1]; its memory is a table of pull
//! counts and reward sums per (context bin, arm). Rounds 1..=T_trn are a
//! training phase that always picks a uniform random arm; afterwards the
//! policy explores with probability epsilon and otherwise exploits.
//!
//! Two exploit rules exist. `MeanReward` picks the arm with the best
//! empirical mean reward in the current context bin (the default).
//! `MaxTriedWeight` picks the highest-weight arm ever tried in the bin,
//! ignoring rewards; it is kept selectable for comparison runs.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum BanditError {
    #[error("invalid bandit parameters: {0}")]
    InvalidParams(String),
    #[error("arm index {k} outside [1, {n_arm}]")]
    ArmOutOfRange { k: usize, n_arm: usize },
}

/// Configuration of one context's bandit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BanditParams {
    /// Number of arms.
    pub n_arm: usize,
    /// Exploration probability after training; 1 degenerates to A/B testing.
    pub epsilon: f64,
    /// Total number of learning rounds T.
    pub horizon_rounds: usize,
    /// Length of the initial training phase.
    pub train_rounds: usize,
    /// Number of context bins.
    pub n_context_bins: usize,
    /// (low, high) observed range of the context; values outside clamp.
    pub context_range: (f64, f64),
}

impl Default for BanditParams {
    fn default() -> Self {
        Self {
            n_arm: 100,
            epsilon: 0.1,
            horizon_rounds: 100_000,
            train_rounds: 10_000,
            n_context_bins: 21,
            context_range: (0.0, 2.0),
        }
    }
}

impl BanditParams {
    pub fn validate(&self) -> Result<(), BanditError> {
        let mut issues = Vec::new();
        if self.n_arm < 2 {
            issues.push(format!("n_arm must be >= 2, got {}", self.n_arm));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            issues.push(format!("epsilon must be in [0, 1], got {}", self.epsilon));
        }
        if self.train_rounds == 0 || self.train_rounds > self.horizon_rounds {
            issues.push(format!(
                "train_rounds must satisfy 0 < T_trn <= T, got T_trn = {}, T = {}",
                self.train_rounds, self.horizon_rounds
            ));
        }
        if self.n_context_bins < 1 {
            issues.push("n_context_bins must be >= 1".to_string());
        }
        let (low, high) = self.context_range;
        if !(low.is_finite() && high.is_finite() && high > low) {
            issues.push(format!(
                "context_range must be a finite (low, high) with high > low, got ({low}, {high})"
            ));
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(BanditError::InvalidParams(issues.join("; ")))
        }
    }
}

/// 1-based arm index in [1, N_arm].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ArmIndex(usize);

impl ArmIndex {
    pub fn new(k: usize, n_arm: usize) -> Result<Self, BanditError> {
        if (1..=n_arm).contains(&k) {
            Ok(Self(k))
        } else {
            Err(BanditError::ArmOutOfRange { k, n_arm })
        }
    }

    pub fn get(self) -> usize {
        self.0
    }

    fn offset(self) -> usize {
        self.0 - 1
    }
}

/// Weight of arm `k` on the uniform grid: arm 1 maps to 0.0, arm N_arm to
/// 1.0. Panics if `k` does not fit `n_arm`.
pub fn arm_weight(k: ArmIndex, n_arm: usize) -> f64 {
    assert!(
        k.get() >= 1 && k.get() <= n_arm,
        "arm index {} outside [1, {}]",
        k.get(),
        n_arm
    );
    (k.get() - 1) as f64 / (n_arm - 1) as f64
}

/// Uniform-width bin of a context value. The value clamps into the range
/// and the top edge maps into the last bin.
pub fn bin_context(c: f64, range: (f64, f64), n_bins: usize) -> usize {
    assert!(n_bins >= 1, "n_bins must be >= 1");
    let (low, high) = range;
    assert!(high > low, "context range must have high > low");
    let frac = (c.clamp(low, high) - low) / (high - low);
    ((frac * n_bins as f64).floor() as usize).min(n_bins - 1)
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Cell {
    pulls: u64,
    reward_sum: f64,
}

/// Per (context bin, arm) visit counts and reward sums; the bandit's
/// entire memory.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmTable {
    n_bins: usize,
    n_arm: usize,
    cells: Vec<Cell>,
}

impl ArmTable {
    pub fn new(n_bins: usize, n_arm: usize) -> Self {
        assert!(n_bins >= 1 && n_arm >= 2);
        Self {
            n_bins,
            n_arm,
            cells: vec![Cell::default(); n_bins * n_arm],
        }
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    pub fn n_arm(&self) -> usize {
        self.n_arm
    }

    fn idx(&self, bin: usize, arm: ArmIndex) -> usize {
        assert!(bin < self.n_bins, "bin {bin} outside [0, {})", self.n_bins);
        bin * self.n_arm + arm.offset()
    }

    /// Record one pull with a binary reward.
    pub fn update(&mut self, bin: usize, arm: ArmIndex, reward: bool) {
        let i = self.idx(bin, arm);
        self.cells[i].pulls += 1;
        if reward {
            self.cells[i].reward_sum += 1.0;
        }
    }

    pub fn pulls(&self, bin: usize, arm: ArmIndex) -> u64 {
        self.cells[self.idx(bin, arm)].pulls
    }

    pub fn reward_sum(&self, bin: usize, arm: ArmIndex) -> f64 {
        self.cells[self.idx(bin, arm)].reward_sum
    }

    /// Empirical mean reward, defined only for visited cells.
    pub fn mean(&self, bin: usize, arm: ArmIndex) -> Option<f64> {
        let c = self.cells[self.idx(bin, arm)];
        (c.pulls > 0).then(|| c.reward_sum / c.pulls as f64)
    }

    /// Total pulls in one bin.
    pub fn bin_visits(&self, bin: usize) -> u64 {
        (1..=self.n_arm)
            .map(|k| self.pulls(bin, ArmIndex(k)))
            .sum()
    }

    /// Pulls per arm summed over all bins.
    pub fn arm_totals(&self) -> Vec<u64> {
        let mut totals = vec![0u64; self.n_arm];
        for bin in 0..self.n_bins {
            for k in 1..=self.n_arm {
                totals[k - 1] += self.pulls(bin, ArmIndex(k));
            }
        }
        totals
    }

    /// Visited arm with the best empirical mean in `bin`, ties broken
    /// toward the lowest index. `None` when the bin has never been visited.
    pub fn best_mean_arm(&self, bin: usize) -> Option<ArmIndex> {
        let mut best: Option<(ArmIndex, f64)> = None;
        for k in 1..=self.n_arm {
            let arm = ArmIndex(k);
            if let Some(m) = self.mean(bin, arm) {
                if best.map_or(true, |(_, bm)| m > bm) {
                    best = Some((arm, m));
                }
            }
        }
        best.map(|(arm, _)| arm)
    }

    /// Highest-index arm ever tried in `bin` (the literal exploit rule).
    pub fn max_tried_arm(&self, bin: usize) -> Option<ArmIndex> {
        (1..=self.n_arm)
            .rev()
            .map(ArmIndex)
            .find(|&arm| self.pulls(bin, arm) > 0)
    }

    /// Data rows of the flat CSV form `bin,arm,pulls,reward_sum`, ordered
    /// by bin then arm.
    pub fn csv_rows(&self) -> impl Iterator<Item = String> + '_ {
        (0..self.n_bins).flat_map(move |bin| {
            (1..=self.n_arm).map(move |k| {
                let arm = ArmIndex(k);
                format!(
                    "{},{},{},{}",
                    bin,
                    k,
                    self.pulls(bin, arm),
                    self.reward_sum(bin, arm)
                )
            })
        })
    }

    /// Write the table as a flat CSV with a header row.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "bin,arm,pulls,reward_sum")?;
        for row in self.csv_rows() {
            writeln!(w, "{row}")?;
        }
        Ok(())
    }
}

/// Which rule the exploit branch uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExploitRule {
    /// Argmax of empirical mean reward per context bin.
    MeanReward,
    /// Highest weight previously tried in the bin, rewards ignored.
    MaxTriedWeight,
}

/// Which branch of the policy a round took.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SelectionPhase {
    Training,
    Explore,
    Exploit,
}

impl SelectionPhase {
    pub fn as_str(self) -> &'static str {
        match self {
            SelectionPhase::Training => "training",
            SelectionPhase::Explore => "explore",
            SelectionPhase::Exploit => "exploit",
        }
    }
}

/// Decide the policy branch for round `t` (1-based): training while
/// t <= T_trn, afterwards explore with probability epsilon.
pub fn decide_phase<R: Rng>(t: usize, params: &BanditParams, rng: &mut R) -> SelectionPhase {
    assert!(t >= 1, "round index is 1-based");
    if t <= params.train_rounds {
        SelectionPhase::Training
    } else if rng.gen_bool(params.epsilon) {
        SelectionPhase::Explore
    } else {
        SelectionPhase::Exploit
    }
}

/// Pick an arm given an already-decided phase. Training and explore draw
/// uniformly over [1, N_arm]; exploit applies `rule` and degrades to a
/// uniform draw when the bin has no visited arm yet.
pub fn select_arm_in_phase<R: Rng>(
    phase: SelectionPhase,
    context_bin: usize,
    table: &ArmTable,
    params: &BanditParams,
    rule: ExploitRule,
    rng: &mut R,
) -> ArmIndex {
    match phase {
        SelectionPhase::Training | SelectionPhase::Explore => uniform_arm(params.n_arm, rng),
        SelectionPhase::Exploit => {
            let exploited = match rule {
                ExploitRule::MeanReward => table.best_mean_arm(context_bin),
                ExploitRule::MaxTriedWeight => table.max_tried_arm(context_bin),
            };
            exploited.unwrap_or_else(|| uniform_arm(params.n_arm, rng))
        }
    }
}

/// Full per-round arm selection: phase decision plus arm choice.
pub fn select_arm<R: Rng>(
    t: usize,
    context_bin: usize,
    table: &ArmTable,
    params: &BanditParams,
    rule: ExploitRule,
    rng: &mut R,
) -> (ArmIndex, SelectionPhase) {
    let phase = decide_phase(t, params, rng);
    let arm = select_arm_in_phase(phase, context_bin, table, params, rule, rng);
    (arm, phase)
}

fn uniform_arm<R: Rng>(n_arm: usize, rng: &mut R) -> ArmIndex {
    ArmIndex(rng.gen_range(1..=n_arm))
}

/// One recorded (optimal, actual) reward pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegretEntry {
    pub r_opt: f64,
    pub r_actual: f64,
}

/// Running account of the reward gap between the a-priori-optimal policy
/// and the learned one.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RegretLedger {
    cumulative_opt: f64,
    cumulative_actual: f64,
    entries: Vec<RegretEntry>,
}

impl RegretLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Record one round. `r_opt` may be a realized reward or an
    /// expectation; both must lie in [0, 1].
    pub fn record(&mut self, r_opt: f64, r_actual: f64) {
        assert!((0.0..=1.0).contains(&r_opt), "r_opt must be in [0, 1]");
        assert!(
            (0.0..=1.0).contains(&r_actual),
            "r_actual must be in [0, 1]"
        );
        self.cumulative_opt += r_opt;
        self.cumulative_actual += r_actual;
        self.entries.push(RegretEntry { r_opt, r_actual });
    }

    pub fn rounds(&self) -> usize {
        self.entries.len()
    }

    /// Cumulative regret rho(T).
    pub fn rho(&self) -> f64 {
        self.cumulative_opt - self.cumulative_actual
    }

    /// Per-round average regret rho(T)/T; zero before any round.
    pub fn rho_per_round(&self) -> f64 {
        if self.entries.is_empty() {
            0.0
        } else {
            self.rho() / self.entries.len() as f64
        }
    }

    pub fn cumulative(&self) -> (f64, f64) {
        (self.cumulative_opt, self.cumulative_actual)
    }

    pub fn entries(&self) -> &[RegretEntry] {
        &self.entries
    }
}

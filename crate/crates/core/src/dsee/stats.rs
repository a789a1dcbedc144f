/// Cumulative reward and play count per arm.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SampleStats {
    cum_reward: Vec<f64>,
    play_count: Vec<u64>,
}

impl SampleStats {
    pub fn new(n_arms: usize) -> Self {
        Self { cum_reward: vec![0.0; n_arms], play_count: vec![0; n_arms] }
    }

    pub fn n_arms(&self) -> usize {
        self.play_count.len()
    }

    pub fn update(&mut self, arm: usize, reward: f64) {
        debug_assert!(reward >= 0.0);
        self.cum_reward[arm] += reward;
        self.play_count[arm] += 1;
    }

    pub fn play_count(&self, arm: usize) -> u64 {
        self.play_count[arm]
    }

    pub fn total_plays(&self) -> u64 {
        self.play_count.iter().sum()
    }

    pub fn cum_reward(&self, arm: usize) -> f64 {
        self.cum_reward[arm]
    }

    pub fn mean(&self, arm: usize) -> Option<f64> {
        (self.play_count[arm] > 0).then(|| self.cum_reward[arm] / self.play_count[arm] as f64)
    }

    /// Arms ordered by decreasing sample mean, lowest index first on ties.
    /// Unplayed arms rank last.
    pub fn ranking(&self) -> Vec<usize> {
        let key = |a: usize| self.mean(a).unwrap_or(f64::NEG_INFINITY);
        let mut order: Vec<usize> = (0..self.n_arms()).collect();
        order.sort_by(|&a, &b| key(b).total_cmp(&key(a)).then(a.cmp(&b)));
        order
    }

    pub fn top_m(&self, m: usize) -> Vec<usize> {
        let mut r = self.ranking();
        r.truncate(m);
        r
    }
}

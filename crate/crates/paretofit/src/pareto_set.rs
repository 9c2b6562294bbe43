//! Whole-Pareto-set approximators.
//!
//! Two ways to carry an entire family `lambda -> theta_hat(lambda)` around:
//! a finite ensemble over a simplex grid, and a small hypernetwork
//! `K -> hidden -> ReLU -> d` trained with Adam on freshly sampled
//! preference vectors (`lambda ~ Dir(1/K, ..., 1/K)` each step). The
//! backward pass is written out by hand; there is no autodiff here.

use std::io::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::estimators::{ObjectiveDataset, ParameterEstimate};
use crate::linalg::dot;
use crate::model::{QuadraticObjective, SimplexWeights};
use crate::rng::CounterRng;

/// A finite set of preference vectors.
#[derive(Debug, Clone)]
pub struct SimplexGrid {
    points: Vec<SimplexWeights>,
}

impl SimplexGrid {
    pub fn new(points: Vec<SimplexWeights>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyData("simplex grid"));
        }
        Ok(SimplexGrid { points })
    }

    /// `m` equispaced weights for two objectives, from `(0,1)` to `(1,0)`.
    pub fn equispaced_pair(m: usize) -> Result<Self> {
        if m < 1 {
            return Err(Error::EmptyData("simplex grid"));
        }
        if m == 1 {
            return SimplexGrid::new(vec![SimplexWeights::pair(0.5)?]);
        }
        let points = (0..m)
            .map(|i| SimplexWeights::pair(i as f64 / (m - 1) as f64))
            .collect::<Result<Vec<_>>>()?;
        SimplexGrid::new(points)
    }

    /// The default two-objective grid of ten weights.
    pub fn default_pair() -> Self {
        SimplexGrid::equispaced_pair(10).expect("static grid")
    }

    pub fn points(&self) -> &[SimplexWeights] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Evaluate a per-weight estimator at every grid point. Errors carry the
/// offending weight vector.
pub fn ensemble_fit<F>(estimator: F, grid: &SimplexGrid) -> Result<Vec<(SimplexWeights, Vec<f64>)>>
where
    F: Fn(&SimplexWeights) -> Result<Vec<f64>>,
{
    grid.points()
        .iter()
        .map(|lambda| match estimator(lambda) {
            Ok(theta) => Ok((lambda.clone(), theta)),
            Err(e) => Err(Error::Ensemble {
                lambda: lambda.as_slice().to_vec(),
                source: Box::new(e),
            }),
        })
        .collect()
}

/// Training controls for the hypernetworks.
#[derive(Debug, Clone)]
pub struct TrainSettings {
    pub steps: usize,
    pub learning_rate: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_eps: f64,
    /// Hidden width of the single ReLU layer.
    pub hidden: usize,
    /// Dirichlet concentration for the per-step weight draw; `None` means
    /// `1/K`.
    pub concentration: Option<f64>,
    pub seed: u64,
}

impl Default for TrainSettings {
    fn default() -> Self {
        TrainSettings {
            steps: 2000,
            learning_rate: 1e-3,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_eps: 1e-8,
            hidden: 128,
            concentration: None,
            seed: 0,
        }
    }
}

impl TrainSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) || !(self.adam_eps > 0.0) || self.hidden == 0 {
            return Err(Error::InvalidArgument(
                "training settings must have positive learning rate, eps and width".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.adam_beta1) || !(0.0..1.0).contains(&self.adam_beta2) {
            return Err(Error::InvalidArgument(
                "Adam moment decays must lie in [0, 1)".into(),
            ));
        }
        Ok(())
    }
}

/// `h(lambda) = W2 relu(W1 lambda + b1) + b2`, stored as one flat parameter
/// vector. Layout: `W1 (hidden x K)`, `b1`, `W2 (d x hidden)`, `b2`.
#[derive(Debug, Clone)]
pub struct Hypernetwork {
    k: usize,
    hidden: usize,
    d: usize,
    params: Vec<f64>,
}

impl Hypernetwork {
    pub fn zeros(k: usize, hidden: usize, d: usize) -> Self {
        let len = hidden * k + hidden + d * hidden + d;
        Hypernetwork {
            k,
            hidden,
            d,
            params: vec![0.0; len],
        }
    }

    /// Seed-deterministic initialization, uniform in
    /// `[-1/sqrt(fan_in), 1/sqrt(fan_in)]` per layer.
    pub fn init(k: usize, hidden: usize, d: usize, seed: u64) -> Self {
        let mut net = Hypernetwork::zeros(k, hidden, d);
        let mut rng = CounterRng::new(seed, "hypernet-init");
        let lim1 = 1.0 / (k as f64).sqrt();
        let lim2 = 1.0 / (hidden as f64).sqrt();
        let (w1, b1, w2, b2) = net.offsets();
        for i in 0..b1.end {
            net.params[i] = rng.uniform_in(-lim1, lim1);
        }
        for i in w2.start..b2.end {
            net.params[i] = rng.uniform_in(-lim2, lim2);
        }
        let _ = w1;
        net
    }

    fn offsets(
        &self,
    ) -> (
        std::ops::Range<usize>,
        std::ops::Range<usize>,
        std::ops::Range<usize>,
        std::ops::Range<usize>,
    ) {
        let w1 = 0..self.hidden * self.k;
        let b1 = w1.end..w1.end + self.hidden;
        let w2 = b1.end..b1.end + self.d * self.hidden;
        let b2 = w2.end..w2.end + self.d;
        (w1, b1, w2, b2)
    }

    pub fn num_objectives(&self) -> usize {
        self.k
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    /// Pre-activations and activations of the hidden layer.
    fn hidden_pass(&self, lambda: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let (w1, b1, _, _) = self.offsets();
        let mut z = vec![0.0; self.hidden];
        for h in 0..self.hidden {
            let row = &self.params[w1.start + h * self.k..w1.start + (h + 1) * self.k];
            z[h] = dot(row, lambda) + self.params[b1.start + h];
        }
        let a = z.iter().map(|v| v.max(0.0)).collect();
        (z, a)
    }

    pub fn forward(&self, lambda: &SimplexWeights) -> Result<Vec<f64>> {
        if lambda.len() != self.k {
            return Err(Error::DimensionMismatch {
                context: "hypernetwork input",
                expected: self.k,
                got: lambda.len(),
            });
        }
        let (_, a) = self.hidden_pass(lambda.as_slice());
        let (_, _, w2, b2) = self.offsets();
        let mut out = vec![0.0; self.d];
        for i in 0..self.d {
            let row = &self.params[w2.start + i * self.hidden..w2.start + (i + 1) * self.hidden];
            out[i] = dot(row, &a) + self.params[b2.start + i];
        }
        Ok(out)
    }

    /// Gradient of a scalar loss with respect to all parameters, given the
    /// gradient `g_out` of that loss with respect to the network output.
    pub fn backward(&self, lambda: &[f64], g_out: &[f64]) -> Vec<f64> {
        assert_eq!(lambda.len(), self.k);
        assert_eq!(g_out.len(), self.d);
        let (z, a) = self.hidden_pass(lambda);
        let (w1, b1, w2, b2) = self.offsets();
        let mut grad = vec![0.0; self.params.len()];
        // Output layer.
        for i in 0..self.d {
            grad[b2.start + i] = g_out[i];
            for h in 0..self.hidden {
                grad[w2.start + i * self.hidden + h] = g_out[i] * a[h];
            }
        }
        // Back through ReLU.
        let mut dz = vec![0.0; self.hidden];
        for h in 0..self.hidden {
            if z[h] > 0.0 {
                let mut acc = 0.0;
                for i in 0..self.d {
                    acc += self.params[w2.start + i * self.hidden + h] * g_out[i];
                }
                dz[h] = acc;
            }
        }
        for h in 0..self.hidden {
            grad[b1.start + h] = dz[h];
            for j in 0..self.k {
                grad[w1.start + h * self.k + j] = dz[h] * lambda[j];
            }
        }
        grad
    }

    /// Write the weights as a flat CSV of named arrays (`array,index,value`).
    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::from("array,index,value\n");
        out.push_str(&format!("meta,0,{}\n", self.k));
        out.push_str(&format!("meta,1,{}\n", self.hidden));
        out.push_str(&format!("meta,2,{}\n", self.d));
        let (w1, b1, w2, b2) = self.offsets();
        for (name, range) in [("w1", w1), ("b1", b1), ("w2", w2), ("b2", b2)] {
            for (i, idx) in range.enumerate() {
                out.push_str(&format!("{name},{i},{}\n", self.params[idx]));
            }
        }
        let mut f = std::fs::File::create(path).map_err(|e| Error::io(path.to_path_buf(), e))?;
        f.write_all(out.as_bytes())
            .map_err(|e| Error::io(path.to_path_buf(), e))
    }

    pub fn load_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path.to_path_buf(), e))?;
        let mut meta = [0usize; 3];
        let mut rows: Vec<(String, usize, f64)> = Vec::new();
        for (line_no, line) in text.lines().enumerate().skip(1) {
            let mut parts = line.splitn(3, ',');
            let (name, idx, value) = (
                parts.next().unwrap_or_default(),
                parts.next().unwrap_or_default(),
                parts.next().unwrap_or_default(),
            );
            let idx: usize = idx.parse().map_err(|_| Error::BadCell {
                row: line_no,
                column: "index".into(),
                value: idx.into(),
            })?;
            if name == "meta" {
                let v: usize = value.parse().map_err(|_| Error::BadCell {
                    row: line_no,
                    column: "value".into(),
                    value: value.into(),
                })?;
                meta[idx] = v;
            } else {
                let v: f64 = value.parse().map_err(|_| Error::BadCell {
                    row: line_no,
                    column: "value".into(),
                    value: value.into(),
                })?;
                rows.push((name.to_string(), idx, v));
            }
        }
        let [k, hidden, d] = meta;
        let mut net = Hypernetwork::zeros(k, hidden, d);
        let (w1, b1, w2, b2) = net.offsets();
        for (name, i, v) in rows {
            let base = match name.as_str() {
                "w1" => &w1,
                "b1" => &b1,
                "w2" => &w2,
                "b2" => &b2,
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "unknown array `{other}` in hypernetwork file"
                    )))
                }
            };
            let slot = base.start + i;
            if slot >= base.end {
                return Err(Error::InvalidArgument(format!(
                    "index {i} out of range for array `{name}`"
                )));
            }
            net.params[slot] = v;
        }
        Ok(net)
    }
}

/// First/second moment accumulators for Adam.
#[derive(Debug, Clone)]
pub struct AdamState {
    m: Vec<f64>,
    v: Vec<f64>,
    t: usize,
}

impl AdamState {
    pub fn new(len: usize) -> Self {
        AdamState {
            m: vec![0.0; len],
            v: vec![0.0; len],
            t: 0,
        }
    }

    pub fn step(&self) -> usize {
        self.t
    }
}

/// One bias-corrected Adam update of `params` in place.
pub fn adam_step(
    params: &mut [f64],
    state: &mut AdamState,
    grads: &[f64],
    settings: &TrainSettings,
) {
    assert_eq!(params.len(), grads.len());
    assert_eq!(params.len(), state.m.len());
    state.t += 1;
    let (b1, b2) = (settings.adam_beta1, settings.adam_beta2);
    let bc1 = 1.0 - libm::pow(b1, state.t as f64);
    let bc2 = 1.0 - libm::pow(b2, state.t as f64);
    for i in 0..params.len() {
        state.m[i] = b1 * state.m[i] + (1.0 - b1) * grads[i];
        state.v[i] = b2 * state.v[i] + (1.0 - b2) * grads[i] * grads[i];
        let m_hat = state.m[i] / bc1;
        let v_hat = state.v[i] / bc2;
        params[i] -= settings.learning_rate * m_hat / (libm::sqrt(v_hat) + settings.adam_eps);
    }
}

/// One draw from `Dir(c, ..., c)` by normalized Gamma variates.
pub fn dirichlet_sample(
    num_objectives: usize,
    concentration: f64,
    rng: &mut CounterRng,
) -> SimplexWeights {
    assert!(num_objectives >= 1);
    assert!(concentration > 0.0);
    loop {
        let draws: Vec<f64> = (0..num_objectives)
            .map(|_| rng.gamma(concentration))
            .collect();
        if draws.iter().sum::<f64>() > 0.0 {
            if let Ok(w) = SimplexWeights::normalized(draws) {
                return w;
            }
        }
    }
}

/// Train a hypernetwork against the two-stage objective tuple assembled
/// from stage-1 estimates: each step samples a preference vector and takes
/// an Adam step on `sum_k lambda_k (h - beta_k)' Cov_k (h - beta_k)`.
pub fn train_hypernet_two_stage(
    estimates: &[ParameterEstimate],
    settings: &TrainSettings,
) -> Result<Hypernetwork> {
    settings.validate()?;
    if estimates.is_empty() {
        return Err(Error::EmptyData("hypernetwork estimates"));
    }
    let k = estimates.len();
    let d = estimates[0].beta_hat.len();
    let objectives: Vec<QuadraticObjective> = estimates
        .iter()
        .map(|e| QuadraticObjective::new(e.cov_hat.clone(), e.beta_hat.clone(), 0.0))
        .collect::<Result<_>>()?;
    let concentration = settings.concentration.unwrap_or(1.0 / k as f64);
    let mut net = Hypernetwork::init(k, settings.hidden, d, settings.seed);
    let mut adam = AdamState::new(net.params().len());
    let mut rng = CounterRng::new(settings.seed, "hypernet-dirichlet");
    for step in 0..settings.steps {
        let lambda = dirichlet_sample(k, concentration, &mut rng);
        let h = net.forward(&lambda)?;
        let mut loss = 0.0;
        let mut g_out = vec![0.0; d];
        for (j, obj) in objectives.iter().enumerate() {
            let w = lambda.get(j);
            let diff: Vec<f64> = h.iter().zip(obj.center()).map(|(a, b)| a - b).collect();
            let qd = obj.quad().matvec(&diff);
            loss += w * dot(&diff, &qd);
            for (g, q) in g_out.iter_mut().zip(&qd) {
                *g += 2.0 * w * q;
            }
        }
        if !loss.is_finite() {
            return Err(Error::NonFiniteLoss { step });
        }
        let grads = net.backward(lambda.as_slice(), &g_out);
        adam_step(net.params_mut(), &mut adam, &grads, settings);
    }
    Ok(net)
}

/// Train a hypernetwork against the empirical scalarized loss plus an l1
/// penalty on the produced parameter vector (subgradient zero at exact
/// zeros).
pub fn train_hypernet_direct(
    datasets: &[ObjectiveDataset],
    alpha: f64,
    settings: &TrainSettings,
) -> Result<Hypernetwork> {
    settings.validate()?;
    if datasets.is_empty() {
        return Err(Error::EmptyData("hypernetwork datasets"));
    }
    if !(alpha >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "l1 strength must be nonnegative, got {alpha}"
        )));
    }
    let k = datasets.len();
    let d = datasets[0].dim();
    for data in datasets {
        if data.n_labeled() == 0 {
            return Err(Error::EmptyData("hypernetwork labeled rows"));
        }
    }
    let concentration = settings.concentration.unwrap_or(1.0 / k as f64);
    let mut net = Hypernetwork::init(k, settings.hidden, d, settings.seed);
    let mut adam = AdamState::new(net.params().len());
    let mut rng = CounterRng::new(settings.seed, "hypernet-dirichlet");
    for step in 0..settings.steps {
        let lambda = dirichlet_sample(k, concentration, &mut rng);
        let h = net.forward(&lambda)?;
        let mut loss = alpha * h.iter().map(|v| v.abs()).sum::<f64>();
        let mut g_out: Vec<f64> = h
            .iter()
            .map(|v| alpha * v.signum() * ((*v != 0.0) as u8 as f64))
            .collect();
        for (j, data) in datasets.iter().enumerate() {
            let w = lambda.get(j);
            let n_inv = 1.0 / data.n_labeled() as f64;
            let mut resid = data.labeled_x().matvec(&h);
            for (r, y) in resid.iter_mut().zip(data.labeled_y()) {
                *r -= y;
            }
            loss += w * n_inv * dot(&resid, &resid);
            let back = data.labeled_x().tr_matvec(&resid);
            for (g, b) in g_out.iter_mut().zip(&back) {
                *g += 2.0 * w * n_inv * b;
            }
        }
        if !loss.is_finite() {
            return Err(Error::NonFiniteLoss { step });
        }
        let grads = net.backward(lambda.as_slice(), &g_out);
        adam_step(net.params_mut(), &mut adam, &grads, settings);
    }
    Ok(net)
}

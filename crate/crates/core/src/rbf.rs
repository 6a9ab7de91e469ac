//! Gaussian RBF network with greedy incremental training.
//!
//! The hidden layer holds Gaussian units `exp(-(r/spread)^2)` around stored
//! centers and the output layer is linear with a bias. Training grows the
//! hidden layer one unit at a time: the training input with the largest
//! residual norm becomes the next center, and the output layer is re-solved
//! by minimum-norm least squares. Training stops when the sum-squared error
//! reaches the goal or the neuron budget is spent.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Singular values below `RCOND * sigma_max` are treated as zero.
pub const RCOND: f64 = 1e-12;

// A new activation column whose component orthogonal to the current design
// is below this fraction of its norm is treated as linearly dependent.
const DEPENDENCE_TOL: f64 = 1e-14;

#[derive(Debug, Error)]
pub enum RbfError {
    #[error("spread must be finite and positive, got {0}")]
    InvalidSpread(f64),
    #[error("distance must be finite and non-negative, got {0}")]
    InvalidDistance(f64),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("invalid training config: {0}")]
    InvalidConfig(String),
    #[error("least-squares solve failed: {0}")]
    Solve(&'static str),
    #[error("network file line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// `exp(-(distance / spread)^2)`.
pub fn gaussian_activation(distance: f64, spread: f64) -> Result<f64, RbfError> {
    if !(spread.is_finite() && spread > 0.0) {
        return Err(RbfError::InvalidSpread(spread));
    }
    if !(distance.is_finite() && distance >= 0.0) {
        return Err(RbfError::InvalidDistance(distance));
    }
    Ok(activation(distance, spread))
}

#[inline]
fn activation(distance: f64, spread: f64) -> f64 {
    let z = distance / spread;
    (-z * z).exp()
}

#[inline]
fn distance_to(centers: &DMatrix<f64>, j: usize, x: impl Iterator<Item = f64>) -> f64 {
    x.enumerate()
        .map(|(k, v)| {
            let d = v - centers[(j, k)];
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// Trained network. Parameters are fixed after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct RbfNetwork {
    centers: DMatrix<f64>,
    spread: f64,
    weights: DMatrix<f64>,
    bias: DVector<f64>,
}

impl RbfNetwork {
    /// `centers` is k×d, `weights` k×m, `bias` has length m.
    pub fn new(
        centers: DMatrix<f64>,
        spread: f64,
        weights: DMatrix<f64>,
        bias: DVector<f64>,
    ) -> Result<Self, RbfError> {
        if !(spread.is_finite() && spread > 0.0) {
            return Err(RbfError::InvalidSpread(spread));
        }
        if weights.nrows() != centers.nrows() {
            return Err(RbfError::DimensionMismatch {
                expected: centers.nrows(),
                actual: weights.nrows(),
            });
        }
        if weights.ncols() != bias.len() {
            return Err(RbfError::DimensionMismatch {
                expected: bias.len(),
                actual: weights.ncols(),
            });
        }
        if centers.iter().chain(weights.iter()).chain(bias.iter()).any(|v| !v.is_finite()) {
            return Err(RbfError::NonFinite("network parameters"));
        }
        Ok(RbfNetwork {
            centers,
            spread,
            weights,
            bias,
        })
    }

    /// Network with an empty hidden layer: every input maps to `bias`.
    pub fn bias_only(input_dim: usize, spread: f64, bias: DVector<f64>) -> Result<Self, RbfError> {
        let m = bias.len();
        Self::new(DMatrix::zeros(0, input_dim), spread, DMatrix::zeros(0, m), bias)
    }

    pub fn input_dim(&self) -> usize {
        self.centers.ncols()
    }

    pub fn output_dim(&self) -> usize {
        self.bias.len()
    }

    pub fn num_centers(&self) -> usize {
        self.centers.nrows()
    }

    pub fn spread(&self) -> f64 {
        self.spread
    }

    pub fn centers(&self) -> &DMatrix<f64> {
        &self.centers
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    pub fn bias(&self) -> &DVector<f64> {
        &self.bias
    }

    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>, RbfError> {
        if input.len() != self.input_dim() {
            return Err(RbfError::DimensionMismatch {
                expected: self.input_dim(),
                actual: input.len(),
            });
        }
        let mut out: Vec<f64> = self.bias.iter().copied().collect();
        for j in 0..self.num_centers() {
            let a = activation(distance_to(&self.centers, j, input.iter().copied()), self.spread);
            for (o, w) in out.iter_mut().zip(self.weights.row(j).iter()) {
                *o += w * a;
            }
        }
        Ok(out)
    }

    /// Forward pass over every row of an n×d input matrix.
    pub fn predict(&self, inputs: &DMatrix<f64>) -> Result<DMatrix<f64>, RbfError> {
        let mut out = DMatrix::zeros(inputs.nrows(), self.output_dim());
        let mut row = vec![0.0; inputs.ncols()];
        for i in 0..inputs.nrows() {
            for (k, v) in row.iter_mut().enumerate() {
                *v = inputs[(i, k)];
            }
            let y = self.forward(&row)?;
            for (c, v) in y.into_iter().enumerate() {
                out[(i, c)] = v;
            }
        }
        Ok(out)
    }

    /// Network made of the first `k` centers with the given output layer.
    fn prefix(&self, k: usize, stage: &StageParams) -> RbfNetwork {
        RbfNetwork {
            centers: self.centers.rows(0, k).into_owned(),
            spread: self.spread,
            weights: stage.weights.clone(),
            bias: stage.bias.clone(),
        }
    }

    /// Flat text form with 17 significant digits per value.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let fmt_row = |s: &mut String, key: &str, vals: &mut dyn Iterator<Item = f64>| {
            s.push_str(key);
            for v in vals {
                let _ = write!(s, " {v:.16e}");
            }
            s.push('\n');
        };
        s.push_str("# rbf-network v1\n");
        let _ = writeln!(s, "input_dim {}", self.input_dim());
        let _ = writeln!(s, "output_dim {}", self.output_dim());
        let _ = writeln!(s, "centers {}", self.num_centers());
        let _ = writeln!(s, "spread {:.16e}", self.spread);
        fmt_row(&mut s, "bias", &mut self.bias.iter().copied());
        for j in 0..self.num_centers() {
            fmt_row(&mut s, "center", &mut self.centers.row(j).iter().copied());
        }
        for j in 0..self.num_centers() {
            fmt_row(&mut s, "weight", &mut self.weights.row(j).iter().copied());
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, RbfError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let mut next = |key: &str| -> Result<(usize, Vec<f64>), RbfError> {
            let (lineno, line) = lines.next().ok_or(RbfError::Parse {
                line: 0,
                message: format!("unexpected end of file, expected `{key}`"),
            })?;
            let mut parts = line.split_whitespace();
            if parts.next() != Some(key) {
                return Err(RbfError::Parse {
                    line: lineno,
                    message: format!("expected `{key}`"),
                });
            }
            let vals = parts
                .map(|p| {
                    p.parse::<f64>().map_err(|_| RbfError::Parse {
                        line: lineno,
                        message: format!("bad number `{p}`"),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok((lineno, vals))
        };
        let count = |(lineno, v): (usize, Vec<f64>)| -> Result<usize, RbfError> {
            match v.as_slice() {
                [x] if *x >= 0.0 && x.fract() == 0.0 => Ok(*x as usize),
                _ => Err(RbfError::Parse {
                    line: lineno,
                    message: "expected one non-negative integer".into(),
                }),
            }
        };
        let d = count(next("input_dim")?)?;
        let m = count(next("output_dim")?)?;
        let k = count(next("centers")?)?;
        let (spread_line, spread) = next("spread")?;
        let spread = match spread.as_slice() {
            [s] => *s,
            _ => {
                return Err(RbfError::Parse {
                    line: spread_line,
                    message: "expected one value".into(),
                })
            }
        };
        let sized = |(lineno, v): (usize, Vec<f64>), len: usize| -> Result<Vec<f64>, RbfError> {
            if v.len() == len {
                Ok(v)
            } else {
                Err(RbfError::Parse {
                    line: lineno,
                    message: format!("expected {len} values, found {}", v.len()),
                })
            }
        };
        let bias = sized(next("bias")?, m)?;
        let mut centers = Vec::with_capacity(k * d);
        for _ in 0..k {
            centers.extend(sized(next("center")?, d)?);
        }
        let mut weights = Vec::with_capacity(k * m);
        for _ in 0..k {
            weights.extend(sized(next("weight")?, m)?);
        }
        RbfNetwork::new(
            DMatrix::from_row_slice(k, d, &centers),
            spread,
            DMatrix::from_row_slice(k, m, &weights),
            DVector::from_vec(bias),
        )
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), RbfError> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, RbfError> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

/// Output layer of a network: one weight row per center plus a bias row.
#[derive(Debug, Clone, PartialEq)]
pub struct StageParams {
    pub weights: DMatrix<f64>,
    pub bias: DVector<f64>,
}

/// Minimum-norm least-squares solution of `a x = b` via SVD, cutting singular
/// values below `RCOND * sigma_max`.
pub fn lstsq_min_norm(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>, RbfError> {
    if a.nrows() != b.nrows() {
        return Err(RbfError::DimensionMismatch {
            expected: a.nrows(),
            actual: b.nrows(),
        });
    }
    if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
        return Err(RbfError::NonFinite("least-squares system"));
    }
    if a.ncols() == 0 {
        return Ok(DMatrix::zeros(0, b.ncols()));
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        return Ok(DMatrix::zeros(a.ncols(), b.ncols()));
    }
    svd.solve(b, RCOND * smax).map_err(RbfError::Solve)
}

/// Solves the output layer. `design` is n×(k+1): k activation columns
/// followed by a constant column for the bias. `targets` is n×m.
pub fn solve_output_weights(design: &DMatrix<f64>, targets: &DMatrix<f64>) -> Result<StageParams, RbfError> {
    if design.nrows() == 0 {
        return Err(RbfError::EmptyTrainingSet);
    }
    if design.ncols() == 0 {
        return Err(RbfError::DimensionMismatch {
            expected: 1,
            actual: 0,
        });
    }
    let params = lstsq_min_norm(design, targets)?;
    let k = design.ncols() - 1;
    Ok(StageParams {
        weights: params.rows(0, k).into_owned(),
        bias: params.row(k).transpose(),
    })
}

/// Stopping parameters: SSE goal, neuron budget and Gaussian spread.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub sse_goal: f64,
    pub max_neurons: usize,
    pub spread: f64,
}

impl TrainConfig {
    pub fn new(sse_goal: f64, max_neurons: usize, spread: f64) -> Self {
        TrainConfig {
            sse_goal,
            max_neurons,
            spread,
        }
    }

    pub fn validate(&self) -> Result<(), RbfError> {
        if self.max_neurons < 1 {
            return Err(RbfError::InvalidConfig("max_neurons must be at least 1".into()));
        }
        if !(self.spread.is_finite() && self.spread > 0.0) {
            return Err(RbfError::InvalidSpread(self.spread));
        }
        if !(self.sse_goal.is_finite() && self.sse_goal >= 0.0) {
            return Err(RbfError::InvalidConfig(format!(
                "sse_goal must be finite and non-negative, got {}",
                self.sse_goal
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    GoalReached,
    NeuronBudget,
    InputsExhausted,
}

/// Training history. Entry `k` of `sse_history` and `stages` belongs to the
/// network with `k` centers; entry 0 is the bias-only model.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainTrace {
    pub sse_history: Vec<f64>,
    pub stages: Vec<StageParams>,
    /// Indices of the training inputs chosen as centers, in order.
    pub center_indices: Vec<usize>,
    /// Final-stage predictions on the training inputs (n×m).
    pub teaching_outputs: DMatrix<f64>,
    pub stop_reason: StopReason,
}

impl TrainTrace {
    pub fn final_sse(&self) -> f64 {
        *self.sse_history.last().expect("trace always holds the bias-only stage")
    }

    pub fn num_stages(&self) -> usize {
        self.stages.len()
    }

    /// The network as it stood after `k` centers were added.
    pub fn network_at(&self, net: &RbfNetwork, k: usize) -> Option<RbfNetwork> {
        self.stages.get(k).filter(|_| k <= net.num_centers()).map(|s| net.prefix(k, s))
    }
}

/// Incremental thin QR of the design `[1, phi_1, ..., phi_k]` with `Q'Y`
/// maintained alongside. While the Frobenius bound on cond(R) stays under
/// `1/RCOND`, no singular value can be cut and the solution is `R^-1 Q'Y`
/// with `R^-1` updated in place; otherwise the solve goes through an SVD of R.
struct IncrementalLstsq<'a> {
    targets: &'a DMatrix<f64>,
    q: Vec<Vec<f64>>,
    // Upper-triangular R and R^-1, stored by column.
    r: Vec<Vec<f64>>,
    rinv: Vec<Vec<f64>>,
    r_fro2: f64,
    rinv_fro2: f64,
    well_conditioned: bool,
    // Row j holds q_j' Y.
    qty: Vec<Vec<f64>>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl<'a> IncrementalLstsq<'a> {
    fn new(targets: &'a DMatrix<f64>) -> Self {
        IncrementalLstsq {
            targets,
            q: Vec::new(),
            r: Vec::new(),
            rinv: Vec::new(),
            r_fro2: 0.0,
            rinv_fro2: 0.0,
            well_conditioned: true,
            qty: Vec::new(),
        }
    }

    fn len(&self) -> usize {
        self.q.len()
    }

    fn push_column(&mut self, a: &[f64]) {
        let k = self.len();
        let a_norm = dot(a, a).sqrt();
        let mut v = a.to_vec();
        let mut h = vec![0.0; k];
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for (j, qj) in self.q.iter().enumerate() {
                let d = dot(qj, &v);
                h[j] += d;
                for (vi, qi) in v.iter_mut().zip(qj) {
                    *vi -= d * qi;
                }
            }
        }
        let mut rho = dot(&v, &v).sqrt();
        if rho.is_nan() || rho <= DEPENDENCE_TOL * a_norm {
            rho = 0.0;
            v.iter_mut().for_each(|x| *x = 0.0);
        } else {
            v.iter_mut().for_each(|x| *x /= rho);
        }
        let qty_row = (0..self.targets.ncols())
            .map(|c| {
                self.targets
                    .column(c)
                    .iter()
                    .zip(&v)
                    .map(|(y, q)| y * q)
                    .sum()
            })
            .collect();

        if self.well_conditioned && rho > 0.0 {
            // [[R, h], [0, rho]]^-1 = [[R^-1, -R^-1 h / rho], [0, 1/rho]]
            let mut col: Vec<f64> = (0..k)
                .map(|i| (i..k).map(|j| self.rinv[j][i] * h[j]).sum::<f64>() * (-1.0 / rho))
                .collect();
            col.push(1.0 / rho);
            self.rinv_fro2 += dot(&col, &col);
            self.r_fro2 += dot(&h, &h) + rho * rho;
            self.rinv.push(col);
            self.well_conditioned = (self.r_fro2 * self.rinv_fro2).sqrt() * RCOND <= 1.0;
        } else {
            self.well_conditioned = false;
        }
        h.push(rho);
        self.r.push(h);
        self.q.push(v);
        self.qty.push(qty_row);
    }

    /// Parameters in column order, (k+1)×m.
    fn solve(&self) -> Result<Vec<Vec<f64>>, RbfError> {
        let k = self.len();
        let m = self.targets.ncols();
        if self.well_conditioned {
            return Ok((0..k)
                .map(|i| {
                    (0..m)
                        .map(|c| (i..k).map(|j| self.rinv[j][i] * self.qty[j][c]).sum())
                        .collect()
                })
                .collect());
        }
        let r = DMatrix::from_fn(k, k, |i, j| if i <= j { self.r[j][i] } else { 0.0 });
        let qty = DMatrix::from_fn(k, m, |i, c| self.qty[i][c]);
        let x = lstsq_min_norm(&r, &qty)?;
        Ok((0..k).map(|i| x.row(i).iter().copied().collect()).collect())
    }
}

fn stage_from_params(params: &[Vec<f64>], m: usize) -> StageParams {
    let k = params.len() - 1;
    StageParams {
        bias: DVector::from_vec(params[0].clone()),
        weights: DMatrix::from_fn(k, m, |j, c| params[j + 1][c]),
    }
}

/// Predictions `bias + sum_j w_j phi_j`, accumulated in center order.
fn predictions(params: &[Vec<f64>], columns: &[Vec<f64>], n: usize, m: usize) -> Vec<f64> {
    let mut p = vec![0.0; n * m];
    for i in 0..n {
        for c in 0..m {
            let mut acc = params[0][c];
            for (col, w) in columns.iter().zip(&params[1..]) {
                acc += w[c] * col[i];
            }
            p[i * m + c] = acc;
        }
    }
    p
}

/// Mean taken relative to the first value, exact for constant data.
fn shifted_mean<'a>(values: impl Iterator<Item = &'a f64> + Clone) -> f64 {
    let mut it = values.clone();
    let Some(&first) = it.next() else { return 0.0 };
    let count = values.clone().count() as f64;
    first + values.map(|v| v - first).sum::<f64>() / count
}

/// Trains a network on `inputs` (n×d) against `targets` (n×m).
pub fn train(
    inputs: &DMatrix<f64>,
    targets: &DMatrix<f64>,
    config: &TrainConfig,
) -> Result<(RbfNetwork, TrainTrace), RbfError> {
    config.validate()?;
    let n = inputs.nrows();
    let d = inputs.ncols();
    let m = targets.ncols();
    if n == 0 {
        return Err(RbfError::EmptyTrainingSet);
    }
    if targets.nrows() != n {
        return Err(RbfError::DimensionMismatch {
            expected: n,
            actual: targets.nrows(),
        });
    }
    if d == 0 || m == 0 {
        return Err(RbfError::DimensionMismatch {
            expected: 1,
            actual: 0,
        });
    }
    if inputs.iter().any(|v| !v.is_finite()) {
        return Err(RbfError::NonFinite("inputs"));
    }
    if targets.iter().any(|v| !v.is_finite()) {
        return Err(RbfError::NonFinite("targets"));
    }

    let mut solver = IncrementalLstsq::new(targets);
    solver.push_column(&vec![1.0; n]);
    // The bias-only model is the column mean, taken directly rather than via Q'Y.
    let mut params: Vec<Vec<f64>> = vec![(0..m).map(|c| shifted_mean(targets.column(c).iter())).collect()];
    let mut columns: Vec<Vec<f64>> = Vec::new();
    let mut chosen = vec![false; n];
    let mut center_indices = Vec::new();

    let mut preds = predictions(&params, &columns, n, m);
    let residual_stats = |preds: &[f64]| {
        let mut sse = 0.0;
        let mut row_norms = vec![0.0; n];
        for i in 0..n {
            for c in 0..m {
                let r = targets[(i, c)] - preds[i * m + c];
                row_norms[i] += r * r;
            }
            sse += row_norms[i];
        }
        (sse, row_norms)
    };
    let (mut sse, mut row_norms) = residual_stats(&preds);
    let mut sse_history = vec![sse];
    let mut stages = vec![stage_from_params(&params, m)];

    let stop_reason = loop {
        if sse <= config.sse_goal {
            break StopReason::GoalReached;
        }
        if center_indices.len() >= config.max_neurons {
            break StopReason::NeuronBudget;
        }
        // largest residual norm, lowest index on ties
        let mut pick: Option<usize> = None;
        for i in 0..n {
            if !chosen[i] && pick.is_none_or(|p| row_norms[i] > row_norms[p]) {
                pick = Some(i);
            }
        }
        let Some(idx) = pick else {
            break StopReason::InputsExhausted;
        };
        chosen[idx] = true;
        center_indices.push(idx);

        let center: Vec<f64> = inputs.row(idx).iter().copied().collect();
        let center_m = DMatrix::from_row_slice(1, d, &center);
        let column: Vec<f64> = (0..n)
            .map(|i| activation(distance_to(&center_m, 0, inputs.row(i).iter().copied()), config.spread))
            .collect();
        solver.push_column(&column);
        columns.push(column);

        let candidate = solver.solve()?;
        let candidate_preds = predictions(&candidate, &columns, n, m);
        let (candidate_sse, candidate_norms) = residual_stats(&candidate_preds);
        if candidate_sse <= sse {
            params = candidate;
            preds = candidate_preds;
            sse = candidate_sse;
            row_norms = candidate_norms;
        } else {
            // Rounding made the re-solve worse than keeping the previous
            // layer with a zero weight on the new unit.
            params.push(vec![0.0; m]);
        }
        sse_history.push(sse);
        stages.push(stage_from_params(&params, m));
    };

    let k = center_indices.len();
    let centers = DMatrix::from_fn(k, d, |j, c| inputs[(center_indices[j], c)]);
    let last = stages.last().expect("at least the bias-only stage");
    let net = RbfNetwork::new(centers, config.spread, last.weights.clone(), last.bias.clone())?;
    let teaching_outputs = DMatrix::from_row_slice(n, m, &preds);
    Ok((
        net,
        TrainTrace {
            sse_history,
            stages,
            center_indices,
            teaching_outputs,
            stop_reason,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn activation_values() {
        assert_eq!(gaussian_activation(0.0, 3.0).unwrap(), 1.0);
        assert!((gaussian_activation(2.5, 2.5).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        assert!((gaussian_activation(2.0, 1.0).unwrap() - 0.018_315_638_888_734_18).abs() < 1e-15);
    }

    #[test]
    fn activation_rejects_bad_spread() {
        assert!(matches!(gaussian_activation(1.0, 0.0), Err(RbfError::InvalidSpread(_))));
        assert!(matches!(gaussian_activation(1.0, -1.0), Err(RbfError::InvalidSpread(_))));
        assert!(gaussian_activation(-1.0, 1.0).is_err());
    }

    #[test]
    fn empty_hidden_layer_returns_bias() {
        let net = RbfNetwork::bias_only(2, 1.0, DVector::from_vec(vec![1.5, -2.0])).unwrap();
        assert_eq!(net.forward(&[10.0, -3.0]).unwrap(), vec![1.5, -2.0]);
    }

    #[test]
    fn on_center_output_is_weight_row() {
        let net = RbfNetwork::new(
            DMatrix::from_row_slice(1, 2, &[0.3, 0.7]),
            0.5,
            DMatrix::from_row_slice(1, 3, &[1.0, -2.0, 4.0]),
            DVector::zeros(3),
        )
        .unwrap();
        assert_eq!(net.forward(&[0.3, 0.7]).unwrap(), vec![1.0, -2.0, 4.0]);
    }

    #[test]
    fn forward_dimension_mismatch() {
        let net = RbfNetwork::bias_only(2, 1.0, DVector::zeros(1)).unwrap();
        assert!(matches!(net.forward(&[1.0]), Err(RbfError::DimensionMismatch { .. })));
    }

    #[test]
    fn identity_design() {
        let design = DMatrix::<f64>::identity(3, 3);
        let targets = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let out = solve_output_weights(&design, &targets).unwrap();
        assert_eq!(out.weights, DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]));
        assert_eq!(out.bias, DVector::from_vec(vec![5.0, 6.0]));
    }

    #[test]
    fn collinear_design_is_finite_and_minimum_norm() {
        // activation column identical to the bias column
        let design = DMatrix::from_element(4, 2, 1.0);
        let targets = DMatrix::from_column_slice(4, 1, &[1.0, 2.0, 3.0, 6.0]);
        let out = solve_output_weights(&design, &targets).unwrap();
        // mean is 3, split evenly between the two identical columns
        assert!((out.weights[(0, 0)] - 1.5).abs() < 1e-12);
        assert!((out.bias[0] - 1.5).abs() < 1e-12);
    }

    #[test]
    fn non_finite_design_rejected() {
        let mut design = DMatrix::from_element(2, 2, 1.0);
        design[(0, 0)] = f64::NAN;
        let targets = DMatrix::zeros(2, 1);
        assert!(matches!(solve_output_weights(&design, &targets), Err(RbfError::NonFinite(_))));
    }

    #[test]
    fn constant_targets_need_no_centers() {
        let inputs = DMatrix::from_fn(20, 1, |i, _| i as f64 / 19.0);
        let targets = DMatrix::from_fn(20, 3, |_, c| [4.0, -1.25, 0.1][c]);
        let (net, trace) = train(&inputs, &targets, &TrainConfig::new(0.0, 10, 0.1)).unwrap();
        assert_eq!(net.num_centers(), 0);
        assert_eq!(trace.stop_reason, StopReason::GoalReached);
        assert!(trace.final_sse() <= 1e-18);
    }

    #[test]
    fn budget_exhausted_inputs() {
        let inputs = DMatrix::from_column_slice(3, 1, &[0.0, 0.5, 1.0]);
        let targets = DMatrix::from_column_slice(3, 1, &[0.0, 1.0, 0.0]);
        let (net, trace) = train(&inputs, &targets, &TrainConfig::new(0.0, 10, 1e-3)).unwrap();
        assert!(net.num_centers() <= 3);
        assert!(matches!(
            trace.stop_reason,
            StopReason::InputsExhausted | StopReason::GoalReached
        ));
    }

    #[test]
    fn duplicate_inputs_do_not_break_training() {
        let inputs = DMatrix::from_column_slice(6, 1, &[0.0, 0.0, 0.5, 0.5, 1.0, 1.0]);
        let targets = DMatrix::from_column_slice(6, 1, &[1.0, 1.2, -0.3, -0.1, 0.8, 0.9]);
        let (net, trace) = train(&inputs, &targets, &TrainConfig::new(0.0, 10, 0.3)).unwrap();
        assert_eq!(trace.stop_reason, StopReason::InputsExhausted);
        assert!(net.weights().iter().all(|w| w.is_finite()));
        for w in trace.sse_history.windows(2) {
            assert!(w[1] <= w[0]);
        }
        // best achievable: the per-pair means
        let best = 2.0 * (0.1f64.powi(2) + 0.1f64.powi(2) + 0.05f64.powi(2));
        assert!((trace.final_sse() - best).abs() < 1e-9);
    }

    #[test]
    fn first_center_is_max_residual_lowest_index() {
        let inputs = DMatrix::from_column_slice(4, 1, &[0.0, 1.0, 2.0, 3.0]);
        // mean is 0, so inputs 0 and 1 tie on the largest residual
        let targets = DMatrix::from_column_slice(4, 1, &[2.0, -2.0, 1.0, -1.0]);
        let (_, trace) = train(&inputs, &targets, &TrainConfig::new(0.0, 1, 0.5)).unwrap();
        assert_eq!(trace.center_indices, vec![0]);
        assert_eq!(trace.stop_reason, StopReason::NeuronBudget);
    }

    #[test]
    fn rejects_bad_inputs() {
        let cfg = TrainConfig::new(0.0, 3, 1.0);
        let empty = DMatrix::<f64>::zeros(0, 1);
        assert!(matches!(train(&empty, &empty, &cfg), Err(RbfError::EmptyTrainingSet)));
        let mut x = DMatrix::from_element(3, 1, 1.0);
        x[(1, 0)] = f64::INFINITY;
        assert!(matches!(
            train(&x, &DMatrix::zeros(3, 1), &cfg),
            Err(RbfError::NonFinite(_))
        ));
        let x = DMatrix::from_element(3, 1, 1.0);
        assert!(train(&x, &DMatrix::zeros(3, 1), &TrainConfig::new(0.0, 0, 1.0)).is_err());
        assert!(train(&x, &DMatrix::zeros(3, 1), &TrainConfig::new(-1.0, 2, 1.0)).is_err());
    }

    #[test]
    fn text_round_trip_is_exact() {
        let net = RbfNetwork::new(
            DMatrix::from_row_slice(2, 1, &[0.1, 1.0 / 3.0]),
            0.07,
            DMatrix::from_row_slice(2, 3, &[1.0, 2.0, std::f64::consts::PI, -4.0, 5e-300, 6.0]),
            DVector::from_vec(vec![0.5, -0.25, 1e10]),
        )
        .unwrap();
        let back = RbfNetwork::from_text(&net.to_text()).unwrap();
        assert_eq!(back, net);
    }

    #[test]
    fn truncated_network_file() {
        let net = RbfNetwork::bias_only(1, 1.0, DVector::zeros(2)).unwrap();
        let text = net.to_text().replace("bias", "bais");
        assert!(matches!(RbfNetwork::from_text(&text), Err(RbfError::Parse { .. })));
    }
}

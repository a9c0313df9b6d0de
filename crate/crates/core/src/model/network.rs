use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Layer, ModelInput, ModelKind, ModelSpec, Weights};
use crate::linalg::{CsrMatrix, Dense};

pub(crate) fn init_weights(
    spec: &ModelSpec,
    input_dim: usize,
    classes: usize,
    rng: &mut ChaCha8Rng,
) -> Weights {
    let dims: Vec<(usize, usize)> = match spec.kind {
        ModelKind::Sgc => vec![(input_dim, classes)],
        ModelKind::Mlp | ModelKind::Gcn => {
            vec![(input_dim, spec.hidden_size), (spec.hidden_size, classes)]
        }
    };
    let layers = dims
        .into_iter()
        .map(|(fan_in, fan_out)| {
            let bound = 1.0 / (fan_in.max(1) as f64).sqrt();
            let data = (0..fan_in * fan_out)
                .map(|_| rng.random_range(-bound..bound))
                .collect();
            Layer {
                weight: Dense::from_vec(fan_in, fan_out, data),
                bias: vec![0.0; fan_out],
            }
        })
        .collect();
    Weights { layers }
}

/// Intermediate values kept for the backward pass.
pub(crate) struct Forward {
    /// Hidden pre-activation (two-layer models).
    pre_activation: Option<Dense>,
    /// Hidden activation after ReLU and dropout.
    hidden: Option<Dense>,
    /// Inverted-dropout multipliers, same shape as `hidden`.
    mask: Option<Vec<f64>>,
    pub logits: Dense,
}

fn maybe_propagate(adj: Option<&CsrMatrix>, m: Dense) -> Dense {
    match adj {
        Some(a) => a.matmul_dense(&m),
        None => m,
    }
}

/// Runs the network. `dropout` supplies the RNG and rate in training mode.
pub(crate) fn forward(
    weights: &Weights,
    input: &ModelInput,
    dropout: Option<(&mut ChaCha8Rng, f64)>,
) -> Forward {
    let adj = input.adjacency.as_ref();
    match weights.layers.as_slice() {
        [only] => {
            let mut logits = input.features.matmul_dense(&only.weight);
            logits.add_row_vector(&only.bias);
            Forward {
                pre_activation: None,
                hidden: None,
                mask: None,
                logits,
            }
        }
        [first, second] => {
            let mut pre = maybe_propagate(adj, input.features.matmul_dense(&first.weight));
            pre.add_row_vector(&first.bias);
            let mut hidden = pre.clone();
            hidden.as_mut_slice().iter_mut().for_each(|x| *x = x.max(0.0));
            let mask = match dropout {
                Some((rng, p)) if p > 0.0 => {
                    let keep = 1.0 / (1.0 - p);
                    let mask: Vec<f64> = (0..hidden.as_slice().len())
                        .map(|_| if rng.random::<f64>() < p { 0.0 } else { keep })
                        .collect();
                    for (h, m) in hidden.as_mut_slice().iter_mut().zip(&mask) {
                        *h *= m;
                    }
                    Some(mask)
                }
                _ => None,
            };
            let mut logits = maybe_propagate(adj, hidden.matmul(&second.weight));
            logits.add_row_vector(&second.bias);
            Forward {
                pre_activation: Some(pre),
                hidden: Some(hidden),
                mask,
                logits,
            }
        }
        _ => unreachable!("networks have one or two layers"),
    }
}

pub(crate) fn softmax_rows(logits: &Dense) -> Dense {
    let mut out = logits.clone();
    for r in 0..out.rows() {
        let row = out.row_mut(r);
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for x in row.iter_mut() {
            *x = (*x - max).exp();
            sum += *x;
        }
        row.iter_mut().for_each(|x| *x /= sum);
    }
    out
}

pub(crate) fn argmax_rows(m: &Dense) -> Vec<usize> {
    (0..m.rows())
        .map(|r| {
            let row = m.row(r);
            let mut best = 0;
            for (c, &v) in row.iter().enumerate() {
                if v > row[best] {
                    best = c;
                }
            }
            best
        })
        .collect()
}

/// Mean cross-entropy over `targets` plus `0.5·wd·Σ||W||²`, and the
/// gradient with respect to every parameter.
pub(crate) fn loss_and_grad(
    weights: &Weights,
    input: &ModelInput,
    targets: &[(usize, usize)],
    weight_decay: f64,
    dropout: Option<(&mut ChaCha8Rng, f64)>,
) -> (f64, Weights) {
    let fwd = forward(weights, input, dropout);
    let n = fwd.logits.rows();
    let k = fwd.logits.cols();
    let scale = 1.0 / targets.len() as f64;

    // dL/dlogits, non-zero only on target rows
    let mut g = Dense::zeros(n, k);
    let mut loss = 0.0;
    for &(node, label) in targets {
        let row = fwd.logits.row(node);
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = row.iter().map(|x| (x - max).exp()).sum();
        let log_z = max + sum.ln();
        loss -= row[label] - log_z;
        let out = g.row_mut(node);
        for (o, &x) in out.iter_mut().zip(row) {
            *o = (x - log_z).exp() * scale;
        }
        out[label] -= scale;
    }
    loss *= scale;
    loss += 0.5 * weight_decay * weights.weight_norm_sq();

    let adj = input.adjacency.as_ref();
    let mut grads = weights.zeros_like();
    match weights.layers.as_slice() {
        [only] => {
            let mut dw = input.features.t_matmul_dense(&g);
            add_decay(&mut dw, &only.weight, weight_decay);
            grads.layers[0] = Layer {
                weight: dw,
                bias: g.column_sums(),
            };
        }
        [first, second] => {
            let hidden = fwd.hidden.as_ref().unwrap();
            let pre = fwd.pre_activation.as_ref().unwrap();
            // the output bias is added after propagation
            let db2 = g.column_sums();
            // Â is symmetric, so Âᵀ·G = Â·G
            let d_out = maybe_propagate(adj, g);
            let mut dw2 = hidden.t_matmul(&d_out);
            add_decay(&mut dw2, &second.weight, weight_decay);

            let mut d_hidden = d_out.matmul_t(&second.weight);
            if let Some(mask) = &fwd.mask {
                for (d, m) in d_hidden.as_mut_slice().iter_mut().zip(mask) {
                    *d *= m;
                }
            }
            for (d, &p) in d_hidden.as_mut_slice().iter_mut().zip(pre.as_slice()) {
                if p <= 0.0 {
                    *d = 0.0;
                }
            }
            let db1 = d_hidden.column_sums();
            let d_in = maybe_propagate(adj, d_hidden);
            let mut dw1 = input.features.t_matmul_dense(&d_in);
            add_decay(&mut dw1, &first.weight, weight_decay);
            grads.layers[0] = Layer {
                weight: dw1,
                bias: db1,
            };
            grads.layers[1] = Layer {
                weight: dw2,
                bias: db2,
            };
        }
        _ => unreachable!("networks have one or two layers"),
    }
    (loss, grads)
}

fn add_decay(grad: &mut Dense, weight: &Dense, decay: f64) {
    if decay == 0.0 {
        return;
    }
    for (g, w) in grad.as_mut_slice().iter_mut().zip(weight.as_slice()) {
        *g += decay * w;
    }
}

/// Adaptive moment estimation.
pub(crate) struct Adam {
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    step: i32,
    m: Weights,
    v: Weights,
}

impl Adam {
    pub fn new(weights: &Weights, lr: f64) -> Self {
        Self {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            step: 0,
            m: weights.zeros_like(),
            v: weights.zeros_like(),
        }
    }

    pub fn update(&mut self, weights: &mut Weights, grads: &Weights) {
        self.step += 1;
        let c1 = 1.0 - self.beta1.powi(self.step);
        let c2 = 1.0 - self.beta2.powi(self.step);
        let (b1, b2, lr, eps) = (self.beta1, self.beta2, self.lr, self.eps);
        for (((w, g), m), v) in weights
            .slices_mut()
            .into_iter()
            .zip(grads.slices())
            .zip(self.m.slices_mut())
            .zip(self.v.slices_mut())
        {
            for i in 0..w.len() {
                m[i] = b1 * m[i] + (1.0 - b1) * g[i];
                v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
                let m_hat = m[i] / c1;
                let v_hat = v[i] / c2;
                w[i] -= lr * m_hat / (v_hat.sqrt() + eps);
            }
        }
    }
}

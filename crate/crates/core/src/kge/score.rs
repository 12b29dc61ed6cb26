use super::params::{
    ModelParameters, CONV_ENTITY_BIAS, CONV_FILTERS, CONV_FILTER_BIAS, CONV_PROJECTION, ENT, REL, SIMPLE_REL,
    SIMPLE_REL_INV, SIMPLE_TAIL,
};
use super::{KgeError, ModelKind};

/// Dense gradient accumulator with the same layout as the parameters, plus
/// the list of rows written since the last [`GradBuffer::clear`].
#[derive(Debug, Clone)]
pub struct GradBuffer {
    data: Vec<Vec<f64>>,
    cols: Vec<usize>,
    touched_flag: Vec<Vec<bool>>,
    touched: Vec<Vec<usize>>,
}

impl GradBuffer {
    pub fn new(params: &ModelParameters) -> Self {
        GradBuffer {
            data: params.tables.iter().map(|t| vec![0.0; t.data.len()]).collect(),
            cols: params.tables.iter().map(|t| t.cols).collect(),
            touched_flag: params.tables.iter().map(|t| vec![false; t.rows]).collect(),
            touched: vec![Vec::new(); params.tables.len()],
        }
    }

    pub fn clear(&mut self) {
        for (k, rows) in self.touched.iter_mut().enumerate() {
            let cols = self.cols[k];
            for &i in rows.iter() {
                self.data[k][i * cols..(i + 1) * cols].fill(0.0);
                self.touched_flag[k][i] = false;
            }
            rows.clear();
        }
    }

    pub fn row_mut(&mut self, table: usize, row: usize) -> &mut [f64] {
        if !self.touched_flag[table][row] {
            self.touched_flag[table][row] = true;
            self.touched[table].push(row);
        }
        let cols = self.cols[table];
        &mut self.data[table][row * cols..(row + 1) * cols]
    }

    pub fn row(&self, table: usize, row: usize) -> &[f64] {
        let cols = self.cols[table];
        &self.data[table][row * cols..(row + 1) * cols]
    }

    /// Dense gradient of one table.
    pub fn table(&self, table: usize) -> &[f64] {
        &self.data[table]
    }

    /// Rows of `table` written since the last clear, in first-touch order.
    pub fn touched(&self, table: usize) -> &[usize] {
        &self.touched[table]
    }

    pub fn n_tables(&self) -> usize {
        self.data.len()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn trilinear(a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    a.iter().zip(b).zip(c).map(|((x, y), z)| x * y * z).sum()
}

/// `Σ (hᵢ·tᵢ)·rᵢ`; the head-tail product comes first so the score is exactly
/// symmetric under swapping `h` and `t`.
fn distmult(h: &[f64], r: &[f64], t: &[f64]) -> f64 {
    h.iter().zip(t).zip(r).map(|((x, z), y)| x * z * y).sum()
}

fn axpy(out: &mut [f64], c: f64, x: &[f64]) {
    out.iter_mut().zip(x).for_each(|(o, v)| *o += c * v);
}

/// `out += c · (a ∘ b)`
fn add_hadamard(out: &mut [f64], c: f64, a: &[f64], b: &[f64]) {
    out.iter_mut().zip(a).zip(b).for_each(|((o, x), y)| *o += c * x * y);
}

fn complex_score(h: &[f64], r: &[f64], t: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in (0..h.len()).step_by(2) {
        let (hr, hi, rr, ri, tr, ti) = (h[i], h[i + 1], r[i], r[i + 1], t[i], t[i + 1]);
        s += hr * tr * rr + hi * ti * rr + hr * ti * ri - hi * tr * ri;
    }
    s
}

/// Forward pass of the ConvE feature extractor for one `(h, r)` query.
struct ConvForward {
    input: Vec<f64>,
    pre: Vec<f64>,
    features: Vec<f64>,
    hidden: Vec<f64>,
}

fn conv_forward(p: &ModelParameters, h: usize, r: usize) -> ConvForward {
    let shape = p.conv_shape();
    let (rows, cols, k) = (shape.rows, shape.cols, shape.kernel);
    let (oh, ow) = (shape.out_rows(), shape.out_cols());
    let mut input = Vec::with_capacity(2 * p.dim);
    input.extend_from_slice(p.tables[ENT].row(h));
    input.extend_from_slice(p.tables[REL].row(r));
    debug_assert_eq!(input.len(), 2 * rows * cols);

    let filters = &p.tables[CONV_FILTERS];
    let bias = &p.tables[CONV_FILTER_BIAS].data;
    let mut pre = vec![0.0; shape.features()];
    for f in 0..shape.filters {
        let kern = filters.row(f);
        for i in 0..oh {
            for j in 0..ow {
                let mut acc = bias[f];
                for a in 0..k {
                    let base = (i + a) * cols + j;
                    for b in 0..k {
                        acc += kern[a * k + b] * input[base + b];
                    }
                }
                pre[(f * oh + i) * ow + j] = acc;
            }
        }
    }
    let features: Vec<f64> = pre.iter().map(|&x| x.max(0.0)).collect();
    let projection = &p.tables[CONV_PROJECTION];
    let mut hidden = vec![0.0; p.dim];
    for (q, &z) in features.iter().enumerate() {
        if z > 0.0 {
            axpy(&mut hidden, z, projection.row(q));
        }
    }
    ConvForward {
        input,
        pre,
        features,
        hidden,
    }
}

fn raw_score(p: &ModelParameters, h: usize, r: usize, t: usize) -> f64 {
    match p.kind {
        ModelKind::TransE => {
            let (eh, er, et) = (p.tables[ENT].row(h), p.tables[REL].row(r), p.tables[ENT].row(t));
            -eh.iter()
                .zip(er)
                .zip(et)
                .map(|((a, b), c)| (a + b - c).powi(2))
                .sum::<f64>()
                .sqrt()
        }
        ModelKind::DistMult => distmult(p.tables[ENT].row(h), p.tables[REL].row(r), p.tables[ENT].row(t)),
        ModelKind::ComplEx => complex_score(p.tables[ENT].row(h), p.tables[REL].row(r), p.tables[ENT].row(t)),
        ModelKind::SimplE => {
            let (head, tail) = (&p.tables[ENT], &p.tables[SIMPLE_TAIL]);
            0.5 * (trilinear(head.row(h), p.tables[SIMPLE_REL].row(r), tail.row(t))
                + trilinear(head.row(t), p.tables[SIMPLE_REL_INV].row(r), tail.row(h)))
        }
        ModelKind::ConvE => {
            let fwd = conv_forward(p, h, r);
            dot(&fwd.hidden, p.tables[ENT].row(t)) + p.tables[CONV_ENTITY_BIAS].data[t]
        }
    }
}

/// Plausibility of `(h, r, t)`; higher is more plausible.
pub fn score(params: &ModelParameters, h: usize, r: usize, t: usize) -> Result<f64, KgeError> {
    params.check_triple(h, r, t)?;
    Ok(raw_score(params, h, r, t))
}

/// Scores of `(h, r, e)` for every entity `e`, in index order.
pub fn score_tails(params: &ModelParameters, h: usize, r: usize) -> Result<Vec<f64>, KgeError> {
    params.check_triple(h, r, 0)?;
    let n = params.n_entities;
    let ent = &params.tables[ENT];
    Ok(match params.kind {
        ModelKind::TransE => {
            let q: Vec<f64> = ent
                .row(h)
                .iter()
                .zip(params.tables[REL].row(r))
                .map(|(a, b)| a + b)
                .collect();
            (0..n)
                .map(|t| {
                    -q.iter()
                        .zip(ent.row(t))
                        .map(|(a, c)| (a - c).powi(2))
                        .sum::<f64>()
                        .sqrt()
                })
                .collect()
        }
        ModelKind::DistMult => {
            let (eh, er) = (ent.row(h), params.tables[REL].row(r));
            (0..n).map(|t| distmult(eh, er, ent.row(t))).collect()
        }
        ModelKind::ConvE => {
            let fwd = conv_forward(params, h, r);
            let bias = &params.tables[CONV_ENTITY_BIAS].data;
            (0..n).map(|t| dot(&fwd.hidden, ent.row(t)) + bias[t]).collect()
        }
        ModelKind::ComplEx | ModelKind::SimplE => (0..n).map(|t| raw_score(params, h, r, t)).collect(),
    })
}

/// Adds `coeff · ∂score/∂θ` into `grad` and returns the score.
pub(crate) fn accumulate_gradient(
    p: &ModelParameters,
    h: usize,
    r: usize,
    t: usize,
    coeff: f64,
    grad: &mut GradBuffer,
) -> f64 {
    match p.kind {
        ModelKind::TransE => {
            let (eh, er, et) = (p.tables[ENT].row(h), p.tables[REL].row(r), p.tables[ENT].row(t));
            let diff: Vec<f64> = eh.iter().zip(er).zip(et).map(|((a, b), c)| a + b - c).collect();
            let norm = diff.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                // ∂(-‖v‖)/∂v = -v/‖v‖; the subgradient at v = 0 is taken as 0.
                let c = coeff / norm;
                axpy(grad.row_mut(ENT, h), -c, &diff);
                axpy(grad.row_mut(REL, r), -c, &diff);
                axpy(grad.row_mut(ENT, t), c, &diff);
            } else {
                grad.row_mut(ENT, h);
                grad.row_mut(REL, r);
                grad.row_mut(ENT, t);
            }
            -norm
        }
        ModelKind::DistMult => {
            let (eh, er, et) = (p.tables[ENT].row(h), p.tables[REL].row(r), p.tables[ENT].row(t));
            add_hadamard(grad.row_mut(ENT, h), coeff, er, et);
            add_hadamard(grad.row_mut(REL, r), coeff, eh, et);
            add_hadamard(grad.row_mut(ENT, t), coeff, eh, er);
            distmult(eh, er, et)
        }
        ModelKind::ComplEx => {
            let (eh, er, et) = (p.tables[ENT].row(h), p.tables[REL].row(r), p.tables[ENT].row(t));
            let len = eh.len();
            let (mut gh, mut gr, mut gt) = (vec![0.0; len], vec![0.0; len], vec![0.0; len]);
            for i in (0..len).step_by(2) {
                let (hr, hi, rr, ri, tr, ti) = (eh[i], eh[i + 1], er[i], er[i + 1], et[i], et[i + 1]);
                gh[i] = rr * tr + ri * ti;
                gh[i + 1] = rr * ti - ri * tr;
                gr[i] = hr * tr + hi * ti;
                gr[i + 1] = hr * ti - hi * tr;
                gt[i] = hr * rr - hi * ri;
                gt[i + 1] = hi * rr + hr * ri;
            }
            axpy(grad.row_mut(ENT, h), coeff, &gh);
            axpy(grad.row_mut(REL, r), coeff, &gr);
            axpy(grad.row_mut(ENT, t), coeff, &gt);
            complex_score(eh, er, et)
        }
        ModelKind::SimplE => {
            let (head, tail) = (&p.tables[ENT], &p.tables[SIMPLE_TAIL]);
            let (rel, inv) = (p.tables[SIMPLE_REL].row(r), p.tables[SIMPLE_REL_INV].row(r));
            let (hh, tt, ht, th) = (head.row(h), tail.row(t), head.row(t), tail.row(h));
            let c = 0.5 * coeff;
            add_hadamard(grad.row_mut(ENT, h), c, rel, tt);
            add_hadamard(grad.row_mut(SIMPLE_REL, r), c, hh, tt);
            add_hadamard(grad.row_mut(SIMPLE_TAIL, t), c, hh, rel);
            add_hadamard(grad.row_mut(ENT, t), c, inv, th);
            add_hadamard(grad.row_mut(SIMPLE_REL_INV, r), c, ht, th);
            add_hadamard(grad.row_mut(SIMPLE_TAIL, h), c, ht, inv);
            0.5 * (trilinear(hh, rel, tt) + trilinear(ht, inv, th))
        }
        ModelKind::ConvE => conve_gradient(p, h, r, t, coeff, grad),
    }
}

fn conve_gradient(p: &ModelParameters, h: usize, r: usize, t: usize, coeff: f64, grad: &mut GradBuffer) -> f64 {
    let shape = p.conv_shape();
    let (cols, k) = (shape.cols, shape.kernel);
    let (oh, ow) = (shape.out_rows(), shape.out_cols());
    let fwd = conv_forward(p, h, r);
    let et = p.tables[ENT].row(t);
    let s = dot(&fwd.hidden, et) + p.tables[CONV_ENTITY_BIAS].data[t];

    axpy(grad.row_mut(ENT, t), coeff, &fwd.hidden);
    grad.row_mut(CONV_ENTITY_BIAS, t)[0] += coeff;

    let projection = &p.tables[CONV_PROJECTION];
    let mut delta = vec![0.0; fwd.pre.len()];
    for (q, &z) in fwd.features.iter().enumerate() {
        if z > 0.0 {
            axpy(grad.row_mut(CONV_PROJECTION, q), coeff * z, et);
            delta[q] = coeff * dot(projection.row(q), et);
        }
    }

    let filters = &p.tables[CONV_FILTERS];
    let mut d_input = vec![0.0; fwd.input.len()];
    for f in 0..shape.filters {
        let kern = filters.row(f);
        let mut d_kern = vec![0.0; k * k];
        let mut d_bias = 0.0;
        for i in 0..oh {
            for j in 0..ow {
                let d = delta[(f * oh + i) * ow + j];
                if d == 0.0 {
                    continue;
                }
                d_bias += d;
                for a in 0..k {
                    let base = (i + a) * cols + j;
                    for b in 0..k {
                        d_kern[a * k + b] += d * fwd.input[base + b];
                        d_input[base + b] += d * kern[a * k + b];
                    }
                }
            }
        }
        axpy(grad.row_mut(CONV_FILTERS, f), 1.0, &d_kern);
        grad.row_mut(CONV_FILTER_BIAS, f)[0] += d_bias;
    }
    let (d_head, d_rel) = d_input.split_at(p.dim);
    axpy(grad.row_mut(ENT, h), 1.0, d_head);
    axpy(grad.row_mut(REL, r), 1.0, d_rel);
    s
}

/// Analytic gradient of the score with respect to every parameter. Rows the
/// triple does not touch stay zero.
pub fn score_gradient(params: &ModelParameters, h: usize, r: usize, t: usize) -> Result<GradBuffer, KgeError> {
    params.check_triple(h, r, t)?;
    let mut grad = GradBuffer::new(params);
    accumulate_gradient(params, h, r, t, 1.0, &mut grad);
    Ok(grad)
}

/// Smallest absolute ConvE pre-activation for `(h, r)`; gradient checks skip
/// draws that sit on a rectifier kink.
pub fn conve_min_preactivation(params: &ModelParameters, h: usize, r: usize) -> f64 {
    conv_forward(params, h, r)
        .pre
        .iter()
        .fold(f64::INFINITY, |m, x| m.min(x.abs()))
}

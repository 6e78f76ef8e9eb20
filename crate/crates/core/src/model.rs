//! The semantic matching energy function.
//!
//! Every symbol (entity or relation type) owns one row of an
//! [`EmbeddingTable`]. A triple `(lhs, rel, rhs)` is scored by mapping the
//! left and right arguments into a relation-dependent space with `g_left` and
//! `g_right` and matching the two results with a dot product:
//!
//! ```text
//! E(lhs, rel, rhs) = -( g_left(e_lhs, e_rel) · g_right(e_rhs, e_rel) )
//! ```
//!
//! Lower energy means a more plausible triple; ranking scores are `-E`.
//!
//! Two parametrizations of `g` are provided. The linear form is an affine
//! layer over the concatenated `(entity, relation)` embeddings; the bilinear
//! form contracts a `(p, d, d)` tensor with the relation embedding along
//! mode 3 and applies the resulting `p × d` matrix to the entity embedding.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{check_len, Error, Result};
use crate::tensor::{
    self, dot_unchecked, matvec_into, matvec_transposed, mode3_contract, Matrix, Tensor3,
};

pub type SymbolId = usize;

/// A directed edge `(lhs, rel, rhs)` of the multi-relational graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub lhs: SymbolId,
    pub rel: SymbolId,
    pub rhs: SymbolId,
}

impl Triple {
    pub const fn new(lhs: SymbolId, rel: SymbolId, rhs: SymbolId) -> Self {
        Self { lhs, rel, rhs }
    }
}

/// Which parametrization of the `g` functions a model uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Form {
    Linear,
    Bilinear,
}

impl Form {
    pub fn name(self) -> &'static str {
        match self {
            Form::Linear => "linear",
            Form::Bilinear => "bilinear",
        }
    }
}

impl core::str::FromStr for Form {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Form::Linear),
            "bilinear" => Ok(Form::Bilinear),
            other => Err(Error::Config(alloc::format!(
                "unknown model form `{other}` (expected linear or bilinear)"
            ))),
        }
    }
}

impl core::fmt::Display for Form {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

// ---------------------------------------------------------------------------
// Embeddings
// ---------------------------------------------------------------------------

/// One `d`-dimensional vector per dictionary symbol.
///
/// Entities and relation types share the table; `relations` marks which ids
/// are relation types.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    vectors: Matrix,
    relations: Vec<bool>,
}

impl EmbeddingTable {
    pub fn zeros(dim: usize, relations: Vec<bool>) -> Self {
        Self {
            vectors: Matrix::zeros(relations.len(), dim),
            relations,
        }
    }

    pub fn from_matrix(vectors: Matrix, relations: Vec<bool>) -> Result<Self> {
        check_len(
            "EmbeddingTable::from_matrix",
            vectors.rows(),
            relations.len(),
        )?;
        Ok(Self { vectors, relations })
    }

    /// Entries i.i.d. uniform in `[-1/√d, 1/√d]`.
    pub fn random<R: Rng + ?Sized>(dim: usize, relations: Vec<bool>, rng: &mut R) -> Self {
        let bound = init_bound(dim);
        let vectors = Matrix::from_fn(relations.len(), dim, |_, _| rng.gen_range(-bound..=bound));
        Self { vectors, relations }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.vectors.cols()
    }

    pub fn is_relation(&self, id: SymbolId) -> bool {
        self.relations.get(id).copied().unwrap_or(false)
    }

    pub fn relation_flags(&self) -> &[bool] {
        &self.relations
    }

    pub fn row(&self, id: SymbolId) -> Result<&[f64]> {
        self.check_id(id)?;
        Ok(self.vectors.row(id))
    }

    pub fn row_mut(&mut self, id: SymbolId) -> Result<&mut [f64]> {
        self.check_id(id)?;
        Ok(self.vectors.row_mut(id))
    }

    pub fn matrix(&self) -> &Matrix {
        &self.vectors
    }

    pub fn check_id(&self, id: SymbolId) -> Result<()> {
        if id < self.len() {
            Ok(())
        } else {
            Err(Error::UnknownId {
                id,
                len: self.len(),
            })
        }
    }

    /// Projects every row onto the unit sphere. Rows of norm zero are left
    /// untouched.
    pub fn normalize_rows(&mut self) {
        for i in 0..self.len() {
            self.normalize_row(i);
        }
    }

    /// Rescales row `id` to unit norm; zero rows and unknown ids are left
    /// alone.
    pub fn normalize_row(&mut self, id: SymbolId) {
        if id >= self.len() {
            return;
        }
        let row = self.vectors.row_mut(id);
        let n = tensor::norm(row);
        if n > 0.0 {
            row.iter_mut().for_each(|x| *x /= n);
        }
    }
}

fn init_bound(dim: usize) -> f64 {
    1.0 / libm::sqrt(dim as f64)
}

// ---------------------------------------------------------------------------
// g-function parameters
// ---------------------------------------------------------------------------

/// Weights of the linear form: four `p × d` matrices and two biases.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearParams {
    pub w_l1: Matrix,
    pub w_l2: Matrix,
    pub w_r1: Matrix,
    pub w_r2: Matrix,
    pub b_l: Vec<f64>,
    pub b_r: Vec<f64>,
}

/// Weights of the bilinear form: two `(p, d, d)` tensors and two biases.
#[derive(Debug, Clone, PartialEq)]
pub struct BilinearParams {
    pub w_l: Tensor3,
    pub w_r: Tensor3,
    pub b_l: Vec<f64>,
    pub b_r: Vec<f64>,
}

impl LinearParams {
    pub fn zeros(d: usize, p: usize) -> Self {
        Self {
            w_l1: Matrix::zeros(p, d),
            w_l2: Matrix::zeros(p, d),
            w_r1: Matrix::zeros(p, d),
            w_r2: Matrix::zeros(p, d),
            b_l: vec![0.0; p],
            b_r: vec![0.0; p],
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.w_l1.cols(), self.w_l1.rows())
    }

    fn validate(&self) -> Result<()> {
        let (d, p) = self.dims();
        for m in [&self.w_l2, &self.w_r1, &self.w_r2] {
            check_len("LinearParams rows", p, m.rows())?;
            check_len("LinearParams cols", d, m.cols())?;
        }
        check_len("LinearParams b_l", p, self.b_l.len())?;
        check_len("LinearParams b_r", p, self.b_r.len())
    }
}

impl BilinearParams {
    pub fn zeros(d: usize, p: usize) -> Self {
        Self {
            w_l: Tensor3::zeros(p, d, d),
            w_r: Tensor3::zeros(p, d, d),
            b_l: vec![0.0; p],
            b_r: vec![0.0; p],
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        let (p, d, _) = self.w_l.shape();
        (d, p)
    }

    fn validate(&self) -> Result<()> {
        let (p, d, d3) = self.w_l.shape();
        check_len("BilinearParams w_l mode 3", d, d3)?;
        let (rp, rd, rd3) = self.w_r.shape();
        check_len("BilinearParams w_r mode 1", p, rp)?;
        check_len("BilinearParams w_r mode 2", d, rd)?;
        check_len("BilinearParams w_r mode 3", d, rd3)?;
        check_len("BilinearParams b_l", p, self.b_l.len())?;
        check_len("BilinearParams b_r", p, self.b_r.len())
    }
}

/// Parameters of either form. Gradients use the same type, so an update is a
/// scaled block-wise addition.
#[derive(Debug, Clone, PartialEq)]
pub enum Params {
    Linear(LinearParams),
    Bilinear(BilinearParams),
}

impl Params {
    pub fn zeros(form: Form, d: usize, p: usize) -> Self {
        match form {
            Form::Linear => Params::Linear(LinearParams::zeros(d, p)),
            Form::Bilinear => Params::Bilinear(BilinearParams::zeros(d, p)),
        }
    }

    /// Weights i.i.d. uniform in `[-1/√d, 1/√d]`, biases zero.
    pub fn random<R: Rng + ?Sized>(form: Form, d: usize, p: usize, rng: &mut R) -> Self {
        let mut params = Self::zeros(form, d, p);
        let bound = init_bound(d);
        for block in params.weight_blocks_mut() {
            block
                .iter_mut()
                .for_each(|w| *w = rng.gen_range(-bound..=bound));
        }
        params
    }

    pub fn form(&self) -> Form {
        match self {
            Params::Linear(_) => Form::Linear,
            Params::Bilinear(_) => Form::Bilinear,
        }
    }

    /// `(d, p)`.
    pub fn dims(&self) -> (usize, usize) {
        match self {
            Params::Linear(lp) => lp.dims(),
            Params::Bilinear(bp) => bp.dims(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Params::Linear(lp) => lp.validate(),
            Params::Bilinear(bp) => bp.validate(),
        }
    }

    /// All parameter blocks in storage order: weights first, then `b_l`,
    /// `b_r`.
    pub fn blocks(&self) -> Vec<&[f64]> {
        match self {
            Params::Linear(lp) => vec![
                lp.w_l1.as_slice(),
                lp.w_l2.as_slice(),
                lp.w_r1.as_slice(),
                lp.w_r2.as_slice(),
                &lp.b_l,
                &lp.b_r,
            ],
            Params::Bilinear(bp) => {
                vec![bp.w_l.as_slice(), bp.w_r.as_slice(), &bp.b_l, &bp.b_r]
            }
        }
    }

    pub fn blocks_mut(&mut self) -> Vec<&mut [f64]> {
        match self {
            Params::Linear(lp) => vec![
                lp.w_l1.as_mut_slice(),
                lp.w_l2.as_mut_slice(),
                lp.w_r1.as_mut_slice(),
                lp.w_r2.as_mut_slice(),
                &mut lp.b_l,
                &mut lp.b_r,
            ],
            Params::Bilinear(bp) => vec![
                bp.w_l.as_mut_slice(),
                bp.w_r.as_mut_slice(),
                &mut bp.b_l,
                &mut bp.b_r,
            ],
        }
    }

    fn weight_blocks_mut(&mut self) -> Vec<&mut [f64]> {
        let mut blocks = self.blocks_mut();
        blocks.truncate(blocks.len() - 2);
        blocks
    }

    /// `self += alpha * other`; both must have the same form and shapes.
    pub fn add_scaled(&mut self, alpha: f64, other: &Params) -> Result<()> {
        if self.form() != other.form() {
            return Err(Error::Config("parameter forms differ".into()));
        }
        for (dst, src) in self.blocks_mut().into_iter().zip(other.blocks()) {
            tensor::axpy(alpha, src, dst)?;
        }
        Ok(())
    }

    pub fn all_finite(&self) -> bool {
        self.blocks().into_iter().all(tensor::all_finite)
    }

    pub fn fill_zero(&mut self) {
        for block in self.blocks_mut() {
            block.iter_mut().for_each(|x| *x = 0.0);
        }
    }

    /// `g_left(e_lhs, e_rel)`.
    pub fn g_left(&self, e_lhs: &[f64], e_rel: &[f64]) -> Result<Vec<f64>> {
        match self {
            Params::Linear(lp) => g_left_linear(e_lhs, e_rel, lp),
            Params::Bilinear(bp) => g_left_bilinear(e_lhs, e_rel, bp),
        }
    }

    /// `g_right(e_rhs, e_rel)`.
    pub fn g_right(&self, e_rhs: &[f64], e_rel: &[f64]) -> Result<Vec<f64>> {
        match self {
            Params::Linear(lp) => g_right_linear(e_rhs, e_rel, lp),
            Params::Bilinear(bp) => g_right_bilinear(e_rhs, e_rel, bp),
        }
    }
}

// ---------------------------------------------------------------------------
// g functions
// ---------------------------------------------------------------------------

fn affine_pair(
    w_ent: &Matrix,
    w_rel: &Matrix,
    bias: &[f64],
    e_ent: &[f64],
    e_rel: &[f64],
) -> Result<Vec<f64>> {
    let p = w_ent.rows();
    check_len("g linear bias", p, bias.len())?;
    let mut out = vec![0.0; p];
    let mut rel_part = vec![0.0; p];
    matvec_into(w_ent, e_ent, &mut out)?;
    matvec_into(w_rel, e_rel, &mut rel_part)?;
    for ((o, r), b) in out.iter_mut().zip(&rel_part).zip(bias) {
        *o = *o + r + b;
    }
    Ok(out)
}

/// `W_l1 · e_lhs + W_l2 · e_rel + b_l`.
pub fn g_left_linear(e_lhs: &[f64], e_rel: &[f64], params: &LinearParams) -> Result<Vec<f64>> {
    affine_pair(&params.w_l1, &params.w_l2, &params.b_l, e_lhs, e_rel)
}

/// `W_r1 · e_rhs + W_r2 · e_rel + b_r`.
pub fn g_right_linear(e_rhs: &[f64], e_rel: &[f64], params: &LinearParams) -> Result<Vec<f64>> {
    affine_pair(&params.w_r1, &params.w_r2, &params.b_r, e_rhs, e_rel)
}

/// Applies a relation-contracted matrix to an entity embedding and adds the
/// bias. Shared by the `g` functions and the evaluation cache so both
/// produce identical bits.
pub(crate) fn apply_contracted(m: &Matrix, e_ent: &[f64], bias: &[f64]) -> Result<Vec<f64>> {
    check_len("g bilinear bias", m.rows(), bias.len())?;
    let mut out = vec![0.0; m.rows()];
    matvec_into(m, e_ent, &mut out)?;
    for (o, b) in out.iter_mut().zip(bias) {
        *o += b;
    }
    Ok(out)
}

/// `(W_l ×̄₃ e_rel) · e_lhs + b_l`.
pub fn g_left_bilinear(e_lhs: &[f64], e_rel: &[f64], params: &BilinearParams) -> Result<Vec<f64>> {
    apply_contracted(&mode3_contract(&params.w_l, e_rel)?, e_lhs, &params.b_l)
}

/// `(W_r ×̄₃ e_rel) · e_rhs + b_r`.
pub fn g_right_bilinear(e_rhs: &[f64], e_rel: &[f64], params: &BilinearParams) -> Result<Vec<f64>> {
    apply_contracted(&mode3_contract(&params.w_r, e_rel)?, e_rhs, &params.b_r)
}

// ---------------------------------------------------------------------------
// Energy and gradients
// ---------------------------------------------------------------------------

fn lookup(t: Triple, emb: &EmbeddingTable) -> Result<[&[f64]; 3]> {
    Ok([emb.row(t.lhs)?, emb.row(t.rel)?, emb.row(t.rhs)?])
}

/// Energy of `t`; includes the leading minus sign, so lower is better.
pub fn energy(t: Triple, emb: &EmbeddingTable, params: &Params) -> Result<f64> {
    check_len("energy: embedding dim", params.dims().0, emb.dim())?;
    let [e_lhs, e_rel, e_rhs] = lookup(t, emb)?;
    let left = params.g_left(e_lhs, e_rel)?;
    let right = params.g_right(e_rhs, e_rel)?;
    Ok(-dot_unchecked(&left, &right))
}

/// Partial derivatives of the energy of one triple.
///
/// `params` mirrors the model's parameter structure; `lhs`, `rel` and `rhs`
/// are the derivatives with respect to the three embedding rows. When two
/// slots share a symbol id, the derivative with respect to that row is the
/// sum of the slot derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyGradients {
    pub energy: f64,
    pub params: Params,
    pub lhs: Vec<f64>,
    pub rel: Vec<f64>,
    pub rhs: Vec<f64>,
}

pub fn energy_gradients(
    t: Triple,
    emb: &EmbeddingTable,
    params: &Params,
) -> Result<EnergyGradients> {
    let (d, p) = params.dims();
    let mut grad = Params::zeros(params.form(), d, p);
    let (energy, [lhs, rel, rhs]) = backward(t, emb, params, 1.0, &mut grad)?;
    Ok(EnergyGradients {
        energy,
        params: grad,
        lhs,
        rel,
        rhs,
    })
}

/// Adds `scale · ∂E/∂θ` into `grad` and returns the energy together with
/// `scale · ∂E/∂e` for the lhs, rel and rhs slots.
pub(crate) fn backward(
    t: Triple,
    emb: &EmbeddingTable,
    params: &Params,
    scale: f64,
    grad: &mut Params,
) -> Result<(f64, [Vec<f64>; 3])> {
    check_len("energy: embedding dim", params.dims().0, emb.dim())?;
    let [e_lhs, e_rel, e_rhs] = lookup(t, emb)?;
    match (params, grad) {
        (Params::Linear(w), Params::Linear(g)) => {
            let left = g_left_linear(e_lhs, e_rel, w)?;
            let right = g_right_linear(e_rhs, e_rel, w)?;
            let energy = -dot_unchecked(&left, &right);
            // dE/dleft = -right, dE/dright = -left
            let gl: Vec<f64> = right.iter().map(|x| -scale * x).collect();
            let gr: Vec<f64> = left.iter().map(|x| -scale * x).collect();

            g.w_l1.add_outer(1.0, &gl, e_lhs)?;
            g.w_l2.add_outer(1.0, &gl, e_rel)?;
            g.w_r1.add_outer(1.0, &gr, e_rhs)?;
            g.w_r2.add_outer(1.0, &gr, e_rel)?;
            tensor::axpy(1.0, &gl, &mut g.b_l)?;
            tensor::axpy(1.0, &gr, &mut g.b_r)?;

            let d_lhs = matvec_transposed(&w.w_l1, &gl)?;
            let d_rhs = matvec_transposed(&w.w_r1, &gr)?;
            let mut d_rel = matvec_transposed(&w.w_l2, &gl)?;
            tensor::axpy(1.0, &matvec_transposed(&w.w_r2, &gr)?, &mut d_rel)?;
            Ok((energy, [d_lhs, d_rel, d_rhs]))
        }
        (Params::Bilinear(w), Params::Bilinear(g)) => {
            let m_l = mode3_contract(&w.w_l, e_rel)?;
            let m_r = mode3_contract(&w.w_r, e_rel)?;
            let left = apply_contracted(&m_l, e_lhs, &w.b_l)?;
            let right = apply_contracted(&m_r, e_rhs, &w.b_r)?;
            let energy = -dot_unchecked(&left, &right);
            let gl: Vec<f64> = right.iter().map(|x| -scale * x).collect();
            let gr: Vec<f64> = left.iter().map(|x| -scale * x).collect();

            tensor::axpy(1.0, &gl, &mut g.b_l)?;
            tensor::axpy(1.0, &gr, &mut g.b_r)?;
            let d_lhs = matvec_transposed(&m_l, &gl)?;
            let d_rhs = matvec_transposed(&m_r, &gr)?;
            let mut d_rel = vec![0.0; e_rel.len()];
            bilinear_side_backward(&w.w_l, &mut g.w_l, &gl, e_lhs, e_rel, &mut d_rel);
            bilinear_side_backward(&w.w_r, &mut g.w_r, &gr, e_rhs, e_rel, &mut d_rel);
            Ok((energy, [d_lhs, d_rel, d_rhs]))
        }
        _ => Err(Error::Config(
            "gradient buffer form differs from model".into(),
        )),
    }
}

/// For `out_i = Σ_jk W[i,j,k] e_ent[j] e_rel[k]` with upstream gradient
/// `g_out`: accumulates `∂/∂W` into `grad_w` and `∂/∂e_rel` into `d_rel`.
fn bilinear_side_backward(
    w: &Tensor3,
    grad_w: &mut Tensor3,
    g_out: &[f64],
    e_ent: &[f64],
    e_rel: &[f64],
    d_rel: &mut [f64],
) {
    let n3 = e_rel.len();
    let fibers = w.as_slice().chunks_exact(n3);
    let grad_fibers = grad_w.as_mut_slice().chunks_exact_mut(n3);
    for (idx, (fiber, grad_fiber)) in fibers.zip(grad_fibers).enumerate() {
        let i = idx / e_ent.len();
        let j = idx % e_ent.len();
        let c = g_out[i] * e_ent[j];
        if c == 0.0 {
            continue;
        }
        for ((dr, gw), (&wk, &ek)) in d_rel
            .iter_mut()
            .zip(grad_fiber.iter_mut())
            .zip(fiber.iter().zip(e_rel))
        {
            *dr += c * wk;
            *gw += c * ek;
        }
    }
}

// ---------------------------------------------------------------------------
// Model
// ---------------------------------------------------------------------------

/// Embeddings plus `g`-function parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub embeddings: EmbeddingTable,
    pub params: Params,
}

impl Model {
    pub fn new(embeddings: EmbeddingTable, params: Params) -> Result<Self> {
        params.validate()?;
        check_len("Model: embedding dim", params.dims().0, embeddings.dim())?;
        Ok(Self { embeddings, params })
    }

    /// Fresh model with uniform initialization and unit-norm embedding rows.
    pub fn random<R: Rng + ?Sized>(
        form: Form,
        d: usize,
        p: usize,
        relations: Vec<bool>,
        rng: &mut R,
    ) -> Self {
        let mut embeddings = EmbeddingTable::random(d, relations, rng);
        embeddings.normalize_rows();
        let params = Params::random(form, d, p, rng);
        Self { embeddings, params }
    }

    pub fn form(&self) -> Form {
        self.params.form()
    }

    pub fn energy(&self, t: Triple) -> Result<f64> {
        energy(t, &self.embeddings, &self.params)
    }

    /// Ranking score, `-energy`.
    pub fn score(&self, t: Triple) -> Result<f64> {
        self.energy(t).map(|e| -e)
    }

    pub fn energy_gradients(&self, t: Triple) -> Result<EnergyGradients> {
        energy_gradients(t, &self.embeddings, &self.params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(rows: &[&[f64]]) -> EmbeddingTable {
        let d = rows[0].len();
        let data = rows.iter().flat_map(|r| r.iter().copied()).collect();
        EmbeddingTable::from_matrix(
            Matrix::from_vec(rows.len(), d, data).unwrap(),
            vec![false; rows.len()],
        )
        .unwrap()
    }

    #[test]
    fn zero_params_give_zero() {
        let lp = LinearParams::zeros(3, 2);
        assert_eq!(
            g_left_linear(&[1.0, 2.0, 3.0], &[0.5; 3], &lp).unwrap(),
            vec![0.0; 2]
        );
        let emb = table(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        for form in [Form::Linear, Form::Bilinear] {
            let params = Params::zeros(form, 3, 2);
            assert_eq!(energy(Triple::new(0, 1, 0), &emb, &params).unwrap(), 0.0);
        }
    }

    #[test]
    fn identity_linear_energy() {
        let mut lp = LinearParams::zeros(2, 2);
        lp.w_l1 = Matrix::identity(2);
        lp.w_r1 = Matrix::identity(2);
        assert_eq!(
            g_left_linear(&[0.3, -0.7], &[5.0, 5.0], &lp).unwrap(),
            vec![0.3, -0.7]
        );
        let emb = table(&[&[1.0, 0.0], &[0.2, 0.9]]);
        let params = Params::Linear(lp);
        assert_eq!(energy(Triple::new(0, 1, 0), &emb, &params).unwrap(), -1.0);
    }

    #[test]
    fn bilinear_zero_tensor_returns_bias() {
        let mut bp = BilinearParams::zeros(2, 3);
        bp.b_l = vec![1.0, -2.0, 0.5];
        assert_eq!(
            g_left_bilinear(&[0.4, 0.1], &[0.9, 0.3], &bp).unwrap(),
            bp.b_l
        );
    }

    #[test]
    fn bilinear_identity_slices() {
        let mut bp = BilinearParams::zeros(2, 2);
        bp.w_l = Tensor3::from_fn((2, 2, 2), |i, j, _| if i == j { 1.0 } else { 0.0 });
        bp.b_l = vec![0.25, -0.5];
        let out = g_left_bilinear(&[0.5, 2.0], &[0.25, 0.75], &bp).unwrap();
        assert_eq!(out, vec![0.75, 1.5]);
    }

    #[test]
    fn invalid_id_is_lookup_error() {
        let emb = table(&[&[1.0, 0.0]]);
        let params = Params::zeros(Form::Linear, 2, 2);
        assert_eq!(
            energy(Triple::new(0, 0, 3), &emb, &params),
            Err(Error::UnknownId { id: 3, len: 1 })
        );
    }

    #[test]
    fn form_parses() {
        assert_eq!("bilinear".parse::<Form>().unwrap(), Form::Bilinear);
        assert!("cubic".parse::<Form>().is_err());
    }

    #[test]
    fn normalize_rows_unit_norm() {
        let mut emb = table(&[&[3.0, 4.0], &[0.0, 0.0], &[-1.0, 1.0]]);
        emb.normalize_rows();
        assert_eq!(emb.row(0).unwrap(), &[0.6, 0.8]);
        assert_eq!(emb.row(1).unwrap(), &[0.0, 0.0]);
        assert!((tensor::norm(emb.row(2).unwrap()) - 1.0).abs() < 1e-15);
    }
}

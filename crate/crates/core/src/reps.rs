//! Finite-dimensional complex representations of the tree algebra, numerical
//! evaluation of elements and tensors, relation residuals, refutation, and
//! the combined numeric/classical soundness oracle.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use thiserror::Error;

use crate::classical::{
    self, enumerate_gp, is_group, tensor_eval, ActionTable, ClassicalError, LegPoint, Permutation, Portrait,
    SubgroupSpec,
};
use crate::engine::{self, Element, Generator, Monomial};
use crate::fincon::wreath::{WreathElement, WreathMonomial, WreathSymbol};
use crate::lincomb::Q;
use crate::report::{Soundness, SoundnessOracle};
use crate::tensor::{Leg, LegKind, TensorElement};
use crate::words::{split_prefix, Alphabet, Word};

pub type C64 = Complex<f64>;
pub type Mat = DMatrix<C64>;
pub type Vector = DVector<C64>;

/// Default numerical tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Largest total dimension evaluated through explicit Kronecker products.
pub const KRONECKER_LIMIT: usize = 4096;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RepError {
    #[error("the {family} model needs k = {needs}, got {got}")]
    WrongAlphabet { family: &'static str, needs: usize, got: usize },
    #[error("angle {0} gives commuting projections")]
    DegenerateAngle(f64),
    #[error("portraits do not form a group")]
    NotAGroup,
    #[error("empty portrait list")]
    Empty,
    #[error(transparent)]
    Classical(#[from] ClassicalError),
    #[error("representation {0} has no wreath structure")]
    NoWreath(String),
    #[error("tensor of total dimension {0} is too large for Kronecker evaluation")]
    TooLarge(usize),
    #[error("generator {0} has the wrong dimension or is missing")]
    BadTable(Generator),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "family")]
pub enum Provenance {
    TwoProjection { theta: f64 },
    Magic { theta: f64 },
    Classical { order: usize },
    RandomWreath { seed: u64, labels: usize },
    User,
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Provenance::TwoProjection { theta } => write!(f, "two-projection({theta})"),
            Provenance::Magic { theta } => write!(f, "magic({theta})"),
            Provenance::Classical { order } => write!(f, "classical(|G|={order})"),
            Provenance::RandomWreath { seed, labels } => write!(f, "random-wreath(seed={seed},|P|={labels})"),
            Provenance::User => write!(f, "user"),
        }
    }
}

#[derive(Debug, Clone)]
struct Block {
    x: u8,
    y: u8,
    indices: Vec<usize>,
    u: Mat,
    child: MatrixRep,
}

#[derive(Debug, Clone)]
struct WreathData {
    /// `P(x,y)` at index `x·k + y`.
    p: Vec<Mat>,
    blocks: Vec<Block>,
}

/// Images of all generators of depth `≤ depth`; deeper generators follow
/// `a[uw, vw'] = δ_{w,w'} a[u,v]` with `|u| = depth`.
#[derive(Debug, Clone)]
pub struct MatrixRep {
    pub provenance: Provenance,
    pub tol: f64,
    k: usize,
    dim: usize,
    depth: usize,
    table: HashMap<Generator, Mat>,
    wreath: Option<WreathData>,
}

fn identity(n: usize) -> Mat {
    Mat::identity(n, n)
}

fn real(m: &DMatrix<f64>) -> Mat {
    m.map(|x| C64::new(x, 0.0))
}

pub fn q_to_f64(c: &Q) -> f64 {
    c.to_f64().unwrap_or(f64::NAN)
}

/// Largest singular value.
pub fn op_norm(m: &Mat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

fn random_unitary(n: usize, rng: &mut impl Rng) -> Mat {
    let g = Mat::from_fn(n, n, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    g.qr().q()
}

fn random_unit_vector(n: usize, rng: &mut impl Rng) -> Vector {
    let v = Vector::from_fn(n, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let norm = v.norm();
    if norm == 0.0 {
        v
    } else {
        v / C64::new(norm, 0.0)
    }
}

fn embed(target: &mut Mat, indices: &[usize], block: &Mat) {
    for (i, &r) in indices.iter().enumerate() {
        for (j, &c) in indices.iter().enumerate() {
            target[(r, c)] += block[(i, j)];
        }
    }
}

impl MatrixRep {
    /// A representation from an explicit table covering every generator of
    /// depth `1..=depth`.
    pub fn from_table(
        k: usize,
        dim: usize,
        depth: usize,
        mut table: HashMap<Generator, Mat>,
        provenance: Provenance,
    ) -> Result<MatrixRep, RepError> {
        let alphabet = Alphabet::new(k).map_err(|_| RepError::WrongAlphabet { family: "user", needs: 2, got: k })?;
        table.insert(Generator::UNIT, identity(dim));
        for g in Generator::all_up_to(alphabet, depth) {
            match table.get(&g) {
                Some(m) if m.nrows() == dim && m.ncols() == dim => {}
                _ => return Err(RepError::BadTable(g)),
            }
        }
        Ok(MatrixRep { provenance, tol: DEFAULT_TOL, k, dim, depth, table, wreath: None })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Depth up to which generators are stored explicitly.
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn has_wreath(&self) -> bool {
        self.wreath.is_some()
    }

    /// The image of `g`, or `None` when it is zero.
    pub fn generator(&self, g: Generator) -> Option<&Mat> {
        if g.depth() <= self.depth {
            return self.table.get(&g);
        }
        let (u, s) = split_prefix(g.row(), self.depth);
        let (v, t) = split_prefix(g.col(), self.depth);
        if s != t {
            return None;
        }
        self.table.get(&Generator::of(u, v))
    }

    pub fn generator_matrix(&self, g: Generator) -> Mat {
        self.generator(g).cloned().unwrap_or_else(|| Mat::zeros(self.dim, self.dim))
    }

    pub fn monomial(&self, m: &Monomial) -> Mat {
        let mut acc = identity(self.dim);
        for &g in m.factors() {
            match self.generator(g) {
                Some(x) => acc *= x,
                None => return Mat::zeros(self.dim, self.dim),
            }
        }
        acc
    }

    /// `M·v` for the monomial's image `M`, applied right to left.
    pub fn apply_monomial(&self, m: &Monomial, v: &Vector) -> Vector {
        let mut out = v.clone();
        for &g in m.factors().iter().rev() {
            match self.generator(g) {
                Some(x) => out = x * out,
                None => return Vector::zeros(self.dim),
            }
        }
        out
    }

    pub fn eval(&self, e: &Element) -> Mat {
        let mut acc = Mat::zeros(self.dim, self.dim);
        for (m, c) in e.iter() {
            acc += self.monomial(m) * C64::new(q_to_f64(c), 0.0);
        }
        acc
    }

    fn wreath_data(&self) -> Result<&WreathData, RepError> {
        self.wreath.as_ref().ok_or_else(|| RepError::NoWreath(self.provenance.to_string()))
    }

    /// `P[x,y] ↦ P(x,y)`, `N_x(m) ↦ ν_x(m)`.
    pub fn wreath_symbol(&self, s: &WreathSymbol) -> Result<Mat, RepError> {
        let data = self.wreath_data()?;
        match s {
            WreathSymbol::P(x, y) => Ok(data.p[*x as usize * self.k + *y as usize].clone()),
            WreathSymbol::Nu(x, m) => {
                let mut out = Mat::zeros(self.dim, self.dim);
                for b in data.blocks.iter().filter(|b| b.x == *x) {
                    let inner = &b.u * b.child.monomial(m) * b.u.adjoint();
                    embed(&mut out, &b.indices, &inner);
                }
                Ok(out)
            }
        }
    }

    pub fn wreath_monomial(&self, m: &WreathMonomial) -> Result<Mat, RepError> {
        let mut acc = identity(self.dim);
        for s in m.symbols() {
            acc *= self.wreath_symbol(s)?;
        }
        Ok(acc)
    }

    pub fn eval_wreath(&self, e: &WreathElement) -> Result<Mat, RepError> {
        let mut acc = Mat::zeros(self.dim, self.dim);
        for (m, c) in e.iter() {
            acc += self.wreath_monomial(m)? * C64::new(q_to_f64(c), 0.0);
        }
        Ok(acc)
    }

    /// Residuals of the defining relations for generators of depth `≤ depth`.
    pub fn relation_report(&self, depth: usize) -> NumericReport {
        let alphabet = Alphabet::new(self.k).expect("valid alphabet");
        let mut residuals = vec![];
        for g in Generator::all_up_to(alphabet, depth) {
            if g.is_unit() {
                continue;
            }
            let m = self.generator_matrix(g);
            residuals.push(Residual { name: format!("self-adjoint {g}"), residual: op_norm(&(&m - m.adjoint())) });
            residuals.push(Residual { name: format!("idempotent {g}"), residual: op_norm(&(&m * &m - &m)) });
        }
        residuals.push(Residual {
            name: "unit a[e,e]".into(),
            residual: op_norm(&(self.generator_matrix(Generator::UNIT) - identity(self.dim))),
        });
        for (name, r) in engine::defining_relations(alphabet, depth) {
            if name.starts_with("row sum") || name.starts_with("column sum") {
                residuals.push(Residual { name, residual: op_norm(&self.eval(&r)) });
            }
        }
        NumericReport::new(self.provenance.to_string(), residuals, self.tol)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Residual {
    pub name: String,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct NumericReport {
    pub rep: String,
    pub residuals: Vec<Residual>,
    pub max_residual: f64,
    pub tol: f64,
    pub pass: bool,
}

impl NumericReport {
    pub fn new(rep: String, residuals: Vec<Residual>, tol: f64) -> Self {
        let max_residual = residuals.iter().map(|r| r.residual).fold(0.0, f64::max);
        NumericReport { rep, residuals, max_residual, tol, pass: max_residual <= tol }
    }
}

fn projections(theta: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let (s, c) = theta.sin_cos();
    let p = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
    let q = DMatrix::from_row_slice(2, 2, &[c * c, c * s, c * s, s * s]);
    (p, q)
}

fn check_angle(theta: f64, allow_degenerate: bool) -> Result<(), RepError> {
    let inside = theta > 0.0 && theta < std::f64::consts::FRAC_PI_2;
    if !inside && !allow_degenerate {
        return Err(RepError::DegenerateAngle(theta));
    }
    Ok(())
}

fn w(s: &str) -> Word {
    s.parse().expect("literal word")
}

/// The two-dimensional model built from the projections `p = diag(1,0)` and
/// `q` at angle `θ`: depth one is the identity matrix of projections and
/// depth two is the block matrix `[[p,1−p,0,0],[1−p,p,0,0],[0,0,q,1−q],[0,0,1−q,q]]`.
pub fn two_projection_rep(theta: f64, allow_degenerate: bool) -> Result<MatrixRep, RepError> {
    check_angle(theta, allow_degenerate)?;
    let (p, q) = projections(theta);
    let one = DMatrix::<f64>::identity(2, 2);
    let zero = DMatrix::<f64>::zeros(2, 2);
    let mut table = HashMap::new();
    for (u, v, m) in [("0", "0", &one), ("1", "1", &one), ("0", "1", &zero), ("1", "0", &zero)] {
        table.insert(Generator::of(w(u), w(v)), real(m));
    }
    let np = &one - &p;
    let nq = &one - &q;
    let words = ["00", "01", "10", "11"];
    let grid: [[&DMatrix<f64>; 4]; 4] =
        [[&p, &np, &zero, &zero], [&np, &p, &zero, &zero], [&zero, &zero, &q, &nq], [&zero, &zero, &nq, &q]];
    for (i, u) in words.iter().enumerate() {
        for (j, v) in words.iter().enumerate() {
            table.insert(Generator::of(w(u), w(v)), real(grid[i][j]));
        }
    }
    MatrixRep::from_table(2, 2, 2, table, Provenance::TwoProjection { theta })
}

/// A two-dimensional `4×4` magic unitary whose diagonal entries `p` and `q`
/// do not commute, extended trivially below depth one.
pub fn magic_unitary_rep(theta: f64) -> Result<MatrixRep, RepError> {
    check_angle(theta, false)?;
    let (p, q) = projections(theta);
    let one = DMatrix::<f64>::identity(2, 2);
    let zero = DMatrix::<f64>::zeros(2, 2);
    let (np, nq) = (&one - &p, &one - &q);
    let grid: [[&DMatrix<f64>; 4]; 4] =
        [[&p, &zero, &np, &zero], [&zero, &q, &zero, &nq], [&np, &zero, &p, &zero], [&zero, &nq, &zero, &q]];
    let mut table = HashMap::new();
    for x in 0..4u8 {
        for y in 0..4u8 {
            table.insert(Generator::of(Word::letter_word(x), Word::letter_word(y)), real(grid[x as usize][y as usize]));
        }
    }
    MatrixRep::from_table(4, 2, 1, table, Provenance::Magic { theta })
}

/// Diagonal representation over a finite group of portraits.
pub fn classical_rep(portraits: &[Portrait]) -> Result<MatrixRep, RepError> {
    let first = portraits.first().ok_or(RepError::Empty)?;
    if !is_group(portraits) {
        return Err(RepError::NotAGroup);
    }
    let (k, depth) = (first.k(), first.depth());
    let tables: Vec<ActionTable> = portraits.iter().map(Portrait::action_table).collect();
    let alphabet = Alphabet::new(k).expect("portrait alphabet");
    let mut table = HashMap::new();
    for g in Generator::all_up_to(alphabet, depth) {
        let diag: Vec<C64> = tables
            .iter()
            .map(|t| C64::new(if t.indicator(g).expect("depth bound") { 1.0 } else { 0.0 }, 0.0))
            .collect();
        table.insert(g, Mat::from_diagonal(&Vector::from_vec(diag)));
    }
    MatrixRep::from_table(k, portraits.len(), depth, table, Provenance::Classical { order: portraits.len() })
}

/// A seeded noncommutative representation: each basis vector carries a
/// label `σ_i ∈ allowed`, `P(x,y)` projects onto `{i : σ_i(y) = x}`, and
/// `a[xu,yv] ↦ U·ρ'(a[u,v])·U*` on that block for an independent random
/// child representation `ρ'` of depth `depth − 1` and a random unitary `U`.
pub fn random_wreath_rep(k: usize, depth: usize, dim: usize, allowed: &[Permutation], seed: u64) -> MatrixRep {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = build_wreath(k, depth, dim, allowed, &mut rng);
    rep.provenance = Provenance::RandomWreath { seed, labels: allowed.len() };
    rep
}

fn build_wreath(k: usize, depth: usize, dim: usize, allowed: &[Permutation], rng: &mut ChaCha8Rng) -> MatrixRep {
    let provenance = Provenance::RandomWreath { seed: 0, labels: allowed.len() };
    let mut table = HashMap::new();
    table.insert(Generator::UNIT, identity(dim));
    if depth == 0 {
        return MatrixRep { provenance, tol: DEFAULT_TOL, k, dim, depth, table, wreath: None };
    }
    let labels: Vec<&Permutation> = (0..dim).map(|_| &allowed[rng.gen_range(0..allowed.len())]).collect();
    let mut p = vec![];
    let mut blocks = vec![];
    for x in 0..k as u8 {
        for y in 0..k as u8 {
            let indices: Vec<usize> = (0..dim).filter(|&i| labels[i].apply(y) == x).collect();
            let diag = Vector::from_fn(dim, |i, _| C64::new(if labels[i].apply(y) == x { 1.0 } else { 0.0 }, 0.0));
            p.push(Mat::from_diagonal(&diag));
            if !indices.is_empty() {
                let n = indices.len();
                let child = build_wreath(k, depth - 1, n, allowed, rng);
                let u = random_unitary(n, rng);
                blocks.push(Block { x, y, indices, u, child });
            }
        }
    }
    let alphabet = Alphabet::new(k).expect("valid alphabet");
    for n in 1..=depth {
        for g in Generator::all(alphabet, n) {
            let (x, y) = (g.row().letter(0), g.col().letter(0));
            let tail = Generator::of(g.row().drop_prefix(1), g.col().drop_prefix(1));
            let mut m = Mat::zeros(dim, dim);
            if let Some(b) = blocks.iter().find(|b| b.x == x && b.y == y) {
                let inner = &b.u * b.child.generator_matrix(tail) * b.u.adjoint();
                embed(&mut m, &b.indices, &inner);
            }
            table.insert(g, m);
        }
    }
    MatrixRep { provenance, tol: DEFAULT_TOL, k, dim, depth, table, wreath: Some(WreathData { p, blocks }) }
}

fn fun_dim(k: usize, n: usize) -> usize {
    k.pow(n as u32)
}

fn leg_matrix(rep: &MatrixRep, leg: &Leg) -> Result<Mat, RepError> {
    match leg {
        Leg::Tree(m) => Ok(rep.monomial(m)),
        Leg::Wreath(m) => rep.wreath_monomial(m),
        Leg::Fun(w) => {
            let n = fun_dim(rep.k, w.len());
            let mut d = Mat::zeros(n, n);
            let i = w.index(rep.k);
            d[(i, i)] = C64::new(1.0, 0.0);
            Ok(d)
        }
    }
}

fn leg_dim(rep: &MatrixRep, kind: LegKind) -> usize {
    match kind {
        LegKind::Tree | LegKind::Wreath => rep.dim,
        LegKind::Fun(n) => fun_dim(rep.k, n),
    }
}

/// The image of a tensor under `rep` on every algebra leg, with function
/// legs in the diagonal basis, as a Kronecker product.
pub fn numeric_eval_tensor(t: &TensorElement, rep: &MatrixRep) -> Result<Mat, RepError> {
    let total: usize = t.signature().iter().map(|&s| leg_dim(rep, s)).product();
    if total > KRONECKER_LIMIT {
        return Err(RepError::TooLarge(total));
    }
    let mut acc = Mat::zeros(total, total);
    for (key, c) in t.terms().iter() {
        let mut m = identity(1);
        for leg in key.legs() {
            m = m.kronecker(&leg_matrix(rep, leg)?);
        }
        acc += m * C64::new(q_to_f64(c), 0.0);
    }
    Ok(acc)
}

/// `Σ_terms c · Π_legs ⟨x_l, M_l y_l⟩` for one probe vector pair per leg.
pub fn probe_value(t: &TensorElement, rep: &MatrixRep, probes: &[(Vector, Vector)]) -> Result<C64, RepError> {
    let mut caches: Vec<HashMap<&Leg, C64>> = vec![HashMap::new(); probes.len()];
    let mut acc = C64::zero();
    for (key, c) in t.terms().iter() {
        let mut value = C64::new(q_to_f64(c), 0.0);
        for (l, leg) in key.legs().iter().enumerate() {
            let (x, y) = &probes[l];
            let v = match caches[l].get(leg) {
                Some(v) => *v,
                None => {
                    let v = match leg {
                        Leg::Tree(m) => x.dotc(&rep.apply_monomial(m, y)),
                        Leg::Wreath(m) => x.dotc(&(rep.wreath_monomial(m)? * y)),
                        Leg::Fun(w) => {
                            let i = w.index(rep.k);
                            x[i].conj() * y[i]
                        }
                    };
                    caches[l].insert(leg, v);
                    v
                }
            };
            value *= v;
            if value == C64::zero() {
                break;
            }
        }
        acc += value;
    }
    Ok(acc)
}

/// Magnitude of a tensor under `rep`: the operator norm for a single algebra
/// leg or small tensors, otherwise the largest of several random probes.
pub fn numeric_magnitude(t: &TensorElement, rep: &MatrixRep, probes: usize, seed: u64) -> Result<f64, RepError> {
    let total: usize = t.signature().iter().map(|&s| leg_dim(rep, s)).product();
    if total <= 64 {
        return Ok(op_norm(&numeric_eval_tensor(t, rep)?));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..probes {
        let pairs: Vec<(Vector, Vector)> = t
            .signature()
            .iter()
            .map(|&s| {
                let n = leg_dim(rep, s);
                (random_unit_vector(n, &mut rng), random_unit_vector(n, &mut rng))
            })
            .collect();
        worst = worst.max(probe_value(t, rep, &pairs)?.norm());
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Refutation {
    Refuted { rep: String, norm: f64 },
    Inconclusive,
}

/// Refuted iff some representation gives `‖lhs − rhs‖ > 100·τ`.
pub fn refute(lhs: &Element, rhs: &Element, reps: &[MatrixRep]) -> Refutation {
    let diff = lhs.sub(rhs);
    for r in reps {
        let norm = op_norm(&r.eval(&diff));
        if norm > 100.0 * r.tol {
            return Refutation::Refuted { rep: r.provenance.to_string(), norm };
        }
    }
    Refutation::Inconclusive
}

type PointSet = Arc<Vec<(Portrait, ActionTable)>>;

/// Numerical representations plus exact evaluation at classical points.
pub struct StandardOracle {
    k: usize,
    allowed: Vec<Permutation>,
    reps: Vec<MatrixRep>,
    seed: u64,
    pub threshold: f64,
    points: Mutex<HashMap<usize, PointSet>>,
}

/// Exhaustive classical evaluation up to this many points, sampling above.
pub const EXHAUSTIVE_POINTS: usize = 4096;
pub const SAMPLED_POINTS: usize = 512;
/// Group elements per leg: all of them up to this size, sampled above.
pub const GROUP_POINTS: usize = 2000;
pub const SAMPLED_PORTRAITS: usize = 200;

impl StandardOracle {
    /// The oracle for the subgroup `P ≤ Sym(X)` labelling the portraits and
    /// the random representations; `None` means all of `Sym(X)`.
    pub fn new(k: usize, labels: Option<&SubgroupSpec>, seed: u64) -> Result<Self, RepError> {
        let full = labels.is_none();
        let allowed = match labels {
            Some(s) => s.elements(k)?,
            None => Permutation::all(k),
        };
        let (dim, depth) = match k {
            2 => (12, 3),
            3 => (18, 2),
            _ => (4 * k, 2),
        };
        let mut reps = vec![
            random_wreath_rep(k, depth, dim, &allowed, seed ^ 0x51),
            random_wreath_rep(k, depth, dim + 3, &allowed, seed ^ 0xa7),
        ];
        if full && k == 2 {
            reps.push(two_projection_rep(std::f64::consts::FRAC_PI_4, false)?);
        }
        if full && k == 4 {
            reps.push(magic_unitary_rep(0.6)?);
        }
        Ok(StandardOracle { k, allowed, reps, seed, threshold: 1e-9, points: Mutex::new(HashMap::new()) })
    }

    pub fn reps(&self) -> &[MatrixRep] {
        &self.reps
    }

    fn group_points(&self, depth: usize) -> PointSet {
        let mut cache = self.points.lock().expect("point cache");
        if let Some(p) = cache.get(&depth) {
            return p.clone();
        }
        let order = classical::gp_order(self.allowed.len(), self.k, depth);
        let portraits = if order <= GROUP_POINTS as u128 {
            enumerate_gp(&SubgroupSpec::Elements(self.allowed.clone()), self.k, depth).expect("bounded enumeration")
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ depth as u64);
            (0..SAMPLED_PORTRAITS).map(|_| Portrait::random(self.k, depth, &self.allowed, &mut rng)).collect()
        };
        let set: PointSet = Arc::new(
            portraits
                .into_iter()
                .map(|p| {
                    let t = p.action_table();
                    (p, t)
                })
                .collect(),
        );
        cache.insert(depth, set.clone());
        set
    }

    /// Exact evaluation at classical points; returns (points, all zero).
    pub fn abelian_check(&self, diff: &TensorElement) -> (usize, bool) {
        let sig = diff.signature();
        if sig.is_empty() {
            let value = crate::tensor::scalar_value(diff).unwrap_or_default();
            return (1, value.is_zero());
        }
        let mut depth = vec![0usize; sig.len()];
        for (key, _) in diff.terms().iter() {
            for (i, leg) in key.legs().iter().enumerate() {
                let d = match leg {
                    Leg::Tree(m) => m.max_depth(),
                    Leg::Wreath(m) => wreath_depth(m),
                    Leg::Fun(_) => 0,
                };
                depth[i] = depth[i].max(d);
            }
        }
        let alphabet = Alphabet::new(self.k).expect("valid alphabet");
        enum Axis {
            Group(PointSet),
            Words(Vec<Word>),
        }
        let axes: Vec<Axis> = sig
            .iter()
            .zip(&depth)
            .map(|(kind, &d)| match kind {
                LegKind::Fun(n) => Axis::Words(alphabet.words(*n)),
                _ => Axis::Group(self.group_points(d.max(1))),
            })
            .collect();
        let sizes: Vec<usize> = axes
            .iter()
            .map(|a| match a {
                Axis::Group(p) => p.len(),
                Axis::Words(w) => w.len(),
            })
            .collect();
        let total = sizes.iter().try_fold(1usize, |acc, &s| acc.checked_mul(s)).unwrap_or(usize::MAX);
        let tuples: Vec<Vec<usize>> = if total <= EXHAUSTIVE_POINTS {
            (0..total)
                .map(|mut i| {
                    sizes
                        .iter()
                        .map(|&s| {
                            let r = i % s;
                            i /= s;
                            r
                        })
                        .collect()
                })
                .collect()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ 0x0b5e);
            (0..SAMPLED_POINTS).map(|_| sizes.iter().map(|&s| rng.gen_range(0..s)).collect()).collect()
        };
        let mut all_zero = true;
        for t in &tuples {
            let point: Vec<LegPoint<'_>> = axes
                .iter()
                .zip(t)
                .map(|(a, &i)| match a {
                    Axis::Group(p) => LegPoint::Group(&p[i].0, &p[i].1),
                    Axis::Words(w) => LegPoint::Word(w[i]),
                })
                .collect();
            match tensor_eval(diff, &point) {
                Ok(v) if v.is_zero() => {}
                _ => {
                    all_zero = false;
                    break;
                }
            }
        }
        (tuples.len(), all_zero)
    }

    /// Largest magnitude over the representations that support every leg.
    pub fn numeric_check(&self, diff: &TensorElement) -> (usize, f64) {
        let needs_wreath = diff.signature().contains(&LegKind::Wreath);
        let mut used = 0;
        let mut worst = 0.0f64;
        for (i, r) in self.reps.iter().enumerate() {
            if needs_wreath && !r.has_wreath() {
                continue;
            }
            match numeric_magnitude(diff, r, 4, self.seed ^ (i as u64) << 8) {
                Ok(v) => {
                    used += 1;
                    worst = worst.max(v);
                }
                Err(_) => worst = f64::INFINITY,
            }
        }
        (used, worst)
    }
}

/// Depth a portrait needs to evaluate a wreath monomial.
pub fn wreath_depth(m: &WreathMonomial) -> usize {
    m.symbols()
        .iter()
        .map(|s| match s {
            WreathSymbol::P(..) => 1,
            WreathSymbol::Nu(_, m) => 1 + m.max_depth(),
        })
        .max()
        .unwrap_or(0)
}

impl SoundnessOracle for StandardOracle {
    fn check(&self, diff: &TensorElement) -> Soundness {
        let (abelian_points, abelian_zero) = self.abelian_check(diff);
        let (numeric_reps, max_numeric) = self.numeric_check(diff);
        Soundness {
            abelian_points,
            abelian_zero,
            numeric_reps,
            max_numeric,
            ok: abelian_zero && max_numeric < self.threshold,
        }
    }
}

#[cfg(test)]
mod tests;

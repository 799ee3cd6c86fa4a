//! Jordan bases made of Kramers pairs `(v, T v)` for quaternionic matrices.
//!
//! Eigenvalues of `chi(X)` are clustered, the generalized eigenspace of every
//! cluster is resolved into Jordan chains, and chains are paired through `T`:
//! at a non-real eigenvalue `lambda` the chains at `conj(lambda)` are the
//! `T`-images of those at `lambda`; at a real eigenvalue the chain heads are
//! themselves chosen as Kramers pairs.

use num_complex::Complex64;

use crate::certificate::{Certified, Check};
use crate::embedding::{apply_t, ensure_square, require_quaternionic, tol_scale, CMatrix, CVector};
use crate::error::{Error, Result};
use crate::kernels::{eigenvalues, nullspace_below, svd_complex};
use crate::symplectic::kramers_basis_of_subspace;

/// Relative tolerance on `|XS - SJ|_F / (cond(S) |X|_F)`.
pub const JORDAN_RESIDUAL_TOL: f64 = 1e-7;
/// Tolerance on `|S[:, pairing(k)] -/+ T S[:, k]|`, relative to the column norm.
pub const PAIRING_TOL: f64 = 1e-9;
/// Clusters whose generalized eigenspaces have a joint smallest singular
/// value below this are fragments of one defective eigenvalue.
pub const DEFECTIVE_ANGLE: f64 = 0.01;

/// A single Jordan block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JordanBlock {
    pub eigenvalue: Complex64,
    pub size: usize,
}

#[derive(Debug, Clone)]
pub struct JordanResult {
    /// Jordan basis: each chain occupies consecutive columns, ordered
    /// `[(X - lambda)^(r-1) b, ..., (X - lambda) b, b]`.
    pub s: CMatrix,
    pub j: CMatrix,
    pub blocks: Vec<JordanBlock>,
    /// `pairing[k]` is the column equal to `T` of column `k` up to sign.
    pub pairing: Vec<usize>,
    /// `sigma_max(S) / sigma_min(S)`.
    pub condition: f64,
    pub input: CMatrix,
}

impl JordanResult {
    /// `|XS - SJ|_F`.
    pub fn residual(&self) -> f64 {
        (&self.input * &self.s - &self.s * &self.j).norm()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.blocks.iter().map(|b| b.size).collect();
        v.sort_unstable();
        v
    }

    /// Largest relative deviation of a recorded partner from `T` of its
    /// column, allowing either sign.
    pub fn pairing_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (k, &p) in self.pairing.iter().enumerate() {
            let col: CVector = self.s.column(k).into_owned();
            let partner: CVector = self.s.column(p).into_owned();
            let t = match apply_t(&col) {
                Ok(t) => t,
                Err(_) => return f64::INFINITY,
            };
            let d = (&partner - &t).norm().min((&partner + &t).norm()) / col.norm().max(f64::MIN_POSITIVE);
            worst = worst.max(d);
        }
        worst
    }

    /// Zero when blocks at non-real eigenvalues match their conjugates in
    /// size and blocks at real eigenvalues come in equal-size pairs;
    /// otherwise the number of unmatched blocks.
    pub fn block_pairing_defect(&self) -> usize {
        let mut unmatched = 0;
        let mut used = vec![false; self.blocks.len()];
        for i in 0..self.blocks.len() {
            if used[i] {
                continue;
            }
            used[i] = true;
            let b = self.blocks[i];
            let target = b.eigenvalue.conj();
            let found = (0..self.blocks.len()).find(|&k| {
                !used[k] && self.blocks[k].size == b.size && (self.blocks[k].eigenvalue - target).norm() <= 1e-6
            });
            match found {
                Some(k) => used[k] = true,
                None => unmatched += 1,
            }
        }
        unmatched
    }
}

impl Certified for JordanResult {
    fn kind(&self) -> &'static str {
        "quaternionic-jordan"
    }

    fn checks(&self) -> Vec<Check> {
        let scale = self.condition * tol_scale(&self.input);
        vec![
            Check::new("XS=SJ", self.residual() / scale, JORDAN_RESIDUAL_TOL),
            Check::new("pairing", self.pairing_defect(), PAIRING_TOL),
            Check::new("blocks.paired", self.block_pairing_defect() as f64, 0.0),
        ]
    }
}

/// `K_1 ⊂ K_2 ⊂ ...` with `K_r` an orthonormal basis of `ker (X - mu)^r`,
/// grown one level at a time as `K_{r+1} = ker((I - K_r K_r*)(X - mu))` and
/// stopped when the dimension stabilizes.
fn kernel_chain(x: &CMatrix, mu: Complex64, tol: f64) -> Result<Vec<CMatrix>> {
    let n = ensure_square(x)?;
    let shifted = x - CMatrix::identity(n, n) * mu;
    let threshold = tol * tol_scale(x);
    let mut chain: Vec<CMatrix> = Vec::new();
    let mut current = CMatrix::zeros(n, 0);
    loop {
        let proj = CMatrix::identity(n, n) - &current * current.adjoint();
        let next = nullspace_below(&(proj * &shifted), threshold)?;
        if next.ncols() <= current.ncols() {
            break;
        }
        current = next;
        chain.push(current.clone());
        if current.ncols() == n {
            break;
        }
    }
    Ok(chain)
}

/// Orthonormal basis of the generalized eigenspace `ker (X - lambda)^n`.
pub fn generalized_eigenspace(x: &CMatrix, lambda: Complex64, tol: f64) -> Result<CMatrix> {
    kernel_chain(x, lambda, tol)?
        .pop()
        .ok_or(Error::NotAnEigenvalue { value: lambda })
}

fn level(chain: &[CMatrix], r: usize, n: usize) -> CMatrix {
    if r == 0 {
        CMatrix::zeros(n, 0)
    } else {
        chain[(r - 1).min(chain.len() - 1)].clone()
    }
}

/// Orthonormal basis of the heads of length-`r` chains:
/// `ker^r ∩ (ker^(r-1) + (X - mu) ker^(r+1))^perp`, whose dimension is the
/// number of `r x r` blocks.
fn head_space(x: &CMatrix, mu: Complex64, chain: &[CMatrix], r: usize) -> Result<CMatrix> {
    let n = x.nrows();
    let dim = |k: usize| if k == 0 { 0 } else { chain[(k - 1).min(chain.len() - 1)].ncols() };
    let m_r = (dim(r) - dim(r - 1)).saturating_sub(dim(r + 1) - dim(r));
    let kr = level(chain, r, n);
    if m_r == 0 {
        return Ok(CMatrix::zeros(n, 0));
    }
    let below = level(chain, r - 1, n);
    let lifted = (x - CMatrix::identity(n, n) * mu) * level(chain, r + 1, n);
    let mut span = CMatrix::zeros(n, below.ncols() + lifted.ncols());
    span.view_mut((0, 0), (n, below.ncols())).copy_from(&below);
    span.view_mut((0, below.ncols()), (n, lifted.ncols())).copy_from(&lifted);
    let keep = kr.ncols() - m_r;
    if keep == 0 {
        return Ok(kr);
    }
    let r_basis = svd_complex(&span)?.u.columns(0, keep).into_owned();
    let coupling = r_basis.adjoint() * &kr;
    let s = svd_complex(&CMatrix::from_fn(kr.ncols(), kr.ncols(), |i, j| {
        if i < keep {
            coupling[(i, j)]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }))?;
    Ok(&kr * s.v.columns(kr.ncols() - m_r, m_r))
}

fn is_real(mu: Complex64, tol: f64) -> bool {
    mu.im.abs() <= 10.0 * tol
}

/// Heads of the length-`r` Jordan chains at `lambda`. At a real `lambda`
/// of a quaternionic matrix they are returned as Kramers pairs
/// `[v_1, T v_1, v_2, T v_2, ...]`; otherwise as an orthonormal basis.
pub fn chain_heads(x: &CMatrix, lambda: Complex64, r: usize, tol: f64) -> Result<Vec<CVector>> {
    if r == 0 {
        return Ok(vec![]);
    }
    let chain = kernel_chain(x, lambda, tol)?;
    if chain.is_empty() || r > chain.len() {
        return Ok(vec![]);
    }
    let heads = head_space(x, lambda, &chain, r)?;
    let structured = x.nrows().is_multiple_of(2) && require_quaternionic(x, tol).is_ok();
    if structured && is_real(lambda, tol) && heads.ncols() % 2 == 0 {
        let basis = kramers_basis_of_subspace(&heads, &[])?;
        Ok(basis.pairs.into_iter().flat_map(|(v, tv)| [v, tv]).collect())
    } else {
        Ok(heads.column_iter().map(|c| c.into_owned()).collect())
    }
}

struct Cluster {
    members: Vec<Complex64>,
}

impl Cluster {
    fn center(&self) -> Complex64 {
        self.members.iter().sum::<Complex64>() / self.members.len() as f64
    }
}

fn single_linkage(values: &[Complex64], linked: impl Fn(usize, usize) -> bool) -> Vec<Cluster> {
    let n = values.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn root(label: &mut [usize], mut i: usize) -> usize {
        while label[i] != i {
            label[i] = label[label[i]];
            i = label[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if linked(i, j) {
                let (a, b) = (root(&mut label, i), root(&mut label, j));
                label[a.max(b)] = a.min(b);
            }
        }
    }
    let mut clusters: Vec<(usize, Cluster)> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        let r = root(&mut label, i);
        match clusters.iter_mut().find(|(k, _)| *k == r) {
            Some((_, c)) => c.members.push(v),
            None => clusters.push((r, Cluster { members: vec![v] })),
        }
    }
    clusters.into_iter().map(|(_, c)| c).collect()
}

fn analyse(x: &CMatrix, cluster: &Cluster, tol: f64) -> Result<(Complex64, Vec<CMatrix>)> {
    let mut mu = cluster.center();
    if is_real(mu, tol) {
        mu = Complex64::new(mu.re, 0.0);
    }
    Ok((mu, kernel_chain(x, mu, tol)?))
}

fn merge(clusters: &mut Vec<Cluster>, a: usize, b: usize) {
    let other = clusters.remove(a.max(b));
    clusters[a.min(b)].members.extend(other.members);
}

/// Clusters whose size matches the dimension of the generalized eigenspace
/// at their center, with independent generalized eigenspaces. A defective
/// eigenvalue splits into a ring of roots that single linkage at
/// `100 tol |X|` does not join: a cluster of the wrong dimension is merged
/// with its nearest neighbour, and clusters whose eigenspaces nearly
/// intersect are merged with each other.
fn resolve_clusters(x: &CMatrix, values: &[Complex64], tol: f64) -> Result<Vec<(Complex64, Vec<CMatrix>)>> {
    let radius = 100.0 * tol * tol_scale(x);
    let mut clusters = single_linkage(values, |i, j| (values[i] - values[j]).norm() <= radius);
    loop {
        let analysed = clusters.iter().map(|c| analyse(x, c, tol)).collect::<Result<Vec<_>>>()?;
        let spaces: Vec<CMatrix> = analysed
            .iter()
            .map(|(_, chain)| chain.last().cloned().unwrap_or_else(|| CMatrix::zeros(x.nrows(), 0)))
            .collect();
        let inconsistent = (0..clusters.len()).find(|&k| spaces[k].ncols() != clusters[k].members.len());
        if let Some(k) = inconsistent {
            if clusters.len() < 2 {
                return Err(Error::IllConditioned(format!(
                    "{} eigenvalues near {} but generalized eigenspace of dimension {}",
                    clusters[k].members.len(),
                    analysed[k].0,
                    spaces[k].ncols()
                )));
            }
            let center = clusters[k].center();
            let nearest = (0..clusters.len())
                .filter(|&j| j != k)
                .min_by(|&a, &b| {
                    let da = (clusters[a].center() - center).norm();
                    let db = (clusters[b].center() - center).norm();
                    da.total_cmp(&db)
                })
                .unwrap_or(k);
            merge(&mut clusters, k, nearest);
            continue;
        }
        let mut closest: Option<(f64, usize, usize)> = None;
        for a in 0..clusters.len() {
            for b in a + 1..clusters.len() {
                let joint = CMatrix::from_fn(x.nrows(), spaces[a].ncols() + spaces[b].ncols(), |i, j| {
                    if j < spaces[a].ncols() {
                        spaces[a][(i, j)]
                    } else {
                        spaces[b][(i, j - spaces[a].ncols())]
                    }
                });
                let smin = svd_complex(&joint)?.sigma.last().copied().unwrap_or(1.0);
                if smin < DEFECTIVE_ANGLE && closest.is_none_or(|(s, _, _)| smin < s) {
                    closest = Some((smin, a, b));
                }
            }
        }
        match closest {
            Some((_, a, b)) => merge(&mut clusters, a, b),
            None => return Ok(analysed),
        }
    }
}

/// Chains `[(X - mu)^(r-1) b, ..., b]` for every head.
fn build_chains(x: &CMatrix, mu: Complex64, heads: &[CVector], r: usize) -> Vec<Vec<CVector>> {
    let n = x.nrows();
    let shifted = x - CMatrix::identity(n, n) * mu;
    heads
        .iter()
        .map(|b| {
            let mut chain = vec![b.clone()];
            for _ in 1..r {
                let next = &shifted * chain.last().unwrap_or(b);
                chain.push(next);
            }
            chain.reverse();
            chain
        })
        .collect()
}

struct Assembly {
    columns: Vec<CVector>,
    diag: Vec<Complex64>,
    superdiag: Vec<bool>,
    blocks: Vec<JordanBlock>,
    pairing: Vec<usize>,
}

impl Assembly {
    fn push_chain(&mut self, mu: Complex64, chain: Vec<CVector>) -> usize {
        let start = self.columns.len();
        let r = chain.len();
        for (k, v) in chain.into_iter().enumerate() {
            self.columns.push(v);
            self.diag.push(mu);
            self.superdiag.push(k > 0);
            self.pairing.push(usize::MAX);
        }
        self.blocks.push(JordanBlock { eigenvalue: mu, size: r });
        start
    }

    /// A chain together with its image under `T`.
    fn push_pair(&mut self, mu: Complex64, chain: Vec<CVector>) -> Result<()> {
        let r = chain.len();
        let image = chain.iter().map(apply_t).collect::<Result<Vec<_>>>()?;
        let a = self.push_chain(mu, chain);
        let b = self.push_chain(mu.conj(), image);
        for k in 0..r {
            self.pairing[a + k] = b + k;
            self.pairing[b + k] = a + k;
        }
        Ok(())
    }
}

/// Jordan decomposition `X S = S J` of a quaternionic matrix with a basis of
/// Kramers-paired chains.
pub fn jordan_quaternionic(x: &CMatrix, tol: f64) -> Result<JordanResult> {
    let n2 = x.nrows();
    require_quaternionic(x, tol)?;
    let values = eigenvalues(x)?;
    let clusters = resolve_clusters(x, &values, tol)?;
    let mut asm = Assembly {
        columns: Vec::with_capacity(n2),
        diag: Vec::with_capacity(n2),
        superdiag: Vec::with_capacity(n2),
        blocks: Vec::new(),
        pairing: Vec::with_capacity(n2),
    };
    for (mu, chain) in &clusters {
        let mu = *mu;
        if mu.im < 0.0 && !is_real(mu, tol) {
            let dim = chain.last().map_or(0, |k| k.ncols());
            let partner = clusters
                .iter()
                .find(|(nu, _)| (nu.conj() - mu).norm() <= 100.0 * tol * tol_scale(x) + 1e-6 * mu.norm());
            match partner {
                Some((_, pc)) if pc.last().map_or(0, |k| k.ncols()) == dim => continue,
                _ => {
                    return Err(Error::IllConditioned(format!(
                        "eigenvalue {mu} has no conjugate partner of matching multiplicity"
                    )))
                }
            }
        }
        for r in 1..=chain.len() {
            let heads = head_space(x, mu, chain, r)?;
            if heads.ncols() == 0 {
                continue;
            }
            if is_real(mu, tol) {
                if heads.ncols() % 2 != 0 {
                    return Err(Error::IllConditioned(format!(
                        "odd number {} of length-{r} chains at real eigenvalue {mu}",
                        heads.ncols()
                    )));
                }
                let basis = kramers_basis_of_subspace(&heads, &[])?;
                let firsts: Vec<CVector> = basis.firsts().cloned().collect();
                for c in build_chains(x, mu, &firsts, r) {
                    asm.push_pair(mu, c)?;
                }
            } else {
                let hv: Vec<CVector> = heads.column_iter().map(|c| c.into_owned()).collect();
                for c in build_chains(x, mu, &hv, r) {
                    asm.push_pair(mu, c)?;
                }
            }
        }
    }
    if asm.columns.len() != n2 {
        return Err(Error::IllConditioned(format!(
            "assembled {} chain vectors for dimension {n2}",
            asm.columns.len()
        )));
    }
    let mut s = CMatrix::zeros(n2, n2);
    for (k, c) in asm.columns.iter().enumerate() {
        s.set_column(k, c);
    }
    let j = CMatrix::from_fn(n2, n2, |i, k| {
        if i == k {
            asm.diag[i]
        } else if k == i + 1 && asm.superdiag[k] {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let sv = svd_complex(&s)?;
    let smin = sv.sigma.last().copied().unwrap_or(0.0);
    let condition = if smin > 0.0 { sv.sigma_max() / smin } else { f64::INFINITY };
    Ok(JordanResult {
        s,
        j,
        blocks: asm.blocks,
        pairing: asm.pairing,
        condition,
        input: x.clone(),
    })
}

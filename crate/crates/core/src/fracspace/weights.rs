use std::f64::consts::PI;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::fracspace::grid::Grid1D;
use crate::fractime::gamma_fn;

/// Offsets beyond this use the asymptotic series for the second difference.
const SERIES_FROM: usize = 16;
const CACHE_MAGIC: &[u8; 8] = b"FRACKW01";

/// Normalization constant `C_{N,s,p}` of the fractional p-Laplacian.
pub fn kernel_constant(n_dim: usize, s: f64, p: f64) -> Result<f64> {
    if n_dim == 0 {
        return Err(Error::Parameter("dimension must be positive".into()));
    }
    if s == 1.0 {
        return Err(Error::Pole(0.0));
    }
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Parameter(format!("s = {s} outside (0, 1)")));
    }
    if !(p >= 2.0 && p.is_finite()) {
        return Err(Error::Parameter(format!("p = {p} must be at least 2")));
    }
    let nd = n_dim as f64;
    let lead = s * p * 2f64.powf(2.0 * s - 2.0) / PI.powf((nd - 1.0) / 2.0);
    Ok(lead * gamma_fn((nd + s * p) / 2.0)? / (gamma_fn((p + 1.0) / 2.0)? * gamma_fn(1.0 - s)?))
}

/// Cell-pair integrals of the kernel `|x - y|^{-(1+sp)}` on a uniform grid.
///
/// On a uniform grid the pair weight only depends on `|i - j|`, so the
/// symmetric matrix is stored as one row of offsets.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelWeights {
    grid: Grid1D,
    s: f64,
    p: f64,
    offsets: Vec<f64>,
    exterior: Vec<f64>,
}

impl KernelWeights {
    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.offsets.len()
    }

    /// `w[i][j]`; zero on the diagonal.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.offsets[i.abs_diff(j)]
    }

    /// Weight of a pair of cells `k` apart.
    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    /// `e[i]`: interaction of cell `i` with the complement of the interval.
    pub fn exterior(&self) -> &[f64] {
        &self.exterior
    }

    /// Row-major dense copy of `w`.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.n();
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = self.get(i, j);
            }
        }
        out
    }

    pub(crate) fn matches(&self, grid: &Grid1D, s: f64, p: f64) -> bool {
        self.grid == *grid && self.s == s && self.p == p
    }

    /// Writes the binary cache format: magic, `a, b` (f64), `n` (u64),
    /// `s, p` (f64), then the `n` offset weights and the `n` exterior weights,
    /// all little-endian.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::with_capacity(48 + 16 * self.n());
        buf.extend_from_slice(CACHE_MAGIC);
        buf.extend_from_slice(&self.grid.a().to_le_bytes());
        buf.extend_from_slice(&self.grid.b().to_le_bytes());
        buf.extend_from_slice(&(self.n() as u64).to_le_bytes());
        buf.extend_from_slice(&self.s.to_le_bytes());
        buf.extend_from_slice(&self.p.to_le_bytes());
        for v in self.offsets.iter().chain(&self.exterior) {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        let mut f = fs::File::create(path)?;
        f.write_all(&buf)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut bytes = Vec::new();
        fs::File::open(path)?.read_to_end(&mut bytes)?;
        let bad = |m: &str| Error::Io(format!("{}: {m}", path.display()));
        if bytes.len() < 48 || &bytes[..8] != CACHE_MAGIC {
            return Err(bad("not a kernel weight cache"));
        }
        let word = |k: usize| -> [u8; 8] { bytes[8 + 8 * k..16 + 8 * k].try_into().unwrap() };
        let a = f64::from_le_bytes(word(0));
        let b = f64::from_le_bytes(word(1));
        let n = u64::from_le_bytes(word(2)) as usize;
        let s = f64::from_le_bytes(word(3));
        let p = f64::from_le_bytes(word(4));
        if bytes.len() != 48 + 16 * n {
            return Err(bad("truncated weight cache"));
        }
        let vals: Vec<f64> = (0..2 * n).map(|k| f64::from_le_bytes(word(5 + k))).collect();
        let grid = Grid1D::new(a, b, n).map_err(|_| bad("invalid grid in cache"))?;
        Ok(Self { grid, s, p, offsets: vals[..n].to_vec(), exterior: vals[n..].to_vec() })
    }

    /// Cache file name for the key `(a, b, n_cells, s, p)`.
    pub fn cache_path(dir: &Path, grid: &Grid1D, s: f64, p: f64) -> PathBuf {
        dir.join(format!(
            "kw_{:016x}_{:016x}_{}_{:016x}_{:016x}.bin",
            grid.a().to_bits(),
            grid.b().to_bits(),
            grid.n_cells(),
            s.to_bits(),
            p.to_bits()
        ))
    }

    /// Loads the cached weights for this key, assembling and storing them on
    /// a miss.
    pub fn load_or_assemble(dir: &Path, grid: &Grid1D, s: f64, p: f64) -> Result<Self> {
        let path = Self::cache_path(dir, grid, s, p);
        if let Ok(w) = Self::load(&path) {
            if w.matches(grid, s, p) {
                return Ok(w);
            }
        }
        let w = assemble_weights(grid, s, p)?;
        fs::create_dir_all(dir)?;
        w.save(&path)?;
        Ok(w)
    }
}

/// `(d^γ - 1) / (γ (γ - 1))`, the double antiderivative of `d^{-(1+sp)}` up to
/// an affine term, with `γ = 1 - sp`; tends to `-ln d` as `γ → 0`.
fn double_antiderivative(d: f64, gamma: f64) -> f64 {
    if gamma == 0.0 {
        -d.ln()
    } else if d == 0.0 {
        -1.0 / (gamma * (gamma - 1.0))
    } else {
        (gamma * d.ln()).exp_m1() / (gamma * (gamma - 1.0))
    }
}

/// `(d^γ - 1) / (γ sp)`, the antiderivative of `d^{-sp} / sp`.
fn single_antiderivative(d: f64, gamma: f64, sp: f64) -> f64 {
    if gamma == 0.0 {
        d.ln() / sp
    } else if d == 0.0 {
        -1.0 / (gamma * sp)
    } else {
        (gamma * d.ln()).exp_m1() / (gamma * sp)
    }
}

/// `∫_{cell}∫_{cell + k}` of the kernel for unit cells; multiply by `h^γ`.
fn unit_pair_weight(k: usize, sp: f64) -> f64 {
    let gamma = 1.0 - sp;
    let beta = 1.0 + sp;
    if k == 0 {
        return 0.0;
    }
    if k == 1 && gamma <= 0.0 {
        // The touching-cell integral diverges; integrate the neighbour cell
        // exactly from the centre of the first one instead.
        return (0.5f64.powf(-sp) - 1.5f64.powf(-sp)) / sp;
    }
    if k >= SERIES_FROM {
        // Δ²(k^γ)/(γ(γ-1)) = Σ_j 2 β(β+1)…(β+2j-3) / (2j)! · k^{-β-2j+2}
        let kf = k as f64;
        let inv_k2 = 1.0 / (kf * kf);
        let mut rising = 1.0;
        let mut fact = 2.0;
        let mut pow = kf.powf(-beta);
        let mut sum = 0.0;
        for j in 1..=12 {
            let term = 2.0 * rising / fact * pow;
            sum += term;
            if term.abs() <= 1e-17 * sum.abs() {
                break;
            }
            let jf = j as f64;
            rising *= (beta + 2.0 * jf - 2.0) * (beta + 2.0 * jf - 1.0);
            fact *= (2.0 * jf + 1.0) * (2.0 * jf + 2.0);
            pow *= inv_k2;
        }
        return sum;
    }
    let kf = k as f64;
    double_antiderivative(kf + 1.0, gamma) + double_antiderivative(kf - 1.0, gamma)
        - 2.0 * double_antiderivative(kf, gamma)
}

/// `∫_{cell}∫_{y > b}` of the kernel for a unit cell whose near edge is `k`
/// cells from the boundary; multiply by `h^γ`.
fn unit_exterior_side(k: usize, sp: f64) -> f64 {
    let gamma = 1.0 - sp;
    if k == 0 && gamma <= 0.0 {
        // Boundary cell for sp ≥ 1: evaluate the tail integral at the centre.
        return 0.5f64.powf(-sp) / sp;
    }
    let kf = k as f64;
    single_antiderivative(kf + 1.0, gamma, sp) - single_antiderivative(kf, gamma, sp)
}

/// Exact cell-pair and exterior integrals of `|x - y|^{-(1+sp)}`.
///
/// For `sp ≥ 1` the integrals over touching cells diverge; those entries (the
/// adjacent pair and the two boundary cells) integrate exactly in one variable
/// and collocate the other at the cell centre.
pub fn assemble_weights(grid: &Grid1D, s: f64, p: f64) -> Result<KernelWeights> {
    let n = grid.n_cells();
    if n < 2 {
        return Err(Error::Parameter(format!("weight assembly needs at least 2 cells, got {n}")));
    }
    if !(s > 0.0 && s < 1.0) || !(p >= 1.0 && p.is_finite()) {
        return Err(Error::Parameter(format!("(s, p) = ({s}, {p}) out of range")));
    }
    let sp = s * p;
    let scale = grid.h().powf(1.0 - sp);
    let offsets: Vec<f64> = (0..n).map(|k| scale * unit_pair_weight(k, sp)).collect();
    let side: Vec<f64> = (0..n).map(|k| scale * unit_exterior_side(k, sp)).collect();
    let exterior = (0..n).map(|i| side[i] + side[n - 1 - i]).collect();
    Ok(KernelWeights { grid: *grid, s, p, offsets, exterior })
}

//! Full-register reference constructions built from Kronecker products of
//! single-site matrices, independent of the sector machinery.

#![allow(dead_code)]

use spinchaos::hamiltonian::Realization;
use spinchaos::lattice::LatticeSpec;
use spinchaos::linalg::Matrix;
use spinchaos::symmetry::SectorBasis;

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ar, ac, br, bc) = (a.rows(), a.cols(), b.rows(), b.cols());
    Matrix::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

pub fn pauli_x() -> Matrix {
    Matrix::from_vec(2, 2, vec![0.0, 1.0, 1.0, 0.0])
}

pub fn pauli_z() -> Matrix {
    Matrix::from_vec(2, 2, vec![1.0, 0.0, 0.0, -1.0])
}

/// `σ_y = i·A`.
pub fn pauli_a() -> Matrix {
    Matrix::from_vec(2, 2, vec![0.0, -1.0, 1.0, 0.0])
}

/// Raises occupation: bit 0 → bit 1.
pub fn raise() -> Matrix {
    Matrix::from_vec(2, 2, vec![0.0, 0.0, 1.0, 0.0])
}

/// Tensor product with `ops[site]` on each site; site 0 is the least
/// significant bit of the register index.
pub fn product(ops: &[Matrix]) -> Matrix {
    let mut out = Matrix::identity(1);
    for op in ops.iter().rev() {
        out = kron(&out, op);
    }
    out
}

pub fn on_site(l: usize, site: usize, op: &Matrix) -> Matrix {
    let ops: Vec<Matrix> =
        (0..l).map(|s| if s == site { op.clone() } else { Matrix::identity(2) }).collect();
    product(&ops)
}

fn add_scaled(acc: &mut Matrix, m: &Matrix, s: f64) {
    for i in 0..acc.rows() {
        for j in 0..acc.cols() {
            acc[(i, j)] += s * m[(i, j)];
        }
    }
}

pub fn full_hamiltonian(lattice: &LatticeSpec, real: &Realization) -> Matrix {
    let l = lattice.num_sites();
    let dim = 1 << l;
    let mut h = Matrix::zeros(dim, dim);
    let (x, z, a) = (pauli_x(), pauli_z(), pauli_a());
    for (i, e) in real.eps.iter().enumerate() {
        add_scaled(&mut h, &on_site(l, i, &z), 0.5 * e);
    }
    for (b, jb) in lattice.bonds().unwrap().iter().zip(&real.couplings) {
        let xx = on_site(l, b.i, &x).matmul(&on_site(l, b.j, &x));
        let zz = on_site(l, b.i, &z).matmul(&on_site(l, b.j, &z));
        let aa = on_site(l, b.i, &a).matmul(&on_site(l, b.j, &a));
        // σ_y σ_y = (iA)(iA) = −A A.
        add_scaled(&mut h, &xx, 0.25 * jb);
        add_scaled(&mut h, &zz, 0.25 * jb);
        add_scaled(&mut h, &aa, -0.25 * jb);
    }
    h
}

pub fn embed(state: &[f64], basis: &SectorBasis) -> Vec<f64> {
    let mut full = vec![0.0; 1 << basis.sites()];
    for (k, &s) in basis.states().iter().enumerate() {
        full[s as usize] = state[k];
    }
    full
}

pub fn expectation(op: &Matrix, psi: &[f64]) -> f64 {
    psi.iter().zip(op.matvec(psi)).map(|(a, b)| a * b).sum()
}

/// Reduced density matrix from `ρ = 2⁻ⁿ Σ_P ⟨P⟩ P` over real Pauli strings
/// on `sites`; `sites[0]` is the most significant local bit.
pub fn pauli_reconstructed_rdm(psi: &[f64], l: usize, sites: &[usize]) -> Matrix {
    let n = sites.len();
    let singles = [Matrix::identity(2), pauli_x(), pauli_a(), pauli_z()];
    let d = 1 << n;
    let mut rho = Matrix::zeros(d, d);
    for code in 0..(1usize << (2 * n)) {
        let kinds: Vec<usize> = (0..n).map(|k| (code >> (2 * k)) & 3).collect();
        let ys = kinds.iter().filter(|&&k| k == 2).count();
        if ys % 2 == 1 {
            continue;
        }
        let phase = if (ys / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let mut full_ops: Vec<Matrix> = (0..l).map(|_| Matrix::identity(2)).collect();
        for (k, &site) in sites.iter().enumerate() {
            full_ops[site] = singles[kinds[k]].clone();
        }
        let value = phase * expectation(&product(&full_ops), psi);
        // Local operator: sites[0] most significant, so it goes leftmost.
        let mut local = Matrix::identity(1);
        for &kind in &kinds {
            local = kron(&local, &singles[kind]);
        }
        add_scaled(&mut rho, &local, phase * value / d as f64);
    }
    rho
}

/// `M_ij = ⟨c†_i c_j⟩` with `c†_j = (Π_{k<j} σ_z^k) σ⁺_j`.
pub fn full_correlation_matrix(psi: &[f64], l: usize) -> Matrix {
    let creators: Vec<Matrix> = (0..l)
        .map(|j| {
            let ops: Vec<Matrix> = (0..l)
                .map(|s| match s.cmp(&j) {
                    std::cmp::Ordering::Less => pauli_z(),
                    std::cmp::Ordering::Equal => raise(),
                    std::cmp::Ordering::Greater => Matrix::identity(2),
                })
                .collect();
            product(&ops)
        })
        .collect();
    Matrix::from_fn(l, l, |i, j| expectation(&creators[i].matmul(&creators[j].transpose()), psi))
}

pub fn unit_vector(v: Vec<f64>) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / n).collect()
}

/// Pearson correlation coefficient.
pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    sxy / (sxx * syy).sqrt()
}

//! Sampling helpers: Haar unitaries, Ginibre states, random channels.

use nalgebra::Vector3;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::operator::{Matrix, Operator, ZERO};

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(normal(rng), normal(rng))
}

pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Uniform point on the unit sphere.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    loop {
        let v = Vector3::new(normal(rng), normal(rng), normal(rng));
        let n = v.norm();
        if n > 1e-12 {
            return [v.x / n, v.y / n, v.z / n];
        }
    }
}

/// Uniform point on S³, read as an SU(2) quaternion (w, x, y, z).
pub fn unit_quaternion<R: Rng + ?Sized>(rng: &mut R) -> [f64; 4] {
    loop {
        let q = [normal(rng), normal(rng), normal(rng), normal(rng)];
        let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n > 1e-12 {
            return q.map(|v| v / n);
        }
    }
}

/// Haar-random d×d unitary (QR of a Ginibre matrix with phases fixed).
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Matrix {
    let qr = ginibre(rng, d, d).qr();
    let q = qr.q();
    let r = qr.r();
    let mut u = q.clone();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..d {
            u[(i, j)] = q[(i, j)] * phase;
        }
    }
    u
}

/// Random density matrix G G†/Tr from a Ginibre matrix with `rank` columns.
pub fn density_matrix<R: Rng + ?Sized>(rng: &mut R, dims: &[usize], rank: usize) -> Operator {
    let d: usize = dims.iter().product();
    let g = ginibre(rng, d, rank.max(1));
    let rho = &g * g.adjoint();
    let tr = rho.trace().re;
    Operator::new(rho.unscale(tr), dims.to_vec()).expect("dims consistent")
}

/// Kraus operators (d_out × d_in) of a random CPTP map, from a Haar isometry
/// into `d_out · n_kraus` dimensions.
pub fn random_kraus<R: Rng + ?Sized>(rng: &mut R, d_in: usize, d_out: usize, n_kraus: usize) -> Vec<Matrix> {
    let big = d_out * n_kraus;
    assert!(big >= d_in, "environment too small for an isometry");
    let u = haar_unitary(rng, big);
    (0..n_kraus)
        .map(|k| Matrix::from_fn(d_out, d_in, |i, j| u[(k * d_out + i, j)]))
        .collect()
}

/// Unnormalized Choi matrix Σ_k |K_k⟩⟩⟨⟨K_k| with factor order (input, output):
/// entry `[(in, out), (in', out')] = Σ_k K[out, in] conj(K[out', in'])`.
pub fn choi_matrix(kraus: &[Matrix]) -> Matrix {
    let d_out = kraus[0].nrows();
    let d_in = kraus[0].ncols();
    let n = d_in * d_out;
    let mut c = Matrix::from_element(n, n, ZERO);
    for k in kraus {
        for i in 0..d_in {
            for o in 0..d_out {
                let v = k[(o, i)];
                if v == ZERO {
                    continue;
                }
                for i2 in 0..d_in {
                    for o2 in 0..d_out {
                        c[(i * d_out + o, i2 * d_out + o2)] += v * k[(o2, i2)].conj();
                    }
                }
            }
        }
    }
    c
}

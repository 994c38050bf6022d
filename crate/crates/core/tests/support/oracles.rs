//! Independent reference computations shared by integration and acceptance tests.
#![allow(dead_code, clippy::needless_range_loop)]

use biquant_core::poly::{q, Monomial, Poly, TensorPoly};
use biquant_core::{Rational, StructTensor};
use num_traits::Zero;
use rand::Rng;

pub fn mono(m: &Monomial) -> Poly {
    Poly::monomial(m.clone(), q(1))
}

/// `{f,g} = Σ c_{ij}^k x_k ∂_i f ∂_j g`.
pub fn kk_bracket(alpha: &StructTensor, f: &Poly, g: &Poly) -> Poly {
    let d = alpha.dim;
    let mut out = Poly::zero(d);
    for i in 0..d {
        for j in 0..d {
            let prod = f.partial(i).unwrap().mul(&g.partial(j).unwrap()).unwrap();
            for k in 0..d {
                let c = alpha.get(&[i, j], &[k]).clone();
                out = out.add(&prod.mul(&Poly::var(d, k)).unwrap().scale(&c)).unwrap();
            }
        }
    }
    out
}

/// `δ(f) = Σ β_k^{ij} (x_i ⊗ x_j) · Δ(∂_k f)`.
pub fn poisson_cobracket(beta: &StructTensor, f: &Poly) -> TensorPoly {
    let d = beta.dim;
    let mut out = TensorPoly::zero(d, 2);
    for k in 0..d {
        let df = f.partial(k).unwrap().coproduct();
        for i in 0..d {
            for j in 0..d {
                let c = beta.get(&[k], &[i, j]).clone();
                let xij = TensorPoly::pure(&[Poly::var(d, i), Poly::var(d, j)]).unwrap();
                out.add_scaled(&xij.tensor_mul(&df).unwrap(), &c).unwrap();
            }
        }
    }
    out
}

/// Dense `c[i][j][k]` with `[e_i, e_j] = Σ_k c[i][j][k] e_k`.
pub fn dense_bracket(alpha: &StructTensor) -> Vec<Vec<Vec<Rational>>> {
    let d = alpha.dim;
    (0..d).map(|i| (0..d).map(|j| (0..d).map(|k| alpha.get(&[i, j], &[k]).clone()).collect()).collect()).collect()
}

/// Dense `b[k][i][j]` with `δ(e_k) = Σ_{i,j} b[k][i][j] e_i ⊗ e_j`.
pub fn dense_cobracket(beta: &StructTensor) -> Vec<Vec<Vec<Rational>>> {
    let d = beta.dim;
    (0..d).map(|k| (0..d).map(|i| (0..d).map(|j| beta.get(&[k], &[i, j]).clone()).collect()).collect()).collect()
}

/// `[[e_i,e_j],e_l] + cyclic = 0` for all triples.
pub fn jacobi_holds(alpha: &StructTensor) -> bool {
    let c = dense_bracket(alpha);
    let d = alpha.dim;
    for i in 0..d {
        for j in 0..d {
            for l in 0..d {
                for k in 0..d {
                    let mut s = Rational::zero();
                    for m in 0..d {
                        s += &c[i][j][m] * &c[m][l][k] + &c[j][l][m] * &c[m][i][k] + &c[l][i][m] * &c[m][j][k];
                    }
                    if !s.is_zero() {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Cyclic sum of `(δ⊗1)δ` vanishes.
pub fn co_jacobi_holds(beta: &StructTensor) -> bool {
    let b = dense_cobracket(beta);
    let d = beta.dim;
    let t = |k: usize, p: usize, qq: usize, r: usize| -> Rational {
        let mut s = Rational::zero();
        for m in 0..d {
            s += &b[k][m][r] * &b[m][p][qq];
        }
        s
    };
    for k in 0..d {
        for p in 0..d {
            for qq in 0..d {
                for r in 0..d {
                    if !(t(k, p, qq, r) + t(k, qq, r, p) + t(k, r, p, qq)).is_zero() {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// `δ([x,y]) = ad_x δ(y) − ad_y δ(x)` on basis pairs.
pub fn cocycle_holds(alpha: &StructTensor, beta: &StructTensor) -> bool {
    let c = dense_bracket(alpha);
    let b = dense_cobracket(beta);
    let d = alpha.dim;
    let ad = |x: usize, y: usize, p: usize, qq: usize| -> Rational {
        let mut s = Rational::zero();
        for a in 0..d {
            s += &c[x][a][p] * &b[y][a][qq] + &c[x][a][qq] * &b[y][p][a];
        }
        s
    };
    for i in 0..d {
        for j in 0..d {
            for p in 0..d {
                for qq in 0..d {
                    let mut lhs = Rational::zero();
                    for m in 0..d {
                        lhs += &c[i][j][m] * &b[m][p][qq];
                    }
                    if !(lhs - ad(i, j, p, qq) + ad(j, i, p, qq)).is_zero() {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Random unimodular integer matrix and its inverse, from elementary moves.
pub fn unimodular<R: Rng>(d: usize, rng: &mut R) -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let id = |d: usize| (0..d).map(|i| (0..d).map(|j| i64::from(i == j)).collect::<Vec<_>>()).collect::<Vec<_>>();
    let (mut g, mut inv) = (id(d), id(d));
    for _ in 0..4 * d {
        let (r, s) = (rng.random_range(0..d), rng.random_range(0..d));
        if r == s {
            continue;
        }
        let f = rng.random_range(-2i64..=2);
        // g ← g·E with E = 1 + f·e_{rs}: column s += f·column r
        for row in g.iter_mut() {
            row[s] += f * row[r];
        }
        // inv ← E⁻¹·inv: row r −= f·row s
        let rs = inv[s].clone();
        for (x, y) in inv[r].iter_mut().zip(&rs) {
            *x -= f * y;
        }
    }
    (g, inv)
}

/// Transports a bracket and cobracket along `e'_i = Σ_a g[a][i] e_a`.
pub fn change_basis(alpha: &StructTensor, beta: &StructTensor, g: &[Vec<i64>], inv: &[Vec<i64>]) -> (StructTensor, StructTensor) {
    let d = alpha.dim;
    let c = dense_bracket(alpha);
    let b = dense_cobracket(beta);
    let gq = |a: usize, i: usize| q(g[a][i]);
    let iq = |k: usize, c: usize| q(inv[k][c]);
    let mut a2 = StructTensor::zero(d, 2, 1);
    let mut b2 = StructTensor::zero(d, 1, 2);
    for i in 0..d {
        for j in i + 1..d {
            for k in 0..d {
                let mut s = Rational::zero();
                for a in 0..d {
                    for bb in 0..d {
                        for cc in 0..d {
                            s += gq(a, i) * gq(bb, j) * &c[a][bb][cc] * iq(k, cc);
                        }
                    }
                }
                a2.set(&[i, j], &[k], s);
            }
        }
    }
    for k in 0..d {
        for i in 0..d {
            for j in i + 1..d {
                let mut s = Rational::zero();
                for cc in 0..d {
                    for a in 0..d {
                        for bb in 0..d {
                            s += gq(cc, k) * &b[cc][a][bb] * iq(i, a) * iq(j, bb);
                        }
                    }
                }
                b2.set(&[k], &[i, j], s);
            }
        }
    }
    (a2, b2)
}

/// Known Lie bialgebras in dimension 3.
pub fn known_bialgebras_3d() -> Vec<(StructTensor, StructTensor)> {
    let one = q(1);
    let br = |e: &[((usize, usize), usize, Rational)]| StructTensor::from_bracket(3, e);
    let co = |e: &[(usize, (usize, usize), Rational)]| StructTensor::from_cobracket(3, e);
    vec![
        // the 2-dimensional example plus an abelian direction
        (br(&[((0, 1), 1, one.clone())]), co(&[(1, (0, 1), one.clone())])),
        // so(3) with zero cobracket
        (br(&[((0, 1), 2, one.clone()), ((1, 2), 0, one.clone()), ((2, 0), 1, one.clone())]), StructTensor::zero(3, 1, 2)),
        // zero bracket, dual of the Heisenberg bracket as cobracket
        (StructTensor::zero(3, 2, 1), co(&[(2, (0, 1), one.clone())])),
        // Heisenberg bracket with zero cobracket
        (br(&[((0, 1), 2, one.clone())]), StructTensor::zero(3, 1, 2)),
    ]
}

/// Sparse random antisymmetric tensor.
pub fn sparse_random<R: Rng>(dim: usize, a: usize, b: usize, rng: &mut R) -> StructTensor {
    let mut t = StructTensor::random(dim, a, b, 2, rng);
    let entries = t.independent_entries();
    for (ins, outs, _) in entries {
        if rng.random_bool(0.6) {
            t.set(&ins, &outs, Rational::zero());
        }
    }
    t
}

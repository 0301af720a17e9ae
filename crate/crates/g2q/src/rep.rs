//! The 7-dimensional standard U_q(G_2) module.
//!
//! Generator actions on V and its tensor powers, the invariant bilinear
//! form with its cup/cap maps, the four block projectors of V⊗V, the
//! R-matrix, the trivalent-vertex maps γ and p, quantum dimensions and
//! invariant subspaces.
//!
//! The weight basis of V is ordered `(v_1, v_2, v_3, v_0, v_-3, v_-2, v_-1)`
//! as fixed in [`crate::tensorla::LABELS`].

use crate::exactq::{qint, LaurentPoly, RatFunc};
use crate::tensorla::{
    pow7, EchelonBasis, LegIndex, LinMap, SparseTensor, SpanTracker, LABELS,
};
use crate::Check;
use std::sync::OnceLock;

fn qp(k: i64) -> RatFunc {
    RatFunc::q_pow(k)
}

fn rq(terms: &[(i64, i64)]) -> RatFunc {
    RatFunc::from_poly(LaurentPoly::from_terms(terms))
}

/// Quantum dimension of V as a Laurent polynomial.
pub fn dim_q_v() -> RatFunc {
    rq(&[(10, 1), (8, 1), (2, 1), (0, 1), (-2, 1), (-8, 1), (-10, 1)])
}

/// The loop value of the trivalent vertex pair: [7]_q − 1.
pub fn seven_q_minus_one() -> RatFunc {
    RatFunc::from_poly(qint(7)).sub(&RatFunc::one())
}

/// The Chevalley-style generators of U_q(G_2) together with the inverse
/// Cartan elements and the pivotal element K_{2ρ}.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Gen {
    E1,
    E2,
    F1,
    F2,
    K1,
    K2,
    K1Inv,
    K2Inv,
    K2Rho,
}

/// The generators whose joint kernel/fixed space defines invariance.
pub const INVARIANCE_GENS: [Gen; 6] = [Gen::E1, Gen::E2, Gen::F1, Gen::F2, Gen::K1, Gen::K2];

/// Weight of a basis label as the pair of (K_1, K_2) eigenvalue exponents.
pub fn weight(label: i8) -> [i64; 2] {
    match label {
        1 => [1, 0],
        2 => [-1, 3],
        3 => [2, -3],
        0 => [0, 0],
        -3 => [-2, 3],
        -2 => [1, -3],
        -1 => [-1, 0],
        _ => panic!("unknown basis label {}", label),
    }
}

/// Total weight of a multi-index.
pub fn index_weight(idx: &LegIndex) -> [i64; 2] {
    let mut w = [0i64; 2];
    for l in idx.labels() {
        let wl = weight(l);
        w[0] += wl[0];
        w[1] += wl[1];
    }
    w
}

/// Off-diagonal matrix entries of π(g) for g ∈ {E_1, E_2, F_1, F_2}, as
/// `(to, from, coefficient)` triples: π(g) v_from = coefficient · v_to + …
fn offdiag_entries(g: Gen) -> Vec<(i8, i8, RatFunc)> {
    let qq = rq(&[(1, 1), (-1, 1)]); // q + q^-1
    match g {
        Gen::E1 => vec![
            (1, 2, RatFunc::one()),
            (3, 0, qq.clone()),
            (0, -3, qq.neg()),
            (-2, -1, RatFunc::from_int(-1)),
        ],
        Gen::E2 => vec![(2, 3, RatFunc::one()), (-3, -2, RatFunc::from_int(-1))],
        Gen::F1 => vec![
            (2, 1, RatFunc::one()),
            (0, 3, RatFunc::one()),
            (-3, 0, RatFunc::from_int(-1)),
            (-1, -2, RatFunc::from_int(-1)),
        ],
        Gen::F2 => vec![(3, 2, RatFunc::one()), (-2, -3, RatFunc::from_int(-1))],
        _ => panic!("offdiag_entries: {:?} is diagonal", g),
    }
}

/// K-type exponent of `g` on a basis label (the eigenvalue is q^exponent).
fn k_exponent(g: Gen, label: i8) -> i64 {
    let w = weight(label);
    match g {
        Gen::K1 => w[0],
        Gen::K1Inv => -w[0],
        Gen::K2 => w[1],
        Gen::K2Inv => -w[1],
        Gen::K2Rho => 2 * (5 * w[0] + 3 * w[1]),
        _ => panic!("k_exponent: {:?} is not diagonal", g),
    }
}

/// The matrix of π(g) on V as a 1-leg linear map.
pub fn gen_matrix(g: Gen) -> LinMap {
    match g {
        Gen::K1 | Gen::K2 | Gen::K1Inv | Gen::K2Inv | Gen::K2Rho => {
            LinMap::from_fn(1, 1, |idx| {
                let e = k_exponent(g, idx.labels()[0]);
                SparseTensor::basis(idx).scale(&qp(e))
            })
        }
        _ => {
            let entries = offdiag_entries(g);
            LinMap::from_fn(1, 1, |idx| {
                let from = idx.labels()[0];
                let mut out = SparseTensor::zero(1);
                for (to, f, c) in &entries {
                    if *f == from {
                        out.add_term(LegIndex::from_labels(&[*to]), c);
                    }
                }
                out
            })
        }
    }
}

/// Coproduct-iterated action of a generator on an n-leg tensor:
/// E_i acts as Σ_k id^{k−1} ⊗ E_i ⊗ K_i^{n−k}, F_i as
/// Σ_k K_i^{-(k−1)} ⊗ F_i ⊗ id^{n−k}, and the K's act diagonally.
pub fn act(g: Gen, x: &SparseTensor) -> SparseTensor {
    let n = x.legs();
    let mut out = SparseTensor::zero(n);
    match g {
        Gen::K1 | Gen::K2 | Gen::K1Inv | Gen::K2Inv | Gen::K2Rho => {
            for (idx, c) in x.iter() {
                let e: i64 = idx.labels().iter().map(|&l| k_exponent(g, l)).sum();
                out.add_term(idx, &c.mul_q_pow(e));
            }
        }
        Gen::E1 | Gen::E2 | Gen::F1 | Gen::F2 => {
            let raising = matches!(g, Gen::E1 | Gen::E2);
            let simple = if matches!(g, Gen::E1 | Gen::F1) { 0 } else { 1 };
            let entries = offdiag_entries(g);
            for (idx, c) in x.iter() {
                let labels = idx.labels();
                for k in 0..n {
                    for (to, from, m) in &entries {
                        if labels[k] != *from {
                            continue;
                        }
                        // Coproduct twist: trailing K_i for E_i, leading
                        // K_i^{-1} for F_i.
                        let twist: i64 = if raising {
                            labels[k + 1..].iter().map(|&l| weight(l)[simple]).sum()
                        } else {
                            -labels[..k].iter().map(|&l| weight(l)[simple]).sum::<i64>()
                        };
                        let mut new_labels = labels.clone();
                        new_labels[k] = *to;
                        out.add_term(
                            LegIndex::from_labels(&new_labels),
                            &c.mul(m).mul_q_pow(twist),
                        );
                    }
                }
            }
        }
    }
    out
}

/// Coefficient φ_{ab} of v_a ⊗ v_b in the canonical invariant vector c_0.
pub fn phi_coeff(a: i8, b: i8) -> RatFunc {
    match (a, b) {
        (0, 0) => RatFunc::one(),
        (1, -1) => qp(4),
        (-1, 1) => qp(-6),
        (2, -2) => qp(3),
        (-2, 2) => qp(-5),
        (3, -3) => RatFunc::one(),
        (-3, 3) => qp(-2),
        _ => RatFunc::zero(),
    }
}

/// The bilinear pairing (v_a, v_b) = Ĉ(v_a ⊗ v_b); this is (φ^{-1})_{ab}.
pub fn form_pairing(a: i8, b: i8) -> RatFunc {
    match (a, b) {
        (0, 0) => RatFunc::one(),
        (1, -1) => qp(6),
        (-1, 1) => qp(-4),
        (2, -2) => qp(5),
        (-2, 2) => qp(-3),
        (3, -3) => qp(2),
        (-3, 3) => RatFunc::one(),
        _ => RatFunc::zero(),
    }
}

/// The invariant vector c_0 = Σ φ_{ab} v_a ⊗ v_b spanning (V⊗V)^{U_q}.
pub fn c0() -> SparseTensor {
    let mut t = SparseTensor::zero(2);
    for &a in &LABELS {
        for &b in &LABELS {
            t.add_term(LegIndex::from_labels(&[a, b]), &phi_coeff(a, b));
        }
    }
    t
}

fn t2(terms: &[(RatFunc, i8, i8)]) -> SparseTensor {
    let mut t = SparseTensor::zero(2);
    for (c, a, b) in terms {
        t.add_term(LegIndex::from_labels(&[*a, *b]), c);
    }
    t
}

/// The 27 weight-basis vectors of the V_{2λ_1} block of V⊗V.
pub fn basis_2lambda1() -> Vec<SparseTensor> {
    let one = RatFunc::one();
    let mut out: Vec<SparseTensor> = Vec::with_capacity(27);
    // Squares of the extreme-weight vectors.
    for &a in &[1i8, 2, 3, -3, -2, -1] {
        out.push(t2(&[(one.clone(), a, a)]));
    }
    // Symmetrized pairs v_i⊗v_j + b v_j⊗v_i together with their images
    // under negating all labels (which reverses the factor order).
    let pairs: [(i8, i8, i64); 6] = [
        (1, 2, 1),
        (1, 3, 1),
        (2, -3, 1),
        (2, 0, 2),
        (3, 0, 2),
        (2, 3, 3),
    ];
    for &(i, j, e) in &pairs {
        let b = qp(e);
        out.push(t2(&[(one.clone(), i, j), (b.clone(), j, i)]));
        out.push(t2(&[(one.clone(), -j, -i), (b.clone(), -i, -j)]));
    }
    let c = rq(&[(-2, 1), (0, 1)]); // q^-2 + 1
    out.push(t2(&[
        (one.clone(), 0, 1),
        (qp(-2), 1, 0),
        (qp(-1), 2, 3),
        (qp(-2), 3, 2),
    ]));
    out.push(t2(&[
        (qp(2), -1, 0),
        (one.clone(), -3, -2),
        (qp(1), -2, -3),
        (one.clone(), 0, -1),
    ]));
    out.push(t2(&[
        (c.clone(), 0, 2),
        (c.clone(), 2, 0),
        (one.neg(), -3, 1),
        (qp(-3).neg(), 1, -3),
    ]));
    out.push(t2(&[
        (one.clone(), 0, -2),
        (one.clone(), -2, 0),
        (qp(-2).neg(), 3, -1),
        (qp(1).neg(), -1, 3),
    ]));
    out.push(t2(&[
        (one.clone(), -2, 1),
        (qp(-3), 1, -2),
        (c.clone(), 3, 0),
        (c.clone(), 0, 3),
    ]));
    out.push(t2(&[
        (one.clone(), -1, 2),
        (qp(-3), 2, -1),
        (qp(-1), 0, -3),
        (qp(-1), -3, 0),
    ]));
    out.push(t2(&[
        (one.clone(), -2, 2),
        (qp(-4), 2, -2),
        (qp(-1).neg(), 3, -3),
        (qp(-3).neg(), -3, 3),
    ]));
    out.push(t2(&[
        (c.clone(), 0, 0),
        (one.neg(), -3, 3),
        (qp(-4).neg(), 3, -3),
    ]));
    out.push(t2(&[
        (c.mul_int(2), 0, 0),
        (qp(-3), 2, -2),
        (qp(-1), -2, 2),
        (one.neg(), -1, 1),
        (qp(-4).neg(), 1, -1),
        (c.neg(), -3, 3),
        (c.mul_q_pow(-2).neg(), 3, -3),
    ]));
    out
}

/// The 14 weight-basis vectors of the V_{λ_2} block of V⊗V.
pub fn basis_lambda2() -> Vec<SparseTensor> {
    let one = RatFunc::one();
    let mut out: Vec<SparseTensor> = Vec::with_capacity(14);
    // Antisymmetrized pairs v_i⊗v_j − q^{-1} v_j⊗v_i and their images
    // under negating all labels (reversing the factor order).
    for &(i, j) in &[(1i8, 2i8), (1, 3), (2, -3)] {
        out.push(t2(&[(one.clone(), i, j), (qp(-1).neg(), j, i)]));
        out.push(t2(&[(one.clone(), -j, -i), (qp(-1).neg(), -i, -j)]));
    }
    let c = rq(&[(-2, 1), (0, 1)]); // q^-2 + 1
    let d = rq(&[(-1, 1), (1, 1)]); // q^-1 + q
    out.push(t2(&[
        (one.clone(), 2, 3),
        (qp(-3).neg(), 3, 2),
        (qp(-1), 1, 0),
        (qp(-1).neg(), 0, 1),
    ]));
    out.push(t2(&[
        (one.clone(), -3, -2),
        (qp(-3).neg(), -2, -3),
        (c.clone(), 0, -1),
        (c.neg(), -1, 0),
    ]));
    out.push(t2(&[
        (one.clone(), 1, -3),
        (qp(1).neg(), -3, 1),
        (d.clone(), 0, 2),
        (d.mul_q_pow(2).neg(), 2, 0),
    ]));
    out.push(t2(&[
        (one.clone(), 3, -1),
        (qp(1).neg(), -1, 3),
        (one.clone(), -2, 0),
        (qp(2).neg(), 0, -2),
    ]));
    out.push(t2(&[
        (one.clone(), 1, -2),
        (qp(1).neg(), -2, 1),
        (d.mul_q_pow(2), 3, 0),
        (d.neg(), 0, 3),
    ]));
    out.push(t2(&[
        (one.clone(), 2, -1),
        (qp(1).neg(), -1, 2),
        (qp(2), 0, -3),
        (one.neg(), -3, 0),
    ]));
    out.push(t2(&[
        (one.clone(), 2, -2),
        (qp(2).neg(), -2, 2),
        (qp(3).neg(), 3, -3),
        (qp(-1), -3, 3),
    ]));
    out.push(t2(&[
        (rq(&[(3, 1), (-1, -1)]), 0, 0),
        (qp(-1).neg(), 1, -1),
        (qp(1), -1, 1),
        (one.clone(), 2, -2),
        (one.neg(), -2, 2),
        (d.neg(), 3, -3),
        (d.clone(), -3, 3),
    ]));
    out
}

/// The image b_a = γ(v_a) of the weight basis under the vertex embedding
/// γ: V → V⊗V, listed in label order; these span the V_{λ_1} block.
pub fn basis_lambda1() -> Vec<SparseTensor> {
    let one = RatFunc::one();
    let e = rq(&[(-3, 1), (-1, 1)]); // q^-3 + q^-1
    let f = rq(&[(-2, 1), (0, 1)]); // q^-2 + 1
    vec![
        // b_1
        t2(&[
            (one.clone(), 1, 0),
            (qp(-6).neg(), 0, 1),
            (e.neg(), 2, 3),
            (e.mul_q_pow(-3), 3, 2),
        ]),
        // b_2
        t2(&[
            (qp(-4), 0, 2),
            (qp(-2).neg(), 2, 0),
            (qp(-1).neg(), 1, -3),
            (qp(-6), -3, 1),
        ]),
        // b_3
        t2(&[
            (qp(-1), 1, -2),
            (qp(-6).neg(), -2, 1),
            (qp(-2).neg(), 3, 0),
            (qp(-4), 0, 3),
        ]),
        // b_0
        t2(&[
            (qp(-6), -1, 1),
            (qp(-2).neg(), 1, -1),
            (rq(&[(-2, -1), (-4, 1)]), 0, 0),
            (qp(-1), 2, -2),
            (qp(-7).neg(), -2, 2),
            (qp(-4), 3, -3),
            (qp(-4).neg(), -3, 3),
        ]),
        // b_-3
        t2(&[
            (f.clone(), 2, -1),
            (f.mul_q_pow(-5).neg(), -1, 2),
            (qp(-2).neg(), 0, -3),
            (qp(-4), -3, 0),
        ]),
        // b_-2
        t2(&[
            (qp(-4), -2, 0),
            (qp(-2).neg(), 0, -2),
            (f.neg(), 3, -1),
            (f.mul_q_pow(-5), -1, 3),
        ]),
        // b_-1
        t2(&[
            (one.clone(), 0, -1),
            (qp(-6).neg(), -1, 0),
            (qp(-2).neg(), -3, -2),
            (qp(-5), -2, -3),
        ]),
    ]
}

/// Gauss-Jordan inverse of the square matrix whose columns are the given
/// 2-leg tensors (rows indexed by the 49 tensor basis codes).
///
/// # Panics
///
/// Panics if the matrix is singular, which would indicate a transcription
/// error in one of the block bases.
fn invert_columns(cols: &[SparseTensor]) -> Vec<Vec<RatFunc>> {
    let n = cols.len();
    assert_eq!(n as u64, pow7(2));
    let mut a = vec![vec![RatFunc::zero(); 2 * n]; n];
    for (c, col) in cols.iter().enumerate() {
        for (idx, v) in col.iter() {
            a[idx.code() as usize][c] = v.clone();
        }
    }
    for (r, row) in a.iter_mut().enumerate() {
        row[n + r] = RatFunc::one();
    }
    for col in 0..n {
        let piv = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .expect("singular basis-change matrix: block basis transcription error");
        a.swap(col, piv);
        let inv = a[col][col].inv().expect("nonzero pivot");
        for x in a[col].iter_mut() {
            if !x.is_zero() {
                *x = x.mul(&inv);
            }
        }
        let pivot_row = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x = x.sub(&f.mul(p));
                }
            }
        }
    }
    a.into_iter().map(|mut row| row.split_off(n)).collect()
}

/// The structure maps of V and V⊗V: cup/cap, vertex maps, projectors and
/// the R-matrix.  Built once and shared via [`structure_maps`].
#[derive(Clone)]
pub struct StructureMaps {
    /// The invariant vector c_0 (the cup applied to 1).
    pub c0: SparseTensor,
    /// Č: scalars → V⊗V.
    pub cup: LinMap,
    /// Ĉ: V⊗V → scalars.
    pub cap: LinMap,
    /// γ: V → V⊗V, v_a ↦ b_a.
    pub gamma: LinMap,
    /// p: V⊗V → V, the left inverse of γ scaled so p∘γ = −([7]_q−1)·id.
    pub pmap: LinMap,
    pub p_2lambda1: LinMap,
    pub p_lambda2: LinMap,
    pub p_lambda1: LinMap,
    pub p_0: LinMap,
    /// The braiding Ř on V⊗V.
    pub rmat: LinMap,
    pub rmat_inv: LinMap,
}

impl StructureMaps {
    fn build() -> StructureMaps {
        let c0 = c0();
        let cup = LinMap::from_columns(0, 2, [(LegIndex::empty(), c0.clone())]);
        let cap = LinMap::from_fn(2, 0, |idx| {
            let l = idx.labels();
            SparseTensor::scalar(form_pairing(l[0], l[1]))
        });
        let b20 = basis_2lambda1();
        let b01 = basis_lambda2();
        let b10 = basis_lambda1();
        let gamma = LinMap::from_columns(
            1,
            2,
            LABELS
                .iter()
                .zip(&b10)
                .map(|(&a, b)| (LegIndex::from_labels(&[a]), b.clone())),
        );
        let mut cols: Vec<SparseTensor> = Vec::with_capacity(49);
        cols.extend(b20);
        cols.extend(b01);
        cols.extend(b10.iter().cloned());
        cols.push(c0.clone());
        let inv = invert_columns(&cols);
        let projector = |range: std::ops::Range<usize>| {
            LinMap::from_fn(2, 2, |idx| {
                let j = idx.code() as usize;
                let mut t = SparseTensor::zero(2);
                for k in range.clone() {
                    t.add_scaled(&cols[k], &inv[k][j]);
                }
                t
            })
        };
        let p_2lambda1 = projector(0..27);
        let p_lambda2 = projector(27..41);
        let p_lambda1 = projector(41..48);
        let p_0 = projector(48..49);
        let scale = seven_q_minus_one().neg();
        let pmap = LinMap::from_fn(2, 1, |idx| {
            let j = idx.code() as usize;
            let mut t = SparseTensor::zero(1);
            for (k, &a) in (41..48).zip(&LABELS) {
                t.add_term(
                    LegIndex::from_labels(&[a]),
                    &inv[k][j].mul(&scale),
                );
            }
            t
        });
        let spectral = |e20: &RatFunc, e01: &RatFunc, e10: &RatFunc, e0: &RatFunc| {
            p_2lambda1
                .scale(e20)
                .add(&p_lambda2.scale(e01))
                .add(&p_lambda1.scale(e10))
                .add(&p_0.scale(e0))
        };
        let rmat = spectral(&qp(2), &RatFunc::from_int(-1), &qp(-6).neg(), &qp(-12));
        let rmat_inv = spectral(&qp(-2), &RatFunc::from_int(-1), &qp(6).neg(), &qp(12));
        StructureMaps {
            c0,
            cup,
            cap,
            gamma,
            pmap,
            p_2lambda1,
            p_lambda2,
            p_lambda1,
            p_0,
            rmat,
            rmat_inv,
        }
    }
}

/// The shared, lazily built structure maps.
pub fn structure_maps() -> &'static StructureMaps {
    static MAPS: OnceLock<StructureMaps> = OnceLock::new();
    MAPS.get_or_init(StructureMaps::build)
}

/// Quantum trace of an n-leg endomorphism: trace of K_{2ρ}^{⊗n} ∘ f.
pub fn quantum_trace(f: &LinMap) -> RatFunc {
    assert_eq!(f.in_legs(), f.out_legs(), "quantum trace needs an endomorphism");
    let mut total = RatFunc::zero();
    for (idx, col) in f.iter_columns() {
        let diag = col.coeff(&idx);
        if !diag.is_zero() {
            let w = index_weight(&idx);
            total = total.add(&diag.mul_q_pow(2 * (5 * w[0] + 3 * w[1])));
        }
    }
    total
}

/// Quantum dimension of V^{⊗n}.
pub fn quantum_dim(n: usize) -> RatFunc {
    quantum_trace(&LinMap::identity(n))
}

/// Echelon basis of the invariants (V^{⊗n})^{U_q}: the joint kernel of the
/// E_i and F_i actions inside the weight-0 subspace (on which the K_i are
/// automatically fixed).
pub fn invariant_space(n: usize) -> EchelonBasis {
    let mut span: Vec<SparseTensor> = (0..pow7(n))
        .map(|c| LegIndex::from_code(n, c))
        .filter(|idx| index_weight(idx) == [0, 0])
        .map(SparseTensor::basis)
        .collect();
    for g in [Gen::E1, Gen::E2, Gen::F1, Gen::F2] {
        let mut tracker = SpanTracker::new(n);
        let mut next: Vec<SparseTensor> = Vec::new();
        for (k, x) in span.iter().enumerate() {
            if let Some(combo) = tracker.insert(&act(g, x)) {
                let mut v = SparseTensor::zero(n);
                for (c, y) in combo.iter().zip(&span[..=k]) {
                    v.add_scaled(y, c);
                }
                next.push(v);
            }
        }
        span = next;
    }
    let basis = EchelonBasis::from_vectors(n, span);
    // Redundant guard: the K_i really do fix every basis row.
    for row in basis.rows() {
        debug_assert_eq!(&act(Gen::K1, row), row);
        debug_assert_eq!(&act(Gen::K2, row), row);
    }
    basis
}

fn check_maps(id: &str, lhs: &LinMap, rhs: &LinMap) -> Check {
    Check::expect(id, lhs == rhs, format!("map mismatch in {}", id))
}

/// Matrix identities of the generator assignment: Cartan conjugation,
/// K-inverses, the pivotal element, and the E/F commutators on V.
pub fn rep_suite() -> Vec<Check> {
    let mut checks = Vec::new();
    let cartan = [[2i64, -3], [-3, 6]];
    let e = [gen_matrix(Gen::E1), gen_matrix(Gen::E2)];
    let f = [gen_matrix(Gen::F1), gen_matrix(Gen::F2)];
    let k = [gen_matrix(Gen::K1), gen_matrix(Gen::K2)];
    let kinv = [gen_matrix(Gen::K1Inv), gen_matrix(Gen::K2Inv)];
    for i in 0..2 {
        checks.push(check_maps(
            &format!("k{}-inverse", i + 1),
            &k[i].compose(&kinv[i]),
            &LinMap::identity(1),
        ));
        for j in 0..2 {
            let pairing = cartan[i][j];
            checks.push(check_maps(
                &format!("cartan-conj-k{}-e{}", i + 1, j + 1),
                &k[i].compose(&e[j]).compose(&kinv[i]),
                &e[j].scale(&qp(pairing)),
            ));
            checks.push(check_maps(
                &format!("cartan-conj-k{}-f{}", i + 1, j + 1),
                &k[i].compose(&f[j]).compose(&kinv[i]),
                &f[j].scale(&qp(-pairing)),
            ));
        }
    }
    // [E_i, F_j] = δ_ij (K_i − K_i^{-1}) / (q_i − q_i^{-1}) with q_1 = q,
    // q_2 = q^3.
    for i in 0..2 {
        for j in 0..2 {
            let lhs = e[i].compose(&f[j]).sub(&f[j].compose(&e[i]));
            let rhs = if i == j {
                let di = 2 * i as i64 + 1;
                let denom = rq(&[(di, 1), (-di, -1)]);
                k[i].sub(&kinv[i]).scale(&denom.inv().expect("nonzero"))
            } else {
                LinMap::zero(1, 1)
            };
            checks.push(check_maps(&format!("ef-commutator-{}{}", i + 1, j + 1), &lhs, &rhs));
        }
    }
    let k2rho = gen_matrix(Gen::K2Rho);
    let k5k3 = k[0]
        .compose(&k[0])
        .compose(&k[0])
        .compose(&k[0])
        .compose(&k[0])
        .compose(&k[1])
        .compose(&k[1])
        .compose(&k[1]);
    checks.push(check_maps("k2rho-product", &k2rho, &k5k3.compose(&k5k3)));
    // Spot actions on tensors.
    let v3 = SparseTensor::basis(LegIndex::from_labels(&[3]));
    checks.push(Check::expect(
        "act-e2-v3",
        act(Gen::E2, &v3) == SparseTensor::basis(LegIndex::from_labels(&[2])),
        "E_2 v_3 != v_2",
    ));
    let v11 = SparseTensor::basis(LegIndex::from_labels(&[1, 1]));
    checks.push(Check::expect(
        "act-k1-v11",
        act(Gen::K1, &v11) == v11.scale(&qp(2)),
        "K_1 (v_1⊗v_1) != q^2 v_1⊗v_1",
    ));
    let c = c0();
    for g in [Gen::E1, Gen::E2, Gen::F1, Gen::F2] {
        checks.push(Check::expect(
            format!("act-{:?}-c0-vanishes", g).to_lowercase(),
            act(g, &c).is_zero(),
            format!("{:?} does not annihilate c_0", g),
        ));
    }
    for g in [Gen::K1, Gen::K2] {
        checks.push(Check::expect(
            format!("act-{:?}-c0-fixed", g).to_lowercase(),
            act(g, &c) == c,
            format!("{:?} does not fix c_0", g),
        ));
    }
    // Projector algebra.
    let m = structure_maps();
    let projs = [
        ("2lambda1", &m.p_2lambda1),
        ("lambda2", &m.p_lambda2),
        ("lambda1", &m.p_lambda1),
        ("0", &m.p_0),
    ];
    let mut total = LinMap::zero(2, 2);
    for (name, p) in &projs {
        checks.push(check_maps(&format!("projector-{}-idempotent", name), &p.compose(p), p));
        total = total.add(p);
    }
    for a in 0..projs.len() {
        for b in 0..projs.len() {
            if a != b {
                checks.push(check_maps(
                    &format!("projector-{}-kills-{}", projs[a].0, projs[b].0),
                    &projs[a].1.compose(projs[b].1),
                    &LinMap::zero(2, 2),
                ));
            }
        }
    }
    checks.push(check_maps("projector-sum-identity", &total, &LinMap::identity(2)));
    checks.push(Check::expect(
        "projector-lambda1-kills-v11",
        m.p_lambda1.apply(&v11).is_zero(),
        "P[λ_1](v_1⊗v_1) != 0",
    ));
    checks.push(Check::expect(
        "projector-0-fixes-c0",
        m.p_0.apply(&c) == c,
        "P[0](c_0) != c_0",
    ));
    // R-matrix identities.
    checks.push(Check::expect(
        "rmat-v11",
        m.rmat.apply(&v11) == v11.scale(&qp(2)),
        "Ř(v_1⊗v_1) != q^2 v_1⊗v_1",
    ));
    checks.push(check_maps("rmat-inverse", &m.rmat.compose(&m.rmat_inv), &LinMap::identity(2)));
    let mut equivariant = true;
    let mut witness = String::new();
    'outer: for g in INVARIANCE_GENS {
        for code in 0..pow7(2) {
            let x = SparseTensor::basis(LegIndex::from_code(2, code));
            if act(g, &m.rmat.apply(&x)) != m.rmat.apply(&act(g, &x)) {
                equivariant = false;
                witness = format!("{:?} on basis code {}", g, code);
                break 'outer;
            }
        }
    }
    checks.push(Check::expect("rmat-equivariance", equivariant, witness));
    let id1 = LinMap::identity(1);
    let r1 = m.rmat.tensor(&id1);
    let r2 = id1.tensor(&m.rmat);
    checks.push(check_maps(
        "braid-relation",
        &r1.compose(&r2).compose(&r1),
        &r2.compose(&r1).compose(&r2),
    ));
    let shift = |c: RatFunc| m.rmat.sub(&LinMap::identity(2).scale(&c));
    let quartic = shift(qp(2))
        .compose(&shift(qp(-12)))
        .compose(&shift(RatFunc::from_int(-1)))
        .compose(&shift(qp(-6).neg()));
    checks.push(check_maps("rmat-minimal-polynomial", &quartic, &LinMap::zero(2, 2)));
    checks.push(Check::expect(
        "quantum-dim-v",
        quantum_dim(1) == dim_q_v(),
        format!("dim_q V = {}", quantum_dim(1)),
    ));
    checks
}

/// The structure-map identities: zig-zags, loop values, Ř on cups/caps,
/// the γ/p compatibilities and the seven vertex pairings.
pub fn gamma_p_suite() -> Vec<Check> {
    let m = structure_maps();
    let id1 = LinMap::identity(1);
    let mut checks = Vec::new();
    checks.push(check_maps(
        "zigzag-left",
        &m.cap.tensor(&id1).compose(&id1.tensor(&m.cup)),
        &id1,
    ));
    checks.push(check_maps(
        "zigzag-right",
        &id1.tensor(&m.cap).compose(&m.cup.tensor(&id1)),
        &id1,
    ));
    let loop_value = m.cap.compose(&m.cup).column(&LegIndex::empty()).scalar_value();
    checks.push(Check::expect(
        "cap-cup-loop",
        loop_value == dim_q_v(),
        format!("closed loop = {}", loop_value),
    ));
    checks.push(check_maps(
        "cup-cap-projector",
        &m.cup.compose(&m.cap),
        &m.p_0.scale(&dim_q_v()),
    ));
    checks.push(check_maps("rmat-cup", &m.rmat.compose(&m.cup), &m.cup.scale(&qp(-12))));
    checks.push(check_maps("cap-rmat", &m.cap.compose(&m.rmat), &m.cap.scale(&qp(-12))));
    checks.push(check_maps(
        "rmat-inv-cup",
        &m.rmat_inv.compose(&m.cup),
        &m.cup.scale(&qp(12)),
    ));
    checks.push(check_maps(
        "cap-rmat-inv",
        &m.cap.compose(&m.rmat_inv),
        &m.cap.scale(&qp(12)),
    ));
    let minus_q6_p = m.pmap.scale(&qp(-6).neg());
    checks.push(check_maps(
        "gamma-cap-left",
        &id1.tensor(&m.cap).compose(&m.gamma.tensor(&id1)),
        &minus_q6_p,
    ));
    checks.push(check_maps(
        "gamma-cap-right",
        &m.cap.tensor(&id1).compose(&id1.tensor(&m.gamma)),
        &minus_q6_p,
    ));
    let pair4 = m.cap.compose(&id1.tensor(&m.cap).tensor(&id1));
    checks.push(check_maps(
        "gamma-gamma-cap",
        &pair4.compose(&m.gamma.tensor(&m.gamma)),
        &m.cap.scale(&seven_q_minus_one().mul_q_pow(-6)),
    ));
    checks.push(check_maps(
        "p-gamma",
        &m.pmap.compose(&m.gamma),
        &id1.scale(&seven_q_minus_one().neg()),
    ));
    // The seven vertex pairings Ĉ(id⊗Ĉ⊗id)(b_r ⊗ b_s).
    let b = basis_lambda1();
    let b_of = |a: i8| &b[digit_of(a)];
    let pairings: [(i8, i8, i64); 7] = [
        (1, -1, 0),
        (-1, 1, -10),
        (2, -2, -1),
        (-2, 2, -9),
        (3, -3, -4),
        (-3, 3, -6),
        (0, 0, -6),
    ];
    let c7 = seven_q_minus_one();
    for &(r, s, e) in &pairings {
        let value = pair4.apply(&b_of(r).tensor(b_of(s))).scalar_value();
        let expected = c7.mul_q_pow(e);
        checks.push(Check::expect(
            format!("pairing-b{}-b{}", r, s),
            value == expected,
            format!("pairing = {}, expected {}", value, expected),
        ));
    }
    checks
}

fn digit_of(a: i8) -> usize {
    LABELS.iter().position(|&l| l == a).expect("basis label")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::all_pass;

    #[test]
    fn generator_matrices_match_listed_entries() {
        let e1 = gen_matrix(Gen::E1);
        let v2 = SparseTensor::basis(LegIndex::from_labels(&[2]));
        assert_eq!(e1.apply(&v2), SparseTensor::basis(LegIndex::from_labels(&[1])));
        let v0 = SparseTensor::basis(LegIndex::from_labels(&[0]));
        assert_eq!(
            e1.apply(&v0),
            SparseTensor::basis(LegIndex::from_labels(&[3])).scale(&rq(&[(1, 1), (-1, 1)]))
        );
        let k1 = gen_matrix(Gen::K1);
        let v3 = SparseTensor::basis(LegIndex::from_labels(&[3]));
        assert_eq!(k1.apply(&v3), v3.scale(&qp(2)));
        let k2rho = gen_matrix(Gen::K2Rho);
        let v1 = SparseTensor::basis(LegIndex::from_labels(&[1]));
        assert_eq!(k2rho.apply(&v1), v1.scale(&qp(10)));
    }

    #[test]
    fn weights_are_consistent_with_cartan_matrix() {
        // E_i shifts weights by the i-th row of the symmetrized pairings.
        for (g, shift) in [(Gen::E1, [2i64, -3]), (Gen::E2, [-3, 6])] {
            for (to, from, _) in offdiag_entries(g) {
                let wt = weight(to);
                let wf = weight(from);
                assert_eq!([wt[0] - wf[0], wt[1] - wf[1]], shift);
            }
        }
    }

    #[test]
    fn rep_suite_passes() {
        let checks = rep_suite();
        assert!(all_pass(&checks), "failures: {:?}", checks.iter().filter(|c| !c.pass).collect::<Vec<_>>());
    }

    #[test]
    fn gamma_p_suite_passes() {
        let checks = gamma_p_suite();
        assert!(all_pass(&checks), "failures: {:?}", checks.iter().filter(|c| !c.pass).collect::<Vec<_>>());
    }

    #[test]
    fn block_bases_are_weight_vectors_in_their_blocks() {
        let m = structure_maps();
        for v in basis_2lambda1() {
            assert_eq!(m.p_2lambda1.apply(&v), v);
        }
        for v in basis_lambda2() {
            assert_eq!(m.p_lambda2.apply(&v), v);
        }
        for v in basis_lambda1() {
            assert_eq!(m.p_lambda1.apply(&v), v);
        }
        assert_eq!(m.p_0.apply(&c0()), c0());
    }

    #[test]
    fn gamma_is_equivariant() {
        let m = structure_maps();
        for g in INVARIANCE_GENS {
            for &a in &LABELS {
                let x = SparseTensor::basis(LegIndex::from_labels(&[a]));
                assert_eq!(
                    act(g, &m.gamma.apply(&x)),
                    m.gamma.apply(&act(g, &x)),
                    "gamma not equivariant for {:?} at label {}",
                    g,
                    a
                );
            }
        }
    }

    #[test]
    fn quantum_dimensions() {
        assert_eq!(quantum_dim(1), dim_q_v());
        assert_eq!(quantum_dim(2), dim_q_v().mul(&dim_q_v()));
        assert_eq!(
            quantum_dim(1).eval_at_one().expect("no pole"),
            num::BigRational::from_integer(7.into())
        );
    }

    #[test]
    fn invariant_space_dimensions_small() {
        assert_eq!(invariant_space(0).dim(), 1);
        assert_eq!(invariant_space(1).dim(), 0);
        let inv2 = invariant_space(2);
        assert_eq!(inv2.dim(), 1);
        assert!(inv2.contains(&c0()));
        assert_eq!(invariant_space(3).dim(), 1);
    }
}

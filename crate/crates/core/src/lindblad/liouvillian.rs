//! Superoperator of the effective master equation on vectorized density
//! matrices.
//!
//! Vectorization stacks columns: `vec(rho)[col * d + row] = rho[row, col]`,
//! so `vec(X rho Y) = (Y^T (x) X) vec(rho)`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_complex::Complex64;

use super::operators::{hermitize, DensityMatrix, FockConfig, OperatorMatrix, Operators};
use crate::error::{Error, Result};
use crate::model::DressedParams;
use crate::moments::{Moment, MomentSystem, MomentVector, MOMENT_COUNT};
use crate::numerics::{constrained_nullvector, ComplexMatrix, ShiftedSolver};
use crate::spectrum::{SpectrumKind, SpectrumSamples};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Row-compressed sparse complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    n: usize,
    rows: Vec<Vec<(usize, Complex64)>>,
}

impl SparseMatrix {
    pub fn from_dense(m: &ComplexMatrix) -> Self {
        let rows = (0..m.rows())
            .map(|i| m.row(i).iter().enumerate().filter(|(_, v)| **v != ZERO).map(|(j, &v)| (j, v)).collect())
            .collect();
        Self { n: m.cols(), rows }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn row(&self, i: usize) -> &[(usize, Complex64)] {
        &self.rows[i]
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; self.rows.len()];
        self.mul_add(ONE, x, &mut out);
        out
    }

    /// `out += c * self * x`.
    pub fn mul_add(&self, c: Complex64, x: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.n);
        for (o, row) in out.iter_mut().zip(&self.rows) {
            let s: Complex64 = row.iter().map(|&(j, v)| v * x[j]).sum();
            *o += c * s;
        }
    }

    fn entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        self.rows.iter().enumerate().flat_map(|(i, r)| r.iter().map(move |&(j, v)| (i, j, v)))
    }
}

/// Accumulates `sum_k c_k (Y_k^T (x) X_k)`.
pub(crate) struct SuperBuilder {
    d: usize,
    rows: Vec<BTreeMap<usize, Complex64>>,
}

impl SuperBuilder {
    fn new(d: usize) -> Self {
        Self { d, rows: vec![BTreeMap::new(); d * d] }
    }

    /// Adds `c * vec(X rho Y)`.
    fn sandwich(&mut self, c: Complex64, x: &SparseMatrix, y: &SparseMatrix) {
        let d = self.d;
        for (r, rp, xv) in x.entries() {
            for (cp, col, yv) in y.entries() {
                *self.rows[col * d + r].entry(cp * d + rp).or_insert(ZERO) += c * xv * yv;
            }
        }
    }

    fn left(&mut self, c: Complex64, x: &SparseMatrix, identity: &SparseMatrix) {
        self.sandwich(c, x, identity);
    }

    fn right(&mut self, c: Complex64, y: &SparseMatrix, identity: &SparseMatrix) {
        self.sandwich(c, identity, y);
    }

    /// `-i [H, .]`
    fn hamiltonian(&mut self, h: &OperatorMatrix, identity: &SparseMatrix) {
        let hs = SparseMatrix::from_dense(h);
        self.left(-I, &hs, identity);
        self.right(I, &hs, identity);
    }

    /// `rate (L . L^dag - {L^dag L, .}/2)`
    fn dissipator(&mut self, rate: f64, l: &OperatorMatrix, identity: &SparseMatrix) {
        if rate == 0.0 {
            return;
        }
        let ls = SparseMatrix::from_dense(l);
        let ld = SparseMatrix::from_dense(&l.adjoint());
        let ldl = SparseMatrix::from_dense(&l.adjoint().matmul(l));
        let r = Complex64::new(rate, 0.0);
        self.sandwich(r, &ls, &ld);
        self.left(-0.5 * r, &ldl, identity);
        self.right(-0.5 * r, &ldl, identity);
    }

    fn finish(self) -> SparseMatrix {
        let n = self.d * self.d;
        let rows = self
            .rows
            .into_iter()
            .map(|r| r.into_iter().filter(|(_, v)| *v != ZERO).collect())
            .collect();
        SparseMatrix { n, rows }
    }
}

pub fn vectorize(rho: &ComplexMatrix) -> Vec<Complex64> {
    let d = rho.rows();
    let mut v = vec![ZERO; d * d];
    for r in 0..d {
        for c in 0..d {
            v[c * d + r] = rho[(r, c)];
        }
    }
    v
}

pub fn unvectorize(v: &[Complex64], d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |r, c| v[c * d + r])
}

/// `Tr(O rho)` as a linear functional on `vec(rho)`: weights `O[c, r]` at
/// index `c * d + r`.
fn trace_functional(op: &ComplexMatrix) -> Vec<(usize, Complex64)> {
    let d = op.rows();
    let mut w = Vec::new();
    for c in 0..d {
        for (r, &v) in op.row(c).iter().enumerate() {
            if v != ZERO {
                w.push((c * d + r, v));
            }
        }
    }
    w
}

fn apply_functional(w: &[(usize, Complex64)], v: &[Complex64]) -> Complex64 {
    w.iter().map(|&(i, c)| c * v[i]).sum()
}

/// The seven moments whose partners follow by conjugation.
const INDEPENDENT: [Moment; 7] =
    [Moment::R3, Moment::A, Moment::R3A, Moment::A2, Moment::AdagA, Moment::R3A2, Moment::R3AdagA];

/// Operator products entering the moment vector.
#[derive(Clone, Debug)]
pub(crate) struct MomentFunctionals {
    funcs: Vec<Vec<(usize, Complex64)>>,
}

impl MomentFunctionals {
    pub(crate) fn new(ops: &Operators) -> Self {
        let a2 = ops.a.matmul(&ops.a);
        let n = ops.adag.matmul(&ops.a);
        let products = [
            ops.r3.clone(),
            ops.a.clone(),
            ops.r3.matmul(&ops.a),
            a2.clone(),
            n.clone(),
            ops.r3.matmul(&a2),
            ops.r3.matmul(&n),
        ];
        Self { funcs: products.iter().map(trace_functional).collect() }
    }

    pub(crate) fn evaluate(&self, v: &[Complex64]) -> MomentVector {
        let mut m = MomentVector::zeros();
        for (moment, f) in INDEPENDENT.iter().zip(&self.funcs) {
            let z = apply_functional(f, v);
            if moment.partner() == *moment {
                m[*moment] = Complex64::new(z.re, 0.0);
            } else {
                m[*moment] = z;
                m[moment.partner()] = z.conj();
            }
        }
        m
    }

    /// Raw traces for all eleven moments, without imposing pairing.
    pub(crate) fn evaluate_raw(&self, v: &[Complex64], adjoint_v: &[Complex64]) -> MomentVector {
        // Tr(O^dag X) = conj(Tr(O X^dag))
        let mut m = MomentVector::zeros();
        for (moment, f) in INDEPENDENT.iter().zip(&self.funcs) {
            m[*moment] = apply_functional(f, v);
            if moment.partner() != *moment {
                m[moment.partner()] = apply_functional(f, adjoint_v).conj();
            }
        }
        m
    }
}

/// Effective master-equation generator.
#[derive(Clone, Debug)]
pub struct Liouvillian {
    ops: Operators,
    matrix: SparseMatrix,
    functionals: MomentFunctionals,
}

/// Hamiltonian of the effective equation without the resonant coupling:
/// `-delta_c a^dag a + sh R3 a^dag a + (sh/2) R3 + (tp/2) R3 (a^2 + a^dag^2)`.
pub(crate) fn effective_hamiltonian(ops: &Operators, dressed: &DressedParams, delta_c: f64) -> OperatorMatrix {
    let sh = dressed.cavity_shift();
    let tp = dressed.two_photon();
    let n = ops.number();
    let pair = &ops.a.matmul(&ops.a) + &ops.adag.matmul(&ops.adag);
    let mut h = n.scale(Complex64::new(-delta_c, 0.0));
    h.add_scaled(Complex64::new(sh, 0.0), &ops.r3.matmul(&n));
    h.add_scaled(Complex64::new(sh / 2.0, 0.0), &ops.r3);
    h.add_scaled(Complex64::new(tp / 2.0, 0.0), &ops.r3.matmul(&pair));
    h
}

/// `(a^dag - a) R3`, the anti-Hermitian resonant coupling.
pub(crate) fn resonant_coupling(ops: &Operators) -> OperatorMatrix {
    (&ops.adag - &ops.a).matmul(&ops.r3)
}

pub(crate) fn check_rates(dressed: &DressedParams) -> Result<()> {
    if dressed.gamma0 < 0.0 {
        return Err(Error::NegativeRate(dressed.gamma0));
    }
    for (name, v) in [("gamma_plus", dressed.gamma_plus), ("gamma_minus", dressed.gamma_minus), ("kappa", dressed.kappa)] {
        if !(v >= 0.0) || !v.is_finite() {
            return Err(Error::InvalidParameter { name, reason: format!("rate must be finite and >= 0, got {v}") });
        }
    }
    Ok(())
}

/// Adds the dissipators and the resonant coupling shared by the effective and
/// time-dependent equations.
fn add_common_terms(b: &mut SuperBuilder, ops: &Operators, dressed: &DressedParams, id: &SparseMatrix) {
    let x = SparseMatrix::from_dense(&resonant_coupling(ops));
    let g1 = Complex64::new(dressed.g1, 0.0);
    // g1 [X, rho] kept as a commutator with the anti-Hermitian X
    b.left(g1, &x, id);
    b.right(-g1, &x, id);
    b.dissipator(dressed.gamma0, &ops.r3, id);
    b.dissipator(dressed.gamma_minus, &ops.r21, id);
    b.dissipator(dressed.gamma_plus, &ops.r12, id);
    b.dissipator(dressed.kappa, &ops.a, id);
}

pub fn build_liouvillian(dressed: &DressedParams, delta_c: f64, fock: FockConfig) -> Result<Liouvillian> {
    check_rates(dressed)?;
    let ops = Operators::new(fock);
    let id = SparseMatrix::from_dense(&ops.identity);
    let mut b = SuperBuilder::new(ops.dim());
    b.hamiltonian(&effective_hamiltonian(&ops, dressed, delta_c), &id);
    add_common_terms(&mut b, &ops, dressed, &id);
    let functionals = MomentFunctionals::new(&ops);
    Ok(Liouvillian { matrix: b.finish(), ops, functionals })
}

pub(crate) fn builder(d: usize) -> SuperBuilder {
    SuperBuilder::new(d)
}

pub(crate) fn finish(b: SuperBuilder) -> SparseMatrix {
    b.finish()
}

pub(crate) fn hamiltonian_term(b: &mut SuperBuilder, h: &OperatorMatrix, id: &SparseMatrix) {
    b.hamiltonian(h, id);
}

impl Liouvillian {
    pub fn operators(&self) -> &Operators {
        &self.ops
    }

    pub fn fock(&self) -> FockConfig {
        self.ops.fock
    }

    /// Hilbert-space dimension `d`; the superoperator acts on `d^2`.
    pub fn dim(&self) -> usize {
        self.ops.dim()
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn apply_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.matrix.mul_vec(v)
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        unvectorize(&self.apply_vec(&vectorize(rho)), self.dim())
    }

    /// `max_j |sum_r L[(r, r), j]|`: how far `Tr(L rho)` is from vanishing.
    pub fn trace_preservation_error(&self) -> f64 {
        let d = self.dim();
        let mut sums = vec![ZERO; d * d];
        for r in 0..d {
            for &(j, v) in self.matrix.row(r * d + r) {
                sums[j] += v;
            }
        }
        sums.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Smallest index set containing `seeds` and closed under the action of
    /// the generator; any state supported there stays there.
    pub fn invariant_sector(&self, seeds: &[usize]) -> Vec<usize> {
        let n = self.matrix.dim();
        // column adjacency: j -> rows i with L[i, j] != 0
        let mut cols: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, j, _) in self.matrix.entries() {
            cols[j].push(i);
        }
        let mut seen: BTreeSet<usize> = seeds.iter().copied().collect();
        let mut queue: VecDeque<usize> = seeds.iter().copied().collect();
        while let Some(j) = queue.pop_front() {
            for &i in &cols[j] {
                if seen.insert(i) {
                    queue.push_back(i);
                }
            }
        }
        seen.into_iter().collect()
    }

    /// Dense restriction to an invariant index set.
    pub fn restricted(&self, sector: &[usize]) -> ComplexMatrix {
        let mut position = vec![usize::MAX; self.matrix.dim()];
        for (k, &i) in sector.iter().enumerate() {
            position[i] = k;
        }
        let mut m = ComplexMatrix::zeros(sector.len(), sector.len());
        for (k, &i) in sector.iter().enumerate() {
            for &(j, v) in self.matrix.row(i) {
                let p = position[j];
                if p != usize::MAX {
                    m[(k, p)] = v;
                }
            }
        }
        m
    }

    fn trace_row(&self, sector: &[usize]) -> Vec<Complex64> {
        let d = self.dim();
        sector.iter().map(|&i| if i % d == i / d { ONE } else { ZERO }).collect()
    }

    /// Moments of a density matrix.
    pub fn moments(&self, rho: &DensityMatrix) -> MomentVector {
        self.functionals.evaluate(&vectorize(rho.matrix()))
    }

    /// `max |Tr(O L(rho)) - (A m(rho) + b)|` over the eleven moments, relative
    /// to the largest predicted derivative (at least 1).
    pub fn closure_residual(&self, system: &MomentSystem, rho: &DensityMatrix) -> f64 {
        let v = vectorize(rho.matrix());
        let lv = self.apply_vec(&v);
        let lv_adj = vectorize(&unvectorize(&lv, self.dim()).adjoint());
        let traced = self.functionals.evaluate_raw(&lv, &lv_adj);
        let predicted = system.derivative(&self.functionals.evaluate(&v));
        let scale = predicted.as_slice().iter().map(|z| z.norm()).fold(1.0, f64::max);
        (0..MOMENT_COUNT)
            .map(|i| (traced.as_slice()[i] - predicted.as_slice()[i]).norm())
            .fold(0.0, f64::max)
            / scale
    }

    /// Fixed-step fourth-order integration of `d rho / dt = L rho`.
    pub fn evolve(&self, rho: &DensityMatrix, t: f64, steps: usize) -> Result<ComplexMatrix> {
        if !(t >= 0.0) || !t.is_finite() || steps == 0 {
            return Err(Error::Integrator(format!("need finite t >= 0 and steps > 0, got t = {t}, steps = {steps}")));
        }
        let dt = t / steps as f64;
        let mut v = vectorize(rho.matrix());
        for k in 0..steps {
            v = rk4_step(&v, k as f64 * dt, dt, |x, _| self.apply_vec(x));
        }
        Ok(unvectorize(&v, self.dim()))
    }
}

pub(crate) fn rk4_step(v: &[Complex64], t: f64, dt: f64, f: impl Fn(&[Complex64], f64) -> Vec<Complex64>) -> Vec<Complex64> {
    let axpy = |a: &[Complex64], s: f64, b: &[Complex64]| -> Vec<Complex64> { a.iter().zip(b).map(|(x, y)| x + y * s).collect() };
    let k1 = f(v, t);
    let k2 = f(&axpy(v, dt / 2.0, &k1), t + dt / 2.0);
    let k3 = f(&axpy(v, dt / 2.0, &k2), t + dt / 2.0);
    let k4 = f(&axpy(v, dt, &k3), t + dt);
    v.iter()
        .enumerate()
        .map(|(i, x)| x + (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (dt / 6.0))
        .collect()
}

/// Unique trace-one stationary state.
pub fn steady_density(l: &Liouvillian) -> Result<DensityMatrix> {
    let fock = l.fock();
    let seed = {
        let g = fock.index(0, 0);
        g * l.dim() + g
    };
    let sector = l.invariant_sector(&[seed]);
    let dense = l.restricted(&sector);
    let x = constrained_nullvector(&dense, &l.trace_row(&sector), ONE)?.x;
    let d = l.dim();
    let mut v = vec![ZERO; d * d];
    for (k, &i) in sector.iter().enumerate() {
        v[i] = x[k];
    }
    let mut rho = unvectorize(&v, d);
    let herm = rho.hermiticity_error();
    if herm > super::operators::HERMITICITY_TOLERANCE {
        return Err(Error::InvalidDensity(format!("stationary state not Hermitian (deviation {herm:.3e})")));
    }
    hermitize(&mut rho);
    DensityMatrix::new(rho)
}

/// Moments of a density matrix.
pub fn moments_from_density(rho: &DensityMatrix) -> Result<MomentVector> {
    let d = rho.dim();
    if d % 2 != 0 || d < 4 {
        return Err(Error::Dimension(format!("density dimension {d} is not 2 (n_max + 1)")));
    }
    let fock = FockConfig::new(d / 2 - 1)?;
    Ok(MomentFunctionals::new(&Operators::new(fock)).evaluate(&vectorize(rho.matrix())))
}

/// Incoherent spectrum by the regression theorem on the full generator.
pub fn spectrum_from_liouvillian(l: &Liouvillian, rho_ss: &DensityMatrix, grid: &[f64]) -> Result<SpectrumSamples> {
    let d = l.dim();
    let ops = l.operators();
    let mean_a = rho_ss.expectation(&ops.a);
    let shifted = &ops.a - &ops.identity.scale(mean_a);
    let source = vectorize(&shifted.matmul(rho_ss.matrix()));
    let rho_v = vectorize(rho_ss.matrix());
    let seeds: Vec<usize> = (0..d * d).filter(|&i| source[i] != ZERO || rho_v[i] != ZERO).collect();
    let sector = l.invariant_sector(&seeds);
    let mut dense = l.restricted(&sector);
    // Deflate the stationary mode: for traceless sources the solution is
    // unchanged, and the resolvent stays regular at delta = 0.
    let trace_row = l.trace_row(&sector);
    for (k, &i) in sector.iter().enumerate() {
        let rk = rho_v[i];
        if rk == ZERO {
            continue;
        }
        for (p, t) in trace_row.iter().enumerate() {
            if *t != ZERO {
                dense[(k, p)] -= rk * t;
            }
        }
    }
    let solver = ShiftedSolver::new(&dense)?;
    let src: Vec<Complex64> = sector.iter().map(|&i| source[i]).collect();
    let weights: Vec<(usize, Complex64)> = {
        let mut pos = vec![usize::MAX; d * d];
        for (k, &i) in sector.iter().enumerate() {
            pos[i] = k;
        }
        trace_functional(&ops.adag)
            .into_iter()
            .filter_map(|(i, w)| (pos[i] != usize::MAX).then(|| (pos[i], w)))
            .collect()
    };
    let values = grid
        .iter()
        .map(|&delta| {
            let x = solver.solve(I * delta, &src)?;
            Ok(2.0 * apply_functional(&weights, &x).re)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumSamples { delta: grid.to_vec(), values, kind: SpectrumKind::Incoherent })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{derive_dressed, CouplingMode, ReservoirProfile, SystemParams};
    use crate::moments::assemble;

    fn dressed(g: f64, gp: f64, gm: f64, gamma0: f64, mode: CouplingMode) -> DressedParams {
        let p = SystemParams { g, kappa: 1.0, epsilon: 24.0, delta_a: 14.0, ..SystemParams::default() };
        let mut d = derive_dressed(&p, &ReservoirProfile::transparent(), mode).unwrap().with_sideband_rates(gp, gm).unwrap();
        d.gamma0 = gamma0;
        d
    }

    fn fock(n: usize) -> FockConfig {
        FockConfig::new(n).unwrap()
    }

    #[test]
    fn vectorization_convention() {
        let x = ComplexMatrix::from_fn(3, 3, |i, j| Complex64::new(i as f64, j as f64));
        let y = ComplexMatrix::from_fn(3, 3, |i, j| Complex64::new((i * j) as f64, 1.0));
        let rho = ComplexMatrix::from_fn(3, 3, |i, j| Complex64::new(1.0 + i as f64, -(j as f64)));
        let mut b = SuperBuilder::new(3);
        b.sandwich(ONE, &SparseMatrix::from_dense(&x), &SparseMatrix::from_dense(&y));
        let got = unvectorize(&b.finish().mul_vec(&vectorize(&rho)), 3);
        assert!((&got - &x.matmul(&rho).matmul(&y)).max_abs() < 1e-12);
    }

    #[test]
    fn trace_preserving() {
        let l = build_liouvillian(&dressed(0.7, 2.0, 0.3, 0.2, CouplingMode::NonSecular), 0.4, fock(6)).unwrap();
        assert!(l.trace_preservation_error() < 1e-12);
    }

    #[test]
    fn anti_hermitian_coupling_equals_hamiltonian_form() {
        let ops = Operators::new(fock(5));
        let x = resonant_coupling(&ops);
        let h = x.scale(I);
        assert!(h.hermiticity_error() < 1e-15);
        let rho = ComplexMatrix::from_fn(ops.dim(), ops.dim(), |i, j| Complex64::new((i + 2 * j) as f64, (i * j) as f64 * 0.1));
        let as_written = x.commutator(&rho);
        let as_hamiltonian = h.commutator(&rho).scale(-I);
        assert!((&as_written - &as_hamiltonian).max_abs() < 1e-12);
    }

    #[test]
    fn negative_central_rate_rejected() {
        let d = dressed(0.5, 1.0, 0.1, -0.01, CouplingMode::NonSecular);
        assert_eq!(build_liouvillian(&d, 0.0, fock(3)).err(), Some(Error::NegativeRate(-0.01)));
    }

    #[test]
    fn only_downward_jumps_relax_to_ground() {
        let l = build_liouvillian(&dressed(0.0, 1.5, 0.0, 0.0, CouplingMode::NonSecular), 0.2, fock(4)).unwrap();
        let rho = steady_density(&l).unwrap();
        assert!((rho.matrix()[(0, 0)] - ONE).norm() < 1e-12);
        let m = l.moments(&rho);
        assert!(m.max_relative_difference(&MomentVector::ground()) < 1e-12);
    }

    #[test]
    fn detailed_balance_without_cavity_coupling() {
        let d = dressed(0.0, 1.5, 0.4, 0.3, CouplingMode::NonSecular);
        let l = build_liouvillian(&d, 0.2, fock(4)).unwrap();
        let rho = steady_density(&l).unwrap();
        let f = l.fock();
        let ratio = rho.matrix()[(f.index(1, 0), f.index(1, 0))].re / rho.matrix()[(0, 0)].re;
        assert!((ratio - 0.4 / 1.5).abs() < 1e-12);
        assert!((l.moments(&rho)[Moment::R3].re + d.gamma2 / d.gamma1).abs() < 1e-12);
    }

    #[test]
    fn undriven_spectrum_vanishes() {
        let l = build_liouvillian(&dressed(0.0, 1.5, 0.4, 0.3, CouplingMode::NonSecular), 0.2, fock(3)).unwrap();
        let rho = steady_density(&l).unwrap();
        let s = spectrum_from_liouvillian(&l, &rho, &[-1.0, 0.0, 2.0]).unwrap();
        assert!(s.values.iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn ground_state_moments() {
        let f = fock(4);
        let m = moments_from_density(&DensityMatrix::coherent(f, 0, ZERO).unwrap()).unwrap();
        assert_eq!(m, MomentVector::ground());
    }

    #[test]
    fn small_oracle_matches_moment_solve() {
        let d = dressed(0.3, 2.0, 0.2, 0.1, CouplingMode::NonSecular);
        let l = build_liouvillian(&d, 0.3, fock(12)).unwrap();
        let rho = steady_density(&l).unwrap();
        let exact = assemble(&d, 0.3).steady_state().unwrap();
        assert!(l.moments(&rho).max_relative_difference(&exact) < 1e-8);
    }

    #[test]
    fn evolution_preserves_trace_and_hermiticity() {
        let d = dressed(0.6, 2.0, 0.2, 0.1, CouplingMode::NonSecular);
        let l = build_liouvillian(&d, 0.3, fock(8)).unwrap();
        let rho0 = DensityMatrix::coherent(l.fock(), 1, Complex64::new(0.3, 0.2)).unwrap();
        let rho = l.evolve(&rho0, 2.0, 400).unwrap();
        assert!((rho.trace() - ONE).norm() < 1e-8);
        assert!(rho.hermiticity_error() < 1e-10);
        assert!(DensityMatrix::new(rho).is_ok());
    }
}

//! Brute-force reference implementations used to check the library's closed
//! forms. None of these call into the code under test beyond plain data types.

#![allow(dead_code)]

use num_complex::Complex64 as C64;

pub const SWEEP_SAMPLES: usize = 4096;
pub const REFINE_TOL: f64 = 1e-12;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for the minimum of `f` on `[a, b]`.
pub fn golden_min(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > REFINE_TOL {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    f(0.5 * (a + b))
}

/// Largest and smallest value of a 2π-periodic function: a uniform grid
/// followed by golden-section refinement around the best grid points.
pub fn periodic_extrema(f: &dyn Fn(f64) -> f64) -> (f64, f64) {
    let step = std::f64::consts::TAU / SWEEP_SAMPLES as f64;
    let grid: Vec<f64> = (0..SWEEP_SAMPLES).map(|i| f(i as f64 * step)).collect();
    let arg = |better: &dyn Fn(f64, f64) -> bool| {
        (0..SWEEP_SAMPLES)
            .reduce(|best, i| if better(grid[i], grid[best]) { i } else { best })
            .unwrap()
    };
    let imax = arg(&|a, b| a > b);
    let imin = arg(&|a, b| a < b);
    let around = |i: usize| ((i as f64 - 1.0) * step, (i as f64 + 1.0) * step);
    let (a, b) = around(imax);
    let max = -golden_min(&|x| -f(x), a, b);
    let (a, b) = around(imin);
    let min = golden_min(f, a, b);
    (max.max(grid[imax]), min.min(grid[imin]))
}

pub fn visibility_from_extrema(max: f64, min: f64) -> f64 {
    (max - min) / (max + min)
}

/// Lossless splitter acting as `|0⟩ → t|0⟩ + ir|1⟩`, `|1⟩ → ir|0⟩ + t|1⟩`.
pub fn splitter(r: f64, t: f64) -> [[C64; 2]; 2] {
    let t = C64::new(t, 0.0);
    let ir = C64::new(0.0, r);
    [[t, ir], [ir, t]]
}

fn apply(u: &[[C64; 2]; 2], v: [C64; 2]) -> [C64; 2] {
    [
        u[0][0] * v[0] + u[0][1] * v[1],
        u[1][0] * v[0] + u[1][1] * v[1],
    ]
}

/// Output-port-0 probability of `(|0⟩ + e^{iφ}|1⟩)/√2` after one splitter,
/// swept over φ.
pub fn sweep_visibility_1q(r: f64, t: f64) -> f64 {
    let u = splitter(r, t);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let p = |phi: f64| {
        let out = apply(&u, [C64::new(h, 0.0), C64::from_polar(h, phi)]);
        out[0].norm_sqr()
    };
    let (max, min) = periodic_extrema(&p);
    visibility_from_extrema(max, min)
}

/// Two-photon state as a 4-vector in the order |00⟩,|01⟩,|10⟩,|11⟩ after a
/// splitter on each photon.
fn two_splitters(u1: &[[C64; 2]; 2], u2: &[[C64; 2]; 2], psi: [C64; 4]) -> [C64; 4] {
    let mut out = [C64::new(0.0, 0.0); 4];
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                for d in 0..2 {
                    out[2 * a + b] += u1[a][c] * u2[b][d] * psi[2 * c + d];
                }
            }
        }
    }
    out
}

/// Coincidence probability at output `|01⟩` for `(|01⟩ + e^{iφ}|10⟩)/√2`
/// with one splitter per photon, swept over φ.
pub fn sweep_visibility_2q(r1: f64, t1: f64, r2: f64, t2: f64) -> f64 {
    let (u1, u2) = (splitter(r1, t1), splitter(r2, t2));
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let z = C64::new(0.0, 0.0);
    let p = |phi: f64| {
        let psi = [z, C64::new(h, 0.0), C64::from_polar(h, phi), z];
        two_splitters(&u1, &u2, psi)[1].norm_sqr()
    };
    let (max, min) = periodic_extrema(&p);
    visibility_from_extrema(max, min)
}

/// Coincidence probability at `|01⟩` for a 4×4 density matrix (row-major)
/// after a phase shifter on the `|10⟩` component and balanced splitters.
pub fn sweep_visibility_mixed(rho: &[C64]) -> f64 {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (u1, u2) = (splitter(h, h), splitter(h, h));
    let p = |phi: f64| {
        // ⟨01| U ρ U† |01⟩ = Σ_ij w_i ρ_ij w_j*, w_i = ⟨01|U|i⟩
        let mut w = [C64::new(0.0, 0.0); 4];
        for (i, wi) in w.iter_mut().enumerate() {
            let mut e = [C64::new(0.0, 0.0); 4];
            e[i] = if i == 2 {
                C64::from_polar(1.0, phi)
            } else {
                C64::new(1.0, 0.0)
            };
            *wi = two_splitters(&u1, &u2, e)[1];
        }
        let mut s = C64::new(0.0, 0.0);
        for i in 0..4 {
            for j in 0..4 {
                s += w[i] * rho[4 * i + j] * w[j].conj();
            }
        }
        s.re
    };
    let (max, min) = periodic_extrema(&p);
    visibility_from_extrema(max, min)
}

/// Polarization purity of the momentum-extended state, by building the
/// pol⊗kappa amplitudes explicitly and tracing kappa with nested loops.
pub fn brute_force_pol_purity(alpha: f64, phi: f64, weights: &[f64], coords: &[f64]) -> f64 {
    let k = weights.len();
    // amplitude[l][k1][k2] for l in {HH, VV}
    let mut hh = vec![C64::new(0.0, 0.0); k * k];
    let mut vv = vec![C64::new(0.0, 0.0); k * k];
    for a in 0..k {
        for b in 0..k {
            let w = (weights[a] * weights[b]).sqrt() * std::f64::consts::FRAC_1_SQRT_2;
            hh[a * k + b] = C64::new(w, 0.0);
            vv[a * k + b] = C64::from_polar(w, phi + alpha * (coords[a] + coords[b]));
        }
    }
    let dot = |x: &[C64], y: &[C64]| -> C64 { x.iter().zip(y).map(|(a, b)| a * b.conj()).sum() };
    let norm = dot(&hh, &hh).re + dot(&vv, &vv).re;
    // reduced 2×2 block on span{HH, VV}
    let r = [
        [dot(&hh, &hh) / norm, dot(&hh, &vv) / norm],
        [dot(&vv, &hh) / norm, dot(&vv, &vv) / norm],
    ];
    r[0][0].re.powi(2) + r[1][1].re.powi(2) + 2.0 * r[0][1].norm_sqr()
}

pub fn uniform_bins(k: usize) -> (Vec<f64>, Vec<f64>) {
    let w = vec![1.0 / k as f64; k];
    let c = (0..k).map(|i| (i as f64 + 0.5) / k as f64 - 0.5).collect();
    (w, c)
}

/// Concurrence of an X-shaped two-qubit state from its six nonzero entries.
pub fn x_state_concurrence(rho: &[C64]) -> f64 {
    let at = |i: usize, j: usize| rho[4 * i + j];
    let a = at(0, 3).norm() - (at(1, 1).re * at(2, 2).re).sqrt();
    let b = at(1, 2).norm() - (at(0, 0).re * at(3, 3).re).sqrt();
    2.0 * a.max(b).max(0.0)
}

/// Concurrence of a pure two-qubit state `a|00⟩ + b|01⟩ + c|10⟩ + d|11⟩`.
pub fn pure_concurrence(psi: &[C64]) -> f64 {
    2.0 * (psi[0] * psi[3] - psi[1] * psi[2]).norm()
}

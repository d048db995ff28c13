//! Fast trigonometric transforms built on rustfft.
//!
//! Conventions (all unnormalized):
//!   DCT-II:  X[k] = sum_j x[j] cos(pi k (2j+1) / (2N))
//!   DCT-III: T[j] = X[0]/2 + sum_{k>=1} X[k] cos(pi k (2j+1) / (2N))
//!   DST-II:  S[k] = sum_j x[j] sin(pi (k+1) (2j+1) / (2N))
//!   DST-III: T[j] = (-1)^j X[N-1]/2 + sum_{k<N-1} X[k] sin(pi (k+1) (2j+1) / (2N))
//!   DST-I:   S[k] = sum_j x[j] sin(pi (j+1) (k+1) / (M+1))
//!
//! Round trips: DCT3(DCT2(x)) = (N/2) x, DST3(DST2(x)) = (N/2) x,
//! DST1(DST1(x)) = ((M+1)/2) x. These bases diagonalize the 1D second
//! difference under mirrored-ghost (DCT-II), half-sample antisymmetric
//! (DST-II), and interior-Dirichlet (DST-I) boundary treatments.

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// DCT-II/III and DST-II/III of one length, sharing a complex FFT plan.
pub struct TrigPlan {
    n: usize,
    fft_fwd: Arc<dyn Fft<f64>>,
    fft_inv: Arc<dyn Fft<f64>>,
    // e^{-i pi k / (2N)} for k = 0..N
    twiddle: Vec<Complex<f64>>,
}

impl TrigPlan {
    pub fn new(planner: &mut FftPlanner<f64>, n: usize) -> Self {
        assert!(n >= 2);
        let fft_fwd = planner.plan_fft_forward(2 * n);
        let fft_inv = planner.plan_fft_inverse(2 * n);
        let twiddle = (0..=n)
            .map(|k| {
                let ang = -std::f64::consts::PI * k as f64 / (2.0 * n as f64);
                Complex::new(ang.cos(), ang.sin())
            })
            .collect();
        Self {
            n,
            fft_fwd,
            fft_inv,
            twiddle,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    /// Forward DCT-II via a mirrored length-2N complex FFT.
    pub fn dct2(&self, x: &[f64], out: &mut [f64]) {
        let n = self.n;
        debug_assert_eq!(x.len(), n);
        debug_assert_eq!(out.len(), n);
        let mut buf: Vec<Complex<f64>> = Vec::with_capacity(2 * n);
        for &v in x {
            buf.push(Complex::new(v, 0.0));
        }
        for j in (0..n).rev() {
            buf.push(Complex::new(x[j], 0.0));
        }
        self.fft_fwd.process(&mut buf);
        for k in 0..n {
            out[k] = 0.5 * (self.twiddle[k] * buf[k]).re;
        }
    }

    /// DCT-III, the (N/2)-scaled inverse of `dct2`.
    pub fn dct3(&self, x: &[f64], out: &mut [f64]) {
        let n = self.n;
        debug_assert_eq!(x.len(), n);
        debug_assert_eq!(out.len(), n);
        let mut buf = vec![Complex::new(0.0, 0.0); 2 * n];
        // W[k] = c_k X[k] e^{+i pi k/(2N)}; conjugate of the stored twiddle
        buf[0] = Complex::new(0.5 * x[0], 0.0);
        for k in 1..n {
            buf[k] = self.twiddle[k].conj() * x[k];
        }
        self.fft_inv.process(&mut buf);
        for j in 0..n {
            out[j] = buf[j].re;
        }
    }

    /// DST-II expressed through DCT-II of the sign-alternated sequence.
    pub fn dst2(&self, x: &[f64], out: &mut [f64]) {
        let n = self.n;
        let mut xt = vec![0.0; n];
        for j in 0..n {
            xt[j] = if j % 2 == 0 { x[j] } else { -x[j] };
        }
        let mut tmp = vec![0.0; n];
        self.dct2(&xt, &mut tmp);
        for k in 0..n {
            out[k] = tmp[n - 1 - k];
        }
    }

    /// DST-III, the (N/2)-scaled inverse of `dst2`.
    pub fn dst3(&self, x: &[f64], out: &mut [f64]) {
        let n = self.n;
        let xt: Vec<f64> = (0..n).map(|k| x[n - 1 - k]).collect();
        let mut tmp = vec![0.0; n];
        self.dct3(&xt, &mut tmp);
        for j in 0..n {
            out[j] = if j % 2 == 0 { tmp[j] } else { -tmp[j] };
        }
    }
}

/// DST-I of length m (its own inverse up to (m+1)/2).
pub struct Dst1Plan {
    m: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl Dst1Plan {
    pub fn new(planner: &mut FftPlanner<f64>, m: usize) -> Self {
        assert!(m >= 1);
        Self {
            m,
            fft: planner.plan_fft_forward(2 * (m + 1)),
        }
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn dst1(&self, x: &[f64], out: &mut [f64]) {
        let m = self.m;
        debug_assert_eq!(x.len(), m);
        debug_assert_eq!(out.len(), m);
        let l = 2 * (m + 1);
        let mut buf = vec![Complex::new(0.0, 0.0); l];
        for j in 0..m {
            buf[j + 1] = Complex::new(x[j], 0.0);
            buf[m + 2 + j] = Complex::new(-x[m - 1 - j], 0.0);
        }
        self.fft.process(&mut buf);
        for k in 0..m {
            out[k] = -0.5 * buf[k + 1].im;
        }
    }
}

/// Complex FFT pair of one length for periodic directions.
pub struct FftPlanPair {
    pub n: usize,
    pub fwd: Arc<dyn Fft<f64>>,
    pub inv: Arc<dyn Fft<f64>>,
}

impl FftPlanPair {
    pub fn new(planner: &mut FftPlanner<f64>, n: usize) -> Self {
        Self {
            n,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        }
    }
}

/// Out-of-place transpose of a row-major ncols x nrows array.
pub fn transpose(data: &[f64], ncols: usize, nrows: usize, out: &mut [f64]) {
    debug_assert_eq!(data.len(), ncols * nrows);
    debug_assert_eq!(out.len(), ncols * nrows);
    for j in 0..nrows {
        for i in 0..ncols {
            out[i * nrows + j] = data[j * ncols + i];
        }
    }
}

/// Symbol of -d2/dx2 for the DCT-II basis (mirrored ghosts), k = 0..n-1.
pub fn neumann_symbol(n: usize, h: f64) -> Vec<f64> {
    (0..n)
        .map(|k| (2.0 / (h * h)) * (1.0 - (std::f64::consts::PI * k as f64 / n as f64).cos()))
        .collect()
}

/// Symbol of -d2/dx2 for the DST-II basis (half-sample antisymmetric ghosts).
pub fn dst2_symbol(n: usize, h: f64) -> Vec<f64> {
    (1..=n)
        .map(|k| (2.0 / (h * h)) * (1.0 - (std::f64::consts::PI * k as f64 / n as f64).cos()))
        .collect()
}

/// Symbol of -d2/dx2 for the DST-I basis on m = n-1 interior points with
/// Dirichlet ends.
pub fn dst1_symbol(m: usize, h: f64) -> Vec<f64> {
    let n = m + 1;
    (1..=m)
        .map(|k| (2.0 / (h * h)) * (1.0 - (std::f64::consts::PI * k as f64 / n as f64).cos()))
        .collect()
}

/// Symbol of -d2/dx2 for the periodic FFT basis.
pub fn periodic_symbol(n: usize, h: f64) -> Vec<f64> {
    (0..n)
        .map(|k| {
            (2.0 / (h * h)) * (1.0 - (2.0 * std::f64::consts::PI * k as f64 / n as f64).cos())
        })
        .collect()
}

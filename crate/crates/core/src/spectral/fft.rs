//! Thin real-FFT wrapper with per-thread plan caching.
//!
//! Spectra are stored in conjugate-symmetric half form (`n / 2 + 1` bins) and
//! normalized so that bin `k` is the Fourier-series coefficient of
//! `exp(2 pi i j k / n)` in the sampled values.

use std::cell::RefCell;

use realfft::num_complex::Complex64;
use realfft::RealFftPlanner;

thread_local! {
    static PLANNER: RefCell<RealFftPlanner<f64>> = RefCell::new(RealFftPlanner::new());
}

pub(crate) fn forward(values: &[f64]) -> Vec<Complex64> {
    let n = values.len();
    let plan = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n));
    let mut input = values.to_vec();
    let mut output = plan.make_output_vec();
    plan.process(&mut input, &mut output)
        .expect("buffer sizes come from the plan");
    let scale = 1.0 / n as f64;
    for c in output.iter_mut() {
        *c *= scale;
    }
    output
}

pub(crate) fn inverse(spectrum: &[Complex64], n: usize) -> Vec<f64> {
    debug_assert_eq!(spectrum.len(), n / 2 + 1);
    let plan = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n));
    let mut input = spectrum.to_vec();
    input[0].im = 0.0;
    input[n / 2].im = 0.0;
    let mut output = plan.make_output_vec();
    plan.process(&mut input, &mut output)
        .expect("imaginary parts of the real bins were cleared");
    output
}

//! Zero-stuffed upsampling and polyphase FIR filtering at the sample rate.

use num_complex::Complex64;

/// Inserts `osf - 1` zeros after every symbol.
pub fn zero_stuff(symbols: &[Complex64], osf: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); symbols.len() * osf];
    for (slot, &b) in out.iter_mut().step_by(osf).zip(symbols) {
        *slot = b;
    }
    out
}

/// `y[m] = sum_n symbols[n] * taps[m - n*osf]` for `m in 0..out_len`.
///
/// Equivalent to zero-stuffing `symbols` by `osf` and convolving with `taps`,
/// but only touches the nonzero inputs: output phase `m mod osf` sees taps
/// `m mod osf + j*osf`. Summation runs over `j` ascending.
pub fn upsample_filter<T>(symbols: &[Complex64], taps: &[T], osf: usize, out_len: usize) -> Vec<Complex64>
where
    T: Copy + Into<Complex64>,
{
    let mut out = Vec::with_capacity(out_len);
    for m in 0..out_len {
        let phase = m % osf;
        let newest = m / osf;
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &c) in taps.iter().skip(phase).step_by(osf).enumerate() {
            let Some(n) = newest.checked_sub(j) else { break };
            if let Some(&b) = symbols.get(n) {
                acc += b * c.into();
            }
        }
        out.push(acc);
    }
    out
}

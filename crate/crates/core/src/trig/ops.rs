//! Coefficient-space operators: partial sums, Vallée-Poussin kernels and the
//! (ψ,β) multipliers.

use num_complex::Complex64;

use super::{FrequencySet, TrigPoly};
use crate::error::{Error, Result};
use crate::psi::{tail_sum, Decay, PsiFunction, TailSum};

/// `e^{iβπ/2·sign k}`, exact at integer `β` so that `cos(βπ/2)` vanishes exactly.
pub fn phase(beta: f64, k: i64) -> Complex64 {
    let b = beta.rem_euclid(4.0);
    let positive = if b.fract() == 0.0 {
        match b as u8 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    } else {
        Complex64::from_polar(1.0, b * std::f64::consts::FRAC_PI_2)
    };
    match k.signum() {
        1 => positive,
        -1 => positive.conj(),
        _ => Complex64::new(1.0, 0.0),
    }
}

/// `S_{n-1}(f)`: keeps `|k| <= n - 1`.
pub fn partial_sum_order(f: &TrigPoly, n: u64) -> TrigPoly {
    f.filter(|k| k.unsigned_abs() < n)
}

/// `S_γ(f)`: keeps exactly the frequencies in `γ` (signed).
pub fn partial_sum_set(f: &TrigPoly, gamma: &FrequencySet) -> TrigPoly {
    f.filter(|k| gamma.contains(k))
}

/// `f - S_γ(f)`.
pub fn remove_set(f: &TrigPoly, gamma: &FrequencySet) -> TrigPoly {
    f.filter(|k| !gamma.contains(k))
}

/// Vallée-Poussin kernel: `1/2` on `|k| <= m`, `1 - |k|/(2m)` on `m < |k| < 2m`.
pub fn vallee_poussin(m: u64) -> Result<TrigPoly> {
    if m == 0 {
        return Err(Error::Domain("Vallée-Poussin kernel needs m >= 1".into()));
    }
    let m = m as i64;
    Ok(TrigPoly::from_coeffs((-(2 * m - 1)..=(2 * m - 1)).map(
        |k| {
            let a = k.abs();
            let v = if a <= m {
                0.5
            } else {
                1.0 - a as f64 / (2 * m) as f64
            };
            (k, Complex64::new(v, 0.0))
        },
    )))
}

/// `f^ψ_β`: `f̂(k) e^{iβπ/2 sign k} / ψ(|k|)` for `k ≠ 0`; the mean is dropped.
pub fn psi_beta_derivative(f: &TrigPoly, psi: &PsiFunction, beta: f64) -> TrigPoly {
    TrigPoly::from_coeffs(
        f.iter()
            .filter(|&(k, _)| k != 0)
            .map(|(k, c)| (k, c * phase(beta, k) / psi.value(k.unsigned_abs() as f64))),
    )
}

/// Inverse multiplier: `f̂(k) ψ(|k|) e^{-iβπ/2 sign k}` for `k ≠ 0`.
pub fn psi_beta_integral(f: &TrigPoly, psi: &PsiFunction, beta: f64) -> TrigPoly {
    TrigPoly::from_coeffs(f.iter().filter(|&(k, _)| k != 0).map(|(k, c)| {
        (
            k,
            c * phase(beta, k).conj() * psi.value(k.unsigned_abs() as f64),
        )
    }))
}

/// Truncated (ψ,β) kernel and the mass `Σ_{k > N} ψ(k)` it leaves out.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelPoly {
    pub poly: TrigPoly,
    /// `None` when `Σ ψ(k)` diverges.
    pub truncation_residue: Option<TailSum>,
}

/// `Ψ_β` with `Ψ̂_β(±k) = (ψ(k)/2) e^{∓iβπ/2}` for `1 <= k <= n_trunc`.
pub fn psi_kernel_poly(psi: &PsiFunction, beta: f64, n_trunc: u64) -> Result<KernelPoly> {
    if n_trunc == 0 {
        return Err(Error::Truncation("kernel needs n_trunc >= 1".into()));
    }
    let poly = TrigPoly::from_coeffs((1..=n_trunc as i64).flat_map(|k| {
        let half = psi.value(k as f64) / 2.0;
        [
            (k, phase(beta, k).conj() * half),
            (-k, phase(beta, -k).conj() * half),
        ]
    }));
    let truncation_residue = match tail_sum(psi, 1.0, n_trunc + 1) {
        Ok(t) => Some(t),
        Err(Error::Divergence(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(KernelPoly {
        poly,
        truncation_residue,
    })
}

/// `(1/π)∫ Ψ(x - t) φ(t) dt` in coefficient space: `2 Ψ̂(k) φ̂(k)`.
pub fn convolve_kernel(kernel: &TrigPoly, phi: &TrigPoly) -> TrigPoly {
    TrigPoly::from_coeffs(phi.iter().map(|(k, c)| (k, 2.0 * kernel.coeff(k) * c)))
}

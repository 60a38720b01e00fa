use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{Complex, DMatrix, Schur};

use super::{
    binomial, secular_polynomial, InvariantVector, SecularSpectrum, SpectralError,
    IMAGINARY_TOLERANCE, MULTIPLE_ROOT_GAP,
};
use crate::geometry::{MultiVectorField, PhasePoint};

/// Clustered roots must reproduce the monic coefficients to this accuracy.
const RECONSTRUCTION_TOLERANCE: f64 = 1e-10;

fn modulus(z: Complex<f64>) -> f64 {
    libm::hypot(z.re, z.im)
}

fn horner(monic: &[f64], z: Complex<f64>) -> (Complex<f64>, Complex<f64>) {
    // value and derivative; monic[j] is the coefficient of z^j
    let mut p = Complex::new(0.0, 0.0);
    let mut dp = Complex::new(0.0, 0.0);
    for &c in monic.iter().rev() {
        dp = dp * z + p;
        p = p * z + Complex::new(c, 0.0);
    }
    (p, dp)
}

fn polish(monic: &[f64], mut root: f64) -> f64 {
    let eval = |x: f64| horner(monic, Complex::new(x, 0.0));
    for _ in 0..3 {
        let (p, dp) = eval(root);
        if dp.re == 0.0 {
            break;
        }
        let next = root - p.re / dp.re;
        if eval(next).0.re.abs() < p.re.abs() {
            root = next;
        } else {
            break;
        }
    }
    root
}

fn find(parent: &mut [usize], i: usize) -> usize {
    let mut r = i;
    while parent[r] != r {
        r = parent[r];
    }
    parent[i] = r;
    r
}

/// Real roots of `sum_j coeffs[j] c^j`, ascending, with multiplicity flags.
///
/// Roots come from the eigenvalues of the companion matrix, polished by a
/// few Newton steps when isolated. Eigenvalues with imaginary part above
/// [`IMAGINARY_TOLERANCE`] are only accepted as the rounding-split image of
/// a multiple real root: each such group is replaced by its mean and the
/// result must reproduce the coefficients, otherwise the spectrum is
/// reported as non-real.
pub fn polynomial_roots(coeffs: &[f64]) -> Result<(Vec<f64>, Vec<bool>), SpectralError> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    let lead = coeffs[n];
    let monic: Vec<f64> = coeffs.iter().map(|c| c / lead).collect();
    // exact zero roots are split off; the QR iteration stalls on nilpotent blocks
    let zeros = monic.iter().take_while(|&&c| c == 0.0).count();
    let reduced = &monic[zeros..];
    let m = n - zeros;

    let mut z: Vec<Complex<f64>> = vec![Complex::new(0.0, 0.0); zeros];
    if m == 1 {
        z.push(Complex::new(-reduced[0], 0.0));
    } else if m > 1 {
        let companion = DMatrix::from_fn(m, m, |i, j| {
            if j == m - 1 {
                -reduced[i]
            } else if i == j + 1 {
                1.0
            } else {
                0.0
            }
        });
        let schur = Schur::try_new(companion, f64::EPSILON, 10_000)
            .ok_or(SpectralError::IllConditioned { error: f64::NAN })?;
        z.extend(schur.complex_eigenvalues().iter().copied());
    }

    let scale = z.iter().fold(0.0f64, |acc, r| acc.max(modulus(*r)));
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let max_imag = z.iter().fold(0.0f64, |acc, r| acc.max(r.im.abs()));

    let mut parent: Vec<usize> = (0..n).collect();
    if max_imag > IMAGINARY_TOLERANCE * scale {
        let radius = 2.5 * max_imag;
        for i in 0..n {
            for j in i + 1..n {
                if modulus(z[i] - z[j]) <= radius {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    parent[a] = b;
                }
            }
        }
    }
    let mut roots = vec![0.0; n];
    let mut multiple = vec![false; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        let members: Vec<usize> = (0..n).filter(|&j| find(&mut parent, j) == r).collect();
        if members.len() > 1 {
            // the mean of a split cluster is far better conditioned than its members
            roots[i] = members.iter().map(|&j| z[j].re).sum::<f64>() / members.len() as f64;
            multiple[i] = true;
        } else {
            roots[i] = polish(&monic, z[i].re);
        }
    }

    if max_imag > IMAGINARY_TOLERANCE * scale {
        let mut rebuilt = vec![0.0; n + 1];
        rebuilt[0] = 1.0;
        for &r in &roots {
            for j in (1..=n).rev() {
                rebuilt[j] = rebuilt[j - 1] - r * rebuilt[j];
            }
            rebuilt[0] *= -r;
        }
        let consistent = (0..n).all(|j| {
            let size = binomial(n, j) * libm::pow(scale, (n - j) as f64);
            (rebuilt[j] - monic[j]).abs() <= RECONSTRUCTION_TOLERANCE * size
        });
        if !consistent {
            return Err(SpectralError::NonRealSpectrum { max_imag });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| roots[a].total_cmp(&roots[b]));
    let mut roots: Vec<f64> = order.iter().map(|&i| roots[i]).collect();
    let mut multiple: Vec<bool> = order.iter().map(|&i| multiple[i]).collect();
    // a multiple root may also split along the real axis; merge runs of
    // near-coincident roots to their mean
    let mut start = 0;
    for i in 1..=n {
        if i < n && roots[i] - roots[i - 1] < MULTIPLE_ROOT_GAP * scale {
            continue;
        }
        if i - start > 1 {
            let mean = roots[start..i].iter().sum::<f64>() / (i - start) as f64;
            roots[start..i].fill(mean);
            multiple[start..i].fill(true);
        }
        start = i;
    }
    Ok((roots, multiple))
}

/// Roots `c_1..c_n` of `(Ŵ - cW)^n = 0` at `x`, i.e. the zeros of `P(-c)`.
pub fn secular_roots(
    w: &MultiVectorField,
    what: &MultiVectorField,
    x: &PhasePoint,
) -> Result<SecularSpectrum, SpectralError> {
    w.expect_degree(2)?;
    what.expect_degree(2)?;
    w.expect_same_space(what)?;
    let wm = w.evaluate(x)?.to_matrix();
    let hm = what.evaluate(x)?.to_matrix();
    let poly = secular_polynomial(&wm, &hm, w.dim())?;
    let reflected: Vec<f64> = poly
        .coefficients
        .iter()
        .enumerate()
        .map(|(j, a)| if j % 2 == 0 { *a } else { -*a })
        .collect();
    let (roots, multiple) = polynomial_roots(&reflected)?;
    Ok(SecularSpectrum { point: x.clone(), roots, multiple })
}

/// `Y(l) = e_l(c_1..c_n) / C(n, l)`, with `e_l` the elementary symmetric
/// polynomial over index sets `i_1 < .. < i_l`.
pub fn y_from_roots(spectrum: &SecularSpectrum) -> InvariantVector {
    let n = spectrum.roots.len();
    let mut e = vec![0.0; n + 1];
    e[0] = 1.0;
    for (k, &c) in spectrum.roots.iter().enumerate() {
        for l in (1..=k + 1).rev() {
            e[l] += c * e[l - 1];
        }
    }
    let values = (1..=n).map(|l| e[l] / binomial(n, l)).collect();
    InvariantVector { point: spectrum.point.clone(), values }
}

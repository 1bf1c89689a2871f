//! Algebraic bases: polynomial roots, Pisot/Garsia classification, and the
//! named constants (multinacci roots, the Komornik-Loreti point).
//!
//! Root finding uses simultaneous (Durand-Kerner) iteration polished by
//! complex Newton steps; every reported root must pass a residual check.
//! Classification is deliberately three-valued: moduli inside the
//! `root_margin` band around 1, or an irreducibility test that cannot
//! decide, yield `Indeterminate` rather than a guess.

use num_complex::Complex64;
use serde::Serialize;

use crate::base::BaseValue;
use crate::error::{Error, Result};
use crate::poly::IntegerPolynomial;
use crate::tolerance::ToleranceConfig;

/// Imaginary parts at or below this are treated as zero when a polished
/// root is promoted to a real root.
const REAL_AXIS_TOL: f64 = 1e-9;

/// Three-valued verdict for properties decided through numeric margins or
/// partial algebraic tests.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Ternary {
    Yes,
    No,
    Indeterminate,
}

/// All complex roots of the polynomial, sorted by (re, im).
///
/// Uses Durand-Kerner simultaneous iteration: every approximant is updated
/// against the current factorization p(z) = lead · Π(z − z_j), so the
/// approximants repel one another and equal-modulus root families (x^4 + 4,
/// say, whose quartet stalls shift-based eigenvalue iterations) need no
/// special handling.  Each root is then polished with Newton steps and must
/// pass the residual check before it is reported.
pub fn find_roots(poly: &IntegerPolynomial) -> Result<Vec<Complex64>> {
    let n = poly.degree();
    if n == 0 {
        return Ok(Vec::new());
    }
    let coeffs = poly.coefficients();
    let lead = Complex64::new(coeffs[0] as f64, 0.0);

    // Start on an asymmetric spiral scaled by the Cauchy root bound: the
    // points are pairwise distinct and avoid the real axis, which would
    // otherwise trap conjugate pairs.
    let bound = 1.0
        + coeffs[1..]
            .iter()
            .map(|&c| (c as f64 / coeffs[0] as f64).abs())
            .fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (1..=n as u32).map(|k| seed.powu(k) * bound).collect();
    for _ in 0..1000 {
        let mut widest = 0.0_f64;
        for i in 0..n {
            let mut denom = lead;
            for j in 0..n {
                if j != i {
                    denom *= roots[i] - roots[j];
                }
            }
            if denom.norm() < 1e-300 {
                continue;
            }
            let step = poly.eval_complex(roots[i]) / denom;
            if !step.re.is_finite() || !step.im.is_finite() {
                continue;
            }
            roots[i] -= step;
            widest = widest.max(step.norm() / (1.0 + roots[i].norm()));
        }
        if widest < 1e-14 {
            break;
        }
    }
    for z in &mut roots {
        *z = polish_root(poly, *z);
    }

    let scale: f64 = coeffs.iter().map(|&c| (c as f64).abs()).sum::<f64>().max(1.0);
    for z in &roots {
        let residual = poly.eval_complex(*z).norm();
        if !residual.is_finite() || residual > 1e-9 * scale {
            return Err(Error::state(format!(
                "root finding failed the residual check: |p({z})| = {residual:e}"
            )));
        }
    }

    roots.sort_unstable_by(|a, b| {
        (a.re, a.im)
            .partial_cmp(&(b.re, b.im))
            .expect("finite roots")
    });
    Ok(roots)
}

fn polish_root(poly: &IntegerPolynomial, mut z: Complex64) -> Complex64 {
    for _ in 0..8 {
        let value = poly.eval_complex(z);
        let slope = poly.derivative_eval_complex(z);
        if slope.norm() < 1e-300 {
            break;
        }
        let next = z - value / slope;
        if !next.re.is_finite() || !next.im.is_finite() {
            break;
        }
        if (next - z).norm() < 1e-16 * (1.0 + z.norm()) {
            z = next;
            break;
        }
        z = next;
    }
    z
}

/// Classification of a monic integer polynomial as a base provider.
#[derive(Clone, Debug, Serialize)]
pub struct ClassificationReport {
    pub polynomial: String,
    pub degree: u32,
    /// Roots as (re, im), sorted by (re, im).
    pub roots: Vec<(f64, f64)>,
    pub root_moduli: Vec<f64>,
    /// The real root inside (1, 2) when there is exactly one.
    pub base_root: Option<f64>,
    pub irreducible: Ternary,
    pub pisot: Ternary,
    pub garsia: Ternary,
    /// k when the polynomial is exactly x^{k+1} - x^k - ... - x - 1.
    pub multinacci_order: Option<u32>,
}

/// Decides Pisot / Garsia membership for the dominant root, with margins.
///
/// Pisot needs the largest real root above 1 and every other root of
/// modulus below 1; no irreducibility is needed because a monic factor
/// carrying the dominant root can only have the remaining small roots as
/// its conjugates. Garsia needs constant term of absolute value 2, all
/// root moduli above 1, a real root in (1, 2), and a positively
/// irreducible polynomial; an undecided irreducibility test therefore
/// blocks a Yes.
pub fn classify(poly: &IntegerPolynomial, tol: &ToleranceConfig) -> Result<ClassificationReport> {
    if !poly.is_monic() {
        return Err(Error::domain(
            "classification requires a monic polynomial",
        ));
    }
    let margin = tol.root_margin;
    let roots = find_roots(poly)?;
    let moduli: Vec<f64> = roots.iter().map(|z| z.norm()).collect();

    let real_roots: Vec<f64> = roots
        .iter()
        .filter(|z| z.im.abs() <= REAL_AXIS_TOL)
        .map(|z| z.re)
        .collect();
    let in_interval: Vec<f64> = real_roots
        .iter()
        .copied()
        .filter(|&r| r > 1.0 && r < 2.0)
        .collect();
    let base_root = if in_interval.len() == 1 {
        Some(in_interval[0])
    } else {
        None
    };

    let irreducible = irreducibility(poly);
    let pisot = pisot_verdict(&roots, &real_roots, margin);
    let garsia = garsia_verdict(poly, &moduli, base_root, irreducible, margin);

    Ok(ClassificationReport {
        polynomial: poly.to_string(),
        degree: poly.degree() as u32,
        roots: roots.iter().map(|z| (z.re, z.im)).collect(),
        root_moduli: moduli,
        base_root,
        irreducible,
        pisot,
        garsia,
        multinacci_order: poly.multinacci_order(),
    })
}

fn pisot_verdict(roots: &[Complex64], real_roots: &[f64], margin: f64) -> Ternary {
    let Some(&dominant) = real_roots
        .iter()
        .max_by(|a, b| a.partial_cmp(b).expect("finite roots"))
    else {
        return Ternary::No;
    };

    // Strip one copy of the dominant root; everything else is a conjugate.
    let mut skipped = false;
    let mut conjugate_max: f64 = 0.0;
    for z in roots {
        if !skipped && z.im.abs() <= REAL_AXIS_TOL && z.re == dominant {
            skipped = true;
            continue;
        }
        conjugate_max = conjugate_max.max(z.norm());
    }

    if conjugate_max > 1.0 + margin {
        return Ternary::No;
    }
    if dominant < 1.0 - margin {
        return Ternary::No;
    }
    if dominant <= 1.0 + margin || conjugate_max >= 1.0 - margin {
        return Ternary::Indeterminate;
    }
    Ternary::Yes
}

fn garsia_verdict(
    poly: &IntegerPolynomial,
    moduli: &[f64],
    base_root: Option<f64>,
    irreducible: Ternary,
    margin: f64,
) -> Ternary {
    if poly.constant_term().abs() != 2 {
        return Ternary::No;
    }
    let min_modulus = moduli.iter().copied().fold(f64::INFINITY, f64::min);
    if min_modulus < 1.0 - margin {
        return Ternary::No;
    }
    if base_root.is_none() {
        return Ternary::No;
    }
    if min_modulus <= 1.0 + margin {
        return Ternary::Indeterminate;
    }
    match irreducible {
        Ternary::Yes => Ternary::Yes,
        Ternary::No => Ternary::No,
        Ternary::Indeterminate => Ternary::Indeterminate,
    }
}

/// Irreducibility over the rationals for a monic integer polynomial.
///
/// Decides Yes via an irreducibility witness modulo a small prime, No via
/// an integer root or a bounded search for monic quadratic/cubic factors
/// (exhaustive through degree 7 thanks to the Cauchy root bound), and
/// Indeterminate beyond that.
fn irreducibility(poly: &IntegerPolynomial) -> Ternary {
    let degree = poly.degree();
    if degree == 1 {
        return Ternary::Yes;
    }
    if has_integer_root(poly) {
        return Ternary::No;
    }
    if degree <= 3 {
        // A reducible monic quadratic or cubic must have a linear factor.
        return Ternary::Yes;
    }
    for p in [2u64, 3, 5, 7, 11, 13] {
        if rabin_irreducible_mod_p(poly, p) {
            return Ternary::Yes;
        }
    }
    let quadratic = has_small_monic_factor(poly, 2);
    if quadratic == Some(true) {
        return Ternary::No;
    }
    let cubic = if degree >= 6 {
        has_small_monic_factor(poly, 3)
    } else {
        Some(false)
    };
    if cubic == Some(true) {
        return Ternary::No;
    }
    if degree <= 7 && quadratic == Some(false) && cubic == Some(false) {
        // No factor of degree <= 3 exists, and degree <= 7 cannot split
        // into parts that are all >= 4.
        return Ternary::Yes;
    }
    Ternary::Indeterminate
}

fn has_integer_root(poly: &IntegerPolynomial) -> bool {
    let c = poly.constant_term();
    if c == 0 {
        return true;
    }
    let bound = c.unsigned_abs();
    for d in 1..=bound {
        if bound % d != 0 {
            continue;
        }
        for candidate in [d as i64, -(d as i64)] {
            if poly.eval_exact(candidate.into()) == Some(0) {
                return true;
            }
        }
    }
    false
}

/// Exhaustive search for a monic integer factor of the given degree, with
/// coefficient bounds from the Cauchy bound R = 1 + max |a_i| on root
/// moduli. Returns None if the arithmetic would overflow i128.
fn has_small_monic_factor(poly: &IntegerPolynomial, factor_degree: u32) -> Option<bool> {
    let r = 1 + poly
        .coefficients()
        .iter()
        .map(|c| c.unsigned_abs())
        .max()
        .unwrap_or(0) as i128;
    let k = factor_degree as i128;

    // Elementary symmetric bounds: |e_j| <= C(k, j) R^j.
    let binom = |k: i128, j: i128| -> i128 {
        let mut out = 1i128;
        for i in 0..j {
            out = out * (k - i) / (i + 1);
        }
        out
    };
    let mut bounds = Vec::new();
    for j in 1..=k {
        let mut power = 1i128;
        for _ in 0..j {
            power = power.checked_mul(r)?;
        }
        bounds.push(binom(k, j).checked_mul(power)?);
    }

    let mut factor = vec![0i128; factor_degree as usize + 1];
    factor[0] = 1;
    search_factor(poly, &mut factor, &bounds, 0)
}

fn search_factor(
    poly: &IntegerPolynomial,
    factor: &mut [i128],
    bounds: &[i128],
    position: usize,
) -> Option<bool> {
    if position == bounds.len() {
        return divides_exactly(poly, factor);
    }
    let b = bounds[position];
    for c in -b..=b {
        factor[position + 1] = c;
        if search_factor(poly, factor, bounds, position + 1)? {
            return Some(true);
        }
    }
    Some(false)
}

/// Synthetic division of the (monic) polynomial by a monic factor in i128;
/// None on overflow, Some(true) when the remainder vanishes.
fn divides_exactly(poly: &IntegerPolynomial, factor: &[i128]) -> Option<bool> {
    let n = poly.degree();
    let k = factor.len() - 1;
    if k == 0 || k > n {
        return Some(false);
    }
    let mut rem: Vec<i128> = poly.coefficients().iter().map(|&c| c as i128).collect();
    for i in 0..=(n - k) {
        let q = rem[i];
        if q == 0 {
            continue;
        }
        for (j, &fc) in factor.iter().enumerate().skip(1) {
            let delta = q.checked_mul(fc)?;
            rem[i + j] = rem[i + j].checked_sub(delta)?;
        }
    }
    Some(rem[n - k + 1..].iter().all(|&c| c == 0))
}

/// Rabin's irreducibility test for `poly` reduced modulo p: irreducible
/// over F_p implies irreducible over the rationals (for monic input).
fn rabin_irreducible_mod_p(poly: &IntegerPolynomial, p: u64) -> bool {
    let n = poly.degree();
    // Little-endian coefficients mod p.
    let f: Vec<u64> = poly
        .coefficients()
        .iter()
        .rev()
        .map(|&c| c.rem_euclid(p as i64) as u64)
        .collect();

    let Some(pn) = p.checked_pow(n as u32) else {
        return false;
    };
    // x^{p^n} must reduce to x mod f.
    let frob = pow_x_mod(pn, &f, p);
    let mut x = vec![0u64; n.max(2)];
    x[1] = 1;
    trim(&mut x);
    let mut frob_t = frob.clone();
    trim(&mut frob_t);
    if frob_t != x {
        return false;
    }
    // For each prime q | n, gcd(x^{p^{n/q}} - x, f) must be trivial.
    for q in prime_divisors(n as u64) {
        let Some(e) = p.checked_pow((n as u64 / q) as u32) else {
            return false;
        };
        let mut h = pow_x_mod(e, &f, p);
        if h.len() < 2 {
            h.resize(2, 0);
        }
        h[1] = (h[1] + p - 1) % p;
        trim(&mut h);
        let g = poly_gcd_mod(&h, &f, p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn trim(v: &mut Vec<u64>) {
    while v.len() > 1 && *v.last().unwrap() == 0 {
        v.pop();
    }
}

/// (a * b) mod (f, p) with little-endian coefficients and monic f.
fn poly_mul_mod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ai * bj) % p;
        }
    }
    poly_rem_monic(&mut prod, f, p);
    prod
}

/// In-place remainder modulo a monic divisor f (little-endian).
fn poly_rem_monic(a: &mut Vec<u64>, f: &[u64], p: u64) {
    let df = f.len() - 1;
    while a.len() > df {
        let lead = *a.last().unwrap();
        let shift = a.len() - 1 - df;
        if lead != 0 {
            for (j, &fc) in f.iter().enumerate() {
                let idx = shift + j;
                a[idx] = (a[idx] + p * p - (lead * fc) % p) % p;
            }
        }
        a.pop();
    }
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
}

/// x^e mod (f, p) by square and multiply.
fn pow_x_mod(e: u64, f: &[u64], p: u64) -> Vec<u64> {
    let mut base = vec![0u64, 1];
    poly_rem_monic(&mut base, f, p);
    let mut acc = vec![1u64];
    let mut exp = e;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = poly_mul_mod(&acc, &base, f, p);
        }
        base = poly_mul_mod(&base, &base, f, p);
        exp >>= 1;
    }
    acc
}

fn poly_gcd_mod(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !(b.len() == 1 && b[0] == 0) {
        let r = poly_rem_general(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn poly_rem_general(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let db = b.len() - 1;
    if db == 0 {
        return vec![0];
    }
    let lead_inv = mod_inverse(b[db], p);
    let mut r = a.to_vec();
    trim(&mut r);
    while r.len() > db {
        let shift = r.len() - b.len();
        let factor = (*r.last().unwrap() * lead_inv) % p;
        if factor != 0 {
            for (j, &bc) in b.iter().enumerate() {
                let idx = shift + j;
                r[idx] = (r[idx] + p * p - (factor * bc) % p) % p;
            }
        }
        r.pop();
        while r.len() > 1 && *r.last().unwrap() == 0 {
            r.pop();
        }
    }
    r
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // Fermat: a^{p-2} mod p.
    let mut base = a % p;
    let mut exp = p - 2;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

/// The root in (1, 2) of x^{k+1} - x^k - ... - x - 1, as a base value
/// carrying its defining polynomial.
pub fn multinacci_value(k: u32) -> Result<BaseValue> {
    if k == 0 || k > 40 {
        return Err(Error::domain(format!(
            "multinacci order must lie in 1..=40, got {k}"
        )));
    }
    let poly = IntegerPolynomial::multinacci(k);

    // p(1) = -k < 0 < 1 = p(2); bisect, then sharpen with Newton.
    let mut lo = 1.0f64;
    let mut hi = 2.0f64;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if poly.eval(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut root = 0.5 * (lo + hi);
    for _ in 0..4 {
        let value = poly.eval(root);
        let slope = poly.derivative_eval_complex(Complex64::new(root, 0.0)).re;
        if slope.abs() < 1e-300 {
            break;
        }
        root -= value / slope;
    }

    let roots = find_roots(&poly)?;
    let index = roots
        .iter()
        .position(|z| z.im.abs() <= REAL_AXIS_TOL && (z.re - root).abs() < 1e-6)
        .ok_or_else(|| Error::state("multinacci root not found among polynomial roots"))?;
    BaseValue::with_provenance(root, poly, index)
}

/// The base value defined by the unique real root of `poly` in (1, 2).
pub fn base_from_polynomial_root(poly: &IntegerPolynomial) -> Result<BaseValue> {
    let roots = find_roots(poly)?;
    let candidates: Vec<(usize, f64)> = roots
        .iter()
        .enumerate()
        .filter(|(_, z)| z.im.abs() <= REAL_AXIS_TOL && z.re > 1.0 && z.re < 2.0)
        .map(|(i, z)| (i, z.re))
        .collect();
    match candidates.as_slice() {
        [] => Err(Error::domain(format!(
            "{poly} has no real root in (1, 2)"
        ))),
        [(index, root)] => BaseValue::with_provenance(*root, poly.clone(), *index),
        _ => Err(Error::domain(format!(
            "{poly} has {} real roots in (1, 2); the base is ambiguous",
            candidates.len()
        ))),
    }
}

/// Thue-Morse digit t_n: parity of the binary weight of n.
fn thue_morse(n: u64) -> f64 {
    (n.count_ones() & 1) as f64
}

/// The unique base in (1, 2) where Σ t_n β^{-n} = 1 for the Thue-Morse
/// sequence t: below it no point of the open interval has a unique digit
/// expansion, above it some do. Bisection to the requested precision.
pub fn komornik_loreti(precision: f64) -> Result<f64> {
    if !precision.is_finite() || precision < 1e-12 || precision > 0.1 {
        return Err(Error::domain(format!(
            "precision must lie in [1e-12, 0.1], got {precision}"
        )));
    }
    let eval = |beta: f64| -> f64 {
        // Truncate once the geometric tail bound drops below precision/10.
        let mut sum = 0.0;
        let mut power = 1.0;
        let mut n = 1u64;
        loop {
            power /= beta;
            sum += thue_morse(n) * power;
            let tail = power / (beta - 1.0);
            if tail < precision / 10.0 || n >= 4096 {
                break;
            }
            n += 1;
        }
        sum - 1.0
    };

    // eval decreases in beta; eval(1.5) > 0 > eval(2).
    let mut lo = 1.5f64;
    let mut hi = 2.0f64;
    debug_assert!(eval(lo) > 0.0 && eval(hi) < 0.0);
    while hi - lo > precision / 2.0 {
        let mid = 0.5 * (lo + hi);
        if eval(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

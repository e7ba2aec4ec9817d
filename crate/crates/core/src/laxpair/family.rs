use num_complex::Complex;

use super::{block_lax_2n, integral_of_pair, real_imag_split, LaxError, LaxPairModel, QuadraticIntegral};
use crate::matrix::ValidatedSystem;
use crate::scalar::Real;
use crate::spectral::{
    is_simple_spectrum, pair_representatives, quadruple_symmetry_check, select_admissible_pair, spectrum_tolerances,
    system_spectrum, AdmissiblePair, LambdaClass, PairTolerances, SpectralData, SpectralError, SymmetryReport,
};

/// One admissible pair per class `±λ`, the complex integrals they give, and
/// `n` real integrals obtained by splitting conjugate classes.
#[derive(Debug, Clone)]
pub struct IntegralFamily<T> {
    pub spectrum: SpectralData<T>,
    pub symmetry: SymmetryReport,
    pub simple: bool,
    pub pairs: Vec<AdmissiblePair<T>>,
    pub integrals: Vec<QuadraticIntegral<T>>,
    pub real_integrals: Vec<QuadraticIntegral<T>>,
}

impl<T: Real> IntegralFamily<T> {
    /// Block-diagonal Lax pair over all classes.
    pub fn model(&self) -> Result<LaxPairModel<T>, LaxError> {
        block_lax_2n(&self.pairs)
    }
}

/// Knobs for [`integral_family_with`].
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyOptions {
    pub pair: PairTolerances,
    pub pairing_tol: f64,
    pub gap_tol: f64,
    /// Proceed on a non-simple spectrum.
    pub force: bool,
}

impl FamilyOptions {
    pub fn for_scalar<T: Real>() -> Self {
        let (pairing_tol, gap_tol) = spectrum_tolerances::<T>();
        Self {
            pair: PairTolerances::for_scalar::<T>(),
            pairing_tol,
            gap_tol,
            force: false,
        }
    }
}

/// Builds the family for `sys`. A non-simple spectrum is refused unless
/// `force` is set, in which case pairs are still chosen per representative.
pub fn integral_family<T: Real>(
    sys: &ValidatedSystem<T>,
    tol: &PairTolerances,
    force: bool,
) -> Result<IntegralFamily<T>, LaxError> {
    let opts = FamilyOptions {
        pair: *tol,
        force,
        ..FamilyOptions::for_scalar::<T>()
    };
    integral_family_with(sys, &opts, &[])
}

/// Like [`integral_family`], but with explicit `(λ, w)` candidates. When
/// `explicit` is nonempty those pairs are validated and used as given.
pub fn integral_family_with<T: Real>(
    sys: &ValidatedSystem<T>,
    opts: &FamilyOptions,
    explicit: &[(Complex<T>, Vec<Complex<T>>)],
) -> Result<IntegralFamily<T>, LaxError> {
    let spectrum = system_spectrum(sys)?;
    let symmetry = quadruple_symmetry_check(&spectrum, T::lit(opts.pairing_tol))?;
    let simple = is_simple_spectrum(&spectrum, T::lit(opts.gap_tol));
    if !simple && !opts.force {
        return Err(LaxError::RepeatedSpectrum);
    }
    let mut pairs: Vec<AdmissiblePair<T>> = Vec::new();
    if explicit.is_empty() {
        let reps = pair_representatives(&spectrum, &symmetry);
        let mut k = 0;
        while k < reps.len() {
            let lam = reps[k];
            let pair = select_admissible_pair(sys, lam, None, &opts.pair)?;
            if pair.class() == LambdaClass::GenuinelyComplex && k + 1 < reps.len() && close(reps[k + 1], lam.conj()) {
                // the conjugate class uses (λ̄, w̄) so the integrals split cleanly
                let conj = pair.conjugate();
                pairs.push(pair);
                pairs.push(conj);
                k += 2;
            } else {
                pairs.push(pair);
                k += 1;
            }
        }
    } else {
        for (lam, w) in explicit {
            pairs.push(select_admissible_pair(sys, *lam, Some(w), &opts.pair)?);
        }
    }

    let integrals: Vec<QuadraticIntegral<T>> = pairs.iter().map(integral_of_pair).collect();
    let mut real_integrals = Vec::with_capacity(integrals.len());
    let mut k = 0;
    while k < pairs.len() {
        let complex = pairs[k].class() == LambdaClass::GenuinelyComplex;
        if complex && k + 1 < pairs.len() && close(pairs[k + 1].lambda(), pairs[k].lambda().conj()) {
            let (re, im) = real_imag_split(&integrals[k], &integrals[k + 1])?;
            real_integrals.push(re);
            real_integrals.push(im);
            k += 2;
        } else if complex {
            // a lone complex pair still gives two real integrals
            let s = integrals[k].s();
            let label = integrals[k].label();
            real_integrals.push(QuadraticIntegral::from_real(&s.real_part(), format!("Re {label}")));
            real_integrals.push(QuadraticIntegral::from_real(&s.imag_part(), format!("Im {label}")));
            k += 1;
        } else {
            let s = integrals[k].s().real_part();
            real_integrals.push(QuadraticIntegral::from_real(&s, integrals[k].label()));
            k += 1;
        }
    }
    Ok(IntegralFamily {
        spectrum,
        symmetry,
        simple,
        pairs,
        integrals,
        real_integrals,
    })
}

fn close<T: Real>(a: Complex<T>, b: Complex<T>) -> bool {
    (a - b).norm() <= T::lit(1e-8) * a.norm().max(T::one())
}

/// Admissible pairs alone, for callers that only need those.
pub fn admissible_pairs<T: Real>(sys: &ValidatedSystem<T>) -> Result<Vec<AdmissiblePair<T>>, SpectralError> {
    match integral_family(sys, &PairTolerances::for_scalar::<T>(), true) {
        Ok(f) => Ok(f.pairs),
        Err(LaxError::Spectral(e)) => Err(e),
        Err(_) => unreachable!("only spectral errors are possible with force"),
    }
}

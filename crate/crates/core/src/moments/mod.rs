//! Closed-form intensities and asymptotic variances for isotropic nestings.
//!
//! Everything here is a ratio of Gamma functions evaluated in double (or
//! single) precision; there is no randomness. Dimension `d` is arbitrary
//! except where a model only has planar constants (Poisson line components
//! and Poisson–Voronoi initial tessellations).

mod gamma;

pub use gamma::gamma;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tessellate::TessellationKind;

/// Asymptotic variance per unit area of the total edge length of a planar
/// Poisson–Voronoi tessellation with unit cell intensity.
pub const BRAKKE_CONSTANT: f64 = 1.0445685;

/// Mean over typical unit Poisson–Voronoi cells of the variance of the number
/// of unit Poisson–Voronoi edge crossings on the cell boundary.
pub const PVT_INNER_VARIANCE: f64 = 2.7023;

pub fn brakke_constant() -> f64 {
    BRAKKE_CONSTANT
}

/// Simulated planar Poisson–Voronoi constants, overridable by the user.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PvtConstants<T> {
    pub brakke: T,
    pub inner_variance: T,
}

impl<T: Scalar> Default for PvtConstants<T> {
    fn default() -> Self {
        PvtConstants { brakke: T::lit(BRAKKE_CONSTANT), inner_variance: T::lit(PVT_INNER_VARIANCE) }
    }
}

/// Dependence regime of the initial tessellation, which fixes the normalizer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Poisson hyperplane initial: normalizer `|W|^(1 - 1/(2d))`.
    LongRange,
    /// Weakly dependent initial: normalizer `|W|^(1/2)`.
    ShortRange,
}

/// Theoretical moments of the crossing functional for one model.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentReport<T> {
    pub dimension: usize,
    pub k: usize,
    pub regime: Regime,
    /// Expected value of the functional per unit volume.
    pub mean_density: T,
    /// Limiting variance of the standardized functional.
    pub asym_variance: T,
    /// `alpha` in the normalizer `|W|^alpha`.
    pub norm_exponent: T,
    /// Intensity of the k-facet process of the initial tessellation.
    pub facet_intensity: T,
    /// Asymptotic variance of the k-facet volume (per `|W|^(2-1/d)` or `|W|`).
    pub facet_variance: T,
    pub component_surface_intensity: T,
    pub component_section_intensity: T,
    /// Conditional-variance term (only present in the short range regime).
    pub component_variance: T,
    /// Number of cell k-faces containing each k-facet.
    pub m: u64,
}

fn check_dim(d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::invalid("dimension must be at least 1"));
    }
    Ok(())
}

fn binomial<T: Scalar>(n: usize, k: usize) -> T {
    if k > n {
        return T::zero();
    }
    (0..k).fold(T::one(), |acc, i| acc * T::from(n - i).unwrap() / T::from(i + 1).unwrap())
}

fn factorial<T: Scalar>(n: usize) -> T {
    (1..=n).fold(T::one(), |acc, i| acc * T::from(i).unwrap())
}

fn to_t<T: Scalar>(n: usize) -> T {
    T::from(n).unwrap()
}

/// Volume of the unit ball, `pi^(d/2) / Gamma(d/2 + 1)`.
pub fn unit_ball_volume<T: Scalar>(d: i64) -> Result<T> {
    if d < 0 {
        return Err(Error::invalid(format!("negative dimension {d}")));
    }
    let half_d = T::from(d).unwrap() * T::lit(0.5);
    Ok(T::PI().powf(half_d) / gamma(half_d + T::one()))
}

fn kappa<T: Scalar>(d: usize) -> T {
    unit_ball_volume(d as i64).expect("non-negative dimension")
}

/// Stereological coefficient linking the section intensity on a k-flat to
/// the surface intensity of a motion-invariant facet process.
pub fn stereo_coeff<T: Scalar>(k: usize, d: usize) -> Result<T> {
    if k < 1 || k + 1 > d {
        return Err(Error::invalid(format!("stereo coefficient needs 1 <= k <= d-1 (k={k}, d={d})")));
    }
    let h = T::lit(0.5);
    let (kf, df) = (to_t::<T>(k), to_t::<T>(d));
    Ok(gamma((kf + T::one()) * h) * gamma(df * h) / (gamma(kf * h) * gamma((df + T::one()) * h)))
}

fn check_k_below_d(d: usize, k: usize) -> Result<()> {
    check_dim(d)?;
    if k + 1 > d {
        return Err(Error::invalid(format!("need 0 <= k <= d-1 (k={k}, d={d})")));
    }
    Ok(())
}

fn check_intensity<T: Scalar>(lambda: T) -> Result<()> {
    if !(lambda >= T::zero()) || !lambda.is_finite() {
        return Err(Error::invalid("intensity must be finite and non-negative"));
    }
    Ok(())
}

/// Intensity of the k-volume measure of the k-flats of an isotropic Poisson
/// hyperplane process with intensity `lambda` in dimension `d`.
pub fn pht_intensity<T: Scalar>(lambda: T, d: usize, k: usize) -> Result<T> {
    check_k_below_d(d, k)?;
    check_intensity(lambda)?;
    let ratio = kappa::<T>(d - 1) / (to_t::<T>(d) * kappa::<T>(d));
    Ok(binomial::<T>(d, k) * kappa::<T>(d) / kappa::<T>(k) * (ratio * lambda).powi((d - k) as i32))
}

/// Asymptotic variance of the k-flat volume in a growing ball, normalized
/// by `|B|^(2 - 1/d)`, isotropic case.
pub fn pht_sigma2<T: Scalar>(lambda: T, d: usize, k: usize) -> Result<T> {
    check_k_below_d(d, k)?;
    check_intensity(lambda)?;
    let kd = kappa::<T>(d);
    let df = to_t::<T>(d);
    let ratio = kappa::<T>(d - 1) / (df * kd);
    let shape = factorial::<T>(d) * kappa::<T>(d - 1) / (factorial::<T>(k) * kappa::<T>(k));
    let b = binomial::<T>(d - 1, k);
    Ok(lambda.powi((2 * d - 2 * k - 1) as i32) * T::lit(2.0).powi((2 * d - 1) as i32) * kd.powf(T::one() / df)
        / factorial::<T>(2 * d - 1)
        * b
        * b
        * shape
        * shape
        * ratio.powi((2 * (d - k)) as i32))
}

/// The `k = d - 1` variance, which does not depend on the orientation law.
pub fn pht_sigma2_hyperplanes<T: Scalar>(lambda: T, d: usize) -> Result<T> {
    check_dim(d)?;
    check_intensity(lambda)?;
    let df = to_t::<T>(d);
    let km = kappa::<T>(d - 1);
    Ok(lambda * T::lit(2.0).powi((2 * d - 1) as i32) * km * km
        / (factorial::<T>(2 * d - 1) * kappa::<T>(d).powf(T::lit(2.0) - T::one() / df)))
}

/// Intensity of the k-facet process of a unit-intensity Poisson–Voronoi
/// tessellation in dimension `d` (Miles' formula).
pub fn miles_intensity<T: Scalar>(d: usize, k: usize) -> Result<T> {
    if k < 1 || k + 1 > d {
        return Err(Error::invalid(format!("Voronoi facet intensity needs 1 <= k <= d-1 (k={k}, d={d})")));
    }
    let (df, kf) = (to_t::<T>(d), to_t::<T>(k));
    let two_pi = T::lit(2.0) * T::PI();
    let j = d * (d - k) + k;
    let num = two_pi.powi((d - k + 1) as i32) * gamma(to_t::<T>(d - k) + kf / df) * kappa::<T>(j - 2) * kappa::<T>(k - 1);
    let den = factorial::<T>(d - k + 1) * df * kappa::<T>(j - 1) * kappa::<T>(d).powf(kf / df);
    Ok(num / den * (kappa::<T>(d - 1) / kappa::<T>(d)).powi((d - k) as i32))
}

/// Facet intensity of a Poisson–Voronoi tessellation with cell intensity `gamma`.
pub fn pvt_facet_intensity<T: Scalar>(gamma_: T, d: usize, k: usize) -> Result<T> {
    check_intensity(gamma_)?;
    let df = to_t::<T>(d);
    Ok(miles_intensity::<T>(d, k)? * gamma_.powf(to_t::<T>(d - k) / df))
}

/// Surface intensity of the (d-1)-facets of a component tessellation.
pub fn component_surface_intensity<T: Scalar>(kind: TessellationKind, lambda: T, d: usize) -> Result<T> {
    check_dim(d)?;
    check_intensity(lambda)?;
    match kind {
        TessellationKind::Plt => {
            if d != 2 {
                return Err(Error::UnsupportedModel(format!("Poisson line component in dimension {d}")));
            }
            Ok(lambda)
        }
        TessellationKind::Pvt => {
            if d < 2 {
                return Err(Error::UnsupportedModel("Voronoi component needs d >= 2".into()));
            }
            pvt_facet_intensity(lambda, d, d - 1)
        }
    }
}

/// Intensity of the section of the component facets with a k-flat.
pub fn component_section_intensity<T: Scalar>(kind: TessellationKind, lambda: T, d: usize, k: usize) -> Result<T> {
    let c = stereo_coeff::<T>(k, d)?;
    Ok(c * component_surface_intensity(kind, lambda, d)?)
}

/// Moments for a Poisson hyperplane initial tessellation with intensity
/// `lambda_x` and a motion-invariant component.
pub fn pht_nesting_moments<T: Scalar>(
    lambda_x: T,
    component: TessellationKind,
    lambda_c: T,
    d: usize,
    k: usize,
) -> Result<MomentReport<T>> {
    if k < 1 || k + 1 > d {
        return Err(Error::invalid(format!("need 1 <= k <= d-1 (k={k}, d={d})")));
    }
    let m = 1u64 << (d - k);
    let mt = T::from(m).unwrap();
    let surface = component_surface_intensity(component, lambda_c, d)?;
    let section = stereo_coeff::<T>(k, d)? * surface;
    let facet = pht_intensity(lambda_x, d, k)?;
    let sigma2 = pht_sigma2(lambda_x, d, k)?;
    let scale = mt * section;
    Ok(MomentReport {
        dimension: d,
        k,
        regime: Regime::LongRange,
        mean_density: scale * facet,
        asym_variance: scale * scale * sigma2,
        norm_exponent: T::one() - T::one() / (T::lit(2.0) * to_t::<T>(d)),
        facet_intensity: facet,
        facet_variance: sigma2,
        component_surface_intensity: surface,
        component_section_intensity: section,
        component_variance: T::zero(),
        m,
    })
}

/// Moments for a planar Poisson–Voronoi initial tessellation with cell
/// intensity `gamma_x` (edges, k = 1) and a Poisson line or Poisson–Voronoi
/// component with intensity `lambda_c`.
pub fn weak_nesting_moments<T: Scalar>(
    initial: TessellationKind,
    gamma_x: T,
    component: TessellationKind,
    lambda_c: T,
    constants: &PvtConstants<T>,
) -> Result<MomentReport<T>> {
    if initial != TessellationKind::Pvt {
        return Err(Error::UnsupportedModel(
            "short range moments are only known for a Poisson–Voronoi initial tessellation".into(),
        ));
    }
    check_intensity(gamma_x)?;
    let (d, k) = (2usize, 1usize);
    let m = 2u64;
    let mt = T::lit(2.0);
    let surface = component_surface_intensity(component, lambda_c, d)?;
    let section = stereo_coeff::<T>(k, d)? * surface;
    let facet = pvt_facet_intensity(gamma_x, d, k)?;
    // exponent (d - 2k)/d vanishes in the plane
    let facet_var = constants.brakke * gamma_x.powf(T::zero());
    let component_variance = match component {
        // gamma * 4 lambda E P(typical cell) / pi with E P = 4 / sqrt(gamma)
        TessellationKind::Plt => T::lit(16.0) / T::PI() * gamma_x.sqrt() * lambda_c,
        TessellationKind::Pvt => constants.inner_variance * (gamma_x * lambda_c).sqrt(),
    };
    let scale = mt * section;
    Ok(MomentReport {
        dimension: d,
        k,
        regime: Regime::ShortRange,
        mean_density: scale * facet,
        asym_variance: component_variance + scale * scale * facet_var,
        norm_exponent: T::lit(0.5),
        facet_intensity: facet,
        facet_variance: facet_var,
        component_surface_intensity: surface,
        component_section_intensity: section,
        component_variance,
        m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn unit_ball_volumes() {
        assert!(rel(unit_ball_volume::<f64>(0).unwrap(), 1.0) < 1e-14);
        assert!(rel(unit_ball_volume::<f64>(1).unwrap(), 2.0) < 1e-14);
        assert!(rel(unit_ball_volume::<f64>(2).unwrap(), PI) < 1e-14);
        assert!(rel(unit_ball_volume::<f64>(3).unwrap(), 4.0 * PI / 3.0) < 1e-14);
        assert!(unit_ball_volume::<f64>(-1).is_err());
    }

    #[test]
    fn stereological_coefficients() {
        assert!(rel(stereo_coeff::<f64>(1, 2).unwrap(), 2.0 / PI) < 1e-13);
        assert!(rel(stereo_coeff::<f64>(1, 3).unwrap(), 0.5) < 1e-13);
        assert!(rel(stereo_coeff::<f64>(2, 3).unwrap(), PI / 4.0) < 1e-13);
        assert!(stereo_coeff::<f64>(0, 3).is_err());
        assert!(stereo_coeff::<f64>(3, 3).is_err());
    }

    #[test]
    fn flat_intensities() {
        assert!(rel(pht_intensity(1.0_f64, 2, 1).unwrap(), 1.0) < 1e-13);
        assert!(rel(pht_intensity(1.0_f64, 2, 0).unwrap(), 1.0 / PI) < 1e-13);
        // mpmath: lambda=1, d=3, k=0 -> pi/48; k=1 -> pi/8
        assert!(rel(pht_intensity(1.0_f64, 3, 0).unwrap(), 0.065_449_846_949_787_36) < 1e-12);
        assert!(rel(pht_intensity(1.0_f64, 3, 1).unwrap(), 0.392_699_081_698_724_15) < 1e-12);
        assert_eq!(pht_intensity(0.0_f64, 3, 1).unwrap(), 0.0);
        assert!(pht_intensity(1.0_f64, 2, 2).is_err());
        assert!(pht_intensity(-1.0_f64, 2, 1).is_err());
    }

    #[test]
    fn flat_variances() {
        assert!(rel(pht_sigma2(1.0_f64, 2, 1).unwrap(), 16.0 / (3.0 * PI.powf(1.5))) < 1e-12);
        assert!(rel(pht_sigma2(1.0_f64, 3, 2).unwrap(), 0.241_798_793_102_470_45) < 1e-12);
        assert!(rel(pht_sigma2(1.0_f64, 2, 0).unwrap(), 64.0 / (3.0 * PI.powf(3.5))) < 1e-12);
        // mpmath values for the remaining 3d cases
        assert!(rel(pht_sigma2(1.0_f64, 3, 1).unwrap(), 0.596_614_608_145_559_4) < 1e-12);
        assert!(rel(pht_sigma2(1.0_f64, 3, 0).unwrap(), 0.037_288_413_009_097_46) < 1e-12);
        for d in 2..=6 {
            let a = pht_sigma2(1.7_f64, d, d - 1).unwrap();
            let b = pht_sigma2_hyperplanes(1.7_f64, d).unwrap();
            assert!(rel(a, b) < 1e-12, "d={d}");
        }
    }

    /// Miles' formula rewritten with explicit Gamma functions instead of
    /// unit-ball volumes; an independent second implementation.
    fn miles_via_gamma(d: usize, k: usize) -> f64 {
        let g = gamma::<f64>;
        let kap = |n: f64| PI.powf(n / 2.0) / g(n / 2.0 + 1.0);
        let (df, kf) = (d as f64, k as f64);
        let j = df * (df - kf) + kf;
        let fact: f64 = (1..=(d - k + 1)).map(|i| i as f64).product();
        let num = (2.0 * PI).powf(df - kf + 1.0) * g(df - kf + kf / df) * kap(j - 2.0) * kap(kf - 1.0);
        let den = fact * df * kap(j - 1.0) * kap(df).powf(kf / df);
        num / den * (kap(df - 1.0) / kap(df)).powf(df - kf)
    }

    #[test]
    fn miles_formula() {
        assert!(rel(miles_intensity::<f64>(2, 1).unwrap(), 2.0) < 1e-12);
        let s3 = miles_intensity::<f64>(3, 2).unwrap();
        assert!((s3 - 2.910).abs() < 5e-4);
        assert!(rel(s3, 2.910_436_297_526_291_6) < 1e-12);
        // 3d edge length intensity 5.8319
        assert!(rel(miles_intensity::<f64>(3, 1).unwrap(), 5.831_860_054_806_166) < 1e-12);
        for d in 2..=6 {
            for k in 1..d {
                let a = miles_intensity::<f64>(d, k).unwrap();
                assert!(rel(a, miles_via_gamma(d, k)) < 1e-12, "d={d} k={k}");
            }
        }
        assert!(rel(pvt_facet_intensity(4.0_f64, 2, 1).unwrap(), 4.0) < 1e-12);
        assert!(miles_intensity::<f64>(2, 2).is_err());
    }

    #[test]
    fn component_intensities() {
        use TessellationKind::*;
        assert!(rel(component_surface_intensity(Pvt, 1.0_f64, 2).unwrap(), 2.0) < 1e-12);
        assert!(rel(component_surface_intensity(Plt, 3.0_f64, 2).unwrap(), 3.0) < 1e-12);
        assert!(rel(component_surface_intensity(Pvt, 16.0_f64, 2).unwrap(), 8.0) < 1e-12);
        assert!(matches!(component_surface_intensity(Plt, 1.0_f64, 3), Err(Error::UnsupportedModel(_))));
        assert!(rel(component_section_intensity(Plt, 1.0_f64, 2, 1).unwrap(), 2.0 / PI) < 1e-12);
        assert!(rel(component_section_intensity(Pvt, 1.0_f64, 2, 1).unwrap(), 4.0 / PI) < 1e-12);
        assert_eq!(component_section_intensity(Pvt, 0.0_f64, 2, 1).unwrap(), 0.0);
        assert_eq!(component_section_intensity(Plt, 0.0_f64, 2, 1).unwrap(), 0.0);
    }

    #[test]
    fn pht_nesting() {
        use TessellationKind::*;
        let r = pht_nesting_moments(1.0_f64, Plt, 1.0, 2, 1).unwrap();
        assert!(rel(r.mean_density, 4.0 / PI) < 1e-12);
        assert!(rel(r.asym_variance, 1.552_723_607_948_197_7) < 1e-12);
        assert!(rel(r.norm_exponent, 0.75) < 1e-15);
        assert_eq!(r.m, 2);
        let r = pht_nesting_moments(1.0_f64, Pvt, 1.0, 2, 1).unwrap();
        assert!(rel(r.mean_density, 8.0 / PI) < 1e-12);
        let r = pht_nesting_moments(1.0_f64, Pvt, 0.0, 2, 1).unwrap();
        assert_eq!((r.mean_density, r.asym_variance), (0.0, 0.0));
        let r = pht_nesting_moments(1.0_f64, Pvt, 1.0, 3, 1).unwrap();
        assert_eq!(r.m, 4);
        assert!(rel(r.norm_exponent, 1.0 - 1.0 / 6.0) < 1e-15);
    }

    #[test]
    fn weak_nesting() {
        use TessellationKind::*;
        let c = PvtConstants::default();
        let r = weak_nesting_moments(Pvt, 1.0_f64, Plt, 1.0, &c).unwrap();
        assert!(rel(r.mean_density, 8.0 / PI) < 1e-12);
        assert!((r.asym_variance - (16.0 / PI + 1.6934)).abs() < 1e-4);
        assert!((r.asym_variance - 6.78636).abs() < 1e-4);
        assert_eq!(r.norm_exponent, 0.5);
        let r = weak_nesting_moments(Pvt, 1.0_f64, Pvt, 1.0, &c).unwrap();
        assert!(rel(r.mean_density, 16.0 / PI) < 1e-12);
        assert!((r.asym_variance - 9.4759).abs() < 1e-4);
        let r = weak_nesting_moments(Pvt, 1.0_f64, Pvt, 0.0, &c).unwrap();
        assert_eq!((r.mean_density, r.asym_variance), (0.0, 0.0));
        let r = weak_nesting_moments(Pvt, 1.0_f64, Plt, 0.0, &c).unwrap();
        assert_eq!((r.mean_density, r.asym_variance), (0.0, 0.0));
        assert!(matches!(weak_nesting_moments(Plt, 1.0_f64, Plt, 1.0, &c), Err(Error::UnsupportedModel(_))));
    }

    #[test]
    fn reconciles_planar_displays() {
        use TessellationKind::*;
        let l12 = component_section_intensity(Pvt, 1.0_f64, 2, 1).unwrap();
        let l22 = component_surface_intensity(Pvt, 1.0_f64, 2).unwrap();
        let lhs = (2.0 * l12).powi(2) * BRAKKE_CONSTANT;
        let rhs = 1.6934 * l22 * l22;
        assert!((lhs - rhs).abs() < 5e-4, "{lhs} vs {rhs}");
    }

    #[test]
    fn brakke_override_and_scaling() {
        use TessellationKind::*;
        assert_eq!(brakke_constant(), 1.0445685);
        let c = PvtConstants { brakke: 1.05, ..PvtConstants::default() };
        let r = weak_nesting_moments(Pvt, 1.0_f64, Plt, 1.0, &c).unwrap();
        assert_eq!(r.facet_variance, 1.05);
        for g in [0.25, 1.0, 9.0] {
            let r = weak_nesting_moments(Pvt, g, Plt, 1.0, &PvtConstants::default()).unwrap();
            assert_eq!(r.facet_variance, BRAKKE_CONSTANT);
            assert!(rel(r.facet_intensity, 2.0 * g.sqrt()) < 1e-12);
        }
    }

    #[test]
    fn mean_composition_identity() {
        use TessellationKind::*;
        let c = PvtConstants::default();
        for kind in [Plt, Pvt] {
            for lam in [0.5, 1.0, 3.0] {
                let r = weak_nesting_moments(Pvt, 2.0_f64, kind, lam, &c).unwrap();
                let want = r.component_section_intensity * r.m as f64 * r.facet_intensity;
                assert!(rel(r.mean_density, want) < 1e-14);
                let r = pht_nesting_moments(2.0_f64, kind, lam, 2, 1).unwrap();
                let want = r.component_section_intensity * r.m as f64 * r.facet_intensity;
                assert!(rel(r.mean_density, want) < 1e-14);
            }
        }
    }

    #[test]
    fn generic_over_f32() {
        let s = pht_sigma2(1.0_f32, 2, 1).unwrap();
        assert!((s - 0.957_798).abs() < 1e-5);
        let m = miles_intensity::<f32>(2, 1).unwrap();
        assert!((m - 2.0).abs() < 1e-5);
    }
}

//! Random moment vectors on constrained moment spaces.
//!
//! The core transforms between power moments, canonical coordinates and
//! Jacobi recurrence coefficients are generic over [`Scalar`], which covers
//! `f32`, `f64`, double-double and exact [`num_rational::BigRational`] arithmetic. The
//! measure reconstruction, limit solvers and samplers work in `f64`.
//!
//! ```
//! use moment_spaces::{canonical_to_moments, CanonicalCoordinates, Domain};
//!
//! let p = CanonicalCoordinates::new(Domain::Interval01, vec![0.5, 0.5]).unwrap();
//! let m = canonical_to_moments(&p).unwrap();
//! assert_eq!(m.values, vec![0.5, 0.375]);
//! ```

#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::redundant_guards,
    clippy::type_complexity
)]

pub mod canonical;
pub mod dd;
pub mod error;
pub mod limits;
pub mod measures;
pub mod optimize;
pub mod polynomial;
pub mod potential;
pub mod sampler;
pub mod scalar;
pub mod spectral;

pub use canonical::{
    arcsine_moments, canonical_to_moments, canonical_to_recurrence, constrained_fill,
    interior_point, is_admissible, log_jacobian, moment_range, moments_to_canonical,
    moments_to_recurrence, recurrence_moments, recurrence_to_canonical, CanonicalCoordinates,
    Constraint, Domain, MomentRange, MomentVector, RecurrenceCoefficients,
};
pub use error::{Error, Result};
pub use limits::{
    clt_covariance, kl_arcsine, mdp_rate, range_objective, rate_eval_general, rate_eval_uniform,
    solve_general_limits, solve_uniform_limit, volume_ratio, LimitResult, Minimizer, Model,
    RateFunction, VolumeAsymptotics, VolumeRegime,
};
pub use measures::{
    build_bs01_measure, build_tail_constant_measure, density_at, measure_moment,
    stieltjes_transform, AcPart, Atom, Measure, ReferenceDensity, SumOfSquares, TailSpec,
};
pub use polynomial::Polynomial;
pub use potential::{Potential, PotentialSpec};
pub use sampler::{sample_general, sample_uniform, SampleRun, SamplerConfig};
pub use scalar::Scalar;
pub use spectral::{jacobi_matrix, spectral_measure, JacobiMatrix, SpectralMeasure};

pub type Rational = num_rational::BigRational;
pub use dd::DoubleDouble;

pub type Coordinates = CanonicalCoordinates<f64>;
pub type Recurrence = RecurrenceCoefficients<f64>;
pub type Moments = MomentVector<f64>;
pub type Jacobi = JacobiMatrix<f64>;
pub type Poly = Polynomial<f64>;

pub type CoordinatesF32 = CanonicalCoordinates<f32>;
pub type RecurrenceF32 = RecurrenceCoefficients<f32>;
pub type MomentsF32 = MomentVector<f32>;
pub type JacobiF32 = JacobiMatrix<f32>;

pub type RationalCoordinates = CanonicalCoordinates<Rational>;
pub type RationalRecurrence = RecurrenceCoefficients<Rational>;
pub type RationalMoments = MomentVector<Rational>;

pub type CoordinatesDD = CanonicalCoordinates<DoubleDouble>;
pub type RecurrenceDD = RecurrenceCoefficients<DoubleDouble>;
pub type MomentsDD = MomentVector<DoubleDouble>;

//! Information measures from moments.
//!
//! Differential entropy and mutual information are computed from finitely many
//! moments through the polynomial MMSE of the Gaussian channel
//! `Y = sqrt(t) X + N`. The crate provides the moment and Hankel-matrix
//! machinery, the PMMSE as an exact rational function of `t` and as a pointwise
//! evaluation, the entropy and mutual information functionals `h_n` and `I_n`
//! with their plug-in estimators, and the derivative formula for the
//! conditional mean of a finitely supported input.

#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod combin;
pub mod condexp;
pub mod entropy;
pub mod error;
pub mod moments;
pub mod mutual_info;
pub mod pmmse;
pub mod polyring;
pub mod quadrature;

pub use channel::{ChannelPoint, GaussianChannel};
pub use condexp::{
    c_lambda, c_r_by_partitions, c_r_closed_form, cond_exp_and_central_moments,
    cond_exp_derivative, enumerate_partitions, DiscreteInput, PartitionMultiplicity,
};
pub use entropy::{
    h_hat, h_hat_multivariate, h_n_from_moments, h_n_multivariate, rho, EntropyEstimate, Rho,
};
pub use error::{Error, Result};
pub use moments::{
    det_and_factor, gaussian_joint_moment, gaussian_moment, hankel, joint_sample_moments,
    monomial_basis, sample_moments, standardize, HankelMatrix, MomentVector, MultiMomentTable,
    SpdFactor, Standardization,
};
pub use mutual_info::{
    i_hat, i_n_continuous, i_n_discrete, ClassMoments, DiscreteConditionalMoments, MiEstimate,
};
pub use pmmse::{
    affine_transform_moments, channel_pmmse_at, channel_poly_matrix, channel_rational,
    logdet_derivative_at, multivariate_channel_pmmse_at, pmmse_estimate, pmmse_value,
    CrossMoments, PmmseEstimate, PmmseRational,
};
pub use polyring::{even_part, polymat_det, PolyMatrix, Polynomial, Variable};
pub use quadrature::{integrate_halfline, QuadConfig, QuadResult};

// SPDX-License-Identifier: Apache-2.0

#![forbid(unsafe_code)]
//! Set semiflows on planar convex compacts.
//!
//! Bodies are sampled support functions ([`convex`]). The [`semiflow`] module
//! integrates `u(t) = exp{𝒜∫φ}u₀ + ∫exp{…}F(V[u],u)` and tracks mixed areas
//! along orbits, [`comparison`] integrates and audits the scalar comparison
//! systems that dominate those areas, and [`certificates`] evaluates the
//! closed-form stability criteria.

pub mod certificates;
pub mod comparison;
pub mod convex;
pub mod functions;
pub mod semiflow;

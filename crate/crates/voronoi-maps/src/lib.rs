//! Exact enumeration of Voronoï cells in bi-pointed random planar maps.
//!
//! A bi-pointed quadrangulation carries two marked vertices; cutting it along
//! the loop of its associated iso-labelled two-face map splits it into two
//! Voronoï cells. This crate computes the exact joint distribution of the two
//! cell areas at finite size, checks it against closed forms and a brute-force
//! enumeration oracle, realizes both corner bijections (Miermont and
//! Ambjørn–Budd) on concrete maps, and verifies the continuum scaling
//! formulas numerically. The headline: the area fraction of one cell
//! converges to the uniform law on the unit interval.
//!
//! Module map:
//! - [`exact`]: arbitrary-precision rationals and truncated power series
//!   (univariate, and bivariate in `u = √g`, `v = √h`).
//! - [`recursions`]: the tree series `R_s(g)` and chain series `X_{s,t}(g,h)`
//!   solved order by order, plus their closed forms.
//! - [`law`]: assembly of the two-face-map series `F(g,h)` and the exact
//!   finite-size cell-area laws, moment generating functions, asymptotics.
//! - [`maps`]: rotation-system planar maps, the two bijections, cell areas,
//!   parity classification, and a text exchange format.
//! - [`enumerate`]: exhaustive generation of rooted two-face maps at small
//!   edge counts; the independent oracle for every series coefficient.
//! - [`scaling`]: double-precision scaling functions, the PDE and primitive
//!   identities, the contour integral, and the local-to-scaling bridge.
//! - [`cli`]: the `voronoi-maps` command line (law / verify / mgf / bijection).

pub mod cli;
pub mod enumerate;
pub mod exact;
pub mod law;
pub mod maps;
pub mod recursions;
pub mod scaling;

pub use exact::{BiSeries, Coeff, Rational, SeriesError, UniSeries};

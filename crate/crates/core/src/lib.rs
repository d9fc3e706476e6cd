//! Markoff quads and the simple length spectra of thrice-punctured projective
//! planes.
//!
//! A quasi-Fuchsian punctured projective plane `N_{1,3}` is described, up to
//! conjugacy, by a Markoff quad `(a, b, c, d)` with `(a + b + c + d)^2 = abcd`.
//! Flipping one entry walks a 4-regular tree whose vertices are the quads of
//! the same character; the entries met along the way are the traces of all
//! one-sided simple closed curves and the products of adjacent entries give the
//! two-sided ones.
//!
//! * [`quad`] holds the algebra: relation, flips, lengths, matrices.
//! * [`tree`] walks the curve complex: classification, reduction, pruned
//!   enumeration, Fibonacci weights and spiral sequences.
//! * [`spectra`] turns enumerations into length spectra, systoles and growth
//!   fits.
//! * [`mcshane`] checks the BQ condition and evaluates the McShane identity.
//! * [`integral`] works with positive integer quads in exact arithmetic.
//! * [`coords`] converts between trace, lambda-length and horocyclic
//!   coordinates and applies mapping classes.
//! * [`cli`] is the `mql` command-line front end.
//!
//! ```
//! use markoff::{MarkoffQuad, Slot, spectra};
//!
//! let q = MarkoffQuad::from_real(4.0, 4.0, 4.0, 4.0);
//! assert_eq!(q.flip(Slot::D), MarkoffQuad::from_real(4.0, 4.0, 4.0, 36.0));
//! let sys = spectra::systole(&q, 1_000_000).unwrap();
//! assert!((sys.length.re - 2.0 * 2f64.asinh()).abs() < 1e-12);
//! ```

pub mod cli;
pub mod coords;
pub mod error;
pub mod integral;
pub mod mcshane;
pub mod quad;
pub mod spectra;
pub mod tree;

pub use error::{Error, Result};
pub use quad::{MarkoffQuad, Matrix2, Slot, C64, DEFAULT_TOL};
pub use tree::{CellId, ComplexNode, ExploreOptions};

/// Default cell budget for tree enumerations.
pub const DEFAULT_MAX_CELLS: usize = 2_000_000;

//! Exact computations on the residues of `n!` (and of central binomial
//! coefficients and odd double factorials) modulo a prime `p`.
//!
//! The crate covers
//!
//! * the prime-field context: primitive root, index table, sequence residues
//!   ([`field`]);
//! * multiplicative and additive character sums over windows `H < n ≤ H+N`
//!   and their full spectra ([`spectrum`]);
//! * exact moment counts `I_ℓ`, `J_ℓ` by big-integer cyclic convolution
//!   ([`moments`], [`convolution`]);
//! * representation counts, value sets, fixed-sum counts and discrepancy
//!   ([`repcount`]);
//! * explicit constructions and prime scans ([`constructions`]);
//! * bound expressions paired with exact left-hand sides ([`bounds`]);
//! * brute-force oracles for cross-checking ([`refcheck`]).
//!
//! ```
//! use facmod::{PrimeContext, SequenceKind, Window};
//!
//! let ctx = PrimeContext::new(7, SequenceKind::Factorial).unwrap();
//! assert_eq!(ctx.generator(), 3);
//! assert_eq!(ctx.sequence_residues(Window::new(0, 6)).unwrap(), vec![1, 2, 6, 3, 1, 6]);
//! let i1 = facmod::moments::count_product_collisions(&ctx, Window::new(0, 6), 1).unwrap();
//! assert_eq!(i1.to_string(), "10");
//! ```

pub mod bounds;
pub mod constructions;
pub mod convolution;
pub mod dft;
pub mod error;
pub mod field;
pub mod moments;
pub mod refcheck;
pub mod repcount;
pub mod spectrum;
pub mod sweep;

pub use error::{Error, Result};
pub use field::{PrimeContext, SequenceKind, Window};
pub use moments::CountScalar;

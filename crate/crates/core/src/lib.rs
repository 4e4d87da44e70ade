//! Exact computations on finite pointed metric spaces around the long
//! trapezoid inequality and its four-point symmetric strengthening.
//!
//! - [`metric`]: spaces with rational distances, axiom validation, balls.
//! - [`trapezoid`]: slacks, checks, least required ε, witness search, scans.
//! - [`freespace`]: Lipschitz functions, molecules, transport norms, slices,
//!   and the weighted sup-extension.
//! - [`construction`]: slice points `fᵢ` and a common perturbation `g` with
//!   `fᵢ ± g` still of norm at most one.
//! - [`families`]: generated spaces, including the two separating examples and
//!   ℓ₁ point sets.
//! - [`io`], [`report`], [`cli`]: JSON documents and the `sltp` command.
//!
//! ```
//! use sltp_core::families::gen_ex1;
//! use sltp_core::rational::{q, Rational};
//! use sltp_core::trapezoid::{counterexample_scan, Mode, Verdict};
//!
//! let space = gen_ex1(5).unwrap();
//! let n = space.ids(&["a1", "a2", "b1", "b2"]).unwrap();
//! let scan = counterexample_scan(&space, &n, &Rational::zero(), Mode::Sltp).unwrap();
//! let Verdict::AllPairsFail { min_required_epsilon, .. } = scan.verdict else { panic!() };
//! assert_eq!(min_required_epsilon, q(1, 3));
//! ```

pub mod cli;
pub mod construction;
pub mod error;
pub mod families;
pub mod freespace;
pub mod io;
pub mod metric;
pub mod rational;
pub mod report;
pub mod trapezoid;

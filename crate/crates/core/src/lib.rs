//! Numerical companion to the sharpness construction for lip-differentiability.
//!
//! * [`lorentz`]: distribution functions, nonincreasing rearrangements and
//!   Lorentz `(Q, q)` norms of step functions and radial profiles.
//! * [`capacity`]: Lipschitz bumps with a full-height plateau at a point and
//!   an arbitrarily small Lorentz norm of their Lipschitz field.
//! * [`cubetree`]: exact dyadic geometry of the nested cube families, their
//!   inner cubes, counts and measures.
//! * [`sharpfn`]: the assembled function with finite `lip` everywhere and
//!   infinite `Lip` on a set of positive measure, with certified probes.
//! * [`gradcheck`]: grid and curve checks of the chaining argument, the
//!   perturbed maximal function and the pointwise Hajłasz inequality.

pub mod capacity;
pub mod cubetree;
pub mod gradcheck;
pub mod lorentz;
pub mod numeric;
pub mod sharpfn;

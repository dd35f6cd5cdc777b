//! Painlevé-side content: residual evaluators for the σ-forms and related
//! ODEs, large-argument expansions with their Barnes-G constants, and
//! transport of series seeds along the hard-edge σ-form.

mod constants;
mod equations;
mod series;
mod transport;

pub use constants::{binet_f_difference, binet_integral, constant_c1, constant_c2, symjue_constant, widom_dyson};
pub use equations::{equation, equations, pvi_parameters, pvi_shift, residual, Point, SigmaEquation};
pub use series::{series_eval, AsymptoticSeries, Coefficient, SeriesKind, TermShape, SERIES_NAMES};
pub use transport::{ode_transport, sigma2_roots, Transported};

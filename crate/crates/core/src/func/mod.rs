//! p-adic functions of one variable: the expression tree, evaluation,
//! symbolic differentiation, the compact syntax, and forward images.

mod deriv;
mod eval;
mod expr;
mod image;
mod parse;

pub use deriv::symbolic_derivative;
pub use eval::{digit_spread, eval, guard_holds, select_case};
pub use expr::{Case, FuncExpr, Guard, Rational, RootBranch, ValuationSet};
pub use image::{image_map, image_residues, ImageSet};
pub use parse::{from_json, load_function, parse_expr};

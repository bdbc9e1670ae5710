//! Exact and floating-point algebra of the rotation algebra generated by
//! unitaries `u`, `v` with `uv = ρvu`.

mod identities;
mod parse;
mod poly;
mod scalar;
mod witness;

pub use identities::{check_bracket_identities, BracketReport, IdentityTally};
pub use parse::{parse_expr, parse_program, ParseError};
pub use poly::{bracket, curly, harper_exact, harper_float, AlgebraError, Mode, NcPoly, PhaseScalar, SL2Matrix};
pub use scalar::{gauss, gauss_ratio, gauss_to_c64, fmt_gauss, GaussRat, LaurentPoly, RatFunc, ZeroDivision};
pub use witness::{
    band_pivot, canonical_index, eval_expr, generation_witness, EvalTarget, Expr, ExprNode, GenerationWitness,
    WitnessError,
};

//! Decoders: the combinatorial rules and the LP relaxations.

mod combinatorial;
mod lp;

pub use combinatorial::{decode_coco, decode_coma, decode_nocoma, ColumnMatch, DecodeOutput};
pub use lp::{
    build_lipo_lp, build_nolipo_lp, build_nolipo_minus_lp, build_nolipo_plus_lp, decode_lipo,
    decode_nolipo, decode_nolipo_minus, decode_nolipo_plus, decode_nounlipo, eta_at,
    one_sided_objective, round_solution, LpDecodeOutput, PerturbationSpec, Side, TOL_INT,
};

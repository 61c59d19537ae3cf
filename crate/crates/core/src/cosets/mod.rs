//! n-th power cosets of ℚ_p^×, Hensel lifting, and representative sets Λ_n.

mod hensel;
mod table;

pub use hensel::{hensel_lift, Poly};
pub use table::{
    build_coset_table, build_coset_table_with_cap, cached_table, classify, hensel_exponent,
    is_nth_power, CosetLabel, CosetRep, CosetTable,
};

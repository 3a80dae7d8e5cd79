//! Strong Gröbner bases over the integers and the Laurent submodule
//! operations built on them.

mod basis;
mod order;
mod submodule;

pub use basis::{is_strong_groebner, normal_form, strong_groebner, Limits, ModElem, StrongGBasis};
pub use order::{ModuleOrder, MonomialOrder, OrderKind, Term};
pub use submodule::{
    elem_to_laurent, is_member, laurent_to_elem, module_colon, saturate_vars, strong_groebner_rows, submodule_equal,
    SubmoduleHandle,
};

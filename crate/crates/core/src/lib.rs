//! Exact computations with weak completions, tube algebras and the de Rham
//! and cyclic complexes that compute rigid cohomology of algebras over `F_p`.

pub mod completions;
pub mod cyclic;
pub mod derham;
pub mod homalg;
pub mod polyalg;
pub mod scalars;
pub mod tubes;

//! Fourier operators on the periodic box `(0, 2π)^d`.

mod field;
mod grid;
mod io;
mod modes;
mod ops;

pub use field::{Field, VectorField};
pub use grid::{GridSpec, TorusGrid};
pub use io::{read_field, write_field, FieldHeader};
pub use modes::{project_modes, Mode, ModeBasis, ModeKind};
pub use ops::{
    dealias, div, grad, inv_div, lap_inv, laplacian, padded_product, padded_size,
    random_band_limited, riesz, spectral_l2,
};

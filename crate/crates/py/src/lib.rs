//! Python bindings for the effalg library. Placeholder while the core is built.

use pyo3::prelude::*;

#[pymodule]
fn effalg(_m: &Bound<'_, PyModule>) -> PyResult<()> {
    Ok(())
}

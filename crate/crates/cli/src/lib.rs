//! Front end for the `imres` binary: JSON configs in, CSV tables out.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::RunConfig;
pub use error::CliError;
pub use output::{Cell, Table};
pub use run::{execute, RunOutcome};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "IMRES_OUTPUT_DIR";

pub const SCENARIOS: [(&str, &str); 3] = [
    (
        "lithography",
        "M-photon interference fringes cos²(Mκℓx + Mθ/2) on N pixels; θ is the pattern shift",
    ),
    (
        "gaussian_dot",
        "coherent Gaussian spot with peak amplitude α0 and width σ; θ is the dot centre",
    ),
    (
        "double_slit",
        "far field cos²(πθs/λ) over s ∈ [−𝒜, 𝒜]; θ is the slit separation",
    ),
];

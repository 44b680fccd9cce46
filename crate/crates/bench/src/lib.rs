//! Shared fixtures for the benchmarks.

use spectral_search_core::classify::{instance_tuplet, SweepOptions};
use spectral_search_core::graphs::FamilySpec;
use spectral_search_core::spectra::Tuplet;

/// Vertex-0 tuplet at γ = S₁ under the default options.
pub fn tuplet(spec: FamilySpec) -> Tuplet {
    instance_tuplet(&spec, &SweepOptions::default()).expect("benchmark fixture")
}

/// Same tuplet through the closed-form compressed route.
pub fn compressed_tuplet(spec: FamilySpec) -> Tuplet {
    let options = SweepOptions {
        prefer_compressed: true,
        ..SweepOptions::default()
    };
    instance_tuplet(&spec, &options).expect("benchmark fixture")
}

//! The Elevator product line shipped with the crate as a golden example.

use std::ops::Deref;

use crate::evaluation::GroundTruth;
use crate::io::{self, Dataset, TruthFile};
use crate::model::Product;
use crate::spectra::ProductSpectra;

pub const ELEVATOR_SYSTEM: &str = include_str!("../fixtures/elevator/system.json");
pub const ELEVATOR_PRODUCTS: &str = include_str!("../fixtures/elevator/products.json");
pub const ELEVATOR_SPECTRA: &str = include_str!("../fixtures/elevator/spectra.json");
pub const ELEVATOR_TRUTH: &str = include_str!("../fixtures/elevator/truth.json");

#[derive(Debug, Clone)]
pub struct Elevator {
    pub dataset: Dataset,
    pub truth: GroundTruth,
}

impl Elevator {
    /// Panics on an unknown id; fixture lookups are static.
    pub fn product(&self, id: &str) -> &Product {
        self.dataset
            .product(id)
            .unwrap_or_else(|| panic!("no product `{id}` in the elevator fixture"))
    }

    pub fn spectra_of(&self, id: &str) -> &ProductSpectra {
        self.dataset
            .spectra_of(id)
            .unwrap_or_else(|| panic!("no spectra for `{id}` in the elevator fixture"))
    }
}

impl Deref for Elevator {
    type Target = Dataset;

    fn deref(&self) -> &Dataset {
        &self.dataset
    }
}

pub fn elevator() -> Elevator {
    let dataset = Dataset::from_json_strs(ELEVATOR_SYSTEM, ELEVATOR_PRODUCTS, ELEVATOR_SPECTRA)
        .expect("elevator fixture is valid");
    let truth: TruthFile = io::parse_json("truth", ELEVATOR_TRUTH).expect("elevator truth parses");
    let truth = io::ground_truth(&dataset.system, truth).expect("elevator truth resolves");
    Elevator { dataset, truth }
}

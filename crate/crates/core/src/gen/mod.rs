//! Benchmark instance generators and dataset assembly.

pub mod co;
pub mod dataset;
pub mod twod;

pub use co::{gen_co, CoFamily};
pub use dataset::{
    gen_dataset, ingest, write_dataset, Dataset, DatasetConfig, DatasetSample, SampleSource,
};
pub use twod::{all_2d, gen_2d};

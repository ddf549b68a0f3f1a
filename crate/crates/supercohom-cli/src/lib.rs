//! IO companion of `supercohom-core`: algebra definition files, the result
//! document, table/CSV rendering, subcomplex dumps, benchmarking, and the
//! command-line surface. The exit-code contract lives in [`error`].

pub mod algebra_file;
pub mod bench;
pub mod driver;
pub mod error;
pub mod manifest;
pub mod render;
pub mod result_doc;

//! Analysis and experiment pipelines behind the `lie-lab` command-line tool.

pub mod analyze;
pub mod canned;
pub mod converge;
pub mod fit;
pub mod format;
pub mod par;

pub use analyze::{analyze, AnalysisReport, AnalyzeOptions};
pub use converge::{run as run_converge, ConvergeOptions, ExperimentResult, Mode};
pub use format::AlgebraFile;

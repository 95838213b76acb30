//! Project files, the batch comparison pipeline, change reports and the
//! HTTP API used by the browser workbench.

pub mod pipeline;
pub mod project;
pub mod report;
pub mod server;

pub use pipeline::{run_pipeline, PipelineError, PipelineOutput, Stage};
pub use project::{Project, ProjectError, Role};
pub use report::ChangeReport;

pub mod app;
pub mod expr;
pub mod problem_file;
pub mod report;

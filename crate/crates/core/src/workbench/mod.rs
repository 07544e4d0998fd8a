//! Problem files, rendering, method dispatch, cross-checking and the corpus.

pub mod corpus;
pub mod format;
pub mod render;
pub mod solve;
pub mod verify;

pub use corpus::{builtin_corpus, check_problem, load_dir, run_corpus, CorpusOutcome, CorpusProblem, Expected, Landmark};
pub use format::{parse_document, parse_system, write_problem, Directive, Document, Problem};
pub use render::{normalize_whitespace, parse_structured, render_tableau, Style};
pub use solve::{render_vector, run_lsq, run_method, run_refined, LsqMethod, Method, Run, Trace};
pub use verify::{verify_all, Check, Outcome, VerificationReport};

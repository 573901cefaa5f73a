//! Interchange I/O, subject-disjoint splits, pair construction and batching.

mod batches;
mod interchange;
mod pairs;
mod split;
mod store;

pub use batches::{batches, BatchPlan};
pub use interchange::{
    discover_subjects, load_subject, write_subject, ActivityMeta, ChannelMeta, SubjectMeta,
    SubjectRecord, ECG_FILE, META_FILE, PPG_FILE,
};
pub use pairs::{build_pairs, PairReport, Preprocessor, SegmentPair};
pub use split::{make_split, split_sizes, SplitAssignment};
pub use store::{load_pairs, save_pairs};

//! Solution checking, solver campaigns and competition scoring.

mod campaign;
mod protocol;
mod record;
mod score;
mod verify;

pub use campaign::{judge, load_instances, run_campaign, run_one, Campaign, CampaignError};
pub use protocol::{parse_output, ProtocolError, Reported, SolverOutput};
pub use record::{read_records, write_records, RecordError, RunRecord, RunStatus};
pub use score::{
    percent, score_track, score_track_with, Mode, RankBy, Ranking, RankingRow, ScoreError, Senses,
};
pub use verify::{verify, Verdict};

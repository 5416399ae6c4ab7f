use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use thiserror::Error;

use super::protocol::{parse_output, ProtocolError, Reported, SolverOutput};
use super::record::{RunRecord, RunStatus};
use super::verify::verify;
use crate::model::{assignment_cost, Instance, Kind};
use crate::xcsp::{parse_instance, parse_solution_for, XcspError};

const POLL: Duration = Duration::from_millis(5);

/// How to run one solver over a directory of instances.
#[derive(Debug, Clone)]
pub struct Campaign {
    pub solver: String,
    /// Whitespace separated command line. `{instance}` is replaced by the
    /// instance path (appended when absent) and `{timeout}` by the limit in
    /// whole seconds.
    pub command: String,
    pub time_limit: Duration,
    pub jobs: usize,
}

#[derive(Debug, Error)]
pub enum CampaignError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: XcspError },
    #[error("cannot start `{command}`: {message}")]
    SpawnFailure { command: String, message: String },
    #[error("{instance}: {source}")]
    ProtocolViolation {
        instance: String,
        source: ProtocolError,
    },
}

/// Turns parsed solver output into a verified status and bound. Any claimed
/// solution that fails verification demotes the run to INVALID.
pub fn judge(instance: &Instance, output: &SolverOutput) -> (RunStatus, Option<i64>) {
    let Some(reported) = output.status else {
        return (RunStatus::Unknown, None);
    };
    match reported {
        Reported::Unsatisfiable => return (RunStatus::Unsat, None),
        Reported::Unknown => return (RunStatus::Unknown, None),
        _ => {}
    }
    let Some(text) = &output.solution else {
        return (RunStatus::Invalid, None);
    };
    let Ok(assignment) = parse_solution_for(text, instance) else {
        return (RunStatus::Invalid, None);
    };
    let claimed = output.bounds.last().copied();
    if !verify(instance, &assignment, claimed).is_valid() {
        return (RunStatus::Invalid, None);
    }
    match instance.kind {
        Kind::Csp => (RunStatus::Sat, None),
        Kind::Cop => {
            let Ok(cost) = assignment_cost(instance, &assignment) else {
                return (RunStatus::Invalid, None);
            };
            let status = if reported == Reported::OptimumFound {
                RunStatus::Optimum
            } else {
                RunStatus::Sat
            };
            (status, Some(cost))
        }
    }
}

fn command_line(campaign: &Campaign, path: &Path) -> Vec<String> {
    let p = path.display().to_string();
    let secs = campaign.time_limit.as_secs().max(1).to_string();
    let mut args: Vec<String> = campaign
        .command
        .split_whitespace()
        .map(|a| a.replace("{instance}", &p).replace("{timeout}", &secs))
        .collect();
    if !campaign.command.contains("{instance}") {
        args.push(p);
    }
    args
}

/// Runs the solver on one instance under the wall-clock limit.
pub fn run_one(
    campaign: &Campaign,
    id: &str,
    path: &Path,
    instance: &Instance,
) -> Result<RunRecord, CampaignError> {
    let args = command_line(campaign, path);
    let spawn_err = |message: String| CampaignError::SpawnFailure {
        command: args.join(" "),
        message,
    };
    let (program, rest) = args.split_first().ok_or_else(|| spawn_err("empty command".into()))?;
    let started = Instant::now();
    let mut child = Command::new(program)
        .args(rest)
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| spawn_err(e.to_string()))?;
    let mut stdout = child.stdout.take().expect("piped stdout");
    let reader = std::thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = stdout.read_to_end(&mut buf);
        buf
    });
    let mut timed_out = false;
    loop {
        match child.try_wait() {
            Ok(Some(_)) => break,
            Ok(None) if started.elapsed() >= campaign.time_limit => {
                let _ = child.kill();
                let _ = child.wait();
                timed_out = true;
                break;
            }
            Ok(None) => std::thread::sleep(POLL),
            Err(e) => return Err(spawn_err(e.to_string())),
        }
    }
    let elapsed = if timed_out {
        campaign.time_limit
    } else {
        started.elapsed()
    };
    let text = String::from_utf8_lossy(&reader.join().unwrap_or_default()).into_owned();
    let (status, bound) = match parse_output(&text) {
        Ok(out) => judge(instance, &out),
        // a killed solver may leave a torn last line
        Err(_) if timed_out => (RunStatus::Unknown, None),
        Err(source) => {
            return Err(CampaignError::ProtocolViolation {
                instance: id.to_string(),
                source,
            })
        }
    };
    Ok(RunRecord {
        instance: id.to_string(),
        solver: campaign.solver.clone(),
        status,
        bound,
        elapsed: elapsed.as_secs_f64(),
    })
}

/// All `*.xml` files of `dir`, sorted, keyed by file stem.
pub fn load_instances(dir: &Path) -> Result<Vec<(String, PathBuf, Instance)>, CampaignError> {
    let io = |path: &Path, source| CampaignError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "xml"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|path| {
            let text = std::fs::read_to_string(&path).map_err(|e| io(&path, e))?;
            let instance = parse_instance(&text).map_err(|source| CampaignError::Parse {
                path: path.clone(),
                source,
            })?;
            let id = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            Ok((id, path, instance))
        })
        .collect()
}

/// Runs every instance of `dir` with up to `jobs` concurrent solver
/// processes. Records come back in instance order.
pub fn run_campaign(dir: &Path, campaign: &Campaign) -> Result<Vec<RunRecord>, CampaignError> {
    let instances = load_instances(dir)?;
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<RunRecord, CampaignError>>>> =
        Mutex::new((0..instances.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..campaign.jobs.max(1).min(instances.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some((id, path, instance)) = instances.get(i) else {
                    return;
                };
                let r = run_one(campaign, id, path, instance);
                results.lock().expect("no poisoned worker")[i] = Some(r);
            });
        }
    });
    results
        .into_inner()
        .expect("no poisoned worker")
        .into_iter()
        .map(|r| r.expect("every instance ran"))
        .collect()
}

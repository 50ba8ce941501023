//! Per-assignment leaderboard with atomic file persistence.
//!
//! The board file is a single JSON array sorted by the ranking key.
//! Updates are read-modify-write with an atomic replace (temp file +
//! rename); concurrent writers serialize through an advisory `.lock`
//! file.

use serde::{Deserialize, Serialize};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeaderboardEntry {
    /// Pseudonymous student id; the tool never stores names.
    pub student: String,
    pub points: u64,
    pub tests_passed: u64,
    /// When this (points, tests) level was first reached.
    pub timestamp: u64,
}

impl LeaderboardEntry {
    /// Ranking key: points desc, tests desc, earliest first; id breaks
    /// remaining ties deterministically.
    fn rank_key(&self) -> (std::cmp::Reverse<u64>, std::cmp::Reverse<u64>, u64, String) {
        (
            std::cmp::Reverse(self.points),
            std::cmp::Reverse(self.tests_passed),
            self.timestamp,
            self.student.clone(),
        )
    }

    fn achievement(&self) -> (u64, u64) {
        (self.points, self.tests_passed)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum BoardError {
    #[error("leaderboard io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed leaderboard file: {0}")]
    Malformed(String),
    #[error("timed out waiting for the leaderboard lock at {0}")]
    LockTimeout(PathBuf),
}

/// Insert or update one student's entry. The entry is replaced only when
/// the new (points, tests) pair is strictly better lexicographically; the
/// timestamp records the first attainment. Returns true when the board
/// changed.
pub fn update_leaderboard(board: &mut Vec<LeaderboardEntry>, entry: LeaderboardEntry) -> bool {
    let changed = match board.iter_mut().find(|e| e.student == entry.student) {
        Some(existing) => {
            if entry.achievement() > existing.achievement() {
                *existing = entry;
                true
            } else {
                false
            }
        }
        None => {
            board.push(entry);
            true
        }
    };
    board.sort_by_key(LeaderboardEntry::rank_key);
    changed
}

/// Read a board file; a missing file is an empty board.
pub fn load_board(path: &Path) -> Result<Vec<LeaderboardEntry>, BoardError> {
    match fs::read_to_string(path) {
        Ok(text) => {
            let mut board: Vec<LeaderboardEntry> =
                serde_json::from_str(&text).map_err(|e| BoardError::Malformed(e.to_string()))?;
            board.sort_by_key(LeaderboardEntry::rank_key);
            Ok(board)
        }
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Vec::new()),
        Err(e) => Err(e.into()),
    }
}

/// Write the board atomically: temp file in the same directory, then
/// rename over the target.
pub fn save_board(path: &Path, board: &[LeaderboardEntry]) -> Result<(), BoardError> {
    let json = serde_json::to_string_pretty(board)
        .map_err(|e| BoardError::Malformed(e.to_string()))?;
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let tmp = dir.join(format!(
        ".{}.tmp-{}",
        path.file_name().and_then(|n| n.to_str()).unwrap_or("board"),
        std::process::id()
    ));
    fs::write(&tmp, json.as_bytes())?;
    fs::rename(&tmp, path)?;
    Ok(())
}

struct LockFile {
    path: PathBuf,
}

impl LockFile {
    fn acquire(board_path: &Path, timeout: Duration) -> Result<LockFile, BoardError> {
        let path = board_path.with_extension("json.lock");
        let start = Instant::now();
        loop {
            match fs::OpenOptions::new().write(true).create_new(true).open(&path) {
                Ok(_) => return Ok(LockFile { path }),
                Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                    if start.elapsed() >= timeout {
                        return Err(BoardError::LockTimeout(path));
                    }
                    std::thread::sleep(Duration::from_millis(10));
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
}

impl Drop for LockFile {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

/// Locked read-modify-write of a board file. Returns the updated board.
pub fn update_board_file(
    path: &Path,
    entry: LeaderboardEntry,
    lock_timeout: Duration,
) -> Result<Vec<LeaderboardEntry>, BoardError> {
    let _lock = LockFile::acquire(path, lock_timeout)?;
    let mut board = load_board(path)?;
    if update_leaderboard(&mut board, entry) {
        save_board(path, &board)?;
    }
    Ok(board)
}

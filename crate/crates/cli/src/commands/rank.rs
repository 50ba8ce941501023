//! `prologian rank`: leaderboard maintenance.

use crate::{exit, CommandOutput, RankArgs};
use prologian_core::scoring::{
    load_board, update_board_file, BoardError, LeaderboardEntry, Scorecard,
};
use std::time::Duration;

const LOCK_TIMEOUT: Duration = Duration::from_secs(5);

pub fn run(args: &RankArgs) -> CommandOutput {
    if args.add.is_none() && !args.show {
        return CommandOutput::input_error("rank needs --add <scorecard> --student <id> or --show");
    }

    let board = if let Some(scorecard_path) = &args.add {
        let student = args.student.clone().expect("clap enforces --student with --add");
        let text = match std::fs::read_to_string(scorecard_path) {
            Ok(t) => t,
            Err(e) => {
                return CommandOutput::input_error(format!(
                    "cannot read scorecard {}: {e}",
                    scorecard_path.display()
                ))
            }
        };
        let scorecard: Scorecard = match serde_json::from_str(&text) {
            Ok(c) => c,
            Err(e) => {
                return CommandOutput::input_error(format!(
                    "malformed scorecard {}: {e}",
                    scorecard_path.display()
                ))
            }
        };
        let entry = LeaderboardEntry {
            student,
            points: scorecard.total_points,
            tests_passed: scorecard.tests_passed as u64,
            timestamp: scorecard.timestamp,
        };
        match update_board_file(&args.board, entry, LOCK_TIMEOUT) {
            Ok(board) => board,
            Err(e @ BoardError::LockTimeout(_)) => {
                return CommandOutput {
                    exit: exit::INTERNAL,
                    stdout: String::new(),
                    stderr: format!("error: {e}\n"),
                }
            }
            Err(e) => return CommandOutput::input_error(e.to_string()),
        }
    } else {
        match load_board(&args.board) {
            Ok(board) => board,
            Err(e) => return CommandOutput::input_error(e.to_string()),
        }
    };

    let stdout = if args.json {
        format!("{}\n", serde_json::to_string_pretty(&board).expect("board serializes"))
    } else {
        render_board(&board)
    };
    CommandOutput { exit: exit::OK, stdout, stderr: String::new() }
}

fn render_board(board: &[LeaderboardEntry]) -> String {
    let mut out = String::from("Rank  Student                Points  Tests  Since\n");
    out.push_str(&"-".repeat(54));
    out.push('\n');
    for (i, entry) in board.iter().enumerate() {
        out.push_str(&format!(
            "{:>4}  {:<20}  {:>6}  {:>5}  {}\n",
            i + 1,
            entry.student,
            entry.points,
            entry.tests_passed,
            entry.timestamp
        ));
    }
    if board.is_empty() {
        out.push_str("(empty board)\n");
    }
    out
}

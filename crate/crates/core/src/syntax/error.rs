//! Syntax errors and their student-facing rendering.

use super::span::SourceSpan;
use serde::{Deserialize, Serialize};

/// A single syntax problem, carrying enough context to be rendered as a
/// highlighted snippet without re-reading the source file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntaxError {
    pub message: String,
    pub span: SourceSpan,
    /// Verbatim excerpt of the offending line(s) plus a `^`/`~` marker line.
    pub snippet: String,
}

impl SyntaxError {
    pub fn new(source: &str, message: impl Into<String>, span: SourceSpan) -> Self {
        let snippet = build_snippet(source, &span);
        SyntaxError { message: message.into(), span, snippet }
    }
}

impl std::fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.span, self.message)
    }
}

impl std::error::Error for SyntaxError {}

fn source_line(source: &str, line: usize) -> &str {
    source.split('\n').nth(line.saturating_sub(1)).unwrap_or("").trim_end_matches('\r')
}

/// Marker under `[from_col, to_col)` (1-based, in characters). The first
/// marked column gets `^`, the rest `~`.
fn marker_line(line: &str, from_col: usize, to_col: usize, lead: char) -> String {
    let width = line.chars().count();
    let from = from_col.max(1);
    let to = to_col.max(from + 1).min(width.saturating_add(2));
    let mut out = String::new();
    for col in 1..from {
        // Preserve tabs so the marker stays aligned with the text above.
        let c = line.chars().nth(col - 1).unwrap_or(' ');
        out.push(if c == '\t' { '\t' } else { ' ' });
    }
    out.push(lead);
    for _ in from + 1..to {
        out.push('~');
    }
    out
}

/// Excerpt + marker for a span. Multi-line spans show the first and last
/// line with a `…` line between.
fn build_snippet(source: &str, span: &SourceSpan) -> String {
    let first = source_line(source, span.start_line);
    if !span.is_multiline() {
        let end_col = if span.end_col > span.start_col { span.end_col } else { span.start_col + 1 };
        format!("{}\n{}", first, marker_line(first, span.start_col, end_col, '^'))
    } else {
        let last = source_line(source, span.end_line);
        let first_marker = marker_line(first, span.start_col, first.chars().count() + 2, '^');
        let last_marker = marker_line(last, 1, span.end_col.max(2), '~');
        format!("{}\n{}\n…\n{}\n{}", first, first_marker, last, last_marker)
    }
}

/// Render one error as a deterministic text block: `line:col` prefix,
/// message, then the highlighted snippet indented by four spaces.
pub fn render_error(source: &str, err: &SyntaxError) -> String {
    // The stored snippet is already derived from the same source; rebuild
    // defensively in case the error was constructed elsewhere.
    let snippet = if err.snippet.is_empty() { build_snippet(source, &err.span) } else { err.snippet.clone() };
    let mut out = format!("{}: syntax error: {}\n", err.span, err.message);
    for line in snippet.lines() {
        out.push_str("    ");
        out.push_str(line);
        out.push('\n');
    }
    out
}

/// Render a list of errors in source order, separated by blank lines.
pub fn render_errors(source: &str, errs: &[SyntaxError]) -> String {
    let mut sorted: Vec<&SyntaxError> = errs.iter().collect();
    sorted.sort_by_key(|e| (e.span.start_offset, e.span.end_offset));
    sorted.iter().map(|e| render_error(source, e)).collect::<Vec<_>>().join("\n")
}

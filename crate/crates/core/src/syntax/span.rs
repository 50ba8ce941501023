//! Source locations attached to tokens, terms and errors.

use serde::{Deserialize, Serialize};

/// A half-open byte range into the source text plus 1-based line/column
/// coordinates for both endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceSpan {
    pub start_offset: usize,
    pub end_offset: usize,
    pub start_line: usize,
    pub start_col: usize,
    pub end_line: usize,
    pub end_col: usize,
}

impl SourceSpan {
    pub fn new(
        start_offset: usize,
        end_offset: usize,
        start_line: usize,
        start_col: usize,
        end_line: usize,
        end_col: usize,
    ) -> Self {
        debug_assert!(start_offset <= end_offset);
        SourceSpan { start_offset, end_offset, start_line, start_col, end_line, end_col }
    }

    /// Span for terms that were produced by the engine or the standard
    /// library rather than read from user source.
    pub fn synthetic() -> Self {
        SourceSpan { start_offset: 0, end_offset: 0, start_line: 1, start_col: 1, end_line: 1, end_col: 1 }
    }

    /// Smallest span covering both `self` and `other`.
    pub fn cover(&self, other: &SourceSpan) -> SourceSpan {
        let (start_offset, start_line, start_col) = if self.start_offset <= other.start_offset {
            (self.start_offset, self.start_line, self.start_col)
        } else {
            (other.start_offset, other.start_line, other.start_col)
        };
        let (end_offset, end_line, end_col) = if self.end_offset >= other.end_offset {
            (self.end_offset, self.end_line, self.end_col)
        } else {
            (other.end_offset, other.end_line, other.end_col)
        };
        SourceSpan { start_offset, end_offset, start_line, start_col, end_line, end_col }
    }

    /// True when `inner` lies inside `self` (offset containment).
    pub fn contains(&self, inner: &SourceSpan) -> bool {
        self.start_offset <= inner.start_offset && inner.end_offset <= self.end_offset
    }

    pub fn is_multiline(&self) -> bool {
        self.start_line != self.end_line
    }
}

impl std::fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_multiline() {
            write!(f, "{}:{}-{}:{}", self.start_line, self.start_col, self.end_line, self.end_col)
        } else {
            write!(f, "{}:{}", self.start_line, self.start_col)
        }
    }
}

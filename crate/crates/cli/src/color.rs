//! Minimal ANSI coloring, honoring `--color` and `PROLOGIAN_COLOR`.

use clap::ValueEnum;
use std::io::IsTerminal;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ColorChoice {
    Auto,
    Always,
    Never,
}

#[derive(Debug, Clone, Copy)]
pub struct Palette {
    enabled: bool,
}

impl Palette {
    /// The explicit flag wins over the environment variable; `auto`
    /// enables color only on a terminal.
    pub fn from_choice(flag: Option<ColorChoice>) -> Palette {
        let choice = flag.or_else(|| match std::env::var("PROLOGIAN_COLOR").ok().as_deref() {
            Some("always") => Some(ColorChoice::Always),
            Some("never") => Some(ColorChoice::Never),
            Some("auto") => Some(ColorChoice::Auto),
            _ => None,
        });
        let enabled = match choice.unwrap_or(ColorChoice::Auto) {
            ColorChoice::Always => true,
            ColorChoice::Never => false,
            ColorChoice::Auto => std::io::stdout().is_terminal(),
        };
        Palette { enabled }
    }

    pub fn off() -> Palette {
        Palette { enabled: false }
    }

    fn paint(&self, code: &str, text: &str) -> String {
        if self.enabled {
            format!("\x1b[{code}m{text}\x1b[0m")
        } else {
            text.to_string()
        }
    }

    pub fn good(&self, text: &str) -> String {
        self.paint("32", text)
    }

    pub fn bad(&self, text: &str) -> String {
        self.paint("31;1", text)
    }

    pub fn warn(&self, text: &str) -> String {
        self.paint("33", text)
    }
}

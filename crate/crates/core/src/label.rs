use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Visual intention class. `Text` is the positive class for every
/// binary metric and ROC score in this crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Label {
    Text,
    Image,
}

impl Label {
    pub const ALL: [Label; 2] = [Label::Text, Label::Image];

    pub fn is_positive(self) -> bool {
        self == Label::Text
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Text => "TEXT",
            Label::Image => "IMAGE",
        }
    }

    /// `+1.0` for TEXT, `-1.0` for IMAGE.
    pub fn sign(self) -> f64 {
        if self.is_positive() {
            1.0
        } else {
            -1.0
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown label {0:?} (expected TEXT or IMAGE)")]
pub struct ParseLabelError(pub String);

impl FromStr for Label {
    type Err = ParseLabelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "TEXT" => Ok(Label::Text),
            "IMAGE" => Ok(Label::Image),
            other => Err(ParseLabelError(other.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        for l in Label::ALL {
            assert_eq!(l.as_str().parse::<Label>().unwrap(), l);
        }
        assert!("PICTURE".parse::<Label>().is_err());
        assert!("text".parse::<Label>().is_err());
    }
}

use std::fmt;
use std::str::FromStr;

/// `a..b` or `a..=b` (both inclusive), or a single value `a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InclusiveRange {
    pub start: usize,
    pub end: usize,
}

impl InclusiveRange {
    pub fn iter(&self) -> std::ops::RangeInclusive<usize> {
        self.start..=self.end
    }
}

impl FromStr for InclusiveRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad range bound {t:?} in {s:?}"));
        match s.split_once("..") {
            Some((a, b)) => {
                let b = b.strip_prefix('=').unwrap_or(b);
                Ok(InclusiveRange {
                    start: parse(a)?,
                    end: parse(b)?,
                })
            }
            None => {
                let v = parse(s)?;
                Ok(InclusiveRange { start: v, end: v })
            }
        }
    }
}

impl fmt::Display for InclusiveRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

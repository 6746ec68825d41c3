use std::collections::BTreeSet;
use std::fmt;

/// Ultimately periodic word over sets of atom names.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Trace {
    pub prefix: Vec<BTreeSet<String>>,
    pub period: Vec<BTreeSet<String>>,
}

impl Trace {
    pub fn new(prefix: Vec<BTreeSet<String>>, period: Vec<BTreeSet<String>>) -> Self {
        assert!(!period.is_empty(), "trace period must be non-empty");
        Trace { prefix, period }
    }

    /// Convenience constructor from slices of atom names.
    pub fn from_atoms(prefix: &[&[&str]], period: &[&[&str]]) -> Self {
        let conv = |v: &[&[&str]]| -> Vec<BTreeSet<String>> {
            v.iter().map(|s| s.iter().map(|a| a.to_string()).collect()).collect()
        };
        Trace::new(conv(prefix), conv(period))
    }

    pub fn len(&self) -> usize {
        self.prefix.len() + self.period.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Letter at position `i` of the infinite word.
    pub fn at(&self, i: usize) -> &BTreeSet<String> {
        if i < self.prefix.len() {
            &self.prefix[i]
        } else {
            &self.period[(i - self.prefix.len()) % self.period.len()]
        }
    }

    /// Successor position in the folded representation.
    pub fn next(&self, i: usize) -> usize {
        if i + 1 < self.len() {
            i + 1
        } else {
            self.prefix.len()
        }
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |f: &mut fmt::Formatter<'_>, v: &[BTreeSet<String>]| -> fmt::Result {
            for (i, s) in v.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                f.write_str("{")?;
                for (j, a) in s.iter().enumerate() {
                    if j > 0 {
                        f.write_str(", ")?;
                    }
                    f.write_str(a)?;
                }
                f.write_str("}")?;
            }
            Ok(())
        };
        show(f, &self.prefix)?;
        f.write_str(" (")?;
        show(f, &self.period)?;
        f.write_str(")^w")
    }
}

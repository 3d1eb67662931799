//! Set partitions of `{1..l}` as restricted growth strings.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::sl::{Formula, Term};

/// A partition of `{1..l}`. Blocks are numbered from 1 in order of their
/// smallest element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition {
    /// `rgs[i]` is the 0-based block of element `i + 1`.
    rgs: Vec<usize>,
}

impl Partition {
    /// From a restricted growth string; `None` if it is not one.
    pub fn from_rgs(rgs: Vec<usize>) -> Option<Partition> {
        let mut max = None::<usize>;
        for &b in &rgs {
            let limit = max.map_or(0, |m| m + 1);
            if b > limit {
                return None;
            }
            max = Some(max.map_or(b, |m| m.max(b)));
        }
        Some(Partition { rgs })
    }

    pub fn rgs(&self) -> &[usize] {
        &self.rgs
    }

    /// Size of the partitioned set.
    pub fn len(&self) -> usize {
        self.rgs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rgs.is_empty()
    }

    pub fn num_blocks(&self) -> usize {
        self.rgs.iter().max().map_or(0, |m| m + 1)
    }

    /// 1-based block of the 1-based element `i`.
    pub fn class_of(&self, i: usize) -> usize {
        self.rgs[i - 1] + 1
    }

    /// Blocks as sorted lists of 1-based elements.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_blocks()];
        for (i, &b) in self.rgs.iter().enumerate() {
            out[b].push(i + 1);
        }
        out
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let blocks: Vec<String> = self
            .blocks()
            .iter()
            .map(|b| format!("{{{}}}", b.iter().map(|i| format!("a{i}")).collect::<Vec<_>>().join(",")))
            .collect();
        if blocks.is_empty() {
            return f.write_str("(none)");
        }
        f.write_str(&blocks.join(" "))
    }
}

/// All partitions of `{1..l}` in lexicographic order of their restricted
/// growth strings.
pub fn enumerate_partitions(l: usize) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut rgs = vec![0usize; l];
    let mut maxes = vec![0usize; l];
    loop {
        out.push(Partition { rgs: rgs.clone() });
        // rightmost position that can still grow
        let mut i = l;
        loop {
            if i <= 1 {
                return out;
            }
            i -= 1;
            if rgs[i] <= maxes[i - 1] {
                break;
            }
        }
        rgs[i] += 1;
        maxes[i] = maxes[i - 1].max(rgs[i]);
        for k in i + 1..l {
            rgs[k] = 0;
            maxes[k] = maxes[i];
        }
    }
}

/// Replaces each constant `a_i` by the representative of its block.
pub fn apply_partition(f: &Formula, p: &Partition) -> Formula {
    f.map_terms(&|t| match t {
        Term::AddressConst(i) if *i >= 1 && *i <= p.len() => Term::AddressConst(p.class_of(*i)),
        other => other.clone(),
    })
}

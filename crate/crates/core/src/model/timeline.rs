use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::ModelError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockKind {
    Peak,
    Valley,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub kind: BlockKind,
    pub hhps: Range<usize>,
}

/// The day's half-hour periods split into alternating peak and valley blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Timeline {
    hhp_count: usize,
    blocks: Vec<Block>,
    block_of: Vec<usize>,
}

impl Timeline {
    /// Builds a timeline from sorted, disjoint peak ranges; every gap becomes a valley.
    ///
    /// Two peaks must be separated by at least one valley period.
    pub fn build(hhp_count: usize, peaks: &[Range<usize>]) -> Result<Timeline, ModelError> {
        let mut blocks = Vec::with_capacity(2 * peaks.len() + 1);
        let mut cursor = 0usize;
        for (i, p) in peaks.iter().enumerate() {
            if p.start >= p.end || p.end > hhp_count {
                return Err(ModelError::BadPeakRange { index: i, start: p.start, end: p.end, hhp_count });
            }
            if i > 0 {
                let prev = &peaks[i - 1];
                if p.start < prev.end {
                    return Err(ModelError::OverlappingPeaks { first: i - 1, second: i });
                }
                if p.start == prev.end {
                    return Err(ModelError::AdjacentPeaks { first: i - 1, second: i, at: p.start });
                }
            }
            if p.start > cursor {
                blocks.push(Block { kind: BlockKind::Valley, hhps: cursor..p.start });
            }
            blocks.push(Block { kind: BlockKind::Peak, hhps: p.clone() });
            cursor = p.end;
        }
        if cursor < hhp_count {
            blocks.push(Block { kind: BlockKind::Valley, hhps: cursor..hhp_count });
        }
        let mut block_of = vec![0; hhp_count];
        for (b, block) in blocks.iter().enumerate() {
            for h in block.hhps.clone() {
                block_of[h] = b;
            }
        }
        Ok(Timeline { hhp_count, blocks, block_of })
    }

    pub fn hhp_count(&self) -> usize {
        self.hhp_count
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn peaks(&self) -> impl Iterator<Item = &Block> {
        self.blocks.iter().filter(|b| b.kind == BlockKind::Peak)
    }

    pub fn peak_ranges(&self) -> Vec<Range<usize>> {
        self.peaks().map(|b| b.hhps.clone()).collect()
    }

    /// Index into [`Timeline::blocks`] of the block holding `hhp`.
    pub fn block_index(&self, hhp: usize) -> Option<usize> {
        self.block_of.get(hhp).copied()
    }

    pub fn block_of(&self, hhp: usize) -> Option<&Block> {
        self.block_index(hhp).map(|b| &self.blocks[b])
    }

    pub fn is_peak(&self, hhp: usize) -> bool {
        matches!(self.block_of(hhp), Some(b) if b.kind == BlockKind::Peak)
    }
}

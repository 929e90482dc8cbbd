//! Binary trajectory dumps for replay tests.
//!
//! Each frame is the sweep number as little-endian `u64` followed by the
//! spins packed eight per byte, least significant bit first, bit set for an
//! up spin (+1 bipolar, 1 binary).

use std::io::{self, Read, Write};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrajectoryFrame {
    pub sweep: u64,
    pub up: Vec<bool>,
}

pub struct TrajectoryWriter<W: Write> {
    out: W,
    buf: Vec<u8>,
}

impl<W: Write> TrajectoryWriter<W> {
    pub fn new(out: W) -> Self {
        TrajectoryWriter { out, buf: Vec::new() }
    }

    pub fn write_frame(&mut self, sweep: u64, state: &[i8]) -> io::Result<()> {
        self.buf.clear();
        self.buf.resize(state.len().div_ceil(8), 0);
        for (i, &s) in state.iter().enumerate() {
            if s > 0 {
                self.buf[i / 8] |= 1 << (i % 8);
            }
        }
        self.out.write_all(&sweep.to_le_bytes())?;
        self.out.write_all(&self.buf)
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

pub fn read_trajectory(mut input: impl Read, num_spins: usize) -> io::Result<Vec<TrajectoryFrame>> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    let frame_len = 8 + num_spins.div_ceil(8);
    if bytes.len() % frame_len != 0 {
        return Err(io::Error::new(io::ErrorKind::InvalidData, "truncated trajectory frame"));
    }
    Ok(bytes
        .chunks_exact(frame_len)
        .map(|f| TrajectoryFrame {
            sweep: u64::from_le_bytes(f[..8].try_into().unwrap()),
            up: (0..num_spins).map(|i| f[8 + i / 8] >> (i % 8) & 1 == 1).collect(),
        })
        .collect())
}

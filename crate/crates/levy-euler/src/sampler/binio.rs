//! Binary dump of path bundles for replay.
//!
//! Layout (little-endian): magic `LVPATH01`, spec hash (u64), horizon
//! (f64), n (u64), refinement (u32), seed pair (u64, u64), fine length
//! (u64), jump count (u64, `u64::MAX` meaning "no record"), then the fine
//! increments as f64 and the `(time, size)` jump pairs. Coarse increments
//! are reconstructed by aggregation, which is exact by the coupling
//! invariant.

use crate::error::{Error, Result};
use crate::measure::MeasureSpec;
use crate::rngstream::SeedLineage;
use crate::sampler::{aggregate, Jump, PathBundle};
use sha2::{Digest, Sha256};
use std::io::{Read, Write};

const MAGIC: &[u8; 8] = b"LVPATH01";

/// Stable 64-bit fingerprint of a measure specification.
pub fn spec_hash(spec: &MeasureSpec) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(format!("{spec:?}").as_bytes());
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().unwrap())
}

pub fn write_bundle(w: &mut impl Write, bundle: &PathBundle, spec_hash: u64) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&spec_hash.to_le_bytes())?;
    w.write_all(&bundle.horizon.to_le_bytes())?;
    w.write_all(&bundle.n.to_le_bytes())?;
    w.write_all(&bundle.refinement.to_le_bytes())?;
    w.write_all(&bundle.seed.experiment_seed.to_le_bytes())?;
    w.write_all(&bundle.seed.path_index.to_le_bytes())?;
    w.write_all(&(bundle.fine_increments.len() as u64).to_le_bytes())?;
    let jump_count = bundle.jump_record.as_ref().map_or(u64::MAX, |j| j.len() as u64);
    w.write_all(&jump_count.to_le_bytes())?;
    for v in &bundle.fine_increments {
        w.write_all(&v.to_le_bytes())?;
    }
    if let Some(jumps) = &bundle.jump_record {
        for j in jumps {
            w.write_all(&j.time.to_le_bytes())?;
            w.write_all(&j.size.to_le_bytes())?;
        }
    }
    Ok(())
}

fn read_u64(r: &mut impl Read) -> Result<u64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(f64::from_le_bytes(buf))
}

pub fn read_bundle(r: &mut impl Read) -> Result<(u64, PathBundle)> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Config("not a path-bundle file".into()));
    }
    let hash = read_u64(r)?;
    let horizon = read_f64(r)?;
    let n = read_u64(r)?;
    let mut k4 = [0u8; 4];
    r.read_exact(&mut k4)?;
    let refinement = u32::from_le_bytes(k4);
    let seed = SeedLineage { experiment_seed: read_u64(r)?, path_index: read_u64(r)? };
    let fine_len = read_u64(r)? as usize;
    let jump_count = read_u64(r)?;
    let mut fine = Vec::with_capacity(fine_len);
    for _ in 0..fine_len {
        fine.push(read_f64(r)?);
    }
    let jump_record = if jump_count == u64::MAX {
        None
    } else {
        let mut jumps = Vec::with_capacity(jump_count as usize);
        for _ in 0..jump_count {
            jumps.push(Jump { time: read_f64(r)?, size: read_f64(r)? });
        }
        Some(jumps)
    };
    let coarse = aggregate(&fine, refinement as usize)?;
    Ok((
        hash,
        PathBundle {
            n,
            refinement,
            horizon,
            fine_increments: fine,
            coarse_increments: coarse,
            jump_record,
            seed,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{MeasureFamily, MeasureSpec};
    use crate::sampler::{sample_path, RecordPolicy, SamplerConfig, SamplerMode};

    #[test]
    fn round_trip_is_exact() {
        let spec = MeasureSpec::new(
            MeasureFamily::TruncatedStable { alpha: 0.5, c_plus: 0.6, c_minus: 0.4, p: 1.0 },
            0.1,
        )
        .unwrap();
        let mut config =
            SamplerConfig::new(spec.clone(), SamplerMode::TruncationCompound { beta: 0.05 }, 16, 4, 1.0);
        config.record = RecordPolicy::All;
        let bundle =
            sample_path(&config, SeedLineage { experiment_seed: 3, path_index: 9 }).unwrap();
        let mut buf = Vec::new();
        write_bundle(&mut buf, &bundle, spec_hash(&spec)).unwrap();
        let (hash, back) = read_bundle(&mut buf.as_slice()).unwrap();
        assert_eq!(hash, spec_hash(&spec));
        assert_eq!(back, bundle);
    }

    #[test]
    fn rejects_foreign_files() {
        let garbage = b"NOTMAGIC".to_vec();
        assert!(read_bundle(&mut garbage.as_slice()).is_err());
    }
}

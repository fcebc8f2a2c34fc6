//! Columnar text serialization for displacements, bond forms and window
//! descriptions, plus the core-corrector artifact bundle.
//!
//! Snapshots are tab-separated with `#` comment headers; values print with
//! 17 significant digits so they round-trip exactly.

use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::forms::{BondForm, Displacement};
use crate::lattice::{LatticeComplex, Site, WindowKind};
use crate::predictor::{CoreCorrector, DecayFit};

/// Write a displacement keyed by `(m, n)`.
pub fn write_displacement(
    out: &mut impl Write,
    complex: &LatticeComplex,
    y: &Displacement,
) -> Result<()> {
    writeln!(out, "# displacement snapshot")?;
    writeln!(out, "# m\tn\tvalue")?;
    for i in 0..complex.n_sites() {
        let s = complex.site(i);
        writeln!(out, "{}\t{}\t{:.17e}", s.m, s.n, y.get(i))?;
    }
    Ok(())
}

/// Read a displacement previously written with [`write_displacement`];
/// every window site must be present.
pub fn read_displacement(input: &mut impl BufRead, complex: &LatticeComplex) -> Result<Displacement> {
    let mut values = vec![f64::NAN; complex.n_sites()];
    let mut seen = 0usize;
    for line in input.lines() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        let m: i64 = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad site row: {trimmed:?}")))?;
        let n: i64 = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad site row: {trimmed:?}")))?;
        let v: f64 = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad value in row: {trimmed:?}")))?;
        let idx = complex
            .site_lookup(Site::new(m, n))
            .ok_or_else(|| Error::Parse(format!("site ({m}, {n}) not in window")))?;
        if values[idx].is_nan() {
            seen += 1;
        }
        values[idx] = v;
    }
    if seen != complex.n_sites() {
        return Err(Error::Parse(format!(
            "snapshot covers {seen} of {} sites",
            complex.n_sites()
        )));
    }
    Ok(Displacement::from_values(values))
}

/// Write a bond form keyed by `(m, n, dir)` of the canonical bond.
pub fn write_bond_form(
    out: &mut impl Write,
    complex: &LatticeComplex,
    f: &BondForm,
) -> Result<()> {
    writeln!(out, "# bond form snapshot")?;
    writeln!(out, "# m\tn\tdir\tvalue")?;
    for k in 0..complex.n_bonds() {
        let b = complex.bond(k);
        writeln!(
            out,
            "{}\t{}\t{}\t{:.17e}",
            b.tail.m,
            b.tail.n,
            b.dir.index(),
            f.get(k)
        )?;
    }
    Ok(())
}

/// Window description: kind line plus the site list (and polygon corners).
pub fn write_complex(out: &mut impl Write, complex: &LatticeComplex) -> Result<()> {
    match complex.kind() {
        WindowKind::Ball { radius } => writeln!(out, "# window ball radius={radius}")?,
        WindowKind::Polygon { geometry } => {
            let corners: Vec<String> = geometry
                .corners
                .iter()
                .map(|c| format!("({},{})", c.m, c.n))
                .collect();
            writeln!(out, "# window polygon corners={}", corners.join(" "))?;
            writeln!(out, "# boundary index={}", geometry.index)?;
        }
    }
    writeln!(out, "# sites={}", complex.n_sites())?;
    writeln!(out, "# m\tn")?;
    for i in 0..complex.n_sites() {
        let s = complex.site(i);
        writeln!(out, "{}\t{}", s.m, s.n)?;
    }
    Ok(())
}

#[derive(serde::Serialize, serde::Deserialize)]
struct CoreCorrectorMeta {
    window_radius: f64,
    lambda_d: f64,
    decay_exponent: f64,
    decay_prefactor: f64,
    residual: f64,
    newton_iters: usize,
    snapshot: String,
}

/// Persist a core corrector as a JSON metadata file plus a displacement
/// snapshot next to it.
pub fn save_core_corrector(
    dir: &Path,
    stem: &str,
    complex: &LatticeComplex,
    core: &CoreCorrector,
) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let snapshot = format!("{stem}.tsv");
    let meta = CoreCorrectorMeta {
        window_radius: core.window_radius,
        lambda_d: core.lambda_d,
        decay_exponent: core.decay.exponent,
        decay_prefactor: core.decay.prefactor,
        residual: core.residual,
        newton_iters: core.newton_iters,
        snapshot: snapshot.clone(),
    };
    let json = serde_json::to_string_pretty(&meta)
        .map_err(|e| Error::Parse(format!("metadata encoding: {e}")))?;
    std::fs::write(dir.join(format!("{stem}.json")), json)?;
    let mut file = std::io::BufWriter::new(std::fs::File::create(dir.join(&snapshot))?);
    write_displacement(&mut file, complex, &core.u)?;
    Ok(())
}

/// Load a saved core corrector, rebuilding its ball window.
pub fn load_core_corrector(meta_path: &Path) -> Result<(LatticeComplex, CoreCorrector)> {
    let text = std::fs::read_to_string(meta_path)?;
    let meta: CoreCorrectorMeta =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("metadata: {e}")))?;
    let complex = crate::lattice::build_ball(meta.window_radius)?;
    let snapshot_path = meta_path
        .parent()
        .unwrap_or_else(|| Path::new("."))
        .join(&meta.snapshot);
    let mut reader = std::io::BufReader::new(std::fs::File::open(&snapshot_path)?);
    let u = read_displacement(&mut reader, &complex)?;
    let core = CoreCorrector {
        u,
        lambda_d: meta.lambda_d,
        decay: DecayFit {
            exponent: meta.decay_exponent,
            prefactor: meta.decay_prefactor,
        },
        window_radius: meta.window_radius,
        residual: meta.residual,
        newton_iters: meta.newton_iters,
    };
    Ok((complex, core))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::build_ball;

    #[test]
    fn displacement_roundtrip_is_exact() {
        let complex = build_ball(4.0).unwrap();
        let y = Displacement::from_fn(&complex, |i| (i as f64 * 0.1234567890123).sin() / 3.0);
        let mut buf = Vec::new();
        write_displacement(&mut buf, &complex, &y).unwrap();
        let mut reader = std::io::BufReader::new(&buf[..]);
        let back = read_displacement(&mut reader, &complex).unwrap();
        assert_eq!(y, back);
    }

    #[test]
    fn incomplete_snapshot_is_rejected() {
        let complex = build_ball(4.0).unwrap();
        let text = "# displacement snapshot\n0\t0\t1.0\n";
        let mut reader = std::io::BufReader::new(text.as_bytes());
        assert!(matches!(
            read_displacement(&mut reader, &complex),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn complex_export_mentions_kind() {
        let complex = build_ball(3.0).unwrap();
        let mut buf = Vec::new();
        write_complex(&mut buf, &complex).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("ball radius=3"));
        assert!(text.lines().filter(|l| !l.starts_with('#')).count() == complex.n_sites());
    }
}

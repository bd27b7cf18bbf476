//! Line-oriented text cache for solved artifacts.
//!
//! ```text
//! QADM-CACHE 1
//! family C
//! rank 2
//! D 1
//! N 4
//! K 2
//! psi standard
//! ybe plain
//! eta [..] [..] ...
//! T 16
//! <index> <scalar>
//! IMAGINARY <count>
//! <n> <scalar>
//! THETA <mu> <nnz>
//! <row> <col> <scalar>
//! CHECKSUM <sha256 of all preceding bytes>
//! ```
//!
//! Scalars use the canonical `num/den` strings, so loading and saving is the
//! identity on bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::QMat;
use crate::qfield::QScalar;
use crate::rootdata::{AffineType, Family, RootDatum};
use crate::rsolver::{Mu, PsiConvention, RArtifact, YbeVariant};

pub const MAGIC: &str = "QADM-CACHE";
pub const VERSION: u32 = 1;

fn eta_line(datum: &RootDatum) -> String {
    datum.eta().iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

fn mu_field(mu: &Mu) -> String {
    mu.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
}

pub fn to_string(art: &RArtifact) -> Result<String> {
    let datum = RootDatum::build(art.ty)?;
    let mut s = String::new();
    let ybe = art.ybe.map(|v| v.to_string()).unwrap_or_else(|| "none".into());
    let _ = writeln!(s, "{MAGIC} {VERSION}");
    let _ = writeln!(s, "family {}", art.ty.family.tag());
    let _ = writeln!(s, "rank {}", art.ty.rank);
    let _ = writeln!(s, "D {}", art.dd);
    let _ = writeln!(s, "N {}", art.n);
    let _ = writeln!(s, "K {}", art.k);
    let _ = writeln!(s, "psi {}", art.psi);
    let _ = writeln!(s, "ybe {ybe}");
    let _ = writeln!(s, "eta {}", eta_line(&datum));
    let _ = writeln!(s, "T {}", art.t.len());
    for (i, v) in art.t.iter().enumerate() {
        let _ = writeln!(s, "{i} {v}");
    }
    let _ = writeln!(s, "IMAGINARY {}", art.imaginary.len());
    for (n, v) in &art.imaginary {
        let _ = writeln!(s, "{n} {v}");
    }
    for (mu, m) in &art.theta {
        let _ = writeln!(s, "THETA {} {}", mu_field(mu), m.nnz());
        for (a, b, v) in m.entries() {
            let _ = writeln!(s, "{a} {b} {v}");
        }
    }
    let sum = hex::encode(Sha256::digest(s.as_bytes()));
    let _ = writeln!(s, "CHECKSUM {sum}");
    Ok(s)
}

struct Lines<'a> {
    it: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<(usize, &'a str)> {
        self.it.next().map(|(i, l)| (i + 1, l)).ok_or_else(|| Error::Parse("unexpected end of cache file".into()))
    }

    fn field(&mut self, key: &str) -> Result<&'a str> {
        let (n, line) = self.next()?;
        line.strip_prefix(key)
            .and_then(|r| r.strip_prefix(' '))
            .ok_or_else(|| Error::Parse(format!("line {n}: expected `{key}`")))
    }
}

fn num<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim().parse().map_err(|_| Error::Parse(format!("bad {what} `{s}`")))
}

fn scalar(s: &str) -> Result<QScalar> {
    s.parse().map_err(|e| Error::Parse(format!("bad scalar `{s}`: {e}")))
}

pub fn from_str(text: &str) -> Result<RArtifact> {
    let first = text.lines().next().unwrap_or("");
    match first.split_once(' ') {
        Some((MAGIC, v)) => {
            if v != VERSION.to_string() {
                return Err(Error::CacheVersion { found: v.into(), expected: VERSION.to_string() });
            }
        }
        _ => return Err(Error::Parse("missing cache header".into())),
    }
    let body_end = text
        .rfind("CHECKSUM ")
        .filter(|&p| p == 0 || text.as_bytes()[p - 1] == b'\n')
        .ok_or_else(|| Error::Parse("missing checksum line".into()))?;
    let (body, tail) = text.split_at(body_end);
    let stored = tail.strip_prefix("CHECKSUM ").and_then(|t| t.strip_suffix('\n')).ok_or_else(|| Error::Parse("malformed checksum line".into()))?;
    if hex::encode(Sha256::digest(body.as_bytes())) != stored {
        return Err(Error::CacheChecksum);
    }

    let mut lines = Lines { it: body.lines().enumerate() };
    lines.next()?;
    let family: Family = lines.field("family")?.parse().map_err(|e: Error| Error::Parse(e.to_string()))?;
    let rank: usize = num(lines.field("rank")?, "rank")?;
    let ty = AffineType::new(family, rank).map_err(|e| Error::Parse(e.to_string()))?;
    let dd: u32 = num(lines.field("D")?, "D")?;
    let n: usize = num(lines.field("N")?, "N")?;
    let k: i64 = num(lines.field("K")?, "K")?;
    let psi: PsiConvention = lines.field("psi")?.parse().map_err(|_| Error::Parse("bad psi".into()))?;
    let ybe = match lines.field("ybe")? {
        "none" => None,
        v => Some(v.parse::<YbeVariant>().map_err(|_| Error::Parse(format!("bad ybe `{v}`")))?),
    };
    let datum = RootDatum::build(ty)?;
    if lines.field("eta")? != eta_line(&datum) || datum.dim() != n || datum.ctx().d != dd {
        return Err(Error::Parse(format!("header does not match the root datum of {ty}")));
    }
    let tlen: usize = num(lines.field("T")?, "T length")?;
    if tlen != n * n {
        return Err(Error::Parse("T length is not N^2".into()));
    }
    let mut t = Vec::with_capacity(tlen);
    for i in 0..tlen {
        let (ln, line) = lines.next()?;
        let (idx, v) = line.split_once(' ').ok_or_else(|| Error::Parse(format!("line {ln}: malformed T entry")))?;
        if num::<usize>(idx, "T index")? != i {
            return Err(Error::Parse(format!("line {ln}: T index out of order")));
        }
        t.push(scalar(v)?);
    }
    let nim: usize = num(lines.field("IMAGINARY")?, "imaginary count")?;
    let mut imaginary = BTreeMap::new();
    for _ in 0..nim {
        let (ln, line) = lines.next()?;
        let (m, v) = line.split_once(' ').ok_or_else(|| Error::Parse(format!("line {ln}: malformed imaginary entry")))?;
        imaginary.insert(num(m, "order")?, scalar(v)?);
    }
    let mut theta = BTreeMap::new();
    while let Ok((ln, line)) = lines.next() {
        let rest = line.strip_prefix("THETA ").ok_or_else(|| Error::Parse(format!("line {ln}: expected THETA")))?;
        let (mu, nnz) = rest.split_once(' ').ok_or_else(|| Error::Parse(format!("line {ln}: malformed THETA header")))?;
        let mu: Mu = mu.split(',').map(|c| num(c, "weight")).collect::<Result<_>>()?;
        let nnz: usize = num(nnz, "entry count")?;
        let mut m = QMat::zero(n * n);
        for _ in 0..nnz {
            let (ln, line) = lines.next()?;
            let mut parts = line.splitn(3, ' ');
            let (Some(a), Some(b), Some(v)) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::Parse(format!("line {ln}: malformed matrix entry")));
            };
            let (a, b): (usize, usize) = (num(a, "row")?, num(b, "column")?);
            if a >= n * n || b >= n * n {
                return Err(Error::Parse(format!("line {ln}: index out of range")));
            }
            m.set(a, b, scalar(v)?);
        }
        if theta.insert(mu, m).is_some() {
            return Err(Error::Parse(format!("line {ln}: repeated weight")));
        }
    }
    Ok(RArtifact { ty, dd, n, k, psi, ybe, theta, t, imaginary })
}

/// Writes through a temporary file in the same directory and renames it
/// into place.
pub fn save(path: &Path, art: &RArtifact) -> Result<()> {
    let text = to_string(art)?;
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().ok_or_else(|| Error::Parse(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(text.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load(path: &Path) -> Result<RArtifact> {
    from_str(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evalrep::EvalRep;
    use crate::rsolver::solve_theta;

    fn artifact() -> RArtifact {
        let rep = EvalRep::build(AffineType::new(Family::A1, 1).unwrap()).unwrap();
        let mut art = solve_theta(&rep, 2).unwrap();
        art.select_ybe(1);
        art
    }

    #[test]
    fn round_trip() {
        let art = artifact();
        let text = to_string(&art).unwrap();
        let back = from_str(&text).unwrap();
        assert_eq!(back, art);
        assert_eq!(to_string(&back).unwrap(), text);
        assert!(text.contains("\nybe plain\n"));
    }

    #[test]
    fn distinct_errors() {
        let text = to_string(&artifact()).unwrap();
        let cut = &text[..text.len() / 2];
        assert!(matches!(from_str(cut), Err(Error::Parse(_))));
        let wrong = text.replacen("QADM-CACHE 1", "QADM-CACHE 7", 1);
        assert!(matches!(from_str(&wrong), Err(Error::CacheVersion { .. })));
        let tampered = text.replacen("\nK 2\n", "\nK 3\n", 1);
        assert!(matches!(from_str(&tampered), Err(Error::CacheChecksum)));
    }

    #[test]
    fn atomic_save() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.qaf");
        let art = artifact();
        save(&path, &art).unwrap();
        save(&path, &art).unwrap();
        assert_eq!(load(&path).unwrap(), art);
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}

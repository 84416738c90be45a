use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use kframe::{io, Formula, Frame, ModalityAlphabet};

use crate::FormulaArgs;

pub fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn frame(path: &Path) -> Result<Frame> {
    io::frame_from_json(&read(path)?).with_context(|| format!("in {}", path.display()))
}

pub fn frames(paths: &[std::path::PathBuf]) -> Result<Vec<Frame>> {
    paths.iter().map(|p| frame(p)).collect()
}

pub fn formula(text: &str) -> Result<Formula> {
    kframe::formula::parse(text).with_context(|| format!("in formula `{text}`"))
}

/// Inline formulas first, then the file's non-blank, non-comment lines.
pub fn formulas(args: &FormulaArgs) -> Result<Vec<Formula>> {
    let mut out: Vec<Formula> = args.inline.iter().map(|t| formula(t)).collect::<Result<_>>()?;
    if let Some(path) = &args.file {
        for (i, line) in read(path)?.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let phi = kframe::formula::parse(line).with_context(|| format!("{}:{}", path.display(), i + 1))?;
            out.push(phi);
        }
    }
    if out.is_empty() {
        bail!("no formula given (use --formula or --formula-file)");
    }
    Ok(out)
}

fn names(list: &str) -> Result<ModalityAlphabet> {
    let names: Vec<&str> = list.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    Ok(ModalityAlphabet::new(names)?)
}

/// Parses `v:a,b;h:c` into the vertical and horizontal alphabets.
pub fn split(text: &str) -> Result<(ModalityAlphabet, ModalityAlphabet)> {
    let (mut v, mut h) = (None, None);
    for part in text.split(';') {
        let Some((key, list)) = part.split_once(':') else {
            bail!("bad split `{text}`: expected v:...;h:...");
        };
        let slot = match key.trim() {
            "v" => &mut v,
            "h" => &mut h,
            other => bail!("bad split key `{other}`"),
        };
        if slot.is_some() {
            bail!("split key `{}` given twice", key.trim());
        }
        *slot = Some(names(list)?);
    }
    match (v, h) {
        (Some(v), Some(h)) => Ok((v, h)),
        _ => bail!("split `{text}` needs both v and h"),
    }
}

pub fn alphabet(list: &str) -> Result<ModalityAlphabet> {
    names(list)
}

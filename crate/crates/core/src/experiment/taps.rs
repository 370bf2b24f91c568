//! Plain-text tap files.
//!
//! ```text
//! # pcmfm taps v1
//! # filter = c0
//! # h = 0.7
//! # L = 2
//! # T = 1
//! # osf = 8
//! # pulse = raised-cosine
//! # seed = 42
//! # spacing_s = 0.125
//! # columns: re im
//! +0.00000000000000000e0 +0.00000000000000000e0
//! ...
//! ```
//!
//! The quantized variant carries `format = fixed` plus `frac_bits` and
//! `internal_bits`, and integer `re im` codes whose value is
//! `code * 2^-frac_bits`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::{ModulationParams, PulseShape};
use crate::quantize::QuantizedTaps;

const MAGIC: &str = "# pcmfm taps v1";

#[derive(Debug, Clone, PartialEq)]
pub struct TapHeader {
    pub filter: String,
    pub params: ModulationParams,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TapFile {
    pub header: TapHeader,
    pub taps: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedTapFile {
    pub header: TapHeader,
    pub taps: QuantizedTaps,
}

fn header_lines(h: &TapHeader) -> String {
    let p = &h.params;
    format!(
        "{MAGIC}\n# filter = {}\n# h = {:?}\n# L = {}\n# T = {:?}\n# osf = {}\n# pulse = {}\n# seed = {}\n# spacing_s = {:?}\n",
        h.filter,
        p.h,
        p.pulse_len,
        p.symbol_period,
        p.osf,
        p.pulse.name(),
        h.seed,
        p.sample_period(),
    )
}

pub fn format_taps(header: &TapHeader, taps: &[Complex64]) -> String {
    let mut out = header_lines(header);
    out.push_str("# columns: re im\n");
    for c in taps {
        out.push_str(&format!("{:+.17e} {:+.17e}\n", c.re, c.im));
    }
    out
}

pub fn format_fixed_taps(header: &TapHeader, taps: &QuantizedTaps) -> String {
    let mut out = header_lines(header);
    out.push_str(&format!(
        "# format = fixed\n# frac_bits = {}\n# internal_bits = {}\n# columns: re_code im_code\n",
        taps.frac_bits, taps.internal_bits
    ));
    for (r, i) in taps.re.iter().zip(&taps.im) {
        out.push_str(&format!("{r} {i}\n"));
    }
    out
}

struct Parsed<'a> {
    fields: Vec<(&'a str, &'a str)>,
    body: Vec<&'a str>,
}

fn split(text: &str) -> Result<Parsed<'_>> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(MAGIC) {
        return Err(Error::TapFormat("missing header line".into()));
    }
    let mut fields = Vec::new();
    let mut body = Vec::new();
    for line in lines {
        if let Some(rest) = line.strip_prefix('#') {
            if let Some((k, v)) = rest.split_once('=') {
                fields.push((k.trim(), v.trim()));
            }
        } else if !line.trim().is_empty() {
            body.push(line);
        }
    }
    Ok(Parsed { fields, body })
}

impl Parsed<'_> {
    fn get(&self, key: &str) -> Result<&str> {
        self.fields
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| *v)
            .ok_or_else(|| Error::TapFormat(format!("missing '{key}'")))
    }

    fn num<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        self.get(key)?
            .parse()
            .map_err(|_| Error::TapFormat(format!("bad value for '{key}'")))
    }

    fn header(&self) -> Result<TapHeader> {
        let pulse = match self.get("pulse")? {
            "raised-cosine" => PulseShape::RaisedCosine,
            other => return Err(Error::TapFormat(format!("unknown pulse '{other}'"))),
        };
        Ok(TapHeader {
            filter: self.get("filter")?.to_string(),
            params: ModulationParams {
                h: self.num("h")?,
                pulse_len: self.num("L")?,
                symbol_period: self.num("T")?,
                osf: self.num("osf")?,
                pulse,
            },
            seed: self.num("seed")?,
        })
    }
}

fn pair<T: std::str::FromStr>(line: &str) -> Result<(T, T)> {
    let mut it = line.split_whitespace();
    let bad = || Error::TapFormat(format!("bad tap line '{line}'"));
    let a = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
    let b = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
    if it.next().is_some() {
        return Err(bad());
    }
    Ok((a, b))
}

pub fn parse_taps(text: &str) -> Result<TapFile> {
    let p = split(text)?;
    let taps = p
        .body
        .iter()
        .map(|l| pair::<f64>(l).map(|(re, im)| Complex64::new(re, im)))
        .collect::<Result<_>>()?;
    Ok(TapFile {
        header: p.header()?,
        taps,
    })
}

pub fn parse_fixed_taps(text: &str) -> Result<FixedTapFile> {
    let p = split(text)?;
    if p.get("format")? != "fixed" {
        return Err(Error::TapFormat("not a fixed-point tap file".into()));
    }
    let (re, im) = p
        .body
        .iter()
        .map(|l| pair::<i32>(l))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .unzip();
    Ok(FixedTapFile {
        header: p.header()?,
        taps: QuantizedTaps {
            re,
            im,
            frac_bits: p.num("frac_bits")?,
            internal_bits: p.num("internal_bits")?,
        },
    })
}

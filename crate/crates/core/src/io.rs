//! Plain-text serialization of Jacobi forms. The format is line-based and
//! deterministic: a single header carrying the bookkeeping, then one line
//! per stored coefficient in BTreeMap order, so equal forms always produce
//! byte-identical files.
//!
//! ```text
//! lattice=B2 weight=0 index=1 trunc24=48 character=trivial
//! 0 0 0 10 1
//! 24 1 -1 3 2
//! ```
//!
//! A coefficient line is `n24 d_1 .. d_l numerator denominator`. Each `d_i`
//! is the pairing exponent in z_i: an integer `p` stands for the stored
//! half-unit value `2p`, and `p/2` (odd `p`) keeps half-integer support
//! representable. The lattice and group are resolved from the root system
//! tag through the catalog.

use crate::error::KernelError;
use crate::jacobi::{Character, JacobiForm};
use crate::rat::Rat;
use crate::rootsys::{catalog, RootSystemTag};
use crate::series::QZSeries;
use num_bigint::BigInt;
use std::str::FromStr;

fn fmt_d2(d2: i64) -> String {
    if d2 % 2 == 0 {
        format!("{}", d2 / 2)
    } else {
        format!("{d2}/2")
    }
}

fn parse_d2(tok: &str) -> Result<i64, KernelError> {
    if let Some(head) = tok.strip_suffix("/2") {
        let p: i64 = head
            .parse()
            .map_err(|_| KernelError::Parse(format!("bad z-exponent `{tok}`")))?;
        Ok(p)
    } else {
        let p: i64 = tok
            .parse()
            .map_err(|_| KernelError::Parse(format!("bad z-exponent `{tok}`")))?;
        Ok(2 * p)
    }
}

/// Find the catalog root system a form belongs to by matching its lattice
/// and symmetry group exactly.
fn resolve_tag(f: &JacobiForm) -> Result<RootSystemTag, KernelError> {
    for tag in RootSystemTag::all() {
        if tag.rank() != f.group.rank {
            continue;
        }
        let data = catalog(tag)?;
        if *data.lattice == *f.series.lat && data.group == f.group {
            return Ok(tag);
        }
    }
    Err(KernelError::UnsupportedConstruction(
        "the form's lattice and group match no catalog root system".into(),
    ))
}

/// Render a form to the text format. BTreeMap iteration makes the output a
/// canonical function of the form.
pub fn write_form(f: &JacobiForm) -> Result<String, KernelError> {
    let tag = resolve_tag(f)?;
    let mut out = format!(
        "lattice={tag} weight={} index={} trunc24={} character={}\n",
        f.weight, f.index, f.series.trunc24, f.character
    );
    for (n24, d2, c) in f.series.iter_terms() {
        out.push_str(&format!("{n24}"));
        for x in d2 {
            out.push(' ');
            out.push_str(&fmt_d2(*x));
        }
        out.push_str(&format!(" {} {}\n", c.numer(), c.denom()));
    }
    Ok(out)
}

/// Parse the text format back into a validated form. The header's lattice
/// field must be a root system tag; its lattice and full symmetry group
/// come from the catalog.
pub fn read_form(text: &str) -> Result<JacobiForm, KernelError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| KernelError::Parse("empty input".into()))?;

    let mut lattice = None;
    let mut weight = None;
    let mut index = None;
    let mut trunc24 = None;
    let mut character = None;
    for field in header.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| KernelError::Parse(format!("bad header field `{field}`")))?;
        match key {
            "lattice" => lattice = Some(RootSystemTag::parse(value)?),
            "weight" => {
                weight = Some(
                    value
                        .parse::<i64>()
                        .map_err(|_| KernelError::Parse(format!("bad weight `{value}`")))?,
                )
            }
            "index" => {
                index = Some(
                    value
                        .parse::<i64>()
                        .map_err(|_| KernelError::Parse(format!("bad index `{value}`")))?,
                )
            }
            "trunc24" => {
                trunc24 = Some(
                    value
                        .parse::<i64>()
                        .map_err(|_| KernelError::Parse(format!("bad trunc24 `{value}`")))?,
                )
            }
            "character" => character = Some(Character::parse(value)?),
            other => {
                return Err(KernelError::Parse(format!(
                    "unknown header field `{other}`"
                )))
            }
        }
    }
    let tag = lattice.ok_or_else(|| KernelError::Parse("header misses lattice".into()))?;
    let weight = weight.ok_or_else(|| KernelError::Parse("header misses weight".into()))?;
    let index = index.ok_or_else(|| KernelError::Parse("header misses index".into()))?;
    let trunc24 = trunc24.ok_or_else(|| KernelError::Parse("header misses trunc24".into()))?;
    let character =
        character.ok_or_else(|| KernelError::Parse("header misses character".into()))?;

    let data = catalog(tag)?;
    let rank = data.rank;
    let mut series = QZSeries::zero(data.lattice.clone(), trunc24);
    for line in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != rank + 3 {
            return Err(KernelError::Parse(format!(
                "expected {} fields on a coefficient line, got {}",
                rank + 3,
                toks.len()
            )));
        }
        let n24: i64 = toks[0]
            .parse()
            .map_err(|_| KernelError::Parse(format!("bad exponent `{}`", toks[0])))?;
        let mut d2 = Vec::with_capacity(rank);
        for t in &toks[1..=rank] {
            d2.push(parse_d2(t)?);
        }
        let numer = BigInt::from_str(toks[rank + 1])
            .map_err(|_| KernelError::Parse(format!("bad numerator `{}`", toks[rank + 1])))?;
        let denom = BigInt::from_str(toks[rank + 2])
            .map_err(|_| KernelError::Parse(format!("bad denominator `{}`", toks[rank + 2])))?;
        if denom == BigInt::from(0) {
            return Err(KernelError::Parse("zero denominator".into()));
        }
        series.set_coeff(n24, d2, Rat::new(numer, denom));
    }
    JacobiForm::new(series, weight, index, character, data.group)
}

/// Write a form to a file.
pub fn write_form_to(path: &std::path::Path, f: &JacobiForm) -> Result<(), KernelError> {
    std::fs::write(path, write_form(f)?)?;
    Ok(())
}

/// Read a form from a file.
pub fn read_form_from(path: &std::path::Path) -> Result<JacobiForm, KernelError> {
    let text = std::fs::read_to_string(path)?;
    read_form(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::phi_r;

    #[test]
    fn roundtrip_is_bit_exact() {
        let data = catalog(RootSystemTag::B(2)).unwrap();
        let phi = phi_r(&data, 48, None).unwrap();
        let text = write_form(&phi).unwrap();
        assert!(text.starts_with("lattice=B2 "));
        let back = read_form(&text).unwrap();
        assert_eq!(back.series, phi.series);
        assert_eq!(back.weight, phi.weight);
        assert_eq!(back.index, phi.index);
        assert_eq!(back.character, phi.character);
        assert_eq!(back.group, phi.group);
        assert_eq!(
            write_form(&back).unwrap(),
            text,
            "second render is byte-identical"
        );
    }

    #[test]
    fn header_and_negative_coefficients() {
        let data = catalog(RootSystemTag::A(1)).unwrap();
        let phi = phi_r(&data, 48, None).unwrap();
        let text = write_form(&phi).unwrap();
        let header = text.lines().next().unwrap();
        assert_eq!(
            header,
            "lattice=A1 weight=-1 index=2 trunc24=48 character=determinant"
        );
        // the q^0 term is zeta - zeta^{-1}
        assert!(text.contains("\n0 1 1 1\n"));
        assert!(text.contains("\n0 -1 -1 1\n"));
    }

    #[test]
    fn corrupted_inputs_are_rejected() {
        let data = catalog(RootSystemTag::A(1)).unwrap();
        let phi = phi_r(&data, 48, None).unwrap();
        let good = write_form(&phi).unwrap();

        for bad in [
            "".to_string(),
            good.replace("lattice=A1", "lattice=Q5"),
            good.replace("character=determinant", "character=spin"),
            good.replace("weight=-1", "weight=minus"),
            good.replacen("0 1 1 1", "0 1 1", 1),
            good.replacen("0 1 1 1", "0 1 x 1", 1),
            good.replacen("0 1 1 1", "0 1 1 0", 1),
            good.replace("lattice=A1 ", ""),
        ] {
            assert!(read_form(&bad).is_err(), "accepted corrupted input: {bad}");
        }

        // half-integer z-exponents parse but fail form validation
        let half = "lattice=A1 weight=0 index=1 trunc24=24 character=trivial\n0 1/2 1 1\n";
        assert!(matches!(
            read_form(half),
            Err(KernelError::IntegralityViolation(_))
        ));
    }

    #[test]
    fn empty_series_roundtrip() {
        let data = catalog(RootSystemTag::G2).unwrap();
        let zero = JacobiForm::new(
            QZSeries::zero(data.lattice.clone(), 72),
            -6,
            4,
            Character::Determinant,
            data.group.clone(),
        )
        .unwrap();
        let text = write_form(&zero).unwrap();
        let back = read_form(&text).unwrap();
        assert!(back.series.is_zero());
        assert_eq!(back.series.trunc24, 72);
        assert_eq!(write_form(&back).unwrap(), text);
    }
}

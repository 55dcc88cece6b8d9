//! Parsing of stream, measure, modulus and operator arguments.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use ncr_core::measures::{load_measure, Measure, MeasureSpec};
use ncr_core::modulus::ModulusFunction;
use ncr_core::rea::EnumerationOperator;
use ncr_core::{BitStream, BitString, Dyadic};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The bundled example operator.
pub const EXAMPLE_OPERATOR_JSON: &str = include_str!("../data/example_operator.json");

/// `zeros | ones | alt | periodic:BITS | file:PATH | random:SEED`.
///
/// File streams hold raw `0`/`1` text and repeat their last bit past the end;
/// a warning goes to stderr when that happens.
pub fn parse_stream(s: &str) -> Result<BitStream> {
    let (head, arg) = match s.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (s, None),
    };
    Ok(match (head, arg) {
        ("zeros", None) => BitStream::zeros(),
        ("ones", None) => BitStream::ones(),
        ("alt", None) => BitStream::alternating(),
        ("periodic", Some(bits)) => {
            let p: BitString = bits.parse().with_context(|| format!("bad periodic pattern {bits:?}"))?;
            if p.is_empty() {
                bail!("periodic pattern must be nonempty");
            }
            BitStream::periodic(p).with_label(s)
        }
        ("file", Some(path)) => file_stream(Path::new(path))?.with_label(s),
        ("random", Some(seed)) => {
            let seed: u64 = seed.parse().with_context(|| format!("bad seed {seed:?}"))?;
            random_stream(seed)
        }
        _ => bail!("unknown stream {s:?}; expected zeros, ones, alt, periodic:BITS, file:PATH or random:SEED"),
    })
}

fn file_stream(path: &Path) -> Result<BitStream> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let bits: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let prefix: BitString = bits
        .parse()
        .with_context(|| format!("{} must contain only 0 and 1", path.display()))?;
    let Some(last) = prefix.bit(prefix.len().wrapping_sub(1)) else {
        bail!("{} holds no bits", path.display());
    };
    eprintln!(
        "warning: stream file {} has {} bits; bit {} is repeated beyond them",
        path.display(),
        prefix.len(),
        u8::from(last)
    );
    Ok(BitStream::from_prefix(prefix, last))
}

/// A reproducible pseudo-random stream with random access by bit index.
pub fn random_stream(seed: u64) -> BitStream {
    BitStream::from_fn(format!("random:{seed}"), move |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_word_pos((i / 32) as u128);
        (rng.next_u32() >> (i % 32)) & 1 == 1
    })
}

/// Inline JSON, a shorthand (`lebesgue`, `bernoulli:P`, `perfect:MODULUS`,
/// `split:SEED`), or a path to a JSON file.
pub fn parse_measure(s: &str) -> Result<(Measure, MeasureSpec)> {
    let json = if s.trim_start().starts_with('{') {
        s.to_string()
    } else if let Some(spec) = measure_shorthand(s)? {
        serde_json::to_string(&spec)?
    } else {
        fs::read_to_string(s)
            .with_context(|| format!("{s:?} is neither a measure shorthand nor a readable file"))?
    };
    let spec: MeasureSpec = serde_json::from_str(&json).context("measure spec")?;
    let mu = load_measure(&json)?;
    Ok((mu, spec))
}

fn measure_shorthand(s: &str) -> Result<Option<MeasureSpec>> {
    let (head, arg) = match s.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (s, None),
    };
    Ok(Some(match (head, arg) {
        ("lebesgue", None) => MeasureSpec::Lebesgue {},
        ("bernoulli", Some(p)) => MeasureSpec::Bernoulli {
            p: p.parse::<Dyadic>()
                .map_err(|e| anyhow::anyhow!("bad probability {p:?}: {e}"))?,
        },
        ("perfect", Some(m)) => MeasureSpec::PerfectSet {
            modulus: parse_modulus(m)?,
        },
        ("split", Some(seed)) => {
            crate::corpus::random_split_spec(seed.parse().context("split seed")?)
        }
        _ => return Ok(None),
    }))
}

/// `poly:D | exp | table:V0,V1,…` or a JSON object.
pub fn parse_modulus(s: &str) -> Result<ModulusFunction> {
    let f = if s.trim_start().starts_with('{') {
        serde_json::from_str(s).context("modulus spec")?
    } else if s == "exp" {
        ModulusFunction::Exp {}
    } else if let Some(d) = s.strip_prefix("poly:") {
        ModulusFunction::Poly {
            degree: d.parse().context("poly degree")?,
        }
    } else if let Some(v) = s.strip_prefix("table:") {
        let values = v
            .split(',')
            .map(|x| x.trim().parse::<u64>())
            .collect::<std::result::Result<_, _>>()
            .context("table values")?;
        ModulusFunction::Table { values }
    } else {
        bail!("unknown modulus {s:?}; expected poly:D, exp or table:V0,V1,...");
    };
    f.validate()?;
    Ok(f)
}

/// `example` for the bundled operator, inline JSON, or a file path.
pub fn parse_operator(s: &str) -> Result<EnumerationOperator> {
    let text = match s {
        "example" => EXAMPLE_OPERATOR_JSON.to_string(),
        _ if s.trim_start().starts_with('{') => s.to_string(),
        _ => fs::read_to_string(s).with_context(|| format!("reading operator {s}"))?,
    };
    Ok(EnumerationOperator::from_json(&text)?)
}

pub fn read_json_arg(s: &str) -> Result<String> {
    if s.trim_start().starts_with('{') || s.trim_start().starts_with('[') {
        Ok(s.to_string())
    } else {
        fs::read_to_string(s).with_context(|| format!("reading {s}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stream_grammar() {
        assert_eq!(parse_stream("alt").unwrap().prefix(4).to_string(), "0101");
        assert_eq!(
            parse_stream("periodic:110").unwrap().prefix(7).to_string(),
            "1101101"
        );
        assert_eq!(parse_stream("ones").unwrap().prefix(3).to_string(), "111");
        assert!(parse_stream("periodic:").is_err());
        assert!(parse_stream("bogus").is_err());
        let a = parse_stream("random:7").unwrap().prefix(200);
        assert_eq!(a, parse_stream("random:7").unwrap().prefix(200));
        assert_ne!(a, parse_stream("random:8").unwrap().prefix(200));
    }

    #[test]
    fn file_stream_repeats_last_bit() {
        let dir = std::env::temp_dir().join(format!("ncr-stream-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let p = dir.join("bits.txt");
        fs::write(&p, "0101\n").unwrap();
        let s = parse_stream(&format!("file:{}", p.display())).unwrap();
        assert_eq!(s.prefix(8).to_string(), "01011111");
        fs::write(&p, "").unwrap();
        assert!(parse_stream(&format!("file:{}", p.display())).is_err());
        fs::write(&p, "01x").unwrap();
        assert!(parse_stream(&format!("file:{}", p.display())).is_err());
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn measure_forms() {
        assert!(parse_measure("lebesgue").is_ok());
        assert!(parse_measure("bernoulli:1/4").is_ok());
        assert!(parse_measure("bernoulli:0").is_err());
        assert!(parse_measure(r#"{"kind":"bernoulli","p":"3/8"}"#).is_ok());
        assert!(parse_measure(r#"{"kind":"lebesgue","extra":1}"#).is_err());
        assert!(parse_measure("perfect:poly:1").is_ok());
        assert!(parse_measure("split:3").is_ok());
    }

    #[test]
    fn modulus_forms() {
        assert_eq!(
            parse_modulus("poly:2").unwrap(),
            ModulusFunction::Poly { degree: 2 }
        );
        assert_eq!(parse_modulus("exp").unwrap(), ModulusFunction::Exp {});
        assert_eq!(
            parse_modulus("table:1,2,5").unwrap(),
            ModulusFunction::Table {
                values: vec![1, 2, 5]
            }
        );
        assert!(parse_modulus("sqrt").is_err());
    }

    #[test]
    fn bundled_operator_is_the_example() {
        assert_eq!(
            parse_operator("example").unwrap().to_json(),
            ncr_core::rea::example_operator().to_json()
        );
    }
}

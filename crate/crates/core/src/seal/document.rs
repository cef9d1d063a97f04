//! JSON scheme documents.
//!
//! ```json
//! {"n_messages":2,"dim_public":2,"dim_private":1,
//!  "priors":[5e-1,5e-1],
//!  "states":[[[1e0,0e0],[0e0,0e0]],[[0e0,0e0],[1e0,0e0]]]}
//! ```
//!
//! Complex numbers are `[re, im]` pairs. Reals are written with 17
//! significant digits so a save/load cycle is lossless.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::ser::{CompactFormatter, Formatter};

use super::SealScheme;
use crate::qcore::{Cplx, Ket};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeDocument {
    pub n_messages: usize,
    pub dim_public: usize,
    pub dim_private: usize,
    pub priors: Vec<f64>,
    pub states: Vec<Vec<[f64; 2]>>,
}

impl SchemeDocument {
    pub fn from_scheme(scheme: &SealScheme) -> Self {
        SchemeDocument {
            n_messages: scheme.n_messages(),
            dim_public: scheme.dim_public(),
            dim_private: scheme.dim_private(),
            priors: scheme.priors().to_vec(),
            states: scheme
                .states()
                .iter()
                .map(|k| k.amplitudes().iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }

    /// Validates every scheme invariant; nothing is renormalized.
    pub fn into_scheme(self) -> Result<SealScheme> {
        if self.priors.len() != self.n_messages {
            return Err(Error::InvalidScheme(format!(
                "n_messages is {} but {} priors given",
                self.n_messages,
                self.priors.len()
            )));
        }
        if self.states.len() != self.n_messages {
            return Err(Error::InvalidScheme(format!(
                "n_messages is {} but {} states given",
                self.n_messages,
                self.states.len()
            )));
        }
        let dim = self.dim_public * self.dim_private;
        let kets = self
            .states
            .into_iter()
            .enumerate()
            .map(|(i, amps)| {
                if amps.len() != dim {
                    return Err(Error::InvalidScheme(format!(
                        "state {i} has {} amplitudes, expected {dim}",
                        amps.len()
                    )));
                }
                Ket::new(amps.into_iter().map(|[re, im]| Cplx::new(re, im)).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        SealScheme::new(self.priors, self.dim_public, self.dim_private, kets)
    }
}

struct PreciseFloats(CompactFormatter);

impl Formatter for PreciseFloats {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

pub fn save_scheme<W: Write>(scheme: &SealScheme, writer: W) -> Result<()> {
    let doc = SchemeDocument::from_scheme(scheme);
    let mut ser = serde_json::Serializer::with_formatter(writer, PreciseFloats(CompactFormatter));
    doc.serialize(&mut ser)?;
    let mut writer = ser.into_inner();
    writer.write_all(b"\n")?;
    Ok(())
}

pub fn save_scheme_file(scheme: &SealScheme, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    save_scheme(scheme, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn load_scheme<R: Read>(reader: R) -> Result<SealScheme> {
    let doc: SchemeDocument = serde_json::from_reader(reader)?;
    doc.into_scheme()
}

pub fn load_scheme_file(path: impl AsRef<Path>) -> Result<SealScheme> {
    load_scheme(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seal::canonical_scheme;

    #[test]
    fn canonical_round_trip() {
        let s = canonical_scheme(4, 0.7).unwrap();
        let mut buf = Vec::new();
        save_scheme(&s, &mut buf).unwrap();
        let back = load_scheme(buf.as_slice()).unwrap();
        assert_eq!(back.priors(), s.priors());
        for (a, b) in back.states().iter().zip(s.states()) {
            assert!((a.amplitudes() - b.amplitudes()).camax() <= 1e-12);
        }
    }

    #[test]
    fn seventeen_significant_digits() {
        let s = canonical_scheme(4, 0.7).unwrap();
        let mut buf = Vec::new();
        save_scheme(&s, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("2.5000000000000000e-1"));
        assert!(text.contains("8.3666002653407556e-1"));
    }

    fn doc(priors: &str, second: &str) -> String {
        format!(
            r#"{{"n_messages":2,"dim_public":2,"dim_private":1,"priors":{priors},
               "states":[[[1,0],[0,0]],{second}]}}"#
        )
    }

    #[test]
    fn priors_not_normalized() {
        let err = load_scheme(doc("[0.5,0.4]", "[[0,0],[1,0]]").as_bytes()).unwrap_err();
        assert!(err.to_string().contains("priors not normalized"), "{err}");
    }

    #[test]
    fn state_not_normalized() {
        let err = load_scheme(doc("[0.5,0.5]", "[[0,0],[0.9,0]]").as_bytes()).unwrap_err();
        assert!(err.to_string().contains("state not normalized"), "{err}");
    }

    #[test]
    fn malformed_documents() {
        assert!(matches!(load_scheme("{".as_bytes()), Err(Error::Parse(_))));
        let short = doc("[0.5,0.5]", "[[1,0]]");
        assert!(matches!(
            load_scheme(short.as_bytes()),
            Err(Error::InvalidScheme(_))
        ));
        let count = r#"{"n_messages":3,"dim_public":1,"dim_private":1,"priors":[0.5,0.5],"states":[[[1,0]],[[1,0]]]}"#;
        assert!(matches!(
            load_scheme(count.as_bytes()),
            Err(Error::InvalidScheme(_))
        ));
    }
}

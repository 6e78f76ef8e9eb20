//! Versioned binary model container.
//!
//! Layout (all integers and floats little-endian):
//!
//! ```text
//! magic        4 bytes   "SME1" ("SME" + format version '1')
//! form         u8        0 = linear, 1 = bilinear
//! d, p, n      3 × u64   embedding dim, transformed dim, symbol count
//! symbols      n × (u32 byte length, UTF-8 bytes)
//! relations    ceil(n / 8) bytes, bit (i % 8) of byte (i / 8) set when
//!              symbol i is a relation type
//! embeddings   n × d f64, row-major
//! parameters   linear:   W_l1, W_l2, W_r1, W_r2 (p × d row-major), b_l, b_r
//!              bilinear: W_l, W_r (p × d × d, last index fastest), b_l, b_r
//! ```
//!
//! Nothing may follow the last parameter block.

use std::fs;
use std::path::Path;

use sme_core::{
    BilinearParams, Dictionary, EmbeddingTable, Form, LinearParams, Matrix, Model, Params, Tensor3,
};

use crate::error::{AppError, Result};

pub const MAGIC: &[u8; 3] = b"SME";
pub const VERSION: u8 = b'1';

/// A model together with the dictionary that names its rows.
#[derive(Debug, Clone, PartialEq)]
pub struct SavedModel {
    pub dictionary: Dictionary,
    pub model: Model,
}

pub fn encode(saved: &SavedModel) -> Vec<u8> {
    let model = &saved.model;
    let dict = &saved.dictionary;
    let (d, p) = model.params.dims();
    let n = dict.len();

    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.push(match model.form() {
        Form::Linear => 0,
        Form::Bilinear => 1,
    });
    for v in [d, p, n] {
        out.extend_from_slice(&(v as u64).to_le_bytes());
    }
    for s in dict.symbols() {
        out.extend_from_slice(&(s.len() as u32).to_le_bytes());
        out.extend_from_slice(s.as_bytes());
    }
    let mut bitmap = vec![0u8; n.div_ceil(8)];
    for (i, &rel) in dict.relation_flags().iter().enumerate() {
        if rel {
            bitmap[i / 8] |= 1 << (i % 8);
        }
    }
    out.extend_from_slice(&bitmap);
    let floats = std::iter::once(model.embeddings.matrix().as_slice())
        .chain(model.params.blocks())
        .flatten();
    for x in floats {
        out.extend_from_slice(&x.to_le_bytes());
    }
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| AppError::ModelFile(format!("truncated at byte {}", self.pos)))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<usize> {
        let v = u64::from_le_bytes(self.take(8)?.try_into().unwrap());
        usize::try_from(v).map_err(|_| AppError::ModelFile(format!("size {v} too large")))
    }

    fn floats(&mut self, n: usize) -> Result<Vec<f64>> {
        let bytes = self.take(
            n.checked_mul(8)
                .ok_or_else(|| AppError::ModelFile("block size overflow".into()))?,
        )?;
        Ok(bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }
}

pub fn decode(buf: &[u8]) -> Result<SavedModel> {
    let mut r = Reader { buf, pos: 0 };
    if r.take(3)? != MAGIC {
        return Err(AppError::ModelFile("not a model file (bad magic)".into()));
    }
    let version = r.u8()?;
    if version != VERSION {
        return Err(AppError::ModelFile(format!(
            "unsupported format version `{}` (expected `{}`)",
            version as char, VERSION as char
        )));
    }
    let form = match r.u8()? {
        0 => Form::Linear,
        1 => Form::Bilinear,
        t => return Err(AppError::ModelFile(format!("unknown form tag {t}"))),
    };
    let (d, p, n) = (r.u64()?, r.u64()?, r.u64()?);

    let mut symbols = Vec::with_capacity(n.min(1 << 20));
    for _ in 0..n {
        let len = r.u32()? as usize;
        let s = std::str::from_utf8(r.take(len)?)
            .map_err(|e| AppError::ModelFile(format!("symbol is not UTF-8: {e}")))?;
        symbols.push(s.to_owned());
    }
    let bitmap = r.take(n.div_ceil(8))?;
    let relations: Vec<bool> = (0..n)
        .map(|i| bitmap[i / 8] & (1 << (i % 8)) != 0)
        .collect();
    let dictionary = Dictionary::from_parts(symbols, relations.clone())?;

    let embeddings =
        EmbeddingTable::from_matrix(Matrix::from_vec(n, d, r.floats(n * d)?)?, relations)?;
    let mut matrix = || -> Result<Matrix> { Ok(Matrix::from_vec(p, d, r.floats(p * d)?)?) };
    let params = match form {
        Form::Linear => {
            let (w_l1, w_l2, w_r1, w_r2) = (matrix()?, matrix()?, matrix()?, matrix()?);
            Params::Linear(LinearParams {
                w_l1,
                w_l2,
                w_r1,
                w_r2,
                b_l: r.floats(p)?,
                b_r: r.floats(p)?,
            })
        }
        Form::Bilinear => {
            let w_l = Tensor3::from_vec((p, d, d), r.floats(p * d * d)?)?;
            let w_r = Tensor3::from_vec((p, d, d), r.floats(p * d * d)?)?;
            Params::Bilinear(BilinearParams {
                w_l,
                w_r,
                b_l: r.floats(p)?,
                b_r: r.floats(p)?,
            })
        }
    };
    if r.pos != buf.len() {
        return Err(AppError::ModelFile(format!(
            "{} trailing bytes",
            buf.len() - r.pos
        )));
    }
    Ok(SavedModel {
        dictionary,
        model: Model::new(embeddings, params)?,
    })
}

pub fn save(path: &Path, saved: &SavedModel) -> Result<()> {
    fs::write(path, encode(saved)).map_err(|source| AppError::Io {
        path: path.to_owned(),
        source,
    })
}

pub fn load(path: &Path) -> Result<SavedModel> {
    let buf = fs::read(path).map_err(|source| AppError::Io {
        path: path.to_owned(),
        source,
    })?;
    decode(&buf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use sme_core::dataset::parse_triples;

    fn saved(form: Form) -> SavedModel {
        let text = "a\tr\tb\t1\nb\ts\tc\t0\nc\tr\ta\t1\nd\ts\td\t1\ne\tr\tf\t0\n\
                    f\ts\tg\t1\ng\tr\th\t0\nh\ts\ti\t1\ni\tr\tj\t0\n";
        let (dictionary, _) = parse_triples(text).unwrap();
        let n = dictionary.len();
        let vectors = Matrix::from_fn(n, 3, |i, j| (i * 3 + j) as f64 * 0.37 - 1.1);
        let embeddings =
            EmbeddingTable::from_matrix(vectors, dictionary.relation_flags().to_vec()).unwrap();
        let mut params = Params::zeros(form, 3, 2);
        for (b, block) in params.blocks_mut().into_iter().enumerate() {
            for (i, x) in block.iter_mut().enumerate() {
                *x = ((b * 31 + i * 7) % 13) as f64 / 3.0 - 2.0;
            }
        }
        params.blocks_mut().last_mut().unwrap()[0] = -0.0;
        let model = Model::new(embeddings, params).unwrap();
        SavedModel { dictionary, model }
    }

    #[test]
    fn roundtrip_is_bitwise() {
        for form in [Form::Linear, Form::Bilinear] {
            let s = saved(form);
            let bytes = encode(&s);
            let back = decode(&bytes).unwrap();
            assert_eq!(encode(&back), bytes);
            assert_eq!(back.dictionary, s.dictionary);
            for (a, b) in back
                .model
                .params
                .blocks()
                .iter()
                .zip(s.model.params.blocks())
            {
                assert!(a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits()));
            }
        }
    }

    #[test]
    fn header_layout() {
        let bytes = encode(&saved(Form::Bilinear));
        assert_eq!(&bytes[..4], b"SME1");
        assert_eq!(bytes[4], 1);
        assert_eq!(u64::from_le_bytes(bytes[5..13].try_into().unwrap()), 3);
        assert_eq!(u64::from_le_bytes(bytes[13..21].try_into().unwrap()), 2);
        assert_eq!(u64::from_le_bytes(bytes[21..29].try_into().unwrap()), 12);
    }

    #[test]
    fn rejects_bad_input() {
        let mut bytes = encode(&saved(Form::Linear));
        bytes[3] = b'2';
        let err = decode(&bytes).unwrap_err().to_string();
        assert!(err.contains("version"), "{err}");
        bytes[0] = b'X';
        assert!(decode(&bytes).is_err());

        let mut good = encode(&saved(Form::Linear));
        good.push(0);
        assert!(decode(&good).unwrap_err().to_string().contains("trailing"));
        good.truncate(good.len() - 9);
        assert!(decode(&good).unwrap_err().to_string().contains("truncated"));
    }
}

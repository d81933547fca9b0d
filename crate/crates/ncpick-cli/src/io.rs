//! JSON encodings of matrices, symbols, realizations and problem files.

use std::fmt;

use ncpick::fock::MultiAnalyticSymbol;
use ncpick::series::Realization;
use ncpick::{CMat, Word, C64};
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;

/// A float written with 17 significant digits; non-finite values become the strings "inf", "-inf", "nan".
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let x = self.0;
        if x.is_nan() {
            s.serialize_str("nan")
        } else if x.is_infinite() {
            s.serialize_str(if x > 0.0 { "inf" } else { "-inf" })
        } else {
            let raw =
                RawValue::from_string(format!("{x:.16e}")).map_err(serde::ser::Error::custom)?;
            raw.serialize(s)
        }
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Num;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or one of \"inf\", \"-inf\", \"nan\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Num, E> {
                Ok(Num(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Num, E> {
                Ok(Num(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Num, E> {
                Ok(Num(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Num, E> {
                match v {
                    "inf" => Ok(Num(f64::INFINITY)),
                    "-inf" => Ok(Num(f64::NEG_INFINITY)),
                    "nan" => Ok(Num(f64::NAN)),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum Cplx {
    Real(Num),
    Pair([Num; 2]),
}

impl Cplx {
    pub fn value(&self) -> C64 {
        match self {
            Cplx::Real(x) => C64::new(x.0, 0.0),
            Cplx::Pair([a, b]) => C64::new(a.0, b.0),
        }
    }

    pub fn from(z: C64) -> Self {
        Cplx::Pair([Num(z.re), Num(z.im)])
    }
}

/// Row-major list of rows.
pub type MatrixJson = Vec<Vec<Cplx>>;

pub fn matrix_in(m: &MatrixJson, field: &str) -> Result<CMat, String> {
    let rows = m.len();
    if rows == 0 {
        return Err(format!("{field}: matrix has no rows"));
    }
    let cols = m[0].len();
    if cols == 0 || m.iter().any(|r| r.len() != cols) {
        return Err(format!(
            "{field}: rows must be non-empty and of equal length"
        ));
    }
    Ok(CMat::from_fn(rows, cols, |i, j| m[i][j].value()))
}

pub fn matrix_out(m: &CMat) -> MatrixJson {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| Cplx::from(m[(i, j)])).collect())
        .collect()
}

pub fn vector_in(v: &[Cplx]) -> Vec<C64> {
    v.iter().map(Cplx::value).collect()
}

/// `[[word, matrix], …]` with words as in [`Word::parse`].
pub type PairsJson = Vec<(String, MatrixJson)>;

pub fn symbol_in(n: usize, pairs: &PairsJson, field: &str) -> Result<MultiAnalyticSymbol, String> {
    if pairs.is_empty() {
        return Err(format!("{field}: at least one coefficient is required"));
    }
    let mut out = Vec::with_capacity(pairs.len());
    for (k, (w, m)) in pairs.iter().enumerate() {
        let word = Word::parse(w, n).map_err(|e| format!("{field}[{k}]: {e}"))?;
        out.push((word, matrix_in(m, &format!("{field}[{k}]"))?));
    }
    let (r, c) = out[0].1.shape();
    MultiAnalyticSymbol::from_pairs(n, r, c, &out).map_err(|e| format!("{field}: {e}"))
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct SymbolJson {
    pub n: usize,
    pub d_out: usize,
    pub d_in: usize,
    pub degree: usize,
    pub coefficients: PairsJson,
}

impl SymbolJson {
    pub fn from_symbol(s: &MultiAnalyticSymbol) -> Self {
        let ix = s.index();
        let coefficients = (0..ix.len())
            .map(|g| (ix.word(g).to_string(), matrix_out(s.coeff(g))))
            .collect();
        SymbolJson {
            n: s.n(),
            d_out: s.d_out(),
            d_in: s.d_in(),
            degree: s.degree_bound(),
            coefficients,
        }
    }

    pub fn to_symbol(&self) -> Result<MultiAnalyticSymbol, String> {
        let mut s = MultiAnalyticSymbol::zero(self.n, self.d_out, self.d_in, self.degree)
            .map_err(|e| e.to_string())?;
        for (k, (w, m)) in self.coefficients.iter().enumerate() {
            let field = format!("coefficients[{k}]");
            let word = Word::parse(w, self.n).map_err(|e| format!("{field}: {e}"))?;
            let m = matrix_in(m, &field)?;
            if m.shape() != (self.d_out, self.d_in) {
                return Err(format!(
                    "{field}: expected a {}×{} block",
                    self.d_out, self.d_in
                ));
            }
            s.set(&word, m).map_err(|e| format!("{field}: {e}"))?;
        }
        Ok(s)
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct RealizationJson {
    pub n: usize,
    #[serde(rename = "D")]
    pub d: MatrixJson,
    #[serde(rename = "C")]
    pub c: Option<MatrixJson>,
    #[serde(rename = "A")]
    pub a: Vec<MatrixJson>,
    #[serde(rename = "B")]
    pub b: Vec<MatrixJson>,
}

impl RealizationJson {
    pub fn from_realization(r: &Realization) -> Self {
        let c = if r.state_dim() == 0 {
            None
        } else {
            Some(matrix_out(r.output()))
        };
        RealizationJson {
            n: r.n(),
            d: matrix_out(r.feedthrough()),
            c,
            a: if r.state_dim() == 0 {
                Vec::new()
            } else {
                r.state_ops().iter().map(matrix_out).collect()
            },
            b: if r.state_dim() == 0 {
                Vec::new()
            } else {
                r.inputs().iter().map(matrix_out).collect()
            },
        }
    }

    pub fn to_realization(&self) -> Result<Realization, String> {
        let d = matrix_in(&self.d, "realization.D")?;
        let c = match &self.c {
            None => return Realization::constant(self.n, d).map_err(|e| e.to_string()),
            Some(c) => matrix_in(c, "realization.C")?,
        };
        let a = self
            .a
            .iter()
            .map(|m| matrix_in(m, "realization.A"))
            .collect::<Result<Vec<_>, _>>()?;
        let b = self
            .b
            .iter()
            .map(|m| matrix_in(m, "realization.B"))
            .collect::<Result<Vec<_>, _>>()?;
        Realization::new(d, c, a, b).map_err(|e| e.to_string())
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum SubspaceJson {
    Cutoff {
        cutoff: usize,
    },
    Kernel {
        points: Vec<Vec<Cplx>>,
        directions: Vec<MatrixJson>,
    },
}

macro_rules! input_files {
    ($($variant:ident($file:ident) = $tag:literal { $($(#[$meta:meta])* $field:ident: $ty:ty,)* })*) => {
        $(
            #[derive(Clone, Debug, Deserialize)]
            pub struct $file {
                $($(#[$meta])* pub $field: $ty,)*
            }
        )*

        /// Problem and operator files, tagged by `"variant"`.
        #[derive(Clone, Debug)]
        pub enum InputFile {
            $($variant($file),)*
        }

        impl InputFile {
            pub fn variant(&self) -> &'static str {
                match self {
                    $(InputFile::$variant(_) => $tag,)*
                }
            }
        }

        /// Reads `"variant"` first, then the matching layout, so errors carry line and column.
        pub fn parse_input(text: &str) -> Result<InputFile, String> {
            #[derive(Deserialize)]
            struct Tag {
                variant: String,
            }
            let tag: Tag = serde_json::from_str(text).map_err(|e| format!("malformed input: {e}"))?;
            match tag.variant.as_str() {
                $($tag => serde_json::from_str(text).map(InputFile::$variant),)*
                other => return Err(format!("unknown variant \"{other}\"")),
            }
            .map_err(|e| format!("malformed {} input: {e}", tag.variant))
        }
    };
}

input_files! {
    Ball(BallFile) = "ball" {
        t: Num,
        points: Vec<Vec<Cplx>>,
        #[serde(rename = "B")]
        b: Option<Vec<MatrixJson>>,
        #[serde(rename = "C")]
        c: Vec<MatrixJson>,
    }
    Operatorial(OperatorialFile) = "operatorial" {
        t: Num,
        #[serde(rename = "Z")]
        z: Vec<MatrixJson>,
        #[serde(rename = "B")]
        b: MatrixJson,
        #[serde(rename = "C")]
        c: MatrixJson,
    }
    Cs(CsFile) = "cs" {
        n: usize,
        t: Option<Num>,
        degree: Option<usize>,
        prescribed: PairsJson,
    }
    Sarason(SarasonFile) = "sarason" {
        n: usize,
        t: Num,
        #[serde(rename = "R")]
        r: PairsJson,
        subspace: SubspaceJson,
    }
    Symbol(SymbolFile) = "symbol" {
        n: usize,
        t: Num,
        symbol: PairsJson,
    }
    Toeplitz(ToeplitzFile) = "toeplitz" {
        n: usize,
        kernel: PairsJson,
    }
    Tuple(TupleFile) = "tuple" {
        #[serde(rename = "Z")]
        z: Vec<MatrixJson>,
    }
}

/// Hex SHA-256 of the input bytes.
pub fn digest(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

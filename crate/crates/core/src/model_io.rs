//! Text serialization of fitted pipelines.
//!
//! The format is line-oriented UTF-8 with tab-separated fields. Every real
//! number is written as the 16 hex digits of its IEEE-754 bit pattern, so a
//! round trip is bit-exact.
//!
//! ```text
//! dirad-model    1
//! attribute      <name>  <high|low|none>        one line per attribute
//! scaler         none                          or the two lines below
//! midhinge       <f64>…
//! semi_iqr       <f64>…
//! detector       <nnd|alp>
//! variant        <absolute|ramp|signed>
//! distance       <exponent>  <variant>…         one variant per attribute
//! weights        <f64>…                        nnd
//! sorted_sums    <f64>…                        nnd, signed variant only
//! k_weights      <f64>…                        alp
//! l_weights      <f64>…                        alp
//! train          <rows>  <cols>                followed by <rows> lines of <f64>…
//! train_nn_dists <rows>  <cols>                alp, followed by <rows> lines
//! end
//! ```

use std::path::Path;

use crate::alp::AlpModel;
use crate::dataset::{AttributeSpec, ScalingParams};
use crate::distance::{DistanceSpec, DistanceVariant};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::nnd::{NndModel, SignedParts};
use crate::pipeline::{FittedPipeline, Model};

const MAGIC: &str = "dirad-model";
const VERSION: &str = "1";

fn hex(v: f64) -> String {
    format!("{:016x}", v.to_bits())
}

fn line(out: &mut String, tag: &str, fields: impl IntoIterator<Item = String>) {
    out.push_str(tag);
    for f in fields {
        out.push('\t');
        out.push_str(&f);
    }
    out.push('\n');
}

fn floats(out: &mut String, tag: &str, values: &[f64]) {
    line(out, tag, values.iter().map(|&v| hex(v)));
}

fn matrix(out: &mut String, tag: &str, m: &Matrix) {
    line(out, tag, [m.rows().to_string(), m.cols().to_string()]);
    for row in m.iter_rows() {
        let fields: Vec<String> = row.iter().map(|&v| hex(v)).collect();
        out.push_str(&fields.join("\t"));
        out.push('\n');
    }
}

pub fn to_string(p: &FittedPipeline) -> Result<String> {
    let mut out = String::new();
    line(&mut out, MAGIC, [VERSION.to_string()]);
    for a in &p.schema {
        if a.name.contains(['\t', '\n', '\r']) {
            return Err(Error::ModelFormat(format!("attribute name {:?} contains a tab or newline", a.name)));
        }
        line(&mut out, "attribute", [a.name.clone(), a.direction.to_string()]);
    }
    match &p.scaler {
        None => line(&mut out, "scaler", ["none".to_string()]),
        Some(s) => {
            floats(&mut out, "midhinge", &s.midhinge);
            floats(&mut out, "semi_iqr", &s.semi_iqr);
        }
    }
    let spec_line = |out: &mut String, spec: &DistanceSpec| {
        line(
            out,
            "distance",
            std::iter::once(hex(spec.exponent())).chain(spec.variants().iter().map(|v| v.to_string())),
        );
    };
    match &p.model {
        Model::Nnd(m) => {
            line(&mut out, "detector", ["nnd".to_string()]);
            line(&mut out, "variant", [m.variant.to_string()]);
            spec_line(&mut out, &m.spec);
            floats(&mut out, "weights", &m.weights);
            if let Some(s) = &m.signed {
                floats(&mut out, "sorted_sums", &s.sorted_sums);
            }
            matrix(&mut out, "train", &m.train);
        }
        Model::Alp(m) => {
            line(&mut out, "detector", ["alp".to_string()]);
            line(&mut out, "variant", [m.variant.to_string()]);
            spec_line(&mut out, &m.spec);
            floats(&mut out, "k_weights", &m.k_weights);
            floats(&mut out, "l_weights", &m.l_weights);
            matrix(&mut out, "train", &m.train);
            matrix(&mut out, "train_nn_dists", &m.train_nn_dists);
        }
    }
    line(&mut out, "end", []);
    Ok(out)
}

struct Reader<'a> {
    lines: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
}

impl<'a> Reader<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            lines: text.lines().enumerate().peekable(),
        }
    }

    fn err(lineno: usize, msg: impl std::fmt::Display) -> Error {
        Error::ModelFormat(format!("line {}: {msg}", lineno + 1))
    }

    fn peek_tag(&mut self) -> Option<&'a str> {
        self.lines.peek().map(|(_, l)| l.split('\t').next().unwrap_or(""))
    }

    fn raw(&mut self) -> Result<(usize, Vec<&'a str>)> {
        let (n, l) = self
            .lines
            .next()
            .ok_or_else(|| Error::ModelFormat("unexpected end of file".into()))?;
        Ok((n, l.split('\t').collect()))
    }

    fn tagged(&mut self, tag: &str) -> Result<(usize, Vec<&'a str>)> {
        let (n, mut fields) = self.raw()?;
        if fields[0] != tag {
            return Err(Self::err(n, format!("expected `{tag}`, found `{}`", fields[0])));
        }
        fields.remove(0);
        Ok((n, fields))
    }

    fn floats(&mut self, tag: &str) -> Result<Vec<f64>> {
        let (n, fields) = self.tagged(tag)?;
        fields.iter().map(|f| parse_hex(n, f)).collect()
    }

    fn matrix(&mut self, tag: &str) -> Result<Matrix> {
        let (n, fields) = self.tagged(tag)?;
        let dims: Vec<usize> = fields
            .iter()
            .map(|f| f.parse().map_err(|_| Self::err(n, "bad matrix dimensions")))
            .collect::<Result<_>>()?;
        let [rows, cols] = dims[..] else {
            return Err(Self::err(n, "expected `<rows> <cols>`"));
        };
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            let (n, fields) = self.raw()?;
            let fields: Vec<&str> = fields.into_iter().filter(|f| !f.is_empty()).collect();
            if fields.len() != cols {
                return Err(Self::err(n, format!("expected {cols} values, found {}", fields.len())));
            }
            for f in fields {
                data.push(parse_hex(n, f)?);
            }
        }
        Matrix::new(rows, cols, data)
    }
}

fn parse_hex(lineno: usize, field: &str) -> Result<f64> {
    if field.len() != 16 {
        return Err(Reader::err(lineno, format!("bad number `{field}`")));
    }
    u64::from_str_radix(field, 16)
        .map(f64::from_bits)
        .map_err(|_| Reader::err(lineno, format!("bad number `{field}`")))
}

fn single<'a>(n: usize, fields: &[&'a str]) -> Result<&'a str> {
    match fields {
        [one] => Ok(one),
        _ => Err(Reader::err(n, "expected exactly one field")),
    }
}

pub fn from_str(text: &str) -> Result<FittedPipeline> {
    let mut r = Reader::new(text);
    let (n, fields) = r.tagged(MAGIC).map_err(|_| Error::ModelFormat("not a model file".into()))?;
    if single(n, &fields)? != VERSION {
        return Err(Reader::err(n, format!("unsupported version {}", fields[0])));
    }

    let mut schema = Vec::new();
    while r.peek_tag() == Some("attribute") {
        let (n, fields) = r.tagged("attribute")?;
        let [name, dir] = fields[..] else {
            return Err(Reader::err(n, "expected `attribute <name> <direction>`"));
        };
        schema.push(AttributeSpec::new(name, dir.parse()?));
    }

    let scaler = if r.peek_tag() == Some("scaler") {
        let (n, fields) = r.tagged("scaler")?;
        if single(n, &fields)? != "none" {
            return Err(Reader::err(n, "expected `scaler none`"));
        }
        None
    } else {
        let midhinge = r.floats("midhinge")?;
        let semi_iqr = r.floats("semi_iqr")?;
        if midhinge.len() != schema.len() || semi_iqr.len() != schema.len() {
            return Err(Error::ModelFormat("scaler length does not match attribute count".into()));
        }
        Some(ScalingParams { midhinge, semi_iqr })
    };

    let (n, fields) = r.tagged("detector")?;
    let detector = single(n, &fields)?.to_string();
    let (n, fields) = r.tagged("variant")?;
    let variant: DistanceVariant = single(n, &fields)?.parse()?;
    let (n, fields) = r.tagged("distance")?;
    let (exp, vars) = fields
        .split_first()
        .ok_or_else(|| Reader::err(n, "missing exponent"))?;
    let variants = vars.iter().map(|v| v.parse()).collect::<Result<Vec<DistanceVariant>>>()?;
    let spec = DistanceSpec::new(variants, parse_hex(n, exp)?)?;

    let model = match detector.as_str() {
        "nnd" => {
            let weights = r.floats("weights")?;
            let sorted_sums = if r.peek_tag() == Some("sorted_sums") {
                Some(r.floats("sorted_sums")?)
            } else {
                None
            };
            let train = r.matrix("train")?;
            let signed = match (variant, sorted_sums) {
                (DistanceVariant::Signed, Some(sorted_sums)) => {
                    let cols = |want: bool| -> Vec<usize> {
                        (0..spec.dim())
                            .filter(|&j| (spec.variants()[j] == DistanceVariant::Signed) == want)
                            .collect()
                    };
                    let adirectional_cols = cols(false);
                    Some(SignedParts {
                        directional_cols: cols(true),
                        sorted_sums,
                        adirectional_train: (!adirectional_cols.is_empty())
                            .then(|| train.select_cols(&adirectional_cols)),
                        adirectional_cols,
                    })
                }
                (DistanceVariant::Signed, None) => {
                    return Err(Error::ModelFormat("signed model without sorted_sums".into()))
                }
                (_, Some(_)) => return Err(Error::ModelFormat("sorted_sums on a non-signed model".into())),
                (_, None) => None,
            };
            Model::Nnd(NndModel {
                train,
                weights,
                spec,
                variant,
                signed,
            })
        }
        "alp" => {
            let k_weights = r.floats("k_weights")?;
            let l_weights = r.floats("l_weights")?;
            let train = r.matrix("train")?;
            let train_nn_dists = r.matrix("train_nn_dists")?;
            Model::Alp(AlpModel {
                train,
                spec,
                variant,
                k_weights,
                l_weights,
                train_nn_dists,
            })
        }
        other => return Err(Error::ModelFormat(format!("unknown detector `{other}`"))),
    };
    r.tagged("end")?;

    if model.n_attributes() != schema.len() {
        return Err(Error::ModelFormat(format!(
            "model has {} attributes but the schema lists {}",
            model.n_attributes(),
            schema.len()
        )));
    }
    Ok(FittedPipeline { schema, scaler, model })
}

pub fn save(p: &FittedPipeline, path: impl AsRef<Path>) -> Result<()> {
    crate::io::write_atomic(path.as_ref(), to_string(p)?.as_bytes())
}

pub fn load(path: impl AsRef<Path>) -> Result<FittedPipeline> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    from_str(&text)
}

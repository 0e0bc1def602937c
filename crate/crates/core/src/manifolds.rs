//! Chern-number tables for concrete manifolds and a symbolic stand-in.
//!
//! A concrete manifold of complex dimension `d` is described entirely by its
//! Chern numbers `∫ c_{λ_1}...c_{λ_k}` over partitions `λ` of `d`. The
//! catalog builds them from the total Chern class of projective spaces and
//! hypersurfaces. Products use the Künneth formula.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigInt;

use crate::arith::{binomial, Rat};
use crate::cohomology::{apply_relations, integrate, partitions, BundleContext, CohClass};
use crate::error::{Error, Result};
use crate::poly::{Form, Mono, Poly, Var};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChernNumbers {
    /// Dense table over all degree-`d` monomials in `c_1..c_d`.
    Concrete(BTreeMap<Mono, BigInt>),
    /// Every Chern number stays an opaque symbol.
    Symbolic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifoldData {
    name: String,
    dim: u32,
    numbers: ChernNumbers,
}

/// Degree-`d` monomials in `c_1..c_d`, in canonical order
/// (descending exponent vector `(e_1, ..., e_d)`).
pub fn chern_monomials(d: u32) -> Vec<Mono> {
    let mut out: Vec<(Vec<u32>, Mono)> = partitions(d, d, d)
        .into_iter()
        .map(|lam| {
            let mut exps = vec![0u32; d as usize];
            for &p in &lam {
                exps[p as usize - 1] += 1;
            }
            let mono = Mono::from_pairs(lam.iter().map(|&p| (Var::C(p as u8), 1)));
            (exps, mono)
        })
        .collect();
    out.sort_by(|a, b| b.0.cmp(&a.0));
    out.into_iter().map(|(_, m)| m).collect()
}

impl ManifoldData {
    /// Builds a concrete manifold from a dense table.
    pub fn concrete(name: &str, dim: u32, table: BTreeMap<Mono, BigInt>) -> Result<Self> {
        for m in chern_monomials(dim) {
            if !table.contains_key(&m) {
                return Err(Error::MissingChernNumber {
                    monomial: m.to_string(),
                    manifold: name.into(),
                });
            }
        }
        if table.len() != chern_monomials(dim).len() {
            return Err(Error::InvalidArgument(format!(
                "{name}: table has monomials of the wrong degree or generators"
            )));
        }
        Ok(ManifoldData {
            name: name.into(),
            dim,
            numbers: ChernNumbers::Concrete(table),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn numbers(&self) -> &ChernNumbers {
        &self.numbers
    }

    pub fn is_symbolic(&self) -> bool {
        matches!(self.numbers, ChernNumbers::Symbolic)
    }

    /// `∫_M mono` as a form: a constant for concrete manifolds, a symbol
    /// otherwise.
    pub fn chern_number(&self, mono: &Mono) -> Result<Form> {
        if mono.degree() != self.dim {
            return Err(Error::InvalidArgument(format!(
                "{mono} has degree {} but {} has dimension {}",
                mono.degree(),
                self.name,
                self.dim
            )));
        }
        let missing = || Error::MissingChernNumber {
            monomial: mono.to_string(),
            manifold: self.name.clone(),
        };
        match &self.numbers {
            ChernNumbers::Symbolic => {
                if mono.contains(Var::is_root) || mono.contains(|v| matches!(v, Var::Y(_))) {
                    return Err(missing());
                }
                if mono.is_one() {
                    Ok(Form::constant(Rat::one()))
                } else {
                    Ok(Form::symbol(mono.clone()))
                }
            }
            ChernNumbers::Concrete(table) => table
                .get(mono)
                .map(|n| Form::constant(Rat::from(n.clone())))
                .ok_or_else(missing),
        }
    }

    /// Integer Chern number of a concrete manifold.
    pub fn chern_number_int(&self, mono: &Mono) -> Result<BigInt> {
        match &self.numbers {
            ChernNumbers::Concrete(table) => table.get(mono).cloned().ok_or(Error::MissingChernNumber {
                monomial: mono.to_string(),
                manifold: self.name.clone(),
            }),
            ChernNumbers::Symbolic => Err(Error::Unsupported(format!(
                "{} has no numeric Chern numbers",
                self.name
            ))),
        }
    }

    /// Checks that the relations of `ctx` hold on `M` with `W = TM`: every
    /// Chern number is unchanged by the relation substitution.
    pub fn check_relations(&self, ctx: &BundleContext) -> Result<()> {
        if self.is_symbolic() {
            return Ok(());
        }
        for m in chern_monomials(self.dim) {
            let x = CohClass::<Rat>::monomial(m.clone(), Rat::one(), self.dim);
            let before = integrate(&x, self)?;
            let after = integrate(&apply_relations(&x, ctx)?, self)?;
            if before != after {
                return Err(Error::UnsatisfiableRelation(format!(
                    "{} does not satisfy the relations: ∫{m} = {before}, but {after} after substitution",
                    self.name
                )));
            }
        }
        Ok(())
    }
}

/// Manifold with symbolic Chern numbers in dimension `d`.
pub fn symbolic_manifold(d: u32) -> Result<ManifoldData> {
    if d < 1 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    Ok(ManifoldData {
        name: format!("M{d}"),
        dim: d,
        numbers: ChernNumbers::Symbolic,
    })
}

/// Chern numbers from `c_k = a_k h^k` with `∫ h^d = top`.
fn from_hyperplane_powers(name: &str, dim: u32, a: &[BigInt], top: &BigInt) -> Result<ManifoldData> {
    let mut table = BTreeMap::new();
    for m in chern_monomials(dim) {
        let mut v = top.clone();
        for &(var, e) in m.pairs() {
            if let Var::C(k) = var {
                v *= a[k as usize].pow(e);
            }
        }
        table.insert(m, v);
    }
    ManifoldData::concrete(name, dim, table)
}

/// `CP^n`: `c = (1+h)^{n+1}`, `∫ h^n = 1`.
pub fn projective_space(n: u32) -> Result<ManifoldData> {
    if n < 1 {
        return Err(Error::InvalidArgument("projective space needs n >= 1".into()));
    }
    let a: Vec<BigInt> = (0..=n as i64)
        .map(|k| binomial(n as i64 + 1, k))
        .collect::<Result<_>>()?;
    from_hyperplane_powers(&format!("cp{n}"), n, &a, &BigInt::from(1))
}

/// Smooth degree-`a` hypersurface in `CP^n`:
/// `c = (1+h)^{n+1}/(1+ah)`, `∫ h^{n-1} = a`.
pub fn hypersurface(n: u32, a: i64) -> Result<ManifoldData> {
    if n < 2 || a < 1 {
        return Err(Error::InvalidArgument(
            "hypersurface needs ambient dimension >= 2 and degree >= 1".into(),
        ));
    }
    let dim = n - 1;
    let coeffs: Vec<BigInt> = (0..=dim as i64)
        .map(|k| {
            (0..=k)
                .map(|j| Ok(binomial(n as i64 + 1, j)? * BigInt::from(-a).pow((k - j) as u32)))
                .sum::<Result<BigInt>>()
        })
        .collect::<Result<_>>()?;
    from_hyperplane_powers(&format!("hypersurface{n}_{a}"), dim, &coeffs, &BigInt::from(a))
}

/// The one-point manifold, unit for products.
pub fn point() -> ManifoldData {
    let mut table = BTreeMap::new();
    table.insert(Mono::one(), BigInt::from(1));
    ManifoldData {
        name: "point".into(),
        dim: 0,
        numbers: ChernNumbers::Concrete(table),
    }
}

/// `M × N` with `c(M × N) = c(M)·c(N)`.
pub fn product(m: &ManifoldData, n: &ManifoldData) -> Result<ManifoldData> {
    let (tm, tn) = match (&m.numbers, &n.numbers) {
        (ChernNumbers::Concrete(a), ChernNumbers::Concrete(b)) => (a, b),
        _ => return Err(Error::Unsupported("products of symbolic manifolds".into())),
    };
    let dim = m.dim + n.dim;
    // Chern classes of M as c_i, of N as w_j in a scratch ring
    let total = |k: u32| {
        let mut p = Poly::<Rat>::new();
        for i in 0..=k.min(m.dim) {
            let j = k - i;
            if j > n.dim {
                continue;
            }
            let mut mono = Mono::one();
            if i > 0 {
                mono = mono.mul(&Mono::var(Var::C(i as u8)));
            }
            if j > 0 {
                mono = mono.mul(&Mono::var(Var::W(j as u8)));
            }
            p.add_term(mono, Rat::one());
        }
        p
    };
    let mut table = BTreeMap::new();
    for mono in chern_monomials(dim) {
        let mut expanded = Poly::constant(Rat::one());
        for &(var, e) in mono.pairs() {
            if let Var::C(k) = var {
                for _ in 0..e {
                    expanded = expanded.mul_truncated(&total(k as u32), dim);
                }
            }
        }
        let mut value = BigInt::from(0);
        for (term, coeff) in expanded.terms() {
            let (left, right) = term.split(|v| matches!(v, Var::C(_)));
            if left.degree() != m.dim {
                continue;
            }
            let right = right.rename(|v| match v {
                Var::W(j) => Var::C(j),
                other => other,
            });
            let a = tm.get(&left).expect("dense table");
            let b = tn.get(&right).expect("dense table");
            value += coeff.to_integer().expect("integral multinomial") * a * b;
        }
        table.insert(mono, value);
    }
    let name = if m.dim == 0 {
        n.name.clone()
    } else if n.dim == 0 {
        m.name.clone()
    } else {
        format!("{}x{}", m.name, n.name)
    };
    if dim == 0 {
        return Ok(point());
    }
    ManifoldData::concrete(&name, dim, table)
}

pub fn k3() -> ManifoldData {
    let mut m = hypersurface(3, 4).expect("quartic surface");
    m.name = "k3".into();
    m
}

pub fn quintic() -> ManifoldData {
    let mut m = hypersurface(4, 5).expect("quintic threefold");
    m.name = "quintic".into();
    m
}

pub const CATALOG_NAMES: [&str; 6] = ["cp1", "cp2", "cp3", "k3", "quintic", "cp1xcp1"];

/// Built-in manifolds by name.
pub fn catalog(name: &str) -> Option<ManifoldData> {
    match name {
        "cp1" | "cp2" | "cp3" => projective_space(name[2..].parse().ok()?).ok(),
        "k3" => Some(k3()),
        "quintic" => Some(quintic()),
        "cp1xcp1" => {
            let p = projective_space(1).ok()?;
            product(&p, &p).ok()
        }
        _ => None,
    }
}

/// Catalog name, `symbolic:<d>`, or path to a spec file.
pub fn load(name_or_path: &str) -> Result<ManifoldData> {
    if let Some(m) = catalog(name_or_path) {
        return Ok(m);
    }
    if let Some(d) = name_or_path.strip_prefix("symbolic:") {
        let d = d
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad dimension in '{name_or_path}'")))?;
        return symbolic_manifold(d);
    }
    let path = Path::new(name_or_path);
    if !path.exists() {
        return Err(Error::InvalidArgument(format!(
            "unknown manifold '{name_or_path}' (catalog: {})",
            CATALOG_NAMES.join(", ")
        )));
    }
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {name_or_path}: {e}")))?;
    parse_spec(&text)
}

pub fn serialize_spec(m: &ManifoldData) -> String {
    let mut out = String::new();
    writeln!(out, "name = {}", m.name).unwrap();
    writeln!(out, "dimension = {}", m.dim).unwrap();
    match &m.numbers {
        ChernNumbers::Symbolic => writeln!(out, "symbolic = true").unwrap(),
        ChernNumbers::Concrete(table) => {
            for mono in chern_monomials(m.dim) {
                writeln!(out, "{mono} = {}", table[&mono]).unwrap();
            }
        }
    }
    out
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Parses `c1^2 c2`-style monomials; `col` is the 1-based column of `s`.
fn parse_monomial(s: &str, line: usize, col: usize) -> Result<Mono> {
    let mut pairs = Vec::new();
    let mut offset = 0;
    for token in s.split(' ') {
        let here = col + offset;
        offset += token.len() + 1;
        if token.is_empty() {
            continue;
        }
        let (base, exp) = match token.split_once('^') {
            Some((b, e)) => {
                let e: u32 = e
                    .parse()
                    .map_err(|_| parse_err(line, here + b.len() + 1, format!("bad exponent in '{token}'")))?;
                if e == 0 {
                    return Err(parse_err(line, here + b.len() + 1, "zero exponent"));
                }
                (b, e)
            }
            None => (token, 1),
        };
        let k: u8 = base
            .strip_prefix('c')
            .and_then(|k| k.parse().ok())
            .filter(|&k| k >= 1)
            .ok_or_else(|| parse_err(line, here, format!("expected a Chern class c<k>, found '{base}'")))?;
        pairs.push((Var::C(k), exp));
    }
    if pairs.is_empty() {
        return Err(parse_err(line, col, "empty key"));
    }
    Ok(Mono::from_pairs(pairs))
}

pub fn parse_spec(text: &str) -> Result<ManifoldData> {
    let mut name: Option<String> = None;
    let mut dim: Option<(u32, usize)> = None;
    let mut symbolic = false;
    let mut entries: Vec<(Mono, BigInt, usize, usize)> = Vec::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let Some(eq) = content.find('=') else {
            return Err(parse_err(line, content.len() - content.trim_start().len() + 1, "expected 'key = value'"));
        };
        let key_raw = &content[..eq];
        let key = key_raw.trim();
        let key_col = key_raw.len() - key_raw.trim_start().len() + 1;
        let value_raw = &content[eq + 1..];
        let value = value_raw.trim();
        let value_col = eq + 2 + (value_raw.len() - value_raw.trim_start().len());
        if value.is_empty() {
            return Err(parse_err(line, value_col, "missing value"));
        }
        match key {
            "name" => {
                if name.is_some() {
                    return Err(parse_err(line, key_col, "duplicate 'name'"));
                }
                name = Some(value.to_string());
            }
            "dimension" => {
                if dim.is_some() {
                    return Err(parse_err(line, key_col, "duplicate 'dimension'"));
                }
                let d: u32 = value
                    .parse()
                    .map_err(|_| parse_err(line, value_col, format!("bad dimension '{value}'")))?;
                dim = Some((d, line));
            }
            "symbolic" => {
                symbolic = match value {
                    "true" => true,
                    "false" => false,
                    _ => return Err(parse_err(line, value_col, "expected 'true' or 'false'")),
                }
            }
            _ => {
                let mono = parse_monomial(key, line, key_col)?;
                let n: BigInt = value
                    .parse()
                    .map_err(|_| parse_err(line, value_col, format!("expected an integer, found '{value}'")))?;
                entries.push((mono, n, line, key_col));
            }
        }
    }
    let name = name.ok_or_else(|| parse_err(last_line.max(1), 1, "missing 'name'"))?;
    let (dim, dim_line) = dim.ok_or_else(|| parse_err(last_line.max(1), 1, "missing 'dimension'"))?;
    if symbolic {
        if let Some((_, _, line, col)) = entries.first() {
            return Err(parse_err(*line, *col, "symbolic manifold cannot list Chern numbers"));
        }
        let mut m = symbolic_manifold(dim).map_err(|e| parse_err(dim_line, 1, e.to_string()))?;
        m.name = name;
        return Ok(m);
    }
    let mut table = BTreeMap::new();
    for (mono, n, line, col) in entries {
        if mono.degree() != dim {
            return Err(parse_err(line, col, format!("{mono} has degree {} but dimension is {dim}", mono.degree())));
        }
        if table.insert(mono.clone(), n).is_some() {
            return Err(parse_err(line, col, format!("duplicate entry for {mono}")));
        }
    }
    if dim == 0 {
        return Ok(ManifoldData { name, ..point() });
    }
    ManifoldData::concrete(&name, dim, table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn num(m: &ManifoldData, s: &str) -> i64 {
        let mono = parse_monomial(s, 1, 1).unwrap();
        m.chern_number_int(&mono).unwrap().try_into().unwrap()
    }

    #[test]
    fn canonical_order() {
        let names: Vec<String> = chern_monomials(3).iter().map(|m| m.to_string()).collect();
        assert_eq!(names, ["c1^3", "c1 c2", "c3"]);
        let names: Vec<String> = chern_monomials(2).iter().map(|m| m.to_string()).collect();
        assert_eq!(names, ["c1^2", "c2"]);
        assert_eq!(chern_monomials(4).len(), 5);
    }

    #[test]
    fn catalog_numbers() {
        let cp2 = catalog("cp2").unwrap();
        assert_eq!((num(&cp2, "c1^2"), num(&cp2, "c2")), (9, 3));
        let cp3 = catalog("cp3").unwrap();
        assert_eq!((num(&cp3, "c1^3"), num(&cp3, "c1 c2"), num(&cp3, "c3")), (64, 24, 4));
        let k3 = catalog("k3").unwrap();
        assert_eq!((num(&k3, "c1^2"), num(&k3, "c2")), (0, 24));
        let quintic = catalog("quintic").unwrap();
        assert_eq!(num(&quintic, "c3"), -200);
        assert_eq!(num(&quintic, "c1^3"), 0);
        let p1p1 = catalog("cp1xcp1").unwrap();
        assert_eq!((num(&p1p1, "c1^2"), num(&p1p1, "c2")), (8, 4));
        for name in CATALOG_NAMES {
            assert!(catalog(name).is_some(), "{name}");
        }
        assert!(catalog("cp9").is_none());
    }

    #[test]
    fn product_with_point() {
        let cp2 = projective_space(2).unwrap();
        assert_eq!(product(&cp2, &point()).unwrap(), cp2);
        assert_eq!(product(&point(), &cp2).unwrap().numbers(), cp2.numbers());
    }

    #[test]
    fn product_euler_characteristic() {
        // χ(M×N) = χ(M)χ(N): top Chern class
        let cp2 = projective_space(2).unwrap();
        let cp1 = projective_space(1).unwrap();
        let m = product(&cp2, &cp1).unwrap();
        assert_eq!(num(&m, "c3"), 6);
        let k3 = k3();
        let m = product(&k3, &k3).unwrap();
        assert_eq!(num(&m, "c4"), 576);
    }

    #[test]
    fn spec_round_trip() {
        for name in CATALOG_NAMES {
            let m = catalog(name).unwrap();
            let text = serialize_spec(&m);
            let back = parse_spec(&text).unwrap();
            assert_eq!(back, m);
            assert_eq!(serialize_spec(&back), text);
        }
        let sym = symbolic_manifold(3).unwrap();
        assert_eq!(parse_spec(&serialize_spec(&sym)).unwrap(), sym);
    }

    #[test]
    fn data_files_match_catalog() {
        let files = [
            ("cp1", include_str!("../data/cp1.spec")),
            ("cp2", include_str!("../data/cp2.spec")),
            ("cp3", include_str!("../data/cp3.spec")),
            ("k3", include_str!("../data/k3.spec")),
            ("quintic", include_str!("../data/quintic.spec")),
            ("cp1xcp1", include_str!("../data/cp1xcp1.spec")),
        ];
        for (name, text) in files {
            assert_eq!(parse_spec(text).unwrap(), catalog(name).unwrap(), "{name}");
        }
    }

    #[test]
    fn spec_errors() {
        let missing = "name = x\ndimension = 2\nc1^2 = 9\n";
        assert!(matches!(parse_spec(missing), Err(Error::MissingChernNumber { .. })));
        let bad = "name = x\ndimension = 2\nc1^2 = 9\nc2 = three\n";
        assert!(matches!(parse_spec(bad), Err(Error::Parse { line: 4, column: 6, .. })));
        let bad_key = "name = x\ndimension = 2\n  d2 = 3\n";
        assert!(matches!(parse_spec(bad_key), Err(Error::Parse { line: 3, column: 3, .. })));
        let wrong_degree = "name = x\ndimension = 2\nc3 = 1\n";
        assert!(matches!(parse_spec(wrong_degree), Err(Error::Parse { line: 3, .. })));
        let dup = "name = x\ndimension = 1\nc1 = 2\nc1 = 2\n";
        assert!(matches!(parse_spec(dup), Err(Error::Parse { line: 4, .. })));
        let comments = "# header\nname = x # trailing\ndimension = 1\n\nc1 = 2\n";
        assert_eq!(parse_spec(comments).unwrap().chern_number_int(&Mono::var(Var::C(1))).unwrap(), BigInt::from(2));
    }

    #[test]
    fn symbolic_numbers() {
        let m = symbolic_manifold(2).unwrap();
        let f = m.chern_number(&Mono::from_pairs([(Var::C(1), 2)])).unwrap();
        assert_eq!(f.to_string(), "[c1^2]");
        assert!(m.chern_number(&Mono::var(Var::C(1))).is_err());
    }

    #[test]
    fn relation_check() {
        let ctx = BundleContext::with_relations(2, 2).unwrap();
        assert!(k3().check_relations(&ctx).is_ok());
        assert!(matches!(
            projective_space(2).unwrap().check_relations(&ctx),
            Err(Error::UnsatisfiableRelation(_))
        ));
    }
}
